//! Seeded synthetic SERP streams with known ground truth.
//!
//! A stream follows a fixed population of `pages * per_page` stories. On
//! day 0 each page holds `per_page` fresh stories. On every later day each
//! visible story is retired with probability `replacement_rate` and its slot
//! goes to a fresh story on the same page; every other story moves to the
//! state drawn from its row of the transition kernel (state 0 keeps a story
//! alive but out of view). Without a kernel stories stay on their page.
//!
//! Randomness comes from ChaCha8 seeded with `seed`, which yields the same
//! stream on every platform.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::churn::STATES;
use crate::error::{Error, Result};
use crate::model::{SerpResult, SerpSnapshot, Vertical, MAX_PAGES};
use crate::store::{add_days, CollectionStore};

pub mod oracle;

pub type Kernel = [[f64; STATES]; STATES];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub days: usize,
    pub pages: u8,
    pub per_page: usize,
    pub replacement_rate: f64,
    /// Row-stochastic day-to-day move probabilities over states 0-5.
    pub transition_kernel: Option<Kernel>,
    pub seed: u64,
    pub topic: String,
    pub vertical: Vertical,
    pub start_date: NaiveDate,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            days: 30,
            pages: MAX_PAGES,
            per_page: 10,
            replacement_rate: 0.3,
            transition_kernel: None,
            seed: 0,
            topic: "synthetic".into(),
            vertical: Vertical::General,
            start_date: NaiveDate::from_ymd_opt(2017, 5, 25).expect("valid date"),
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        if self.days == 0 {
            return Err(Error::invalid("synth params", "days must be at least 1"));
        }
        if !(1..=MAX_PAGES).contains(&self.pages) {
            return Err(Error::invalid(
                "synth params",
                format!("pages must be 1-{MAX_PAGES}"),
            ));
        }
        if self.per_page == 0 {
            return Err(Error::invalid(
                "synth params",
                "per_page must be at least 1",
            ));
        }
        if !(0.0..=1.0).contains(&self.replacement_rate) {
            return Err(Error::invalid(
                "synth params",
                "replacement_rate must lie in [0, 1]",
            ));
        }
        if let Some(kernel) = &self.transition_kernel {
            validate_kernel(kernel)?;
        }
        Ok(())
    }
}

pub fn validate_kernel(kernel: &Kernel) -> Result<()> {
    for (i, row) in kernel.iter().enumerate() {
        if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid(
                "transition kernel",
                format!("row {i} has an entry outside [0, 1]"),
            ));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "transition kernel",
                format!("row {i} sums to {sum}"),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Story {
    id: u64,
    /// 0 = out of view, otherwise the page.
    state: usize,
    /// Orders stories within a page; a replacement inherits its slot.
    slot: usize,
}

fn draw_state(rng: &mut ChaCha8Rng, row: &[f64; STATES]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    // rounding: fall back to the last state with mass
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn story_uri(id: u64) -> String {
    format!("synth://story/{id}")
}

/// Generates a deterministic in-memory collection from `params`.
pub fn gen_stream(params: &SynthParams) -> Result<CollectionStore> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut next_id = 0u64;
    let mut population: Vec<Story> = (0..params.pages as usize * params.per_page)
        .map(|slot| {
            let s = Story {
                id: next_id,
                state: slot / params.per_page + 1,
                slot,
            };
            next_id += 1;
            s
        })
        .collect();

    let mut store = CollectionStore::in_memory(params.topic.clone(), params.vertical);
    for day in 0..params.days {
        if day > 0 {
            for story in population.iter_mut() {
                if story.state > 0 && rng.random_bool(params.replacement_rate) {
                    story.id = next_id;
                    next_id += 1;
                } else if let Some(kernel) = &params.transition_kernel {
                    story.state = draw_state(&mut rng, &kernel[story.state]);
                }
            }
        }

        let date = add_days(params.start_date, day as u64)
            .ok_or_else(|| Error::invalid("synth params", "date overflow"))?;
        let mut visible: Vec<&Story> = population.iter().filter(|s| s.state > 0).collect();
        visible.sort_by_key(|s| (s.state, s.slot));
        let mut snapshot = SerpSnapshot::new(params.topic.clone(), params.vertical, date);
        for (i, s) in visible.iter().enumerate() {
            snapshot.results.push(SerpResult::new(
                story_uri(s.id),
                format!("synthetic story {}", s.id),
                s.state as u8,
                i as u32 + 1,
            )?);
        }
        store.ingest(snapshot)?;
    }
    Ok(store)
}

/// Copy of `store` without the snapshots of the given dates, to simulate
/// failed scrapes.
pub fn drop_days(store: &CollectionStore, dates: &[NaiveDate]) -> Result<CollectionStore> {
    let mut out = CollectionStore::in_memory(store.topic().to_string(), store.vertical());
    for snap in store.snapshots().filter(|s| !dates.contains(&s.date)) {
        out.ingest(snap.clone())?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn params(r: f64, seed: u64) -> SynthParams {
        SynthParams {
            days: 10,
            replacement_rate: r,
            seed,
            ..SynthParams::default()
        }
    }

    fn uri_sets(store: &CollectionStore) -> Vec<HashSet<String>> {
        store
            .snapshots()
            .map(|s| s.canonical_uris(None).map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn no_replacement_repeats_the_first_day() {
        let store = gen_stream(&params(0.0, 1)).unwrap();
        let first = store.snapshots().next().unwrap().results.clone();
        assert_eq!(first.len(), 50);
        assert!(store.snapshots().all(|s| s.results == first));
    }

    #[test]
    fn full_replacement_is_disjoint_daily() {
        let sets = uri_sets(&gen_stream(&params(1.0, 1)).unwrap());
        for w in sets.windows(2) {
            assert!(w[0].is_disjoint(&w[1]));
        }
    }

    #[test]
    fn same_seed_same_store() {
        let a = gen_stream(&params(0.4, 99)).unwrap();
        let b = gen_stream(&params(0.4, 99)).unwrap();
        assert!(a.snapshots().eq(b.snapshots()));
        let c = gen_stream(&params(0.4, 100)).unwrap();
        assert!(!a.snapshots().eq(c.snapshots()));
    }

    #[test]
    fn kernel_validation() {
        let mut kernel = [[0.0; STATES]; STATES];
        for (i, row) in kernel.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        assert!(validate_kernel(&kernel).is_ok());
        kernel[2][3] = 0.5;
        let p = SynthParams {
            transition_kernel: Some(kernel),
            ..SynthParams::default()
        };
        assert!(matches!(gen_stream(&p), Err(Error::Invalid { .. })));
    }

    #[test]
    fn snapshots_respect_default_capacity() {
        let mut kernel = [[0.0; STATES]; STATES];
        for row in kernel.iter_mut() {
            *row = [0.1, 0.5, 0.1, 0.1, 0.1, 0.1];
        }
        let p = SynthParams {
            transition_kernel: Some(kernel),
            days: 20,
            ..SynthParams::default()
        };
        let store = gen_stream(&p).unwrap();
        for s in store.snapshots() {
            s.validate(Some(crate::model::DEFAULT_SNAPSHOT_CAPACITY))
                .unwrap();
        }
    }
}
