//! Exponential refindability model `P(k) = a + b * exp(-c * k)`.
//!
//! For a fixed decay constant `c` the model is linear in `(a, b)`, so the
//! fit profiles the residual over `c`: a coarse grid picks the starting
//! bracket and a golden-section search refines it, solving the linear
//! least-squares problem in closed form at every probe.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RefindabilityModel, Vertical};

pub const MIN_POINTS: usize = 4;
pub const GRID_MIN_C: f64 = 0.01;
pub const GRID_MAX_C: f64 = 5.0;
pub const GRID_STEPS: usize = 500;
pub const MAX_REFINEMENTS: usize = 200;
/// Relative bracket width at which the golden-section search stops.
pub const C_TOLERANCE: f64 = 1e-12;

/// Outcome of [`fit_exponential`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub model: RefindabilityModel,
    pub n_points: usize,
    pub iterations: usize,
    /// The data carry no decay, so `c` is unidentifiable and reported as 0.
    pub degenerate: bool,
    /// Some coefficient was clamped into its admissible range.
    pub clamped: bool,
}

/// `a + b * exp(-c * k)` clamped to `[0, 1]`.
pub fn eval_model(model: &RefindabilityModel, k: f64) -> f64 {
    (model.a + model.b * (-model.c * k).exp()).clamp(0.0, 1.0)
}

impl RefindabilityModel {
    pub fn eval(&self, k: f64) -> f64 {
        eval_model(self, k)
    }
}

#[derive(Debug, Clone, Copy)]
struct Probe {
    c: f64,
    a: f64,
    b: f64,
    sse: f64,
}

fn sse_of(points: &[(f64, f64)], a: f64, b: f64, c: f64) -> f64 {
    points
        .iter()
        .map(|&(k, p)| {
            let r = p - a - b * (-c * k).exp();
            r * r
        })
        .sum()
}

/// Best `(a, b)` for a fixed `c` by ordinary least squares on `x = e^(-ck)`.
fn probe(points: &[(f64, f64)], c: f64) -> Probe {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(k, _)| (-c * k).exp()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_p = points.iter().map(|&(_, p)| p).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxp = 0.0;
    for (x, &(_, p)) in xs.iter().zip(points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxp += (x - mean_x) * (p - mean_p);
    }
    let b = if sxx > 0.0 { sxp / sxx } else { 0.0 };
    let a = mean_p - b * mean_x;
    Probe {
        c,
        a,
        b,
        sse: sse_of(points, a, b, c),
    }
}

fn validate(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < MIN_POINTS {
        return Err(Error::Underdetermined {
            needed: MIN_POINTS,
            got: points.len(),
        });
    }
    for &(k, p) in points {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::invalid(
                "fit points",
                format!("day {k} must be finite and non-negative"),
            ));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(
                "fit points",
                format!("probability {p} at day {k} is outside [0, 1]"),
            ));
        }
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::invalid("fit points", "day values must be distinct"));
    }
    Ok(sorted)
}

/// Least-squares fit of `P(k) = a + b * exp(-c * k)` to `(k, p)` points.
///
/// Points are sorted by `k` first, so the result does not depend on input
/// order. Equal residuals on the grid resolve to the smallest `c`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitReport> {
    let points = validate(points)?;

    let step = (GRID_MAX_C - GRID_MIN_C) / GRID_STEPS as f64;
    let grid: Vec<Probe> = (0..=GRID_STEPS)
        .map(|i| probe(&points, GRID_MIN_C + step * i as f64))
        .collect();
    let best_idx = grid.iter().enumerate().fold(
        0,
        |best, (i, p)| if p.sse < grid[best].sse { i } else { best },
    );
    let mut best = grid[best_idx];

    let degenerate = grid.iter().all(|p| p.b.abs() <= 1e-12);
    let mut iterations = 0;
    if !degenerate && best.sse > 0.0 {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut lo = grid[best_idx.saturating_sub(1)].c;
        let mut hi = grid[(best_idx + 1).min(GRID_STEPS)].c;
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut p1 = probe(&points, x1);
        let mut p2 = probe(&points, x2);
        let mut converged = false;
        while iterations < MAX_REFINEMENTS {
            iterations += 1;
            if p1.sse <= p2.sse {
                hi = x2;
                x2 = x1;
                p2 = p1;
                x1 = hi - INV_PHI * (hi - lo);
                p1 = probe(&points, x1);
            } else {
                lo = x1;
                x1 = x2;
                p1 = p2;
                x2 = lo + INV_PHI * (hi - lo);
                p2 = probe(&points, x2);
            }
            for p in [p1, p2] {
                if p.sse < best.sse {
                    best = p;
                }
            }
            if hi - lo <= C_TOLERANCE * hi.abs().max(1.0) || best.sse == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                iterations,
                best: RefindabilityModel {
                    a: best.a,
                    b: best.b,
                    c: best.c,
                    sse: best.sse,
                },
            });
        }
    }

    let (mut a, mut b, mut c) = (best.a, best.b, best.c);
    if degenerate {
        b = 0.0;
        c = 0.0;
    }
    let mut clamped = false;
    for (v, lo, hi) in [
        (&mut a, 0.0, 1.0),
        (&mut b, 0.0, 1.0),
        (&mut c, 0.0, f64::INFINITY),
    ] {
        let bounded = v.clamp(lo, hi);
        if bounded != *v {
            clamped = true;
            *v = bounded;
        }
    }
    let sse = if clamped || degenerate {
        sse_of(&points, a, b, c)
    } else {
        best.sse
    };

    Ok(FitReport {
        model: RefindabilityModel { a, b, c, sse },
        n_points: points.len(),
        iterations,
        degenerate,
        clamped,
    })
}

/// Serialized form of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub vertical: Vertical,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sse: f64,
    pub n_points: usize,
    /// Date of the newest observation the fit used.
    pub fitted_at: Option<NaiveDate>,
}

impl ModelDocument {
    pub fn new(vertical: Vertical, fit: &FitReport, fitted_at: Option<NaiveDate>) -> Self {
        ModelDocument {
            vertical,
            a: fit.model.a,
            b: fit.model.b,
            c: fit.model.c,
            sse: fit.model.sse,
            n_points: fit.n_points,
            fitted_at,
        }
    }

    pub fn model(&self) -> RefindabilityModel {
        RefindabilityModel {
            a: self.a,
            b: self.b,
            c: self.c,
            sse: self.sse,
        }
    }
}
