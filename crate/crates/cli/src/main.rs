fn main() -> std::process::ExitCode {
    serp_refind_cli::main()
}
