fn main() -> std::process::ExitCode {
    refine::cli::main()
}
