fn main() -> std::process::ExitCode {
    hexrd::cli::main()
}
