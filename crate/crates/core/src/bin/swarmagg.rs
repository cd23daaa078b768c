fn main() -> std::process::ExitCode {
    swarmagg::cli::main()
}
