fn main() -> std::process::ExitCode {
    aerofoil::cli::main()
}
