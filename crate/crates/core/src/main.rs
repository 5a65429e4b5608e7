fn main() -> std::process::ExitCode {
    harnack_lab::cli::main()
}
