fn main() -> std::process::ExitCode {
    bcdpf::cli::main()
}
