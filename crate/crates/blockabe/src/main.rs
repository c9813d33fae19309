fn main() -> std::process::ExitCode {
    blockabe::cli::run()
}
