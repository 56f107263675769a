use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = diva::cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(diva::cli::EXIT_USAGE as u8);
    }
    ExitCode::from(diva::cli::run(std::env::args_os()) as u8)
}
