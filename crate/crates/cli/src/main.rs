use clap::Parser;
use quatsurf_cli::{execute, Cli, EXIT_CONFIG};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = execute(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
