use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fedosov_cli::{execute, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::CheckFailed { report, .. } = &e {
                print!("{report}");
                let _ = std::io::stdout().flush();
            }
            eprintln!("fedosov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
