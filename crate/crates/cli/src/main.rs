use std::process::ExitCode;

use clap::Parser;
use ctwb_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            if cli.command.json() {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("ctwb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
