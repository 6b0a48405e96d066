use std::process::ExitCode;

use clap::Parser;
use survival_explain_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.single_line());
            ExitCode::from(e.exit_code())
        }
    }
}
