use std::process::ExitCode;

use clap::Parser;
use mwk_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
