use std::process::ExitCode;

use clap::Parser;
use qrep_cli::{run, Cli};
use serde_json::json;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let record = json!({ "error": "usage", "exit_code": 2, "message": e.to_string().trim_end() });
            eprintln!("{record}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(Some(path)) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
