use std::process::ExitCode;

use clap::Parser;

mod commands;

use commands::{Cli, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(cap) = std::env::var("KAKEYA_SIZE_CAP") {
        match cap.trim().parse::<u64>() {
            Ok(cap) => kakeya_core::set_size_cap(cap),
            Err(_) => {
                eprintln!("error: KAKEYA_SIZE_CAP must be a positive integer, got {cap:?}");
                return ExitCode::from(2);
            }
        }
    }
    match commands::run(&cli) {
        Ok(Outcome { text, code }) => {
            if let Err(e) = commands::emit(&cli.output, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
