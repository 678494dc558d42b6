use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use eulerglyph::cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(&config, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eulerglyph: error: {e}");
            ExitCode::FAILURE
        }
    }
}
