use std::io::{ErrorKind, Write};

use clap::Parser;
use flc::{execute, RunConfig};

fn main() {
    let cfg = RunConfig::try_parse().unwrap_or_else(|e| e.exit());
    match execute(cfg) {
        Ok(emitted) => {
            if let Some(path) = emitted.out {
                if let Err(e) = std::fs::write(&path, emitted.text) {
                    eprintln!("error: write {}: {e}", path.display());
                    std::process::exit(1);
                }
            } else {
                let mut stdout = std::io::stdout().lock();
                let done = stdout.write_all(emitted.text.as_bytes()).and_then(|()| stdout.flush());
                if let Err(e) = done {
                    // a closed pipe (e.g. `flc ... | head`) is not a failure
                    if e.kind() == ErrorKind::BrokenPipe {
                        return;
                    }
                    eprintln!("error: write stdout: {e}");
                    std::process::exit(1);
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
