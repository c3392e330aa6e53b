use std::io::Write;
use std::process::ExitCode;

use cascade::cli::{run, Args, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::from_args(args).and_then(|cfg| {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        run(&cfg, &mut lock)?;
        lock.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cascade: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
