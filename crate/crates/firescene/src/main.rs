use std::process::ExitCode;

use clap::Parser;
use firescene::cli::{run, Cli, ExitStatus};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                ExitStatus::InputError.code()
            } else {
                0
            });
        }
    };
    ExitCode::from(run(cli).code())
}
