use clap::Parser;
use dulab_cli::Cli;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dulab_cli::run(&cli.command) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dulab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
