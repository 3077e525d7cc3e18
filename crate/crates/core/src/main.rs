use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lieheat::cli;

#[derive(Parser)]
#[command(name = "lieheat", version, about = "Heat kernels on compact groups and their property suites")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites selected in a config file.
    Run {
        config: PathBuf,
        /// Worker threads (0: all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// List the available suites.
    List,
    /// Document the parameters of one suite.
    Describe { suite: String },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::List => {
            for s in cli::SUITES {
                println!("{}", s.name);
            }
            return ExitCode::SUCCESS;
        }
        Command::Describe { suite } => cli::describe(&suite).map(|d| {
            print!("{d}");
            true
        }),
        Command::Run { config, threads } => cli::run(&config, threads).map(|o| {
            for (name, pass) in &o.suites {
                println!("{name}: {}", if *pass { "pass" } else { "FAIL" });
            }
            println!("report: {}", o.report.display());
            o.pass
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
