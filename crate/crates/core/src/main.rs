use clap::Parser;

use fcrystal::cli::{run, Cli, EXIT_IO, EXIT_OK};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_IO } else { EXIT_OK });
        }
    };
    std::process::exit(run(&cli));
}
