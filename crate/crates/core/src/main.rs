use clap::Parser;
use misuse_forge::cli::{init_logging, run, Cli, EXIT_ERROR, EXIT_OK};

fn main() {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // exit code 2 is reserved for findings
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    std::process::exit(run(cli));
}
