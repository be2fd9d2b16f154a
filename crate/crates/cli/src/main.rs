use clap::Parser;
use qvir_cli::{config::Cli, exit};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::PASS };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(qvir_cli::run(cli));
}
