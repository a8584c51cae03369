use clap::Parser;

use binforward_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
