use clap::Parser;
use degenerate_rbm::cli::{exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = run(&cli, &mut std::io::stdout(), &mut std::io::stderr()).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    });
    std::process::exit(code);
}
