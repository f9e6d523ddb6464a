use clap::Parser;

fn main() {
    let cli = rotorsim_cli::Cli::parse();
    if let Err(e) = rotorsim_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
