use clap::Parser;

fn main() {
    std::process::exit(falc_cli::execute(falc_cli::Cli::parse()));
}
