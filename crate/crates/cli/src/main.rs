use clap::Parser;

fn main() {
    let cli = corrsim_cli::args::Cli::parse();
    std::process::exit(corrsim_cli::main_with(cli));
}
