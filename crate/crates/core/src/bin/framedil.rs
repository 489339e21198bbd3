use clap::Parser;

fn main() {
    let cli = framedil::cli::Cli::parse();
    std::process::exit(framedil::cli::run(cli));
}
