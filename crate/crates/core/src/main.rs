use clap::Parser;

fn main() {
    let cli = sp4_jacquet::cli::Cli::parse();
    std::process::exit(sp4_jacquet::cli::run(cli));
}
