use clap::Parser;

fn main() {
    let cli = artmap_seq::cli::Cli::parse();
    if let Err(err) = artmap_seq::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
