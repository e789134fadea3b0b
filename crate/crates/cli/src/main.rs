use clap::Parser;
use gliou_cli::config::Cli;

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = gliou_cli::run(cli) {
        eprintln!("gliou: {e}");
        std::process::exit(e.exit_code());
    }
}
