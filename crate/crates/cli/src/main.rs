mod args;
mod commands;
mod exit;
mod output;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    let code = match commands::run(&cli) {
        Ok(code) => code,
        Err(f) => {
            if let Some(body) = &f.body {
                output::print_json(body);
            }
            eprintln!("error: {:#}", f.error);
            f.code
        }
    };
    std::process::exit(code);
}
