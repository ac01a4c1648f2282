mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use io::{CliError, Style};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.command.json();
    let style = match Style::from_env() {
        Ok(s) => s,
        Err(e) => return report(e, json, Style::plain()),
    };
    match commands::run(cli.command, style) {
        Ok(code) => code,
        Err(e) => report(e, json, style),
    }
}

fn report(e: CliError, json: bool, style: Style) -> ExitCode {
    if json {
        let obj = serde_json::json!({ "error": e.to_string(), "kind": e.kind() });
        println!("{obj}");
    } else {
        eprintln!("{}: {e}", style.bad("error"));
    }
    ExitCode::from(e.exit_code())
}
