//! Command line front end: `wavepacket-cli <command> <config-path>`.
//!
//! Commands: wpt, evolve, flow, detect, verify-free, verify-flow,
//! residual, roundtrip, bounds. Each reads a line-oriented
//! `key = value` config (see `configs/` for a documented example per
//! command), writes CSV outputs plus a manifest echoing the resolved
//! parameters, and prints a one-line summary. Runs are deterministic:
//! the same config produces byte-identical files.
//!
//! Exit codes: 0 success, 1 configuration or runtime error (diagnostic on
//! stderr), 2 verification failure (a checked tolerance was exceeded).

mod commands;
mod config;

use std::process::ExitCode;

const COMMANDS: &[&str] = &[
    "wpt",
    "evolve",
    "flow",
    "detect",
    "verify-free",
    "verify-flow",
    "residual",
    "roundtrip",
    "bounds",
];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(args: &[String]) -> Result<u8, String> {
    if args.len() != 2 {
        return Err(format!(
            "usage: wavepacket-cli <command> <config-path>\ncommands: {}",
            COMMANDS.join(", ")
        ));
    }
    let command = args[0].as_str();
    if !COMMANDS.contains(&command) {
        return Err(format!(
            "unknown command `{command}`; expected one of: {}",
            COMMANDS.join(", ")
        ));
    }
    let text = std::fs::read_to_string(&args[1])
        .map_err(|e| format!("cannot read config `{}`: {e}", args[1]))?;
    let cfg = config::Config::parse(&text)?;
    match command {
        "wpt" => commands::wpt(&cfg),
        "evolve" => commands::evolve(&cfg),
        "flow" => commands::flow(&cfg),
        "detect" => commands::detect(&cfg),
        "verify-free" => commands::verify_free(&cfg),
        "verify-flow" => commands::verify_flow(&cfg),
        "residual" => commands::residual(&cfg),
        "roundtrip" => commands::roundtrip(&cfg),
        "bounds" => commands::bounds(&cfg),
        _ => unreachable!("command list checked above"),
    }
}
