use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgMatches};
use hdisc::{run, CliError, Command, ExperimentConfig};

fn cli() -> clap::Command {
    let mut app = clap::Command::new("hdisc")
        .about("Discrimination and estimation of unknown Hamiltonians, with the time-energy bounds they imply")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for cmd in Command::ALL {
        let mut sub = clap::Command::new(cmd.name())
            .about(cmd.about())
            .arg(Arg::new("seed").long("seed").value_name("U64").help("random seed [0]").value_parser(clap::value_parser!(u64)))
            .arg(Arg::new("out").long("out").value_name("PATH").help("output file").value_parser(clap::value_parser!(PathBuf)));
        for &(key, help) in cmd.keys() {
            sub = sub.arg(Arg::new(key).long(key).value_name("VALUE").help(help).allow_hyphen_values(true));
        }
        app = app.subcommand(sub);
    }
    app.subcommand(
        clap::Command::new("config")
            .about("Run an experiment described by a JSON file {command, parameters, seed, output_path}")
            .arg(Arg::new("file").required(true).value_parser(clap::value_parser!(PathBuf))),
    )
}

fn config_from(name: &str, m: &ArgMatches) -> Result<ExperimentConfig, CliError> {
    if name == "config" {
        return ExperimentConfig::from_json_file(m.get_one::<PathBuf>("file").expect("required by clap"));
    }
    let command: Command = name.parse()?;
    let mut params = BTreeMap::new();
    for &(key, _) in command.keys() {
        if let Some(v) = m.get_one::<String>(key) {
            params.insert(key.to_string(), v.clone());
        }
    }
    ExperimentConfig::new(command, params, m.get_one::<u64>("seed").copied(), m.get_one::<PathBuf>("out").cloned())
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    match config_from(name, sub).and_then(|cfg| run(&cfg)) {
        Ok(summary) => {
            println!("{}", summary.line);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hdisc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
