//! Experiment configuration: a command, its parameters, a seed and an
//! output path. Built from command-line flags or read from a JSON file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Dist,
    Bound,
    Protocol,
    Estimate,
    Product,
    Spy,
    Decay,
    Scenario,
}

/// `(key, help)` pairs.
pub type KeyTable = &'static [(&'static str, &'static str)];

const HAMILTONIANS: [(&str, &str); 2] = [
    ("h1", "first Hamiltonian: JSON file or generator name"),
    ("h2", "second Hamiltonian: JSON file or generator name"),
];

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Dist,
        Command::Bound,
        Command::Protocol,
        Command::Estimate,
        Command::Product,
        Command::Spy,
        Command::Decay,
        Command::Scenario,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Dist => "dist",
            Command::Bound => "bound",
            Command::Protocol => "protocol",
            Command::Estimate => "estimate",
            Command::Product => "product",
            Command::Spy => "spy",
            Command::Decay => "decay",
            Command::Scenario => "scenario",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Dist => "Distance D0 between two Hamiltonians and the minimum discrimination time pi/D0",
            Command::Bound => "Time-dependent bound: integral of D0 over a schedule compared with pi",
            Command::Protocol => "Run a discrimination protocol and export its overlap trajectory",
            Command::Estimate => "Monte-Carlo two-hypothesis estimation sweep against the closed form",
            Command::Product => "Closed-form dt*dH curve and its maximum",
            Command::Spy => "Spy reduction bound on dt*dE for a known H0",
            Command::Decay => "Radiative-decay energy measurement statistics",
            Command::Scenario => "Named end-to-end scenarios",
        }
    }

    pub fn keys(self) -> KeyTable {
        const BOUND: KeyTable = &[
            ("schedule", "schedule JSON file ({segments: [{duration, h1, h2}]})"),
            HAMILTONIANS[0],
            HAMILTONIANS[1],
            ("dt", "duration of a constant schedule built from --h1/--h2"),
        ];
        const PROTOCOL: KeyTable = &[
            HAMILTONIANS[0],
            HAMILTONIANS[1],
            ("protocol", "protocol JSON file; the saturating protocol is used when absent"),
            ("layout", "box,nobox,ancilla dimensions for the saturating protocol"),
            ("steps", "Trotter steps of the saturating protocol [1000]"),
            ("nu", "kick weight of the saturating protocol controls [0.5]"),
        ];
        const ESTIMATE: KeyTable = &[
            ("pair", "named pair: spin (±sigma_z) or pauli-xz"),
            HAMILTONIANS[0],
            HAMILTONIANS[1],
            ("grid", "number of dt points on [0, pi/D0] [20]"),
            ("trials", "Monte-Carlo trials per point [100000]"),
            ("trotter", "Trotter steps of the probe preparation [1000]"),
        ];
        match self {
            Command::Dist => &HAMILTONIANS,
            Command::Bound => BOUND,
            Command::Protocol => PROTOCOL,
            Command::Estimate => ESTIMATE,
            Command::Product => &[("d0", "distance D0 [1]"), ("grid", "number of dt points on [0, pi/D0] [101]")],
            Command::Spy => &[
                ("h1", "known Hamiltonian H0: JSON file or generator name"),
                ("level", "index of the H0 eigenstate [0]"),
                ("dt", "comma-separated exposure times [0.1,1,10]"),
            ],
            Command::Decay => &[
                ("gamma", "decay rate and Lorentzian half-width [1]"),
                ("e0", "line centre [0]"),
                ("trials", "number of simulated decays [1000000]"),
            ],
            Command::Scenario => &[
                ("name", "spin-fields, phase-box, farhi-gutmann or shared-eigenbasis"),
                ("mu-b0", "spin-fields: field energy [1]"),
                ("phi1", "phase-box: first phase [1]"),
                ("phi2", "phase-box: second phase [0]"),
                ("h0", "phase-box: common Hamiltonian [zero:1]"),
                ("energy", "farhi-gutmann: energy E [1]"),
                ("dims", "farhi-gutmann: A..B doubling range or list [4..256]"),
                ("threshold", "farhi-gutmann: identification probability [0.9]"),
                ("e1", "shared-eigenbasis: first spectrum [0,1,2,3]"),
                ("e2", "shared-eigenbasis: second spectrum [0,3,2,3]"),
                ("k0", "shared-eigenbasis: differing level [1]"),
                ("trials", "shared-eigenbasis: Haar samples [100000]"),
            ],
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| CliError::config(format!("unknown command `{s}`")))
    }
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Command,
    #[serde(default)]
    parameters: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: Command, parameters: BTreeMap<String, String>, seed: Option<u64>, output_path: Option<PathBuf>) -> CliResult<Self> {
        let cfg = Self { command, parameters, seed: seed.unwrap_or(DEFAULT_SEED), output_path };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: ConfigFile = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        let parameters = raw
            .parameters
            .into_iter()
            .map(|(k, v)| {
                let s = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::Bool(b) => b.to_string(),
                    other => return Err(CliError::config(format!("parameter `{k}` must be a string or number, got {other}"))),
                };
                Ok((k, s))
            })
            .collect::<CliResult<_>>()?;
        Self::new(raw.command, parameters, raw.seed, raw.output_path)
    }

    fn validate(&self) -> CliResult<()> {
        let keys = self.command.keys();
        for k in self.parameters.keys() {
            if !keys.iter().any(|(name, _)| name == k) {
                return Err(CliError::config(format!("`{}` does not take parameter `{k}`", self.command.name())));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.parameters.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> CliResult<&str> {
        self.get(key).ok_or_else(|| CliError::config(format!("`{}` needs --{key}", self.command.name())))
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| CliError::config(format!("cannot parse --{key} value `{v}`"))),
        }
    }

    /// Parameters that are set but not in `used`.
    pub fn reject_unused(&self, used: &[&str], context: &str) -> CliResult<()> {
        match self.parameters.keys().find(|k| !used.contains(&k.as_str())) {
            Some(k) => Err(CliError::config(format!("{context} does not use --{k}"))),
            None => Ok(()),
        }
    }
}
