//! Hamiltonians from JSON files or named generators.
//!
//! Names: `pauli-x`, `pauli-y`, `pauli-z`, `zero:DIM`, `identity:DIM`,
//! `shifted-identity:DIM:SHIFT`, `random-hermitian:DIM:SEED`,
//! `diagonal:V1,V2,...`. Any of them may carry a real prefactor, as in
//! `-2*pauli-z`.

use std::path::Path;

use hdisc_core::random::{random_hermitian, trial_rng};
use hdisc_core::HermitianOperator;

use crate::error::{CliError, CliResult};
use crate::formats::{matrix_from_json, read_json, MatrixJson};

pub fn parse_hamiltonian(arg: &str) -> CliResult<HermitianOperator> {
    let arg = arg.trim();
    if arg.ends_with(".json") || Path::new(arg).is_file() {
        let m: MatrixJson = read_json(Path::new(arg))?;
        return HermitianOperator::new(matrix_from_json(&m)?).map_err(|e| CliError::config(format!("{arg}: {e}")));
    }
    if let Some((factor, rest)) = arg.split_once('*') {
        if let Ok(k) = factor.trim().parse::<f64>() {
            return Ok(parse_hamiltonian(rest)?.scale(k));
        }
    }
    let mut parts = arg.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let bad = || CliError::config(format!("unknown Hamiltonian generator `{arg}`"));
    let dim = |s: &str| -> CliResult<usize> {
        s.parse::<usize>().ok().filter(|&d| d >= 1).ok_or_else(|| CliError::config(format!("bad dimension `{s}` in `{arg}`")))
    };
    let real = |s: &str| -> CliResult<f64> {
        s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| CliError::config(format!("bad number `{s}` in `{arg}`")))
    };
    let op = match (name, args.as_slice()) {
        ("pauli-x", []) => HermitianOperator::pauli_x(),
        ("pauli-y", []) => HermitianOperator::pauli_y(),
        ("pauli-z", []) => HermitianOperator::pauli_z(),
        ("zero", [d]) => HermitianOperator::zero(dim(d)?)?,
        ("identity", [d]) => HermitianOperator::scalar(dim(d)?, 1.0)?,
        ("shifted-identity", [d, shift]) => HermitianOperator::scalar(dim(d)?, real(shift)?)?,
        ("random-hermitian", [d, seed]) => {
            let seed = seed.parse::<u64>().map_err(|_| bad())?;
            random_hermitian(&mut trial_rng(seed, 0), dim(d)?, 1.0)?
        }
        ("diagonal", [values]) => HermitianOperator::diagonal(&parse_reals(values)?)?,
        _ => return Err(bad()),
    };
    Ok(op)
}

/// Comma-separated reals.
pub fn parse_reals(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| CliError::config(format!("bad number `{v}`")))
        })
        .collect()
}

/// `A..B` is the doubling sequence A, 2A, ... up to B; otherwise a
/// comma-separated list.
pub fn parse_dims(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::config(format!("bad dimension list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (a.trim().parse::<usize>().map_err(|_| bad())?, b.trim().parse::<usize>().map_err(|_| bad())?);
        if a == 0 || b < a {
            return Err(bad());
        }
        return Ok(std::iter::successors(Some(a), |&d| d.checked_mul(2)).take_while(|&d| d <= b).collect());
    }
    s.split(',').map(|v| v.trim().parse::<usize>().map_err(|_| bad())).collect()
}

/// `b,n,a` for box, no-box and ancilla dimensions.
pub fn parse_layout(s: &str) -> CliResult<hdisc_core::SpaceLayout> {
    let bad = || CliError::config(format!("layout must be `box,nobox,ancilla`, got `{s}`"));
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| bad())).collect::<CliResult<_>>()?;
    let [b, n, a] = v.as_slice() else { return Err(bad()) };
    hdisc_core::SpaceLayout::new(*b, *n, *a).map_err(|e| CliError::config(format!("layout: {e}")))
}
