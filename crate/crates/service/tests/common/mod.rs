#![allow(dead_code)]

use std::path::PathBuf;

use healthroute_service::cli;
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/fixtures").join(name)
}

pub fn diamond_path() -> String {
    fixture("diamond.scenario.json").display().to_string()
}

pub fn profile_path() -> String {
    fixture("baseline.profile.json").display().to_string()
}

pub fn baseline_profile() -> Value {
    serde_json::from_slice(&std::fs::read(fixture("baseline.profile.json")).unwrap()).unwrap()
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

/// Runs the CLI in-process.
pub fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(std::iter::once("healthroute").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

/// `route` arguments for the diamond fixture.
pub fn diamond_route_args(from: &str, to: &str, extra: &[&str]) -> Vec<String> {
    let mut args: Vec<String> =
        ["route", "--scenario", &diamond_path(), "--from", from, "--to", to, "--profile", &profile_path()]
            .iter()
            .map(|s| s.to_string())
            .collect();
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}
