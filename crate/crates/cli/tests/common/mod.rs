#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_fiberpair");

pub fn config_text(
    preset: &str,
    raman_gain: Option<f64>,
    pump: &str,
    temperature: f64,
    efficiency: f64,
    dark: f64,
) -> String {
    let gain = raman_gain.map(|g| format!("raman_gain_per_w_km = {g}\n")).unwrap_or_default();
    let channel = |name: &str| {
        format!(
            "[{name}]\ndetune_hz = 0.3e12\nbandwidth_hz = 50e9\nwindow_s = 50e-12\nefficiency = {efficiency}\ndark_prob = {dark}\n\n"
        )
    };
    format!(
        "[fiber]\npreset = \"{preset}\"\n{gain}\n[pump]\n{pump}\nwavelength_nm = 1552.75\nrepetition_rate_hz = 1e6\npulse_duration_s = 50e-12\n\n{}{}[env]\ntemperature_k = {temperature}\n",
        channel("signal"),
        channel("idler"),
    )
}

pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    pub fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

pub fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

pub fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Header and rows of a CSV document.
pub fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

pub fn column(text: &str, name: &str) -> Vec<Option<f64>> {
    let (header, rows) = csv(text);
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().ok()).collect()
}

/// Raman gain that puts the HNMSF source at efficiency 0.6037 for R = 0.1 at 300 K.
pub fn calibrated_hnmsf_gain(ws: &Workspace) -> f64 {
    let cfg = ws.write("calib.toml", &config_text("hnmsf", None, "nonlinear_phase = 0.2", 300.0, 0.2, 1e-4));
    let out = run_ok(&["calibrate", "--config", arg(&cfg), "--efficiency", "0.6037", "--pair-rate", "0.1"]);
    column(&out, "raman_gain_per_w_km")[0].unwrap()
}
