// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::time::Instant;

use fermicon::config::Config;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// One comparison between two routes (or a route and its oracle).
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub routes: [String; 2],
    /// `None` when the check errored before producing a number.
    pub max_deviation: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

impl Check {
    /// Times `f` and records its deviation against `tolerance`.
    pub fn run(
        name: impl Into<String>,
        routes: [&str; 2],
        tolerance: f64,
        f: impl FnOnce() -> fermicon::Result<f64>,
    ) -> Self {
        let start = Instant::now();
        let out = f();
        let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        let (max_deviation, error) = match out {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            name: name.into(),
            routes: routes.map(String::from),
            pass: max_deviation.is_some_and(|d| d <= tolerance),
            max_deviation,
            tolerance,
            wall_time_ms,
            error,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub suite: String,
    pub config_hash: String,
    pub seed: u64,
    pub summary: Summary,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn new(suite: &str, config: &Config, seed: u64, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        Self {
            version: env!("CARGO_PKG_VERSION"),
            suite: suite.to_string(),
            config_hash: config_hash(config),
            seed,
            summary: Summary {
                total: checks.len(),
                passed,
                failed: checks.len() - passed,
            },
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let dev = c
                .max_deviation
                .map_or_else(|| "error".to_string(), |d| format!("{d:.3e}"));
            let _ = write!(
                s,
                "{} {} [{} vs {}] deviation {dev} (tol {:.0e}) {:.1} ms",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.routes[0],
                c.routes[1],
                c.tolerance,
                c.wall_time_ms,
            );
            if let Some(e) = &c.error {
                let _ = write!(s, ": {e}");
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "suite {}: {} checks, {} passed, {} failed (seed {}, config {})",
            self.suite,
            self.summary.total,
            self.summary.passed,
            self.summary.failed,
            self.seed,
            &self.config_hash[..12],
        );
        s
    }
}

/// SHA-256 of the config's canonical JSON, so formatting does not matter.
pub fn config_hash(config: &Config) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}
