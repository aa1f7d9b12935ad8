//! Suite reports: one row per (probe, grid point), no row dropped on failure,
//! deterministic field order for byte-stable JSON.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::spaces::SpaceExponents;

/// Exact-tier checks abort a run when violated; empirical rows only record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tier {
    Exact,
    Empirical,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub probe: String,
    pub grid_point: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tier: Tier,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub space: String,
    pub exponents: SpaceExponents,
    pub seed: u64,
    pub slack_factor: f64,
    pub rows: Vec<CheckRow>,
    pub constants: BTreeMap<String, f64>,
    pub passed: bool,
    pub exact_passed: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, space: &str, exponents: SpaceExponents, seed: u64, slack: f64) -> Self {
        Self {
            suite: suite.to_string(),
            space: space.to_string(),
            exponents,
            seed,
            slack_factor: slack,
            rows: Vec::new(),
            constants: BTreeMap::new(),
            passed: true,
            exact_passed: true,
        }
    }

    pub fn push(&mut self, row: CheckRow) {
        if !row.pass {
            self.passed = false;
            if row.tier == Tier::Exact {
                self.exact_passed = false;
            }
        }
        self.rows.push(row);
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_string(), value);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, dir: &Path) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.json", self.suite));
        std::fs::write(&path, self.to_json()?)?;
        Ok(path)
    }
}

pub const CSV_HEADER: &str = "suite,space,probe,grid_point,lhs,rhs,slack,tier,pass";

pub fn csv_line(report: &SuiteReport, row: &CheckRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{:?},{}",
        report.suite,
        report.space,
        row.probe,
        row.grid_point,
        row.lhs,
        row.rhs,
        row.slack,
        row.tier,
        row.pass
    )
}

/// Flat CSV aggregate across suites.
pub fn write_csv(reports: &[SuiteReport], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "{CSV_HEADER}")?;
    for report in reports {
        for row in &report.rows {
            writeln!(out, "{}", csv_line(report, row))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::cycle_exponents;

    #[test]
    fn report_tracks_tiers() {
        let mut r = SuiteReport::new("demo", "cycle:4", cycle_exponents(), 1, 1.05);
        r.push(CheckRow {
            probe: "a".into(),
            grid_point: 0.1,
            lhs: 1.0,
            rhs: 2.0,
            slack: 1.0,
            tier: Tier::Exact,
            pass: true,
            note: None,
        });
        assert!(r.passed && r.exact_passed);
        r.push(CheckRow {
            probe: "b".into(),
            grid_point: 0.2,
            lhs: 3.0,
            rhs: 2.0,
            slack: -1.0,
            tier: Tier::Empirical,
            pass: false,
            note: Some("bracket".into()),
        });
        assert!(!r.passed && r.exact_passed);
        let json = r.to_json().unwrap();
        assert!(json.contains("\"suite\": \"demo\""));
    }

    #[test]
    fn json_is_byte_stable() {
        let build = || {
            let mut r = SuiteReport::new("demo", "cycle:4", cycle_exponents(), 7, 1.05);
            r.constant("zeta", 1.25);
            r.constant("alpha", 0.5);
            r.push(CheckRow {
                probe: "p".into(),
                grid_point: 0.30000000000000004,
                lhs: 1.0 / 3.0,
                rhs: 2.0 / 3.0,
                slack: 1.0 / 3.0,
                tier: Tier::Exact,
                pass: true,
                note: None,
            });
            r.to_json().unwrap()
        };
        assert_eq!(build(), build());
    }
}
