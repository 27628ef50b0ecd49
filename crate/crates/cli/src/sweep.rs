//! Parameter-grid sweeps.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{classify, At, ClassificationReport, ClassifyOptions, VerifyMode};
use crate::spec::{SpecError, SystemSpecFile};

/// Each exponent maps to the coefficient choices tried for it; `"0"` drops
/// the term. Cells are the cartesian product in exponent order of `phi`,
/// then `F`, then `g`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub phi: BTreeMap<u32, Vec<String>>,
    #[serde(rename = "F")]
    pub damping: BTreeMap<u32, Vec<String>>,
    pub g: BTreeMap<u32, Vec<String>>,
    #[serde(default)]
    pub at: At,
    #[serde(default)]
    pub verify: VerifyMode,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<GridSpec, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<GridSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
        GridSpec::parse(&text)
    }

    fn axes(&self) -> Vec<(usize, u32, &Vec<String>)> {
        let mut axes = Vec::new();
        for (slot, map) in [&self.phi, &self.damping, &self.g].into_iter().enumerate() {
            for (&e, choices) in map {
                axes.push((slot, e, choices));
            }
        }
        axes
    }

    /// Cell count; zero when a polynomial has no exponents or an exponent
    /// has no choices.
    pub fn len(&self) -> usize {
        if self.phi.is_empty() || self.damping.is_empty() || self.g.is_empty() {
            return 0;
        }
        self.axes().iter().map(|a| a.2.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th cell, last axis fastest.
    pub fn cell(&self, mut index: usize) -> SystemSpecFile {
        let axes = self.axes();
        let mut picks = vec![0; axes.len()];
        for (k, a) in axes.iter().enumerate().rev() {
            picks[k] = index % a.2.len();
            index /= a.2.len();
        }
        let mut spec = SystemSpecFile { label: Some(self.cell_label(&picks)), ..Default::default() };
        for ((slot, e, choices), pick) in axes.iter().zip(picks) {
            let value = choices[pick].clone();
            if value.trim() == "0" {
                continue;
            }
            let map = match slot {
                0 => &mut spec.phi,
                1 => &mut spec.damping,
                _ => &mut spec.g,
            };
            map.insert(*e, value);
        }
        spec
    }

    fn cell_label(&self, picks: &[usize]) -> String {
        let digits: Vec<String> = picks.iter().map(|p| p.to_string()).collect();
        match &self.label {
            Some(l) => format!("{}[{}]", l, digits.join(",")),
            None => format!("[{}]", digits.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub cell: usize,
    pub exit_code: i32,
    pub report: Option<ClassificationReport>,
    pub error: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub origin: BTreeMap<String, usize>,
    pub infinity: BTreeMap<String, usize>,
    pub global: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub cell: usize,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub label: Option<String>,
    pub cells: usize,
    pub complete: usize,
    pub partial: usize,
    pub failed: usize,
    pub counts: Counts,
    pub failures: Vec<Failure>,
}

fn run_cell(grid: &GridSpec, cell: usize) -> CellOutcome {
    let spec = grid.cell(cell);
    match classify(&spec, ClassifyOptions { at: grid.at, verify: grid.verify }) {
        Ok(r) => CellOutcome { cell, exit_code: r.exit_code(), report: Some(r), error: None },
        Err(e) => CellOutcome { cell, exit_code: 1, report: None, error: Some(e.to_json()) },
    }
}

fn label_of<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn summarize(grid: &GridSpec, outcomes: &[CellOutcome]) -> SweepSummary {
    let mut counts = Counts::default();
    let mut failures = Vec::new();
    let (mut complete, mut partial, mut failed) = (0, 0, 0);
    for o in outcomes {
        match o.exit_code {
            0 => complete += 1,
            2 => partial += 1,
            _ => failed += 1,
        }
        if let Some(r) = &o.report {
            if let Some(s) = &r.origin {
                *counts.origin.entry(label_of(&s.portrait)).or_default() += 1;
            }
            if let Some(s) = &r.infinity {
                *counts.infinity.entry(label_of(&s.portrait)).or_default() += 1;
            }
            if let Some(g) = &r.global {
                let key = g.portrait.map(|p| p.label().to_string()).unwrap_or_else(|| "not-applicable".into());
                *counts.global.entry(key).or_default() += 1;
            }
            for e in &r.errors {
                failures.push(Failure { cell: o.cell, kind: e.kind.clone(), message: format!("[{}] {}", e.stage, e.message) });
            }
        }
        if let Some(e) = &o.error {
            let kind = e["error"]["kind"].as_str().unwrap_or("error").to_string();
            let message = e["error"]["message"].as_str().unwrap_or("").to_string();
            failures.push(Failure { cell: o.cell, kind, message });
        }
    }
    SweepSummary {
        schema_version: crate::report::SCHEMA_VERSION,
        label: grid.label.clone(),
        cells: outcomes.len(),
        complete,
        partial,
        failed,
        counts,
        failures,
    }
}

/// Classify every cell on `jobs` threads; outcomes come back in cell order.
pub fn run_sweep(grid: &GridSpec, jobs: usize) -> Vec<CellOutcome> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| (0..grid.len()).into_par_iter().map(|cell| run_cell(grid, cell)).collect())
}

/// Write `summary.json` and one `cells/NNNNN.json` per cell into `dir`.
pub fn write_sweep(dir: &Path, summary: &SweepSummary, outcomes: &[CellOutcome]) -> std::io::Result<()> {
    let cells = dir.join("cells");
    std::fs::create_dir_all(&cells)?;
    std::fs::write(dir.join("summary.json"), json(summary) + "\n")?;
    for o in outcomes {
        std::fs::write(cells.join(format!("{:05}.json", o.cell)), json(o) + "\n")?;
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boundary_grid() -> GridSpec {
        GridSpec::parse(r#"{"phi": {"3": ["-1"]}, "F": {"3": ["1"]}, "g": {"3": ["-1/4", "-1/2", "-1"]}, "at": "infinity"}"#).unwrap()
    }

    #[test]
    fn cells_enumerate_in_order() {
        let g = boundary_grid();
        assert_eq!(g.len(), 3);
        assert_eq!(g.cell(2).g.get(&3).map(String::as_str), Some("-1"));
        let optional = GridSpec::parse(r#"{"phi": {"3": ["-1"], "5": ["0", "1"]}, "F": {"4": ["1"]}, "g": {"3": ["-1"]}}"#).unwrap();
        assert_eq!(optional.len(), 2);
        assert!(!optional.cell(0).phi.contains_key(&5));
        assert!(optional.cell(1).phi.contains_key(&5));
    }

    #[test]
    fn boundary_sweep_crosses_c_star() {
        let g = boundary_grid();
        let out = run_sweep(&g, 2);
        let portraits: Vec<String> = out.iter().map(|o| label_of(&o.report.as_ref().unwrap().infinity.as_ref().unwrap().portrait)).collect();
        // c_* = 3 (1/4)^(4/3), about 0.472; the monodromic side is c_n < -c_*
        assert_eq!(portraits, ["fig8-b", "fig8-x", "fig8-x"]);
    }

    #[test]
    fn empty_grid() {
        let g = GridSpec::parse(r#"{"phi": {}, "F": {"3": ["1"]}, "g": {"3": ["-1"]}}"#).unwrap();
        assert!(g.is_empty());
        let s = summarize(&g, &run_sweep(&g, 4));
        assert_eq!(s.cells, 0);
        assert!(s.counts.infinity.is_empty());
    }
}
