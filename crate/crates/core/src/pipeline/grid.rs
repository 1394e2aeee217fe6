//! Hyper-parameter grids.
//!
//! Cells are run stage by stage: all ingests, then all preps, and so on.
//! Cells that share a stage's settings share its artifact directory, so each
//! distinct stage runs once; distinct stages of one phase run on the rayon
//! pool. A failing stage fails only the cells that depend on it.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use super::report::{self, ReportRow};
use super::{
    io_err, read_report, run_stage, stage_dir, stamp, ConfigError, ExperimentConfig, PipelineError,
    RunOptions, Stage,
};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    /// Axis values of this cell, in axis order.
    pub overrides: Vec<(String, String)>,
    pub result: Result<ReportRow, String>,
}

impl GridCell {
    fn label(&self) -> String {
        self.overrides
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Report row line, or `status=error <axes…> error=<message>`.
    pub fn kv(&self) -> String {
        match &self.result {
            Ok(row) => row.kv(),
            Err(msg) => {
                let axes: Vec<String> = self
                    .overrides
                    .iter()
                    .map(|(k, v)| format!("{k}={}", v.replace(char::is_whitespace, "_")))
                    .collect();
                format!(
                    "status=error {} error={}",
                    axes.join(" "),
                    msg.split_whitespace().collect::<Vec<_>>().join("_")
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
    /// Consolidated report file.
    pub path: PathBuf,
}

impl GridReport {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.result.is_err()).count()
    }

    /// Table followed by one key-value line per cell.
    pub fn render(&self) -> String {
        let rows: Vec<Result<&ReportRow, (String, &str)>> = self
            .cells
            .iter()
            .map(|c| match &c.result {
                Ok(r) => Ok(r),
                Err(e) => Err((c.label(), e.as_str())),
            })
            .collect();
        let mut out = report::table_with_errors(&rows);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&c.kv());
            out.push('\n');
        }
        out
    }
}

/// Cartesian product of `axes`, first axis varying slowest.
fn cells(axes: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    let mut out = vec![Vec::new()];
    for (key, values) in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut c = prefix.clone();
                    c.push((key.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    out
}

/// Runs every cell of the grid spanned by `axes` on top of `base` and writes
/// the consolidated report to `<output_dir>/grid-<hash>.txt`.
pub fn run_grid(
    base: &ExperimentConfig,
    axes: &[(String, Vec<String>)],
    opts: RunOptions,
) -> Result<GridReport, PipelineError> {
    if axes.is_empty() || axes.iter().any(|(_, v)| v.is_empty()) {
        return Err(ConfigError::Invalid("grid needs at least one axis with values".into()).into());
    }
    for (k, _) in axes {
        if !super::KEYS.iter().any(|(known, _)| known == k) {
            return Err(ConfigError::UnknownKey(k.clone()).into());
        }
    }
    let specs = cells(axes);
    let mut state: Vec<Result<ExperimentConfig, String>> = specs
        .iter()
        .map(|o| base.with_overrides(o).map_err(|e| format!("config: {e}")))
        .collect();

    for stage in Stage::ALL {
        // one job per distinct stage directory
        let mut jobs: BTreeMap<PathBuf, &ExperimentConfig> = BTreeMap::new();
        for cfg in state.iter().flatten() {
            jobs.entry(stage_dir(cfg, stage)).or_insert(cfg);
        }
        let jobs: Vec<(PathBuf, &ExperimentConfig)> = jobs.into_iter().collect();
        let results: BTreeMap<PathBuf, Result<(), String>> = jobs
            .par_iter()
            .map(|(dir, cfg)| {
                let r = run_stage(stage, cfg, opts)
                    .map(|_| ())
                    .map_err(|e| format!("{stage}: {e}"));
                (dir.clone(), r)
            })
            .collect();
        for s in state.iter_mut() {
            if let Ok(cfg) = s {
                if let Err(e) = &results[&stage_dir(cfg, stage)] {
                    *s = Err(e.clone());
                }
            }
        }
    }

    let cells: Vec<GridCell> = specs
        .into_iter()
        .zip(state)
        .map(|(overrides, s)| GridCell {
            overrides,
            result: s.and_then(|cfg| read_report(&cfg).map_err(|e| e.to_string())),
        })
        .collect();

    let mut key = base.canonical(Stage::Eval.sections());
    for (k, vs) in axes {
        key.push_str(&format!("grid.{k}={}\n", vs.join(",")));
    }
    let hash = format!("{:016x}", rng::derive_seed(0, key.as_bytes()));
    let report = GridReport {
        cells,
        path: base.output_dir.join(format!("grid-{hash}.txt")),
    };
    fs::create_dir_all(&base.output_dir).map_err(io_err(&base.output_dir))?;
    let mut text = stamp("grid", &hash);
    text.push_str(&report.render());
    fs::write(&report.path, text).map_err(io_err(&report.path))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_order_and_size() {
        let axes = vec![
            ("walk.max_length".to_string(), vec!["2".into(), "3".into()]),
            (
                "walk.n_walks".to_string(),
                vec!["25".into(), "50".into(), "100".into()],
            ),
        ];
        let c = cells(&axes);
        assert_eq!(c.len(), 6);
        assert_eq!(
            c[0],
            vec![
                ("walk.max_length".into(), "2".into()),
                ("walk.n_walks".into(), "25".into())
            ]
        );
        assert_eq!(
            c[5],
            vec![
                ("walk.max_length".into(), "3".into()),
                ("walk.n_walks".into(), "100".into())
            ]
        );
    }
}
