use std::io::Write;

use rayon::prelude::*;

use crate::bounds::{BoundReport, Verdict};
use crate::error::{Error, Result};

use super::config::{CampaignConfig, OutputFormat};
use super::registry::run_trial;

/// Runs every (bound, trial) pair; reports come back grouped by bound in
/// config order, then by trial, regardless of thread scheduling.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Vec<BoundReport>> {
    let jobs: Vec<(&str, usize)> = cfg
        .bounds
        .iter()
        .flat_map(|b| (0..cfg.trials).map(move |t| (b.as_str(), t)))
        .collect();
    jobs.par_iter().map(|&(b, t)| run_trial(cfg, b, t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub holds: usize,
    pub violated: usize,
    pub not_applicable: usize,
}

pub fn tally(reports: &[BoundReport]) -> Tally {
    let mut t = Tally::default();
    for r in reports {
        match r.verdict {
            Verdict::Holds => t.holds += 1,
            Verdict::Violated => t.violated += 1,
            Verdict::NotApplicable => t.not_applicable += 1,
        }
    }
    t
}

pub fn write_reports<W: Write>(reports: &[BoundReport], format: OutputFormat, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("write failed: {e}"));
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, reports).map_err(|e| Error::Config(e.to_string()))?;
            writeln!(out).map_err(io)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
            w.write_record(BoundReport::CSV_HEADER).map_err(csv_err)?;
            for r in reports {
                w.write_record(r.csv_row()).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(bounds: &[&str], trials: usize) -> CampaignConfig {
        let text = format!(
            r#"{{"seed": 11, "trials": {trials}, "dims": [4, 8], "epsilon_grid": [0.05, 0.3],
                "energy": {{"spectrum": {{"kind": "arithmetic", "step": 1.0}}, "E": 1.0}},
                "rank": 2, "bounds": {}}}"#,
            serde_json::to_string(bounds).unwrap()
        );
        CampaignConfig::from_json(&text).unwrap()
    }

    #[test]
    fn deterministic_and_ordered() {
        let cfg = config(&["sh-cb", "eq-1-cb"], 6);
        let a = run_campaign(&cfg).unwrap();
        let b = run_campaign(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        assert!(a[..6].iter().all(|r| r.bound == "sh-cb"));
        for (i, r) in a[..6].iter().enumerate() {
            assert_eq!(r.inputs["trial"], i as f64);
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        write_reports(&a, OutputFormat::Csv, &mut x).unwrap();
        write_reports(&b, OutputFormat::Csv, &mut y).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn every_registered_bound_runs() {
        let all: Vec<&str> = super::super::registry::BOUNDS.to_vec();
        let reports = run_campaign(&config(&all, 4)).unwrap();
        let t = tally(&reports);
        assert_eq!(t.violated, 0, "{reports:#?}");
        assert_eq!(t.holds + t.not_applicable, reports.len());
    }
}
