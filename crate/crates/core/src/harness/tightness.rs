use std::io::Write;

use serde::Serialize;

use crate::bounds::{bdj_bound, entropy_energy_bound, extremal_pair, winter_energy_bound};
use crate::error::{Error, Result};
use crate::hamiltonians::{g_unchecked, max_entropy, SpectrumKind, SpectrumSequence};

/// One grid cell of a tightness sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRow {
    #[serde(rename = "E")]
    pub energy: f64,
    pub eps: f64,
    /// Entropy gap of the extremal pair.
    pub gap: f64,
    /// `eps F(E/eps)`, which the gap strictly exceeds.
    pub lower: f64,
    pub sh_cb: f64,
    /// Only for the number operator inside its validity region.
    pub bdj: Option<f64>,
    pub w_cb_1: f64,
    /// `gap / sh_cb`.
    pub ratio: f64,
    /// `lower / (lower + g(eps))`, the smallest ratio the extremal gap can take.
    pub ratio_floor: f64,
}

fn is_number_operator(spec: &SpectrumSequence) -> bool {
    matches!(spec.kind(), SpectrumKind::Arithmetic { step } if *step == 1.0)
}

pub fn tightness_sweep(spec: &SpectrumSequence, energies: &[f64], eps_grid: &[f64]) -> Result<Vec<TightnessRow>> {
    if energies.is_empty() || eps_grid.is_empty() {
        return Err(Error::Config("empty sweep grid".into()));
    }
    let mut rows = Vec::with_capacity(energies.len() * eps_grid.len());
    for &e in energies {
        for &eps in eps_grid {
            let (rho, sigma) = extremal_pair(spec, e, eps)?;
            let gap = rho.entropy() - sigma.entropy();
            let lower = eps * max_entropy(spec, e / eps)?;
            let sh_cb = entropy_energy_bound(spec, e, eps)?;
            let bdj = if is_number_operator(spec) && eps <= e / (e + 1.0) {
                Some(bdj_bound(e, eps)?)
            } else {
                None
            };
            rows.push(TightnessRow {
                energy: e,
                eps,
                gap,
                lower,
                sh_cb,
                bdj,
                w_cb_1: winter_energy_bound(spec, e, eps)?,
                ratio: gap / sh_cb,
                ratio_floor: lower / (lower + g_unchecked(eps)),
            });
        }
    }
    Ok(rows)
}

/// Parses a comma-separated list of numbers.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad grid value {s:?}: {e}")))
        })
        .collect()
}

pub fn write_rows_csv<W: Write>(rows: &[TightnessRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::Config(format!("write failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::h2_unchecked;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bdj_difference_at_unit_energy() {
        let rows = tightness_sweep(&SpectrumSequence::number_operator(), &[1.0], &[0.25]).unwrap();
        let r = &rows[0];
        assert_abs_diff_eq!(r.sh_cb - r.bdj.unwrap(), 2.0 * (g_unchecked(0.25) - h2_unchecked(0.25)), epsilon = 1e-9);
    }

    #[test]
    fn rows_respect_band() {
        let grid = [0.01, 0.05, 0.1, 0.2, 0.4];
        let rows = tightness_sweep(&SpectrumSequence::number_operator(), &[0.5, 2.0], &grid).unwrap();
        for r in &rows {
            assert!(r.gap > r.lower);
            assert!(r.gap <= r.sh_cb + 1e-12);
            assert!(r.ratio > r.ratio_floor && r.ratio <= 1.0 + 1e-12);
        }
        // bounds decrease monotonically toward eps = 0 along each energy
        for chunk in rows.chunks(grid.len()) {
            assert!(chunk.windows(2).all(|w| w[0].sh_cb < w[1].sh_cb && w[0].w_cb_1 < w[1].w_cb_1));
        }
    }

    #[test]
    fn csv_has_header() {
        let rows = tightness_sweep(&SpectrumSequence::number_operator(), &[1.0], &[0.1, 0.9]).unwrap();
        assert!(rows[1].bdj.is_none());
        let mut buf = Vec::new();
        write_rows_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("E,eps,gap,lower,sh_cb,bdj,w_cb_1,ratio,ratio_floor\n"));
        assert_eq!(parse_grid("0.1, 2").unwrap(), vec![0.1, 2.0]);
        assert!(parse_grid("x").is_err());
    }
}
