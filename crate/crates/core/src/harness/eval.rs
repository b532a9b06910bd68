//! Closed-form evaluation of a bound by name from `key=value` parameters.

use std::collections::BTreeMap;

use crate::afw::{afw_rank_bound, LaaClassParams};
use crate::bounds::{
    audenaert_bound, bdj_bound, entropy_energy_bound, eof_bound, mi_bound, mixed_bound, qce_bound, rank_entropy_bound,
    two_sided_energy_bound, winter_energy_bound, BoundReport, Constraint, Envelope, MiMode,
};
use crate::classical::{alhejji_smith_bound, classical_energy_bound, classical_rank_bound};
use crate::error::{Error, Result};
use crate::hamiltonians::SpectrumSequence;

/// Names accepted by [`evaluate_named`] with their required parameters.
/// Energy-type bounds also take an optional `step` for the arithmetic
/// spectrum (default 1, the number operator).
pub const NAMED: [(&str, &str); 20] = [
    ("aud", "d eps"),
    ("w-cb-1", "E eps"),
    ("bdj", "E eps"),
    ("sh-cb", "E eps"),
    ("cor-3", "E_rho E_sigma eps"),
    ("mixed", "d E eps"),
    ("rank", "r eps"),
    ("qce-qc-1", "r eps"),
    ("qce-qc-1++", "r r_sigma eps"),
    ("qce-qc-2", "E eps"),
    ("ef-cb-1", "r eps"),
    ("ef-cb-2", "E eps"),
    ("i-1-1", "r eps"),
    ("i-2-1", "r r_sigma eps"),
    ("i-2-2", "E eps"),
    ("mi-c", "E eps"),
    ("eq-1-cb", "n eps"),
    ("eq-2-cb", "E eps"),
    ("opt-cb", "n eps"),
    ("afw-rank", "c_minus c_plus d_minus d_plus m n d eps"),
];

/// Parses `key=value` pairs.
pub fn parse_params<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for p in pairs {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got {p:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("bad value for {k}: {e}")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

struct Params<'a>(&'a BTreeMap<String, f64>);

impl Params<'_> {
    fn get(&self, key: &str) -> Result<f64> {
        self.0
            .get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("missing parameter {key}")))
    }

    fn count(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Config(format!("{key} must be a nonnegative integer, got {v}")));
        }
        Ok(v as usize)
    }

    fn spec(&self) -> Result<SpectrumSequence> {
        SpectrumSequence::arithmetic(self.0.get("step").copied().unwrap_or(1.0))
    }
}

pub fn evaluate_named(name: &str, params: &BTreeMap<String, f64>) -> Result<BoundReport> {
    if !NAMED.iter().any(|(n, _)| *n == name) {
        let known: Vec<&str> = NAMED.iter().map(|(n, _)| *n).collect();
        return Err(Error::Config(format!("unknown bound {name:?}; known: {}", known.join(", "))));
    }
    let p = Params(params);
    let eps = p.get("eps")?;
    let energy = |key: &str| -> Result<Constraint> {
        Ok(Constraint::Energy {
            spec: p.spec()?,
            energy: p.get(key)?,
        })
    };
    let env = match name {
        "aud" => Envelope::symmetric(audenaert_bound(p.count("d")?, eps)?),
        "w-cb-1" => Envelope::symmetric(winter_energy_bound(&p.spec()?, p.get("E")?, eps)?),
        "bdj" => Envelope::symmetric(bdj_bound(p.get("E")?, eps)?),
        "sh-cb" => Envelope::symmetric(entropy_energy_bound(&p.spec()?, p.get("E")?, eps)?),
        "cor-3" => two_sided_energy_bound(&p.spec()?, p.get("E_rho")?, p.get("E_sigma")?, eps)?,
        "mixed" => mixed_bound(p.count("d")?, &p.spec()?, p.get("E")?, eps)?,
        "rank" => Envelope::symmetric(rank_entropy_bound(p.count("r")?, eps)?),
        "qce-qc-1" => Envelope::one_sided(qce_bound(&Constraint::Rank(p.count("r")?), eps, None)?),
        "qce-qc-1++" => Envelope {
            lower: qce_bound(&Constraint::Rank(p.count("r_sigma")?), eps, None)?,
            upper: qce_bound(&Constraint::Rank(p.count("r")?), eps, None)?,
        },
        "qce-qc-2" => Envelope::symmetric(qce_bound(&energy("E")?, eps, None)?),
        "ef-cb-1" => Envelope::one_sided(eof_bound(&Constraint::Rank(p.count("r")?), eps)?),
        "ef-cb-2" => Envelope::one_sided(eof_bound(&energy("E")?, eps)?),
        "i-1-1" => mi_bound(&MiMode::RankOneSided { rank: p.count("r")? }, eps)?,
        "i-2-1" => mi_bound(
            &MiMode::RankTwoSided {
                rank_rho: p.count("r")?,
                rank_sigma: p.count("r_sigma")?,
            },
            eps,
        )?,
        "i-2-2" => mi_bound(
            &MiMode::EnergyCommuting {
                spec: p.spec()?,
                energy: p.get("E")?,
            },
            eps,
        )?,
        "mi-c" => mi_bound(&MiMode::ClassicalOscillator { energy: p.get("E")? }, eps)?,
        "eq-1-cb" => Envelope::one_sided(classical_rank_bound(
            &LaaClassParams::conditional_entropy_qc(),
            p.count("n")?,
            eps,
        )?),
        "eq-2-cb" => Envelope::one_sided(classical_energy_bound(
            &LaaClassParams::conditional_entropy_qc(),
            &p.spec()?,
            p.get("E")?,
            eps,
            None,
        )?),
        "opt-cb" => Envelope::symmetric(alhejji_smith_bound(p.count("n")?, eps)?),
        "afw-rank" => {
            let params = LaaClassParams::new(
                p.get("c_minus")?,
                p.get("c_plus")?,
                p.get("d_minus")?,
                p.get("d_plus")?,
                p.count("m")?,
                p.count("n")?,
            )?;
            Envelope::one_sided(afw_rank_bound(&params, p.count("d")?, eps)?)
        }
        other => unreachable!("{other} is listed in NAMED but not dispatched"),
    };
    let mut report = BoundReport::from_envelope(name, env);
    report.inputs = params.clone();
    Ok(report)
}
