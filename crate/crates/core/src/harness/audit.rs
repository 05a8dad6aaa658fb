//! Statistical and algebraic checks of what colluding nodes observe.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::HarnessError;
use crate::field_rs::{FieldElement, FieldPoly, MODULUS};
use crate::pir::{PirParams, PirQuery};

pub const AUDIT_BINS: usize = 64;

/// The query shares one coalition saw in one stripe round, tagged with the
/// cell actually requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub desired: usize,
    pub shares: Vec<PirQuery>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CollusionTranscript {
    pub coalition: Vec<u16>,
    pub observations: Vec<Observation>,
}

impl CollusionTranscript {
    pub fn new(coalition: Vec<u16>) -> Self {
        CollusionTranscript { coalition, observations: Vec::new() }
    }

    /// Records the coalition members' queries from one round.
    pub fn observe(&mut self, queries: &[PirQuery], desired: usize) {
        let shares = queries.iter().filter(|q| self.coalition.contains(&q.node_index)).cloned().collect();
        self.observations.push(Observation { desired, shares });
    }
}

pub fn collusion_observe(coalition: &[u16], queries: &[PirQuery], desired: usize) -> Observation {
    let mut t = CollusionTranscript::new(coalition.to_vec());
    t.observe(queries, desired);
    t.observations.pop().expect("one observation")
}

fn bin_of(v: FieldElement, bins: usize) -> usize {
    (v.value() as u128 * bins as u128 / MODULUS as u128) as usize
}

/// Number of field elements landing in each bin.
fn bin_sizes(bins: usize) -> Vec<u64> {
    let lower = |k: usize| (k as u128 * MODULUS as u128).div_ceil(bins as u128) as u64;
    (0..bins).map(|k| lower(k + 1) - lower(k)).collect()
}

fn histogram(values: &[FieldElement], bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for &v in values {
        h[bin_of(v, bins)] += 1;
    }
    h
}

/// Pearson goodness-of-fit p-value against the uniform law on GF(p).
pub fn chi_square_uniform(values: &[FieldElement], bins: usize) -> f64 {
    let n = values.len() as f64;
    let stat: f64 = histogram(values, bins)
        .iter()
        .zip(bin_sizes(bins))
        .map(|(&o, size)| {
            let e = n * size as f64 / MODULUS as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    ChiSquared::new((bins - 1) as f64).expect("positive degrees of freedom").sf(stat)
}

/// Chi-square test of homogeneity across groups; small p-values mean the
/// groups are distinguishable.
pub fn chi_square_homogeneity(groups: &[&[FieldElement]], bins: usize) -> f64 {
    let table: Vec<Vec<u64>> = groups.iter().map(|g| histogram(g, bins)).collect();
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..bins).map(|k| table.iter().map(|r| r[k]).sum::<u64>() as f64).collect();
    let total: f64 = rows.iter().sum();
    let live: Vec<usize> = (0..bins).filter(|&k| cols[k] > 0.0).collect();
    let mut stat = 0.0;
    for (i, row) in table.iter().enumerate() {
        for &k in &live {
            let e = rows[i] * cols[k] / total;
            stat += (row[k] as f64 - e).powi(2) / e;
        }
    }
    let df = ((groups.len() - 1) * (live.len().saturating_sub(1))) as f64;
    ChiSquared::new(df).expect("positive degrees of freedom").sf(stat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeAudit {
    pub node: u16,
    /// `(d, uniformity p-value)` per requested cell.
    pub uniformity: Vec<(usize, f64)>,
    /// Homogeneity p-value across the d-groups.
    pub two_sample: f64,
}

/// Per coalition member: pools every query entry it saw, per requested
/// cell, and tests uniformity and independence from `d`.
pub fn audit(transcript: &CollusionTranscript, t: usize) -> Result<Vec<NodeAudit>, HarnessError> {
    if transcript.coalition.len() > t {
        return Err(HarnessError::Invariant(format!(
            "coalition of {} exceeds t = {t}; the privacy guarantee does not apply",
            transcript.coalition.len()
        )));
    }
    let mut out = Vec::new();
    for &node in &transcript.coalition {
        let mut groups: BTreeMap<usize, Vec<FieldElement>> = BTreeMap::new();
        for obs in &transcript.observations {
            if let Some(q) = obs.shares.iter().find(|q| q.node_index == node) {
                groups.entry(obs.desired).or_default().extend(&q.entries);
            }
        }
        let uniformity = groups.iter().map(|(&d, v)| (d, chi_square_uniform(v, AUDIT_BINS))).collect();
        let slices: Vec<&[FieldElement]> = groups.values().map(Vec::as_slice).collect();
        let two_sample = if slices.len() < 2 { 1.0 } else { chi_square_homogeneity(&slices, AUDIT_BINS) };
        out.push(NodeAudit { node, uniformity, two_sample });
    }
    Ok(out)
}

fn interpolate_entry(shares: &[PirQuery], params: &PirParams, i: usize, strip: impl Fn(FieldElement) -> FieldElement) -> FieldPoly {
    let points = params.eval_points();
    let pts: Vec<_> = shares
        .iter()
        .map(|q| {
            let a = points.alpha(usize::from(q.node_index));
            (a, q.entries[i] - strip(a))
        })
        .collect();
    FieldPoly::interpolate(&pts).expect("distinct evaluation points")
}

/// Over all `n` shares of one round: every entry interpolates to degree
/// ≤ t−1 once `z^{n-2b-r-ℓ}` is removed from the desired cell's entries,
/// and the desired entries do not without that removal.
pub fn degree_structure_holds(queries: &[PirQuery], params: &PirParams, desired: usize) -> bool {
    let l_rows = params.rows_per_stripe();
    let top = params.response_dimension();
    let within = |p: &FieldPoly| p.degree().is_none_or(|d| d < params.t);
    (0..params.query_len()).all(|i| {
        let (m, l) = (i / l_rows + 1, i % l_rows + 1);
        let term = move |a: FieldElement| a.pow((top - l) as u64);
        if m == desired {
            within(&interpolate_entry(queries, params, i, term))
                && !within(&interpolate_entry(queries, params, i, |_| FieldElement::ZERO))
        } else {
            within(&interpolate_entry(queries, params, i, |_| FieldElement::ZERO))
        }
    })
}

/// With `t+1` shares, entries of the desired cell interpolate with a
/// nonzero `z^t` coefficient while all others vanish there; returns the
/// cell with the most such entries.
pub fn coalition_distinguisher(shares: &[PirQuery], params: &PirParams) -> Option<usize> {
    if shares.len() != params.t + 1 {
        return None;
    }
    let l_rows = params.rows_per_stripe();
    let mut hits = vec![0usize; params.cells + 1];
    for i in 0..params.query_len() {
        let p = interpolate_entry(shares, params, i, |_| FieldElement::ZERO);
        if !p.coeff(params.t).is_zero() {
            hits[i / l_rows + 1] += 1;
        }
    }
    let (best, &count) = hits.iter().enumerate().max_by_key(|&(_, c)| c)?;
    (count > 0).then_some(best)
}
