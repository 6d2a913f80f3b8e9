//! Flat torus `T⁴ = ℝ⁴ / ⊕ L_i ℤ` with the trivial foliation spanned by the
//! first `2p` coordinates.
//!
//! Here `D_F² = Δ ⊗ 1` on a bundle of rank `2^(p+q)`, so the spectrum is
//! `4π² Σ (k_i / L_i)²` over `k ∈ ℤ⁴`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::clifford::Dims;
use crate::error::{Error, Result};
use crate::heat::compact_prefactor;

/// Largest lattice bounding box enumerated before giving up.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;

/// Relative size below which theta-series terms are dropped.
const THETA_TAIL: f64 = 1e-18;

fn default_periods() -> [f64; 4] {
    [1.0; 4]
}

fn default_cut() -> f64 {
    20.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub p: usize,
    pub q: usize,
    #[serde(default = "default_periods")]
    pub periods: [f64; 4],
    /// Spectrum is enumerated for eigenvalues of `|D_F|` up to `cut`.
    #[serde(default = "default_cut")]
    pub cut: f64,
}

impl TorusSpec {
    pub fn unit(dims: Dims) -> Self {
        TorusSpec { p: dims.p(), q: dims.q(), periods: default_periods(), cut: default_cut() }
    }

    pub fn dims(&self) -> Result<Dims> {
        let dims = Dims::new(self.p, self.q)?;
        if dims.m() != 4 {
            return Err(Error::UnsupportedDimension(format!(
                "the torus benchmark needs m = 4, got m = {}",
                dims.m()
            )));
        }
        Ok(dims)
    }

    pub fn validate(&self) -> Result<Dims> {
        let dims = self.dims()?;
        if self.periods.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Input("torus periods must be positive".into()));
        }
        if !(self.cut.is_finite() && self.cut > 0.0) {
            return Err(Error::Input("lattice cut must be positive".into()));
        }
        Ok(dims)
    }

    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    pub fn rank(&self) -> u64 {
        1u64 << (self.p + self.q)
    }

    /// `a_0 = vol / (2^p π^(p+q/2))`
    pub fn a0(&self) -> Result<f64> {
        Ok(compact_prefactor(self.dims()?) * self.volume())
    }

    /// Groups of coordinates sharing a period, so eigenvalues can be keyed by integers.
    fn period_groups(&self) -> Vec<usize> {
        let mut distinct: Vec<f64> = Vec::new();
        self.periods
            .iter()
            .map(|l| match distinct.iter().position(|d| d == l) {
                Some(g) => g,
                None => {
                    distinct.push(*l);
                    distinct.len() - 1
                }
            })
            .collect()
    }

    fn ranges(&self, lambda: f64) -> Result<[i64; 4]> {
        let mut ranges = [0i64; 4];
        let mut box_size = 1f64;
        for (r, l) in ranges.iter_mut().zip(self.periods) {
            let reach = (lambda * l / (2.0 * PI)).floor();
            box_size *= 2.0 * reach + 1.0;
            *r = reach as i64;
        }
        if box_size > ENUMERATION_BUDGET as f64 {
            return Err(Error::Resource(format!(
                "lattice box of {box_size:.3e} points exceeds the budget of {ENUMERATION_BUDGET}"
            )));
        }
        Ok(ranges)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

/// Eigenvalues of `D_F²` with multiplicities, ascending, complete up to `cut²`.
///
/// Entries are keyed by the integer sums `Σ k_i²` over coordinates of equal
/// period. Commensurate but unequal periods can therefore list one eigenvalue
/// in several entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    pub cut: f64,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumSlice {
    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

fn inside(k: [i64; 4], periods: &[f64; 4], bound: f64) -> bool {
    let s: f64 = k.iter().zip(periods).map(|(&k, l)| (k as f64 / l).powi(2)).sum();
    s <= bound
}

/// Walks `k ∈ ℤ⁴` with `4π² Σ (k_i/L_i)² ≤ λ²`.
fn for_each_lattice_point(t: &TorusSpec, lambda: f64, mut f: impl FnMut([i64; 4])) -> Result<()> {
    let r = t.ranges(lambda)?;
    let bound = (lambda / (2.0 * PI)).powi(2);
    for a in -r[0]..=r[0] {
        for b in -r[1]..=r[1] {
            for c in -r[2]..=r[2] {
                let partial = [a, b, c]
                    .iter()
                    .zip(&t.periods)
                    .map(|(&k, l)| (k as f64 / l).powi(2))
                    .sum::<f64>();
                if partial > bound {
                    continue;
                }
                let l3 = t.periods[3];
                let reach = (((bound - partial).max(0.0)).sqrt() * l3).floor() as i64 + 1;
                for d in -reach.min(r[3])..=reach.min(r[3]) {
                    let k = [a, b, c, d];
                    if inside(k, &t.periods, bound) {
                        f(k);
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn torus_eigenvalues(t: &TorusSpec) -> Result<SpectrumSlice> {
    t.validate()?;
    let groups = t.period_groups();
    let n_groups = groups.iter().max().map_or(0, |g| g + 1);
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for_each_lattice_point(t, t.cut, |k| {
        let mut key = vec![0u64; n_groups];
        for (i, &g) in groups.iter().enumerate() {
            key[g] += (k[i] * k[i]) as u64;
        }
        *counts.entry(key).or_default() += 1;
    })?;
    let mut group_period = vec![0.0; n_groups];
    for (i, &g) in groups.iter().enumerate() {
        group_period[g] = t.periods[i];
    }
    let rank = t.rank();
    let mut entries: Vec<SpectrumEntry> = counts
        .into_iter()
        .map(|(key, n)| SpectrumEntry {
            eigenvalue: 4.0
                * PI
                * PI
                * key
                    .iter()
                    .zip(&group_period)
                    .map(|(&s, l)| s as f64 / (l * l))
                    .sum::<f64>(),
            multiplicity: n * rank,
        })
        .collect();
    entries.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    Ok(SpectrumSlice { cut: t.cut, entries })
}

/// `Σ_k exp(-time·4π²k²/L²)`, summed until terms drop below `1e-18` of the total.
fn theta(time: f64, period: f64) -> f64 {
    let rate = time * 4.0 * PI * PI / (period * period);
    let mut sum = 1.0;
    let mut k = 1u64;
    loop {
        let term = 2.0 * (-rate * (k * k) as f64).exp();
        sum += term;
        if term < THETA_TAIL * sum {
            return sum;
        }
        k += 1;
    }
}

/// `Tr exp(-time·D_F²)`. The lattice sum factorizes into one-dimensional theta
/// series; each is truncated once its terms fall below `1e-18` of its value.
pub fn torus_heat_trace(t: &TorusSpec, time: f64) -> Result<f64> {
    t.validate()?;
    if !(time.is_finite() && time > 0.0) {
        return Err(Error::Input(format!("heat time must be positive, got {time}")));
    }
    Ok(t.rank() as f64 * t.periods.iter().map(|&l| theta(time, l)).product::<f64>())
}

/// Number of eigenvalues of `D_F²` in `[0, Λ²]`, with multiplicity.
pub fn torus_count_action(t: &TorusSpec, lambda: f64) -> Result<u64> {
    t.validate()?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Input(format!("Λ must be non-negative, got {lambda}")));
    }
    let mut n = 0u64;
    for_each_lattice_point(t, lambda, |_| n += 1)?;
    Ok(n * t.rank())
}
