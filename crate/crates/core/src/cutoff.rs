//! Cut-off moments `F_k` and the large-`Λ` spectral action.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `F_0 = F̂(0)` and `F_k = Γ(k/2)^(-1) ∫_0^∞ F̂(s) s^(k/2 - 1) ds` for `k = 1..4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CutoffMoments {
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
}

impl CutoffMoments {
    /// `F_k` by index.
    pub fn get(&self, k: usize) -> f64 {
        [self.f0, self.f1, self.f2, self.f3, self.f4][k]
    }
}

/// `Γ(k/2)` for `k = 1..=4`.
fn gamma_half(k: usize) -> f64 {
    match k {
        1 => PI.sqrt(),
        2 => 1.0,
        3 => PI.sqrt() / 2.0,
        4 => 1.0,
        _ => unreachable!("moment index"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cutoff {
    /// Characteristic function of `[0, 1]`.
    Sharp,
    /// Identically zero.
    Zero,
    /// 1 on `[0, plateau]`, linear down to 0 at `s = 1`.
    Ramp { plateau: f64 },
    /// Piecewise-linear interpolation of `(s, F̂(s))` samples, zero past the last sample.
    Sampled(Vec<(f64, f64)>),
}

impl Cutoff {
    /// Parses `sharp`, `zero`, or `ramp:<plateau>`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "sharp" => Ok(Cutoff::Sharp),
            "zero" => Ok(Cutoff::Zero),
            _ => {
                let plateau = name
                    .strip_prefix("ramp:")
                    .and_then(|x| x.parse::<f64>().ok())
                    .ok_or_else(|| Error::Input(format!("unknown cut-off shape \"{name}\"")))?;
                if !(0.0..1.0).contains(&plateau) {
                    return Err(Error::Input(format!(
                        "ramp plateau must lie in [0, 1), got {plateau}"
                    )));
                }
                Ok(Cutoff::Ramp { plateau })
            }
        }
    }

    /// Samples must start at `s = 0` with strictly increasing abscissae.
    pub fn sampled(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 || samples[0].0 != 0.0 {
            return Err(Error::Input(
                "sampled cut-off needs at least two samples starting at s = 0".into(),
            ));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Input("sample abscissae must increase strictly".into()));
        }
        if samples.iter().any(|(s, v)| !s.is_finite() || !v.is_finite()) {
            return Err(Error::Input("non-finite cut-off sample".into()));
        }
        if samples.iter().any(|&(s, v)| s > 1.0 && v != 0.0) {
            log::warn!("cut-off is supported outside [0, 1]; moments are still computed");
        }
        Ok(Cutoff::Sampled(samples))
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            Cutoff::Sharp => {
                if (0.0..=1.0).contains(&s) {
                    1.0
                } else {
                    0.0
                }
            }
            Cutoff::Zero => 0.0,
            Cutoff::Ramp { plateau } => {
                if s < 0.0 || s > 1.0 {
                    0.0
                } else if s <= *plateau {
                    1.0
                } else {
                    (1.0 - s) / (1.0 - plateau)
                }
            }
            Cutoff::Sampled(samples) => {
                if s < 0.0 || s > samples.last().map(|x| x.0).unwrap_or(0.0) {
                    return 0.0;
                }
                let k = samples.partition_point(|&(x, _)| x <= s).max(1) - 1;
                if k + 1 >= samples.len() {
                    return samples[k].1;
                }
                let (s0, v0) = samples[k];
                let (s1, v1) = samples[k + 1];
                v0 + (v1 - v0) * (s - s0) / (s1 - s0)
            }
        }
    }

    /// Moments in closed form (named shapes) or by exact piecewise integration (samples).
    pub fn moments(&self) -> CutoffMoments {
        // ∫ F̂(s) s^(k/2 - 1) ds for k = 1..4
        let integral = |k: usize| -> f64 {
            let g = k as f64 / 2.0 - 1.0;
            match self {
                Cutoff::Sharp => 1.0 / (g + 1.0),
                Cutoff::Zero => 0.0,
                Cutoff::Ramp { plateau: a } => {
                    let flat = a.powf(g + 1.0) / (g + 1.0);
                    let slope = ((1.0 - a.powf(g + 1.0)) / (g + 1.0)
                        - (1.0 - a.powf(g + 2.0)) / (g + 2.0))
                        / (1.0 - a);
                    flat + slope
                }
                Cutoff::Sampled(samples) => samples
                    .windows(2)
                    .map(|w| {
                        let ((s0, v0), (s1, v1)) = (w[0], w[1]);
                        let beta = (v1 - v0) / (s1 - s0);
                        let alpha = v0 - beta * s0;
                        alpha * (s1.powf(g + 1.0) - s0.powf(g + 1.0)) / (g + 1.0)
                            + beta * (s1.powf(g + 2.0) - s0.powf(g + 2.0)) / (g + 2.0)
                    })
                    .sum(),
            }
        };
        CutoffMoments {
            f0: self.value(0.0),
            f1: integral(1) / gamma_half(1),
            f2: integral(2) / gamma_half(2),
            f3: integral(3) / gamma_half(3),
            f4: integral(4) / gamma_half(4),
        }
    }
}

/// Moments of an arbitrary cut-off on `[0, support_end]` by adaptive Simpson quadrature.
///
/// Uses `s = u²` so the `k = 1` weight `s^(-1/2)` becomes regular.
pub fn moments_by_quadrature(f: impl Fn(f64) -> f64, support_end: f64) -> CutoffMoments {
    if support_end > 1.0 {
        log::warn!("cut-off support extends past 1; moments are still computed");
    }
    let upper = support_end.max(0.0).sqrt();
    let moment = |k: usize| {
        let integrand = |u: f64| 2.0 * u.powi(k as i32 - 1) * f(u * u);
        adaptive_simpson(&integrand, 0.0, upper, 1e-14, 48) / gamma_half(k)
    };
    CutoffMoments {
        f0: f(0.0),
        f1: moment(1),
        f2: moment(2),
        f3: moment(3),
        f4: moment(4),
    }
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// `Σ_k Λ^(4-k) F_(4-k) a_k`: with closed-manifold coefficients (`a_1 = a_3 = 0`)
/// this is `Λ⁴F₄a₀ + Λ²F₂a₂ + F₀a₄`.
pub fn action_asymptotics(coeffs: &[f64; 5], moments: &CutoffMoments, lambda: f64) -> f64 {
    (0..5)
        .map(|k| lambda.powi(4 - k as i32) * moments.get(4 - k) * coeffs[k])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_closed_forms() {
        let m = Cutoff::Sharp.moments();
        assert_eq!(m.f4, 0.5);
        assert_eq!(m.f2, 1.0);
        assert_eq!(m.f0, 1.0);
        assert!((m.f3 - 4.0 / (3.0 * PI.sqrt())).abs() < 1e-15);
        assert!((m.f1 - 2.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sharp_by_quadrature() {
        let m = moments_by_quadrature(|s| Cutoff::Sharp.value(s), 1.0);
        assert!((m.f3 - 4.0 / (3.0 * PI.sqrt())).abs() <= 1e-10);
        assert!((m.f4 - 0.5).abs() <= 1e-12);
        assert!((m.f1 - 2.0 / PI.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn zero_cutoff() {
        assert_eq!(Cutoff::Zero.moments(), CutoffMoments::default());
    }

    #[test]
    fn ramp_agrees_with_quadrature_and_samples() {
        let ramp = Cutoff::Ramp { plateau: 0.3 };
        let closed = ramp.moments();
        let quad = moments_by_quadrature(|s| ramp.value(s), 1.0);
        let sampled = Cutoff::sampled(vec![(0.0, 1.0), (0.3, 1.0), (1.0, 0.0)])
            .unwrap()
            .moments();
        for k in 0..5 {
            assert!((closed.get(k) - quad.get(k)).abs() < 1e-9, "k = {k}");
            assert!((closed.get(k) - sampled.get(k)).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn named_parsing() {
        assert_eq!(Cutoff::named("sharp").unwrap(), Cutoff::Sharp);
        assert_eq!(
            Cutoff::named("ramp:0.5").unwrap(),
            Cutoff::Ramp { plateau: 0.5 }
        );
        assert!(Cutoff::named("gaussian").is_err());
        assert!(Cutoff::named("ramp:1.5").is_err());
        assert!(Cutoff::sampled(vec![(0.1, 1.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn asymptotics_examples() {
        let m = Cutoff::Sharp.moments();
        assert_eq!(action_asymptotics(&[0.0; 5], &m, 10.0), 0.0);
        let a0 = 1.0 / (2.0 * PI * PI);
        let v = action_asymptotics(&[a0, 0.0, 0.0, 0.0, 0.0], &m, 10.0);
        assert!((v - 1e4 / (4.0 * PI * PI)).abs() < 1e-10);
        let v = action_asymptotics(&[0.0, 2.0, 0.0, 0.0, 0.0], &m, 3.0);
        assert!((v - 27.0 * m.f3 * 2.0).abs() < 1e-12);
    }
}
