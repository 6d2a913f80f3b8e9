//! Potential `E`, curvature `Ω`, and the Seeley-deWitt densities `a_0..a_4` of `D_F²`.
//!
//! Two independent routes are provided. The *generic* evaluators build `E` and
//! `Ω` as Clifford elements, take exact traces, and feed them into the Gilkey
//! (closed) and Branson-Gilkey (Dirichlet) integrands. The *formula*
//! evaluators use the specialized closed forms in terms of `r_M`, `Ric²`,
//! `Riem²` and `‖R^{F^⊥}‖²`. Densities are per unit volume (interior) or per
//! unit area (boundary) and are understood modulo exact divergences unless
//! total derivatives are requested.

use std::f64::consts::PI;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::clifford::{Dims, Element, Generator, GeneratorKind};
use crate::curvature::{BoundaryPoint, CurvatureInvariants, CurvaturePoint};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `E` split as `-r_M/4 - (I1 + I2 + I3)`.
#[derive(Clone, Debug)]
pub struct PotentialE {
    pub element: Element,
    /// leaf-normal block, weight 1/4
    pub i1: Element,
    /// leaf-leaf block, weight 1/8
    pub i2: Element,
    /// normal-normal block, weight 1/8
    pub i3: Element,
}

/// `Ω_ij` for ambient `i, j`, row-major `m×m`.
#[derive(Clone, Debug)]
pub struct CurvatureTwoForm {
    m: usize,
    omega: Vec<Element>,
}

impl CurvatureTwoForm {
    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.omega[i * self.m + j]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `Σ_ij tr(Ω_ij Ω_ij)` over all ordered pairs.
    pub fn trace_sq(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for w in &self.omega {
            acc += &w.trace_product(w).expect("same dims");
        }
        acc
    }
}

fn f64_scalar(x: f64) -> Scalar {
    Scalar::from_f64(x)
}

pub fn build_e(c: &CurvaturePoint) -> PotentialE {
    let dims = c.dims;
    let (l, q) = (dims.leaf_dim(), dims.q());
    let rf = &c.rfperp;
    let hat = |s: usize| Generator::hat(s + 1);
    let quarter = Scalar::ratio(1, 4);
    let eighth = Scalar::ratio(1, 8);

    let mut i1 = Element::zero(dims);
    let mut i2 = Element::zero(dims);
    let mut i3 = Element::zero(dims);
    for s in 0..q {
        for t in 0..q {
            if s == t {
                continue;
            }
            for i in 0..l {
                for r in 0..q {
                    let v = rf.get(i, l + r, s, t);
                    let gens = [Generator::leaf(i + 1), Generator::normal(r + 1), hat(s), hat(t)];
                    i1.add_word(&gens, &quarter * &f64_scalar(v)).expect("in range");
                }
                for j in 0..l {
                    if i == j {
                        continue;
                    }
                    let v = rf.get(i, j, s, t);
                    let gens = [Generator::leaf(i + 1), Generator::leaf(j + 1), hat(s), hat(t)];
                    i2.add_word(&gens, &eighth * &f64_scalar(v)).expect("in range");
                }
            }
            for r in 0..q {
                for k in 0..q {
                    if r == k {
                        continue;
                    }
                    let v = rf.get(l + r, l + k, s, t);
                    let gens = [
                        Generator::normal(r + 1),
                        Generator::normal(k + 1),
                        hat(s),
                        hat(t),
                    ];
                    i3.add_word(&gens, &eighth * &f64_scalar(v)).expect("in range");
                }
            }
        }
    }
    let w = &(&i1 + &i2) + &i3;
    let scalar = Element::scalar(dims, -(&quarter * &f64_scalar(c.scalar_curvature)));
    let element = &scalar - &w;
    PotentialE { element, i1, i2, i3 }
}

/// `Ω_ij = -¼ R_ijkl c(e_k)c(e_l) - ¼ ⟨R^{F^⊥}(e_i,e_j)h_s,h_t⟩ ĉ(h_s)ĉ(h_t)`.
///
/// The normal-bundle block is the curvature of the twisting factor, so it acts
/// through the second Clifford action `ĉ`, which commutes past the `c(e_k)`
/// block up to sign and contributes no cross terms to `tr(Ω_ij Ω_ij)`.
pub fn build_omega(c: &CurvaturePoint) -> CurvatureTwoForm {
    build_omega_acting(c, GeneratorKind::NormalHat)
}

/// Same as [`build_omega`] but letting the normal-bundle block act through
/// `twist` (`NormalHat` or `NormalC`).
pub fn build_omega_acting(c: &CurvaturePoint, twist: GeneratorKind) -> CurvatureTwoForm {
    let dims = c.dims;
    let (m, q) = (dims.m(), dims.q());
    let twist_gen = |s: usize| match twist {
        GeneratorKind::NormalC => Generator::normal(s + 1),
        _ => Generator::hat(s + 1),
    };
    let minus_quarter = Scalar::ratio(-1, 4);
    let mut omega = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut w = Element::zero(dims);
            if i != j {
                for k in 0..m {
                    for l in 0..m {
                        if k == l {
                            continue;
                        }
                        let v = c.riemann.get(i, j, k, l);
                        let gens = [dims.ambient(k + 1), dims.ambient(l + 1)];
                        w.add_word(&gens, &minus_quarter * &f64_scalar(v)).expect("in range");
                    }
                }
                for s in 0..q {
                    for t in 0..q {
                        if s == t {
                            continue;
                        }
                        // ⟨R(e_i,e_j) h_s, h_t⟩ is stored at (i, j, t, s)
                        let v = c.rfperp.get(i, j, t, s);
                        let gens = [twist_gen(s), twist_gen(t)];
                        w.add_word(&gens, &minus_quarter * &f64_scalar(v)).expect("in range");
                    }
                }
            }
            omega.push(w);
        }
    }
    CurvatureTwoForm { m, omega }
}

/// Exact traces entering the interior densities.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicTraces {
    pub tr_id: Scalar,
    pub tr_e: Scalar,
    pub tr_e_sq: Scalar,
    pub tr_omega_sq: Scalar,
}

pub fn symbolic_traces(c: &CurvaturePoint) -> SymbolicTraces {
    let e = build_e(c).element;
    let omega = build_omega(c);
    SymbolicTraces {
        tr_id: Element::identity(c.dims).trace(),
        tr_e: e.trace(),
        tr_e_sq: e.trace_product(&e).expect("same dims"),
        tr_omega_sq: omega.trace_sq(),
    }
}

/// Traces as doubles, the input of the Gilkey integrand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceData {
    pub tr_id: f64,
    pub tr_e: f64,
    pub tr_e_sq: f64,
    pub tr_omega_sq: f64,
}

impl From<&SymbolicTraces> for TraceData {
    fn from(t: &SymbolicTraces) -> Self {
        TraceData {
            tr_id: t.tr_id.to_f64(),
            tr_e: t.tr_e.to_f64(),
            tr_e_sq: t.tr_e_sq.to_f64(),
            tr_omega_sq: t.tr_omega_sq.to_f64(),
        }
    }
}

/// `(4π)^(-m/2)`
pub fn heat_prefactor(dims: Dims) -> f64 {
    (4.0 * PI).powf(-(dims.m() as f64) / 2.0)
}

/// `(4π)^(-(m-1)/2)`
pub fn boundary_prefactor(dims: Dims) -> f64 {
    (4.0 * PI).powf(-(dims.m() as f64 - 1.0) / 2.0)
}

/// `1 / (2^p π^(p + q/2))`, equal to `(4π)^(-m/2) 2^(p+q)`.
pub fn compact_prefactor(dims: Dims) -> f64 {
    let (p, q) = (dims.p() as f64, dims.q() as f64);
    1.0 / (2f64.powf(p) * PI.powf(p + q / 2.0))
}

/// Curvature contractions as they appear in the Gilkey integrand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contractions {
    /// `R_ijij`
    pub r_ijij: f64,
    /// `R_ijik R_ljlk`
    pub ric_sq: f64,
    /// `R_ijkl R_ijkl`
    pub riem_sq: f64,
}

impl From<&CurvatureInvariants> for Contractions {
    fn from(inv: &CurvatureInvariants) -> Self {
        Contractions {
            r_ijij: -inv.r_m,
            ric_sq: inv.ric_sq,
            riem_sq: inv.riem_sq,
        }
    }
}

/// Bracket of the order-4 Gilkey integrand without the `(4π)^(-m/2)/360` prefactor
/// and without total derivatives:
/// `5 R_ijij R_klkl tr1 - 2 Ric² tr1 + 2 Riem² tr1 - 60 R_ijij trE + 180 trE² + 30 trΩΩ`.
pub fn gilkey_a4_bracket(t: &TraceData, k: &Contractions) -> f64 {
    5.0 * k.r_ijij * k.r_ijij * t.tr_id - 2.0 * k.ric_sq * t.tr_id + 2.0 * k.riem_sq * t.tr_id
        - 60.0 * k.r_ijij * t.tr_e
        + 180.0 * t.tr_e_sq
        + 30.0 * t.tr_omega_sq
}

/// Bracket of the order-2 Gilkey integrand, `tr(τ + 6E)` with `τ = -R_ijij`.
pub fn gilkey_a2_bracket(t: &TraceData, k: &Contractions) -> f64 {
    -k.r_ijij * t.tr_id + 6.0 * t.tr_e
}

fn check_closed_order(order: u8) -> Result<()> {
    match order {
        0 | 2 | 4 => Ok(()),
        _ => Err(Error::Input(format!(
            "closed-manifold densities exist for orders 0, 2, 4; got {order}"
        ))),
    }
}

/// Gilkey density of `a_order` from exact Clifford traces.
///
/// With `include_total_derivatives` the terms `-12 R_ijij;kk + 60 E;kk` are
/// added using `Δr_M` from the point; otherwise they are dropped.
pub fn density_closed_generic(
    c: &CurvaturePoint,
    order: u8,
    include_total_derivatives: bool,
) -> Result<f64> {
    check_closed_order(order)?;
    let traces = TraceData::from(&symbolic_traces(c));
    density_closed_from_traces(c, &traces, order, include_total_derivatives)
}

/// Gilkey density from precomputed traces (shared by the matrix-oracle path).
pub fn density_closed_from_traces(
    c: &CurvaturePoint,
    traces: &TraceData,
    order: u8,
    include_total_derivatives: bool,
) -> Result<f64> {
    check_closed_order(order)?;
    let pre = heat_prefactor(c.dims);
    let k = Contractions::from(&c.invariants());
    Ok(match order {
        0 => pre * traces.tr_id,
        2 => pre * gilkey_a2_bracket(traces, &k) / 6.0,
        _ => {
            let mut bracket = gilkey_a4_bracket(traces, &k);
            if include_total_derivatives {
                let lap = c.scalar_laplacian.ok_or_else(|| {
                    Error::Input("total-derivative terms need the scalar-curvature Laplacian".into())
                })?;
                // R_ijij;kk = -Δr, tr E;kk = -2^(p+q) Δr / 4
                let tr_e_lap = -traces.tr_id * lap / 4.0;
                bracket += -12.0 * (-lap) * traces.tr_id + 60.0 * tr_e_lap;
            }
            pre * bracket / 360.0
        }
    })
}

/// Specialized closed forms in terms of curvature invariants only.
pub fn density_closed_formula(c: &CurvaturePoint, order: u8) -> Result<f64> {
    check_closed_order(order)?;
    let pre = compact_prefactor(c.dims);
    let inv = c.invariants();
    Ok(match order {
        0 => pre,
        2 => -pre * inv.r_m / 12.0,
        _ => {
            pre / 360.0
                * (1.25 * inv.r_m * inv.r_m - 2.0 * inv.ric_sq - 1.75 * inv.riem_sq
                    + 7.5 * inv.rfperp_norm_sq)
        }
    })
}

fn check_boundary_order(order: u8) -> Result<()> {
    if order > 4 {
        return Err(Error::Input(format!(
            "boundary densities exist for orders 0..=4; got {order}"
        )));
    }
    Ok(())
}

/// Branson-Gilkey `r_{M;N}` coefficient contributed by
/// `tr(-120 E;N - 18 r;N)` with `tr E;N = -2^(p+q) r;N / 4`, per unit `2^(p+q) r;N`.
pub const GENERIC_R_NORMAL_COEFF: f64 = 12.0;

/// The `r_{M;N}` coefficient printed in the specialized Dirichlet `a_4`.
pub const PRINTED_R_NORMAL_COEFF: f64 = -51.0;

/// Boundary terms of order 4 that do not involve `E` or `r_{M;N}`, without
/// the `2^(p+q)` trace factor.
fn boundary_a4_geometric(b: &BoundaryPoint) -> f64 {
    let l_tr = b.l_trace();
    4.0 * b.r_anan() * l_tr - 12.0 * b.r_anbn_l() + 4.0 * b.r_abcb_l() + 24.0 * b.l_trace_laplacian
        + 40.0 / 21.0 * l_tr.powi(3)
        - 88.0 / 7.0 * b.l_sq() * l_tr
        + 320.0 / 21.0 * b.l_cube()
}

/// Branson-Gilkey Dirichlet densities `(interior, boundary)` from exact traces.
pub fn density_boundary_generic(b: &BoundaryPoint, order: u8) -> Result<(f64, f64)> {
    check_boundary_order(order)?;
    let traces = TraceData::from(&symbolic_traces(&b.interior));
    density_boundary_from_traces(b, &traces, order)
}

pub fn density_boundary_from_traces(
    b: &BoundaryPoint,
    traces: &TraceData,
    order: u8,
) -> Result<(f64, f64)> {
    check_boundary_order(order)?;
    let dims = b.dims();
    let c = &b.interior;
    let pre = heat_prefactor(dims);
    let pre_b = boundary_prefactor(dims);
    let n = traces.tr_id;
    let tau = c.scalar_curvature;
    let l_tr = b.l_trace();
    Ok(match order {
        0 => (pre * n, 0.0),
        1 => (0.0, -0.25 * pre_b * n),
        2 => {
            let interior = density_closed_from_traces(c, traces, 2, false)?;
            (interior, pre / 6.0 * 2.0 * n * l_tr)
        }
        3 => {
            let integrand = 96.0 * traces.tr_e + 16.0 * tau * n + 8.0 * b.r_anan() * n
                + 7.0 * l_tr * l_tr * n
                - 10.0 * b.l_sq() * n;
            (0.0, -0.25 * pre_b / 96.0 * integrand)
        }
        _ => {
            let interior = density_closed_from_traces(c, traces, 4, false)?;
            // the W-part of E is built from traceless words, so only r_M survives
            let tr_e_normal = -n * b.r_normal_derivative / 4.0;
            let integrand = -120.0 * tr_e_normal - 18.0 * b.r_normal_derivative * n
                + 120.0 * traces.tr_e * l_tr
                + 20.0 * tau * l_tr * n
                + n * boundary_a4_geometric(b);
            (interior, pre / 360.0 * integrand)
        }
    })
}

/// Specialized Dirichlet densities `(interior, boundary)`.
///
/// The order-4 boundary term uses the printed `r_{M;N}` coefficient
/// ([`PRINTED_R_NORMAL_COEFF`]).
pub fn density_boundary_formula(b: &BoundaryPoint, order: u8) -> Result<(f64, f64)> {
    density_boundary_formula_with(b, order, PRINTED_R_NORMAL_COEFF)
}

/// As [`density_boundary_formula`] with an explicit `r_{M;N}` coefficient.
pub fn density_boundary_formula_with(
    b: &BoundaryPoint,
    order: u8,
    r_normal_coeff: f64,
) -> Result<(f64, f64)> {
    check_boundary_order(order)?;
    let dims = b.dims();
    let c = &b.interior;
    let n = dims.spinor_dim() as f64;
    let compact = compact_prefactor(dims);
    let pre = heat_prefactor(dims);
    let pre_b = boundary_prefactor(dims);
    let r = c.scalar_curvature;
    let l_tr = b.l_trace();
    Ok(match order {
        0 => (compact, 0.0),
        1 => (0.0, -0.25 * pre_b * n),
        2 => (-compact * r / 12.0, compact * 4.0 * l_tr / 12.0),
        3 => {
            let integrand =
                -8.0 * r + 8.0 * b.r_anan() + 7.0 * l_tr * l_tr - 10.0 * b.l_sq();
            (0.0, -0.25 * pre_b / 96.0 * n * integrand)
        }
        _ => {
            let inv = c.invariants();
            let interior = pre / 360.0
                * n
                * (1.25 * r * r - 2.0 * inv.ric_sq - 1.75 * inv.riem_sq
                    + 7.5 * inv.rfperp_norm_sq);
            let boundary = pre / 360.0
                * n
                * (r_normal_coeff * b.r_normal_derivative - 10.0 * r * l_tr
                    + boundary_a4_geometric(b));
            (interior, boundary)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    GenericTrace,
    SpecializedFormula,
}

/// Densities `a_0..a_4` in the half-integer indexing (`a_1`, `a_3` vanish on
/// closed manifolds), split into interior and boundary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatCoefficients {
    pub interior: [f64; 5],
    pub boundary: [f64; 5],
    pub has_boundary: bool,
    pub provenance: Provenance,
}

impl HeatCoefficients {
    pub fn closed_generic(c: &CurvaturePoint, include_total_derivatives: bool) -> Result<Self> {
        let traces = TraceData::from(&symbolic_traces(c));
        let mut interior = [0.0; 5];
        for order in [0u8, 2, 4] {
            interior[order as usize] =
                density_closed_from_traces(c, &traces, order, include_total_derivatives)?;
        }
        Ok(HeatCoefficients {
            interior,
            boundary: [0.0; 5],
            has_boundary: false,
            provenance: Provenance::GenericTrace,
        })
    }

    pub fn closed_formula(c: &CurvaturePoint) -> Self {
        let mut interior = [0.0; 5];
        for order in [0u8, 2, 4] {
            interior[order as usize] = density_closed_formula(c, order).expect("valid order");
        }
        HeatCoefficients {
            interior,
            boundary: [0.0; 5],
            has_boundary: false,
            provenance: Provenance::SpecializedFormula,
        }
    }

    pub fn boundary_generic(b: &BoundaryPoint) -> Self {
        let traces = TraceData::from(&symbolic_traces(&b.interior));
        let mut out = HeatCoefficients {
            interior: [0.0; 5],
            boundary: [0.0; 5],
            has_boundary: true,
            provenance: Provenance::GenericTrace,
        };
        for order in 0..=4u8 {
            let (i, s) = density_boundary_from_traces(b, &traces, order).expect("valid order");
            out.interior[order as usize] = i;
            out.boundary[order as usize] = s;
        }
        out
    }

    pub fn boundary_formula(b: &BoundaryPoint) -> Self {
        let mut out = HeatCoefficients {
            interior: [0.0; 5],
            boundary: [0.0; 5],
            has_boundary: true,
            provenance: Provenance::SpecializedFormula,
        };
        for order in 0..=4u8 {
            let (i, s) = density_boundary_formula(b, order).expect("valid order");
            out.interior[order as usize] = i;
            out.boundary[order as usize] = s;
        }
        out
    }

    /// `a_k = volume · interior_k + area · boundary_k`.
    pub fn integrated(&self, volume: f64, area: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        for k in 0..5 {
            out[k] = volume * self.interior[k] + area * self.boundary[k];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::BoundaryPoint;

    fn dims(p: usize, q: usize) -> Dims {
        Dims::new(p, q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        let s = a.abs().max(b.abs());
        if s == 0.0 {
            0.0
        } else {
            (a - b).abs() / s
        }
    }

    #[test]
    fn flat_point_gives_zero_e_and_omega() {
        let c = CurvaturePoint::flat(dims(1, 2));
        assert!(build_e(&c).element.is_zero());
        let omega = build_omega(&c);
        for i in 0..4 {
            for j in 0..4 {
                assert!(omega.get(i, j).is_zero());
            }
        }
        assert_eq!(density_closed_generic(&c, 4, false).unwrap(), 0.0);
        assert_eq!(density_closed_formula(&c, 4).unwrap(), 0.0);
    }

    #[test]
    fn trace_e_is_exact() {
        let c = CurvaturePoint::random(1, dims(1, 2));
        let e = build_e(&c).element;
        let expected = Scalar::from_f64(c.scalar_curvature).scale_int(-8) * Scalar::ratio(1, 4);
        assert_eq!(e.trace(), expected);
    }

    #[test]
    fn omega_is_antisymmetric() {
        let c = CurvaturePoint::random(2, dims(1, 2));
        let omega = build_omega(&c);
        for i in 0..4 {
            for j in 0..4 {
                assert!((omega.get(i, j) + omega.get(j, i)).is_zero());
            }
        }
    }

    #[test]
    fn prefactor_styles_agree() {
        for (p, q) in [(1, 2), (1, 4), (2, 2), (3, 6)] {
            let d = dims(p, q);
            let a = heat_prefactor(d) * d.spinor_dim() as f64;
            assert!(rel(a, compact_prefactor(d)) < 1e-14);
        }
    }

    #[test]
    fn order_zero_and_two() {
        let c = CurvaturePoint::random(4, dims(1, 2));
        let a0 = density_closed_generic(&c, 0, false).unwrap();
        assert!(rel(a0, 1.0 / (2.0 * PI * PI)) < 1e-14);
        let a2 = density_closed_generic(&c, 2, false).unwrap();
        assert!(rel(a2, -c.scalar_curvature / (12.0 * 2.0 * PI * PI)) < 1e-12);
    }

    #[test]
    fn constant_curvature_fixture() {
        let c = CurvaturePoint::constant_curvature(1.0, dims(1, 2));
        let expected = 66.0 / (360.0 * 2.0 * PI * PI);
        let generic = density_closed_generic(&c, 4, false).unwrap();
        assert!(rel(generic, expected) < 1e-12, "{generic} vs {expected}");
        assert!(rel(density_closed_formula(&c, 4).unwrap(), expected) < 1e-12);
    }

    #[test]
    fn generic_matches_formula_on_random_points() {
        for (p, q) in [(1, 2), (2, 2)] {
            for seed in 0..5 {
                let c = CurvaturePoint::random(seed, dims(p, q));
                let g = density_closed_generic(&c, 4, false).unwrap();
                let f = density_closed_formula(&c, 4).unwrap();
                assert!(rel(g, f) < 1e-9, "({p},{q}) seed {seed}: {g} vs {f}");
            }
        }
    }

    #[test]
    fn total_derivatives_need_laplacian() {
        let mut c = CurvaturePoint::random(3, dims(1, 2));
        c.scalar_laplacian = None;
        assert!(matches!(
            density_closed_generic(&c, 4, true),
            Err(Error::Input(_))
        ));
        c.scalar_laplacian = Some(2.0);
        let with = density_closed_generic(&c, 4, true).unwrap();
        let without = density_closed_generic(&c, 4, false).unwrap();
        // -12 R_ijij;kk + 60 tr E;kk = -3 · 2^(p+q) Δr
        let expected = heat_prefactor(c.dims) / 360.0 * (-3.0 * 8.0 * 2.0);
        assert!(rel(with - without, expected) < 1e-9);
    }

    #[test]
    fn invalid_orders() {
        let c = CurvaturePoint::flat(dims(1, 2));
        assert!(density_closed_formula(&c, 3).is_err());
        let b = BoundaryPoint::random(1, dims(1, 2));
        assert!(density_boundary_formula(&b, 5).is_err());
    }

    #[test]
    fn boundary_low_orders() {
        let b = BoundaryPoint::random(5, dims(1, 2));
        let (_, a1) = density_boundary_generic(&b, 1).unwrap();
        let expected = -0.25 * (4.0 * PI).powf(-1.5) * 8.0;
        assert!(rel(a1, expected) < 1e-14);
        let (_, a2) = density_boundary_generic(&b, 2).unwrap();
        assert!(rel(a2, 4.0 * b.l_trace() / (12.0 * 2.0 * PI * PI)) < 1e-12);
        for order in 0..=3 {
            let g = density_boundary_generic(&b, order).unwrap();
            let f = density_boundary_formula(&b, order).unwrap();
            assert!(rel(g.0, f.0) < 1e-9 && rel(g.1, f.1) < 1e-9, "order {order}");
        }
    }

    #[test]
    fn flat_half_space_order_three_vanishes() {
        let c = CurvaturePoint::flat(dims(1, 2));
        let b = BoundaryPoint::new(c, vec![0.0; 9], 0.0, 0.0).unwrap();
        assert_eq!(density_boundary_generic(&b, 3).unwrap(), (0.0, 0.0));
        assert_eq!(density_boundary_formula(&b, 3).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn boundary_order_four_differs_only_in_r_normal() {
        let b = BoundaryPoint::random(6, dims(1, 2));
        let g = density_boundary_generic(&b, 4).unwrap();
        let f = density_boundary_formula_with(&b, 4, GENERIC_R_NORMAL_COEFF).unwrap();
        assert!(rel(g.0, f.0) < 1e-9);
        assert!(rel(g.1, f.1) < 1e-9);
        let printed = density_boundary_formula(&b, 4).unwrap();
        let gap = g.1 - printed.1;
        let expected = heat_prefactor(b.dims()) / 360.0
            * 8.0
            * (GENERIC_R_NORMAL_COEFF - PRINTED_R_NORMAL_COEFF)
            * b.r_normal_derivative;
        assert!(rel(gap, expected) < 1e-9);
    }

    #[test]
    fn closed_coefficients_have_no_odd_entries() {
        let c = CurvaturePoint::random(8, dims(1, 2));
        let h = HeatCoefficients::closed_generic(&c, false).unwrap();
        assert_eq!(h.interior[1], 0.0);
        assert_eq!(h.interior[3], 0.0);
        assert!(!h.has_boundary);
        let f = HeatCoefficients::closed_formula(&c);
        for k in 0..5 {
            assert!(rel(h.interior[k], f.interior[k]) < 1e-9);
        }
    }
}
