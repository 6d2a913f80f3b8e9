//! Finite internal space `H_f`: the potential `E_Φ` on `S(F) ⊗̂ Λ(F^⊥,*) ⊗ H_f`
//! and the Standard-Model evaluators built on it.
//!
//! Matrices are ordered spinor ⊗ internal. The gauge curvature `Ω^f_ij` is
//! also the bundle curvature `R^{H_f}(e_i, e_j)` entering the Lichnerowicz
//! endomorphism `W₁`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{chirality, Dims, Element};
use crate::curvature::CurvaturePoint;
use crate::error::{Error, Result};
use crate::heat::{
    build_e, build_omega, compact_prefactor, gilkey_a2_bracket, gilkey_a4_bracket, heat_prefactor,
    Contractions, TraceData,
};
use crate::oracle::{antihermitian_defect, hermitian_defect, CMatrix, MatrixRep};
use crate::scalar::Scalar;

/// Tolerance for accepting (anti-)self-adjoint internal data.
const ADJOINT_TOL: f64 = 1e-12;

/// Internal dimension of the Standard-Model finite space.
pub const SM_INTERNAL_DIM: usize = 96;

#[derive(Clone, Debug)]
pub struct InternalSpace {
    n_f: usize,
    m: usize,
    /// `Φ`, self-adjoint.
    pub phi: CMatrix,
    /// `Ω^f_ij`, row-major `m×m`, anti-self-adjoint and antisymmetric in `(i, j)`.
    pub gauge: Vec<CMatrix>,
    /// `K_i = [∇^{H_f}_{e_i}, Φ]`, self-adjoint.
    pub commutators: Vec<CMatrix>,
}

/// Which input classes a random internal space switches on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InputClasses {
    pub phi: bool,
    pub gauge: bool,
    pub commutators: bool,
}

impl InputClasses {
    pub const ALL: InputClasses = InputClasses { phi: true, gauge: true, commutators: true };
    pub const NONE: InputClasses = InputClasses { phi: false, gauge: false, commutators: false };
}

fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&a + a.adjoint()) * Complex64::from(0.5)
}

impl InternalSpace {
    pub fn new(
        dims: Dims,
        phi: CMatrix,
        gauge: Vec<CMatrix>,
        commutators: Vec<CMatrix>,
    ) -> Result<Self> {
        let m = dims.m();
        let n_f = phi.nrows();
        if n_f == 0 || phi.ncols() != n_f {
            return Err(Error::Input("phi must be a non-empty square matrix".into()));
        }
        if gauge.len() != m * m || commutators.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "need {} gauge entries and {m} commutators for m = {m}",
                m * m
            )));
        }
        let square = |x: &CMatrix| x.nrows() == n_f && x.ncols() == n_f;
        if !gauge.iter().all(square) || !commutators.iter().all(square) {
            return Err(Error::DimensionMismatch(format!(
                "internal matrices must all be {n_f}x{n_f}"
            )));
        }
        if hermitian_defect(&phi) > ADJOINT_TOL {
            return Err(Error::Input("phi is not self-adjoint".into()));
        }
        for k in &commutators {
            if hermitian_defect(k) > ADJOINT_TOL {
                return Err(Error::Input("commutators must be self-adjoint".into()));
            }
        }
        for i in 0..m {
            for j in 0..m {
                let g = &gauge[i * m + j];
                if antihermitian_defect(g) > ADJOINT_TOL {
                    return Err(Error::Input(format!(
                        "gauge curvature ({i}, {j}) is not anti-self-adjoint"
                    )));
                }
                let sym = (g + &gauge[j * m + i]).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if sym > ADJOINT_TOL {
                    return Err(Error::Input(format!(
                        "gauge curvature is not antisymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(InternalSpace { n_f, m, phi, gauge, commutators })
    }

    /// `Φ = 0`, flat gauge field, `K = 0`.
    pub fn trivial(dims: Dims, n_f: usize) -> Self {
        let m = dims.m();
        let z = CMatrix::zeros(n_f, n_f);
        InternalSpace {
            n_f,
            m,
            phi: z.clone(),
            gauge: vec![z.clone(); m * m],
            commutators: vec![z; m],
        }
    }

    /// `Φ = λ·Id` with everything else trivial.
    pub fn scalar_phi(dims: Dims, n_f: usize, lambda: f64) -> Self {
        let mut s = InternalSpace::trivial(dims, n_f);
        s.phi = CMatrix::identity(n_f, n_f) * Complex64::from(lambda);
        s
    }

    pub fn random(seed: u64, dims: Dims, n_f: usize, classes: InputClasses) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = dims.m();
        let mut s = InternalSpace::trivial(dims, n_f);
        let phi = random_hermitian(&mut rng, n_f);
        let mut gauge = vec![CMatrix::zeros(n_f, n_f); m * m];
        for i in 0..m {
            for j in i + 1..m {
                let g = random_hermitian(&mut rng, n_f) * Complex64::new(0.0, 1.0);
                gauge[j * m + i] = -&g;
                gauge[i * m + j] = g;
            }
        }
        let commutators: Vec<_> = (0..m).map(|_| random_hermitian(&mut rng, n_f)).collect();
        if classes.phi {
            s.phi = phi;
        }
        if classes.gauge {
            s.gauge = gauge;
        }
        if classes.commutators {
            s.commutators = commutators;
        }
        s
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    pub fn gauge_at(&self, i: usize, j: usize) -> &CMatrix {
        &self.gauge[i * self.m + j]
    }

    fn check(&self, dims: Dims) -> Result<()> {
        if dims.m() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "internal space built for m = {}, curvature has m = {}",
                self.m,
                dims.m()
            )));
        }
        Ok(())
    }

    /// `tr_f(Φ²)`
    pub fn tr_phi_sq(&self) -> f64 {
        (&self.phi * &self.phi).trace().re
    }

    /// `tr_f(Φ⁴)`
    pub fn tr_phi_quart(&self) -> f64 {
        let sq = &self.phi * &self.phi;
        (&sq * &sq).trace().re
    }

    /// `Σ_ij tr_f(Ω^f_ij Ω^f_ij)`
    pub fn tr_gauge_sq(&self) -> f64 {
        self.gauge.iter().map(|g| (g * g).trace().re).sum()
    }

    /// `Σ_i tr_f(K_i²)`
    pub fn tr_commutator_sq(&self) -> f64 {
        self.commutators.iter().map(|k| (k * k).trace().re).sum()
    }
}

/// `E_Φ` as an explicit matrix of size `2^(p+q)·n_f`.
#[derive(Clone, Debug)]
pub struct EPhiMatrix {
    pub matrix: CMatrix,
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `E_Φ = E⊗1 - ½ Σ_ab c(e_a)c(e_b)⊗Ω^f_ab + Σ_i γ c(e_i)⊗K_i - 1⊗Φ²`, where
/// `γ` is the ambient chirality (`γ5` when `m = 4`).
pub fn build_e_phi(c: &CurvaturePoint, s: &InternalSpace) -> Result<EPhiMatrix> {
    let dims = c.dims;
    s.check(dims)?;
    let rep = MatrixRep::build(dims)?;
    build_e_phi_with(c, s, &rep)
}

pub fn build_e_phi_with(c: &CurvaturePoint, s: &InternalSpace, rep: &MatrixRep) -> Result<EPhiMatrix> {
    let dims = c.dims;
    s.check(dims)?;
    let m = dims.m();
    let n_f = s.n_f;
    let id_f = CMatrix::identity(n_f, n_f);
    let id_s = CMatrix::identity(rep.size(), rep.size());

    let e = rep.rep_of(&build_e(c).element)?;
    let mut out = kron(&e, &id_f);

    let gamma = rep.rep_of(&chirality(dims))?;
    for a in 0..m {
        let ca = rep.generator(dims.ambient(a + 1))?;
        for b in 0..m {
            if a == b {
                continue;
            }
            let g = s.gauge_at(a, b);
            if g.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                continue;
            }
            let cb = rep.generator(dims.ambient(b + 1))?;
            out -= kron(&(ca * cb), g) * Complex64::from(0.5);
        }
        let k = &s.commutators[a];
        out += kron(&(&gamma * ca), k);
    }
    out -= kron(&id_s, &(&s.phi * &s.phi));
    Ok(EPhiMatrix { matrix: out })
}

/// Oracle trace of `E_Φ` next to the two candidate closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEPhi {
    pub oracle: f64,
    /// `+n_f 2^(p+q-2) r_M - 2^(p+q) tr_f(Φ²)`, as printed
    pub printed: f64,
    /// `-n_f 2^(p+q) r_M / 4 - 2^(p+q) tr_f(Φ²)`, consistent with `tr E = -2^(p+q) r_M/4`
    pub consistent: f64,
}

pub fn trace_e_phi(c: &CurvaturePoint, s: &InternalSpace) -> Result<TraceEPhi> {
    let e_phi = build_e_phi(c, s)?;
    let n = c.dims.spinor_dim() as f64;
    let nf = s.n_f as f64;
    let r = c.scalar_curvature;
    Ok(TraceEPhi {
        oracle: e_phi.matrix.trace().re,
        printed: nf * n / 4.0 * r - n * s.tr_phi_sq(),
        consistent: -nf * n / 4.0 * r - n * s.tr_phi_sq(),
    })
}

/// The five summands of the closed form for `Tr(E_Φ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EPhiSqTerms {
    /// `n_f 2^(p+q)/16 (r_M² + ‖R^{F^⊥}‖²)`
    pub curvature: f64,
    /// `-2^(p+q-1) Σ tr_f(Ω^f Ω^f)`
    pub gauge: f64,
    /// `2^(p+q-1) r_M tr_f(Φ²)`
    pub mixed: f64,
    /// `2^(p+q) tr_f(Φ⁴)`
    pub phi_quart: f64,
    /// `2^(p+q) Σ tr_f(K_i²)`
    pub commutators: f64,
}

impl EPhiSqTerms {
    pub fn total(&self) -> f64 {
        self.curvature + self.gauge + self.mixed + self.phi_quart + self.commutators
    }
}

pub fn e_phi_sq_formula(c: &CurvaturePoint, s: &InternalSpace) -> EPhiSqTerms {
    let n = c.dims.spinor_dim() as f64;
    let inv = c.invariants();
    EPhiSqTerms {
        curvature: s.n_f as f64 * n / 16.0 * (inv.r_m * inv.r_m + inv.rfperp_norm_sq),
        gauge: -n / 2.0 * s.tr_gauge_sq(),
        mixed: n / 2.0 * inv.r_m * s.tr_phi_sq(),
        phi_quart: n * s.tr_phi_quart(),
        commutators: n * s.tr_commutator_sq(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEPhiSq {
    pub oracle: f64,
    pub formula: f64,
    pub terms: EPhiSqTerms,
}

pub fn trace_e_phi_sq(c: &CurvaturePoint, s: &InternalSpace) -> Result<TraceEPhiSq> {
    let e_phi = build_e_phi(c, s)?.matrix;
    let terms = e_phi_sq_formula(c, s);
    Ok(TraceEPhiSq {
        oracle: (&e_phi * &e_phi).trace().re,
        formula: terms.total(),
        terms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedOmegaTrace {
    pub oracle: f64,
    /// `-n_f 2^(p+q)/8 (Riem² + ‖R^{F^⊥}‖²) + 2^(p+q) Σ tr_f(Ω^f Ω^f)`
    pub formula: f64,
}

/// `Σ_ij Tr(Ω̃_ij Ω̃_ij)` with `Ω̃_ij = Ω_ij⊗1 + 1⊗Ω^f_ij`.
pub fn twisted_omega_trace(c: &CurvaturePoint, s: &InternalSpace) -> Result<TwistedOmegaTrace> {
    let dims = c.dims;
    s.check(dims)?;
    let rep = MatrixRep::build(dims)?;
    let omega = build_omega(c);
    let m = dims.m();
    let id_f = CMatrix::identity(s.n_f, s.n_f);
    let id_s = CMatrix::identity(rep.size(), rep.size());
    let mut oracle = 0.0;
    for i in 0..m {
        for j in 0..m {
            let w = kron(&rep.rep_of(omega.get(i, j))?, &id_f) + kron(&id_s, s.gauge_at(i, j));
            oracle += (&w * &w).trace().re;
        }
    }
    let n = dims.spinor_dim() as f64;
    let inv = c.invariants();
    Ok(TwistedOmegaTrace {
        oracle,
        formula: -(s.n_f as f64) * n / 8.0 * (inv.riem_sq + inv.rfperp_norm_sq)
            + n * s.tr_gauge_sq(),
    })
}

/// Scalar inputs of the Standard-Model evaluators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SMParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub norm_g_sq: f64,
    pub norm_f1_sq: f64,
    pub norm_b_sq: f64,
    pub phi_sq: f64,
    pub phi_quart: f64,
    pub dphi_sq: f64,
    pub r_m: f64,
    pub ric_sq: f64,
    pub riem_sq: f64,
    pub rfperp_norm_sq: f64,
}

impl SMParams {
    pub fn validate(&self) -> Result<()> {
        let squares = [
            ("norm_g_sq", self.norm_g_sq),
            ("norm_f1_sq", self.norm_f1_sq),
            ("norm_b_sq", self.norm_b_sq),
            ("phi_sq", self.phi_sq),
            ("phi_quart", self.phi_quart),
            ("dphi_sq", self.dphi_sq),
            ("ric_sq", self.ric_sq),
            ("riem_sq", self.riem_sq),
            ("rfperp_norm_sq", self.rfperp_norm_sq),
        ];
        for (name, v) in squares {
            if !(v >= 0.0) {
                return Err(Error::Input(format!("{name} must be a non-negative number")));
            }
        }
        Ok(())
    }

    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = || rng.random_range(-1.0..1.0);
        let mut p = SMParams {
            a: x(),
            b: x(),
            c: x(),
            d: x(),
            e: x(),
            g1: x(),
            g2: x(),
            g3: x(),
            r_m: x(),
            ..SMParams::default()
        };
        let mut y = || rng.random_range(0.0..1.0);
        p.norm_g_sq = y();
        p.norm_f1_sq = y();
        p.norm_b_sq = y();
        p.phi_sq = y();
        p.phi_quart = p.phi_sq * p.phi_sq;
        p.dphi_sq = y();
        p.ric_sq = y();
        p.riem_sq = y();
        p.rfperp_norm_sq = y();
        p
    }
}

/// Internal traces supplied by the Standard-Model finite space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmTraces {
    /// `tr_f(Ω^f_ij Ω^f_ij)` (summed over `i, j`)
    pub gauge: f64,
    /// `Σ_ν tr_f([∇_ν, Φ]²)`
    pub commutators: f64,
    /// `tr_f(Φ²)`
    pub phi_sq: f64,
    /// `tr_f(Φ⁴)`
    pub phi_quart: f64,
}

pub fn sm_trace_inputs(p: &SMParams) -> SmTraces {
    SmTraces {
        gauge: 48.0 / 5.0 * p.g3 * p.g3 * p.norm_g_sq
            + 48.0 / 5.0 * p.g2 * p.g2 * p.norm_f1_sq
            + 16.0 * p.g1 * p.g1 * p.norm_b_sq,
        commutators: 4.0 * p.a * p.dphi_sq,
        phi_sq: 4.0 * p.a * p.phi_sq + 2.0 * p.c,
        phi_quart: 4.0 * p.b * p.phi_quart + 8.0 * p.e * p.phi_sq + 2.0 * p.d,
    }
}

/// Whether the Standard-Model evaluators use the printed coefficients or the
/// ones the matrix oracle supports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPolicy {
    #[default]
    Printed,
    OracleCorrected,
}

/// A printed coefficient that the oracle contradicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientAudit {
    pub id: String,
    pub term: String,
    pub printed: f64,
    pub oracle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmCoefficients {
    pub policy: SignPolicy,
    pub a0: f64,
    pub a2: f64,
    pub a4: f64,
    /// Contribution `2‖R^{F^⊥}‖² / (2^p π^(p+q/2))`.
    pub i_new: f64,
    pub audits: Vec<CoefficientAudit>,
}

fn require_four(dims: Dims) -> Result<()> {
    if dims.m() != 4 {
        return Err(Error::UnsupportedDimension(format!(
            "Standard-Model evaluators need m = 4, got m = {}",
            dims.m()
        )));
    }
    Ok(())
}

/// `r_M` coefficient of the `a_2` bracket as printed.
const SM_A2_R_PRINTED: f64 = 40.0;
/// `r_M²` coefficient of the `a_4` bracket as printed.
const SM_A4_RSQ_PRINTED: f64 = 4000.0;

/// `a_0, a_2, a_4` densities of `D_{F,Φ}²` with `dim H_f = 96`.
pub fn sm_coefficients(p: &SMParams, dims: Dims, policy: SignPolicy) -> Result<SmCoefficients> {
    require_four(dims)?;
    p.validate()?;
    let pre = compact_prefactor(dims);
    let nf = SM_INTERNAL_DIM as f64;

    // oracle-consistent coefficients: tr E_Φ = -n_f 2^(p+q) r/4 - 2^(p+q) tr Φ²
    let a2_r_oracle = -nf / 12.0;
    let a4_rsq_oracle = 1.25 * nf;
    let (a2_r, a4_rsq, dphi_coeff) = match policy {
        SignPolicy::Printed => (SM_A2_R_PRINTED, SM_A4_RSQ_PRINTED, 720.0),
        SignPolicy::OracleCorrected => (a2_r_oracle, a4_rsq_oracle, 720.0 * p.a),
    };

    let a2 = pre * (a2_r * p.r_m - 4.0 * p.a * p.phi_sq - 2.0 * p.c);
    let r = p.r_m;
    let bracket = a4_rsq * r * r - 192.0 * p.ric_sq - 168.0 * p.riem_sq
        + 120.0 * p.a * r * p.phi_sq
        + 60.0 * p.c * r
        + 720.0 * p.rfperp_norm_sq
        - 576.0 * p.g3 * p.g3 * p.norm_g_sq
        - 576.0 * p.g2 * p.g2 * p.norm_f1_sq
        - 960.0 * p.g1 * p.g1 * p.norm_b_sq
        + 720.0 * p.b * p.phi_quart
        + 1440.0 * p.e * p.phi_sq
        + 360.0 * p.d
        + dphi_coeff * p.dphi_sq;
    let audits = vec![
        CoefficientAudit {
            id: "sm.a2.r_coefficient".into(),
            term: "r_M in the a_2 bracket".into(),
            printed: SM_A2_R_PRINTED,
            oracle: a2_r_oracle,
        },
        CoefficientAudit {
            id: "sm.a4.r_sq_coefficient".into(),
            term: "r_M^2 in the a_4 bracket".into(),
            printed: SM_A4_RSQ_PRINTED,
            oracle: a4_rsq_oracle,
        },
        CoefficientAudit {
            id: "sm.a4.dphi_coefficient".into(),
            term: "|D phi|^2 in the a_4 bracket (oracle value is 720 a)".into(),
            printed: 720.0,
            oracle: 720.0 * p.a,
        },
    ];
    Ok(SmCoefficients {
        policy,
        a0: nf * pre,
        a2,
        a4: pre / 360.0 * bracket,
        i_new: 2.0 * pre * p.rfperp_norm_sq,
        audits,
    })
}

/// `(a_2, a_4)` assembled from the generic Gilkey integrand with traces
/// `Tr 1 = n_f 2^(p+q)`, the oracle-consistent `Tr E_Φ`, the closed forms of
/// `Tr E_Φ²` and `Σ Tr Ω̃Ω̃`, and the Standard-Model internal traces.
pub fn sm_reassembled(p: &SMParams, dims: Dims) -> Result<(f64, f64)> {
    require_four(dims)?;
    p.validate()?;
    let t = sm_trace_inputs(p);
    let n = dims.spinor_dim() as f64;
    let nf = SM_INTERNAL_DIM as f64;
    let r = p.r_m;
    let traces = TraceData {
        tr_id: nf * n,
        tr_e: -nf * n / 4.0 * r - n * t.phi_sq,
        tr_e_sq: nf * n / 16.0 * (r * r + p.rfperp_norm_sq) - n / 2.0 * t.gauge
            + n / 2.0 * r * t.phi_sq
            + n * t.phi_quart
            + n * t.commutators,
        tr_omega_sq: -nf * n / 8.0 * (p.riem_sq + p.rfperp_norm_sq) + n * t.gauge,
    };
    let k = Contractions { r_ijij: -r, ric_sq: p.ric_sq, riem_sq: p.riem_sq };
    let pre = heat_prefactor(dims);
    Ok((
        pre * gilkey_a2_bracket(&traces, &k) / 6.0,
        pre * gilkey_a4_bracket(&traces, &k) / 360.0,
    ))
}

/// Block reduction check helper: the `n_f = 1`, `Φ = 0`, flat-gauge potential
/// is exactly the bare `E`.
pub fn bare_potential_traces(c: &CurvaturePoint) -> (Scalar, Scalar) {
    let e: Element = build_e(c).element;
    (e.trace(), e.trace_product(&e).expect("same dims"))
}

/// `DMatrix` from `[re, im]` pairs, row-major.
pub fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Input("internal matrices must be square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// On-disk toy internal space; complex entries as `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InternalSpaceFile {
    pub phi: Vec<Vec<[f64; 2]>>,
    /// `m×m` array of `n_f×n_f` matrices.
    pub gauge: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    /// `m` matrices.
    pub commutators: Vec<Vec<Vec<[f64; 2]>>>,
}

impl InternalSpaceFile {
    pub fn to_space(&self, dims: Dims) -> Result<InternalSpace> {
        let phi = matrix_from_pairs(&self.phi)?;
        let mut gauge = Vec::new();
        for row in &self.gauge {
            for g in row {
                gauge.push(matrix_from_pairs(g)?);
            }
        }
        let commutators = self
            .commutators
            .iter()
            .map(|k| matrix_from_pairs(k))
            .collect::<Result<Vec<_>>>()?;
        InternalSpace::new(dims, phi, gauge, commutators)
    }

    pub fn from_space(s: &InternalSpace) -> Self {
        let m = s.m;
        InternalSpaceFile {
            phi: matrix_to_pairs(&s.phi),
            gauge: (0..m)
                .map(|i| (0..m).map(|j| matrix_to_pairs(s.gauge_at(i, j))).collect())
                .collect(),
            commutators: s.commutators.iter().map(matrix_to_pairs).collect(),
        }
    }
}

/// `1 / (2^p π^(p+q/2))` for the four-dimensional configuration.
pub fn sm_prefactor() -> f64 {
    1.0 / (2.0 * PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::hermitian_defect;

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
    fn trivial_flat_gives_zero() {
        let d = dims(1, 2);
        let c = CurvaturePoint::flat(d);
        let s = InternalSpace::trivial(d, 2);
        let e = build_e_phi(&c, &s).unwrap();
        assert!(e.matrix.iter().all(|z| z.norm() == 0.0));
        assert_eq!(trace_e_phi(&c, &s).unwrap().oracle, 0.0);
        assert_eq!(trace_e_phi_sq(&c, &s).unwrap().oracle, 0.0);
    }

    #[test]
    fn scalar_phi_gives_minus_lambda_squared() {
        let d = dims(1, 2);
        let c = CurvaturePoint::flat(d);
        let s = InternalSpace::scalar_phi(d, 2, 1.5);
        let e = build_e_phi(&c, &s).unwrap().matrix;
        let expected = CMatrix::identity(16, 16) * Complex64::from(-2.25);
        assert!((e - expected).iter().all(|z| z.norm() < 1e-14));
        let t = trace_e_phi(&c, &s).unwrap();
        assert!((t.oracle + 16.0 * 2.25).abs() < 1e-12);
        assert!((t.printed - t.oracle).abs() < 1e-12);
    }

    #[test]
    fn random_e_phi_is_selfadjoint() {
        let d = dims(1, 2);
        let c = CurvaturePoint::random(11, d);
        let s = InternalSpace::random(11, d, 2, InputClasses::ALL);
        let e = build_e_phi(&c, &s).unwrap().matrix;
        assert!(hermitian_defect(&e) < 1e-10);
    }

    #[test]
    fn flat_trivial_gauge_sq_trace() {
        let d = dims(1, 2);
        let c = CurvaturePoint::flat(d);
        let s = InternalSpace::random(
            3,
            d,
            3,
            InputClasses { phi: true, gauge: false, commutators: true },
        );
        let t = trace_e_phi_sq(&c, &s).unwrap();
        let expected = 8.0 * (s.tr_phi_quart() + s.tr_commutator_sq());
        assert!(rel(t.oracle, expected) < 1e-10);
    }

    #[test]
    fn sq_formula_matches_oracle() {
        for (p, q) in [(1, 2), (2, 2)] {
            for seed in 0..3 {
                let c = CurvaturePoint::random(seed, dims(p, q));
                let s = InternalSpace::random(seed, dims(p, q), 2, InputClasses::ALL);
                let t = trace_e_phi_sq(&c, &s).unwrap();
                assert!(rel(t.oracle, t.formula) < 1e-9, "{} vs {}", t.oracle, t.formula);
            }
        }
    }

    #[test]
    fn trace_sign_follows_bare_potential() {
        let d = dims(1, 2);
        let c = CurvaturePoint::random(5, d);
        let s = InternalSpace::trivial(d, 2);
        let t = trace_e_phi(&c, &s).unwrap();
        assert!(rel(t.oracle, t.consistent) < 1e-12);
        assert!(rel(t.oracle, t.printed) > 0.5);
    }

    #[test]
    fn twisted_omega() {
        let d = dims(1, 2);
        let c = CurvaturePoint::random(6, d);
        let trivial = InternalSpace::trivial(d, 3);
        let t = twisted_omega_trace(&c, &trivial).unwrap();
        let bare = build_omega(&c).trace_sq().to_f64();
        assert!(rel(t.oracle, 3.0 * bare) < 1e-10);
        assert!(rel(t.oracle, t.formula) < 1e-9);

        let flat = CurvaturePoint::flat(d);
        let gauge_only =
            InternalSpace::random(6, d, 2, InputClasses { phi: false, gauge: true, commutators: false });
        let t = twisted_omega_trace(&flat, &gauge_only).unwrap();
        assert!(rel(t.oracle, 8.0 * gauge_only.tr_gauge_sq()) < 1e-10);
    }

    #[test]
    fn validation() {
        let d = dims(1, 2);
        let bad_phi = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i * 2 + j) as f64, 0.0));
        let z = CMatrix::zeros(2, 2);
        assert!(InternalSpace::new(d, bad_phi, vec![z.clone(); 16], vec![z.clone(); 4]).is_err());
        assert!(InternalSpace::new(d, z.clone(), vec![z.clone(); 15], vec![z.clone(); 4]).is_err());
        let mut gauge = vec![z.clone(); 16];
        gauge[1] = CMatrix::identity(2, 2) * Complex64::new(0.0, 1.0);
        assert!(InternalSpace::new(d, z.clone(), gauge, vec![z; 4]).is_err());
    }

    #[test]
    fn sm_trace_examples() {
        let zero = sm_trace_inputs(&SMParams::default());
        assert_eq!(zero, SmTraces { gauge: 0.0, commutators: 0.0, phi_sq: 0.0, phi_quart: 0.0 });
        let p = SMParams { phi_sq: 1.0, a: 1.0, ..Default::default() };
        assert_eq!(sm_trace_inputs(&p).phi_sq, 4.0);
        let p = SMParams { g1: 1.0, norm_b_sq: 1.0, ..Default::default() };
        assert_eq!(sm_trace_inputs(&p).gauge, 16.0);
    }

    #[test]
    fn sm_examples() {
        let d = dims(1, 2);
        let zero = sm_coefficients(&SMParams::default(), d, SignPolicy::Printed).unwrap();
        assert_eq!(zero.a0, 96.0 * compact_prefactor(d));
        assert_eq!(zero.a2, 0.0);
        assert_eq!(zero.a4, 0.0);
        let p = SMParams { rfperp_norm_sq: 1.0, ..Default::default() };
        let s = sm_coefficients(&p, d, SignPolicy::Printed).unwrap();
        assert!(rel(s.a4, 720.0 / 360.0 * compact_prefactor(d)) < 1e-15);
        assert!(rel(s.a4, s.i_new) < 1e-15);
        assert!(sm_coefficients(&p, dims(2, 2), SignPolicy::Printed).is_err());
        let neg = SMParams { phi_sq: -1.0, ..Default::default() };
        assert!(sm_coefficients(&neg, d, SignPolicy::Printed).is_err());
    }

    #[test]
    fn corrected_sm_matches_reassembly() {
        let d = dims(1, 2);
        for seed in 0..10 {
            let p = SMParams::random(seed);
            let s = sm_coefficients(&p, d, SignPolicy::OracleCorrected).unwrap();
            let (a2, a4) = sm_reassembled(&p, d).unwrap();
            assert!(rel(s.a2, a2) < 1e-9);
            assert!(rel(s.a4, a4) < 1e-9);
        }
    }

    #[test]
    fn file_round_trip() {
        let d = dims(1, 2);
        let s = InternalSpace::random(4, d, 2, InputClasses::ALL);
        let text = serde_json::to_string(&InternalSpaceFile::from_space(&s)).unwrap();
        let back: InternalSpaceFile = serde_json::from_str(&text).unwrap();
        let t = back.to_space(d).unwrap();
        assert_eq!(t.phi, s.phi);
        assert_eq!(t.gauge, s.gauge);
    }
}
