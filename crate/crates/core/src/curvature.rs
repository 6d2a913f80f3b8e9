//! Pointwise curvature data and the scalar invariants entering the heat coefficients.
//!
//! Riemann components are stored so that the full contraction satisfies
//! `R_ijij = -r_M`; with this sign a round sphere has `R_ijji > 0`.
//! Normal-bundle curvature is stored as
//! `rfperp[a][b][s][t] = ⟨R^{F^⊥}(e_a, e_b) h_t, h_s⟩` over ambient `a, b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::Dims;
use crate::error::{Error, Result};

/// Dense real 4-tensor with equal extent `m` in every slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Riemann {
    m: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn zeros(m: usize) -> Self {
        Riemann { m, data: vec![0.0; m.pow(4)] }
    }

    pub fn from_fn(m: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut r = Riemann::zeros(m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        r.data[((i * m + j) * m + k) * m + l] = f(i, j, k, l);
                    }
                }
            }
        }
        r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let m = self.m;
        self.data[((i * m + j) * m + k) * m + l]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `R_ijij`, summed over all ambient indices.
    pub fn full_contraction(&self) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += self.get(i, j, i, j);
            }
        }
        acc
    }

    /// Copies each orbit representative (`i < j`, `k < l`, `(i, j) ≤ (k, l)`) onto
    /// its images so the pair symmetries hold bit for bit.
    fn with_exact_pair_symmetries(&self) -> Riemann {
        let m = self.m;
        let mut out = Riemann::zeros(m);
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * m + j) * m + k) * m + l;
        for i in 0..m {
            for j in i + 1..m {
                for k in 0..m {
                    for l in k + 1..m {
                        if (i, j) > (k, l) {
                            continue;
                        }
                        let v = self.get(i, j, k, l);
                        for (a, b, c, d) in [(i, j, k, l), (k, l, i, j)] {
                            out.data[idx(a, b, c, d)] = v;
                            out.data[idx(b, a, c, d)] = -v;
                            out.data[idx(a, b, d, c)] = -v;
                            out.data[idx(b, a, d, c)] = v;
                        }
                    }
                }
            }
        }
        out
    }

    /// Largest violation of the pair antisymmetries, pair exchange, and first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(i, k, l, j) + self.get(i, l, j, k)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Orthogonal projection of a raw `m⁴` array onto algebraic curvature tensors.
///
/// First averages over the eight pair symmetries, then removes the totally
/// antisymmetric part, which is exactly what the first Bianchi identity kills.
pub fn project_riemann_symmetries(raw: &[f64], m: usize) -> Result<Riemann> {
    if raw.len() != m.pow(4) {
        return Err(Error::Input(format!(
            "raw tensor has {} entries, expected {}",
            raw.len(),
            m.pow(4)
        )));
    }
    let t = |i: usize, j: usize, k: usize, l: usize| raw[((i * m + j) * m + k) * m + l];
    let pair = Riemann::from_fn(m, |i, j, k, l| {
        (t(i, j, k, l) - t(j, i, k, l) - t(i, j, l, k) + t(j, i, l, k) + t(k, l, i, j)
            - t(l, k, i, j)
            - t(k, l, j, i)
            + t(l, k, j, i))
            / 8.0
    });
    // For pair-symmetric tensors the alternation reduces to a third of the cyclic sum.
    let projected = Riemann::from_fn(m, |i, j, k, l| {
        let cyclic = pair.get(i, j, k, l) + pair.get(i, k, l, j) + pair.get(i, l, j, k);
        pair.get(i, j, k, l) - cyclic / 3.0
    });
    Ok(projected.with_exact_pair_symmetries())
}

/// Normal-bundle curvature `⟨R^{F^⊥}(e_a, e_b) h_t, h_s⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalCurvature {
    m: usize,
    q: usize,
    data: Vec<f64>,
}

impl NormalCurvature {
    pub fn zeros(m: usize, q: usize) -> Self {
        NormalCurvature { m, q, data: vec![0.0; m * m * q * q] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, s: usize, t: usize) -> usize {
        ((a * self.m + b) * self.q + s) * self.q + t
    }

    /// Component for ambient `a, b` and normal `s, t`, all 0-based.
    #[inline]
    pub fn get(&self, a: usize, b: usize, s: usize, t: usize) -> f64 {
        self.data[self.idx(a, b, s, t)]
    }

    /// Sets `(a, b, s, t)` and the three entries fixed by antisymmetry.
    pub fn set_antisymmetric(&mut self, a: usize, b: usize, s: usize, t: usize, v: f64) {
        let (i0, i1, i2, i3) = (
            self.idx(a, b, s, t),
            self.idx(b, a, s, t),
            self.idx(a, b, t, s),
            self.idx(b, a, t, s),
        );
        self.data[i0] = v;
        self.data[i1] = -v;
        self.data[i2] = -v;
        self.data[i3] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.m {
            for b in 0..self.m {
                for s in 0..self.q {
                    for t in 0..self.q {
                        let v = self.get(a, b, s, t);
                        worst = worst
                            .max((v + self.get(b, a, s, t)).abs())
                            .max((v + self.get(a, b, t, s)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `‖R^{F^⊥}‖²`: the leaf-normal block counts twice, the leaf-leaf and
    /// normal-normal blocks once.
    pub fn norm_sq(&self, dims: Dims) -> f64 {
        let l = dims.leaf_dim();
        let (m, q) = (self.m, self.q);
        let block = |a_range: std::ops::Range<usize>, b_range: std::ops::Range<usize>| {
            let mut acc = 0.0;
            for a in a_range {
                for b in b_range.clone() {
                    for s in 0..q {
                        for t in 0..q {
                            acc += self.get(a, b, s, t).powi(2);
                        }
                    }
                }
            }
            acc
        };
        2.0 * block(0..l, l..m) + block(0..l, 0..l) + block(l..m, l..m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvaturePoint {
    pub dims: Dims,
    pub riemann: Riemann,
    pub rfperp: NormalCurvature,
    /// `r_M = -R_ijij`.
    pub scalar_curvature: f64,
    /// `Δ r_M`, needed only when total-derivative terms are kept.
    pub scalar_laplacian: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureInvariants {
    pub r_m: f64,
    /// `R_ijij R_klkl`
    pub rsq_pair: f64,
    /// `R_ijik R_ljlk`
    pub ric_sq: f64,
    /// `R_ijkl R_ijkl`
    pub riem_sq: f64,
    pub rfperp_norm_sq: f64,
}

impl CurvaturePoint {
    /// Builds a point, deriving `r_M` from the Riemann tensor.
    pub fn new(dims: Dims, riemann: Riemann, rfperp: NormalCurvature) -> Result<Self> {
        let m = dims.m();
        if riemann.m() != m || rfperp.m() != m || rfperp.q() != dims.q() {
            return Err(Error::DimensionMismatch(format!(
                "curvature arrays do not match {dims}"
            )));
        }
        let scalar_curvature = -riemann.full_contraction();
        Ok(CurvaturePoint {
            dims,
            riemann,
            rfperp,
            scalar_curvature,
            scalar_laplacian: None,
        })
    }

    pub fn flat(dims: Dims) -> Self {
        CurvaturePoint::new(
            dims,
            Riemann::zeros(dims.m()),
            NormalCurvature::zeros(dims.m(), dims.q()),
        )
        .expect("consistent shapes")
    }

    /// Constant sectional curvature `κ`: `R_ijkl = κ(δ_il δ_jk - δ_ik δ_jl)`, flat normal bundle.
    pub fn constant_curvature(kappa: f64, dims: Dims) -> Self {
        let m = dims.m();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let riemann = Riemann::from_fn(m, |i, j, k, l| {
            kappa * (delta(i, l) * delta(j, k) - delta(i, k) * delta(j, l))
        });
        CurvaturePoint::new(dims, riemann, NormalCurvature::zeros(m, dims.q()))
            .expect("consistent shapes")
    }

    /// Deterministic random point: projected Riemann tensor and antisymmetrized
    /// normal curvature, entries drawn from `[-1, 1]`.
    pub fn random(seed: u64, dims: Dims) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, q) = (dims.m(), dims.q());
        let raw: Vec<f64> = (0..m.pow(4)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let riemann = project_riemann_symmetries(&raw, m).expect("raw length m^4");
        let mut rfperp = NormalCurvature::zeros(m, q);
        for a in 0..m {
            for b in a + 1..m {
                for s in 0..q {
                    for t in s + 1..q {
                        rfperp.set_antisymmetric(a, b, s, t, rng.random_range(-1.0..1.0));
                    }
                }
            }
        }
        let mut point = CurvaturePoint::new(dims, riemann, rfperp).expect("consistent shapes");
        point.scalar_laplacian = Some(rng.random_range(-1.0..1.0));
        point
    }

    pub fn invariants(&self) -> CurvatureInvariants {
        let r = &self.riemann;
        let m = self.dims.m();
        let contraction = r.full_contraction();
        let mut ric_sq = 0.0;
        for j in 0..m {
            for k in 0..m {
                let ric: f64 = (0..m).map(|i| r.get(i, j, i, k)).sum();
                ric_sq += ric * ric;
            }
        }
        let riem_sq = r.as_slice().iter().map(|x| x * x).sum();
        CurvatureInvariants {
            r_m: self.scalar_curvature,
            rsq_pair: contraction * contraction,
            ric_sq,
            riem_sq,
            rfperp_norm_sq: self.rfperp.norm_sq(self.dims),
        }
    }
}

/// A boundary point: interior curvature plus extrinsic data along `N = e_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub interior: CurvaturePoint,
    /// Second fundamental form `L_ab`, row-major `(m-1)×(m-1)`, symmetric.
    second_fundamental: Vec<f64>,
    /// `r_{M;N}`
    pub r_normal_derivative: f64,
    /// `L_{aa;bb}`
    pub l_trace_laplacian: f64,
}

impl BoundaryPoint {
    pub fn new(
        interior: CurvaturePoint,
        second_fundamental: Vec<f64>,
        r_normal_derivative: f64,
        l_trace_laplacian: f64,
    ) -> Result<Self> {
        let n = interior.dims.m() - 1;
        if second_fundamental.len() != n * n {
            return Err(Error::Input(format!(
                "second fundamental form needs {} entries, got {}",
                n * n,
                second_fundamental.len()
            )));
        }
        for a in 0..n {
            for b in 0..a {
                let (x, y) = (second_fundamental[a * n + b], second_fundamental[b * n + a]);
                if (x - y).abs() > 1e-12 * (1.0 + x.abs().max(y.abs())) {
                    return Err(Error::Input(format!(
                        "second fundamental form is not symmetric at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(BoundaryPoint {
            interior,
            second_fundamental,
            r_normal_derivative,
            l_trace_laplacian,
        })
    }

    pub fn random(seed: u64, dims: Dims) -> Self {
        let interior = CurvaturePoint::random(seed, dims);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let n = dims.m() - 1;
        let mut l = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let v = rng.random_range(-1.0..1.0);
                l[a * n + b] = v;
                l[b * n + a] = v;
            }
        }
        let r_n = rng.random_range(-1.0..1.0);
        let l_lap = rng.random_range(-1.0..1.0);
        BoundaryPoint::new(interior, l, r_n, l_lap).expect("valid random boundary data")
    }

    pub fn dims(&self) -> Dims {
        self.interior.dims
    }

    /// Number of tangential indices `m - 1`.
    pub fn tangential(&self) -> usize {
        self.dims().m() - 1
    }

    #[inline]
    pub fn l(&self, a: usize, b: usize) -> f64 {
        self.second_fundamental[a * self.tangential() + b]
    }

    pub fn second_fundamental(&self) -> &[f64] {
        &self.second_fundamental
    }

    fn normal(&self) -> usize {
        self.dims().m() - 1
    }

    /// `R_aNaN`
    pub fn r_anan(&self) -> f64 {
        let n = self.normal();
        (0..self.tangential())
            .map(|a| self.interior.riemann.get(a, n, a, n))
            .sum()
    }

    /// `R_aNbN`
    pub fn r_anbn(&self, a: usize, b: usize) -> f64 {
        let n = self.normal();
        self.interior.riemann.get(a, n, b, n)
    }

    /// `R_abcd` restricted to tangential indices.
    pub fn r_abcd(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.interior.riemann.get(a, b, c, d)
    }

    /// `L_aa`
    pub fn l_trace(&self) -> f64 {
        (0..self.tangential()).map(|a| self.l(a, a)).sum()
    }

    /// `L_ab L_ab`
    pub fn l_sq(&self) -> f64 {
        self.second_fundamental.iter().map(|x| x * x).sum()
    }

    /// `L_ab L_bc L_ac`
    pub fn l_cube(&self) -> f64 {
        let n = self.tangential();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    acc += self.l(a, b) * self.l(b, c) * self.l(a, c);
                }
            }
        }
        acc
    }

    /// `R_aNbN L_ab`
    pub fn r_anbn_l(&self) -> f64 {
        let n = self.tangential();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += self.r_anbn(a, b) * self.l(a, b);
            }
        }
        acc
    }

    /// `R_abcb L_ac`
    pub fn r_abcb_l(&self) -> f64 {
        let n = self.tangential();
        let mut acc = 0.0;
        for a in 0..n {
            for c in 0..n {
                let ric: f64 = (0..n).map(|b| self.r_abcd(a, b, c, b)).sum();
                acc += ric * self.l(a, c);
            }
        }
        acc
    }
}

/// On-disk form of a curvature point, optionally with a boundary block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureFile {
    pub p: usize,
    pub q: usize,
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    pub rfperp: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar_curvature: Option<f64>,
    #[serde(default, rename = "rM_laplacian", skip_serializing_if = "Option::is_none")]
    pub scalar_laplacian: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryBlock>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryBlock {
    #[serde(rename = "L")]
    pub l: Vec<Vec<f64>>,
    #[serde(rename = "rM_normal")]
    pub r_m_normal: f64,
    #[serde(rename = "L_trace_lap")]
    pub l_trace_lap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
}

fn flatten4(x: &[Vec<Vec<Vec<f64>>>], shape: [usize; 4], name: &str) -> Result<Vec<f64>> {
    let bad = || Error::Input(format!("\"{name}\" must have shape {shape:?}"));
    if x.len() != shape[0] {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(shape.iter().product());
    for a in x {
        if a.len() != shape[1] {
            return Err(bad());
        }
        for b in a {
            if b.len() != shape[2] {
                return Err(bad());
            }
            for c in b {
                if c.len() != shape[3] {
                    return Err(bad());
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Input(format!("\"{name}\" has non-finite entries")));
                }
                out.extend_from_slice(c);
            }
        }
    }
    Ok(out)
}

fn nest4(data: &[f64], shape: [usize; 4]) -> Vec<Vec<Vec<Vec<f64>>>> {
    let mut it = data.iter().copied();
    (0..shape[0])
        .map(|_| {
            (0..shape[1])
                .map(|_| {
                    (0..shape[2])
                        .map(|_| (0..shape[3]).map(|_| it.next().unwrap()).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Tolerance for accepting user-supplied symmetric data.
const INPUT_SYMMETRY_TOL: f64 = 1e-9;

impl CurvatureFile {
    pub fn dims(&self) -> Result<Dims> {
        Dims::new(self.p, self.q)
    }

    pub fn point(&self) -> Result<CurvaturePoint> {
        let dims = self.dims()?;
        let (m, q) = (dims.m(), dims.q());
        let raw = flatten4(&self.riemann, [m; 4], "riemann")?;
        let riemann = Riemann { m, data: raw };
        let defect = riemann.symmetry_defect();
        let scale = riemann.as_slice().iter().fold(1.0f64, |a, x| a.max(x.abs()));
        if defect > INPUT_SYMMETRY_TOL * scale {
            return Err(Error::Input(format!(
                "riemann violates curvature symmetries by {defect:e}"
            )));
        }
        let rf = flatten4(&self.rfperp, [m, m, q, q], "rfperp")?;
        let rfperp = NormalCurvature { m, q, data: rf };
        if rfperp.antisymmetry_defect() > INPUT_SYMMETRY_TOL {
            return Err(Error::Input("rfperp is not antisymmetric in both pairs".into()));
        }
        let mut point = CurvaturePoint::new(dims, riemann, rfperp)?;
        if let Some(r) = self.scalar_curvature {
            let derived = point.scalar_curvature;
            if (r - derived).abs() > INPUT_SYMMETRY_TOL * (1.0 + derived.abs()) {
                return Err(Error::Input(format!(
                    "scalar_curvature {r} disagrees with -R_ijij = {derived}"
                )));
            }
        }
        point.scalar_laplacian = self.scalar_laplacian;
        Ok(point)
    }

    pub fn boundary_point(&self) -> Result<BoundaryPoint> {
        let block = self
            .boundary
            .as_ref()
            .ok_or_else(|| Error::Input("missing \"boundary\" block".into()))?;
        let interior = self.point()?;
        let n = interior.dims.m() - 1;
        if block.l.len() != n || block.l.iter().any(|row| row.len() != n) {
            return Err(Error::Input(format!("\"L\" must be {n}x{n}")));
        }
        let l = block.l.iter().flatten().copied().collect();
        BoundaryPoint::new(interior, l, block.r_m_normal, block.l_trace_lap)
    }

    pub fn from_point(point: &CurvaturePoint) -> Self {
        let (m, q) = (point.dims.m(), point.dims.q());
        CurvatureFile {
            p: point.dims.p(),
            q,
            riemann: nest4(point.riemann.as_slice(), [m; 4]),
            rfperp: nest4(&point.rfperp.data, [m, m, q, q]),
            scalar_curvature: Some(point.scalar_curvature),
            scalar_laplacian: point.scalar_laplacian,
            volume: None,
            boundary: None,
        }
    }

    pub fn from_boundary_point(b: &BoundaryPoint) -> Self {
        let mut file = CurvatureFile::from_point(&b.interior);
        let n = b.tangential();
        file.boundary = Some(BoundaryBlock {
            l: b.second_fundamental.chunks(n).map(|r| r.to_vec()).collect(),
            r_m_normal: b.r_normal_derivative,
            l_trace_lap: b.l_trace_laplacian,
            area: None,
        });
        file
    }
}
