//! Dense complex matrices for the generators on the `2^(p+q)`-dimensional space.
//!
//! The leaf factor uses tensor products of Pauli matrices on `C^(2^p)`; the
//! normal factor is the exterior algebra `Λ(C^q)` with wedge and contraction
//! operators on the subset basis. Normal generators are pre-composed with the
//! leaf grading, which realizes the graded tensor product.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clifford::{Dims, Element, Generator, GeneratorKind};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest representation dimension built by default.
pub const DEFAULT_DIM_CAP: u64 = 1 << 14;

#[derive(Clone, Debug)]
pub struct MatrixRep {
    dims: Dims,
    /// Generator images indexed by canonical bit position.
    gens: Vec<CMatrix>,
    grading: CMatrix,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(k: u8) -> CMatrix {
    let z = c(0.0, 0.0);
    match k {
        0 => CMatrix::identity(2, 2),
        1 => CMatrix::from_row_slice(2, 2, &[z, c(1.0, 0.0), c(1.0, 0.0), z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        3 => CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c(-1.0, 0.0)]),
        _ => unreachable!("pauli index"),
    }
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// Hermitian gamma matrices `γ_1..γ_2p` on `C^(2^p)` plus the chirality `σ3^⊗p`.
fn leaf_gammas(p: usize) -> (Vec<CMatrix>, CMatrix) {
    let mut gammas = Vec::with_capacity(2 * p);
    for k in 0..p {
        for sigma in [1u8, 2] {
            let factors: Vec<CMatrix> = (0..p)
                .map(|j| match j.cmp(&k) {
                    std::cmp::Ordering::Less => pauli(3),
                    std::cmp::Ordering::Equal => pauli(sigma),
                    std::cmp::Ordering::Greater => pauli(0),
                })
                .collect();
            gammas.push(kron_all(&factors));
        }
    }
    let grading = kron_all(&vec![pauli(3); p]);
    (gammas, grading)
}

/// Exterior multiplication by `h_s^*` (0-based `s`) on the subset basis of `Λ(C^q)`.
fn wedge(q: usize, s: usize) -> CMatrix {
    let n = 1usize << q;
    let mut m = CMatrix::zeros(n, n);
    for subset in 0..n {
        if subset & (1 << s) != 0 {
            continue;
        }
        let before = (subset & ((1 << s) - 1)).count_ones();
        let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
        m[(subset | (1 << s), subset)] = c(sign, 0.0);
    }
    m
}

impl MatrixRep {
    pub fn build(dims: Dims) -> Result<Self> {
        Self::build_with_cap(dims, DEFAULT_DIM_CAP)
    }

    pub fn build_with_cap(dims: Dims, cap: u64) -> Result<Self> {
        let size = dims.spinor_dim();
        if size > cap {
            return Err(Error::Resource(format!(
                "representation dimension {size} exceeds cap {cap}"
            )));
        }
        let (p, q) = (dims.p(), dims.q());
        let (gammas, leaf_grading) = leaf_gammas(p);
        let normal_id = CMatrix::identity(1 << q, 1 << q);
        let i = c(0.0, 1.0);

        let mut gens = Vec::with_capacity(dims.n_generators());
        for g in &gammas {
            gens.push((g * i).kronecker(&normal_id));
        }
        let wedges: Vec<CMatrix> = (0..q).map(|s| wedge(q, s)).collect();
        for w in &wedges {
            let contraction = w.adjoint();
            gens.push(leaf_grading.kronecker(&(w - &contraction)));
        }
        for w in &wedges {
            let contraction = w.adjoint();
            gens.push(leaf_grading.kronecker(&(w + &contraction)));
        }
        let grading = leaf_grading.kronecker(&normal_id);
        Ok(MatrixRep { dims, gens, grading })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn size(&self) -> usize {
        self.dims.spinor_dim() as usize
    }

    pub fn generator(&self, g: Generator) -> Result<&CMatrix> {
        let bit = self.dims.bit(g)?;
        Ok(&self.gens[bit as usize])
    }

    /// Grading operator of the `S(F)` factor.
    pub fn grading(&self) -> &CMatrix {
        &self.grading
    }

    /// Matrix image of an algebra element.
    pub fn rep_of(&self, e: &Element) -> Result<CMatrix> {
        if e.dims() != self.dims {
            return Err(Error::DimensionMismatch(format!(
                "element over {} in representation of {}",
                e.dims(),
                self.dims
            )));
        }
        let n = self.size();
        let mut out = CMatrix::zeros(n, n);
        for (mut blade, coeff) in e.blades() {
            let mut word = CMatrix::identity(n, n);
            while blade != 0 {
                let bit = blade.trailing_zeros();
                word *= &self.gens[bit as usize];
                blade &= blade - 1;
            }
            out += word * coeff.to_complex();
        }
        Ok(out)
    }

    pub fn oracle_trace(&self, e: &Element) -> Result<Complex64> {
        Ok(self.rep_of(e)?.trace())
    }

    /// Largest deviation from the full relation table.
    pub fn relation_defect(&self) -> f64 {
        let n = self.size();
        let id = CMatrix::identity(n, n);
        let gens = self.dims.generators();
        let mut worst = 0.0f64;
        for (a, ga) in gens.iter().enumerate() {
            let ma = &self.gens[a];
            let sq = ma * ma - &id * Complex64::from(ga.square_sign() as f64);
            worst = worst.max(max_abs(&sq));
            let adj = match ga.kind {
                GeneratorKind::NormalHat => ma.adjoint() - ma,
                _ => ma.adjoint() + ma,
            };
            worst = worst.max(max_abs(&adj));
            for b in a + 1..gens.len() {
                let mb = &self.gens[b];
                worst = worst.max(max_abs(&(ma * mb + mb * ma)));
            }
        }
        worst
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute entry of `m - m†`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Largest absolute entry of `m + m†`.
pub fn antihermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m + m.adjoint()))
}
