//! Exact Clifford word algebra on `S(F) ⊗̂ Λ(F^⊥,*)`.
//!
//! Three families of generators act on the graded product:
//!
//! * `c(f_i)`, `i = 1..2p`, the leafwise Clifford action, squaring to `-1`;
//! * `c(h_s) = h_s^* ∧ - i_{h_s}`, `s = 1..q`, squaring to `-1`;
//! * `ĉ(h_s) = h_s^* ∧ + i_{h_s}`, `s = 1..q`, squaring to `+1`.
//!
//! Any two distinct generators anticommute. Canonical words are strictly
//! increasing in the order `c(f_1) < … < c(f_2p) < c(h_1) < … < c(h_q) < ĉ(h_1) < … < ĉ(h_q)`
//! and are stored as bitmasks over that order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest number of generators a bitmask word can hold.
const MAX_GENERATORS: usize = 64;

/// Leaf half-dimension `p` (so `dim F = 2p`) and normal rank `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Dims {
    p: usize,
    q: usize,
}

impl Dims {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidDims(format!("p must be at least 1, got {p}")));
        }
        if q < 2 || q % 2 != 0 {
            return Err(Error::InvalidDims(format!(
                "q must be even and at least 2, got {q}"
            )));
        }
        if 2 * (p + q) > MAX_GENERATORS {
            return Err(Error::InvalidDims(format!(
                "2(p + q) = {} exceeds the {MAX_GENERATORS}-generator word limit",
                2 * (p + q)
            )));
        }
        Ok(Dims { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Leaf dimension `2p`.
    pub fn leaf_dim(&self) -> usize {
        2 * self.p
    }

    /// Ambient dimension `m = 2p + q`.
    pub fn m(&self) -> usize {
        2 * self.p + self.q
    }

    pub fn n_generators(&self) -> usize {
        2 * (self.p + self.q)
    }

    /// `2^(p+q)`, the rank of the bundle the generators act on.
    pub fn spinor_dim(&self) -> u64 {
        1u64 << (self.p + self.q)
    }

    /// Ambient frame element `e_i` (1-based): `f_i` for `i ≤ 2p`, else `h_{i-2p}`.
    pub fn ambient(&self, i: usize) -> Generator {
        assert!(i >= 1 && i <= self.m(), "ambient index {i} out of range");
        if i <= self.leaf_dim() {
            Generator::leaf(i)
        } else {
            Generator::normal(i - self.leaf_dim())
        }
    }

    /// Bit position of a generator in the canonical order.
    pub fn bit(&self, g: Generator) -> Result<u32> {
        let (limit, offset) = match g.kind {
            GeneratorKind::LeafC => (self.leaf_dim(), 0),
            GeneratorKind::NormalC => (self.q, self.leaf_dim()),
            GeneratorKind::NormalHat => (self.q, self.leaf_dim() + self.q),
        };
        if g.index < 1 || g.index > limit {
            return Err(Error::DimensionMismatch(format!(
                "{g} is out of range for p = {}, q = {}",
                self.p, self.q
            )));
        }
        Ok((offset + g.index - 1) as u32)
    }

    pub fn generator_at(&self, bit: u32) -> Generator {
        let b = bit as usize;
        let (l, q) = (self.leaf_dim(), self.q);
        if b < l {
            Generator::leaf(b + 1)
        } else if b < l + q {
            Generator::normal(b - l + 1)
        } else {
            assert!(b < l + 2 * q, "bit {bit} out of range");
            Generator::hat(b - l - q + 1)
        }
    }

    /// Bits of the generators squaring to `-1`.
    fn minus_mask(&self) -> u64 {
        let n = self.leaf_dim() + self.q;
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// All generators in canonical order.
    pub fn generators(&self) -> Vec<Generator> {
        (0..self.n_generators() as u32)
            .map(|b| self.generator_at(b))
            .collect()
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, q={})", self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    LeafC,
    NormalC,
    NormalHat,
}

/// A single Clifford generator; `index` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub index: usize,
}

impl Generator {
    pub fn leaf(i: usize) -> Self {
        Generator { kind: GeneratorKind::LeafC, index: i }
    }

    pub fn normal(s: usize) -> Self {
        Generator { kind: GeneratorKind::NormalC, index: s }
    }

    pub fn hat(s: usize) -> Self {
        Generator { kind: GeneratorKind::NormalHat, index: s }
    }

    pub fn square_sign(&self) -> i64 {
        match self.kind {
            GeneratorKind::LeafC | GeneratorKind::NormalC => -1,
            GeneratorKind::NormalHat => 1,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::LeafC => write!(f, "c(f{})", self.index),
            GeneratorKind::NormalC => write!(f, "c(h{})", self.index),
            GeneratorKind::NormalHat => write!(f, "ĉ(h{})", self.index),
        }
    }
}

/// An ordered product of generators, canonical or not.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Id");
        }
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Reduce a word to canonical form by adjacent transpositions and contractions.
///
/// Works on the generators alone, independent of the bitmask product used by
/// [`Element`].
pub fn canonicalize(word: &Word, coeff: Scalar) -> (Word, Scalar) {
    let mut gens = word.0.clone();
    let mut sign = 1i64;
    loop {
        let mut changed = false;
        let mut k = 0;
        while k + 1 < gens.len() {
            let (a, b) = (gens[k], gens[k + 1]);
            if a == b {
                sign *= a.square_sign();
                gens.drain(k..k + 2);
                changed = true;
            } else if a > b {
                gens.swap(k, k + 1);
                sign = -sign;
                changed = true;
                k += 1;
            } else {
                k += 1;
            }
        }
        if !changed {
            break;
        }
    }
    (Word(gens), coeff.scale_int(sign))
}

/// Product of two canonical blades: resulting blade and whether the sign flipped.
#[inline]
fn blade_product(a: u64, b: u64, minus_mask: u64) -> (u64, bool) {
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    swaps += (a & b & minus_mask).count_ones();
    (a ^ b, swaps & 1 == 1)
}

/// Gaussian-rational linear combination of canonical words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    dims: Dims,
    terms: BTreeMap<u64, Scalar>,
}

impl Element {
    pub fn zero(dims: Dims) -> Self {
        Element { dims, terms: BTreeMap::new() }
    }

    pub fn identity(dims: Dims) -> Self {
        Element::scalar(dims, Scalar::one())
    }

    pub fn scalar(dims: Dims, s: Scalar) -> Self {
        let mut e = Element::zero(dims);
        e.add_term(0, s);
        e
    }

    pub fn generator(dims: Dims, g: Generator) -> Result<Self> {
        let bit = dims.bit(g)?;
        let mut e = Element::zero(dims);
        e.add_term(1u64 << bit, Scalar::one());
        Ok(e)
    }

    /// `coeff` times the ordered product of `gens`.
    pub fn word(dims: Dims, gens: &[Generator], coeff: Scalar) -> Result<Self> {
        let mut e = Element::zero(dims);
        e.add_word(gens, coeff)?;
        Ok(e)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity word.
    pub fn scalar_part(&self) -> Scalar {
        self.terms.get(&0).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of a canonical word given by its generators.
    pub fn coefficient(&self, gens: &[Generator]) -> Result<Scalar> {
        let probe = Element::word(self.dims, gens, Scalar::one())?;
        let (&blade, sign) = probe.terms.iter().next().expect("single term");
        let c = self.terms.get(&blade).cloned().unwrap_or_else(Scalar::zero);
        Ok(&c * sign)
    }

    /// Terms as (canonical word, coefficient), in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Word, &Scalar)> + '_ {
        self.terms.iter().map(move |(&b, s)| (self.blade_word(b), s))
    }

    pub(crate) fn blades(&self) -> impl Iterator<Item = (u64, &Scalar)> + '_ {
        self.terms.iter().map(|(&b, s)| (b, s))
    }

    fn blade_word(&self, mut blade: u64) -> Word {
        let mut gens = Vec::with_capacity(blade.count_ones() as usize);
        while blade != 0 {
            let bit = blade.trailing_zeros();
            gens.push(self.dims.generator_at(bit));
            blade &= blade - 1;
        }
        Word(gens)
    }

    fn add_term(&mut self, blade: u64, s: Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(s);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &s;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// In-place `self += coeff · gens[0]⋯gens[n-1]`.
    pub fn add_word(&mut self, gens: &[Generator], coeff: Scalar) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        let minus = self.dims.minus_mask();
        let mut blade = 0u64;
        let mut negative = false;
        for &g in gens {
            let (next, flip) = blade_product(blade, 1u64 << self.dims.bit(g)?, minus);
            blade = next;
            negative ^= flip;
        }
        self.add_term(blade, if negative { -coeff } else { coeff });
        Ok(())
    }

    fn check_dims(&self, other: &Element) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "elements over {} and {}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (&b, s) in &other.terms {
            out.add_term(b, s.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.check_dims(other)?;
        let minus = self.dims.minus_mask();
        let mut out = Element::zero(self.dims);
        for (&a, x) in &self.terms {
            for (&b, y) in &other.terms {
                let (blade, negative) = blade_product(a, b, minus);
                let prod = x * y;
                out.add_term(blade, if negative { -prod } else { prod });
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        let mut out = Element::zero(self.dims);
        for (&b, c) in &self.terms {
            out.add_term(b, c * s);
        }
        out
    }

    /// Normalized trace: `2^(p+q)` times the identity coefficient.
    ///
    /// Every non-empty canonical word is traceless on the irreducible
    /// `2^(p+q)`-dimensional module.
    pub fn trace(&self) -> Scalar {
        self.scalar_part()
            .scale_int(self.dims.spinor_dim() as i64)
    }

    /// `trace(self · other)` without forming the full product.
    pub fn trace_product(&self, other: &Element) -> Result<Scalar> {
        self.check_dims(other)?;
        let minus = self.dims.minus_mask();
        let mut acc = Scalar::zero();
        for (&w, x) in &self.terms {
            if let Some(y) = other.terms.get(&w) {
                let (_, negative) = blade_product(w, w, minus);
                let prod = x * y;
                acc += &(if negative { -prod } else { prod });
            }
        }
        Ok(acc.scale_int(self.dims.spinor_dim() as i64))
    }

    /// Hermitian adjoint with respect to the generator conventions:
    /// `c(·)` anti-self-adjoint, `ĉ(·)` self-adjoint.
    pub fn adjoint(&self) -> Element {
        let minus = self.dims.minus_mask();
        let mut out = Element::zero(self.dims);
        for (&b, s) in &self.terms {
            let k = b.count_ones();
            // reversal sign times (-1) per anti-self-adjoint factor
            let reversal = (k * k.saturating_sub(1) / 2) % 2 == 1;
            let anti = (b & minus).count_ones() % 2 == 1;
            let c = s.conj();
            out.add_term(b, if reversal ^ anti { -c } else { c });
        }
        out
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("adding elements over different dims")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self + &(-rhs)
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.try_mul(rhs).expect("multiplying elements over different dims")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&Scalar::from_int(-1))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, s)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({s})·{w}")?;
        }
        Ok(())
    }
}

/// The normal volume element `τ = (-i)^(q(q+1)/2) c(h_1)⋯c(h_q)`, with `τ² = 1`.
pub fn volume_element(dims: Dims) -> Element {
    let q = dims.q();
    let prefactor = Scalar::gaussian(0, -1).pow((q * (q + 1) / 2) as u32);
    let gens: Vec<_> = (1..=q).map(Generator::normal).collect();
    Element::word(dims, &gens, prefactor).expect("normal generators in range")
}

/// `γ5 = e_1 e_2 e_3 e_4`, defined for ambient dimension 4 only.
pub fn gamma5(dims: Dims) -> Result<Element> {
    if dims.m() != 4 {
        return Err(Error::UnsupportedDimension(format!(
            "gamma5 needs m = 4, got m = {}",
            dims.m()
        )));
    }
    Ok(chirality(dims))
}

/// Self-adjoint ambient chirality `λ e_1⋯e_m` with `λ ∈ {1, i}` fixed by squaring to 1.
///
/// Coincides with [`gamma5`] when `m = 4`.
pub fn chirality(dims: Dims) -> Element {
    let m = dims.m();
    let prefactor = if (m * (m + 1) / 2) % 2 == 0 {
        Scalar::one()
    } else {
        Scalar::i()
    };
    let gens: Vec<_> = (1..=m).map(|i| dims.ambient(i)).collect();
    Element::word(dims, &gens, prefactor).expect("ambient generators in range")
}

/// Uniformly random word of length `0..=max_len` over all generators of `dims`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, dims: Dims, max_len: usize) -> Word {
    let n = dims.n_generators() as u32;
    let len = rng.random_range(0..=max_len);
    Word((0..len).map(|_| dims.generator_at(rng.random_range(0..n))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(p: usize, q: usize) -> Dims {
        Dims::new(p, q).unwrap()
    }

    fn gen(dims: Dims, g: Generator) -> Element {
        Element::generator(dims, g).unwrap()
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(0, 2).is_err());
        assert!(Dims::new(1, 3).is_err());
        assert!(Dims::new(1, 0).is_err());
        assert_eq!(d(1, 2).m(), 4);
        assert_eq!(d(2, 2).spinor_dim(), 16);
    }

    #[test]
    fn squares() {
        let dims = d(1, 2);
        let id = Element::identity(dims);
        let f1 = gen(dims, Generator::leaf(1));
        let h1 = gen(dims, Generator::hat(1));
        assert_eq!(&f1 * &f1, -&id);
        assert_eq!(&h1 * &h1, id);
    }

    #[test]
    fn leaf_and_normal_anticommute() {
        let dims = d(1, 2);
        let f1 = gen(dims, Generator::leaf(1));
        let c1 = gen(dims, Generator::normal(1));
        assert!((&(&f1 * &c1) + &(&c1 * &f1)).is_zero());
    }

    #[test]
    fn canonicalize_examples() {
        let (w, s) = canonicalize(
            &Word(vec![Generator::normal(2), Generator::normal(1)]),
            Scalar::one(),
        );
        assert_eq!(w, Word(vec![Generator::normal(1), Generator::normal(2)]));
        assert_eq!(s, Scalar::from_int(-1));

        let (w, s) = canonicalize(
            &Word(vec![Generator::leaf(1), Generator::hat(1), Generator::leaf(1)]),
            Scalar::one(),
        );
        assert_eq!(w, Word(vec![Generator::hat(1)]));
        assert_eq!(s, Scalar::one());

        let (w, s) = canonicalize(
            &Word(vec![
                Generator::hat(1),
                Generator::hat(2),
                Generator::hat(1),
                Generator::hat(2),
            ]),
            Scalar::one(),
        );
        assert_eq!(w, Word(vec![]));
        assert_eq!(s, Scalar::from_int(-1));
    }

    #[test]
    fn trace_examples() {
        let dims = d(1, 2);
        assert_eq!(Element::identity(dims).trace(), Scalar::from_int(8));
        assert!(gen(dims, Generator::leaf(1)).trace().is_zero());
        let w = Element::word(
            dims,
            &[
                Generator::normal(1),
                Generator::normal(2),
                Generator::hat(1),
                Generator::hat(2),
            ],
            Scalar::one(),
        )
        .unwrap();
        assert!(w.trace().is_zero());
        let w = Element::word(
            dims,
            &[
                Generator::hat(1),
                Generator::hat(2),
                Generator::hat(2),
                Generator::hat(1),
            ],
            Scalar::one(),
        )
        .unwrap();
        assert_eq!(w.trace(), Scalar::from_int(8));
    }

    #[test]
    fn tau_and_gamma5() {
        let dims = d(1, 2);
        let tau = volume_element(dims);
        let expected = Element::word(
            dims,
            &[Generator::normal(1), Generator::normal(2)],
            Scalar::i(),
        )
        .unwrap();
        assert_eq!(tau, expected);
        assert_eq!(&tau * &tau, Element::identity(dims));

        let g5 = gamma5(dims).unwrap();
        assert_eq!(&g5 * &g5, Element::identity(dims));
        assert!(matches!(
            gamma5(d(2, 2)),
            Err(Error::UnsupportedDimension(_))
        ));
    }

    #[test]
    fn tau_squares_to_one_for_larger_q() {
        for q in [2, 4, 6, 8] {
            let dims = d(1, q);
            let tau = volume_element(dims);
            assert_eq!(&tau * &tau, Element::identity(dims), "q = {q}");
        }
    }

    #[test]
    fn chirality_is_selfadjoint_involution() {
        for (p, q) in [(1, 2), (2, 2), (1, 4), (3, 2)] {
            let dims = d(p, q);
            let g = chirality(dims);
            assert_eq!(&g * &g, Element::identity(dims));
            assert_eq!(g.adjoint(), g);
            for i in 1..=dims.m() {
                let e = gen(dims, dims.ambient(i));
                assert!((&(&g * &e) + &(&e * &g)).is_zero());
            }
        }
    }

    #[test]
    fn mismatched_dims_is_an_error() {
        let a = Element::identity(d(1, 2));
        let b = Element::identity(d(2, 2));
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(_))));
        assert!(Element::generator(d(1, 2), Generator::leaf(3)).is_err());
    }

    #[test]
    fn relation_table() {
        let dims = d(2, 2);
        let id = Element::identity(dims);
        for g in dims.generators() {
            let e = gen(dims, g);
            assert_eq!(&e * &e, id.scale(&Scalar::from_int(g.square_sign())));
            for h in dims.generators() {
                if g != h {
                    let f = gen(dims, h);
                    assert!((&(&e * &f) + &(&f * &e)).is_zero(), "{g} {h}");
                }
            }
        }
    }

    #[test]
    fn odd_words_are_traceless() {
        // every word of length <= 5 over (1, 2)
        let dims = d(1, 2);
        let gens = dims.generators();
        let mut stack: Vec<Vec<Generator>> = vec![vec![]];
        while let Some(w) = stack.pop() {
            let e = Element::word(dims, &w, Scalar::one()).unwrap();
            if w.len() % 2 == 1 {
                assert!(e.trace().is_zero(), "{}", Word(w.clone()));
            }
            if w.len() < 5 {
                for &g in &gens {
                    let mut next = w.clone();
                    next.push(g);
                    stack.push(next);
                }
            }
        }
    }

    #[test]
    fn trace_product_matches_full_product() {
        let dims = d(1, 2);
        let a = &Element::word(dims, &[Generator::leaf(1), Generator::hat(2)], Scalar::gaussian(2, 1))
            .unwrap()
            + &Element::scalar(dims, Scalar::ratio(1, 3));
        let b = &Element::word(dims, &[Generator::hat(2), Generator::leaf(1)], Scalar::gaussian(0, 5))
            .unwrap()
            + &Element::identity(dims);
        assert_eq!(a.trace_product(&b).unwrap(), (&a * &b).trace());
    }
}
