use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectral_action::clifford::{canonicalize, random_word, Dims, Element, Word};
use spectral_action::cutoff::{action_asymptotics, CutoffMoments};
use spectral_action::curvature::CurvaturePoint;
use spectral_action::heat::{build_e, build_omega};
use spectral_action::oracle::{antihermitian_defect, hermitian_defect, max_abs, MatrixRep};
use spectral_action::scalar::Scalar;
use spectral_action::torus::{torus_count_action, torus_heat_trace, TorusSpec};

const DIMS: [(usize, usize); 3] = [(1, 2), (1, 4), (2, 2)];

fn dims_strategy() -> impl Strategy<Value = Dims> {
    prop::sample::select(DIMS.to_vec()).prop_map(|(p, q)| Dims::new(p, q).unwrap())
}

fn random_element(seed: u64, dims: Dims, terms: usize) -> Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = Element::zero(dims);
    for k in 0..terms {
        let w = random_word(&mut rng, dims, 6);
        let coeff = Scalar::gaussian(k as i64 - 2, (seed % 5) as i64 - 2);
        e = &e + &Element::word(dims, &w.0, coeff).unwrap();
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, dims, 10);
        let (once, s1) = canonicalize(&w, Scalar::from_int(1));
        prop_assert!(once.is_canonical());
        let (twice, s2) = canonicalize(&once, s1.clone());
        prop_assert_eq!(once, twice);
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn canonical_form_matches_element_product(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, dims, 10);
        let (canon, coeff) = canonicalize(&w, Scalar::from_int(1));
        let mut product = Element::identity(dims);
        for g in &w.0 {
            product = &product * &Element::generator(dims, *g).unwrap();
        }
        let expected = Element::word(dims, &canon.0, coeff).unwrap();
        prop_assert_eq!(product, expected);
    }

    #[test]
    fn multiplication_is_associative(dims in dims_strategy(), seed in any::<u64>()) {
        let a = random_element(seed, dims, 3);
        let b = random_element(seed.wrapping_add(1), dims, 3);
        let c = random_element(seed.wrapping_add(2), dims, 3);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn trace_is_cyclic(dims in dims_strategy(), seed in any::<u64>()) {
        let a = random_element(seed, dims, 4);
        let b = random_element(seed ^ 0xabcdef, dims, 4);
        prop_assert_eq!((&a * &b).trace(), (&b * &a).trace());
        prop_assert_eq!(a.trace_product(&b).unwrap(), (&a * &b).trace());
    }

    #[test]
    fn representation_is_a_homomorphism(dims in dims_strategy(), seed in any::<u64>()) {
        let rep = MatrixRep::build(dims).unwrap();
        let a = random_element(seed, dims, 3);
        let b = random_element(seed.wrapping_mul(3), dims, 3);
        let lhs = rep.rep_of(&(&a * &b)).unwrap();
        let rhs = rep.rep_of(&a).unwrap() * rep.rep_of(&b).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-9);
        let adj = rep.rep_of(&a.adjoint()).unwrap();
        prop_assert!(max_abs(&(adj - rep.rep_of(&a).unwrap().adjoint())) < 1e-12);
    }

    #[test]
    fn symbolic_trace_matches_matrix(dims in dims_strategy(), seed in any::<u64>()) {
        let rep = MatrixRep::build(dims).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, dims, 8);
        let e = Element::word(dims, &w.0, Scalar::from_int(1)).unwrap();
        let d = e.trace().to_complex() - rep.oracle_trace(&e).unwrap();
        prop_assert!(d.norm() <= 1e-10);
    }

    #[test]
    fn potential_and_curvature_adjointness(dims in dims_strategy(), seed in 0u64..1000) {
        let c = CurvaturePoint::random(seed, dims);
        let rep = MatrixRep::build(dims).unwrap();
        let e = rep.rep_of(&build_e(&c).element).unwrap();
        prop_assert!(hermitian_defect(&e) < 1e-10);
        let omega = build_omega(&c);
        for i in 0..dims.m() {
            for j in 0..dims.m() {
                let w = rep.rep_of(omega.get(i, j)).unwrap();
                prop_assert!(antihermitian_defect(&w) < 1e-10);
                prop_assert!((omega.get(i, j) + omega.get(j, i)).is_zero());
            }
        }
    }

    #[test]
    fn action_is_linear(
        a in prop::array::uniform5(-10.0f64..10.0),
        b in prop::array::uniform5(-10.0f64..10.0),
        f in prop::array::uniform5(0.0f64..2.0),
        s in -3.0f64..3.0,
        lambda in 0.5f64..20.0,
    ) {
        let m = CutoffMoments { f0: f[0], f1: f[1], f2: f[2], f3: f[3], f4: f[4] };
        let mut ab = [0.0; 5];
        for k in 0..5 {
            ab[k] = a[k] + s * b[k];
        }
        let lhs = action_asymptotics(&ab, &m, lambda);
        let rhs = action_asymptotics(&a, &m, lambda) + s * action_asymptotics(&b, &m, lambda);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
        let m2 = CutoffMoments { f4: 2.0 * f[4], ..m };
        let once = action_asymptotics(&[1.0, 0.0, 0.0, 0.0, 0.0], &m, lambda);
        let twice = action_asymptotics(&[1.0, 0.0, 0.0, 0.0, 0.0], &m2, lambda);
        prop_assert!((twice - 2.0 * once).abs() <= 1e-9 * twice.abs().max(1.0));
    }
}

#[test]
fn trace_vanishes_on_odd_words() {
    for (p, q) in [(1, 2)] {
        let dims = Dims::new(p, q).unwrap();
        let gens = dims.generators();
        let n = gens.len();
        for len in [1usize, 3, 5] {
            let total = n.pow(len as u32);
            for mut idx in 0..total {
                let mut w = Vec::with_capacity(len);
                for _ in 0..len {
                    w.push(gens[idx % n]);
                    idx /= n;
                }
                let (canon, _) = canonicalize(&Word(w.clone()), Scalar::from_int(1));
                assert_eq!(canon.0.len() % 2, 1);
                let e = Element::word(dims, &w, Scalar::from_int(1)).unwrap();
                assert!(e.trace() == Scalar::from_int(0));
            }
        }
    }
}

#[test]
fn canonicalize_is_idempotent_exhaustively() {
    let dims = Dims::new(1, 2).unwrap();
    let gens = dims.generators();
    let n = gens.len();
    for len in 0..=4usize {
        for mut idx in 0..n.pow(len as u32) {
            let mut w = Vec::with_capacity(len);
            for _ in 0..len {
                w.push(gens[idx % n]);
                idx /= n;
            }
            let (once, s) = canonicalize(&Word(w), Scalar::from_int(1));
            let (twice, s2) = canonicalize(&once, s.clone());
            assert_eq!(once, twice);
            assert_eq!(s, s2);
        }
    }
}

#[test]
fn torus_heat_trace_decreasing_and_convex() {
    let t = TorusSpec::unit(Dims::new(1, 2).unwrap());
    let times: Vec<f64> = (1..60).map(|k| 0.005 * k as f64).collect();
    let v: Vec<f64> = times.iter().map(|&s| torus_heat_trace(&t, s).unwrap()).collect();
    for w in v.windows(2) {
        assert!(w[1] < w[0]);
    }
    for w in v.windows(3) {
        assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12 * w[1]);
    }
}

#[test]
fn torus_heat_trace_small_time_limit() {
    let t = TorusSpec::unit(Dims::new(1, 2).unwrap());
    let a0 = t.a0().unwrap();
    for time in [0.01, 0.005, 0.002] {
        let v = time * time * torus_heat_trace(&t, time).unwrap();
        assert!((v - a0).abs() <= 1e-9 * a0, "time {time}");
    }
}

#[test]
fn torus_count_error_decays() {
    let t = TorusSpec::unit(Dims::new(1, 2).unwrap());
    let leading = 0.5 * t.a0().unwrap();
    let err = |lambda: f64| {
        let n = torus_count_action(&t, lambda).unwrap() as f64;
        (n / lambda.powi(4) - leading).abs() / leading
    };
    let (e50, e100, e200) = (err(50.0), err(100.0), err(200.0));
    // at least as fast as 1/Λ
    assert!(e100 <= e50 && e200 <= e100, "{e50} {e100} {e200}");
    assert!(e200 * 200.0 <= e50 * 50.0);
}
