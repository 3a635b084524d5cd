use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lambda_sseq::lambda::{d_element, multiply, normalize, rewrite_pair, is_admissible_pair, Monomial};
use lambda_sseq::linalg::{kernel_basis, row_reduce, subquotient, SparseMatrix, SparseVec};
use lambda_sseq::unstable::{bidegree_basis, compose, enumerate_basis, suspend, LengthSpec, SphereElement, UnstableFlavor};
use lambda_sseq::{Element, Generator, PrimeContext};

fn ctx(p: u32) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

fn letter(max_index: u32) -> impl Strategy<Value = Generator> {
    prop_oneof![
        (1..=max_index).prop_map(|i| Generator::lambda(i).unwrap()),
        (0..=max_index).prop_map(Generator::mu),
    ]
}

fn word(max_len: usize, max_index: u32) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(letter(max_index), 0..=max_len).prop_map(Monomial::new)
}

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(3u32), Just(5u32)]
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn norm(w: &Monomial, c: &PrimeContext) -> Element {
    normalize(&[(1, w.clone())], c).unwrap()
}

proptest! {
    #![proptest_config(config(400))]

    #[test]
    fn normalize_is_idempotent(p in prime(), w in word(5, 12)) {
        let c = ctx(p);
        let x = norm(&w, &c);
        let formal: Vec<(u32, Monomial)> = x.terms().iter().map(|(w, k)| (*k, w.clone())).collect();
        prop_assert_eq!(normalize(&formal, &c).unwrap(), x);
    }

    #[test]
    fn normalize_is_linear(p in prime(), w1 in word(4, 12), w2 in word(4, 12), a in 0u32..5, b in 0u32..5) {
        let c = ctx(p);
        let lhs = normalize(&[(a, w1.clone()), (b, w2.clone())], &c).unwrap();
        let rhs = norm(&w1, &c).scale(a).add(&norm(&w2, &c).scale(b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rewrite_preserves_degree_and_length(p in prime(), g in letter(6), lam in any::<bool>(), extra in 0u32..12) {
        let c = ctx(p);
        // Smallest inadmissible second index after g, plus a margin.
        let floor = p * g.index + u32::from(!g.is_lambda());
        let idx = (floor + extra).max(1);
        let h = if lam { Generator::lambda(idx).unwrap() } else { Generator::mu(idx) };
        prop_assert!(!is_admissible_pair(g, h, p));
        let d = g.degree(p) + h.degree(p);
        for (coef, w) in rewrite_pair(g, h, &c).unwrap() {
            prop_assert!(coef % p != 0);
            prop_assert_eq!(w.len(), 2);
            prop_assert_eq!(w.degree(p), d);
        }
    }

    #[test]
    fn differential_shifts_bidegree(p in prime(), w in word(4, 10)) {
        let c = ctx(p);
        let x = norm(&w, &c);
        prop_assume!(!x.is_zero());
        let dx = d_element(&x);
        if !dx.is_zero() {
            prop_assert_eq!(dx.degree(), Some(x.degree().unwrap() - 1));
            prop_assert_eq!(dx.length(), Some(x.length().unwrap() + 1));
        }
    }

    #[test]
    fn lambda_tail_is_a_left_ideal(p in prime(), x in word(3, 6), y in word(3, 6)) {
        let c = ctx(p);
        let y = norm(&y, &c);
        let ys: Vec<_> = y.monomials().filter(|w| w.last().is_some_and(|g| g.is_lambda())).cloned().collect();
        prop_assume!(!ys.is_empty());
        let x = norm(&x, &c);
        for w in ys {
            let xy = multiply(&x, &Element::from_monomial(w, &c));
            for t in xy.monomials() {
                prop_assert!(t.last().is_some_and(|g| g.is_lambda()), "{t} in {xy}");
            }
        }
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn multiplication_is_associative(p in prime(), x in word(2, 8), y in word(2, 8), z in word(2, 8)) {
        let c = ctx(p);
        let (x, y, z) = (norm(&x, &c), norm(&y, &c), norm(&z, &c));
        prop_assert_eq!(multiply(&multiply(&x, &y), &z), multiply(&x, &multiply(&y, &z)));
    }

    #[test]
    fn sparse_linear_algebra(p in prime(), rows in 1usize..=200, cols in 1usize..=200, density in 1u32..=5, seed in any::<u64>()) {
        let c = ctx(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = SparseMatrix::zeros(rows, cols, &c);
        for r in 0..rows {
            for col in 0..cols {
                if rng.gen_range(0..100) < density {
                    m.set(r, col, rng.gen_range(1..p));
                }
            }
        }
        let red = row_reduce(&m);
        let ker = kernel_basis(&m);
        for v in &ker {
            prop_assert!(m.mul_sparse(v).is_zero());
        }
        prop_assert_eq!(red.rank + ker.len(), cols);
        prop_assert_eq!(row_reduce(&red.rref).rank, red.rank);
        prop_assert_eq!(row_reduce(&m.transpose()).rank, red.rank);
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn subquotient_coordinates_ignore_boundaries(p in prime(), seed in any::<u64>()) {
        let c = ctx(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(2..12);
        let rand_vec = |rng: &mut ChaCha8Rng| {
            let v: Vec<u32> = (0..dim).map(|_| if rng.gen_bool(0.4) { rng.gen_range(0..p) } else { 0 }).collect();
            SparseVec::from_dense(&v, &c)
        };
        let b: Vec<SparseVec> = (0..rng.gen_range(0..3)).map(|_| rand_vec(&mut rng)).collect();
        let mut z = b.clone();
        z.extend((0..rng.gen_range(1..5)).map(|_| rand_vec(&mut rng)));
        let q = subquotient(&z, &b, dim, &c).unwrap();
        let combo = |rng: &mut ChaCha8Rng, gens: &[SparseVec]| {
            gens.iter().fold(SparseVec::new(), |acc, g| acc.add_scaled(g, rng.gen_range(0..p), &c))
        };
        let zz = combo(&mut rng, &z);
        let bb = combo(&mut rng, &b);
        prop_assert_eq!(q.coordinates(&zz.add_scaled(&bb, 1, &c)).unwrap(), q.coordinates(&zz).unwrap());
        prop_assert!(q.is_boundary(&bb).unwrap());
    }

    #[test]
    fn suspension_commutes_with_composition(p in prime(), seed in any::<u64>()) {
        let c = ctx(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..6u32);
        let pick = |rng: &mut ChaCha8Rng, sphere: u32| {
            let k = rng.gen_range(0..3usize);
            let deg = rng.gen_range(0..16u32);
            let basis = bidegree_basis(UnstableFlavor::full(sphere / 2), deg, k, &c);
            if basis.is_empty() {
                return None;
            }
            let w = basis[rng.gen_range(0..basis.len())].clone();
            SphereElement::from_element(sphere, Element::from_monomial(w, &c)).ok()
        };
        let Some(a) = pick(&mut rng, n) else { return Ok(()) };
        let Some(b) = pick(&mut rng, a.m()) else { return Ok(()) };
        let ab = compose(&a, &b).unwrap();
        let lhs = compose(&suspend(&a), &suspend(&b)).unwrap();
        let sab = suspend(&ab);
        prop_assert_eq!(lhs.value(), sab.value());
        prop_assert_eq!(lhs.sphere(), ab.sphere() + 1);
    }
}

#[test]
fn unstable_dimensions_grow_with_n() {
    let c = ctx(3);
    for len in 0..=4 {
        for deg in 0..=30 {
            let dims: Vec<usize> = (0..=4).map(|n| bidegree_basis(UnstableFlavor::full(n), deg, len, &c).len()).collect();
            assert!(dims.windows(2).all(|w| w[0] <= w[1]), "len={len} deg={deg} {dims:?}");
        }
    }
    let small = enumerate_basis(UnstableFlavor::full(1), 30, LengthSpec::Exactly(3), &c);
    let big = enumerate_basis(UnstableFlavor::full(2), 30, LengthSpec::Exactly(3), &c);
    assert!(small.iter().all(|w| big.contains(w)));
}
