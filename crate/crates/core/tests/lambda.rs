use lambda_sseq::lambda::{
    bound_n, bound_n_prime, coeff_a, coeff_b, d_element, is_admissible, multiply, rewrite_pair, Monomial,
};
use lambda_sseq::unstable::{
    bidegree_basis, compose, enumerate_basis, member, suspend, LengthSpec, SphereElement, UnstableFlavor,
};
use lambda_sseq::{Element, GenKind, Generator, PrimeContext};

fn ctx(p: u32) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

fn el(s: &str, c: &PrimeContext) -> Element {
    Element::parse(s, c).unwrap()
}

fn l(i: u32) -> Generator {
    Generator::lambda(i).unwrap()
}

fn m(i: u32) -> Generator {
    Generator::mu(i)
}

// Pascal's triangle mod q by the additive recurrence; no Lucas.
fn pascal(n: usize, q: u32) -> Vec<Vec<u32>> {
    let mut rows = vec![vec![1u32]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1u32; i + 1];
        for j in 1..i {
            row[j] = (prev[j - 1] + prev[j]) % q;
        }
        rows.push(row);
    }
    rows
}

#[test]
fn rejects_small_and_composite_primes() {
    for p in [0, 1, 2, 4, 9, 15] {
        assert!(PrimeContext::new(p).is_err(), "p={p}");
    }
    for p in [3, 5, 7, 11] {
        assert!(PrimeContext::new(p).is_ok());
    }
}

#[test]
fn binomials_match_pascal() {
    for p in [3u32, 5, 7] {
        let tri = pascal(100, p);
        let c = ctx(p);
        for (n, row) in tri.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(c.binom(n as u64, k as i64), *v, "C({n},{k}) mod {p}");
            }
            assert_eq!(c.binom(n as u64, n as i64 + 1), 0);
            assert_eq!(c.binom(n as u64, -1), 0);
        }
    }
    let c = ctx(3);
    assert_eq!(c.binom(5, 2), 1);
    assert_eq!(c.binom(3, 5), 0);
}

#[test]
fn relation_coefficients_match_direct_evaluation() {
    for p in [3u32, 5] {
        let tri = pascal(200, p);
        let c = ctx(p);
        let pi = p as i64;
        for k in 0..30i64 {
            for j in 0..=bound_n(k, &c) {
                let up = ((pi - 1) * (k - j) - 1) as usize;
                let b = (tri[up].get(j as usize).copied().unwrap_or(0)) as i64;
                let want = if (j + 1) % 2 == 0 { b } else { -b };
                assert_eq!(coeff_a(k, j, &c).unwrap() as i64, want.rem_euclid(pi));
            }
            for j in 0..=bound_n_prime(k, &c) {
                let up = ((pi - 1) * (k - j)) as usize;
                let b = (tri[up].get(j as usize).copied().unwrap_or(0)) as i64;
                let want = if j % 2 == 0 { b } else { -b };
                assert_eq!(coeff_b(k, j, &c).unwrap() as i64, want.rem_euclid(pi));
            }
        }
    }
    let c = ctx(3);
    assert_eq!(coeff_a(1, 0, &c).unwrap(), 2);
    assert_eq!(coeff_a(3, 1, &c).unwrap(), 0);
    assert_eq!(coeff_b(2, 1, &c).unwrap(), 1);
    assert_eq!(bound_n(0, &c), -1);
    assert_eq!(bound_n(1, &c), 0);
    assert_eq!(bound_n_prime(3, &c), 2);
}

#[test]
fn generator_validity_and_degrees() {
    assert!(Generator::lambda(0).is_err());
    assert_eq!(l(1).degree(3), 3);
    assert_eq!(m(1).degree(3), 4);
    assert_eq!(m(0).degree(5), 0);
    assert_eq!(l(2).degree(5), 15);
}

#[test]
fn admissibility_examples() {
    let c = ctx(3);
    assert!(is_admissible(&Monomial::new(vec![l(1), l(2)]), &c));
    assert!(!is_admissible(&Monomial::new(vec![l(1), l(3)]), &c));
    assert!(is_admissible(&Monomial::unit(), &c));
}

#[test]
fn pair_rewrite_examples() {
    let c = ctx(3);
    assert!(rewrite_pair(l(1), l(3), &c).unwrap().is_empty());
    let r = rewrite_pair(l(1), l(4), &c).unwrap();
    assert_eq!(r, vec![(2, Monomial::new(vec![l(2), l(3)]))]);
    assert!(rewrite_pair(m(0), l(1), &c).unwrap().is_empty());
    assert!(rewrite_pair(l(1), l(2), &c).is_err());
}

#[test]
fn normalize_and_multiply_examples() {
    let c = ctx(3);
    assert_eq!(el("l1 l4", &c).to_string(), "2 l2 l3");
    assert!(el("l1 m0 l1", &c).is_zero());
    let one = Element::one(&c);
    let x = el("l1 m1", &c);
    assert_eq!(multiply(&one, &x), x);
    assert_eq!(multiply(&el("l1", &c), &el("l2", &c)).to_string(), "1 l1 l2");
    assert!(multiply(&el("l1", &c), &el("l3", &c)).is_zero());
}

#[test]
fn differential_examples() {
    let c = ctx(3);
    assert!(d_element(&Element::one(&c)).is_zero());
    assert!(d_element(&el("l1", &c)).is_zero());
    assert_eq!(d_element(&el("l2", &c)).to_string(), "1 l1 l1");
    assert_eq!(d_element(&el("m1", &c)).to_string(), "2 l1 m0");
    assert_eq!(d_element(&el("l1 l2", &c)).to_string(), "2 l1 l1 l1");
    assert_eq!(d_element(&el("m2", &c)), el("2 l2 m0 + 1 l1 m1 + 1 m1 l1", &c));
}

// Every word of the given length with degree ≤ d and letters of bounded
// index, filtered by the glossary's admissibility rule and i_1 ≤ n.
fn brute_force(p: u32, n: u32, len: usize, dmax: u32) -> Vec<Monomial> {
    let mut letters = Vec::new();
    for i in 0..=dmax {
        let g = m(i);
        if g.degree(p) <= dmax {
            letters.push(g);
        }
        if i >= 1 && l(i).degree(p) <= dmax {
            letters.push(l(i));
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Generator>> = vec![vec![]];
    while let Some(w) = stack.pop() {
        let deg: u32 = w.iter().map(|g| g.degree(p)).sum();
        if w.len() == len {
            let ok = w.windows(2).all(|pr| {
                let lim = p * pr[0].index;
                match pr[0].kind {
                    GenKind::Lambda => pr[1].index + 1 <= lim,
                    GenKind::Mu => pr[1].index <= lim,
                }
            });
            if ok && w.first().map_or(true, |g| g.index <= n) {
                out.push(Monomial::new(w));
            }
            continue;
        }
        for g in &letters {
            if deg + g.degree(p) <= dmax {
                let mut v = w.clone();
                v.push(*g);
                stack.push(v);
            }
        }
    }
    out
}

#[test]
fn enumeration_matches_generate_and_filter() {
    for (p, dmax, lens) in [(3u32, 18u32, 4usize), (5, 24, 3)] {
        let c = ctx(p);
        for n in 0..=3 {
            for len in 0..=lens {
                let mut want = brute_force(p, n, len, dmax);
                want.sort();
                let mut got = enumerate_basis(UnstableFlavor::full(n), dmax, LengthSpec::Exactly(len), &c);
                got.sort();
                assert_eq!(got, want, "p={p} n={n} len={len}");
                let mut tail: Vec<_> = want.iter().filter(|w| w.last().is_some_and(|g| g.is_lambda())).cloned().collect();
                tail.sort();
                let mut got_tail = enumerate_basis(UnstableFlavor::lambda_tail(n), dmax, LengthSpec::Exactly(len), &c);
                got_tail.sort();
                assert_eq!(got_tail, tail, "Λλ p={p} n={n} len={len}");
            }
        }
    }
}

#[test]
fn unstable_basis_examples() {
    let c = ctx(3);
    let txt = |v: Vec<Monomial>| v.iter().map(|w| w.to_string()).collect::<Vec<_>>();
    assert_eq!(txt(enumerate_basis(UnstableFlavor::full(1), 4, LengthSpec::Exactly(1), &c)), ["m0", "l1", "m1"]);
    assert_eq!(enumerate_basis(UnstableFlavor::full(1), 10, LengthSpec::Exactly(0), &c), vec![Monomial::unit()]);
    assert_eq!(txt(bidegree_basis(UnstableFlavor::full(1), 6, 2, &c)), ["l1 l1"]);
    let w = |s: &str| Monomial::parse(s).unwrap();
    assert!(!member(&w("l2"), UnstableFlavor::full(1), &c).unwrap());
    assert!(member(&w("m1 l1"), UnstableFlavor::lambda_tail(1), &c).unwrap());
    assert!(!member(&w("l1 m0"), UnstableFlavor::lambda_tail(1), &c).unwrap());
    assert!(member(&w("l1"), UnstableFlavor::lambda_tail(1), &c).unwrap());
}

#[test]
fn suspension_and_composition_examples() {
    let c = ctx(3);
    let a = SphereElement::from_element(2, el("l1", &c)).unwrap();
    assert_eq!(a.m(), 5);
    let sa = suspend(&a);
    assert_eq!((sa.sphere(), sa.m()), (3, 6));
    assert_eq!(sa.value(), a.value());

    let i2 = SphereElement::iota(2, &c);
    let si = suspend(&i2);
    assert_eq!((si.sphere(), si.m(), si.length()), (3, 3, 0));

    let x = SphereElement::from_element(4, el("2 l2 l3", &c)).unwrap();
    let sx = suspend(&x);
    assert_eq!(sx.sphere(), 5);
    assert_eq!(sx.m(), x.m() + 1);
    assert_eq!(sx.value().to_string(), "2 l2 l3");

    let i5 = SphereElement::iota(5, &c);
    assert_eq!(compose(&a, &i5).unwrap(), a);
    let b = SphereElement::from_element(5, el("l2", &c)).unwrap();
    let ab = compose(&a, &b).unwrap();
    assert_eq!(ab.value().to_string(), "1 l1 l2");
    assert_eq!((ab.sphere(), ab.length(), ab.m()), (2, 2, 12));
    let b4 = SphereElement::from_element(4, el("l1", &c)).unwrap();
    assert!(compose(&a, &b4).is_err());
    assert!(SphereElement::from_element(2, el("l2", &c)).is_err());
}
