//! Relation coefficients, admissibility, and the pair rewrites.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{FormalSum, GenKind, Generator, LambdaError, Monomial};
use crate::prime::PrimeContext;

/// `a(k, j) = (-1)^{j+1} C((p-1)(k-j) - 1, j)`.
pub fn coeff_a(k: i64, j: i64, ctx: &PrimeContext) -> Result<u32, LambdaError> {
    let upper = (ctx.p() as i64 - 1) * (k - j) - 1;
    if upper < 0 {
        return Err(LambdaError::NegativeUpperIndex { k, j });
    }
    Ok(ctx.mul(ctx.sign(j + 1), ctx.binom(upper as u64, j)))
}

/// `b(k, j) = (-1)^j C((p-1)(k-j), j)`.
pub fn coeff_b(k: i64, j: i64, ctx: &PrimeContext) -> Result<u32, LambdaError> {
    let upper = (ctx.p() as i64 - 1) * (k - j);
    if upper < 0 {
        return Err(LambdaError::NegativeUpperIndex { k, j });
    }
    Ok(ctx.mul(ctx.sign(j), ctx.binom(upper as u64, j)))
}

/// `N(k) = ⌊k - (k+1)/p⌋`; `-1` means the governed sum is empty.
pub fn bound_n(k: i64, ctx: &PrimeContext) -> i64 {
    let p = ctx.p() as i64;
    (k * p - k - 1).div_euclid(p)
}

/// `N'(k) = ⌊k - k/p⌋`.
pub fn bound_n_prime(k: i64, ctx: &PrimeContext) -> i64 {
    let p = ctx.p() as i64;
    (k * p - k).div_euclid(p)
}

#[inline]
pub fn is_admissible_pair(first: Generator, second: Generator, p: u32) -> bool {
    let limit = p * first.index;
    match first.kind {
        GenKind::Lambda => second.index < limit,
        GenKind::Mu => second.index <= limit,
    }
}

/// Every adjacent pair satisfies the admissibility bound.
pub fn is_admissible(w: &Monomial, ctx: &PrimeContext) -> bool {
    let p = ctx.p();
    w.letters()
        .windows(2)
        .all(|pair| is_admissible_pair(pair[0], pair[1], p))
}

pub(crate) type PairRewrite = Arc<[(u32, Generator, Generator)]>;

/// Memo of pair rewrites for one prime. Concurrent reads, atomic inserts.
#[derive(Default)]
pub(crate) struct RewriteMemo {
    table: RwLock<HashMap<(Generator, Generator), PairRewrite>>,
}

impl RewriteMemo {
    fn get(&self, key: &(Generator, Generator)) -> Option<PairRewrite> {
        self.table.read().expect("memo poisoned").get(key).cloned()
    }

    fn insert(&self, key: (Generator, Generator), value: PairRewrite) -> PairRewrite {
        let mut t = self.table.write().expect("memo poisoned");
        t.entry(key).or_insert(value).clone()
    }
}

/// Apply the relation for an inadmissible pair. The result is a formal sum
/// of two-letter words, each with a smaller second index, except the term
/// `μ_i λ_{pi}` of `λ_i μ_{pi}`, which keeps it but is already admissible.
pub fn rewrite_pair(
    first: Generator,
    second: Generator,
    ctx: &PrimeContext,
) -> Result<FormalSum, LambdaError> {
    if is_admissible_pair(first, second, ctx.p()) {
        return Err(LambdaError::AdmissiblePair(first, second));
    }
    Ok(pair_rewrite_cached(first, second, ctx)
        .iter()
        .map(|&(c, a, b)| (c, Monomial::new(vec![a, b])))
        .collect())
}

pub(crate) fn pair_rewrite_cached(first: Generator, second: Generator, ctx: &PrimeContext) -> PairRewrite {
    let key = (first, second);
    if let Some(hit) = ctx.memo().get(&key) {
        return hit;
    }
    let computed: PairRewrite = compute_pair_rewrite(first, second, ctx).into();
    ctx.memo().insert(key, computed)
}

fn compute_pair_rewrite(first: Generator, second: Generator, ctx: &PrimeContext) -> Vec<(u32, Generator, Generator)> {
    use GenKind::{Lambda, Mu};
    let p = ctx.p() as i64;
    let i = first.index as i64;
    let x = second.index as i64;
    let gen = |kind, idx: i64| Generator::new_unchecked(kind, idx as u32);
    let a = |k, j| coeff_a(k, j, ctx).expect("relation index range");
    let b = |k, j| coeff_b(k, j, ctx).expect("relation index range");
    let mut out = Vec::new();
    match first.kind {
        Lambda => {
            let k = x - p * i;
            debug_assert!(k >= 0);
            for j in 0..=bound_n(k, ctx) {
                out.push((a(k, j), gen(Lambda, i + k - j), gen(second.kind, p * i + j)));
            }
            if second.kind == Mu {
                for j in 0..=bound_n_prime(k, ctx) {
                    out.push((b(k, j), gen(Mu, i + k - j), gen(Lambda, p * i + j)));
                }
            }
        }
        Mu => {
            let k = x - p * i - 1;
            debug_assert!(k >= 0);
            for j in 0..=bound_n(k, ctx) {
                out.push((a(k, j), gen(Mu, i + k - j), gen(second.kind, p * i + j + 1)));
            }
        }
    }
    out.retain(|t| t.0 != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn l(i: u32) -> Generator {
        Generator::lambda(i).unwrap()
    }

    fn m(i: u32) -> Generator {
        Generator::mu(i)
    }

    #[test]
    fn coefficient_examples() {
        let ctx = c3();
        assert_eq!(coeff_a(1, 0, &ctx).unwrap(), 2);
        assert_eq!(coeff_a(3, 1, &ctx).unwrap(), 0);
        assert_eq!(coeff_b(2, 1, &ctx).unwrap(), 1);
        assert!(coeff_a(0, 0, &ctx).is_err());
    }

    #[test]
    fn bound_examples() {
        let ctx = c3();
        assert_eq!(bound_n(0, &ctx), -1);
        assert_eq!(bound_n(0, &PrimeContext::new(7).unwrap()), -1);
        assert_eq!(bound_n(1, &ctx), 0);
        assert_eq!(bound_n_prime(3, &ctx), 2);
        assert_eq!(bound_n_prime(0, &ctx), 0);
    }

    #[test]
    fn admissibility_examples() {
        let ctx = c3();
        assert!(is_admissible(&Monomial::new(vec![l(1), l(2)]), &ctx));
        assert!(!is_admissible(&Monomial::new(vec![l(1), l(3)]), &ctx));
        assert!(is_admissible(&Monomial::unit(), &ctx));
        assert!(is_admissible(&Monomial::new(vec![m(0), m(0)]), &ctx));
        assert!(!is_admissible(&Monomial::new(vec![m(0), l(1)]), &ctx));
        assert!(is_admissible(&Monomial::new(vec![m(1), m(3)]), &ctx));
    }

    #[test]
    fn rewrite_examples() {
        let ctx = c3();
        assert!(rewrite_pair(l(1), l(3), &ctx).unwrap().is_empty());
        assert_eq!(
            rewrite_pair(l(1), l(4), &ctx).unwrap(),
            vec![(2, Monomial::new(vec![l(2), l(3)]))]
        );
        assert!(rewrite_pair(m(0), l(1), &ctx).unwrap().is_empty());
        assert!(matches!(
            rewrite_pair(l(1), l(2), &ctx),
            Err(LambdaError::AdmissiblePair(..))
        ));
    }

    #[test]
    fn rewrites_preserve_degree_and_decrease_second_index() {
        for p in [3u32, 5] {
            let ctx = PrimeContext::new(p).unwrap();
            for i in 0..8u32 {
                for x in 0..40u32 {
                    for (k1, k2) in [
                        (GenKind::Lambda, GenKind::Lambda),
                        (GenKind::Lambda, GenKind::Mu),
                        (GenKind::Mu, GenKind::Lambda),
                        (GenKind::Mu, GenKind::Mu),
                    ] {
                        if (k1 == GenKind::Lambda && i == 0) || (k2 == GenKind::Lambda && x == 0) {
                            continue;
                        }
                        let g1 = Generator::new_unchecked(k1, i);
                        let g2 = Generator::new_unchecked(k2, x);
                        if is_admissible_pair(g1, g2, p) {
                            continue;
                        }
                        let deg = g1.degree(p) + g2.degree(p);
                        for (c, w) in rewrite_pair(g1, g2, &ctx).unwrap() {
                            assert!(c != 0 && c < p);
                            assert_eq!(w.len(), 2);
                            assert_eq!(w.degree(p), deg);
                            let (g, h) = (w.letters()[0], w.letters()[1]);
                            assert!(h.index < x || (h.index == x && is_admissible_pair(g, h, p)));
                        }
                    }
                }
            }
        }
    }
}
