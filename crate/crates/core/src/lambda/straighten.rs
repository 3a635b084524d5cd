//! Straightening formal sums into the admissible basis.

use std::collections::HashMap;

use super::relations::{is_admissible_pair, pair_rewrite_cached};
use super::{Element, FormalSum, Generator, LambdaError, Monomial};
use crate::prime::PrimeContext;

/// Default budget of pair rewrites per call.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Which inadmissible pair to rewrite first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

/// Reduce a formal sum to admissible normal form (leftmost strategy,
/// default fuel).
pub fn normalize(formal: &[(u32, Monomial)], ctx: &PrimeContext) -> Result<Element, LambdaError> {
    normalize_with(formal, ctx, Strategy::Leftmost, DEFAULT_FUEL)
}

pub fn normalize_with(
    formal: &[(u32, Monomial)],
    ctx: &PrimeContext,
    strategy: Strategy,
    fuel: u64,
) -> Result<Element, LambdaError> {
    let p = ctx.p();
    let mut pending: HashMap<Vec<Generator>, u32> = HashMap::new();
    for (c, w) in formal {
        accumulate(&mut pending, w.letters().to_vec(), *c % p, ctx);
    }
    let mut done: HashMap<Monomial, u32> = HashMap::new();
    let mut steps = 0u64;
    while !pending.is_empty() {
        let mut next: HashMap<Vec<Generator>, u32> = HashMap::new();
        for (word, c) in pending.drain() {
            if c == 0 {
                continue;
            }
            let Some(at) = find_inadmissible(&word, p, strategy) else {
                let e = done.entry(Monomial::new(word)).or_insert(0);
                *e = ctx.add(*e, c);
                continue;
            };
            steps += 1;
            if steps > fuel {
                return Err(LambdaError::FuelExhausted(fuel));
            }
            for &(rc, a, b) in pair_rewrite_cached(word[at], word[at + 1], ctx).iter() {
                let mut w = Vec::with_capacity(word.len());
                w.extend_from_slice(&word[..at]);
                w.push(a);
                w.push(b);
                w.extend_from_slice(&word[at + 2..]);
                accumulate(&mut next, w, ctx.mul(c, rc), ctx);
            }
        }
        pending = next;
    }
    Ok(Element::from_admissible_map(done, ctx))
}

fn accumulate(map: &mut HashMap<Vec<Generator>, u32>, w: Vec<Generator>, c: u32, ctx: &PrimeContext) {
    if c == 0 {
        return;
    }
    let e = map.entry(w).or_insert(0);
    *e = ctx.add(*e, c);
}

fn find_inadmissible(word: &[Generator], p: u32, strategy: Strategy) -> Option<usize> {
    let bad = |i: &usize| !is_admissible_pair(word[*i], word[*i + 1], p);
    let n = word.len().saturating_sub(1);
    match strategy {
        Strategy::Leftmost => (0..n).find(bad),
        Strategy::Rightmost => (0..n).rev().find(bad),
    }
}

/// Product in `Λ`: concatenate termwise and straighten.
pub fn multiply(x: &Element, y: &Element) -> Element {
    assert_eq!(x.ctx(), y.ctx(), "elements over different primes");
    let ctx = x.ctx();
    if x.is_zero() || y.is_zero() {
        return Element::zero(ctx);
    }
    let mut formal: FormalSum = Vec::with_capacity(x.num_terms() * y.num_terms());
    for (u, a) in x.terms() {
        for (v, b) in y.terms() {
            formal.push((ctx.mul(*a, *b), u.concat(v)));
        }
    }
    normalize(&formal, ctx).expect("straightening exceeded its step budget")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn word(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    fn el(s: &str, ctx: &PrimeContext) -> Element {
        Element::parse(s, ctx).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let ctx = c3();
        assert_eq!(normalize(&[(1, word("l1 l4"))], &ctx).unwrap().to_string(), "2 l2 l3");
        assert_eq!(normalize(&[(1, word("l1 l2"))], &ctx).unwrap().to_string(), "1 l1 l2");
        assert!(normalize(&[(1, word("l1 m0 l1"))], &ctx).unwrap().is_zero());
    }

    #[test]
    fn multiply_examples() {
        let ctx = c3();
        let x = el("l1 m1", &ctx);
        assert_eq!(multiply(&Element::one(&ctx), &x), x);
        assert_eq!(multiply(&el("l1", &ctx), &el("l2", &ctx)).to_string(), "1 l1 l2");
        assert!(multiply(&el("l1", &ctx), &el("l3", &ctx)).is_zero());
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let ctx = c3();
        let r = normalize_with(&[(1, word("l1 l4"))], &ctx, Strategy::Leftmost, 0);
        assert_eq!(r, Err(LambdaError::FuelExhausted(0)));
    }

    #[test]
    fn strategies_agree_on_a_long_word() {
        let ctx = PrimeContext::new(5).unwrap();
        let w = [(1, word("l1 m9 l27 m30 l12 m8"))];
        let a = normalize_with(&w, &ctx, Strategy::Leftmost, DEFAULT_FUEL).unwrap();
        let b = normalize_with(&w, &ctx, Strategy::Rightmost, DEFAULT_FUEL).unwrap();
        assert_eq!(a, b);
    }
}
