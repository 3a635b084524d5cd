//! The unstable subalgebras `Λ(n)`, the ideals `Λλ(n)`, and elements tagged
//! with a sphere.

use std::fmt;

use crate::lambda::{is_admissible, multiply, Element, GenKind, Generator, LambdaError, Monomial};
use crate::prime::PrimeContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `Λ(n)`: admissible words with first index at most `n`.
    Full,
    /// `Λλ(n)`: words of `Λ(n)` ending in a `λ`.
    LambdaTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnstableFlavor {
    pub flavor: Flavor,
    pub n: u32,
}

impl UnstableFlavor {
    pub fn full(n: u32) -> Self {
        UnstableFlavor { flavor: Flavor::Full, n }
    }

    pub fn lambda_tail(n: u32) -> Self {
        UnstableFlavor {
            flavor: Flavor::LambdaTail,
            n,
        }
    }
}

/// Which lengths to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthSpec {
    Exactly(usize),
    /// Every nonzero length that can occur below the degree bound. Words
    /// of `μ_0` have degree 0 and arbitrary length, so "all" stops at
    /// `⌊D/(2p−3)⌋ + 1`, one past the longest word without `μ_0`.
    All,
}

/// Longest length enumerated by [`LengthSpec::All`] for degree bound `d`.
pub fn all_lengths_cap(degree_max: u32, p: u32) -> usize {
    (degree_max / (2 * p - 3)) as usize + 1
}

/// Admissible monomials of the flavor with degree `≤ degree_max`, in
/// canonical order.
pub fn enumerate_basis(
    flavor: UnstableFlavor,
    degree_max: u32,
    length: LengthSpec,
    ctx: &PrimeContext,
) -> Vec<Monomial> {
    let lengths: Vec<usize> = match length {
        LengthSpec::Exactly(l) => vec![l],
        LengthSpec::All => (0..=all_lengths_cap(degree_max, ctx.p())).collect(),
    };
    let mut out = Vec::new();
    for l in lengths {
        let mut prefix = Vec::with_capacity(l);
        extend(&mut prefix, l, None, flavor.n, degree_max, ctx.p(), &mut out);
    }
    if flavor.flavor == Flavor::LambdaTail {
        out.retain(|w| w.last().is_some_and(|g| g.is_lambda()));
    }
    out.sort_by(|a, b| a.canonical_cmp(b, ctx.p()));
    out
}

/// Basis of a single bidegree: length `k`, degree exactly `degree`.
pub fn bidegree_basis(flavor: UnstableFlavor, degree: u32, k: usize, ctx: &PrimeContext) -> Vec<Monomial> {
    let p = ctx.p();
    let mut v = enumerate_basis(flavor, degree, LengthSpec::Exactly(k), ctx);
    v.retain(|w| w.degree(p) == degree);
    v
}

fn extend(
    prefix: &mut Vec<Generator>,
    remaining: usize,
    prev: Option<Generator>,
    first_bound: u32,
    budget: u32,
    p: u32,
    out: &mut Vec<Monomial>,
) {
    if remaining == 0 {
        out.push(Monomial::new(prefix.clone()));
        return;
    }
    let max_index = match prev {
        None => first_bound,
        Some(g) if g.is_lambda() => p * g.index - 1,
        Some(g) => p * g.index,
    };
    for kind in [GenKind::Mu, GenKind::Lambda] {
        let start = if kind == GenKind::Lambda { 1 } else { 0 };
        for i in start..=max_index {
            let g = Generator::new_unchecked(kind, i);
            let d = g.degree(p);
            if d > budget {
                break;
            }
            prefix.push(g);
            extend(prefix, remaining - 1, Some(g), first_bound, budget - d, p, out);
            prefix.pop();
        }
    }
}

/// Membership of an admissible word in `Λ(n)` or `Λλ(n)`.
pub fn member(w: &Monomial, flavor: UnstableFlavor, ctx: &PrimeContext) -> Result<bool, LambdaError> {
    if !is_admissible(w, ctx) {
        return Err(LambdaError::NotAdmissible(w.clone()));
    }
    let first_ok = w.first().is_none_or(|g| g.index <= flavor.n);
    Ok(match flavor.flavor {
        Flavor::Full => first_ok,
        Flavor::LambdaTail => first_ok && w.last().is_some_and(|g| g.is_lambda()),
    })
}

/// A class of `E^1(S^n)`: an element of `Λ(⌊n/2⌋)` of one length and one
/// degree, placed over the sphere `S^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SphereElement {
    sphere: u32,
    length: usize,
    degree: u32,
    value: Element,
}

impl SphereElement {
    /// Tag `value` with `S^n`. A zero value needs its bidegree spelled out,
    /// hence `length` and `degree`.
    pub fn new(sphere: u32, value: Element, length: usize, degree: u32) -> Result<Self, LambdaError> {
        if sphere < 2 {
            return Err(LambdaError::NotMember(value.to_string(), format!("S^{sphere}")));
        }
        let ctx = value.ctx().clone();
        let p = ctx.p();
        for (w, _) in value.terms() {
            if w.len() != length || w.degree(p) != degree {
                return Err(LambdaError::NotHomogeneous);
            }
            if !member(w, UnstableFlavor::full(sphere / 2), &ctx)? {
                return Err(LambdaError::NotMember(w.to_string(), format!("Λ({})", sphere / 2)));
            }
        }
        Ok(SphereElement {
            sphere,
            length,
            degree,
            value,
        })
    }

    /// Tag a nonzero homogeneous element, reading the bidegree off its terms.
    pub fn from_element(sphere: u32, value: Element) -> Result<Self, LambdaError> {
        let (Some(l), Some(d)) = (value.length(), value.degree()) else {
            return Err(LambdaError::NotHomogeneous);
        };
        SphereElement::new(sphere, value, l, d)
    }

    /// The fundamental class `ι_n`.
    pub fn iota(sphere: u32, ctx: &PrimeContext) -> Self {
        SphereElement::new(sphere, Element::one(ctx), 0, 0).expect("sphere dimension at least 2")
    }

    pub fn sphere(&self) -> u32 {
        self.sphere
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Lambda-algebra degree of the value.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Homotopy degree `m = n + deg`.
    pub fn m(&self) -> u32 {
        self.sphere + self.degree
    }

    pub fn value(&self) -> &Element {
        &self.value
    }

    pub fn into_value(self) -> Element {
        self.value
    }
}

impl fmt::Debug for SphereElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]/S^{} (k={}, m={})", self.value, self.sphere, self.length, self.m())
    }
}

/// `σ`: the same label over `S^{n+1}`.
pub fn suspend(x: &SphereElement) -> SphereElement {
    SphereElement {
        sphere: x.sphere + 1,
        length: x.length,
        degree: x.degree,
        value: x.value.clone(),
    }
}

/// `b` can be composed after `a` when `b` lives over `S^{m(a)}`.
pub fn composable(a: &SphereElement, b: &SphereElement) -> bool {
    b.sphere == a.m()
}

/// Kleisli composition on `E^1`, realized as lambda multiplication.
pub fn compose(a: &SphereElement, b: &SphereElement) -> Result<SphereElement, LambdaError> {
    if !composable(a, b) {
        return Err(LambdaError::NotComposable(format!(
            "{a:?} then {b:?}: sphere {} differs from m = {}",
            b.sphere,
            a.m()
        )));
    }
    let value = multiply(&a.value, &b.value);
    SphereElement::new(a.sphere, value, a.length + b.length, a.degree + b.degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn names(v: &[Monomial]) -> Vec<String> {
        v.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn enumeration_examples() {
        let ctx = c3();
        let f = UnstableFlavor::full(1);
        assert_eq!(names(&enumerate_basis(f, 4, LengthSpec::Exactly(1), &ctx)), ["m0", "l1", "m1"]);
        assert_eq!(names(&enumerate_basis(f, 100, LengthSpec::Exactly(0), &ctx)), ["1"]);
        assert_eq!(names(&bidegree_basis(f, 6, 2, &ctx)), ["l1 l1"]);
    }

    #[test]
    fn membership_examples() {
        let ctx = c3();
        let w = |s: &str| Monomial::parse(s).unwrap();
        assert!(!member(&w("l2"), UnstableFlavor::full(1), &ctx).unwrap());
        assert!(member(&w("m1 l1"), UnstableFlavor::lambda_tail(1), &ctx).unwrap());
        assert!(!member(&w("l1 m0"), UnstableFlavor::lambda_tail(1), &ctx).unwrap());
        assert!(member(&w("1"), UnstableFlavor::full(0), &ctx).unwrap());
        assert!(!member(&w("1"), UnstableFlavor::lambda_tail(5), &ctx).unwrap());
        assert!(member(&w("l1 l3"), UnstableFlavor::full(1), &ctx).is_err());
    }

    #[test]
    fn suspension_and_composition() {
        let ctx = c3();
        let l1 = SphereElement::from_element(2, Element::parse("l1", &ctx).unwrap()).unwrap();
        assert_eq!(l1.m(), 5);
        let sl1 = suspend(&l1);
        assert_eq!((sl1.sphere(), sl1.m()), (3, 6));
        assert_eq!(suspend(&SphereElement::iota(2, &ctx)), SphereElement::iota(3, &ctx));

        let l2 = SphereElement::from_element(5, Element::parse("l2", &ctx).unwrap()).unwrap();
        let c = compose(&l1, &l2).unwrap();
        assert_eq!(c.value().to_string(), "1 l1 l2");
        assert_eq!((c.sphere(), c.length(), c.m()), (2, 2, 12));
        assert_eq!(compose(&l1, &SphereElement::iota(5, &ctx)).unwrap(), l1);

        let over4 = SphereElement::iota(4, &ctx);
        assert!(matches!(compose(&l1, &over4), Err(LambdaError::NotComposable(_))));
    }

    #[test]
    fn odd_spheres_use_half_dimension() {
        let ctx = c3();
        let l1 = Element::parse("l1", &ctx).unwrap();
        assert!(SphereElement::from_element(3, l1.clone()).is_ok());
        let l2 = Element::parse("l2", &ctx).unwrap();
        assert!(SphereElement::from_element(3, l2.clone()).is_err());
        assert!(SphereElement::from_element(4, l2).is_ok());
    }
}
