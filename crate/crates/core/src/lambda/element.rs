use std::collections::HashMap;
use std::fmt;

use super::monomial::parse_formal;
use super::{normalize, LambdaError, Monomial};
use crate::prime::PrimeContext;

/// An `F_p`-linear combination of admissible monomials.
///
/// Terms are kept in canonical order (length, degree, lexicographic) with no
/// zero coefficients, so equality and text output are deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    ctx: PrimeContext,
    terms: Vec<(Monomial, u32)>,
}

impl Element {
    pub fn zero(ctx: &PrimeContext) -> Self {
        Element {
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ctx: &PrimeContext) -> Self {
        Element::from_monomial(Monomial::unit(), ctx)
    }

    /// Wrap a monomial that the caller knows is admissible.
    pub fn from_monomial(w: Monomial, ctx: &PrimeContext) -> Self {
        debug_assert!(super::is_admissible(&w, ctx));
        Element {
            ctx: ctx.clone(),
            terms: vec![(w, 1)],
        }
    }

    /// Collect admissible terms, merging duplicates and dropping zeros.
    pub(crate) fn from_admissible_map(map: HashMap<Monomial, u32>, ctx: &PrimeContext) -> Self {
        let p = ctx.p();
        let mut terms: Vec<(Monomial, u32)> = map.into_iter().filter(|(_, c)| *c % p != 0).collect();
        terms.sort_by(|a, b| a.0.canonical_cmp(&b.0, p));
        Element {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Build from `(monomial, coefficient)` pairs; every monomial must be
    /// admissible.
    pub fn from_admissible_terms<I>(terms: I, ctx: &PrimeContext) -> Result<Self, LambdaError>
    where
        I: IntoIterator<Item = (Monomial, u32)>,
    {
        let mut map: HashMap<Monomial, u32> = HashMap::new();
        for (w, c) in terms {
            if !super::is_admissible(&w, ctx) {
                return Err(LambdaError::NotAdmissible(w));
            }
            let e = map.entry(w).or_insert(0);
            *e = ctx.add(*e, c % ctx.p());
        }
        Ok(Element::from_admissible_map(map, ctx))
    }

    /// Parse element text (`2 l2 l3 + 1 l1`, a bare word, or `0`) and reduce
    /// it to the admissible basis.
    pub fn parse(text: &str, ctx: &PrimeContext) -> Result<Self, LambdaError> {
        let formal = parse_formal(text, ctx.p())?;
        normalize(&formal, ctx)
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &Monomial) -> u32 {
        self.terms
            .iter()
            .find(|(m, _)| m == w)
            .map(|(_, c)| *c)
            .unwrap_or(0)
    }

    /// Common degree of all terms, if the element is nonzero and homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let p = self.ctx.p();
        let d = self.terms.first()?.0.degree(p);
        self.terms.iter().all(|(w, _)| w.degree(p) == d).then_some(d)
    }

    /// Common length of all terms, if nonzero and homogeneous in length.
    pub fn length(&self) -> Option<usize> {
        let l = self.terms.first()?.0.len();
        self.terms.iter().all(|(w, _)| w.len() == l).then_some(l)
    }

    /// True when zero or when every term shares one degree and one length.
    pub fn is_bihomogeneous(&self) -> bool {
        self.is_zero() || (self.degree().is_some() && self.length().is_some())
    }

    pub fn scale(&self, c: u32) -> Element {
        let c = c % self.ctx.p();
        if c == 0 {
            return Element::zero(&self.ctx);
        }
        Element {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, a)| (w.clone(), self.ctx.mul(*a, c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        self.add_scaled(other, 1)
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add_scaled(other, self.ctx.p() - 1)
    }

    pub fn neg(&self) -> Element {
        self.scale(self.ctx.p() - 1)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Element, c: u32) -> Element {
        let mut map: HashMap<Monomial, u32> = self.terms.iter().cloned().collect();
        for (w, a) in &other.terms {
            let e = map.entry(w.clone()).or_insert(0);
            *e = self.ctx.add(*e, self.ctx.mul(*a, c % self.ctx.p()));
        }
        Element::from_admissible_map(map, &self.ctx)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter().map(|(w, _)| w)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c} {w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element[p={}]({})", self.ctx.p(), self)
    }
}

impl std::hash::Hash for Element {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ctx.p().hash(state);
        self.terms.hash(state);
    }
}
