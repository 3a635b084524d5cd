//! The differential `∂` on generators and its extension to words.

use super::relations::{bound_n, bound_n_prime, coeff_a, coeff_b};
use super::{normalize, Element, FormalSum, GenKind, Generator, Monomial};
use crate::prime::PrimeContext;

/// Sign convention for extending `∂` across a product `u·w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivationSign {
    /// `∂(uw) = ∂u·w + (-1)^{deg u} u·∂w`. This is the shipped convention.
    #[default]
    Koszul,
    /// `∂(uw) = ∂u·w + (-1)^{deg u + 1} u·∂w`, kept to show that it breaks
    /// `∂² = 0`.
    Opposite,
}

/// Unreduced two-letter terms of `∂g`.
pub(crate) fn d_generator_raw(g: Generator, ctx: &PrimeContext) -> Vec<(u32, Generator, Generator)> {
    use GenKind::{Lambda, Mu};
    let k = g.index as i64;
    let gen = |kind, idx: i64| Generator::new_unchecked(kind, idx as u32);
    let mut out = Vec::new();
    match g.kind {
        Lambda => {
            for j in 1..=bound_n(k, ctx) {
                let c = coeff_a(k, j, ctx).expect("differential index range");
                out.push((c, gen(Lambda, k - j), gen(Lambda, j)));
            }
        }
        Mu => {
            for j in 0..=bound_n(k, ctx) {
                let c = coeff_a(k, j, ctx).expect("differential index range");
                out.push((c, gen(Lambda, k - j), gen(Mu, j)));
            }
            for j in 1..=bound_n_prime(k, ctx) {
                let c = coeff_b(k, j, ctx).expect("differential index range");
                out.push((c, gen(Mu, k - j), gen(Lambda, j)));
            }
        }
    }
    out.retain(|t| t.0 != 0);
    out
}

/// `∂` of a single generator, in admissible form.
pub fn d_generator(g: Generator, ctx: &PrimeContext) -> Element {
    let formal: FormalSum = d_generator_raw(g, ctx)
        .into_iter()
        .map(|(c, a, b)| (c, Monomial::new(vec![a, b])))
        .collect();
    normalize(&formal, ctx).expect("straightening exceeded its step budget")
}

/// Letterwise expansion of `∂w` before straightening.
pub(crate) fn d_word_formal(w: &Monomial, ctx: &PrimeContext, sign: DerivationSign, coeff: u32, out: &mut FormalSum) {
    let letters = w.letters();
    let mut prefix_lambdas = 0i64;
    for (t, g) in letters.iter().enumerate() {
        let exponent = match sign {
            DerivationSign::Koszul => prefix_lambdas,
            DerivationSign::Opposite => prefix_lambdas + t as i64,
        };
        let s = ctx.mul(ctx.sign(exponent), coeff);
        for (c, a, b) in d_generator_raw(*g, ctx) {
            let mut v = Vec::with_capacity(letters.len() + 1);
            v.extend_from_slice(&letters[..t]);
            v.push(a);
            v.push(b);
            v.extend_from_slice(&letters[t + 1..]);
            out.push((ctx.mul(s, c), Monomial::new(v)));
        }
        if g.is_lambda() {
            prefix_lambdas += 1;
        }
    }
}

/// `∂` of a single word under the given convention.
pub fn d_word(w: &Monomial, ctx: &PrimeContext, sign: DerivationSign) -> Element {
    let mut formal = Vec::new();
    d_word_formal(w, ctx, sign, 1, &mut formal);
    normalize(&formal, ctx).expect("straightening exceeded its step budget")
}

/// `∂x` with the Koszul sign.
pub fn d_element(x: &Element) -> Element {
    d_element_with(x, DerivationSign::Koszul)
}

pub fn d_element_with(x: &Element, sign: DerivationSign) -> Element {
    let ctx = x.ctx();
    let mut formal = Vec::new();
    for (w, c) in x.terms() {
        d_word_formal(w, ctx, sign, *c, &mut formal);
    }
    normalize(&formal, ctx).expect("straightening exceeded its step budget")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn el(s: &str, ctx: &PrimeContext) -> Element {
        Element::parse(s, ctx).unwrap()
    }

    #[test]
    fn generator_examples() {
        let ctx = c3();
        assert!(d_generator(Generator::lambda(1).unwrap(), &ctx).is_zero());
        assert_eq!(d_generator(Generator::lambda(2).unwrap(), &ctx).to_string(), "1 l1 l1");
        assert_eq!(d_generator(Generator::mu(1), &ctx).to_string(), "2 l1 m0");
        assert!(d_generator(Generator::mu(0), &ctx).is_zero());
    }

    #[test]
    fn element_examples() {
        let ctx = c3();
        assert!(d_element(&Element::one(&ctx)).is_zero());
        assert_eq!(d_element(&el("l1 l2", &ctx)).to_string(), "2 l1 l1 l1");
        assert_eq!(
            d_element(&el("m2", &ctx)).to_string(),
            "1 l1 m1 + 2 l2 m0 + 1 m1 l1"
        );
    }

    #[test]
    fn sign_pinning_on_mu2() {
        let ctx = c3();
        let mu2 = el("m2", &ctx);
        let good = d_element(&d_element(&mu2));
        assert!(good.is_zero());
        let flipped = d_element_with(&d_element_with(&mu2, DerivationSign::Opposite), DerivationSign::Opposite);
        assert_eq!(flipped.to_string(), "1 l1 l1 m0");
    }

    #[test]
    fn lowers_degree_raises_length() {
        let ctx = PrimeContext::new(5).unwrap();
        for s in ["m3", "l4", "l2 m3", "m2 l7"] {
            let x = el(s, &ctx);
            let dx = d_element(&x);
            if !dx.is_zero() {
                assert_eq!(dx.degree(), Some(x.degree().unwrap() - 1));
                assert_eq!(dx.length(), Some(x.length().unwrap() + 1));
            }
        }
    }
}
