//! Monads on pointed sets, extended degreewise to simplicial objects:
//! the free group `F[−]` and linearization `F_p[−]`. Also the
//! suspension `Σ`, the transformation `s^M: ΣM → MΣ`, the section `τ`, and
//! Kleisli composition.

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sset::{operator_ops, FiniteSimplicialSet, Op};
use crate::prime::PrimeContext;

/// What the monads act on: anything comparable and hashable.
pub trait Letter: Clone + Eq + Ord + Hash + Debug {}
impl<T: Clone + Eq + Ord + Hash + Debug> Letter for T {}

/// Which monad an oracle computation used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "monad")]
pub enum MonadTag {
    FreeGroup,
    LinearFp { p: u32 },
    LiePower { weight: usize },
    RestrictedLiePower { p: u32, weight: usize },
}

/// A simplicial object given by its faces and degeneracies on elements.
pub trait SimplicialObject {
    type Elem: Letter;
    fn face(&self, n: usize, x: &Self::Elem, i: usize) -> Self::Elem;
    fn degen(&self, n: usize, x: &Self::Elem, i: usize) -> Self::Elem;
    fn base(&self) -> Self::Elem;

    fn apply(&self, n: usize, x: &Self::Elem, ops: &[Op]) -> Self::Elem {
        let mut deg = n;
        let mut cur = x.clone();
        for op in ops {
            match *op {
                Op::Face(i) => {
                    cur = self.face(deg, &cur, i);
                    deg -= 1;
                }
                Op::Degen(i) => {
                    cur = self.degen(deg, &cur, i);
                    deg += 1;
                }
            }
        }
        cur
    }

    /// `None` for the basepoint.
    fn nonbase(&self, x: Self::Elem) -> Option<Self::Elem> {
        (x != self.base()).then_some(x)
    }
}

impl SimplicialObject for FiniteSimplicialSet {
    type Elem = usize;

    fn face(&self, n: usize, x: &usize, i: usize) -> usize {
        FiniteSimplicialSet::face(self, n, *x, i).expect("within the degree cap")
    }

    fn degen(&self, n: usize, x: &usize, i: usize) -> usize {
        FiniteSimplicialSet::degen(self, n, *x, i).expect("within the degree cap")
    }

    fn base(&self) -> usize {
        0
    }
}

/// A functor on pointed sets with `M(∗) = ∗`.
pub trait Functor {
    type Of<T: Letter>: Letter;
    fn trivial<T: Letter>(&self) -> Self::Of<T>;
    /// Apply a pointed map; `None` is the basepoint.
    fn fmap<T: Letter, U: Letter>(&self, a: &Self::Of<T>, f: &dyn Fn(&T) -> Option<U>) -> Self::Of<U>;
}

/// A monad whose values are groups.
pub trait Monad: Functor {
    fn unit<T: Letter>(&self, x: Option<T>) -> Self::Of<T>;
    fn join<T: Letter>(&self, a: &Self::Of<Self::Of<T>>) -> Self::Of<T>;
    fn mul<T: Letter>(&self, a: &Self::Of<T>, b: &Self::Of<T>) -> Self::Of<T>;
    fn inverse<T: Letter>(&self, a: &Self::Of<T>) -> Self::Of<T>;
    fn tag(&self) -> MonadTag;
    /// A random element with letters drawn from `letters`.
    fn random<T: Letter, R: Rng>(&self, letters: &[T], rng: &mut R) -> Self::Of<T>;
}

/// Reduced word: letters with an inverse flag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word<T>(pub Vec<(T, bool)>);

impl<T: Letter> Word<T> {
    /// Free reduction of an arbitrary word.
    pub fn reduced(letters: impl IntoIterator<Item = (T, bool)>) -> Self {
        let mut out: Vec<(T, bool)> = Vec::new();
        for (x, inv) in letters {
            if out.last().is_some_and(|(y, j)| *y == x && *j != inv) {
                out.pop();
            } else {
                out.push((x, inv));
            }
        }
        Word(out)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FreeGroup;

impl Functor for FreeGroup {
    type Of<T: Letter> = Word<T>;

    fn trivial<T: Letter>(&self) -> Word<T> {
        Word(Vec::new())
    }

    fn fmap<T: Letter, U: Letter>(&self, a: &Word<T>, f: &dyn Fn(&T) -> Option<U>) -> Word<U> {
        Word::reduced(a.0.iter().filter_map(|(x, inv)| f(x).map(|y| (y, *inv))))
    }
}

impl Monad for FreeGroup {
    fn unit<T: Letter>(&self, x: Option<T>) -> Word<T> {
        Word(x.into_iter().map(|x| (x, false)).collect())
    }

    /// Concatenation of strings of strings.
    fn join<T: Letter>(&self, a: &Word<Word<T>>) -> Word<T> {
        let mut flat = Vec::new();
        for (w, inv) in &a.0 {
            if *inv {
                flat.extend(self.inverse(w).0);
            } else {
                flat.extend(w.0.iter().cloned());
            }
        }
        Word::reduced(flat)
    }

    fn mul<T: Letter>(&self, a: &Word<T>, b: &Word<T>) -> Word<T> {
        Word::reduced(a.0.iter().chain(b.0.iter()).cloned())
    }

    fn inverse<T: Letter>(&self, a: &Word<T>) -> Word<T> {
        Word(a.0.iter().rev().map(|(x, inv)| (x.clone(), !inv)).collect())
    }

    fn tag(&self) -> MonadTag {
        MonadTag::FreeGroup
    }

    fn random<T: Letter, R: Rng>(&self, letters: &[T], rng: &mut R) -> Word<T> {
        if letters.is_empty() {
            return self.trivial();
        }
        let len = rng.gen_range(0..=4);
        Word::reduced((0..len).map(|_| (letters[rng.gen_range(0..letters.len())].clone(), rng.gen_bool(0.5))))
    }
}

/// Finite `F_p`-linear combination, sorted, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinComb<T>(pub Vec<(T, u32)>);

#[derive(Debug, Clone)]
pub struct LinearFp {
    ctx: PrimeContext,
}

impl LinearFp {
    pub fn new(ctx: &PrimeContext) -> Self {
        LinearFp { ctx: ctx.clone() }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn collect<T: Letter>(&self, terms: impl IntoIterator<Item = (T, u32)>) -> LinComb<T> {
        let mut v: Vec<(T, u32)> = terms.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(T, u32)> = Vec::with_capacity(v.len());
        for (x, c) in v {
            match out.last_mut() {
                Some((y, d)) if *y == x => *d = self.ctx.add(*d, c),
                _ => out.push((x, c)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        LinComb(out)
    }

    pub fn scale<T: Letter>(&self, a: &LinComb<T>, c: u32) -> LinComb<T> {
        self.collect(a.0.iter().map(|(x, d)| (x.clone(), self.ctx.mul(*d, c))))
    }
}

impl Functor for LinearFp {
    type Of<T: Letter> = LinComb<T>;

    fn trivial<T: Letter>(&self) -> LinComb<T> {
        LinComb(Vec::new())
    }

    fn fmap<T: Letter, U: Letter>(&self, a: &LinComb<T>, f: &dyn Fn(&T) -> Option<U>) -> LinComb<U> {
        self.collect(a.0.iter().filter_map(|(x, c)| f(x).map(|y| (y, *c))))
    }
}

impl Monad for LinearFp {
    fn unit<T: Letter>(&self, x: Option<T>) -> LinComb<T> {
        LinComb(x.into_iter().map(|x| (x, 1)).collect())
    }

    fn join<T: Letter>(&self, a: &LinComb<LinComb<T>>) -> LinComb<T> {
        self.collect(
            a.0.iter()
                .flat_map(|(v, c)| v.0.iter().map(move |(x, d)| (x.clone(), self.ctx.mul(*c, *d)))),
        )
    }

    fn mul<T: Letter>(&self, a: &LinComb<T>, b: &LinComb<T>) -> LinComb<T> {
        self.collect(a.0.iter().chain(b.0.iter()).cloned())
    }

    fn inverse<T: Letter>(&self, a: &LinComb<T>) -> LinComb<T> {
        self.scale(a, self.ctx.p() - 1)
    }

    fn tag(&self) -> MonadTag {
        MonadTag::LinearFp { p: self.ctx.p() }
    }

    fn random<T: Letter, R: Rng>(&self, letters: &[T], rng: &mut R) -> LinComb<T> {
        if letters.is_empty() {
            return self.trivial();
        }
        let len = rng.gen_range(0..=4);
        let p = self.ctx.p();
        self.collect((0..len).map(|_| (letters[rng.gen_range(0..letters.len())].clone(), rng.gen_range(1..p))))
    }
}

/// The composite functor `N M`.
pub struct Compose<'a, N, M>(pub &'a N, pub &'a M);

impl<N: Functor, M: Functor> Functor for Compose<'_, N, M> {
    type Of<T: Letter> = N::Of<M::Of<T>>;

    fn trivial<T: Letter>(&self) -> Self::Of<T> {
        self.0.trivial()
    }

    fn fmap<T: Letter, U: Letter>(&self, a: &Self::Of<T>, f: &dyn Fn(&T) -> Option<U>) -> Self::Of<U> {
        let inner = |b: &M::Of<T>| -> Option<M::Of<U>> {
            let c = self.1.fmap(b, f);
            (c != self.1.trivial()).then_some(c)
        };
        self.0.fmap(a, &inner)
    }
}

/// `M X` as a simplicial object: faces and degeneracies act on letters.
pub struct Applied<'a, F, S>(pub &'a F, pub &'a S);

impl<F: Functor, S: SimplicialObject> SimplicialObject for Applied<'_, F, S> {
    type Elem = F::Of<S::Elem>;

    fn face(&self, n: usize, a: &Self::Elem, i: usize) -> Self::Elem {
        self.0.fmap(a, &|x| self.1.nonbase(self.1.face(n, x, i)))
    }

    fn degen(&self, n: usize, a: &Self::Elem, i: usize) -> Self::Elem {
        self.0.fmap(a, &|x| self.1.nonbase(self.1.degen(n, x, i)))
    }

    fn base(&self) -> Self::Elem {
        self.0.trivial()
    }
}

/// `ΣX`: `(x, k)` with `x ∈ X_{n−k}`; `None` is the basepoint.
pub struct Susp<'a, S>(pub &'a S);

pub type SuspElem<T> = Option<(T, usize)>;

impl<S: SimplicialObject> Susp<'_, S> {
    /// `(x, k)` with the identifications applied.
    pub fn elem(&self, x: S::Elem, k: usize) -> SuspElem<S::Elem> {
        (k >= 1 && x != self.0.base()).then_some((x, k))
    }
}

impl<S: SimplicialObject> SimplicialObject for Susp<'_, S> {
    type Elem = SuspElem<S::Elem>;

    fn face(&self, n: usize, e: &Self::Elem, i: usize) -> Self::Elem {
        let (x, k) = e.as_ref()?;
        let k = *k;
        if i <= n - k {
            if n == k {
                None
            } else {
                self.elem(self.0.face(n - k, x, i), k)
            }
        } else {
            self.elem(x.clone(), k - 1)
        }
    }

    fn degen(&self, n: usize, e: &Self::Elem, i: usize) -> Self::Elem {
        let (x, k) = e.as_ref()?;
        let k = *k;
        if i <= n - k {
            self.elem(self.0.degen(n - k, x, i), k)
        } else {
            self.elem(x.clone(), k + 1)
        }
    }

    fn base(&self) -> Self::Elem {
        None
    }
}

/// `s^M_X: ΣMX → MΣX` at `(a, k) ∈ (ΣMX)_n`, built as `Φ(id)`: the
/// collection `M H` with `H(x) = (x, 1)`, extended to `k > 1` by the
/// degeneracies `s_{n−k+1}, …, s_{n−1}`.
pub fn s_map<F: Functor, S: SimplicialObject>(
    functor: &F,
    x: &S,
    n: usize,
    e: &SuspElem<F::Of<S::Elem>>,
) -> F::Of<SuspElem<S::Elem>> {
    let Some((a, k)) = e else { return functor.trivial() };
    let sx = Susp(x);
    let h = functor.fmap(a, &|y| sx.elem(y.clone(), 1).map(Some));
    let target = Applied(functor, &sx);
    let ops: Vec<Op> = (n - k + 1..n).map(Op::Degen).collect();
    target.apply(n - k + 1, &h, &ops)
}

/// Kleisli composition at one simplex: `m^A ∘ Mf` applied to `g(y)`,
/// for the free algebra `A = MZ`.
pub fn kleisli<M: Monad, X: Letter, Z: Letter>(
    monad: &M,
    f: &dyn Fn(&X) -> M::Of<Z>,
    gy: &M::Of<X>,
) -> M::Of<Z> {
    let lifted = monad.fmap(gy, &|x| {
        let v = f(x);
        (v != monad.trivial()).then_some(v)
    });
    monad.join(&lifted)
}

/// The map `Δ[n]⁺ → S` sending `i_n` to `a`, at `θ ∈ (Δ[n]⁺)_m`.
pub fn yoneda<S: SimplicialObject>(s: &S, n: usize, a: &S::Elem, disk: &FiniteSimplicialSet, m: usize, theta: usize) -> S::Elem {
    if theta == 0 {
        return s.base();
    }
    s.apply(n, a, &operator_ops(disk.key(m, theta), n))
}

/// `τ: (S^n)_m → (Δ[n]⁺)_m`, sending `s_{i_1}⋯s_{i_{m−n}} i_n` to the same
/// word in `Δ[n]⁺`. Keys coincide, so this is a relabeling.
pub fn tau(sphere: &FiniteSimplicialSet, disk: &FiniteSimplicialSet, m: usize, x: usize) -> usize {
    if x == 0 {
        return 0;
    }
    disk.find(m, sphere.key(m, x)).expect("surjections are monotone maps")
}

/// `pr_m: (Δ[n]⁺)_m → (S^n)_m`.
pub fn projection(disk: &FiniteSimplicialSet, sphere: &FiniteSimplicialSet, m: usize, x: usize) -> usize {
    if x == 0 {
        return 0;
    }
    sphere.find(m, disk.key(m, x)).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn free_group_reduction_and_join() {
        let w = Word::reduced([(1, false), (2, false), (2, true), (3, false)]);
        assert_eq!(w, Word(vec![(1, false), (3, false)]));
        let g = FreeGroup;
        let ww = Word(vec![(w.clone(), false), (w.clone(), true)]);
        assert_eq!(g.join(&ww), g.trivial());
    }

    #[test]
    fn s_map_is_simplicial() {
        let ctx = PrimeContext::new(3).unwrap();
        let lin = LinearFp::new(&ctx);
        let x = FiniteSimplicialSet::sphere(2, 6);
        let mx = Applied(&lin, &x);
        let smx = Susp(&mx);
        let msx = Applied(&lin, &Susp(&x));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=5 {
            for k in 1..=n - 2 {
                let letters: Vec<usize> = (1..x.count(n - k)).collect();
                let a = lin.random(&letters, &mut rng);
                let e = smx.elem(a, k);
                let se = s_map(&lin, &x, n, &e);
                for i in 0..=n {
                    assert_eq!(msx.face(n, &se, i), s_map(&lin, &x, n - 1, &smx.face(n, &e, i)));
                    assert_eq!(msx.degen(n, &se, i), s_map(&lin, &x, n + 1, &smx.degen(n, &e, i)));
                }
            }
        }
    }

    #[test]
    fn tau_is_a_section_commuting_with_degeneracies_but_not_faces() {
        let s2 = FiniteSimplicialSet::sphere(2, 6);
        let d2 = FiniteSimplicialSet::disk(2, 6);
        for m in 2..=6 {
            for x in 0..s2.count(m) {
                let t = tau(&s2, &d2, m, x);
                assert_eq!(projection(&d2, &s2, m, t), x);
                if m < 6 {
                    for i in 0..=m {
                        let lhs = tau(&s2, &d2, m + 1, s2.degen(m, x, i).unwrap());
                        assert_eq!(lhs, d2.degen(m, t, i).unwrap());
                    }
                }
            }
        }
        // d_0 i_2 is the basepoint in S^2 but an edge in Δ[2]⁺
        let i2 = s2.find(2, &[0, 1, 2]).unwrap();
        assert_eq!(tau(&s2, &d2, 1, s2.face(2, i2, 0).unwrap()), 0);
        assert_ne!(d2.face(2, tau(&s2, &d2, 2, i2), 0).unwrap(), 0);
    }

    #[test]
    fn tau_on_a_degenerate_simplex() {
        let s2 = FiniteSimplicialSet::sphere(2, 4);
        let d2 = FiniteSimplicialSet::disk(2, 4);
        let i2 = s2.find(2, &[0, 1, 2]).unwrap();
        let y = s2.apply(2, i2, &[Op::Degen(0), Op::Degen(1)]).unwrap().1;
        let di2 = d2.find(2, &[0, 1, 2]).unwrap();
        let z = d2.apply(2, di2, &[Op::Degen(0), Op::Degen(1)]).unwrap().1;
        assert_eq!(tau(&s2, &d2, 4, y), z);
    }
}
