//! Oracle reports: homotopy of restricted Lie powers of spheres against the
//! lambda algebra, randomized identity checks for Kleisli composition and
//! suspension, and integral torsion of Lie powers.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::homology::{boundary_formula_check, integral_homology, qualifying_elements, AbelianGroup, CoordinateSubmodule, SimplicialModule};
use super::lie::LieComplex;
use super::monad::{kleisli, s_map, tau, yoneda, Applied, Compose, FreeGroup, Functor, LinComb, LinearFp, Monad, SimplicialObject, Susp, SuspElem, Word};
use super::monad::Letter;
use super::sset::{suspension_sphere_iso, FiniteSimplicialSet};
use super::OracleError;
use crate::linalg::SparseVec;
use crate::prime::PrimeContext;
use crate::unstable::{bidegree_basis, UnstableFlavor};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoRow {
    pub m: u32,
    pub oracle_dim: usize,
    pub lambda_dim: usize,
    pub matches: bool,
}

/// `dim π_m L^[p]_{p^l}[S^{2n}]` against `dim Λ(n)_{m−2n, l}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoReport {
    pub p: u32,
    pub n: u32,
    pub l: u32,
    pub max_m: u32,
    pub rows: Vec<IsoRow>,
}

impl IsoReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

impl fmt::Display for IsoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "π_m L^[{p}]_{w}[S^{s}] vs Λ({n})_(m−{s},{l}), p={p}", p = self.p, w = self.p.pow(self.l), s = 2 * self.n, n = self.n, l = self.l)?;
        writeln!(f, "{:>4} {:>8} {:>8}  match", "m", "oracle", "lambda")?;
        for r in &self.rows {
            writeln!(f, "{:>4} {:>8} {:>8}  {}", r.m, r.oracle_dim, r.lambda_dim, if r.matches { "yes" } else { "NO" })?;
        }
        Ok(())
    }
}

/// Compare the simplicial homotopy of `L^[p]_{p^l}[S^{2n}]` with the
/// lambda algebra for `m ≤ max_m`. Only `l ≤ 1` is within reach.
pub fn verify_iso_dims(p: u32, n: u32, l: u32, max_m: u32) -> Result<IsoReport, OracleError> {
    let ctx = PrimeContext::new(p)?;
    if l > 1 {
        return Err(OracleError::CapExceeded(format!("weight {}^{l} is beyond the oracle", p)));
    }
    if n == 0 {
        return Err(OracleError::HypothesisViolated("n ≥ 1 required".into()));
    }
    let weight = p.pow(l) as usize;
    let top = max_m as usize + 1;
    let sphere = FiniteSimplicialSet::sphere(2 * n as usize, top);
    let complex = LieComplex::new(&sphere, weight, Some(p), top)?;
    let mut rows = Vec::new();
    for m in 0..=max_m {
        let oracle_dim = complex.homology_dim(m as usize, &ctx)?;
        let lambda_dim = if m >= 2 * n {
            bidegree_basis(UnstableFlavor::full(n), m - 2 * n, l as usize, &ctx).len()
        } else {
            0
        };
        rows.push(IsoRow {
            m,
            oracle_dim,
            lambda_dim,
            matches: oracle_dim == lambda_dim,
        });
    }
    Ok(IsoReport { p, n, l, max_m, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingRow {
    pub weight: usize,
    pub m: u32,
    pub group: AbelianGroup,
    pub p_torsion: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub p: u32,
    pub sphere: u32,
    pub rows: Vec<VanishingRow>,
}

impl VanishingReport {
    pub fn no_p_torsion(&self) -> bool {
        self.rows.iter().all(|r| !r.p_torsion)
    }
}

impl fmt::Display for VanishingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "π_m L_i[S^{}] over Z, looking for {}-torsion", self.sphere, self.p)?;
        for r in &self.rows {
            let tors: Vec<String> = r.group.torsion.iter().map(|t| format!("Z/{t}")).collect();
            writeln!(f, "i={} m={:>2}  rank {}  torsion [{}]{}", r.weight, r.m, r.group.rank, tors.join(", "), if r.p_torsion { "  <-- p-torsion" } else { "" })?;
        }
        Ok(())
    }
}

/// Integral `π_m L_i[S^n]` for `m ≤ max_m` from the Smith normal form of
/// the normalized boundary matrices.
pub fn vanishing_check(p: u32, sphere: u32, weights: &[usize], max_m: u32) -> Result<VanishingReport, OracleError> {
    let top = max_m as usize + 1;
    let s = FiniteSimplicialSet::sphere(sphere as usize, top);
    let mut rows = Vec::new();
    for &w in weights {
        let c = LieComplex::new(&s, w, None, top)?;
        for m in 0..=max_m as usize {
            let d_m = (m >= 1).then(|| c.boundary_integer(m));
            let d_next = c.boundary_integer(m + 1);
            let group = integral_homology(c.dim(m), d_m.as_deref(), Some(&d_next));
            rows.push(VanishingRow {
                weight: w,
                m: m as u32,
                p_torsion: group.has_p_torsion(p as u64),
                group,
            });
        }
    }
    Ok(VanishingReport { p, sphere, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaResult {
    pub name: String,
    pub statement: String,
    pub trials: usize,
    pub failures: Vec<String>,
}

impl LemmaResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub results: Vec<LemmaResult>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(LemmaResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&LemmaResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identity checks (seed {})", self.seed)?;
        for r in &self.results {
            writeln!(f, "{:<24} {:>5} trials  {}  {}", r.name, r.trials, if r.passed() { "ok  " } else { "FAIL" }, r.statement)?;
            for e in r.failures.iter().take(3) {
                writeln!(f, "    {e}")?;
            }
        }
        Ok(())
    }
}

struct Recorder {
    result: LemmaResult,
}

impl Recorder {
    fn new(name: &str, statement: &str) -> Self {
        Recorder {
            result: LemmaResult {
                name: name.into(),
                statement: statement.into(),
                trials: 0,
                failures: Vec::new(),
            },
        }
    }

    fn trial(&mut self, outcome: Result<(), String>) {
        self.result.trials += 1;
        if let Err(e) = outcome {
            if self.result.failures.len() < 10 {
                self.result.failures.push(format!("trial {}: {e}", self.result.trials));
            }
        }
    }
}

fn expect_eq<T: PartialEq + fmt::Debug>(what: &str, lhs: T, rhs: T) -> Result<(), String> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{what}: {lhs:?} ≠ {rhs:?}"))
    }
}

fn letters(x: &FiniteSimplicialSet, n: usize) -> Vec<usize> {
    (1..x.count(n)).collect()
}

/// A map `Δ[n]⁺ → S`, determined by the image of `i_n`.
struct Yoneda<'a, S: SimplicialObject> {
    target: &'a S,
    disk: &'a FiniteSimplicialSet,
    n: usize,
    image: S::Elem,
}

impl<S: SimplicialObject> Yoneda<'_, S> {
    fn at(&self, m: usize, theta: usize) -> S::Elem {
        yoneda(self.target, self.n, &self.image, self.disk, m, theta)
    }
}

const SMALL_CAP: usize = 6;

fn suspension_kleisli<M: Monad, R: Rng>(monad: &M, rng: &mut R) -> Result<(), String> {
    let (a, b) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x = FiniteSimplicialSet::disk(a, SMALL_CAP);
    let y = FiniteSimplicialSet::disk(b, SMALL_CAP);
    let z = FiniteSimplicialSet::sphere(1 + rng.gen_range(0..2), SMALL_CAP);
    let mz = Applied(monad, &z);
    let my = Applied(monad, &y);
    let f = Yoneda { target: &mz, disk: &y, n: b, image: monad.random(&letters(&z, b), rng) };
    let g = Yoneda { target: &my, disk: &x, n: a, image: monad.random(&letters(&y, a), rng) };
    let smz = Susp(&mz);
    let smy = Susp(&my);
    let sigma_f = |d: usize, e: &SuspElem<usize>| -> M::Of<SuspElem<usize>> {
        let lifted = e.and_then(|(y0, k)| smz.elem(f.at(d - k, y0), k));
        s_map(monad, &z, d, &lifted)
    };
    for d in 1..=4 {
        for k in 1..=d {
            for x0 in 1..x.count(d - k) {
                let gx = smy.elem(g.at(d - k, x0), k);
                let sigma_g = s_map(monad, &y, d, &gx);
                let lhs = kleisli(monad, &|e: &SuspElem<usize>| sigma_f(d, e), &sigma_g);
                let fg = kleisli(monad, &|y0: &usize| f.at(d - k, *y0), &g.at(d - k, x0));
                let rhs = s_map(monad, &z, d, &smz.elem(fg, k));
                expect_eq(&format!("at ({x0},{k}) in degree {d}"), lhs, rhs)?;
            }
        }
    }
    Ok(())
}

fn sparse_to_lin(v: &SparseVec) -> LinComb<usize> {
    LinComb(v.entries().iter().map(|&(j, c)| (j as usize + 1, c)).collect())
}

/// Both displayed equalities for `a ⊙ τ s x`.
fn tau_checks<R: Rng>(lin: &LinearFp, rng: &mut R) -> (Result<(), String>, Result<(), String>) {
    let ctx = lin.ctx().clone();
    let n = rng.gen_range(1..=2usize);
    let m = rng.gen_range(n..=n + 2);
    let cap = m + 2;
    let sn = FiniteSimplicialSet::sphere(n, cap);
    let sn1 = FiniteSimplicialSet::sphere(n + 1, cap + 1);
    let sigma = sn.suspension();
    let iso = suspension_sphere_iso(n, &sigma, &sn1);
    let dn = FiniteSimplicialSet::disk(n, cap);
    let dn1 = FiniteSimplicialSet::disk(n + 1, cap + 1);
    let z = FiniteSimplicialSet::disk(n + 2, cap + 1);
    let zmod = SimplicialModule::linearize(&z);
    let ker = zmod.joint_kernel(n + 1, 0..=n, &ctx);
    let mut a = SparseVec::new();
    for v in &ker {
        a = a.add_scaled(v, rng.gen_range(0..ctx.p()), &ctx);
    }
    let a = sparse_to_lin(&a);
    let big_a = Applied(lin, &z);
    let msn = Applied(lin, &sn);
    let x = lin.random(&letters(&sn, m), rng);
    // s: M(S^n)_k → M(S^{n+1})_{k+1}, through s' and ΣS^n ≅ S^{n+1}
    let bold_s = |k: usize, v: &LinComb<usize>| -> LinComb<usize> {
        let raised = s_map(lin, &sn, k + 1, &Susp(&msn).elem(v.clone(), 1));
        lin.fmap(&raised, &|e: &SuspElem<usize>| {
            let (y, j) = (*e)?;
            let idx = sigma.find(k + 1, &[j, y]).expect("simplex of ΣS^n");
            Some(iso.apply(k + 1, idx))
        })
    };
    let tau_lin = |sphere: &FiniteSimplicialSet, disk: &FiniteSimplicialSet, k: usize, v: &LinComb<usize>| {
        lin.fmap(v, &|y: &usize| Some(tau(sphere, disk, k, *y)))
    };
    let odot = |a: &LinComb<usize>, deg_a: usize, disk: &FiniteSimplicialSet, k: usize, v: &LinComb<usize>| {
        let f = Yoneda { target: &big_a, disk, n: deg_a, image: a.clone() };
        kleisli(lin, &|t: &usize| f.at(k, *t), v)
    };
    let whole = odot(&a, n + 1, &dn1, m + 1, &tau_lin(&sn1, &dn1, m + 1, &bold_s(m, &x)));
    let faces = (|| {
        for i in 0..=m {
            let lhs = big_a.face(m + 1, &whole, i);
            let dx = msn.face(m, &x, i);
            let rhs = odot(&a, n + 1, &dn1, m, &tau_lin(&sn1, &dn1, m, &bold_s(m - 1, &dx)));
            expect_eq(&format!("d_{i}, n={n}, m={m}"), lhs, rhs)?;
        }
        Ok(())
    })();
    let top = {
        let lhs = big_a.face(m + 1, &whole, m + 1);
        let da = big_a.face(n + 1, &a, n + 1);
        let rhs = odot(&da, n, &dn, m, &tau_lin(&sn, &dn, m, &x));
        expect_eq(&format!("top face, n={n}, m={m}"), lhs, rhs)
    };
    (faces, top)
}

fn suspension_composite<R: Rng>(lin: &LinearFp, rng: &mut R) -> Result<(), String> {
    let x = FiniteSimplicialSet::sphere(1 + rng.gen_range(0..2), SMALL_CAP);
    let mx = Applied(lin, &x);
    let nm = Compose(lin, lin);
    for d in 2..=5 {
        for k in 1..d {
            let inner: Vec<LinComb<usize>> = (0..3)
                .map(|_| lin.random(&letters(&x, d - k), rng))
                .filter(|v| !v.0.is_empty())
                .collect();
            let w = lin.random(&inner, rng);
            let e = Susp(&Applied(lin, &mx)).elem(w, k);
            let lhs = s_map(&nm, &x, d, &e);
            let step = s_map(lin, &mx, d, &e);
            let rhs = lin.fmap(&step, &|xi: &SuspElem<LinComb<usize>>| {
                let v = s_map(lin, &x, d, xi);
                (!v.0.is_empty()).then_some(v)
            });
            expect_eq(&format!("degree {d}, k={k}"), lhs, rhs)?;
        }
    }
    Ok(())
}

/// Abelianization mod p, the weight-one truncation `F[−] → F_p[−]`.
fn abelianize<T: Letter>(lin: &LinearFp, w: &Word<T>) -> LinComb<T> {
    let p = lin.ctx().p();
    lin.collect(w.0.iter().map(|(x, inv)| (x.clone(), if *inv { p - 1 } else { 1 })))
}

/// `φΣ ∘ s^F = s^{F_p} ∘ Σφ` for the monad morphism `φ = abelianize`.
fn s_map_naturality<R: Rng>(lin: &LinearFp, rng: &mut R) -> Result<(), String> {
    let x = if rng.gen_bool(0.5) {
        FiniteSimplicialSet::sphere(1 + rng.gen_range(0..2), SMALL_CAP)
    } else {
        FiniteSimplicialSet::disk(rng.gen_range(1..3), SMALL_CAP)
    };
    for d in 1..=5 {
        for k in 1..=d {
            let w = FreeGroup.random(&letters(&x, d - k), rng);
            let e = Susp(&Applied(&FreeGroup, &x)).elem(w.clone(), k);
            let lhs = abelianize(lin, &s_map(&FreeGroup, &x, d, &e));
            let e_ab = Susp(&Applied(lin, &x)).elem(abelianize(lin, &w), k);
            let rhs = s_map(lin, &x, d, &e_ab);
            expect_eq(&format!("degree {d}, k={k}, word {w:?}"), lhs, rhs)?;
        }
    }
    Ok(())
}

/// Naturality in the source, naturality in the algebra, the action on
/// simplices, right distributivity and associativity, for one monad.
fn kleisli_identities<M: Monad, R: Rng>(monad: &M, rng: &mut R, rec: &mut [Recorder; 5]) {
    let (a, b, c) = (rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x = FiniteSimplicialSet::disk(a, SMALL_CAP);
    let y = FiniteSimplicialSet::disk(b, SMALL_CAP);
    let z = FiniteSimplicialSet::disk(1, SMALL_CAP);
    let z2 = FiniteSimplicialSet::sphere(2, SMALL_CAP);
    let w = FiniteSimplicialSet::disk(c, SMALL_CAP);
    let (mx, my, mz, mz2) = (Applied(monad, &x), Applied(monad, &y), Applied(monad, &z), Applied(monad, &z2));
    let f = Yoneda { target: &mz, disk: &y, n: b, image: monad.random(&letters(&z, b), rng) };
    let g = Yoneda { target: &my, disk: &x, n: a, image: monad.random(&letters(&y, a), rng) };
    let g2 = Yoneda { target: &my, disk: &x, n: a, image: monad.random(&letters(&y, a), rng) };
    let h = Yoneda { target: &mx, disk: &w, n: c, image: monad.random(&letters(&x, c), rng) };
    let u = Yoneda { target: &mz2, disk: &z, n: 1, image: monad.random(&letters(&z2, 1), rng) };
    let fg = |d: usize, x0: usize| kleisli(monad, &|y0: &usize| f.at(d, *y0), &g.at(d, x0));
    let alpha = |d: usize, v: &M::Of<usize>| kleisli(monad, &|z0: &usize| u.at(d, *z0), v);

    // source naturality: precompose with h0: Δ[c]⁺ → X
    let h0 = rng.gen_range(1..x.count(c));
    let h_simp = Yoneda { target: &x, disk: &w, n: c, image: h0 };
    let gh = Yoneda { target: &my, disk: &w, n: c, image: g.at(c, h0) };
    rec[0].trial((|| {
        for d in 0..=4 {
            for t in 1..w.count(d) {
                let lhs = fg(d, h_simp.at(d, t));
                let rhs = kleisli(monad, &|y0: &usize| f.at(d, *y0), &gh.at(d, t));
                expect_eq(&format!("source at {t} in degree {d}"), lhs, rhs)?;
            }
        }
        Ok(())
    })());
    rec[1].trial((|| {
        for d in 0..=4 {
            for x0 in 1..x.count(d) {
                let lhs = alpha(d, &fg(d, x0));
                let rhs = kleisli(monad, &|y0: &usize| alpha(d, &f.at(d, *y0)), &g.at(d, x0));
                expect_eq(&format!("algebra at {x0} in degree {d}"), lhs, rhs)?;
            }
        }
        Ok(())
    })());
    rec[2].trial((|| {
        let act = |d: usize, v: &M::Of<usize>| kleisli(monad, &|y0: &usize| f.at(d, *y0), v);
        for d in 0..=4 {
            let v = monad.random(&letters(&y, d), rng);
            for i in 0..=d {
                if d >= 1 {
                    expect_eq(&format!("d_{i} in degree {d}"), mz.face(d, &act(d, &v), i), act(d - 1, &my.face(d, &v, i)))?;
                }
                expect_eq(&format!("s_{i} in degree {d}"), mz.degen(d, &act(d, &v), i), act(d + 1, &my.degen(d, &v, i)))?;
            }
            for y0 in 1..y.count(d) {
                expect_eq("unit", act(d, &monad.unit(Some(y0))), f.at(d, y0))?;
            }
            let inner: Vec<M::Of<usize>> = (0..3).map(|_| monad.random(&letters(&y, d), rng)).filter(|e| *e != monad.trivial()).collect();
            let big = monad.random(&inner, rng);
            let lhs = act(d, &monad.join(&big));
            let rhs = monad.join(&monad.fmap(&big, &|e: &M::Of<usize>| {
                let v = act(d, e);
                (v != monad.trivial()).then_some(v)
            }));
            expect_eq(&format!("algebra map in degree {d}"), lhs, rhs)?;
        }
        Ok(())
    })());
    rec[3].trial((|| {
        for d in 0..=4 {
            for x0 in 1..x.count(d) {
                let prod = monad.mul(&g.at(d, x0), &g2.at(d, x0));
                let lhs = kleisli(monad, &|y0: &usize| f.at(d, *y0), &prod);
                let fg2 = kleisli(monad, &|y0: &usize| f.at(d, *y0), &g2.at(d, x0));
                expect_eq(&format!("at {x0} in degree {d}"), lhs, monad.mul(&fg(d, x0), &fg2))?;
            }
        }
        Ok(())
    })());
    rec[4].trial((|| {
        for d in 0..=4 {
            for t in 1..w.count(d) {
                let lhs = kleisli(monad, &|x0: &usize| fg(d, *x0), &h.at(d, t));
                let gh = kleisli(monad, &|x0: &usize| g.at(d, *x0), &h.at(d, t));
                let rhs = kleisli(monad, &|y0: &usize| f.at(d, *y0), &gh);
                expect_eq(&format!("at {t} in degree {d}"), lhs, rhs)?;
            }
        }
        Ok(())
    })());
}

/// A random ordered simplicial complex on five vertices of dimension ≤ 3
/// and a random subcomplex, both with a disjoint basepoint.
fn random_pair<R: Rng>(rng: &mut R, cap: usize) -> (FiniteSimplicialSet, CoordinateSubmodule) {
    let mut facets = Vec::new();
    for _ in 0..rng.gen_range(2..=4) {
        let size = rng.gen_range(2..=4);
        let mut f: Vec<usize> = (0..5).collect();
        for i in (1..f.len()).rev() {
            f.swap(i, rng.gen_range(0..=i));
        }
        f.truncate(size);
        f.sort_unstable();
        facets.push(f);
    }
    let x = FiniteSimplicialSet::complex("K⁺", &facets, cap);
    // subcomplex: the closure of a random set of faces
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for f in &facets {
        for mask in 1u32..(1 << f.len()) {
            if rng.gen_bool(0.3) {
                kept.push(f.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v).collect());
            }
        }
    }
    let h = CoordinateSubmodule::from_subset(&x, |n, s| {
        let mut k = x.key(n, s).to_vec();
        k.dedup();
        kept.iter().any(|f| k.iter().all(|v| f.contains(v)))
    });
    (x, h)
}

fn boundary_formula_trial<R: Rng>(ctx: &PrimeContext, rng: &mut R) -> Result<(), String> {
    loop {
        let (x, h) = random_pair(rng, 4);
        let g = SimplicialModule::linearize(&x);
        if !h.is_simplicial(&g, ctx) {
            return Err("subcomplex is not simplicial".into());
        }
        let n = rng.gen_range(1..=3);
        let space = qualifying_elements(&g, &h, n, ctx);
        if space.is_empty() {
            continue;
        }
        let mut elem = SparseVec::new();
        for v in &space {
            elem = elem.add_scaled(v, rng.gen_range(0..ctx.p()), ctx);
        }
        let r = boundary_formula_check(&g, &h, n, &elem, ctx).map_err(|e| e.to_string())?;
        return if r.equal {
            Ok(())
        } else {
            Err(format!("n={n}: δ = {:?}, alternating sum = {:?}", r.connecting, r.alternating))
        };
    }
}

/// Every randomized identity check, `trials` times each.
pub fn lemma_checks(seed: u64, trials: usize) -> LemmaReport {
    let ctx = PrimeContext::new(3).expect("3 is prime");
    let lin = LinearFp::new(&ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();

    let mut r = Recorder::new("suspension-kleisli", "σf ⊙ σg = σ(f ⊙ g), free group and F_3-linear");
    for t in 0..trials {
        if t % 2 == 0 {
            r.trial(suspension_kleisli(&lin, &mut rng));
        } else {
            r.trial(suspension_kleisli(&FreeGroup, &mut rng));
        }
    }
    results.push(r.result);

    let mut faces = Recorder::new("tau-faces", "d_i(a ⊙ τ s x) = a ⊙ τ s d_i x for i ≤ m");
    let mut top = Recorder::new("tau-top-face", "d_{m+1}(a ⊙ τ s x) = d_{n+1}a ⊙ τ x");
    for _ in 0..trials {
        let (a, b) = tau_checks(&lin, &mut rng);
        faces.trial(a);
        top.trial(b);
    }
    results.push(faces.result);
    results.push(top.result);

    let mut r = Recorder::new("suspension-composite", "s^{NM} = N s^M ∘ s^N M with N = M = F_3[−]");
    for _ in 0..trials {
        r.trial(suspension_composite(&lin, &mut rng));
    }
    results.push(r.result);

    let mut r = Recorder::new("s-map-naturality", "φΣ ∘ s^F = s^{F_3} ∘ Σφ for abelianization φ: F[−] → F_3[−]");
    for _ in 0..trials {
        r.trial(s_map_naturality(&lin, &mut rng));
    }
    results.push(r.result);

    let mut recs = [
        Recorder::new("naturality-source", "(f ⊙ g) ∘ h = f ⊙ (g ∘ h)"),
        Recorder::new("naturality-algebra", "α ∘ (f ⊙ g) = (α ∘ f) ⊙ g for an algebra map α"),
        Recorder::new("action-simplicial", "f ⊙ − commutes with d_i, s_i, the unit and the monad action"),
        Recorder::new("right-distributivity", "f ⊙ (g₁ · g₂) = (f ⊙ g₁) · (f ⊙ g₂)"),
        Recorder::new("associativity", "(f ⊙ g) ⊙ h = f ⊙ (g ⊙ h)"),
    ];
    for t in 0..trials {
        if t % 2 == 0 {
            kleisli_identities(&lin, &mut rng, &mut recs);
        } else {
            kleisli_identities(&FreeGroup, &mut rng, &mut recs);
        }
    }
    results.extend(recs.into_iter().map(|r| r.result));

    let mut r = Recorder::new("boundary-formula", "δ[gH] = Σ (−1)^i [d_i g] for modules H ⊆ G over F_3");
    for _ in 0..trials {
        r.trial(boundary_formula_trial(&ctx, &mut rng));
    }
    results.push(r.result);

    LemmaReport { seed, results }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iso_on_s2_small() {
        let r = verify_iso_dims(3, 1, 1, 7).unwrap();
        assert!(r.all_match(), "{r}");
        let dims: Vec<usize> = r.rows.iter().map(|x| x.oracle_dim).collect();
        assert_eq!(dims, vec![0, 0, 1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn weight_one_is_the_fundamental_class() {
        let r = verify_iso_dims(3, 1, 0, 6).unwrap();
        assert!(r.all_match(), "{r}");
        assert_eq!(r.rows.iter().filter(|x| x.oracle_dim == 1).map(|x| x.m).collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn lemma_checks_pass_briefly() {
        let r = lemma_checks(1, 6);
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn zero_a_gives_zero_sides() {
        let ctx = PrimeContext::new(3).unwrap();
        let lin = LinearFp::new(&ctx);
        let z = FiniteSimplicialSet::disk(3, 5);
        let big_a = Applied(&lin, &z);
        let dn1 = FiniteSimplicialSet::disk(2, 5);
        let f = Yoneda { target: &big_a, disk: &dn1, n: 2, image: lin.trivial() };
        let v = lin.random(&letters(&dn1, 3), &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(kleisli(&lin, &|t: &usize| f.at(3, *t), &v), lin.trivial());
    }
}
