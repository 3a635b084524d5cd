//! Free Lie and restricted Lie powers inside the tensor algebra: Lyndon
//! words, their standard bracketings, the Witt formula, and the normalized
//! chain complex of `L_i[X]` or `L^[p]_i[X]` for a finite simplicial set.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::sset::FiniteSimplicialSet;
use super::OracleError;
use crate::linalg::{Echelon, SparseVec};
use crate::prime::PrimeContext;

/// `w` is Lyndon: strictly smaller than each of its proper suffixes.
pub fn is_lyndon(w: &[u32]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u32]) -> (&[u32], &[u32]) {
    let cut = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("Lyndon words of length ≥ 2 factor");
    w.split_at(cut)
}

/// Tensor expansion of the standard bracketing `P(w)` with integer
/// coefficients.
pub fn bracket_expansion(w: &[u32]) -> Vec<(Vec<u32>, i64)> {
    if w.len() == 1 {
        return vec![(w.to_vec(), 1)];
    }
    let (u, v) = standard_factorization(w);
    commutator(&bracket_expansion(u), &bracket_expansion(v))
}

/// `[a, b] = ab − ba` on tensor polynomials.
pub fn commutator(a: &[(Vec<u32>, i64)], b: &[(Vec<u32>, i64)]) -> Vec<(Vec<u32>, i64)> {
    let mut acc: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
    for (x, c) in a {
        for (y, d) in b {
            let mut xy = x.clone();
            xy.extend_from_slice(y);
            *acc.entry(xy).or_default() += c * d;
            let mut yx = y.clone();
            yx.extend_from_slice(x);
            *acc.entry(yx).or_default() -= c * d;
        }
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// Distinct Lyndon words whose letters are the multiset `content`.
pub fn lyndon_words_with_content(content: &[u32]) -> Vec<Vec<u32>> {
    let mut letters = content.to_vec();
    letters.sort_unstable();
    let mut out = Vec::new();
    // Lyndon words start with their smallest letter
    permutations_of_multiset(&letters, &mut Vec::new(), &mut vec![false; letters.len()], &mut out);
    out.retain(|w| is_lyndon(w));
    out
}

fn permutations_of_multiset(sorted: &[u32], cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
    if cur.len() == sorted.len() {
        out.push(cur.clone());
        return;
    }
    for i in 0..sorted.len() {
        if used[i] || (i > 0 && sorted[i] == sorted[i - 1] && !used[i - 1]) {
            continue;
        }
        if cur.is_empty() && sorted[i] != sorted[0] {
            break;
        }
        used[i] = true;
        cur.push(sorted[i]);
        permutations_of_multiset(sorted, cur, used, out);
        cur.pop();
        used[i] = false;
    }
}

/// All Lyndon words of length `i` on `0..d`.
pub fn lyndon_words(d: u32, i: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; i];
    loop {
        if is_lyndon(&cur) {
            out.push(cur.clone());
        }
        let mut j = i;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if cur[j] + 1 < d {
                cur[j] += 1;
                for c in cur.iter_mut().skip(j + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

fn mobius(n: usize) -> i64 {
    let (mut n, mut result, mut f) = (n, 1i64, 2usize);
    while f * f <= n {
        if n % f == 0 {
            n /= f;
            if n % f == 0 {
                return 0;
            }
            result = -result;
        }
        f += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Witt formula: `dim L_i(V) = (1/i) Σ_{k | i} μ(k) d^{i/k}`.
pub fn witt_dimension(d: usize, i: usize) -> usize {
    assert!(i >= 1);
    let sum: i128 = (1..=i)
        .filter(|k| i.is_multiple_of(*k))
        .map(|k| mobius(k) as i128 * (d as i128).pow((i / k) as u32))
        .sum();
    (sum / i as i128) as usize
}

/// `dim L^[p]_i(V)`: Lyndon brackets plus iterated `p`-th powers.
pub fn restricted_dimension(d: usize, i: usize, p: usize) -> usize {
    let mut total = witt_dimension(d, i);
    let mut j = i;
    while j.is_multiple_of(p) {
        j /= p;
        total += witt_dimension(d, j);
    }
    total
}

/// One basis element of `L^[p]_i(V)`: a Lyndon bracket raised to the
/// `p^frobenius`-th power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LieBasisElement {
    pub word: Vec<u32>,
    pub frobenius: u32,
}

/// Basis descriptors for `L_i(V)` (`p = None`) or `L^[p]_i(V)`, `dim V = d`.
pub fn lie_power_basis(d: u32, i: usize, p: Option<u32>) -> Vec<LieBasisElement> {
    let mut out: Vec<LieBasisElement> = lyndon_words(d, i).into_iter().map(|word| LieBasisElement { word, frobenius: 0 }).collect();
    if let Some(p) = p {
        let (mut j, mut f) = (i, 0);
        while j % p as usize == 0 {
            j /= p as usize;
            f += 1;
            out.extend(lyndon_words(d, j).into_iter().map(|word| LieBasisElement { word, frobenius: f }));
        }
    }
    out
}

/// The element of `T^i(V)` a basis descriptor stands for.
pub fn tensor_of(b: &LieBasisElement, p: u32) -> Vec<(Vec<u32>, i64)> {
    let mut e = bracket_expansion(&b.word);
    for _ in 0..b.frobenius {
        let mut acc = vec![(Vec::new(), 1i64)];
        for _ in 0..p {
            let mut next: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
            for (x, c) in &acc {
                for (y, d) in &e {
                    let mut xy = x.clone();
                    xy.extend_from_slice(y);
                    *next.entry(xy).or_default() += c * d;
                }
            }
            acc = next.into_iter().filter(|(_, c)| *c != 0).collect();
        }
        e = acc;
    }
    e
}

/// `L^[p]_i(V)` realized inside `T^i(V)` over `F_p`, as spanning vectors
/// in the word basis (words in `0..d`, lexicographic). Returns the rank of
/// their span.
pub fn restricted_component_rank(d: u32, i: usize, ctx: &PrimeContext) -> usize {
    let index = |w: &[u32]| w.iter().fold(0u32, |acc, &x| acc * d + x);
    let mut ech = Echelon::new(ctx);
    for b in lie_power_basis(d, i, Some(ctx.p())) {
        let pairs = tensor_of(&b, ctx.p()).into_iter().map(|(w, c)| (index(&w), ctx.reduce(c))).collect();
        ech.insert(SparseVec::from_pairs(pairs, ctx));
    }
    ech.rank()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Generator {
    /// A Lyndon word in the letters of one degree.
    Bracket(Vec<u32>),
    /// `x^p` for a letter.
    Frobenius(u32),
}

#[derive(Debug, Clone)]
struct Degree {
    basis: Vec<Generator>,
    index: HashMap<Generator, usize>,
}

/// The normalized chain complex `N_m = L_i[X]_m / D_m`, where `D` is the
/// degenerate part. Its homology is `π_* L_i[X]`.
///
/// `L_i(F[X_m])` splits by the multiset of letters, and `D_m` is exactly
/// the sum of the components whose letters share a degeneracy, so `N_m`
/// is spanned by Lyndon brackets on jointly nondegenerate multisets.
#[derive(Debug, Clone)]
pub struct LieComplex {
    weight: usize,
    restricted: Option<u32>,
    sset: FiniteSimplicialSet,
    degrees: Vec<Degree>,
    masks: Vec<Vec<u64>>,
}

impl LieComplex {
    /// `L_weight[X]` over `Z` (`restricted = None`) or `L^[p]_weight[X]`;
    /// only Frobenius summands of a single letter (`weight = p`) are built.
    pub fn new(sset: &FiniteSimplicialSet, weight: usize, restricted: Option<u32>, max_degree: usize) -> Result<Self, OracleError> {
        if max_degree > sset.cap() {
            return Err(OracleError::CapExceeded(format!(
                "{} is tabulated through degree {}, need {max_degree}",
                sset.name(),
                sset.cap()
            )));
        }
        if max_degree >= 64 {
            return Err(OracleError::CapExceeded("degeneracy masks hold 64 positions".into()));
        }
        if let Some(p) = restricted {
            let p = p as usize;
            if weight.is_multiple_of(p) && weight != p {
                return Err(OracleError::CapExceeded(format!(
                    "iterated Frobenius summands (weight {weight}) are not built; use weight {p}"
                )));
            }
        }
        let masks: Vec<Vec<u64>> = (0..=max_degree)
            .map(|m| (0..sset.count(m)).map(|x| sset.degeneracy_mask(m, x)).collect())
            .collect();
        let mut degrees = Vec::with_capacity(max_degree + 1);
        for m in 0..=max_degree {
            let letters = sset.count(m) as u32;
            let full: u64 = if m == 0 { 0 } else { (1u64 << m) - 1 };
            let mut basis = Vec::new();
            let mut cur = Vec::with_capacity(weight);
            multisets(1, letters, weight, full, &masks[m], &mut cur, &mut |s| {
                for w in lyndon_words_with_content(s) {
                    basis.push(Generator::Bracket(w));
                }
            });
            if restricted.is_some_and(|p| p as usize == weight) {
                for x in 1..letters {
                    if masks[m][x as usize] & full == 0 {
                        basis.push(Generator::Frobenius(x));
                    }
                }
            }
            let index = basis.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
            degrees.push(Degree { basis, index });
        }
        Ok(LieComplex {
            weight,
            restricted,
            sset: sset.clone(),
            degrees,
            masks,
        })
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn dim(&self, m: usize) -> usize {
        self.degrees.get(m).map_or(0, |d| d.basis.len())
    }

    fn jointly_degenerate(&self, m: usize, letters: &[u32]) -> bool {
        let full: u64 = if m == 0 { 0 } else { (1u64 << m) - 1 };
        letters.iter().fold(full, |acc, &x| acc & self.masks[m][x as usize]) != 0
    }

    /// `∂ = Σ (−1)^i d_i` on basis element `j` of degree `m`, in the basis
    /// of degree `m − 1`, integer coefficients.
    pub fn boundary_column(&self, m: usize, j: usize) -> Vec<(usize, i64)> {
        assert!(m >= 1 && m <= self.max_degree());
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        let target = &self.degrees[m - 1];
        let sign = |i: usize| if i.is_multiple_of(2) { 1 } else { -1 };
        match &self.degrees[m].basis[j] {
            Generator::Frobenius(x) => {
                for i in 0..=m {
                    let y = self.sset.face(m, *x as usize, i).expect("within cap") as u32;
                    if y == 0 {
                        continue;
                    }
                    if let Some(&t) = target.index.get(&Generator::Frobenius(y)) {
                        *acc.entry(t).or_default() += sign(i);
                    }
                }
            }
            Generator::Bracket(w) => {
                let expansion = bracket_expansion(w);
                for i in 0..=m {
                    let sub: Vec<u32> = w
                        .iter()
                        .map(|&x| self.sset.face(m, x as usize, i).expect("within cap") as u32)
                        .collect();
                    if sub.contains(&0) || self.jointly_degenerate(m - 1, &sub) {
                        continue;
                    }
                    let map: HashMap<u32, u32> = w.iter().copied().zip(sub.iter().copied()).collect();
                    let mut poly: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
                    for (u, c) in &expansion {
                        *poly.entry(u.iter().map(|x| map[x]).collect()).or_default() += c;
                    }
                    poly.retain(|_, c| *c != 0);
                    for (word, c) in lyndon_coordinates(poly) {
                        let t = target.index[&Generator::Bracket(word)];
                        *acc.entry(t).or_default() += sign(i) * c;
                    }
                }
            }
        }
        acc.into_iter().filter(|(_, c)| *c != 0).collect()
    }

    fn boundary_rows(&self, m: usize, ctx: &PrimeContext) -> Vec<SparseVec> {
        (0..self.dim(m))
            .map(|j| {
                let pairs = self
                    .boundary_column(m, j)
                    .into_iter()
                    .map(|(t, c)| (t as u32, ctx.reduce(c)))
                    .collect();
                SparseVec::from_pairs(pairs, ctx)
            })
            .collect()
    }

    /// Rank of `∂_m: N_m → N_{m−1}` over `F_p`.
    pub fn boundary_rank(&self, m: usize, ctx: &PrimeContext) -> usize {
        if m == 0 || m > self.max_degree() || self.dim(m) == 0 || self.dim(m - 1) == 0 {
            return 0;
        }
        sparse_rank(self.boundary_rows(m, ctx), ctx)
    }

    /// Dense integer matrix of `∂_m` (rows: degree `m − 1`).
    pub fn boundary_integer(&self, m: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; self.dim(m)]; self.dim(m - 1)];
        for j in 0..self.dim(m) {
            for (t, c) in self.boundary_column(m, j) {
                out[t][j] = c;
            }
        }
        out
    }

    /// `dim_{F_p} π_m` for `m < max_degree`, from the ranks of `∂_m` and
    /// `∂_{m+1}`.
    pub fn homology_dim(&self, m: usize, ctx: &PrimeContext) -> Result<usize, OracleError> {
        if m + 1 > self.max_degree() {
            return Err(OracleError::CapExceeded(format!("π_{m} needs degree {} built", m + 1)));
        }
        Ok(self.dim(m) - self.boundary_rank(m, ctx) - self.boundary_rank(m + 1, ctx))
    }

    pub fn restricted(&self) -> Option<u32> {
        self.restricted
    }
}

/// Coordinates of a Lie polynomial in the Lyndon basis, by repeatedly
/// cancelling the lexicographically smallest word, which leads `P(w)`.
fn lyndon_coordinates(mut poly: BTreeMap<Vec<u32>, i64>) -> Vec<(Vec<u32>, i64)> {
    let mut out = Vec::new();
    while let Some((w, c)) = poly.pop_first() {
        debug_assert!(is_lyndon(&w), "leading word {w:?} of a Lie element must be Lyndon");
        for (u, d) in bracket_expansion(&w).into_iter().skip_while(|(u, _)| *u == w) {
            let e = poly.entry(u.clone()).or_default();
            *e -= c * d;
            if *e == 0 {
                poly.remove(&u);
            }
        }
        out.push((w, c));
    }
    out
}

/// Multisets `x_1 ≤ … ≤ x_k` of letters `≥ from` whose degeneracy masks
/// have empty common intersection within `full`.
fn multisets(from: u32, letters: u32, k: usize, live: u64, masks: &[u64], cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if k == 0 {
        if live == 0 {
            f(cur);
        }
        return;
    }
    for x in from..letters {
        let next = live & masks[x as usize];
        if k == 1 && next != 0 {
            continue;
        }
        cur.push(x);
        multisets(x, letters, k - 1, next, masks, cur, f);
        cur.pop();
    }
}

/// Rank over `F_p` of a set of sparse rows, sparsest first.
pub fn sparse_rank(mut rows: Vec<SparseVec>, ctx: &PrimeContext) -> usize {
    rows.retain(|r| !r.is_zero());
    rows.sort_by_key(|r| r.nnz());
    let mut ech = Echelon::new(ctx);
    for r in rows {
        ech.insert(r);
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyndon_basics() {
        assert!(is_lyndon(&[0, 0, 1]));
        assert!(!is_lyndon(&[0, 1, 0]));
        assert!(!is_lyndon(&[0, 0]));
        assert_eq!(lyndon_words_with_content(&[1, 0, 0]), vec![vec![0, 0, 1]]);
        assert_eq!(lyndon_words_with_content(&[0, 1, 2]).len(), 2);
    }

    #[test]
    fn witt_formula_values() {
        assert_eq!(witt_dimension(4, 2), 6);
        assert_eq!(witt_dimension(2, 3), 2);
        assert_eq!(restricted_dimension(1, 3, 3), 1);
        for d in 1..=4u32 {
            for i in 1..=5 {
                assert_eq!(lyndon_words(d, i).len(), witt_dimension(d as usize, i));
            }
        }
    }

    #[test]
    fn leading_word_of_standard_bracket() {
        for w in lyndon_words(3, 4) {
            let e = bracket_expansion(&w);
            assert_eq!(e[0], (w.clone(), 1));
        }
    }

    #[test]
    fn realized_in_tensor_power() {
        let ctx = PrimeContext::new(3).unwrap();
        assert_eq!(restricted_component_rank(1, 3, &ctx), 1);
        assert_eq!(restricted_component_rank(2, 3, &ctx), restricted_dimension(2, 3, 3));
        assert_eq!(restricted_component_rank(3, 3, &ctx), 8 + 3);
        assert_eq!(restricted_component_rank(4, 2, &ctx), 6);
    }

    #[test]
    fn boundary_squares_to_zero() {
        let s2 = FiniteSimplicialSet::sphere(2, 8);
        let c = LieComplex::new(&s2, 3, Some(3), 8).unwrap();
        for m in 2..=7 {
            let a = c.boundary_integer(m);
            let b = c.boundary_integer(m + 1);
            for (i, row) in a.iter().enumerate() {
                for j in 0..c.dim(m + 1) {
                    let s: i64 = row.iter().enumerate().map(|(k, x)| x * b[k][j]).sum();
                    assert_eq!(s, 0, "∂∂ ≠ 0 at m={m} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn restricted_cube_on_s2() {
        let ctx = PrimeContext::new(3).unwrap();
        let s2 = FiniteSimplicialSet::sphere(2, 8);
        let c = LieComplex::new(&s2, 3, Some(3), 8).unwrap();
        let dims: Vec<usize> = (0..=7).map(|m| c.homology_dim(m, &ctx).unwrap()).collect();
        assert_eq!(dims, vec![0, 0, 1, 0, 0, 1, 1, 0]);
    }
}
