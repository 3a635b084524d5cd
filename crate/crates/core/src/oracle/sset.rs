//! Finite pointed simplicial sets, tabulated up to a degree cap.
//!
//! Every simplex is an index into its degree; index 0 is the basepoint.

use std::collections::HashMap;
use std::hash::Hash;

use super::OracleError;

/// Default truncation degree for oracle objects.
pub const DEFAULT_CAP: usize = 10;

/// One elementary operator, applied in sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Face(usize),
    Degen(usize),
}

/// Factor the simplicial operator `θ^*` of a monotone map `θ: [m] → [n]`
/// into faces then degeneracies, in order of application.
pub fn operator_ops(theta: &[usize], n: usize) -> Vec<Op> {
    let mut ops = Vec::new();
    let image: Vec<usize> = {
        let mut v = theta.to_vec();
        v.dedup();
        v
    };
    for j in (0..=n).rev() {
        if !image.contains(&j) {
            ops.push(Op::Face(j));
        }
    }
    for j in 0..theta.len().saturating_sub(1) {
        if theta[j] == theta[j + 1] {
            ops.push(Op::Degen(j));
        }
    }
    ops
}

/// Monotone maps `[m] → [n]`, lexicographic.
pub fn monotone_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m + 1);
    fn go(cur: &mut Vec<usize>, m: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m + 1 {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().copied().unwrap_or(0);
        for v in lo..=n {
            cur.push(v);
            go(cur, m, n, out);
            cur.pop();
        }
    }
    go(&mut cur, m, n, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSimplicialSet {
    name: String,
    cap: usize,
    /// `keys[n][x]`: a description of simplex `x`; empty for the basepoint.
    keys: Vec<Vec<Vec<usize>>>,
    /// `faces[n][x][i] = d_i x ∈ X_{n−1}`, for `n ≥ 1`.
    faces: Vec<Vec<Vec<usize>>>,
    /// `degens[n][x][i] = s_i x ∈ X_{n+1}`, for `n < cap`.
    degens: Vec<Vec<Vec<usize>>>,
}

impl FiniteSimplicialSet {
    /// Tabulate from a key model: `keys(n)` lists the non-basepoint
    /// simplices, `face`/`degen` act on keys and return `None` for the
    /// basepoint.
    pub fn from_model<K, FK, FF, FD>(name: &str, cap: usize, keys: FK, face: FF, degen: FD) -> Self
    where
        K: Clone + Eq + Hash + Into<Vec<usize>>,
        FK: Fn(usize) -> Vec<K>,
        FF: Fn(usize, &K, usize) -> Option<K>,
        FD: Fn(usize, &K, usize) -> Option<K>,
    {
        let by_degree: Vec<Vec<K>> = (0..=cap).map(&keys).collect();
        let index: Vec<HashMap<K, usize>> = by_degree
            .iter()
            .map(|ks| ks.iter().enumerate().map(|(i, k)| (k.clone(), i + 1)).collect())
            .collect();
        let lookup = |n: usize, k: Option<K>| -> usize {
            match k {
                None => 0,
                Some(k) => *index[n].get(&k).expect("model is closed under faces and degeneracies"),
            }
        };
        let mut faces = vec![Vec::new(); cap + 1];
        let mut degens = vec![Vec::new(); cap + 1];
        for n in 0..=cap {
            if n >= 1 {
                let mut t = vec![vec![0; n + 1]];
                for k in &by_degree[n] {
                    t.push((0..=n).map(|i| lookup(n - 1, face(n, k, i))).collect());
                }
                faces[n] = t;
            }
            if n < cap {
                let mut t = vec![vec![0; n + 1]];
                for k in &by_degree[n] {
                    t.push((0..=n).map(|i| lookup(n + 1, degen(n, k, i))).collect());
                }
                degens[n] = t;
            }
        }
        let keys = by_degree
            .into_iter()
            .map(|ks| std::iter::once(Vec::new()).chain(ks.into_iter().map(Into::into)).collect())
            .collect();
        FiniteSimplicialSet {
            name: name.to_string(),
            cap,
            keys,
            faces,
            degens,
        }
    }

    /// `S^n = Δ[n]/∂Δ[n]`: degree-`m` simplices are the monotone
    /// surjections `[m] ↠ [n]` plus the basepoint.
    pub fn sphere(n: usize, cap: usize) -> Self {
        assert!(n >= 1, "spheres start at S^1");
        let surj = |m: usize| -> Vec<Vec<usize>> {
            monotone_maps(m, n)
                .into_iter()
                .filter(|f| f[0] == 0 && f[m] == n && f.windows(2).all(|w| w[1] - w[0] <= 1))
                .collect()
        };
        let is_surj = |f: &Vec<usize>| f[0] == 0 && f[f.len() - 1] == n && f.windows(2).all(|w| w[1] - w[0] <= 1);
        FiniteSimplicialSet::from_model(
            &format!("S^{n}"),
            cap,
            surj,
            |_, f, i| {
                let mut g = f.clone();
                g.remove(i);
                is_surj(&g).then_some(g)
            },
            |_, f, i| {
                let mut g = f.clone();
                g.insert(i, f[i]);
                Some(g)
            },
        )
    }

    /// `Δ[n]⁺`: the standard simplex with a disjoint basepoint.
    pub fn disk(n: usize, cap: usize) -> Self {
        FiniteSimplicialSet::from_model(
            &format!("Δ[{n}]⁺"),
            cap,
            |m| monotone_maps(m, n),
            |_, f, i| {
                let mut g = f.clone();
                g.remove(i);
                Some(g)
            },
            |_, f, i| {
                let mut g = f.clone();
                g.insert(i, f[i]);
                Some(g)
            },
        )
    }

    /// `K⁺` for an ordered simplicial complex `K` on vertices `0..v`,
    /// given by its maximal faces.
    pub fn complex(name: &str, facets: &[Vec<usize>], cap: usize) -> Self {
        let facets: Vec<Vec<usize>> = facets
            .iter()
            .map(|f| {
                let mut f = f.clone();
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        let in_complex = |s: &[usize]| facets.iter().any(|f| s.iter().all(|v| f.contains(v)));
        let verts: usize = facets.iter().flatten().copied().max().map_or(0, |v| v + 1);
        FiniteSimplicialSet::from_model(
            name,
            cap,
            |m| {
                monotone_maps(m, verts.saturating_sub(1))
                    .into_iter()
                    .filter(|f| {
                        let mut s = f.clone();
                        s.dedup();
                        in_complex(&s)
                    })
                    .collect()
            },
            |_, f, i| {
                let mut g = f.clone();
                g.remove(i);
                Some(g)
            },
            |_, f, i| {
                let mut g = f.clone();
                g.insert(i, f[i]);
                Some(g)
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of simplices in degree `n`, basepoint included.
    pub fn count(&self, n: usize) -> usize {
        self.keys[n].len()
    }

    pub fn key(&self, n: usize, x: usize) -> &[usize] {
        &self.keys[n][x]
    }

    /// Index of the simplex with a given key.
    pub fn find(&self, n: usize, key: &[usize]) -> Option<usize> {
        self.keys.get(n)?.iter().position(|k| k == key)
    }

    fn check(&self, n: usize) -> Result<(), OracleError> {
        if n > self.cap {
            return Err(OracleError::CapExceeded(format!("{} is tabulated through degree {}, asked for {n}", self.name, self.cap)));
        }
        Ok(())
    }

    /// `d_i x` for `x ∈ X_n`; `X_{−1}` is the point.
    pub fn face(&self, n: usize, x: usize, i: usize) -> Result<usize, OracleError> {
        self.check(n)?;
        Ok(if n == 0 { 0 } else { self.faces[n][x][i] })
    }

    pub fn degen(&self, n: usize, x: usize, i: usize) -> Result<usize, OracleError> {
        self.check(n + 1)?;
        Ok(self.degens[n][x][i])
    }

    /// Whether `x ∈ X_n` lies in the image of `s_j`, as a bit mask over `j`.
    pub fn degeneracy_mask(&self, n: usize, x: usize) -> u64 {
        let mut mask = 0;
        if n == 0 || x == 0 {
            return if x == 0 { u64::MAX } else { 0 };
        }
        for j in 0..n {
            if self.degens[n - 1][self.faces[n][x][j]][j] == x {
                mask |= 1 << j;
            }
        }
        mask
    }

    pub fn is_degenerate(&self, n: usize, x: usize) -> bool {
        x != 0 && self.degeneracy_mask(n, x) != 0
    }

    /// Apply a sequence of operators to `x ∈ X_n`.
    pub fn apply(&self, n: usize, x: usize, ops: &[Op]) -> Result<(usize, usize), OracleError> {
        let (mut deg, mut cur) = (n, x);
        for op in ops {
            match *op {
                Op::Face(i) => {
                    cur = self.face(deg, cur, i)?;
                    deg -= 1;
                }
                Op::Degen(i) => {
                    cur = self.degen(deg, cur, i)?;
                    deg += 1;
                }
            }
        }
        Ok((deg, cur))
    }

    /// Every simplicial identity on the tabulated range, plus basepoint
    /// preservation. Returns the first failure.
    pub fn check_identities(&self) -> Result<(), String> {
        for n in 0..=self.cap {
            for x in 0..self.count(n) {
                let d = |k: usize, y: usize, i: usize| self.faces[k][y][i];
                let s = |k: usize, y: usize, i: usize| self.degens[k][y][i];
                if n >= 2 {
                    for j in 0..=n {
                        for i in 0..j {
                            if d(n - 1, d(n, x, j), i) != d(n - 1, d(n, x, i), j - 1) {
                                return Err(format!("d{i} d{j} ≠ d{} d{i} on {x} in degree {n}", j - 1));
                            }
                        }
                    }
                }
                if n < self.cap {
                    for j in 0..=n {
                        let sx = s(n, x, j);
                        for i in 0..=n + 1 {
                            let lhs = d(n + 1, sx, i);
                            let rhs = if i < j {
                                if n == 0 { 0 } else { s(n - 1, d(n, x, i), j - 1) }
                            } else if i == j || i == j + 1 {
                                x
                            } else if n == 0 {
                                0
                            } else {
                                s(n - 1, d(n, x, i - 1), j)
                            };
                            if !(n == 0 && i != j && i != j + 1) && lhs != rhs {
                                return Err(format!("d{i} s{j} fails on {x} in degree {n}"));
                            }
                        }
                    }
                }
                if n + 2 <= self.cap {
                    for j in 0..=n {
                        for i in 0..=j {
                            if s(n + 1, s(n, x, j), i) != s(n + 1, s(n, x, i), j + 1) {
                                return Err(format!("s{i} s{j} fails on {x} in degree {n}"));
                            }
                        }
                    }
                }
            }
            if n >= 1 && self.faces[n][0].iter().any(|&y| y != 0) {
                return Err(format!("a face of the basepoint moved in degree {n}"));
            }
            if n < self.cap && self.degens[n][0].iter().any(|&y| y != 0) {
                return Err(format!("a degeneracy of the basepoint moved in degree {n}"));
            }
        }
        Ok(())
    }

    /// `ΣX` from the `(x, k)` description: `(ΣX)_n` has `(x, k)` with
    /// `x ∈ X_{n−k}`, `1 ≤ k ≤ n`, `x ≠ ∗`.
    pub fn suspension(&self) -> Self {
        let cap = self.cap + 1;
        // keys are [k, x]
        FiniteSimplicialSet::from_model(
            &format!("Σ{}", self.name),
            cap,
            |n| {
                let mut v = Vec::new();
                for k in 1..=n {
                    for x in 1..self.count(n - k) {
                        v.push(vec![k, x]);
                    }
                }
                v
            },
            |n, key, i| {
                let (k, x) = (key[0], key[1]);
                if i <= n - k {
                    let y = if n - k == 0 { 0 } else { self.faces[n - k][x][i] };
                    (y != 0).then(|| vec![k, y])
                } else {
                    (k > 1).then(|| vec![k - 1, x])
                }
            },
            |n, key, i| {
                let (k, x) = (key[0], key[1]);
                if i <= n - k {
                    Some(vec![k, self.degens[n - k][x][i]])
                } else {
                    Some(vec![k + 1, x])
                }
            },
        )
    }

    /// `(PX)_n = {x ∈ X_{n+1} | (d_0)^{n+1} x = ∗}` with the faces and
    /// degeneracies of `X` (indices `≤ n`).
    pub fn path_space(&self) -> Self {
        self.décalage("P", false)
    }

    /// `(ΩX)_n`: the simplices of `PX` with `d_{n+1} x = ∗` as well.
    pub fn loop_space(&self) -> Self {
        self.décalage("Ω", true)
    }

    fn décalage(&self, tag: &str, loops: bool) -> Self {
        assert!(self.cap >= 1, "path space needs X tabulated through degree 1");
        let cap = self.cap - 1;
        let keep = |n: usize, x: usize| -> bool {
            let mut z = x;
            for k in (1..=n + 1).rev() {
                z = self.faces[k][z][0];
            }
            z == 0 && (!loops || self.faces[n + 1][x][n + 1] == 0)
        };
        FiniteSimplicialSet::from_model(
            &format!("{tag}{}", self.name),
            cap,
            |n| (1..self.count(n + 1)).filter(|&x| keep(n, x)).map(|x| vec![x]).collect(),
            |n, key, i| {
                let y = self.faces[n + 1][key[0]][i];
                (y != 0).then(|| vec![y])
            },
            |n, key, i| {
                let y = self.degens[n + 1][key[0]][i];
                (y != 0).then(|| vec![y])
            },
        )
    }
}

/// A degreewise map of finite simplicial sets, as index tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialMap {
    pub tables: Vec<Vec<usize>>,
}

impl SimplicialMap {
    pub fn apply(&self, n: usize, x: usize) -> usize {
        self.tables[n][x]
    }

    /// Commutes with every tabulated face and degeneracy, and is a
    /// bijection in every degree.
    pub fn is_isomorphism(&self, src: &FiniteSimplicialSet, dst: &FiniteSimplicialSet) -> bool {
        let cap = src.cap().min(dst.cap());
        for n in 0..=cap {
            let mut seen = vec![false; dst.count(n)];
            if src.count(n) != dst.count(n) {
                return false;
            }
            for x in 0..src.count(n) {
                let y = self.apply(n, x);
                if std::mem::replace(&mut seen[y], true) {
                    return false;
                }
                for i in 0..=n {
                    if n >= 1 && self.apply(n - 1, src.faces[n][x][i]) != dst.faces[n][y][i] {
                        return false;
                    }
                    if n < cap && self.apply(n + 1, src.degens[n][x][i]) != dst.degens[n][y][i] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The relabeling `ΣS^n → S^{n+1}`: `(f, k)` goes to `f` followed by `k`
/// copies of `n+1`.
pub fn suspension_sphere_iso(n: usize, sigma: &FiniteSimplicialSet, sphere: &FiniteSimplicialSet) -> SimplicialMap {
    let base = FiniteSimplicialSet::sphere(n, sigma.cap() - 1);
    let cap = sigma.cap().min(sphere.cap());
    let tables = (0..=cap)
        .map(|m| {
            (0..sigma.count(m))
                .map(|x| {
                    if x == 0 {
                        return 0;
                    }
                    let key = sigma.key(m, x);
                    let (k, y) = (key[0], key[1]);
                    let mut g = base.key(m - k, y).to_vec();
                    g.extend(std::iter::repeat_n(n + 1, k));
                    sphere.find(m, &g).expect("ΣS^n simplices are surjections onto [n+1]")
                })
                .collect()
        })
        .collect();
    SimplicialMap { tables }
}

/// `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_counts() {
        let s2 = FiniteSimplicialSet::sphere(2, 6);
        assert_eq!(s2.count(2) - 1, 1);
        assert_eq!(s2.count(4) - 1, 6);
        assert_eq!(FiniteSimplicialSet::sphere(1, 4).count(3) - 1, 3);
        for m in 0..=6 {
            assert_eq!(s2.count(m) - 1, binomial(m, 2));
        }
        s2.check_identities().unwrap();
    }

    #[test]
    fn constructions_satisfy_identities() {
        FiniteSimplicialSet::disk(2, 5).check_identities().unwrap();
        let s2 = FiniteSimplicialSet::sphere(2, 5);
        s2.suspension().check_identities().unwrap();
        s2.path_space().check_identities().unwrap();
        s2.loop_space().check_identities().unwrap();
        FiniteSimplicialSet::complex("K", &[vec![0, 1, 2], vec![2, 3]], 4)
            .check_identities()
            .unwrap();
    }

    #[test]
    fn suspension_of_sphere_is_a_sphere() {
        let s2 = FiniteSimplicialSet::sphere(2, 5);
        let sigma = s2.suspension();
        let s3 = FiniteSimplicialSet::sphere(3, 6);
        let iso = suspension_sphere_iso(2, &sigma, &s3);
        assert!(iso.is_isomorphism(&sigma, &s3));
    }

    #[test]
    fn suspension_faces_follow_the_displayed_rule() {
        let s2 = FiniteSimplicialSet::sphere(2, 5);
        let sigma = s2.suspension();
        // (x, k) with x ∈ X_{n−k}; low faces act on x
        let (n, k) = (5, 2);
        for x in 1..s2.count(n - k) {
            let sx = sigma.find(n, &[k, x]).unwrap();
            for i in 0..=n - k {
                let want = s2.face(n - k, x, i).unwrap();
                let got = sigma.face(n, sx, i).unwrap();
                if want == 0 {
                    assert_eq!(got, 0);
                } else {
                    assert_eq!(sigma.key(n - 1, got), &[k, want]);
                }
            }
        }
    }

    #[test]
    fn suspension_of_point_is_point() {
        let pt = FiniteSimplicialSet::from_model("∗", 4, |_| Vec::<Vec<usize>>::new(), |_, _, _| None, |_, _, _| None);
        let s = pt.suspension();
        assert!((0..=s.cap()).all(|n| s.count(n) == 1));
    }

    #[test]
    fn operator_factorization() {
        let d2 = FiniteSimplicialSet::disk(2, 5);
        for m in 0..=4 {
            for theta in monotone_maps(m, 2) {
                let ops = operator_ops(&theta, 2);
                let (deg, y) = d2.apply(2, d2.find(2, &[0, 1, 2]).unwrap(), &ops).unwrap();
                assert_eq!(deg, m);
                assert_eq!(d2.key(m, y), theta.as_slice());
            }
        }
    }

    #[test]
    fn refuses_beyond_cap() {
        let s2 = FiniteSimplicialSet::sphere(2, 3);
        assert!(matches!(s2.face(4, 1, 0), Err(OracleError::CapExceeded(_))));
        assert!(s2.degen(3, 1, 0).is_err());
    }
}
