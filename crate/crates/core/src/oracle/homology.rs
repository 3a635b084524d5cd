//! Simplicial modules with chosen bases, their Moore complexes, integral
//! invariants via Smith normal form, and the boundary formula for a pair
//! of modules.

use serde::{Deserialize, Serialize};

use super::sset::FiniteSimplicialSet;
use super::OracleError;
use crate::linalg::{kernel_basis, Echelon, SparseMatrix, SparseVec};
use crate::prime::PrimeContext;

/// A simplicial module truncated at `cap`: per degree a dimension, and
/// face/degeneracy maps as integer column lists (`faces[n][i][j]` is
/// `d_i` of basis vector `j`).
#[derive(Debug, Clone)]
pub struct SimplicialModule {
    dims: Vec<usize>,
    faces: Vec<Vec<Vec<Vec<(usize, i64)>>>>,
    degens: Vec<Vec<Vec<Vec<(usize, i64)>>>>,
}

impl SimplicialModule {
    /// `Z[X]/Z[∗]` with basis the non-basepoint simplices.
    pub fn linearize(x: &FiniteSimplicialSet) -> Self {
        let cap = x.cap();
        let dims = (0..=cap).map(|n| x.count(n) - 1).collect();
        let table = |n: usize, i: usize, face: bool| -> Vec<Vec<(usize, i64)>> {
            (1..x.count(n))
                .map(|s| {
                    let t = if face { x.face(n, s, i) } else { x.degen(n, s, i) }.expect("within cap");
                    if t == 0 {
                        Vec::new()
                    } else {
                        vec![(t - 1, 1)]
                    }
                })
                .collect()
        };
        let faces = (0..=cap)
            .map(|n| if n == 0 { Vec::new() } else { (0..=n).map(|i| table(n, i, true)).collect() })
            .collect();
        let degens = (0..=cap)
            .map(|n| if n == cap { Vec::new() } else { (0..=n).map(|i| table(n, i, false)).collect() })
            .collect();
        SimplicialModule { dims, faces, degens }
    }

    pub fn cap(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims[n]
    }

    fn check(&self, n: usize) -> Result<(), OracleError> {
        if n > self.cap() {
            return Err(OracleError::CapExceeded(format!("module tabulated through degree {}, asked for {n}", self.cap())));
        }
        Ok(())
    }

    /// `d_i` on a vector of degree `n`, over `F_p`.
    pub fn face(&self, n: usize, i: usize, v: &SparseVec, ctx: &PrimeContext) -> SparseVec {
        if n == 0 {
            return SparseVec::new();
        }
        apply_columns(&self.faces[n][i], v, ctx)
    }

    pub fn degen(&self, n: usize, i: usize, v: &SparseVec, ctx: &PrimeContext) -> SparseVec {
        apply_columns(&self.degens[n][i], v, ctx)
    }

    /// Matrix of `d_i` over `F_p`, rows indexed by the source basis (so a
    /// row vector times the matrix is the image).
    pub fn face_matrix(&self, n: usize, i: usize, ctx: &PrimeContext) -> SparseMatrix {
        let rows = (0..self.dims[n])
            .map(|j| SparseVec::from_pairs(self.faces[n][i][j].iter().map(|&(t, c)| (t as u32, ctx.reduce(c))).collect(), ctx))
            .collect();
        SparseMatrix::from_rows(rows, self.dims[n - 1], ctx)
    }

    /// Simplicial identities as matrix equations on basis vectors.
    pub fn check_identities(&self, ctx: &PrimeContext) -> Result<(), String> {
        for n in 2..=self.cap() {
            for j in 0..=n {
                for i in 0..j {
                    for b in 0..self.dims[n] {
                        let e = SparseVec::unit(b);
                        let lhs = self.face(n - 1, i, &self.face(n, j, &e, ctx), ctx);
                        let rhs = self.face(n - 1, j - 1, &self.face(n, i, &e, ctx), ctx);
                        if lhs != rhs {
                            return Err(format!("d{i}d{j} in degree {n}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Basis of the Moore chains `N_n = ⋂_{i≥1} ker d_i` in degree `n`.
    pub fn moore_chains(&self, n: usize, ctx: &PrimeContext) -> Vec<SparseVec> {
        self.joint_kernel(n, 1..=n, ctx)
    }

    /// Vectors of degree `n` killed by every listed face.
    pub fn joint_kernel(&self, n: usize, faces: std::ops::RangeInclusive<usize>, ctx: &PrimeContext) -> Vec<SparseVec> {
        let dim = self.dims[n];
        if n == 0 || faces.is_empty() {
            return (0..dim).map(SparseVec::unit).collect();
        }
        let target = self.dims[n - 1];
        let blocks: Vec<usize> = faces.collect();
        let rows = (0..dim)
            .map(|j| {
                let mut pairs = Vec::new();
                for (k, &i) in blocks.iter().enumerate() {
                    pairs.extend(self.faces[n][i][j].iter().map(|&(t, c)| ((k * target + t) as u32, ctx.reduce(c))));
                }
                SparseVec::from_pairs(pairs, ctx)
            })
            .collect();
        kernel_basis(&SparseMatrix::from_rows(rows, blocks.len() * target, ctx).transpose())
    }
}

fn apply_columns(cols: &[Vec<(usize, i64)>], v: &SparseVec, ctx: &PrimeContext) -> SparseVec {
    let mut pairs = Vec::new();
    for &(j, c) in v.entries() {
        for &(t, d) in &cols[j as usize] {
            pairs.push((t as u32, ctx.mul(c, ctx.reduce(d))));
        }
    }
    SparseVec::from_pairs(pairs, ctx)
}

/// `dim_{F_p} π_m = H_m(N_•, d_0)` for `m < cap`.
pub fn moore_homology(g: &SimplicialModule, m: usize, ctx: &PrimeContext) -> Result<usize, OracleError> {
    g.check(m + 1)?;
    let cycles = moore_cycles(g, m, ctx);
    let boundaries: Vec<SparseVec> = g.moore_chains(m + 1, ctx).iter().map(|v| g.face(m + 1, 0, v, ctx)).collect();
    let mut ech = Echelon::new(ctx);
    for b in boundaries {
        ech.insert(b);
    }
    Ok(cycles.len() - ech.rank())
}

/// Moore cycles: `d_i x = 0` for every `i`.
pub fn moore_cycles(g: &SimplicialModule, m: usize, ctx: &PrimeContext) -> Vec<SparseVec> {
    g.joint_kernel(m, 0..=m, ctx)
}

/// Elementary divisors of an integer matrix (the nonzero diagonal of its
/// Smith normal form), ascending.
pub fn smith_invariants(matrix: &[Vec<i64>]) -> Vec<u64> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i128>> = matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    let (head, tail) = a.split_at_mut(i);
                    for (x, y) in tail[0].iter_mut().zip(&head[t]).skip(t) {
                        *x = x.checked_sub(q.checked_mul(*y).expect("SNF overflow")).expect("SNF overflow");
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut() {
                        let y = row[t];
                        row[j] = row[j].checked_sub(q.checked_mul(y).expect("SNF overflow")).expect("SNF overflow");
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if !dirty {
                // divisibility: fold a non-multiple into the pivot row
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
                match bad {
                    None => break,
                    Some(i) => {
                        let (head, tail) = a.split_at_mut(i);
                        for (x, y) in head[t].iter_mut().zip(&tail[0]).skip(t) {
                            *x += *y;
                        }
                        continue;
                    }
                }
            }
            // move the smallest entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        out.push(a[t][t].unsigned_abs() as u64);
        t += 1;
    }
    out.sort_unstable();
    out
}

/// An abelian group `Z^rank ⊕ ⊕ Z/torsion_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn has_p_torsion(&self, p: u64) -> bool {
        self.torsion.iter().any(|t| t % p == 0)
    }
}

/// Integral homology of a chain complex given by dense boundary matrices:
/// `d_m` maps degree `m` to degree `m − 1` (rows: degree `m − 1`).
pub fn integral_homology(dim_m: usize, d_m: Option<&[Vec<i64>]>, d_next: Option<&[Vec<i64>]>) -> AbelianGroup {
    let rank_out = d_m.map_or(0, |d| smith_invariants(d).len());
    let divisors = d_next.map_or_else(Vec::new, smith_invariants);
    AbelianGroup {
        rank: dim_m - rank_out - divisors.len(),
        torsion: divisors.into_iter().filter(|&d| d > 1).collect(),
    }
}

fn rank_of(vectors: impl IntoIterator<Item = SparseVec>, ctx: &PrimeContext) -> (Echelon, usize) {
    let mut ech = Echelon::new(ctx);
    for v in vectors {
        ech.insert(v);
    }
    let r = ech.rank();
    (ech, r)
}

/// A simplicial submodule `H ⊆ G` spanned by a subset of basis vectors in
/// each degree (the linearization of a simplicial subset).
#[derive(Debug, Clone)]
pub struct CoordinateSubmodule {
    pub members: Vec<Vec<bool>>,
}

impl CoordinateSubmodule {
    /// Basis vectors of `G = F_p[X]` given by simplices of `Y ⊆ X`.
    pub fn from_subset(x: &FiniteSimplicialSet, keep: impl Fn(usize, usize) -> bool) -> Self {
        let members = (0..=x.cap()).map(|n| (1..x.count(n)).map(|s| keep(n, s)).collect()).collect();
        CoordinateSubmodule { members }
    }

    pub fn contains(&self, n: usize, v: &SparseVec) -> bool {
        v.entries().iter().all(|&(j, _)| self.members[n][j as usize])
    }

    fn basis(&self, n: usize) -> Vec<usize> {
        (0..self.members[n].len()).filter(|&j| self.members[n][j]).collect()
    }

    /// Closed under every face and degeneracy of `G`.
    pub fn is_simplicial(&self, g: &SimplicialModule, ctx: &PrimeContext) -> bool {
        (0..=g.cap()).all(|n| {
            self.basis(n).into_iter().all(|j| {
                let e = SparseVec::unit(j);
                (n == 0 || (0..=n).all(|i| self.contains(n - 1, &g.face(n, i, &e, ctx))))
                    && (n == g.cap() || (0..=n).all(|i| self.contains(n + 1, &g.degen(n, i, &e, ctx))))
            })
        })
    }
}

/// Both sides of the boundary formula: `δ[gH]` from the short exact
/// sequence of Moore complexes, and `Σ (−1)^i [d_i g]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryFormula {
    pub connecting: SparseVec,
    pub alternating: SparseVec,
    pub equal: bool,
}

/// Check `δ([gH]) = Σ_{i=0}^n (−1)^i [d_i g]` in `π_{n−1} H` for
/// `g ∈ G_n` whose faces are Moore cycles of `H`.
pub fn boundary_formula_check(
    g_mod: &SimplicialModule,
    h: &CoordinateSubmodule,
    n: usize,
    g: &SparseVec,
    ctx: &PrimeContext,
) -> Result<BoundaryFormula, OracleError> {
    g_mod.check(n)?;
    if n == 0 {
        return Err(OracleError::HypothesisViolated("n ≥ 1 required".into()));
    }
    let faces: Vec<SparseVec> = (0..=n).map(|i| g_mod.face(n, i, g, ctx)).collect();
    for (i, f) in faces.iter().enumerate() {
        if !h.contains(n - 1, f) {
            return Err(OracleError::HypothesisViolated(format!("d_{i} g is not in H")));
        }
        if (0..n).any(|j| !g_mod.face(n - 1, j, f, ctx).is_zero()) {
            return Err(OracleError::HypothesisViolated(format!("d_{i} g is not a Moore cycle")));
        }
    }
    // lift gH to a Moore chain: g̃ = g + h with h ∈ H_n and d_i g̃ = 0, i ≥ 1
    let h_basis = h.basis(n);
    let target = g_mod.dim(n - 1);
    let stacked = |v: &SparseVec| -> Vec<(u32, u32)> {
        let mut pairs = Vec::new();
        for i in 1..=n {
            for &(t, c) in g_mod.face(n, i, v, ctx).entries() {
                pairs.push(((i - 1) as u32 * target as u32 + t, c));
            }
        }
        pairs
    };
    let lift = {
        // solve Σ c_j F(h_j) = −F(g) by reducing the augmented rows
        let width = (n * target) as u32;
        let mut rows = Vec::new();
        for (k, &j) in h_basis.iter().enumerate() {
            let mut pairs = stacked(&SparseVec::unit(j));
            pairs.push((width + k as u32, 1));
            rows.push(SparseVec::from_pairs(pairs, ctx));
        }
        let mut ech = Echelon::new(ctx);
        for r in rows {
            ech.insert(r);
        }
        let residue = ech.reduce_fully(SparseVec::from_pairs(stacked(g), ctx));
        if residue.entries().iter().any(|&(t, _)| t < width) {
            return Err(OracleError::HypothesisViolated("gH has no Moore-chain lift".into()));
        }
        // residue = (F(g), 0) − Σ c_k (F(h_k), e_k) = (0, −c)
        let mut lifted = g.clone();
        for &(t, c) in residue.entries() {
            let k = (t - width) as usize;
            lifted = lifted.add_scaled(&SparseVec::unit(h_basis[k]), c, ctx);
        }
        lifted
    };
    debug_assert!((1..=n).all(|i| g_mod.face(n, i, &lift, ctx).is_zero()));
    let connecting = g_mod.face(n, 0, &lift, ctx);
    let mut alternating = SparseVec::new();
    for (i, f) in faces.iter().enumerate() {
        alternating = alternating.add_scaled(f, ctx.sign(i as i64), ctx);
    }
    // compare classes in π_{n−1}H: the difference must be d_0 of a Moore
    // chain of H
    let h_moore = moore_chains_in(g_mod, h, n, ctx);
    let (ech, _) = rank_of(h_moore.iter().map(|v| g_mod.face(n, 0, v, ctx)), ctx);
    let diff = connecting.add_scaled(&alternating, ctx.neg(1), ctx);
    let equal = ech.contains(&diff);
    Ok(BoundaryFormula {
        connecting,
        alternating,
        equal,
    })
}

/// `N_n H`: vectors supported on `H` killed by `d_i`, `i ≥ 1`.
fn moore_chains_in(g_mod: &SimplicialModule, h: &CoordinateSubmodule, n: usize, ctx: &PrimeContext) -> Vec<SparseVec> {
    let basis = h.basis(n);
    if n == 0 {
        return basis.into_iter().map(SparseVec::unit).collect();
    }
    let target = g_mod.dim(n - 1);
    let rows = basis
        .iter()
        .map(|&j| {
            let e = SparseVec::unit(j);
            let mut pairs = Vec::new();
            for i in 1..=n {
                for &(t, c) in g_mod.face(n, i, &e, ctx).entries() {
                    pairs.push(((i - 1) as u32 * target as u32 + t, c));
                }
            }
            SparseVec::from_pairs(pairs, ctx)
        })
        .collect();
    let ker = kernel_basis(&SparseMatrix::from_rows(rows, n * target, ctx).transpose());
    ker.into_iter()
        .map(|v| SparseVec::from_pairs(v.entries().iter().map(|&(k, c)| (basis[k as usize] as u32, c)).collect(), ctx))
        .collect()
}

/// The space of `g ∈ G_n` meeting the hypothesis of the boundary formula:
/// every face in `H` and a Moore cycle there.
pub fn qualifying_elements(g_mod: &SimplicialModule, h: &CoordinateSubmodule, n: usize, ctx: &PrimeContext) -> Vec<SparseVec> {
    let target = g_mod.dim(n - 1);
    let below = if n >= 2 { g_mod.dim(n - 2) } else { 0 };
    let block = target + n * below;
    let rows = (0..g_mod.dim(n))
        .map(|j| {
            let e = SparseVec::unit(j);
            let mut pairs = Vec::new();
            for i in 0..=n {
                let f = g_mod.face(n, i, &e, ctx);
                let off = (i * block) as u32;
                for &(t, c) in f.entries() {
                    if !h.members[n - 1][t as usize] {
                        pairs.push((off + t, c));
                    }
                }
                if n >= 2 {
                    for k in 0..n {
                        for &(t, c) in g_mod.face(n - 1, k, &f, ctx).entries() {
                            pairs.push((off + (target + k * below) as u32 + t, c));
                        }
                    }
                }
            }
            SparseVec::from_pairs(pairs, ctx)
        })
        .collect();
    kernel_basis(&SparseMatrix::from_rows(rows, (n + 1) * block, ctx).transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_homology_is_concentrated() {
        let ctx = PrimeContext::new(3).unwrap();
        let g = SimplicialModule::linearize(&FiniteSimplicialSet::sphere(2, 9));
        g.check_identities(&ctx).unwrap();
        let dims: Vec<usize> = (0..=8).map(|m| moore_homology(&g, m, &ctx).unwrap()).collect();
        assert_eq!(dims, vec![0, 0, 1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn disk_is_contractible() {
        let ctx = PrimeContext::new(5).unwrap();
        let g = SimplicialModule::linearize(&FiniteSimplicialSet::disk(2, 6));
        assert_eq!(moore_homology(&g, 0, &ctx).unwrap(), 1);
        for m in 1..=5 {
            assert_eq!(moore_homology(&g, m, &ctx).unwrap(), 0);
        }
    }

    #[test]
    fn smith_normal_form_examples() {
        assert_eq!(smith_invariants(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(smith_invariants(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(smith_invariants(&[vec![0, 0]]), Vec::<u64>::new());
    }

    #[test]
    fn moore_chain_degenerates_to_d0() {
        let ctx = PrimeContext::new(3).unwrap();
        let x = FiniteSimplicialSet::disk(2, 4);
        let g = SimplicialModule::linearize(&x);
        // H = the boundary ∂Δ[2]⁺
        let h = CoordinateSubmodule::from_subset(&x, |n, s| {
            let mut k = x.key(n, s).to_vec();
            k.dedup();
            k.len() <= 2
        });
        assert!(h.is_simplicial(&g, &ctx));
        let chains = g.moore_chains(2, &ctx);
        for c in chains.iter().filter(|c| h.contains(1, &g.face(2, 0, c, &ctx))) {
            if let Ok(r) = boundary_formula_check(&g, &h, 2, c, &ctx) {
                assert!(r.equal);
                assert_eq!(r.connecting, g.face(2, 0, c, &ctx));
            }
        }
        for g0 in qualifying_elements(&g, &h, 2, &ctx) {
            assert!(boundary_formula_check(&g, &h, 2, &g0, &ctx).unwrap().equal);
        }
    }
}
