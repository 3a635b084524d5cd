//! Exact linear algebra over `F_p` with sparse rows.
//!
//! Vectors are sorted `(index, value)` lists with no zeros. Reduced row
//! echelon forms are unique, so the dense path (narrow matrices) and the
//! sparse path give identical output.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::prime::PrimeContext;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("B is not contained in the span of Z")]
    BNotContainedInZ,
    #[error("vector length {got} does not match dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not in the span")]
    NotInSpan,
}

/// Sparse vector: strictly increasing indices, nonzero values.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseVec {
    entries: Vec<(u32, u32)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec::default()
    }

    /// Build from unsorted pairs, merging duplicates.
    pub fn from_pairs(mut pairs: Vec<(u32, u32)>, ctx: &PrimeContext) -> Self {
        pairs.sort_unstable_by_key(|e| e.0);
        let mut entries: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            let v = v % ctx.p();
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 = ctx.add(last.1, v),
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|e| e.1 != 0);
        SparseVec { entries }
    }

    pub fn from_dense(v: &[u32], ctx: &PrimeContext) -> Self {
        let p = ctx.p();
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| **x % p != 0)
                .map(|(i, x)| (i as u32, x % p))
                .collect(),
        }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i as u32, 1)],
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<u32> {
        let mut out = vec![0; dim];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn leading(&self) -> Option<(u32, u32)> {
        self.entries.first().copied()
    }

    pub fn get(&self, i: usize) -> u32 {
        match self.entries.binary_search_by_key(&(i as u32), |e| e.0) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0,
        }
    }

    /// One past the largest stored index.
    pub fn support_end(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0 as usize + 1)
    }

    pub fn scale(&self, c: u32, ctx: &PrimeContext) -> SparseVec {
        let c = c % ctx.p();
        if c == 0 {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|&(i, v)| (i, ctx.mul(v, c))).collect(),
        }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &SparseVec, c: u32, ctx: &PrimeContext) -> SparseVec {
        let c = c % ctx.p();
        if c == 0 {
            return self.clone();
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0, ctx.mul(b[j].1, c)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let v = ctx.add(a[i].1, ctx.mul(b[j].1, c));
                    if v != 0 {
                        out.push((a[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(k, v)| (k, ctx.mul(v, c))));
        SparseVec { entries: out }
    }

    pub fn dot_dense(&self, dense: &[u32], ctx: &PrimeContext) -> u32 {
        self.entries
            .iter()
            .fold(0, |acc, &(i, v)| ctx.add(acc, ctx.mul(v, dense[i as usize])))
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|e| (e.0, e.1))).finish()
    }
}

/// Row-major sparse matrix over `F_p`.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
    ctx: PrimeContext,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize, ctx: &PrimeContext) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
            ctx: ctx.clone(),
        }
    }

    pub fn identity(n: usize, ctx: &PrimeContext) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            data: (0..n).map(SparseVec::unit).collect(),
            ctx: ctx.clone(),
        }
    }

    pub fn from_dense(rows: &[Vec<u32>], cols: usize, ctx: &PrimeContext) -> Self {
        SparseMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().map(|r| SparseVec::from_dense(r, ctx)).collect(),
            ctx: ctx.clone(),
        }
    }

    pub fn from_rows(data: Vec<SparseVec>, cols: usize, ctx: &PrimeContext) -> Self {
        debug_assert!(data.iter().all(|r| r.support_end() <= cols));
        SparseMatrix {
            rows: data.len(),
            cols,
            data,
            ctx: ctx.clone(),
        }
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(columns: &[SparseVec], rows: usize, ctx: &PrimeContext) -> Self {
        SparseMatrix::from_rows(columns.to_vec(), rows, ctx).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        let v = v % self.ctx.p();
        let e = &mut self.data[r].entries;
        match e.binary_search_by_key(&(c as u32), |x| x.0) {
            Ok(k) if v == 0 => {
                e.remove(k);
            }
            Ok(k) => e[k].1 = v,
            Err(_) if v == 0 => {}
            Err(k) => e.insert(k, (c as u32, v)),
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVec::nnz).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        self.data.iter().map(|r| r.to_dense(self.cols)).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for &(c, v) in &row.entries {
                cols[c as usize].push((r as u32, v));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            data: cols.into_iter().map(|entries| SparseVec { entries }).collect(),
            ctx: self.ctx.clone(),
        }
    }

    /// `M·v` for a dense vector of length `cols`.
    pub fn mul_dense(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        self.data.iter().map(|r| r.dot_dense(v, &self.ctx)).collect()
    }

    /// `M·v` for a sparse vector.
    pub fn mul_sparse(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_dense(&self.mul_dense(&v.to_dense(self.cols)), &self.ctx)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let ctx = &self.ctx;
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = SparseVec::new();
                for &(k, v) in &row.entries {
                    acc = acc.add_scaled(&other.data[k as usize], v, ctx);
                }
                acc
            })
            .collect();
        SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
            ctx: ctx.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVec::is_zero)
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{} over F_{}", self.rows, self.cols, self.ctx.p())?;
        if self.cols <= 16 && self.rows <= 16 {
            for r in self.to_dense() {
                writeln!(f, "  {r:?}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReduction {
    /// Nonzero rows of the reduced row echelon form, in pivot order.
    pub rref: SparseMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Columns below which elimination runs on dense rows.
pub const DENSE_COLUMN_LIMIT: usize = 64;

pub fn row_reduce(m: &SparseMatrix) -> RowReduction {
    let rows = if m.cols < DENSE_COLUMN_LIMIT {
        rref_dense(m)
    } else {
        rref_sparse(m)
    };
    let pivots: Vec<usize> = rows.iter().map(|r| r.leading().unwrap().0 as usize).collect();
    RowReduction {
        rank: rows.len(),
        rref: SparseMatrix::from_rows(rows, m.cols, &m.ctx),
        pivots,
    }
}

fn rref_dense(m: &SparseMatrix) -> Vec<SparseVec> {
    let ctx = &m.ctx;
    let mut a = m.to_dense();
    let mut pivot_row = 0;
    for col in 0..m.cols {
        let Some(r) = (pivot_row..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(pivot_row, r);
        let inv = ctx.inv(a[pivot_row][col]);
        for x in a[pivot_row].iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        let pivot = a[pivot_row].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == pivot_row || row[col] == 0 {
                continue;
            }
            let c = ctx.neg(row[col]);
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = ctx.add(*x, ctx.mul(*y, c));
            }
        }
        pivot_row += 1;
    }
    a.truncate(pivot_row);
    a.iter().map(|r| SparseVec::from_dense(r, ctx)).collect()
}

fn rref_sparse(m: &SparseMatrix) -> Vec<SparseVec> {
    let mut ech = Echelon::new(&m.ctx);
    for row in &m.data {
        ech.insert(row.clone());
    }
    ech.into_rref()
}

/// Incremental echelon basis: rows keyed by leading index, each normalized
/// to leading coefficient 1.
#[derive(Clone)]
pub struct Echelon {
    ctx: PrimeContext,
    pivots: BTreeMap<u32, SparseVec>,
}

impl Echelon {
    pub fn new(ctx: &PrimeContext) -> Self {
        Echelon {
            ctx: ctx.clone(),
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce `v` by leading entries until its leading index is not a pivot.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some((i, c)) = v.leading() {
            match self.pivots.get(&i) {
                Some(row) => v = v.add_scaled(row, self.ctx.neg(c), &self.ctx),
                None => break,
            }
        }
        v
    }

    /// Reduce `v` at every pivot position, not just the leading one.
    pub fn reduce_fully(&self, v: SparseVec) -> SparseVec {
        let mut v = self.reduce(v);
        let mut rest = SparseVec::new();
        while let Some((i, c)) = v.leading() {
            if let Some(row) = self.pivots.get(&i) {
                v = v.add_scaled(row, self.ctx.neg(c), &self.ctx);
            } else {
                rest.entries.push((i, c));
                v.entries.remove(0);
            }
        }
        rest
    }

    /// Insert `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        let Some((i, c)) = v.leading() else {
            return false;
        };
        let v = v.scale(self.ctx.inv(c), &self.ctx);
        self.pivots.insert(i, v);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    pub fn pivot_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().map(|&k| k as usize)
    }

    /// Back-substitute into the reduced row echelon form.
    pub fn into_rref(self) -> Vec<SparseVec> {
        let ctx = self.ctx;
        let mut done: BTreeMap<u32, SparseVec> = BTreeMap::new();
        // Rows with larger pivots are finished first, so each row only has
        // to be cleared against already reduced rows.
        for (i, row) in self.pivots.into_iter().rev() {
            let mut acc = SparseVec { entries: vec![(i, 1)] };
            let mut tail = row;
            tail.entries.remove(0);
            while !tail.is_zero() {
                let (j, c) = tail.entries[0];
                match done.get(&j) {
                    Some(r) => tail = tail.add_scaled(r, ctx.neg(c), &ctx),
                    None => {
                        acc.entries.push((j, c));
                        tail.entries.remove(0);
                    }
                }
            }
            done.insert(i, acc);
        }
        done.into_values().collect()
    }
}

/// Basis of the null space `{v : M v = 0}`, one vector per free column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let red = row_reduce(m);
    let ctx = &m.ctx;
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; m.cols];
        for &c in &red.pivots {
            v[c] = true;
        }
        v
    };
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut pairs = vec![(free as u32, 1)];
        for (row, &pc) in red.rref.data.iter().zip(&red.pivots) {
            let c = row.get(free);
            if c != 0 {
                pairs.push((pc as u32, ctx.neg(c)));
            }
        }
        out.push(SparseVec::from_pairs(pairs, ctx));
    }
    out
}

/// Basis of the column space, as vectors of length `rows`.
pub fn image_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    row_reduce(&m.transpose()).rref.data
}

/// Basis of the span of the given vectors, in reduced echelon form.
pub fn span_basis(vectors: &[SparseVec], ctx: &PrimeContext) -> Vec<SparseVec> {
    let mut e = Echelon::new(ctx);
    for v in vectors {
        e.insert(v.clone());
    }
    e.into_rref()
}

/// `span(Z) / span(B)` with chosen representatives and a coordinate map.
#[derive(Debug, Clone)]
pub struct SubquotientBasis {
    ambient_dim: usize,
    representatives: Vec<SparseVec>,
    b_basis: Vec<SparseVec>,
    // Echelon over B-basis then representatives; each pivot row carries
    // its combination of those generators.
    tracked: Vec<(SparseVec, SparseVec)>,
    ctx: PrimeContext,
}

impl SubquotientBasis {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn representatives(&self) -> &[SparseVec] {
        &self.representatives
    }

    pub fn b_basis(&self) -> &[SparseVec] {
        &self.b_basis
    }

    /// Class coordinates of `z ∈ span(Z)`; errors if `z ∉ span(Z)`.
    pub fn coordinates(&self, z: &SparseVec) -> Result<Vec<u32>, LinalgError> {
        let ctx = &self.ctx;
        let nb = self.b_basis.len();
        let mut v = z.clone();
        let mut combo = SparseVec::new();
        for (row, how) in &self.tracked {
            let (lead, _) = row.leading().unwrap();
            let c = v.get(lead as usize);
            if c != 0 {
                v = v.add_scaled(row, ctx.neg(c), ctx);
                combo = combo.add_scaled(how, c, ctx);
            }
        }
        if !v.is_zero() {
            return Err(LinalgError::NotInSpan);
        }
        Ok((0..self.dim()).map(|i| combo.get(nb + i)).collect())
    }

    /// Whether `z` lies in `span(B)`.
    pub fn is_boundary(&self, z: &SparseVec) -> Result<bool, LinalgError> {
        Ok(self.coordinates(z)?.iter().all(|&c| c == 0))
    }

    /// Representative vector for class coordinates.
    pub fn lift(&self, coords: &[u32]) -> SparseVec {
        let mut v = SparseVec::new();
        for (c, r) in coords.iter().zip(&self.representatives) {
            v = v.add_scaled(r, *c, &self.ctx);
        }
        v
    }
}

/// Build `span(Z)/span(B)`. Representatives are the `Z` inputs (in order)
/// that are independent modulo `B` and the earlier choices.
pub fn subquotient(
    z_span: &[SparseVec],
    b_span: &[SparseVec],
    ambient_dim: usize,
    ctx: &PrimeContext,
) -> Result<SubquotientBasis, LinalgError> {
    for v in z_span.iter().chain(b_span) {
        if v.support_end() > ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: ambient_dim,
                got: v.support_end(),
            });
        }
    }
    let mut z_ech = Echelon::new(ctx);
    for z in z_span {
        z_ech.insert(z.clone());
    }
    if b_span.iter().any(|b| !z_ech.contains(b)) {
        return Err(LinalgError::BNotContainedInZ);
    }
    let b_basis = span_basis(b_span, ctx);
    let mut gens: Vec<SparseVec> = b_basis.clone();
    let mut ech = Echelon::new(ctx);
    for b in &b_basis {
        ech.insert(b.clone());
    }
    let mut representatives = Vec::new();
    for z in z_span {
        if ech.insert(z.clone()) {
            representatives.push(z.clone());
            gens.push(z.clone());
        }
    }
    // Tracked elimination over the generators, in insertion order.
    let mut tracked: Vec<(SparseVec, SparseVec)> = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        let mut v = g.clone();
        let mut how = SparseVec::unit(gi);
        for (row, rhow) in &tracked {
            let (lead, _) = row.leading().unwrap();
            let c = v.get(lead as usize);
            if c != 0 {
                v = v.add_scaled(row, ctx.neg(c), ctx);
                how = how.add_scaled(rhow, ctx.neg(c), ctx);
            }
        }
        let (_, c) = v.leading().expect("generators are independent");
        let inv = ctx.inv(c);
        let (v, how) = (v.scale(inv, ctx), how.scale(inv, ctx));
        // Keep earlier rows reduced at this new pivot so a single pass in
        // order suffices.
        let lead = v.leading().unwrap().0 as usize;
        for (row, rhow) in tracked.iter_mut() {
            let c = row.get(lead);
            if c != 0 {
                *row = row.add_scaled(&v, ctx.neg(c), ctx);
                *rhow = rhow.add_scaled(&how, ctx.neg(c), ctx);
            }
        }
        tracked.push((v, how));
    }
    Ok(SubquotientBasis {
        ambient_dim,
        representatives,
        b_basis,
        tracked,
        ctx: ctx.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> PrimeContext {
        PrimeContext::new(3).unwrap()
    }

    fn sv(v: &[u32]) -> SparseVec {
        SparseVec::from_dense(v, &c3())
    }

    #[test]
    fn reduce_examples() {
        let ctx = c3();
        assert_eq!(row_reduce(&SparseMatrix::identity(3, &ctx)).rank, 3);
        let r = row_reduce(&SparseMatrix::from_dense(&[vec![1, 1]], 2, &ctx));
        assert_eq!((r.rank, r.pivots.clone()), (1, vec![0]));
        assert_eq!(row_reduce(&SparseMatrix::zeros(4, 5, &ctx)).rank, 0);
    }

    #[test]
    fn kernel_and_image_examples() {
        let ctx = c3();
        let id = SparseMatrix::identity(3, &ctx);
        assert!(kernel_basis(&id).is_empty());
        assert_eq!(image_basis(&id), vec![sv(&[1, 0, 0]), sv(&[0, 1, 0]), sv(&[0, 0, 1])]);
        let m = SparseMatrix::from_dense(&[vec![1, 1]], 2, &ctx);
        assert_eq!(kernel_basis(&m), vec![sv(&[2, 1])]);
        let col = SparseMatrix::from_dense(&[vec![1], vec![2]], 1, &ctx);
        assert_eq!(image_basis(&col).len(), 1);
    }

    #[test]
    fn subquotient_examples() {
        let ctx = c3();
        let e = [sv(&[1, 0]), sv(&[0, 1])];
        assert_eq!(subquotient(&e, &[], 2, &ctx).unwrap().dim(), 2);
        let q = subquotient(&e, &[sv(&[1, 1])], 2, &ctx).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.coordinates(&sv(&[1, 1])).unwrap(), vec![0]);
        let a = q.coordinates(&sv(&[1, 0])).unwrap();
        let b = q.coordinates(&sv(&[0, 2])).unwrap();
        assert_eq!(a, b);
        let same = subquotient(&e, &e, 2, &ctx).unwrap();
        assert_eq!(same.dim(), 0);
        assert_eq!(
            subquotient(&[sv(&[1, 0])], &[sv(&[0, 1])], 2, &ctx).unwrap_err(),
            LinalgError::BNotContainedInZ
        );
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let ctx = PrimeContext::new(5).unwrap();
        let rows: Vec<Vec<u32>> = (0..12)
            .map(|r| (0..70).map(|c| ((r * 7 + c * 3 + r * c) % 11 % 5) as u32).collect())
            .collect();
        let m = SparseMatrix::from_dense(&rows, 70, &ctx);
        let sparse = rref_sparse(&m);
        let dense = rref_dense(&m);
        assert_eq!(sparse, dense);
    }
}
