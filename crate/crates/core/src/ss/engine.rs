use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::page::{build_page1, check_d_squared, intrinsic_d1, next_page, DiffBlock};
use super::{Assertion, AssumedZero, Bidegree, Bounds, PageState, Provenance, SignMode, SsError};
use crate::lambda::{d_element, multiply, Element};
use crate::linalg::{Echelon, SparseVec};
use crate::prime::PrimeContext;
use crate::unstable::{compose, SphereElement};

/// A page-`r` class over `S^n`, carried by an `E^1` representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageClass {
    pub sphere: u32,
    pub page: u32,
    pub bidegree: Bidegree,
    pub representative: Element,
}

/// One application of the Leibniz rule to `a ⊙ σb`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeibnizValue {
    pub a: PageClass,
    pub b: PageClass,
    pub product: PageClass,
    /// `d^r a ⊙ b`, unsigned.
    pub first_term: Element,
    /// `a ⊙ d^r σb`, unsigned.
    pub middle_term: Element,
    pub value: Element,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscrepancyKind {
    /// The value is `(−1)^{l+t}` times the intrinsic one.
    OverallSign,
    /// After removing the overall sign `(−1)^{l+t}`, the value is the
    /// intrinsic one with the sign of the middle term reversed.
    MiddleSignFlip,
    Other,
}

/// A propagated `d^1` value that differs from `∂` of the product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub value: LeibnizValue,
    pub intrinsic: Element,
    pub kind: DiscrepancyKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagation {
    pub sphere: u32,
    pub page: u32,
    pub mode: SignMode,
    pub values: Vec<LeibnizValue>,
    /// Only filled on page 1, where `d^1 = ∂` is known independently.
    pub discrepancies: Vec<Discrepancy>,
    /// Ids of ledger entries created by this call (pages ≥ 2).
    pub added: Vec<u64>,
    pub skipped: Vec<String>,
}

/// Pages and differentials of one sphere computed so far.
#[derive(Debug, Clone, Default)]
struct SphereCache {
    pages: Vec<PageState>,
    diffs: Vec<BTreeMap<Bidegree, DiffBlock>>,
}

/// A spectral-sequence session: prime, bounds, sign mode and the ledger
/// of asserted differentials. Pages are a pure function of these and are
/// cached per sphere.
#[derive(Debug, Clone)]
pub struct Session {
    ctx: PrimeContext,
    spheres: Vec<u32>,
    bounds: Bounds,
    sign_mode: SignMode,
    ledger: Vec<Assertion>,
    revision: u64,
    cache: HashMap<u32, SphereCache>,
}

impl Session {
    pub fn new(ctx: &PrimeContext, spheres: Vec<u32>, bounds: Bounds, sign_mode: SignMode) -> Self {
        Session {
            ctx: ctx.clone(),
            spheres,
            bounds,
            sign_mode,
            ledger: Vec::new(),
            revision: 0,
            cache: HashMap::new(),
        }
    }

    /// Rebuild from persisted parts. The ledger is validated.
    pub fn from_parts(
        ctx: &PrimeContext,
        spheres: Vec<u32>,
        bounds: Bounds,
        sign_mode: SignMode,
        ledger: Vec<Assertion>,
        revision: u64,
    ) -> Result<Self, SsError> {
        let mut s = Session::new(ctx, spheres, bounds, sign_mode);
        s.revision = revision;
        let mut ids = std::collections::HashSet::new();
        for a in &ledger {
            if !ids.insert(a.id) {
                return Err(SsError::ConflictingAssertion(format!("duplicate assertion id {}", a.id)));
            }
        }
        s.ledger = ledger;
        let touched: Vec<u32> = s.active().map(|a| a.sphere).collect();
        for n in touched {
            s.validate_sphere(n)?;
        }
        Ok(s)
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn spheres(&self) -> &[u32] {
        &self.spheres
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn sign_mode(&self) -> SignMode {
        self.sign_mode
    }

    pub fn set_sign_mode(&mut self, mode: SignMode) {
        if mode != self.sign_mode {
            self.sign_mode = mode;
            self.revision += 1;
        }
    }

    /// Bumped on every mutation; the service uses it as its concurrency
    /// token.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    /// Full ledger, tombstones included.
    pub fn ledger(&self) -> &[Assertion] {
        &self.ledger
    }

    fn active(&self) -> impl Iterator<Item = &Assertion> {
        self.ledger.iter().filter(|a| !a.deleted)
    }

    fn next_id(&self) -> u64 {
        self.ledger.iter().map(|a| a.id).max().map_or(1, |m| m + 1)
    }

    fn check_sphere(&self, n: u32) -> Result<(), SsError> {
        if n < 2 {
            return Err(SsError::BadSphere(n));
        }
        Ok(())
    }

    /// `E^r` over `S^n`.
    pub fn page(&mut self, sphere: u32, r: u32) -> Result<&PageState, SsError> {
        self.check_sphere(sphere)?;
        if r == 0 {
            return Err(SsError::BadPage(r));
        }
        self.ensure(sphere, r)?;
        Ok(&self.cache[&sphere].pages[r as usize - 1])
    }

    fn ensure(&mut self, sphere: u32, r: u32) -> Result<(), SsError> {
        let mut cache = self.cache.remove(&sphere).unwrap_or_default();
        let res = extend_cache(&mut cache, &self.ctx, sphere, self.bounds, &self.ledger, r);
        self.cache.insert(sphere, cache);
        res
    }

    /// `d^r` blocks of page `r` (computing page `r` if needed).
    fn diffs(&mut self, sphere: u32, r: u32) -> Result<&BTreeMap<Bidegree, DiffBlock>, SsError> {
        self.page(sphere, r)?;
        let cache = self.cache.get_mut(&sphere).unwrap();
        if cache.diffs.len() < r as usize {
            let d = page_differential(&cache.pages[r as usize - 1], &self.ledger)?;
            check_d_squared(&cache.pages[r as usize - 1], &d)?;
            cache.diffs.push(d);
        }
        Ok(&self.cache[&sphere].diffs[r as usize - 1])
    }

    /// Classes on page `r` whose `d^r` was defaulted to zero.
    pub fn assumptions(&mut self, sphere: u32, r: u32) -> Result<Vec<AssumedZero>, SsError> {
        let diffs = self.diffs(sphere, r)?.clone();
        let page = self.page(sphere, r)?;
        let mut out = Vec::new();
        for (b, block) in &diffs {
            let reps = page.class_elements(*b);
            for &j in &block.assumed {
                out.push(AssumedZero {
                    sphere,
                    page: r,
                    k: b.k,
                    m: b.m,
                    class: reps[j].to_string(),
                });
            }
        }
        Ok(out)
    }

    /// Every assumed-zero record on pages `2..=r`.
    pub fn assumptions_through(&mut self, sphere: u32, r: u32) -> Result<Vec<AssumedZero>, SsError> {
        let mut out = Vec::new();
        for q in 2..=r {
            out.extend(self.assumptions(sphere, q)?);
        }
        Ok(out)
    }

    /// A page-`r` class at `b` represented by `x`.
    pub fn class_at(&mut self, sphere: u32, r: u32, b: Bidegree, x: &Element) -> Result<PageClass, SsError> {
        check_homogeneous(sphere, b, x, &self.ctx)?;
        let page = self.page(sphere, r)?;
        if !page.in_bounds(b) {
            return Err(SsError::BidegreeMismatch(format!("{b} lies outside the bounds")));
        }
        if !page.is_cycle(b, x)? {
            return Err(SsError::UnknownClass(format!("[{x}] at {b} does not survive to E^{r}(S^{sphere})")));
        }
        Ok(PageClass {
            sphere,
            page: r,
            bidegree: b,
            representative: x.clone(),
        })
    }

    /// Same as [`Session::class_at`], reading the bidegree off `x`.
    pub fn class(&mut self, sphere: u32, r: u32, x: &Element) -> Result<PageClass, SsError> {
        let b = bidegree_of(sphere, x)?;
        self.class_at(sphere, r, b, x)
    }

    /// `d^r` of a page-`r` class: `Some(element)` when determined by data,
    /// `None` when it would be an assumed zero or leaves the bounds.
    pub fn differential(&mut self, class: &PageClass) -> Result<Option<Element>, SsError> {
        let (sphere, r, b) = (class.sphere, class.page, class.bidegree);
        if r == 1 {
            let t = match b.target(1) {
                Some(t) if t.k <= self.bounds.max_length => t,
                _ => return Ok(None),
            };
            let _ = t;
            return Ok(Some(d_element(&class.representative)));
        }
        let diffs = self.diffs(sphere, r)?.clone();
        let bounds = self.bounds;
        let page = self.page(sphere, r)?;
        let coords = page
            .coords_of(b, &class.representative)?
            .ok_or_else(|| SsError::UnknownClass(format!("[{}] at {b}", class.representative)))?;
        differential_from(page, &diffs, b, &coords, bounds)
    }

    /// Validate and append a user assertion; returns its id.
    pub fn assert_differential(
        &mut self,
        sphere: u32,
        page: u32,
        source: &Element,
        target: &Element,
        note: &str,
    ) -> Result<u64, SsError> {
        self.add_assertions(vec![(sphere, page, source.clone(), target.clone(), Provenance::User, note.to_string())])
            .map(|ids| ids[0])
    }

    fn validate_new(&mut self, sphere: u32, r: u32, source: &Element, target: &Element) -> Result<Bidegree, SsError> {
        self.check_sphere(sphere)?;
        if r < 2 {
            return Err(SsError::BadPage(r));
        }
        if source.is_zero() {
            return Err(SsError::UnknownClass("the source of an assertion must be nonzero".into()));
        }
        let b = bidegree_of(sphere, source)?;
        let page = self.page(sphere, r)?;
        if !page.in_bounds(b) {
            return Err(SsError::BidegreeMismatch(format!("source {b} lies outside the bounds")));
        }
        let t = b
            .target(r)
            .filter(|t| page.in_bounds(*t))
            .ok_or_else(|| SsError::BidegreeMismatch(format!("d^{r} out of {b} leaves the bounds")))?;
        if !target.is_zero() {
            let tb = bidegree_of(sphere, target)?;
            if tb != t {
                return Err(SsError::BidegreeMismatch(format!(
                    "d^{r} maps {b} to {t}, but the target lies at {tb}"
                )));
            }
        }
        check_homogeneous(sphere, b, source, page.ctx())?;
        check_homogeneous(sphere, t, target, page.ctx())?;
        if !page.is_cycle(b, source)? {
            return Err(SsError::UnknownClass(format!("[{source}] at {b} does not survive to E^{r}(S^{sphere})")));
        }
        if !page.is_cycle(t, target)? {
            return Err(SsError::UnknownClass(format!("[{target}] at {t} is not a class of E^{r}(S^{sphere})")));
        }
        Ok(b)
    }

    fn add_assertions(
        &mut self,
        items: Vec<(u32, u32, Element, Element, Provenance, String)>,
    ) -> Result<Vec<u64>, SsError> {
        let mut candidate = self.clone();
        let mut ids = Vec::new();
        let mut spheres = Vec::new();
        for (sphere, r, source, target, provenance, note) in items {
            let b = candidate.validate_new(sphere, r, &source, &target)?;
            let id = candidate.next_id();
            candidate.ledger.push(Assertion {
                id,
                page: r,
                sphere,
                source_bidegree: b,
                source,
                target,
                provenance,
                note,
                deleted: false,
            });
            candidate.invalidate(sphere, r);
            ids.push(id);
            spheres.push(sphere);
        }
        spheres.dedup();
        for n in spheres {
            candidate.validate_sphere(n)?;
        }
        candidate.revision += 1;
        *self = candidate;
        Ok(ids)
    }

    /// Tombstone an assertion. Refused if the remaining ledger no longer
    /// validates (for example a later assertion depended on it).
    pub fn delete_assertion(&mut self, id: u64) -> Result<(), SsError> {
        let mut candidate = self.clone();
        let Some(a) = candidate.ledger.iter_mut().find(|a| a.id == id && !a.deleted) else {
            return Err(SsError::UnknownAssertion(id));
        };
        a.deleted = true;
        let (sphere, r) = (a.sphere, a.page);
        candidate.invalidate(sphere, r);
        candidate.validate_sphere(sphere)?;
        candidate.revision += 1;
        *self = candidate;
        Ok(())
    }

    fn invalidate(&mut self, sphere: u32, r: u32) {
        if let Some(c) = self.cache.get_mut(&sphere) {
            c.pages.truncate(r as usize);
            c.diffs.truncate(r as usize - 1);
        }
    }

    /// Recompute every page of `S^n` that the ledger touches, plus the next.
    fn validate_sphere(&mut self, sphere: u32) -> Result<(), SsError> {
        let top = self
            .active()
            .filter(|a| a.sphere == sphere)
            .map(|a| a.page)
            .max()
            .unwrap_or(1);
        self.diffs(sphere, top)?;
        self.page(sphere, top + 1)?;
        Ok(())
    }

    /// Apply the Leibniz rule to every product `a ⊙ σb` of page-`r` basis
    /// classes with known differentials. On page 1 the values are compared
    /// with `∂`; on later pages new values are added to the ledger.
    pub fn leibniz_propagate(&mut self, sphere: u32, r: u32, mode: Option<SignMode>) -> Result<Propagation, SsError> {
        self.check_sphere(sphere)?;
        let mode = mode.unwrap_or(self.sign_mode);
        let ctx = self.ctx.clone();
        let bounds = self.bounds;
        let mut values = Vec::new();
        let mut discrepancies = Vec::new();
        let mut skipped = Vec::new();
        let mut pending: Vec<(u32, u32, Element, Element, Provenance, String)> = Vec::new();

        let a_classes = self.basis_classes(sphere, r)?;
        for a in a_classes {
            if a.bidegree.k == 0 {
                continue;
            }
            let Some(da) = self.differential(&a)? else {
                continue;
            };
            let l = a.bidegree.m;
            let b_sphere = l - 1;
            // `a` of degree 0 would need classes over S^{n-1}; only n ≥ 2
            // is modelled, and for n = 2 that leaves S^1 out.
            if b_sphere < 2 {
                continue;
            }
            let b_classes = self.basis_classes(b_sphere, r)?;
            for b in b_classes {
                let (s, t) = (b.bidegree.k, b.bidegree.m);
                let pb = Bidegree::new(a.bidegree.k + s, t + 1);
                if s == 0 || pb.k > bounds.max_length || pb.m > bounds.max_m {
                    continue;
                }
                let Some(dsb) = self.suspended_differential(&b)? else {
                    continue;
                };
                let product_value = multiply(&a.representative, &b.representative);
                let first = multiply(&da, &b.representative);
                let middle = multiply(&a.representative, &dsb);
                let deg_a = (l - sphere) as i64;
                let value = match mode {
                    SignMode::Derivation => first.add_scaled(&middle, ctx.sign(deg_a)),
                    SignMode::Paper => first.scale(ctx.sign((l + t) as i64)).add(&middle),
                };
                let product = PageClass {
                    sphere,
                    page: r,
                    bidegree: pb,
                    representative: product_value,
                };
                let lv = LeibnizValue {
                    a: a.clone(),
                    b: b.clone(),
                    product,
                    first_term: first.clone(),
                    middle_term: middle.clone(),
                    value: value.clone(),
                };
                if r == 1 {
                    let intrinsic = d_element(&lv.product.representative);
                    if intrinsic != value {
                        let eps1 = ctx.sign((l + t) as i64);
                        let eps2 = ctx.sign(deg_a);
                        let flipped = first.add_scaled(&middle, ctx.neg(eps2));
                        let normalized = value.scale(eps1);
                        let kind = if normalized == intrinsic {
                            DiscrepancyKind::OverallSign
                        } else if normalized == flipped {
                            DiscrepancyKind::MiddleSignFlip
                        } else {
                            DiscrepancyKind::Other
                        };
                        discrepancies.push(Discrepancy {
                            value: lv.clone(),
                            intrinsic,
                            kind,
                        });
                    }
                } else {
                    match self.leibniz_candidate(&lv)? {
                        Candidate::New => pending.push((
                            sphere,
                            r,
                            lv.product.representative.clone(),
                            value.clone(),
                            Provenance::Leibniz,
                            format!("[{}] ⊙ σ[{}]/S^{}", a.representative, b.representative, b_sphere),
                        )),
                        Candidate::Redundant => {}
                        Candidate::Skip(why) => skipped.push(why),
                    }
                }
                values.push(lv);
            }
        }
        // Several products can share a source class; keep the first value
        // per representative and leave contradictions to validation.
        let mut seen = std::collections::HashSet::new();
        pending.retain(|p| seen.insert(p.2.clone()));
        let added = if pending.is_empty() {
            Vec::new()
        } else {
            self.add_assertions(pending).map_err(|e| match e {
                SsError::ConflictingAssertion(msg) | SsError::DSquaredViolation(msg) => SsError::PropagationConflict(msg),
                other => other,
            })?
        };
        Ok(Propagation {
            sphere,
            page: r,
            mode,
            values,
            discrepancies,
            added,
            skipped,
        })
    }

    fn leibniz_candidate(&mut self, lv: &LeibnizValue) -> Result<Candidate, SsError> {
        let p = &lv.product;
        if p.representative.is_zero() {
            return Ok(Candidate::Skip(format!(
                "[{}] ⊙ σ[{}] is zero",
                lv.a.representative, lv.b.representative
            )));
        }
        let (sphere, r, b) = (p.sphere, p.page, p.bidegree);
        let page = self.page(sphere, r)?;
        let Some(t) = b.target(r).filter(|t| page.in_bounds(*t)) else {
            return Ok(Candidate::Skip(format!("d^{r} out of {b} leaves the bounds")));
        };
        let Some(coords) = page.coords_of(b, &p.representative)? else {
            return Ok(Candidate::Skip(format!("[{}] at {b} is not a page-{r} cycle", p.representative)));
        };
        if !page.is_cycle(t, &lv.value)? {
            return Ok(Candidate::Skip(format!("value [{}] at {t} is not a page-{r} cycle", lv.value)));
        }
        let diffs = self.diffs(sphere, r)?.clone();
        let page = self.page(sphere, r)?;
        let Some(block) = diffs.get(&b) else {
            return Ok(Candidate::Redundant);
        };
        if block.target_dim == 0 {
            return Ok(Candidate::Redundant);
        }
        if block.is_known(&coords, page.ctx()) {
            let have = block.apply(&coords, page.ctx());
            let want = page.coords_of(t, &lv.value)?.expect("checked cycle");
            if have.to_dense(block.target_dim) != want {
                return Err(SsError::PropagationConflict(format!(
                    "d^{r}[{}] over S^{sphere}: Leibniz gives [{}], the ledger gives [{}]",
                    p.representative,
                    lv.value,
                    page.lift(t, &have.to_dense(block.target_dim))
                )));
            }
            return Ok(Candidate::Redundant);
        }
        Ok(Candidate::New)
    }

    /// `d^r σb` for a class `b` over `S^{l−1}`: from the data over `S^l` if
    /// determined there, else `σ(d^r b)`.
    fn suspended_differential(&mut self, b: &PageClass) -> Result<Option<Element>, SsError> {
        let up = b.sphere + 1;
        let sb = Bidegree::new(b.bidegree.k, b.bidegree.m + 1);
        if sb.m <= self.bounds.max_m {
            if let Ok(class) = self.class_at(up, b.page, sb, &b.representative) {
                if let Some(v) = self.differential(&class)? {
                    return Ok(Some(v));
                }
            }
        }
        self.differential(b)
    }

    /// Basis classes of every bidegree on page `r` over `S^n`.
    pub fn basis_classes(&mut self, sphere: u32, r: u32) -> Result<Vec<PageClass>, SsError> {
        let page = self.page(sphere, r)?;
        let mut out = Vec::new();
        for cell in page.cells() {
            for v in cell.class_reps() {
                out.push(PageClass {
                    sphere,
                    page: r,
                    bidegree: cell.bidegree,
                    representative: cell.to_element(v, page.ctx()),
                });
            }
        }
        Ok(out)
    }

    /// Kleisli composition of page classes: `a ⊙ b` with `b` over
    /// `S^{m(a)}`, validated to lie in `Z^r`.
    pub fn compose_classes(&mut self, a: &PageClass, b: &PageClass) -> Result<PageClass, SsError> {
        let r = a.page.max(b.page);
        let ea = SphereElement::new(a.sphere, a.representative.clone(), a.bidegree.k, a.bidegree.m - a.sphere)?;
        let eb = SphereElement::new(b.sphere, b.representative.clone(), b.bidegree.k, b.bidegree.m - b.sphere)?;
        let c = compose(&ea, &eb).map_err(|e| SsError::NotComposable(e.to_string()))?;
        let bd = Bidegree::new(c.length(), c.m());
        let value = c.into_value();
        let page = self.page(a.sphere, r)?;
        if !page.in_bounds(bd) {
            return Err(SsError::BidegreeMismatch(format!("composite at {bd} lies outside the bounds")));
        }
        if !page.is_cycle(bd, &value)? {
            // Find the first page on which the product stops being a cycle.
            let mut witness = String::new();
            for q in 1..r {
                let pq = self.page(a.sphere, q + 1)?;
                if !pq.is_cycle(bd, &value)? {
                    let class = PageClass {
                        sphere: a.sphere,
                        page: q,
                        bidegree: bd,
                        representative: value.clone(),
                    };
                    let d = self.differential(&class)?;
                    witness = match d {
                        Some(d) => format!("d^{q}[{value}] = {d}"),
                        None => format!("d^{q}[{value}] is not zero"),
                    };
                    break;
                }
            }
            return Err(SsError::NotACycle(format!(
                "[{value}] at {bd} over S^{} is not in Z^{r}: {witness}",
                a.sphere
            )));
        }
        Ok(PageClass {
            sphere: a.sphere,
            page: r,
            bidegree: bd,
            representative: value,
        })
    }
}

enum Candidate {
    New,
    Redundant,
    Skip(String),
}

fn bidegree_of(sphere: u32, x: &Element) -> Result<Bidegree, SsError> {
    match (x.length(), x.degree()) {
        (Some(k), Some(d)) => Ok(Bidegree::new(k, sphere + d)),
        _ => Err(SsError::BidegreeMismatch(format!("[{x}] is not bihomogeneous"))),
    }
}

fn check_homogeneous(sphere: u32, b: Bidegree, x: &Element, ctx: &PrimeContext) -> Result<(), SsError> {
    if b.m < sphere {
        return Err(SsError::BidegreeMismatch(format!("{b} lies below S^{sphere}")));
    }
    SphereElement::new(sphere, x.clone(), b.k, b.m - sphere)
        .map(|_| ())
        .map_err(|e| SsError::BidegreeMismatch(format!("[{x}] at {b} over S^{sphere} (p={}): {e}", ctx.p())))
}

fn differential_from(
    page: &PageState,
    diffs: &BTreeMap<Bidegree, DiffBlock>,
    b: Bidegree,
    coords: &[u32],
    bounds: Bounds,
) -> Result<Option<Element>, SsError> {
    let r = page.r;
    let Some(t) = b.target(r) else {
        return Ok(Some(Element::zero(page.ctx())));
    };
    if t.k > bounds.max_length {
        return Ok(None);
    }
    let Some(block) = diffs.get(&b) else {
        return Ok(Some(Element::zero(page.ctx())));
    };
    if block.target_dim == 0 {
        return Ok(Some(Element::zero(page.ctx())));
    }
    if !block.is_known(coords, page.ctx()) {
        return Ok(None);
    }
    let image = block.apply(coords, page.ctx());
    Ok(Some(page.lift(t, &image.to_dense(block.target_dim))))
}

fn extend_cache(
    cache: &mut SphereCache,
    ctx: &PrimeContext,
    sphere: u32,
    bounds: Bounds,
    ledger: &[Assertion],
    r: u32,
) -> Result<(), SsError> {
    if cache.pages.is_empty() {
        cache.pages.push(build_page1(sphere, bounds, ctx));
    }
    while cache.pages.len() < r as usize {
        let q = cache.pages.len();
        if cache.diffs.len() < q {
            let page = &cache.pages[q - 1];
            let d = if q == 1 {
                intrinsic_d1(page)
            } else {
                page_differential(page, ledger)?
            };
            check_d_squared(page, &d)?;
            cache.diffs.push(d);
        }
        let next = next_page(&cache.pages[q - 1], &cache.diffs[q - 1])?;
        cache.pages.push(next);
    }
    Ok(())
}

/// Assemble `d^r` (`r ≥ 2`) from the ledger: solve for the linear map on
/// the span of asserted sources and set it to zero on the remaining basis
/// classes.
fn page_differential(page: &PageState, ledger: &[Assertion]) -> Result<BTreeMap<Bidegree, DiffBlock>, SsError> {
    if page.r == 1 {
        return Ok(intrinsic_d1(page));
    }
    let ctx = page.ctx();
    let r = page.r;
    let mut by_source: BTreeMap<Bidegree, Vec<&Assertion>> = BTreeMap::new();
    for a in ledger.iter().filter(|a| !a.deleted && a.sphere == page.sphere && a.page == r) {
        by_source.entry(a.source_bidegree).or_default().push(a);
    }
    let mut out = BTreeMap::new();
    for cell in page.cells() {
        let b = cell.bidegree;
        let asserted = by_source.remove(&b).unwrap_or_default();
        let Some(t) = b.target(r).filter(|t| page.in_bounds(*t)) else {
            if let Some(a) = asserted.first() {
                return Err(SsError::BidegreeMismatch(format!("assertion {} maps out of the bounds", a.id)));
            }
            continue;
        };
        let ds = cell.dim();
        let dt = page.dim(t);
        if ds == 0 && asserted.is_empty() {
            continue;
        }
        let mut ech = Echelon::new(ctx);
        for a in &asserted {
            let sigma = page.coords_of(b, &a.source)?.ok_or_else(|| {
                SsError::UnknownClass(format!("assertion {}: [{}] is not a class of E^{r}", a.id, a.source))
            })?;
            let tau = page.coords_of(t, &a.target)?.ok_or_else(|| {
                SsError::IncompleteDifferential(format!(
                    "assertion {}: target [{}] is not a class of E^{r}",
                    a.id, a.target
                ))
            })?;
            let mut pairs: Vec<(u32, u32)> = sigma.iter().enumerate().map(|(i, &c)| (i as u32, c)).collect();
            pairs.extend(tau.iter().enumerate().map(|(i, &c)| ((ds + i) as u32, c)));
            ech.insert(SparseVec::from_pairs(pairs, ctx));
        }
        let rows = ech.into_rref();
        let mut columns = vec![SparseVec::new(); ds];
        let mut pivot = vec![false; ds];
        let mut known = Vec::new();
        for row in &rows {
            let (lead, _) = row.leading().unwrap();
            if lead as usize >= ds {
                let ids: Vec<String> = asserted.iter().map(|a| a.id.to_string()).collect();
                return Err(SsError::ConflictingAssertion(format!(
                    "assertions {} over S^{} at {b} on page {r} are inconsistent",
                    ids.join(", "),
                    page.sphere
                )));
            }
            let c = lead as usize;
            pivot[c] = true;
            let tau: Vec<(u32, u32)> = row
                .entries()
                .iter()
                .filter(|e| e.0 as usize >= ds)
                .map(|&(i, v)| (i - ds as u32, v))
                .collect();
            columns[c] = SparseVec::from_pairs(tau, ctx);
            let sigma: Vec<(u32, u32)> = row.entries().iter().filter(|e| (e.0 as usize) < ds).copied().collect();
            known.push(SparseVec::from_pairs(sigma, ctx));
        }
        let assumed = if dt == 0 {
            Vec::new()
        } else {
            (0..ds).filter(|&j| !pivot[j]).collect()
        };
        out.insert(
            b,
            DiffBlock {
                target: t,
                columns,
                target_dim: dt,
                assumed,
                known: if dt == 0 { None } else { Some(known) },
            },
        );
    }
    if let Some((b, list)) = by_source.into_iter().next() {
        return Err(SsError::BidegreeMismatch(format!(
            "assertion {} has source {b}, where E^1(S^{}) is empty",
            list[0].id, page.sphere
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(max_m: u32) -> Session {
        let ctx = PrimeContext::new(3).unwrap();
        Session::new(&ctx, vec![2], Bounds { max_m, max_length: 6 }, SignMode::Derivation)
    }

    fn el(s: &Session, t: &str) -> Element {
        Element::parse(t, s.ctx()).unwrap()
    }

    #[test]
    fn page_one_and_two_on_s2() {
        let mut s = session(12);
        let p1 = s.page(2, 1).unwrap();
        assert_eq!(p1.class_elements(Bidegree::new(1, 6))[0].to_string(), "1 m1");
        assert_eq!(p1.dim(Bidegree::new(0, 2)), 1);
        let p2 = s.page(2, 2).unwrap();
        assert_eq!(p2.dim(Bidegree::new(1, 5)), 1);
        assert_eq!(p2.dim(Bidegree::new(1, 6)), 0);
        assert_eq!(p2.dim(Bidegree::new(2, 5)), 0);
    }

    #[test]
    fn assertion_errors() {
        let mut s = session(12);
        let l1 = el(&s, "l1");
        let zero = Element::zero(s.ctx());
        // Target bidegree (3, 4) has no E^1 basis over S^2.
        let bad = el(&s, "l1 l1");
        assert!(matches!(
            s.assert_differential(2, 2, &l1, &bad, ""),
            Err(SsError::BidegreeMismatch(_))
        ));
        let id = s.assert_differential(2, 2, &l1, &zero, "zero").unwrap();
        assert_eq!(s.ledger()[0].id, id);
        s.delete_assertion(id).unwrap();
        assert!(s.ledger()[0].deleted);
        assert!(matches!(s.delete_assertion(id), Err(SsError::UnknownAssertion(_))));
    }

    #[test]
    fn compose_example() {
        let mut s = session(12);
        let a = s.class(2, 2, &el(&s, "l1")).unwrap();
        let b = s.class(5, 2, &el(&s, "l1")).unwrap();
        let c = s.compose_classes(&a, &b).unwrap();
        assert_eq!(c.bidegree, Bidegree::new(2, 8));
        assert_eq!(c.representative.to_string(), "1 l1 l1");
        let iota = s.class(5, 2, &Element::one(s.ctx())).unwrap();
        assert_eq!(s.compose_classes(&a, &iota).unwrap().representative, a.representative);
        let wrong = s.class(4, 2, &el(&s, "l1")).unwrap();
        assert!(matches!(s.compose_classes(&a, &wrong), Err(SsError::NotComposable(_))));
    }

    #[test]
    fn leibniz_at_page_one_matches_d() {
        let mut s = session(14);
        let prop = s.leibniz_propagate(2, 1, Some(SignMode::Derivation)).unwrap();
        assert!(!prop.values.is_empty());
        assert!(prop.discrepancies.is_empty());
        let paper = s.leibniz_propagate(2, 1, Some(SignMode::Paper)).unwrap();
        assert!(!paper.discrepancies.is_empty());
        assert!(paper.discrepancies.iter().all(|d| d.kind != DiscrepancyKind::Other));
        assert!(paper.discrepancies.iter().any(|d| d.kind == DiscrepancyKind::MiddleSignFlip));
    }
}
