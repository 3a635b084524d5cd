use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lambda_sseq::chart::page_chart;
use lambda_sseq::lambda::d_element;
use lambda_sseq::ss::{Bidegree, Bounds, PageClass, PageState, Provenance, Session, SignMode, SsError};
use lambda_sseq::{Element, PrimeContext};

fn session(spheres: Vec<u32>, max_m: u32, max_length: usize) -> Session {
    let ctx = PrimeContext::new(3).unwrap();
    Session::new(&ctx, spheres, Bounds { max_m, max_length }, SignMode::Derivation)
}

fn el(s: &Session, t: &str) -> Element {
    Element::parse(t, s.ctx()).unwrap()
}

fn labels(page: &PageState, b: Bidegree) -> Vec<String> {
    page.class_elements(b).iter().map(|e| e.to_string()).collect()
}

#[test]
fn page_one_bases_over_s2() {
    let mut s = session(vec![2], 12, 4);
    let p1 = s.page(2, 1).unwrap();
    assert_eq!(labels(p1, Bidegree::new(1, 2)), ["1 m0"]);
    assert_eq!(labels(p1, Bidegree::new(1, 5)), ["1 l1"]);
    assert_eq!(labels(p1, Bidegree::new(1, 6)), ["1 m1"]);
    assert_eq!(labels(p1, Bidegree::new(0, 2)), ["1 1"]);
    for m in 3..=12 {
        assert_eq!(p1.dim(Bidegree::new(0, m)), 0);
    }
    let mu1 = s.class(2, 1, &el(&s, "m1")).unwrap();
    let d = s.differential(&mu1).unwrap().unwrap();
    assert_eq!(d.to_string(), "2 l1 m0");
    assert_eq!(s.class(2, 1, &d).unwrap().bidegree, Bidegree::new(2, 5));
}

#[test]
fn second_page_over_s2() {
    let mut s = session(vec![2], 12, 4);
    let p2 = s.page(2, 2).unwrap();
    assert_eq!(p2.dim(Bidegree::new(1, 5)), 1);
    assert_eq!(labels(p2, Bidegree::new(1, 5)), ["1 l1"]);
    assert_eq!(p2.dim(Bidegree::new(1, 6)), 0);
    assert_eq!(p2.dim(Bidegree::new(2, 5)), 0);
}

#[test]
fn empty_bounds_give_empty_pages() {
    let mut s = session(vec![5], 3, 4);
    let chart = page_chart(&mut s, 5, 1).unwrap();
    assert!(chart.dots.is_empty());
    assert!(chart.arrows.is_empty());
}

#[test]
fn assertion_validation() {
    let mut s = session(vec![2], 12, 6);
    let l1 = el(&s, "l1");
    let zero = Element::zero(s.ctx());
    // E^2 is zero at (3, 4), the target of d^2 on [λ_1].
    let e = s.assert_differential(2, 2, &l1, &el(&s, "l1 l1 l1"), "").unwrap_err();
    assert!(matches!(e, SsError::BidegreeMismatch(_) | SsError::UnknownClass(_)), "{e}");
    assert!(matches!(s.assert_differential(2, 1, &l1, &zero, ""), Err(SsError::BadPage(1))));
    assert!(matches!(
        s.assert_differential(2, 2, &el(&s, "m1"), &zero, ""),
        Err(SsError::UnknownClass(_))
    ));
    assert!(matches!(s.assert_differential(1, 2, &l1, &zero, ""), Err(SsError::BadSphere(1))));
    let rev = s.revision();
    let id = s.assert_differential(2, 2, &l1, &zero, "user zero").unwrap();
    assert!(s.revision() > rev);
    let a = &s.ledger()[0];
    assert_eq!((a.id, a.provenance, a.source_bidegree), (id, Provenance::User, Bidegree::new(1, 5)));
    let chart = page_chart(&mut s, 2, 2).unwrap();
    assert_eq!(chart.arrows.len(), 1);
    assert!(chart.arrows[0].zero);
    s.delete_assertion(id).unwrap();
    assert!(page_chart(&mut s, 2, 2).unwrap().arrows.is_empty());
    assert!(matches!(s.delete_assertion(id), Err(SsError::UnknownAssertion(_))));
    assert!(matches!(s.delete_assertion(999), Err(SsError::UnknownAssertion(_))));
}

#[test]
fn leibniz_example_at_page_one() {
    let mut s = session(vec![2, 4], 12, 4);
    for mode in [SignMode::Derivation, SignMode::Paper] {
        let prop = s.leibniz_propagate(2, 1, Some(mode)).unwrap();
        let v = prop
            .values
            .iter()
            .find(|v| v.a.representative.to_string() == "1 l1" && v.b.representative.to_string() == "1 l2")
            .expect("λ_1 ⊙ σλ_2 is propagated");
        assert_eq!(v.b.sphere, 4);
        assert_eq!(v.product.bidegree, Bidegree::new(2, 12));
        let want = if mode == SignMode::Derivation { "2 l1 l1 l1" } else { "1 l1 l1 l1" };
        assert_eq!(v.value.to_string(), want, "{mode:?}");
        assert_eq!(d_element(&v.product.representative).to_string(), "2 l1 l1 l1");
        for v in &prop.values {
            if v.first_term.is_zero() && v.middle_term.is_zero() {
                assert!(v.value.is_zero());
            }
        }
    }
}

// The page-2 fixtures below were found by scanning bounds m ≤ 20, k ≤ 8.
fn page2_fixture(sphere: u32) -> (Session, Element, Element) {
    let mut s = session(vec![2, 3], 20, 8);
    let b = Bidegree::new(6, 20);
    let page = s.page(sphere, 2).unwrap().clone();
    let x = page.class_elements(b)[0].clone();
    let y = page.class_elements(b.target(2).unwrap())[0].clone();
    (s, x, y)
}

#[test]
fn leibniz_adds_derived_assertions_on_page_two() {
    let (mut s, x, y) = page2_fixture(2);
    assert_eq!(x.to_string(), "1 l1 l1 l1 l1 l1 l1");
    s.assert_differential(2, 2, &x, &y, "probe").unwrap();
    let prop = s.leibniz_propagate(2, 2, None).unwrap();
    assert!(!prop.added.is_empty());
    assert!(prop.values.iter().any(|v| !v.value.is_zero()));
    for id in &prop.added {
        let a = s.ledger().iter().find(|a| a.id == *id).unwrap();
        assert_eq!(a.provenance, Provenance::Leibniz);
        assert_eq!(a.target_bidegree(), a.source_bidegree.target(2).unwrap());
    }
    let again = s.leibniz_propagate(2, 2, None).unwrap();
    assert!(again.added.is_empty());
    let chart = page_chart(&mut s, 2, 2).unwrap();
    let leibniz = chart.arrows.iter().filter(|a| a.provenance == Provenance::Leibniz).count();
    assert_eq!(leibniz, prop.added.len());
}

#[test]
fn leibniz_conflict_with_a_user_value() {
    let (mut s, x, y) = page2_fixture(3);
    s.assert_differential(3, 2, &x, &y, "contradicts the rule").unwrap();
    let before = s.ledger().len();
    let e = s.leibniz_propagate(3, 2, None).unwrap_err();
    assert!(matches!(e, SsError::PropagationConflict(_)), "{e}");
    assert_eq!(s.ledger().len(), before);
}

#[test]
fn composition_of_classes() {
    let mut s = session(vec![2, 5], 12, 6);
    let a = s.class(2, 2, &el(&s, "l1")).unwrap();
    let iota = s.class(5, 2, &Element::one(s.ctx())).unwrap();
    assert_eq!(s.compose_classes(&a, &iota).unwrap().representative, a.representative);
    let b = s.class(5, 2, &el(&s, "l1")).unwrap();
    let ab = s.compose_classes(&a, &b).unwrap();
    assert_eq!((ab.bidegree, ab.representative.to_string()), (Bidegree::new(2, 8), "1 l1 l1".to_string()));
    // λ_2 over S^5 has ∂λ_2 = λ_1λ_1 ≠ 0, so it is not a page-2 class.
    assert!(s.class(5, 2, &el(&s, "l2")).is_err());
    let wrong = s.class(4, 2, &el(&s, "l1")).unwrap();
    assert!(matches!(s.compose_classes(&a, &wrong), Err(SsError::NotComposable(_))));
}

#[test]
fn composition_is_right_distributive_on_classes() {
    let mut s = session(vec![2, 3], 16, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..400 {
        let n = rng.gen_range(2..4u32);
        let as_ = s.basis_classes(n, 1).unwrap();
        let a = as_[rng.gen_range(0..as_.len())].clone();
        let bs = s.basis_classes(a.bidegree.m, 1).unwrap();
        let at = |b: Bidegree| bs.iter().filter(|c| c.bidegree == b).cloned().collect::<Vec<_>>();
        let b1 = bs[rng.gen_range(0..bs.len())].clone();
        let same = at(b1.bidegree);
        let b2 = same[rng.gen_range(0..same.len())].clone();
        let (c1, c2) = (rng.gen_range(0..3u32), rng.gen_range(0..3u32));
        let sum = PageClass {
            representative: b1.representative.scale(c1).add(&b2.representative.scale(c2)),
            ..b1.clone()
        };
        let lhs = match s.compose_classes(&a, &sum) {
            Ok(c) => c.representative,
            Err(SsError::BidegreeMismatch(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let r1 = s.compose_classes(&a, &b1).unwrap().representative;
        let r2 = s.compose_classes(&a, &b2).unwrap().representative;
        assert_eq!(lhs, r1.scale(c1).add(&r2.scale(c2)));
        checked += 1;
    }
    assert!(checked > 100, "{checked}");
}

#[test]
fn suspension_commutes_with_page_one() {
    let mut s = session(vec![2, 3, 4, 5, 6], 16, 5);
    for n in 2..=5u32 {
        for x in s.basis_classes(n, 1).unwrap() {
            if x.bidegree.m == s.bounds().max_m {
                continue;
            }
            let sx = s.class(n + 1, 1, &x.representative).unwrap();
            assert_eq!(sx.bidegree, Bidegree::new(x.bidegree.k, x.bidegree.m + 1));
            let dx = s.differential(&x).unwrap();
            let dsx = s.differential(&sx).unwrap();
            assert_eq!(dx, dsx, "S^{n} [{}]", x.representative);
        }
    }
}

#[test]
fn truncation_flags_follow_the_rule() {
    let mut s = session(vec![2, 3], 14, 5);
    let b = s.bounds();
    for n in [2u32, 3] {
        for r in 1..=4u32 {
            let page = s.page(n, r).unwrap().clone();
            for cell in page.cells() {
                let (k, m) = (cell.bidegree.k, cell.bidegree.m);
                let want = r >= 2 && (k + r as usize - 1 > b.max_length || (m == b.max_m && k >= 1));
                assert_eq!(cell.truncated, want, "S^{n} E^{r} (k={k}, m={m})");
                assert_eq!(PageState::truncated_at(b, r, cell.bidegree), want);
            }
        }
    }
}

#[test]
fn differential_squares_to_zero_on_computed_pages() {
    let (mut s, x, y) = page2_fixture(2);
    s.assert_differential(2, 2, &x, &y, "").unwrap();
    s.leibniz_propagate(2, 2, None).unwrap();
    for r in 1..=3u32 {
        for c in s.basis_classes(2, r).unwrap() {
            let Some(d) = s.differential(&c).unwrap() else { continue };
            if d.is_zero() {
                continue;
            }
            let t = c.bidegree.target(r).unwrap();
            let dc = s.class_at(2, r, t, &d).unwrap();
            if let Some(dd) = s.differential(&dc).unwrap() {
                assert!(dd.is_zero(), "E^{r}: d d [{}] = {dd}", c.representative);
            }
        }
    }
}
