mod common;

use btq::building::Apartment;
use btq::exactring::{KElem, Mat, MatA, Poly};
use btq::quotient::{build_quotient, transition_between, GroupSpec, OrbitEngine, QuotientComplex, QuotientOptions};
use btq::simplicial::Chain;
use btq::symbols::{chambers_within, ms_lattice, GeneratorStream, RelativeClass, StreamBudget, SymbolEngine};
use common::{random_gamma, random_poly, rng, TestRng};
use itertools::Itertools;
use rand::seq::SliceRandom;

fn quotient(q: u32, d: usize, ideal: &str, alpha: i64) -> QuotientComplex {
    build_quotient(&GroupSpec::parse(q, d, ideal).unwrap(), alpha, &QuotientOptions::default()).unwrap()
}

fn random_vector(r: &mut TestRng, p: u32, d: usize, deg: i64) -> Vec<Poly> {
    loop {
        let v: Vec<Poly> = (0..d).map(|_| random_poly(r, p, deg)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

fn rows_of(vs: &[&Vec<Poly>]) -> MatA {
    Mat::from_rows(vs.iter().map(|v| (*v).clone()).collect())
}

fn boundary_in_truncation(quot: &QuotientComplex, ch: &Chain) -> bool {
    let b = quot.complex.boundary(ch);
    b.entries.keys().all(|&f| quot.truncated.contains(ch.dim - 1, f))
}

#[test]
fn full_group_symbol_vanishes() {
    let quot = quotient(2, 2, "1", 4);
    let mut e = SymbolEngine::new(&quot).unwrap();
    let id = Mat::identity(2, &Poly::one(2));
    // the two half-apartments fold onto the half-line with opposite
    // orientations
    let ch = e.chain_a(&id).unwrap();
    assert!(ch.is_zero());
    assert!(boundary_in_truncation(&quot, &ch));
    assert!(e.class_of(&ch).unwrap().coords.is_empty());
}

#[test]
fn degenerate_tuples_give_zero() {
    let quot = quotient(2, 2, "t", 4);
    let mut e = SymbolEngine::new(&quot).unwrap();
    let v = vec![Poly::one(2), Poly::t(2)];
    assert!(e.chain_a(&rows_of(&[&v, &v])).unwrap().is_zero());
    let z = vec![Poly::zero(2), Poly::zero(2)];
    assert!(e.chain_a(&rows_of(&[&v, &z])).unwrap().is_zero());
}

#[test]
fn swapping_the_standard_basis_negates() {
    let quot = quotient(2, 2, "t", 4);
    let mut e = SymbolEngine::new(&quot).unwrap();
    let (e1, e2) = (vec![Poly::one(2), Poly::zero(2)], vec![Poly::zero(2), Poly::one(2)]);
    let a = e.symbol_a(&rows_of(&[&e1, &e2])).unwrap();
    let b = e.symbol_a(&rows_of(&[&e2, &e1])).unwrap();
    assert!(!a.is_zero());
    assert!(a.plus(&b, 1).is_zero());
}

#[test]
fn permutations_act_by_their_sign() {
    let mut r = rng(21);
    let quot = quotient(2, 3, "t", 3);
    let mut e = SymbolEngine::new(&quot).unwrap();
    for _ in 0..4 {
        let vs: Vec<Vec<Poly>> = (0..3).map(|_| random_vector(&mut r, 2, 3, 1)).collect();
        let base = e.symbol_a(&rows_of(&vs.iter().collect_vec())).unwrap();
        let mut perm: Vec<usize> = (0..3).collect();
        perm.shuffle(&mut r);
        let sign = if btq::simplicial::permutation_parity(&perm) { -1 } else { 1 };
        let moved = e.symbol_a(&rows_of(&perm.iter().map(|&i| &vs[i]).collect_vec())).unwrap();
        assert_eq!(moved, RelativeClass { alpha: 3, coords: base.coords.iter().map(|c| sign * c).collect() });
    }
}

#[test]
fn scaling_a_vector_by_a_field_element_is_invisible() {
    let mut r = rng(22);
    let quot = quotient(2, 2, "t", 4);
    let mut e = SymbolEngine::new(&quot).unwrap();
    let s = KElem::new(Poly::parse("t^2+1", 2).unwrap(), Poly::parse("t+1", 2).unwrap()).unwrap();
    for _ in 0..10 {
        let vs: Vec<Vec<Poly>> = (0..2).map(|_| random_vector(&mut r, 2, 2, 2)).collect();
        let b = rows_of(&vs.iter().collect_vec()).to_k();
        let mut scaled = b.clone();
        for j in 0..2 {
            scaled[(0, j)] = &b[(0, j)] * &s;
        }
        assert_eq!(e.symbol(&b).unwrap(), e.symbol(&scaled).unwrap());
    }
}

#[test]
fn three_term_relation_in_rank_two() {
    let mut r = rng(23);
    for (q, ideal) in [(2u32, "t"), (3, "t"), (2, "t^2+t+1")] {
        let quot = quotient(q, 2, ideal, 4);
        let mut e = SymbolEngine::new(&quot).unwrap();
        for _ in 0..15 {
            let v: Vec<Vec<Poly>> = (0..3).map(|_| random_vector(&mut r, q, 2, 1)).collect();
            let s = |e: &mut SymbolEngine, i: usize, j: usize| e.symbol_a(&rows_of(&[&v[i], &v[j]])).unwrap();
            let total = s(&mut e, 1, 2).plus(&s(&mut e, 0, 2), -1).plus(&s(&mut e, 0, 1), 1);
            assert!(total.is_zero(), "q = {q}, m = {ideal}");
        }
    }
}

#[test]
fn four_term_relation_in_rank_three() {
    let mut r = rng(24);
    let quot = quotient(2, 3, "t", 3);
    let mut e = SymbolEngine::new(&quot).unwrap();
    for _ in 0..4 {
        let v: Vec<Vec<Poly>> = (0..4).map(|_| random_vector(&mut r, 2, 3, 1)).collect();
        let mut total = RelativeClass { alpha: 3, coords: vec![0; e.homology.rank()] };
        for skip in 0..4 {
            let rest = (0..4).filter(|&i| i != skip).map(|i| &v[i]).collect_vec();
            let sign = if skip % 2 == 0 { 1 } else { -1 };
            total = total.plus(&e.symbol_a(&rows_of(&rest)).unwrap(), sign);
        }
        assert!(total.is_zero());
    }
}

#[test]
fn symbols_are_invariant_under_the_group() {
    let mut r = rng(25);
    for (q, d, ideal, alpha) in [(2u32, 2usize, "t", 4i64), (3, 2, "t+1", 4), (2, 3, "t", 3)] {
        let quot = quotient(q, d, ideal, alpha);
        let mut e = SymbolEngine::new(&quot).unwrap();
        for _ in 0..4 {
            let b = rows_of(&(0..d).map(|_| random_vector(&mut r, q, d, 1)).collect_vec().iter().collect_vec());
            let gamma = random_gamma(&mut r, &quot.group, 3);
            // vectors are rows, so γ acts from the right by γ^T
            let moved = b.mul(&gamma.transpose());
            assert_eq!(e.symbol_a(&b).unwrap(), e.symbol_a(&moved).unwrap());
        }
    }
}

#[test]
fn chains_are_relative_cycles() {
    let mut r = rng(26);
    for (q, d, ideal, alpha) in [(2u32, 2usize, "t^2", 4i64), (2, 3, "t", 3)] {
        let quot = quotient(q, d, ideal, alpha);
        let mut e = SymbolEngine::new(&quot).unwrap();
        for _ in 0..5 {
            let b = rows_of(&(0..d).map(|_| random_vector(&mut r, q, d, 2)).collect_vec().iter().collect_vec());
            let ch = e.chain_a(&b).unwrap();
            assert!(boundary_in_truncation(&quot, &ch));
        }
    }
}

/// Chambers just outside the visited window are truncated, which is what
/// makes the window complete.
#[test]
fn chambers_beyond_the_window_are_truncated() {
    let mut r = rng(27);
    for (q, d, alpha) in [(2u32, 2usize, 4i64), (3, 2, 3), (2, 3, 3)] {
        let g = GroupSpec::full(q, d).unwrap();
        let mut eng = OrbitEngine::new(g);
        for _ in 0..3 {
            let rows: Vec<Vec<Poly>> = (0..d).map(|_| random_vector(&mut r, q, d, 1)).collect();
            let Ok(apt) = Apartment::from_rows(Mat::from_rows(rows)) else { continue };
            let reach = alpha + apt.defect();
            let inner: std::collections::HashSet<_> = chambers_within(d, reach)
                .unwrap()
                .into_iter()
                .map(|c| c.iter().map(|v| v.iter().map(|x| x - v[d - 1]).collect_vec()).sorted().collect_vec())
                .collect();
            for ch in chambers_within(d, reach + 2).unwrap() {
                let key = ch.iter().map(|v| v.iter().map(|x| x - v[d - 1]).collect_vec()).sorted().collect_vec();
                if inner.contains(&key) {
                    continue;
                }
                let vd: Vec<_> = ch.iter().map(|n| eng.vertex(&apt.vertex_matrix(n)).unwrap()).collect();
                assert!((0..d - 1).any(|i| vd.iter().all(|v| v.dp[i] >= alpha)));
            }
        }
    }
}

#[test]
fn classes_follow_the_alpha_transition() {
    let mut r = rng(28);
    let g = GroupSpec::parse(2, 2, "t^2+t+1").unwrap();
    let lo = build_quotient(&g, 4, &QuotientOptions::default()).unwrap();
    let hi = build_quotient(&g, 5, &QuotientOptions::default()).unwrap();
    let t = transition_between(&hi, &lo).unwrap();
    assert!(t.iso);
    let (mut el, mut eh) = (SymbolEngine::new(&lo).unwrap(), SymbolEngine::new(&hi).unwrap());
    for _ in 0..8 {
        let b = rows_of(&(0..2).map(|_| random_vector(&mut r, 2, 2, 1)).collect_vec().iter().collect_vec());
        let (x, y) = (eh.symbol_a(&b).unwrap(), el.symbol_a(&b).unwrap());
        let image: Vec<i64> =
            (0..t.target_rank).map(|i| (0..t.source_rank).map(|k| t.matrix[k][i] * x.coords[k]).sum()).collect();
        assert_eq!(image, y.coords);
    }
}

#[test]
fn unimodular_and_all_bases_streams_agree() {
    for (q, ideal) in [(2u32, "t"), (2, "t+1")] {
        let quot = quotient(q, 2, ideal, 4);
        let uni = ms_lattice(&quot, &GeneratorStream::Unimodular, &StreamBudget::default()).unwrap();
        let all = ms_lattice(&quot, &GeneratorStream::AllBases { max_deg: 3 }, &StreamBudget::default()).unwrap();
        assert!(all.stabilized);
        assert!(uni.generators.iter().all(|v| all.span.contains(v)));
        assert!(all.generators.iter().all(|v| uni.span.contains(v)));
        assert_eq!(uni.rank(), uni.homology_rank);
    }
}

#[test]
fn tight_budget_reports_non_stabilization() {
    let quot = quotient(2, 2, "t", 4);
    let budget = StreamBudget { max_bases: 5, deadline: None };
    let err = ms_lattice(&quot, &GeneratorStream::AllBases { max_deg: 3 }, &budget).unwrap_err();
    assert!(matches!(err, btq::Error::NonStabilized(_)));
}
