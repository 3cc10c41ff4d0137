use btq::grouphom::{exponent_bound_check, group_homology, harvest, harvest_json, FiniteGroup, SignCharacter};
use btq::quotient::{build_quotient, GroupSpec, QuotientOptions};
use btq::simplicial::AbelianGroup;

fn h(g: &FiniteGroup, s: usize) -> AbelianGroup {
    group_homology(g, &SignCharacter::trivial(g), s).unwrap()
}

fn small_groups() -> Vec<(&'static str, FiniteGroup)> {
    vec![
        ("Z/2", FiniteGroup::cyclic(2)),
        ("Z/3", FiniteGroup::cyclic(3)),
        ("Z/4", FiniteGroup::cyclic(4)),
        ("Z/6", FiniteGroup::cyclic(6)),
        ("(Z/2)^2", FiniteGroup::elementary_abelian(2, 2)),
        ("heis(2)", FiniteGroup::heisenberg(2)),
    ]
}

#[test]
fn degree_zero() {
    for (name, g) in small_groups() {
        assert_eq!(h(&g, 0), AbelianGroup::free(1), "{name}");
        for chi in g.sign_characters().into_iter().filter(|c| !c.is_trivial()) {
            // coinvariants Z/(χ(g) − 1)Z = Z/2
            assert_eq!(group_homology(&g, &chi, 0).unwrap(), AbelianGroup::from_cyclic(0, &[2]), "{name}");
        }
    }
}

/// H_1 is the abelianization: its order is |G| / |[G, G]|.
#[test]
fn degree_one_is_the_abelianization() {
    for (name, g) in small_groups() {
        let n = g.order();
        let comm: Vec<usize> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| g.mul(g.mul(g.inv(x), g.inv(y)), g.mul(x, y)))
            .collect();
        let derived = g.generated(&comm).len();
        assert_eq!(h(&g, 1).order(), Some((n / derived) as u64), "{name}");
    }
}

#[test]
fn kunneth_in_degree_one() {
    let gs = [FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4)];
    for a in &gs {
        for b in &gs {
            let p = a.direct_product(b);
            assert_eq!(h(&p, 1), h(a, 1).direct_sum(&h(b, 1)));
        }
    }
}

#[test]
fn sign_characters_are_the_homs_to_plus_minus_one() {
    assert_eq!(FiniteGroup::elementary_abelian(2, 3).sign_characters().len(), 8);
    assert_eq!(FiniteGroup::cyclic(4).sign_characters().len(), 2);
    assert_eq!(FiniteGroup::cyclic(3).sign_characters().len(), 1);
    for (_, g) in small_groups() {
        for chi in g.sign_characters() {
            assert!(SignCharacter::new(&g, chi.values.clone()).is_ok());
        }
    }
}

#[test]
fn elementary_abelian_bounds() {
    for p in [2usize, 3] {
        for k in 1..=3 {
            let g = FiniteGroup::elementary_abelian(p, k);
            for chi in g.sign_characters() {
                for s in 1..=2 {
                    let v = exponent_bound_check(&g, &chi, s, None).unwrap();
                    assert_eq!(v.ell, 1);
                    assert!(v.killed, "(Z/{p})^{k}, s = {s}: {}", v.homology);
                }
            }
        }
    }
    // H_2((Z/p)^k) has rank k(k−1)/2 over F_p
    assert_eq!(h(&FiniteGroup::elementary_abelian(3, 3), 2), AbelianGroup::from_cyclic(0, &[3, 3, 3]));
}

#[test]
fn cyclic_pattern_in_low_degrees() {
    for n in [2usize, 3, 4, 5] {
        let g = FiniteGroup::cyclic(n);
        assert_eq!(h(&g, 1), AbelianGroup::from_cyclic(0, &[n as u64]));
        assert!(h(&g, 2).is_trivial());
    }
}

#[test]
fn oversized_bar_complexes_are_refused() {
    let g = FiniteGroup::elementary_abelian(2, 5);
    assert!(matches!(group_homology(&g, &SignCharacter::trivial(&g), 3), Err(btq::Error::BudgetExceeded(_))));
}

#[test]
fn harvested_stabilizers_satisfy_both_bounds() {
    for (q, d, ideal, alpha) in [(2u32, 2usize, "t", 4i64), (3, 2, "t", 4), (2, 2, "t^2+t+1", 4)] {
        let g = GroupSpec::parse(q, d, ideal).unwrap();
        let opts = QuotientOptions { stab_element_cap: 16, ..Default::default() };
        let quot = build_quotient(&g, alpha, &opts).unwrap();
        let verdicts = harvest(&quot, 16, 2).unwrap();
        assert!(!verdicts.is_empty());
        assert!(verdicts.iter().all(|v| v.passed()), "q = {q}, m = {ideal}");
        // through the JSON export
        let json: btq::quotient::QuotientJson =
            serde_json::from_str(&serde_json::to_string(&quot.to_json().unwrap()).unwrap()).unwrap();
        assert_eq!(harvest_json(&json, 16, 2).unwrap(), verdicts);
    }
}
