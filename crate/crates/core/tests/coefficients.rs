use proptest::prelude::*;
use realspectra::bpr::*;
use realspectra::grading::{vbar_weight, Degree, Window, RHO};
use realspectra::module::{mult_map, weighted_exponents, Act, Cell, Kind, Monomial, MonoModule};
use std::collections::{BTreeMap, BTreeSet};

/// Brute-force closure of products of at most `depth` generators `a`, `v_m(j)`.
/// Elements are tracked as (monomial, 2-adic valuation of the coefficient).
fn generated(depth: usize, max_m: u32, max_j: i64) -> BTreeMap<Monomial, u32> {
    let mut gens: Vec<(Monomial, u32)> = vec![(Monomial::a_pow(1), 0)];
    for j in -max_j..=max_j {
        gens.push((Monomial::u_pow(j), 1));
        for m in 1..=max_m {
            gens.push((Monomial::vbar(m, 1).times(&Monomial::u_pow((1 << m) * j)), 0));
        }
    }
    let mut best: BTreeMap<Monomial, u32> = BTreeMap::new();
    best.insert(Monomial::one(), 0);
    let mut frontier = best.clone();
    for _ in 0..depth {
        let mut next = BTreeMap::new();
        for (m, v) in &frontier {
            for (g, gv) in &gens {
                let p = m.times(g);
                let val = v + gv;
                if is_zero_by_relations(&p) || (p.a > 0 && val > 0) {
                    continue;
                }
                if p.u.abs() > 24 || p.a > 12 || p.vbar_weight() > 24 {
                    continue;
                }
                if best.get(&p).is_none_or(|&b| val < b) {
                    best.insert(p.clone(), val);
                    next.insert(p, val);
                }
            }
        }
        frontier = next;
    }
    best
}

#[test]
fn membership_shortcut_matches_generation() {
    let gen = generated(12, 3, 3);
    let w = Window::square(5);
    for d in w.degrees() {
        let shortcut: BTreeSet<(Monomial, u32)> = basis_exact(d)
            .into_iter()
            .map(|c| (c.key, c.lattice.trailing_zeros()))
            .collect();
        let reached: BTreeSet<(Monomial, u32)> = gen
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, &v)| (m.clone(), v))
            .collect();
        assert_eq!(shortcut, reached, "degree {d}");
    }
}

#[test]
fn presentation_relations() {
    for m in 1..=4u32 {
        for n in -4..=4 {
            let x = CoeffElement::vbar_twisted(m, n);
            let a = CoeffElement::monomial(Monomial::a_pow((1 << (m + 1)) - 1), 1);
            assert!(a.multiply(&x).is_zero());
            let below = CoeffElement::monomial(Monomial::a_pow((1 << (m + 1)) - 2), 1);
            assert!(!below.multiply(&x).is_zero());
        }
    }
    for i in 0..=4u32 {
        for m in 0..=i {
            for j in -4..=4 {
                for n in -4..=4 {
                    let lhs = CoeffElement::vbar_twisted(i, j).multiply(&CoeffElement::vbar_twisted(m, n));
                    let rhs = CoeffElement::vbar_twisted(i, 0)
                        .multiply(&CoeffElement::vbar_twisted(m, (1 << (i - m)) * j + n));
                    assert_eq!(lhs, rhs, "i={i} m={m} j={j} n={n}");
                    assert!(lhs.is_member());
                }
            }
        }
    }
}

#[test]
fn brute_force_degree_two_minus_two() {
    // every ambient monomial with k + 4l = 4 and 2l + weight = 2
    let mut found = Vec::new();
    for l in -20..=1i64 {
        let k = 4 - 4 * l;
        let w = 2 - 2 * l;
        for c in weighted_exponents(1, 5, w) {
            let m = Monomial::new(k, l, c);
            if let Some(cell) = ring_cell(&m) {
                found.push(cell);
            }
        }
    }
    assert_eq!(found, vec![Cell::free(Monomial::u_pow(1), 2)]);
    assert_eq!(basis_exact(Degree::new(2, -2)), found);
}

#[test]
fn caps_are_certified() {
    assert!(basis_in_degree(Degree::new(14, 14), &Caps::with_n(2)).is_err());
    assert!(basis_in_degree(Degree::new(14, 14), &Caps::with_n(4)).is_ok());
    let small = Caps { n_vbar: 4, l_min: -1, l_max: 1 };
    assert!(basis_in_degree(Degree::new(-3, 13), &small).is_err());
}

#[test]
fn strong_evenness() {
    for k in -10..=10 {
        assert_eq!(group_in_degree(k * RHO - Degree::new(1, 0)), (0, 0));
        let e = quotient_entry(&[], k * RHO).unwrap().unwrap();
        if e.free_rank > 0 {
            assert_eq!(e.restriction_index, Some(1));
        }
    }
}

#[test]
fn rho_minus_four_five_six() {
    for k in -8..=8i64 {
        let count = |w: i64| {
            if w < 0 {
                return 0;
            }
            let mut n = 0;
            while vbar_weight(n + 1) <= w {
                n += 1;
            }
            weighted_exponents(1, n, w).len()
        };
        let e = quotient_entry(&[], k * RHO - Degree::new(4, 0)).unwrap().unwrap();
        // 2u^{-1} v^c with weight(c) = k - 2
        assert_eq!(e.free_rank, count(k - 2));
        assert_eq!(e.f2_rank, 0);
        if e.free_rank > 0 {
            assert_eq!(e.restriction_index, Some(2));
        }
        assert_eq!(group_in_degree(k * RHO - Degree::new(5, 0)), (0, 0));
        // a^2 v1(-1) v^c = a^2 u^{-2} v1 v^c sits in 3rho - 6, so weight(c) = k - 3
        let six = basis_exact(k * RHO - Degree::new(6, 0));
        assert!(six.iter().all(|c| c.kind == Kind::Tors && c.key.a == 2 && c.key.u == -2 && c.key.c(1) >= 1));
        assert_eq!(six.len(), count(k - 3));
    }
}

#[test]
fn rho_plus_one_is_a_times_polynomials() {
    // a v^c has degree (w - 1)rho + 1 for weight(c) = w
    for k in -1..=10i64 {
        let b = basis_exact(k * RHO + Degree::new(1, 0));
        let mut n = 0;
        while vbar_weight(n + 1) <= k + 1 {
            n += 1;
        }
        assert_eq!(b.len(), weighted_exponents(1, n, k + 1).len());
        assert!(b.iter().all(|c| c.kind == Kind::Tors && c.key.a == 1 && c.key.u == 0));
    }
}

#[test]
fn quotient_range_isomorphism() {
    // B/v_j^{l}: in degrees *rho - c with 0 <= c <= 2^{j+1} the torsion layer vanishes
    // and the group is the algebraic quotient
    for (j, lj) in [(1u32, 1u32), (1, 2), (1, 3), (2, 1), (2, 2)] {
        let mut l = vec![0; j as usize];
        l[j as usize - 1] = lj;
        let q = QuotModule::new(&l);
        for c in 0..=(1i64 << (j + 1)) {
            for k in -6..=10 {
                let deg = k * RHO - Degree::new(c, 0);
                let r = quotient_groups(&l, deg).unwrap();
                assert!(r.quot.is_zero(), "j={j} l={lj} c={c} k={k}");
                assert_eq!(r.group().unwrap(), q.group(deg).unwrap());
            }
        }
    }
}

#[test]
fn quotient_strong_evenness() {
    for l in [vec![1], vec![2], vec![1, 2]] {
        for k in -10..=10 {
            let r = quotient_groups(&l, k * RHO - Degree::new(1, 0)).unwrap();
            assert!(r.group().unwrap().is_zero());
            let e = quotient_entry(&l, k * RHO).unwrap().unwrap();
            if e.free_rank > 0 {
                assert_eq!(e.restriction_index, Some(1), "{l:?} k={k}");
            }
        }
    }
}

#[test]
fn nilpotence() {
    let w = Window::square(12);
    assert_eq!(nilpotence_check(1, 1, 3, &w), Ok(true));
    assert_eq!(nilpotence_check(2, 1, 3, &Window::square(8)), Ok(true));
    // exponent 1 sits exactly on a Toda bracket the layers cannot see
    assert!(matches!(nilpotence_check(1, 1, 1, &Window::square(6)), Err(realspectra::Error::UnknownExtension(_))));
}

#[test]
fn quotient_layers_at_two_minus_two() {
    let r = quotient_groups(&[1], Degree::new(2, -2)).unwrap();
    assert_eq!(r.sub, realspectra::Group::new(1, 0));
    // Z{2u} under F2{a^3}: not split by the layers alone
    assert_eq!(r.quot, realspectra::Group::new(0, 1));
    assert!(r.exact_layers);
    assert!(!r.extension_known);
}

fn small_element() -> impl Strategy<Value = CoeffElement> {
    prop_oneof![
        Just(CoeffElement::a()),
        (0u32..=3, -3i64..=3).prop_map(|(m, j)| CoeffElement::vbar_twisted(m, j)),
    ]
}

proptest! {
    #[test]
    fn products_stay_in_ring(xs in prop::collection::vec(small_element(), 1..5)) {
        let mut p = CoeffElement::monomial(Monomial::one(), 1);
        for x in &xs {
            p = p.multiply(x);
            prop_assert!(p.is_member());
        }
        for (m, c) in &p.terms {
            let cell = ring_cell(m).unwrap();
            prop_assert_eq!(c.rem_euclid(cell.lattice as i64), 0);
        }
    }

    #[test]
    fn vbar_mult_maps_are_well_defined(t in -8i64..8, s in -8i64..8, i in 1u32..4) {
        let m = mult_map(&Bpr::default(), &Act::vbar(i, 1), Degree::new(t, s));
        prop_assert!(m.is_ok());
    }
}

