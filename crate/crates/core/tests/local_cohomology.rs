use realspectra::grading::{Degree, RHO};
use realspectra::localcoh::*;
use realspectra::module::Monomial;
use realspectra::Group;

fn oracle_matches(m: &StandardModule, rules: LcRules, range: std::ops::RangeInclusive<i64>) -> Result<(), String> {
    for k in range {
        for off in [0, 1] {
            let g = m.shift + k * RHO + Degree::new(off, 0);
            for s in 0..=m.n {
                let got = standard_oracle(m, s, g).map_err(|e| e.to_string())?;
                let want = closed_form_group(m, rules, s, g);
                if got != want {
                    return Err(format!("{m} H^{s} at {g}: oracle {got}, closed form {want}"));
                }
            }
        }
    }
    Ok(())
}

#[test]
fn closed_forms_match_oracle() {
    for n in 1..=2u32 {
        for m in catalogue(n) {
            let m = m.shifted(Degree::new(2, -3));
            oracle_matches(&m, SHIPPED_RULES, -12..=12).unwrap();
        }
    }
}

#[test]
fn printed_principal_twist_fails_at_s_one() {
    let m = StandardModule::new(ModKind::IdealF2(1, 2), Degree::default(), 2);
    let rules = LcRules { principal: PrincipalTwist::Index, ..SHIPPED_RULES };
    assert!(oracle_matches(&m, rules, -8..=8).is_err());
    // at s = 0 the two twists coincide
    let m0 = StandardModule::new(ModKind::IdealF2(0, 1), Degree::default(), 2);
    assert!(oracle_matches(&m0, rules, -8..=8).is_ok());
}

#[test]
fn reversed_sign_fails() {
    let m = StandardModule::new(ModKind::IdealF2(0, 2), Degree::default(), 2);
    let rules = LcRules { sign: IdealSign::Reversed, ..SHIPPED_RULES };
    assert!(oracle_matches(&m, rules, -10..=10).is_err());
}

#[test]
fn radical_invariance() {
    let m = StandardModule::new(ModKind::P, Degree::default(), 2);
    let j = vbar_ideal(2);
    let j2 = vec![Monomial::vbar(1, 2), Monomial::vbar(2, 1)];
    for k in -10..=2 {
        let g = k * RHO;
        let a = lc_oracle(&m, &j, 2, g, 14, 24).unwrap();
        let b = lc_oracle(&m, &j2, 2, g, 14, 24).unwrap();
        assert_eq!(a, b, "k={k}");
    }
}

#[test]
fn top_cohomology_of_p_is_dual() {
    let m = StandardModule::new(ModKind::P, Degree::default(), 2);
    // P* shifted down by D_2 = 4: rank at -(4+j) rho is the number of weight-j monomials
    let counts = [1, 1, 1, 2, 2, 2, 3];
    for (j, &c) in counts.iter().enumerate() {
        let g = -(4 + j as i64) * RHO;
        assert_eq!(standard_oracle(&m, 2, g).unwrap(), Group::new(c, 0));
    }
    assert!(standard_oracle(&m, 2, -3 * RHO).unwrap().is_zero());
}
