use realspectra::blocks::*;
use realspectra::bpr::quotient_groups;
use realspectra::grading::{Degree, Window, RHO};
use realspectra::hfpss::{e_infinity, geometric_cofibre_groups, Target};
use realspectra::module::{Kind, Monomial, MonoModule};
use realspectra::Group;

#[test]
fn truncated_e_infinity_is_borel_completion() {
    for n in 1..=2u32 {
        for deg in Window::square(12).degrees() {
            let mut e = e_infinity(Target::Truncated(n), deg).unwrap().cells;
            let mut b = Borel { n }.cells(deg).unwrap();
            e.sort_by(|x, y| x.key.cmp(&y.key));
            b.sort_by(|x, y| x.key.cmp(&y.key));
            assert_eq!(e, b, "n={n} {deg}");
        }
    }
}

#[test]
fn comparison_cofibre_is_the_geometric_part() {
    for n in 1..=2u32 {
        for deg in Window::square(14).degrees() {
            let g = comparison_cofibre(n, deg).unwrap();
            assert_eq!(g.free, 0, "n={n} {deg}");
            assert_eq!(g.f2_rank(), geometric_cofibre_groups(n, deg), "n={n} {deg}");
            assert!(g.torsion.iter().all(|&e| e == 1));
        }
    }
}

#[test]
fn bb_one_splits() {
    for deg in Window::square(10).degrees() {
        let (br, two_u) = bb1_split(deg);
        let (d, _) = deg.diagonal();
        // BR: a^d v1^t, free on the rho line, killed by a^3 v1 off it, and the pure a-tower
        let want_br = if deg.triv < 0 || d < 0 {
            Group::zero()
        } else if d == 0 {
            Group::new(1, 0)
        } else if d < 3 || deg.triv == 0 {
            Group::new(0, 1)
        } else {
            Group::zero()
        };
        assert_eq!(br, want_br, "{deg}");
        // 2u Z[v1]: 2u v1^c in degree (2 + c, c - 2)
        let want_u = if d == 4 && deg.triv >= 2 { Group::new(1, 0) } else { Group::zero() };
        assert_eq!(two_u, want_u, "{deg}");
    }
}

#[test]
fn nb_examples() {
    for n in 1..=3u32 {
        let nb = Block::new(n, BlockKind::NB);
        for k in 1..=6 {
            assert_eq!(nb.group(Degree::new(-1, k)).unwrap(), Group::new(0, 1));
        }
        let unit = nb.cells(Degree::default()).unwrap();
        assert_eq!(unit.len(), 1);
        assert_eq!(unit[0].lattice, 2);
        for j in 1..=6 {
            assert!(nb.group(Degree::new(0, -j)).unwrap().is_zero());
        }
        let bb = Block::new(n, BlockKind::BB);
        for j in 0..=6 {
            assert_eq!(bb.group(Degree::new(0, -j)).unwrap().ranks(), if j == 0 { (1, 0) } else { (0, 1) });
        }
    }
}

#[test]
fn assembled_matches_quotient_on_rho_lines() {
    for n in 1..=2u32 {
        let mut l = vec![0u32; n as usize];
        l.extend([1, 1, 1]);
        for k in -8..=8 {
            for off in [0, 1] {
                let deg = k * RHO - Degree::new(off, 0);
                let q = quotient_groups(&l, deg).unwrap().group().expect("extension known");
                let a = assemble(n, deg).unwrap();
                assert_eq!((a.free_rank, a.f2_rank), q.ranks(), "n={n} {deg}");
            }
        }
    }
}

#[test]
fn assembled_is_strongly_even() {
    for n in 1..=3u32 {
        for k in -10..=10 {
            assert!(assemble(n, k * RHO - Degree::new(1, 0)).unwrap().is_zero());
            let e = assemble(n, k * RHO).unwrap();
            if e.free_rank > 0 {
                assert_eq!(e.restriction_index, Some(1));
            }
        }
    }
}

#[test]
fn every_diagonal_decomposes() {
    for n in 1..=3u32 {
        for kind in [BlockKind::BB, BlockKind::BBPrime, BlockKind::NB] {
            let b = Block::new(n, kind);
            for d in -8..=48 {
                diagonal_decompose(&b, d).unwrap_or_else(|e| panic!("n={n} {kind} d={d}: {e}"));
            }
        }
    }
}

#[test]
fn decomposition_covers_the_block() {
    for n in 1..=2u32 {
        for kind in [BlockKind::BB, BlockKind::NB] {
            let b = Block::new(n, kind);
            for deg in Window::square(12).degrees() {
                let pieces = diagonal_decompose(&b, deg.diagonal().0).unwrap();
                let sum = pieces.iter().fold(Group::zero(), |g, p| g.sum(&p.module.group(deg).unwrap()));
                assert_eq!(sum, b.group(deg).unwrap(), "n={n} {kind} {deg}");
            }
        }
    }
}

#[test]
fn a_local_cohomology_recovers_nb() {
    for n in 1..=2u32 {
        let nb = Block::new(n, BlockKind::NB);
        for deg in Window::square(8).degrees() {
            let (h0, _) = gamma_a(n, deg).unwrap();
            let (_, h1) = gamma_a(n, deg + Degree::new(1, 0)).unwrap();
            assert_eq!(h0.sum(&h1), nb.group(deg).unwrap(), "n={n} {deg}");
        }
        // H^1 is the dual a-tower at k sigma
        for k in 1..=5 {
            assert_eq!(gamma_a(n, Degree::new(0, k)).unwrap().1, Group::new(0, 1));
        }
        assert!(gamma_a(n, Degree::default()).unwrap().1.is_zero());
    }
}

#[test]
fn block_local_cohomology_matches_oracle() {
    for (n, r) in [(1u32, 7i64), (2, 5)] {
        for kind in [BlockKind::BB, BlockKind::NB] {
            let b = Block::new(n, kind);
            for deg in Window::square(r).degrees() {
                for s in 0..=n {
                    assert_eq!(
                        block_lc(&b, s, deg).unwrap(),
                        block_lc_oracle(&b, s, deg).unwrap(),
                        "n={n} {kind} H^{s} {deg}"
                    );
                }
            }
        }
    }
}

#[test]
fn lc_table_offsets_are_rho_multiples() {
    let rows = lc_table(&Block::new(2, BlockKind::BB), 0..=20).unwrap();
    assert!(!rows.is_empty());
    let top = rows.iter().find(|r| r.diagonal == 0 && r.column == 0).unwrap();
    assert_eq!(top.s, 2);
    // P* shifted by -D_2 rho, then by -s against g(d - s, 0)
    assert_eq!(top.rho_offset, -6);
    let monomial_key = Monomial::u_pow(1);
    assert!(Block::new(2, BlockKind::BB).cell_of(&monomial_key).is_some_and(|c| c.kind == Kind::Free && c.lattice == 2));
}
