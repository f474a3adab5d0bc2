//! Homotopy fixed point spectral sequence for BPR<n> and BPR in RO(C2)-grading.
//!
//! E2 = Z(2)[v1..vn, u^±, a]/2a. The page `r_i = 2^{i+1} - 1` carries the differentials
//! generated by `d(u^{2^{i-1}}) = a^{r_i} v_i`; on a monomial with u-exponent `2^{i-1} m`
//! it is nonzero exactly for `m` odd.

use crate::bpr;
use crate::error::{Error, Result};
use crate::grading::{nil_exp, Degree, Window};
use crate::module::{weighted_exponents, Cell, Monomial};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

/// Status of a monomial class on a page.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum State {
    Dead,
    /// `Z` generated by `lattice * m`.
    Free(u8),
    Torsion,
}

impl State {
    pub fn alive(self) -> bool {
        self != State::Dead
    }

    /// Classes that can support a nonzero differential.
    fn odd_generator(self) -> bool {
        matches!(self, State::Free(1) | State::Torsion)
    }

    fn cell(self, m: Monomial) -> Option<Cell<Monomial>> {
        match self {
            State::Dead => None,
            State::Free(l) => Some(Cell::free(m, l)),
            State::Torsion => Some(Cell::tors(m)),
        }
    }
}

/// Page number of the `i`-th family of differentials.
pub fn page_of(i: u32) -> i64 {
    nil_exp(i)
}

/// Propagation engine for the truncation with `n` generators.
pub struct Hfpss {
    pub n: u32,
    memo: RefCell<HashMap<(Monomial, u32), State>>,
}

impl Hfpss {
    pub fn new(n: u32) -> Self {
        Hfpss { n, memo: RefCell::new(HashMap::new()) }
    }

    pub fn e2_state(m: &Monomial) -> State {
        if m.a == 0 {
            State::Free(1)
        } else {
            State::Torsion
        }
    }

    /// Target of `d_{r_i}` on `m`, when the u-exponent is an odd multiple of `2^{i-1}`.
    pub fn target(m: &Monomial, i: u32) -> Option<Monomial> {
        let half = 1i64 << (i - 1);
        (m.u.rem_euclid(half) == 0 && (m.u / half).rem_euclid(2) == 1)
            .then(|| m.times(&Monomial::a_pow(nil_exp(i))).times(&Monomial::u_pow(-half)).times(&Monomial::vbar(i, 1)))
    }

    /// Candidate source of a `d_{r_i}` hitting `m`.
    pub fn source(m: &Monomial, i: u32) -> Option<Monomial> {
        if m.a < nil_exp(i) || m.c(i) == 0 {
            return None;
        }
        let s = m.div_vbar(&Monomial::vbar(i, 1))?;
        let s = Monomial::new(s.a - nil_exp(i), s.u + (1i64 << (i - 1)), s.v);
        Hfpss::target(&s, i).is_some().then_some(s)
    }

    /// State of `m` after the first `p` families of differentials (`p = 0` is E2, `p = n` is E_infinity).
    pub fn state(&self, m: &Monomial, p: u32) -> Result<State> {
        if m.a < 0 || m.max_index() > self.n {
            return Ok(State::Dead);
        }
        if p == 0 {
            return Ok(Hfpss::e2_state(m));
        }
        let key = (m.clone(), p);
        if let Some(&s) = self.memo.borrow().get(&key) {
            return Ok(s);
        }
        let before = self.state(m, p - 1)?;
        let mut after = before;
        if before.alive() {
            let mut is_source = false;
            if before.odd_generator() {
                if let Some(t) = Hfpss::target(m, p) {
                    if t.degree() != m.degree() - Degree::new(1, 0) {
                        return Err(Error::InternalInconsistency(format!("d({m}) = {t} has wrong degree")));
                    }
                    if self.state(&t, p - 1)?.alive() {
                        is_source = true;
                        after = match before {
                            State::Free(_) => State::Free(2),
                            _ => State::Dead,
                        };
                    }
                }
            }
            if before == State::Torsion {
                if let Some(s) = Hfpss::source(m, p) {
                    if self.state(&s, p - 1)?.odd_generator() {
                        if is_source {
                            return Err(Error::InternalInconsistency(format!(
                                "{m} both supports and receives d_{}",
                                page_of(p)
                            )));
                        }
                        after = State::Dead;
                    }
                }
            }
        }
        self.memo.borrow_mut().insert(key, after);
        Ok(after)
    }

    pub fn e_infinity_state(&self, m: &Monomial) -> Result<State> {
        self.state(m, self.n)
    }
}

/// E2 monomials of degree `deg` in `n` generators with a-exponent at most `a_max`.
pub fn e2_basis(n: u32, deg: Degree, a_max: i64) -> Vec<Monomial> {
    let (d, _) = deg.diagonal();
    let t = deg.triv;
    let l_hi = d.div_euclid(4).min(t.div_euclid(2));
    let l_lo = (d - a_max).div_euclid(4);
    let mut out = Vec::new();
    for l in l_lo..=l_hi {
        let a = d - 4 * l;
        let w = t - 2 * l;
        if a < 0 || a > a_max || w < 0 {
            continue;
        }
        for c in weighted_exponents(1, n, w) {
            out.push(Monomial::new(a, l, c));
        }
    }
    out.sort();
    out
}

/// Which index bound to use for the twisted generators `v_i u^{2^i j}` in the closed-form page.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PageReading {
    /// `i < p - 1`
    Strict,
    /// `i < p`
    Loose,
}

/// State of `m` in `E_{2^p}` from the closed-form description of that page:
/// the subalgebra of `E2/(a^{r_i} v_i : i <= p-1)` generated by `a`, `u^{±2^{p-1}}`,
/// the `v_i` (with `v_0 = 2`) and the `v_i u^{2^i j}` for `i` below the reading's bound.
pub fn closed_form_state(n: u32, m: &Monomial, p: u32, reading: PageReading) -> State {
    if m.a < 0 || m.max_index() > n {
        return State::Dead;
    }
    for i in 1..p.min(n + 1) {
        if m.c(i) > 0 && m.a >= nil_exp(i) {
            return State::Dead;
        }
    }
    let bound = match reading {
        PageReading::Strict => p as i64 - 1,
        PageReading::Loose => p as i64,
    };
    let step = |val: u32| -> i64 {
        let mut e = p as i64 - 1;
        if val >= 1 && bound > 0 {
            e = e.min(0);
        }
        for i in 1..=n {
            if (i as i64) < bound && m.c(i) > 0 {
                e = e.min(i as i64);
            }
        }
        1i64 << e
    };
    let ok = |val: u32| m.u.rem_euclid(step(val)) == 0;
    if m.a > 0 {
        return if ok(0) { State::Torsion } else { State::Dead };
    }
    if ok(0) {
        State::Free(1)
    } else if ok(1) {
        State::Free(2)
    } else {
        State::Dead
    }
}

/// Spectrum whose HFPSS is run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Truncated(u32),
    /// Untruncated; enough generators are used per degree that further ones cannot contribute.
    Full,
}

fn generators_needed(target: Target, deg: Degree) -> u32 {
    match target {
        Target::Truncated(n) => n,
        Target::Full => {
            let (_, _, rig) = bpr::rigorous_bounds(deg);
            let mut n = rig.max(1);
            while (1i64 << (n + 1)) <= deg.triv.abs() {
                n += 1;
            }
            n
        }
    }
}

/// E_infinity classes of degree `deg`, cross-checked against the closed-form page.
pub struct EInfinity {
    pub cells: Vec<Cell<Monomial>>,
    pub free_rank: usize,
    pub f2_rank: usize,
}

fn a_cap(n: u32, deg: Degree) -> i64 {
    let (d, _) = deg.diagonal();
    // survivors with v-content have a < 2^{n+1} - 1; pure classes have a = d - 2t
    (nil_exp(n) - 1).max(d - 2 * deg.triv).max(0)
}

pub fn e_infinity(target: Target, deg: Degree) -> Result<EInfinity> {
    let n = generators_needed(target, deg);
    let engine = Hfpss::new(n);
    let cap = a_cap(n, deg);
    let mut cells = Vec::new();
    for m in e2_basis(n, deg, cap + nil_exp(n + 1)) {
        let s = engine.e_infinity_state(&m)?;
        let c = closed_form_state(n, &m, n + 1, PageReading::Strict);
        if s != c {
            return Err(Error::Mismatch {
                degree: deg,
                detail: format!("{m}: propagation {s:?}, closed form {c:?}"),
            });
        }
        if s.alive() && m.a > cap {
            return Err(Error::StabilizationFailure(deg));
        }
        if let Some(cell) = s.cell(m) {
            cells.push(cell);
        }
    }
    let free_rank = cells.iter().filter(|c| c.kind == crate::module::Kind::Free).count();
    let f2_rank = cells.len() - free_rank;
    Ok(EInfinity { cells, free_rank, f2_rank })
}

pub fn e_infinity_groups(target: Target, deg: Degree) -> Result<(usize, usize)> {
    let e = e_infinity(target, deg)?;
    Ok((e.free_rank, e.f2_rank))
}

/// A differential recorded on a page.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub source: Monomial,
    pub target: Monomial,
    pub source_degree: Degree,
    pub target_degree: Degree,
}

/// Classes alive on page `r` within a window, plus the differentials `d_r` among them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Page {
    pub r: i64,
    pub n: u32,
    pub classes: BTreeMap<Degree, Vec<(Monomial, State)>>,
    pub differentials: Vec<Differential>,
}

/// Pages `E_2, E_{r_1 + 1}, ..., E_{r_n + 1} = E_infinity` over `window`, with a-exponents
/// bounded by `a_max`. The differentials recorded on a page are those leaving it.
pub fn run_differentials(n: u32, window: &Window, a_max: i64) -> Result<Vec<Page>> {
    let engine = Hfpss::new(n);
    let mut pages = Vec::new();
    for p in 0..=n {
        let r = if p == 0 { 2 } else { page_of(p) + 1 };
        let mut classes = BTreeMap::new();
        let mut differentials = Vec::new();
        for deg in window.degrees() {
            let mut here = Vec::new();
            for m in e2_basis(n, deg, a_max) {
                let s = engine.state(&m, p)?;
                if !s.alive() {
                    continue;
                }
                if p < n && s.odd_generator() {
                    if let Some(t) = Hfpss::target(&m, p + 1) {
                        if engine.state(&t, p)?.alive() {
                            // targets are divisible by a, hence 2-torsion, so signs do not matter
                            if t.a == 0 {
                                return Err(Error::InternalInconsistency("differential into a free class".into()));
                            }
                            differentials.push(Differential {
                                source_degree: m.degree(),
                                target_degree: t.degree(),
                                source: m.clone(),
                                target: t,
                            });
                        }
                    }
                }
                here.push((m, s));
            }
            if !here.is_empty() {
                classes.insert(deg, here);
            }
        }
        pages.push(Page { r, n, classes, differentials });
    }
    Ok(pages)
}

/// One E_infinity class for charting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartClass {
    pub degree: Degree,
    pub filtration: i64,
    pub torsion: bool,
    pub lattice: u8,
    pub name: String,
}

pub fn chart(target: Target, window: &Window) -> Result<Vec<ChartClass>> {
    let mut out = Vec::new();
    for deg in window.degrees() {
        for c in e_infinity(target, deg)?.cells {
            out.push(ChartClass {
                degree: deg,
                filtration: c.key.a,
                torsion: c.kind == crate::module::Kind::Tors,
                lattice: c.lattice,
                name: c.key.to_string(),
            });
        }
    }
    Ok(out)
}

/// F2-rank of `pi_deg` of the Tate spectrum: `F2[u^{±2^n}, a^{±1}]`.
pub fn tate_groups(n: u32, deg: Degree) -> usize {
    let period = 1i64 << (n + 1);
    usize::from(deg.triv.rem_euclid(period) == 0)
}

/// F2-rank of `pi_deg` of the cofibre of the fixed points into the Borel completion:
/// `F2[a^{±1}, u^{-2^n}] u^{-2^n}`.
pub fn geometric_cofibre_groups(n: u32, deg: Degree) -> usize {
    let period = 1i64 << (n + 1);
    usize::from(deg.triv.rem_euclid(period) == 0 && deg.triv <= -period)
}
