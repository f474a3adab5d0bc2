//! Standard modules over `P = Z(2)[v1..vn]` along a diagonal, their local cohomology
//! in closed form, and a Koszul-colimit oracle computing it from the module itself.

use crate::error::{Error, Result};
use crate::grading::{d_const, vbar_weight, Degree, RHO};
use crate::module::{action_matrix, presentation, weighted_exponents, Act, Cell, Monomial, MonoModule};
use crate::snf::{self, Cyclic, Group, Matrix};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModKind {
    P,
    DualP,
    /// `P / (v0, ..., vs)` with `v0 = 2`.
    Pbar(u32),
    DualPbar(u32),
    /// `(2, v1, ..., vt) P`; `t = 0` is `(2) P`.
    IdealZ(u32),
    /// `(v_{s+1}, ..., v_t) Pbar_s`.
    IdealF2(u32, u32),
    /// `F2[a]`.
    TowerF2,
    /// `F2[a]` dual.
    DualTowerF2,
}

impl fmt::Display for ModKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModKind::P => write!(f, "P"),
            ModKind::DualP => write!(f, "P*"),
            ModKind::Pbar(s) => write!(f, "Pbar{s}"),
            ModKind::DualPbar(s) => write!(f, "Pbar{s}^"),
            ModKind::IdealZ(0) => write!(f, "(2)P"),
            ModKind::IdealZ(t) => {
                let gens: Vec<String> = (1..=t).map(|i| format!("v{i}")).collect();
                write!(f, "(2,{})P", gens.join(","))
            }
            ModKind::IdealF2(s, t) => {
                let gens: Vec<String> = (s + 1..=t).map(|i| format!("v{i}")).collect();
                write!(f, "({})Pbar{s}", gens.join(","))
            }
            ModKind::TowerF2 => write!(f, "F2[a]"),
            ModKind::DualTowerF2 => write!(f, "F2[a]^"),
        }
    }
}

/// A catalogue module with its generator (or top, for duals) placed in degree `shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StandardModule {
    pub kind: ModKind,
    pub shift: Degree,
    pub n: u32,
}

fn has_content(c: &[u32], lo: u32, hi: u32) -> bool {
    (lo..=hi).any(|i| c.get(i as usize - 1).is_some_and(|&e| e > 0))
}

impl StandardModule {
    pub fn new(kind: ModKind, shift: Degree, n: u32) -> Self {
        StandardModule { kind, shift, n }
    }

    pub fn shifted(&self, by: Degree) -> Self {
        StandardModule { shift: self.shift + by, ..*self }
    }

    /// Lowest variable acting nontrivially.
    fn first_var(&self) -> u32 {
        match self.kind {
            ModKind::Pbar(s) | ModKind::DualPbar(s) | ModKind::IdealF2(s, _) => s + 1,
            _ => 1,
        }
    }

    pub fn is_torsion_module(&self) -> bool {
        !matches!(self.kind, ModKind::P | ModKind::DualP | ModKind::IdealZ(_))
    }

    fn poly_cells(&self, k: i64) -> Vec<Cell<Monomial>> {
        let n = self.n;
        let lo = self.first_var();
        let mut out = Vec::new();
        for c in weighted_exponents(lo, n, k) {
            let key = Monomial::new(0, 0, c.clone());
            match self.kind {
                ModKind::P | ModKind::DualP => out.push(Cell::free(key, 1)),
                ModKind::IdealZ(t) => {
                    out.push(Cell::free(key, if has_content(&c, 1, t.min(n)) { 1 } else { 2 }))
                }
                ModKind::Pbar(_) | ModKind::DualPbar(_) => out.push(Cell::tors(key)),
                ModKind::IdealF2(s, t) => {
                    if has_content(&c, s + 1, t.min(n)) {
                        out.push(Cell::tors(key))
                    }
                }
                _ => unreachable!(),
            }
        }
        out
    }

    /// Ranks `(free, f2)` in degree `g`.
    pub fn ranks(&self, g: Degree) -> (usize, usize) {
        self.group(g).map(|x| x.ranks()).unwrap_or((0, 0))
    }
}

impl fmt::Display for StandardModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.shift)
    }
}

impl MonoModule for StandardModule {
    type Key = Monomial;

    fn cells(&self, g: Degree) -> Result<Vec<Cell<Monomial>>> {
        let rel = g - self.shift;
        Ok(match self.kind {
            ModKind::TowerF2 => {
                if rel.triv == 0 && rel.sgn <= 0 {
                    vec![Cell::tors(Monomial::a_pow(-rel.sgn))]
                } else {
                    vec![]
                }
            }
            ModKind::DualTowerF2 => {
                if rel.triv == 0 && rel.sgn >= 0 {
                    vec![Cell::tors(Monomial::a_pow(-rel.sgn))]
                } else {
                    vec![]
                }
            }
            ModKind::DualP | ModKind::DualPbar(_) => match rel.rho_multiple() {
                Some(k) if k <= 0 => self.poly_cells(-k),
                _ => vec![],
            },
            _ => match rel.rho_multiple() {
                Some(k) if k >= 0 => self.poly_cells(k),
                _ => vec![],
            },
        })
    }

    fn act(&self, key: &Monomial, x: &Monomial) -> Option<Monomial> {
        if x.u != 0 {
            return None;
        }
        match self.kind {
            ModKind::TowerF2 => (!x.has_vbar()).then(|| key.times(x)),
            ModKind::DualTowerF2 => {
                (!x.has_vbar() && key.a + x.a <= 0).then(|| Monomial::a_pow(key.a + x.a))
            }
            _ => {
                if x.a != 0 || has_content(&x.v, 1, self.first_var() - 1) {
                    return None;
                }
                match self.kind {
                    ModKind::DualP | ModKind::DualPbar(_) => key.div_vbar(x),
                    _ => Some(key.times(x)),
                }
            }
        }
    }

    fn vanishes(&self, _key: &Monomial, _deg: Degree) -> bool {
        // only the ideal modules can push a product out of their basis, and they do not
        false
    }
}

/// One local cohomology summand: `H^s` contains `module`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LcSummand {
    pub s: u32,
    pub module: StandardModule,
}

/// Twist used for the principal ideal `(v_{s+1}) Pbar_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrincipalTwist {
    /// `(D_s - D_n + s + 1) rho`.
    Index,
    /// `(D_s - D_n + 2^{s+1} - 1) rho`, the degree of `v_{s+1}`.
    Weight,
}

/// Sign of the `Pbar_s` summand for `(v_{s+1}, ..., v_t) Pbar_s` with `t >= s + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealSign {
    /// `(D_n - D_s) rho`.
    Reversed,
    /// `(D_s - D_n) rho`, matching `Pbar_s`.
    Matching,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LcRules {
    pub principal: PrincipalTwist,
    pub sign: IdealSign,
}

/// The rules confirmed by the Koszul oracle.
pub const SHIPPED_RULES: LcRules = LcRules { principal: PrincipalTwist::Weight, sign: IdealSign::Matching };

pub fn lc_closed_form(m: &StandardModule) -> Vec<LcSummand> {
    lc_closed_form_with(m, SHIPPED_RULES)
}

pub fn lc_closed_form_with(m: &StandardModule, rules: LcRules) -> Vec<LcSummand> {
    let n = m.n;
    let dn = d_const(n);
    let at = |s: u32, kind: ModKind, k: i64| LcSummand { s, module: StandardModule::new(kind, m.shift + k * RHO, n) };
    match m.kind {
        ModKind::P | ModKind::IdealZ(0) => vec![at(n, ModKind::DualP, -dn)],
        ModKind::IdealZ(t) => {
            let t = t.min(n);
            vec![at(n, ModKind::DualP, -dn), at(n - t + 1, ModKind::DualPbar(t), d_const(t) - dn)]
        }
        ModKind::Pbar(s) => vec![at(n - s, ModKind::DualPbar(s), d_const(s) - dn)],
        ModKind::IdealF2(s, t) if t == s + 1 => {
            let w = match rules.principal {
                PrincipalTwist::Index => s as i64 + 1,
                PrincipalTwist::Weight => vbar_weight(s + 1),
            };
            vec![at(n - s, ModKind::DualPbar(s), d_const(s) - dn + w)]
        }
        ModKind::IdealF2(s, t) => {
            let k = match rules.sign {
                IdealSign::Reversed => dn - d_const(s),
                IdealSign::Matching => d_const(s) - dn,
            };
            vec![at(n - s, ModKind::DualPbar(s), k), at(n - t + 1, ModKind::DualPbar(t), d_const(t) - dn)]
        }
        ModKind::DualP | ModKind::DualPbar(_) | ModKind::TowerF2 | ModKind::DualTowerF2 => {
            vec![LcSummand { s: 0, module: *m }]
        }
    }
}

/// Sum of the closed-form summands in cohomological degree `s` at degree `g`.
pub fn closed_form_group(m: &StandardModule, rules: LcRules, s: u32, g: Degree) -> Group {
    lc_closed_form_with(m, rules)
        .iter()
        .filter(|x| x.s == s)
        .fold(Group::zero(), |acc, x| acc.sum(&x.module.group(g).unwrap_or_default()))
}

/// Stages of the Koszul complex on `x_1^e, ..., x_r^e` tensored with a module.
struct Koszul<'a, M: MonoModule + ?Sized> {
    m: &'a M,
    elems: &'a [Monomial],
    gamma: Degree,
    cells: HashMap<(u32, usize), Vec<Cell<M::Key>>>,
}

fn subsets(r: usize, q: usize) -> Vec<usize> {
    (0..1usize << r).filter(|s| s.count_ones() as usize == q).collect()
}

fn pow(x: &Monomial, e: u32) -> Monomial {
    (0..e).fold(Monomial::one(), |acc, _| acc.times(x))
}

impl<'a, M: MonoModule + ?Sized> Koszul<'a, M> {
    fn new(m: &'a M, elems: &'a [Monomial], gamma: Degree) -> Self {
        Koszul { m, elems, gamma, cells: HashMap::new() }
    }

    fn degree(&self, e: u32, set: usize) -> Degree {
        let mut d = self.gamma;
        for (i, x) in self.elems.iter().enumerate() {
            if set >> i & 1 == 1 {
                d += e as i64 * x.degree();
            }
        }
        d
    }

    fn cells(&mut self, e: u32, set: usize) -> Result<Vec<Cell<M::Key>>> {
        if let Some(c) = self.cells.get(&(e, set)) {
            return Ok(c.clone());
        }
        let c = self.m.cells(self.degree(e, set))?;
        self.cells.insert((e, set), c.clone());
        Ok(c)
    }

    fn term(&mut self, e: u32, q: i64) -> Result<(Vec<usize>, Vec<Vec<Cell<M::Key>>>)> {
        let r = self.elems.len();
        if q < 0 || q as usize > r {
            return Ok((vec![], vec![]));
        }
        let sets = subsets(r, q as usize);
        let mut cs = Vec::new();
        for &s in &sets {
            cs.push(self.cells(e, s)?);
        }
        Ok((sets, cs))
    }

    fn pres(&mut self, e: u32, q: i64) -> Result<Vec<Cyclic>> {
        let (_, cs) = self.term(e, q)?;
        Ok(cs.iter().flat_map(|c| presentation(c)).collect())
    }

    fn offsets(cs: &[Vec<Cell<M::Key>>]) -> Vec<usize> {
        let mut off = vec![0];
        for c in cs {
            off.push(off.last().unwrap() + c.len());
        }
        off
    }

    /// Differential `K_e^q -> K_e^{q+1}`.
    fn differential(&mut self, e: u32, q: i64) -> Result<Matrix> {
        let (src_sets, src) = self.term(e, q)?;
        let (tgt_sets, tgt) = self.term(e, q + 1)?;
        let so = Self::offsets(&src);
        let to = Self::offsets(&tgt);
        let mut mat = Matrix::zeros(*to.last().unwrap(), *so.last().unwrap());
        for (a, &s) in src_sets.iter().enumerate() {
            for (b, &t) in tgt_sets.iter().enumerate() {
                if s & t != s {
                    continue;
                }
                let i = (t ^ s).trailing_zeros() as usize;
                let sign = if (s & ((1 << i) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                let x = Act { mono: pow(&self.elems[i], e), coeff: sign };
                let block = action_matrix(self.m, &x, &src[a], &tgt[b], self.degree(e, t))?;
                mat.put(to[b], so[a], &block);
            }
        }
        Ok(mat)
    }

    /// Transition `K_e^q -> K_{e+1}^q`, multiplying component `S` by the product of its elements.
    fn transition(&mut self, e: u32, q: i64) -> Result<Matrix> {
        let (sets, src) = self.term(e, q)?;
        let (_, tgt) = self.term(e + 1, q)?;
        let so = Self::offsets(&src);
        let to = Self::offsets(&tgt);
        let mut mat = Matrix::zeros(*to.last().unwrap(), *so.last().unwrap());
        for (a, &s) in sets.iter().enumerate() {
            let mut x = Monomial::one();
            for (i, el) in self.elems.iter().enumerate() {
                if s >> i & 1 == 1 {
                    x = x.times(el);
                }
            }
            let block = action_matrix(self.m, &Act::mono(x), &src[a], &tgt[a], self.degree(e + 1, s))?;
            mat.put(to[a], so[a], &block);
        }
        Ok(mat)
    }

    fn cohomology(&mut self, e: u32, q: i64) -> Result<Group> {
        let mid = self.pres(e, q)?;
        let next = self.pres(e, q + 1)?;
        let d_in = self.differential(e, q - 1)?;
        let d_out = self.differential(e, q)?;
        snf::homology(&mid, Some(&d_in), Some(&d_out), &next)
    }

    /// Mapping cone of the transition: `C^q = K_e^{q+1} + K_{e+1}^q`.
    fn cone_pres(&mut self, e: u32, q: i64) -> Result<Vec<Cyclic>> {
        let mut p = self.pres(e, q + 1)?;
        p.extend(self.pres(e + 1, q)?);
        Ok(p)
    }

    fn cone_differential(&mut self, e: u32, q: i64) -> Result<Matrix> {
        let a = self.differential(e, q + 1)?;
        let t = self.transition(e, q + 1)?;
        let b = self.differential(e + 1, q)?;
        let (r1, c1) = (a.rows(), a.cols());
        let (r2, c2) = (b.rows(), b.cols());
        let mut m = Matrix::zeros(r1 + r2, c1 + c2);
        m.put(0, 0, &a.scaled(-1));
        m.put(r1, 0, &t);
        m.put(r1, c1, &b);
        Ok(m)
    }

    fn cone_cohomology(&mut self, e: u32, q: i64) -> Result<Group> {
        let mid = self.cone_pres(e, q)?;
        let next = self.cone_pres(e, q + 1)?;
        let d_in = self.cone_differential(e, q - 1)?;
        let d_out = self.cone_differential(e, q)?;
        snf::homology(&mid, Some(&d_in), Some(&d_out), &next)
    }

    /// The transition `e -> e+1` is an isomorphism on `H^s`.
    fn transition_iso(&mut self, e: u32, s: i64) -> Result<bool> {
        Ok(self.cone_cohomology(e, s - 1)?.is_zero() && self.cone_cohomology(e, s)?.is_zero())
    }
}

/// `H^s` of the Koszul complex on `x_i^e` with coefficients in `m`, at degree `g`.
pub fn koszul_cohomology<M: MonoModule + ?Sized>(
    m: &M,
    elems: &[Monomial],
    e: u32,
    s: u32,
    g: Degree,
) -> Result<Group> {
    Koszul::new(m, elems, g).cohomology(e, s as i64)
}

/// Local cohomology `H^s_J(m)` at degree `g` with `J = (elems)`, as the colimit over `e`.
/// Reported once the transitions `e -> e+1 -> e+2` are both isomorphisms, starting at `e0`.
pub fn lc_oracle<M: MonoModule + ?Sized>(
    m: &M,
    elems: &[Monomial],
    s: u32,
    g: Degree,
    e0: u32,
    e_max: u32,
) -> Result<Group> {
    let mut k = Koszul::new(m, elems, g);
    let s = s as i64;
    let mut e = e0.max(1);
    let mut prev_iso = false;
    while e <= e_max {
        let iso = k.transition_iso(e, s)?;
        if iso && prev_iso {
            return k.cohomology(e - 1, s);
        }
        prev_iso = iso;
        e += 1;
    }
    Err(Error::StabilizationFailure(g))
}

/// The generators `v1, ..., vn` of `J`.
pub fn vbar_ideal(n: u32) -> Vec<Monomial> {
    (1..=n).map(|i| Monomial::vbar(i, 1)).collect()
}

/// Starting exponent for a catalogue module: far enough that every dual monomial fits.
pub fn standard_hint(m: &StandardModule, g: Degree) -> u32 {
    let rel = g - m.shift;
    (rel.triv.abs().max(rel.sgn.abs()) + 2) as u32
}

/// Oracle for a catalogue module with `J = (v1..vn)`.
pub fn standard_oracle(m: &StandardModule, s: u32, g: Degree) -> Result<Group> {
    let e0 = standard_hint(m, g);
    lc_oracle(m, &vbar_ideal(m.n), s, g, e0, e0 + 8)
}

/// Every catalogue module for `n` with its generator at the origin.
pub fn catalogue(n: u32) -> Vec<StandardModule> {
    let mut out = vec![
        StandardModule::new(ModKind::P, Degree::default(), n),
        StandardModule::new(ModKind::DualP, Degree::default(), n),
    ];
    for s in 0..=n {
        out.push(StandardModule::new(ModKind::Pbar(s), Degree::default(), n));
        out.push(StandardModule::new(ModKind::DualPbar(s), Degree::default(), n));
    }
    for t in 0..=n {
        out.push(StandardModule::new(ModKind::IdealZ(t), Degree::default(), n));
    }
    for s in 0..n {
        for t in s + 1..=n {
            out.push(StandardModule::new(ModKind::IdealF2(s, t), Degree::default(), n));
        }
    }
    out
}
