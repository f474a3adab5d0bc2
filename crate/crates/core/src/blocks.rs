//! Building blocks `BB`, `BB'`, `NB` of the coefficients of `BPR<n>`, their assembly,
//! the Borel completion, and the decomposition of each diagonal into catalogue modules.

use crate::bpr::{restriction_index, ring_cell};
use crate::error::{Error, Result};
use crate::grading::{nil_exp, Degree, Window, RHO};
use crate::groups::{GradedGroups, GroupEntry};
use crate::localcoh::{closed_form_group, lc_closed_form, lc_oracle, LcSummand, ModKind, StandardModule, SHIPPED_RULES};
use crate::module::{group_of, presentation, weighted_exponents, Cell, Kind, Monomial, MonoModule};
use crate::snf::{self, Group, Matrix};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    BB,
    BBPrime,
    NB,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::BB => "BB",
            BlockKind::BBPrime => "BB'",
            BlockKind::NB => "NB",
        })
    }
}

impl FromStr for BlockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "BB" | "bb" => Ok(BlockKind::BB),
            "BB'" | "BBPrime" | "bbprime" | "bb'" => Ok(BlockKind::BBPrime),
            "NB" | "nb" => Ok(BlockKind::NB),
            _ => Err(Error::UnknownTag(s.to_string())),
        }
    }
}

/// Degree of `U = u^{2^n}`.
pub fn u_degree(n: u32) -> Degree {
    (1i64 << (n + 1)) * crate::grading::DELTA
}

/// Largest diagonal of a class of `BB` other than the pure `a`-powers.
pub fn content_diagonal_max(n: u32) -> i64 {
    nil_exp(n) - 1 + 4 * ((1i64 << n) - 1)
}

/// Tower classes of `NB` are keyed by `a^{-k}` and sit in degree `(-1, k)`.
pub fn is_tower_key(m: &Monomial) -> bool {
    m.a < 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub n: u32,
    pub kind: BlockKind,
}

impl Block {
    pub fn new(n: u32, kind: BlockKind) -> Self {
        Block { n, kind }
    }

    /// Cell of `m` in the block, if `m` is a basis monomial of it.
    pub fn cell_of(&self, m: &Monomial) -> Option<Cell<Monomial>> {
        if is_tower_key(m) {
            return (self.kind == BlockKind::NB && m.u == 0 && !m.has_vbar()).then(|| Cell::tors(m.clone()));
        }
        if m.u < 0 || m.u >= 1 << self.n || m.max_index() > self.n {
            return None;
        }
        let c = ring_cell(m)?;
        if self.kind == BlockKind::BB || m.u != 0 || m.has_vbar() {
            return Some(c);
        }
        (m.a == 0).then(|| Cell::free(m.clone(), 2))
    }

    pub fn key_degree(m: &Monomial) -> Degree {
        if is_tower_key(m) {
            Degree::new(-1, -m.a)
        } else {
            m.degree()
        }
    }
}

impl MonoModule for Block {
    type Key = Monomial;

    fn cells(&self, deg: Degree) -> Result<Vec<Cell<Monomial>>> {
        let (d, _) = deg.diagonal();
        let mut out = Vec::new();
        for l in 0..1i64 << self.n {
            let j = d - 4 * l;
            let w = deg.triv - 2 * l;
            if j < 0 || w < 0 {
                continue;
            }
            for c in weighted_exponents(1, self.n, w) {
                if let Some(cell) = self.cell_of(&Monomial::new(j, l, c)) {
                    out.push(cell);
                }
            }
        }
        if self.kind == BlockKind::NB && deg.triv == -1 && deg.sgn >= 1 {
            out.push(Cell::tors(Monomial::a_pow(-deg.sgn)));
        }
        Ok(out)
    }

    fn act(&self, key: &Monomial, x: &Monomial) -> Option<Monomial> {
        if x.u != 0 {
            return None;
        }
        if is_tower_key(key) {
            return (!x.has_vbar() && key.a + x.a < 0).then(|| Monomial::a_pow(key.a + x.a));
        }
        Some(key.times(x))
    }

    fn vanishes(&self, key: &Monomial, _deg: Degree) -> bool {
        self.cell_of(key).is_none()
    }
}

/// Key of a class of the assembled module: the translate `U^q` and the block monomial.
pub type AssembledKey = (i64, Monomial);

/// `sum_{q >= 0} U^q BB + sum_{q >= 1} U^{-q} NB`.
#[derive(Clone, Copy, Debug)]
pub struct Assembled {
    pub n: u32,
}

impl Assembled {
    fn block(&self, q: i64) -> Block {
        Block::new(self.n, if q >= 0 { BlockKind::BB } else { BlockKind::NB })
    }

    /// Translates `q` that can contribute in degree `alpha`.
    pub fn translates(&self, alpha: Degree) -> Vec<i64> {
        let n = self.n;
        let step_t = 1i64 << (n + 1);
        let step_d = 1i64 << (n + 2);
        let (d, _) = alpha.diagonal();
        let mut qs: Vec<i64> = if alpha.triv >= 0 { (0..=alpha.triv / step_t).collect() } else { vec![] };
        let hi = (content_diagonal_max(n) - d).div_euclid(step_d).max(0);
        for q in 1..=hi.max((-1 - alpha.triv).div_euclid(step_t).max(0)) {
            qs.push(-q);
        }
        qs
    }
}

impl MonoModule for Assembled {
    type Key = AssembledKey;

    fn cells(&self, deg: Degree) -> Result<Vec<Cell<AssembledKey>>> {
        let mut out = Vec::new();
        for q in self.translates(deg) {
            for c in self.block(q).cells(deg - q * u_degree(self.n))? {
                out.push(Cell { key: (q, c.key), kind: c.kind, lattice: c.lattice });
            }
        }
        Ok(out)
    }

    fn act(&self, key: &AssembledKey, x: &Monomial) -> Option<AssembledKey> {
        self.block(key.0).act(&key.1, x).map(|k| (key.0, k))
    }

    fn vanishes(&self, key: &AssembledKey, _deg: Degree) -> bool {
        self.block(key.0).cell_of(&key.1).is_none()
    }
}

/// Free rank of `pi_t` of the underlying `BP<n>`.
pub fn underlying_rank_n(n: u32, t: i64) -> usize {
    if t < 0 || t % 2 != 0 {
        return 0;
    }
    weighted_exponents(1, n, t / 2).len()
}

/// Groups of the assembled module in degree `alpha`.
pub fn assemble(n: u32, alpha: Degree) -> Result<GroupEntry> {
    let cells = Assembled { n }.cells(alpha)?;
    let mut e = GroupEntry::from_group(&group_of(&cells));
    if e.free_rank > 0 {
        e.restriction_index =
            restriction_index(&cells, |k: &AssembledKey| k.1.v.clone(), underlying_rank_n(n, alpha.underlying()));
    }
    Ok(e)
}

pub fn assemble_table(n: u32, window: &Window) -> Result<GradedGroups> {
    let mut g = GradedGroups::default();
    for d in window.degrees() {
        g.insert(d, assemble(n, d)?);
    }
    Ok(g)
}

/// `BB[U^{+-1}]` with keys the ambient monomials `U^q m`.
#[derive(Clone, Copy, Debug)]
pub struct Borel {
    pub n: u32,
}

impl Borel {
    pub fn translates(&self, alpha: Degree) -> Vec<i64> {
        let n = self.n;
        let step_t = 1i64 << (n + 1);
        let dmax = content_diagonal_max(n);
        let mut out = Vec::new();
        let mut q = alpha.triv.div_euclid(step_t);
        loop {
            let beta = alpha - q * u_degree(n);
            if beta.triv > 0 && beta.diagonal().0 > dmax {
                break;
            }
            if beta.diagonal().0 >= 0 {
                out.push(q);
            }
            q -= 1;
        }
        out
    }
}

impl MonoModule for Borel {
    type Key = Monomial;

    fn cells(&self, deg: Degree) -> Result<Vec<Cell<Monomial>>> {
        let bb = Block::new(self.n, BlockKind::BB);
        let shift = 1i64 << self.n;
        let mut out = Vec::new();
        for q in self.translates(deg) {
            for c in bb.cells(deg - q * u_degree(self.n))? {
                let k = c.key;
                out.push(Cell { key: Monomial::new(k.a, k.u + q * shift, k.v), kind: c.kind, lattice: c.lattice });
            }
        }
        out.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(out)
    }

    fn act(&self, key: &Monomial, x: &Monomial) -> Option<Monomial> {
        Some(key.times(x))
    }

    fn vanishes(&self, key: &Monomial, _deg: Degree) -> bool {
        let shift = 1i64 << self.n;
        let k = Monomial::new(key.a, key.u.rem_euclid(shift), key.v.clone());
        Block::new(self.n, BlockKind::BB).cell_of(&k).is_none()
    }
}

/// Matrix of the comparison map from the assembled module to the Borel completion in degree `alpha`.
/// Tower classes map to zero.
pub fn comparison_matrix(n: u32, alpha: Degree) -> Result<(Vec<Cell<AssembledKey>>, Vec<Cell<Monomial>>, Matrix)> {
    let src = Assembled { n }.cells(alpha)?;
    let tgt = Borel { n }.cells(alpha)?;
    let index: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(i, c)| (&c.key, i)).collect();
    let shift = 1i64 << n;
    let mut m = Matrix::zeros(tgt.len(), src.len());
    for (j, c) in src.iter().enumerate() {
        let (q, k) = &c.key;
        if is_tower_key(k) {
            continue;
        }
        let amb = Monomial::new(k.a, k.u + q * shift, k.v.clone());
        let &i = index
            .get(&amb)
            .ok_or_else(|| Error::InternalInconsistency(format!("{amb} missing from the Borel completion at {alpha}")))?;
        let t = &tgt[i];
        let coef = match t.kind {
            Kind::Tors => 1,
            Kind::Free => (c.lattice / t.lattice) as i128,
        };
        m.set(i, j, coef);
    }
    Ok((src, tgt, m))
}

/// `pi_alpha` of the cofibre of the comparison map: cokernel at `alpha` and kernel at `alpha - 1`.
pub fn comparison_cofibre(n: u32, alpha: Degree) -> Result<Group> {
    let (_, tgt, m) = comparison_matrix(n, alpha)?;
    let coker = snf::cokernel(&m, &presentation(&tgt))?;
    let (src1, tgt1, m1) = comparison_matrix(n, alpha - Degree::new(1, 0))?;
    let ker = snf::kernel(&presentation(&src1), &m1, &presentation(&tgt1))?;
    Ok(coker.sum(&ker))
}

/// A catalogue summand of one diagonal of a block, sitting in column `l` (`-1` for the tower).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalPiece {
    pub column: i64,
    pub module: StandardModule,
}

/// Degree of `a^{d-4l} u^l`.
pub fn column_shift(d: i64, l: i64) -> Degree {
    Degree::new(2 * l, -2 * l - (d - 4 * l))
}

fn v2(l: i64) -> u32 {
    l.trailing_zeros()
}

/// Largest `s <= n` with `2^{s+1} - 1 <= j`.
fn torsion_level(n: u32, j: i64) -> u32 {
    (0..=n).rev().find(|&i| nil_exp(i) <= j).unwrap_or(0)
}

fn classify(block: &Block, d: i64, l: i64) -> Option<ModKind> {
    let n = block.n;
    let j = d - 4 * l;
    let prime = block.kind != BlockKind::BB;
    if j == 0 {
        return Some(match (l, prime) {
            (0, false) => ModKind::P,
            (0, true) => ModKind::IdealZ(n),
            _ => ModKind::IdealZ(v2(l)),
        });
    }
    let s = torsion_level(n, j);
    if l == 0 {
        return match (prime, s == n) {
            (false, _) => Some(ModKind::Pbar(s)),
            (true, true) => None,
            (true, false) => Some(ModKind::IdealF2(s, n)),
        };
    }
    let t = v2(l);
    (t > s).then_some(ModKind::IdealF2(s, t))
}

/// Splits diagonal `d` of a block into catalogue modules, one per column.
/// Each piece is checked cell by cell against the block over the weights where it can differ.
pub fn diagonal_decompose(block: &Block, d: i64) -> Result<Vec<DiagonalPiece>> {
    let n = block.n;
    let mut out = Vec::new();
    for l in 0..1i64 << n {
        if d - 4 * l < 0 {
            continue;
        }
        let piece = classify(block, d, l).map(|k| StandardModule::new(k, column_shift(d, l), n));
        validate(block, d, l, piece.as_ref())?;
        if let Some(m) = piece {
            out.push(DiagonalPiece { column: l, module: m });
        }
    }
    if block.kind == BlockKind::NB && d <= -2 {
        out.push(DiagonalPiece { column: -1, module: StandardModule::new(ModKind::Pbar(n), Degree::new(-1, -1 - d), n) });
    }
    Ok(out)
}

/// Weights checked when validating a column: past the largest generator weight every
/// catalogue module is determined by the lower weights.
fn validation_weights(n: u32) -> i64 {
    3 * nil_exp(n) + 4
}

fn validate(block: &Block, d: i64, l: i64, piece: Option<&StandardModule>) -> Result<()> {
    let base = column_shift(d, l);
    for k in 0..=validation_weights(block.n) {
        let deg = base + k * RHO;
        let mut from_block: Vec<(Vec<u32>, Kind, u8)> = block
            .cells(deg)?
            .into_iter()
            .filter(|c| !is_tower_key(&c.key) && c.key.u == l)
            .map(|c| (c.key.v, c.kind, c.lattice))
            .collect();
        let mut from_piece: Vec<(Vec<u32>, Kind, u8)> = match piece {
            Some(m) => m.cells(deg)?.into_iter().map(|c| (c.key.v, c.kind, c.lattice)).collect(),
            None => vec![],
        };
        from_block.sort();
        from_piece.sort();
        if from_block != from_piece {
            return Err(Error::UnclassifiedModule { d, column: l });
        }
    }
    Ok(())
}

/// `H^s_J(block)` at `g` from the closed forms.
pub fn block_lc(block: &Block, s: u32, g: Degree) -> Result<Group> {
    let (d, _) = g.diagonal();
    let mut out = Group::zero();
    for p in diagonal_decompose(block, d)? {
        out = out.sum(&closed_form_group(&p.module, SHIPPED_RULES, s, g));
    }
    Ok(out)
}

/// `H^s_J(block)` at `g` from the Koszul oracle.
pub fn block_lc_oracle(block: &Block, s: u32, g: Degree) -> Result<Group> {
    let e0 = (g.triv.abs() + g.sgn.abs()) as u32 / 2 + 2;
    lc_oracle(block, &crate::localcoh::vbar_ideal(block.n), s, g, e0, e0 + 8)
}

/// One line of a local cohomology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcRow {
    pub diagonal: i64,
    pub column: i64,
    pub piece: StandardModule,
    pub s: u32,
    pub summand: StandardModule,
    /// Degree of the summand's generator after the shift by `-s`.
    pub position: Degree,
    /// `position - g(d - s, l)` as a multiple of `rho`.
    pub rho_offset: i64,
}

pub fn lc_table(block: &Block, diagonals: std::ops::RangeInclusive<i64>) -> Result<Vec<LcRow>> {
    let mut rows = Vec::new();
    for d in diagonals {
        for p in diagonal_decompose(block, d)? {
            for LcSummand { s, module } in lc_closed_form(&p.module) {
                let position = module.shift - Degree::new(s as i64, 0);
                let base = if p.column >= 0 { column_shift(d - s as i64, p.column) } else { position };
                let rho_offset = (position - base).rho_multiple().ok_or_else(|| {
                    Error::InternalInconsistency(format!("summand of {} at {position} off the rho line", p.module))
                })?;
                rows.push(LcRow { diagonal: d, column: p.column, piece: p.module, s, summand: module, position, rho_offset });
            }
        }
    }
    Ok(rows)
}

/// `H^0` and `H^1` of `BB` with respect to `(a)` at `g`.
pub fn gamma_a(n: u32, g: Degree) -> Result<(Group, Group)> {
    let bb = Block::new(n, BlockKind::BB);
    let a = [Monomial::a_pow(1)];
    let e0 = (nil_exp(n) + g.triv.abs() + g.sgn.abs()) as u32 + 1;
    Ok((lc_oracle(&bb, &a, 0, g, e0, e0 + 6)?, lc_oracle(&bb, &a, 1, g, e0, e0 + 6)?))
}

/// Groups of `BB(1)` split as the connective `BR` part and `2u Z[v1]`.
pub fn bb1_split(g: Degree) -> (Group, Group) {
    let cells = Block::new(1, BlockKind::BB).cells(g).unwrap_or_default();
    let (u, rest): (Vec<_>, Vec<_>) = cells.into_iter().partition(|c| c.key.u == 1);
    (group_of(&rest), group_of(&u))
}
