//! Monomial modules: per-degree bases of cyclic cells and the action of monomials on them.

use crate::error::{Error, Result};
use crate::grading::{vbar_weight, Degree};
use crate::snf::{self, Cyclic, Group, Matrix};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::{self, Debug};
use std::hash::Hash;

/// `a^a u^u v1^{v[0]} v2^{v[1]} ...`; trailing zero exponents are trimmed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub a: i64,
    pub u: i64,
    pub v: Vec<u32>,
}

impl Monomial {
    pub fn new(a: i64, u: i64, mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial { a, u, v }
    }

    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn a_pow(k: i64) -> Self {
        Monomial::new(k, 0, vec![])
    }

    pub fn u_pow(l: i64) -> Self {
        Monomial::new(0, l, vec![])
    }

    /// `v_i^e`, `i >= 1`.
    pub fn vbar(i: u32, e: u32) -> Self {
        let mut v = vec![0; i as usize];
        v[i as usize - 1] = e;
        Monomial::new(0, 0, v)
    }

    /// Exponent of `v_i`.
    pub fn c(&self, i: u32) -> u32 {
        self.v.get(i as usize - 1).copied().unwrap_or(0)
    }

    pub fn has_vbar(&self) -> bool {
        !self.v.is_empty()
    }

    /// Sum of `c_i (2^i - 1)`.
    pub fn vbar_weight(&self) -> i64 {
        self.v.iter().enumerate().map(|(i, &c)| c as i64 * vbar_weight(i as u32 + 1)).sum()
    }

    /// Smallest `i` with `c_i > 0`.
    pub fn min_index(&self) -> Option<u32> {
        self.v.iter().position(|&c| c > 0).map(|i| i as u32 + 1)
    }

    pub fn max_index(&self) -> u32 {
        self.v.len() as u32
    }

    pub fn degree(&self) -> Degree {
        let w = self.vbar_weight();
        Degree::new(2 * self.u + w, w - 2 * self.u - self.a)
    }

    pub fn times(&self, o: &Monomial) -> Monomial {
        let len = self.v.len().max(o.v.len());
        let v = (0..len)
            .map(|i| self.v.get(i).copied().unwrap_or(0) + o.v.get(i).copied().unwrap_or(0))
            .collect();
        Monomial::new(self.a + o.a, self.u + o.u, v)
    }

    /// `self / o` when every exponent of `o` is at most that of `self` (a and u may go negative).
    pub fn div_vbar(&self, o: &Monomial) -> Option<Monomial> {
        if o.v.len() > self.v.len() {
            return None;
        }
        let mut v = self.v.clone();
        for (i, &e) in o.v.iter().enumerate() {
            v[i] = v[i].checked_sub(e)?;
        }
        Some(Monomial::new(self.a - o.a, self.u - o.u, v))
    }
}

impl Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pow = |s: &str, e: i64| if e == 1 { s.to_string() } else { format!("{s}^{e}") };
        if self.a != 0 {
            parts.push(pow("a", self.a));
        }
        if self.u != 0 {
            parts.push(pow("u", self.u));
        }
        for (i, &c) in self.v.iter().enumerate() {
            if c > 0 {
                parts.push(pow(&format!("v{}", i + 1), c as i64));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// A monomial acting with an integer coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Act {
    pub mono: Monomial,
    pub coeff: i64,
}

impl Act {
    pub fn mono(mono: Monomial) -> Self {
        Act { mono, coeff: 1 }
    }

    pub fn vbar(i: u32, e: u32) -> Self {
        Act::mono(Monomial::vbar(i, e))
    }

    pub fn degree(&self) -> Degree {
        self.mono.degree()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Free,
    /// A copy of `F2`.
    Tors,
}

/// One cyclic summand of a module in a fixed degree. `lattice` records that the
/// generator is `lattice * key` relative to the ambient monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell<K> {
    pub key: K,
    pub kind: Kind,
    pub lattice: u8,
}

impl<K> Cell<K> {
    pub fn free(key: K, lattice: u8) -> Self {
        Cell { key, kind: Kind::Free, lattice }
    }

    pub fn tors(key: K) -> Self {
        Cell { key, kind: Kind::Tors, lattice: 1 }
    }

    pub fn cyclic(&self) -> Cyclic {
        match self.kind {
            Kind::Free => Cyclic::Free,
            Kind::Tors => Cyclic::Tors(1),
        }
    }
}

pub trait MonoModule {
    type Key: Clone + Eq + Hash + Ord + Debug;

    fn cells(&self, deg: Degree) -> Result<Vec<Cell<Self::Key>>>;

    /// Key of `x * key` when the product can be nonzero, `None` when it is zero for structural reasons.
    fn act(&self, key: &Self::Key, x: &Monomial) -> Option<Self::Key>;

    /// True when a key returned by `act` is zero in its degree (e.g. killed by a relation).
    /// Used to tell genuine zeros from enumeration gaps.
    fn vanishes(&self, _key: &Self::Key, _deg: Degree) -> bool {
        false
    }

    fn group(&self, deg: Degree) -> Result<Group> {
        Ok(group_of(&self.cells(deg)?))
    }
}

pub fn group_of<K>(cells: &[Cell<K>]) -> Group {
    let free = cells.iter().filter(|c| c.kind == Kind::Free).count();
    Group::new(free, cells.len() - free)
}

pub fn presentation<K>(cells: &[Cell<K>]) -> Vec<Cyclic> {
    cells.iter().map(Cell::cyclic).collect()
}

/// Matrix (target rows x source columns) of multiplication by `x` from `src` cells.
pub fn action_matrix<M: MonoModule + ?Sized>(
    m: &M,
    x: &Act,
    src: &[Cell<M::Key>],
    tgt: &[Cell<M::Key>],
    tgt_deg: Degree,
) -> Result<Matrix> {
    let index: HashMap<&M::Key, usize> = tgt.iter().enumerate().map(|(i, c)| (&c.key, i)).collect();
    let mut mat = Matrix::zeros(tgt.len(), src.len());
    for (j, s) in src.iter().enumerate() {
        let Some(k) = m.act(&s.key, &x.mono) else { continue };
        let Some(&i) = index.get(&k) else {
            if m.vanishes(&k, tgt_deg) {
                continue;
            }
            return Err(Error::InternalInconsistency(format!(
                "product {k:?} missing from basis at {tgt_deg}"
            )));
        };
        let t = &tgt[i];
        let num = x.coeff * s.lattice as i64;
        if num % t.lattice as i64 != 0 {
            return Err(Error::InternalInconsistency(format!(
                "{:?} maps outside the lattice of {:?}",
                s.key, t.key
            )));
        }
        let mut coef = (num / t.lattice as i64) as i128;
        match (s.kind, t.kind) {
            (_, Kind::Tors) => coef = coef.rem_euclid(2),
            (Kind::Tors, Kind::Free) if coef != 0 => {
                return Err(Error::InternalInconsistency(format!(
                    "torsion class {:?} maps to free class {:?}",
                    s.key, t.key
                )))
            }
            _ => {}
        }
        mat.set(i, j, coef);
    }
    Ok(mat)
}

/// Multiplication by `x` out of degree `deg`, with the bases used.
pub struct MultMap<K> {
    pub src: Vec<Cell<K>>,
    pub tgt: Vec<Cell<K>>,
    pub matrix: Matrix,
}

pub fn mult_map<M: MonoModule + ?Sized>(m: &M, x: &Act, deg: Degree) -> Result<MultMap<M::Key>> {
    let src = m.cells(deg)?;
    let tdeg = deg + x.degree();
    let tgt = m.cells(tdeg)?;
    let matrix = action_matrix(m, x, &src, &tgt, tdeg)?;
    Ok(MultMap { src, tgt, matrix })
}

impl<K> MultMap<K> {
    pub fn kernel(&self) -> Result<Group> {
        snf::kernel(&presentation(&self.src), &self.matrix, &presentation(&self.tgt))
    }

    pub fn cokernel(&self) -> Result<Group> {
        snf::cokernel(&self.matrix, &presentation(&self.tgt))
    }

    pub fn image(&self) -> Result<Group> {
        snf::image(&presentation(&self.src), &self.matrix, &presentation(&self.tgt))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

/// Degree shift of a module: `shifted(M, s)` in degree `g` is `M` in degree `g - s`.
pub struct Shifted<'a, M: ?Sized> {
    pub inner: &'a M,
    pub shift: Degree,
}

impl<M: MonoModule + ?Sized> MonoModule for Shifted<'_, M> {
    type Key = M::Key;

    fn cells(&self, deg: Degree) -> Result<Vec<Cell<M::Key>>> {
        self.inner.cells(deg - self.shift)
    }

    fn act(&self, key: &M::Key, x: &Monomial) -> Option<M::Key> {
        self.inner.act(key, x)
    }

    fn vanishes(&self, key: &M::Key, deg: Degree) -> bool {
        self.inner.vanishes(key, deg - self.shift)
    }
}

/// Exponent vectors `c_1..c_n` (variables `lo..=n`) of total weight `w`,
/// where `v_i` has weight `2^i - 1`.
pub fn weighted_exponents(lo: u32, n: u32, w: i64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if w < 0 {
        return out;
    }
    let mut cur = vec![0u32; n as usize];
    let lo = lo.max(1);
    if lo > n {
        if w == 0 {
            out.push(cur);
        }
        return out;
    }
    rec(n, lo, w, &mut cur, &mut out);
    out
}

fn rec(i: u32, lo: u32, rem: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i < lo {
        if rem == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let wt = vbar_weight(i);
    let mut e = 0;
    while e * wt <= rem {
        cur[i as usize - 1] = e as u32;
        rec(i - 1, lo, rem - e * wt, cur, out);
        e += 1;
    }
    cur[i as usize - 1] = 0;
}
