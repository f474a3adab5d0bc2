//! The coefficient ring of BPR as a subring of `Z(2)[a, u^±, v1, v2, ...]/(2a, v_i a^{2^{i+1}-1})`,
//! its monomial quotients, and the layers of the cofibre sequences for `B/v^l`.

use crate::error::{Error, Result};
use crate::grading::{nil_exp, vbar_weight, Degree, Window};
use crate::groups::{GradedGroups, GroupEntry};
use crate::module::{mult_map, presentation, weighted_exponents, Act, Cell, Kind, Monomial, MonoModule};
use crate::snf::{self, Group, Matrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Truncation of the enumeration: generators `v1..v_{n_vbar}` and u-exponents in `l_min..=l_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub n_vbar: u32,
    pub l_min: i64,
    pub l_max: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { n_vbar: 4, l_min: -64, l_max: 64 }
    }
}

impl Caps {
    pub fn with_n(n_vbar: u32) -> Self {
        Caps { n_vbar, ..Caps::default() }
    }
}

/// Zero by a relation `v_i a^{2^{i+1}-1} = 0`.
pub fn is_zero_by_relations(m: &Monomial) -> bool {
    m.v.iter().enumerate().any(|(i, &c)| c > 0 && m.a >= nil_exp(i as u32 + 1))
}

/// Whether `2^coeff_2val * m` lies in the subring generated by `a` and the `v_m(n)`,
/// with `v_0 = 2`. A u-power `u^l` can only occur as a sum of twists `2^i j` coming
/// from factors actually present, so it must be divisible by `2^i` for the smallest
/// such index `i`.
pub fn is_in_subalgebra(m: &Monomial, coeff_2val: u32) -> bool {
    if m.u == 0 {
        return true;
    }
    let min = if coeff_2val >= 1 { Some(0) } else { m.min_index() };
    match min {
        Some(i) => m.u.rem_euclid(1i64 << i) == 0,
        None => false,
    }
}

/// Cell type of the ambient monomial `m` inside the ring, or `None` if no multiple of it occurs.
pub fn ring_cell(m: &Monomial) -> Option<Cell<Monomial>> {
    if m.a < 0 || is_zero_by_relations(m) {
        return None;
    }
    if m.a > 0 {
        return is_in_subalgebra(m, 0).then(|| Cell::tors(m.clone()));
    }
    Some(Cell::free(m.clone(), if is_in_subalgebra(m, 0) { 1 } else { 2 }))
}

/// Bounds on the u-exponent and on the largest `v_i` that can occur in degree `deg`.
///
/// With `j = d - 4l >= 0` and `c` of weight `t - 2l`, a negative `l` needs content
/// of index `m` with `2^m | l`, so `j < 2^{m+1} - 1 <= 2|l| - 1`.
pub fn rigorous_bounds(deg: Degree) -> (i64, i64, u32) {
    let (d, _) = deg.diagonal();
    let t = deg.triv;
    let l_hi = d.div_euclid(4).min(t.div_euclid(2));
    let l_lo = if d <= -2 { -((-d - 2) / 2) } else { 0 };
    let w_max = t - 2 * l_lo;
    let mut n = 0;
    while vbar_weight(n + 1) <= w_max {
        n += 1;
    }
    (l_lo, l_hi, n)
}

fn enumerate(deg: Degree, n_vbar: u32, l_lo: i64, l_hi: i64) -> Vec<Cell<Monomial>> {
    let (d, _) = deg.diagonal();
    let mut out = Vec::new();
    for l in l_lo..=l_hi {
        let a = d - 4 * l;
        let w = deg.triv - 2 * l;
        if a < 0 || w < 0 {
            continue;
        }
        for c in weighted_exponents(1, n_vbar, w) {
            if let Some(cell) = ring_cell(&Monomial::new(a, l, c)) {
                out.push(cell);
            }
        }
    }
    out.sort_by(|x, y| x.key.cmp(&y.key));
    out
}

/// Basis of `pi_deg BPR` from the proven bounds.
pub fn basis_exact(deg: Degree) -> Vec<Cell<Monomial>> {
    let (lo, hi, n) = rigorous_bounds(deg);
    enumerate(deg, n, lo, hi)
}

/// Basis within `caps`, certified against the proven bounds.
pub fn basis_in_degree(deg: Degree, caps: &Caps) -> Result<Vec<Cell<Monomial>>> {
    let capped = enumerate(deg, caps.n_vbar, caps.l_min, caps.l_max);
    if capped != basis_exact(deg) {
        return Err(Error::StabilizationFailure(deg));
    }
    Ok(capped)
}

pub fn group_in_degree(deg: Degree) -> (usize, usize) {
    let cells = basis_exact(deg);
    let free = cells.iter().filter(|c| c.kind == Kind::Free).count();
    (free, cells.len() - free)
}

/// `pi_* BPR` as a module over itself (acting by monomials with coefficients).
#[derive(Clone, Debug, Default)]
pub struct Bpr {
    pub caps: Option<Caps>,
}

impl MonoModule for Bpr {
    type Key = Monomial;

    fn cells(&self, deg: Degree) -> Result<Vec<Cell<Monomial>>> {
        match &self.caps {
            Some(c) => basis_in_degree(deg, c),
            None => Ok(basis_exact(deg)),
        }
    }

    fn act(&self, key: &Monomial, x: &Monomial) -> Option<Monomial> {
        Some(key.times(x))
    }

    fn vanishes(&self, key: &Monomial, _deg: Degree) -> bool {
        ring_cell(key).is_none()
    }
}

/// Element of the ambient ring: monomial to integer coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffElement {
    pub terms: BTreeMap<Monomial, i64>,
}

impl CoeffElement {
    pub fn monomial(m: Monomial, coeff: i64) -> Self {
        let mut e = CoeffElement::default();
        e.add_term(m, coeff);
        e
    }

    pub fn a() -> Self {
        CoeffElement::monomial(Monomial::a_pow(1), 1)
    }

    /// `v_m(j) = u^{2^m j} v_m`, with `v_0(j) = 2u^j`.
    pub fn vbar_twisted(m: u32, j: i64) -> Self {
        if m == 0 {
            CoeffElement::monomial(Monomial::u_pow(j), 2)
        } else {
            CoeffElement::monomial(Monomial::vbar(m, 1).times(&Monomial::u_pow((1i64 << m) * j)), 1)
        }
    }

    fn add_term(&mut self, m: Monomial, coeff: i64) {
        if is_zero_by_relations(&m) {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e += coeff;
        if m.a > 0 {
            *e = e.rem_euclid(2);
        }
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn multiply(&self, o: &CoeffElement) -> CoeffElement {
        let mut r = CoeffElement::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.times(m2), c1 * c2);
            }
        }
        r
    }

    pub fn is_member(&self) -> bool {
        self.terms.iter().all(|(m, &c)| is_in_subalgebra(m, c.trailing_zeros()))
    }

    pub fn degree(&self) -> Option<Degree> {
        let mut ds = self.terms.keys().map(Monomial::degree);
        let d = ds.next()?;
        ds.all(|x| x == d).then_some(d)
    }
}

/// Index of `I` in the ideal `(v_i^{l_i})`: the smallest lattice with which `m` lies in it.
fn ideal_lattice(m: &Monomial, l: &[u32]) -> Option<u8> {
    let mut best: Option<u8> = None;
    for (i, &li) in l.iter().enumerate() {
        if li == 0 {
            continue;
        }
        let Some(q) = m.div_vbar(&Monomial::vbar(i as u32 + 1, li)) else { continue };
        if let Some(c) = ring_cell(&q) {
            best = Some(best.map_or(c.lattice, |b| b.min(c.lattice)));
        }
    }
    best
}

/// The algebraic quotient `pi_* BPR / (v_i^{l_i})`.
#[derive(Clone, Debug, Default)]
pub struct QuotModule {
    /// `l[i-1]` is the exponent on `v_i`; zero entries are not quotiented.
    pub l: Vec<u32>,
}

impl QuotModule {
    pub fn new(l: &[u32]) -> Self {
        QuotModule { l: l.to_vec() }
    }

    fn cell(&self, c: Cell<Monomial>) -> Option<Cell<Monomial>> {
        match (ideal_lattice(&c.key, &self.l), c.kind) {
            (None, _) => Some(c),
            (Some(li), Kind::Free) if li > c.lattice => Some(Cell::tors(c.key)),
            _ => None,
        }
    }
}

impl MonoModule for QuotModule {
    type Key = Monomial;

    fn cells(&self, deg: Degree) -> Result<Vec<Cell<Monomial>>> {
        Ok(basis_exact(deg).into_iter().filter_map(|c| self.cell(c)).collect())
    }

    fn act(&self, key: &Monomial, x: &Monomial) -> Option<Monomial> {
        Some(key.times(x))
    }

    fn vanishes(&self, key: &Monomial, _deg: Degree) -> bool {
        ring_cell(key).and_then(|c| self.cell(c)).is_none()
    }
}

/// Layers of `0 -> sub -> pi_deg(B/v^l) -> quot -> 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientGroups {
    pub sub: Group,
    pub quot: Group,
    /// Both layers were computed from exact descriptions of the previous stage.
    pub exact_layers: bool,
    pub extension_known: bool,
}

impl QuotientGroups {
    pub fn group(&self) -> Option<Group> {
        self.extension_known.then(|| self.sub.sum(&self.quot))
    }
}

/// Peel off the smallest index `j` with `l_j > 0`: `B/v^l` is the cofibre of `v_j^{l_j}` on
/// `B/v^{l'}`. The previous stage is modelled by the algebraic quotient, which is exact for
/// `l'` empty or in degrees `*rho - c` with `0 <= c <= 2^{j'+1}`.
pub fn quotient_groups(l: &[u32], deg: Degree) -> Result<QuotientGroups> {
    let Some(j0) = l.iter().position(|&x| x > 0) else {
        let g = Bpr::default().group(deg)?;
        return Ok(QuotientGroups { sub: g, quot: Group::zero(), exact_layers: true, extension_known: true });
    };
    let j = j0 as u32 + 1;
    let lj = l[j0];
    let mut rest = l.to_vec();
    rest[j0] = 0;
    let prev = QuotModule::new(&rest);
    let x = Act::vbar(j, lj);
    let step = x.degree();
    let sub = mult_map(&prev, &x, deg - step)?.cokernel()?;
    let quot = mult_map(&prev, &x, deg - Degree::new(1, 0) - step)?.kernel()?;
    let exact_layers = match rest.iter().position(|&x| x > 0) {
        None => true,
        Some(j1) => {
            let bound = 1i64 << (j1 + 2);
            let c = -deg.diagonal().0;
            c >= 0 && c < bound
        }
    };
    let extension_known = exact_layers && (sub.is_zero() || quot.torsion.is_empty());
    Ok(QuotientGroups { sub, quot, exact_layers, extension_known })
}

/// Free rank of `pi_t` of the underlying spectrum of `B/v^l`.
pub fn underlying_rank(l: &[u32], t: i64) -> usize {
    if t < 0 || t % 2 != 0 {
        return 0;
    }
    let w = t / 2;
    let mut n = 0;
    while vbar_weight(n + 1) <= w {
        n += 1;
    }
    weighted_exponents(1, n, w)
        .into_iter()
        .filter(|c| c.iter().enumerate().all(|(i, &e)| l.get(i).is_none_or(|&li| li == 0 || e < li)))
        .count()
}

/// Index of the image of restriction, when it is the same for every free cell and
/// the free cells map onto distinct underlying monomials spanning the underlying group.
pub fn restriction_index<K>(cells: &[Cell<K>], keys_v: impl Fn(&K) -> Vec<u32>, underlying: usize) -> Option<u32> {
    let free: Vec<&Cell<K>> = cells.iter().filter(|c| c.kind == Kind::Free).collect();
    if free.len() != underlying {
        return None;
    }
    let mut vs: Vec<Vec<u32>> = free.iter().map(|c| keys_v(&c.key)).collect();
    vs.sort();
    vs.dedup();
    if vs.len() != free.len() {
        return None;
    }
    let l = free.first().map_or(1, |c| c.lattice);
    free.iter().all(|c| c.lattice == l).then_some(l as u32)
}

/// Group entry of `B/v^l` (or `B` for empty `l`) with restriction index when underlying is nonzero.
pub fn quotient_entry(l: &[u32], deg: Degree) -> Result<Option<GroupEntry>> {
    let q = quotient_groups(l, deg)?;
    let Some(g) = q.group() else { return Ok(None) };
    let mut e = GroupEntry::from_group(&g);
    if q.quot.is_zero() && q.exact_layers && g.free > 0 {
        let cells = QuotModule::new(l).cells(deg)?;
        e.restriction_index =
            restriction_index(&cells, |m: &Monomial| m.v.clone(), underlying_rank(l, deg.underlying()));
    }
    Ok(Some(e))
}

pub fn table(deg_window: &Window, caps: Option<&Caps>) -> Result<GradedGroups> {
    let m = Bpr { caps: caps.copied() };
    let mut g = GradedGroups::default();
    for d in deg_window.degrees() {
        let cells = m.cells(d)?;
        let mut e = GroupEntry::from_group(&crate::module::group_of(&cells));
        if e.free_rank > 0 {
            e.restriction_index = restriction_index(&cells, |k| k.v.clone(), underlying_rank(&[], d.underlying()));
        }
        g.insert(d, e);
    }
    Ok(g)
}

/// Outcome per degree of the action of `v_i^e` on `pi(B/v_i^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Action {
    Zero,
    Nonzero,
    Undetermined,
}

/// Columns of `basis` (a kernel basis) mapped through `m`, tested against target torsion.
fn restricted_is_zero(basis: &Matrix, m: &Matrix, tgt: &[snf::Cyclic]) -> Result<bool> {
    let img = m.mul(basis)?;
    for i in 0..img.rows() {
        for j in 0..img.cols() {
            let x = img.get(i, j);
            let zero = match tgt[i] {
                snf::Cyclic::Free => x == 0,
                snf::Cyclic::Tors(e) => x.rem_euclid(1 << e) == 0,
            };
            if !zero {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn action_in_degree(i: u32, k: u32, e: u32, deg: Degree) -> Result<Action> {
    let b = Bpr::default();
    let vk = Act::vbar(i, k);
    let ve = Act::vbar(i, e);
    let mut l = vec![0; i as usize];
    l[i as usize - 1] = k;
    let quot_mod = QuotModule::new(&l);
    // sub layer: the algebraic quotient
    if !mult_map(&quot_mod, &ve, deg)?.is_zero() {
        return Ok(Action::Nonzero);
    }
    // quotient layer: v_i^k-torsion of pi_{deg-1-k|v_i|} B
    let qdeg = deg - Degree::new(1, 0) - vk.degree();
    let mk = mult_map(&b, &vk, qdeg)?;
    let src = presentation(&mk.src);
    let a = Matrix::hstack(
        mk.matrix.rows(),
        &[&mk.matrix, &{
            let tgt = presentation(&mk.tgt);
            let tors: Vec<(usize, i128)> = tgt
                .iter()
                .enumerate()
                .filter_map(|(r, c)| match c {
                    snf::Cyclic::Tors(e) => Some((r, 1i128 << e)),
                    _ => None,
                })
                .collect();
            let mut rm = Matrix::zeros(tgt.len(), tors.len());
            for (col, &(r, o)) in tors.iter().enumerate() {
                rm.set(r, col, o);
            }
            rm
        }],
    );
    let kb = snf::kernel_basis(&a)?;
    let mut ker = Matrix::zeros(src.len(), kb.cols());
    for r in 0..src.len() {
        for c in 0..kb.cols() {
            ker.set(r, c, kb.get(r, c));
        }
    }
    let me = mult_map(&b, &ve, qdeg)?;
    if !restricted_is_zero(&ker, &me.matrix, &presentation(&me.tgt))? {
        return Ok(Action::Nonzero);
    }
    let quot = mk.kernel()?;
    if quot.is_zero() || e >= 2 * k {
        return Ok(Action::Zero);
    }
    // the remaining part of the action lands in the sub layer at the target degree
    let target_sub = mult_map(&b, &vk, deg + ve.degree() - vk.degree())?.cokernel()?;
    Ok(if target_sub.is_zero() { Action::Zero } else { Action::Undetermined })
}

/// Whether `v_i^e` acts as zero on `pi(B/v_i^k)` in every degree of `window`.
/// `Ok(false)` is certified by a nonzero layer; undetermined cross terms give `UnknownExtension`.
pub fn nilpotence_check(i: u32, k: u32, e: u32, window: &Window) -> Result<bool> {
    let mut unknown = None;
    for deg in window.degrees() {
        match action_in_degree(i, k, e, deg)? {
            Action::Nonzero => return Ok(false),
            Action::Undetermined => {
                unknown.get_or_insert(deg);
            }
            Action::Zero => {}
        }
    }
    match unknown {
        Some(d) => Err(Error::UnknownExtension(d)),
        None => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::RHO;

    #[test]
    fn membership_examples() {
        let u = Monomial::u_pow(1);
        assert!(!is_in_subalgebra(&u, 0));
        assert!(is_in_subalgebra(&u, 1));
        assert!(is_in_subalgebra(&Monomial::new(0, 2, vec![1]), 0));
    }

    #[test]
    fn small_degrees() {
        let b = basis_exact(Degree::new(0, 0));
        assert_eq!(b, vec![Cell::free(Monomial::one(), 1)]);
        let b = basis_exact(Degree::new(0, -1));
        assert_eq!(b, vec![Cell::tors(Monomial::a_pow(1))]);
        let b = basis_exact(Degree::new(2, -2));
        assert_eq!(b, vec![Cell::free(Monomial::u_pow(1), 2)]);
    }

    #[test]
    fn products() {
        let p = CoeffElement::vbar_twisted(1, 1).multiply(&CoeffElement::vbar_twisted(0, 3));
        assert_eq!(p, CoeffElement::monomial(Monomial::new(0, 5, vec![1]), 2));
        assert!(CoeffElement::a().multiply(&CoeffElement::vbar_twisted(0, 1)).is_zero());
        let p = CoeffElement::vbar_twisted(1, 1).multiply(&CoeffElement::vbar_twisted(2, 1));
        let q = CoeffElement::vbar_twisted(2, 0).multiply(&CoeffElement::vbar_twisted(1, 3));
        assert_eq!(p, q);
        assert_eq!(p, CoeffElement::monomial(Monomial::new(0, 6, vec![1, 1]), 1));
    }

    #[test]
    fn mult_maps() {
        let b = Bpr::default();
        let m = mult_map(&b, &Act::vbar(1, 1), Degree::new(0, 0)).unwrap();
        assert_eq!(m.matrix, Matrix::from_rows(&[vec![1]]));
        let m = mult_map(&b, &Act::mono(Monomial::a_pow(1)), Degree::new(0, 0)).unwrap();
        assert_eq!(m.matrix, Matrix::from_rows(&[vec![1]]));
        let m = mult_map(&b, &Act::vbar(1, 1), Degree::new(2, -2)).unwrap();
        assert!(m.kernel().unwrap().is_zero());
        assert_eq!(m.src.len(), 1);
    }

    #[test]
    fn quotient_examples() {
        let all = vec![1; 6];
        for k in 1..=4 {
            assert!(quotient_groups(&all, k * RHO).unwrap().group().unwrap().is_zero());
        }
        assert_eq!(quotient_groups(&all, Degree::new(0, 0)).unwrap().group().unwrap(), Group::new(1, 0));
        let q = quotient_groups(&[1], RHO - Degree::new(1, 0)).unwrap();
        assert!(q.group().unwrap().is_zero());
    }

    #[test]
    fn underlying_examples() {
        assert_eq!(underlying_rank(&[], 6), 2);
        assert_eq!(underlying_rank(&[1], 6), 1);
        assert_eq!(underlying_rank(&[], 5), 0);
    }

    #[test]
    fn restriction_examples() {
        let t = table(&Window::new(-6, 6, -6, 6).unwrap(), None).unwrap();
        for k in 0..=6 {
            assert_eq!(t.get(k * RHO).restriction_index, Some(1));
        }
        for k in 2..=6 {
            assert_eq!(t.get(k * RHO - Degree::new(4, 0)).restriction_index, Some(2));
        }
    }
}
