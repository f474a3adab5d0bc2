//! Exact integer matrices, diagonalization and 2-local homology of presented groups.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i128 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: i128) {
        self.data[r * self.cols + c] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut m = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let p = a.checked_mul(o.get(k, j)).ok_or(Error::Overflow)?;
                    let s = m.get(i, j).checked_add(p).ok_or(Error::Overflow)?;
                    m.set(i, j, s);
                }
            }
        }
        Ok(m)
    }

    /// Horizontal concatenation; all parts must share the row count.
    pub fn hstack(rows: usize, parts: &[&Matrix]) -> Matrix {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut m = Matrix::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.rows, rows);
            for i in 0..rows {
                for j in 0..p.cols {
                    m.set(i, off + j, p.get(i, j));
                }
            }
            off += p.cols;
        }
        m
    }

    /// Copy `b` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    pub fn scaled(&self, k: i128) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    // row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: i128) -> Result<()> {
        for j in 0..self.cols {
            let v = self
                .get(dst, j)
                .checked_sub(q.checked_mul(self.get(src, j)).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
            self.set(dst, j, v);
        }
        Ok(())
    }

    // col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: i128) -> Result<()> {
        for i in 0..self.rows {
            let v = self
                .get(i, dst)
                .checked_sub(q.checked_mul(self.get(i, src)).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
            self.set(i, dst, v);
        }
        Ok(())
    }
}

/// `u * a * v = d` with `d` diagonal; `u_inv` is the inverse of `u`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
    pub diag: Vec<i128>,
}

impl Diagonalization {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

/// Diagonalize over Z by unimodular row and column operations.
/// The diagonal need not form a divisibility chain.
pub fn diagonalize(a: &Matrix) -> Result<Diagonalization> {
    let (r, c) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut u = Matrix::identity(r);
    let mut u_inv = Matrix::identity(r);
    let mut v = Matrix::identity(c);
    let mut diag = Vec::new();
    for t in 0..r.min(c) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = m.get(i, j);
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < m.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        m.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut moved = false;
            for i in t + 1..r {
                let x = m.get(i, t);
                if x == 0 {
                    continue;
                }
                let q = x / m.get(t, t);
                m.row_axpy(i, t, q)?;
                u.row_axpy(i, t, q)?;
                // inverse of the row operation acts on columns of u_inv
                u_inv.col_axpy(t, i, -q)?;
                if m.get(i, t) != 0 {
                    m.swap_rows(t, i);
                    u.swap_rows(t, i);
                    u_inv.swap_cols(t, i);
                    moved = true;
                }
            }
            for j in t + 1..c {
                let x = m.get(t, j);
                if x == 0 {
                    continue;
                }
                let q = x / m.get(t, t);
                m.col_axpy(j, t, q)?;
                v.col_axpy(j, t, q)?;
                if m.get(t, j) != 0 {
                    m.swap_cols(t, j);
                    v.swap_cols(t, j);
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        diag.push(m.get(t, t));
    }
    Ok(Diagonalization { u, u_inv, v, diag })
}

/// Columns form a Z-basis of the kernel of `a`.
pub fn kernel_basis(a: &Matrix) -> Result<Matrix> {
    let dz = diagonalize(a)?;
    let k = a.cols - dz.rank();
    let mut out = Matrix::zeros(a.cols, k);
    for j in 0..k {
        for i in 0..a.cols {
            out.set(i, j, dz.v.get(i, dz.rank() + j));
        }
    }
    Ok(out)
}

pub fn two_valuation(x: i128) -> u32 {
    debug_assert!(x != 0);
    x.trailing_zeros()
}

/// A finitely generated 2-local abelian group: free rank plus cyclic 2-power torsion.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Group {
    pub free: usize,
    /// Exponents `e` of the summands `Z/2^e`, sorted.
    pub torsion: Vec<u32>,
}

impl Group {
    pub fn zero() -> Self {
        Group::default()
    }

    pub fn new(free: usize, f2: usize) -> Self {
        Group { free, torsion: vec![1; f2] }
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }

    pub fn is_elementary(&self) -> bool {
        self.torsion.iter().all(|&e| e == 1)
    }

    /// Number of cyclic torsion summands.
    pub fn f2_rank(&self) -> usize {
        self.torsion.len()
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.free, self.torsion.len())
    }

    pub fn sum(&self, o: &Group) -> Group {
        let mut torsion = self.torsion.clone();
        torsion.extend_from_slice(&o.torsion);
        torsion.sort_unstable();
        Group { free: self.free + o.free, torsion }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free > 0 {
            parts.push(if self.free == 1 { "Z".to_string() } else { format!("Z^{}", self.free) });
        }
        for &e in &self.torsion {
            parts.push(if e == 1 { "F2".to_string() } else { format!("Z/{}", 1u64 << e) });
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// One generator of a presented group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cyclic {
    Free,
    /// Order `2^e`.
    Tors(u32),
}

impl Cyclic {
    fn order(self) -> Option<i128> {
        match self {
            Cyclic::Free => None,
            Cyclic::Tors(e) => Some(1i128 << e),
        }
    }
}

fn relation_matrix(gens: &[Cyclic]) -> Matrix {
    let tors: Vec<(usize, i128)> =
        gens.iter().enumerate().filter_map(|(i, g)| g.order().map(|o| (i, o))).collect();
    let mut m = Matrix::zeros(gens.len(), tors.len());
    for (j, &(i, o)) in tors.iter().enumerate() {
        m.set(i, j, o);
    }
    m
}

/// Group presented by `gens` modulo the columns of `rels`.
pub fn cokernel_of(gens: &[Cyclic], rels: &Matrix) -> Result<Group> {
    homology(gens, Some(rels), None, &[])
}

/// Homology at the middle of `prev -d_in-> mid -d_out-> next`, where `mid` and
/// `next` are presented by their cyclic generators. `d_in` is `mid x _`,
/// `d_out` is `next x mid`. Odd torsion is discarded.
pub fn homology(
    mid: &[Cyclic],
    d_in: Option<&Matrix>,
    d_out: Option<&Matrix>,
    next: &[Cyclic],
) -> Result<Group> {
    let nm = mid.len();
    if nm == 0 {
        return Ok(Group::zero());
    }
    let z_gens = match d_out {
        Some(d) if d.rows > 0 => {
            if d.cols != nm || d.rows != next.len() {
                return Err(Error::DimensionMismatch(format!(
                    "outgoing map {}x{} for {} -> {}",
                    d.rows,
                    d.cols,
                    nm,
                    next.len()
                )));
            }
            let a = Matrix::hstack(d.rows, &[d, &relation_matrix(next)]);
            let k = kernel_basis(&a)?;
            let mut z = Matrix::zeros(nm, k.cols);
            for i in 0..nm {
                for j in 0..k.cols {
                    z.set(i, j, k.get(i, j));
                }
            }
            z
        }
        _ => Matrix::identity(nm),
    };
    let dz = diagonalize(&z_gens)?;
    let zr = dz.rank();
    if zr == 0 {
        return Ok(Group::zero());
    }
    let rel_mid = relation_matrix(mid);
    let empty = Matrix::zeros(nm, 0);
    let din = d_in.unwrap_or(&empty);
    if din.rows != nm {
        return Err(Error::DimensionMismatch(format!("incoming map has {} rows, expected {nm}", din.rows)));
    }
    let b = Matrix::hstack(nm, &[din, &rel_mid]);
    let ub = dz.u.mul(&b)?;
    let mut y = Matrix::zeros(zr, b.cols);
    for i in 0..nm {
        for j in 0..b.cols {
            let x = ub.get(i, j);
            if i < zr {
                if x % dz.diag[i] != 0 {
                    return Err(Error::InternalInconsistency(
                        "boundary not contained in cycles".into(),
                    ));
                }
                y.set(i, j, x / dz.diag[i]);
            } else if x != 0 {
                return Err(Error::InternalInconsistency("boundary not contained in cycles".into()));
            }
        }
    }
    let dy = diagonalize(&y)?;
    let mut g = Group { free: zr - dy.rank(), torsion: Vec::new() };
    for &d in &dy.diag {
        let e = two_valuation(d);
        if e > 0 {
            g.torsion.push(e);
        }
    }
    g.torsion.sort_unstable();
    Ok(g)
}

/// Kernel of `map: src -> tgt` between presented groups.
pub fn kernel(src: &[Cyclic], map: &Matrix, tgt: &[Cyclic]) -> Result<Group> {
    homology(src, None, Some(map), tgt)
}

/// Cokernel of `map: src -> tgt` between presented groups.
pub fn cokernel(map: &Matrix, tgt: &[Cyclic]) -> Result<Group> {
    homology(tgt, Some(map), None, &[])
}

/// Image of `map: src -> tgt`, computed as `src / ker`.
pub fn image(src: &[Cyclic], map: &Matrix, tgt: &[Cyclic]) -> Result<Group> {
    // image = coker(ker -> src) where ker is realised as a sublattice
    let a = Matrix::hstack(map.rows, &[map, &relation_matrix(tgt)]);
    let k = kernel_basis(&a)?;
    let mut kk = Matrix::zeros(src.len(), k.cols);
    for i in 0..src.len() {
        for j in 0..k.cols {
            kk.set(i, j, k.get(i, j));
        }
    }
    homology(src, Some(&kk), None, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_diag(a: &Matrix) {
        let dz = diagonalize(a).unwrap();
        let d = dz.u.mul(a).unwrap().mul(&dz.v).unwrap();
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let want = if i == j && i < dz.rank() { dz.diag[i] } else { 0 };
                assert_eq!(d.get(i, j), want);
            }
        }
        assert_eq!(dz.u.mul(&dz.u_inv).unwrap(), Matrix::identity(a.rows()));
    }

    #[test]
    fn diagonal_form() {
        check_diag(&Matrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        check_diag(&Matrix::from_rows(&[vec![0, 0], vec![0, 3], vec![5, 1]]));
        check_diag(&Matrix::zeros(2, 3));
    }

    #[test]
    fn cokernels() {
        let m = Matrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        // invariant factors 2, 6, 12 give Z/2 + Z/2 + Z/4 two-locally
        let g = cokernel(&m, &[Cyclic::Free; 3]).unwrap();
        assert_eq!(g, Group { free: 0, torsion: vec![1, 1, 2] });
        let g = cokernel(&Matrix::from_rows(&[vec![3], vec![0]]), &[Cyclic::Free; 2]).unwrap();
        assert_eq!(g, Group::new(1, 0));
    }

    #[test]
    fn torsion_presentations() {
        // Z --2--> Z/4 has cokernel Z/2 and kernel 2Z (free)
        let m = Matrix::from_rows(&[vec![2]]);
        assert_eq!(cokernel(&m, &[Cyclic::Tors(2)]).unwrap(), Group::new(0, 1));
        assert_eq!(kernel(&[Cyclic::Free], &m, &[Cyclic::Tors(2)]).unwrap(), Group::new(1, 0));
        // F2 --1--> F2 is iso
        let one = Matrix::from_rows(&[vec![1]]);
        assert!(kernel(&[Cyclic::Tors(1)], &one, &[Cyclic::Tors(1)]).unwrap().is_zero());
        assert_eq!(image(&[Cyclic::Free], &m, &[Cyclic::Tors(2)]).unwrap(), Group::new(0, 1));
    }

    #[test]
    fn chain_homology() {
        // Z --2--> Z --0--> Z has H = Z/2 in the middle
        let d_in = Matrix::from_rows(&[vec![2]]);
        let d_out = Matrix::from_rows(&[vec![0]]);
        let g = homology(&[Cyclic::Free], Some(&d_in), Some(&d_out), &[Cyclic::Free]).unwrap();
        assert_eq!(g, Group::new(0, 1));
    }
}
