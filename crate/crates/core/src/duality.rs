//! Anderson duals, Gorenstein shifts, and the comparison of local cohomology
//! spectral sequence data with the dual of the coefficients.

use crate::blocks::{assemble, content_diagonal_max, diagonal_decompose, u_degree, Assembled, BlockKind, Borel, DiagonalPiece};
use crate::bpr::{quotient_entry, quotient_groups, rigorous_bounds};
use crate::error::{Error, Result};
use crate::grading::{d_const, nil_exp, vbar_weight, Degree, Window, DELTA, ONE, RHO};
use crate::groups::{GradedGroups, GroupEntry};
use crate::localcoh::{closed_form_group, SHIPPED_RULES};
use crate::module::{mult_map, Act, Kind, Monomial};
use crate::snf::{self, Cyclic, Group, Matrix};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// `(free, f2)` of `pi_alpha` of the Anderson dual: free part from `-alpha`, torsion from `-alpha - 1`.
pub fn anderson_dual_groups(g: &GradedGroups, alpha: Degree) -> (usize, usize) {
    (g.get(-alpha).free_rank, g.get(-alpha - ONE).f2_rank)
}

pub fn anderson_dual_with(f: impl Fn(Degree) -> Result<GroupEntry>, alpha: Degree) -> Result<(usize, usize)> {
    Ok((f(-alpha)?.free_rank, f(-alpha - ONE)?.f2_rank))
}

/// Restriction index of the dual of a rank-one constant-type group.
fn dual_restriction_index(r: Option<u32>) -> Option<u32> {
    match r {
        Some(1) => Some(2),
        Some(2) => Some(1),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spectrum {
    Bprn(u32),
    KR,
    /// Connective `kR(n)`.
    KRnConnective(u32),
    /// Periodic integral Morava `KR(n)`.
    KRn(u32),
    ERn(u32),
    /// `TMF_1(3)` with its algebro-geometric action.
    TMF13,
    /// `Tmf_1(3)`.
    Tmf13,
    Quotient(MSequence),
}

impl Spectrum {
    /// Parses a tag; `n` fills in the height for the families.
    pub fn from_tag(tag: &str, n: u32) -> Result<Self> {
        Ok(match tag {
            "bprn" | "BPRn" | "bpr-n" => Spectrum::Bprn(n),
            "kr" | "kR" => Spectrum::KR,
            "kRn" | "krn" => Spectrum::KRnConnective(n),
            "KRn" | "KRN" => Spectrum::KRn(n),
            "ERn" | "ern" => Spectrum::ERn(n),
            "TMF13" => Spectrum::TMF13,
            "Tmf13" => Spectrum::Tmf13,
            "tmf13" => Spectrum::Bprn(2),
            "bpr" | "BPR" => Spectrum::Quotient(MSequence::bpr()),
            _ => match tag.strip_prefix("quotient:") {
                Some(m) => Spectrum::Quotient(m.parse()?),
                None => return Err(Error::UnknownTag(tag.to_string())),
            },
        })
    }
}

/// Exponents `m_1, m_2, ...` of `B/(v1^{m_1}, v2^{m_2}, ...)`: `head`, then `tail` forever.
/// `m_i = 0` leaves `v_i` alone and puts it in the Koszul sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSequence {
    pub head: Vec<u32>,
    pub tail: u32,
}

impl MSequence {
    pub fn new(head: Vec<u32>, tail: u32) -> Result<Self> {
        if tail > 1 {
            return Err(Error::UnknownTag(format!("sequence tail {tail} has infinitely many entries above 1")));
        }
        Ok(MSequence { head, tail })
    }

    pub fn bpr() -> Self {
        MSequence { head: vec![], tail: 0 }
    }

    pub fn bprn(n: u32) -> Self {
        MSequence { head: vec![0; n as usize], tail: 1 }
    }

    pub fn get(&self, i: u32) -> u32 {
        self.head.get(i as usize - 1).copied().unwrap_or(self.tail)
    }

    /// Height `n` when the sequence is `(0, ..., 0, 1, 1, ...)`.
    pub fn as_bprn(&self) -> Option<u32> {
        (self.tail == 1 && self.head.iter().all(|&m| m <= 1)).then_some(())?;
        let n = self.head.iter().take_while(|&&m| m == 0).count();
        self.head[n..].iter().all(|&m| m == 1).then_some(n as u32)
    }

    /// `m' = sum (m_i - 1)|v_i|` over `m_i > 1`.
    pub fn m_prime(&self) -> Degree {
        let w: i64 = self
            .head
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 1)
            .map(|(i, &m)| (m as i64 - 1) * vbar_weight(i as u32 + 1))
            .sum();
        w * RHO
    }

    /// Indices in the Koszul sequence, when finite.
    pub fn kappa_indices(&self) -> Option<Vec<u32>> {
        (self.tail == 1).then(|| (1..=self.head.len() as u32).filter(|&i| self.get(i) == 0).collect())
    }

    /// `-m' + 4 - 2 rho`: `Z^M = Sigma^{this} kappa(v; M)`.
    pub fn kappa_shift(&self) -> Degree {
        -self.m_prime() + 4 * ONE - 2 * RHO
    }

    /// Quotient exponents covering every `v_i` that can occur in `deg`.
    fn l_vector(&self, deg: Degree) -> Vec<u32> {
        let len = self.head.len().max(rigorous_bounds(deg).2 as usize + 1);
        (1..=len as u32).map(|i| self.get(i)).collect()
    }
}

impl FromStr for MSequence {
    type Err = Error;

    /// `m1,m2,...;tail`, tail defaulting to 0.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownTag(s.to_string());
        let (h, t) = s.split_once(';').unwrap_or((s, "0"));
        let head = if h.trim().is_empty() {
            vec![]
        } else {
            h.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<Vec<u32>>>()?
        };
        MSequence::new(head, t.trim().parse().map_err(|_| bad())?)
    }
}

impl fmt::Display for MSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: Vec<String> = self.head.iter().map(|m| m.to_string()).collect();
        write!(f, "{};{}", h.join(","), self.tail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftData {
    pub tag: String,
    /// `Z^X = Sigma^{shift} Gamma_ideal X` (or `Sigma^{shift} X` for an empty ideal).
    pub shift: Degree,
    /// The same shift moved into integer degrees by invertible classes, when available.
    pub integral: Option<i64>,
    pub ideal: Vec<String>,
}

fn vbars(range: impl Iterator<Item = u32>) -> Vec<String> {
    range.map(|i| format!("v{i}")).collect()
}

pub fn shift_for(spectrum_kind: &Spectrum) -> Result<ShiftData> {
    Ok(match spectrum_kind {
        Spectrum::Bprn(n) => {
            let n = *n;
            ShiftData {
                tag: format!("BPRn({n})"),
                shift: d_const(n) * RHO + n as i64 * ONE + 2 * DELTA,
                integral: None,
                ideal: vbars(1..=n),
            }
        }
        Spectrum::KR => ShiftData { tag: "kR".into(), ..shift_for(&Spectrum::Bprn(1))? },
        Spectrum::KRnConnective(n) => ShiftData {
            tag: format!("kRn({n})"),
            shift: ((1i64 << n) - 3) * RHO + 4 * ONE,
            integral: None,
            ideal: vec![format!("cofibre to KR({n})")],
        },
        Spectrum::KRn(n) => {
            ShiftData { tag: format!("KRn({n})"), shift: 4 * ONE - 2 * RHO, integral: None, ideal: vec![] }
        }
        Spectrum::ERn(n) => {
            let k = *n as i64;
            let integral = (k + 2) * ((1i64 << (2 * n + 1)) - (1i64 << (n + 2))) + k + 3;
            ShiftData {
                tag: format!("ERn({n})"),
                shift: -(k + 2) * RHO + (k + 3) * ONE,
                integral: Some(integral),
                ideal: vbars(1..*n),
            }
        }
        Spectrum::TMF13 => {
            ShiftData { tag: "TMF13".into(), shift: 5 * ONE + 2 * RHO, integral: None, ideal: vbars(1..=1) }
        }
        Spectrum::Tmf13 => ShiftData { tag: "Tmf13".into(), shift: 5 * ONE + 2 * RHO, integral: None, ideal: vec![] },
        Spectrum::Quotient(m) => {
            let idx = m.kappa_indices().ok_or_else(|| {
                Error::UnknownTag(format!("quotient:{m} has an infinite Koszul sequence; use the kappa form"))
            })?;
            let vsum: i64 = idx.iter().map(|&i| vbar_weight(i)).sum();
            ShiftData {
                tag: format!("quotient:{m}"),
                shift: m.kappa_shift() + idx.len() as i64 * ONE + vsum * RHO,
                integral: None,
                ideal: vbars(idx.into_iter()),
            }
        }
    })
}

/// Degree of the invertible class `x` of `ER(n)`.
pub fn er_x_degree(n: u32) -> Degree {
    Degree::new(-(1i64 << (2 * n + 1)) + (1i64 << (n + 2)), 0) - RHO
}

/// Spectral sequence data for the passage from local cohomology to `pi Gamma`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsData {
    pub n: u32,
    #[serde(default)]
    pub differentials: Vec<SsDifferential>,
    #[serde(default)]
    pub extensions: Vec<SsExtension>,
}

/// `d_page: H^{source_s} -> H^{source_s + page}`, positions in Gamma-degrees of one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsDifferential {
    pub block: BlockKind,
    #[serde(default = "two")]
    pub page: u32,
    pub source: Degree,
    pub target: Degree,
    #[serde(default = "one")]
    pub rank: usize,
    #[serde(default)]
    pub source_s: u32,
}

fn two() -> u32 {
    2
}

fn one() -> usize {
    1
}

/// A non-split `Z`-by-`F2` extension at one degree or along a whole Gamma-diagonal of a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsExtension {
    pub block: BlockKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<Degree>,
}

impl SsData {
    pub fn from_json(s: &str) -> Result<Self> {
        let d: SsData = serde_json::from_str(s).map_err(|e| Error::InconsistentSsData(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for d in &self.differentials {
            if d.target != d.source - ONE {
                return Err(Error::InconsistentSsData(format!(
                    "differential {} -> {} does not lower the degree by 1",
                    d.source, d.target
                )));
            }
            if d.page < 2 || d.source_s + d.page > self.n {
                return Err(Error::InconsistentSsData(format!("page {} leaves H^0..H^{}", d.page, self.n)));
            }
        }
        for e in &self.extensions {
            if e.diagonal.is_some() == e.degree.is_some() {
                return Err(Error::InconsistentSsData("extension needs exactly one of degree, diagonal".into()));
            }
        }
        Ok(())
    }

    /// Shipped data for `n = 1` and `n = 2`; empty for other heights.
    pub fn shipped(n: u32) -> Self {
        match n {
            1 => SsData::from_json(include_str!("../data/ssdata_kr.json")).expect("shipped data"),
            2 => SsData::from_json(include_str!("../data/ssdata_tmf.json")).expect("shipped data"),
            _ => SsData { n, ..Default::default() },
        }
    }

    /// Data for `n = 2` with the extensions that Gorenstein duality forces:
    /// the 2-diagonal of both blocks and the 10-diagonal of `BB`.
    pub fn forced_tmf() -> Self {
        SsData::from_json(include_str!("../data/ssdata_tmf_forced.json")).expect("shipped data")
    }

    /// Number of individual data items.
    pub fn len(&self) -> usize {
        self.differentials.len() + self.extensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The sub-collection selected by the bits of `mask` (differentials first).
    pub fn subset(&self, mask: u64) -> SsData {
        let k = self.differentials.len();
        SsData {
            n: self.n,
            differentials: self.differentials.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d.clone()).collect(),
            extensions: self.extensions.iter().enumerate().filter(|(i, _)| mask >> (k + i) & 1 == 1).map(|(_, e)| e.clone()).collect(),
        }
    }
}

/// Local cohomology of the blocks in Gamma-degrees, cached.
pub struct GammaBase {
    pub n: u32,
    pieces: RefCell<HashMap<(BlockKind, i64), Vec<DiagonalPiece>>>,
    raw: RefCell<HashMap<(BlockKind, Degree), Vec<Group>>>,
}

impl GammaBase {
    pub fn new(n: u32) -> Self {
        GammaBase { n, pieces: RefCell::new(HashMap::new()), raw: RefCell::new(HashMap::new()) }
    }

    fn pieces(&self, kind: BlockKind, d: i64) -> Result<Vec<DiagonalPiece>> {
        if let Some(p) = self.pieces.borrow().get(&(kind, d)) {
            return Ok(p.clone());
        }
        let p = diagonal_decompose(&crate::blocks::Block::new(self.n, kind), d)?;
        self.pieces.borrow_mut().insert((kind, d), p.clone());
        Ok(p)
    }

    /// `H^s(block)` at `beta + s` for `s = 0..=n`.
    pub fn raw(&self, kind: BlockKind, beta: Degree) -> Result<Vec<Group>> {
        if let Some(r) = self.raw.borrow().get(&(kind, beta)) {
            return Ok(r.clone());
        }
        let mut out = Vec::new();
        for s in 0..=self.n {
            let g = beta + s as i64 * ONE;
            let mut acc = Group::zero();
            for p in self.pieces(kind, g.diagonal().0)? {
                acc = acc.sum(&closed_form_group(&p.module, SHIPPED_RULES, s, g));
            }
            out.push(acc);
        }
        self.raw.borrow_mut().insert((kind, beta), out.clone());
        Ok(out)
    }

    /// `pi_beta` of `G(block)`: the local cohomology with the data applied.
    pub fn block_gamma(&self, kind: BlockKind, beta: Degree, ss: &SsData) -> Result<Group> {
        let raw = self.raw(kind, beta)?;
        let free: usize = raw.iter().map(|g| g.free).sum();
        let mut f2: Vec<usize> = raw.iter().map(|g| g.f2_rank()).collect();
        for d in ss.differentials.iter().filter(|d| d.block == kind) {
            let mut take = |s: u32| -> Result<()> {
                let slot = f2.get_mut(s as usize).ok_or_else(|| {
                    Error::InconsistentSsData(format!("H^{s} out of range at {beta}"))
                })?;
                if *slot < d.rank {
                    return Err(Error::InconsistentSsData(format!(
                        "{kind} differential needs F2-rank {} in H^{s} at {beta}, found {}",
                        d.rank, *slot
                    )));
                }
                *slot -= d.rank;
                Ok(())
            };
            if d.source == beta {
                take(d.source_s)?;
            }
            if d.target == beta {
                take(d.source_s + d.page)?;
            }
        }
        let mut f2: usize = f2.iter().sum();
        for e in ss.extensions.iter().filter(|e| e.block == kind) {
            let here = e.degree == Some(beta) || e.diagonal == Some(beta.diagonal().0);
            if !here {
                continue;
            }
            if free > 0 && f2 > 0 {
                f2 -= 1;
            } else if e.degree.is_some() {
                return Err(Error::InconsistentSsData(format!("no Z and F2 to extend at {beta} in {kind}")));
            }
        }
        Ok(Group::new(free, f2))
    }

    /// `pi_alpha Gamma_J BPR<n> = sum_{q >= 0} GBB_{alpha - qU} + sum_{q >= 1} GNB_{alpha + qU}`.
    pub fn gamma(&self, ss: &SsData, alpha: Degree) -> Result<Group> {
        let n = self.n;
        let step = 1i64 << (n + 2);
        let u = u_degree(n);
        let (d, _) = alpha.diagonal();
        let mut g = Group::zero();
        if d + n as i64 >= 0 {
            for q in 0..=(d + n as i64) / step {
                g = g.sum(&self.block_gamma(BlockKind::BB, alpha - q * u, ss)?);
            }
        }
        let hi = (content_diagonal_max(n) - d).div_euclid(step);
        for q in 1..=hi.max(0) {
            g = g.sum(&self.block_gamma(BlockKind::NB, alpha + q * u, ss)?);
        }
        Ok(g)
    }
}

pub fn gamma_groups(n: u32, ss: &SsData, alpha: Degree) -> Result<Group> {
    GammaBase::new(n).gamma(ss, alpha)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityRecord {
    pub degree: Degree,
    pub gamma: [usize; 2],
    pub dual: [usize; 2],
    pub ok: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub records: Vec<DualityRecord>,
    pub mismatches: Vec<Degree>,
    /// Degrees left unjudged because an extension is not determined.
    #[serde(default)]
    pub excluded: Vec<Degree>,
}

impl DualityReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn push(&mut self, degree: Degree, gamma: (usize, usize), dual: (usize, usize)) {
        let ok = gamma == dual;
        if !ok {
            self.mismatches.push(degree);
        }
        self.records.push(DualityRecord { degree, gamma: [gamma.0, gamma.1], dual: [dual.0, dual.1], ok });
    }

    pub fn summary(&self) -> String {
        format!(
            "{} degrees, {} mismatches, {} excluded",
            self.records.len(),
            self.mismatches.len(),
            self.excluded.len()
        )
    }
}

/// Gorenstein duality check for `BPR<n>` with reusable caches.
pub struct Gorenstein {
    pub n: u32,
    pub shift: Degree,
    base: GammaBase,
    dual: RefCell<HashMap<Degree, (usize, usize)>>,
}

impl Gorenstein {
    pub fn new(n: u32) -> Self {
        let shift = shift_for(&Spectrum::Bprn(n)).expect("height is valid").shift;
        Gorenstein { n, shift, base: GammaBase::new(n), dual: RefCell::new(HashMap::new()) }
    }

    /// `pi_alpha` of `Sigma^{-shift} Z^{BPR<n>}`.
    pub fn dual(&self, alpha: Degree) -> Result<(usize, usize)> {
        if let Some(&d) = self.dual.borrow().get(&alpha) {
            return Ok(d);
        }
        let d = anderson_dual_with(|x| assemble(self.n, x), alpha + self.shift)?;
        self.dual.borrow_mut().insert(alpha, d);
        Ok(d)
    }

    pub fn gamma(&self, ss: &SsData, alpha: Degree) -> Result<Group> {
        self.base.gamma(ss, alpha)
    }

    pub fn run(&self, ss: &SsData, window: &Window) -> Result<DualityReport> {
        let mut report = DualityReport::default();
        let Some(w) = window.symmetric() else { return Ok(report) };
        for alpha in w.degrees() {
            let g = self.gamma(ss, alpha)?;
            report.push(alpha, g.ranks(), self.dual(alpha)?);
        }
        Ok(report)
    }

    /// True when some degree of the window disagrees; data errors count as disagreement.
    pub fn has_mismatch(&self, ss: &SsData, window: &Window) -> bool {
        let Some(w) = window.symmetric() else { return false };
        for alpha in w.degrees() {
            match (self.gamma(ss, alpha), self.dual(alpha)) {
                (Ok(g), Ok(d)) if g.ranks() == d => {}
                _ => return true,
            }
        }
        false
    }
}

pub fn verify_gorenstein(n: u32, ss: &SsData, window: &Window) -> Result<DualityReport> {
    Gorenstein::new(n).run(ss, window)
}

/// `(k, c)` with `beta = k rho - c`, `c` in `{0, 1}`.
fn rho_line(beta: Degree) -> Option<(i64, i64)> {
    beta.rho_multiple().map(|k| (k, 0)).or_else(|| (beta + ONE).rho_multiple().map(|k| (k, 1)))
}

/// `pi_beta kappa(v; M)` on the `*rho` and `*rho - 1` lines, as the colimit over `l` of
/// `Sigma^{-sum (l_i - 1)|v_i|} M/(v_i^{l_i})`. `None` off those lines.
pub fn kappa_groups(m: &MSequence, beta: Degree) -> Result<Option<Group>> {
    let Some((k, _)) = rho_line(beta) else { return Ok(None) };
    let positive: i64 = (1..=m.head.len() as u32).map(|i| m.get(i).saturating_sub(1) as i64 * vbar_weight(i)).sum();
    let reach = k.abs() + positive + 2;
    let stage = |extra: u32| -> Result<Group> {
        let mut l = Vec::new();
        let mut shift = 0i64;
        let mut i = 1u32;
        while (i as usize) <= m.head.len() || vbar_weight(i) <= reach {
            let w = vbar_weight(i);
            let mi = m.get(i);
            if mi > 0 {
                l.push(mi);
            } else if w <= reach {
                let li = (reach / w) as u32 + 2 + extra;
                shift += (li as i64 - 1) * w;
                l.push(li);
            } else {
                l.push(1);
            }
            i += 1;
        }
        let deg = beta + shift * RHO;
        l.resize(l.len().max(rigorous_bounds(deg).2 as usize + 1), 1);
        quotient_groups(&l, deg)?.group().ok_or(Error::UnknownExtension(beta))
    };
    let a = stage(0)?;
    if stage(1)? != a {
        return Err(Error::StabilizationFailure(beta));
    }
    Ok(Some(a))
}

/// `pi_deg M` for the quotient `M`, through the block assembly when `M = BPR<n>`.
pub fn quotient_module_entry(m: &MSequence, deg: Degree) -> Result<Option<GroupEntry>> {
    if let Some(n) = m.as_bprn() {
        return assemble(n, deg).map(Some);
    }
    quotient_entry(&m.l_vector(deg), deg)
}

/// `Z^M = Sigma^{-m' + 4 - 2 rho} kappa(v; M)` on the `*rho`, `*rho - 1` lines of the window.
pub fn verify_quotient_duality(m: &MSequence, window: &Window) -> Result<DualityReport> {
    let c = m.kappa_shift();
    let mut report = DualityReport::default();
    for beta in window.degrees() {
        if rho_line(beta).is_none() {
            continue;
        }
        let lhs = match kappa_groups(m, beta) {
            Ok(Some(g)) => g.ranks(),
            Ok(None) => continue,
            Err(Error::UnknownExtension(_)) => {
                report.excluded.push(beta);
                continue;
            }
            Err(e) => return Err(e),
        };
        let free = quotient_module_entry(m, -beta - c)?;
        let tors = quotient_module_entry(m, -beta - c - ONE)?;
        match (free, tors) {
            (Some(f), Some(t)) => report.push(beta, lhs, (f.free_rank, t.f2_rank)),
            _ => report.excluded.push(beta),
        }
    }
    Ok(report)
}

/// The groups of the short exact sequence for maps out of a shifted `kR/v1^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientMaps {
    pub left: Group,
    pub right: Group,
    pub middle: Group,
    /// Restriction index of the middle group when it is a single `Z`.
    pub restriction_index: Option<u32>,
}

impl QuotientMaps {
    /// The constant Mackey functor `Z`.
    pub fn is_constant_z(&self) -> bool {
        self.middle == Group::new(1, 0) && self.restriction_index == Some(1)
    }
}

fn transpose(m: &Matrix) -> Matrix {
    let mut t = Matrix::zeros(m.cols(), m.rows());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            t.set(j, i, m.get(i, j));
        }
    }
    t
}

/// Block of `m` on cells of the given kind.
fn kind_block(mm: &crate::module::MultMap<crate::blocks::AssembledKey>, kind: Kind) -> Matrix {
    let rows: Vec<usize> = (0..mm.tgt.len()).filter(|&i| mm.tgt[i].kind == kind).collect();
    let cols: Vec<usize> = (0..mm.src.len()).filter(|&j| mm.src[j].kind == kind).collect();
    let mut b = Matrix::zeros(rows.len(), cols.len());
    for (a, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            b.set(a, c, mm.matrix.get(i, j));
        }
    }
    b
}

fn pres(kind: Kind, k: usize) -> Vec<Cyclic> {
    vec![if kind == Kind::Free { Cyclic::Free } else { Cyclic::Tors(1) }; k]
}

/// Multiplication by `v1^e` on `pi_* X`, `X = Sigma^{shift} Z^{kR}`, out of degree `gamma`,
/// read off from the transpose of `v1^e` on `kR`: kernel and cokernel, free and torsion parts.
fn dual_vbar_map(shift: Degree, e: u32, gamma: Degree) -> Result<(Group, Group)> {
    let kr = Assembled { n: 1 };
    let x = Act::vbar(1, e);
    let target = gamma + e as i64 * RHO;
    let mut ker = Group::zero();
    let mut coker = Group::zero();
    // Hom part: pi_gamma X has Hom(kR_{shift - gamma}); v1^e is the transpose of v1^e on kR
    // from shift - target to shift - gamma. Ext part: one degree lower.
    for (kind, off) in [(Kind::Free, 0), (Kind::Tors, 1)] {
        let src = shift - target - off * ONE;
        let mm = mult_map(&kr, &x, src)?;
        let b = transpose(&kind_block(&mm, kind));
        let (r, c) = (b.rows(), b.cols());
        ker = ker.sum(&snf::kernel(&pres(kind, c), &b, &pres(kind, r))?);
        coker = coker.sum(&snf::cokernel(&b, &pres(kind, r))?);
    }
    Ok((ker, coker))
}

/// `0 -> (pi_{rho+1} X)/v1^e -> [Sigma^{-(e-1)rho} kR/v1^e, X] -> {pi_{-(e-1)rho} X}_{v1^e} -> 0`
/// for `X = Sigma^{shift} Z^{kR}`.
pub fn maps_from_quotient(e: u32, shift: Degree) -> Result<QuotientMaps> {
    let top = -(e as i64 - 1) * RHO;
    let (right, _) = dual_vbar_map(shift, e, top)?;
    let bottom = RHO + ONE - e as i64 * RHO;
    let (_, left) = dual_vbar_map(shift, e, bottom)?;
    let middle = if left.is_zero() {
        right.clone()
    } else if right.is_zero() {
        left.clone()
    } else {
        return Err(Error::UnknownExtension(top));
    };
    let restriction_index = if middle == Group::new(1, 0) && left.is_zero() {
        dual_restriction_index(assemble(1, shift - top)?.restriction_index)
    } else {
        None
    };
    Ok(QuotientMaps { left, right, middle, restriction_index })
}

/// The correct target `Sigma^{2 rho - 4} Z^{kR}`.
pub fn quotient_maps_shift() -> Degree {
    2 * RHO - 4 * ONE
}

/// F2-rank of `pi_(t, 0)` of `a^{-1}` applied to the Borel completion, computed from
/// the image of a high power of `a` between far-out degrees.
pub fn tate_rank_via_borel(n: u32, t: i64) -> Result<usize> {
    let e = (nil_exp(n + 1) + t.abs() + 4) as u32;
    let a = Act::mono(Monomial::a_pow(e as i64));
    let img = mult_map(&Borel { n }, &a, Degree::new(t, -(e as i64)))?.image()?;
    Ok(img.f2_rank() + img.free)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_degree_duals() {
        let mut g = GradedGroups::default();
        g.insert(Degree::new(3, 0), GroupEntry { free_rank: 1, f2_rank: 0, restriction_index: None });
        assert_eq!(anderson_dual_groups(&g, Degree::new(-3, 0)), (1, 0));
        let mut h = GradedGroups::default();
        h.insert(Degree::new(3, 0), GroupEntry { free_rank: 0, f2_rank: 1, restriction_index: None });
        assert_eq!(anderson_dual_groups(&h, Degree::new(-4, 0)), (0, 1));
        assert_eq!(anderson_dual_groups(&h, Degree::new(-3, 0)), (0, 0));
    }

    #[test]
    fn m_sequences() {
        let m: MSequence = "0,2;1".parse().unwrap();
        assert_eq!(m.m_prime(), 3 * RHO);
        assert_eq!(m.kappa_indices(), Some(vec![1]));
        assert_eq!("0,0;1".parse::<MSequence>().unwrap().as_bprn(), Some(2));
        assert_eq!(MSequence::bpr().as_bprn(), None);
        assert!("1;2".parse::<MSequence>().is_err());
    }

    #[test]
    fn shipped_data_loads() {
        assert_eq!(SsData::shipped(1).len(), 1);
        assert_eq!(SsData::shipped(2).len(), 7);
        let json = SsData::shipped(2).to_json();
        assert_eq!(SsData::from_json(&json).unwrap(), SsData::shipped(2));
    }
}
