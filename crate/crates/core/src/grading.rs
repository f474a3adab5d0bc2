//! RO(C2) degrees, diagonals and degree windows.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

/// A virtual representation `triv + sgn * sigma`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Degree {
    pub triv: i64,
    pub sgn: i64,
}

pub const ZERO: Degree = Degree::new(0, 0);
pub const ONE: Degree = Degree::new(1, 0);
pub const SIGMA: Degree = Degree::new(0, 1);
pub const RHO: Degree = Degree::new(1, 1);
pub const DELTA: Degree = Degree::new(1, -1);

impl Degree {
    pub const fn new(triv: i64, sgn: i64) -> Self {
        Degree { triv, sgn }
    }

    /// `d + k*rho` with `d = triv - sgn` and `k = sgn`.
    pub fn diagonal(self) -> (i64, i64) {
        (self.triv - self.sgn, self.sgn)
    }

    pub fn from_diagonal(d: i64, k: i64) -> Self {
        Degree::new(d + k, k)
    }

    /// Integer degree seen by the underlying non-equivariant spectrum.
    pub fn underlying(self) -> i64 {
        self.triv + self.sgn
    }

    /// `Some(k)` when `self = k*rho`.
    pub fn rho_multiple(self) -> Option<i64> {
        (self.triv == self.sgn).then_some(self.sgn)
    }
}

impl From<[i64; 2]> for Degree {
    fn from(v: [i64; 2]) -> Self {
        Degree::new(v[0], v[1])
    }
}

impl From<Degree> for [i64; 2] {
    fn from(d: Degree) -> Self {
        [d.triv, d.sgn]
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, o: Degree) -> Degree {
        Degree::new(self.triv + o.triv, self.sgn + o.sgn)
    }
}

impl AddAssign for Degree {
    fn add_assign(&mut self, o: Degree) {
        *self = *self + o;
    }
}

impl Sub for Degree {
    type Output = Degree;
    fn sub(self, o: Degree) -> Degree {
        Degree::new(self.triv - o.triv, self.sgn - o.sgn)
    }
}

impl Neg for Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree::new(-self.triv, -self.sgn)
    }
}

impl Mul<Degree> for i64 {
    type Output = Degree;
    fn mul(self, d: Degree) -> Degree {
        Degree::new(self * d.triv, self * d.sgn)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.triv, self.sgn)
    }
}

/// `D_n = 2^{n+1} - n - 2`, so that `D_n rho = |v1| + ... + |vn|`.
pub fn d_const(n: u32) -> i64 {
    (1i64 << (n + 1)) - n as i64 - 2
}

/// `2^{i+1} - 1`: the a-power killed by `v_i`, and the page of the differential hitting `v_i`.
pub fn nil_exp(i: u32) -> i64 {
    (1i64 << (i + 1)) - 1
}

/// Weight of `v_i` along the rho direction.
pub fn vbar_weight(i: u32) -> i64 {
    (1i64 << i) - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    A,
    U,
    /// `U = u^{2^n}`.
    BigU { n: u32 },
    Vbar { i: u32 },
    /// `v_m(j) = u^{2^m j} v_m`.
    VbarTwisted { m: u32, j: i64 },
}

pub fn generator_degree(g: Generator) -> Degree {
    match g {
        Generator::A => Degree::new(0, -1),
        Generator::U => Degree::new(2, -2),
        Generator::BigU { n } => (1i64 << (n + 1)) * DELTA,
        Generator::Vbar { i } => vbar_weight(i) * RHO,
        Generator::VbarTwisted { m, j } => {
            (1i64 << (m + 2)) * j * ONE + ((1i64 << m) - 1 - (1i64 << (m + 1)) * j) * RHO
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// Accepts `a`, `u`, `U<n>`, `v<i>` and `v<m>(<j>)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownGenerator(s.to_string());
        let s = s.trim();
        match s {
            "a" => return Ok(Generator::A),
            "u" => return Ok(Generator::U),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('U') {
            let n = rest.parse().map_err(|_| bad())?;
            return Ok(Generator::BigU { n });
        }
        let rest = s.strip_prefix('v').ok_or_else(bad)?;
        match rest.split_once('(') {
            None => Ok(Generator::Vbar { i: rest.parse().map_err(|_| bad())? }),
            Some((m, j)) => {
                let j = j.strip_suffix(')').ok_or_else(bad)?;
                Ok(Generator::VbarTwisted {
                    m: m.parse().map_err(|_| bad())?,
                    j: j.parse().map_err(|_| bad())?,
                })
            }
        }
    }
}

/// Axis-aligned box of degrees, bounds inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub triv_min: i64,
    pub triv_max: i64,
    pub sgn_min: i64,
    pub sgn_max: i64,
}

impl Window {
    pub fn new(triv_min: i64, triv_max: i64, sgn_min: i64, sgn_max: i64) -> Result<Self> {
        if triv_min > triv_max || sgn_min > sgn_max {
            return Err(Error::InvalidWindow(format!(
                "{triv_min}:{triv_max},{sgn_min}:{sgn_max}"
            )));
        }
        Ok(Window { triv_min, triv_max, sgn_min, sgn_max })
    }

    pub fn square(r: i64) -> Self {
        Window { triv_min: -r, triv_max: r, sgn_min: -r, sgn_max: r }
    }

    pub fn contains(&self, a: Degree) -> bool {
        (self.triv_min..=self.triv_max).contains(&a.triv)
            && (self.sgn_min..=self.sgn_max).contains(&a.sgn)
    }

    /// Intersection with the reflected window, or `None` if empty.
    pub fn symmetric(&self) -> Option<Window> {
        Window::new(
            self.triv_min.max(-self.triv_max),
            self.triv_max.min(-self.triv_min),
            self.sgn_min.max(-self.sgn_max),
            self.sgn_max.min(-self.sgn_min),
        )
        .ok()
    }

    /// Degrees in row-major order, `sgn` outer.
    pub fn degrees(&self) -> impl Iterator<Item = Degree> + '_ {
        (self.sgn_min..=self.sgn_max)
            .flat_map(move |s| (self.triv_min..=self.triv_max).map(move |t| Degree::new(t, s)))
    }

    pub fn len(&self) -> usize {
        ((self.triv_max - self.triv_min + 1) * (self.sgn_max - self.sgn_min + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FromStr for Window {
    type Err = Error;

    /// `a:b,c:d` with triv in `a..=b` and sgn in `c..=d`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidWindow(s.to_string());
        let (t, g) = s.split_once(',').ok_or_else(bad)?;
        let range = |r: &str| -> Result<(i64, i64)> {
            // allow a leading minus on either bound
            let idx = r[1..].find(':').ok_or_else(bad)? + 1;
            let lo = r[..idx].trim().parse().map_err(|_| bad())?;
            let hi = r[idx + 1..].trim().parse().map_err(|_| bad())?;
            Ok((lo, hi))
        };
        let (a, b) = range(t)?;
        let (c, d) = range(g)?;
        Window::new(a, b, c, d)
    }
}
