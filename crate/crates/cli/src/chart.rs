//! Charts: x = triv, y = sgn. Boxes are copies of Z, circles are copies of Z generated
//! by twice a class, dots are copies of F2.

use rayon::prelude::*;
use realspectra::grading::{Degree, Window};
use realspectra::module::{Kind, Monomial, MonoModule};
use realspectra::Result;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dot {
    pub degree: Degree,
    pub free: bool,
    pub lattice: u8,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    A,
    V1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub kind: EdgeKind,
    pub from: (Degree, usize),
    pub to: (Degree, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Chart {
    pub window: Option<Window>,
    pub dots: BTreeMap<Degree, Vec<Dot>>,
    pub edges: Vec<Edge>,
}

impl Chart {
    pub fn from_dots(window: Option<Window>, dots: impl IntoIterator<Item = Dot>) -> Self {
        let mut map: BTreeMap<Degree, Vec<Dot>> = BTreeMap::new();
        for d in dots {
            map.entry(d.degree).or_default().push(d);
        }
        Chart { window, dots: map, edges: vec![] }
    }

    /// Cells of `m` over the window with the `a`- and `v1`-multiplications between them.
    pub fn of_module<M>(m: &M, window: Option<Window>, label: impl Fn(&M::Key) -> String) -> Result<Self>
    where
        M: MonoModule + Sync,
        M::Key: Send,
    {
        let Some(w) = window else { return Ok(Chart { window, dots: BTreeMap::new(), edges: vec![] }) };
        let degrees: Vec<Degree> = w.degrees().collect();
        let cells: Vec<(Degree, Vec<_>)> = degrees
            .par_iter()
            .map(|&d| m.cells(d).map(|c| (d, c)))
            .collect::<Result<_>>()?;
        let cells: BTreeMap<Degree, Vec<_>> = cells.into_iter().filter(|(_, c)| !c.is_empty()).collect();
        let mut edges = Vec::new();
        for x in [Monomial::a_pow(1), Monomial::vbar(1, 1)] {
            let kind = if x.a == 1 { EdgeKind::A } else { EdgeKind::V1 };
            for (&d, cs) in &cells {
                let t = d + x.degree();
                let Some(targets) = cells.get(&t) else { continue };
                for (i, c) in cs.iter().enumerate() {
                    let Some(k) = m.act(&c.key, &x) else { continue };
                    if let Some(j) = targets.iter().position(|tc| tc.key == k) {
                        edges.push(Edge { kind, from: (d, i), to: (t, j) });
                    }
                }
            }
        }
        let dots = cells
            .into_iter()
            .map(|(d, cs)| {
                let v = cs
                    .iter()
                    .map(|c| Dot { degree: d, free: c.kind == Kind::Free, lattice: c.lattice, label: label(&c.key) })
                    .collect();
                (d, v)
            })
            .collect();
        Ok(Chart { window, dots, edges })
    }

    fn glyph(dots: &[Dot]) -> char {
        if dots.iter().any(|d| d.free && d.lattice == 1) {
            '□'
        } else if dots.iter().any(|d| d.free) {
            '○'
        } else if dots.is_empty() {
            '·'
        } else {
            '•'
        }
    }

    pub fn ascii(&self) -> String {
        let mut s = String::new();
        let Some(w) = self.window else { return s };
        for sgn in (w.sgn_min..=w.sgn_max).rev() {
            let _ = write!(s, "{sgn:>4} |");
            for t in w.triv_min..=w.triv_max {
                let dots = self.dots.get(&Degree::new(t, sgn)).map(Vec::as_slice).unwrap_or(&[]);
                let n = dots.len();
                let _ = write!(s, " {}{}", Self::glyph(dots), if n > 1 { char::from_digit(n.min(9) as u32, 10).unwrap() } else { ' ' });
            }
            s.push('\n');
        }
        let _ = write!(s, "     +");
        for _ in w.triv_min..=w.triv_max {
            s.push_str("---");
        }
        let _ = writeln!(s, "\n      triv {}..{}   □ Z   ○ Z (index 2)   • F2", w.triv_min, w.triv_max);
        s
    }

    pub fn svg(&self) -> String {
        const U: i64 = 24;
        let mut s = String::new();
        let Some(w) = self.window else {
            return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"></svg>\n".into();
        };
        let cols = w.triv_max - w.triv_min + 1;
        let rows = w.sgn_max - w.sgn_min + 1;
        let (width, height) = (cols * U + 2 * U, rows * U + 4 * U);
        let pos = |d: Degree, i: usize, k: usize| -> (f64, f64) {
            let off = if k > 1 { (i as f64 - (k - 1) as f64 / 2.0) * 6.0 } else { 0.0 };
            let x = ((d.triv - w.triv_min) * U + U + U / 2) as f64 + off;
            let y = ((w.sgn_max - d.sgn) * U + U + U / 2) as f64;
            (x, y)
        };
        let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"8\">");
        let _ = writeln!(s, "<g stroke=\"#ddd\" stroke-width=\"0.5\">");
        for c in 0..=cols {
            let _ = writeln!(s, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>", c * U + U, U, rows * U + U);
        }
        for r in 0..=rows {
            let _ = writeln!(s, "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\"/>", r * U + U, U, cols * U + U);
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, "<g stroke=\"black\" stroke-width=\"1\">");
        for e in &self.edges {
            let k0 = self.dots[&e.from.0].len();
            let k1 = self.dots[&e.to.0].len();
            let (x0, y0) = pos(e.from.0, e.from.1, k0);
            let (x1, y1) = pos(e.to.0, e.to.1, k1);
            let _ = writeln!(s, "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\"/>");
        }
        let _ = writeln!(s, "</g>");
        for (&d, ds) in &self.dots {
            for (i, dot) in ds.iter().enumerate() {
                let (x, y) = pos(d, i, ds.len());
                let shape = if dot.free && dot.lattice == 1 {
                    format!("<rect x=\"{}\" y=\"{}\" width=\"8\" height=\"8\" fill=\"white\" stroke=\"black\">", x - 4.0, y - 4.0)
                } else if dot.free {
                    format!("<circle cx=\"{x}\" cy=\"{y}\" r=\"4\" fill=\"white\" stroke=\"black\">")
                } else {
                    format!("<circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"black\">")
                };
                let close = if shape.starts_with("<rect") { "</rect>" } else { "</circle>" };
                let _ = writeln!(s, "{shape}<title>{} {}</title>{close}", d, dot.label);
            }
        }
        let ly = rows * U + 2 * U;
        let _ = writeln!(s, "<text x=\"{U}\" y=\"{}\">triv {}..{}, sgn {}..{}</text>", ly - 6, w.triv_min, w.triv_max, w.sgn_min, w.sgn_max);
        let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"8\" height=\"8\" fill=\"white\" stroke=\"black\"/><text x=\"{}\" y=\"{}\">Z</text>", U, ly + 2, U + 12, ly + 9);
        let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"white\" stroke=\"black\"/><text x=\"{}\" y=\"{}\">Z (index 2)</text>", 4 * U + 4, ly + 6, 4 * U + 12, ly + 9);
        let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"black\"/><text x=\"{}\" y=\"{}\">F2</text>", 8 * U + 4, ly + 6, 8 * U + 12, ly + 9);
        s.push_str("</svg>\n");
        s
    }
}
