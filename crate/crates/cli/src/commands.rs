use crate::chart::{Chart, Dot};
use crate::{Command, Failure, Format, RunConfig};
use rayon::prelude::*;
use realspectra::blocks::{
    assemble, block_lc, block_lc_oracle, content_diagonal_max, diagonal_decompose, lc_table, Assembled, Block, BlockKind,
};
use realspectra::bpr::{self, Bpr};
use realspectra::duality::{
    quotient_module_entry, shift_for, verify_gorenstein, verify_quotient_duality, DualityReport, MSequence, Spectrum, SsData,
};
use realspectra::grading::{Degree, Window};
use realspectra::hfpss::{self, Target};
use realspectra::localcoh::{catalogue, closed_form_group, standard_oracle, SHIPPED_RULES};
use realspectra::{Error, GradedGroups, GroupEntry};
use serde::Serialize;
use std::fmt::Write;
use std::path::Path;

pub fn default_radius(cmd: Command, n: u32) -> i64 {
    match cmd {
        Command::Verify => match n {
            0 => 12,
            1 => 16,
            _ => 24,
        },
        Command::Hfpss => 10,
        Command::Lc => 6,
        _ => 12,
    }
}

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<(), Failure> {
    match cmd {
        Command::Coeff => cmd_coeff(cfg),
        Command::Hfpss => cmd_hfpss(cfg),
        Command::Blocks => cmd_blocks(cfg),
        Command::Lc => cmd_lc(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Chart => cmd_chart(cfg),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

enum Source {
    Bpr,
    Bprn(u32),
    Quotient(MSequence),
}

fn source(cfg: &RunConfig) -> Result<Source, Failure> {
    Ok(match Spectrum::from_tag(&cfg.spectrum, cfg.n)? {
        Spectrum::Bprn(n) => Source::Bprn(n),
        Spectrum::KR => Source::Bprn(1),
        Spectrum::Quotient(m) if m == MSequence::bpr() => Source::Bpr,
        Spectrum::Quotient(m) => match m.as_bprn() {
            Some(n) => Source::Bprn(n),
            None => Source::Quotient(m),
        },
        _ => return Err(Failure::Config(format!("`{}` has no coefficient computation; try `verify`", cfg.spectrum))),
    })
}

fn window_key(w: &Option<Window>) -> String {
    match w {
        Some(w) => format!("{}_{}_{}_{}", w.triv_min, w.triv_max, w.sgn_min, w.sgn_max),
        None => "empty".into(),
    }
}

fn cache_path(cfg: &RunConfig, dir: &Path) -> std::path::PathBuf {
    let caps = cfg.caps.map(|c| format!("{}_{}_{}", c.n_vbar, c.l_min, c.l_max)).unwrap_or_else(|| "exact".into());
    let tag: String = cfg.spectrum.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '-' }).collect();
    dir.join(format!("coeff_{tag}_{}_{}_{caps}.json", cfg.n, window_key(&cfg.window)))
}

#[derive(Serialize, serde::Deserialize)]
struct CoeffCache {
    records: Vec<realspectra::groups::GroupRecord>,
    unknown: Vec<Degree>,
}

/// Coefficient groups over the window, plus degrees where an extension is not determined.
fn coeff_table(cfg: &RunConfig) -> Result<(GradedGroups, Vec<Degree>), Failure> {
    let src = source(cfg)?;
    let cached = cfg.cache_dir.as_ref().map(|d| cache_path(cfg, d));
    if let Some(p) = &cached {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(c) = serde_json::from_str::<CoeffCache>(&text) {
                return Ok((GradedGroups::from_records(&c.records), c.unknown));
            }
        }
    }
    let Some(w) = cfg.window else { return Ok((GradedGroups::default(), vec![])) };
    let rows: Vec<i64> = (w.sgn_min..=w.sgn_max).collect();
    let results: Vec<Vec<(Degree, Option<GroupEntry>)>> = rows
        .par_iter()
        .map(|&s| -> realspectra::Result<Vec<(Degree, Option<GroupEntry>)>> {
            let row = Window::new(w.triv_min, w.triv_max, s, s)?;
            match &src {
                Source::Bpr => {
                    let t = bpr::table(&row, cfg.caps.as_ref())?;
                    Ok(row.degrees().map(|d| (d, Some(t.get(d)))).collect())
                }
                Source::Bprn(n) => row.degrees().map(|d| Ok((d, Some(assemble(*n, d)?)))).collect(),
                Source::Quotient(m) => row.degrees().map(|d| Ok((d, quotient_module_entry(m, d)?))).collect(),
            }
        })
        .collect::<realspectra::Result<_>>()?;
    let mut g = GradedGroups::default();
    let mut unknown = Vec::new();
    for (d, e) in results.into_iter().flatten() {
        match e {
            Some(e) => g.insert(d, e),
            None => unknown.push(d),
        }
    }
    if let Some(p) = &cached {
        let c = CoeffCache { records: g.records(), unknown: unknown.clone() };
        if let Some(dir) = p.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        let _ = std::fs::write(p, json(&c));
    }
    Ok((g, unknown))
}

fn table_dots(g: &GradedGroups) -> Vec<Dot> {
    let mut out = Vec::new();
    for r in g.records() {
        let lattice = if r.restriction_index == Some(2) { 2 } else { 1 };
        for _ in 0..r.free_rank {
            out.push(Dot { degree: r.degree, free: true, lattice, label: "Z".into() });
        }
        for _ in 0..r.f2_rank {
            out.push(Dot { degree: r.degree, free: false, lattice: 1, label: "F2".into() });
        }
    }
    out
}

fn render_chart(cfg: &RunConfig, chart: &Chart) -> Result<(), Failure> {
    match cfg.format {
        Format::Ascii => emit(cfg, &chart.ascii()),
        Format::Svg => emit(cfg, &chart.svg()),
        Format::Json => emit(cfg, &json(chart)),
        Format::Csv => {
            let mut s = String::from("triv,sgn,free,lattice,label\n");
            for ds in chart.dots.values() {
                for d in ds {
                    let _ = writeln!(s, "{},{},{},{},{}", d.degree.triv, d.degree.sgn, d.free, d.lattice, d.label);
                }
            }
            emit(cfg, &s)
        }
    }
}

fn cmd_coeff(cfg: &RunConfig) -> Result<(), Failure> {
    let (g, unknown) = coeff_table(cfg)?;
    if !unknown.is_empty() {
        eprintln!("{} degrees with undetermined extensions omitted", unknown.len());
    }
    match cfg.format {
        Format::Json => emit(cfg, &json(&g.records())),
        Format::Csv => {
            let mut s = String::from("triv,sgn,diagonal,k,free_rank,f2_rank,restriction_index\n");
            for r in g.records() {
                let (d, k) = r.degree.diagonal();
                let idx = r.restriction_index.map(|i| i.to_string()).unwrap_or_default();
                let _ = writeln!(s, "{},{},{d},{k},{},{},{idx}", r.degree.triv, r.degree.sgn, r.free_rank, r.f2_rank);
            }
            emit(cfg, &s)
        }
        _ => render_chart(cfg, &Chart::from_dots(cfg.window, table_dots(&g))),
    }
}

#[derive(Serialize)]
struct HfpssOut {
    classes: Vec<hfpss::ChartClass>,
    differentials: Vec<PageDifferential>,
}

#[derive(Serialize)]
struct PageDifferential {
    page: i64,
    source: String,
    target: String,
    source_degree: Degree,
    target_degree: Degree,
}

fn cmd_hfpss(cfg: &RunConfig) -> Result<(), Failure> {
    let target = match source(cfg)? {
        Source::Bpr => Target::Full,
        Source::Bprn(n) => Target::Truncated(n),
        Source::Quotient(_) => return Err(Failure::Config("the spectral sequence is run for BPR and BPR<n> only".into())),
    };
    let Some(w) = cfg.window else {
        return render_or_json_empty(cfg);
    };
    let rows: Vec<i64> = (w.sgn_min..=w.sgn_max).collect();
    let classes: Vec<Vec<hfpss::ChartClass>> = rows
        .par_iter()
        .map(|&s| hfpss::chart(target, &Window::new(w.triv_min, w.triv_max, s, s)?))
        .collect::<realspectra::Result<_>>()?;
    let classes: Vec<_> = classes.into_iter().flatten().collect();
    match cfg.format {
        Format::Json => {
            let mut differentials = Vec::new();
            if let Target::Truncated(n) = target {
                let span = w.triv_min.abs().max(w.triv_max.abs()) + w.sgn_min.abs().max(w.sgn_max.abs());
                let a_max = 2 * span + realspectra::grading::nil_exp(n + 1);
                for p in hfpss::run_differentials(n, &w, a_max)? {
                    for d in p.differentials {
                        differentials.push(PageDifferential {
                            page: p.r,
                            source: d.source.to_string(),
                            target: d.target.to_string(),
                            source_degree: d.source_degree,
                            target_degree: d.target_degree,
                        });
                    }
                }
            }
            emit(cfg, &json(&HfpssOut { classes, differentials }))
        }
        Format::Csv => {
            let mut s = String::from("triv,sgn,filtration,torsion,lattice,name\n");
            for c in &classes {
                let _ = writeln!(s, "{},{},{},{},{},{}", c.degree.triv, c.degree.sgn, c.filtration, c.torsion, c.lattice, c.name);
            }
            emit(cfg, &s)
        }
        _ => {
            let dots = classes.into_iter().map(|c| Dot { degree: c.degree, free: !c.torsion, lattice: c.lattice, label: c.name });
            render_chart(cfg, &Chart::from_dots(cfg.window, dots))
        }
    }
}

fn render_or_json_empty(cfg: &RunConfig) -> Result<(), Failure> {
    match cfg.format {
        Format::Json => emit(cfg, "[]\n"),
        Format::Csv => emit(cfg, ""),
        _ => render_chart(cfg, &Chart::from_dots(None, [])),
    }
}

fn block(cfg: &RunConfig) -> Result<Block, Failure> {
    let kind: BlockKind = cfg.block.parse()?;
    Ok(Block::new(cfg.n, kind))
}

fn diagonal_range(cfg: &RunConfig) -> (i64, i64) {
    cfg.diagonals.unwrap_or((-2, content_diagonal_max(cfg.n) + cfg.n as i64 + 1))
}

#[derive(Serialize)]
struct DiagonalRow {
    diagonal: i64,
    pieces: Vec<realspectra::blocks::DiagonalPiece>,
}

fn cmd_blocks(cfg: &RunConfig) -> Result<(), Failure> {
    let b = block(cfg)?;
    if matches!(cfg.format, Format::Svg | Format::Ascii) {
        let chart = Chart::of_module(&b, cfg.window, |k| k.to_string())?;
        return render_chart(cfg, &chart);
    }
    let (lo, hi) = diagonal_range(cfg);
    let rows: Vec<DiagonalRow> = (lo..=hi)
        .map(|d| Ok(DiagonalRow { diagonal: d, pieces: diagonal_decompose(&b, d)? }))
        .collect::<realspectra::Result<_>>()?;
    match cfg.format {
        Format::Json => emit(cfg, &json(&rows)),
        _ => {
            let mut s = String::from("diagonal,column,module,shift_triv,shift_sgn\n");
            for r in &rows {
                for p in &r.pieces {
                    let _ = writeln!(s, "{},{},{},{},{}", r.diagonal, p.column, p.module.kind, p.module.shift.triv, p.module.shift.sgn);
                }
            }
            emit(cfg, &s)
        }
    }
}

#[derive(Serialize)]
struct OracleDiff {
    what: String,
    s: u32,
    degree: Degree,
    closed_form: String,
    oracle: String,
}

#[derive(Serialize)]
struct OracleSummary {
    checked: usize,
    diffs: Vec<OracleDiff>,
}

#[derive(Serialize)]
struct LcOut {
    rows: Vec<realspectra::blocks::LcRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSummary>,
}

fn lc_oracle_run(cfg: &RunConfig, b: &Block) -> realspectra::Result<OracleSummary> {
    let Some(w) = cfg.window else { return Ok(OracleSummary { checked: 0, diffs: vec![] }) };
    let n = cfg.n;
    let mut jobs: Vec<(Option<realspectra::localcoh::StandardModule>, u32, Degree)> = Vec::new();
    for g in w.degrees() {
        for s in 0..=n {
            jobs.push((None, s, g));
            for m in catalogue(n) {
                jobs.push((Some(m), s, g));
            }
        }
    }
    let diffs: Vec<Option<OracleDiff>> = jobs
        .par_iter()
        .map(|(m, s, g)| -> realspectra::Result<Option<OracleDiff>> {
            let (what, closed, oracle) = match m {
                None => (format!("{} block", b.kind), block_lc(b, *s, *g)?, block_lc_oracle(b, *s, *g)?),
                Some(m) => (m.to_string(), closed_form_group(m, SHIPPED_RULES, *s, *g), standard_oracle(m, *s, *g)?),
            };
            Ok((closed != oracle).then(|| OracleDiff {
                what,
                s: *s,
                degree: *g,
                closed_form: closed.to_string(),
                oracle: oracle.to_string(),
            }))
        })
        .collect::<realspectra::Result<_>>()?;
    Ok(OracleSummary { checked: jobs.len(), diffs: diffs.into_iter().flatten().collect() })
}

fn cmd_lc(cfg: &RunConfig) -> Result<(), Failure> {
    let b = block(cfg)?;
    let (lo, hi) = diagonal_range(cfg);
    let rows = lc_table(&b, lo..=hi)?;
    let oracle = if cfg.oracle { Some(lc_oracle_run(cfg, &b)?) } else { None };
    let bad = oracle.as_ref().is_some_and(|o| !o.diffs.is_empty());
    if let Some(o) = &oracle {
        eprintln!("oracle: {} checks, {} differences", o.checked, o.diffs.len());
    }
    match cfg.format {
        Format::Json => emit(cfg, &json(&LcOut { rows, oracle }))?,
        Format::Csv => {
            let mut s = String::from("diagonal,row,column,piece,s,summand,position_triv,position_sgn,rho_offset\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.diagonal,
                    r.position.diagonal().0,
                    r.column,
                    r.piece.kind,
                    r.s,
                    r.summand.kind,
                    r.position.triv,
                    r.position.sgn,
                    r.rho_offset
                );
            }
            emit(cfg, &s)?
        }
        Format::Ascii => {
            let mut s = format!("H^*({}) n={}\n row  column  s  module\n", b.kind, cfg.n);
            let mut sorted = rows.clone();
            sorted.sort_by_key(|r| (r.position.diagonal().0, r.column, r.s));
            for r in &sorted {
                let _ = writeln!(s, "{:>4}  {:>6}  {}  {}({}rho)", r.position.diagonal().0, r.column, r.s, r.summand.kind, r.rho_offset);
            }
            emit(cfg, &s)?
        }
        Format::Svg => return Err(Failure::Config("local cohomology tables have no svg form".into())),
    }
    if bad {
        return Err(Failure::Mismatch);
    }
    Ok(())
}

fn load_ssdata(cfg: &RunConfig, n: u32) -> Result<SsData, Failure> {
    let ss = match cfg.ssdata.as_deref() {
        None | Some("stated") => SsData::shipped(n),
        Some("forced") if n == 2 => SsData::forced_tmf(),
        Some("forced") => SsData::shipped(n),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
            SsData::from_json(&text)?
        }
    };
    if ss.n != n {
        return Err(Error::InconsistentSsData(format!("data is for n = {}, run is for n = {n}", ss.n)).into());
    }
    Ok(ss)
}

fn cmd_verify(cfg: &RunConfig) -> Result<(), Failure> {
    let spectrum_kind = Spectrum::from_tag(&cfg.spectrum, cfg.n)?;
    let height = match &spectrum_kind {
        Spectrum::Bprn(n) => Some(*n),
        Spectrum::KR => Some(1),
        Spectrum::Quotient(m) => m.as_bprn(),
        _ => None,
    };
    let mut report = match (&spectrum_kind, height) {
        (_, Some(n)) => {
            let ss = load_ssdata(cfg, n)?;
            match cfg.window {
                Some(w) => verify_gorenstein(n, &ss, &w)?,
                None => DualityReport::default(),
            }
        }
        (Spectrum::Quotient(m), None) => match cfg.window {
            Some(w) => verify_quotient_duality(m, &w)?,
            None => DualityReport::default(),
        },
        _ => {
            // nothing to compare degreewise; report the shift
            return emit(cfg, &json(&shift_for(&spectrum_kind)?));
        }
    };
    report.records.sort_by_key(|r| r.degree);
    report.mismatches.sort();
    report.excluded.sort();
    eprintln!("{}", report.summary());
    match cfg.format {
        Format::Json => emit(cfg, &json(&report))?,
        Format::Csv => {
            let mut s = String::from("triv,sgn,gamma_free,gamma_f2,dual_free,dual_f2,ok\n");
            for r in &report.records {
                let _ = writeln!(s, "{},{},{},{},{},{},{}", r.degree.triv, r.degree.sgn, r.gamma[0], r.gamma[1], r.dual[0], r.dual[1], r.ok);
            }
            emit(cfg, &s)?
        }
        Format::Ascii => {
            let mut s = format!("{}\n", report.summary());
            for r in report.records.iter().filter(|r| !r.ok) {
                let _ = writeln!(s, "{}: gamma {:?}, dual {:?}", r.degree, r.gamma, r.dual);
            }
            emit(cfg, &s)?
        }
        Format::Svg => {
            let dots = report.records.iter().filter(|r| !r.ok).map(|r| Dot { degree: r.degree, free: false, lattice: 1, label: "mismatch".into() });
            render_chart(cfg, &Chart::from_dots(cfg.window, dots))?
        }
    }
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn cmd_chart(cfg: &RunConfig) -> Result<(), Failure> {
    let chart = if cfg.spectrum == "block" {
        Chart::of_module(&block(cfg)?, cfg.window, |k| k.to_string())?
    } else {
        match source(cfg)? {
            Source::Bpr => Chart::of_module(&Bpr { caps: cfg.caps }, cfg.window, |k| k.to_string())?,
            Source::Bprn(n) => Chart::of_module(&Assembled { n }, cfg.window, |(q, m)| {
                if *q == 0 {
                    m.to_string()
                } else {
                    format!("U^{q} {m}")
                }
            })?,
            Source::Quotient(_) => {
                let (g, _) = coeff_table(cfg)?;
                Chart::from_dots(cfg.window, table_dots(&g))
            }
        }
    };
    render_chart(cfg, &chart)
}
