//! On-disk artifacts: records and summary CSVs, `key=value` metadata sidecars,
//! and SVG plots.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! file back reproduces every value bit for bit. Nothing written depends on
//! wall-clock time, locale or worker count.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::TargetKind;
use crate::error::{Result, RfmError};
use crate::sweep::{ModelKind, SplitKind, SummaryRow, SweepRecord};

pub const RECORDS_HEADER: [&str; 11] = [
    "experiment", "rep", "n", "d", "sigma", "target", "model", "split", "mse", "best_iter", "seed",
];
pub const SUMMARY_HEADER: [&str; 10] = [
    "experiment", "d", "model", "split", "n_reps", "mean_mse", "std_mse", "sem", "ci_lo", "ci_hi",
];
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn reader<R: Read>(r: R, header: &[&str]) -> Result<csv::Reader<R>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let got = rd.headers()?;
    if got.iter().ne(header.iter().copied()) {
        return Err(RfmError::Parse(format!(
            "unexpected header '{}', expected '{}'",
            got.iter().collect::<Vec<_>>().join(","),
            header.join(",")
        )));
    }
    Ok(rd)
}

fn field(rec: &csv::StringRecord, i: usize, line: u64) -> Result<&str> {
    rec.get(i)
        .ok_or_else(|| RfmError::Parse(format!("line {line}: missing column {}", i + 1)))
}

fn parse<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str, line: u64) -> Result<T> {
    let s = field(rec, i, line)?;
    s.parse()
        .map_err(|_| RfmError::Parse(format!("line {line}: bad {name} '{s}'")))
}

fn parse_finite(rec: &csv::StringRecord, i: usize, name: &str, line: u64) -> Result<f64> {
    let v: f64 = parse(rec, i, name, line)?;
    if !v.is_finite() {
        return Err(RfmError::Parse(format!("line {line}: {name} is not finite")));
    }
    Ok(v)
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

pub fn write_records<W: Write>(w: W, records: &[SweepRecord]) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record(RECORDS_HEADER)?;
    for r in records {
        wr.write_record([
            r.experiment.clone(),
            r.rep.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.sigma.to_string(),
            r.target.as_str().to_string(),
            r.model.as_str().to_string(),
            r.split.as_str().to_string(),
            r.mse.to_string(),
            r.best_iter.to_string(),
            r.seed.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rd = reader(r, &RECORDS_HEADER)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != RECORDS_HEADER.len() {
            return Err(RfmError::Parse(format!("line {line}: expected 11 columns, got {}", rec.len())));
        }
        let mse = parse_finite(&rec, 8, "mse", line)?;
        if mse < 0.0 {
            return Err(RfmError::Parse(format!("line {line}: negative mse")));
        }
        out.push(SweepRecord {
            experiment: field(&rec, 0, line)?.to_string(),
            rep: parse(&rec, 1, "rep", line)?,
            n: parse(&rec, 2, "n", line)?,
            d: parse(&rec, 3, "d", line)?,
            sigma: parse_finite(&rec, 4, "sigma", line)?,
            target: field(&rec, 5, line)?.parse::<TargetKind>()?,
            model: field(&rec, 6, line)?.parse::<ModelKind>()?,
            split: field(&rec, 7, line)?.parse::<SplitKind>()?,
            mse,
            best_iter: parse(&rec, 9, "best_iter", line)?,
            seed: parse(&rec, 10, "seed", line)?,
        });
    }
    Ok(out)
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record(SUMMARY_HEADER)?;
    for r in rows {
        wr.write_record([
            r.experiment.clone(),
            r.d.to_string(),
            r.model.as_str().to_string(),
            r.split.as_str().to_string(),
            r.n_reps.to_string(),
            r.mean_mse.to_string(),
            r.std_mse.to_string(),
            r.sem.to_string(),
            r.ci_lo.to_string(),
            r.ci_hi.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(r: R) -> Result<Vec<SummaryRow>> {
    let mut rd = reader(r, &SUMMARY_HEADER)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != SUMMARY_HEADER.len() {
            return Err(RfmError::Parse(format!("line {line}: expected 10 columns, got {}", rec.len())));
        }
        out.push(SummaryRow {
            experiment: field(&rec, 0, line)?.to_string(),
            d: parse(&rec, 1, "d", line)?,
            model: field(&rec, 2, line)?.parse()?,
            split: field(&rec, 3, line)?.parse()?,
            n_reps: parse(&rec, 4, "n_reps", line)?,
            mean_mse: parse_finite(&rec, 5, "mean_mse", line)?,
            std_mse: parse_finite(&rec, 6, "std_mse", line)?,
            sem: parse_finite(&rec, 7, "sem", line)?,
            ci_lo: parse_finite(&rec, 8, "ci_lo", line)?,
            ci_hi: parse_finite(&rec, 9, "ci_hi", line)?,
        });
    }
    Ok(out)
}

pub fn write_records_file(path: &Path, records: &[SweepRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_records(&mut buf, records)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_records_file(path: &Path) -> Result<Vec<SweepRecord>> {
    read_records(fs::File::open(path)?)
}

pub fn write_summary_file(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut buf = Vec::new();
    write_summary(&mut buf, rows)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_summary_file(path: &Path) -> Result<Vec<SummaryRow>> {
    read_summary(fs::File::open(path)?)
}

/// Ordered `key=value` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    /// Starts with the tool version.
    pub fn new() -> Self {
        let mut m = Self::default();
        m.set("tool_version", TOOL_VERSION);
        m
    }

    /// Inserts or replaces a key, keeping first-insertion order.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        assert!(!key.contains(['=', '\n']) && !value.contains('\n'), "metadata must be single-line key=value");
        match self.entries.iter_mut().find(|e| e.0 == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.0 == key).map(|e| e.1.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| RfmError::Parse(format!("metadata line {}: missing '='", i + 1)))?;
            m.set(k.trim(), v.trim());
        }
        Ok(m)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

/// Sidecar path for a data file: `records.csv` → `records.meta`.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("meta")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub log_y: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            log_y: true,
            width: 800,
            height: 500,
        }
    }
}

const RFM_COLOR: &str = "#1f5fbf";
const BASELINE_COLOR: &str = "#c62828";

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick label without trailing zeros, e.g. `0.05`, `1e-4`.
fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        let e = v.abs().log10().floor() as i32;
        let m = v / 10f64.powi(e);
        if (m - m.round()).abs() < 1e-9 {
            return format!("{}e{e}", m.round());
        }
        return format!("{m:.2}e{e}");
    }
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn nice_step(span: f64, target_ticks: f64) -> f64 {
    let raw = span / target_ticks;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

struct Series {
    d: Vec<f64>,
    mean: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn series(rows: &[&SummaryRow], model: ModelKind) -> Series {
    let mut r: Vec<&&SummaryRow> = rows.iter().filter(|r| r.model == model).collect();
    r.sort_by_key(|r| r.d);
    Series {
        d: r.iter().map(|r| r.d as f64).collect(),
        mean: r.iter().map(|r| r.mean_mse).collect(),
        lo: r.iter().map(|r| r.ci_lo).collect(),
        hi: r.iter().map(|r| r.ci_hi).collect(),
    }
}

/// SVG of mean MSE against `d` for one experiment and split: RFM in blue,
/// baseline in red, each with its shaded CI band. A pure function of its
/// inputs; `meta` entries are embedded as an XML comment.
pub fn render_svg(
    rows: &[SummaryRow],
    experiment: &str,
    split: SplitKind,
    options: &PlotOptions,
    meta: &Metadata,
) -> Result<String> {
    let sel: Vec<&SummaryRow> = rows
        .iter()
        .filter(|r| r.experiment == experiment && r.split == split)
        .collect();
    if sel.is_empty() {
        return Err(RfmError::Precondition(format!(
            "no {} rows for experiment '{experiment}'",
            split.as_str()
        )));
    }
    let curves = [
        (ModelKind::Rfm, "RFM", RFM_COLOR),
        (ModelKind::Baseline, "Laplace KRR", BASELINE_COLOR),
    ]
    .map(|(m, label, color)| (series(&sel, m), label, color));

    let (w, h) = (options.width as f64, options.height as f64);
    let (ml, mr, mt, mb) = (80.0, 20.0, 40.0, 55.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);

    let d_min = sel.iter().map(|r| r.d).min().unwrap() as f64;
    let d_max = sel.iter().map(|r| r.d).max().unwrap() as f64;
    let d_span = if d_max > d_min { d_max - d_min } else { 1.0 };

    let means = sel.iter().map(|r| r.mean_mse);
    let all = sel.iter().flat_map(|r| [r.mean_mse, r.ci_lo, r.ci_hi]);
    // log-y: CI bands may dip below zero; clip them at the plot floor
    let (y_lo, y_hi) = if options.log_y {
        let pos_min = means.clone().chain(all.clone()).filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
        let pos_max = all.clone().fold(f64::MIN_POSITIVE, f64::max);
        if !pos_min.is_finite() {
            return Err(RfmError::Precondition("log-y plot needs positive values".into()));
        }
        let lo = pos_min.log10().floor();
        let hi = pos_max.log10().ceil().max(lo + 1.0);
        (lo, hi)
    } else {
        let lo = all.clone().fold(f64::INFINITY, f64::min).min(0.0);
        let hi = all.fold(f64::NEG_INFINITY, f64::max);
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let floor = 10f64.powf(y_lo);
    let ty = |v: f64| -> f64 {
        let t = if options.log_y { v.max(floor).log10() } else { v };
        mt + ph * (1.0 - (t - y_lo) / (y_hi - y_lo))
    };
    let tx = |d: f64| ml + pw * (d - d_min) / d_span;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        options.width, options.height, options.width, options.height
    );
    s.push_str("<!--\n");
    for (k, v) in meta.entries() {
        let _ = writeln!(s, "{}={}", esc(k), esc(v).replace("--", "- -"));
    }
    s.push_str("-->\n");
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{} — {} MSE</text>"#,
        ml + pw / 2.0,
        esc(experiment),
        split.as_str()
    );

    // axes and ticks
    let _ = writeln!(
        s,
        r##"<rect x="{ml:.1}" y="{mt:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#333"/>"##
    );
    let x_step = nice_step(d_span, 8.0);
    let mut xt = (d_min / x_step).ceil() * x_step;
    while xt <= d_max + 1e-9 {
        let x = tx(xt);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 19.0,
            tick_label(xt)
        );
        xt += x_step;
    }
    let y_ticks: Vec<f64> = if options.log_y {
        (y_lo as i32..=y_hi as i32).map(|e| 10f64.powi(e)).collect()
    } else {
        let step = nice_step(y_hi - y_lo, 6.0);
        let mut v = Vec::new();
        let mut t = (y_lo / step).ceil() * step;
        while t <= y_hi + 1e-12 * step.abs() {
            v.push(t);
            t += step;
        }
        v
    };
    for v in y_ticks {
        let y = ty(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{ml:.1}" y2="{y:.1}" stroke="#333"/><line x1="{ml:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            ml - 5.0,
            ml + pw,
            ml - 8.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">number of features d</text>"#,
        ml + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{} MSE{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        split.as_str(),
        if options.log_y { " (log scale)" } else { "" }
    );

    // bands first, then lines on top
    for (c, _, color) in &curves {
        if c.d.is_empty() {
            continue;
        }
        let mut pts: Vec<String> = c.d.iter().zip(&c.hi).map(|(&d, &v)| format!("{:.2},{:.2}", tx(d), ty(v))).collect();
        pts.extend(c.d.iter().zip(&c.lo).rev().map(|(&d, &v)| format!("{:.2},{:.2}", tx(d), ty(v))));
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            pts.join(" ")
        );
    }
    for (c, _, color) in &curves {
        if c.d.is_empty() {
            continue;
        }
        let pts: Vec<String> = c.d.iter().zip(&c.mean).map(|(&d, &v)| format!("{:.2},{:.2}", tx(d), ty(v))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
            pts.join(" ")
        );
    }
    for (i, (_, label, color)) in curves.iter().enumerate() {
        let y = mt + 16.0 + 18.0 * i as f64;
        let x = ml + pw - 140.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{label}</text>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Experiment names in a summary, sorted and deduplicated.
pub fn experiments(rows: &[SummaryRow]) -> Vec<String> {
    let mut v: Vec<String> = rows.iter().map(|r| r.experiment.clone()).collect();
    v.sort();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(mse: f64) -> SweepRecord {
        SweepRecord {
            experiment: "base".into(),
            rep: 3,
            n: 1000,
            d: 25,
            sigma: 0.001,
            target: TargetKind::RandMat,
            model: ModelKind::Rfm,
            split: SplitKind::Test,
            mse,
            best_iter: 4,
            seed: u64::MAX,
        }
    }

    #[test]
    fn records_round_trip_exactly() {
        let recs = vec![record(0.1 + 0.2), record(3.0e-300), record(1.0 / 3.0), record(0.0)];
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("experiment,rep,n,d,sigma,target,model,split,mse,best_iter,seed\n"));
        assert!(!text.contains('\r'));
        assert!(text.contains(",0.30000000000000004,"));
        assert_eq!(read_records(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn bad_files_are_rejected() {
        assert!(read_records("a,b\n1,2\n".as_bytes()).is_err());
        let bad = "experiment,rep,n,d,sigma,target,model,split,mse,best_iter,seed\nx,0,10,5,0,cubic,rfm,test,NaN,0,1\n";
        assert!(read_records(bad.as_bytes()).is_err());
        let bad = "experiment,rep,n,d,sigma,target,model,split,mse,best_iter,seed\nx,0,10,5,0,quartic,rfm,test,1,0,1\n";
        assert!(read_records(bad.as_bytes()).is_err());
    }

    #[test]
    fn summary_round_trip() {
        let rows = vec![SummaryRow {
            experiment: "base".into(),
            d: 10,
            model: ModelKind::Baseline,
            split: SplitKind::Train,
            n_reps: 10,
            mean_mse: 0.25,
            std_mse: 0.125,
            sem: 0.039528470752104744,
            ci_lo: 0.17252419732587471,
            ci_hi: 0.3274758026741253,
        }];
        let mut buf = Vec::new();
        write_summary(&mut buf, &rows).unwrap();
        assert!(buf.starts_with(b"experiment,d,model,split,n_reps,mean_mse,std_mse,sem,ci_lo,ci_hi\n"));
        assert_eq!(read_summary(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn metadata_round_trip() {
        let mut m = Metadata::new();
        m.set("master_seed", 7);
        m.set("d_grid", "5,10,15");
        m.set("master_seed", 8);
        let back = Metadata::parse(&m.render()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.get("master_seed"), Some("8"));
        assert_eq!(back.get("tool_version"), Some(TOOL_VERSION));
        assert!(Metadata::parse("novalue\n").is_err());
    }

    #[test]
    fn ticks() {
        assert_eq!(tick_label(0.05), "0.05");
        assert_eq!(tick_label(100.0), "100");
        assert_eq!(tick_label(1e-4), "1e-4");
        assert_eq!(nice_step(2000.0, 8.0), 200.0);
    }

    #[test]
    fn svg_is_deterministic_and_complete() {
        let rows: Vec<SummaryRow> = [ModelKind::Baseline, ModelKind::Rfm]
            .iter()
            .flat_map(|&m| {
                (1..=5).map(move |i| SummaryRow {
                    experiment: "e".into(),
                    d: i * 10,
                    model: m,
                    split: SplitKind::Test,
                    n_reps: 2,
                    mean_mse: 0.1 * i as f64,
                    std_mse: 0.01,
                    sem: 0.007,
                    ci_lo: 0.1 * i as f64 - 0.2,
                    ci_hi: 0.1 * i as f64 + 0.014,
                })
            })
            .collect();
        let mut meta = Metadata::new();
        meta.set("master_seed", 7);
        let a = render_svg(&rows, "e", SplitKind::Test, &PlotOptions::default(), &meta).unwrap();
        let b = render_svg(&rows, "e", SplitKind::Test, &PlotOptions::default(), &meta).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polygon").count(), 2);
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(a.contains(RFM_COLOR) && a.contains(BASELINE_COLOR));
        assert!(a.contains("master_seed=7"));
        assert!(!a.contains("NaN"));
        let lin = PlotOptions { log_y: false, ..PlotOptions::default() };
        assert!(render_svg(&rows, "e", SplitKind::Test, &lin, &meta).unwrap() != a);
        assert!(render_svg(&rows, "e", SplitKind::Train, &lin, &meta).is_err());
    }
}
