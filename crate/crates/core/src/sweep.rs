//! Parameter sweeps behind the fidelity-vs-N and information-fidelity-vs-Err
//! curves, plus a large-N limit study.
//!
//! Rows are computed in parallel and always emitted in lexicographic order of
//! the swept parameters, so identical inputs give byte-identical CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::cloner::{self, CloneParams};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::numerics::{Backend, LogScalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }

    fn render(&self) -> String {
        match *self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => sig12(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub schema: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: BTreeMap<String, String>,
}

impl SweepTable {
    pub fn new(schema: &[&str]) -> Self {
        SweepTable {
            schema: schema.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.schema.len() {
            return Err(Error::InvalidSweep(format!(
                "row has {} cells, schema has {}",
                row.len(),
                self.schema.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.schema.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    /// Header row plus one record per row; reals carry 12 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.schema)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Line plot of `y` against `x`, one polyline per distinct `series` value.
    pub fn to_svg(&self, x: &str, y: &str, series: Option<&str>) -> Result<String> {
        let col = |name: &str| {
            self.column(name)
                .ok_or_else(|| Error::InvalidSweep(format!("no column '{name}'")))
        };
        let xs = col(x)?;
        let ys = col(y)?;
        let keys = match series {
            Some(s) => col(s)?,
            None => vec![0.0; xs.len()],
        };
        let mut lines: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
        for ((&xv, &yv), &k) in xs.iter().zip(&ys).zip(&keys) {
            match lines.iter_mut().find(|(key, _)| *key == k) {
                Some((_, pts)) => pts.push((xv, yv)),
                None => lines.push((k, vec![(xv, yv)])),
            }
        }
        let bounds = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) }
        };
        let (x0, x1) = bounds(&xs);
        let (y0, y1) = bounds(&ys);
        let (left, right, top, bottom) = (70.0, 610.0, 20.0, 400.0);
        let px = |v: f64| left + (v - x0) / (x1 - x0) * (right - left);
        let py = |v: f64| bottom - (v - y0) / (y1 - y0) * (bottom - top);
        const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

        let mut svg = String::new();
        writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="440" viewBox="0 0 640 440">"#).unwrap();
        writeln!(svg, r#"<rect width="640" height="440" fill="white"/>"#).unwrap();
        writeln!(svg, r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#).unwrap();
        for (v, anchor, xpos, ypos) in [
            (x0, "start", left, bottom + 16.0),
            (x1, "end", right, bottom + 16.0),
        ] {
            writeln!(svg, r#"<text x="{xpos}" y="{ypos}" font-size="11" text-anchor="{anchor}">{}</text>"#, sig12(v)).unwrap();
        }
        for (v, ypos) in [(y0, bottom), (y1, top + 4.0)] {
            writeln!(svg, r#"<text x="{}" y="{ypos}" font-size="11" text-anchor="end">{}</text>"#, left - 4.0, sig12(v)).unwrap();
        }
        writeln!(svg, r#"<text x="{}" y="432" font-size="12" text-anchor="middle">{x}</text>"#, (left + right) / 2.0).unwrap();
        writeln!(svg, r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">{y}</text>"#, (top + bottom) / 2.0, (top + bottom) / 2.0).unwrap();
        for (i, (key, pts)) in lines.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let points: Vec<String> = pts.iter().map(|&(a, b)| format!("{:.2},{:.2}", px(a), py(b))).collect();
            writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.join(" ")).unwrap();
            if let Some(s) = series {
                writeln!(svg, r#"<text x="{}" y="{}" font-size="11" fill="{color}">{s}={}</text>"#, right - 70.0, top + 14.0 * (i as f64 + 1.0), sig12(*key)).unwrap();
            }
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

fn sorted_kappas(kappas: &[u64]) -> Result<Vec<u64>> {
    let mut ks = kappas.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return Err(Error::InvalidSweep("no kappa values given".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::InvalidSweep(format!("kappa must be at least 2, got {k}")));
    }
    Ok(ks)
}

/// Block fidelity over `N in n_range` and every kappa; columns `N,kappa,F`.
pub fn sweep_fig2(kappas: &[u64], n_range: RangeInclusive<u64>, backend: Backend) -> Result<SweepTable> {
    let ks = sorted_kappas(kappas)?;
    if *n_range.start() == 0 || n_range.is_empty() {
        return Err(Error::InvalidSweep(format!("bad N range {n_range:?}")));
    }
    let points: Vec<(u64, u64)> = n_range.clone().flat_map(|n| ks.iter().map(move |&k| (n, k))).collect();
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(n, k)| Ok(cloner::fidelity_value(CloneParams::with_kappa(n, k)?, backend)?.to_f64()))
        .collect::<Result<_>>()?;

    let mut table = SweepTable::new(&["N", "kappa", "F"]);
    for (&(n, k), f) in points.iter().zip(values) {
        table.push(vec![Cell::Int(n), Cell::Int(k), Cell::Real(f)])?;
    }
    table.meta("sweep", "fig2");
    table.meta("kappas", join(&ks));
    table.meta("n_range", format!("{}..={}", n_range.start(), n_range.end()));
    table.meta("backend", backend);
    Ok(table)
}

/// Information fidelity at fixed N over kappas and tolerances; columns `kappa,Err,infoF`.
pub fn sweep_fig3(n: u64, kappas: &[u64], err_range: RangeInclusive<u64>, backend: Backend) -> Result<SweepTable> {
    let ks = sorted_kappas(kappas)?;
    if err_range.is_empty() || *err_range.end() > n {
        return Err(Error::InvalidSweep(format!("Err range {err_range:?} must lie within 0..={n}")));
    }
    let profiles: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| {
            let params = CloneParams::with_kappa(n, k)?;
            let prof = cloner::info_fidelity_profile_values(params, *err_range.end(), backend)?;
            Ok(prof.iter().map(|v| v.to_f64()).collect())
        })
        .collect::<Result<_>>()?;

    let mut table = SweepTable::new(&["kappa", "Err", "infoF"]);
    for (&k, prof) in ks.iter().zip(&profiles) {
        for err in err_range.clone() {
            table.push(vec![Cell::Int(k), Cell::Int(err), Cell::Real(prof[err as usize])])?;
        }
    }
    table.meta("sweep", "fig3");
    table.meta("N", n);
    table.meta("kappas", join(&ks));
    table.meta("err_range", format!("{}..={}", err_range.start(), err_range.end()));
    table.meta("backend", backend);
    Ok(table)
}

/// Roughly `per_decade` points per factor of ten from `start` to `end`
/// inclusive, rounded to integers and deduplicated.
pub fn geometric_grid(start: u64, end: u64, per_decade: u32) -> Vec<u64> {
    if start == 0 || end < start || per_decade == 0 {
        return Vec::new();
    }
    let step = 10f64.powf(1.0 / per_decade as f64);
    let mut grid = Vec::new();
    let mut i = 0;
    loop {
        let v = (start as f64 * step.powi(i)).round() as u64;
        if v >= end {
            break;
        }
        if grid.last() != Some(&v) {
            grid.push(v);
        }
        i += 1;
    }
    grid.push(end);
    grid
}

/// Polynomial extrapolation to `h = 0` through `(h_i, y_i)` (Neville's scheme).
pub fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let h: Vec<f64> = points.iter().map(|&(h, _)| h).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p[0]
}

/// Points used for each Richardson estimate.
pub const LIMIT_ORDER: usize = 3;

/// Block fidelity along `n_grid` at fixed kappa, with a Richardson estimate of
/// the `N -> infinity` limit from the last [`LIMIT_ORDER`] points in `h = 1/N`
/// up to each row; columns `N,F,extrapolated_limit`.
pub fn limit_study(kappa: u64, n_grid: &[u64], backend: Backend) -> Result<SweepTable> {
    sorted_kappas(&[kappa])?;
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() || grid[0] == 0 {
        return Err(Error::InvalidSweep("N grid must be nonempty and positive".into()));
    }
    let fs: Vec<f64> = grid
        .par_iter()
        .map(|&n| Ok(cloner::fidelity_value(CloneParams::with_kappa(n, kappa)?, backend)?.to_f64()))
        .collect::<Result<_>>()?;

    let mut table = SweepTable::new(&["N", "F", "extrapolated_limit"]);
    for i in 0..grid.len() {
        let from = (i + 1).saturating_sub(LIMIT_ORDER);
        let pts: Vec<(f64, f64)> = (from..=i).map(|t| (1.0 / grid[t] as f64, fs[t])).collect();
        table.push(vec![Cell::Int(grid[i]), Cell::Real(fs[i]), Cell::Real(extrapolate_to_zero(&pts))])?;
    }
    table.meta("sweep", "limit");
    table.meta("kappa", kappa);
    table.meta("grid", join(&grid));
    table.meta("backend", backend);
    Ok(table)
}

/// Smallest tolerance reaching `target` for each `(N, kappa)`; columns
/// `N,kappa,min_err,err_fraction`. Uses the log backend throughout.
pub fn min_err_study(ns: &[u64], kappas: &[u64], target: f64) -> Result<SweepTable> {
    let ks = sorted_kappas(kappas)?;
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let points: Vec<(u64, u64)> = ns.iter().flat_map(|&n| ks.iter().map(move |&k| (n, k))).collect();
    let found: Vec<u64> = points
        .par_iter()
        .map(|&(n, k)| {
            let params = CloneParams::with_kappa(n, k)?;
            cloner::min_err_for::<LogScalar>(params, target)
                .ok_or_else(|| Error::InvalidSweep(format!("target {target} unreachable at N={n}")))
        })
        .collect::<Result<_>>()?;
    let mut table = SweepTable::new(&["N", "kappa", "min_err", "err_fraction"]);
    for (&(n, k), e) in points.iter().zip(found) {
        table.push(vec![Cell::Int(n), Cell::Int(k), Cell::Int(e), Cell::Real(e as f64 / n as f64)])?;
    }
    table.meta("sweep", "min_err");
    table.meta("target", target);
    Ok(table)
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}
