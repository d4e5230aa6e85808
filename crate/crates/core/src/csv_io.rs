//! CSV export and import for profiles, state snapshots and decay series.
//!
//! Floats are written with 17 significant digits, so every file reads back
//! bit-for-bit. Comment lines start with `#`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::analysis::DecayReport;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::State;
use crate::stationary::StationaryProfile;

pub const PROFILE_HEADER: [&str; 5] = ["x", "rho_t", "u_t", "omega_t", "chi"];
pub const SNAPSHOT_HEADER: [&str; 4] = ["x", "rho", "u", "omega"];
pub const DECAY_HEADER: [&str; 4] = ["t", "sup_norm", "weighted_norm", "energy"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_table<W: Write>(out: W, header: &[&str], columns: &[&[f64]]) -> Result<W> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| fmt_f64(c[i])))?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Comment lines (without the `#`) and the numeric table that follows the header.
struct Table {
    comments: Vec<String>,
    columns: Vec<Vec<f64>>,
}

fn read_table(path: &Path, header: &[&str]) -> Result<Table> {
    let text = fs::read_to_string(path)?;
    let comments = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|c| c.trim().to_string())
        .collect();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Csv(format!("{}: expected header {:?}, found {:?}", path.display(), header, found)));
    }
    let mut columns = vec![Vec::new(); header.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Csv(format!("{}: row {} has {} fields", path.display(), row + 1, rec.len())));
        }
        for (col, field) in columns.iter_mut().zip(rec.iter()) {
            col.push(field.trim().parse::<f64>().map_err(|_| {
                Error::Csv(format!("{}: row {}: `{field}` is not a number", path.display(), row + 1))
            })?);
        }
    }
    Ok(Table { comments, columns })
}

fn grid_from_nodes(x: &[f64]) -> Result<Grid> {
    let n = x.len().checked_sub(1).ok_or(Error::GridMismatch)?;
    Grid::new(x[n], n)
}

pub fn write_profile(path: &Path, profile: &StationaryProfile) -> Result<()> {
    let x = profile.grid.nodes();
    let cols: [&[f64]; 5] = [&x, &profile.rho, &profile.u, &profile.omega, &profile.chi];
    write_table(fs::File::create(path)?, &PROFILE_HEADER, &cols)?;
    Ok(())
}

/// Columns of a profile file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub omega: Vec<f64>,
    pub chi: Vec<f64>,
}

pub fn read_profile(path: &Path) -> Result<ProfileTable> {
    let mut t = read_table(path, &PROFILE_HEADER)?.columns.into_iter();
    let mut next = || t.next().unwrap_or_default();
    Ok(ProfileTable { x: next(), rho: next(), u: next(), omega: next(), chi: next() })
}

pub fn write_snapshot(path: &Path, state: &State) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "# t={}", fmt_f64(state.t))?;
    let x = state.grid.nodes();
    let cols: [&[f64]; 4] = [&x, &state.rho, &state.u, &state.omega];
    write_table(f, &SNAPSHOT_HEADER, &cols)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<State> {
    let table = read_table(path, &SNAPSHOT_HEADER)?;
    let t = table
        .comments
        .iter()
        .find_map(|c| c.strip_prefix("t="))
        .ok_or_else(|| Error::Csv(format!("{}: missing `# t=` line", path.display())))?
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Csv(format!("{}: bad time stamp: {e}", path.display())))?;
    let mut cols = table.columns.into_iter();
    let x = cols.next().unwrap_or_default();
    let grid = grid_from_nodes(&x)?;
    Ok(State {
        t,
        grid,
        rho: cols.next().unwrap_or_default(),
        u: cols.next().unwrap_or_default(),
        omega: cols.next().unwrap_or_default(),
    })
}

/// The decay series as written to `decay.csv`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecaySeries {
    pub t: Vec<f64>,
    pub sup_norm: Vec<f64>,
    pub weighted_norm: Vec<f64>,
    pub energy: Vec<f64>,
    /// `key=value` footer comments.
    pub footer: BTreeMap<String, String>,
}

/// Footer entries describing a fit of the sup-norm series.
pub fn fit_footer(report: &DecayReport) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("fitted_exponent".into(), fmt_f64(report.fitted_exponent));
    m.insert(
        "fit_window".into(),
        format!("{},{}", fmt_f64(report.fit_window.0), fmt_f64(report.fit_window.1)),
    );
    m.insert("fit_residual".into(), fmt_f64(report.fit_residual));
    m.insert(
        "theoretical_exponent".into(),
        report.theoretical_exponent.map_or("none".into(), fmt_f64),
    );
    m
}

pub fn write_decay(path: &Path, series: &DecaySeries) -> Result<()> {
    let cols: [&[f64]; 4] = [&series.t, &series.sup_norm, &series.weighted_norm, &series.energy];
    let mut f = write_table(fs::File::create(path)?, &DECAY_HEADER, &cols)?;
    for (k, v) in &series.footer {
        writeln!(f, "# {k}={v}")?;
    }
    Ok(())
}

pub fn read_decay(path: &Path) -> Result<DecaySeries> {
    let table = read_table(path, &DECAY_HEADER)?;
    let footer = table
        .comments
        .iter()
        .filter_map(|c| c.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let mut cols = table.columns.into_iter();
    let mut next = || cols.next().unwrap_or_default();
    Ok(DecaySeries {
        t: next(),
        sup_norm: next(),
        weighted_norm: next(),
        energy: next(),
        footer,
    })
}
