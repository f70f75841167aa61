//! Emitted artifacts: outlier CSV, matrix CSV, summary JSON and SVG scatter.

use std::fmt::Write as _;
use std::io::{Read, Write};

use ringspike_core::mc::{ComplexEstimate, ExperimentConfig, MatrixModel, ScalingFit, SummaryStats};
use ringspike_core::spectra::OutlierRow;
use ringspike_core::{CMatrix, Complex64};
use serde::{Deserialize, Serialize};

use crate::formats::{BasisJson, ProfileJson, SpecJson};
use crate::{Error, Result};

pub const OUTLIER_COLUMNS: [&str; 9] = [
    "group_index",
    "theta_re",
    "theta_im",
    "rate_class",
    "p",
    "lambda_re",
    "lambda_im",
    "rescaled_re",
    "rescaled_im",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierCsvRow {
    pub group_index: usize,
    pub theta_re: f64,
    pub theta_im: f64,
    pub rate_class: usize,
    pub p: usize,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub rescaled_re: f64,
    pub rescaled_im: f64,
}

impl From<&OutlierRow> for OutlierCsvRow {
    fn from(r: &OutlierRow) -> Self {
        Self {
            group_index: r.group_index,
            theta_re: r.theta.re,
            theta_im: r.theta.im,
            rate_class: r.rate_class,
            p: r.p,
            lambda_re: r.lambda.re,
            lambda_im: r.lambda.im,
            rescaled_re: r.rescaled.re,
            rescaled_im: r.rescaled.im,
        }
    }
}

impl From<&OutlierCsvRow> for OutlierRow {
    fn from(r: &OutlierCsvRow) -> Self {
        Self {
            group_index: r.group_index,
            theta: Complex64::new(r.theta_re, r.theta_im),
            rate_class: r.rate_class,
            p: r.p,
            lambda: Complex64::new(r.lambda_re, r.lambda_im),
            rescaled: Complex64::new(r.rescaled_re, r.rescaled_im),
        }
    }
}

/// The outlier schema with a leading `trial` column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialCsvRow {
    pub trial: u64,
    pub group_index: usize,
    pub theta_re: f64,
    pub theta_im: f64,
    pub rate_class: usize,
    pub p: usize,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub rescaled_re: f64,
    pub rescaled_im: f64,
}

impl TrialCsvRow {
    pub fn new(trial: u64, r: &OutlierRow) -> Self {
        let o = OutlierCsvRow::from(r);
        Self {
            trial,
            group_index: o.group_index,
            theta_re: o.theta_re,
            theta_im: o.theta_im,
            rate_class: o.rate_class,
            p: o.p,
            lambda_re: o.lambda_re,
            lambda_im: o.lambda_im,
            rescaled_re: o.rescaled_re,
            rescaled_im: o.rescaled_im,
        }
    }

    pub fn outlier(&self) -> OutlierRow {
        OutlierRow {
            group_index: self.group_index,
            theta: Complex64::new(self.theta_re, self.theta_im),
            rate_class: self.rate_class,
            p: self.p,
            lambda: Complex64::new(self.lambda_re, self.lambda_im),
            rescaled: Complex64::new(self.rescaled_re, self.rescaled_im),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows<W: Write, T: Serialize>(w: W, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(header).map_err(csv_err)?;
    for r in rows {
        wr.serialize(r).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::Io(e.to_string()))
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R, header: &[&str]) -> Result<Vec<T>> {
    let mut rd = csv::Reader::from_reader(r);
    let got: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    if got != header {
        return Err(Error::Io(format!("unexpected CSV header {got:?}")));
    }
    rd.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn write_outlier_csv<W: Write>(w: W, rows: &[OutlierRow]) -> Result<()> {
    write_rows(w, &OUTLIER_COLUMNS, rows.iter().map(OutlierCsvRow::from))
}

pub fn read_outlier_csv<R: Read>(r: R) -> Result<Vec<OutlierRow>> {
    let rows: Vec<OutlierCsvRow> = read_rows(r, &OUTLIER_COLUMNS)?;
    Ok(rows.iter().map(OutlierRow::from).collect())
}

fn trial_header() -> Vec<&'static str> {
    let mut h = vec!["trial"];
    h.extend(OUTLIER_COLUMNS);
    h
}

pub fn write_trial_csv<W: Write>(w: W, rows: &[TrialCsvRow]) -> Result<()> {
    write_rows(w, &trial_header(), rows.iter())
}

pub fn read_trial_csv<R: Read>(r: R) -> Result<Vec<TrialCsvRow>> {
    read_rows(r, &trial_header())
}

/// One row per matrix row: `re, im` of each entry in turn, no header.
pub fn write_matrix_csv<W: Write>(w: W, m: &CMatrix) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..m.rows() {
        let rec: Vec<String> = m
            .row(i)
            .iter()
            .flat_map(|z| [z.re.to_string(), z.im.to_string()])
            .collect();
        wr.write_record(&rec).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_matrix_csv<R: Read>(r: R) -> Result<CMatrix> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut data = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() % 2 != 0 {
            return Err(Error::Io("matrix CSV rows need re, im pairs".into()));
        }
        let vals: Vec<f64> = rec
            .iter()
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Io(format!("not a number: {t:?}")))
            })
            .collect::<Result<_>>()?;
        if *cols.get_or_insert(vals.len() / 2) != vals.len() / 2 {
            return Err(Error::Io("ragged matrix CSV".into()));
        }
        data.extend(vals.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])));
        rows += 1;
    }
    CMatrix::from_row_major(rows, cols.unwrap_or(0), data).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_spectrum_csv<W: Write>(w: W, eig: &[Complex64]) -> Result<()> {
    write_rows(w, &["re", "im"], eig.iter().map(|z| (z.re, z.im)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    pub mean: f64,
    pub se: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimateJson {
    pub mean: [f64; 2],
    pub se: Option<f64>,
}

impl From<&ComplexEstimate> for ComplexEstimateJson {
    fn from(e: &ComplexEstimate) -> Self {
        Self {
            mean: [e.mean.re, e.mean.im],
            se: e.se,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummaryJson {
    pub group_index: usize,
    pub theta: [f64; 2],
    pub count: usize,
    pub second_moment: EstimateJson,
    pub theory: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummaryJson {
    pub first: usize,
    pub second: usize,
    pub count: usize,
    pub cross: ComplexEstimateJson,
    pub pseudo: ComplexEstimateJson,
    pub theory_cross: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureJson {
    pub trial: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSummaryJson {
    Isotropic { profile: ProfileJson },
    Ginibre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryJson {
    pub model: ModelSummaryJson,
    pub spec: SpecJson,
    pub q: BasisJson,
    pub seed: u64,
    pub n: usize,
    pub ring: [f64; 2],
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub completed: usize,
    pub failed: usize,
    pub excluded: usize,
    pub clean: usize,
    pub inner_violation_trials: usize,
    pub success_rate: f64,
    pub inner_violation_rate: f64,
    pub groups: Vec<GroupSummaryJson>,
    pub pairs: Vec<PairSummaryJson>,
    pub failures: Vec<FailureJson>,
}

impl SummaryJson {
    pub fn new(config: &ExperimentConfig, s: &SummaryStats) -> Result<Self> {
        let ring = config.ring()?;
        Ok(Self {
            model: match &config.model {
                MatrixModel::Ginibre => ModelSummaryJson::Ginibre,
                MatrixModel::Isotropic { profile, .. } => ModelSummaryJson::Isotropic {
                    profile: ProfileJson::from(profile),
                },
            },
            spec: SpecJson::from(&config.spec),
            q: BasisJson::from(&config.basis),
            seed: config.base_seed,
            n: s.n,
            ring: [ring.a, ring.b],
            epsilon: config.resolved_epsilon()?,
            delta: config.resolved_delta()?,
            trials: s.trials,
            completed: s.completed,
            failed: s.failed,
            excluded: s.excluded,
            clean: s.clean,
            inner_violation_trials: s.inner_violation_trials,
            success_rate: s.success_rate,
            inner_violation_rate: s.inner_violation_rate,
            groups: s
                .groups
                .iter()
                .map(|g| GroupSummaryJson {
                    group_index: g.group_index,
                    theta: [g.theta.re, g.theta.im],
                    count: g.count,
                    second_moment: EstimateJson {
                        mean: g.second_moment.mean,
                        se: g.second_moment.se,
                    },
                    theory: g.theory,
                })
                .collect(),
            pairs: s
                .pairs
                .iter()
                .map(|p| PairSummaryJson {
                    first: p.first,
                    second: p.second,
                    count: p.count,
                    cross: (&p.cross).into(),
                    pseudo: (&p.pseudo).into(),
                    theory_cross: p.theory_cross.map(|z| [z.re, z.im]),
                })
                .collect(),
            failures: s
                .failures
                .iter()
                .map(|(t, m)| FailureJson {
                    trial: *t,
                    message: m.clone(),
                })
                .collect(),
        })
    }
}

/// One row of the two-spike table: `E|Z|²`, `E|Z'|²`, `E[Z conj Z']`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1RowJson {
    pub e_abs_z2: f64,
    pub e_abs_zp2: f64,
    pub e_z_conj_zp: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1ErrorsJson {
    pub e_abs_z2: Option<f64>,
    pub e_abs_zp2: Option<f64>,
    pub e_z_conj_zp: Option<f64>,
    pub e_z_zp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1ColumnJson {
    pub kappa: f64,
    pub theoretical: Table1RowJson,
    pub empirical: Table1RowJson,
    pub standard_errors: Table1ErrorsJson,
    /// Empirical `E[Z Z']`.
    pub e_z_zp: [f64; 2],
    pub reference_theoretical: Option<Table1RowJson>,
    pub reference_empirical: Option<Table1RowJson>,
    pub summary: SummaryJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Json {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub columns: Vec<Table1ColumnJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFitJson {
    pub group_index: usize,
    pub rate_class: usize,
    pub p: usize,
    pub expected_slope: f64,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: Option<f64>,
    pub band: Option<f64>,
    /// `[n, median |λ − θ|]`.
    pub medians: Vec<(usize, f64)>,
}

impl From<&ScalingFit> for ScalingFitJson {
    fn from(f: &ScalingFit) -> Self {
        Self {
            group_index: f.group_index,
            rate_class: f.j,
            p: f.p,
            expected_slope: f.expected_slope,
            slope: f.slope,
            intercept: f.intercept,
            slope_se: f.slope_se,
            band: f.band,
            medians: f.medians.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingJson {
    pub spec: SpecJson,
    pub seed: u64,
    pub trials: usize,
    pub n_values: Vec<usize>,
    pub fits: Vec<ScalingFitJson>,
}

pub fn to_json_string<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

/// Static scatter of complex points with cross markers and reference circles.
#[derive(Debug, Clone, Default)]
pub struct Scatter {
    pub title: String,
    /// `(point, series index)`; the series picks the color.
    pub points: Vec<(Complex64, usize)>,
    /// Drawn as red crosses.
    pub markers: Vec<Complex64>,
    /// `(center, radius)`, dashed.
    pub circles: Vec<(Complex64, f64)>,
}

impl Scatter {
    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 600.0;
        const PAD: f64 = 30.0;
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for z in self.points.iter().map(|p| p.0).chain(self.markers.iter().copied()) {
            xs.push(z.re);
            ys.push(z.im);
        }
        for (c, r) in &self.circles {
            xs.extend([c.re - r, c.re + r]);
            ys.extend([c.im - r, c.im + r]);
        }
        let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut x0, mut x1, mut y0, mut y1) = (lo(&xs), hi(&xs), lo(&ys), hi(&ys));
        if !(x0.is_finite() && x1.is_finite()) {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12) * 1.05;
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let scale = (SIZE - 2.0 * PAD) / span;
        let px = |z: Complex64| (SIZE / 2.0 + (z.re - cx) * scale, SIZE / 2.0 - (z.im - cy) * scale);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<title>{}</title>"#, escape(&self.title));
        let (ox, oy) = px(Complex64::new(0.0, 0.0));
        let _ = writeln!(
            s,
            r##"<g stroke="#cccccc" stroke-width="1"><line x1="0" y1="{oy:.2}" x2="{SIZE}" y2="{oy:.2}"/><line x1="{ox:.2}" y1="0" x2="{ox:.2}" y2="{SIZE}"/></g>"##
        );
        for (c, r) in &self.circles {
            let (x, y) = px(*c);
            let _ = writeln!(
                s,
                r##"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="none" stroke="#888888" stroke-dasharray="4 3"/>"##,
                r * scale
            );
        }
        for (z, series) in &self.points {
            let (x, y) = px(*z);
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{}"/>"#,
                PALETTE[series % PALETTE.len()]
            );
        }
        for z in &self.markers {
            let (x, y) = px(*z);
            let _ = writeln!(
                s,
                r##"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="#d62728" stroke-width="2"/>"##,
                x - 6.0,
                y - 6.0,
                x + 6.0,
                y + 6.0,
                x - 6.0,
                y + 6.0,
                x + 6.0,
                y - 6.0
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
