//! The `ringspike` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on numerical or
//! experiment failures. Every command takes `--seed` and is deterministic
//! given it; `RING_JOBS` overrides `--jobs`.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ringspike_core::jordan::JordanSpec;
use ringspike_core::limitlaw::{covariance_matrix, sample_constellation};
use ringspike_core::mc::{
    run_trial, scaling_study_with, summarize, table1_config, ExperimentConfig, MatrixModel, SpectrumMethod,
    SummaryStats, TrialExecutor, TABLE1_KAPPAS, TABLE1_REFERENCE_EMPIRICAL, TABLE1_REFERENCE_THEORY,
};
use ringspike_core::profiles::RingGeometry;
use ringspike_core::randmat::{IsotropicForm, SeededStream};
use ringspike_core::spectra::OutlierRow;
use ringspike_core::weingarten::{to_f64, WeingartenTable};
use ringspike_core::Complex64;

use crate::formats::{load_config, parse_basis_arg, parse_profile_arg, parse_spec_arg, ProfileArg, SpecJson};
use crate::output::{
    to_json_string, write_outlier_csv, write_spectrum_csv, write_trial_csv, ScalingFitJson, ScalingJson, Scatter,
    SummaryJson, Table1ColumnJson, Table1ErrorsJson, Table1Json, Table1RowJson, TrialCsvRow,
};
use crate::parallel::{resolve_jobs, Parallel};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ringspike", version, about = "Outliers of spiked isotropic random matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the ring radii a, b of a singular-value profile.
    Ring(RingArgs),
    /// Run one trial and dump its spectrum and outlier report.
    Simulate(SimulateArgs),
    /// Draw limit constellations of the rescaled outliers.
    LimitSample(LimitSampleArgs),
    /// Run an experiment described by a JSON config file.
    Experiment(ExperimentArgs),
    /// Regress outlier distances on n for every rate class.
    Scaling(ScalingArgs),
    /// Print exact Weingarten values for permutations of order k.
    Weingarten(WeingartenArgs),
    /// Reproduce the two-spike covariance table on Ginibre matrices.
    Table1(Table1Args),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// `uniform:lo,hi`, `quarter_circle`, `point_mass:c`, `explicit:v1,v2,...`,
    /// `ginibre`, inline JSON or a JSON file.
    #[arg(long, default_value = "uniform:0.5,4")]
    pub profile: String,
    /// Jordan data: inline JSON or a JSON file.
    #[arg(long)]
    pub spec: String,
    /// Basis matrix Q: `identity`, inline JSON or a JSON file.
    #[arg(long, default_value = "identity")]
    pub q: String,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write an SVG scatter (needs --out-dir).
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct RingArgs {
    #[arg(long)]
    pub profile: String,
    /// Also report the radii of the n-point quantile realization.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LimitSampleArgs {
    /// Supplies the outer radius b; `ginibre` gives b = 1.
    #[arg(long, default_value = "ginibre")]
    pub profile: String,
    #[arg(long)]
    pub spec: String,
    #[arg(long, default_value = "identity")]
    pub q: String,
    /// Number of constellations.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Dimension used to place the points at θ + z·n^(-1/(2p)).
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config JSON.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated dimensions, at least three distinct.
    #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000, 2000])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeingartenArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Off-diagonal entry of Q; repeat for several columns. Default: 0 and 2^(-1/2).
    #[arg(long)]
    pub kappa: Vec<f64>,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match dispatch(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, writing console output to `out`.
pub fn dispatch(command: Command, out: &mut dyn std::io::Write) -> Result<()> {
    match command {
        Command::Ring(a) => ring(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::LimitSample(a) => limit_sample(a, out),
        Command::Experiment(a) => experiment(a, out),
        Command::Scaling(a) => scaling(a, out),
        Command::Weingarten(a) => weingarten(a, out),
        Command::Table1(a) => table1(a, out),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn usage(e: ringspike_core::Error) -> Error {
    Error::Usage(e.to_string())
}

fn create(dir: &Path, name: &str) -> Result<fs::File> {
    fs::create_dir_all(dir).map_err(io)?;
    fs::File::create(dir.join(name)).map_err(|e| Error::Io(format!("{}: {e}", dir.join(name).display())))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    create(dir, name)?.write_all(text.as_bytes()).map_err(io)
}

fn check_svg(o: &OutputArgs) -> Result<()> {
    if o.svg && o.out_dir.is_none() {
        return Err(Error::Usage("--svg needs --out-dir".into()));
    }
    Ok(())
}

fn build_config(m: &ModelArgs, n: usize, trials: usize, seed: u64) -> Result<ExperimentConfig> {
    let model = match parse_profile_arg(&m.profile)? {
        ProfileArg::Ginibre => MatrixModel::Ginibre,
        ProfileArg::Profile(profile) => MatrixModel::Isotropic {
            profile,
            form: IsotropicForm::UT,
        },
    };
    let spec = parse_spec_arg(&m.spec)?;
    let basis = parse_basis_arg(&m.q, spec.rank())?;
    let mut cfg = ExperimentConfig::new(model, spec, basis, n);
    cfg.trials = trials;
    cfg.base_seed = seed;
    cfg.epsilon = m.epsilon;
    cfg.delta = m.delta;
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn ring_of(profile: &str) -> Result<RingGeometry> {
    Ok(match parse_profile_arg(profile)? {
        ProfileArg::Ginibre => RingGeometry { a: 0.0, b: 1.0 },
        ProfileArg::Profile(p) => p.ring_radii(),
    })
}

fn ring(a: RingArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let g = ring_of(&a.profile)?;
    writeln!(out, "a = {}", g.a).map_err(io)?;
    writeln!(out, "b = {}", g.b).map_err(io)?;
    if let (Some(n), ProfileArg::Profile(p)) = (a.n, parse_profile_arg(&a.profile)?) {
        let s = p.realize(n).map_err(usage)?;
        let b2 = s.iter().map(|x| x * x).sum::<f64>() / n as f64;
        let inv = s.iter().map(|x| 1.0 / (x * x)).sum::<f64>() / n as f64;
        writeln!(out, "a_n = {}", 1.0 / inv.sqrt()).map_err(io)?;
        writeln!(out, "b_n = {}", b2.sqrt()).map_err(io)?;
    }
    Ok(())
}

fn scatter_for(title: String, spec: &JordanSpec, ring: &RingGeometry, rows: &[OutlierRow]) -> Scatter {
    let mut circles = vec![(Complex64::new(0.0, 0.0), ring.b)];
    if ring.a > 0.0 {
        circles.push((Complex64::new(0.0, 0.0), ring.a));
    }
    Scatter {
        title,
        points: rows.iter().map(|r| (r.lambda, r.group_index - 1)).collect(),
        markers: spec.thetas().collect(),
        circles,
    }
}

fn simulate(a: SimulateArgs, out: &mut dyn std::io::Write) -> Result<()> {
    check_svg(&a.out)?;
    let mut cfg = build_config(&a.model, a.n, 1, a.seed)?;
    cfg.method = SpectrumMethod::Dense;
    cfg.keep_spectrum = true;
    let r = run_trial(&cfg, 0)?;
    let rows = r.report.rows();
    let ring = cfg.ring()?;
    match &a.out.out_dir {
        None => write_outlier_csv(out, &rows)?,
        Some(dir) => {
            write_outlier_csv(create(dir, "outliers.csv")?, &rows)?;
            if let Some(eig) = &r.spectrum {
                write_spectrum_csv(create(dir, "spectrum.csv")?, eig)?;
            }
            if a.out.svg {
                let mut sc = scatter_for(format!("spectrum, n = {}", a.n), &cfg.spec, &ring, &rows);
                if let Some(eig) = &r.spectrum {
                    sc.points = eig.iter().map(|z| (*z, 5)).chain(sc.points).collect();
                }
                write_text(dir, "spectrum.svg", &sc.to_svg())?;
            }
            writeln!(
                out,
                "outer outliers: {}, inner violations: {}, mismatch: {}",
                r.report.outer_count(),
                r.report.inner_violations.len(),
                r.report.mismatch()
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

fn limit_sample(a: LimitSampleArgs, out: &mut dyn std::io::Write) -> Result<()> {
    check_svg(&a.out)?;
    if a.trials == 0 {
        return Err(Error::Usage("--trials must be at least 1".into()));
    }
    let ring = ring_of(&a.profile)?;
    let spec = parse_spec_arg(&a.spec)?;
    let basis = parse_basis_arg(&a.q, spec.rank())?;
    let cov = covariance_matrix(&spec, &basis, ring.b).map_err(usage)?;
    let mut rows = Vec::new();
    for t in 0..a.trials as u64 {
        let mut rng = SeededStream::new(a.seed, t).rng();
        let con = sample_constellation(&cov, &mut rng)?;
        rows.extend(con.rows(a.n).iter().map(|r| TrialCsvRow::new(t, r)));
    }
    match &a.out.out_dir {
        None => write_trial_csv(out, &rows)?,
        Some(dir) => {
            write_trial_csv(create(dir, "constellations.csv")?, &rows)?;
            if a.out.svg {
                let sc = Scatter {
                    title: "rescaled limit constellations".into(),
                    points: rows.iter().map(|r| (r.outlier().rescaled, r.group_index - 1)).collect(),
                    markers: vec![Complex64::new(0.0, 0.0)],
                    circles: Vec::new(),
                };
                write_text(dir, "constellations.svg", &sc.to_svg())?;
            }
        }
    }
    Ok(())
}

struct Campaign {
    stats: SummaryStats,
    summary: SummaryJson,
    rows: Vec<TrialCsvRow>,
}

/// Runs every trial once; the outcomes feed both the summary and the per-trial rows.
fn run_campaign(config: &ExperimentConfig, exec: &Parallel) -> Result<Campaign> {
    config.validate().map_err(usage)?;
    let outcomes = exec.run_all(config);
    let rows = outcomes
        .iter()
        .filter_map(|(t, r)| r.as_ref().ok().map(|r| (*t, r.report.rows())))
        .flat_map(|(t, rows)| rows.into_iter().map(move |r| TrialCsvRow::new(t, &r)))
        .collect();
    let stats = summarize(config, outcomes)?;
    let summary = SummaryJson::new(config, &stats)?;
    Ok(Campaign { stats, summary, rows })
}

fn experiment(a: ExperimentArgs, out: &mut dyn std::io::Write) -> Result<()> {
    check_svg(&a.out)?;
    let (mut cfg, outputs) = load_config(&a.config)?;
    cfg.n = a.n.unwrap_or(cfg.n);
    cfg.trials = a.trials.unwrap_or(cfg.trials);
    cfg.base_seed = a.seed.unwrap_or(cfg.base_seed);
    cfg.epsilon = a.epsilon.or(cfg.epsilon);
    cfg.delta = a.delta.or(cfg.delta);
    cfg.validate().map_err(usage)?;
    let exec = Parallel::new(resolve_jobs(a.jobs)?)?;
    let camp = run_campaign(&cfg, &exec)?;
    let text = to_json_string(&camp.summary)?;
    match &a.out.out_dir {
        None => out.write_all(text.as_bytes()).map_err(io)?,
        Some(dir) => {
            let names = outputs.unwrap_or(crate::formats::OutputsJson {
                summary: None,
                trials_csv: None,
                svg: None,
            });
            write_text(dir, names.summary.as_deref().unwrap_or("summary.json"), &text)?;
            write_trial_csv(
                create(dir, names.trials_csv.as_deref().unwrap_or("trials.csv"))?,
                &camp.rows,
            )?;
            if a.out.svg || names.svg.is_some() {
                let outl: Vec<OutlierRow> = camp.rows.iter().map(TrialCsvRow::outlier).collect();
                let sc = scatter_for(format!("outliers, n = {}", cfg.n), &cfg.spec, &cfg.ring()?, &outl);
                write_text(dir, names.svg.as_deref().unwrap_or("outliers.svg"), &sc.to_svg())?;
            }
        }
    }
    Ok(())
}

fn scaling(a: ScalingArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let first = *a.n.first().ok_or_else(|| Error::Usage("--n needs values".into()))?;
    let cfg = build_config(&a.model, first, a.trials, a.seed)?;
    let exec = Parallel::new(resolve_jobs(a.jobs)?)?;
    let fits = scaling_study_with(&cfg, &a.n, &exec).map_err(|e| match e {
        ringspike_core::Error::InvalidArgument(m) => Error::Usage(m),
        e => e.into(),
    })?;
    let mut ns = a.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let json = ScalingJson {
        spec: SpecJson::from(&cfg.spec),
        seed: a.seed,
        trials: a.trials,
        n_values: ns,
        fits: fits.iter().map(ScalingFitJson::from).collect(),
    };
    let text = to_json_string(&json)?;
    match &a.out_dir {
        None => out.write_all(text.as_bytes()).map_err(io)?,
        Some(dir) => {
            write_text(dir, "scaling.json", &text)?;
            for f in &fits {
                writeln!(
                    out,
                    "group {} class {} (p = {}): slope {:.4} expected {:.4} band {}",
                    f.group_index,
                    f.j,
                    f.p,
                    f.slope,
                    f.expected_slope,
                    f.band.map_or("n/a".into(), |b| format!("±{b:.4}"))
                )
                .map_err(io)?;
            }
        }
    }
    Ok(())
}

fn weingarten(a: WeingartenArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let table = WeingartenTable::new(a.k, a.n).map_err(usage)?;
    writeln!(out, "cycle_type\tWg\tapprox").map_err(io)?;
    for (ct, v) in table.entries() {
        let ct: Vec<String> = ct.iter().map(ToString::to_string).collect();
        writeln!(out, "[{}]\t{}\t{:e}", ct.join(","), v, to_f64(v)).map_err(io)?;
    }
    Ok(())
}

fn reference_index(kappa: f64) -> Option<usize> {
    TABLE1_KAPPAS.iter().position(|k| (k - kappa).abs() <= 1e-12)
}

fn row_of((a, b, c): (f64, f64, Complex64)) -> Table1RowJson {
    Table1RowJson {
        e_abs_z2: a,
        e_abs_zp2: b,
        e_z_conj_zp: [c.re, c.im],
    }
}

fn table1(a: Table1Args, out: &mut dyn std::io::Write) -> Result<()> {
    check_svg(&a.out)?;
    let kappas = if a.kappa.is_empty() {
        TABLE1_KAPPAS.to_vec()
    } else {
        a.kappa.clone()
    };
    let exec = Parallel::new(resolve_jobs(a.jobs)?)?;
    let mut columns = Vec::new();
    for &kappa in &kappas {
        let cfg = table1_config(kappa, a.n, a.trials, a.seed).map_err(usage)?;
        cfg.validate().map_err(usage)?;
        let Campaign { stats, summary, rows } = run_campaign(&cfg, &exec)?;
        let (g, h) = (&stats.groups[0], &stats.groups[1]);
        let pair = stats
            .pairs
            .first()
            .ok_or_else(|| ringspike_core::Error::Experiment("no trial produced both outliers".into()))?;
        let theory_cross = pair.theory_cross.unwrap_or_default();
        columns.push(Table1ColumnJson {
            kappa,
            theoretical: row_of((g.theory.unwrap_or(f64::NAN), h.theory.unwrap_or(f64::NAN), theory_cross)),
            empirical: row_of((g.second_moment.mean, h.second_moment.mean, pair.cross.mean)),
            standard_errors: Table1ErrorsJson {
                e_abs_z2: g.second_moment.se,
                e_abs_zp2: h.second_moment.se,
                e_z_conj_zp: pair.cross.se,
                e_z_zp: pair.pseudo.se,
            },
            e_z_zp: [pair.pseudo.mean.re, pair.pseudo.mean.im],
            reference_theoretical: reference_index(kappa).map(|i| row_of(TABLE1_REFERENCE_THEORY[i])),
            reference_empirical: reference_index(kappa).map(|i| row_of(TABLE1_REFERENCE_EMPIRICAL[i])),
            summary,
        });
        if let (Some(dir), true) = (&a.out.out_dir, a.out.svg) {
            let outl: Vec<OutlierRow> = rows.iter().map(TrialCsvRow::outlier).collect();
            let sc = scatter_for(format!("two spikes, kappa = {kappa}"), &cfg.spec, &cfg.ring()?, &outl);
            write_text(dir, &format!("table1_kappa{}.svg", columns.len() - 1), &sc.to_svg())?;
        }
    }
    let json = Table1Json {
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        columns,
    };
    let text = to_json_string(&json)?;
    match &a.out.out_dir {
        None => out.write_all(text.as_bytes()).map_err(io)?,
        Some(dir) => {
            write_text(dir, "table1.json", &text)?;
            for c in &json.columns {
                writeln!(
                    out,
                    "kappa = {}: E|Z|^2 {:.4} (theory {:.4}), E|Z'|^2 {:.4} (theory {:.4}), E[Z conj Z'] {:.4}{:+.4}i (theory {:.4}{:+.4}i)",
                    c.kappa,
                    c.empirical.e_abs_z2,
                    c.theoretical.e_abs_z2,
                    c.empirical.e_abs_zp2,
                    c.theoretical.e_abs_zp2,
                    c.empirical.e_z_conj_zp[0],
                    c.empirical.e_z_conj_zp[1],
                    c.theoretical.e_z_conj_zp[0],
                    c.theoretical.e_z_conj_zp[1],
                )
                .map_err(io)?;
            }
        }
    }
    Ok(())
}
