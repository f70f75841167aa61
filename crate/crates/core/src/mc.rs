//! Monte-Carlo campaigns.
//!
//! A trial is a pure function of `(config, trial_index)`: every random draw
//! comes from the stream `(base_seed, trial_index)`. Summaries are a fold
//! over trials sorted by index, so they do not depend on execution order.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jordan::{embed_perturbation, BasisSpec, JordanSpec, Mixing};
use crate::limitlaw::{outlier_power_variance, pairwise_outlier_covariance};
use crate::math::{cabs, carg, cpowi, ln, sqrt};
use crate::matrix::CMatrix;
use crate::profiles::{RingGeometry, SingularProfile};
use crate::randmat::{sample_ginibre, IsotropicForm, IsotropicOperator, SeededStream, StreamRng};
use crate::spectra::{classify_outliers, default_delta, default_epsilon, eigenvalues, match_outliers, OutlierReport};
use crate::spectra::{outer_eigenvalues, KrylovOptions, LinearOperator, LowRankUpdate, SpikedInverse};

/// Largest fraction of failed trials an experiment tolerates.
pub const MAX_FAILED_FRACTION: f64 = 0.1;

/// Dimension at or below which `SpectrumMethod::Auto` uses the dense solver.
pub const AUTO_DENSE_MAX_N: usize = 200;

/// Smallest fraction of usable trials per dimension in a scaling study.
pub const MIN_USABLE_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixModel {
    /// `A = U·diag(s)` or `U·diag(s)·V` with `s` the quantiles of the profile.
    Isotropic {
        profile: SingularProfile,
        form: IsotropicForm,
    },
    /// i.i.d. circular entries of variance `1/n`; ring `a = 0`, `b = 1`.
    Ginibre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumMethod {
    /// Full spectrum of the assembled matrix.
    Dense,
    /// Arnoldi on `A + BC` for the outer region and on `(A + BC)⁻¹` for the
    /// inner disc, with a dense fallback when either does not converge.
    Krylov,
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: MatrixModel,
    pub spec: JordanSpec,
    pub basis: BasisSpec,
    pub n: usize,
    pub trials: usize,
    pub base_seed: u64,
    /// Outer margin; `None` selects the default.
    pub epsilon: Option<f64>,
    /// Inner margin; `None` selects the default.
    pub delta: Option<f64>,
    pub method: SpectrumMethod,
    /// Keep the full spectrum in each trial result (dense solver only).
    pub keep_spectrum: bool,
}

impl ExperimentConfig {
    pub fn new(model: MatrixModel, spec: JordanSpec, basis: BasisSpec, n: usize) -> Self {
        Self {
            model,
            spec,
            basis,
            n,
            trials: 1,
            base_seed: 0,
            epsilon: None,
            delta: None,
            method: SpectrumMethod::Auto,
            keep_spectrum: false,
        }
    }

    pub fn ring(&self) -> Result<RingGeometry> {
        match &self.model {
            MatrixModel::Isotropic { profile, .. } => {
                profile.validate()?;
                Ok(profile.ring_radii())
            }
            MatrixModel::Ginibre => Ok(RingGeometry { a: 0.0, b: 1.0 }),
        }
    }

    pub fn resolved_epsilon(&self) -> Result<f64> {
        let ring = self.ring()?;
        Ok(self.epsilon.unwrap_or_else(|| default_epsilon(&self.spec, ring.b)))
    }

    pub fn resolved_delta(&self) -> Result<f64> {
        let ring = self.ring()?;
        Ok(self.delta.unwrap_or_else(|| default_delta(&ring)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.basis.dim() != self.spec.rank() {
            return Err(Error::Dimension(format!(
                "basis dimension {} differs from Jordan dimension {}",
                self.basis.dim(),
                self.spec.rank()
            )));
        }
        if self.n < self.spec.rank() {
            return Err(Error::Dimension(format!(
                "n = {} is smaller than the perturbation rank {}",
                self.n,
                self.spec.rank()
            )));
        }
        let ring = self.ring()?;
        let eps = self.resolved_epsilon()?;
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
        }
        if ring.a > 0.0 {
            let delta = self.resolved_delta()?;
            if !(delta > 0.0 && delta < ring.a) {
                return Err(Error::InvalidArgument(format!(
                    "delta must lie in (0, a = {}), got {delta}",
                    ring.a
                )));
            }
        }
        for theta in self.spec.thetas() {
            let m = cabs(theta);
            if m > ring.b && m <= ring.b + 3.0 * eps {
                return Err(Error::InvalidArgument(format!(
                    "|theta| = {m} lies within 3 epsilon of the outer radius b = {}",
                    ring.b
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: u64,
    pub report: OutlierReport,
    /// `√n · mean_s (λ̃_s − θ)^p` over the first class, for groups whose first
    /// class is one block and whose matching succeeded.
    pub z: Vec<Option<Complex64>>,
    /// Solver that produced the reported eigenvalues.
    pub method: SpectrumMethod,
    pub spectrum: Option<Vec<Complex64>>,
}

impl TrialResult {
    /// Exactly the expected outlier count, nothing unmatched, no inner violation.
    pub fn is_clean(&self) -> bool {
        !self.report.mismatch() && self.report.inner_violations.is_empty()
    }
}

enum Sampled {
    Isotropic(IsotropicOperator),
    Ginibre(CMatrix),
}

impl Sampled {
    fn dense(&self) -> CMatrix {
        match self {
            Self::Isotropic(op) => op.to_dense(),
            Self::Ginibre(m) => m.clone(),
        }
    }
}

struct Regions {
    outer: Vec<Complex64>,
    inner: Vec<Complex64>,
}

fn krylov_regions(
    a: &Sampled,
    b: &CMatrix,
    c: &CMatrix,
    ring: &RingGeometry,
    eps: f64,
    delta: f64,
    rng: &mut StreamRng,
) -> Result<Option<Regions>> {
    let opts = KrylovOptions::default();
    let outer_r = ring.b + 2.0 * eps;
    let run_outer = |op: &dyn LinearOperator, rng: &mut StreamRng| outer_eigenvalues(op, outer_r, &opts, rng);
    let (outer, inner) = match a {
        Sampled::Ginibre(m) => {
            let res = run_outer(&LowRankUpdate { base: m, b, c }, rng)?;
            if !res.converged {
                return Ok(None);
            }
            (res.eigenvalues, Vec::new())
        }
        Sampled::Isotropic(op) => {
            let res = run_outer(&LowRankUpdate { base: op, b, c }, rng)?;
            if !res.converged {
                return Ok(None);
            }
            let inner = if ring.a > 0.0 {
                let inv = match SpikedInverse::new(op, b, c) {
                    Ok(inv) => inv,
                    Err(Error::Singular(_)) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let r = outer_eigenvalues(&inv, 1.0 / (ring.a - delta), &opts, rng)?;
                if !r.converged {
                    return Ok(None);
                }
                r.eigenvalues.iter().map(|mu| Complex64::new(1.0, 0.0) / mu).collect()
            } else {
                Vec::new()
            };
            (res.eigenvalues, inner)
        }
    };
    Ok(Some(Regions { outer, inner }))
}

/// One trial: sample `A`, embed `P` with a fresh Haar `W`, locate the
/// outliers, match them to the spikes and evaluate `Z`.
pub fn run_trial(config: &ExperimentConfig, trial: u64) -> Result<TrialResult> {
    let ring = config.ring()?;
    let eps = config.resolved_epsilon()?;
    let delta = config.resolved_delta()?;
    let n = config.n;
    let mut rng = SeededStream::new(config.base_seed, trial).rng();

    let a = match &config.model {
        MatrixModel::Isotropic { profile, form } => {
            Sampled::Isotropic(IsotropicOperator::sample(&profile.realize(n)?, *form, &mut rng))
        }
        MatrixModel::Ginibre => Sampled::Ginibre(sample_ginibre(n, &mut rng)),
    };
    let pert = embed_perturbation(&config.spec, &config.basis, n, Mixing::Haar(&mut rng))?;

    let use_dense = match config.method {
        SpectrumMethod::Dense => true,
        SpectrumMethod::Krylov => config.keep_spectrum,
        SpectrumMethod::Auto => config.keep_spectrum || n <= AUTO_DENSE_MAX_N,
    };
    let mut method = SpectrumMethod::Dense;
    let mut spectrum = None;
    let regions = if use_dense {
        None
    } else {
        method = SpectrumMethod::Krylov;
        krylov_regions(&a, &pert.b, &pert.c, &ring, eps, delta, &mut rng)?
    };
    let regions = match regions {
        Some(r) => r,
        None => {
            method = SpectrumMethod::Dense;
            let m = &a.dense() + &pert.p;
            let eig = eigenvalues(&m)?.eigenvalues;
            let cls = classify_outliers(&eig, &ring, eps, delta)?;
            if config.keep_spectrum {
                spectrum = Some(eig);
            }
            Regions {
                outer: cls.outer,
                inner: cls.inner_violations,
            }
        }
    };

    let mut report = match_outliers(&regions.outer, &config.spec, n, ring.b);
    report.inner_violations = regions.inner;
    let root_n = sqrt(n as f64);
    let z = report
        .groups
        .iter()
        .map(|g| {
            let c = g.classes.first()?;
            if g.mismatch || !g.supercritical || c.beta != 1 || c.points.len() != c.p {
                return None;
            }
            let sum: Complex64 = c.points.iter().map(|pt| cpowi(pt.lambda - g.theta, c.p as u32)).sum();
            Some(sum * (root_n / c.p as f64))
        })
        .collect();
    Ok(TrialResult {
        trial,
        report,
        z,
        method,
        spectrum,
    })
}

/// How the trials of an experiment are executed.
pub trait TrialExecutor {
    /// Runs every trial index `0..config.trials`, in any order.
    fn run_all(&self, config: &ExperimentConfig) -> Vec<(u64, Result<TrialResult>)>;
}

/// Runs trials one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl TrialExecutor for Sequential {
    fn run_all(&self, config: &ExperimentConfig) -> Vec<(u64, Result<TrialResult>)> {
        (0..config.trials as u64).map(|t| (t, run_trial(config, t))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// `None` when fewer than two samples.
    pub se: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    /// `√(Σ|x − x̄|² / (N(N−1)))`; `None` when fewer than two samples.
    pub se: Option<f64>,
}

fn estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n.max(1.0);
    let se = (xs.len() >= 2).then(|| sqrt(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n * (n - 1.0))));
    Estimate { mean, se }
}

fn complex_estimate(xs: &[Complex64]) -> ComplexEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<Complex64>() / n.max(1.0);
    let se = (xs.len() >= 2).then(|| sqrt(xs.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n * (n - 1.0))));
    ComplexEstimate { mean, se }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    /// 1-based.
    pub group_index: usize,
    pub theta: Complex64,
    /// Trials contributing a `Z` value.
    pub count: usize,
    /// Empirical `E|Z|²`.
    pub second_moment: Estimate,
    /// Limit `E|Z|²`.
    pub theory: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSummary {
    /// 1-based group indices, `first < second`.
    pub first: usize,
    pub second: usize,
    pub count: usize,
    /// Empirical `E[Z conj(Z')]`.
    pub cross: ComplexEstimate,
    /// Empirical `E[Z Z']`.
    pub pseudo: ComplexEstimate,
    /// Limit `E[Z conj(Z')]`.
    pub theory_cross: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub trials: usize,
    pub completed: usize,
    pub failed: usize,
    /// Completed trials whose matching flagged a mismatch.
    pub excluded: usize,
    /// Completed trials with the exact outlier count and no inner violation.
    pub clean: usize,
    /// Completed trials with at least one inner violation.
    pub inner_violation_trials: usize,
    pub success_rate: f64,
    pub inner_violation_rate: f64,
    pub groups: Vec<GroupSummary>,
    pub pairs: Vec<PairSummary>,
    /// `(trial, message)` of each failed trial.
    pub failures: Vec<(u64, String)>,
}

/// Folds trial outcomes, sorted by index, into summary statistics.
pub fn summarize(config: &ExperimentConfig, mut outcomes: Vec<(u64, Result<TrialResult>)>) -> Result<SummaryStats> {
    outcomes.sort_by_key(|(t, _)| *t);
    let mut failures = Vec::new();
    let mut done = Vec::new();
    for (t, r) in outcomes {
        match r {
            Ok(res) => done.push(res),
            Err(e) => failures.push((t, e.to_string())),
        }
    }
    let trials = done.len() + failures.len();
    if failures.len() as f64 > MAX_FAILED_FRACTION * trials as f64 {
        return Err(Error::Experiment(format!(
            "{} of {trials} trials failed; first failure (trial {}): {}",
            failures.len(),
            failures[0].0,
            failures[0].1
        )));
    }
    let ring = config.ring()?;
    let usable: Vec<&TrialResult> = done.iter().filter(|r| !r.report.mismatch()).collect();
    let ngroups = config.spec.groups().len();

    let groups = (0..ngroups)
        .map(|gi| {
            let zs: Vec<f64> = usable.iter().filter_map(|r| r.z[gi]).map(|z| z.norm_sqr()).collect();
            GroupSummary {
                group_index: gi + 1,
                theta: config.spec.groups()[gi].theta,
                count: zs.len(),
                second_moment: estimate(&zs),
                theory: outlier_power_variance(&config.spec, &config.basis, ring.b, gi).ok(),
            }
        })
        .collect();

    let mut pairs = Vec::new();
    for g1 in 0..ngroups {
        for g2 in g1 + 1..ngroups {
            let both: Vec<(Complex64, Complex64)> = usable.iter().filter_map(|r| Some((r.z[g1]?, r.z[g2]?))).collect();
            if both.is_empty() {
                continue;
            }
            let cross: Vec<Complex64> = both.iter().map(|(x, y)| x * y.conj()).collect();
            let pseudo: Vec<Complex64> = both.iter().map(|(x, y)| x * y).collect();
            pairs.push(PairSummary {
                first: g1 + 1,
                second: g2 + 1,
                count: both.len(),
                cross: complex_estimate(&cross),
                pseudo: complex_estimate(&pseudo),
                theory_cross: pairwise_outlier_covariance(&config.spec, &config.basis, ring.b, g1, g2)
                    .ok()
                    .map(|p| p.cross),
            });
        }
    }

    let completed = done.len();
    let clean = done.iter().filter(|r| r.is_clean()).count();
    let inner = done.iter().filter(|r| !r.report.inner_violations.is_empty()).count();
    let denom = (completed as f64).max(1.0);
    Ok(SummaryStats {
        n: config.n,
        trials,
        completed,
        failed: failures.len(),
        excluded: completed - usable.len(),
        clean,
        inner_violation_trials: inner,
        success_rate: clean as f64 / denom,
        inner_violation_rate: inner as f64 / denom,
        groups,
        pairs,
        failures,
    })
}

pub fn run_experiment_with<E: TrialExecutor + ?Sized>(config: &ExperimentConfig, exec: &E) -> Result<SummaryStats> {
    config.validate()?;
    summarize(config, exec.run_all(config))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<SummaryStats> {
    run_experiment_with(config, &Sequential)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// 1-based.
    pub group_index: usize,
    /// 1-based rate class.
    pub j: usize,
    pub p: usize,
    /// `−1/(2p)`.
    pub expected_slope: f64,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: Option<f64>,
    /// Half-width of the 95% confidence band on the slope.
    pub band: Option<f64>,
    /// `(n, median |λ̃ − θ|)`.
    pub medians: Vec<(usize, f64)>,
}

/// Two-sided 97.5% Student quantiles for 1..=30 degrees of freedom.
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
    2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
];

fn t975(df: usize) -> f64 {
    T975.get(df.wrapping_sub(1)).copied().unwrap_or(1.96)
}

/// Ordinary least squares `y = α + s·x`: `(s, α, se(s))`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64, Option<f64>) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = (x.len() > 2).then(|| {
        let ssr: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let r = b - intercept - slope * a;
                r * r
            })
            .sum();
        sqrt(ssr / (k - 2.0) / sxx)
    });
    (slope, intercept, se)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Regresses `log median |λ̃ − θ|` on `log n` for every supercritical rate class.
pub fn scaling_study_with<E: TrialExecutor + ?Sized>(
    config: &ExperimentConfig,
    n_list: &[usize],
    exec: &E,
) -> Result<Vec<ScalingFit>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::InvalidArgument(
            "a scaling study needs at least 3 distinct n values".into(),
        ));
    }
    let ring = config.ring()?;
    let classes: Vec<(usize, usize, usize)> = config
        .spec
        .groups()
        .iter()
        .enumerate()
        .filter(|(_, g)| cabs(g.theta) > ring.b)
        .flat_map(|(gi, g)| g.blocks.iter().enumerate().map(move |(j, b)| (gi, j, b.p)))
        .collect();
    let mut dists: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); classes.len()];
    for &n in &ns {
        let cfg = ExperimentConfig { n, ..config.clone() };
        cfg.validate()?;
        let outcomes = exec.run_all(&cfg);
        let usable: Vec<TrialResult> = outcomes
            .into_iter()
            .filter_map(|(_, r)| r.ok())
            .filter(|r| !r.report.mismatch())
            .collect();
        if (usable.len() as f64) < MIN_USABLE_FRACTION * cfg.trials as f64 || usable.is_empty() {
            return Err(Error::Experiment(format!(
                "only {} of {} trials usable at n = {n}",
                usable.len(),
                cfg.trials
            )));
        }
        for (ci, &(gi, j, _)) in classes.iter().enumerate() {
            let g = &usable[0].report.groups[gi];
            let mut d: Vec<f64> = usable
                .iter()
                .flat_map(|r| {
                    r.report.groups[gi].classes[j]
                        .points
                        .iter()
                        .map(|pt| cabs(pt.lambda - g.theta))
                })
                .collect();
            dists[ci].push((n, median(&mut d)));
        }
    }
    Ok(classes
        .iter()
        .zip(dists)
        .map(|(&(gi, j, p), medians)| {
            let x: Vec<f64> = medians.iter().map(|(n, _)| ln(*n as f64)).collect();
            let y: Vec<f64> = medians.iter().map(|(_, m)| ln(*m)).collect();
            let (slope, intercept, se) = ols_slope(&x, &y);
            ScalingFit {
                group_index: gi + 1,
                j: j + 1,
                p,
                expected_slope: -1.0 / (2.0 * p as f64),
                slope,
                intercept,
                slope_se: se,
                band: se.map(|s| s * t975(x.len() - 2)),
                medians,
            }
        })
        .collect())
}

pub fn scaling_study(config: &ExperimentConfig, n_list: &[usize]) -> Result<Vec<ScalingFit>> {
    scaling_study_with(config, n_list, &Sequential)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonStats {
    /// `(max|z| − min|z|) / median|z|`.
    pub radial_spread: f64,
    /// Largest deviation of the sorted cyclic angle gaps from `2π/p`.
    pub angular_deviation: f64,
    /// `max_s |z_s^p − w| / |w|` with `w` the componentwise median of the `z_s^p`.
    pub pth_power_spread: f64,
}

/// Regular-polygon diagnostics of one rescaled class with a single block.
pub fn polygon_stats(points: &[Complex64], p: usize, beta: usize) -> Result<PolygonStats> {
    if points.len() != p * beta {
        return Err(Error::CountMismatch {
            expected: p * beta,
            got: points.len(),
        });
    }
    if beta != 1 || p == 0 {
        return Err(Error::InvalidArgument("polygon statistics need a single block".into()));
    }
    let mut radii: Vec<f64> = points.iter().map(|z| cabs(*z)).collect();
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let rmin = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let rmed = median(&mut radii);
    let radial_spread = if rmed > 0.0 { (rmax - rmin) / rmed } else { 0.0 };

    let tau = 2.0 * core::f64::consts::PI;
    let mut angles: Vec<f64> = points.iter().map(|z| carg(*z)).collect();
    angles.sort_by(f64::total_cmp);
    let step = tau / p as f64;
    let angular_deviation = (0..p)
        .map(|s| {
            let gap = if s + 1 < p {
                angles[s + 1] - angles[s]
            } else {
                angles[0] + tau - angles[s]
            };
            (gap - step).abs()
        })
        .fold(0.0, f64::max);

    let powers: Vec<Complex64> = points.iter().map(|z| cpowi(*z, p as u32)).collect();
    let mut re: Vec<f64> = powers.iter().map(|w| w.re).collect();
    let mut im: Vec<f64> = powers.iter().map(|w| w.im).collect();
    let w = Complex64::new(median(&mut re), median(&mut im));
    let dev = powers.iter().map(|x| cabs(x - w)).fold(0.0, f64::max);
    let pth_power_spread = if cabs(w) > 0.0 { dev / cabs(w) } else { dev };
    Ok(PolygonStats {
        radial_spread,
        angular_deviation,
        pth_power_spread,
    })
}

/// `θ = 1.5 + i`, `θ' = 3 + i`.
pub const TABLE1_THETAS: [Complex64; 2] = [Complex64::new(1.5, 1.0), Complex64::new(3.0, 1.0)];

/// Reference cross term for `κ = 2^{-1/2}`.
pub const TABLE1_REFERENCE_CROSS: Complex64 = Complex64::new(-8.755, -1.358);

/// `κ` values of the two reference columns.
pub const TABLE1_KAPPAS: [f64; 2] = [0.0, core::f64::consts::FRAC_1_SQRT_2];

/// Reference theoretical row `(E|Z|², E|Z'|², E[Z conj Z'])` for `κ = 0` and `κ = 2^{-1/2}`.
pub const TABLE1_REFERENCE_THEORY: [(f64, f64, Complex64); 2] = [
    (1.444, 1.111, Complex64::new(0.0, 0.0)),
    (13.0, 10.0, TABLE1_REFERENCE_CROSS),
];

/// Reference empirical row `(E|Z|², E|Z'|², E[Z conj Z'])` for `κ = 0` and `κ = 2^{-1/2}`.
pub const TABLE1_REFERENCE_EMPIRICAL: [(f64, f64, Complex64); 2] = [
    (1.492, 1.107, Complex64::new(0.00616, -0.00235)),
    (12.72, 10.04, Complex64::new(-8.917, -1.317)),
];

/// `Q = [[1, κ], [κ, 1]]`.
pub fn table1_basis(kappa: f64) -> Result<BasisSpec> {
    let one = Complex64::new(1.0, 0.0);
    let k = Complex64::new(kappa, 0.0);
    BasisSpec::new(CMatrix::from_row_major(2, 2, alloc::vec![one, k, k, one])?)
}

/// Two simple spikes on a Ginibre matrix with the basis [`table1_basis`].
pub fn table1_config(kappa: f64, n: usize, trials: usize, base_seed: u64) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(
        MatrixModel::Ginibre,
        JordanSpec::simple(&TABLE1_THETAS)?,
        table1_basis(kappa)?,
        n,
    );
    cfg.trials = trials;
    cfg.base_seed = base_seed;
    Ok(cfg)
}
