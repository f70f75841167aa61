//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p ringspike --test acceptance`; trailing arguments
//! such as `AC4 AC7` restrict the run. Set `RINGSPIKE_EXTENDED=1` to add the
//! full-size two-spike table (n = 1000, 1000 trials) as an informational row.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use ringspike::parallel::{resolve_jobs, Parallel};
use ringspike_core::jordan::{BasisSpec, JordanSpec};
use ringspike_core::limitlaw::{covariance_matrix, sample_constellation};
use ringspike_core::mc::{
    polygon_stats, run_experiment_with, scaling_study_with, table1_config, ExperimentConfig, MatrixModel, SummaryStats,
    TrialExecutor,
};
use ringspike_core::profiles::SingularProfile;
use ringspike_core::randmat::{complex_gaussian_vec, sample_ginibre, sample_haar_unitary, IsotropicForm};
use ringspike_core::spectra::characteristic_ratio;
use ringspike_core::weingarten::{four_trace_by_expansion, four_trace_closed_form, SquareMatrix, WeingartenTable};
use ringspike_core::{CMatrix, Complex64, SeededStream};

const SEED: u64 = 20_240_601;

const AC1_MAX_ORDER: usize = 5;
const AC1_BUDGET: Duration = Duration::from_secs(10);

const AC2_QUADRUPLES: usize = 20;
const AC2_BUDGET: Duration = Duration::from_secs(30);

const AC3_DRAWS: usize = 100_000;
const AC3_SIGMAS: f64 = 4.0;
const AC3_BUDGET: Duration = Duration::from_secs(120);

const AC4_N: usize = 1000;
const AC4_TRIALS: usize = 100;
const AC4_MIN_CLEAN: usize = 95;
const AC4_MIN_CLOSE: usize = 90;
const AC4_RADIUS_NUMERATOR: f64 = 10.0;
const AC4_BUDGET: Duration = Duration::from_secs(15 * 60);

const AC5_NS: [usize; 4] = [250, 500, 1000, 2000];
const AC5_TRIALS: usize = 50;
const AC5_TOL_CLASS1: f64 = 0.05;
const AC5_TOL_CLASS2: f64 = 0.1;
const AC5_BUDGET: Duration = Duration::from_secs(30 * 60);

const AC6_N: usize = 500;
const AC6_TRIALS: usize = 200;
const AC6_REL_TOL: f64 = 0.2;
/// Reference limits `(E|Z|², E|Z'|²)` for `κ = 0` and `κ = 2^{-1/2}`.
const AC6_REFERENCE: [(f64, f64); 2] = [(1.444, 1.111), (13.0, 10.0)];
const EXTENDED_N: usize = 1000;
const EXTENDED_TRIALS: usize = 1000;

const AC7_CORRELATED_SIGMAS: f64 = 5.0;
const AC7_NULL_SIGMAS: f64 = 3.0;
const AC7_PSEUDO_SIGMAS: f64 = 4.0;
const AC7_REL_TOL: f64 = 0.2;
const AC7_REFERENCE_CROSS: Complex64 = Complex64::new(-8.755, -1.358);

const AC8_DRAWS: usize = 10_000;
const AC8_MAX_KS: f64 = 0.02;
const AC8_POLYGON_TOL: f64 = 1e-10;
const AC8_THETA: Complex64 = Complex64::new(2.0, 0.5);
const AC8_B: f64 = 1.0;

const AC9_INSTANCES: usize = 100;
const AC9_MAX_N: usize = 50;
const AC9_MAX_R: usize = 4;
const AC9_REL_TOL: f64 = 1e-9;
const AC9_BUDGET: Duration = Duration::from_secs(60);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn within_budget(v: Verdict, elapsed: Duration, budget: Duration) -> Verdict {
    let ok = elapsed <= budget;
    let detail = format!(
        "{}; {:.1}s (budget {}s)",
        v.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    verdict(v.pass && ok, detail)
}

fn rel(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs()
}

fn crel(x: Complex64, target: Complex64) -> f64 {
    (x - target).norm() / target.norm()
}

fn ac1() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for k in 1..=AC1_MAX_ORDER {
        for n in [k, k + 1, 10] {
            let t = WeingartenTable::new(k, n).expect("table");
            checked += 1;
            if !t.gram_residuals().iter().all(Zero::is_zero) {
                bad.push((k, n));
            }
        }
    }
    verdict(bad.is_empty(), format!("{checked} tables exact, failures {bad:?}"))
}

fn random_rational_matrix<R: Rng>(n: usize, rng: &mut R) -> SquareMatrix<BigRational> {
    SquareMatrix::from_fn(n, |_, _| {
        BigRational::new(
            BigInt::from(rng.random_range(-9i64..=9)),
            BigInt::from(rng.random_range(1i64..=7)),
        )
    })
}

fn ac2() -> Verdict {
    let mut rng = SeededStream::new(SEED, 2).rng();
    let mut mismatches = 0;
    for n in 2..=5 {
        for _ in 0..AC2_QUADRUPLES {
            let [a, b, c, d] = [(); 4].map(|_| random_rational_matrix(n, &mut rng));
            let closed = four_trace_closed_form(&a, &b, &c, &d).expect("closed form");
            let expanded = four_trace_by_expansion(&a, &b, &c, &d).expect("expansion");
            if closed != expanded {
                mismatches += 1;
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("{} quadruples, {mismatches} mismatches", 4 * AC2_QUADRUPLES),
    )
}

struct Moment {
    name: &'static str,
    target: Complex64,
    sum: Complex64,
    sum_sq_re: f64,
    sum_sq_im: f64,
}

impl Moment {
    fn new(name: &'static str, target: f64) -> Self {
        Self {
            name,
            target: Complex64::new(target, 0.0),
            sum: Complex64::new(0.0, 0.0),
            sum_sq_re: 0.0,
            sum_sq_im: 0.0,
        }
    }

    fn push(&mut self, x: Complex64) {
        self.sum += x;
        self.sum_sq_re += x.re * x.re;
        self.sum_sq_im += x.im * x.im;
    }

    /// Largest deviation in standard errors over the real and imaginary parts.
    fn sigmas(&self, draws: usize) -> f64 {
        let nd = draws as f64;
        let mean = self.sum / nd;
        let se = |sq: f64, m: f64| ((sq / nd - m * m).max(0.0) / (nd - 1.0)).sqrt();
        let z = |d: f64, s: f64| {
            if s > 0.0 {
                d.abs() / s
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        let dev = mean - self.target;
        z(dev.re, se(self.sum_sq_re, mean.re)).max(z(dev.im, se(self.sum_sq_im, mean.im)))
    }
}

fn ac3() -> Verdict {
    let mut worst = (0.0, "", 0);
    let mut pass = true;
    for n in [3usize, 5] {
        let nf = n as f64;
        let mut moments = [
            Moment::new("E|v|^2", 1.0 / nf),
            Moment::new("E|v|^4", 2.0 / (nf * (nf + 1.0))),
            Moment::new("same row", 1.0 / (nf * (nf + 1.0))),
            Moment::new("same column", 1.0 / (nf * (nf + 1.0))),
            Moment::new("distinct", 1.0 / (nf * nf - 1.0)),
            Moment::new("four-index", -1.0 / (nf * (nf * nf - 1.0))),
        ];
        let mut rng = SeededStream::new(SEED, 30 + n as u64).rng();
        for _ in 0..AC3_DRAWS {
            let v = sample_haar_unitary(n, &mut rng);
            let a2 = |i: usize, j: usize| Complex64::new(v[(i, j)].norm_sqr(), 0.0);
            moments[0].push(a2(0, 0));
            moments[1].push(a2(0, 0) * a2(0, 0));
            moments[2].push(a2(0, 0) * a2(0, 1));
            moments[3].push(a2(0, 0) * a2(1, 0));
            moments[4].push(a2(0, 0) * a2(1, 1));
            moments[5].push(v[(0, 0)] * v[(0, 1)].conj() * v[(1, 1)] * v[(1, 0)].conj());
        }
        for m in &moments {
            let s = m.sigmas(AC3_DRAWS);
            pass &= s <= AC3_SIGMAS;
            if s > worst.0 {
                worst = (s, m.name, n);
            }
        }
    }
    verdict(
        pass,
        format!(
            "worst {:.2} SE ({} at n = {}), limit {AC3_SIGMAS}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn uniform_model() -> MatrixModel {
    MatrixModel::Isotropic {
        profile: SingularProfile::Uniform { lo: 0.5, hi: 4.0 },
        form: IsotropicForm::UT,
    }
}

fn ac4(exec: &Parallel) -> Verdict {
    let spec = JordanSpec::simple(&[
        Complex64::new(1.0, 0.0),
        Complex64::new(4.0, 1.0),
        Complex64::new(4.0, -1.0),
    ])
    .expect("spec");
    let mut cfg = ExperimentConfig::new(uniform_model(), spec, BasisSpec::identity(3), AC4_N);
    cfg.trials = AC4_TRIALS;
    cfg.base_seed = SEED;
    cfg.validate().expect("config");
    let radius = AC4_RADIUS_NUMERATOR / (AC4_N as f64).sqrt();
    let mut outcomes = exec.run_all(&cfg);
    outcomes.sort_by_key(|(t, _)| *t);
    let (mut clean, mut close, mut failed) = (0, 0, 0);
    for (_, r) in &outcomes {
        let Ok(r) = r else {
            failed += 1;
            continue;
        };
        if r.report.outer_count() == 2 && r.report.inner_violations.is_empty() {
            clean += 1;
        }
        let near = r.report.groups.iter().filter(|g| g.supercritical).all(|g| {
            !g.mismatch
                && g.classes
                    .iter()
                    .flat_map(|c| &c.points)
                    .all(|pt| (pt.lambda - g.theta).norm() <= radius)
        });
        if near && r.report.outer_count() == 2 {
            close += 1;
        }
    }
    verdict(
        clean >= AC4_MIN_CLEAN && close >= AC4_MIN_CLOSE,
        format!(
            "{clean}/{AC4_TRIALS} with two outer outliers and no inner violation (need {AC4_MIN_CLEAN}), \
             {close} within {radius:.4} (need {AC4_MIN_CLOSE}), {failed} failed"
        ),
    )
}

fn ac5(exec: &Parallel) -> Verdict {
    let spec = JordanSpec::single(Complex64::new(4.0, 1.0), &[(3, 1), (1, 1)]).expect("spec");
    let mut cfg = ExperimentConfig::new(uniform_model(), spec, BasisSpec::identity(4), AC5_NS[0]);
    cfg.trials = AC5_TRIALS;
    cfg.base_seed = SEED;
    let fits = match scaling_study_with(&cfg, &AC5_NS, exec) {
        Ok(f) => f,
        Err(e) => return verdict(false, format!("scaling study failed: {e}")),
    };
    let mut pass = fits.len() == 2;
    let mut parts = Vec::new();
    for f in &fits {
        let (target, tol) = match f.j {
            1 => (-1.0 / 6.0, AC5_TOL_CLASS1),
            _ => (-0.5, AC5_TOL_CLASS2),
        };
        pass &= (f.slope - target).abs() <= tol;
        parts.push(format!("j = {} slope {:.4} (target {target:.4} ± {tol})", f.j, f.slope));
    }
    verdict(pass, parts.join(", "))
}

/// `E[Z conj Z']` limit for two simple spikes with `Q = [[1, κ], [κ, 1]]` and `b = 1`.
fn two_spike_limits(kappa: f64) -> (f64, f64, Complex64) {
    let [t1, t2] = [Complex64::new(1.5, 1.0), Complex64::new(3.0, 1.0)];
    let k2 = kappa * kappa;
    let d = (1.0 - k2) * (1.0 - k2);
    // G1 = Q⁻¹Q⁻¹*, G2 = Q*Q for the real symmetric Q.
    let (g1_diag, g1_off) = ((1.0 + k2) / d, -2.0 * kappa / d);
    let (g2_diag, g2_off) = (1.0 + k2, 2.0 * kappa);
    let diag = |t: Complex64| t.norm_sqr() / (t.norm_sqr() - 1.0) * g1_diag * g2_diag;
    let tt = t1 * t2.conj();
    let cross = tt / (tt - 1.0) * (g1_off * g2_off);
    (diag(t1), diag(t2), cross)
}

fn table1_runs(exec: &Parallel) -> Result<[SummaryStats; 2], String> {
    let run = |kappa: f64| {
        let cfg = table1_config(kappa, AC6_N, AC6_TRIALS, SEED).map_err(|e| e.to_string())?;
        run_experiment_with(&cfg, exec).map_err(|e| e.to_string())
    };
    Ok([run(0.0)?, run(FRAC_1_SQRT_2)?])
}

fn ac6(runs: &Result<[SummaryStats; 2], String>) -> Verdict {
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("experiment failed: {e}")),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (s, reference)) in runs.iter().zip(AC6_REFERENCE).enumerate() {
        let (e1, e2) = (s.groups[0].second_moment.mean, s.groups[1].second_moment.mean);
        let (r1, r2) = (rel(e1, reference.0), rel(e2, reference.1));
        pass &= r1 <= AC6_REL_TOL && r2 <= AC6_REL_TOL;
        parts.push(format!(
            "κ{i}: E|Z|² {e1:.3} vs {} ({:.1}%), E|Z'|² {e2:.3} vs {} ({:.1}%)",
            reference.0,
            100.0 * r1,
            reference.1,
            100.0 * r2
        ));
    }
    verdict(pass, parts.join("; "))
}

fn ac7(runs: &Result<[SummaryStats; 2], String>) -> Verdict {
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("experiment failed: {e}")),
    };
    let [null, corr] = [&runs[0].pairs[0], &runs[1].pairs[0]];
    let sigmas = |m: Complex64, se: Option<f64>| se.map_or(f64::INFINITY, |s| m.norm() / s);
    let corr_sig = sigmas(corr.cross.mean, corr.cross.se);
    let null_sig = sigmas(null.cross.mean, null.cross.se);
    let pseudo_sig = sigmas(null.pseudo.mean, null.pseudo.se).max(sigmas(corr.pseudo.mean, corr.pseudo.se));
    let formula = two_spike_limits(FRAC_1_SQRT_2).2;
    let (rf, rp) = (
        crel(corr.cross.mean, formula),
        crel(corr.cross.mean, AC7_REFERENCE_CROSS),
    );
    let (supported, r_supported) = if rf <= rp { ("formula", rf) } else { ("reference", rp) };
    let pass = corr_sig > AC7_CORRELATED_SIGMAS
        && null_sig <= AC7_NULL_SIGMAS
        && pseudo_sig <= AC7_PSEUDO_SIGMAS
        && r_supported <= AC7_REL_TOL;
    verdict(
        pass,
        format!(
            "cross {:.3}{:+.3}i at {corr_sig:.1} SE, null {null_sig:.2} SE, E[ZZ'] max {pseudo_sig:.2} SE; \
             formula {:.3}{:+.3}i off {:.1}%, reference {:.3}{:+.3}i off {:.1}%; verdict: {supported}",
            corr.cross.mean.re,
            corr.cross.mean.im,
            formula.re,
            formula.im,
            100.0 * rf,
            AC7_REFERENCE_CROSS.re,
            AC7_REFERENCE_CROSS.im,
            100.0 * rp
        ),
    )
}

fn ks_exponential(samples: &mut [f64], mean: f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = 1.0 - (-x / mean).exp();
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

fn ac8() -> Verdict {
    let t2 = AC8_THETA.norm_sqr();
    let mean = t2 * AC8_B * AC8_B / (t2 - AC8_B * AC8_B);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in 1..=3usize {
        let spec = JordanSpec::single(AC8_THETA, &[(p, 1)]).expect("spec");
        let cov = covariance_matrix(&spec, &BasisSpec::identity(p), AC8_B).expect("covariance");
        let mut rng = SeededStream::new(SEED, 80 + p as u64).rng();
        let mut values = Vec::with_capacity(AC8_DRAWS);
        let mut worst_polygon: f64 = 0.0;
        for _ in 0..AC8_DRAWS {
            let con = sample_constellation(&cov, &mut rng).expect("constellation");
            let class = &con.groups[0].classes[0];
            values.push(class.points[0].powu(p as u32).norm_sqr());
            let stats = polygon_stats(&class.points, p, 1).expect("polygon");
            worst_polygon = worst_polygon
                .max(stats.radial_spread)
                .max(stats.angular_deviation)
                .max(stats.pth_power_spread);
        }
        let ks = ks_exponential(&mut values, mean);
        pass &= ks <= AC8_MAX_KS && worst_polygon <= AC8_POLYGON_TOL;
        parts.push(format!("p = {p}: KS {ks:.4}, polygon {worst_polygon:.1e}"));
    }
    verdict(
        pass,
        format!("{} (limits {AC8_MAX_KS}, {AC8_POLYGON_TOL:e})", parts.join(", ")),
    )
}

fn ac9() -> Verdict {
    let mut rng = SeededStream::new(SEED, 9).rng();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..AC9_INSTANCES {
        let n = rng.random_range(2..=AC9_MAX_N);
        let r = rng.random_range(1..=AC9_MAX_R.min(n));
        let a = sample_ginibre(n, &mut rng);
        let scale = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let b = CMatrix::from_row_major(n, r, complex_gaussian_vec(&mut rng, n * r))
            .unwrap()
            .scale(scale);
        let c = CMatrix::from_row_major(r, n, complex_gaussian_vec(&mut rng, n * r)).unwrap();
        let z = Complex64::from_polar(rng.random_range(1.5..3.0), rng.random_range(0.0..std::f64::consts::TAU));
        let shifted = &CMatrix::identity(n).scale(z) - &a;
        let full = &shifted - &(&b * &c);
        let (Ok(f), Ok(num), Ok(den)) = (
            characteristic_ratio(z, &a, &b, &c),
            full.determinant(),
            shifted.determinant(),
        ) else {
            errors += 1;
            continue;
        };
        let brute = num / den;
        worst = worst.max((f - brute).norm() / brute.norm().max(f64::MIN_POSITIVE));
    }
    verdict(
        errors == 0 && worst <= AC9_REL_TOL,
        format!("{AC9_INSTANCES} instances, worst relative error {worst:.2e} (limit {AC9_REL_TOL:e}), {errors} errors"),
    )
}

fn extended_table(exec: &Parallel) -> String {
    let mut parts = Vec::new();
    for kappa in [0.0, FRAC_1_SQRT_2] {
        let stats =
            table1_config(kappa, EXTENDED_N, EXTENDED_TRIALS, SEED).and_then(|cfg| run_experiment_with(&cfg, exec));
        match stats {
            Ok(s) => {
                let (d1, d2, _) = two_spike_limits(kappa);
                parts.push(format!(
                    "κ = {kappa:.4}: E|Z|² {:.3} (limit {d1:.3}), E|Z'|² {:.3} (limit {d2:.3}), cross {:.3}{:+.3}i",
                    s.groups[0].second_moment.mean,
                    s.groups[1].second_moment.mean,
                    s.pairs[0].cross.mean.re,
                    s.pairs[0].cross.mean.im
                ));
            }
            Err(e) => parts.push(format!("κ = {kappa:.4}: failed: {e}")),
        }
    }
    parts.join("; ")
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: &str| filters.is_empty() || filters.iter().any(|f| f.eq_ignore_ascii_case(id));
    let exec = Parallel::new(resolve_jobs(None).expect("RING_JOBS")).expect("thread pool");

    let mut results: Vec<(&str, &str, Verdict)> = Vec::new();
    let mut record = |id: &'static str, title: &'static str, v: Verdict| {
        println!("{id} {} {title}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((id, title, v));
    };

    type Timed = (&'static str, &'static str, Duration, fn(&Parallel) -> Verdict);
    let timed: [Timed; 5] = [
        ("AC1", "Weingarten Gram relation", AC1_BUDGET, |_| ac1()),
        ("AC2", "four-trace closed form vs expansion", AC2_BUDGET, |_| ac2()),
        ("AC3", "Haar moment battery", AC3_BUDGET, |_| ac3()),
        ("AC4", "outer outliers and inner hole", AC4_BUDGET, ac4),
        ("AC5", "rate exponents", AC5_BUDGET, ac5),
    ];
    for (id, title, budget, f) in timed {
        if !wanted(id) {
            continue;
        }
        let t = Instant::now();
        let v = f(&exec);
        record(id, title, within_budget(v, t.elapsed(), budget));
    }

    if wanted("AC6") || wanted("AC7") {
        let runs = table1_runs(&exec);
        if wanted("AC6") {
            record("AC6", "two-spike variances", ac6(&runs));
        }
        if wanted("AC7") {
            record("AC7", "two-spike correlation", ac7(&runs));
        }
    }
    if wanted("AC8") {
        record("AC8", "limit-law sampler", ac8());
    }
    if wanted("AC9") {
        let t = Instant::now();
        let v = ac9();
        record("AC9", "characteristic ratio", within_budget(v, t.elapsed(), AC9_BUDGET));
    }
    if std::env::var_os("RINGSPIKE_EXTENDED").is_some() {
        println!("EXT  info full-size two-spike table: {}", extended_table(&exec));
    }

    let failed: Vec<&str> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} passed, {} failed",
        results.len() - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
