//! Command-line experiment runner.
//!
//! Every subcommand computes named scalars and curves, checks the ones
//! with a frozen expectation, and writes a JSON report plus an optional
//! CSV projection of the curves.  Reports for the same flags and seed
//! are byte-identical except for the timestamp.  Exit status: 0 when
//! all embedded checks pass, 1 when a check fails or a computation
//! errors, 2 for usage errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamoracle_core::acceptance::{self, Bound, CriterionResult};
use hamoracle_core::geodesic::{
    arc_velocity, arrival_time, geodesic_integrate, metric_speed, optimal_schedule_n2,
    optimal_trace, phi_of_theta, solve_theta0, theta_of_t, Branch, PolarPoint, TraceRow,
};
use hamoracle_core::grover::{
    beta_magnitude, continuous_exact_time, continuous_x, discrete_exact_time,
    discrete_trajectory, fg_comparison, optimal_continuous_controls, problem_continuous,
    pwin_from_x, x_from_rho,
};
use hamoracle_core::interrogation::{
    discrete_achievable_pwin, evolve_reduced, final_state, lower_bound_envelope,
    min_time_lower_bound, pwin_interrogation, pwin_upper_envelope, pwin_xor,
    sequential_schedule, stationary_controls_n1, tail_amplitude, van_dam_query_count,
    ObjectiveKind, SphereState,
};
use hamoracle_core::oracle::{evolve_continuous, min_distinguish_time, DistinguishOutcome};
use hamoracle_core::search::{optimize_controls, SearchConfig};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

const SPLITTING: &str = "strang (symmetric second-order)";

#[derive(Parser)]
#[command(
    name = "hamoracle",
    version,
    about = "Query dynamics under Hamiltonian oracles: reports, schedules, verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Discrete,
    Continuous,
}

#[derive(Args)]
struct OutArgs {
    /// Report path; defaults to <subcommand>.json under HAMORACLE_OUT_DIR
    /// (or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV projection of the curves next to the report.
    #[arg(long, default_value_t = false)]
    csv: bool,
    /// Randomized-search seed; recorded in report metadata.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form optimal one-item search schedules.
    Grover {
        /// Search-space size N (at least 2).
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Per-query phase fraction in (0, 1]; discrete mode only.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Splitting step for the unitary cross-check (runs for N <= 32).
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Query model.
        #[arg(long, value_enum, default_value_t = Mode::Continuous)]
        mode: Mode,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bit-string interrogation: sequential baseline, bounds, tables.
    Interrogation {
        /// Number of hidden bits.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Reduced-integrator step; continuous mode only.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Query model.
        #[arg(long, value_enum, default_value_t = Mode::Continuous)]
        mode: Mode,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The exact two-bit optimum as a geodesic on a stretched sphere.
    Geodesic {
        /// Stop after the closed-form solve (skip integrator checks).
        #[arg(long, default_value_t = false)]
        solve: bool,
        /// Geodesic-integrator step for the fidelity check.
        #[arg(long, default_value_t = 1e-5)]
        dt: f64,
        /// Staircase resolution for the control schedule and CSV trace.
        #[arg(long, default_value_t = 200)]
        segments: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Derivative-free rediscovery of optimal interrogation schedules.
    Search {
        /// Number of hidden bits.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Piecewise-constant segments in the control schedule.
        #[arg(long, default_value_t = 100)]
        segments: usize,
        /// Independent optimizer starts.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Minimum distinguishing times for the canonical phase-vector pairs.
    Distinguish {
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the full verification suite, one line per criterion.
    #[command(name = "verify-all")]
    VerifyAll {
        /// Step size for the step-calibrated criteria.
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<hamoracle_core::Error> for Failure {
    fn from(e: hamoracle_core::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Rounds to 12 significant digits so reports are stable across
/// platforms and re-runs.
fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        x
    } else {
        format!("{x:.11e}").parse().expect("rounded float")
    }
}

struct Report {
    name: &'static str,
    seed: u64,
    scalars: BTreeMap<String, f64>,
    curves: BTreeMap<String, Vec<(f64, f64)>>,
    tolerances: BTreeMap<String, f64>,
    failures: Vec<String>,
    checks: usize,
}

impl Report {
    fn new(name: &'static str, seed: u64) -> Self {
        Report {
            name,
            seed,
            scalars: BTreeMap::new(),
            curves: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            failures: Vec::new(),
            checks: 0,
        }
    }

    fn scalar(&mut self, key: &str, value: f64) {
        self.scalars.insert(key.to_string(), round12(value));
    }

    fn record(&mut self, key: &str, value: f64, pass: bool) {
        self.scalar(key, value);
        self.scalars
            .insert(format!("{key}_pass"), if pass { 1.0 } else { 0.0 });
        self.checks += 1;
        if !pass {
            self.failures.push(key.to_string());
        }
    }

    fn check_close(&mut self, key: &str, value: f64, target: f64, tol: f64) {
        self.scalars.insert(format!("{key}_target"), round12(target));
        self.tolerances.insert(key.to_string(), round12(tol));
        self.record(key, value, (value - target).abs() <= tol);
    }

    fn check_at_most(&mut self, key: &str, value: f64, hi: f64) {
        self.tolerances.insert(format!("{key}_max"), round12(hi));
        self.record(key, value, value <= hi);
    }

    fn check_at_least(&mut self, key: &str, value: f64, lo: f64) {
        self.tolerances.insert(format!("{key}_min"), round12(lo));
        self.record(key, value, value >= lo);
    }

    fn check_within(&mut self, key: &str, value: f64, lo: f64, hi: f64) {
        self.tolerances.insert(format!("{key}_min"), round12(lo));
        self.tolerances.insert(format!("{key}_max"), round12(hi));
        self.record(key, value, value >= lo && value <= hi);
    }

    fn check_flag(&mut self, key: &str, pass: bool) {
        self.scalars
            .insert(format!("{key}_pass"), if pass { 1.0 } else { 0.0 });
        self.checks += 1;
        if !pass {
            self.failures.push(key.to_string());
        }
    }

    /// Curves are capped at ~1000 points; the report is a summary, not
    /// a raw trajectory dump.
    fn curve(&mut self, key: &str, pts: Vec<(f64, f64)>) {
        let cap = 1001usize;
        let pts = if pts.len() > cap {
            let stride = pts.len().div_ceil(cap);
            let mut thin: Vec<(f64, f64)> = pts.iter().copied().step_by(stride).collect();
            let last = *pts.last().expect("nonempty curve");
            if thin.last() != Some(&last) {
                thin.push(last);
            }
            thin
        } else {
            pts
        };
        self.curves.insert(
            key.to_string(),
            pts.into_iter()
                .map(|(x, y)| (round12(x), round12(y)))
                .collect(),
        );
    }

    fn add_acceptance(&mut self, results: &[CriterionResult]) {
        for r in results {
            self.scalar(&format!("c{:02}_seconds", r.id), r.seconds);
            self.check_flag(&format!("c{:02}", r.id), r.pass);
            for c in &r.checks {
                let key = format!("c{:02}_{}", r.id, slug(&c.name));
                match c.bound {
                    Bound::Close { target, tol } => self.check_close(&key, c.value, target, tol),
                    Bound::AtMost(hi) => self.check_at_most(&key, c.value, hi),
                    Bound::AtLeast(lo) => self.check_at_least(&key, c.value, lo),
                    Bound::Within(lo, hi) => self.check_within(&key, c.value, lo, hi),
                    Bound::Flag => self.check_flag(&key, c.pass),
                }
            }
        }
    }
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    let mut gap = false;
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            if gap && !out.is_empty() {
                out.push('_');
            }
            out.push(ch.to_ascii_lowercase());
            gap = false;
        } else {
            gap = true;
        }
    }
    out
}

#[derive(Serialize)]
struct Metadata<'a> {
    seed: u64,
    tolerances: &'a BTreeMap<String, f64>,
    timestamp_unix: u64,
    splitting: &'static str,
    versions: BTreeMap<&'static str, &'static str>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    name: &'a str,
    scalars: &'a BTreeMap<String, f64>,
    curves: &'a BTreeMap<String, Vec<(f64, f64)>>,
    metadata: Metadata<'a>,
}

fn render_json(rep: &Report) -> Result<String, Failure> {
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let doc = ReportDoc {
        name: rep.name,
        scalars: &rep.scalars,
        curves: &rep.curves,
        metadata: Metadata {
            seed: rep.seed,
            tolerances: &rep.tolerances,
            timestamp_unix,
            splitting: SPLITTING,
            versions: BTreeMap::from([
                ("hamoracle", env!("CARGO_PKG_VERSION")),
                ("hamoracle-core", hamoracle_core::VERSION),
            ]),
        },
    };
    serde_json::to_string_pretty(&doc)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Run(format!("report serialization: {e}")))
}

fn curves_csv(curves: &BTreeMap<String, Vec<(f64, f64)>>) -> String {
    use std::fmt::Write;
    let mut s = String::from("curve,x,y\n");
    for (name, pts) in curves {
        for (x, y) in pts {
            let _ = writeln!(s, "{name},{x},{y}");
        }
    }
    s
}

fn geodesic_csv(rows: &[TraceRow]) -> String {
    use std::fmt::Write;
    let mut s = String::from("t,theta,phi,a0,a1,a2\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            round12(r.t),
            round12(r.theta),
            round12(r.phi),
            round12(r.a0),
            round12(r.a1),
            round12(r.a2)
        );
    }
    s
}

fn resolve_out(out: &OutArgs, name: &str) -> PathBuf {
    if let Some(p) = &out.out {
        return p.clone();
    }
    let dir = std::env::var_os("HAMORACLE_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("{name}.json"))
}

/// Write via a temp file in the same directory plus rename, so a
/// report path never holds a half-written file.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file_name = path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("report");
    let tmp = path.with_file_name(format!(".{file_name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn finish(
    rep: &Report,
    out: &OutArgs,
    special_csv: Option<String>,
    side_schedule: Option<String>,
) -> Result<bool, Failure> {
    let path = resolve_out(out, rep.name);
    let json = render_json(rep)?;
    let io = |e: std::io::Error| Failure::Run(format!("write {}: {e}", path.display()));
    write_atomic(&path, json.as_bytes()).map_err(io)?;
    println!("report: {}", path.display());
    if out.csv {
        let csv_path = path.with_extension("csv");
        let body = special_csv.unwrap_or_else(|| curves_csv(&rep.curves));
        write_atomic(&csv_path, body.as_bytes())
            .map_err(|e| Failure::Run(format!("write {}: {e}", csv_path.display())))?;
        println!("csv: {}", csv_path.display());
    }
    if let Some(text) = side_schedule {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("search");
        let spath = path.with_file_name(format!("{stem}_schedule.json"));
        write_atomic(&spath, text.as_bytes())
            .map_err(|e| Failure::Run(format!("write {}: {e}", spath.display())))?;
        println!("schedule: {}", spath.display());
    }
    if rep.failures.is_empty() {
        println!("{}: {} checks passed", rep.name, rep.checks);
        Ok(true)
    } else {
        for key in &rep.failures {
            eprintln!("FAIL {key}");
        }
        eprintln!(
            "{}: {} of {} checks failed; first failing scalar: {}",
            rep.name,
            rep.failures.len(),
            rep.checks,
            rep.failures[0]
        );
        Ok(false)
    }
}

fn run_grover(n: usize, delta: f64, dt: f64, mode: Mode, seed: u64) -> Result<Report, Failure> {
    if n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(usage("--dt must lie in (0, 0.1]"));
    }
    let mut rep = Report::new("grover", seed);
    let nf = n as f64;
    rep.scalar("N", nf);
    match mode {
        Mode::Continuous => {
            let fg = fg_comparison(n);
            rep.scalar("T", fg.t_optimal);
            rep.scalar("T_fg", fg.t_fg);
            rep.scalar("gap", fg.gap);
            rep.scalar("ratio_fg", fg.t_fg / fg.t_optimal);
            let xt = continuous_x(fg.t_optimal, n).x;
            rep.check_close("x_at_T", xt, 1.0 / nf, 1e-12);
            rep.check_close("pwin_at_T", pwin_from_x(xt, n)?, 1.0, 1e-12);
            if n <= 32 {
                let problem = problem_continuous(n);
                let controls = optimal_continuous_controls(n, dt)?;
                let states = evolve_continuous(&problem, &controls, dt)?;
                let x_tr = x_from_rho(&states.last().expect("trajectory").rho);
                rep.check_close("x_trotter", x_tr, 1.0 / nf, (500.0 * dt * dt).max(1e-5));
            }
            let grid = 200usize;
            let mut xs = Vec::with_capacity(grid + 1);
            let mut pw = Vec::with_capacity(grid + 1);
            for i in 0..=grid {
                let t = fg.t_optimal * i as f64 / grid as f64;
                let x = continuous_x(t, n).x;
                xs.push((t, x));
                pw.push((t, pwin_from_x(x, n)?));
            }
            rep.curve("x_of_t", xs);
            rep.curve("pwin_of_t", pw);
            println!(
                "T = {}, T_fg = {}, gap = {}",
                round12(fg.t_optimal),
                round12(fg.t_fg),
                round12(fg.gap)
            );
        }
        Mode::Discrete => {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(usage("--delta must lie in (0, 1]"));
            }
            let d = discrete_exact_time(n, delta);
            rep.scalar("delta", delta);
            rep.scalar("T", d.time);
            rep.scalar("queries", d.queries as f64);
            rep.scalar("beta", beta_magnitude(n, delta));
            rep.scalar("T_continuous", continuous_exact_time(n));
            let traj = discrete_trajectory(n, delta)?;
            let last = *traj.last().expect("at least one query");
            rep.check_close("x_final", last, 1.0 / nf, 1e-12);
            rep.check_close("pwin_final", pwin_from_x(last, n)?, 1.0, 1e-12);
            if n >= 1000 && delta < 1.0 {
                // Time penalty for weak queries approaches
                // delta / sin(pi delta / 2) from the query-count ceiling.
                let ratio = d.time / discrete_exact_time(n, 1.0).time;
                let target = delta / (PI * delta / 2.0).sin();
                rep.check_close("time_ratio_vs_asymptote", ratio, target, 0.01 * target);
            }
            let mut pts = Vec::with_capacity(traj.len() + 1);
            pts.push((0.0, 1.0));
            for (k, x) in traj.iter().enumerate() {
                pts.push(((k + 1) as f64, *x));
            }
            rep.curve("x_of_query", pts);
            println!(
                "T = {}, queries = {}",
                round12(d.time),
                d.queries
            );
        }
    }
    Ok(rep)
}

fn run_interrogation(n: usize, dt: f64, mode: Mode, seed: u64) -> Result<Report, Failure> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let mut rep = Report::new("interrogation", seed);
    rep.scalar("n", n as f64);
    let lb = min_time_lower_bound(n, 0.999);
    rep.scalar("lower_bound_time_p999", lb.time);
    rep.scalar("lower_bound_asymptotic", lb.asymptotic);
    rep.scalar("van_dam_queries_p95", van_dam_query_count(n, 0.95) as f64);
    match mode {
        Mode::Continuous => {
            if n > 16 {
                return Err(usage("--n above 16 is only supported with --mode discrete"));
            }
            if !(dt > 0.0 && dt <= 0.1) {
                return Err(usage("--dt must lie in (0, 0.1]"));
            }
            // Ladder demo: an admissible trajectory the bounds must
            // contain.  It is not a winning protocol (full transfer
            // parks all weight on the top rung, far from the binomial
            // target), so its final pwin is reported unchecked.
            let schedule = sequential_schedule(n, n as f64);
            let traj = evolve_reduced(&SphereState::initial(n), &schedule, dt)?;
            let end = traj.last().expect("trajectory");
            rep.scalar("T_ladder", end.t);
            rep.scalar("pwin_ladder_final", pwin_interrogation(end));
            let stride = (traj.len() / 500).max(1);
            let mut growth_excess = f64::NEG_INFINITY;
            let mut pwin_excess = f64::NEG_INFINITY;
            for s in traj.iter().step_by(stride) {
                for j in 0..=n {
                    growth_excess = growth_excess
                        .max(tail_amplitude(s, j) - lower_bound_envelope(n, s.t, j));
                }
                let cap = pwin_upper_envelope(s).capped;
                pwin_excess = pwin_excess
                    .max(pwin_interrogation(s) - cap)
                    .max(pwin_xor(s) - cap);
            }
            rep.check_at_most("envelope_excess", growth_excess, 1e-9);
            rep.check_at_most("pwin_bound_excess", pwin_excess, 1e-9);
            rep.curve(
                "ladder_pwin_of_t",
                traj.iter().map(|s| (s.t, pwin_interrogation(s))).collect(),
            );
            rep.curve(
                "ladder_xor_pwin_of_t",
                traj.iter().map(|s| (s.t, pwin_xor(s))).collect(),
            );
            // Exact protocols known in closed form.
            match n {
                1 => {
                    let exact = final_state(&SphereState::initial(1), &stationary_controls_n1())?;
                    rep.scalar("T_exact", 0.5);
                    rep.check_at_least("pwin_exact", pwin_interrogation(&exact), 1.0 - 1e-9);
                }
                2 => {
                    let staircase = optimal_schedule_n2(200)?;
                    rep.scalar("T_exact", staircase.total_duration());
                    let exact = final_state(&SphereState::initial(2), &staircase)?;
                    rep.check_at_least("pwin_exact", pwin_interrogation(&exact), 1.0 - 1e-3);
                }
                _ => {}
            }
            println!(
                "ladder demo pwin = {} at T = {}; bounds respected",
                round12(pwin_interrogation(end)),
                round12(end.t)
            );
        }
        Mode::Discrete => {
            if n > 4096 {
                return Err(usage("--n above 4096 is not supported"));
            }
            let q_xor = n.div_ceil(2);
            rep.scalar("queries_full", n as f64);
            rep.scalar("queries_xor", q_xor as f64);
            rep.check_close(
                "pwin_at_n_queries",
                discrete_achievable_pwin(n, n, ObjectiveKind::Interrogation),
                1.0,
                0.0,
            );
            rep.check_close(
                "xor_at_half_queries",
                discrete_achievable_pwin(n, q_xor, ObjectiveKind::Xor),
                1.0,
                0.0,
            );
            rep.check_close(
                "xor_below_half_queries",
                discrete_achievable_pwin(n, q_xor - 1, ObjectiveKind::Xor),
                0.5,
                0.0,
            );
            let table = |kind: ObjectiveKind| {
                (0..=n)
                    .map(|q| (q as f64, discrete_achievable_pwin(n, q, kind)))
                    .collect::<Vec<_>>()
            };
            rep.curve("achievable_interrogation", table(ObjectiveKind::Interrogation));
            rep.curve("achievable_xor", table(ObjectiveKind::Xor));
            println!(
                "exact readout at {} queries, xor at {}",
                n, q_xor
            );
        }
    }
    Ok(rep)
}

fn run_geodesic(
    solve_only: bool,
    dt: f64,
    segments: usize,
    want_csv: bool,
    seed: u64,
) -> Result<(Report, Option<String>), Failure> {
    if !(10..=100_000).contains(&segments) {
        return Err(usage("--segments must lie in 10..=100000"));
    }
    if !(1e-6..=1e-2).contains(&dt) {
        return Err(usage("--dt must lie in [1e-6, 1e-2]"));
    }
    let mut rep = Report::new("geodesic", seed);
    let c0 = solve_theta0()?;
    let t_min = arrival_time(c0);
    rep.check_close("cos_theta0", c0, 0.7477, 5e-4);
    rep.check_close("T", t_min, 0.9052, 5e-4);
    rep.scalar("theta0", c0.acos());
    let rows = optimal_trace(201)?;
    rep.curve("theta_of_t", rows.iter().map(|r| (r.t, r.theta)).collect());
    rep.curve("phi_of_t", rows.iter().map(|r| (r.t, r.phi)).collect());
    println!("cos_theta0 = {}, T = {}", round12(c0), round12(t_min));
    if !solve_only {
        // Integrate the inner arc (clipped off the coordinate poles)
        // and compare against the closed forms.
        let theta0 = c0.acos();
        let eps = 1e-6;
        let theta_start = FRAC_PI_2 - eps;
        let t_off = (2.0 * c0 / PI) * (eps.sin() / c0).asin();
        let (v_theta, v_phi) = arc_velocity(t_off, theta0);
        let t_end = arrival_time(c0) - t_off;
        let start = PolarPoint::new(theta_start, 0.0)?;
        let traj = geodesic_integrate(&start, v_theta, v_phi, t_end, dt)?;
        let phi_off = phi_of_theta(theta_start, theta0, Branch::Ascending)?;
        let mut dev = 0.0f64;
        let mut drift = 0.0f64;
        for s in &traj.samples {
            let t_arc = s.t + t_off;
            let theta_cf = theta_of_t(t_arc, theta0)?;
            let branch = if t_arc <= c0 {
                Branch::Ascending
            } else {
                Branch::Descending
            };
            let phi_cf = phi_of_theta(theta_cf, theta0, branch)? - phi_off;
            dev = dev.max((s.theta - theta_cf).abs()).max((s.phi - phi_cf).abs());
            let p = PolarPoint::new(s.theta, s.phi)?;
            drift = drift.max((metric_speed(&p, s.v_theta, s.v_phi)? - 1.0).abs());
        }
        let covered = !traj.hit_boundary
            && (traj.samples.last().expect("samples").t - t_end).abs() < 1e-12;
        rep.check_flag("integrator_covers_arc", covered);
        let tol = 1e-8 * ((dt / 1e-5).powi(4)).max(1.0);
        rep.check_at_most("integrator_deviation", dev, tol);
        rep.check_at_most("speed_drift", drift, tol);
        let schedule = optimal_schedule_n2(segments)?;
        let end = final_state(&SphereState::initial(2), &schedule)?;
        rep.check_at_least("pwin_schedule", pwin_interrogation(&end), 1.0 - 1e-3);
    }
    let csv = if want_csv {
        Some(geodesic_csv(&optimal_trace(segments + 1)?))
    } else {
        None
    };
    Ok((rep, csv))
}

/// Exact-readout horizons used when none is configurable: the one-bit
/// optimum, the two-bit geodesic time, and the asymptotic slope beyond.
fn default_horizon(n: usize) -> f64 {
    match n {
        1 => 0.5,
        2 => 0.9052,
        n => 0.4526 * n as f64,
    }
}

fn run_search(
    n: usize,
    segments: usize,
    restarts: usize,
    seed: u64,
) -> Result<(Report, Option<String>), Failure> {
    if !(1..=12).contains(&n) {
        return Err(usage("--n must lie in 1..=12"));
    }
    if !(1..=2000).contains(&segments) {
        return Err(usage("--segments must lie in 1..=2000"));
    }
    if !(1..=500).contains(&restarts) {
        return Err(usage("--restarts must lie in 1..=500"));
    }
    let horizon = default_horizon(n);
    let cfg = SearchConfig {
        n_bits: n,
        segments,
        horizon,
        objective: ObjectiveKind::Interrogation,
        restarts,
        seed,
        tolerance: 1e-4,
    };
    let res = optimize_controls(&cfg)?;
    let mut rep = Report::new("search", seed);
    rep.scalar("n", n as f64);
    rep.scalar("horizon", horizon);
    rep.scalar("segments", segments as f64);
    rep.scalar("restarts", restarts as f64);
    if n <= 2 {
        // Horizons for one and two bits are exact optima, so the
        // optimizer must come close; beyond that the horizon is an
        // asymptotic estimate and best_pwin is reported unchecked.
        rep.check_at_least("best_pwin", res.best_pwin, 0.99);
    } else {
        rep.scalar("best_pwin", res.best_pwin);
    }
    let lb = min_time_lower_bound(n, res.best_pwin);
    rep.scalar("lower_bound_for_best_pwin", lb.time);
    rep.check_at_least("horizon_minus_lower_bound", horizon - lb.time, -1e-9);
    rep.curve(
        "restart_history",
        res.history
            .iter()
            .enumerate()
            .map(|(i, v)| (i as f64, *v))
            .collect(),
    );
    println!(
        "best pwin = {} at horizon {} ({} segments, {} restarts)",
        round12(res.best_pwin),
        round12(horizon),
        segments,
        restarts
    );
    Ok((rep, Some(res.best_controls.to_json() + "\n")))
}

fn run_distinguish(seed: u64) -> Result<Report, Failure> {
    let mut rep = Report::new("distinguish", seed);
    let solve = |other: &[f64]| -> Result<f64, Failure> {
        Ok(match min_distinguish_time(&[0.0, 0.0, 0.0], other)? {
            DistinguishOutcome::ReachedAt(t) => t,
            // Sentinel keeps the report finite; the check then fails.
            DistinguishOutcome::NotReachable { .. } => -1.0,
        })
    };
    let t_one = solve(&[0.0, PI, PI])?;
    let t_two = solve(&[0.0, PI, -PI])?;
    rep.check_close("t_one_sided", t_one, 1.0, 1e-6);
    rep.check_close("t_two_sided", t_two, 0.5, 1e-6);
    println!(
        "one-sided pair: t = {}, two-sided pair: t = {}",
        round12(t_one),
        round12(t_two)
    );
    Ok(rep)
}

fn run_verify_all(dt: f64, seed: u64) -> Result<Report, Failure> {
    if !(dt > 0.0 && dt <= 1e-2) {
        return Err(usage("--dt must lie in (0, 0.01]"));
    }
    let results = acceptance::run_all_with_dt(dt);
    for r in &results {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:2} - {} ({:.2} s)", r.id, r.name, r.seconds);
        for c in r.checks.iter().filter(|c| !c.pass) {
            println!("     failed check: {} ({})", c.name, c.detail());
        }
    }
    let mut rep = Report::new("verify-all", seed);
    rep.add_acceptance(&results);
    Ok(rep)
}

fn dispatch(cli: Cli) -> Result<bool, Failure> {
    match cli.cmd {
        Cmd::Grover {
            n,
            delta,
            dt,
            mode,
            out,
        } => {
            let rep = run_grover(n, delta, dt, mode, out.seed)?;
            finish(&rep, &out, None, None)
        }
        Cmd::Interrogation { n, dt, mode, out } => {
            let rep = run_interrogation(n, dt, mode, out.seed)?;
            finish(&rep, &out, None, None)
        }
        Cmd::Geodesic {
            solve,
            dt,
            segments,
            out,
        } => {
            let (rep, csv) = run_geodesic(solve, dt, segments, out.csv, out.seed)?;
            finish(&rep, &out, csv, None)
        }
        Cmd::Search {
            n,
            segments,
            restarts,
            out,
        } => {
            let (rep, schedule) = run_search(n, segments, restarts, out.seed)?;
            finish(&rep, &out, None, schedule)
        }
        Cmd::Distinguish { out } => {
            let rep = run_distinguish(out.seed)?;
            finish(&rep, &out, None, None)
        }
        Cmd::VerifyAll { dt, out } => {
            let rep = run_verify_all(dt, out.seed)?;
            finish(&rep, &out, None, None)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
