//! End-to-end verification suite.
//!
//! Eleven numbered criteria exercise the library against its frozen
//! target numbers, each returning granular check outcomes plus wall
//! time; criteria with a stated runtime budget also check it.  The
//! `acceptance` test binary prints one pass/fail line per criterion
//! and exits nonzero if any fails.

use crate::geodesic::{
    arc_velocity, arrival_time, geodesic_integrate, metric_speed, min_time_n2,
    optimal_schedule_n2, phi_of_theta, solve_theta0, theta_of_t, Branch, PolarPoint,
};
use crate::grover::{
    continuous_exact_time, discrete_exact_time, fg_comparison, optimal_continuous_controls,
    problem_continuous, x_from_rho,
};
use crate::interrogation::{
    discrete_achievable_pwin, evolve_reduced, final_state, lower_bound_envelope,
    min_time_lower_bound, pwin_interrogation, stationary_controls_n1, tail_amplitude,
    target_vector, van_dam_query_count, verify_reduced_against_full, ObjectiveKind, Schedule,
    Segment, SphereState,
};
use crate::oracle::{evolve_continuous, min_distinguish_time, DistinguishOutcome};
use crate::search::{min_time_upper_bound, optimize_controls, SearchConfig};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

/// Step size the criteria are calibrated at where one is stated.
pub const DEFAULT_DT: f64 = 1e-4;

/// What a measured value was compared against.
#[derive(Debug, Clone, Copy)]
pub enum Bound {
    Close { target: f64, tol: f64 },
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
    /// Boolean condition; `value` is 1 or 0.
    Flag,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn detail(&self) -> String {
        match self.bound {
            Bound::Close { target, tol } => {
                format!("value {:.12e}, target {target:.12e} +- {tol:.1e}", self.value)
            }
            Bound::AtMost(hi) => format!("value {:.12e}, needs <= {hi:.6e}", self.value),
            Bound::AtLeast(lo) => format!("value {:.12e}, needs >= {lo:.6e}", self.value),
            Bound::Within(lo, hi) => {
                format!("value {:.12e}, range [{lo:.6e}, {hi:.6e}]", self.value)
            }
            Bound::Flag => format!("flag {}", self.pass),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

fn close(name: &str, value: f64, target: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        pass: (value - target).abs() <= tol,
        value,
        bound: Bound::Close { target, tol },
    }
}

fn within(name: &str, value: f64, lo: f64, hi: f64) -> Check {
    Check {
        name: name.into(),
        pass: value >= lo && value <= hi,
        value,
        bound: Bound::Within(lo, hi),
    }
}

fn at_least(name: &str, value: f64, lo: f64) -> Check {
    Check {
        name: name.into(),
        pass: value >= lo,
        value,
        bound: Bound::AtLeast(lo),
    }
}

fn at_most(name: &str, value: f64, hi: f64) -> Check {
    Check {
        name: name.into(),
        pass: value <= hi,
        value,
        bound: Bound::AtMost(hi),
    }
}

fn flag(name: &str, pass: bool) -> Check {
    Check {
        name: name.into(),
        pass,
        value: if pass { 1.0 } else { 0.0 },
        bound: Bound::Flag,
    }
}

fn c01_geodesic_optimum() -> Result<Vec<Check>> {
    let c0 = solve_theta0()?;
    let t = min_time_n2()?;
    Ok(vec![
        close("apex parameter cos(theta0)", c0, 0.7477, 5e-4),
        close("minimal two-bit time", t, 0.9052, 5e-4),
    ])
}

fn c02_grover_continuous(dt: f64) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4, 10, 100, 1_000_000] {
        let nf = n as f64;
        let independent = (1.0 / PI) * (nf / (nf - 1.0).sqrt()) * (1.0 / nf.sqrt()).acos();
        worst = worst.max((continuous_exact_time(n) - independent).abs());
    }
    let problem = problem_continuous(4);
    let controls = optimal_continuous_controls(4, dt)?;
    let states = evolve_continuous(&problem, &controls, dt)?;
    let x = x_from_rho(&states.last().expect("nonempty trajectory").rho);
    Ok(vec![
        at_most("closed form vs independent evaluation", worst, 1e-12),
        close("trotter overlap x at the exact time, N = 4", x, 0.25, 1e-5),
    ])
}

fn c03_farhi_gutmann_gap() -> Result<Vec<Check>> {
    let two = fg_comparison(2);
    let mut checks = vec![close(
        "N = 2 ratio t_fg / t_optimal",
        two.t_fg / two.t_optimal,
        std::f64::consts::SQRT_2,
        1e-9,
    )];
    for (n, rel) in [(100usize, 0.10), (10_000, 0.01), (1_000_000, 0.001)] {
        let fg = fg_comparison(n);
        let target = 1.0 / PI;
        checks.push(close(
            &format!("gap at N = {n} vs 1/pi (rel {rel})"),
            fg.gap,
            target,
            rel * target,
        ));
    }
    Ok(checks)
}

fn c04_discrete_grover() -> Result<Vec<Check>> {
    let unit = discrete_exact_time(4, 1.0);
    let slow = discrete_exact_time(1_000_000, 1.0);
    let fast = discrete_exact_time(1_000_000, 0.25);
    let ratio = fast.time / slow.time;
    let target = 0.25 / (PI * 0.25 / 2.0).sin();
    Ok(vec![
        close(
            "full-strength query count at N = 4",
            unit.queries as f64,
            1.0,
            0.0,
        ),
        close(
            "delta = 1/4 time ratio vs delta/sin(pi delta/2)",
            ratio,
            target,
            0.01 * target,
        ),
    ])
}

fn c05_interrogation_n1() -> Result<Vec<Check>> {
    let schedule = stationary_controls_n1();
    let traj = evolve_reduced(&SphereState::initial(1), &schedule, 1e-3)?;
    let end = traj.last().expect("nonempty trajectory");
    let target = target_vector(1);
    let dev = end
        .a
        .iter()
        .zip(target.a.iter())
        .map(|(x, f)| (x.abs() - f).abs())
        .fold(0.0f64, f64::max);
    Ok(vec![
        close("final time", end.t, 0.5, 1e-12),
        at_most("amplitude deviation from the target vector", dev, 1e-9),
        at_least("pwin", pwin_interrogation(end), 1.0 - 1e-10),
    ])
}

fn c06_discrete_interrogation_xor() -> Result<Vec<Check>> {
    let mut worst_full = 1.0f64;
    let mut xor_exact = true;
    let mut xor_before = true;
    for n in 1..=10usize {
        worst_full = worst_full.min(discrete_achievable_pwin(n, n, ObjectiveKind::Interrogation));
        let q = n.div_ceil(2);
        xor_exact &= discrete_achievable_pwin(n, q, ObjectiveKind::Xor) == 1.0;
        xor_before &= discrete_achievable_pwin(n, q - 1, ObjectiveKind::Xor) == 0.5;
    }
    let queries = van_dam_query_count(256, 0.95);
    Ok(vec![
        at_least("interrogation exact at T = n for n in 1..=10", worst_full, 1.0),
        flag("xor exact at T = ceil(n/2)", xor_exact),
        flag("xor coin flip below ceil(n/2)", xor_before),
        within("van dam query count at n = 256", queries as f64, 128.0, 176.0),
    ])
}

fn c07_lower_bound_consistency() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut worst_excess = f64::NEG_INFINITY;
    for n in [2usize, 3, 5] {
        for _ in 0..100 {
            let segments: Vec<Segment> = (0..8)
                .map(|_| {
                    let duration = rng.random_range(0.05..0.30);
                    let mut b = vec![0.0; n + 1];
                    let mut c = vec![0.0; n + 1];
                    for j in 0..=n {
                        let psi = rng.random_range(0.0..TAU);
                        let r = rng.random_range(0.0f64..1.0).sqrt();
                        b[j] = r * psi.cos();
                        c[j] = r * psi.sin();
                    }
                    Segment { duration, b, c }
                })
                .collect();
            let schedule = Schedule::new(segments);
            let dt = schedule.total_duration() / 40.0;
            for s in evolve_reduced(&SphereState::initial(n), &schedule, dt)? {
                for j in 0..=n {
                    let excess = tail_amplitude(&s, j) - lower_bound_envelope(n, s.t, j);
                    worst_excess = worst_excess.max(excess);
                }
            }
        }
    }
    let scaled = min_time_lower_bound(100, 2.0 / 3.0).time / 100.0;
    Ok(vec![
        at_most(
            "worst tail excess over the growth envelope (300 random schedules)",
            worst_excess,
            1e-9,
        ),
        within("min_time_lower_bound(100, 2/3) / 100", scaled, 0.105, 0.125),
    ])
}

fn c08_reduced_vs_full(dt: f64) -> Result<Vec<Check>> {
    let dev1 = verify_reduced_against_full(1, &stationary_controls_n1(), dt)?;
    let schedule2 = optimal_schedule_n2(200)?;
    let dev2 = verify_reduced_against_full(2, &schedule2, dt)?;
    let end = final_state(&SphereState::initial(2), &schedule2)?;
    Ok(vec![
        at_most("n = 1 reduced-vs-full deviation", dev1, 5e-4),
        at_most("n = 2 reduced-vs-full deviation", dev2, 5e-4),
        at_least("n = 2 pipeline pwin", pwin_interrogation(&end), 1.0 - 1e-3),
    ])
}

fn c09_distinguishability() -> Result<Vec<Check>> {
    let d0 = [0.0, 0.0, 0.0];
    let full = match min_distinguish_time(&d0, &[0.0, PI, PI])? {
        DistinguishOutcome::ReachedAt(t) => t,
        DistinguishOutcome::NotReachable { .. } => f64::NAN,
    };
    let half = match min_distinguish_time(&d0, &[0.0, PI, -PI])? {
        DistinguishOutcome::ReachedAt(t) => t,
        DistinguishOutcome::NotReachable { .. } => f64::NAN,
    };
    Ok(vec![
        close("one-sided pair distinguish time", full, 1.0, 1e-6),
        close("two-sided pair distinguish time", half, 0.5, 1e-6),
    ])
}

fn c10_optimizer_rediscovery() -> Result<Vec<Check>> {
    let cfg = SearchConfig {
        n_bits: 2,
        segments: 200,
        horizon: 0.9052,
        objective: ObjectiveKind::Interrogation,
        restarts: 20,
        seed: 7,
        tolerance: 1e-4,
    };
    let res = optimize_controls(&cfg)?;
    let template = SearchConfig {
        restarts: 4,
        horizon: 1.0,
        ..cfg.clone()
    };
    let ub = min_time_upper_bound(2, 0.999, &template)?;
    Ok(vec![
        at_least("pwin at the geodesic horizon (200 segments)", res.best_pwin, 0.99),
        at_most("min-time upper bound for pwin 0.999", ub.time, 0.92),
        at_least("upper bound above the 2/pi lower bound", ub.time, 2.0 / PI),
    ])
}

fn c11_integrator_fidelity() -> Result<Vec<Check>> {
    let c0 = solve_theta0()?;
    let theta0 = c0.acos();
    let eps = 1e-6;
    let theta_start = FRAC_PI_2 - eps;
    let t_off = (2.0 * c0 / PI) * (eps.sin() / c0).asin();
    let (v_theta, v_phi) = arc_velocity(t_off, theta0);
    let t_end = arrival_time(c0) - t_off;
    let start = PolarPoint::new(theta_start, 0.0)?;
    let traj = geodesic_integrate(&start, v_theta, v_phi, t_end, 1e-5)?;
    let phi_off = phi_of_theta(theta_start, theta0, Branch::Ascending)?;
    let clairaut0 = traj.samples[0].theta.tan().powi(2) * traj.samples[0].v_phi;
    let mut dev = 0.0f64;
    let mut speed_drift = 0.0f64;
    let mut clairaut_drift = 0.0f64;
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
        speed_drift = speed_drift.max((metric_speed(&p, s.v_theta, s.v_phi)? - 1.0).abs());
        clairaut_drift =
            clairaut_drift.max((s.theta.tan().powi(2) * s.v_phi - clairaut0).abs());
    }
    let covered = !traj.hit_boundary
        && (traj.samples.last().expect("samples").t - t_end).abs() < 1e-12;
    Ok(vec![
        flag("integrator covers the whole arc", covered),
        at_most("max closed-form deviation", dev, 1e-8),
        at_most("unit-speed drift", speed_drift, 1e-8),
        at_most("clairaut constant drift", clairaut_drift, 1e-8),
    ])
}

fn body(id: usize, dt: f64) -> Result<Vec<Check>> {
    match id {
        1 => c01_geodesic_optimum(),
        2 => c02_grover_continuous(dt),
        3 => c03_farhi_gutmann_gap(),
        4 => c04_discrete_grover(),
        5 => c05_interrogation_n1(),
        6 => c06_discrete_interrogation_xor(),
        7 => c07_lower_bound_consistency(),
        8 => c08_reduced_vs_full(dt),
        9 => c09_distinguishability(),
        10 => c10_optimizer_rediscovery(),
        11 => c11_integrator_fidelity(),
        _ => Err(crate::Error::Validation(format!(
            "criterion id {id} outside 1..=11"
        ))),
    }
}

fn meta(id: usize) -> (&'static str, Option<f64>) {
    match id {
        1 => ("geodesic optimum", Some(1.0)),
        2 => ("grover continuous closed form", Some(10.0)),
        3 => ("farhi-gutmann gap", None),
        4 => ("discrete grover", None),
        5 => ("interrogation n = 1 optimum", None),
        6 => ("discrete interrogation and xor", None),
        7 => ("lower-bound consistency", Some(60.0)),
        8 => ("reduced-vs-full equivalence", Some(120.0)),
        9 => ("distinguishability anomaly", None),
        10 => ("optimizer rediscovery", Some(600.0)),
        11 => ("geodesic integrator fidelity", None),
        _ => ("unknown", None),
    }
}

/// Runs one numbered criterion at a custom step size (criteria 2 and 8
/// are calibrated at [`DEFAULT_DT`]), appending a runtime check when
/// the criterion carries a budget.
pub fn run_one_with_dt(id: usize, dt: f64) -> CriterionResult {
    let (name, cap) = meta(id);
    let start = Instant::now();
    let mut checks = match body(id, dt) {
        Ok(checks) => checks,
        Err(e) => vec![flag(&format!("criterion execution: {e}"), false)],
    };
    let seconds = start.elapsed().as_secs_f64();
    if let Some(limit) = cap {
        checks.push(at_most(&format!("runtime < {limit} s"), seconds, limit));
    }
    CriterionResult {
        id,
        name,
        pass: checks.iter().all(|c| c.pass),
        seconds,
        checks,
    }
}

pub fn run_one(id: usize) -> CriterionResult {
    run_one_with_dt(id, DEFAULT_DT)
}

/// Runs all eleven criteria in order.
pub fn run_all_with_dt(dt: f64) -> Vec<CriterionResult> {
    (1..=11).map(|id| run_one_with_dt(id, dt)).collect()
}

pub fn run_all() -> Vec<CriterionResult> {
    run_all_with_dt(DEFAULT_DT)
}
