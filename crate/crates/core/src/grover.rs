//! Optimal time-energy tradeoffs for the single-marked-item search
//! oracle, in both continuous and discrete query models.
//!
//! The reduced description of any search protocol is one number
//! `x = <u| rho |u>`, the overlap of the hidden-index register with the
//! uniform vector.  Protocols drive `x` from 1 down to `1/N`, where the
//! final measurement succeeds with certainty.  This module provides the
//! closed forms for the fastest possible descent, exact realizations as
//! explicit control schedules for the simulators in [`crate::oracle`],
//! and a self-check that the realized unitary dynamics reproduces the
//! closed forms.

use ndarray::{Array1, Array2};

use crate::linalg::{cis, cr, eigh, unitary_with_first_column, C64};
use crate::oracle::{
    FullControlSchedule, MeasurementModel, OracleProblem, PhaseTable, uniform_state,
};
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Reduced description of a search protocol at one instant: the overlap
/// `x` with the uniform vector fully determines the state, since the
/// leftover weight spreads evenly over the orthogonal complement.
#[derive(Debug, Clone, Copy)]
pub struct GroverState {
    pub x: f64,
    pub n_items: usize,
    pub t: f64,
}

impl GroverState {
    pub fn new(x: f64, n_items: usize, t: f64) -> Result<Self> {
        if n_items < 2 {
            return Err(Error::Validation("n_items must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Validation(format!("x outside [0, 1]: {x}")));
        }
        Ok(Self { x, n_items, t })
    }

    /// Weight on each orthogonal-complement direction, `(1-x)/(N-1)`.
    pub fn y(&self) -> f64 {
        (1.0 - self.x) / (self.n_items as f64 - 1.0)
    }
}

/// Matrix elements of one discrete query in the two-dimensional invariant
/// plane spanned by the uniform vector and the hidden-index direction.
#[derive(Debug, Clone, Copy)]
pub struct GroverQueryParams {
    pub alpha: C64,
    pub beta: C64,
    pub delta: f64,
}

impl GroverQueryParams {
    /// Validates the unitarity identity `|alpha|^2 + |beta|^2 = 1`.
    pub fn new(alpha: C64, beta: C64, delta: f64) -> Result<Self> {
        if (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() > 1e-12 {
            return Err(Error::Invariant(
                "|alpha|^2 + |beta|^2 != 1 for query parameters".into(),
            ));
        }
        Ok(Self { alpha, beta, delta })
    }

    /// Elements of the phase-`pi delta` query on N items:
    /// `alpha = 1 - z/N`, `beta = -z sqrt(N-1)/N` with
    /// `z = 1 - exp(-i pi delta)`.  The identity
    /// `|alpha|^2 + |beta|^2 = 1` holds exactly.
    pub fn optimal(n: usize, delta: f64) -> Self {
        let nf = n as f64;
        let z = cr(1.0) - cis(-PI * delta);
        Self {
            alpha: cr(1.0) - z / cr(nf),
            beta: -z * cr((nf - 1.0).sqrt() / nf),
            delta,
        }
    }
}

/// Success probability of the optimal final measurement at overlap `x`.
///
/// `pwin = (sqrt(x) + sqrt((N-1)(1-x)))^2 / N`; maximal (equal to 1)
/// exactly at `x = 1/N`.
pub fn pwin_from_x(x: f64, n: usize) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Validation(format!("x outside [0, 1]: {x}")));
    }
    let x = x.clamp(0.0, 1.0);
    let nf = n as f64;
    let s = x.sqrt() + ((nf - 1.0) * (1.0 - x)).sqrt();
    Ok((s * s / nf).min(1.0))
}

/// Overlap trajectory value of the time-optimal continuous protocol,
/// `x(t) = cos^2(pi sqrt(N-1) t / N)`, flagged once `t` passes the
/// optimum (the formula keeps oscillating but no optimal protocol
/// continues past it).
#[derive(Debug, Clone, Copy)]
pub struct ContinuousX {
    pub x: f64,
    pub past_optimum: bool,
}

pub fn continuous_x(t: f64, n: usize) -> ContinuousX {
    let nf = n as f64;
    let omega = PI * (nf - 1.0).sqrt() / nf;
    ContinuousX {
        x: (omega * t).cos().powi(2),
        past_optimum: t > continuous_exact_time(n) + 1e-12,
    }
}

/// Time at which the continuous protocol reaches `x = 1/N`:
/// `(1/pi) N/sqrt(N-1) arccos(1/sqrt(N))`.
pub fn continuous_exact_time(n: usize) -> f64 {
    let nf = n as f64;
    nf / (PI * (nf - 1.0).sqrt()) * (1.0 / nf.sqrt()).acos()
}

/// Magnitude of the per-query off-diagonal transfer coefficient,
/// `|beta| = 2 sin(pi delta / 2) sqrt(N-1) / N`.
pub fn beta_magnitude(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    2.0 * (PI * delta / 2.0).sin() * (nf - 1.0).sqrt() / nf
}

/// One step of the optimal discrete recursion,
/// `x' = (|alpha| sqrt(x) - |beta| sqrt(1-x))^2`.
pub fn discrete_step_optimal(x: f64, n: usize, delta: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Validation(format!("x outside [0, 1]: {x}")));
    }
    let x = x.clamp(0.0, 1.0);
    let beta = beta_magnitude(n, delta);
    let alpha = (1.0 - beta * beta).max(0.0).sqrt();
    let s = alpha * x.sqrt() - beta * (1.0 - x).sqrt();
    Ok(s * s)
}

/// Exact-solution time of the discrete protocol.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteTime {
    pub time: f64,
    pub queries: u64,
}

/// `T = delta * ceil(arccos(1/sqrt(N)) / arcsin(|beta|))`.  The ratio is
/// guarded by 1e-12 before the ceiling so exactly-integer cases (such as
/// N = 4, delta = 1) do not round up on representation noise.
pub fn discrete_exact_time(n: usize, delta: f64) -> DiscreteTime {
    let nf = n as f64;
    let target = (1.0 / nf.sqrt()).acos();
    let step = beta_magnitude(n, delta).min(1.0).asin();
    let queries = ((target / step - 1e-12).ceil().max(1.0)) as u64;
    DiscreteTime {
        time: delta * queries as f64,
        queries,
    }
}

/// Comparison against the fixed-Hamiltonian search protocol in the style
/// of Farhi and Gutmann, which holds one constant drive for `sqrt(N)/2`
/// and exceeds the optimum by a gap approaching `1/pi`.
#[derive(Debug, Clone, Copy)]
pub struct FgComparison {
    pub t_optimal: f64,
    pub t_fg: f64,
    pub gap: f64,
}

pub fn fg_comparison(n: usize) -> FgComparison {
    let t_optimal = continuous_exact_time(n);
    let t_fg = (n as f64).sqrt() / 2.0;
    FgComparison {
        t_optimal,
        t_fg,
        gap: t_fg - t_optimal,
    }
}

/// The optimal per-step overlap trajectory of the discrete protocol:
/// full steps of the recursion followed by one adjusted terminal step
/// that lands exactly on `1/N`.  Entry `k` is `x` after `k+1` queries.
pub fn discrete_trajectory(n: usize, delta: f64) -> Result<Vec<f64>> {
    let queries = discrete_exact_time(n, delta).queries as usize;
    let nf = n as f64;
    let target = 1.0 / nf;
    let beta = beta_magnitude(n, delta);
    let alpha = (1.0 - beta * beta).max(0.0).sqrt();
    let mut xs = Vec::with_capacity(queries);
    let mut x = 1.0f64;
    for q in 0..queries {
        if q + 1 == queries {
            let lo = (alpha * x.sqrt() - beta * (1.0 - x).sqrt()).powi(2);
            let hi = (alpha * x.sqrt() + beta * (1.0 - x).sqrt()).powi(2);
            if target < lo - 1e-12 || target > hi + 1e-12 {
                return Err(Error::Numerical(
                    "terminal landing infeasible for this (N, delta)".into(),
                ));
            }
            x = target;
        } else {
            x = discrete_step_optimal(x, n, delta)?;
        }
        xs.push(x);
    }
    Ok(xs)
}

/// Search problem in the continuous model: hidden index j applies the
/// Hamiltonian eigenvalue `pi` to query state j and zero elsewhere.
pub fn problem_continuous(n: usize) -> OracleProblem {
    let phases = Array2::from_shape_fn((n, n), |(j, m)| if j == m { PI } else { 0.0 });
    OracleProblem {
        dim_a: n,
        dim_m: n,
        dim_m_prime: n,
        psi0: uniform_state(n),
        phase_table: PhaseTable::Continuous { phases },
        verifiers: index_match_verifiers(n),
        measurement: MeasurementModel::SymmetricPure,
    }
}

/// Search problem in the discrete model: one query applies the phase
/// `exp(-i pi delta)` to query state j.
pub fn problem_discrete(n: usize, delta: f64) -> OracleProblem {
    let phases = Array2::from_shape_fn((n, n), |(j, m)| {
        if j == m {
            cis(-PI * delta)
        } else {
            cr(1.0)
        }
    });
    OracleProblem {
        dim_a: n,
        dim_m: n,
        dim_m_prime: n,
        psi0: uniform_state(n),
        phase_table: PhaseTable::Discrete { phases, delta },
        verifiers: index_match_verifiers(n),
        measurement: MeasurementModel::SymmetricPure,
    }
}

/// Verifiers `Pi_x = N |x><x| ⊗ |x><x|` on A x M'.
fn index_match_verifiers(n: usize) -> Vec<Array2<C64>> {
    (0..n)
        .map(|x| {
            let mut v = Array2::<C64>::zeros((n * n, n * n));
            let idx = x * n + x;
            v[[idx, idx]] = cr(n as f64);
            v
        })
        .collect()
}

/// Overlap of the reduced state with the uniform vector.
pub fn x_from_rho(rho: &Array2<C64>) -> f64 {
    let n = rho.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[[i, j]];
        }
    }
    acc.re / n as f64
}

/// Controls realizing the time-optimal continuous protocol: prepare the
/// uniform query state, then hold the constant drive
/// `pi (N-2)/N |u><u|` for `round(T/dt)` splitting steps.
pub fn optimal_continuous_controls(n: usize, dt: f64) -> Result<FullControlSchedule> {
    if dt <= 0.0 {
        return Err(Error::Validation("dt must be positive".into()));
    }
    let t_total = continuous_exact_time(n);
    let steps = (t_total / dt).round().max(1.0) as usize;
    let u = uniform_state(n);
    let prep = unitary_with_first_column(&u)?;
    // exp(-i c dt |u><u|) = I + (e^{-i c dt} - 1) |u><u|
    let c = PI * (n as f64 - 2.0) / n as f64;
    let factor = cis(-c * dt) - cr(1.0);
    let mut v = Array2::<C64>::eye(n);
    for i in 0..n {
        for j in 0..n {
            v[[i, j]] += factor * u[i] * u[j].conj();
        }
    }
    FullControlSchedule::new(n, 1, Some(prep), vec![v; steps])
}

/// Controls realizing the optimal discrete protocol.  The only
/// symmetric processing freedom between queries is a relative phase
/// between the uniform vector and its complement; the schedule picks the
/// phase that maximally decreases `x` each step and solves the terminal
/// phase so the last query lands exactly on `x = 1/N`.
pub fn optimal_discrete_controls(n: usize, delta: f64) -> Result<FullControlSchedule> {
    let queries = discrete_exact_time(n, delta).queries as usize;
    let nf = n as f64;
    let u = uniform_state(n);
    let prep = unitary_with_first_column(&u)?;

    // Query action in the (u, e_j) plane; j-independent by symmetry.
    let GroverQueryParams { alpha, beta, .. } = GroverQueryParams::optimal(n, delta);
    let gamma = cr(1.0) - (cr(1.0) - cis(-PI * delta)) * cr((nf - 1.0) / nf);

    let knob = |phi: f64| -> Array2<C64> {
        // u-component untouched, complement picks up e^{i phi}.
        let mut w = Array2::<C64>::eye(n).mapv(|e| e * cis(phi));
        for i in 0..n {
            for j in 0..n {
                w[[i, j]] += (cr(1.0) - cis(phi)) * u[i] * u[j].conj();
            }
        }
        w
    };

    let mut steps: Vec<Array2<C64>> = Vec::with_capacity(queries);
    let mut p = cr(1.0);
    let mut q = cr(0.0);
    let target = 1.0 / nf;
    for step_idx in 0..queries {
        let phi = if q.norm() < 1e-14 || beta.norm() < 1e-14 {
            0.0
        } else if step_idx + 1 == queries {
            // |p'|^2 = |a p|^2 + |b q|^2 + 2 |a p||b q| cos(psi) = 1/N.
            let ap = (alpha * p).norm();
            let bq = (beta * q).norm();
            let cos_psi = ((target - ap * ap - bq * bq) / (2.0 * ap * bq)).clamp(-1.0, 1.0);
            let psi = cos_psi.acos();
            psi + (alpha * p).arg() - (beta * q).arg()
        } else {
            PI + (alpha * p).arg() - (beta * q).arg()
        };
        if step_idx == 0 {
            steps.push(prep.clone());
        } else {
            steps.push(knob(phi));
        }
        let qk = q * cis(phi);
        let p2 = alpha * p + beta * qk;
        let q2 = beta * p + gamma * qk;
        p = p2;
        q = q2;
    }
    if (p.norm_sqr() - target).abs() > 1e-9 {
        return Err(Error::Numerical(
            "terminal landing infeasible for this (N, delta)".into(),
        ));
    }
    FullControlSchedule::new(n, 1, None, steps)
}

/// Explicit-state self-check of the realized continuous protocol.
///
/// Evolves each hidden index's query state under the realized total
/// Hamiltonian (exactly, via one eigendecomposition), then checks that
/// (i) the overlap trajectory matches [`continuous_x`] on a `dt` grid,
/// (ii) the final conditional states are mutually orthogonal, and for
/// N = 2 that (iii) the final states match the action of the closed-form
/// final unitary.  Returns the largest deviation seen.
pub fn verify_unitary_realization(n: usize, dt: f64) -> Result<f64> {
    if n < 2 || n > 64 {
        return Err(Error::Validation("supported range is 2 <= N <= 64".into()));
    }
    if dt <= 0.0 {
        return Err(Error::Validation("dt must be positive".into()));
    }
    let nf = n as f64;
    let u = uniform_state(n);
    // Hidden index 0 representative: H = pi |0><0| + pi (N-2)/N |u><u|.
    let mut h = Array2::<C64>::zeros((n, n));
    h[[0, 0]] = cr(PI);
    let c = PI * (nf - 2.0) / nf;
    for i in 0..n {
        for j in 0..n {
            h[[i, j]] += cr(c) * u[i] * u[j].conj();
        }
    }
    let (vals, vecs) = eigh(&h)?;
    let coeff: Vec<C64> = (0..n)
        .map(|k| (0..n).map(|i| vecs[[i, k]].conj() * u[i]).sum())
        .collect();
    let phi0_at = |t: f64| -> Array1<C64> {
        let mut out = Array1::<C64>::zeros(n);
        for k in 0..n {
            let amp = coeff[k] * cis(-vals[k] * t);
            for i in 0..n {
                out[i] += amp * vecs[[i, k]];
            }
        }
        out
    };
    // The swap 0 <-> 1 maps the index-0 representative to index 1, and
    // the pairwise overlap is index-independent by symmetry.
    let overlap_01 = |phi: &Array1<C64>| -> C64 {
        let mut swapped = phi.clone();
        swapped.swap(0, 1);
        swapped.iter().zip(phi.iter()).map(|(a, b)| a.conj() * b).sum()
    };

    let t_total = continuous_exact_time(n);
    let samples = (t_total / dt).ceil() as usize;
    let mut worst = 0.0f64;
    for s in 0..=samples {
        let t = (s as f64 * dt).min(t_total);
        let phi = phi0_at(t);
        let g = overlap_01(&phi);
        let x = (1.0 + (nf - 1.0) * g.re) / nf;
        worst = worst.max((x - continuous_x(t, n).x).abs());
    }
    let phi_final = phi0_at(t_total);
    worst = worst.max(overlap_01(&phi_final).norm());

    if n == 2 {
        // Closed-form final unitary: -i I + (1+i) |u><u| applied to |j>.
        for j in 0..2usize {
            let mut target = Array1::<C64>::zeros(2);
            target[j] += C64::new(0.0, -1.0);
            for i in 0..2 {
                target[i] += C64::new(1.0, 1.0) * u[i] * u[j].conj();
            }
            let mut phi = phi0_at(t_total);
            if j == 1 {
                phi.swap(0, 1);
            }
            let ov: C64 = phi.iter().zip(target.iter()).map(|(a, b)| a.conj() * b).sum();
            worst = worst.max((ov.norm() - 1.0).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use crate::oracle::{
        evolve_continuous, evolve_discrete, max_trace_drift, optimal_final_measurement,
        pwin_worst_case,
    };
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn pwin_formula_values() {
        assert!((pwin_from_x(0.25, 4).unwrap() - 1.0).abs() < 1e-14);
        assert!((pwin_from_x(1.0, 4).unwrap() - 0.25).abs() < 1e-14);
        assert!((pwin_from_x(0.5, 5).unwrap() - 0.9).abs() < 1e-14);
        assert!(pwin_from_x(1.0 + 1e-13, 4).is_ok());
        assert!(pwin_from_x(1.1, 4).is_err());
        assert!(pwin_from_x(-0.1, 4).is_err());
    }

    #[test]
    fn continuous_closed_forms() {
        let v = continuous_x(0.25, 2);
        assert!((v.x - (PI / 8.0).cos().powi(2)).abs() < 1e-14);
        assert!(!v.past_optimum);
        assert!(continuous_x(1.0, 2).past_optimum);

        assert!((continuous_exact_time(2) - 0.5).abs() < 1e-14);
        assert!((continuous_exact_time(4) - 4.0 / (3.0 * 3.0f64.sqrt())).abs() < 1e-14);
        let n = 1_000_000usize;
        let asym = (n as f64).sqrt() / 2.0 - 1.0 / PI;
        assert!((continuous_exact_time(n) - asym).abs() < 1e-3);
    }

    #[test]
    fn continuous_time_is_half_overlap_time_consistent() {
        // x(t*) = 1/2 exactly where the phase reaches pi/4, and the
        // measurement value there is 1/2 + sqrt(N-1)/N.
        for n in [3usize, 7, 32] {
            let nf = n as f64;
            let t_star = nf / (PI * (nf - 1.0).sqrt()) * (PI / 4.0);
            assert!((continuous_x(t_star, n).x - 0.5).abs() < 1e-12);
            let p = pwin_from_x(0.5, n).unwrap();
            assert!((p - (0.5 + (nf - 1.0).sqrt() / nf)).abs() < 1e-12);
        }
    }

    #[test]
    fn discrete_step_and_time() {
        // From x = 1 one full step lands on |alpha|^2; for N=4, delta=1
        // that is the zero-error point 1/4.
        assert!((discrete_step_optimal(1.0, 4, 1.0).unwrap() - 0.25).abs() < 1e-14);
        // Small-delta limit of the one-step derivative.
        let n = 5usize;
        let x = 0.7;
        for delta in [1e-3, 1e-4] {
            let fd = (discrete_step_optimal(x, n, delta).unwrap() - x) / delta;
            let want = -2.0 * PI * ((n as f64 - 1.0).sqrt() / n as f64) * (x * (1.0 - x)).sqrt();
            assert!((fd - want).abs() < 40.0 * delta, "fd {fd} want {want}");
        }
        // x = 0 bounces to |beta|^2.
        let b = beta_magnitude(4, 0.3);
        assert!((discrete_step_optimal(0.0, 4, 0.3).unwrap() - b * b).abs() < 1e-14);

        assert_eq!(discrete_exact_time(4, 1.0).queries, 1);
        assert!((discrete_exact_time(4, 1.0).time - 1.0).abs() < 1e-14);
        assert_eq!(discrete_exact_time(2, 1.0).queries, 1);

        let t_quarter = discrete_exact_time(1_000_000, 0.25).time;
        let t_full = discrete_exact_time(1_000_000, 1.0).time;
        let want = 0.25 * (PI / 2.0).sin() / (PI * 0.25 / 2.0).sin();
        assert!((t_quarter / t_full / want - 1.0).abs() < 0.01);
    }

    #[test]
    fn discrete_converges_to_continuous_in_delta() {
        for delta in [1e-2, 1e-3] {
            for n in [4usize, 9] {
                let t_disc = discrete_exact_time(n, delta).time;
                let t_cont = continuous_exact_time(n);
                assert!(
                    (t_disc - t_cont).abs() <= 2.0 * delta,
                    "N={n} delta={delta}: {t_disc} vs {t_cont}"
                );
            }
        }
    }

    #[test]
    fn constant_drive_comparison() {
        let c = fg_comparison(2);
        assert!((c.t_fg / c.t_optimal - 2.0f64.sqrt()).abs() < 1e-12);
        let c = fg_comparison(100);
        assert!((c.gap - 1.0 / PI).abs() / (1.0 / PI) < 0.10);
        let c = fg_comparison(4);
        assert!((c.t_fg - 1.0).abs() < 1e-14);
        assert!((c.gap - 0.230200).abs() < 1e-6);
    }

    #[test]
    fn query_params_satisfy_unitarity_identity() {
        for n in [2usize, 3, 10, 1000] {
            for delta in [1.0, 0.5, 0.25, 1e-3] {
                let q = GroverQueryParams::optimal(n, delta);
                assert!((q.alpha.norm_sqr() + q.beta.norm_sqr() - 1.0).abs() < 1e-12);
                assert!(GroverQueryParams::new(q.alpha, q.beta, delta).is_ok());
                assert!((q.beta.norm() - beta_magnitude(n, delta)).abs() < 1e-12);
            }
        }
        assert!(GroverQueryParams::new(cr(1.0), cr(0.1), 1.0).is_err());
        let s = GroverState::new(0.25, 4, 0.0).unwrap();
        assert!((s.y() - 0.25).abs() < 1e-15);
        assert!(GroverState::new(1.5, 4, 0.0).is_err());
    }

    #[test]
    fn continuous_x_strictly_decreases_until_optimum() {
        for n in [2usize, 5, 33] {
            let t_end = continuous_exact_time(n);
            let mut prev = 1.0 + 1e-15;
            for k in 0..=1000 {
                let t = t_end * k as f64 / 1000.0;
                let x = continuous_x(t, n).x;
                assert!(x < prev, "N={n}: x not decreasing at t={t}");
                prev = x;
            }
        }
    }

    #[test]
    fn trajectory_descends_monotonically_to_target() {
        for (n, delta) in [(4usize, 1.0f64), (8, 1.0), (5, 0.5), (7, 0.25)] {
            let xs = discrete_trajectory(n, delta).unwrap();
            let mut prev = 1.0;
            for &x in &xs {
                assert!(x < prev + 1e-12);
                prev = x;
            }
            assert!((xs.last().unwrap() - 1.0 / n as f64).abs() < 1e-12);
        }
        // Degenerate pair: a full query flips the overlap all the way
        // past the target, and no processing can prevent it.
        assert!(discrete_trajectory(2, 1.0).is_err());
    }

    #[test]
    fn realized_continuous_protocol_matches_closed_form() {
        let n = 4usize;
        let dt = 1e-4;
        let p = problem_continuous(n);
        let controls = optimal_continuous_controls(n, dt).unwrap();
        let traj = evolve_continuous(&p, &controls, dt).unwrap();
        assert!(max_trace_drift(&traj) < 1e-9);
        let mut worst = 0.0f64;
        for s in &traj {
            worst = worst.max((x_from_rho(&s.rho) - continuous_x(s.t, n).x).abs());
        }
        assert!(worst < 1e-6, "max deviation {worst}");
        let last = traj.last().unwrap();
        assert!((x_from_rho(&last.rho) - 0.25).abs() < 1e-5);
        let (pwin, _) = optimal_final_measurement(last, &p).unwrap();
        assert!(pwin > 1.0 - 1e-5);
    }

    #[test]
    fn realized_discrete_protocol_matches_recursion() {
        for (n, delta) in [(4usize, 1.0f64), (8, 1.0), (5, 0.5)] {
            let p = problem_discrete(n, delta);
            let controls = optimal_discrete_controls(n, delta).unwrap();
            let traj = evolve_discrete(&p, &controls).unwrap();
            let xs = discrete_trajectory(n, delta).unwrap();
            assert_eq!(traj.len(), xs.len() + 1);
            for (state, want) in traj[1..].iter().zip(&xs) {
                assert!(
                    (x_from_rho(&state.rho) - want).abs() < 1e-10,
                    "N={n} delta={delta}"
                );
            }
            let (pwin, achieving) =
                optimal_final_measurement(traj.last().unwrap(), &p).unwrap();
            assert!(pwin > 1.0 - 1e-9);
            assert!((pwin_worst_case(&achieving, &p).unwrap() - pwin).abs() < 1e-8);
        }
    }

    #[test]
    fn single_query_grover4_example() {
        let p = problem_discrete(4, 1.0);
        let controls = optimal_discrete_controls(4, 1.0).unwrap();
        assert_eq!(controls.n_steps(), 1);
        let traj = evolve_discrete(&p, &controls).unwrap();
        assert!((x_from_rho(&traj[1].rho) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unitary_realization_self_check() {
        assert!(verify_unitary_realization(4, 1e-4).unwrap() < 1e-6);
        assert!(verify_unitary_realization(2, 1e-4).unwrap() < 1e-6);
        assert!(verify_unitary_realization(7, 1e-3).unwrap() < 1e-6);
    }

    #[test]
    fn random_controls_respect_overlap_velocity_bound() {
        // |dx/dt| <= 2 pi sqrt(N-1)/N sqrt(x(1-x)) for any protocol.
        let n = 4usize;
        let dt = 1e-3;
        let p = problem_continuous(n);
        let mut rng = StdRng::seed_from_u64(1234);
        for _trial in 0..3 {
            let steps: Vec<_> = (0..400).map(|_| random_unitary(n * 2, &mut rng)).collect();
            let controls = FullControlSchedule::new(n, 2, None, steps).unwrap();
            let traj = evolve_continuous(&p, &controls, dt).unwrap();
            let xs: Vec<f64> = traj.iter().map(|s| x_from_rho(&s.rho)).collect();
            for w in xs.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let bound =
                    2.0 * PI * ((n as f64 - 1.0).sqrt() / n as f64) * (mid * (1.0 - mid)).sqrt();
                assert!(
                    ((w[1] - w[0]) / dt).abs() <= bound + 1e-3,
                    "rate {} exceeds bound {}",
                    ((w[1] - w[0]) / dt).abs(),
                    bound
                );
            }
        }
    }
}
