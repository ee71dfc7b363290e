//! Oracle-problem model and brute-force simulators.
//!
//! The simulated game: a hidden index j selects a diagonal phase action on
//! a query register M; register A stays entangled with the hidden index,
//! and the querying side applies arbitrary unitaries on M plus a private
//! ancilla B between oracle applications.  Every observable property of a
//! protocol is carried by the reduced state on A, which the simulators
//! here track exactly: `evolve_discrete` and `evolve_continuous` evolve an
//! explicit global pure state, while `evolve_master` integrates the
//! reduced equation of motion directly from a caller-supplied rule for
//! the query-side extension of the state.

use ndarray::{Array1, Array2};

use crate::linalg::{
    self, cis, cr, is_psd, is_unitary, max_abs_diff, sqrt_psd, trace, trace_abs_hermitian, C64,
};
use crate::{Error, Result};

/// Oracle action: diagonal Hamiltonian eigenvalues (continuous time) or
/// unit-modulus phases applied once per query (discrete time with an
/// intrinsic step `delta`).
#[derive(Debug, Clone)]
pub enum PhaseTable {
    /// `phases[[j, m]]` is the Hamiltonian eigenvalue (radians/time) felt
    /// by query basis state m when the hidden index is j.
    Continuous { phases: Array2<f64> },
    /// `phases[[j, m]]` is the unit-modulus factor applied per query;
    /// `delta` is the time cost of one query.
    Discrete { phases: Array2<C64>, delta: f64 },
}

/// How the final measurement can be optimized for this problem family.
#[derive(Debug, Clone)]
pub enum MeasurementModel {
    /// Geometrically uniform pure-state ensemble over the hidden indices;
    /// the pretty-good measurement is optimal.
    SymmetricPure,
    /// Two-hypothesis discrimination; `proj0`/`proj1` project A onto the
    /// two hypothesis supports and the Helstrom bound is optimal.
    Binary {
        proj0: Array2<C64>,
        proj1: Array2<C64>,
    },
    /// No structured optimum is known to this crate.
    Unsupported,
}

/// A query problem: spaces, initial amplitudes over hidden indices, the
/// oracle phase table, and the verification operators for each answer.
#[derive(Debug, Clone)]
pub struct OracleProblem {
    pub dim_a: usize,
    pub dim_m: usize,
    pub dim_m_prime: usize,
    /// Amplitudes over hidden indices; unit norm.
    pub psi0: Array1<C64>,
    pub phase_table: PhaseTable,
    /// PSD operators on A x M', one per answer x.
    pub verifiers: Vec<Array2<C64>>,
    pub measurement: MeasurementModel,
}

/// Reduced state on A at a point in time.
#[derive(Debug, Clone)]
pub struct ProtocolState {
    pub rho: Array2<C64>,
    pub t: f64,
}

/// Controls for the explicit global simulators: an optional zero-time
/// preparation unitary and one unitary per oracle application, all acting
/// on M x B only.
#[derive(Debug, Clone)]
pub struct FullControlSchedule {
    pub dim_m: usize,
    pub dim_b: usize,
    pub preparation: Option<Array2<C64>>,
    pub steps: Vec<Array2<C64>>,
}

impl FullControlSchedule {
    /// Validates that every supplied matrix is unitary on M x B.
    pub fn new(
        dim_m: usize,
        dim_b: usize,
        preparation: Option<Array2<C64>>,
        steps: Vec<Array2<C64>>,
    ) -> Result<Self> {
        let d = dim_m * dim_b;
        for (label, u) in preparation
            .iter()
            .map(|u| ("preparation", u))
            .chain(steps.iter().map(|u| ("step", u)))
        {
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::Dimension(format!(
                    "{label} unitary is {}x{}, expected {d}x{d}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            if !is_unitary(u, 1e-10) {
                return Err(Error::Validation(format!("{label} matrix not unitary")));
            }
        }
        Ok(Self {
            dim_m,
            dim_b,
            preparation,
            steps,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }
}

/// Checks every structural invariant of the problem and hands it back.
pub fn validate_problem(p: OracleProblem) -> Result<OracleProblem> {
    if p.dim_a == 0 || p.dim_m == 0 || p.dim_m_prime == 0 {
        return Err(Error::Validation("zero-dimensional register".into()));
    }
    if p.psi0.len() != p.dim_a {
        return Err(Error::Dimension(format!(
            "psi0 length {} does not match dim_a {}",
            p.psi0.len(),
            p.dim_a
        )));
    }
    let norm: f64 = p.psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Validation("psi0 not unit norm".into()));
    }
    match &p.phase_table {
        PhaseTable::Continuous { phases } => {
            if phases.nrows() != p.dim_a || phases.ncols() != p.dim_m {
                return Err(Error::Dimension("phase table shape mismatch".into()));
            }
        }
        PhaseTable::Discrete { phases, delta } => {
            if phases.nrows() != p.dim_a || phases.ncols() != p.dim_m {
                return Err(Error::Dimension("phase table shape mismatch".into()));
            }
            if *delta <= 0.0 {
                return Err(Error::Validation("delta must be positive".into()));
            }
            for z in phases.iter() {
                if (z.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::Validation("discrete phase not unimodular".into()));
                }
            }
        }
    }
    let dv = p.dim_a * p.dim_m_prime;
    for v in &p.verifiers {
        if v.nrows() != dv || v.ncols() != dv {
            return Err(Error::Dimension("verifier shape mismatch".into()));
        }
        if !is_psd(v, 1e-10) {
            return Err(Error::Validation("verifier not PSD".into()));
        }
    }
    Ok(p)
}

impl OracleProblem {
    fn check_controls(&self, controls: &FullControlSchedule) -> Result<()> {
        if controls.dim_m != self.dim_m {
            return Err(Error::Dimension(format!(
                "controls act on M of dimension {}, problem has {}",
                controls.dim_m, self.dim_m
            )));
        }
        Ok(())
    }
}

fn apply_query_side(psi: &mut Array1<C64>, u: &Array2<C64>, dim_a: usize, dim_mb: usize) {
    let mut buf = vec![C64::new(0.0, 0.0); dim_mb];
    for a in 0..dim_a {
        let off = a * dim_mb;
        for r in 0..dim_mb {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..dim_mb {
                acc += u[[r, c]] * psi[off + c];
            }
            buf[r] = acc;
        }
        psi.as_slice_mut().unwrap()[off..off + dim_mb].copy_from_slice(&buf);
    }
}

fn apply_phase_factors(psi: &mut Array1<C64>, f: &Array2<C64>, dim_a: usize, dim_m: usize, dim_b: usize) {
    for a in 0..dim_a {
        for m in 0..dim_m {
            let fac = f[[a, m]];
            let off = (a * dim_m + m) * dim_b;
            for b in 0..dim_b {
                psi[off + b] *= fac;
            }
        }
    }
}

/// Reduced state on A of a global pure state on A x (rest).
pub fn reduced_state_a(psi: &Array1<C64>, dim_a: usize, dim_rest: usize) -> Array2<C64> {
    let mut rho = Array2::<C64>::zeros((dim_a, dim_a));
    for a in 0..dim_a {
        for a2 in 0..dim_a {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..dim_rest {
                acc += psi[a * dim_rest + r] * psi[a2 * dim_rest + r].conj();
            }
            rho[[a, a2]] = acc;
        }
    }
    rho
}

/// Reduced state on A x M of a global pure state on A x M x B.
pub fn reduced_state_am(psi: &Array1<C64>, dim_a: usize, dim_m: usize, dim_b: usize) -> Array2<C64> {
    let dam = dim_a * dim_m;
    let mut rho = Array2::<C64>::zeros((dam, dam));
    for i in 0..dam {
        for j in 0..dam {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..dim_b {
                acc += psi[i * dim_b + b] * psi[j * dim_b + b].conj();
            }
            rho[[i, j]] = acc;
        }
    }
    rho
}

fn initial_global_state(p: &OracleProblem, controls: &FullControlSchedule) -> Array1<C64> {
    let dim_mb = p.dim_m * controls.dim_b;
    let mut psi = Array1::<C64>::zeros(p.dim_a * dim_mb);
    for a in 0..p.dim_a {
        psi[a * dim_mb] = p.psi0[a];
    }
    if let Some(prep) = &controls.preparation {
        apply_query_side(&mut psi, prep, p.dim_a, dim_mb);
    }
    psi
}

/// Simulates the discrete game: for each step, the query-side unitary is
/// applied and then one oracle query; the reduced state on A is recorded
/// after every query (index 0 holds the initial state).
pub fn evolve_discrete(
    p: &OracleProblem,
    controls: &FullControlSchedule,
) -> Result<Vec<ProtocolState>> {
    p.check_controls(controls)?;
    let (phases, delta) = match &p.phase_table {
        PhaseTable::Discrete { phases, delta } => (phases, *delta),
        PhaseTable::Continuous { .. } => {
            return Err(Error::Validation(
                "evolve_discrete requires a discrete problem".into(),
            ))
        }
    };
    let dim_mb = p.dim_m * controls.dim_b;
    let mut psi = initial_global_state(p, controls);
    let mut out = Vec::with_capacity(controls.steps.len() + 1);
    out.push(ProtocolState {
        rho: reduced_state_a(&psi, p.dim_a, dim_mb),
        t: 0.0,
    });
    for (i, step) in controls.steps.iter().enumerate() {
        apply_query_side(&mut psi, step, p.dim_a, dim_mb);
        apply_phase_factors(&mut psi, phases, p.dim_a, p.dim_m, controls.dim_b);
        out.push(ProtocolState {
            rho: reduced_state_a(&psi, p.dim_a, dim_mb),
            t: (i + 1) as f64 * delta,
        });
    }
    Ok(out)
}

/// Simulates the continuous game by symmetric operator splitting: each
/// step applies a half-interval of oracle phase evolution, the step's
/// query-side unitary, and another half-interval.  The splitting error is
/// second order in `dt`; the trajectory is sampled every `dt`.
pub fn evolve_continuous(
    p: &OracleProblem,
    controls: &FullControlSchedule,
    dt: f64,
) -> Result<Vec<ProtocolState>> {
    p.check_controls(controls)?;
    if dt <= 0.0 {
        return Err(Error::Validation("dt must be positive".into()));
    }
    let phases = match &p.phase_table {
        PhaseTable::Continuous { phases } => phases,
        PhaseTable::Discrete { .. } => {
            return Err(Error::Validation(
                "evolve_continuous requires a continuous problem".into(),
            ))
        }
    };
    let half = Array2::from_shape_fn((p.dim_a, p.dim_m), |(a, m)| cis(-phases[[a, m]] * dt / 2.0));
    let dim_mb = p.dim_m * controls.dim_b;
    let mut psi = initial_global_state(p, controls);
    let mut out = Vec::with_capacity(controls.steps.len() + 1);
    out.push(ProtocolState {
        rho: reduced_state_a(&psi, p.dim_a, dim_mb),
        t: 0.0,
    });
    for (i, step) in controls.steps.iter().enumerate() {
        apply_phase_factors(&mut psi, &half, p.dim_a, p.dim_m, controls.dim_b);
        apply_query_side(&mut psi, step, p.dim_a, dim_mb);
        apply_phase_factors(&mut psi, &half, p.dim_a, p.dim_m, controls.dim_b);
        out.push(ProtocolState {
            rho: reduced_state_a(&psi, p.dim_a, dim_mb),
            t: (i + 1) as f64 * dt,
        });
    }
    Ok(out)
}

/// The query side's strategy expressed directly on states: produce the
/// extension on A x M that the strategy maintains at time `t`.  The
/// extension must be PSD and its partial trace over M must reproduce
/// the reduced state on A.
pub trait ExtensionMap {
    fn dim_m(&self) -> usize;
    fn extend(&self, rho: &Array2<C64>, t: f64) -> Result<Array2<C64>>;
    /// Times where the extension jumps (piecewise-constant controls);
    /// the integrator never steps across one.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Integrates d(rho)/dt = -i Tr_M[H rho~ - rho~ H] with rho~ supplied by
/// `ext` at every stage; classic fixed-step fourth-order Runge-Kutta.
/// The trajectory is sampled every `dt` plus a final partial step.
pub fn evolve_master(
    p: &OracleProblem,
    ext: &dyn ExtensionMap,
    dt: f64,
    t_end: f64,
) -> Result<Vec<ProtocolState>> {
    if dt <= 0.0 {
        return Err(Error::Validation("dt must be positive".into()));
    }
    let phases = match &p.phase_table {
        PhaseTable::Continuous { phases } => phases,
        PhaseTable::Discrete { .. } => {
            return Err(Error::Validation(
                "evolve_master requires a continuous problem".into(),
            ))
        }
    };
    if ext.dim_m() != p.dim_m {
        return Err(Error::Dimension("extension M dimension mismatch".into()));
    }
    let da = p.dim_a;
    let dm = p.dim_m;
    let deriv = |rho: &Array2<C64>, t: f64| -> Result<Array2<C64>> {
        let big = ext.extend(rho, t)?;
        if big.nrows() != da * dm || big.ncols() != da * dm {
            return Err(Error::Dimension("extension shape mismatch".into()));
        }
        let mut out = Array2::<C64>::zeros((da, da));
        for z in 0..da {
            for z2 in 0..da {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..dm {
                    let gap = phases[[z, m]] - phases[[z2, m]];
                    if gap != 0.0 {
                        acc += cr(gap) * big[[z * dm + m, z2 * dm + m]];
                    }
                }
                out[[z, z2]] = C64::new(0.0, -1.0) * acc;
            }
        }
        Ok(out)
    };

    let mut rho = Array2::<C64>::zeros((da, da));
    for (i, zi) in p.psi0.iter().enumerate() {
        for (j, zj) in p.psi0.iter().enumerate() {
            rho[[i, j]] = zi * zj.conj();
        }
    }
    let mut breakpoints: Vec<f64> = ext
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 1e-12 && b < t_end - 1e-12)
        .collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breakpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut t = 0.0;
    let mut bp_idx = 0usize;
    let mut out = vec![ProtocolState {
        rho: rho.clone(),
        t,
    }];
    while t < t_end - 1e-15 {
        while bp_idx < breakpoints.len() && breakpoints[bp_idx] <= t + 1e-12 {
            bp_idx += 1;
        }
        let next_bp = breakpoints.get(bp_idx).copied();
        let mut h = dt.min(t_end - t);
        let mut ends_on_bp = false;
        if let Some(bp) = next_bp {
            if bp - t <= h + 1e-12 {
                h = bp - t;
                ends_on_bp = true;
            }
        }
        // A step that lands exactly on a control jump must sample the
        // side it integrated over; nudging the last stage left keeps it
        // in the old piece (the state it weighs is continuous there).
        let t4 = if ends_on_bp { t + h - 1e-12 } else { t + h };
        let k1 = deriv(&rho, t)?;
        let k2 = deriv(&(&rho + &k1.mapv(|z| z * cr(h / 2.0))), t + h / 2.0)?;
        let k3 = deriv(&(&rho + &k2.mapv(|z| z * cr(h / 2.0))), t + h / 2.0)?;
        let k4 = deriv(&(&rho + &k3.mapv(|z| z * cr(h))), t4)?;
        let incr = (&(&k1 + &k4) + &(&k2 + &k3).mapv(|z| z * cr(2.0))).mapv(|z| z * cr(h / 6.0));
        rho = &rho + &incr;
        t = if ends_on_bp {
            next_bp.expect("breakpoint present")
        } else {
            t + h
        };
        out.push(ProtocolState {
            rho: rho.clone(),
            t,
        });
    }
    Ok(out)
}

/// Worst-case success probability of a final answer state: the minimum
/// over answers x of Tr[Pi_x rho'].
pub fn pwin_worst_case(rho_prime: &Array2<C64>, p: &OracleProblem) -> Result<f64> {
    let d = p.dim_a * p.dim_m_prime;
    if rho_prime.nrows() != d || rho_prime.ncols() != d {
        return Err(Error::Dimension(format!(
            "answer state is {}x{}, expected {d}x{d}",
            rho_prime.nrows(),
            rho_prime.ncols()
        )));
    }
    if p.verifiers.is_empty() {
        return Err(Error::Validation("problem has no verifiers".into()));
    }
    let mut worst = f64::INFINITY;
    for v in &p.verifiers {
        let mut val = 0.0;
        for i in 0..d {
            for j in 0..d {
                val += (v[[i, j]] * rho_prime[[j, i]]).re;
            }
        }
        worst = worst.min(val);
    }
    Ok(worst)
}

/// Optimal final measurement value for the structured problem families,
/// together with an answer state on A x M' achieving it.
///
/// Symmetric pure ensembles use the pretty-good measurement value
/// (Tr sqrt(rho))^2 / N; binary discrimination uses the Helstrom value
/// 1/2 + 1/2 Tr|sqrt(rho) (P0 - P1) sqrt(rho)|.
pub fn optimal_final_measurement(
    rho_t: &ProtocolState,
    p: &OracleProblem,
) -> Result<(f64, Array2<C64>)> {
    let rho = &rho_t.rho;
    if rho.nrows() != p.dim_a || rho.ncols() != p.dim_a {
        return Err(Error::Dimension("state dimension mismatch".into()));
    }
    match &p.measurement {
        MeasurementModel::SymmetricPure => {
            if p.dim_m_prime != p.dim_a {
                return Err(Error::Dimension(
                    "symmetric ensemble needs one answer per hidden index".into(),
                ));
            }
            let s = sqrt_psd(rho, 1e-9)?;
            let tr = trace(&s).re;
            let pwin = tr * tr / p.dim_a as f64;
            // Achieving state: v v* with v the flattening of sqrt(rho).
            let n = p.dim_a;
            let mut v = Array1::<C64>::zeros(n * n);
            for j in 0..n {
                for x in 0..n {
                    v[j * n + x] = s[[j, x]];
                }
            }
            let mut achieving = Array2::<C64>::zeros((n * n, n * n));
            for i in 0..n * n {
                for j in 0..n * n {
                    achieving[[i, j]] = v[i] * v[j].conj();
                }
            }
            Ok((pwin, achieving))
        }
        MeasurementModel::Binary { proj0, proj1 } => {
            if p.dim_m_prime != 2 {
                return Err(Error::Dimension(
                    "binary discrimination needs a two-dimensional answer register".into(),
                ));
            }
            let s = sqrt_psd(rho, 1e-9)?;
            let diff = proj0 - proj1;
            let m = s.dot(&diff).dot(&s);
            let pwin = 0.5 + 0.5 * trace_abs_hermitian(&m)?;
            // Achieving state: route the nonnegative eigenspace of m to
            // answer 0 and the rest to answer 1.
            let (vals, vecs) = linalg::eigh(&m)?;
            let n = p.dim_a;
            let mut f0 = Array2::<C64>::zeros((n, n));
            for k in 0..n {
                if vals[k] >= 0.0 {
                    for i in 0..n {
                        for j in 0..n {
                            f0[[i, j]] += vecs[[i, k]] * vecs[[j, k]].conj();
                        }
                    }
                }
            }
            let f1 = &Array2::<C64>::eye(n) - &f0;
            let block0 = s.dot(&f0).dot(&s);
            let block1 = s.dot(&f1).dot(&s);
            let mut achieving = Array2::<C64>::zeros((2 * n, 2 * n));
            for i in 0..n {
                for j in 0..n {
                    achieving[[2 * i, 2 * j]] = block0[[i, j]];
                    achieving[[2 * i + 1, 2 * j + 1]] = block1[[i, j]];
                }
            }
            Ok((pwin, achieving))
        }
        MeasurementModel::Unsupported => {
            Err(Error::Unsupported("unsupported verifier structure".into()))
        }
    }
}

/// Outcome of the minimal-distinguishing-time search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistinguishOutcome {
    ReachedAt(f64),
    NotReachable { t_max: f64 },
}

/// Minimal time at which two diagonal Hamiltonians become perfectly
/// distinguishable on the best probe state, searched up to t_max = 10.
///
/// Perfect distinguishability at time t holds iff the origin lies in the
/// convex hull of the unit-circle points exp(-i (delta1_k - delta0_k) t),
/// equivalently iff the largest circular gap between the point angles is
/// at most pi.  The search scans a 1e-3 grid and bisects the first
/// reachable bracket down to 1e-9.
pub fn min_distinguish_time(delta0: &[f64], delta1: &[f64]) -> Result<DistinguishOutcome> {
    min_distinguish_time_up_to(delta0, delta1, 10.0)
}

/// Same as [`min_distinguish_time`] with a caller-chosen search horizon.
pub fn min_distinguish_time_up_to(
    delta0: &[f64],
    delta1: &[f64],
    t_max: f64,
) -> Result<DistinguishOutcome> {
    if delta0.is_empty() || delta1.is_empty() {
        return Err(Error::Validation("empty phase vectors".into()));
    }
    if delta0.len() != delta1.len() {
        return Err(Error::Dimension("phase vectors differ in length".into()));
    }
    let gaps: Vec<f64> = delta0.iter().zip(delta1).map(|(a, b)| b - a).collect();
    let reachable = |t: f64| -> bool {
        let tau = std::f64::consts::TAU;
        let mut angles: Vec<f64> = gaps.iter().map(|g| (-g * t).rem_euclid(tau)).collect();
        angles.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let mut max_gap = angles[0] + tau - angles[angles.len() - 1];
        for w in angles.windows(2) {
            max_gap = max_gap.max(w[1] - w[0]);
        }
        max_gap <= std::f64::consts::PI + 1e-12
    };
    let grid = 1e-3;
    let n_steps = (t_max / grid).ceil() as usize;
    let mut bracket = None;
    for k in 0..=n_steps {
        let t = (k as f64 * grid).min(t_max);
        if reachable(t) {
            bracket = Some((((k as f64) - 1.0).max(0.0) * grid, t));
            break;
        }
    }
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => return Ok(DistinguishOutcome::NotReachable { t_max }),
    };
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if reachable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DistinguishOutcome::ReachedAt(hi))
}

/// Irrep weights of a state under a projector family summing to the
/// identity: `weights[k] = Tr[P_k rho]` and `amplitudes[k] = sqrt` of
/// that, clamped at zero.
#[derive(Debug, Clone)]
pub struct SymmetrizedState {
    pub weights: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

pub fn symmetrize_reduced(
    rho: &Array2<C64>,
    projectors: &[Array2<C64>],
) -> Result<SymmetrizedState> {
    if projectors.is_empty() {
        return Err(Error::Validation("empty projector family".into()));
    }
    let n = rho.nrows();
    let mut sum = Array2::<C64>::zeros((n, n));
    for p in projectors {
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::Dimension("projector dimension mismatch".into()));
        }
        sum = &sum + p;
    }
    if max_abs_diff(&sum, &Array2::<C64>::eye(n)) > 1e-10 {
        return Err(Error::Validation(
            "projectors not a resolution of identity".into(),
        ));
    }
    let mut weights = Vec::with_capacity(projectors.len());
    for p in projectors {
        let mut w = 0.0;
        for i in 0..n {
            for j in 0..n {
                w += (p[[i, j]] * rho[[j, i]]).re;
            }
        }
        weights.push(w);
    }
    let amplitudes = weights.iter().map(|w| w.max(0.0).sqrt()).collect();
    Ok(SymmetrizedState {
        weights,
        amplitudes,
    })
}

/// Helper: |v> with a 1 at `index`.
pub fn basis_state(dim: usize, index: usize) -> Array1<C64> {
    let mut v = Array1::<C64>::zeros(dim);
    v[index] = cr(1.0);
    v
}

/// Helper: uniform unit superposition.
pub fn uniform_state(dim: usize) -> Array1<C64> {
    Array1::from_elem(dim, cr(1.0 / (dim as f64).sqrt()))
}

/// Trace-conservation audit used by tests and the verification CLI.
pub fn max_trace_drift(traj: &[ProtocolState]) -> f64 {
    traj.iter()
        .map(|s| (trace(&s.rho).re - 1.0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_hermitian, kron, random_unitary};
    use ndarray::array;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn continuous_problem_zero_h(dim_a: usize, dim_m: usize) -> OracleProblem {
        OracleProblem {
            dim_a,
            dim_m,
            dim_m_prime: dim_a,
            psi0: uniform_state(dim_a),
            phase_table: PhaseTable::Continuous {
                phases: Array2::zeros((dim_a, dim_m)),
            },
            verifiers: vec![],
            measurement: MeasurementModel::Unsupported,
        }
    }

    #[test]
    fn validate_rejects_bad_inputs() {
        let mut p = continuous_problem_zero_h(2, 2);
        p.psi0 = array![cr(1.0), cr(1.0)];
        let err = validate_problem(p).unwrap_err();
        assert!(err.to_string().contains("psi0 not unit norm"));

        let mut p = continuous_problem_zero_h(2, 2);
        p.verifiers = vec![array![
            [cr(1.0), cr(0.0), cr(0.0), cr(0.0)],
            [cr(0.0), cr(-0.5), cr(0.0), cr(0.0)],
            [cr(0.0), cr(0.0), cr(1.0), cr(0.0)],
            [cr(0.0), cr(0.0), cr(0.0), cr(1.0)]
        ]];
        let err = validate_problem(p).unwrap_err();
        assert!(err.to_string().contains("verifier not PSD"));

        let p = OracleProblem {
            phase_table: PhaseTable::Discrete {
                phases: Array2::from_elem((2, 2), cr(0.5)),
                delta: 1.0,
            },
            ..continuous_problem_zero_h(2, 2)
        };
        let err = validate_problem(p).unwrap_err();
        assert!(err.to_string().contains("not unimodular"));

        let p = continuous_problem_zero_h(2, 2);
        assert!(validate_problem(p).is_ok());
    }

    #[test]
    fn zero_steps_discrete_returns_initial_state() {
        let p = OracleProblem {
            phase_table: PhaseTable::Discrete {
                phases: Array2::from_elem((2, 2), cr(1.0)),
                delta: 1.0,
            },
            ..continuous_problem_zero_h(2, 2)
        };
        let controls = FullControlSchedule::new(2, 1, None, vec![]).unwrap();
        let traj = evolve_discrete(&p, &controls).unwrap();
        assert_eq!(traj.len(), 1);
        let mut expect = Array2::<C64>::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                expect[[i, j]] = p.psi0[i] * p.psi0[j].conj();
            }
        }
        assert!(max_abs_diff(&traj[0].rho, &expect) < 1e-14);
    }

    #[test]
    fn zero_hamiltonian_leaves_reduced_state_fixed() {
        let p = continuous_problem_zero_h(3, 2);
        let mut rng = StdRng::seed_from_u64(5);
        let steps: Vec<_> = (0..40).map(|_| random_unitary(4, &mut rng)).collect();
        let controls = FullControlSchedule::new(2, 2, Some(random_unitary(4, &mut rng)), steps)
            .unwrap();
        let traj = evolve_continuous(&p, &controls, 0.01).unwrap();
        for s in &traj {
            assert!(max_abs_diff(&s.rho, &traj[0].rho) < 1e-10);
        }
        assert!(max_trace_drift(&traj) < 1e-12);
    }

    #[test]
    fn purification_consistency_under_random_controls() {
        let p = OracleProblem {
            phase_table: PhaseTable::Continuous {
                phases: array![[0.0, 1.3], [0.7, -0.4], [0.2, 2.0]],
            },
            ..continuous_problem_zero_h(3, 2)
        };
        let mut rng = StdRng::seed_from_u64(9);
        let steps: Vec<_> = (0..25).map(|_| random_unitary(4, &mut rng)).collect();
        let controls = FullControlSchedule::new(2, 2, None, steps).unwrap();

        // Rebuild the global state by replaying and compare both partial
        // traces at the end of the run.
        let dim_mb = 4;
        let mut psi = initial_global_state(&p, &controls);
        let half = Array2::from_shape_fn((3, 2), |(a, m)| {
            cis(-match &p.phase_table {
                PhaseTable::Continuous { phases } => phases[[a, m]],
                _ => unreachable!(),
            } * 0.005)
        });
        for step in &controls.steps {
            apply_phase_factors(&mut psi, &half, 3, 2, 2);
            apply_query_side(&mut psi, step, 3, dim_mb);
            apply_phase_factors(&mut psi, &half, 3, 2, 2);
        }
        let rho_a = reduced_state_a(&psi, 3, dim_mb);
        let rho_am = reduced_state_am(&psi, 3, 2, 2);
        // Tr_M of the A x M marginal must reproduce the A marginal.
        let mut rho_a_from_am = Array2::<C64>::zeros((3, 3));
        for z in 0..3 {
            for z2 in 0..3 {
                for m in 0..2 {
                    rho_a_from_am[[z, z2]] += rho_am[[z * 2 + m, z2 * 2 + m]];
                }
            }
        }
        assert!(max_abs_diff(&rho_a, &rho_a_from_am) < 1e-9);

        let traj = evolve_continuous(&p, &controls, 0.01).unwrap();
        assert!(max_abs_diff(&traj.last().unwrap().rho, &rho_a) < 1e-12);
    }

    #[test]
    fn worst_case_pwin_examples() {
        // Perfectly correlated answer state with matched verifiers.
        let n = 3;
        let mut p = continuous_problem_zero_h(n, 2);
        p.dim_m_prime = n;
        let mut rho = Array2::<C64>::zeros((n * n, n * n));
        let mut verifiers = Vec::new();
        for x in 0..n {
            let idx = x * n + x;
            rho[[idx, idx]] = cr(1.0 / n as f64);
            let mut v = Array2::<C64>::zeros((n * n, n * n));
            v[[idx, idx]] = cr(n as f64);
            verifiers.push(v);
        }
        p.verifiers = verifiers.clone();
        assert!((pwin_worst_case(&rho, &p).unwrap() - 1.0).abs() < 1e-12);

        // Fully mixed answer state: 1/N for these verifiers.
        let mixed = Array2::<C64>::eye(n * n).mapv(|z| z * cr(1.0 / (n * n) as f64));
        assert!((pwin_worst_case(&mixed, &p).unwrap() - 1.0 / n as f64).abs() < 1e-12);

        // All weight on wrong answers.
        let mut wrong = Array2::<C64>::zeros((n * n, n * n));
        wrong[[1, 1]] = cr(1.0); // hidden 0 answered as 1
        assert!(pwin_worst_case(&wrong, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pgm_measurement_on_symmetric_family() {
        // rho = x |u><u| + (1-x)/(N-1) (I - |u><u|) with u uniform.
        let n = 4usize;
        let build = |x: f64| {
            let u = uniform_state(n);
            let mut rho = Array2::<C64>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    let pu = u[i] * u[j].conj();
                    let pi = if i == j { cr(1.0) } else { cr(0.0) };
                    rho[[i, j]] =
                        pu * cr(x) + (pi - pu) * cr((1.0 - x) / (n as f64 - 1.0));
                }
            }
            ProtocolState { rho, t: 0.0 }
        };
        let mut p = continuous_problem_zero_h(n, n);
        p.measurement = MeasurementModel::SymmetricPure;
        let mut verifiers = Vec::new();
        for x in 0..n {
            let idx = x * n + x;
            let mut v = Array2::<C64>::zeros((n * n, n * n));
            v[[idx, idx]] = cr(n as f64);
            verifiers.push(v);
        }
        p.verifiers = verifiers;

        let (pwin, achieving) = optimal_final_measurement(&build(0.25), &p).unwrap();
        assert!((pwin - 1.0).abs() < 1e-10);
        assert!((pwin_worst_case(&achieving, &p).unwrap() - pwin).abs() < 1e-9);

        let (pwin, achieving) = optimal_final_measurement(&build(1.0), &p).unwrap();
        assert!((pwin - 0.25).abs() < 1e-10);
        assert!((pwin_worst_case(&achieving, &p).unwrap() - pwin).abs() < 1e-9);
    }

    #[test]
    fn helstrom_measurement_on_parity_problem() {
        // Two hidden bits; discriminate even from odd parity.  A state
        // supported on the middle label weight is perfectly decidable.
        let n = 4usize;
        let h = |s: usize, z: usize| -> f64 {
            let bits = (s & z).count_ones();
            if bits % 2 == 0 { 0.5 } else { -0.5 }
        };
        // Projector onto the two weight-1 label vectors.
        let mut rho = Array2::<C64>::zeros((n, n));
        for &s in &[1usize, 2] {
            for z in 0..n {
                for z2 in 0..n {
                    rho[[z, z2]] += cr(h(s, z) * h(s, z2) / 2.0);
                }
            }
        }
        let mut proj0 = Array2::<C64>::zeros((n, n));
        let mut proj1 = Array2::<C64>::zeros((n, n));
        for z in 0..n {
            if (z as u32).count_ones() % 2 == 0 {
                proj0[[z, z]] = cr(1.0);
            } else {
                proj1[[z, z]] = cr(1.0);
            }
        }
        let mut p = continuous_problem_zero_h(n, 2);
        p.dim_m_prime = 2;
        let mut verifiers = Vec::new();
        for k in 0..2usize {
            let pk = if k == 0 { &proj0 } else { &proj1 };
            let mut sel = Array2::<C64>::zeros((2, 2));
            sel[[k, k]] = cr(1.0);
            verifiers.push(kron(pk, &sel).mapv(|z| z * cr(2.0)));
        }
        p.verifiers = verifiers;
        p.measurement = MeasurementModel::Binary { proj0, proj1 };

        let state = ProtocolState { rho, t: 0.0 };
        let (pwin, achieving) = optimal_final_measurement(&state, &p).unwrap();
        assert!((pwin - 1.0).abs() < 1e-10);
        assert!((pwin_worst_case(&achieving, &p).unwrap() - 1.0).abs() < 1e-9);
        assert!(is_hermitian(&achieving, 1e-12));
    }

    #[test]
    fn distinguish_times_for_canonical_pairs() {
        let d0 = [0.0, 0.0, 0.0];
        match min_distinguish_time(&d0, &[0.0, std::f64::consts::PI, std::f64::consts::PI])
            .unwrap()
        {
            DistinguishOutcome::ReachedAt(t) => assert!((t - 1.0).abs() < 1e-6),
            _ => panic!("expected reachable"),
        }
        match min_distinguish_time(&d0, &[0.0, std::f64::consts::PI, -std::f64::consts::PI])
            .unwrap()
        {
            DistinguishOutcome::ReachedAt(t) => assert!((t - 0.5).abs() < 1e-6),
            _ => panic!("expected reachable"),
        }
        match min_distinguish_time(&d0, &[0.0, 0.0, 0.0]).unwrap() {
            DistinguishOutcome::NotReachable { t_max } => assert_eq!(t_max, 10.0),
            _ => panic!("expected not reachable"),
        }
    }

    #[test]
    fn distinguish_time_scales_inversely_with_phase_gaps() {
        let d0 = [0.0, 0.0, 0.0];
        for s in [0.5f64, 2.0] {
            let d1: Vec<f64> = [0.0, std::f64::consts::PI, std::f64::consts::PI]
                .iter()
                .map(|x| x * s)
                .collect();
            match min_distinguish_time(&d0, &d1).unwrap() {
                DistinguishOutcome::ReachedAt(t) => assert!((t - 1.0 / s).abs() < 1e-6),
                _ => panic!("expected reachable"),
            }
        }
    }

    #[test]
    fn symmetrize_reads_off_projector_weights() {
        // Two-dimensional example with the uniform/anti-uniform split.
        let u = uniform_state(2);
        let mut pu = Array2::<C64>::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                pu[[i, j]] = u[i] * u[j].conj();
            }
        }
        let pm = &Array2::<C64>::eye(2) - &pu;
        let rho = Array2::<C64>::eye(2).mapv(|z| z * cr(0.5));
        let s = symmetrize_reduced(&rho, &[pu.clone(), pm.clone()]).unwrap();
        assert!((s.weights[0] - 0.5).abs() < 1e-12);
        assert!((s.weights[1] - 0.5).abs() < 1e-12);

        let bad = vec![pu.clone(), pu];
        assert!(symmetrize_reduced(&rho, &bad).is_err());
    }
}
