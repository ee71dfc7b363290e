//! Derivative-free search over admissible piecewise-constant controls
//! of the reduced ladder dynamics.
//!
//! The optimizer is a projected pattern search: single-coordinate moves
//! of a shrinking step, with every proposal pulled back radially onto
//! the per-index disc `b_j^2 + c_j^2 <= 1`.  Radial pullback doubles as
//! a tangential move for iterates sitting on the disc boundary, so the
//! search can slide along the constraint surface where the optima live.
//! Restart 0 starts from the query-bits-sequentially baseline, the
//! remaining restarts from uniform-random admissible controls, and
//! coarse solutions are refined through a segment-doubling ladder so a
//! long horizon is shaped at low resolution before fine polishing.

use crate::interrogation::{
    min_time_lower_bound, sequential_schedule, target_vector, ObjectiveKind, Schedule, Segment,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

/// Coarsest rung of the segment-doubling ladder.
const LADDER_FLOOR: usize = 25;
/// Hard cap on sweeps per rung; reached only on pathological plateaus.
const MAX_PASSES: usize = 400;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_bits: usize,
    pub segments: usize,
    pub horizon: f64,
    pub objective: ObjectiveKind,
    pub restarts: usize,
    pub seed: u64,
    /// Step floor of the pattern search and the slack allowed in the
    /// refinement-monotonicity property.
    pub tolerance: f64,
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.n_bits == 0 || self.n_bits > 12 {
            return Err(Error::Validation(format!(
                "n_bits = {} outside the supported range 1..=12",
                self.n_bits
            )));
        }
        if self.segments == 0 {
            return Err(Error::Validation("segments must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Validation("restarts must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Validation(format!(
                "horizon T = {} must be positive and finite",
                self.horizon
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Validation(format!(
                "tolerance = {} must be positive and finite",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_controls: Schedule,
    pub best_pwin: f64,
    /// Running best across restarts, in restart order; non-decreasing.
    pub history: Vec<f64>,
}

/// Success functional evaluated directly on a coordinate slice; agrees
/// with `interrogation::pwin_objective` and skips per-call target
/// reconstruction inside the optimizer's inner loop.
enum FastObjective {
    Interrogation { target: Vec<f64> },
    Xor,
}

impl FastObjective {
    fn new(kind: ObjectiveKind, n_bits: usize) -> Self {
        match kind {
            ObjectiveKind::Interrogation => Self::Interrogation {
                target: target_vector(n_bits).a,
            },
            ObjectiveKind::Xor => Self::Xor,
        }
    }

    fn value(&self, a: &[f64]) -> f64 {
        match self {
            Self::Interrogation { target } => {
                let dot: f64 = a.iter().zip(target).map(|(x, f)| x.abs() * f).sum();
                dot * dot
            }
            Self::Xor => {
                let n = a.len() - 1;
                let sum: f64 = (0..=n).map(|j| (a[j] * a[n - j]).abs()).sum();
                0.5 + 0.5 * sum
            }
        }
    }
}

/// Radial pullback onto the unit disc.
fn clamp_disc(b: f64, c: f64) -> (f64, f64) {
    let r2 = b * b + c * c;
    if r2 > 1.0 {
        let s = r2.sqrt().recip();
        (b * s, c * s)
    } else {
        (b, c)
    }
}

/// `a <- exp(M dt) a` for the antisymmetric tridiagonal generator with
/// couplings `(pi/2) b_j c_{j+1}`.  Two and three coordinates rotate in
/// closed form; larger ladders go through a scaled Taylor exponential.
fn propagate(n: usize, a: &mut [f64], b: &[f64], c: &[f64], dt: f64) {
    match n {
        1 => {
            let ang = FRAC_PI_2 * b[0] * c[1] * dt;
            let (s, co) = ang.sin_cos();
            let (x, y) = (a[0], a[1]);
            a[0] = co * x - s * y;
            a[1] = s * x + co * y;
        }
        2 => {
            // The generator acts as omega x a with omega = (g1, 0, g0);
            // apply the axis-angle rotation directly.
            let w3 = FRAC_PI_2 * b[0] * c[1] * dt;
            let w1 = FRAC_PI_2 * b[1] * c[2] * dt;
            let ang = (w1 * w1 + w3 * w3).sqrt();
            if ang < 1e-300 {
                return;
            }
            let (k1, k3) = (w1 / ang, w3 / ang);
            let (s, co) = ang.sin_cos();
            let (x, y, z) = (a[0], a[1], a[2]);
            let dot = k1 * x + k3 * z;
            let oc = 1.0 - co;
            a[0] = x * co - k3 * y * s + k1 * dot * oc;
            a[1] = y * co + (k3 * x - k1 * z) * s;
            a[2] = z * co + k1 * y * s + k3 * dot * oc;
        }
        _ => propagate_exp(n, a, b, c, dt),
    }
}

fn matmul(d: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    for i in 0..d {
        for q in 0..d {
            let mut acc = 0.0;
            for p in 0..d {
                acc += a[i * d + p] * b[p * d + q];
            }
            out[i * d + q] = acc;
        }
    }
}

/// Scaling-and-squaring Taylor exponential applied to `a`; the series
/// is cut when terms fall below 1e-16, exact to roundoff for the
/// sub-unit-norm scaled generator.
fn propagate_exp(n: usize, a: &mut [f64], b: &[f64], c: &[f64], dt: f64) {
    let d = n + 1;
    let mut x = vec![0.0; d * d];
    let mut gmax = 0.0f64;
    for j in 0..n {
        let v = FRAC_PI_2 * b[j] * c[j + 1] * dt;
        x[j * d + j + 1] = -v;
        x[(j + 1) * d + j] = v;
        gmax = gmax.max(v.abs());
    }
    let norm = 2.0 * gmax;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 0 {
        let scale = 0.5f64.powi(squarings);
        for v in x.iter_mut() {
            *v *= scale;
        }
    }
    let mut e = vec![0.0; d * d];
    for i in 0..d {
        e[i * d + i] = 1.0;
    }
    let mut term = e.clone();
    let mut next = vec![0.0; d * d];
    for order in 1..=24 {
        matmul(d, &term, &x, &mut next);
        let inv = 1.0 / order as f64;
        let mut tmax = 0.0f64;
        for (t, v) in term.iter_mut().zip(next.iter()) {
            *t = v * inv;
            tmax = tmax.max(t.abs());
        }
        for (ei, ti) in e.iter_mut().zip(term.iter()) {
            *ei += ti;
        }
        if tmax < 1e-16 {
            break;
        }
    }
    for _ in 0..squarings {
        matmul(d, &e, &e, &mut next);
        std::mem::swap(&mut e, &mut next);
    }
    let y: Vec<f64> = (0..d)
        .map(|i| (0..d).map(|p| e[i * d + p] * a[p]).sum())
        .collect();
    a.copy_from_slice(&y);
}

/// Dense per-segment control table: row i holds `b` and `c` for the
/// i-th of `k` equal slices of the horizon.
#[derive(Clone)]
struct Flat {
    n: usize,
    k: usize,
    horizon: f64,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Flat {
    fn zeros(n: usize, k: usize, horizon: f64) -> Self {
        Self {
            n,
            k,
            horizon,
            b: vec![0.0; k * (n + 1)],
            c: vec![0.0; k * (n + 1)],
        }
    }

    fn dt(&self) -> f64 {
        self.horizon / self.k as f64
    }

    fn pair(&self, i: usize, j: usize) -> (f64, f64) {
        let idx = i * (self.n + 1) + j;
        (self.b[idx], self.c[idx])
    }

    fn set_pair(&mut self, i: usize, j: usize, b: f64, c: f64) {
        let idx = i * (self.n + 1) + j;
        self.b[idx] = b;
        self.c[idx] = c;
    }

    fn apply_segment(&self, i: usize, a: &mut [f64]) {
        let d = self.n + 1;
        let row = i * d;
        propagate(
            self.n,
            a,
            &self.b[row..row + d],
            &self.c[row..row + d],
            self.dt(),
        );
    }

    /// Objective after running segments `i0..k` from `a_start`.
    fn eval_suffix(&self, i0: usize, a_start: &[f64], obj: &FastObjective, scratch: &mut [f64]) -> f64 {
        scratch.copy_from_slice(a_start);
        for i in i0..self.k {
            self.apply_segment(i, scratch);
        }
        obj.value(scratch)
    }

    fn to_schedule(&self) -> Schedule {
        let d = self.n + 1;
        let dt = self.dt();
        let segments = (0..self.k)
            .map(|i| Segment {
                duration: dt,
                b: self.b[i * d..(i + 1) * d].to_vec(),
                c: self.c[i * d..(i + 1) * d].to_vec(),
            })
            .collect();
        Schedule::new(segments)
    }
}

/// Midpoint-samples a piecewise-constant schedule onto `k` equal slices
/// of `horizon`; source durations are read as fractions of the source
/// total, so the same call also rescales a schedule to a new horizon.
fn resample(src: &Schedule, n: usize, k: usize, horizon: f64) -> Flat {
    let total = src.total_duration();
    let mut flat = Flat::zeros(n, k, horizon);
    let d = n + 1;
    let mut src_idx = 0;
    let mut src_end = src.segments[0].duration;
    for i in 0..k {
        let tau = (i as f64 + 0.5) / k as f64 * total;
        while tau > src_end && src_idx + 1 < src.segments.len() {
            src_idx += 1;
            src_end += src.segments[src_idx].duration;
        }
        let seg = &src.segments[src_idx];
        flat.b[i * d..(i + 1) * d].copy_from_slice(&seg.b);
        flat.c[i * d..(i + 1) * d].copy_from_slice(&seg.c);
    }
    flat
}

/// Uniform-random admissible controls: each index draws a point of the
/// unit disc, with the inert components (`c_0`, `b_n`) zeroed.
fn random_flat(n: usize, k: usize, horizon: f64, seed: u64) -> Flat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flat = Flat::zeros(n, k, horizon);
    for i in 0..k {
        for j in 0..=n {
            let psi = rng.random_range(0.0..TAU);
            let r = rng.random_range(0.0f64..1.0).sqrt();
            let (mut b, mut c) = (r * psi.cos(), r * psi.sin());
            if j == 0 {
                c = 0.0;
            }
            if j == n {
                b = 0.0;
            }
            flat.set_pair(i, j, b, c);
        }
    }
    flat
}

/// Coordinate pattern search with radial disc projection.  A sweep
/// proposes `+-step` on every live control (inert `c_0`/`b_n` are
/// skipped); the step halves after a sweep without an accepted move
/// and the search stops below `step_floor`.  Sweeps reuse the running
/// prefix state, so a proposal at segment i only re-propagates the
/// suffix.
fn pattern_search(flat: &mut Flat, obj: &FastObjective, start_step: f64, step_floor: f64) -> f64 {
    let n = flat.n;
    let d = n + 1;
    let mut a0 = vec![0.0; d];
    a0[0] = 1.0;
    let mut prefix = vec![0.0; d];
    let mut scratch = vec![0.0; d];
    let mut best = flat.eval_suffix(0, &a0, obj, &mut scratch);
    let mut step = start_step;
    let mut passes = 0;
    while step >= step_floor && passes < MAX_PASSES {
        passes += 1;
        let mut improved = false;
        prefix.copy_from_slice(&a0);
        for i in 0..flat.k {
            for j in 0..=n {
                for is_b in [true, false] {
                    if (is_b && j == n) || (!is_b && j == 0) {
                        continue;
                    }
                    for dir in [step, -step] {
                        let (ob, oc) = flat.pair(i, j);
                        let (nb, nc) = if is_b {
                            clamp_disc(ob + dir, oc)
                        } else {
                            clamp_disc(ob, oc + dir)
                        };
                        flat.set_pair(i, j, nb, nc);
                        let val = flat.eval_suffix(i, &prefix, obj, &mut scratch);
                        if val > best + 1e-12 {
                            best = val;
                            improved = true;
                            break;
                        }
                        flat.set_pair(i, j, ob, oc);
                    }
                }
            }
            flat.apply_segment(i, &mut prefix);
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Rungs of the segment-doubling ladder ending at `segments`.
fn ladder(segments: usize) -> Vec<usize> {
    let mut rungs = vec![segments];
    let mut s = segments;
    while s % 2 == 0 && s / 2 >= LADDER_FLOOR {
        s /= 2;
        rungs.push(s);
    }
    rungs.reverse();
    rungs
}

fn restart_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

enum Start {
    Baseline,
    Warm(Schedule),
    Random(u64),
}

fn run_restart(cfg: &SearchConfig, obj: &FastObjective, start: &Start) -> (f64, Flat) {
    let floor = cfg.tolerance.max(1e-6);
    match start {
        // A warm schedule is already shaped; polish at full resolution.
        Start::Warm(s) => {
            let mut flat = resample(s, cfg.n_bits, cfg.segments, cfg.horizon);
            let best = pattern_search(&mut flat, obj, 0.125, floor);
            (best, flat)
        }
        _ => {
            let rungs = ladder(cfg.segments);
            let mut flat = match start {
                Start::Baseline => resample(
                    &sequential_schedule(cfg.n_bits, cfg.horizon),
                    cfg.n_bits,
                    rungs[0],
                    cfg.horizon,
                ),
                Start::Random(seed) => random_flat(cfg.n_bits, rungs[0], cfg.horizon, *seed),
                Start::Warm(_) => unreachable!(),
            };
            let mut best = pattern_search(&mut flat, obj, 0.25, floor);
            for &r in &rungs[1..] {
                flat = resample(&flat.to_schedule(), cfg.n_bits, r, cfg.horizon);
                best = pattern_search(&mut flat, obj, 0.125, floor);
            }
            (best, flat)
        }
    }
}

fn optimize_with_seeds(cfg: &SearchConfig, warm: &[Schedule]) -> Result<SearchResult> {
    cfg.validate()?;
    let obj = FastObjective::new(cfg.objective, cfg.n_bits);
    let total = cfg.restarts.max(1 + warm.len());
    let starts: Vec<Start> = (0..total)
        .map(|i| {
            if i == 0 {
                Start::Baseline
            } else if i <= warm.len() {
                Start::Warm(warm[i - 1].clone())
            } else {
                Start::Random(restart_seed(cfg.seed, i))
            }
        })
        .collect();
    let outcomes: Vec<(f64, Flat)> = starts
        .par_iter()
        .map(|s| run_restart(cfg, &obj, s))
        .collect();
    let mut history = Vec::with_capacity(outcomes.len());
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, (pwin, _)) in outcomes.iter().enumerate() {
        if *pwin > best {
            best = *pwin;
            best_idx = i;
        }
        history.push(best);
    }
    let best_controls = outcomes[best_idx].1.to_schedule();
    best_controls.validate(cfg.n_bits)?;
    Ok(SearchResult {
        best_controls,
        best_pwin: best,
        history,
    })
}

/// Maximizes the chosen success functional over admissible schedules on
/// the configured horizon.  Deterministic for a fixed config: restarts
/// draw independent streams from the seed and merge by best value.
pub fn optimize_controls(cfg: &SearchConfig) -> Result<SearchResult> {
    optimize_with_seeds(cfg, &[])
}

/// Certified numeric upper bound on the minimal horizon reaching
/// `target_pwin`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperBound {
    /// Smallest feasible horizon found, on a 1e-3 bisection grid.
    pub time: f64,
    /// Optimizer value certifying feasibility at `time`.
    pub pwin: f64,
    /// Analytic lower bound for the same target, for the sandwich.
    pub lower_bound: f64,
    pub certificate: Schedule,
}

/// Bisects the horizon to the smallest value (grid resolution 1e-3)
/// where the optimizer reaches `target_pwin`.  The scan starts at the
/// analytic lower bound and grows geometrically until feasible; each
/// probe warm-starts from the best schedule found so far, rescaled to
/// the probe horizon.  `template.horizon` is ignored.
///
/// Fails honestly if the optimizer cannot certify the target even at
/// the horizon `T = n_bits`, the time at which discrete bit-by-bit
/// readout is exact.
pub fn min_time_upper_bound(
    n_bits: usize,
    target_pwin: f64,
    template: &SearchConfig,
) -> Result<UpperBound> {
    if !(target_pwin > 0.5 && target_pwin <= 1.0 - 1e-6) {
        return Err(Error::Validation(format!(
            "target probability {target_pwin} outside (1/2, 1 - 1e-6]"
        )));
    }
    let mut cfg = template.clone();
    cfg.n_bits = n_bits;
    let lower = min_time_lower_bound(n_bits, target_pwin).time;
    let t_max = n_bits as f64;
    let mut lo = (lower - 1e-9).max(0.0);
    let mut warm: Vec<Schedule> = Vec::new();
    let mut t = lower.max(0.05).min(t_max);
    let (mut hi, mut hi_pwin, mut certificate) = loop {
        cfg.horizon = t;
        let res = optimize_with_seeds(&cfg, &warm)?;
        if res.best_pwin >= target_pwin {
            break (t, res.best_pwin, res.best_controls);
        }
        lo = t;
        warm = vec![res.best_controls];
        if t >= t_max {
            return Err(Error::Numerical(format!(
                "optimizer reached only {:.6} < target {} at T_max = {}",
                res.best_pwin, target_pwin, t_max
            )));
        }
        t = (t * 1.25).min(t_max);
    };
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        cfg.horizon = mid;
        let mut seeds = vec![certificate.clone()];
        seeds.extend(warm.iter().cloned());
        let res = optimize_with_seeds(&cfg, &seeds)?;
        if res.best_pwin >= target_pwin {
            hi = mid;
            hi_pwin = res.best_pwin;
            certificate = res.best_controls;
        } else {
            lo = mid;
            warm = vec![res.best_controls];
        }
    }
    Ok(UpperBound {
        time: hi,
        pwin: hi_pwin,
        lower_bound: lower,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interrogation::{final_state, pwin_objective, SphereState};

    fn cfg(n: usize, segments: usize, horizon: f64, restarts: usize, seed: u64) -> SearchConfig {
        SearchConfig {
            n_bits: n,
            segments,
            horizon,
            objective: ObjectiveKind::Interrogation,
            restarts,
            seed,
            tolerance: 1e-4,
        }
    }

    #[test]
    fn fast_objective_matches_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=5 {
            for _ in 0..20 {
                let mut a: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in a.iter_mut() {
                    *x /= norm;
                }
                let s = SphereState::new(a.clone(), 0.0).unwrap();
                for kind in [ObjectiveKind::Interrogation, ObjectiveKind::Xor] {
                    let fast = FastObjective::new(kind, n).value(&a);
                    assert!((fast - pwin_objective(&s, kind)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn fast_propagation_matches_reduced_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=4 {
            let flat = random_flat(n, 7, 0.83, rng.random());
            let schedule = flat.to_schedule();
            let end = final_state(&SphereState::initial(n), &schedule).unwrap();
            let mut a = vec![0.0; n + 1];
            a[0] = 1.0;
            for i in 0..flat.k {
                flat.apply_segment(i, &mut a);
            }
            for (fast, slow) in a.iter().zip(end.a.iter()) {
                assert!((fast - slow).abs() < 1e-10, "n = {n}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn disc_projection_is_radial_and_admissible() {
        let (b, c) = clamp_disc(0.8, 0.9);
        assert!((b * b + c * c - 1.0).abs() < 1e-14);
        assert!((b / c - 0.8 / 0.9).abs() < 1e-14);
        assert_eq!(clamp_disc(0.3, -0.2), (0.3, -0.2));
    }

    #[test]
    fn one_bit_full_horizon_reaches_unity() {
        let res = optimize_controls(&cfg(1, 20, 0.5, 2, 11)).unwrap();
        assert!(res.best_pwin >= 1.0 - 1e-4, "best {}", res.best_pwin);
        assert_eq!(res.history.len(), 2);
        assert!(res.history.windows(2).all(|w| w[1] >= w[0]));
        res.best_controls.validate(1).unwrap();
    }

    #[test]
    fn one_bit_short_horizon_capped_by_closed_form() {
        // Max-rate rotation for time T puts the optimum at
        // (1 + sin(pi T)) / 2.
        let bound = 0.5 * (1.0 + (std::f64::consts::PI * 0.25).sin());
        let res = optimize_controls(&cfg(1, 16, 0.25, 3, 7)).unwrap();
        assert!(res.best_pwin <= bound + 1e-6, "best {}", res.best_pwin);
        assert!(res.best_pwin >= bound - 1e-3, "best {}", res.best_pwin);
    }

    #[test]
    fn search_is_deterministic() {
        let a = optimize_controls(&cfg(2, 12, 0.6, 3, 42)).unwrap();
        let b = optimize_controls(&cfg(2, 12, 0.6, 3, 42)).unwrap();
        assert_eq!(a.best_pwin.to_bits(), b.best_pwin.to_bits());
        assert_eq!(a.best_controls.to_json(), b.best_controls.to_json());
    }

    #[test]
    fn refinement_never_loses_more_than_tolerance() {
        let coarse = optimize_controls(&cfg(1, 10, 0.4, 2, 5)).unwrap();
        let fine = optimize_controls(&cfg(1, 20, 0.4, 2, 5)).unwrap();
        assert!(fine.best_pwin >= coarse.best_pwin - 1e-4);
    }

    #[test]
    fn xor_objective_beats_coin_flip() {
        let mut c = cfg(2, 20, 0.5, 2, 3);
        c.objective = ObjectiveKind::Xor;
        let res = optimize_controls(&c).unwrap();
        assert!(res.best_pwin > 0.55, "best {}", res.best_pwin);
        assert!(res.best_pwin <= 1.0 + 1e-12);
        res.best_controls.validate(2).unwrap();
    }

    #[test]
    fn upper_bound_for_one_bit_matches_closed_form() {
        // sin(pi T) = 2 * 0.999 - 1 crosses at T ~ 0.47987.
        let ub = min_time_upper_bound(1, 0.999, &cfg(1, 24, 1.0, 2, 5)).unwrap();
        assert!(ub.time >= 0.4798 && ub.time <= 0.50, "time {}", ub.time);
        assert!(ub.pwin >= 0.999);
        assert!(ub.time >= ub.lower_bound - 1e-9);
        ub.certificate.validate(1).unwrap();
    }

    #[test]
    fn three_bit_sandwich_is_consistent() {
        let ub = min_time_upper_bound(3, 0.99, &cfg(3, 32, 1.0, 2, 3)).unwrap();
        assert!(ub.lower_bound <= ub.time + 1e-9);
        assert!(ub.time <= 3.0);
        assert!(ub.pwin >= 0.99);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(optimize_controls(&cfg(0, 10, 0.5, 1, 0)).is_err());
        assert!(optimize_controls(&cfg(1, 0, 0.5, 1, 0)).is_err());
        assert!(optimize_controls(&cfg(1, 10, -0.5, 1, 0)).is_err());
        assert!(optimize_controls(&cfg(1, 10, 0.5, 0, 0)).is_err());
        assert!(min_time_upper_bound(1, 0.4, &cfg(1, 10, 0.5, 1, 0)).is_err());
        assert!(min_time_upper_bound(1, 1.0, &cfg(1, 10, 0.5, 1, 0)).is_err());
    }
}
