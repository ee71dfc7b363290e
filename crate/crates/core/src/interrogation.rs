//! Hidden-bitstring interrogation and parity (XOR) queries.
//!
//! Symmetry collapses the full game on n hidden bits to a unit vector
//! `a = (a_0..a_n)` on the n-sphere: `a_j^2` is the weight the reduced
//! state carries on Hadamard labels of Hamming weight j.  Queries move
//! weight along the ladder `j <-> j+1` through the antisymmetric
//! tridiagonal generator built from per-index control amplitudes
//! `(b_j, c_j)` constrained by `b_j^2 + c_j^2 <= 1`.  This module holds
//! the reduced dynamics, the success-probability functionals, the
//! discrete-query achievable set, analytic lower bounds, and the bridge
//! back to the full-Hilbert-space model of [`crate::oracle`].

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::gamma::ln_gamma;

use crate::linalg::{cr, AntisymmetricExp, C64};
use crate::oracle::{
    uniform_state, ExtensionMap, FullControlSchedule, MeasurementModel, OracleProblem,
    PhaseTable,
};
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Reduced protocol state: a point on S^n plus its timestamp.
///
/// Points differing by per-coordinate sign flips describe the same
/// reduced density operator, so every probability functional here is
/// maximized over that orbit.
#[derive(Debug, Clone)]
pub struct SphereState {
    pub a: Vec<f64>,
    pub n_bits: usize,
    pub t: f64,
}

impl SphereState {
    /// Validates unit norm (within 1e-10) and infers `n_bits` from the
    /// coordinate count.
    pub fn new(a: Vec<f64>, t: f64) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::Validation(
                "state needs at least two coordinates".into(),
            ));
        }
        let norm2: f64 = a.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "state not unit norm (|a|^2 = {norm2})"
            )));
        }
        let n_bits = a.len() - 1;
        Ok(Self { a, n_bits, t })
    }

    /// The protocol start `(1, 0, .., 0)`: no weight moved yet.
    pub fn initial(n_bits: usize) -> Self {
        let mut a = vec![0.0; n_bits + 1];
        a[0] = 1.0;
        Self { a, n_bits, t: 0.0 }
    }
}

/// One piecewise-constant control interval.  `b` and `c` both have
/// length `n_bits + 1`; index j is constrained by `b_j^2 + c_j^2 <= 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

/// A full schedule: consecutive segments.  Serializes as a bare JSON
/// array of `{duration, b, c}` objects.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Checks segment shapes against `n_bits`, positive durations, and
    /// the per-index disc constraint.
    pub fn validate(&self, n_bits: usize) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Validation("schedule has no segments".into()));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.b.len() != n_bits + 1 || seg.c.len() != n_bits + 1 {
                return Err(Error::Dimension(format!(
                    "segment {i} control vectors must have length {}",
                    n_bits + 1
                )));
            }
            if !(seg.duration > 0.0) {
                return Err(Error::Validation(format!(
                    "segment {i} duration must be positive"
                )));
            }
            for j in 0..=n_bits {
                if seg.b[j] * seg.b[j] + seg.c[j] * seg.c[j] > 1.0 + 1e-12 {
                    return Err(Error::Validation(format!(
                        "controls violate b^2 + c^2 <= 1 at segment {i}, index {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.segments).expect("schedule serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let segments: Vec<Segment> =
            serde_json::from_str(text).map_err(|e| Error::Schedule(e.to_string()))?;
        Ok(Self { segments })
    }
}

/// The n = 1 optimum: full coupling `b_0 = c_1 = 1` held for time 1/2.
pub fn stationary_controls_n1() -> Schedule {
    Schedule::new(vec![Segment {
        duration: 0.5,
        b: vec![1.0, 0.0],
        c: vec![0.0, 1.0],
    }])
}

/// Baseline that rotates weight up one ladder rung at a time, spending
/// `total / n` on each; admissible for every n and the canonical warm
/// start for the optimizer.
pub fn sequential_schedule(n_bits: usize, total: f64) -> Schedule {
    let segments = (0..n_bits)
        .map(|i| {
            let mut b = vec![0.0; n_bits + 1];
            let mut c = vec![0.0; n_bits + 1];
            b[i] = 1.0;
            c[i + 1] = 1.0;
            Segment {
                duration: total / n_bits as f64,
                b,
                c,
            }
        })
        .collect();
    Schedule::new(segments)
}

/// `sqrt(C(n,j)/2^n)` computed in log space for stability at large n.
fn binomial_amplitude(n: usize, j: usize) -> f64 {
    let ln_c = ln_gamma(n as f64 + 1.0) - ln_gamma(j as f64 + 1.0) - ln_gamma((n - j) as f64 + 1.0);
    (0.5 * (ln_c - n as f64 * std::f64::consts::LN_2)).exp()
}

/// Zero-error target: the unit vector of binomial square roots.
pub fn target_vector(n_bits: usize) -> SphereState {
    let a: Vec<f64> = (0..=n_bits).map(|j| binomial_amplitude(n_bits, j)).collect();
    SphereState {
        a,
        n_bits,
        t: 0.0,
    }
}

/// Success probability of guessing the whole hidden string: squared
/// overlap with the target vector, maximized over sign flips (the target
/// is componentwise nonnegative, so that is `(sum |a_j| (a_f)_j)^2`).
pub fn pwin_interrogation(s: &SphereState) -> f64 {
    let target = target_vector(s.n_bits);
    let dot: f64 = s
        .a
        .iter()
        .zip(target.a.iter())
        .map(|(x, f)| x.abs() * f)
        .sum();
    dot * dot
}

/// Success probability of guessing the parity of the hidden string:
/// `1/2 + 1/2 sum_j a_j a_{n-j}`, maximized over sign flips (each
/// mirror pair can be aligned independently).
pub fn pwin_xor(s: &SphereState) -> f64 {
    let n = s.n_bits;
    let sum: f64 = (0..=n).map(|j| (s.a[j] * s.a[n - j]).abs()).sum();
    0.5 + 0.5 * sum
}

/// Which success functional a protocol is scored by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Interrogation,
    Xor,
}

pub fn pwin_objective(s: &SphereState, kind: ObjectiveKind) -> f64 {
    match kind {
        ObjectiveKind::Interrogation => pwin_interrogation(s),
        ObjectiveKind::Xor => pwin_xor(s),
    }
}

/// Upper envelope `1/2 + sqrt(sum_{j >= floor(n/2)} a_j^2)` valid for
/// both problems.  `raw` can exceed 1, in which case the bound is
/// vacuous and `capped` reports 1.
#[derive(Debug, Clone, Copy)]
pub struct Envelope {
    pub raw: f64,
    pub capped: f64,
    pub vacuous: bool,
}

pub fn pwin_upper_envelope(s: &SphereState) -> Envelope {
    let lo = s.n_bits / 2;
    let tail: f64 = s.a[lo..].iter().map(|x| x * x).sum();
    let raw = 0.5 + tail.sqrt();
    Envelope {
        raw,
        capped: raw.min(1.0),
        vacuous: raw > 1.0,
    }
}

/// Tail amplitude `A_j = sqrt(sum_{k >= j} a_k^2)`.
pub fn tail_amplitude(s: &SphereState, j: usize) -> f64 {
    s.a[j.min(s.a.len())..]
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Antisymmetric tridiagonal generator of the reduced dynamics:
/// superdiagonal `M[j, j+1] = -(pi/2) b_j c_{j+1}`.
pub fn generator(n_bits: usize, b: &[f64], c: &[f64]) -> Array2<f64> {
    let mut m = Array2::<f64>::zeros((n_bits + 1, n_bits + 1));
    for j in 0..n_bits {
        let w = -(PI / 2.0) * b[j] * c[j + 1];
        m[[j, j + 1]] = w;
        m[[j + 1, j]] = -w;
    }
    m
}

/// Per-segment rotation generators, cached for reuse at many times.
struct SegmentExps {
    exps: Vec<AntisymmetricExp>,
    starts: Vec<f64>,
    total: f64,
}

fn segment_exps(n_bits: usize, schedule: &Schedule) -> Result<SegmentExps> {
    schedule.validate(n_bits)?;
    let mut exps = Vec::with_capacity(schedule.segments.len());
    let mut starts = Vec::with_capacity(schedule.segments.len());
    let mut t = 0.0;
    for seg in &schedule.segments {
        exps.push(AntisymmetricExp::new(&generator(n_bits, &seg.b, &seg.c))?);
        starts.push(t);
        t += seg.duration;
    }
    Ok(SegmentExps {
        exps,
        starts,
        total: t,
    })
}

/// Evaluates the reduced trajectory at the given (sorted, ascending)
/// times.  Within a segment the state is propagated by one exact
/// rotation from the segment start, so errors do not accumulate with
/// the sampling density.
fn reduced_at_times(
    s0: &SphereState,
    schedule: &Schedule,
    times: &[f64],
) -> Result<Vec<Array1<f64>>> {
    let n = s0.n_bits;
    let se = segment_exps(n, schedule)?;
    let mut out = Vec::with_capacity(times.len());
    let mut seg_idx = 0usize;
    let mut seg_start_a = Array1::from_vec(s0.a.clone());
    for &t in times {
        if t < -1e-12 || t > se.total + 1e-9 {
            return Err(Error::Validation(format!(
                "sample time {t} outside the schedule span"
            )));
        }
        // Advance the segment-start anchor past any fully covered segments.
        while seg_idx + 1 < se.exps.len() && t >= se.starts[seg_idx + 1] - 1e-15 {
            let dur = schedule.segments[seg_idx].duration;
            seg_start_a = se.exps[seg_idx].at(dur)?.dot(&seg_start_a);
            seg_idx += 1;
        }
        let local = (t - se.starts[seg_idx]).max(0.0);
        let a = se.exps[seg_idx].at(local)?.dot(&seg_start_a);
        let norm2: f64 = a.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "norm drift {:.3e} during reduced evolution",
                (norm2 - 1.0).abs()
            )));
        }
        out.push(a);
    }
    Ok(out)
}

/// Integrates the reduced dynamics over the whole schedule, sampling
/// every `dt` plus the final time.  Each segment is advanced by the
/// exact matrix exponential of its constant generator.
pub fn evolve_reduced(
    s0: &SphereState,
    schedule: &Schedule,
    dt: f64,
) -> Result<Vec<SphereState>> {
    if dt <= 0.0 {
        return Err(Error::Validation("dt must be positive".into()));
    }
    let total = schedule.total_duration();
    let mut times: Vec<f64> = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * dt;
        if t >= total - 1e-15 {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(total);
    let samples = reduced_at_times(s0, schedule, &times)?;
    Ok(times
        .into_iter()
        .zip(samples)
        .map(|(t, a)| SphereState {
            a: a.to_vec(),
            n_bits: s0.n_bits,
            t,
        })
        .collect())
}

/// Final state only; one exact rotation per segment.
pub fn final_state(s0: &SphereState, schedule: &Schedule) -> Result<SphereState> {
    let total = schedule.total_duration();
    let mut samples = reduced_at_times(s0, schedule, &[total])?;
    Ok(SphereState {
        a: samples.pop().expect("one sample").to_vec(),
        n_bits: s0.n_bits,
        t: total,
    })
}

/// Best success probability reachable with `t` standard queries: the
/// reachable set is exactly the unit vectors supported on `j <= t`, so
/// interrogation gives the binomial tail `sum_{j<=t} C(n,j)/2^n` and
/// parity jumps from 1/2 to 1 once `t >= ceil(n/2)`.
pub fn discrete_achievable_pwin(n_bits: usize, queries: usize, kind: ObjectiveKind) -> f64 {
    match kind {
        ObjectiveKind::Interrogation => {
            if queries >= n_bits {
                return 1.0;
            }
            let dist = Binomial::new(0.5, n_bits as u64).expect("valid binomial");
            dist.cdf(queries as u64)
        }
        ObjectiveKind::Xor => {
            if queries >= n_bits.div_ceil(2) {
                1.0
            } else {
                0.5
            }
        }
    }
}

/// Smallest query count whose achievable interrogation probability
/// reaches `target_pwin` (which must lie in (1/2, 1)).
pub fn van_dam_query_count(n_bits: usize, target_pwin: f64) -> usize {
    for t in 0..=n_bits {
        if discrete_achievable_pwin(n_bits, t, ObjectiveKind::Interrogation)
            >= target_pwin - 1e-12
        {
            return t;
        }
    }
    n_bits
}

/// Growth envelope for the tail amplitudes: `A_j(t) <= (pi t/2)^j / j!`.
pub fn lower_bound_envelope(_n_bits: usize, t: f64, j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let jf = j as f64;
    (jf * (PI * t / 2.0).ln() - ln_gamma(jf + 1.0)).exp()
}

/// Minimal query time implied by the tail envelope, with the large-n
/// asymptote `n/(pi e)` reported alongside.
#[derive(Debug, Clone, Copy)]
pub struct LowerBound {
    pub time: f64,
    pub asymptotic: f64,
}

/// `T >= (2/pi) (m!)^{1/m} |pwin - 1/2|^{1/m}` with `m = floor(n/2)`.
pub fn min_time_lower_bound(n_bits: usize, pwin: f64) -> LowerBound {
    let m = (n_bits / 2) as f64;
    let asymptotic = n_bits as f64 / (PI * std::f64::consts::E);
    let excess = pwin - 0.5;
    let time = if excess <= 0.0 {
        0.0
    } else {
        (2.0 / PI) * ((ln_gamma(m + 1.0) + excess.ln()) / m).exp()
    };
    LowerBound { time, asymptotic }
}

// ---------------------------------------------------------------------
// Bridge to the full-Hilbert-space model.
//
// Hidden parameter: a string z of n bits (register A, dimension 2^n).
// Query register M has 2(n+1) slots |j, k> with j = 0 a null slot and
// j >= 1 addressing hidden bit j; k doubles each slot so the oracle can
// be driven in either direction.  The oracle phase felt by slot (j, k)
// under hidden string z is (pi/2)(-1)^k (-1)^{z_j} (zero on the null
// slots).

/// Slot index for `(j, k)`.
fn slot(j: usize, k: usize) -> usize {
    2 * j + k
}

/// `(-1)^{popcount(s & z)} / sqrt(2^n)`: real Hadamard basis entries.
fn hadamard_entry(n_bits: usize, s: usize, z: usize) -> f64 {
    let sign = if ((s & z).count_ones() % 2) == 0 {
        1.0
    } else {
        -1.0
    };
    sign / ((1u64 << n_bits) as f64).sqrt()
}

/// Projectors onto Hadamard labels of fixed Hamming weight; a resolution
/// of identity on the hidden-string register.
pub fn hadamard_weight_projectors(n_bits: usize) -> Vec<Array2<C64>> {
    let dim = 1usize << n_bits;
    let mut out = vec![Array2::<C64>::zeros((dim, dim)); n_bits + 1];
    for s in 0..dim {
        let w = (s as u32).count_ones() as usize;
        for z in 0..dim {
            let hz = hadamard_entry(n_bits, s, z);
            for z2 in 0..dim {
                out[w][[z, z2]] += cr(hz * hadamard_entry(n_bits, s, z2));
            }
        }
    }
    out
}

fn oracle_phase(n_bits: usize, z: usize, mu: usize) -> f64 {
    let j = mu / 2;
    let k = mu % 2;
    if j == 0 || j > n_bits {
        return 0.0;
    }
    let zj = (z >> (j - 1)) & 1;
    let sign_k = if k == 0 { 1.0 } else { -1.0 };
    let sign_z = if zj == 0 { 1.0 } else { -1.0 };
    (PI / 2.0) * sign_k * sign_z
}

fn index_match_verifiers(dim: usize) -> Vec<Array2<C64>> {
    (0..dim)
        .map(|x| {
            let mut v = Array2::<C64>::zeros((dim * dim, dim * dim));
            let idx = x * dim + x;
            v[[idx, idx]] = cr(dim as f64);
            v
        })
        .collect()
}

/// Interrogation in the continuous model on the full Hilbert space.
pub fn problem_continuous(n_bits: usize) -> OracleProblem {
    let dim_a = 1usize << n_bits;
    let dim_m = 2 * (n_bits + 1);
    let phases = Array2::from_shape_fn((dim_a, dim_m), |(z, mu)| oracle_phase(n_bits, z, mu));
    OracleProblem {
        dim_a,
        dim_m,
        dim_m_prime: dim_a,
        psi0: uniform_state(dim_a),
        phase_table: PhaseTable::Continuous { phases },
        verifiers: index_match_verifiers(dim_a),
        measurement: MeasurementModel::SymmetricPure,
    }
}

/// Interrogation in the discrete model: each query applies the phase
/// `exp(-i pi/2 (-1)^k (-1)^{z_j})` on slot (j, k), nothing on null.
pub fn problem_discrete(n_bits: usize) -> OracleProblem {
    let dim_a = 1usize << n_bits;
    let dim_m = 2 * (n_bits + 1);
    let phases = Array2::from_shape_fn((dim_a, dim_m), |(z, mu)| {
        crate::linalg::cis(-oracle_phase(n_bits, z, mu))
    });
    OracleProblem {
        dim_a,
        dim_m,
        dim_m_prime: dim_a,
        psi0: uniform_state(dim_a),
        phase_table: PhaseTable::Discrete { phases, delta: 1.0 },
        verifiers: index_match_verifiers(dim_a),
        measurement: MeasurementModel::SymmetricPure,
    }
}

/// Explicit controls that query bits one at a time in the discrete
/// model: before query i the message `(|null> + |i,0>)/sqrt 2` is
/// prepared, and after the query the +-i relative phase (which encodes
/// bit i) is swapped into the i-th ancilla qubit.  After t queries the
/// reduced weights are exactly binomial over the first t bits.
pub fn sequential_discrete_controls(n_bits: usize) -> Result<FullControlSchedule> {
    let dim_m = 2 * (n_bits + 1);
    let dim_b = 1usize << n_bits;
    let d = dim_m * dim_b;

    // 2-level preparation on M slots {null, (i,0)}, identity on B.
    let prep = |i: usize| -> Array2<C64> {
        let mut u = Array2::<C64>::eye(d);
        let s = slot(i, 0);
        for bb in 0..dim_b {
            let i0 = bb; // (mu = 0) * dim_b + bb
            let i1 = s * dim_b + bb;
            let r = std::f64::consts::FRAC_1_SQRT_2;
            u[[i0, i0]] = cr(r);
            u[[i1, i0]] = cr(r);
            u[[i0, i1]] = cr(-r);
            u[[i1, i1]] = cr(r);
        }
        u
    };

    // Unitary storing query i's answer: the post-query message states
    // (|null> -+ i |i,0>)/sqrt 2 are routed back to |null> while ancilla
    // bit i records which one occurred.
    let collect = |i: usize| -> Array2<C64> {
        let mut u = Array2::<C64>::zeros((d, d));
        let s = slot(i, 0);
        for mu in 0..dim_m {
            if mu == 0 || mu == s {
                continue;
            }
            for bb in 0..dim_b {
                let idx = mu * dim_b + bb;
                u[[idx, idx]] = cr(1.0);
            }
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bit = 1usize << (i - 1);
        for bb in 0..dim_b {
            // Input columns <psi_0, bb| and <psi_1, bb| with
            // psi_pm = (|null> -+ i |s>)/sqrt 2.
            let col0 = bb;
            let col1 = s * dim_b + bb;
            let (m_out, b_keep) = if bb & bit == 0 { (0, bb) } else { (s, bb) };
            let row_a = m_out * dim_b + b_keep;
            let row_b = m_out * dim_b + (b_keep ^ bit);
            // |psi_0, bb> -> row_a ; |psi_1, bb> -> row_b.
            u[[row_a, col0]] += cr(r);
            u[[row_a, col1]] += C64::new(0.0, r); // conj(-i r)
            u[[row_b, col0]] += cr(r);
            u[[row_b, col1]] += C64::new(0.0, -r); // conj(+i r)
        }
        u
    };

    let mut steps = Vec::with_capacity(n_bits);
    for i in 1..=n_bits {
        let mut v = prep(i);
        if i > 1 {
            v = v.dot(&collect(i - 1));
        }
        steps.push(v);
    }
    FullControlSchedule::new(dim_m, dim_b, None, steps)
}

/// Static controls realizing the n = 1 continuous optimum: prepare the
/// even superposition of the two arrow-of-time slots for bit 1 and let
/// the oracle run.  The reduced trajectory then matches the b0 = c1 = 1
/// schedule exactly.
pub fn stationary_full_controls_n1(steps: usize) -> Result<FullControlSchedule> {
    let dim_m = 4;
    let mut v = Array1::<C64>::zeros(dim_m);
    v[slot(1, 0)] = cr(std::f64::consts::FRAC_1_SQRT_2);
    v[slot(1, 1)] = cr(std::f64::consts::FRAC_1_SQRT_2);
    let prep = crate::linalg::unitary_with_first_column(&v)?;
    let eye = Array2::<C64>::eye(dim_m);
    FullControlSchedule::new(dim_m, 1, Some(prep), vec![eye; steps])
}

/// Query-side extension the symmetric protocol maintains alongside a
/// reduced schedule.  Each query slot (j, k) carries rank-one 2x2
/// blocks over Hadamard label pairs (s, s + e_j) weighted by the
/// reduced amplitudes; unspent control budget sits diagonally on the
/// null slots.
///
/// The extension is bookkeeping determined by the controls and the
/// elapsed time: it carries the signed amplitudes of its own reduced
/// trajectory rather than inferring them from the hidden-register
/// marginal, which would lose signs and degenerate (non-Lipschitz
/// square roots) wherever a ladder weight vanishes, e.g. at the start.
pub struct SymmetricExtension {
    n_bits: usize,
    schedule: Schedule,
    seg_starts: Vec<f64>,
    seg_start_a: Vec<Array1<f64>>,
    exps: Vec<AntisymmetricExp>,
    total: f64,
}

impl SymmetricExtension {
    pub fn new(n_bits: usize, schedule: Schedule) -> Result<Self> {
        let se = segment_exps(n_bits, &schedule)?;
        let mut seg_start_a = Vec::with_capacity(schedule.segments.len());
        let mut a = Array1::from_vec(SphereState::initial(n_bits).a);
        for (i, seg) in schedule.segments.iter().enumerate() {
            seg_start_a.push(a.clone());
            a = se.exps[i].at(seg.duration)?.dot(&a);
        }
        Ok(Self {
            n_bits,
            schedule,
            seg_starts: se.starts,
            seg_start_a,
            exps: se.exps,
            total: se.total,
        })
    }

    fn segment_index(&self, t: f64) -> usize {
        self.seg_starts
            .partition_point(|&s| s <= t + 1e-15)
            .saturating_sub(1)
            .min(self.schedule.segments.len() - 1)
    }

    /// Signed reduced amplitudes at time t and the active segment.
    fn amplitudes_at(&self, t: f64) -> Result<(usize, Array1<f64>)> {
        let idx = self.segment_index(t);
        let local = (t - self.seg_starts[idx])
            .max(0.0)
            .min(self.schedule.segments[idx].duration);
        let a = self.exps[idx].at(local)?.dot(&self.seg_start_a[idx]);
        Ok((idx, a))
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

impl ExtensionMap for SymmetricExtension {
    fn dim_m(&self) -> usize {
        2 * (self.n_bits + 1)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.seg_starts[1..].to_vec()
    }

    fn extend(&self, _rho: &Array2<C64>, t: f64) -> Result<Array2<C64>> {
        let n = self.n_bits;
        let dim_a = 1usize << n;
        let dim_m = 2 * (n + 1);
        if t < -1e-9 || t > self.total + 1e-9 {
            return Err(Error::Validation(format!(
                "extension queried at t = {t} outside the schedule span"
            )));
        }
        let (seg_idx, a) = self.amplitudes_at(t)?;
        let seg = &self.schedule.segments[seg_idx];
        // Weight-w labels spend b_w as the lower member of a slot pair
        // and c_w as the upper member; the edges have only one role, so
        // c_0 and b_n are never consumed.
        let consumed = |w: usize| -> f64 {
            let mut v = 0.0;
            if w < n {
                v += seg.b[w] * seg.b[w];
            }
            if w > 0 {
                v += seg.c[w] * seg.c[w];
            }
            v
        };
        for w in 0..=n {
            if consumed(w) > 1.0 + 1e-12 && a[w] * a[w] > 1e-14 {
                return Err(Error::Validation(format!(
                    "extension weight budget exceeded at index {w}"
                )));
            }
        }

        let d = dim_a * dim_m;
        let mut big = Array2::<C64>::zeros((d, d));
        let idx = |z: usize, mu: usize| z * dim_m + mu;

        // Query slots: rank-one blocks over (s, s + e_j) label pairs.
        for j in 1..=n {
            let bit = 1usize << (j - 1);
            for k in 0..2usize {
                let mu = slot(j, k);
                let ksign = if k == 0 { 1.0 } else { -1.0 };
                for s in 0..dim_a {
                    if s & bit != 0 {
                        continue;
                    }
                    let s2 = s | bit;
                    let w = (s as u32).count_ones() as usize;
                    let kappa = 1.0 / (2.0 * n as f64 * binomial_f64(n - 1, w));
                    let p = kappa * seg.b[w] * seg.b[w] * a[w] * a[w];
                    let r = kappa * seg.c[w + 1] * seg.c[w + 1] * a[w + 1] * a[w + 1];
                    let q = ksign * kappa * seg.b[w] * seg.c[w + 1] * a[w] * a[w + 1];
                    for z in 0..dim_a {
                        let hs_z = hadamard_entry(n, s, z);
                        let hs2_z = hadamard_entry(n, s2, z);
                        for z2 in 0..dim_a {
                            let hs_z2 = hadamard_entry(n, s, z2);
                            let hs2_z2 = hadamard_entry(n, s2, z2);
                            big[[idx(z, mu), idx(z2, mu)]] += C64::new(
                                p * hs_z * hs_z2 + r * hs2_z * hs2_z2,
                                q * (hs_z * hs2_z2 - hs2_z * hs_z2),
                            );
                        }
                    }
                }
            }
        }

        // Null slots: leftover weight, split evenly between k = 0, 1.
        for s in 0..dim_a {
            let w = (s as u32).count_ones() as usize;
            let leftover = (1.0 - consumed(w)).max(0.0);
            let zeta_half = leftover * a[w] * a[w] / (2.0 * binomial_f64(n, w));
            if zeta_half == 0.0 {
                continue;
            }
            for k in 0..2usize {
                let mu = slot(0, k);
                for z in 0..dim_a {
                    let hs_z = hadamard_entry(n, s, z);
                    for z2 in 0..dim_a {
                        big[[idx(z, mu), idx(z2, mu)]] +=
                            cr(zeta_half * hs_z * hadamard_entry(n, s, z2));
                    }
                }
            }
        }
        Ok(big)
    }
}

/// Independent check of the reduced dynamics: integrates the full-model
/// equation of motion for the hidden-string register directly, with the
/// query side pinned to [`SymmetricExtension`], and compares the
/// symmetrized amplitudes against [`evolve_reduced`] at every sample.
/// Returns the largest deviation.
pub fn verify_reduced_against_full(n_bits: usize, schedule: &Schedule, dt: f64) -> Result<f64> {
    if n_bits == 0 || n_bits > 3 {
        return Err(Error::Validation("supported range is 1 <= n <= 3".into()));
    }
    let p = problem_continuous(n_bits);
    let ext = SymmetricExtension::new(n_bits, schedule.clone())?;
    let total = schedule.total_duration();
    let full = crate::oracle::evolve_master(&p, &ext, dt, total)?;
    let times: Vec<f64> = full.iter().map(|s| s.t).collect();
    let reduced = reduced_at_times(&SphereState::initial(n_bits), schedule, &times)?;
    let projectors = hadamard_weight_projectors(n_bits);
    let mut worst = 0.0f64;
    for (state, a_red) in full.iter().zip(&reduced) {
        let sym = crate::oracle::symmetrize_reduced(&state.rho, &projectors)?;
        for j in 0..=n_bits {
            worst = worst.max((sym.amplitudes[j] - a_red[j].abs()).abs());
        }
    }
    Ok(worst)
}
