//! Shortest paths for the two-bit ladder.
//!
//! On three ladder amplitudes the admissible reduced flows sweep a
//! quarter-sphere, and time-optimal driving is geodesic motion in the
//! non-round metric `ds^2 = (4/pi^2)(d theta^2 + tan^2 theta d phi^2)`
//! in polar coordinates `a0 = sin(theta)cos(phi)`, `a1 = cos(theta)`,
//! `a2 = sin(theta)sin(phi)`.  This module carries the metric, its
//! Christoffel symbols, a geodesic integrator, the closed-form arcs,
//! the transcendental solve for the apex height, the minimal zero-error
//! time, and the conversion of the optimal arc into a control schedule
//! for [`crate::interrogation::evolve_reduced`].

use crate::interrogation::{Schedule, Segment};
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;
const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Point in polar coordinates; `theta = 0` is the singular pole and is
/// rejected, `theta = pi/2` is the equator where the metric degenerates
/// (closed forms stay regular there).
#[derive(Debug, Clone, Copy)]
pub struct PolarPoint {
    pub theta: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= HALF_PI + 1e-12) {
            return Err(Error::Validation(format!(
                "theta = {theta} outside (0, pi/2]"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Ladder amplitudes of the point.
    pub fn amplitudes(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.cos(),
            self.theta.sin() * self.phi.sin(),
        ]
    }
}

/// Speed of a tangent vector: `sqrt(g_tt v_t^2 + g_pp v_p^2)` with
/// `g_tt = 4/pi^2`, `g_pp = (4/pi^2) tan^2(theta)`.
pub fn metric_speed(p: &PolarPoint, v_theta: f64, v_phi: f64) -> Result<f64> {
    if (p.theta - HALF_PI).abs() < 1e-12 {
        if v_phi != 0.0 {
            return Err(Error::Validation(
                "metric is degenerate on the equator for azimuthal motion".into(),
            ));
        }
        return Ok(2.0 / PI * v_theta.abs());
    }
    let t = p.theta.tan();
    Ok(2.0 / PI * (v_theta * v_theta + t * t * v_phi * v_phi).sqrt())
}

/// The two nonzero Christoffel symbols of the metric (the mixed one is
/// symmetric in its lower indices).
#[derive(Debug, Clone, Copy)]
pub struct ChristoffelSymbols {
    /// Gamma^theta_{phi phi} = -sin(theta)/cos^3(theta).
    pub theta_phiphi: f64,
    /// Gamma^phi_{theta phi} = 1/(sin(theta) cos(theta)).
    pub phi_thetaphi: f64,
}

pub fn christoffel(theta: f64) -> Result<ChristoffelSymbols> {
    if !(theta > 1e-12 && theta < HALF_PI - 1e-12) {
        return Err(Error::Validation(format!(
            "theta = {theta} outside the open interval (0, pi/2)"
        )));
    }
    let (s, c) = (theta.sin(), theta.cos());
    Ok(ChristoffelSymbols {
        theta_phiphi: -s / (c * c * c),
        phi_thetaphi: 1.0 / (s * c),
    })
}

/// One sampled point of an integrated geodesic.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicSample {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    pub v_theta: f64,
    pub v_phi: f64,
}

/// Integrated geodesic; `hit_boundary` marks early termination at the
/// pole or equator bands.
#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub samples: Vec<GeodesicSample>,
    pub hit_boundary: bool,
}

fn geodesic_rhs(y: &[f64; 4]) -> [f64; 4] {
    let (theta, v_theta, v_phi) = (y[0], y[2], y[3]);
    let (s, c) = (theta.sin(), theta.cos());
    [
        v_theta,
        v_phi,
        s / (c * c * c) * v_phi * v_phi,
        -2.0 * v_theta * v_phi / (s * c),
    ]
}

fn rk4_step(y: &[f64; 4], h: f64) -> [f64; 4] {
    let k1 = geodesic_rhs(y);
    let y2 = std::array::from_fn(|i| y[i] + 0.5 * h * k1[i]);
    let k2 = geodesic_rhs(&y2);
    let y3 = std::array::from_fn(|i| y[i] + 0.5 * h * k2[i]);
    let k3 = geodesic_rhs(&y3);
    let y4 = std::array::from_fn(|i| y[i] + h * k3[i]);
    let k4 = geodesic_rhs(&y4);
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Fourth-order integration of the geodesic equation from `p0` with
/// initial velocity `(v_theta, v_phi)`, which must be unit speed
/// within 1e-10.  Samples every `dt` plus the final time; stops early
/// with the boundary flag if the path leaves `(0, pi/2)`.
///
/// The azimuthal equation carries a 1/(sin cos) coefficient that makes
/// the bands near the pole and the equator stiff: a fixed dt of 1e-5
/// cannot resolve the 1e-6-deep starting layer, where the true
/// azimuthal velocity grows by two orders of magnitude within one
/// step.  Inside those bands steps are internally capped at
/// `0.003 min(sin, cos)`, which keeps every stage in the stable,
/// accurate regime; away from the bands the cap exceeds dt and plain
/// fixed-step integration proceeds.  Samples are still emitted on the
/// dt grid.
pub fn geodesic_integrate(
    p0: &PolarPoint,
    v_theta: f64,
    v_phi: f64,
    t_end: f64,
    dt: f64,
) -> Result<GeodesicTrajectory> {
    if dt <= 0.0 || t_end <= 0.0 {
        return Err(Error::Validation("t_end and dt must be positive".into()));
    }
    let speed0 = metric_speed(p0, v_theta, v_phi)?;
    if (speed0 - 1.0).abs() > 1e-10 {
        return Err(Error::Validation(format!(
            "initial velocity has speed {speed0}, expected unit"
        )));
    }
    let mut y = [p0.theta, p0.phi, v_theta, v_phi];
    let mut t = 0.0;
    let mut samples = vec![GeodesicSample {
        t,
        theta: y[0],
        phi: y[1],
        v_theta: y[2],
        v_phi: y[3],
    }];
    let mut hit_boundary = false;
    'outer: while t < t_end - 1e-15 {
        let target = (t + dt).min(t_end);
        while t < target - 1e-15 {
            let cap = 0.003 * y[0].sin().min(y[0].cos()).abs();
            let h = (target - t).min(dt).min(cap.max(1e-12));
            y = rk4_step(&y, h);
            t += h;
            if !(y[0] > 1e-9 && y[0] < HALF_PI - 1e-9) {
                hit_boundary = true;
                break 'outer;
            }
        }
        let speed = metric_speed(&PolarPoint { theta: y[0], phi: y[1] }, y[2], y[3])?;
        if (speed - 1.0).abs() > 1e-6 {
            return Err(Error::Numerical(format!(
                "speed drift {:.3e}; step too large",
                (speed - 1.0).abs()
            )));
        }
        samples.push(GeodesicSample {
            t,
            theta: y[0],
            phi: y[1],
            v_theta: y[2],
            v_phi: y[3],
        });
    }
    Ok(GeodesicTrajectory {
        samples,
        hit_boundary,
    })
}

/// Height along the closed-form arc through apex `theta0`:
/// `cos(theta(t)) = cos(theta0) sin(pi t / (2 cos theta0))`, valid for
/// one equator-apex-equator sweep `0 <= t <= 2 cos(theta0)`.
pub fn theta_of_t(t: f64, theta0: f64) -> Result<f64> {
    let c0 = theta0.cos();
    if !(0.0..=2.0 * c0 + 1e-12).contains(&t) {
        return Err(Error::Validation(format!(
            "t = {t} outside the arc span [0, {}]",
            2.0 * c0
        )));
    }
    Ok((c0 * (PI * t / (2.0 * c0)).sin()).min(1.0).acos())
}

/// Azimuth gained from equator to apex: `(pi/2)(1 - sin theta0)`.
pub fn apex_phi_gain(theta0: f64) -> f64 {
    HALF_PI * (1.0 - theta0.sin())
}

/// Which half of the arc a point sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Ascending,
    Descending,
}

/// Azimuth of the closed-form arc at height `theta`, with `phi = 0` at
/// the equator start.  The descending branch is composed from apex
/// symmetry: `2 * apex_phi_gain - phi_ascending`.
pub fn phi_of_theta(theta: f64, theta0: f64, branch: Branch) -> Result<f64> {
    let u = theta.cos() / theta0.cos();
    if u > 1.0 + 1e-12 {
        return Err(Error::Validation(format!(
            "theta = {theta} below the apex height {theta0}"
        )));
    }
    let u = u.min(1.0);
    let s0 = theta0.sin();
    let ascending = -s0 * u.asin() + f64::atan2(s0 * u, (1.0 - u * u).max(0.0).sqrt());
    Ok(match branch {
        Branch::Ascending => ascending,
        Branch::Descending => 2.0 * apex_phi_gain(theta0) - ascending,
    })
}

/// Ascent inequality used in the optimality argument:
/// `phi_ascending(theta) <= (1 - sin theta0) arcsin(cos theta / cos theta0)`.
pub fn ascent_bound_check(theta: f64, theta0: f64) -> Result<bool> {
    let phi = phi_of_theta(theta, theta0, Branch::Ascending)?;
    let u = (theta.cos() / theta0.cos()).min(1.0);
    Ok(phi <= (1.0 - theta0.sin()) * u.asin() + 1e-12)
}

/// Total azimuth of an equator -> apex -> height pi/4 trip, minus the
/// requested target; the root in `cos(theta0)` picks the arc that lands
/// exactly on the target azimuth.
fn target_residual(cos_theta0: f64, phi_target: f64) -> Option<f64> {
    let theta0 = cos_theta0.acos();
    let phi_end = phi_of_theta(PI / 4.0, theta0, Branch::Descending).ok()?;
    Some(phi_end - phi_target)
}

/// Solves for the apex parameter `cos(theta0)` whose arc descends onto
/// height pi/4 at azimuth `phi_target`: coarse scan over the given
/// bracket with step 1e-3, then bisection to residual below 1e-12.
pub fn solve_theta0_for_target(phi_target: f64, lo: f64, hi: f64) -> Result<f64> {
    let steps = ((hi - lo) / 1e-3).ceil() as usize;
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    let mut scanned = 0usize;
    for i in 0..=steps {
        let c = (lo + i as f64 * 1e-3).min(hi);
        let Some(f) = target_residual(c, phi_target) else {
            continue;
        };
        scanned += 1;
        if let Some((cp, fp)) = prev {
            if fp * f <= 0.0 {
                bracket = Some((cp, c));
                break;
            }
        }
        prev = Some((c, f));
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Error::Numerical(format!(
            "bracketing failure for the apex parameter: no sign change over \
             {scanned} valid scan points in [{lo}, {hi}] with step 1e-3"
        ))
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = target_residual(mid, phi_target)
            .ok_or_else(|| Error::Numerical("residual undefined inside bracket".into()))?;
        if fm.abs() < 1e-12 {
            return Ok(mid);
        }
        let fa = target_residual(a, phi_target)
            .ok_or_else(|| Error::Numerical("residual undefined inside bracket".into()))?;
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Apex parameter of the optimal two-bit arc (target azimuth pi/4).
pub fn solve_theta0() -> Result<f64> {
    solve_theta0_for_target(PI / 4.0, 0.60, 0.95)
}

/// Arrival time of the arc through `cos(theta0)` at height pi/4 on the
/// descending branch.
pub fn arrival_time(cos_theta0: f64) -> f64 {
    let u = (PI / 4.0).cos() / cos_theta0;
    2.0 * cos_theta0 * (1.0 - u.asin() / PI)
}

/// Minimal zero-error time for two bits: about 0.9052.
pub fn min_time_n2() -> Result<f64> {
    Ok(arrival_time(solve_theta0()?))
}

/// Velocity of the closed-form arc at time t, in polar components.
/// `theta0` is the apex colatitude; valid away from the endpoints where
/// `sin theta` and `tan theta` degenerate.
pub fn arc_velocity(t: f64, theta0: f64) -> (f64, f64) {
    let c0 = theta0.cos();
    let theta = (c0 * (PI * t / (2.0 * c0)).sin()).min(1.0).acos();
    let v_theta = -HALF_PI * (PI * t / (2.0 * c0)).cos() / theta.sin();
    let v_phi = HALF_PI * theta0.tan() / (theta.tan() * theta.tan());
    (v_theta, v_phi)
}

/// Converts the optimal arc into piecewise-constant interrogation
/// controls, one segment per uniform time slice, sampled at midpoints.
///
/// The coupling products must satisfy `b0 c1 = W1`, `b1 c2 = W2` with
/// `W1^2 + W2^2 = 1`; splitting each factor as sqrt(|W|) would overdraw
/// index 1 (it hosts both c1 and b1), so the split `(b0, c1) = (1, W1)`,
/// `(b1, c2) = (W2, 1)` is used, which spends exactly the unit budget
/// at index 1 and leaves indices 0 and 2 at their single active role.
pub fn optimal_schedule_n2(segments: usize) -> Result<Schedule> {
    if segments < 10 {
        return Err(Error::Validation("need at least 10 segments".into()));
    }
    let c0 = solve_theta0()?;
    let theta0 = c0.acos();
    let total = arrival_time(c0);
    let dt = total / segments as f64;
    let mut segs = Vec::with_capacity(segments);
    for i in 0..segments {
        let t = (i as f64 + 0.5) * dt;
        let theta = theta_of_t(t, theta0)?;
        let branch = if t <= c0 {
            Branch::Ascending
        } else {
            Branch::Descending
        };
        let phi = phi_of_theta(theta, theta0, branch)?;
        let (v_theta, v_phi) = arc_velocity(t, theta0);
        // Unit tangent in normalized components.
        let w_t = 2.0 / PI * v_theta;
        let w_p = theta.tan() * (2.0 / PI) * v_phi;
        let w1 = -phi.cos() * w_t + phi.sin() * w_p;
        let w2 = phi.sin() * w_t + phi.cos() * w_p;
        segs.push(Segment {
            duration: dt,
            b: vec![1.0, w2, 0.0],
            c: vec![0.0, w1, 1.0],
        });
    }
    Ok(Schedule::new(segs))
}

/// One row of a plotted arc: time, polar coordinates, amplitudes.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

/// Samples the optimal arc uniformly (closed forms, endpoints included).
pub fn optimal_trace(rows: usize) -> Result<Vec<TraceRow>> {
    if rows < 2 {
        return Err(Error::Validation("need at least 2 rows".into()));
    }
    let c0 = solve_theta0()?;
    let theta0 = c0.acos();
    let total = arrival_time(c0);
    let mut out = Vec::with_capacity(rows);
    for i in 0..rows {
        let t = total * i as f64 / (rows - 1) as f64;
        let theta = theta_of_t(t, theta0)?;
        let branch = if t <= c0 {
            Branch::Ascending
        } else {
            Branch::Descending
        };
        let phi = phi_of_theta(theta, theta0, branch)?;
        let a = PolarPoint { theta, phi }.amplitudes();
        out.push(TraceRow {
            t,
            theta,
            phi,
            a0: a[0],
            a1: a[1],
            a2: a[2],
        });
    }
    Ok(out)
}
