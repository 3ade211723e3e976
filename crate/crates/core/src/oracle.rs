//! Floating-point cross-checks of the exact modules: integration of the
//! integrable model flows in `R^4`, rational reconstruction of torus slopes,
//! winding-based index estimates and Gauss linking numbers.
//!
//! Coordinates are `z1 = x1 + i y1 = r1 e^{i theta1}`, `z2 = r2 e^{i theta2}`.
//! `H1 = {z2 = 0}` and `H2 = {z1 = 0}` on the model hypersurfaces.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::Fraction;
use crate::geodesic::CurvatureProfile;
use crate::star::{classify_orbits, Arc, GammaProfile, GammaSample, HopfClass};
use crate::surd::Surd;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const SURFACE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub r1: f64,
    /// Unwrapped along the trajectory.
    pub theta1: f64,
    pub r2: f64,
    pub theta2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
    pub step: f64,
    pub max_residual: f64,
    pub max_radius_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("trajectories are non-empty")
    }

    pub fn points(&self) -> Vec<[f64; 4]> {
        self.states
            .iter()
            .map(|s| {
                [
                    s.r1 * s.theta1.cos(),
                    s.r1 * s.theta1.sin(),
                    s.r2 * s.theta2.cos(),
                    s.r2 * s.theta2.sin(),
                ]
            })
            .collect()
    }

    /// CSV with columns `t, r1, theta1, r2, theta2`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "r1", "theta1", "r2", "theta2"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for s in &self.states {
            w.serialize((s.t, s.r1, s.theta1, s.r2, s.theta2))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `H = c1 |z1|^2 + c2 |z2|^2`, whose Hamiltonian flow rotates `z_j` at
/// angular speed `2 c_j`; on `H = 1` it is the Reeb flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearHamiltonian {
    pub c1: f64,
    pub c2: f64,
}

impl LinearHamiltonian {
    /// The ellipsoid `|z1|^2/a + |z2|^2/b = 1`.
    pub fn ellipsoid(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("ellipsoid axes must be positive"));
        }
        Ok(LinearHamiltonian { c1: 1.0 / a, c2: 1.0 / b })
    }

    /// Tangent linear model of `S_gamma` at the torus over a curve point,
    /// equal to 1 on that torus: `(y' R1 - x' R2) / (x y' - x' y)`.
    pub fn tangent_to(s: &GammaSample) -> Result<Self> {
        let d = s.admissibility();
        if !(d > 0.0) {
            return Err(Error::invalid(format!("x*y' - x'*y = {d} is not positive at t = {}", s.t)));
        }
        Ok(LinearHamiltonian {
            c1: s.dy / d,
            c2: -s.dx / d,
        })
    }

    pub fn eval(&self, z: &[f64; 4]) -> f64 {
        self.c1 * (z[0] * z[0] + z[1] * z[1]) + self.c2 * (z[2] * z[2] + z[3] * z[3])
    }

    fn field(&self, z: &[f64; 4]) -> [f64; 4] {
        let (w1, w2) = (2.0 * self.c1, 2.0 * self.c2);
        [-w1 * z[1], w1 * z[0], -w2 * z[3], w2 * z[2]]
    }

    pub fn rates(&self) -> (f64, f64) {
        (2.0 * self.c1, 2.0 * self.c2)
    }
}

fn axpy(a: f64, x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2], y[3] + a * x[3]]
}

fn rk4(h: &LinearHamiltonian, z: &[f64; 4], dt: f64) -> [f64; 4] {
    let k1 = h.field(z);
    let k2 = h.field(&axpy(dt / 2.0, &k1, z));
    let k3 = h.field(&axpy(dt / 2.0, &k2, z));
    let k4 = h.field(&axpy(dt, &k3, z));
    let mut out = *z;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn angle_step(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1)
}

/// Integrates the flow of `h` from `z0` for `duration`, recording every
/// `stride`-th state plus the final one.
pub fn integrate(h: &LinearHamiltonian, z0: [f64; 4], duration: f64, step: f64, stride: usize) -> Result<Trajectory> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::invalid(format!("duration {duration} must be non-negative")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(format!("step {step} must be positive")));
    }
    let stride = stride.max(1);
    let n = (duration / step).ceil() as usize;
    let dt = if n == 0 { 0.0 } else { duration / n as f64 };
    let h0 = h.eval(&z0);
    let rad = |z: &[f64; 4]| (z[0].hypot(z[1]), z[2].hypot(z[3]));
    let (r1_0, r2_0) = rad(&z0);
    let mut th = (z0[1].atan2(z0[0]), z0[3].atan2(z0[2]));
    let state = |t: f64, z: &[f64; 4], th: (f64, f64)| {
        let (r1, r2) = rad(z);
        FlowState { t, r1, theta1: th.0, r2, theta2: th.1 }
    };
    let mut z = z0;
    let mut states = vec![state(0.0, &z, th)];
    let (mut max_residual, mut max_drift) = (0.0f64, 0.0f64);
    for i in 1..=n {
        let next = rk4(h, &z, dt);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("ambient flow diverged".into()));
        }
        th.0 += angle_step((z[0], z[1]), (next[0], next[1]));
        th.1 += angle_step((z[2], z[3]), (next[2], next[3]));
        z = next;
        let (r1, r2) = rad(&z);
        max_residual = max_residual.max((h.eval(&z) - h0).abs());
        max_drift = max_drift.max((r1 - r1_0).abs()).max((r2 - r2_0).abs());
        if i % stride == 0 || i == n {
            states.push(state(i as f64 * dt, &z, th));
        }
    }
    if max_residual > SURFACE_TOL * h0.abs().max(1.0) {
        return Err(Error::Numerical(format!("trajectory left the surface: |H - H0| = {max_residual}")));
    }
    Ok(Trajectory {
        states,
        step: dt,
        max_residual,
        max_radius_drift: max_drift,
    })
}

/// Linear interpolation of the sampled curve at `t`.
pub fn sample_at(profile: &GammaProfile, t: f64) -> Result<GammaSample> {
    let s = &profile.samples;
    if s.is_empty() {
        return Err(Error::invalid("profile has no samples"));
    }
    if !(s[0].t <= t && t <= s[s.len() - 1].t) {
        return Err(Error::invalid(format!("t = {t} is outside the sampled range")));
    }
    let i = s.partition_point(|z| z.t <= t).clamp(1, s.len() - 1);
    let (a, b) = (s[i - 1], s[i]);
    let w = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
    let mix = |u: f64, v: f64| u + w * (v - u);
    Ok(GammaSample {
        t,
        x: mix(a.x, b.x),
        y: mix(a.y, b.y),
        dx: mix(a.dx, b.dx),
        dy: mix(a.dy, b.dy),
    })
}

fn model_start(s: &GammaSample, angles: (f64, f64)) -> [f64; 4] {
    let (r1, r2) = (s.x.max(0.0).sqrt(), s.y.max(0.0).sqrt());
    [r1 * angles.0.cos(), r1 * angles.0.sin(), r2 * angles.1.cos(), r2 * angles.1.sin()]
}

/// Reeb flow of `S_gamma` through the torus over `gamma(t)`.
pub fn integrate_model_flow(
    profile: &GammaProfile,
    t: f64,
    init_angles: (f64, f64),
    duration: f64,
    step: f64,
) -> Result<Trajectory> {
    let s = sample_at(profile, t)?;
    let h = LinearHamiltonian::tangent_to(&s)?;
    integrate(&h, model_start(&s, init_angles), duration, step, 1)
}

/// Continued-fraction reconstruction: the first convergent `num/den` with
/// `den <= max_den` and `|slope - num/den| <= tol`, returned as
/// `Fraction { p: den, q: num }`.
pub fn detect_closed_orbit(slope: f64, max_den: u64, tol: f64) -> Option<Fraction> {
    if !slope.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = slope;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            return None;
        }
        if (slope - h2 as f64 / k2 as f64).abs() <= tol {
            return Some(Fraction { p: k2 as i64, q: h2 as i64 });
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a;
        if frac == 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

/// The class `(P, Q)` whose direction matches the angle increments
/// `(d1, d2)` of one closed orbit in `(theta1, theta2)`.
pub fn reconstruct_class(d1: f64, d2: f64, max_den: u64, tol: f64) -> Option<HopfClass> {
    if d1.abs() >= d2.abs() {
        let f = detect_closed_orbit(d2 / d1, max_den, tol)?;
        let s = d1.signum() as i64;
        Some(Fraction { p: s * f.p, q: s * f.q })
    } else {
        let f = detect_closed_orbit(d1 / d2, max_den, tol)?;
        let s = d2.signum() as i64;
        Some(Fraction { p: s * f.q, q: s * f.p })
    }
}

/// A periodic linear system `(x, y)' = S(t) (x, y)` along a closed orbit,
/// written in the global trivialization.
pub trait LinearizedFlow {
    fn period(&self) -> f64;
    fn generator(&self, t: f64) -> [[f64; 2]; 2];
    fn default_step(&self) -> f64;
}

/// Constant transverse rotation at angular speed `rate`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRotation {
    pub period: f64,
    pub rate: f64,
}

impl ConstantRotation {
    /// Rotation of the transverse plane measured in the global
    /// trivialization, `2(c1 + c2)`, over one period of the core orbit.
    fn of_core(h: &LinearHamiltonian, core_rate: f64) -> Result<Self> {
        if !(core_rate > 0.0) {
            return Err(Error::invalid("core orbit must rotate positively"));
        }
        Ok(ConstantRotation {
            period: 2.0 * PI / core_rate,
            rate: 2.0 * (h.c1 + h.c2),
        })
    }

    /// The orbit `P' = {z2 = 0}` of the ellipsoid with axes `a`, `b`.
    pub fn ellipsoid_p(a: f64, b: f64) -> Result<Self> {
        let h = LinearHamiltonian::ellipsoid(a, b)?;
        ConstantRotation::of_core(&h, h.rates().0)
    }

    /// The orbit `Q' = {z1 = 0}`.
    pub fn ellipsoid_q(a: f64, b: f64) -> Result<Self> {
        let h = LinearHamiltonian::ellipsoid(a, b)?;
        ConstantRotation::of_core(&h, h.rates().1)
    }

    /// `H1`, measured from the first curve sample.
    pub fn binding_h1(profile: &GammaProfile) -> Result<Self> {
        let s = *profile.samples.first().ok_or_else(|| Error::invalid("profile has no samples"))?;
        let h = LinearHamiltonian::tangent_to(&s)?;
        ConstantRotation::of_core(&h, h.rates().0)
    }

    /// `H2`, measured from the last curve sample.
    pub fn binding_h2(profile: &GammaProfile) -> Result<Self> {
        let s = *profile.samples.last().ok_or_else(|| Error::invalid("profile has no samples"))?;
        let h = LinearHamiltonian::tangent_to(&s)?;
        ConstantRotation::of_core(&h, h.rates().1)
    }
}

impl LinearizedFlow for ConstantRotation {
    fn period(&self) -> f64 {
        self.period
    }

    fn generator(&self, _t: f64) -> [[f64; 2]; 2] {
        [[0.0, -self.rate], [self.rate, 0.0]]
    }

    fn default_step(&self) -> f64 {
        self.period / 512.0
    }
}

/// `x' = -K y, y' = x` along the lift of a closed geodesic, period `2L`.
#[derive(Clone, Debug, PartialEq)]
pub struct SturmLinearization {
    pub profile: CurvatureProfile,
}

impl LinearizedFlow for SturmLinearization {
    fn period(&self) -> f64 {
        2.0 * self.profile.length
    }

    fn generator(&self, t: f64) -> [[f64; 2]; 2] {
        [[0.0, -self.profile.eval(t)], [1.0, 0.0]]
    }

    fn default_step(&self) -> f64 {
        self.profile.default_step()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericCz {
    /// Total winding of the linearized flow over `k` periods, in half-turns.
    pub two_delta: f64,
    /// Inclusive integer range `[ceil(2D) - 1, floor(2D) + 1]` allowed by `|CZ - 2D| < 2`
    /// for odd/even index patterns.
    pub band: (i64, i64),
    pub resonant: bool,
    pub step: f64,
}

impl NumericCz {
    pub fn contains(&self, cz: i64) -> bool {
        self.band.0 <= cz && cz <= self.band.1
    }
}

/// Unwrapped phase over `duration`, or `None` if some step turns by more
/// than a quarter turn.
fn linear_phase(flow: &dyn LinearizedFlow, duration: f64, step: f64) -> Result<Option<f64>> {
    let n = (duration / step).ceil().max(1.0) as u64;
    let h = duration / n as f64;
    let f = |t: f64, v: (f64, f64)| {
        let m = flow.generator(t);
        (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
    };
    let mut v = (1.0f64, 0.0f64);
    let mut phase = 0.0;
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = f(t, v);
        let k2 = f(t + h / 2.0, (v.0 + h / 2.0 * k1.0, v.1 + h / 2.0 * k1.1));
        let k3 = f(t + h / 2.0, (v.0 + h / 2.0 * k2.0, v.1 + h / 2.0 * k2.1));
        let k4 = f(t + h, (v.0 + h * k3.0, v.1 + h * k3.1));
        let next = (
            v.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            v.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        let r = next.0.hypot(next.1);
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Numerical("linearized flow degenerated".into()));
        }
        let d = angle_step(v, next);
        if d.abs() > PI / 4.0 {
            return Ok(None);
        }
        phase += d;
        v = (next.0 / r, next.1 / r);
    }
    Ok(Some(phase))
}

const CZ_RESONANCE_TOL: f64 = 1e-6;
const MAX_HALVINGS: u32 = 6;

fn cz_band(two_delta: f64) -> (i64, i64, bool) {
    let r = two_delta.round();
    if (two_delta - r).abs() < CZ_RESONANCE_TOL {
        (r as i64 - 1, r as i64 + 1, true)
    } else {
        (two_delta.ceil() as i64 - 1, two_delta.floor() as i64 + 1, false)
    }
}

/// Winding estimate of the index of the `k`-fold cover, confirmed under step
/// halving.
pub fn numeric_cz(flow: &dyn LinearizedFlow, k: u64) -> Result<NumericCz> {
    if k == 0 {
        return Err(Error::invalid("cover multiplicity must be at least 1"));
    }
    let duration = k as f64 * flow.period();
    let mut step = flow.default_step();
    let mut prev: Option<(f64, (i64, i64, bool))> = None;
    for _ in 0..=MAX_HALVINGS {
        if let Some(phase) = linear_phase(flow, duration, step)? {
            let two_delta = phase / PI;
            let band = cz_band(two_delta);
            if let Some((_, pb)) = prev {
                if pb == band {
                    return Ok(NumericCz {
                        two_delta,
                        band: (band.0, band.1),
                        resonant: band.2,
                        step,
                    });
                }
            }
            prev = Some((two_delta, band));
        }
        step /= 2.0;
    }
    Err(Error::Numerical("winding estimate did not stabilize under step halving".into()))
}

type V3 = [f64; 3];

fn sub(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(a: V3) -> Option<V3> {
    let n = dot(&a, &a).sqrt();
    (n > 1e-300).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// Signed solid-angle contribution of segment `p1p2` against `p3p4`.
fn segment_pair(p1: &V3, p2: &V3, p3: &V3, p4: &V3) -> f64 {
    let (r13, r14, r23, r24) = (sub(p3, p1), sub(p4, p1), sub(p3, p2), sub(p4, p2));
    let normals = [
        unit(cross(&r13, &r14)),
        unit(cross(&r14, &r24)),
        unit(cross(&r24, &r23)),
        unit(cross(&r23, &r13)),
    ];
    let Some(n) = normals.into_iter().collect::<Option<Vec<V3>>>() else {
        return 0.0;
    };
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(dot(&n[0], &n[1])) + asin(dot(&n[1], &n[2])) + asin(dot(&n[2], &n[3])) + asin(dot(&n[3], &n[0]));
    let s = dot(&cross(&sub(p4, p3), &sub(p2, p1)), &r13);
    omega * s.signum() / (4.0 * PI)
}

/// Gauss linking integral of two closed polygons in `R^3`, evaluated
/// exactly segment by segment.
pub fn gauss_linking_polygons(a: &[V3], b: &[V3]) -> f64 {
    let mut total = 0.0;
    for i in 0..a.len() {
        let (p1, p2) = (&a[i], &a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            total += segment_pair(p1, p2, &b[j], &b[(j + 1) % b.len()]);
        }
    }
    total
}

fn normalize4(p: &[f64; 4]) -> Result<[f64; 4]> {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::invalid("curve passes through the origin"));
    }
    Ok([p[0] / n, p[1] / n, p[2] / n, p[3] / n])
}

fn pole_candidates() -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for i in 0..4 {
        for s in [1.0, -1.0] {
            let mut e = [0.0; 4];
            e[i] = s;
            out.push(e);
        }
    }
    for bits in 0..16u32 {
        let sign = |j: u32| if bits >> j & 1 == 1 { -0.5 } else { 0.5 };
        out.push([sign(0), sign(1), sign(2), sign(3)]);
    }
    out
}

fn dist4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Orientation-preserving orthogonal map taking `pole` to `e4`: a
/// Householder reflection followed by `x1 -> -x1`.
fn rotation_to_e4(pole: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    let u = [pole[0], pole[1], pole[2], pole[3] - 1.0];
    let uu: f64 = u.iter().map(|x| x * x).sum();
    for i in 0..4 {
        for j in 0..4 {
            let id = if i == j { 1.0 } else { 0.0 };
            m[i][j] = if uu < 1e-24 { id } else { id - 2.0 * u[i] * u[j] / uu };
        }
    }
    if uu >= 1e-24 {
        for j in 0..4 {
            m[0][j] = -m[0][j];
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkingEstimate {
    pub value: f64,
    pub linking: i64,
    /// `0.5 - |value - linking|`.
    pub confidence: f64,
    pub pole: [f64; 4],
}

pub const MIN_LINKING_CONFIDENCE: f64 = 0.2;

/// Linking number of two closed polylines in `R^4 \ 0`, read on `S^3`
/// after radial projection and stereographic projection from a pole far
/// from both curves. Orientation follows the complex orientation of `C^2`,
/// so Hopf fibers link `+1`.
pub fn numeric_linking(c1: &[[f64; 4]], c2: &[[f64; 4]]) -> Result<LinkingEstimate> {
    if c1.len() < 3 || c2.len() < 3 {
        return Err(Error::invalid("closed curves need at least three vertices"));
    }
    let a = c1.iter().map(normalize4).collect::<Result<Vec<_>>>()?;
    let b = c2.iter().map(normalize4).collect::<Result<Vec<_>>>()?;
    let (pole, clearance) = pole_candidates()
        .into_iter()
        .map(|p| {
            let d = a.iter().chain(&b).map(|x| dist4(x, &p)).fold(f64::INFINITY, f64::min);
            (p, d)
        })
        .fold(([0.0; 4], -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if clearance < 1e-3 {
        return Err(Error::Numerical("no projection pole avoids both curves".into()));
    }
    let r = rotation_to_e4(&pole);
    let project = |x: &[f64; 4]| -> V3 {
        let mut y = [0.0; 4];
        for i in 0..4 {
            y[i] = (0..4).map(|j| r[i][j] * x[j]).sum();
        }
        let s = 1.0 - y[3];
        [y[0] / s, y[1] / s, y[2] / s]
    };
    let pa: Vec<V3> = a.iter().map(project).collect();
    let pb: Vec<V3> = b.iter().map(project).collect();
    let value = gauss_linking_polygons(&pa, &pb);
    let linking = value.round() as i64;
    let confidence = 0.5 - (value - linking as f64).abs();
    if confidence < MIN_LINKING_CONFIDENCE {
        return Err(Error::Numerical(format!("linking estimate {value} is ambiguous")));
    }
    Ok(LinkingEstimate {
        value,
        linking,
        confidence,
        pole,
    })
}

/// Round circle `|z_j| = r` in one complex coordinate plane, traversed
/// positively with `n` vertices.
pub fn coordinate_circle(first_plane: bool, r: f64, n: usize) -> Vec<[f64; 4]> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            let (c, s) = (r * a.cos(), r * a.sin());
            if first_plane {
                [c, s, 0.0, 0.0]
            } else {
                [0.0, 0.0, c, s]
            }
        })
        .collect()
}

/// Sampled `gamma` with `y = t`, `-x'/y' = theta1 + (theta2 - theta1) t`,
/// closing at `x(1) = 0`. Needs `theta2 > 0` and `theta1 + theta2 > 0`.
pub fn quadratic_model_profile(theta1: &Surd, theta2: &Surd, n: usize) -> Result<GammaProfile> {
    let (a, b) = (theta1.to_f64(), theta2.to_f64());
    if !(b > 0.0 && a + b > 0.0) {
        return Err(Error::invalid("the quadratic model needs theta2 > 0 and theta1 + theta2 > 0"));
    }
    if n < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let x0 = (a + b) / 2.0;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let x = if i == n - 1 { 0.0 } else { x0 - a * t - (b - a) * t * t / 2.0 };
            GammaSample {
                t,
                x,
                y: t,
                dx: -(a + (b - a) * t),
                dy: 1.0,
            }
        })
        .collect();
    GammaProfile::new(theta1.clone(), theta2.clone())?.with_samples(samples)
}

/// Parameters `t` where the orbit direction `(y', -x')` is a positive
/// multiple of `(P, Q)`, by linear interpolation between samples.
pub fn locate_class(profile: &GammaProfile, cls: HopfClass) -> Vec<f64> {
    let (p, q) = (cls.p as f64, cls.q as f64);
    let g = |s: &GammaSample| q * s.dy + p * s.dx;
    let along = |s: &GammaSample| p * s.dy - q * s.dx;
    let mut roots = Vec::new();
    for w in profile.samples.windows(2) {
        let (ga, gb) = (g(&w[0]), g(&w[1]));
        let t = if ga == 0.0 {
            Some(w[0].t)
        } else if ga * gb < 0.0 {
            Some(w[0].t + (w[1].t - w[0].t) * ga / (ga - gb))
        } else {
            None
        };
        if let Some(t) = t {
            let mid = if ga == 0.0 { w[0] } else { w[1] };
            if along(&mid) > 0.0 && roots.last().is_none_or(|&r: &f64| (t - r).abs() > 1e-12) {
                roots.push(t);
            }
        }
    }
    let last = profile.samples.last();
    if let Some(s) = last {
        if g(s) == 0.0 && along(s) > 0.0 && roots.last().is_none_or(|&r| (s.t - r).abs() > 1e-12) {
            roots.push(s.t);
        }
    }
    roots
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCheck {
    pub cls: HopfClass,
    pub arc: Arc,
    pub t: f64,
    pub slope: f64,
    pub reconstructed: Option<HopfClass>,
    pub closure_error: f64,
    pub surface_residual: f64,
    /// `(lk(orbit, H1), lk(orbit, H2))`
    pub linking: (i64, i64),
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub families: Vec<FamilyCheck>,
    /// Classes found on the sampled curve but not reported exactly.
    pub missed: Vec<HopfClass>,
    /// Classes reported exactly but not found on the sampled curve.
    pub extra: Vec<HopfClass>,
    pub all_ok: bool,
}

const CLOSURE_TOL: f64 = 1e-6;
const SLOPE_TOL: f64 = 1e-7;

fn check_family(profile: &GammaProfile, cls: HopfClass, arc: Arc, t: f64, max_den: u64) -> Result<FamilyCheck> {
    let s = sample_at(profile, t)?;
    let h = LinearHamiltonian::tangent_to(&s)?;
    let (w1, w2) = h.rates();
    let duration = if cls.p != 0 {
        2.0 * PI * cls.p.unsigned_abs() as f64 / w1.abs()
    } else {
        2.0 * PI * cls.q.unsigned_abs() as f64 / w2.abs()
    };
    let turns = (cls.p.unsigned_abs() + cls.q.unsigned_abs()) as f64;
    let stride = ((duration / DEFAULT_STEP) / (64.0 * turns)).floor().max(1.0) as usize;
    let z0 = model_start(&s, (0.0, PI / 3.0));
    let traj = integrate(&h, z0, duration, DEFAULT_STEP, stride)?;
    let (first, end) = (traj.states[0], *traj.last());
    let (d1, d2) = (end.theta1 - first.theta1, end.theta2 - first.theta2);
    let slope = if d1 != 0.0 { d2 / d1 } else { f64::INFINITY };
    let reconstructed = reconstruct_class(d1, d2, max_den, SLOPE_TOL);
    let pts = traj.points();
    let closure_error = dist4(&pts[0], pts.last().expect("non-empty"));
    let mut orbit = pts;
    orbit.pop();
    let first_sample = profile.samples[0];
    let last_sample = profile.samples[profile.samples.len() - 1];
    let h1 = coordinate_circle(true, first_sample.x.sqrt(), 256);
    let h2 = coordinate_circle(false, last_sample.y.sqrt(), 256);
    let l1 = numeric_linking(&orbit, &h1)?.linking;
    let l2 = numeric_linking(&orbit, &h2)?.linking;
    let ok = reconstructed == Some(cls) && closure_error < CLOSURE_TOL && (l1, l2) == (cls.q, cls.p);
    Ok(FamilyCheck {
        cls,
        arc,
        t,
        slope,
        reconstructed,
        closure_error,
        surface_residual: traj.max_residual,
        linking: (l1, l2),
        ok,
    })
}

/// Confirms every torus family of a sampled profile numerically and
/// searches the sampled curve for classes the exact classification missed.
///
/// The comparison runs over classes `(P, Q)` with `|P| <= max_p`,
/// `|Q| <= max_p`.
pub fn verify_profile(profile: &GammaProfile, max_p: u64) -> Result<VerifyReport> {
    if profile.samples.is_empty() {
        return Err(Error::invalid("verification needs a sampled profile"));
    }
    profile.validate()?;
    let m = i64::try_from(max_p).map_err(|_| Error::Overflow("max_p".into()))?;
    let in_box = |c: &HopfClass| c.p.abs() <= m && c.q.abs() <= m;
    let slopes = profile
        .samples
        .iter()
        .filter(|s| s.dy != 0.0)
        .map(|s| s.slope_ratio().abs())
        .fold(1.0f64, f64::max);
    let wide = max_p.saturating_mul(slopes.ceil() as u64 + 1);
    let exact: Vec<_> = classify_orbits(profile, wide)?.into_iter().filter(|f| in_box(&f.cls)).collect();

    let mut found = Vec::new();
    for p in -m..=m {
        for q in -m..=m {
            let c = Fraction { p, q };
            if (p, q) != (0, 0) && c.is_simple() && !locate_class(profile, c).is_empty() {
                found.push(c);
            }
        }
    }
    found.sort();
    let reported: Vec<HopfClass> = exact.iter().map(|f| f.cls).collect();
    let missed: Vec<HopfClass> = found.iter().filter(|c| !reported.contains(c)).copied().collect();
    let extra: Vec<HopfClass> = reported.iter().filter(|c| !found.contains(c)).copied().collect();

    let mut families = Vec::new();
    for f in &exact {
        let Some(&t) = locate_class(profile, f.cls).first() else {
            continue;
        };
        families.push(check_family(profile, f.cls, f.arc, t, max_p.max(1) * 4)?);
    }
    let all_ok = missed.is_empty() && extra.is_empty() && families.iter().all(|f| f.ok);
    Ok(VerifyReport {
        families,
        missed,
        extra,
        all_ok,
    })
}

/// The `k`-fold orbit `P'^k = {z2 = 0}` on the ellipsoid, traced by the
/// ambient flow.
pub fn trace_ellipsoid_p(a: f64, b: f64, k: u64) -> Result<Trajectory> {
    let h = LinearHamiltonian::ellipsoid(a, b)?;
    let period = PI * a;
    let stride = ((period / DEFAULT_STEP) / 128.0).floor().max(1.0) as usize;
    integrate(&h, [a.sqrt(), 0.0, 0.0, 0.0], k as f64 * period, DEFAULT_STEP, stride)
}

/// The simple orbit `Q' = {z1 = 0}`.
pub fn trace_ellipsoid_q(a: f64, b: f64) -> Result<Trajectory> {
    let h = LinearHamiltonian::ellipsoid(a, b)?;
    let period = PI * b;
    let stride = ((period / DEFAULT_STEP) / 128.0).floor().max(1.0) as usize;
    integrate(&h, [0.0, 0.0, b.sqrt(), 0.0], period, DEFAULT_STEP, stride)
}

/// Drops the final vertex when it closes up onto the first.
pub fn closed_polyline(traj: &Trajectory) -> Vec<[f64; 4]> {
    let mut pts = traj.points();
    if pts.len() > 1 && dist4(&pts[0], pts.last().expect("non-empty")) < 1e-6 {
        pts.pop();
    }
    pts
}
