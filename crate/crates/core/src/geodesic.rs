//! Rotation numbers of closed geodesics on the two-sphere from the Sturm
//! (Jacobi) equation `y'' + K(t) y = 0`, and the satellite classes they
//! force in the unit tangent bundle.

use std::f64::consts::PI;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::Fraction;
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Curvature {
    Constant { k: f64 },
    /// `mean + amp * cos(2*pi*t/L)`
    Cosine { mean: f64, amp: f64 },
    /// Periodic piecewise-linear interpolation of `(t, K)` samples in `[0, L)`.
    Sampled { t: Vec<f64>, k: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    #[serde(default)]
    pub name: String,
    /// Length of the closed geodesic.
    #[serde(rename = "L")]
    pub length: f64,
    pub curvature: Curvature,
}

impl CurvatureProfile {
    pub fn constant(name: impl Into<String>, k: f64, length: f64) -> Result<Self> {
        CurvatureProfile::new(name, length, Curvature::Constant { k })
    }

    pub fn cosine(name: impl Into<String>, mean: f64, amp: f64, length: f64) -> Result<Self> {
        CurvatureProfile::new(name, length, Curvature::Cosine { mean, amp })
    }

    /// Samples must start at `t = 0` and increase strictly; a trailing sample
    /// at `t = L` must repeat `K(0)` and is dropped.
    pub fn sampled(name: impl Into<String>, length: f64, mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(t_last, k_last)) = samples.last() {
            if samples.len() > 1 && (t_last - length).abs() <= 1e-12 * length.abs().max(1.0) {
                let k0 = samples[0].1;
                if (k_last - k0).abs() > 1e-9 * k0.abs().max(1.0) {
                    return Err(Error::invalid(format!(
                        "K is discontinuous across the period: K(0) = {k0}, K(L) = {k_last}"
                    )));
                }
                samples.pop();
            }
        }
        let (t, k) = samples.into_iter().unzip();
        CurvatureProfile::new(name, length, Curvature::Sampled { t, k })
    }

    fn new(name: impl Into<String>, length: f64, curvature: Curvature) -> Result<Self> {
        let p = CurvatureProfile {
            name: name.into(),
            length,
            curvature,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid(format!("period L = {} must be positive", self.length)));
        }
        match &self.curvature {
            Curvature::Constant { k } if !k.is_finite() => Err(Error::invalid("K must be finite")),
            Curvature::Cosine { mean, amp } if !(mean.is_finite() && amp.is_finite()) => {
                Err(Error::invalid("K must be finite"))
            }
            Curvature::Sampled { t, k } => {
                if t.is_empty() || t.len() != k.len() {
                    return Err(Error::invalid("sampled K needs matching, non-empty t and K columns"));
                }
                if t[0] != 0.0 {
                    return Err(Error::invalid("samples must start at t = 0"));
                }
                if t.windows(2).any(|w| !(w[0] < w[1])) || *t.last().unwrap() >= self.length {
                    return Err(Error::invalid("sample times must increase strictly inside [0, L)"));
                }
                if k.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("K samples must be finite"));
                }
                if !self.lipschitz().is_finite() {
                    return Err(Error::invalid("K samples are not Lipschitz"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Largest difference quotient of consecutive samples, wrapping once
    /// around the period. Zero for closed-form profiles.
    pub fn lipschitz(&self) -> f64 {
        match &self.curvature {
            Curvature::Constant { .. } => 0.0,
            Curvature::Cosine { amp, .. } => amp.abs() * 2.0 * PI / self.length,
            Curvature::Sampled { t, k } => {
                let n = t.len();
                (0..n)
                    .map(|i| {
                        let (t1, k1) = if i + 1 < n { (t[i + 1], k[i + 1]) } else { (self.length, k[0]) };
                        (k1 - k[i]).abs() / (t1 - t[i])
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.curvature {
            Curvature::Constant { k } => *k,
            Curvature::Cosine { mean, amp } => mean + amp * (2.0 * PI * t / self.length).cos(),
            Curvature::Sampled { t: ts, k } => {
                let s = t.rem_euclid(self.length);
                let i = ts.partition_point(|&x| x <= s) - 1;
                let (t1, k1) = if i + 1 < ts.len() { (ts[i + 1], k[i + 1]) } else { (self.length, k[0]) };
                let w = (s - ts[i]) / (t1 - ts[i]);
                k[i] + w * (k1 - k[i])
            }
        }
    }

    pub fn default_step(&self) -> f64 {
        self.length / 256.0
    }

    /// Reads `L,<value>` on the first line, a `t,K` header, then samples.
    pub fn from_csv(name: impl Into<String>, reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = rdr.records();
        let bad = |msg: &str| Error::parse("curvature profile", "", msg.to_string());
        let first = rows.next().ok_or_else(|| bad("empty file"))?.map_err(|e| bad(&e.to_string()))?;
        if first.len() != 2 || !first[0].eq_ignore_ascii_case("L") {
            return Err(bad("first line must be `L,<period>`"));
        }
        let length: f64 = first[1].parse().map_err(|_| bad("period is not a number"))?;
        let header = rows.next().ok_or_else(|| bad("missing `t,K` header"))?.map_err(|e| bad(&e.to_string()))?;
        if header.len() != 2 || !header[0].eq_ignore_ascii_case("t") || !header[1].eq_ignore_ascii_case("K") {
            return Err(bad("second line must be the header `t,K`"));
        }
        let mut samples = Vec::new();
        for (i, row) in rows.enumerate() {
            let row = row.map_err(|e| bad(&e.to_string()))?;
            if row.len() != 2 {
                return Err(bad(&format!("row {} needs two fields", i + 3)));
            }
            let t: f64 = row[0].parse().map_err(|_| bad(&format!("row {}: bad t", i + 3)))?;
            let k: f64 = row[1].parse().map_err(|_| bad(&format!("row {}: bad K", i + 3)))?;
            samples.push((t, k));
        }
        CurvatureProfile::sampled(name, length, samples)
    }
}

fn rk4_step(profile: &CurvatureProfile, t: f64, x: f64, y: f64, h: f64) -> (f64, f64) {
    let f = |t: f64, x: f64, y: f64| (-profile.eval(t) * y, x);
    let (k1x, k1y) = f(t, x, y);
    let (k2x, k2y) = f(t + h / 2.0, x + h / 2.0 * k1x, y + h / 2.0 * k1y);
    let (k3x, k3y) = f(t + h / 2.0, x + h / 2.0 * k2x, y + h / 2.0 * k2y);
    let (k4x, k4y) = f(t + h, x + h * k3x, y + h * k3y);
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )
}

/// Unwrapped angle of `(x, y)` at `horizon` for the solution of
/// `x' = -K y, y' = x` from `(1, 0)`.
pub fn sturm_phase(profile: &CurvatureProfile, horizon: f64, step: f64) -> Result<f64> {
    profile.validate()?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid(format!("horizon {horizon} must be positive")));
    }
    if !(step.is_finite() && step > 0.0) || step > profile.default_step() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "step {step} must be positive and at most L/256 = {}",
            profile.default_step()
        )));
    }
    let n = (horizon / step).ceil() as u64;
    let h = horizon / n as f64;
    let (mut x, mut y) = (1.0f64, 0.0f64);
    let mut phase = 0.0f64;
    for i in 0..n {
        let (nx, ny) = rk4_step(profile, i as f64 * h, x, y, h);
        if !(nx.is_finite() && ny.is_finite()) {
            return Err(Error::Numerical(format!("integrator diverged at t = {}", i as f64 * h)));
        }
        phase += (x * ny - y * nx).atan2(x * nx + y * ny);
        // Rescaling leaves the angle unchanged and avoids overflow.
        let r = nx.hypot(ny);
        if r == 0.0 {
            return Err(Error::Numerical("solution collapsed to zero".into()));
        }
        x = nx / r;
        y = ny / r;
    }
    Ok(phase)
}

/// Zeros of `y` in `(0, horizon]`; each is a transverse counterclockwise
/// crossing of the `x` axis, so the count is `floor(phase / pi)`.
pub fn sturm_zero_count(profile: &CurvatureProfile, horizon: f64, step: f64) -> Result<u64> {
    let phase = sturm_phase(profile, horizon, step)?;
    Ok((phase / PI + 1e-9).floor().max(0.0) as u64)
}

const MAX_HALVINGS: u32 = 4;

/// Zero count at `step` confirmed by halving the step until two successive
/// counts agree.
pub fn verified_zero_count(profile: &CurvatureProfile, horizon: f64, step: f64) -> Result<u64> {
    let mut h = step;
    let mut prev = sturm_zero_count(profile, horizon, h)?;
    for _ in 0..MAX_HALVINGS {
        h /= 2.0;
        let next = sturm_zero_count(profile, horizon, h)?;
        if next == prev {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "zero count at horizon {horizon} did not stabilize under step halving"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub horizon: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub rho: f64,
    pub error: f64,
    pub zero_counts: Vec<ZeroCount>,
    pub converged: bool,
}

pub const RHO_CONVERGENCE: f64 = 1e-4;

pub fn rho(profile: &CurvatureProfile, horizon: f64) -> Result<RotationEstimate> {
    rho_with_step(profile, horizon, profile.default_step())
}

/// `(L/2) * count / N` at horizons `N/2` and `N`, extrapolated as
/// `2*rho_N - rho_{N/2}`.
pub fn rho_with_step(profile: &CurvatureProfile, horizon: f64, step: f64) -> Result<RotationEstimate> {
    let half = horizon / 2.0;
    let c_half = verified_zero_count(profile, half, step)?;
    let c_full = verified_zero_count(profile, horizon, step)?;
    let est = |c: u64, n: f64| profile.length / 2.0 * c as f64 / n;
    let (r_half, r_full) = (est(c_half, half), est(c_full, horizon));
    let diff = (r_full - r_half).abs();
    let rho = 2.0 * r_full - r_half;
    if !(rho > 0.0) {
        return Err(Error::Numerical(format!("rotation estimate {rho} is not positive")));
    }
    Ok(RotationEstimate {
        rho,
        error: diff.max(profile.length / horizon),
        zero_counts: vec![
            ZeroCount { horizon: half, count: c_half },
            ZeroCount { horizon, count: c_full },
        ],
        converged: diff < RHO_CONVERGENCE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryCheck {
    /// Closed integer range allowed by `|CZ - #zeros| < 3`.
    pub cz_band: (i64, i64),
    pub predicted_cz: Option<i64>,
    pub verdict: Verdict,
}

pub const RESONANCE_TOL: f64 = 1e-6;

/// Compares a zero count over `k` periods of the lifted orbit with the
/// index `2*floor(2*k*rho) + 1`.
pub fn cz_zero_dictionary(zero_count: u64, k: u64, rho_est: f64) -> Result<DictionaryCheck> {
    if k == 0 {
        return Err(Error::invalid("cover multiplicity must be at least 1"));
    }
    if !(rho_est.is_finite() && rho_est > 0.0) {
        return Err(Error::invalid(format!("rho = {rho_est} must be positive")));
    }
    let count = zero_count as i64;
    let cz_band = (count - 2, count + 2);
    let v = 2.0 * k as f64 * rho_est;
    if (v - v.round()).abs() < RESONANCE_TOL {
        return Ok(DictionaryCheck {
            cz_band,
            predicted_cz: None,
            verdict: Verdict::Inconclusive,
        });
    }
    let cz = 2 * v.floor() as i64 + 1;
    let verdict = if cz_band.0 <= cz && cz <= cz_band.1 {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    Ok(DictionaryCheck {
        cz_band,
        predicted_cz: Some(cz),
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatelliteClass {
    pub p: i64,
    pub q: i64,
    pub link_gamma: i64,
    pub link_gamma_bar: i64,
}

impl SatelliteClass {
    pub fn fraction(&self) -> Fraction {
        Fraction { p: self.p, q: self.q }
    }
}

/// Coprime `(p, q)` with `|p|, |q| <= max_pq` such that `(p+q)/(2q)` or
/// `(p+q)/(2p)` (positive denominator) lies in `(rho, 1]` if `rho < 1`, or
/// in `[1, rho)` if `rho > 1`. Sorted by `(p, q)`.
pub fn angenent_table(rho: &Surd, max_pq: u64) -> Result<Vec<SatelliteClass>> {
    if !rho.is_positive() {
        return Err(Error::invalid(format!("rho = {rho} must be positive")));
    }
    let one = Surd::one();
    if rho == &one {
        return Err(Error::EmptyInterval("rho = 1 forces nothing".into()));
    }
    if rho.is_rational() {
        return Err(Error::Resonant(format!("rho = {rho} is rational")));
    }
    let m = i64::try_from(max_pq).map_err(|_| Error::Overflow("max_pq".into()))?;
    let below = rho < &one;
    let in_range = |num: i64, den: i64| -> bool {
        let x = Surd::rational(num, den).expect("den > 0");
        if below {
            rho < &x && x <= one
        } else {
            one <= x && &x < rho
        }
    };
    let mut out = Vec::new();
    for p in -m..=m {
        for q in -m..=m {
            let f = Fraction { p, q };
            if (p, q) == (0, 0) || !f.is_simple() {
                continue;
            }
            let hit = (q > 0 && in_range(p + q, 2 * q)) || (p > 0 && in_range(p + q, 2 * p));
            if hit {
                out.push(SatelliteClass {
                    p,
                    q,
                    link_gamma: p,
                    link_gamma_bar: q,
                });
            }
        }
    }
    Ok(out)
}

/// The model rotation data `(2*rho - 1, 1/(2*rho - 1))` of the binding.
pub fn angenent_thetas(rho: &Surd) -> Result<(Surd, Surd)> {
    let t1 = rho.mul_int(2).add_int(-1);
    let t2 = t1.recip()?;
    Ok((t1, t2))
}
