//! Periodic-orbit counts for an open book whose page is a once-punctured
//! torus with hyperbolic linear monodromy, Nielsen class labels via Smith
//! normal form, and the linear Hamiltonian generating the monodromy.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::cz::OrbitSpec;
use crate::error::{Error, Result};
use crate::surd::Surd;

type Mat = [[BigInt; 2]; 2];

fn serialize_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn serialize_display_list<T: fmt::Display, S: Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn serialize_display_pair<T: fmt::Display, S: Serializer>(v: &(T, T), s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq([v.0.to_string(), v.1.to_string()])
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn identity() -> Mat {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

fn det(m: &Mat) -> BigInt {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

/// Hyperbolic element of `SL(2, Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonodromyMatrix {
    m: Mat,
}

impl Serialize for MonodromyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl MonodromyMatrix {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let m = [[a.into(), b.into()], [c.into(), d.into()]];
        if !det(&m).is_one() {
            return Err(Error::invalid(format!("determinant {} is not 1", det(&m))));
        }
        let tr = &m[0][0] + &m[1][1];
        if tr.abs() <= BigInt::from(2) {
            return Err(Error::invalid(format!("trace {tr} is not hyperbolic (|trace| must exceed 2)")));
        }
        Ok(MonodromyMatrix { m })
    }

    /// The cat map `[[2,1],[1,1]]`.
    pub fn cat() -> Self {
        MonodromyMatrix::new(2, 1, 1, 1).expect("hyperbolic")
    }

    pub fn entries(&self) -> &Mat {
        &self.m
    }

    pub fn trace(&self) -> BigInt {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn pow(&self, k: u64) -> Mat {
        let mut result = identity();
        let mut base = self.m.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = mat_mul(&result, &base);
            }
            base = mat_mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// The eigenvalue of largest modulus, `(t +- sqrt(t^2 - 4))/2` with the
    /// sign of the trace `t`.
    pub fn eigenvalue(&self) -> Result<Surd> {
        let t = self.trace();
        let disc = (&t * &t - BigInt::from(4))
            .to_u64()
            .ok_or_else(|| Error::Overflow("discriminant exceeds 64 bits".into()))?;
        let root = Surd::sqrt(disc);
        let signed = if t.is_positive() { root } else { -root };
        signed.add_int(t).checked_div(&Surd::integer(2))
    }

    /// `A^k - I`.
    pub fn shifted_power(&self, k: u64) -> Mat {
        let mut p = self.pow(k);
        p[0][0] -= 1;
        p[1][1] -= 1;
        p
    }
}

impl FromStr for MonodromyMatrix {
    type Err = Error;

    /// Row-major `a,b,c,d`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::parse("matrix", s, "expected four comma-separated integers"));
        }
        let v = parts
            .iter()
            .map(|p| p.parse::<BigInt>().map_err(|_| Error::parse("matrix", s, format!("bad entry {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let [a, b, c, d]: [BigInt; 4] = v.try_into().expect("four entries");
        MonodromyMatrix::new(a, b, c, d)
    }
}

impl fmt::Display for MonodromyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

fn check_period(k: u64) -> Result<()> {
    if k == 0 {
        Err(Error::invalid("period must be at least 1"))
    } else {
        Ok(())
    }
}

/// Fixed points of `A^k` on the torus, `|det(A^k - I)|`.
pub fn periodic_point_count(a: &MonodromyMatrix, k: u64) -> Result<BigInt> {
    check_period(k)?;
    Ok(det(&a.shifted_power(k)).abs())
}

/// `|2 - trace(A^k)|` from the matrix power.
pub fn count_by_trace(a: &MonodromyMatrix, k: u64) -> Result<BigInt> {
    check_period(k)?;
    let p = a.pow(k);
    Ok((BigInt::from(2) - (&p[0][0] + &p[1][1])).abs())
}

/// `|2 - t_k|` with `t_{k+1} = tr(A) t_k - t_{k-1}`, `t_0 = 2`, `t_1 = tr(A)`.
pub fn count_by_recurrence(a: &MonodromyMatrix, k: u64) -> Result<BigInt> {
    check_period(k)?;
    let tr = a.trace();
    let (mut prev, mut cur) = (BigInt::from(2), tr.clone());
    for _ in 1..k {
        let next = &tr * &cur - &prev;
        prev = cur;
        cur = next;
    }
    Ok((BigInt::from(2) - cur).abs())
}

/// Enumerates lattice points `n` with `(A^k - I)^{-1} n` in `[0,1)^2`.
pub fn count_by_lattice(a: &MonodromyMatrix, k: u64) -> Result<u64> {
    check_period(k)?;
    let m = a.shifted_power(k);
    let e = |i: usize, j: usize| -> Result<i128> {
        m[i][j].to_i128().ok_or_else(|| Error::Overflow("lattice brute force".into()))
    };
    let (m00, m01, m10, m11) = (e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?);
    let d = m00 * m11 - m01 * m10;
    let xs = [0, m00, m01, m00 + m01];
    let ys = [0, m10, m11, m10 + m11];
    let span = (xs.iter().max().unwrap() - xs.iter().min().unwrap() + 1)
        * (ys.iter().max().unwrap() - ys.iter().min().unwrap() + 1);
    if span > 50_000_000 {
        return Err(Error::invalid(format!("period {k} is too large for lattice enumeration")));
    }
    let inside = |num: i128| if d > 0 { 0 <= num && num < d } else { d < num && num <= 0 };
    let mut count = 0u64;
    for nx in *xs.iter().min().unwrap()..=*xs.iter().max().unwrap() {
        for ny in *ys.iter().min().unwrap()..=*ys.iter().max().unwrap() {
            // adj(M) n, whose quotient by det(M) must lie in [0,1)^2
            let u = m11 * nx - m01 * ny;
            let v = -m10 * nx + m00 * ny;
            if inside(u) && inside(v) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Fixed points outside the puncture's class.
pub fn nontrivial_class_count(a: &MonodromyMatrix, k: u64) -> Result<BigInt> {
    Ok(periodic_point_count(a, k)? - 1)
}

/// `U * M * V = diag(d1, d2)` with `d1 | d2`, `d_i >= 0`, `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: Mat,
    pub v: Mat,
    pub diag: (BigInt, BigInt),
}

pub fn smith_normal_form(m: &Mat) -> SmithForm {
    let mut d = m.clone();
    let mut u = identity();
    let mut v = identity();
    fn swap_rows(a: &mut Mat, i: usize, j: usize) {
        a.swap(i, j);
    }
    fn swap_cols(a: &mut Mat, i: usize, j: usize) {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
    }
    // row_i -= q * row_j
    fn row_op(a: &mut Mat, i: usize, j: usize, q: &BigInt) {
        for c in 0..2 {
            let t = q * &a[j][c];
            a[i][c] -= t;
        }
    }
    fn col_op(a: &mut Mat, i: usize, j: usize, q: &BigInt) {
        for r in a.iter_mut() {
            let t = q * &r[j];
            r[i] -= t;
        }
    }
    loop {
        // Move the smallest non-zero entry to (0, 0).
        let mut best: Option<(usize, usize)> = None;
        for i in 0..2 {
            for j in 0..2 {
                if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        if bi != 0 {
            swap_rows(&mut d, 0, bi);
            swap_rows(&mut u, 0, bi);
        }
        if bj != 0 {
            swap_cols(&mut d, 0, bj);
            swap_cols(&mut v, 0, bj);
        }
        let p = d[0][0].clone();
        let q = d[1][0].div_floor(&p);
        row_op(&mut d, 1, 0, &q);
        row_op(&mut u, 1, 0, &q);
        let q = d[0][1].div_floor(&p);
        col_op(&mut d, 1, 0, &q);
        col_op(&mut v, 1, 0, &q);
        if !d[1][0].is_zero() || !d[0][1].is_zero() {
            continue;
        }
        if !d[1][1].is_multiple_of(&p) {
            // row_0 += row_1 brings d[1][1] into the pivot row
            let minus_one = -BigInt::one();
            row_op(&mut d, 0, 1, &minus_one);
            row_op(&mut u, 0, 1, &minus_one);
            continue;
        }
        break;
    }
    for i in 0..2 {
        if d[i][i].is_negative() {
            for c in 0..2 {
                d[i][c] = -d[i][c].clone();
                u[i][c] = -u[i][c].clone();
            }
        }
    }
    let diag = (d[0][0].clone(), d[1][1].clone());
    SmithForm { u, v, diag }
}

/// A Nielsen fixed-point class of `A^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NielsenClassLabel {
    pub period: u64,
    /// Coordinates in `Z/d1 x Z/d2`.
    #[serde(serialize_with = "serialize_display_pair")]
    pub coset: (BigInt, BigInt),
    /// Representative `v` of the coset in `Z^2 / (A^k - I) Z^2`.
    #[serde(serialize_with = "serialize_display_pair")]
    pub vector: (BigInt, BigInt),
    /// The fixed point `(A^k - I)^{-1} v` reduced into `[0,1)^2`.
    #[serde(serialize_with = "serialize_display_pair")]
    pub fixed_point: (BigRational, BigRational),
}

fn frac_part(x: BigRational) -> BigRational {
    let fl = x.floor();
    x - fl
}

const MAX_LABELS: u64 = 1_000_000;

/// Coset representatives of `Z^2/(A^k - I)Z^2` other than the origin, in
/// lexicographic order of their Smith coordinates.
pub fn class_labels(a: &MonodromyMatrix, k: u64) -> Result<Vec<NielsenClassLabel>> {
    check_period(k)?;
    let m = a.shifted_power(k);
    let snf = smith_normal_form(&m);
    let (d1, d2) = snf.diag.clone();
    let total = &d1 * &d2;
    if total > BigInt::from(MAX_LABELS) {
        return Err(Error::invalid(format!("{total} classes exceed the label limit {MAX_LABELS}")));
    }
    // U is unimodular with det +-1, so U^{-1} = det(U) * adj(U).
    let du = det(&snf.u);
    let u = &snf.u;
    let u_inv = [
        [&du * &u[1][1], -&du * &u[0][1]],
        [-&du * &u[1][0], &du * &u[0][0]],
    ];
    let dm = BigRational::from_integer(det(&m));
    let (n1, n2) = (d1.to_u64().expect("bounded"), d2.to_u64().expect("bounded"));
    let mut out = Vec::new();
    for c1 in 0..n1 {
        for c2 in 0..n2 {
            if c1 == 0 && c2 == 0 {
                continue;
            }
            let (c1, c2) = (BigInt::from(c1), BigInt::from(c2));
            let vx = &u_inv[0][0] * &c1 + &u_inv[0][1] * &c2;
            let vy = &u_inv[1][0] * &c1 + &u_inv[1][1] * &c2;
            let fx = BigRational::from_integer(&m[1][1] * &vx - &m[0][1] * &vy) / dm.clone();
            let fy = BigRational::from_integer(-&m[1][0] * &vx + &m[0][0] * &vy) / dm.clone();
            out.push(NielsenClassLabel {
                period: k,
                coset: (c1, c2),
                vector: (vx, vy),
                fixed_point: (frac_part(fx), frac_part(fy)),
            });
        }
    }
    Ok(out)
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub matrix: MonodromyMatrix,
    #[serde(serialize_with = "serialize_display_list")]
    pub counts: Vec<BigInt>,
    /// `log(count_kmax / count_{kmax - 1})`
    pub rate_estimate: f64,
    /// The eigenvalue whose logarithm is the exact rate.
    #[serde(serialize_with = "serialize_display")]
    pub rate_exact: Surd,
    pub rate_exact_value: f64,
    pub relative_error: f64,
}

pub fn growth_report(a: &MonodromyMatrix, k_max: u64) -> Result<GrowthReport> {
    if k_max < 4 {
        return Err(Error::invalid("growth report needs k_max >= 4"));
    }
    let counts = (1..=k_max).map(|k| periodic_point_count(a, k)).collect::<Result<Vec<_>>>()?;
    let n = counts.len();
    let rate_estimate = ln_big(&counts[n - 1]) - ln_big(&counts[n - 2]);
    let lambda = a.eigenvalue()?;
    let rate_exact_value = lambda.to_f64().abs().ln();
    Ok(GrowthReport {
        matrix: a.clone(),
        counts,
        rate_estimate,
        relative_error: (rate_estimate - rate_exact_value).abs() / rate_exact_value,
        rate_exact: lambda,
        rate_exact_value,
    })
}

/// Upper bound `C * k` on the action of an orbit meeting the page `k` times.
pub fn action_bound(k: u64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid(format!("return-time bound C = {c} must be positive")));
    }
    check_period(k)?;
    Ok(c * k as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionCount {
    pub period: u64,
    pub action_bound: f64,
    /// Lower bound for the number of closed orbits of action at most `action_bound`.
    #[serde(serialize_with = "serialize_display")]
    pub orbit_lower_bound: BigInt,
}

pub fn action_counts(a: &MonodromyMatrix, k_max: u64, c: f64) -> Result<Vec<ActionCount>> {
    (1..=k_max)
        .map(|k| {
            Ok(ActionCount {
                period: k,
                action_bound: action_bound(k, c)?,
                orbit_lower_bound: nontrivial_class_count(a, k)?,
            })
        })
        .collect()
}

/// `CZ(B^k) = 2*floor(k*T) + 1` for the elliptic binding.
pub fn binding_cz(t: &Surd, k: u64) -> Result<i64> {
    if t.is_rational() {
        return Err(Error::Resonant(format!("binding parameter T = {t} must be irrational")));
    }
    OrbitSpec::elliptic("B", t.clone()).cz(k)
}

/// `Q(x, y) = a x^2 + b xy + c y^2`, flowing by `(x', y') = (-Q_y, Q_x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticHamiltonian {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticHamiltonian {
    /// `(1/sqrt 5) log((3+sqrt 5)/2) (x^2 - xy - y^2)`, generating the cat map.
    pub fn cat() -> Self {
        let kappa = ((3.0 + 5f64.sqrt()) / 2.0).ln() / 5f64.sqrt();
        QuadraticHamiltonian {
            a: kappa,
            b: -kappa,
            c: -kappa,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    fn field(&self, x: f64, y: f64) -> (f64, f64) {
        let qx = 2.0 * self.a * x + self.b * y;
        let qy = self.b * x + 2.0 * self.c * y;
        (-qy, qx)
    }

    /// RK4 flow for time `t` with `steps` equal steps.
    pub fn flow(&self, x: f64, y: f64, t: f64, steps: u64) -> (f64, f64) {
        let h = t / steps as f64;
        let (mut x, mut y) = (x, y);
        for _ in 0..steps {
            let k1 = self.field(x, y);
            let k2 = self.field(x + h / 2.0 * k1.0, y + h / 2.0 * k1.1);
            let k3 = self.field(x + h / 2.0 * k2.0, y + h / 2.0 * k2.1);
            let k4 = self.field(x + h * k3.0, y + h * k3.1);
            x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (x, y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeOneCheck {
    /// Columns are the images of `(1,0)` and `(0,1)`, stored row-major.
    pub flow: [[f64; 2]; 2],
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const TIME_ONE_STEP: f64 = 1e-4;

pub fn time_one_check(q: &QuadraticHamiltonian, a: &MonodromyMatrix, tolerance: f64) -> Result<TimeOneCheck> {
    let steps = (1.0 / TIME_ONE_STEP).round() as u64;
    let c0 = q.flow(1.0, 0.0, 1.0, steps);
    let c1 = q.flow(0.0, 1.0, 1.0, steps);
    let flow = [[c0.0, c1.0], [c0.1, c1.1]];
    let mut max_error = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let want = a.entries()[i][j]
                .to_f64()
                .ok_or_else(|| Error::Overflow("matrix entry".into()))?;
            max_error = max_error.max((flow[i][j] - want).abs());
        }
    }
    if !max_error.is_finite() {
        return Err(Error::Numerical("time-one flow diverged".into()));
    }
    Ok(TimeOneCheck {
        flow,
        max_error,
        tolerance,
        passed: max_error <= tolerance,
    })
}
