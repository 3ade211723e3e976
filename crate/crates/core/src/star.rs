//! Integrable models on the three-sphere: ellipsoids and the star-shaped
//! hypersurfaces `S_gamma` determined by a curve `gamma` in the
//! `(r1^2, r2^2)` quadrant.
//!
//! Closed orbits of `S_gamma` other than the Hopf link `H1 u H2` come in
//! Morse–Bott tori labeled by linking classes `(p, q)`, where `p` is the
//! linking with `H2` and `q` the linking with `H1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cz::OrbitSpec;
use crate::error::{Error, Result};
use crate::farey::{enumerate_coprime_in_interval, Fraction, IntervalKind};
use crate::surd::Surd;

pub type HopfClass = Fraction;

/// One point of `gamma` with its derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
}

impl GammaSample {
    /// `x*y' - x'*y`, positive on admissible curves.
    pub fn admissibility(&self) -> f64 {
        self.x * self.dy - self.dx * self.y
    }

    /// `-x'/y'`.
    pub fn slope_ratio(&self) -> f64 {
        -self.dx / self.dy
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaProfile {
    /// `-x'(0)/y'(0)`
    pub theta1: Surd,
    /// `-x'(1)/y'(1)`
    pub theta2: Surd,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<GammaSample>,
}

const SAMPLE_TOL: f64 = 1e-9;
const THETA_TOL: f64 = 1e-6;

impl GammaProfile {
    pub fn new(theta1: Surd, theta2: Surd) -> Result<Self> {
        let p = GammaProfile {
            theta1,
            theta2,
            samples: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_samples(mut self, samples: Vec<GammaSample>) -> Result<Self> {
        self.samples = samples;
        self.validate()?;
        Ok(self)
    }

    /// The profile with the roles of `H1` and `H2` exchanged.
    pub fn relabeled(&self) -> Result<GammaProfile> {
        Ok(GammaProfile {
            theta1: self.theta2.recip()?,
            theta2: self.theta1.recip()?,
            samples: Vec::new(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, th) in [("theta1", &self.theta1), ("theta2", &self.theta2)] {
            if th.is_rational() {
                return Err(Error::Resonant(format!("{name} = {th} is rational")));
            }
        }
        if self.samples.is_empty() {
            return Ok(());
        }
        self.validate_samples()
    }

    fn validate_samples(&self) -> Result<()> {
        let s = &self.samples;
        if s.len() < 2 {
            return Err(Error::invalid("a sampled profile needs at least two samples"));
        }
        if s.windows(2).any(|w| !(w[0].t < w[1].t)) {
            return Err(Error::invalid("sample times must increase strictly"));
        }
        let (first, last) = (s[0], s[s.len() - 1]);
        if first.t.abs() > SAMPLE_TOL || (last.t - 1.0).abs() > SAMPLE_TOL {
            return Err(Error::invalid("samples must cover t in [0, 1]"));
        }
        if !(first.x > 0.0 && first.y.abs() <= SAMPLE_TOL && first.dy > 0.0) {
            return Err(Error::invalid("gamma(0) must lie on the positive x axis with y'(0) > 0"));
        }
        if !(last.x.abs() <= SAMPLE_TOL && last.y > 0.0 && last.dx < 0.0) {
            return Err(Error::invalid("gamma(1) must lie on the positive y axis with x'(1) < 0"));
        }
        if let Some(bad) = s.iter().find(|z| !(z.admissibility() > 0.0)) {
            return Err(Error::invalid(format!(
                "x*y' - x'*y = {} is not positive at t = {}",
                bad.admissibility(),
                bad.t
            )));
        }
        for (name, th, z) in [("theta1", &self.theta1, first), ("theta2", &self.theta2, last)] {
            let want = th.to_f64();
            if (z.slope_ratio() - want).abs() > THETA_TOL * want.abs().max(1.0) {
                return Err(Error::invalid(format!(
                    "{name} = {th} disagrees with the sampled slope {}",
                    z.slope_ratio()
                )));
            }
        }
        // -x'/y' must be strictly monotone wherever y' keeps its sign.
        let mut run: Vec<f64> = Vec::new();
        let mut run_sign = 0.0f64;
        for z in s {
            let sign = if z.dy > 0.0 {
                1.0
            } else if z.dy < 0.0 {
                -1.0
            } else {
                0.0
            };
            if sign != run_sign {
                check_monotone(&run)?;
                run.clear();
                run_sign = sign;
            }
            if sign != 0.0 {
                run.push(z.slope_ratio());
            }
        }
        check_monotone(&run)
    }
}

fn check_monotone(run: &[f64]) -> Result<()> {
    let up = run.windows(2).all(|w| w[1] > w[0]);
    let down = run.windows(2).all(|w| w[1] < w[0]);
    if up || down {
        Ok(())
    } else {
        Err(Error::invalid("slope ratio -x'/y' is not strictly monotone"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arc {
    First,
    Second,
    Third,
    T1Endpoint,
    T2Endpoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusOrbitFamily {
    pub cls: HopfClass,
    pub arc: Arc,
    pub gradings: (i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignCase {
    /// `0 < theta1, theta2`
    BothPositive,
    /// `theta1 < 0 < theta2`
    NegativePositive,
    /// `theta2 < 0 < theta1`
    PositiveNegative,
    /// `theta1, theta2 < 0`
    BothNegative,
}

pub fn sign_case(theta1: &Surd, theta2: &Surd) -> Result<SignCase> {
    for th in [theta1, theta2] {
        if th.is_rational() {
            return Err(Error::Resonant(format!("{th} is rational")));
        }
    }
    Ok(match (theta1.is_positive(), theta2.is_positive()) {
        (true, true) => SignCase::BothPositive,
        (false, true) => SignCase::NegativePositive,
        (true, false) => SignCase::PositiveNegative,
        (false, false) => SignCase::BothNegative,
    })
}

fn flipped(v: Vec<Fraction>) -> impl Iterator<Item = Fraction> {
    v.into_iter().map(|f| Fraction { p: f.q, q: f.p })
}

/// Simple classes carrying a torus of closed orbits, sorted by `(p, q)`.
///
/// The denominator of each defining fraction (`p` for conditions on `q/p`,
/// `q` for conditions on `p/q`) is bounded by `max_p`.
pub fn admissible_classes(theta1: &Surd, theta2: &Surd, max_p: u64) -> Result<(SignCase, Vec<HopfClass>)> {
    let case = sign_case(theta1, theta2)?;
    let mut out = match case {
        SignCase::BothPositive => {
            let (lo, hi) = match theta1.cmp(theta2) {
                Ordering::Less => (theta1, theta2),
                Ordering::Greater => (theta2, theta1),
                Ordering::Equal => {
                    return Err(Error::EmptyInterval(format!("theta1 = theta2 = {theta1}")))
                }
            };
            enumerate_coprime_in_interval(lo, hi, max_p, IntervalKind::Open)?
        }
        SignCase::NegativePositive => {
            enumerate_coprime_in_interval(theta1, theta2, max_p, IntervalKind::Open)?
        }
        SignCase::PositiveNegative => flipped(enumerate_coprime_in_interval(
            &theta2.recip()?,
            &theta1.recip()?,
            max_p,
            IntervalKind::Open,
        )?)
        .collect(),
        SignCase::BothNegative => {
            let one = Surd::one();
            let mut v = enumerate_coprime_in_interval(theta1, &one, max_p, IntervalKind::OpenClosed)?;
            v.extend(flipped(enumerate_coprime_in_interval(
                &theta2.recip()?,
                &one,
                max_p,
                IntervalKind::OpenClosed,
            )?));
            v
        }
    };
    out.sort();
    out.dedup();
    Ok((case, out))
}

fn rat(num: i64, den: i64) -> Surd {
    Surd::rational(num, den).expect("nonzero denominator")
}

fn in_open(x: &Surd, lo: &Surd, hi: &Surd) -> bool {
    lo < x && x < hi
}

/// Exact membership test for a single class, without enumeration.
pub fn is_admissible(theta1: &Surd, theta2: &Surd, cls: HopfClass) -> Result<bool> {
    let case = sign_case(theta1, theta2)?;
    if !cls.is_simple() {
        return Ok(false);
    }
    let HopfClass { p, q } = cls;
    Ok(match case {
        SignCase::BothPositive => {
            if theta1 == theta2 {
                return Err(Error::EmptyInterval(format!("theta1 = theta2 = {theta1}")));
            }
            let (lo, hi) = if theta1 < theta2 { (theta1, theta2) } else { (theta2, theta1) };
            p > 0 && in_open(&rat(q, p), lo, hi)
        }
        SignCase::NegativePositive => p > 0 && in_open(&rat(q, p), theta1, theta2),
        SignCase::PositiveNegative => q > 0 && in_open(&rat(p, q), &theta2.recip()?, &theta1.recip()?),
        SignCase::BothNegative => {
            let one = Surd::one();
            let lower = |x: Surd, lo: &Surd| &x > lo && x <= one;
            (p > 0 && lower(rat(q, p), theta1)) || (q > 0 && lower(rat(p, q), &theta2.recip()?))
        }
    })
}

fn arc_of(case: SignCase, cls: HopfClass) -> Arc {
    if case == SignCase::BothPositive {
        return Arc::Second;
    }
    match (cls.p, cls.q) {
        (1, 0) => Arc::T1Endpoint,
        (0, 1) => Arc::T2Endpoint,
        (_, q) if q < 0 => Arc::First,
        (p, _) if p < 0 => Arc::Third,
        _ => Arc::Second,
    }
}

fn gradings(theta1: &Surd, theta2: &Surd, case: SignCase, cls: HopfClass) -> (i64, i64) {
    let g = 2 * (cls.p + cls.q);
    if case == SignCase::BothPositive && theta2 < theta1 {
        (g, g - 1)
    } else {
        (g, g + 1)
    }
}

pub fn classify_orbits(profile: &GammaProfile, max_p: u64) -> Result<Vec<TorusOrbitFamily>> {
    profile.validate()?;
    let (t1, t2) = (&profile.theta1, &profile.theta2);
    let (case, classes) = admissible_classes(t1, t2, max_p)?;
    Ok(classes
        .into_iter()
        .map(|cls| TorusOrbitFamily {
            cls,
            arc: arc_of(case, cls),
            gradings: gradings(t1, t2, case, cls),
        })
        .collect())
}

/// The binding orbits `H1` (rotation `1 + theta1`) and `H2` (rotation
/// `1 + 1/theta2`).
pub fn hopf_binding_orbits(profile: &GammaProfile) -> Result<(OrbitSpec, OrbitSpec)> {
    profile.validate()?;
    let h1 = OrbitSpec::elliptic("H1", profile.theta1.add_int(1)).with_in_link(true);
    let h2 = OrbitSpec::elliptic("H2", profile.theta2.recip()?.add_int(1)).with_in_link(true);
    Ok((h1, h2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcedOrbit {
    pub cls: HopfClass,
    #[serde(rename = "link_L1")]
    pub link_l1: i64,
    #[serde(rename = "link_L2")]
    pub link_l2: i64,
}

/// Classes of closed orbits forced by a transverse Hopf link `L1 u L2`
/// whose binding indices match the model with rotation data
/// `(theta1, theta2)`.
pub fn forcing_hopf(theta1: &Surd, theta2: &Surd, max_p: u64) -> Result<Vec<ForcedOrbit>> {
    let (_, classes) = admissible_classes(theta1, theta2, max_p)?;
    Ok(classes
        .into_iter()
        .map(|cls| ForcedOrbit {
            cls,
            link_l1: cls.q,
            link_l2: cls.p,
        })
        .collect())
}

/// A finite chain complex over `Q` with the differential lowering degree by one.
#[derive(Clone, Debug, Default)]
pub struct ChainComplex {
    degrees: Vec<i64>,
    /// `d[i][j]`: coefficient of generator `i` in the boundary of generator `j`.
    d: BTreeMap<(usize, usize), BigRational>,
}

impl ChainComplex {
    pub fn new() -> Self {
        ChainComplex::default()
    }

    pub fn add_generator(&mut self, degree: i64) -> usize {
        self.degrees.push(degree);
        self.degrees.len() - 1
    }

    /// Adds `coeff * target` to the boundary of `source`.
    pub fn add_boundary(&mut self, source: usize, target: usize, coeff: i64) -> Result<()> {
        if self.degrees[target] != self.degrees[source] - 1 {
            return Err(Error::invalid("differential must lower degree by one"));
        }
        let entry = self.d.entry((target, source)).or_insert_with(BigRational::zero);
        *entry += BigRational::from_integer(BigInt::from(coeff));
        Ok(())
    }

    fn in_degree(&self, n: i64) -> Vec<usize> {
        (0..self.degrees.len()).filter(|&i| self.degrees[i] == n).collect()
    }

    /// Rank of `d: C_n -> C_{n-1}`.
    fn rank_d(&self, n: i64) -> usize {
        let cols = self.in_degree(n);
        let rows = self.in_degree(n - 1);
        let mut m: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|&i| {
                cols.iter()
                    .map(|&j| self.d.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero))
                    .collect()
            })
            .collect();
        matrix_rank(&mut m)
    }

    /// `dim H_n = dim C_n - rank d_n - rank d_{n+1}`.
    pub fn homology_rank(&self, n: i64) -> usize {
        self.in_degree(n).len() - self.rank_d(n) - self.rank_d(n + 1)
    }

    /// Non-zero homology ranks by degree.
    pub fn homology(&self) -> BTreeMap<i64, u64> {
        let mut degs: Vec<i64> = self.degrees.clone();
        degs.sort();
        degs.dedup();
        degs.into_iter()
            .map(|n| (n, self.homology_rank(n) as u64))
            .filter(|&(_, r)| r > 0)
            .collect()
    }
}

fn matrix_rank(m: &mut [Vec<BigRational>]) -> usize {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = BigRational::one() / m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone() * inv.clone();
                for c in col..ncols {
                    let sub = factor.clone() * m[rank][c].clone();
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Morse–Bott complex of one torus of orbits: a perfect Morse function on
/// the circle of orbits gives a minimum and a maximum joined by two flow
/// lines of opposite sign.
pub fn circle_complex(low: i64, high: i64) -> Result<ChainComplex> {
    let mut cx = ChainComplex::new();
    let lo = cx.add_generator(low.min(high));
    let hi = cx.add_generator(low.max(high));
    if (high - low).abs() != 1 {
        return Err(Error::invalid("circle generators must sit in adjacent degrees"));
    }
    cx.add_boundary(hi, lo, 1)?;
    cx.add_boundary(hi, lo, -1)?;
    Ok(cx)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassHomology {
    pub cls: HopfClass,
    pub ranks: BTreeMap<i64, u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CchResult {
    pub classes: Vec<ClassHomology>,
}

impl CchResult {
    pub fn rank(&self, cls: HopfClass, degree: i64) -> u64 {
        self.classes
            .iter()
            .find(|c| c.cls == cls)
            .and_then(|c| c.ranks.get(&degree).copied())
            .unwrap_or(0)
    }

    pub fn total_rank(&self, cls: HopfClass) -> u64 {
        self.classes
            .iter()
            .find(|c| c.cls == cls)
            .map_or(0, |c| c.ranks.values().sum())
    }
}

/// Cylindrical contact homology of `S_gamma` relative to the Hopf link in a
/// single simple class.
pub fn cch_class(profile: &GammaProfile, cls: HopfClass) -> Result<BTreeMap<i64, u64>> {
    profile.validate()?;
    if !cls.is_simple() {
        return Err(Error::invalid(format!("class {cls} is not simple")));
    }
    let (t1, t2) = (&profile.theta1, &profile.theta2);
    if !is_admissible(t1, t2, cls)? {
        return Ok(BTreeMap::new());
    }
    let case = sign_case(t1, t2)?;
    let (a, b) = gradings(t1, t2, case, cls);
    Ok(circle_complex(a, b)?.homology())
}

pub fn cch_hopf_complement(profile: &GammaProfile, max_p: u64) -> Result<CchResult> {
    let families = classify_orbits(profile, max_p)?;
    let classes = families
        .into_iter()
        .map(|f| {
            let (a, b) = f.gradings;
            Ok(ClassHomology {
                cls: f.cls,
                ranks: circle_complex(a, b)?.homology(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CchResult { classes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipsoidOrbits {
    #[serde(rename = "P_theta")]
    pub p_theta: Surd,
    #[serde(rename = "Q_theta")]
    pub q_theta: Surd,
}

impl EllipsoidOrbits {
    pub fn orbits(&self) -> (OrbitSpec, OrbitSpec) {
        (
            OrbitSpec::elliptic("P", self.p_theta.clone()),
            OrbitSpec::elliptic("Q", self.q_theta.clone()),
        )
    }

    /// `lk(P^k, Q) = k`.
    pub fn linking(&self, k: u64) -> u64 {
        k
    }
}

/// Rotation data of the two simple orbits of the ellipsoid with axis
/// ratio `a/b`.
pub fn ellipsoid_orbits(a_over_b: &Surd) -> Result<EllipsoidOrbits> {
    if a_over_b.is_rational() {
        return Err(Error::Resonant(format!(
            "axis ratio {a_over_b} is rational; the ellipsoid is degenerate"
        )));
    }
    if !a_over_b.is_positive() {
        return Err(Error::invalid(format!("axis ratio {a_over_b} must be positive")));
    }
    Ok(EllipsoidOrbits {
        p_theta: a_over_b.add_int(1),
        q_theta: a_over_b.recip()?.add_int(1),
    })
}

/// Linking number of leaves `K_(l,m)` and `K_(l',m')` of two distinct tori.
pub fn linking_torus_orbits(k1: (i64, i64), k2: (i64, i64)) -> Result<i64> {
    let ((l, m), (l2, m2)) = (k1, k2);
    if m <= 0 || m2 <= 0 {
        return Err(Error::invalid("torus orbit labels need m > 0"));
    }
    let overflow = || Error::Overflow("linking".into());
    let lhs = i128::from(l) * i128::from(m2);
    let rhs = i128::from(l2) * i128::from(m);
    match lhs.cmp(&rhs) {
        Ordering::Less => l2.checked_mul(m).ok_or_else(overflow),
        Ordering::Greater => l.checked_mul(m2).ok_or_else(overflow),
        Ordering::Equal => Err(Error::invalid(format!(
            "({l},{m}) and ({l2},{m2}) lie on the same torus"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example3Result {
    pub plc_ok: bool,
    pub link_t1_target: i64,
    pub link_t1_t2: i64,
    pub link_t2_target: i64,
    pub link_t2_t1: i64,
    pub ranks: BTreeMap<i64, u64>,
}

/// Contact homology relative to the torus-knot link `T1 u T2` built from
/// leaves of the tori `T_(p,q)` and `T_(p',q')`, in the class of a leaf of
/// `T_(p'',q'')`.
pub fn example3_cch(
    profile: &GammaProfile,
    t1: HopfClass,
    t2: HopfClass,
    target: HopfClass,
) -> Result<Example3Result> {
    profile.validate()?;
    let (th1, th2) = (&profile.theta1, &profile.theta2);
    if !(th1.is_positive() && th1 < th2) {
        return Err(Error::Hypothesis(format!("need 0 < theta1 < theta2, got {th1}, {th2}")));
    }
    for (name, c) in [("T1", t1), ("T2", t2), ("target", target)] {
        if c.p <= 0 || c.q <= 0 || !c.is_simple() {
            return Err(Error::invalid(format!("{name} = {c} must be positive and coprime")));
        }
    }
    let (s_t1, s_t2) = (rat(t1.q, t1.p), rat(t2.q, t2.p));
    if !(th1 < &s_t2 && s_t2 < s_t1 && &s_t1 < th2) {
        return Err(Error::Hypothesis(format!(
            "need theta1 < {}/{} < {}/{} < theta2",
            t2.q, t2.p, t1.q, t1.p
        )));
    }
    let inv = |c: HopfClass| rat(c.p, c.q);
    if !(inv(t1) < inv(target) && inv(target) < inv(t2)) {
        return Err(Error::Hypothesis(format!(
            "need {}/{} < {}/{} < {}/{}",
            t1.p, t1.q, target.p, target.q, t2.p, t2.q
        )));
    }
    let lab = |c: HopfClass| (c.p, c.q);
    let link_t1_target = linking_torus_orbits(lab(t1), lab(target))?;
    let link_t1_t2 = linking_torus_orbits(lab(t1), lab(t2))?;
    let link_t2_target = linking_torus_orbits(lab(t2), lab(target))?;
    let link_t2_t1 = link_t1_t2;
    let plc_ok = link_t1_target != link_t1_t2 && link_t2_target != link_t2_t1;
    let ranks = if plc_ok {
        let g = 2 * (target.p + target.q);
        circle_complex(g, g + 1)?.homology()
    } else {
        BTreeMap::new()
    };
    Ok(Example3Result {
        plc_ok,
        link_t1_target,
        link_t1_t2,
        link_t2_target,
        link_t2_t1,
        ranks,
    })
}
