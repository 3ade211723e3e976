//! Intersection-number arithmetic for asymptotically cylindrical maps:
//! the asymptotic corrections `Omega`, the trivialization-free defect
//! `Delta`, the homotopy-invariant star pairing, and `delta_infinity` for
//! branched covers of trivial cylinders over link components.
//!
//! The perturbed intersection count `iota` depends on homotopy data that is
//! not modeled here; callers supply it.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cz::OrbitSpec;
use crate::error::{Error, Result};
use crate::surd::Surd;

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PunctureSign {
    #[serde(alias = "+")]
    Positive,
    #[serde(alias = "-")]
    Negative,
}

/// One asymptotic end: a `cover`-fold cover of `orbit`, approached with
/// the given sign, optionally with the winding of its leading eigensection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunctureDatum {
    pub sign: PunctureSign,
    pub orbit: OrbitSpec,
    pub cover: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winding: Option<i64>,
}

impl PunctureDatum {
    pub fn new(sign: PunctureSign, orbit: OrbitSpec, cover: u64, winding: Option<i64>) -> Result<Self> {
        let z = PunctureDatum {
            sign,
            orbit,
            cover,
            winding,
        };
        z.validate()?;
        Ok(z)
    }

    pub fn positive(orbit: OrbitSpec, cover: u64) -> Result<Self> {
        PunctureDatum::new(PunctureSign::Positive, orbit, cover, None)
    }

    pub fn negative(orbit: OrbitSpec, cover: u64) -> Result<Self> {
        PunctureDatum::new(PunctureSign::Negative, orbit, cover, None)
    }

    /// Asymptotic windings satisfy `w <= alpha^-` at positive ends and
    /// `w >= alpha^+` at negative ones.
    pub fn validate(&self) -> Result<()> {
        if self.cover == 0 {
            return Err(Error::invalid("puncture cover must be at least 1"));
        }
        if let Some(w) = self.winding {
            match self.sign {
                PunctureSign::Positive => {
                    let a = self.orbit.alpha_minus(self.cover)?;
                    if w > a {
                        return Err(Error::invalid(format!(
                            "winding {w} exceeds alpha^- = {a} at a positive puncture on {}",
                            self.orbit.name
                        )));
                    }
                }
                PunctureSign::Negative => {
                    let a = self.orbit.alpha_plus(self.cover)?;
                    if w < a {
                        return Err(Error::invalid(format!(
                            "winding {w} is below alpha^+ = {a} at a negative puncture on {}",
                            self.orbit.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn same_orbit(&self, other: &PunctureDatum) -> Result<bool> {
        if self.orbit.name != other.orbit.name {
            return Ok(false);
        }
        if self.orbit.kind != other.orbit.kind {
            return Err(Error::invalid(format!(
                "orbit {} appears with two different linear data",
                self.orbit.name
            )));
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticMap {
    pub punctures: Vec<PunctureDatum>,
    #[serde(default)]
    pub genus: u32,
}

impl AsymptoticMap {
    pub fn new(punctures: Vec<PunctureDatum>, genus: u32) -> Result<Self> {
        let m = AsymptoticMap { punctures, genus };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.punctures.is_empty() {
            return Err(Error::invalid("an asymptotic map needs at least one puncture"));
        }
        self.punctures.iter().try_for_each(PunctureDatum::validate)
    }

    /// Genus-zero map with one positive and one negative end.
    pub fn cylinder(top: OrbitSpec, top_cover: u64, bottom: OrbitSpec, bottom_cover: u64) -> Result<Self> {
        AsymptoticMap::new(
            vec![
                PunctureDatum::positive(top, top_cover)?,
                PunctureDatum::negative(bottom, bottom_cover)?,
            ],
            0,
        )
    }

    /// The trivial cylinder over the `cover`-fold cover of `orbit`.
    pub fn trivial_cylinder(orbit: OrbitSpec, cover: u64) -> Result<Self> {
        AsymptoticMap::cylinder(orbit.clone(), cover, orbit, cover)
    }

    pub fn plane(orbit: OrbitSpec, cover: u64) -> Result<Self> {
        AsymptoticMap::new(vec![PunctureDatum::positive(orbit, cover)?], 0)
    }

    pub fn is_cylinder(&self) -> bool {
        self.genus == 0
            && self.punctures.len() == 2
            && self.of_sign(PunctureSign::Positive).count() == 1
    }

    pub fn of_sign(&self, sign: PunctureSign) -> impl Iterator<Item = &PunctureDatum> {
        self.punctures.iter().filter(move |z| z.sign == sign)
    }

    /// Disjoint union.
    pub fn union(&self, other: &AsymptoticMap) -> AsymptoticMap {
        let mut punctures = self.punctures.clone();
        punctures.extend(other.punctures.iter().cloned());
        AsymptoticMap {
            punctures,
            genus: self.genus + other.genus,
        }
    }
}

/// Serializes a rational as `"n"` or `"n/d"`.
pub fn ratio_string<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn cover_i64(k: u64) -> Result<i64> {
    i64::try_from(k).map_err(|_| Error::Overflow("cover".into()))
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or_else(|| Error::Overflow(format!("{a} * {b}")))
}

/// `k1*k2*max(alpha^-(k1)/k1, alpha^-(k2)/k2)`.
pub fn omega_plus(orbit: &OrbitSpec, k1: u64, k2: u64) -> Result<i64> {
    let (a1, a2) = (orbit.alpha_minus(k1)?, orbit.alpha_minus(k2)?);
    Ok(mul(cover_i64(k2)?, a1)?.max(mul(cover_i64(k1)?, a2)?))
}

/// `k1*k2*min(alpha^+(k1)/k1, alpha^+(k2)/k2)`.
pub fn omega_minus(orbit: &OrbitSpec, k1: u64, k2: u64) -> Result<i64> {
    let (a1, a2) = (orbit.alpha_plus(k1)?, orbit.alpha_plus(k2)?);
    Ok(mul(cover_i64(k2)?, a1)?.min(mul(cover_i64(k1)?, a2)?))
}

/// `Omega^- - Omega^+` for two ends on the same orbit with the same sign,
/// zero otherwise.
pub fn delta_pair(z: &PunctureDatum, w: &PunctureDatum) -> Result<i64> {
    if z.sign != w.sign || !z.same_orbit(w)? {
        return Ok(0);
    }
    Ok(omega_minus(&z.orbit, z.cover, w.cover)? - omega_plus(&z.orbit, z.cover, w.cover)?)
}

fn sum_pairs(
    u: &AsymptoticMap,
    v: &AsymptoticMap,
    sign: PunctureSign,
    f: impl Fn(&PunctureDatum, &PunctureDatum) -> Result<i64>,
) -> Result<i64> {
    let mut total = 0i64;
    for z in u.of_sign(sign) {
        for w in v.of_sign(sign) {
            total = total
                .checked_add(f(z, w)?)
                .ok_or_else(|| Error::Overflow("pair sum".into()))?;
        }
    }
    Ok(total)
}

pub fn delta_total(u: &AsymptoticMap, v: &AsymptoticMap) -> Result<i64> {
    Ok(sum_pairs(u, v, PunctureSign::Positive, delta_pair)?
        + sum_pairs(u, v, PunctureSign::Negative, delta_pair)?)
}

/// `sum_{++} Omega^+ - sum_{--} Omega^-`; mixed-sign pairs contribute nothing.
pub fn omega_total(u: &AsymptoticMap, v: &AsymptoticMap) -> Result<i64> {
    let plus = sum_pairs(u, v, PunctureSign::Positive, |z, w| {
        if z.same_orbit(w)? {
            omega_plus(&z.orbit, z.cover, w.cover)
        } else {
            Ok(0)
        }
    })?;
    let minus = sum_pairs(u, v, PunctureSign::Negative, |z, w| {
        if z.same_orbit(w)? {
            omega_minus(&z.orbit, z.cover, w.cover)
        } else {
            Ok(0)
        }
    })?;
    Ok(plus - minus)
}

/// `[U]*[V] = iota + Omega(U,V) + Delta(U,V)/2`.
pub fn star(u: &AsymptoticMap, v: &AsymptoticMap, iota: i64) -> Result<Rational> {
    let omega = omega_total(u, v)?;
    let delta = delta_total(u, v)?;
    Ok(Rational::from_integer(iota + omega) + Rational::new(delta, 2))
}

/// Checks `[U]*[V] = int + delta_inf + Delta/2` with both counts non-negative.
pub fn decomposition_check(
    int_count: i64,
    delta_inf: i64,
    u: &AsymptoticMap,
    v: &AsymptoticMap,
    iota: i64,
) -> Result<bool> {
    if int_count < 0 || delta_inf < 0 {
        return Ok(false);
    }
    let lhs = star(u, v, iota)?;
    let rhs = Rational::from_integer(int_count + delta_inf) + Rational::new(delta_total(u, v)?, 2);
    Ok(lhs == rhs)
}

fn floor_cover(theta: &Surd, k: u64) -> Result<i64> {
    use num_traits::ToPrimitive;
    theta
        .mul_int(k)
        .floor()
        .to_i64()
        .ok_or_else(|| Error::Overflow("floor".into()))
}

fn non_resonant(theta: &Surd, k: u64, what: &str) -> Result<()> {
    if theta.is_resonant(k) {
        Err(Error::Resonant(format!("{what}: {k} * {theta} is an integer")))
    } else {
        Ok(())
    }
}

/// `delta_infinity(U, R x L)` for ends of `U` on covers of the link
/// component `link`, where `theta_plus`/`theta_minus` are its rotation
/// numbers for the forms at the positive and negative ends.
pub fn delta_infinity_over_link(
    link: &OrbitSpec,
    punctures: &[PunctureDatum],
    theta_plus: &Surd,
    theta_minus: &Surd,
) -> Result<i64> {
    let mut total = 0i64;
    for z in punctures {
        if z.orbit.name != link.name {
            return Err(Error::invalid(format!(
                "puncture on {} is not asymptotic to {}",
                z.orbit.name, link.name
            )));
        }
        let w = z
            .winding
            .ok_or_else(|| Error::invalid("delta_infinity needs a winding at every puncture"))?;
        total += match z.sign {
            PunctureSign::Positive => {
                non_resonant(theta_plus, z.cover, "theta_plus")?;
                floor_cover(theta_plus, z.cover)? - w
            }
            PunctureSign::Negative => {
                non_resonant(theta_minus, z.cover, "theta_minus")?;
                w - (floor_cover(theta_minus, z.cover)? + 1)
            }
        };
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchedCoverBound {
    /// Mapping degree of a generic section with extremal asymptotics.
    pub degree: i64,
    /// Lower estimate of `[U]*[C]`, taking the minimal `Delta` contribution.
    #[serde(serialize_with = "ratio_string")]
    pub star_lower: Rational,
    /// `(1 - #negative ends)/2`.
    #[serde(serialize_with = "ratio_string")]
    pub bound: Rational,
    pub satisfied: bool,
}

/// Lower bound for the self-pairing of a genus-zero branched cover of a
/// trivial cylinder over an elliptic link component, with one positive end
/// of multiplicity `k_plus` and negative ends of multiplicities `k_minus`.
pub fn branched_cover_bound(
    theta_plus: &Surd,
    theta_minus: &Surd,
    k_plus: u64,
    k_minus: &[u64],
) -> Result<BranchedCoverBound> {
    if theta_plus < theta_minus {
        return Err(Error::Hypothesis(format!(
            "rotation at the positive end ({theta_plus}) is below the negative end ({theta_minus})"
        )));
    }
    if k_plus == 0 || k_minus.contains(&0) {
        return Err(Error::invalid("covers must be at least 1"));
    }
    if !k_minus.is_empty() && k_minus.iter().sum::<u64>() != k_plus {
        return Err(Error::invalid(format!(
            "negative covers {k_minus:?} do not sum to the positive cover {k_plus}"
        )));
    }
    non_resonant(theta_plus, k_plus, "theta_plus")?;
    let mut degree = floor_cover(theta_plus, k_plus)?;
    for &k in k_minus {
        non_resonant(theta_minus, k, "theta_minus")?;
        degree -= floor_cover(theta_minus, k)? + 1;
    }
    let n_minus = k_minus.len() as i64;
    let star_lower = Rational::from_integer(degree) + Rational::new(1 + n_minus, 2);
    let bound = Rational::new(1 - n_minus, 2);
    Ok(BranchedCoverBound {
        degree,
        star_lower,
        bound,
        satisfied: star_lower >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2() -> OrbitSpec {
        OrbitSpec::elliptic("P", Surd::sqrt(2))
    }

    fn q() -> OrbitSpec {
        OrbitSpec::elliptic("Q", "(1+1*sqrt(3))/2".parse().unwrap())
    }

    fn half(n: i64) -> Rational {
        Rational::new(n, 2)
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_plus(&r2(), 1, 2).unwrap(), 2);
        assert_eq!(omega_minus(&r2(), 1, 2).unwrap(), 3);
        assert_eq!(omega_plus(&r2(), 1, 1).unwrap(), 1);
        assert_eq!(omega_minus(&r2(), 1, 1).unwrap(), 2);
    }

    #[test]
    fn delta_pair_examples() {
        let a = PunctureDatum::positive(r2(), 1).unwrap();
        let b = PunctureDatum::positive(r2(), 1).unwrap();
        assert_eq!(delta_pair(&a, &b).unwrap(), 1);
        let c = PunctureDatum::positive(q(), 1).unwrap();
        assert_eq!(delta_pair(&a, &c).unwrap(), 0);
        let d = PunctureDatum::positive(r2(), 2).unwrap();
        assert_eq!(delta_pair(&a, &d).unwrap(), 1);
        let e = PunctureDatum::negative(r2(), 1).unwrap();
        assert_eq!(delta_pair(&a, &e).unwrap(), 0);
    }

    #[test]
    fn inconsistent_orbit_names_rejected() {
        let a = PunctureDatum::positive(r2(), 1).unwrap();
        let fake = PunctureDatum::positive(OrbitSpec::hyperbolic("P", 1), 1).unwrap();
        assert!(delta_pair(&a, &fake).is_err());
    }

    #[test]
    fn delta_total_examples() {
        let u = AsymptoticMap::trivial_cylinder(r2(), 1).unwrap();
        assert_eq!(delta_total(&u, &u).unwrap(), 2);
        let v = AsymptoticMap::trivial_cylinder(q(), 1).unwrap();
        assert_eq!(delta_total(&u, &v).unwrap(), 0);
        let plane = AsymptoticMap::plane(r2(), 1).unwrap();
        let cyl = AsymptoticMap::cylinder(r2(), 1, q(), 1).unwrap();
        assert_eq!(delta_total(&plane, &cyl).unwrap(), 1);
    }

    #[test]
    fn star_examples() {
        let u = AsymptoticMap::trivial_cylinder(r2(), 1).unwrap();
        assert_eq!(star(&u, &u, -1).unwrap(), Rational::from_integer(-1));
        assert_eq!(star(&u, &u, 0).unwrap(), Rational::from_integer(0));
        let v = AsymptoticMap::trivial_cylinder(q(), 1).unwrap();
        assert_eq!(star(&u, &v, 0).unwrap(), Rational::from_integer(0));
    }

    #[test]
    fn decomposition_examples() {
        let plane = AsymptoticMap::plane(r2(), 1).unwrap();
        let z = AsymptoticMap::trivial_cylinder(r2(), 1).unwrap();
        // Omega = 1, Delta = 1, so iota = -1 gives star = 1/2
        assert_eq!(star(&plane, &z, -1).unwrap(), half(1));
        assert!(decomposition_check(0, 0, &plane, &z, -1).unwrap());
        assert!(!decomposition_check(1, 0, &plane, &z, -1).unwrap());
        let v = AsymptoticMap::trivial_cylinder(q(), 1).unwrap();
        assert!(decomposition_check(0, 0, &z, &v, 0).unwrap());
        assert!(!decomposition_check(-1, 1, &z, &v, 0).unwrap());
    }

    #[test]
    fn delta_infinity_examples() {
        let l = r2();
        let theta = Surd::sqrt(2);
        let pos = PunctureDatum::new(PunctureSign::Positive, l.clone(), 1, Some(1)).unwrap();
        assert_eq!(delta_infinity_over_link(&l, &[pos], &theta, &theta).unwrap(), 0);
        let neg = PunctureDatum::new(PunctureSign::Negative, l.clone(), 1, Some(2)).unwrap();
        assert_eq!(delta_infinity_over_link(&l, &[neg], &theta, &theta).unwrap(), 0);
        let pos2 = PunctureDatum::new(PunctureSign::Positive, l.clone(), 2, Some(1)).unwrap();
        assert_eq!(delta_infinity_over_link(&l, &[pos2], &theta, &theta).unwrap(), 1);
        let bare = PunctureDatum::positive(l.clone(), 1).unwrap();
        assert!(delta_infinity_over_link(&l, &[bare], &theta, &theta).is_err());
        let elsewhere = PunctureDatum::new(PunctureSign::Positive, q(), 1, Some(1)).unwrap();
        assert!(delta_infinity_over_link(&l, &[elsewhere], &theta, &theta).is_err());
    }

    #[test]
    fn winding_constraints() {
        assert!(PunctureDatum::new(PunctureSign::Positive, r2(), 1, Some(2)).is_err());
        assert!(PunctureDatum::new(PunctureSign::Negative, r2(), 1, Some(1)).is_err());
        assert!(PunctureDatum::positive(r2(), 0).is_err());
        assert!(AsymptoticMap::new(vec![], 0).is_err());
    }

    #[test]
    fn branched_cover_examples() {
        let t = Surd::sqrt(2);
        let b = branched_cover_bound(&t, &t, 2, &[1, 1]).unwrap();
        assert_eq!((b.degree, b.star_lower, b.bound, b.satisfied), (-2, half(-1), half(-1), true));
        let b = branched_cover_bound(&t, &t, 1, &[]).unwrap();
        assert_eq!((b.degree, b.star_lower, b.bound, b.satisfied), (1, half(3), half(1), true));
        let lower = Surd::sqrt(2).add_int(-1);
        let b = branched_cover_bound(&t, &lower, 3, &[1, 1, 1]).unwrap();
        assert_eq!(b.degree, 1);
        assert!(b.satisfied);
        assert!(matches!(branched_cover_bound(&lower, &t, 2, &[2]), Err(Error::Hypothesis(_))));
        assert!(branched_cover_bound(&t, &t, 3, &[1, 1]).is_err());
    }

    #[test]
    fn json_schema() {
        let text = r#"{"punctures":[
            {"sign":"+","orbit":{"name":"P","kind":"elliptic","theta":"sqrt(2)"},"cover":1},
            {"sign":"negative","orbit":{"name":"P","kind":"elliptic","theta":"sqrt(2)"},"cover":1,"winding":2}
        ]}"#;
        let m: AsymptoticMap = serde_json::from_str(text).unwrap();
        m.validate().unwrap();
        assert!(m.is_cylinder());
        let back: AsymptoticMap = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
