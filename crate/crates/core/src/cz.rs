//! Conley–Zehnder indices and extremal winding numbers of covers of
//! non-degenerate closed Reeb orbits, relative to the global trivialization
//! of the tight contact structure on the three-sphere.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrbitKind {
    /// Linearized return map conjugate to rotation by `2*pi*theta`.
    Elliptic { theta: Surd },
    /// Real eigenvalues; `CZ(gamma^k) = k*n`.
    Hyperbolic { n: i64 },
}

/// Linear data of a simple closed Reeb orbit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitSpec {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub kind: OrbitKind,
    /// Period, i.e. the action of the simple orbit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Surd>,
    #[serde(default)]
    pub in_link: bool,
}

fn check_cover(k: u64) -> Result<()> {
    if k == 0 {
        Err(Error::invalid("cover multiplicity must be at least 1"))
    } else {
        Ok(())
    }
}

fn small(x: BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Overflow("index does not fit in 64 bits".into()))
}

fn k_times(k: u64, n: i64) -> Result<i64> {
    i64::try_from(k)
        .ok()
        .and_then(|k| k.checked_mul(n))
        .ok_or_else(|| Error::Overflow(format!("{k} * {n}")))
}

impl OrbitSpec {
    pub fn elliptic(name: impl Into<String>, theta: Surd) -> Self {
        OrbitSpec {
            name: name.into(),
            kind: OrbitKind::Elliptic { theta },
            action: None,
            in_link: false,
        }
    }

    pub fn hyperbolic(name: impl Into<String>, n: i64) -> Self {
        OrbitSpec {
            name: name.into(),
            kind: OrbitKind::Hyperbolic { n },
            action: None,
            in_link: false,
        }
    }

    pub fn with_action(mut self, action: Surd) -> Result<Self> {
        self.action = Some(action);
        self.validate()?;
        Ok(self)
    }

    pub fn with_in_link(mut self, in_link: bool) -> Self {
        self.in_link = in_link;
        self
    }

    /// Checks the field invariants that do not depend on a cover.
    pub fn validate(&self) -> Result<()> {
        match &self.action {
            Some(a) if !a.is_positive() => {
                Err(Error::invalid(format!("orbit {}: action {a} must be positive", self.name)))
            }
            _ => Ok(()),
        }
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.kind, OrbitKind::Elliptic { .. })
    }

    /// `k*theta` for an elliptic orbit, rejecting resonant covers.
    fn rotation(&self, theta: &Surd, k: u64) -> Result<Surd> {
        check_cover(k)?;
        if theta.is_resonant(k) {
            return Err(Error::Resonant(format!(
                "orbit {}: cover {k} of rotation {theta} is degenerate",
                self.name
            )));
        }
        Ok(theta.mul_int(k))
    }

    /// `2*floor(k*theta) + 1` (elliptic) or `k*n` (hyperbolic).
    pub fn cz(&self, k: u64) -> Result<i64> {
        match &self.kind {
            OrbitKind::Elliptic { theta } => {
                let fl = small(self.rotation(theta, k)?.floor())?;
                fl.checked_mul(2)
                    .and_then(|v| v.checked_add(1))
                    .ok_or_else(|| Error::Overflow("cz".into()))
            }
            OrbitKind::Hyperbolic { n } => {
                check_cover(k)?;
                k_times(k, *n)
            }
        }
    }

    /// Winding of the eigensection of the largest negative eigenvalue.
    pub fn alpha_minus(&self, k: u64) -> Result<i64> {
        match &self.kind {
            OrbitKind::Elliptic { theta } => small(self.rotation(theta, k)?.floor()),
            OrbitKind::Hyperbolic { n } => {
                check_cover(k)?;
                Ok(k_times(k, *n)?.div_euclid(2))
            }
        }
    }

    /// Winding of the eigensection of the smallest positive eigenvalue.
    pub fn alpha_plus(&self, k: u64) -> Result<i64> {
        match &self.kind {
            OrbitKind::Elliptic { theta } => small(self.rotation(theta, k)?.ceil()),
            OrbitKind::Hyperbolic { n } => {
                check_cover(k)?;
                let kn = k_times(k, *n)?;
                Ok(kn.div_euclid(2) + kn.rem_euclid(2))
            }
        }
    }

    /// `cz - 2*alpha_minus`, always 0 or 1.
    pub fn parity(&self, k: u64) -> Result<u8> {
        let p = self.cz(k)? - 2 * self.alpha_minus(k)?;
        Ok(p as u8)
    }

    /// False exactly for even covers of an orbit with odd index.
    pub fn sft_good(&self, k: u64) -> Result<bool> {
        check_cover(k)?;
        Ok(match &self.kind {
            OrbitKind::Elliptic { .. } => true,
            OrbitKind::Hyperbolic { n } => !(k.is_multiple_of(2) && n.rem_euclid(2) == 1),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ell(theta: &str) -> OrbitSpec {
        OrbitSpec::elliptic("P", theta.parse().unwrap())
    }

    #[test]
    fn cz_examples() {
        let p = ell("(1+1*sqrt(2))/1");
        assert_eq!(p.cz(1).unwrap(), 5);
        assert_eq!(p.cz(2).unwrap(), 9);
        assert_eq!(OrbitSpec::hyperbolic("h", -1).cz(3).unwrap(), -3);
    }

    #[test]
    fn alpha_examples() {
        let r2 = ell("sqrt(2)");
        assert_eq!((r2.alpha_minus(1).unwrap(), r2.alpha_plus(1).unwrap()), (1, 2));
        let h3 = OrbitSpec::hyperbolic("h", 3);
        assert_eq!((h3.alpha_minus(1).unwrap(), h3.alpha_plus(1).unwrap()), (1, 2));
        let p = ell("(1+1*sqrt(2))/1");
        assert_eq!((p.alpha_minus(2).unwrap(), p.alpha_plus(2).unwrap()), (4, 5));
        let hneg = OrbitSpec::hyperbolic("h", -3);
        assert_eq!((hneg.alpha_minus(1).unwrap(), hneg.alpha_plus(1).unwrap()), (-2, -1));
    }

    #[test]
    fn parity_examples() {
        let r2 = ell("sqrt(2)");
        for k in 1..10 {
            assert_eq!(r2.parity(k).unwrap(), 1);
        }
        assert_eq!(OrbitSpec::hyperbolic("h", 2).parity(1).unwrap(), 0);
        assert_eq!(OrbitSpec::hyperbolic("h", 3).parity(2).unwrap(), 0);
        assert_eq!(OrbitSpec::hyperbolic("h", -3).parity(1).unwrap(), 1);
    }

    #[test]
    fn goodness_examples() {
        assert!(ell("sqrt(2)").sft_good(4).unwrap());
        assert!(!OrbitSpec::hyperbolic("h", 3).sft_good(2).unwrap());
        assert!(OrbitSpec::hyperbolic("h", 2).sft_good(2).unwrap());
        assert!(OrbitSpec::hyperbolic("h", -1).sft_good(3).unwrap());
    }

    #[test]
    fn resonance_and_bad_covers() {
        let half = ell("1/2");
        assert_eq!(half.cz(1).unwrap(), 1);
        assert!(matches!(half.cz(2), Err(Error::Resonant(_))));
        assert!(matches!(half.alpha_plus(4), Err(Error::Resonant(_))));
        assert!(ell("sqrt(2)").cz(0).is_err());
    }

    #[test]
    fn config_syntax() {
        let o: OrbitSpec =
            toml::from_str(r#"kind = "elliptic"
theta = "(1+1*sqrt(2))/1""#).unwrap();
        assert_eq!(o.cz(1).unwrap(), 5);
        let h: OrbitSpec = serde_json::from_str(r#"{"name":"h","kind":"hyperbolic","n":-2,"in_link":true}"#).unwrap();
        assert_eq!(h.cz(2).unwrap(), -4);
        assert!(h.in_link);
        assert!(OrbitSpec::hyperbolic("h", 1).with_action(Surd::integer(-1)).is_err());
    }
}
