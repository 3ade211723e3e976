//! Exact real quadratic irrationals `(a + b*sqrt(d))/c`.
//!
//! Every rotation number, interval endpoint and eigenvalue the crate reasons
//! about is a [`Surd`]. All decisions (ordering, floors, interval membership)
//! are made with integer arithmetic only; floating point appears solely in
//! [`Surd::to_f64`] for display and for seeding the numerical oracle.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The value `(a + b*sqrt(d))/c` in canonical form.
///
/// Canonical form: `c > 0`, `gcd(a, b, c) = 1`, `d` square-free, and `b = 0`
/// exactly when `d = 0`. Equal values have identical fields, so the derived
/// `Eq` and `Hash` are value equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Surd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

/// Splits `d = s^2 * r` with `r` square-free.
fn square_free_part(mut d: u64) -> (u64, u64) {
    let mut s: u64 = 1;
    let mut i: u64 = 2;
    while i.saturating_mul(i) <= d {
        let sq = i * i;
        while d.is_multiple_of(sq) {
            d /= sq;
            s *= i;
        }
        i += 1;
    }
    (s, d)
}

/// Sign of `p + q*sqrt(d)` for square-free `d` (or `d = 0`).
fn sign_linear(p: &BigInt, q: &BigInt, d: u64) -> Ordering {
    let sp = p.sign();
    let sq = if d == 0 { Sign::NoSign } else { q.sign() };
    match (sp, sq) {
        (_, Sign::NoSign) => sign_to_ord(sp),
        (Sign::NoSign, _) => sign_to_ord(sq),
        _ if sp == sq => sign_to_ord(sp),
        _ => {
            let lhs = p * p;
            let rhs = q * q * BigInt::from(d);
            match lhs.cmp(&rhs) {
                Ordering::Greater => sign_to_ord(sp),
                Ordering::Less => sign_to_ord(sq),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// Sign of `p + q*sqrt(d1) + r*sqrt(d2)` for distinct square-free `d1, d2 > 1`.
fn sign_two_radicals(p: &BigInt, q: &BigInt, d1: u64, r: &BigInt, d2: u64) -> Ordering {
    let sx = sign_linear(p, q, d1);
    let sy = sign_to_ord(r.sign());
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return if sx == Ordering::Equal { sy } else { sx };
    }
    // Opposite signs: compare squares. x^2 - y^2 lives in Q(sqrt(d1)).
    let rat = p * p + q * q * BigInt::from(d1) - r * r * BigInt::from(d2);
    let irr = BigInt::from(2) * p * q;
    match sign_linear(&rat, &irr, d1) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

fn sign_to_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl Surd {
    /// Builds and normalizes `(a + b*sqrt(d))/c`.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: u64,
    ) -> Result<Self> {
        let (mut a, mut b, mut c) = (a.into(), b.into(), c.into());
        if c.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (s, mut d) = square_free_part(d);
        b *= BigInt::from(s);
        if d == 1 {
            a += &b;
            b = BigInt::zero();
        }
        if d == 0 || b.is_zero() {
            b = BigInt::zero();
            d = 0;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(Surd { a, b, c, d })
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Surd {
            a: n.into(),
            b: BigInt::zero(),
            c: BigInt::one(),
            d: 0,
        }
    }

    pub fn zero() -> Self {
        Surd::integer(0)
    }

    pub fn one() -> Self {
        Surd::integer(1)
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        Surd::new(num, 0, den, 0)
    }

    /// `sqrt(d)`.
    pub fn sqrt(d: u64) -> Self {
        Surd::new(0, 1, 1, d).expect("unit denominator")
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// Square-free radicand; `0` for rationals.
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.c.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        sign_linear(&self.a, &self.b, self.d)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    fn field_with(&self, other: &Surd) -> Result<u64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (d1, d2) if d1 == d2 => Ok(d1),
            (d1, d2) => Err(Error::FieldMismatch(d1, d2)),
        }
    }

    pub fn checked_add(&self, other: &Surd) -> Result<Surd> {
        let d = self.field_with(other)?;
        Surd::new(
            &self.a * &other.c + &other.a * &self.c,
            &self.b * &other.c + &other.b * &self.c,
            &self.c * &other.c,
            d,
        )
    }

    pub fn checked_sub(&self, other: &Surd) -> Result<Surd> {
        self.checked_add(&-other.clone())
    }

    pub fn checked_mul(&self, other: &Surd) -> Result<Surd> {
        let d = self.field_with(other)?;
        let dd = BigInt::from(d);
        Surd::new(
            &self.a * &other.a + &self.b * &other.b * dd,
            &self.a * &other.b + &self.b * &other.a,
            &self.c * &other.c,
            d,
        )
    }

    /// `1/self`; errors on zero.
    pub fn recip(&self) -> Result<Surd> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        // c/(a + b r) = c (a - b r) / (a^2 - b^2 d)
        let norm = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        Surd::new(&self.c * &self.a, -(&self.c * &self.b), norm, self.d)
    }

    pub fn checked_div(&self, other: &Surd) -> Result<Surd> {
        self.checked_mul(&other.recip()?)
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Surd {
        let k = k.into();
        Surd::new(&self.a * &k, &self.b * &k, self.c.clone(), self.d).expect("c > 0")
    }

    pub fn add_int(&self, k: impl Into<BigInt>) -> Surd {
        let k = k.into();
        Surd::new(&self.a + &self.c * k, self.b.clone(), self.c.clone(), self.d).expect("c > 0")
    }

    /// Exact three-way comparison, also across different radicands.
    pub fn cmp_exact(&self, other: &Surd) -> Ordering {
        // self - other = [A + B sqrt(d1) + C sqrt(d2)] / (c1 c2)
        let p = &self.a * &other.c - &other.a * &self.c;
        let q = &self.b * &other.c;
        let r = -(&other.b * &self.c);
        match (self.d, other.d) {
            (d1, d2) if d1 == d2 => sign_linear(&p, &(q + r), d1),
            (0, d2) => sign_linear(&p, &r, d2),
            (d1, 0) => sign_linear(&p, &q, d1),
            (d1, d2) => sign_two_radicals(&p, &q, d1, &r, d2),
        }
    }

    /// `floor(b*sqrt(d))` as an integer.
    fn floor_radical_part(&self) -> BigInt {
        if self.b.is_zero() {
            return BigInt::zero();
        }
        let root = (&self.b * &self.b * BigInt::from(self.d)).sqrt();
        if self.b.is_positive() {
            root
        } else {
            // b*sqrt(d) is irrational, so it is strictly below -root
            -root - 1
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        let numerator_floor = &self.a + self.floor_radical_part();
        numerator_floor.div_floor(&self.c)
    }

    /// Exact ceiling.
    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// True iff `k * self` is an integer.
    pub fn is_resonant(&self, k: u64) -> bool {
        self.is_rational() && (&self.a * BigInt::from(k)).is_multiple_of(&self.c)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_f64_with_precision(128)
    }

    /// Evaluates through a fixed-point expansion with `bits` fractional bits
    /// before rounding to `f64`.
    pub fn to_f64_with_precision(&self, bits: u32) -> f64 {
        let scale = BigInt::one() << (2 * bits as usize);
        let root = (&self.b * &self.b * BigInt::from(self.d) * scale).sqrt();
        let root = if self.b.is_negative() { -root } else { root };
        let num = (&self.a << bits as usize) + root;
        let q = num.to_f64().unwrap_or(f64::NAN) / self.c.to_f64().unwrap_or(f64::NAN);
        q / 2f64.powi(bits as i32)
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            a: -self.a,
            b: -self.b,
            c: self.c,
            d: self.d,
        }
    }
}

impl From<i64> for Surd {
    fn from(n: i64) -> Self {
        Surd::integer(n)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            if self.c.is_one() {
                write!(f, "{}", self.a)
            } else {
                write!(f, "{}/{}", self.a, self.c)
            }
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(
                f,
                "({}{}{}*sqrt({}))/{}",
                self.a,
                sign,
                self.b.abs(),
                self.d,
                self.c
            )
        }
    }
}

fn parse_int(text: &str, whole: &str) -> Result<BigInt> {
    if text.is_empty() {
        return Err(Error::parse("surd", whole, "missing integer"));
    }
    BigInt::from_str(text).map_err(|_| Error::parse("surd", whole, format!("bad integer {text:?}")))
}

/// Parses `A`, `A+B*sqrt(D)`, `A-sqrt(D)`, `B*sqrt(D)`, `sqrt(D)` (no parens).
fn parse_linear(t: &str, whole: &str) -> Result<(BigInt, BigInt, u64)> {
    let Some(pos) = t.find("sqrt(") else {
        return Ok((parse_int(t, whole)?, BigInt::zero(), 0));
    };
    let rest = &t[pos + 5..];
    let radicand = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::parse("surd", whole, "unterminated sqrt("))?;
    let d: u64 = radicand
        .parse()
        .map_err(|_| Error::parse("surd", whole, format!("bad radicand {radicand:?}")))?;
    let mut prefix = &t[..pos];
    let coef = if let Some(p) = prefix.strip_suffix('*') {
        let digits_start = p
            .rfind(|ch: char| !ch.is_ascii_digit())
            .map(|i| i + 1)
            .unwrap_or(0);
        let c = parse_int(&p[digits_start..], whole)?;
        prefix = &p[..digits_start];
        c
    } else {
        BigInt::one()
    };
    let (head, sign) = match prefix.chars().last() {
        Some('+') => (&prefix[..prefix.len() - 1], 1),
        Some('-') => (&prefix[..prefix.len() - 1], -1),
        None => ("", 1),
        Some(_) => return Err(Error::parse("surd", whole, "expected sign before radical")),
    };
    let a = if head.is_empty() {
        BigInt::zero()
    } else {
        parse_int(head, whole)?
    };
    Ok((a, coef * sign, d))
}

impl FromStr for Surd {
    type Err = Error;

    /// Accepts `(a+b*sqrt(d))/c`, `p/q`, plain integers, and a few relaxed
    /// spellings (`sqrt(2)`, `1-sqrt(5)`). Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::parse("surd", s, "empty"));
        }
        let (body, den) = if let Some(inner) = t.strip_prefix('(') {
            let close = inner
                .rfind(')')
                .ok_or_else(|| Error::parse("surd", s, "unbalanced parenthesis"))?;
            let tail = &inner[close + 1..];
            let den = match tail {
                "" => BigInt::one(),
                _ => parse_int(
                    tail.strip_prefix('/')
                        .ok_or_else(|| Error::parse("surd", s, "expected '/' after ')'"))?,
                    s,
                )?,
            };
            (inner[..close].to_string(), den)
        } else if !t.contains("sqrt") {
            match t.split_once('/') {
                Some((n, d)) => (n.to_string(), parse_int(d, s)?),
                None => (t.clone(), BigInt::one()),
            }
        } else {
            (t.clone(), BigInt::one())
        };
        let (a, b, d) = parse_linear(&body, s)?;
        Surd::new(a, b, den, d)
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(de)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Surd::integer(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Surd {
        text.parse().unwrap()
    }

    #[test]
    fn normalize_examples() {
        let x = Surd::new(2, 2, 2, 8).unwrap();
        assert_eq!(x, Surd::new(1, 2, 1, 2).unwrap());
        assert_eq!(x.to_string(), "(1+2*sqrt(2))/1");
        assert!(Surd::new(0, 0, 5, 3).unwrap().is_zero());
        assert_eq!(Surd::new(0, 0, 5, 3).unwrap().d(), 0);
        let golden = Surd::new(3, 1, 2, 5).unwrap();
        assert_eq!(golden.to_string(), "(3+1*sqrt(5))/2");
        assert_eq!(Surd::new(1, 1, 0, 2), Err(Error::ZeroDenominator));
    }

    #[test]
    fn normalize_edge_cases() {
        // perfect squares collapse to rationals
        assert_eq!(Surd::new(1, 3, 2, 4).unwrap(), Surd::rational(7, 2).unwrap());
        // negative denominators flip
        let x = Surd::new(1, 1, -2, 3).unwrap();
        assert_eq!((x.a().clone(), x.b().clone(), x.c().clone()), (BigInt::from(-1), BigInt::from(-1), BigInt::from(2)));
        assert_eq!(Surd::new(4, 0, 6, 7).unwrap(), Surd::rational(2, 3).unwrap());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(Surd::sqrt(2).cmp(&Surd::rational(3, 2).unwrap()), Ordering::Less);
        assert_eq!(s("(3+1*sqrt(5))/2").cmp(&Surd::sqrt(5)), Ordering::Greater);
        assert_eq!(Surd::sqrt(2).cmp(&Surd::sqrt(2)), Ordering::Equal);
        // cross-field
        assert_eq!(Surd::sqrt(2).cmp(&Surd::sqrt(3)), Ordering::Less);
        assert_eq!(s("(1+1*sqrt(2))/1").cmp(&Surd::sqrt(5)), Ordering::Greater);
        assert_eq!(s("(3-1*sqrt(3))/1").cmp(&s("(0+1*sqrt(2))/1")), Ordering::Less);
    }

    #[test]
    fn floor_examples() {
        assert_eq!(Surd::sqrt(2).floor(), BigInt::from(1));
        assert_eq!((-Surd::sqrt(2)).floor(), BigInt::from(-2));
        assert_eq!(s("(2+2*sqrt(2))/1").floor(), BigInt::from(4));
        assert_eq!(Surd::rational(-7, 2).unwrap().floor(), BigInt::from(-4));
        assert_eq!(Surd::rational(-7, 2).unwrap().ceil(), BigInt::from(-3));
        assert_eq!(Surd::sqrt(2).ceil(), BigInt::from(2));
        assert_eq!(s("(-1-1*sqrt(5))/2").floor(), BigInt::from(-2));
    }

    #[test]
    fn resonance_examples() {
        assert!(Surd::rational(3, 2).unwrap().is_resonant(2));
        assert!(!Surd::sqrt(2).is_resonant(5));
        assert!(!Surd::rational(1, 2).unwrap().is_resonant(3));
    }

    #[test]
    fn arithmetic() {
        let r2 = Surd::sqrt(2);
        assert_eq!(r2.recip().unwrap(), s("(0+1*sqrt(2))/2"));
        assert_eq!(r2.checked_mul(&r2).unwrap(), Surd::integer(2));
        let phi = s("(1+1*sqrt(5))/2");
        assert_eq!(phi.checked_mul(&phi).unwrap(), phi.add_int(1));
        assert!(matches!(r2.checked_add(&Surd::sqrt(3)), Err(Error::FieldMismatch(2, 3))));
        assert!(Surd::zero().recip().is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(s("( -1+1*sqrt(2))/1"), Surd::sqrt(2).add_int(-1));
        assert_eq!(s("(0+1*sqrt(2))/2"), Surd::sqrt(2).checked_div(&Surd::integer(2)).unwrap());
        assert_eq!(s("1/2"), Surd::rational(1, 2).unwrap());
        assert_eq!(s("-3"), Surd::integer(-3));
        assert_eq!(s("sqrt(2)"), Surd::sqrt(2));
        assert_eq!(s("3-sqrt(5)"), Surd::new(3, -1, 1, 5).unwrap());
        assert_eq!(s("(-2*sqrt(3))/5"), Surd::new(0, -2, 5, 3).unwrap());
        for bad in ["", "(1+sqrt(2)", "1/0", "(1+x*sqrt(2))/1", "abc", "(1+sqrt(-2))/1"] {
            assert!(bad.parse::<Surd>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn float_view() {
        assert!((Surd::sqrt(2).to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((s("(3+1*sqrt(5))/2").to_f64() - 2.618033988749895).abs() < 1e-15);
        assert!((s("(-1-1*sqrt(2))/3").to_f64_with_precision(20) + 0.8047378541243649).abs() < 1e-5);
    }
}
