//! Coprime fractions inside surd-bounded intervals, enumerated by
//! Stern–Brocot descent with exact comparisons.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surd::Surd;

/// The pair `(p, q)` standing for the slope `q/p`.
///
/// `p` plays the denominator role (linking with the second Hopf component),
/// `q` the numerator role (linking with the first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fraction {
    pub p: i64,
    pub q: i64,
}

impl Fraction {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::invalid("fraction (0, 0)"));
        }
        Ok(Fraction { p, q })
    }

    pub fn is_simple(&self) -> bool {
        self.p.gcd(&self.q) == 1
    }

    /// `q/p` as an exact surd; `None` when `p = 0`.
    pub fn slope(&self) -> Option<Surd> {
        (self.p != 0).then(|| Surd::rational(self.q, self.p).expect("p != 0"))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    /// `(lo, hi)`
    Open,
    /// `[lo, hi]`
    Closed,
    /// `(lo, hi]`
    OpenClosed,
    /// `[lo, hi)`
    ClosedOpen,
}

impl IntervalKind {
    fn lower_closed(self) -> bool {
        matches!(self, IntervalKind::Closed | IntervalKind::ClosedOpen)
    }

    fn upper_closed(self) -> bool {
        matches!(self, IntervalKind::Closed | IntervalKind::OpenClosed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Surd,
    pub hi: Surd,
    pub kind: IntervalKind,
}

impl Interval {
    /// Rejects intervals with `lo >= hi`.
    pub fn new(lo: Surd, hi: Surd, kind: IntervalKind) -> Result<Self> {
        if lo >= hi {
            return Err(Error::EmptyInterval(format!("{lo} >= {hi}")));
        }
        Ok(Interval { lo, hi, kind })
    }

    pub fn open(lo: Surd, hi: Surd) -> Result<Self> {
        Interval::new(lo, hi, IntervalKind::Open)
    }

    pub fn contains(&self, x: &Surd) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.kind.lower_closed(),
            Ordering::Less => false,
        };
        above
            && match x.cmp(&self.hi) {
                Ordering::Less => true,
                Ordering::Equal => self.kind.upper_closed(),
                Ordering::Greater => false,
            }
    }

    /// Whether the open rational interval `(l, r)` can meet `self`.
    fn meets_open(&self, l: &Surd, r: &Surd) -> bool {
        r > &self.lo && l < &self.hi
    }
}

fn to_i64(x: num_bigint::BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Overflow("interval endpoint does not fit in 64 bits".into()))
}

/// All coprime `(p, q)` with `1 <= p <= max_p` and `q/p` in the interval,
/// each exactly once, sorted by `(p, q)`.
pub fn enumerate_coprime_in_interval(
    lo: &Surd,
    hi: &Surd,
    max_p: u64,
    kind: IntervalKind,
) -> Result<Vec<Fraction>> {
    let interval = Interval::new(lo.clone(), hi.clone(), kind)?;
    enumerate_in(&interval, max_p)
}

pub fn enumerate_in(interval: &Interval, max_p: u64) -> Result<Vec<Fraction>> {
    let max_p = i64::try_from(max_p).map_err(|_| Error::Overflow("max_p".into()))?;
    if max_p < 1 {
        return Err(Error::invalid("max_p must be at least 1"));
    }
    let n_lo = to_i64(interval.lo.floor())?;
    let n_hi = to_i64(interval.hi.floor())?;
    let rat = |num: i64, den: i64| Surd::rational(num, den).expect("den > 0");

    let mut out = Vec::new();
    for n in n_lo..=n_hi {
        if interval.contains(&Surd::integer(n)) {
            out.push(Fraction { p: 1, q: n });
        }
        // Depth-first over the Stern–Brocot subtree strictly between n and n+1.
        let mut stack: Vec<((i64, i64), (i64, i64))> = vec![((n, 1), (n + 1, 1))];
        while let Some((l, r)) = stack.pop() {
            let m = (l.0 + r.0, l.1 + r.1);
            if m.1 > max_p {
                continue;
            }
            if !interval.meets_open(&rat(l.0, l.1), &rat(r.0, r.1)) {
                continue;
            }
            if interval.contains(&rat(m.0, m.1)) {
                out.push(Fraction { p: m.1, q: m.0 });
            }
            stack.push((m, r));
            stack.push((l, m));
        }
    }
    out.sort();
    Ok(out)
}
