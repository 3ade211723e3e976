#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reeb_forcing::Surd;

pub const SQUAREFREE: [u64; 8] = [2, 3, 5, 6, 7, 10, 11, 13];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn surd(text: &str) -> Surd {
    text.parse().unwrap()
}

/// A random element of `Q(sqrt(d))` with `b != 0`.
pub fn irrational(r: &mut impl Rng, d: u64, bound: i64) -> Surd {
    let a = r.gen_range(-bound..=bound);
    let mut b = r.gen_range(-bound..=bound);
    if b == 0 {
        b = 1;
    }
    Surd::new(a, b, r.gen_range(1..=bound), d).unwrap()
}

pub fn any_surd(r: &mut impl Rng, bound: i64) -> Surd {
    let d = SQUAREFREE[r.gen_range(0..SQUAREFREE.len())];
    if r.gen_bool(0.2) {
        Surd::rational(r.gen_range(-bound..=bound), r.gen_range(1..=bound)).unwrap()
    } else {
        irrational(r, d, bound)
    }
}

/// Enclosure `[lo, hi] / 2^bits` of a surd, computed from its parts with
/// integer square roots only.
#[derive(Clone, Debug)]
pub struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

pub fn enclose(s: &Surd, bits: u32) -> Enclosure {
    let (mut a, mut b, mut c) = (s.a().clone(), s.b().clone(), s.c().clone());
    if c.is_negative() {
        a = -a;
        b = -b;
        c = -c;
    }
    let scale = BigInt::from(1) << bits;
    let root = (BigInt::from(s.d()) * &scale * &scale).sqrt();
    let exact = (&root * &root) == BigInt::from(s.d()) * &scale * &scale;
    let (rl, rh) = if exact { (root.clone(), root) } else { (root.clone(), root + 1) };
    let (bl, bh) = if b.is_negative() { (&b * &rh, &b * &rl) } else { (&b * &rl, &b * &rh) };
    let base = &a * &scale;
    Enclosure {
        lo: (&base + bl).div_floor(&c),
        hi: {
            let n = &base + bh;
            -((-n).div_floor(&c))
        },
        bits,
    }
}

impl Enclosure {
    /// `Some(ordering)` when the enclosures are disjoint.
    pub fn cmp(&self, other: &Enclosure) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// `Some(floor)` when both ends share a floor.
    pub fn floor(&self) -> Option<BigInt> {
        let scale = BigInt::from(1) << self.bits;
        let (fl, fh) = (self.lo.div_floor(&scale), self.hi.div_floor(&scale));
        (fl == fh).then_some(fl)
    }
}

/// `num/den` against `(a + b sqrt(d))/c` with integer arithmetic only.
pub fn cmp_fraction(num: i64, den: i64, s: &Surd) -> Ordering {
    assert!(den > 0);
    let (mut a, mut b, mut c) = (s.a().clone(), s.b().clone(), s.c().clone());
    if c.is_negative() {
        a = -a;
        b = -b;
        c = -c;
    }
    // num/den - s = (num*c - a*den - b*den*sqrt(d)) / (den*c)
    let x = BigInt::from(num) * &c - &a * den;
    let y = -(&b * den);
    sign_of(&x, &y, s.d())
}

/// Sign of `x + y sqrt(d)`.
fn sign_of(x: &BigInt, y: &BigInt, d: u64) -> Ordering {
    let sx = x.sign_cmp();
    let sy = y.sign_cmp();
    if sy == Ordering::Equal || d == 0 {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    let lhs = x * x;
    let rhs = y * y * BigInt::from(d);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Integer partitions of `n` in non-increasing order.
pub fn partitions(n: u64) -> Vec<Vec<u64>> {
    fn go(n: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            cur.push(part);
            go(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}
