//! Exact integer/rational helpers and the "p/q" text format.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Q = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(v: &Int) -> Q {
    Q::from_integer(v.clone())
}

pub fn factorial(n: u32) -> Int {
    (1..=n).fold(Int::one(), |acc, k| acc * k)
}

pub fn binom(n: i64, k: i64) -> Int {
    if k < 0 || n < 0 || k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn binom_u(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

pub fn pow2(e: u32) -> Int {
    Int::one() << e as usize
}

/// `[x]^+`: x itself when integral, x + 1/2 when x is a half-integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfBracket {
    pub value: Q,
}

impl HalfBracket {
    pub fn new(value: Q) -> Result<Self> {
        let twice = &value * q(2);
        if !twice.is_integer() {
            return Err(Error::Domain(format!(
                "{} is neither an integer nor a half-integer",
                fmt_q(&value)
            )));
        }
        Ok(HalfBracket { value })
    }

    pub fn bracket_plus(&self) -> Int {
        if self.value.is_integer() {
            self.value.to_integer()
        } else {
            (&self.value + frac(1, 2)).to_integer()
        }
    }
}

/// `[2^{n-1} * prod]^+` for integer n >= 0 and integer prod.
pub fn half_power_bracket(n: u32, prod: &Int) -> Int {
    let val = if n == 0 {
        Q::new(prod.clone(), int(2))
    } else {
        qi(&(pow2(n - 1) * prod))
    };
    HalfBracket { value: val }.bracket_plus()
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => Ok(Q::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

pub fn to_i64(x: &Int) -> Option<i64> {
    x.to_i64()
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn sign_of(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Serialize as a JSON number when it fits in i64, else as a decimal string.
pub fn ser_int<S: serde::Serializer>(x: &Int, s: S) -> std::result::Result<S::Ok, S::Error> {
    match to_i64(x) {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

pub fn ser_opt_int<S: serde::Serializer>(x: &Option<Int>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_int(v, s),
        None => s.serialize_none(),
    }
}

pub fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_plus_cases() {
        assert_eq!(HalfBracket::new(frac(5, 2)).unwrap().bracket_plus(), int(3));
        assert_eq!(HalfBracket::new(q(4)).unwrap().bracket_plus(), int(4));
        assert!(HalfBracket::new(frac(1, 3)).is_err());
        assert_eq!(half_power_bracket(0, &int(3)), int(2));
        assert_eq!(half_power_bracket(3, &int(3)), int(12));
    }

    #[test]
    fn q_roundtrip() {
        for s in ["0", "-3", "7/4", "-1/2"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(fmt_q(&parse_q("6/4").unwrap()), "3/2");
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), int(10));
        assert_eq!(binom(3, 5), int(0));
        assert_eq!(binom_u(17, 8), 24310);
        assert_eq!(factorial(5), int(120));
    }
}
