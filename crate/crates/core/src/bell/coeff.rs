//! Exact numbers `a + b√2` with rational `a`, `b`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Coeff {
    pub a: Rational64,
    pub b: Rational64,
}

impl Coeff {
    pub const ZERO: Coeff = Coeff { a: Rational64::new_raw(0, 1), b: Rational64::new_raw(0, 1) };
    pub const ONE: Coeff = Coeff { a: Rational64::new_raw(1, 1), b: Rational64::new_raw(0, 1) };
    pub const SQRT2: Coeff = Coeff { a: Rational64::new_raw(0, 1), b: Rational64::new_raw(1, 1) };

    pub fn new(a: Rational64, b: Rational64) -> Self {
        Coeff { a, b }
    }

    pub fn int(a: i64) -> Self {
        Coeff { a: a.into(), b: 0.into() }
    }

    /// `a + b√2` from integers.
    pub fn ints(a: i64, b: i64) -> Self {
        Coeff { a: a.into(), b: b.into() }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Coeff { a: Rational64::new(num, den), b: 0.into() }
    }

    /// `1/√2 = √2/2`.
    pub fn inv_sqrt2() -> Self {
        Coeff { a: 0.into(), b: Rational64::new(1, 2) }
    }

    pub fn is_zero(&self) -> bool {
        *self.a.numer() == 0 && *self.b.numer() == 0
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
        f(&self.a) + f(&self.b) * std::f64::consts::SQRT_2
    }

    /// Exact sign, using `x + y√2 > 0` iff `x² > 2y²` when the signs differ.
    pub fn signum(&self) -> i32 {
        let sa = self.a.numer().signum() as i32;
        let sb = self.b.numer().signum() as i32;
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        let lhs = self.a * self.a;
        let rhs = self.b * self.b * Rational64::from(2);
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -*self
        } else {
            *self
        }
    }
}

impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, o: Coeff) -> Coeff {
        Coeff { a: self.a + o.a, b: self.b + o.b }
    }
}

impl AddAssign for Coeff {
    fn add_assign(&mut self, o: Coeff) {
        *self = *self + o;
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, o: Coeff) -> Coeff {
        Coeff { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { a: -self.a, b: -self.b }
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, o: Coeff) -> Coeff {
        let two = Rational64::from(2);
        Coeff { a: self.a * o.a + two * self.b * o.b, b: self.a * o.b + self.b * o.a }
    }
}

impl From<i64> for Coeff {
    fn from(v: i64) -> Self {
        Coeff::int(v)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zero = Rational64::from(0);
        let one = Rational64::from(1);
        let root = |b: Rational64| if b == one { "√2".to_string() } else { format!("{b}√2") };
        match (self.a == zero, self.b == zero) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) if self.b < zero => write!(f, "-{}", root(-self.b)),
            (true, false) => write!(f, "{}", root(self.b)),
            (false, false) if self.b < zero => write!(f, "{}-{}", self.a, root(-self.b)),
            (false, false) => write!(f, "{}+{}", self.a, root(self.b)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    a: String,
    b: String,
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CoeffRepr { a: self.a.to_string(), b: self.b.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CoeffRepr::deserialize(d)?;
        let parse = |s: &str| s.trim().parse::<Rational64>().map_err(serde::de::Error::custom);
        Ok(Coeff { a: parse(&r.a)?, b: parse(&r.b)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let s = Coeff::SQRT2;
        assert_eq!(s * s, Coeff::int(2));
        assert_eq!(Coeff::inv_sqrt2() * s, Coeff::ONE);
        assert_eq!((Coeff::ints(1, 1) - Coeff::ONE).to_string(), "√2");
        assert!((Coeff::ints(-2, 2).to_f64() - 0.828_427_124_746_190_1).abs() < 1e-15);
    }

    #[test]
    fn exact_ordering() {
        assert!(Coeff::ints(0, 2) > Coeff::ints(2, 0));
        assert!(Coeff::ints(3, -2) > Coeff::ZERO);
        assert!(Coeff::ints(2, -2) < Coeff::ZERO);
        assert_eq!(Coeff::ints(0, 0).signum(), 0);
        assert!(Coeff::int(3) < Coeff::ints(1, 1) + Coeff::int(2));
    }

    #[test]
    fn serde_round_trip() {
        let c = Coeff::new(Rational64::new(-3, 2), Rational64::from(4));
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"a":"-3/2","b":"4"}"#);
        assert_eq!(serde_json::from_str::<Coeff>(&s).unwrap(), c);
    }
}
