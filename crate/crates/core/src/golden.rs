//! Exact arithmetic in the golden field ℚ(δ), δ² = δ + 1.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// a + b·δ with rational a, b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Golden {
    pub a: Rational64,
    pub b: Rational64,
}

impl Golden {
    pub const fn new(a: Rational64, b: Rational64) -> Self {
        Self { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(Rational64::from_integer(a), Rational64::from_integer(b))
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    /// δ itself.
    pub fn delta() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn to_f64(self) -> f64 {
        let d = (1.0 + 5f64.sqrt()) / 2.0;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * d
    }
}

impl Zero for Golden {
    fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl Add for Golden {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Golden {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Golden {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul for Golden {
    type Output = Self;
    // (a + bδ)(c + dδ) = ac + (ad + bc)δ + bd(δ + 1)
    fn mul(self, o: Self) -> Self {
        let bd = self.b * o.b;
        Self::new(self.a * o.a + bd, self.a * o.b + self.b * o.a + bd)
    }
}

impl fmt::Display for Golden {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}δ", self.b),
            (false, false) => write!(f, "{} + {}δ", self.a, self.b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_squared_is_delta_plus_one() {
        let d = Golden::delta();
        assert_eq!(d * d, d + Golden::one());
    }

    #[test]
    fn numeric_value() {
        assert!((Golden::delta().to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
        assert_eq!(Golden::from_ints(2, -1).to_string(), "2 + -1δ");
    }
}
