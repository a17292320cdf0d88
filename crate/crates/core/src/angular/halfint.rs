use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::AngularError;

/// An exact half-integer quantum number stored as twice its value.
///
/// `HalfInt::from_twice(3)` is `3/2`, `HalfInt::from_twice(-2)` is `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// True when both are integers or both are half-odd.
    pub const fn same_class(self, other: HalfInt) -> bool {
        (self.0 - other.0) % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// `2j + 1`, the multiplicity of an angular momentum `j`.
    pub const fn multiplicity(self) -> usize {
        (self.0 + 1) as usize
    }

    /// Projections `-j, -j+1, ..., j` in ascending order.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        let j = self.0;
        (0..=2 * j).step_by(2).map(move |k| HalfInt(k - j))
    }

    /// Values `lo, lo+1, ..., hi` (empty if `hi < lo`).
    pub fn range_inclusive(lo: HalfInt, hi: HalfInt) -> impl Iterator<Item = HalfInt> + Clone {
        (lo.0..=hi.0).step_by(2).map(HalfInt)
    }

    /// Checks that `m` is a valid projection of `self`.
    pub fn check_projection(self, m: HalfInt) -> Result<(), AngularError> {
        if self.0 < 0 {
            return Err(AngularError::NegativeMomentum(self));
        }
        if m.0.abs() > self.0 || !self.same_class(m) {
            return Err(AngularError::InvalidProjection { j: self, m });
        }
        Ok(())
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = AngularError;

    /// Accepts `"3/2"`, `"-1/2"`, `"2"`, `"1.5"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || AngularError::Parse(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt(2 * num)),
                _ => Err(bad()),
            }
        } else if let Ok(n) = s.parse::<i32>() {
            Ok(HalfInt(2 * n))
        } else {
            let x: f64 = s.parse().map_err(|_| bad())?;
            let twice = 2.0 * x;
            if !twice.is_finite() || (twice - twice.round()).abs() > 1e-12 {
                return Err(bad());
            }
            Ok(HalfInt(twice.round() as i32))
        }
    }
}

/// Photon polarization index `σ = M_upper − M_lower` of a dipole transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sigma {
    Minus,
    Zero,
    Plus,
}

impl Sigma {
    /// Ascending order `-1, 0, +1`; matches [`Sigma::index`].
    pub const ALL: [Sigma; 3] = [Sigma::Minus, Sigma::Zero, Sigma::Plus];

    pub const fn value(self) -> i32 {
        match self {
            Sigma::Minus => -1,
            Sigma::Zero => 0,
            Sigma::Plus => 1,
        }
    }

    pub const fn index(self) -> usize {
        (self.value() + 1) as usize
    }

    pub fn from_value(v: i32) -> Option<Sigma> {
        match v {
            -1 => Some(Sigma::Minus),
            0 => Some(Sigma::Zero),
            1 => Some(Sigma::Plus),
            _ => None,
        }
    }

    /// `σ = upper − lower`, or `None` outside the dipole selection rule.
    pub fn from_delta(upper: HalfInt, lower: HalfInt) -> Option<Sigma> {
        let d = upper.twice() - lower.twice();
        if d % 2 != 0 {
            return None;
        }
        Sigma::from_value(d / 2)
    }

    pub fn as_halfint(self) -> HalfInt {
        HalfInt::integer(self.value())
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Minus => f.write_str("-1"),
            Sigma::Zero => f.write_str("0"),
            Sigma::Plus => f.write_str("+1"),
        }
    }
}

impl FromStr for Sigma {
    type Err = AngularError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('+');
        t.parse::<i32>()
            .ok()
            .and_then(Sigma::from_value)
            .ok_or_else(|| AngularError::Parse(s.to_string()))
    }
}
