//! Exact convex polygons on `[0, h]` with integer breakpoint abscissas, stored as
//! ascending slope multisets.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Shorthand for building exact rationals.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A convex polygon `P` on `[0, h]` with `P(0) = 0`, determined by its slopes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polygon {
    slopes: Vec<BigRational>,
}

impl Polygon {
    /// Builds a polygon from any slope multiset (sorted ascending on construction).
    pub fn from_slopes(mut slopes: Vec<BigRational>) -> Polygon {
        slopes.sort();
        Polygon { slopes }
    }

    /// Builds a polygon from its integer-abscissa values `P(0), ..., P(h)`; they must
    /// start at zero and be convex.
    pub fn from_values(values: &[BigRational]) -> Result<Polygon> {
        if values.is_empty() || !values[0].is_zero() {
            return Err(Error::InvalidInput("polygon values must start at 0".into()));
        }
        let slopes: Vec<BigRational> = values.windows(2).map(|w| &w[1] - &w[0]).collect();
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("polygon values are not convex".into()));
        }
        Ok(Polygon { slopes })
    }

    /// The empty polygon of width 0.
    pub fn empty() -> Polygon {
        Polygon { slopes: vec![] }
    }

    pub fn width(&self) -> usize {
        self.slopes.len()
    }

    /// Ascending slopes.
    pub fn slopes(&self) -> &[BigRational] {
        &self.slopes
    }

    /// `P(i)`, the sum of the `i` smallest slopes.
    pub fn eval(&self, i: usize) -> Result<BigRational> {
        if i > self.width() {
            return Err(Error::OutOfRange {
                index: i,
                width: self.width(),
            });
        }
        Ok(self.slopes[..i].iter().fold(BigRational::zero(), |a, b| a + b))
    }

    /// All values `P(0), ..., P(h)`.
    pub fn values(&self) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(self.width() + 1);
        let mut acc = BigRational::zero();
        out.push(acc.clone());
        for s in &self.slopes {
            acc += s;
            out.push(acc.clone());
        }
        out
    }

    /// Integer abscissas where the slope changes, including both endpoints.
    pub fn breakpoints(&self) -> Vec<usize> {
        let mut out = vec![0];
        for i in 1..self.width() {
            if self.slopes[i - 1] != self.slopes[i] {
                out.push(i);
            }
        }
        if self.width() > 0 {
            out.push(self.width());
        }
        out
    }

    /// `P >= Q` pointwise on integer abscissas.
    pub fn dominates(&self, other: &Polygon) -> Result<bool> {
        self.check_width(other)?;
        Ok(self
            .values()
            .iter()
            .zip(other.values().iter())
            .all(|(a, b)| a >= b))
    }

    /// Abscissas where the two polygons agree.
    pub fn contact_abscissas(&self, other: &Polygon) -> Result<Vec<usize>> {
        self.check_width(other)?;
        Ok(self
            .values()
            .iter()
            .zip(other.values().iter())
            .enumerate()
            .filter(|(_, (a, b))| a == b)
            .map(|(i, _)| i)
            .collect())
    }

    /// Polygon of a direct sum: union of slope multisets.
    pub fn concat(&self, other: &Polygon) -> Polygon {
        let mut s = self.slopes.clone();
        s.extend(other.slopes.iter().cloned());
        Polygon::from_slopes(s)
    }

    /// Pointwise mean of polygons of equal width.
    pub fn mean(list: &[Polygon]) -> Result<Polygon> {
        let first = list.first().ok_or(Error::EmptyList)?;
        for p in list {
            first.check_width(p)?;
        }
        let count = BigRational::from_integer(BigInt::from(list.len()));
        let slopes = (0..first.width())
            .map(|i| {
                list.iter()
                    .fold(BigRational::zero(), |a, p| a + &p.slopes[i])
                    / &count
            })
            .collect();
        Ok(Polygon::from_slopes(slopes))
    }

    /// Multiplies every slope by a rational factor.
    pub fn scale(&self, c: &BigRational) -> Polygon {
        Polygon::from_slopes(self.slopes.iter().map(|s| s * c).collect())
    }

    /// Second differences are non-negative (always true by construction; kept as a check).
    pub fn is_convex(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] <= w[1])
    }

    /// Least common multiple of the slope denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.slopes
            .iter()
            .fold(BigInt::one(), |a, s| a.lcm(s.denom()))
    }

    fn check_width(&self, other: &Polygon) -> Result<()> {
        if self.width() != other.width() {
            return Err(Error::WidthMismatch(self.width(), other.width()));
        }
        Ok(())
    }
}

impl fmt::Display for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.slopes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}
