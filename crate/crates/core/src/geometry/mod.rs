//! Exact open convex regions in the plane, possibly unbounded.
//!
//! A region is an intersection of open half-planes `a·x + b·y + c > 0`
//! with coefficients in the real subfield of a cyclotomic field. Regions are
//! kept canonical: redundant constraints are dropped and the rest are sorted
//! by the direction of their boundary line, so set equality is list equality.

mod affine;
mod region;
mod set;

pub use affine::{Isometry, Similarity};
pub use region::{Area, Boundary, ConvexRegion, Location};
pub use set::RegionSet;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{AlgebraicComplex, CycloError, RealAlgebraic};

pub type Real = RealAlgebraic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("rotation part is not of modulus one")]
    NotUnitRotation,
    #[error("operation needs a nonempty region")]
    EmptyRegion,
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Real,
    pub y: Real,
}

impl Point {
    pub fn new(x: Real, y: Real) -> Self {
        Point { x, y }
    }

    pub fn origin(n: u32) -> Self {
        Point::new(Real::zero(n), Real::zero(n))
    }

    pub fn ints(n: u32, x: i64, y: i64) -> Self {
        Point::new(Real::integer(n, x), Real::integer(n, y))
    }

    pub fn fracs(n: u32, x: (i64, i64), y: (i64, i64)) -> Self {
        Point::new(Real::frac(n, x.0, x.1), Real::frac(n, y.0, y.1))
    }

    pub fn order(&self) -> u32 {
        self.x.order()
    }

    /// Splits z into real and imaginary parts; the field must contain i.
    pub fn from_complex(z: &AlgebraicComplex) -> Result<Self, CycloError> {
        Ok(Point::new(z.re_part(), z.im_part()?))
    }

    pub fn to_complex(&self) -> AlgebraicComplex {
        let i = AlgebraicComplex::imag_unit(self.order()).expect("coordinate field contains i");
        self.x.as_complex() + &(self.y.as_complex() * &i)
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, s: &Real) -> Point {
        Point::new(&self.x * s, &self.y * s)
    }

    pub fn neg(&self) -> Point {
        Point::new(-&self.x, -&self.y)
    }

    pub fn dot(&self, o: &Point) -> Real {
        &(&self.x * &o.x) + &(&self.y * &o.y)
    }

    pub fn cross(&self, o: &Point) -> Real {
        &(&self.x * &o.y) - &(&self.y * &o.x)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    pub fn lift(&self, m: u32) -> Result<Point, CycloError> {
        Ok(Point::new(self.x.lift(m)?, self.y.lift(m)?))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.to_f64();
        write!(f, "({x:.6}, {y:.6})")
    }
}

/// The open half-plane `a·x + b·y + c > 0`, normalized so that the first
/// nonzero of (a, b) is ±1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: Real,
    pub b: Real,
    pub c: Real,
}

impl HalfPlane {
    /// Builds and normalizes; returns None when (a, b) = (0, 0).
    pub fn new(a: Real, b: Real, c: Real) -> Option<Self> {
        let lead = if !a.is_zero() {
            a.abs()
        } else if !b.is_zero() {
            b.abs()
        } else {
            return None;
        };
        if lead.is_one() {
            return Some(HalfPlane { a, b, c });
        }
        let inv = match lead.as_rational() {
            Some(r) => Real::rational(a.order(), &r.recip()),
            None => lead.inv().expect("nonzero"),
        };
        Some(HalfPlane {
            a: &a * &inv,
            b: &b * &inv,
            c: &c * &inv,
        })
    }

    /// Convenience constructor from small integers.
    pub fn ints(n: u32, a: i64, b: i64, c: i64) -> Self {
        HalfPlane::new(
            Real::integer(n, a),
            Real::integer(n, b),
            Real::integer(n, c),
        )
        .expect("nonzero normal")
    }

    /// {y > 0}
    pub fn upper(n: u32) -> Self {
        Self::ints(n, 0, 1, 0)
    }

    /// {y < 0}
    pub fn lower(n: u32) -> Self {
        Self::ints(n, 0, -1, 0)
    }

    /// The open half-plane to the left of the directed line p → p + d.
    pub fn left_of(p: &Point, d: &Point) -> Option<Self> {
        // normal (-dy, dx); c = -(n·p)
        let a = -&d.y;
        let b = d.x.clone();
        let c = -&(&(&a * &p.x) + &(&b * &p.y));
        HalfPlane::new(a, b, c)
    }

    pub fn order(&self) -> u32 {
        self.a.order()
    }

    pub fn normal(&self) -> Point {
        Point::new(self.a.clone(), self.b.clone())
    }

    /// Direction of the boundary line with the half-plane on its left.
    pub fn direction(&self) -> Point {
        Point::new(self.b.clone(), -&self.a)
    }

    pub fn eval(&self, p: &Point) -> Real {
        &(&(&self.a * &p.x) + &(&self.b * &p.y)) + &self.c
    }

    pub fn sign_at(&self, p: &Point) -> i8 {
        self.eval(p).sign()
    }

    /// The opposite open half-plane.
    pub fn flip(&self) -> Self {
        HalfPlane {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    /// Some point on the boundary line.
    pub fn point_on_line(&self) -> Point {
        let n = self.order();
        if !self.a.is_zero() {
            // a = ±1: x = -c·a
            Point::new(-&(&self.c * &self.a), Real::zero(n))
        } else {
            Point::new(Real::zero(n), -&(&self.c * &self.b))
        }
    }

    pub fn to_f64(&self) -> (f64, f64, f64) {
        (self.a.to_f64(), self.b.to_f64(), self.c.to_f64())
    }
}

impl fmt::Debug for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = self.to_f64();
        write!(f, "{{{a:.4}x + {b:.4}y + {c:.4} > 0}}")
    }
}

/// Orders directions by angle in [0, 2π).
pub(crate) fn angle_cmp(d1: &Point, d2: &Point) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let half = |d: &Point| {
        let sy = d.y.sign();
        if sy > 0 || (sy == 0 && d.x.sign() > 0) {
            0
        } else {
            1
        }
    };
    match half(d1).cmp(&half(d2)) {
        Ordering::Equal => match d1.cross(d2).sign() {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => Ordering::Equal,
        },
        o => o,
    }
}
