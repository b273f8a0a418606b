//! Exact arithmetic in cyclotomic fields ℚ(ζ_N).
//!
//! Elements are kept as an integer numerator vector over the power basis
//! 1, ζ, …, ζ^{φ(N)-1} together with a positive common denominator, always
//! reduced modulo Φ_N and by the content gcd. Equal values therefore have
//! identical representations.

mod field;
pub mod interval;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use field::{cyclotomic_poly, totient, MAX_ORDER};
use field::{field, FieldData};
use interval::{sign_at_eta, sqrt_interval, EtaEnclosure, RatInterval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("root-of-unity order must be positive")]
    ZeroOrder,
    #[error("root-of-unity order {0} exceeds the supported maximum")]
    UnsupportedOrder(u32),
    #[error("{len} coefficients given for order {n}")]
    TooManyCoefficients { n: u32, len: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched cyclotomic orders {0} and {1}")]
    FieldMismatch(u32, u32),
    #[error("element is not real")]
    NotReal,
    #[error("ℚ(ζ_{0}) does not contain i")]
    NoImaginaryUnit(u32),
    #[error("cannot lift from order {from} to order {to}")]
    BadLift { from: u32, to: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

fn check_order(n: u32) -> Result<&'static FieldData, CycloError> {
    if n == 0 {
        Err(CycloError::ZeroOrder)
    } else if n > MAX_ORDER {
        Err(CycloError::UnsupportedOrder(n))
    } else {
        Ok(field(n))
    }
}

#[derive(Clone)]
pub struct AlgebraicComplex {
    field: &'static FieldData,
    num: Vec<BigInt>,
    den: BigInt,
}

/// Certified enclosure of a complex value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re: RatInterval,
    pub im: RatInterval,
}

impl ComplexBox {
    pub fn center(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }
}

fn reduce(f: &FieldData, wide: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); f.degree];
    for (k, c) in wide.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if k < f.degree {
            out[k] += c;
            continue;
        }
        for (j, r) in f.powmod[k].iter().enumerate() {
            if *r != 0 {
                out[j] += c * r;
            }
        }
    }
    out
}

fn apply_matrix(v: &[BigInt], m: &[Vec<i64>]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); v.len()];
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (j, r) in m[i].iter().enumerate() {
            if *r != 0 {
                out[j] += c * r;
            }
        }
    }
    out
}

fn combine_poly(num: &[BigInt], polys: &[Vec<i64>]) -> Vec<BigInt> {
    let len = polys.iter().map(|p| p.len()).max().unwrap_or(1);
    let mut out = vec![BigInt::zero(); len];
    for (k, c) in num.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (i, p) in polys[k].iter().enumerate() {
            if *p != 0 {
                out[i] += c * p;
            }
        }
    }
    out
}

fn float_dot(num: &[BigInt], table: &[f64]) -> Option<f64> {
    let mut s = 0.0f64;
    let mut mag = 0.0f64;
    for (c, t) in num.iter().zip(table) {
        if c.is_zero() {
            continue;
        }
        let x = c.to_f64()?;
        if !x.is_finite() || x.abs() > 1e290 {
            return None;
        }
        s += x * t;
        mag += x.abs();
    }
    if s.abs() > 1e-12 * mag {
        Some(s)
    } else {
        None
    }
}

impl AlgebraicComplex {
    fn from_parts(field: &'static FieldData, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        let mut g = den.clone();
        for c in num.iter() {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if num.iter().all(|c| c.is_zero()) {
            g = den.clone();
        }
        if !g.is_one() {
            for c in num.iter_mut() {
                *c = &*c / &g;
            }
            den /= g;
        }
        AlgebraicComplex { field, num, den }
    }

    /// Builds an element from rational coefficients over 1, ζ, ζ², …
    pub fn new(n: u32, coeffs: &[BigRational]) -> Result<Self, CycloError> {
        let f = check_order(n)?;
        if coeffs.len() > n.max(1) as usize {
            return Err(CycloError::TooManyCoefficients {
                n,
                len: coeffs.len(),
            });
        }
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let wide: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(Self::from_parts(f, reduce(f, &wide), den))
    }

    pub fn from_ints(n: u32, coeffs: &[i64]) -> Result<Self, CycloError> {
        let r: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        Self::new(n, &r)
    }

    pub fn zero(n: u32) -> Self {
        let f = field(n);
        AlgebraicComplex {
            field: f,
            num: vec![BigInt::zero(); f.degree],
            den: BigInt::one(),
        }
    }

    pub fn one(n: u32) -> Self {
        Self::integer(n, 1)
    }

    pub fn integer(n: u32, v: i64) -> Self {
        Self::rational(n, &BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(n: u32, v: &BigRational) -> Self {
        let f = field(n);
        let mut num = vec![BigInt::zero(); f.degree];
        num[0] = v.numer().clone();
        Self::from_parts(f, num, v.denom().clone())
    }

    pub fn frac(n: u32, a: i64, b: i64) -> Self {
        Self::rational(n, &BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    /// ζ_N^k for any integer k.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let f = field(n);
        let e = k.rem_euclid(n as i64) as usize;
        let num = f.powmod[e].iter().map(|&c| BigInt::from(c)).collect();
        Self::from_parts(f, num, BigInt::one())
    }

    /// The imaginary unit, available when 4 | N.
    pub fn imag_unit(n: u32) -> Result<Self, CycloError> {
        check_order(n)?;
        if !n.is_multiple_of(4) {
            return Err(CycloError::NoImaginaryUnit(n));
        }
        Ok(Self::root_of_unity(n, (n / 4) as i64))
    }

    pub fn order(&self) -> u32 {
        self.field.n
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// True when the value is a rational number.
    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn same_field(&self, o: &Self) -> Result<(), CycloError> {
        if std::ptr::eq(self.field, o.field) {
            Ok(())
        } else {
            Err(CycloError::FieldMismatch(self.field.n, o.field.n))
        }
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(
            self.field,
            apply_matrix(&self.num, &self.field.conj),
            self.den.clone(),
        )
    }

    fn galois(&self, m: &[Vec<i64>]) -> Self {
        Self::from_parts(self.field, apply_matrix(&self.num, m), self.den.clone())
    }

    fn add_sub(&self, o: &Self, negate: bool) -> Self {
        let num = if self.den == o.den {
            self.num
                .iter()
                .zip(&o.num)
                .map(|(a, b)| if negate { a - b } else { a + b })
                .collect::<Vec<_>>()
        } else {
            self.num
                .iter()
                .zip(&o.num)
                .map(|(a, b)| {
                    let x = a * &o.den;
                    let y = b * &self.den;
                    if negate {
                        x - y
                    } else {
                        x + y
                    }
                })
                .collect()
        };
        let den = if self.den == o.den {
            self.den.clone()
        } else {
            &self.den * &o.den
        };
        Self::from_parts(self.field, num, den)
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, CycloError> {
        self.same_field(o)?;
        Ok(self.add_sub(o, false))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, CycloError> {
        self.same_field(o)?;
        Ok(self.add_sub(o, true))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, CycloError> {
        self.same_field(o)?;
        let d = self.field.degree;
        if self.is_rational() || o.is_rational() {
            let (r, v) = if self.is_rational() {
                (self, o)
            } else {
                (o, self)
            };
            let num = v.num.iter().map(|c| c * &r.num[0]).collect();
            return Ok(Self::from_parts(self.field, num, &self.den * &o.den));
        }
        let mut wide = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.num.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        Ok(Self::from_parts(
            self.field,
            reduce(self.field, &wide),
            &self.den * &o.den,
        ))
    }

    pub fn inv(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::rational(self.field.n, &r.recip()));
        }
        // a^{-1} = (product of the other conjugates) / norm
        let mut p = Self::one(self.field.n);
        for (_, m) in &self.field.galois {
            p = p.checked_mul(&self.galois(m))?;
        }
        let norm = self.checked_mul(&p)?;
        let norm = norm
            .as_rational()
            .expect("field norm of an element is rational");
        Ok(p.scale(&norm.recip()))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, CycloError> {
        self.same_field(o)?;
        self.checked_mul(&o.inv()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        Self::from_parts(self.field, num, &self.den * r.denom())
    }

    pub fn pow(&self, e: i64) -> Result<Self, CycloError> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.field.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Embeds the element into ℚ(ζ_m), for m a multiple of the current order.
    pub fn lift(&self, m: u32) -> Result<Self, CycloError> {
        let n = self.field.n;
        let g = check_order(m)?;
        if !m.is_multiple_of(n) {
            return Err(CycloError::BadLift { from: n, to: m });
        }
        let step = (m / n) as usize;
        let mut wide = vec![BigInt::zero(); m as usize];
        for (k, c) in self.num.iter().enumerate() {
            let idx = (k * step) % m as usize;
            wide[idx] += c;
        }
        Ok(Self::from_parts(g, reduce(g, &wide), self.den.clone()))
    }

    fn re_num_is_zero(&self) -> bool {
        let c = apply_matrix(&self.num, &self.field.conj);
        self.num.iter().zip(&c).all(|(a, b)| (a + b).is_zero())
    }

    fn im_num_is_zero(&self) -> bool {
        let c = apply_matrix(&self.num, &self.field.conj);
        self.num.iter().zip(&c).all(|(a, b)| a == b)
    }

    pub fn re_sign(&self) -> i8 {
        if let Some(r) = self.as_rational() {
            return r.signum().to_i8().unwrap_or(0);
        }
        if let Some(s) = float_dot(&self.num, &self.field.cos) {
            return if s > 0.0 { 1 } else { -1 };
        }
        if self.re_num_is_zero() {
            return 0;
        }
        let p = combine_poly(&self.num, &self.field.eta.cos_polys);
        sign_at_eta(self.field, &p)
    }

    pub fn im_sign(&self) -> i8 {
        if self.is_rational() {
            return 0;
        }
        if let Some(s) = float_dot(&self.num, &self.field.sin) {
            return if s > 0.0 { 1 } else { -1 };
        }
        if self.im_num_is_zero() {
            return 0;
        }
        let p = combine_poly(&self.num, &self.field.eta.sin_polys);
        sign_at_eta(self.field, &p)
    }

    pub fn sign_re_im(&self) -> (i8, i8) {
        (self.re_sign(), self.im_sign())
    }

    /// Real part as an element of the same field.
    pub fn re_part(&self) -> RealAlgebraic {
        let s = self.add_sub(&self.conj(), false);
        RealAlgebraic(s.scale(&BigRational::new(BigInt::one(), BigInt::from(2))))
    }

    /// Imaginary part; requires i in the field.
    pub fn im_part(&self) -> Result<RealAlgebraic, CycloError> {
        let i = Self::imag_unit(self.field.n)?;
        let d = self.add_sub(&self.conj(), true);
        // (z - z̄) / (2i) = -i (z - z̄) / 2
        let v = (&d * &i).scale(&BigRational::new(BigInt::from(-1), BigInt::from(2)));
        Ok(RealAlgebraic(v))
    }

    /// Certified box of width at most 2^-bits in each coordinate.
    pub fn approx(&self, bits: u32) -> ComplexBox {
        let zero = RatInterval::point(BigRational::zero());
        if self.is_zero() {
            return ComplexBox {
                re: zero.clone(),
                im: zero,
            };
        }
        let den = BigRational::from_integer(self.den.clone());
        if let Some(r) = self.as_rational() {
            return ComplexBox {
                re: RatInterval::point(r),
                im: zero,
            };
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
        let p_re = combine_poly(&self.num, &self.field.eta.cos_polys);
        let p_im = combine_poly(&self.num, &self.field.eta.sin_polys);
        let two = BigRational::from_integer(BigInt::from(2));
        let four = BigRational::from_integer(BigInt::from(4));
        // coefficient growth bounds the Lipschitz constant of both polynomials
        let growth = p_re
            .iter()
            .chain(&p_im)
            .map(|c| c.bits())
            .max()
            .unwrap_or(0) as u32
            + 2 * self.field.degree as u32
            + 4;
        let mut enc = EtaEnclosure::new(self.field);
        let mut extra = growth;
        loop {
            enc.refine_to(bits + extra);
            let iv = enc.interval();
            let re = enc.eval(&p_re).scale(&(&two * &den).recip());
            // sin(2π/N) = sqrt(4 - η²)/2
            let eta2 = iv.mul(&iv);
            let rad = RatInterval {
                lo: &four - &eta2.hi,
                hi: &four - &eta2.lo,
            };
            let s = sqrt_interval(&rad, bits + extra).scale(&two.recip());
            let im = enc.eval(&p_im).mul(&s).scale(&den.recip());
            if re.width() <= target && im.width() <= target {
                return ComplexBox { re, im };
            }
            extra += 8;
        }
    }

    /// Float evaluation without certification, for rendering and heuristics.
    pub fn to_f64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let x = BigRational::new(c.clone(), self.den.clone())
                .to_f64()
                .unwrap_or(f64::NAN);
            re += x * self.field.cos[k];
            im += x * self.field.sin[k];
        }
        (re, im)
    }
}

impl PartialEq for AlgebraicComplex {
    fn eq(&self, o: &Self) -> bool {
        std::ptr::eq(self.field, o.field) && self.den == o.den && self.num == o.num
    }
}

impl Eq for AlgebraicComplex {}

impl Hash for AlgebraicComplex {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.field.n.hash(h);
        self.num.hash(h);
        self.den.hash(h);
    }
}

impl fmt::Debug for AlgebraicComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.to_f64();
        write!(f, "{self} ≈ ({x:.6}, {y:.6})")
    }
}

impl fmt::Display for AlgebraicComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cyclo({})[", self.field.n)?;
        for (k, c) in self.coeffs().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

fn parse_rational(s: &str) -> Result<BigRational, CycloError> {
    let s = s.trim();
    let bad = || CycloError::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(CycloError::DivisionByZero);
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for AlgebraicComplex {
    type Err = CycloError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = s
            .strip_prefix("cyclo(")
            .ok_or_else(|| CycloError::Parse(format!("expected cyclo(N)[...], got '{s}'")))?;
        let (n, rest) = body
            .split_once(')')
            .ok_or_else(|| CycloError::Parse("missing ')'".into()))?;
        let n: u32 = n
            .trim()
            .parse()
            .map_err(|_| CycloError::Parse(format!("bad order '{n}'")))?;
        let inner = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| CycloError::Parse("expected [c0,c1,...]".into()))?;
        let coeffs = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()?
        };
        AlgebraicComplex::new(n, &coeffs)
    }
}

impl Serialize for AlgebraicComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlgebraicComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&AlgebraicComplex> for &AlgebraicComplex {
            type Output = AlgebraicComplex;
            fn $m(self, o: &AlgebraicComplex) -> AlgebraicComplex {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<AlgebraicComplex> for AlgebraicComplex {
            type Output = AlgebraicComplex;
            fn $m(self, o: AlgebraicComplex) -> AlgebraicComplex {
                (&self).$m(&o)
            }
        }
        impl $tr<&RealAlgebraic> for &RealAlgebraic {
            type Output = RealAlgebraic;
            fn $m(self, o: &RealAlgebraic) -> RealAlgebraic {
                RealAlgebraic(self.0.$checked(&o.0).unwrap_or_else(|e| panic!("{e}")))
            }
        }
        impl $tr<RealAlgebraic> for RealAlgebraic {
            type Output = RealAlgebraic;
            fn $m(self, o: RealAlgebraic) -> RealAlgebraic {
                (&self).$m(&o)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &AlgebraicComplex {
    type Output = AlgebraicComplex;
    fn neg(self) -> AlgebraicComplex {
        AlgebraicComplex {
            field: self.field,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for AlgebraicComplex {
    type Output = AlgebraicComplex;
    fn neg(self) -> AlgebraicComplex {
        -&self
    }
}

/// An element of the maximal real subfield, totally ordered.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RealAlgebraic(AlgebraicComplex);

impl RealAlgebraic {
    pub fn new(z: AlgebraicComplex) -> Result<Self, CycloError> {
        if z.im_num_is_zero() {
            Ok(RealAlgebraic(z))
        } else {
            Err(CycloError::NotReal)
        }
    }

    pub fn integer(n: u32, v: i64) -> Self {
        RealAlgebraic(AlgebraicComplex::integer(n, v))
    }

    pub fn zero(n: u32) -> Self {
        RealAlgebraic(AlgebraicComplex::zero(n))
    }

    pub fn one(n: u32) -> Self {
        Self::integer(n, 1)
    }

    pub fn rational(n: u32, v: &BigRational) -> Self {
        RealAlgebraic(AlgebraicComplex::rational(n, v))
    }

    pub fn frac(n: u32, a: i64, b: i64) -> Self {
        RealAlgebraic(AlgebraicComplex::frac(n, a, b))
    }

    pub fn as_complex(&self) -> &AlgebraicComplex {
        &self.0
    }

    pub fn into_complex(self) -> AlgebraicComplex {
        self.0
    }

    pub fn order(&self) -> u32 {
        self.0.order()
    }

    pub fn sign(&self) -> i8 {
        self.0.re_sign()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.0.as_rational()
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self, CycloError> {
        Ok(RealAlgebraic(self.0.inv()?))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        RealAlgebraic(self.0.scale(r))
    }

    pub fn half(&self) -> Self {
        self.scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn lift(&self, m: u32) -> Result<Self, CycloError> {
        Ok(RealAlgebraic(self.0.lift(m)?))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().0
    }

    pub fn approx(&self, bits: u32) -> RatInterval {
        self.0.approx(bits).re
    }

    pub fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }

    pub fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
}

impl Neg for &RealAlgebraic {
    type Output = RealAlgebraic;
    fn neg(self) -> RealAlgebraic {
        RealAlgebraic(-&self.0)
    }
}

impl Neg for RealAlgebraic {
    type Output = RealAlgebraic;
    fn neg(self) -> RealAlgebraic {
        -&self
    }
}

impl PartialOrd for RealAlgebraic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for RealAlgebraic {
    fn cmp(&self, o: &Self) -> Ordering {
        if self == o {
            return Ordering::Equal;
        }
        match (self - o).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl fmt::Debug for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≈ {:.6}", self.0, self.to_f64())
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for RealAlgebraic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealAlgebraic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let z = AlgebraicComplex::deserialize(d)?;
        RealAlgebraic::new(z).map_err(serde::de::Error::custom)
    }
}
