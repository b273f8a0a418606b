//! Rational interval arithmetic around η = 2cos(2π/N).
//!
//! Signs that the float fast path cannot certify are settled here: η is
//! enclosed by a rational interval verified through a sign change of its
//! minimal polynomial, and the enclosure is bisected until the interval
//! value of the target polynomial excludes zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::FieldData;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(v: BigRational) -> Self {
        RatInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn add_scalar(&self, c: &BigRational) -> RatInterval {
        RatInterval {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    pub fn scale(&self, c: &BigRational) -> RatInterval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        let p = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    /// Sign if the interval excludes zero.
    pub fn strict_sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn mid_f64(&self) -> f64 {
        let m = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        m.to_f64().unwrap_or(f64::NAN)
    }
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_int(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// 2^{k·deg} · p(a/2^k), an exact integer.
fn eval_scaled(poly: &[i64], a: &BigInt, k: u32) -> BigInt {
    let d = poly.len() - 1;
    let mut acc = BigInt::zero();
    for (i, c) in poly.iter().enumerate().rev() {
        acc = acc * a + (BigInt::from(*c) << (k as usize * (d - i)));
    }
    acc
}

/// Horner evaluation of an integer polynomial over an interval.
pub fn eval_poly(poly: &[BigInt], x: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::point(BigRational::zero());
    for c in poly.iter().rev() {
        acc = acc.mul(x).add_scalar(&BigRational::from_integer(c.clone()));
    }
    acc
}

/// Evaluates an integer polynomial over the dyadic interval [lo, hi]/2^k.
/// Returns integer bounds on 2^{k·deg} · p(x).
fn eval_dyadic(poly: &[BigInt], lo: &BigInt, hi: &BigInt, k: u32) -> (BigInt, BigInt) {
    let d = poly.len() - 1;
    let mut alo = BigInt::zero();
    let mut ahi = BigInt::zero();
    for (i, c) in poly.iter().enumerate().rev() {
        let p = [&alo * lo, &alo * hi, &ahi * lo, &ahi * hi];
        let shift = c << (k as usize * (d - i));
        alo = p.iter().min().unwrap() + &shift;
        ahi = p.iter().max().unwrap() + &shift;
    }
    (alo, ahi)
}

/// An isolating interval [lo, hi]/2^k for η, refined by bisection.
pub struct EtaEnclosure<'a> {
    field: &'a FieldData,
    lo: BigInt,
    hi: BigInt,
    k: u32,
    lo_sign: i8,
    exact: Option<BigRational>,
}

impl<'a> EtaEnclosure<'a> {
    pub fn new(field: &'a FieldData) -> Self {
        let mp = &field.eta.minpoly;
        if mp.len() == 2 {
            // linear minimal polynomial: η = -c0/c1 exactly
            let v = BigRational::new(BigInt::from(-mp[0]), BigInt::from(mp[1]));
            return EtaEnclosure {
                field,
                lo: BigInt::zero(),
                hi: BigInt::zero(),
                k: 0,
                lo_sign: 0,
                exact: Some(v),
            };
        }
        let k = 60u32;
        let scale = (1u64 << k) as f64;
        let centre = BigInt::from((field.eta.approx * scale).round() as i64);
        let mut delta = BigInt::from(1u64 << 24);
        loop {
            let lo = &centre - &delta;
            let hi = &centre + &delta;
            let sl = sign_int(&eval_scaled(mp, &lo, k));
            let sh = sign_int(&eval_scaled(mp, &hi, k));
            if sl != 0 && sh != 0 && sl != sh {
                return EtaEnclosure {
                    field,
                    lo,
                    hi,
                    k,
                    lo_sign: sl,
                    exact: None,
                };
            }
            delta <<= 2;
            assert!(delta.bits() < 50, "failed to isolate 2cos(2pi/{})", field.n);
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn interval(&self) -> RatInterval {
        match &self.exact {
            Some(v) => RatInterval::point(v.clone()),
            None => {
                let d = BigInt::one() << self.k as usize;
                RatInterval {
                    lo: BigRational::new(self.lo.clone(), d.clone()),
                    hi: BigRational::new(self.hi.clone(), d),
                }
            }
        }
    }

    /// log2 of the interval width, rounded up.
    pub fn width_log2(&self) -> i64 {
        if self.is_exact() {
            return i64::MIN;
        }
        (&self.hi - &self.lo).bits() as i64 - self.k as i64
    }

    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = &self.lo + &self.hi;
        self.lo <<= 1;
        self.hi <<= 1;
        self.k += 1;
        let sm = sign_int(&eval_scaled(&self.field.eta.minpoly, &mid, self.k));
        debug_assert!(sm != 0, "irrational η cannot be dyadic");
        if sm == self.lo_sign {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Bisects until the width is at most 2^-bits.
    pub fn refine_to(&mut self, bits: u32) {
        while self.width_log2() > -(bits as i64) {
            self.bisect();
        }
    }

    /// Interval value of poly(η) at the current resolution.
    pub fn eval(&self, poly: &[BigInt]) -> RatInterval {
        match &self.exact {
            Some(v) => eval_poly(poly, &RatInterval::point(v.clone())),
            None => {
                let (a, b) = eval_dyadic(poly, &self.lo, &self.hi, self.k);
                let d = BigInt::one() << (self.k as usize * poly.len().saturating_sub(1));
                RatInterval {
                    lo: BigRational::new(a, d.clone()),
                    hi: BigRational::new(b, d),
                }
            }
        }
    }

    fn eval_sign(&self, poly: &[BigInt]) -> Option<i8> {
        match &self.exact {
            Some(_) => Some(sign_of(&self.eval(poly).lo)),
            None => {
                let (a, b) = eval_dyadic(poly, &self.lo, &self.hi, self.k);
                if a.is_positive() {
                    Some(1)
                } else if b.is_negative() {
                    Some(-1)
                } else {
                    None
                }
            }
        }
    }
}

/// Sign of poly(η), where poly is known not to vanish at η.
pub fn sign_at_eta(field: &FieldData, poly: &[BigInt]) -> i8 {
    let mut enc = EtaEnclosure::new(field);
    for _ in 0..1000 {
        if let Some(s) = enc.eval_sign(poly) {
            return s;
        }
        for _ in 0..8 {
            enc.bisect();
        }
    }
    panic!("sign refinement did not terminate for a nonzero element");
}

/// Enclosure of sqrt over a nonnegative interval, with resolution 2^-bits.
pub fn sqrt_interval(x: &RatInterval, bits: u32) -> RatInterval {
    let scale = BigInt::one() << (2 * bits as usize);
    let denom = BigInt::one() << bits as usize;
    let lo_src = if x.lo.is_negative() {
        BigRational::zero()
    } else {
        x.lo.clone()
    };
    let lo_scaled = (lo_src * BigRational::from_integer(scale.clone()))
        .floor()
        .to_integer();
    let lo = lo_scaled.sqrt();
    let hi_scaled = (&x.hi * BigRational::from_integer(scale))
        .ceil()
        .to_integer();
    let mut hi = hi_scaled.sqrt();
    if &hi * &hi < hi_scaled {
        hi += 1;
    }
    RatInterval {
        lo: BigRational::new(lo, denom.clone()),
        hi: BigRational::new(hi, denom),
    }
}
