use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{GeometryError, HalfPlane, Point, Real};
use crate::cyclotomic::{AlgebraicComplex, CycloError};

/// z ↦ a·z + t, with the real coordinates cached for point and line maps.
#[derive(Clone)]
struct Affine {
    a: AlgebraicComplex,
    t: AlgebraicComplex,
    ar: Real,
    ai: Real,
    norm2: Real,
    tx: Real,
    ty: Real,
}

impl Affine {
    fn new(a: AlgebraicComplex, t: AlgebraicComplex) -> Result<Self, CycloError> {
        let ar = a.re_part();
        let ai = a.im_part()?;
        let norm2 = &(&ar * &ar) + &(&ai * &ai);
        let tx = t.re_part();
        let ty = t.im_part()?;
        Ok(Affine {
            a,
            t,
            ar,
            ai,
            norm2,
            tx,
            ty,
        })
    }

    fn apply(&self, z: &AlgebraicComplex) -> AlgebraicComplex {
        &(&self.a * z) + &self.t
    }

    fn apply_point(&self, p: &Point) -> Point {
        let x = &(&(&self.ar * &p.x) - &(&self.ai * &p.y)) + &self.tx;
        let y = &(&(&self.ai * &p.x) + &(&self.ar * &p.y)) + &self.ty;
        Point::new(x, y)
    }

    fn apply_vector(&self, p: &Point) -> Point {
        let x = &(&self.ar * &p.x) - &(&self.ai * &p.y);
        let y = &(&self.ai * &p.x) + &(&self.ar * &p.y);
        Point::new(x, y)
    }

    fn apply_halfplane(&self, h: &HalfPlane) -> HalfPlane {
        // n' = a·n, c' = c|a|² - n'·t
        let na = &(&self.ar * &h.a) - &(&self.ai * &h.b);
        let nb = &(&self.ai * &h.a) + &(&self.ar * &h.b);
        let c = if self.norm2.is_one() {
            h.c.clone()
        } else {
            &h.c * &self.norm2
        };
        let c = &(&c - &(&na * &self.tx)) - &(&nb * &self.ty);
        HalfPlane::new(na, nb, c).expect("image of a line is a line")
    }

    fn compose(&self, inner: &Affine) -> Affine {
        let a = &self.a * &inner.a;
        let t = &(&self.a * &inner.t) + &self.t;
        Affine::new(a, t).expect("same coordinate field")
    }

    fn inverse(&self) -> Affine {
        let ai = self.a.inv().expect("nonzero linear part");
        let t = -&(&ai * &self.t);
        Affine::new(ai, t).expect("same coordinate field")
    }
}

impl PartialEq for Affine {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.t == o.t
    }
}

impl Eq for Affine {}

impl std::hash::Hash for Affine {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.a.hash(h);
        self.t.hash(h);
    }
}

#[derive(Serialize, Deserialize)]
struct AffineRepr {
    rot: AlgebraicComplex,
    trans: AlgebraicComplex,
}

macro_rules! affine_wrapper {
    ($name:ident, $lin:literal) => {
        impl $name {
            pub fn rot(&self) -> &AlgebraicComplex {
                &self.0.a
            }

            pub fn trans(&self) -> &AlgebraicComplex {
                &self.0.t
            }

            pub fn order(&self) -> u32 {
                self.0.a.order()
            }

            pub fn identity(n: u32) -> Self {
                $name(
                    Affine::new(AlgebraicComplex::one(n), AlgebraicComplex::zero(n))
                        .expect("coordinate field contains i"),
                )
            }

            pub fn translation(t: AlgebraicComplex) -> Result<Self, CycloError> {
                let n = t.order();
                Ok($name(Affine::new(AlgebraicComplex::one(n), t)?))
            }

            pub fn apply(&self, z: &AlgebraicComplex) -> AlgebraicComplex {
                self.0.apply(z)
            }

            pub fn apply_point(&self, p: &Point) -> Point {
                self.0.apply_point(p)
            }

            /// Image of a direction vector (linear part only).
            pub fn apply_vector(&self, p: &Point) -> Point {
                self.0.apply_vector(p)
            }

            pub fn apply_halfplane(&self, h: &HalfPlane) -> HalfPlane {
                self.0.apply_halfplane(h)
            }

            /// self ∘ inner
            pub fn compose(&self, inner: &Self) -> Self {
                $name(self.0.compose(&inner.0))
            }

            pub fn inverse(&self) -> Self {
                $name(self.0.inverse())
            }

            pub fn pow(&self, k: u32) -> Self {
                let mut acc = Self::identity(self.order());
                for _ in 0..k {
                    acc = self.compose(&acc);
                }
                acc
            }

            pub fn is_identity(&self) -> bool {
                self.0.a.is_one() && self.0.t.is_zero()
            }

            pub fn is_translation(&self) -> bool {
                self.0.a.is_one()
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let (ar, ai) = self.0.a.to_f64();
                let (tx, ty) = self.0.t.to_f64();
                write!(
                    f,
                    concat!("z ↦ ({:.4}{:+.4}i)", $lin, " + ({:.4}{:+.4}i)"),
                    ar, ai, tx, ty
                )
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                AffineRepr {
                    rot: self.0.a.clone(),
                    trans: self.0.t.clone(),
                }
                .serialize(s)
            }
        }
    };
}

/// An orientation-preserving isometry z ↦ rot·z + trans with |rot| = 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry(Affine);

/// A direct similarity z ↦ a·z + t with a ≠ 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Similarity(Affine);

affine_wrapper!(Isometry, "z");
affine_wrapper!(Similarity, "z");

impl Isometry {
    /// Fails unless rot·conj(rot) = 1 exactly.
    pub fn new(rot: AlgebraicComplex, trans: AlgebraicComplex) -> Result<Self, GeometryError> {
        let aff = Affine::new(rot, trans)?;
        if !aff.norm2.is_one() {
            return Err(GeometryError::NotUnitRotation);
        }
        Ok(Isometry(aff))
    }

    /// Rotation by `rot` about `center`: z ↦ rot·(z - c) + c.
    pub fn rotation_about(
        rot: AlgebraicComplex,
        center: &AlgebraicComplex,
    ) -> Result<Self, GeometryError> {
        let t = center - &(&rot * center);
        Isometry::new(rot, t)
    }

    /// Smallest r ≥ 1 with rot^r = 1, if rot is a root of unity of order
    /// dividing the field order.
    pub fn rotation_order(&self) -> Option<u32> {
        let n = self.order();
        let mut acc = self.0.a.clone();
        for r in 1..=(2 * n) {
            if acc.is_one() {
                return Some(r);
            }
            acc = &acc * &self.0.a;
        }
        None
    }

    pub fn to_similarity(&self) -> Similarity {
        Similarity(self.0.clone())
    }
}

impl Similarity {
    pub fn new(a: AlgebraicComplex, t: AlgebraicComplex) -> Result<Self, CycloError> {
        if a.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        Ok(Similarity(Affine::new(a, t)?))
    }

    /// The squared scale factor |a|².
    pub fn scale2(&self) -> &Real {
        &self.0.norm2
    }

    /// Conjugate g ↦ self ∘ g ∘ self⁻¹, which is again an isometry.
    pub fn conjugate(&self, g: &Isometry) -> Isometry {
        let c = self.0.compose(&g.0).compose(&self.0.inverse());
        Isometry(c)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = AffineRepr::deserialize(d)?;
        Isometry::new(r.rot, r.trans).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for Similarity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = AffineRepr::deserialize(d)?;
        Similarity::new(r.rot, r.trans).map_err(serde::de::Error::custom)
    }
}
