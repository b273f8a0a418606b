//! Piecewise rotations of the plane and their symbolic codings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{AlgebraicComplex, CycloError};
use crate::geometry::{ConvexRegion, GeometryError, Isometry, Location, Point, RegionSet};

pub type Symbol = u16;
pub type Word = Vec<Symbol>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("angle {0}/{1} is not a reduced fraction in (0, 1)")]
    InvalidAngle(i64, i64),
    #[error("rotation center {0} lies on the discontinuity line")]
    CenterOnLine(usize),
    #[error("the map is not bijective")]
    NotBijective,
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// The order of the cyclotomic field used for coordinates at angle p/q:
/// the field of the q-th (q even) or 2q-th (q odd) roots of unity, enlarged
/// to contain i so that real and imaginary parts are field elements.
pub fn coordinate_order(q: u32) -> u32 {
    let n = if q.is_multiple_of(2) { q } else { 2 * q };
    n.lcm(&4)
}

/// e^{2iπp/q} in the coordinate field.
pub fn rotation_coefficient(p: u32, q: u32) -> AlgebraicComplex {
    let m = coordinate_order(q);
    AlgebraicComplex::root_of_unity(m, (p * (m / q)) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variant {
    /// z ↦ ζ(z + σ ± 1) on the upper/lower half-plane.
    Bijective { sigma: BigRational },
    /// Rotations about c₀ on the upper and c₁ on the lower half-plane.
    General {
        c0: AlgebraicComplex,
        c1: AlgebraicComplex,
    },
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub symbol: Symbol,
    pub domain: ConvexRegion,
    pub map: Isometry,
}

#[derive(Clone, Debug)]
pub struct PiecewiseMap {
    pub order: u32,
    pub branches: Vec<Branch>,
    /// Display name of each symbol.
    pub alphabet: Vec<String>,
    /// θ = p/q for maps built from an angle.
    pub angle: Option<(u32, u32)>,
    /// Where the map is defined when that is not the whole plane.
    pub support: Option<RegionSet>,
}

#[derive(Clone, Debug)]
pub enum MapClass {
    Bijective,
    /// Carries the region covered twice.
    NonInjective(RegionSet),
    /// Carries the uncovered region Σ.
    NonSurjective(RegionSet),
}

impl MapClass {
    pub fn name(&self) -> &'static str {
        match self {
            MapClass::Bijective => "bijective",
            MapClass::NonInjective(_) => "non-injective",
            MapClass::NonSurjective(_) => "non-surjective",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepError {
    /// The point lies on the boundary of a branch domain.
    Boundary,
    /// The point lies outside every branch domain.
    NotInDomain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coding {
    pub word: Word,
    pub hit_boundary_at: Option<usize>,
    pub left_domain_at: Option<usize>,
}

pub fn build_map(p: u32, q: u32, variant: &Variant) -> Result<PiecewiseMap, DynamicsError> {
    if p == 0 || q < 2 || p >= q || p.gcd(&q) != 1 {
        return Err(DynamicsError::InvalidAngle(p as i64, q as i64));
    }
    let m = coordinate_order(q);
    let z = rotation_coefficient(p, q);
    let (g0, g1) = match variant {
        Variant::Bijective { sigma } => {
            let s = AlgebraicComplex::rational(m, sigma);
            let one = AlgebraicComplex::one(m);
            let g0 = Isometry::new(z.clone(), &z * &(&s + &one))?;
            let g1 = Isometry::new(z.clone(), &z * &(&s - &one))?;
            (g0, g1)
        }
        Variant::General { c0, c1 } => {
            let c0 = c0.lift(m)?;
            let c1 = c1.lift(m)?;
            if c0.im_sign() == 0 {
                return Err(DynamicsError::CenterOnLine(0));
            }
            if c1.im_sign() == 0 {
                return Err(DynamicsError::CenterOnLine(1));
            }
            (
                Isometry::rotation_about(z.clone(), &c0)?,
                Isometry::rotation_about(z.clone(), &c1)?,
            )
        }
    };
    Ok(PiecewiseMap {
        order: m,
        branches: vec![
            Branch {
                symbol: 0,
                domain: ConvexRegion::upper_half(m),
                map: g0,
            },
            Branch {
                symbol: 1,
                domain: ConvexRegion::lower_half(m),
                map: g1,
            },
        ],
        alphabet: vec!["0".into(), "1".into()],
        angle: Some((p, q)),
        support: None,
    })
}

/// Parses "p/q" into a reduced angle.
pub fn parse_angle(s: &str) -> Option<(u32, u32)> {
    let (a, b) = s.trim().split_once('/')?;
    let a: u32 = a.trim().parse().ok()?;
    let b: u32 = b.trim().parse().ok()?;
    let g = a.gcd(&b);
    if g == 0 {
        return None;
    }
    Some((a / g, b / g))
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl PiecewiseMap {
    pub fn symbol_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn symbol_by_name(&self, name: &str) -> Option<Symbol> {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .map(|i| i as Symbol)
    }

    /// The isometry applied on symbol s (all branches of a symbol share it).
    pub fn isometry_of(&self, s: Symbol) -> Option<&Isometry> {
        self.branches.iter().find(|b| b.symbol == s).map(|b| &b.map)
    }

    pub fn domains_of(&self, s: Symbol) -> impl Iterator<Item = &ConvexRegion> {
        self.branches
            .iter()
            .filter(move |b| b.symbol == s)
            .map(|b| &b.domain)
    }

    /// The composed isometry g_{w_k} ∘ … ∘ g_{w_0}.
    pub fn compose_word(&self, w: &[Symbol]) -> Result<Isometry, DynamicsError> {
        let mut acc = Isometry::identity(self.order);
        for &s in w {
            let g = self
                .isometry_of(s)
                .ok_or_else(|| DynamicsError::UnknownSymbol(s.to_string()))?;
            acc = g.compose(&acc);
        }
        Ok(acc)
    }

    /// Fixed points of each top-level branch map (the rotation centers).
    pub fn centers(&self) -> Vec<AlgebraicComplex> {
        self.branches
            .iter()
            .filter_map(|b| {
                let one = AlgebraicComplex::one(self.order);
                let d = &one - b.map.rot();
                if d.is_zero() {
                    None
                } else {
                    Some(b.map.trans() / &d)
                }
            })
            .collect()
    }

    pub fn word_string(&self, w: &[Symbol]) -> String {
        let single = self.alphabet.iter().all(|a| a.chars().count() == 1);
        let names: Vec<&str> = w
            .iter()
            .map(|&s| self.alphabet[s as usize].as_str())
            .collect();
        if single {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<Word, DynamicsError> {
        let single = self.alphabet.iter().all(|a| a.chars().count() == 1);
        if single {
            s.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    self.symbol_by_name(&c.to_string())
                        .ok_or_else(|| DynamicsError::UnknownSymbol(c.to_string()))
                })
                .collect()
        } else {
            s.split_whitespace()
                .map(|t| {
                    self.symbol_by_name(t)
                        .ok_or_else(|| DynamicsError::UnknownSymbol(t.to_string()))
                })
                .collect()
        }
    }

    pub fn step(&self, z: &Point) -> Result<(Symbol, Point), StepError> {
        let mut boundary = false;
        for b in &self.branches {
            match b.domain.contains(z) {
                Location::Interior => return Ok((b.symbol, b.map.apply_point(z))),
                Location::Boundary => boundary = true,
                Location::Outside => {}
            }
        }
        if boundary {
            Err(StepError::Boundary)
        } else {
            Err(StepError::NotInDomain)
        }
    }

    pub fn code_orbit(&self, z: &Point, n: usize) -> Coding {
        let mut word = Vec::with_capacity(n);
        let mut cur = z.clone();
        for k in 0..n {
            match self.step(&cur) {
                Ok((s, next)) => {
                    word.push(s);
                    cur = next;
                }
                Err(StepError::Boundary) => {
                    return Coding {
                        word,
                        hit_boundary_at: Some(k),
                        left_domain_at: None,
                    }
                }
                Err(StepError::NotInDomain) => {
                    return Coding {
                        word,
                        hit_boundary_at: None,
                        left_domain_at: Some(k),
                    }
                }
            }
        }
        Coding {
            word,
            hit_boundary_at: None,
            left_domain_at: None,
        }
    }

    /// Orbit points z, T z, …, T^n z (stops early at a boundary).
    pub fn orbit(&self, z: &Point, n: usize) -> Vec<Point> {
        let mut out = vec![z.clone()];
        let mut cur = z.clone();
        for _ in 0..n {
            match self.step(&cur) {
                Ok((_, next)) => {
                    out.push(next.clone());
                    cur = next;
                }
                Err(_) => break,
            }
        }
        out
    }

    pub fn domain_set(&self) -> RegionSet {
        match &self.support {
            Some(s) => s.clone(),
            None => RegionSet::new(self.branches.iter().map(|b| b.domain.clone()).collect()),
        }
    }

    pub fn branch_images(&self) -> Vec<ConvexRegion> {
        self.branches
            .iter()
            .map(|b| b.domain.transform(&b.map))
            .collect()
    }

    /// Compares the images of the branch domains with the domain itself.
    pub fn classify(&self) -> MapClass {
        let imgs = self.branch_images();
        let mut overlap = Vec::new();
        for i in 0..imgs.len() {
            for j in i + 1..imgs.len() {
                let r = imgs[i].intersect(&imgs[j]);
                if !r.is_empty() {
                    overlap.push(r);
                }
            }
        }
        if !overlap.is_empty() {
            return MapClass::NonInjective(RegionSet::new(overlap));
        }
        let target = match &self.support {
            Some(s) => s.clone(),
            None => RegionSet::single(ConvexRegion::plane(self.order)),
        };
        let sigma = target.subtract(&RegionSet::new(imgs));
        if sigma.is_empty() {
            MapClass::Bijective
        } else {
            MapClass::NonSurjective(sigma)
        }
    }

    pub fn inverse_map(&self) -> Result<PiecewiseMap, DynamicsError> {
        if !matches!(self.classify(), MapClass::Bijective) {
            return Err(DynamicsError::NotBijective);
        }
        let branches = self
            .branches
            .iter()
            .map(|b| Branch {
                symbol: b.symbol,
                domain: b.domain.transform(&b.map),
                map: b.map.inverse(),
            })
            .collect();
        Ok(PiecewiseMap {
            order: self.order,
            branches,
            alphabet: self.alphabet.clone(),
            angle: self.angle,
            support: self.support.clone(),
        })
    }

    /// Upper-branch center for the bijective family, with the sign of its
    /// imaginary part; used to locate the fixed cell.
    pub fn fixed_centers(&self) -> Vec<(Symbol, AlgebraicComplex)> {
        let mut out = Vec::new();
        for b in &self.branches {
            let one = AlgebraicComplex::one(self.order);
            let d = &one - b.map.rot();
            if d.is_zero() {
                continue;
            }
            let c = b.map.trans() / &d;
            if let Ok(p) = Point::from_complex(&c) {
                if b.domain.contains(&p) == Location::Interior {
                    out.push((b.symbol, c));
                }
            }
        }
        out
    }
}

/// Signed rational helper for display.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-{}/{}", -r.numer(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
