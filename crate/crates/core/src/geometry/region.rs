use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{angle_cmp, GeometryError, HalfPlane, Isometry, Point, Real, Similarity};

/// Where a point lies relative to an open region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Area {
    Finite(Real),
    Infinite,
}

impl Area {
    pub fn finite(&self) -> Option<&Real> {
        match self {
            Area::Finite(r) => Some(r),
            Area::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Area::Finite(r) => r.to_f64(),
            Area::Infinite => f64::INFINITY,
        }
    }
}

/// Counterclockwise boundary walk of a nonempty region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    pub vertices: Vec<Point>,
    /// Recession directions: the backward direction of the incoming
    /// unbounded edge, then the direction of the outgoing one.
    pub rays: Vec<Point>,
}

#[derive(Clone)]
struct Edge {
    hp: HalfPlane,
    start: Option<Point>,
    end: Option<Point>,
}

/// An open convex region in canonical form.
#[derive(Clone)]
pub struct ConvexRegion {
    n: u32,
    empty: bool,
    /// Essential constraints sorted by boundary direction angle.
    edges: Vec<Edge>,
}

impl PartialEq for ConvexRegion {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n
            && self.empty == o.empty
            && self.edges.len() == o.edges.len()
            && self.edges.iter().zip(&o.edges).all(|(a, b)| a.hp == b.hp)
    }
}

impl Eq for ConvexRegion {}

impl Hash for ConvexRegion {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.n.hash(h);
        self.empty.hash(h);
        for e in &self.edges {
            e.hp.hash(h);
        }
    }
}

/// A parameter bound t ≷ num/den along a line, with den ≠ 0.
struct Bound {
    num: Real,
    den: Real,
    den_sign: i8,
}

fn bound_cmp(x: &Bound, y: &Bound) -> Ordering {
    let lhs = &x.num * &y.den;
    let rhs = &y.num * &x.den;
    let o = lhs.cmp(&rhs);
    if x.den_sign * y.den_sign > 0 {
        o
    } else {
        o.reverse()
    }
}

fn bound_value(b: &Bound) -> Real {
    match b.den.as_rational() {
        Some(r) => b.num.scale(&r.recip()),
        None => &b.num * &b.den.inv().expect("nonzero"),
    }
}

impl ConvexRegion {
    pub fn plane(n: u32) -> Self {
        ConvexRegion {
            n,
            empty: false,
            edges: Vec::new(),
        }
    }

    pub fn empty(n: u32) -> Self {
        ConvexRegion {
            n,
            empty: true,
            edges: Vec::new(),
        }
    }

    pub fn upper_half(n: u32) -> Self {
        Self::from_halfplanes(n, vec![HalfPlane::upper(n)])
    }

    pub fn lower_half(n: u32) -> Self {
        Self::from_halfplanes(n, vec![HalfPlane::lower(n)])
    }

    /// Axis-parallel open box (x0, x1) × (y0, y1).
    pub fn rect(x0: &Real, x1: &Real, y0: &Real, y1: &Real) -> Self {
        let n = x0.order();
        let one = Real::one(n);
        let zero = Real::zero(n);
        let hs = vec![
            HalfPlane::new(one.clone(), zero.clone(), -x0).unwrap(),
            HalfPlane::new(-&one, zero.clone(), x1.clone()).unwrap(),
            HalfPlane::new(zero.clone(), one.clone(), -y0).unwrap(),
            HalfPlane::new(zero, -&one, y1.clone()).unwrap(),
        ];
        Self::from_halfplanes(n, hs)
    }

    /// Open convex hull of points listed counterclockwise.
    pub fn polygon(pts: &[Point]) -> Self {
        let n = pts[0].order();
        let hs = (0..pts.len())
            .filter_map(|i| {
                let p = &pts[i];
                let q = &pts[(i + 1) % pts.len()];
                HalfPlane::left_of(p, &q.sub(p))
            })
            .collect();
        Self::from_halfplanes(n, hs)
    }

    /// Open convex hull of arbitrary points (monotone chain, exact).
    pub fn hull(pts: &[Point]) -> Self {
        let n = pts.first().map(|p| p.order()).unwrap_or(1);
        let mut p: Vec<Point> = pts.to_vec();
        p.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
        p.dedup();
        if p.len() < 3 {
            return Self::empty(n);
        }
        let turn = |o: &Point, a: &Point, b: &Point| a.sub(o).cross(&b.sub(o)).sign();
        let mut lower: Vec<Point> = Vec::new();
        for q in &p {
            while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 0
            {
                lower.pop();
            }
            lower.push(q.clone());
        }
        let mut upper: Vec<Point> = Vec::new();
        for q in p.iter().rev() {
            while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 0
            {
                upper.pop();
            }
            upper.push(q.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() < 3 {
            return Self::empty(n);
        }
        Self::polygon(&lower)
    }

    /// Canonical intersection of the given open half-planes.
    pub fn from_halfplanes(n: u32, hs: Vec<HalfPlane>) -> Self {
        // keep the tightest constraint per direction
        let mut best: HashMap<(Real, Real), Real> = HashMap::new();
        for h in hs {
            debug_assert_eq!(h.order(), n);
            let key = (h.a, h.b);
            match best.get_mut(&key) {
                Some(c) => {
                    if h.c < *c {
                        *c = h.c;
                    }
                }
                None => {
                    best.insert(key, h.c);
                }
            }
        }
        for ((a, b), c) in &best {
            if let Some(c2) = best.get(&(-a, -b)) {
                if (c + c2).sign() <= 0 {
                    return Self::empty(n);
                }
            }
        }
        let hs: Vec<HalfPlane> = best
            .into_iter()
            .map(|((a, b), c)| HalfPlane { a, b, c })
            .collect();
        Self::canonicalize(n, hs)
    }

    fn canonicalize(n: u32, hs: Vec<HalfPlane>) -> Self {
        let mut edges = Vec::new();
        for (i, h) in hs.iter().enumerate() {
            let p = h.point_on_line();
            let d = h.direction();
            let mut lo: Option<Bound> = None;
            let mut hi: Option<Bound> = None;
            let mut feasible = true;
            for (j, g) in hs.iter().enumerate() {
                if i == j {
                    continue;
                }
                let k = g.normal().dot(&d);
                let f = g.eval(&p);
                let ks = k.sign();
                if ks == 0 {
                    if f.sign() <= 0 {
                        feasible = false;
                        break;
                    }
                    continue;
                }
                let b = Bound {
                    num: -f,
                    den: k,
                    den_sign: ks,
                };
                if ks > 0 {
                    if lo
                        .as_ref()
                        .is_none_or(|l| bound_cmp(&b, l) == Ordering::Greater)
                    {
                        lo = Some(b);
                    }
                } else if hi
                    .as_ref()
                    .is_none_or(|u| bound_cmp(&b, u) == Ordering::Less)
                {
                    hi = Some(b);
                }
                if let (Some(l), Some(u)) = (&lo, &hi) {
                    if bound_cmp(l, u) != Ordering::Less {
                        feasible = false;
                        break;
                    }
                }
            }
            if !feasible {
                continue;
            }
            let at = |b: &Bound| p.add(&d.scale(&bound_value(b)));
            edges.push(Edge {
                hp: h.clone(),
                start: lo.as_ref().map(at),
                end: hi.as_ref().map(at),
            });
        }
        if edges.is_empty() && !hs.is_empty() {
            return Self::empty(n);
        }
        edges.sort_by(|e, f| angle_cmp(&e.hp.direction(), &f.hp.direction()));
        ConvexRegion {
            n,
            empty: false,
            edges,
        }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        self.edges.iter().map(|e| e.hp.clone()).collect()
    }

    pub fn num_constraints(&self) -> usize {
        self.edges.len()
    }

    pub fn is_bounded(&self) -> bool {
        !self.empty
            && !self.edges.is_empty()
            && self
                .edges
                .iter()
                .all(|e| e.start.is_some() && e.end.is_some())
    }

    pub fn contains(&self, p: &Point) -> Location {
        if self.empty {
            return Location::Outside;
        }
        let mut on_boundary = false;
        for e in &self.edges {
            match e.hp.sign_at(p) {
                -1 => return Location::Outside,
                0 => on_boundary = true,
                _ => {}
            }
        }
        if on_boundary {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    /// Sign of h over the closure: +1 if the region lies in h, -1 if it is
    /// disjoint from h, 0 if h cuts it (or it cannot be decided cheaply).
    fn side_of(&self, h: &HalfPlane) -> i8 {
        if self.edges.is_empty() {
            return 0;
        }
        let w = self.boundary_walk();
        if w.vertices.is_empty() {
            return 0;
        }
        let nrm = h.normal();
        let mut pos = false;
        let mut neg = false;
        for v in &w.vertices {
            match h.sign_at(v) {
                1 => pos = true,
                -1 => neg = true,
                _ => {}
            }
            if pos && neg {
                return 0;
            }
        }
        for r in &w.rays {
            match nrm.dot(r).sign() {
                1 => pos = true,
                -1 => neg = true,
                _ => {}
            }
            if pos && neg {
                return 0;
            }
        }
        match (pos, neg) {
            (_, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    }

    pub fn clip(&self, h: &HalfPlane) -> Self {
        if self.empty {
            return self.clone();
        }
        match self.side_of(h) {
            1 => self.clone(),
            -1 => Self::empty(self.n),
            _ => {
                let mut hs = self.halfplanes();
                hs.push(h.clone());
                Self::from_halfplanes(self.n, hs)
            }
        }
    }

    /// True when the region lies inside the closed half-plane.
    pub fn inside_closed(&self, h: &HalfPlane) -> bool {
        if self.empty {
            return true;
        }
        match self.side_of(h) {
            1 => true,
            -1 => false,
            _ => self.clip(&h.flip()).is_empty(),
        }
    }

    pub fn intersect(&self, o: &Self) -> Self {
        if self.empty || o.empty {
            return Self::empty(self.n);
        }
        if o.edges.len() == 1 {
            return self.clip(&o.edges[0].hp);
        }
        if self.edges.len() == 1 {
            return o.clip(&self.edges[0].hp);
        }
        let mut hs = self.halfplanes();
        hs.extend(o.halfplanes());
        Self::from_halfplanes(self.n, hs)
    }

    /// r ⊆ closure(o), decided exactly.
    pub fn subset_of(&self, o: &Self) -> bool {
        if self.empty {
            return true;
        }
        if o.empty {
            return false;
        }
        o.edges.iter().all(|e| self.inside_closed(&e.hp))
    }

    /// Disjoint open pieces covering self minus closure(o), up to boundaries.
    pub fn subtract(&self, o: &Self) -> Vec<Self> {
        if self.empty {
            return Vec::new();
        }
        if o.empty || self.intersect(o).is_empty() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        for e in &o.edges {
            let piece = rest.clip(&e.hp.flip());
            if !piece.is_empty() {
                out.push(piece);
            }
            rest = rest.clip(&e.hp);
            if rest.is_empty() {
                break;
            }
        }
        out
    }

    fn boundary_walk(&self) -> Boundary {
        let m = self.edges.len();
        if m == 0 {
            return Boundary {
                vertices: Vec::new(),
                rays: Vec::new(),
            };
        }
        let start = self
            .edges
            .iter()
            .position(|e| e.start.is_none())
            .unwrap_or(0);
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for k in 0..m {
            let e = &self.edges[(start + k) % m];
            if e.start.is_none() {
                rays.push(e.hp.direction().neg());
            }
            if let Some(v) = &e.end {
                vertices.push(v.clone());
            } else {
                rays.push(e.hp.direction());
            }
        }
        Boundary { vertices, rays }
    }

    pub fn vertices_and_rays(&self) -> Result<Boundary, GeometryError> {
        if self.empty {
            return Err(GeometryError::EmptyRegion);
        }
        Ok(self.boundary_walk())
    }

    /// Vertices of a bounded region, counterclockwise.
    pub fn vertices(&self) -> Vec<Point> {
        self.boundary_walk().vertices
    }

    pub fn area(&self) -> Area {
        if self.empty {
            return Area::Finite(Real::zero(self.n));
        }
        if !self.is_bounded() {
            return Area::Infinite;
        }
        let v = self.vertices();
        let mut s = Real::zero(self.n);
        for i in 0..v.len() {
            s = &s + &v[i].cross(&v[(i + 1) % v.len()]);
        }
        Area::Finite(s.half())
    }

    /// Some point in the open region.
    pub fn interior_point(&self) -> Option<Point> {
        if self.empty {
            return None;
        }
        if self.edges.is_empty() {
            return Some(Point::origin(self.n));
        }
        if self.is_bounded() {
            let v = self.vertices();
            let k = Real::frac(self.n, 1, v.len() as i64);
            let mut s = Point::origin(self.n);
            for p in &v {
                s = s.add(p);
            }
            return Some(s.scale(&k));
        }
        // step inward from a point of an edge, halving until inside
        let e = &self.edges[0];
        let d = e.hp.direction();
        let base = match (&e.start, &e.end) {
            (Some(a), Some(b)) => a.add(b).scale(&Real::frac(self.n, 1, 2)),
            (Some(a), None) => a.add(&d),
            (None, Some(b)) => b.sub(&d),
            (None, None) => e.hp.point_on_line(),
        };
        let nrm = e.hp.normal();
        let mut eps = Real::one(self.n);
        for _ in 0..200 {
            let q = base.add(&nrm.scale(&eps));
            if self.contains(&q) == Location::Interior {
                return Some(q);
            }
            eps = eps.half();
        }
        None
    }

    pub fn transform(&self, g: &Isometry) -> Self {
        self.map_with(|h| g.apply_halfplane(h), |p| g.apply_point(p))
    }

    pub fn transform_similarity(&self, g: &Similarity) -> Self {
        self.map_with(|h| g.apply_halfplane(h), |p| g.apply_point(p))
    }

    fn map_with(&self, fh: impl Fn(&HalfPlane) -> HalfPlane, fp: impl Fn(&Point) -> Point) -> Self {
        if self.empty {
            return self.clone();
        }
        // direct maps preserve the cyclic order of edges
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge {
                hp: fh(&e.hp),
                start: e.start.as_ref().map(&fp),
                end: e.end.as_ref().map(&fp),
            })
            .collect();
        if let Some(k) = (0..edges.len())
            .min_by(|&i, &j| angle_cmp(&edges[i].hp.direction(), &edges[j].hp.direction()))
        {
            edges.rotate_left(k);
        }
        ConvexRegion {
            n: self.n,
            empty: false,
            edges,
        }
    }

    pub fn lift(&self, m: u32) -> Result<Self, GeometryError> {
        if self.empty {
            return Ok(Self::empty(m));
        }
        let mut hs = Vec::new();
        for h in self.halfplanes() {
            hs.push(HalfPlane {
                a: h.a.lift(m)?,
                b: h.b.lift(m)?,
                c: h.c.lift(m)?,
            });
        }
        Ok(Self::from_halfplanes(m, hs))
    }

    /// Float vertices of a bounded region, or of the region clipped to a box.
    pub fn polygon_f64(&self, window: Option<(f64, f64, f64, f64)>) -> Vec<(f64, f64)> {
        if self.empty {
            return Vec::new();
        }
        if self.is_bounded() {
            return self.vertices().iter().map(|p| p.to_f64()).collect();
        }
        let (x0, x1, y0, y1) = window.unwrap_or((-1e6, 1e6, -1e6, 1e6));
        // Sutherland–Hodgman on floats; rendering only
        let mut poly = vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)];
        for e in &self.edges {
            let (a, b, c) = e.hp.to_f64();
            let f = |p: (f64, f64)| a * p.0 + b * p.1 + c;
            let mut out = Vec::new();
            for i in 0..poly.len() {
                let p = poly[i];
                let q = poly[(i + 1) % poly.len()];
                let (fp, fq) = (f(p), f(q));
                if fp >= 0.0 {
                    out.push(p);
                }
                if (fp >= 0.0) != (fq >= 0.0) {
                    let t = fp / (fp - fq);
                    out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
                }
            }
            poly = out;
            if poly.is_empty() {
                break;
            }
        }
        poly
    }
}

impl fmt::Debug for ConvexRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "∅");
        }
        if self.is_bounded() {
            write!(f, "Polygon{:?}", self.vertices())
        } else {
            write!(f, "Region{:?}", self.halfplanes())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RegionRepr {
    order: u32,
    #[serde(default)]
    empty: bool,
    halfplanes: Vec<[Real; 3]>,
}

impl Serialize for ConvexRegion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RegionRepr {
            order: self.n,
            empty: self.empty,
            halfplanes: self
                .edges
                .iter()
                .map(|e| [e.hp.a.clone(), e.hp.b.clone(), e.hp.c.clone()])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexRegion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RegionRepr::deserialize(d)?;
        if r.empty {
            return Ok(ConvexRegion::empty(r.order));
        }
        let mut hs = Vec::new();
        for [a, b, c] in r.halfplanes {
            if a.order() != r.order || b.order() != r.order || c.order() != r.order {
                return Err(serde::de::Error::custom(
                    "constraint outside the region's field",
                ));
            }
            hs.push(
                HalfPlane::new(a, b, c).ok_or_else(|| serde::de::Error::custom("zero normal"))?,
            );
        }
        Ok(ConvexRegion::from_halfplanes(r.order, hs))
    }
}
