use serde::{Deserialize, Serialize};

use super::{Area, ConvexRegion, HalfPlane, Isometry, Location, Point, Real};

/// A finite union of pairwise disjoint open convex regions. Boundaries
/// between pieces are ignored, so operations are exact up to measure zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSet {
    pub pieces: Vec<ConvexRegion>,
}

impl RegionSet {
    pub fn new(pieces: Vec<ConvexRegion>) -> Self {
        RegionSet {
            pieces: pieces.into_iter().filter(|p| !p.is_empty()).collect(),
        }
    }

    pub fn single(r: ConvexRegion) -> Self {
        Self::new(vec![r])
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConvexRegion> {
        self.pieces.iter()
    }

    pub fn clip(&self, h: &HalfPlane) -> Self {
        Self::new(self.pieces.iter().map(|p| p.clip(h)).collect())
    }

    pub fn intersect_region(&self, r: &ConvexRegion) -> Self {
        Self::new(self.pieces.iter().map(|p| p.intersect(r)).collect())
    }

    pub fn intersect(&self, o: &RegionSet) -> Self {
        let mut out = Vec::new();
        for p in &self.pieces {
            for q in &o.pieces {
                let r = p.intersect(q);
                if !r.is_empty() {
                    out.push(r);
                }
            }
        }
        RegionSet { pieces: out }
    }

    pub fn subtract_region(&self, r: &ConvexRegion) -> Self {
        let mut out = Vec::new();
        for p in &self.pieces {
            out.extend(p.subtract(r));
        }
        RegionSet { pieces: out }
    }

    pub fn subtract(&self, o: &RegionSet) -> Self {
        let mut cur = self.clone();
        for r in &o.pieces {
            if cur.is_empty() {
                break;
            }
            cur = cur.subtract_region(r);
        }
        cur
    }

    /// Union of two sets assumed disjoint.
    pub fn union_disjoint(&self, o: &RegionSet) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend(o.pieces.iter().cloned());
        RegionSet { pieces }
    }

    /// Union without the disjointness assumption.
    pub fn union(&self, o: &RegionSet) -> Self {
        self.union_disjoint(&o.subtract(self))
    }

    pub fn transform(&self, g: &Isometry) -> Self {
        RegionSet {
            pieces: self.pieces.iter().map(|p| p.transform(g)).collect(),
        }
    }

    pub fn area(&self) -> Area {
        let n = match self.pieces.first() {
            Some(p) => p.order(),
            None => return Area::Finite(Real::zero(1)),
        };
        let mut s = Real::zero(n);
        for p in &self.pieces {
            match p.area() {
                Area::Finite(a) => s = &s + &a,
                Area::Infinite => return Area::Infinite,
            }
        }
        Area::Finite(s)
    }

    /// Location of a point, treating shared boundaries between pieces as
    /// boundary.
    pub fn contains(&self, p: &Point) -> Location {
        let mut best = Location::Outside;
        for r in &self.pieces {
            match r.contains(p) {
                Location::Interior => return Location::Interior,
                Location::Boundary => best = Location::Boundary,
                Location::Outside => {}
            }
        }
        best
    }

    /// Set equality up to measure zero: both differences are empty.
    pub fn equals(&self, o: &RegionSet) -> bool {
        self.subtract(o).is_empty() && o.subtract(self).is_empty()
    }

    pub fn subset_of(&self, o: &RegionSet) -> bool {
        self.subtract(o).is_empty()
    }
}

impl From<ConvexRegion> for RegionSet {
    fn from(r: ConvexRegion) -> Self {
        RegionSet::single(r)
    }
}
