//! Non-bijective analysis: the uncovered set Σ, forward images, certified
//! invariant sets and their decomposition into periodic tiles.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{MapClass, PiecewiseMap, Word};
use crate::geometry::{Area, ConvexRegion, Isometry, Location, Point, Real, RegionSet};
use crate::symbolic::{cell_of_prefix, periodic_cell, primitive_period};

#[derive(Debug, Clone, Error)]
pub enum AttractorError {
    #[error("the image of the candidate leaves it ({} piece(s) outside)", .0.len())]
    NotInvariant(RegionSet),
    #[error("the candidate meets the forward image of Σ at step {step}")]
    MeetsForward { step: usize, witness: RegionSet },
    #[error("the candidate is unbounded")]
    Unbounded,
}

/// ℝ² ∖ T(ℝ²), or the part of the support missed by the image when the map
/// has a restricted support.
pub fn image_complement(m: &PiecewiseMap) -> RegionSet {
    let target = m
        .support
        .clone()
        .unwrap_or_else(|| RegionSet::single(ConvexRegion::plane(m.order)));
    target.subtract(&RegionSet::new(m.branch_images()))
}

/// Image pieces of a set, split along the branch domains. Pieces may overlap
/// when the map is not injective.
pub fn image_pieces(m: &PiecewiseMap, rs: &RegionSet) -> Vec<ConvexRegion> {
    let mut out = Vec::new();
    for p in rs.iter() {
        for b in &m.branches {
            let part = p.intersect(&b.domain);
            if !part.is_empty() {
                out.push(part.transform(&b.map));
            }
        }
    }
    out
}

/// T(rs) as a set of disjoint pieces.
pub fn image(m: &PiecewiseMap, rs: &RegionSet) -> RegionSet {
    let mut acc = RegionSet::default();
    for p in image_pieces(m, rs) {
        acc = acc.union(&RegionSet::single(p));
    }
    acc
}

/// ⋃_{k≤n} T^k(rs). Each step maps only the part not yet covered.
pub fn forward_regions(m: &PiecewiseMap, rs: &RegionSet, n: usize) -> RegionSet {
    forward_steps(m, rs, n).pop().unwrap_or_default()
}

/// The cumulative unions for k = 0..=n.
pub fn forward_steps(m: &PiecewiseMap, rs: &RegionSet, n: usize) -> Vec<RegionSet> {
    let mut acc = rs.clone();
    let mut frontier = rs.clone();
    let mut out = vec![acc.clone()];
    for _ in 0..n {
        let img = image(m, &frontier);
        frontier = img.subtract(&acc);
        acc = acc.union_disjoint(&frontier);
        out.push(acc.clone());
    }
    out
}

/// Points of `window` whose first `depth` iterates all stay in `window`.
/// Every bounded orbit contained in the window lies in this set.
pub fn stay_set(m: &PiecewiseMap, window: &ConvexRegion, depth: usize) -> RegionSet {
    let n = m.order;
    let mut frags: Vec<(ConvexRegion, Isometry)> = vec![(window.clone(), Isometry::identity(n))];
    for _ in 0..depth {
        let next: Vec<Vec<(ConvexRegion, Isometry)>> = frags
            .par_iter()
            .map(|(img, g)| {
                let mut out = Vec::new();
                for b in &m.branches {
                    let part = img.intersect(&b.domain);
                    if part.is_empty() {
                        continue;
                    }
                    let moved = part.transform(&b.map).intersect(window);
                    if !moved.is_empty() {
                        out.push((moved, b.map.compose(g)));
                    }
                }
                out
            })
            .collect();
        frags = next.into_iter().flatten().collect();
    }
    RegionSet::new(
        frags
            .into_iter()
            .map(|(img, g)| img.transform(&g.inverse()))
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// T(S) ⊆ S exactly.
    Invariant,
    /// T(S) ⊆ S and S misses ⋃_{k≤depth} T^k(Σ).
    InvariantAvoidingSigma { depth: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifiedSet {
    pub set: RegionSet,
    pub certificate: Certificate,
}

/// Checks a declared candidate: it must be bounded and forward invariant,
/// and for a non-surjective map it must also avoid the first `depth` forward
/// images of Σ.
pub fn attractor_candidate(
    m: &PiecewiseMap,
    seed: &RegionSet,
    depth: usize,
) -> Result<CertifiedSet, AttractorError> {
    if seed.iter().any(|p| !p.is_bounded()) {
        return Err(AttractorError::Unbounded);
    }
    let outside = RegionSet::new(image_pieces(m, seed)).subtract(seed);
    if !outside.is_empty() {
        return Err(AttractorError::NotInvariant(outside));
    }
    let certificate = match m.classify() {
        MapClass::NonSurjective(sigma) => {
            let steps = forward_steps(m, &sigma, depth);
            for (k, f) in steps.iter().enumerate() {
                let hit = seed.intersect(f);
                if !hit.is_empty() {
                    return Err(AttractorError::MeetsForward {
                        step: k,
                        witness: hit,
                    });
                }
            }
            Certificate::InvariantAvoidingSigma { depth }
        }
        _ => Certificate::Invariant,
    };
    Ok(CertifiedSet {
        set: seed.clone(),
        certificate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    pub region: ConvexRegion,
    /// One period of the coding, starting at this tile.
    pub word: Word,
    pub orbit: usize,
    /// Least k with T^k(tile) = tile as a set.
    pub period: usize,
    /// Primitive period of the coding.
    pub coding_period: usize,
    /// Least k with T^k = id on the tile.
    pub point_period: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TilingReport {
    pub tiles: Vec<Tile>,
    pub leftover: RegionSet,
    /// Leftover area after each refinement depth 0..=depth.
    pub leftover_by_depth: Vec<Real>,
}

impl TilingReport {
    pub fn periods(&self) -> std::collections::BTreeSet<usize> {
        self.tiles.iter().map(|t| t.period).collect()
    }

    pub fn orbit_count(&self) -> usize {
        self.tiles.iter().map(|t| t.orbit + 1).max().unwrap_or(0)
    }

    pub fn orbit(&self, id: usize) -> impl Iterator<Item = &Tile> {
        self.tiles.iter().filter(move |t| t.orbit == id)
    }

    pub fn tile_area(&self, n: u32) -> Real {
        let mut s = Real::zero(n);
        for t in &self.tiles {
            if let Area::Finite(a) = t.region.area() {
                s = &s + &a;
            }
        }
        s
    }

    pub fn leftover_area(&self, n: u32) -> Real {
        match self.leftover.area() {
            Area::Finite(a) => a.lift(n).unwrap_or(a),
            Area::Infinite => Real::zero(n),
        }
    }
}

/// A piece of the refinement: the points of `cell` share the coding `word`,
/// `img` = g(cell) where g is the composed isometry.
#[derive(Clone)]
struct Fragment {
    img: ConvexRegion,
    g: Isometry,
    word: Word,
}

/// Refines the set by codings of length 1..=depth. For a primitive coding w
/// whose composed isometry g has finite order r, the points coded by w^ω
/// form the convex cell P = ⋂_{j<r} g^j(C_w), C_w being the cell of the
/// prefix w; each declared piece contributes P ∩ piece as a tile when
/// |w| ≤ max_period. The leftover is what no tile covers.
pub fn verify_tiling(
    m: &PiecewiseMap,
    attractor: &RegionSet,
    max_period: usize,
    depth: usize,
) -> TilingReport {
    let n = m.order;
    let mut frags: Vec<Fragment> = attractor
        .iter()
        .map(|p| Fragment {
            img: p.clone(),
            g: Isometry::identity(n),
            word: Vec::new(),
        })
        .collect();
    let total = area_of(attractor.iter(), n);
    let mut tiles: Vec<(ConvexRegion, Word)> = Vec::new();
    let mut covered = Real::zero(n);
    let mut leftover_by_depth = vec![total.clone()];
    let mut cores: BTreeMap<Word, Option<ConvexRegion>> = BTreeMap::new();
    for k in 1..=depth {
        let next: Vec<Vec<Fragment>> = frags
            .par_iter()
            .map(|f| {
                let mut out = Vec::new();
                for b in &m.branches {
                    let part = f.img.intersect(&b.domain);
                    if part.is_empty() {
                        continue;
                    }
                    let mut word = f.word.clone();
                    word.push(b.symbol);
                    out.push(Fragment {
                        img: part.transform(&b.map),
                        g: b.map.compose(&f.g),
                        word,
                    });
                }
                out
            })
            .collect();
        frags = next.into_iter().flatten().collect();
        if k > max_period {
            leftover_by_depth.push(&total - &covered);
            continue;
        }
        let mut fresh: Vec<Word> = frags
            .iter()
            .filter(|f| !f.g.is_translation() || f.g.is_identity())
            .map(|f| f.word.clone())
            .filter(|w| primitive_period(w) == w.len() && !cores.contains_key(w))
            .collect();
        fresh.sort();
        fresh.dedup();
        let found: Vec<(Word, Option<ConvexRegion>)> = fresh
            .par_iter()
            .map(|w| (w.clone(), periodic_core(m, w)))
            .collect();
        cores.extend(found);
        for f in &frags {
            if f.word.len() != k {
                continue;
            }
            if let Some(Some(core)) = cores.get(&f.word) {
                let tile = core.intersect(&f.img.transform(&f.g.inverse()));
                if !tile.is_empty() {
                    if let Area::Finite(a) = tile.area() {
                        covered = &covered + &a;
                    }
                    tiles.push((tile, f.word.clone()));
                }
            }
        }
        leftover_by_depth.push(&total - &covered);
    }
    let leftover = attractor.subtract(&RegionSet::new(tiles.iter().map(|t| t.0.clone()).collect()));
    // tiles are linked when one is an image of the other along its coding;
    // ids follow (period, least rotation of the word) of each group
    let orbits: Vec<Vec<ConvexRegion>> = tiles.iter().map(|(r, w)| set_orbit(m, r, w)).collect();
    let mut parent: Vec<usize> = (0..tiles.len()).collect();
    fn root(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (i, orb) in orbits.iter().enumerate() {
        for img in orb {
            if let Some(j) = tiles.iter().position(|(r, _)| r == img) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<Tile> = tiles
        .into_iter()
        .zip(orbits)
        .map(|((region, word), orbit)| Tile {
            orbit: 0,
            period: orbit.len(),
            coding_period: primitive_period(&word),
            point_period: word.len() * rotation_order(m, &word),
            region,
            word,
        })
        .collect();
    let groups: Vec<usize> = (0..out.len()).map(|i| root(&mut parent, i)).collect();
    let mut keys: BTreeMap<usize, (usize, Word, usize)> = BTreeMap::new();
    for (i, t) in out.iter().enumerate() {
        let k = (t.period, least_rotation(&t.word), groups[i]);
        keys.entry(groups[i])
            .and_modify(|e| {
                if k < *e {
                    *e = k.clone()
                }
            })
            .or_insert(k);
    }
    let mut ranked: Vec<(usize, Word, usize)> = keys.into_values().collect();
    ranked.sort();
    let rank: BTreeMap<usize, usize> = ranked.iter().enumerate().map(|(i, k)| (k.2, i)).collect();
    for (i, t) in out.iter_mut().enumerate() {
        t.orbit = rank[&groups[i]];
    }
    out.sort_by(|a, b| (a.orbit, &a.word).cmp(&(b.orbit, &b.word)));
    TilingReport {
        tiles: out,
        leftover,
        leftover_by_depth,
    }
}

/// The images of a tile until it returns onto itself, starting with the
/// tile. Along its coding the tile stays in a single branch domain, so its
/// images are single convex regions.
fn set_orbit(
    m: &PiecewiseMap,
    tile: &ConvexRegion,
    word: &[crate::dynamics::Symbol],
) -> Vec<ConvexRegion> {
    let mut out = vec![tile.clone()];
    let mut cur = tile.clone();
    for &s in word.repeat(rotation_order(m, word)).iter() {
        if let Some(g) = m.isometry_of(s) {
            cur = cur.transform(g);
        }
        if cur == *tile {
            break;
        }
        out.push(cur.clone());
    }
    out
}

/// The cell of w^ω over the whole plane, when g_w has finite order.
fn periodic_core(m: &PiecewiseMap, w: &[crate::dynamics::Symbol]) -> Option<ConvexRegion> {
    let g = m.compose_word(w).ok()?;
    let r = if g.is_identity() {
        1
    } else {
        g.rotation_order()?
    };
    let cell = cell_of_prefix(m, w);
    if cell.len() != 1 {
        return None;
    }
    let c = cell.pieces[0].clone();
    let mut per = c.clone();
    let mut h = g.clone();
    for _ in 1..r {
        per = per.intersect(&c.transform(&h));
        h = h.compose(&g);
    }
    (!per.is_empty()).then_some(per)
}

/// Order of the composed isometry of a periodic word (1 for the identity).
fn rotation_order(m: &PiecewiseMap, word: &[crate::dynamics::Symbol]) -> usize {
    match m.compose_word(word) {
        Ok(g) if g.is_identity() => 1,
        Ok(g) => g.rotation_order().unwrap_or(1) as usize,
        Err(_) => 1,
    }
}

fn area_of<'a>(it: impl Iterator<Item = &'a ConvexRegion>, n: u32) -> Real {
    let mut s = Real::zero(n);
    for r in it {
        if let Area::Finite(a) = r.area() {
            s = &s + &a;
        }
    }
    s
}

pub fn least_rotation(w: &[crate::dynamics::Symbol]) -> Word {
    (0..w.len().max(1))
        .map(|i| {
            let mut r = w[i.min(w.len())..].to_vec();
            r.extend_from_slice(&w[..i.min(w.len())]);
            r
        })
        .min()
        .unwrap_or_default()
}

/// The cells of every rotation of a periodic word: the tiles of its orbit.
/// Empty when the word has no periodic cell.
pub fn orbit_cells(m: &PiecewiseMap, w: &[crate::dynamics::Symbol]) -> Vec<ConvexRegion> {
    let rep = periodic_cell(m, w);
    if !rep.periodic {
        return Vec::new();
    }
    let r = rep.rotation_order.unwrap_or(1) as usize;
    let full: Word = w.repeat(r);
    let mut out = Vec::new();
    for i in 0..full.len() {
        let mut rot = full[i..].to_vec();
        rot.extend_from_slice(&full[..i]);
        let cell = cell_of_prefix(m, &rot);
        for p in cell.pieces {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusReport {
    pub cells: usize,
    /// Components of the closed-cell adjacency graph.
    pub components: usize,
    /// Whether the origin lies in the closed union.
    pub origin_covered: bool,
    /// Largest |winding number| of a cycle of the adjacency graph about the
    /// origin.
    pub winding: i64,
}

impl AnnulusReport {
    pub fn connected(&self) -> bool {
        self.components == 1
    }

    pub fn encloses_origin(&self) -> bool {
        !self.origin_covered && self.winding != 0
    }
}

/// Decides whether a union of bounded convex cells is connected and
/// surrounds the origin. Each adjacency edge is realised by the path
/// centre → common point → centre, which stays in the closed union; a
/// cycle of such paths with nonzero winding number (signed crossings of the
/// ray y = 0, x > 0) puts the origin in a bounded complementary component.
pub fn annulus_check(cells: &[ConvexRegion]) -> AnnulusReport {
    let k = cells.len();
    let verts: Vec<Vec<Point>> = cells.iter().map(|c| c.vertices()).collect();
    let centers: Vec<Point> = cells
        .iter()
        .map(|c| c.interior_point().expect("nonempty cell"))
        .collect();
    let n = cells.first().map(|c| c.order()).unwrap_or(4);
    let origin = Point::origin(n);
    let origin_covered = cells.iter().any(|c| {
        c.lift(n)
            .map(|c| c.contains(&origin) != Location::Outside)
            .unwrap_or(false)
    });
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in i + 1..k {
            if let Some(t) = common_point(&cells[i], &verts[i], &cells[j], &verts[j]) {
                let w = crossings(&centers[i], &t) + crossings(&t, &centers[j]);
                adj[i].push((j, w));
                adj[j].push((i, -w));
            }
        }
    }
    // potentials along a BFS forest; a non-tree edge closes a cycle whose
    // winding is pot(u) + w(u,v) - pot(v)
    let mut pot: Vec<Option<i64>> = vec![None; k];
    let mut components = 0;
    let mut winding = 0i64;
    for s in 0..k {
        if pot[s].is_some() {
            continue;
        }
        components += 1;
        pot[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let pu = pot[u].unwrap();
            for &(v, w) in &adj[u] {
                match pot[v] {
                    None => {
                        pot[v] = Some(pu + w);
                        q.push_back(v);
                    }
                    Some(pv) => winding = winding.max((pu + w - pv).abs()),
                }
            }
        }
    }
    AnnulusReport {
        cells: k,
        components,
        origin_covered,
        winding,
    }
}

/// A point in the intersection of two closed convex polygons, if any.
fn common_point(a: &ConvexRegion, va: &[Point], b: &ConvexRegion, vb: &[Point]) -> Option<Point> {
    if let Some(p) = va.iter().find(|p| b.contains(p) != Location::Outside) {
        return Some(p.clone());
    }
    if let Some(p) = vb.iter().find(|p| a.contains(p) != Location::Outside) {
        return Some(p.clone());
    }
    for i in 0..va.len() {
        let (p, p2) = (&va[i], &va[(i + 1) % va.len()]);
        for j in 0..vb.len() {
            let (q, q2) = (&vb[j], &vb[(j + 1) % vb.len()]);
            if let Some(x) = segment_crossing(p, p2, q, q2) {
                return Some(x);
            }
        }
    }
    None
}

fn orient(a: &Point, b: &Point, c: &Point) -> i8 {
    b.sub(a).cross(&c.sub(a)).sign()
}

/// Proper crossing point of two segments.
fn segment_crossing(p: &Point, p2: &Point, q: &Point, q2: &Point) -> Option<Point> {
    let d1 = orient(p, p2, q);
    let d2 = orient(p, p2, q2);
    let d3 = orient(q, q2, p);
    let d4 = orient(q, q2, p2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        let r = p2.sub(p);
        let s = q2.sub(q);
        let t = &q.sub(p).cross(&s) / &r.cross(&s);
        Some(p.add(&r.scale(&t)))
    } else {
        None
    }
}

/// Signed crossings of the segment a→b with the ray y = 0, x > 0, with the
/// half-open rule so that consecutive segments never double count.
fn crossings(a: &Point, b: &Point) -> i64 {
    let o = Point::origin(a.order());
    let ya = a.y.sign();
    let yb = b.y.sign();
    if ya <= 0 && yb > 0 && orient(a, b, &o) > 0 {
        1
    } else if yb <= 0 && ya > 0 && orient(a, b, &o) < 0 {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::AlgebraicComplex;
    use crate::dynamics::{build_map, Variant};
    use crate::geometry::HalfPlane;
    use num_rational::BigRational;

    fn c(n: u32, x: i64, y: i64) -> AlgebraicComplex {
        Point::ints(n, x, y).to_complex()
    }

    fn general(p: u32, q: u32, c0: (i64, i64), c1: (i64, i64)) -> PiecewiseMap {
        let n = crate::dynamics::coordinate_order(q);
        build_map(
            p,
            q,
            &Variant::General {
                c0: c(n, c0.0, c0.1),
                c1: c(n, c1.0, c1.1),
            },
        )
        .unwrap()
    }

    fn square(n: u32, cx: i64, cy: i64, half: (i64, i64)) -> ConvexRegion {
        let h = Real::frac(n, half.0, half.1);
        let (x, y) = (Real::integer(n, cx), Real::integer(n, cy));
        ConvexRegion::rect(&(&x - &h), &(&x + &h), &(&y - &h), &(&y + &h))
    }

    #[test]
    fn sigma_is_the_strip() {
        let m = general(1, 4, (-1, 1), (3, -1));
        let s = image_complement(&m);
        let strip = ConvexRegion::from_halfplanes(
            4,
            vec![HalfPlane::ints(4, 1, 0, 0), HalfPlane::ints(4, -1, 0, 2)],
        );
        assert!(s.equals(&RegionSet::single(strip)));
    }

    #[test]
    fn bijective_map_has_empty_sigma() {
        let m = build_map(
            1,
            6,
            &Variant::Bijective {
                sigma: BigRational::from_integer(0.into()),
            },
        )
        .unwrap();
        assert!(image_complement(&m).is_empty());
        assert!(forward_regions(&m, &RegionSet::default(), 4).is_empty());
    }

    #[test]
    fn fixed_square_is_forward_invariant() {
        let m = general(1, 4, (-1, 1), (3, -1));
        let sq = RegionSet::single(square(4, -1, 1, (1, 1)));
        assert!(forward_regions(&m, &sq, 3).equals(&sq));
        let cert = attractor_candidate(&m, &sq, 5).unwrap();
        assert!(matches!(
            cert.certificate,
            Certificate::InvariantAvoidingSigma { .. }
        ));
    }

    #[test]
    fn forward_regions_grow_monotonically() {
        let m = general(1, 4, (-1, 1), (3, -1));
        let sigma = image_complement(&m);
        let steps = forward_steps(&m, &sigma, 4);
        for w in steps.windows(2) {
            assert!(w[0].subset_of(&w[1]));
        }
    }

    #[test]
    fn non_invariant_candidate_gives_witness() {
        let m = general(1, 4, (-1, 1), (3, -1));
        let r = RegionSet::single(square(4, 1, 3, (1, 2)));
        assert!(matches!(
            attractor_candidate(&m, &r, 2),
            Err(AttractorError::NotInvariant(_))
        ));
    }

    #[test]
    fn tiling_of_fixed_square() {
        let m = general(1, 4, (-1, 1), (3, -1));
        let sq = RegionSet::single(square(4, -1, 1, (1, 1)));
        let rep = verify_tiling(&m, &sq, 4, 4);
        assert_eq!(rep.tiles.len(), 1);
        assert_eq!(rep.tiles[0].period, 1);
        assert_eq!(rep.tiles[0].coding_period, 1);
        assert_eq!(rep.tiles[0].point_period, 4);
        assert!(rep.leftover.is_empty());
    }

    #[test]
    fn ring_of_squares_encloses_origin() {
        let mut cells = Vec::new();
        for (x, y) in [
            (-1, -1),
            (0, -1),
            (1, -1),
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
        ] {
            cells.push(square(4, x, y, (1, 2)));
        }
        let rep = annulus_check(&cells);
        assert!(rep.connected());
        assert!(rep.encloses_origin(), "{rep:?}");
        cells.remove(3);
        let rep = annulus_check(&cells);
        assert!(rep.connected());
        assert!(!rep.encloses_origin());
    }

    #[test]
    fn least_rotation_is_canonical() {
        assert_eq!(least_rotation(&[1, 0, 0, 1]), vec![0, 0, 1, 1]);
        assert_eq!(least_rotation(&[]), Vec::<u16>::new());
    }
}
