//! First-return maps, induced maps and renormalization by similarity.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::AlgebraicComplex;
use crate::dynamics::{Branch, PiecewiseMap, Symbol, Word};
use crate::geometry::{ConvexRegion, HalfPlane, Isometry, Point, RegionSet, Similarity};
use crate::symbolic::{exponent_form, letter_alphabet, periodic_cell, Substitution};

pub use crate::symbolic::Substitution as SubstitutionTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InductionError {
    #[error("no rotation center of the map is fixed")]
    NoFixedCenter,
    #[error("the fixed cell does not touch the discontinuity line")]
    NoAxisVertex,
    #[error("the induction base is empty")]
    EmptyBase,
    #[error("{0} region(s) did not return within {1} steps")]
    Unresolved(usize, usize),
    #[error("unknown piece {0:?}")]
    UnknownPiece(String),
}

/// The open cone next to the fixed cell, as built by [`base_cone`].
#[derive(Clone, Debug, Serialize)]
pub struct Cone {
    pub region: ConvexRegion,
    pub vertex: Point,
    /// Symbol of the branch whose center is the fixed point used.
    pub fixed_symbol: Symbol,
    /// The polygon cell of the fixed point.
    pub cell: ConvexRegion,
}

/// Builds the cone bounded by the discontinuity line and by the line of the
/// fixed cell's edge through its extreme vertex on that line.
pub fn base_cone(m: &PiecewiseMap) -> Result<Cone, InductionError> {
    let fixed = m.fixed_centers();
    let (sym, _) = fixed
        .iter()
        .find(|(s, _)| *s == 0)
        .or_else(|| fixed.first())
        .ok_or(InductionError::NoFixedCenter)?
        .clone();
    let g = m.isometry_of(sym).ok_or(InductionError::NoFixedCenter)?;
    let r = g.rotation_order().ok_or(InductionError::NoFixedCenter)? as usize;
    let cell = crate::symbolic::cell_of_prefix(m, &vec![sym; r]);
    let cell = cell
        .pieces
        .first()
        .cloned()
        .ok_or(InductionError::NoFixedCenter)?;
    let verts = cell.vertices();
    let on_axis: Vec<&Point> = verts.iter().filter(|v| v.y.is_zero()).collect();
    // the upper cell extends to the left, the lower one to the right
    let v = if sym == 0 {
        on_axis.iter().min_by(|a, b| a.x.cmp(&b.x))
    } else {
        on_axis.iter().max_by(|a, b| a.x.cmp(&b.x))
    }
    .ok_or(InductionError::NoAxisVertex)?;
    let v = (*v).clone();
    let side = cell
        .halfplanes()
        .into_iter()
        .find(|h| h.sign_at(&v) == 0 && !h.a.is_zero())
        .ok_or(InductionError::NoAxisVertex)?;
    let domain = m
        .domains_of(sym)
        .next()
        .cloned()
        .ok_or(InductionError::NoFixedCenter)?;
    let region = domain.clip(&side.flip());
    Ok(Cone {
        region,
        vertex: v,
        fixed_symbol: sym,
        cell,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReturnPiece {
    pub label: String,
    pub region: ConvexRegion,
    pub word: Word,
    pub map: Isometry,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReturnStructure {
    pub base: RegionSet,
    pub parent_alphabet: Vec<String>,
    pub angle: Option<(u32, u32)>,
    pub pieces: Vec<ReturnPiece>,
    /// Regions (in base coordinates) still travelling at the step cap.
    pub unresolved: Vec<ConvexRegion>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Alignment {
    /// Expected entries with no computed piece carrying that word.
    pub missing: Vec<(String, String)>,
    /// Computed pieces matching no expected entry.
    pub extra: Vec<(String, String)>,
}

impl Alignment {
    pub fn is_exact(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Union of two convex regions when it is convex up to boundary.
pub fn try_merge(a: &ConvexRegion, b: &ConvexRegion) -> Option<ConvexRegion> {
    let mut hs: Vec<HalfPlane> = a
        .halfplanes()
        .into_iter()
        .filter(|h| b.inside_closed(h))
        .collect();
    hs.extend(b.halfplanes().into_iter().filter(|h| a.inside_closed(h)));
    let hull = ConvexRegion::from_halfplanes(a.order(), hs);
    let rest = RegionSet::single(hull.clone())
        .subtract_region(a)
        .subtract_region(b);
    if rest.is_empty() {
        Some(hull)
    } else {
        None
    }
}

fn merge_all(mut parts: Vec<ConvexRegion>) -> Vec<ConvexRegion> {
    loop {
        let mut merged = false;
        'outer: for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if let Some(u) = try_merge(&parts[i], &parts[j]) {
                    parts.swap_remove(j);
                    parts[i] = u;
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return parts;
        }
    }
}

/// Deterministic order for regions sharing a return word.
fn region_key(r: &ConvexRegion) -> (f64, f64) {
    r.interior_point().map(|p| p.to_f64()).unwrap_or((0.0, 0.0))
}

fn cmp_f64_pair(a: (f64, f64), b: (f64, f64)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
}

/// Breadth-first computation of the first return of `m` to `base`.
pub fn first_return(
    m: &PiecewiseMap,
    base: &RegionSet,
    max_steps: usize,
) -> Result<ReturnStructure, InductionError> {
    if base.is_empty() {
        return Err(InductionError::EmptyBase);
    }
    let mut frontier: Vec<(ConvexRegion, Isometry, Word)> = base
        .iter()
        .map(|r| (r.clone(), Isometry::identity(m.order), Vec::new()))
        .collect();
    let mut returned: Vec<(Word, Isometry, ConvexRegion)> = Vec::new();
    for _ in 0..max_steps {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for (img, g, w) in &frontier {
            for b in &m.branches {
                let part = img.intersect(&b.domain);
                if part.is_empty() {
                    continue;
                }
                let img2 = part.transform(&b.map);
                let g2 = b.map.compose(g);
                let mut w2 = w.clone();
                w2.push(b.symbol);
                let back = g2.inverse();
                let mut outside = RegionSet::single(img2.clone());
                for piece in base.iter() {
                    let inside = img2.intersect(piece);
                    if !inside.is_empty() {
                        returned.push((w2.clone(), g2.clone(), inside.transform(&back)));
                        outside = outside.subtract_region(piece);
                    }
                }
                for o in outside.pieces {
                    next.push((o, g2.clone(), w2.clone()));
                }
            }
        }
        frontier = next;
    }
    let unresolved = frontier
        .into_iter()
        .map(|(img, g, _)| img.transform(&g.inverse()))
        .collect();

    returned.sort_by(|a, b| a.0.cmp(&b.0));
    let mut groups: Vec<(Word, Isometry, Vec<ConvexRegion>)> = Vec::new();
    for (w, g, r) in returned {
        match groups.last_mut() {
            Some(last) if last.0 == w => last.2.push(r),
            _ => groups.push((w, g, vec![r])),
        }
    }
    let letters = letter_alphabet(groups.len());
    let mut pieces = Vec::new();
    for ((w, g, parts), letter) in groups.into_iter().zip(letters) {
        let mut parts = merge_all(parts);
        parts.sort_by(|a, b| cmp_f64_pair(region_key(a), region_key(b)));
        let many = parts.len() > 1;
        for (k, r) in parts.into_iter().enumerate() {
            pieces.push(ReturnPiece {
                label: if many {
                    format!("{letter}{}", k + 1)
                } else {
                    letter.clone()
                },
                region: r,
                word: w.clone(),
                map: g.clone(),
            });
        }
    }
    Ok(ReturnStructure {
        base: base.clone(),
        parent_alphabet: m.alphabet.clone(),
        angle: m.angle,
        pieces,
        unresolved,
    })
}

impl ReturnStructure {
    pub fn is_resolved(&self) -> bool {
        self.unresolved.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.pieces.iter().map(|p| p.label.clone()).collect()
    }

    pub fn words(&self) -> Vec<Word> {
        self.pieces.iter().map(|p| p.word.clone()).collect()
    }

    pub fn word_strings(&self) -> Vec<String> {
        self.pieces
            .iter()
            .map(|p| crate::symbolic::word_string(&self.parent_alphabet, &p.word))
            .collect()
    }

    pub fn piece(&self, label: &str) -> Option<&ReturnPiece> {
        self.pieces.iter().find(|p| p.label == label)
    }

    /// Exponent j with rotation part e^{2iπ j/q}, when the angle is known.
    pub fn rotation_power(&self, piece: &ReturnPiece) -> Option<u32> {
        let (_, q) = self.angle?;
        let n = piece.map.order();
        (0..q)
            .find(|&j| AlgebraicComplex::root_of_unity(n, (j * (n / q)) as i64) == *piece.map.rot())
    }

    /// Renames pieces after an expected label → word table. Matched pieces
    /// come first in table order; the rest keep their names.
    pub fn align(&mut self, expected: &[(String, Word)]) -> Alignment {
        let mut report = Alignment::default();
        let mut taken = vec![false; self.pieces.len()];
        let mut order = Vec::new();
        for (label, w) in expected {
            match (0..self.pieces.len()).find(|&i| !taken[i] && self.pieces[i].word == *w) {
                Some(i) => {
                    taken[i] = true;
                    order.push((i, Some(label.clone())));
                }
                None => report.missing.push((
                    label.clone(),
                    crate::symbolic::word_string(&self.parent_alphabet, w),
                )),
            }
        }
        for (i, t) in taken.iter().enumerate() {
            if !t {
                report.extra.push((
                    self.pieces[i].label.clone(),
                    crate::symbolic::word_string(&self.parent_alphabet, &self.pieces[i].word),
                ));
                order.push((i, None));
            }
        }
        let old = std::mem::take(&mut self.pieces);
        let mut slots: Vec<Option<ReturnPiece>> = old.into_iter().map(Some).collect();
        for (i, label) in order {
            let mut p = slots[i].take().expect("each index used once");
            if let Some(l) = label {
                p.label = l;
            }
            self.pieces.push(p);
        }
        report
    }

    /// Aligned text table: label | return word | rotation power | translation.
    pub fn table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .pieces
            .iter()
            .map(|p| {
                let (tx, ty) = p.map.trans().to_f64();
                [
                    p.label.clone(),
                    exponent_form(&self.parent_alphabet, &p.word),
                    self.rotation_power(p)
                        .map(|j| j.to_string())
                        .unwrap_or_else(|| "?".into()),
                    format!("{} ≈ ({tx:.6}, {ty:.6})", p.map.trans()),
                ]
            })
            .collect();
        let head = [
            "label".to_string(),
            "return word".to_string(),
            "rotation".to_string(),
            "translation".to_string(),
        ];
        let mut w = [0usize; 4];
        for r in std::iter::once(&head).chain(rows.iter()) {
            for k in 0..4 {
                w[k] = w[k].max(r[k].chars().count());
            }
        }
        let line = |r: &[String; 4]| {
            let mut s = String::new();
            for k in 0..3 {
                let _ = write!(s, "{:<width$} | ", r[k], width = w[k]);
            }
            s.push_str(&r[3]);
            s.trim_end().to_string()
        };
        let mut out = line(&head);
        out.push('\n');
        out.push_str(&"-".repeat(w[0] + w[1] + w[2] + 9 + w[3]));
        out.push('\n');
        for r in &rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// Packages a resolved return structure as a map on its base.
pub fn induced_map(rs: &ReturnStructure) -> Result<PiecewiseMap, InductionError> {
    if !rs.unresolved.is_empty() {
        return Err(InductionError::Unresolved(rs.unresolved.len(), 0));
    }
    let order = rs.base.iter().next().map(|r| r.order()).unwrap_or(1);
    let branches = rs
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| Branch {
            symbol: i as Symbol,
            domain: p.region.clone(),
            map: p.map.clone(),
        })
        .collect();
    Ok(PiecewiseMap {
        order,
        branches,
        alphabet: rs.labels(),
        angle: rs.angle,
        support: Some(rs.base.clone()),
    })
}

/// The same map restricted to an invariant union of its symbols.
pub fn restrict(m: &PiecewiseMap, symbols: &[Symbol]) -> PiecewiseMap {
    let branches: Vec<Branch> = m
        .branches
        .iter()
        .filter(|b| symbols.contains(&b.symbol))
        .cloned()
        .collect();
    let support = RegionSet::new(branches.iter().map(|b| b.domain.clone()).collect());
    PiecewiseMap {
        order: m.order,
        branches,
        alphabet: m.alphabet.clone(),
        angle: m.angle,
        support: Some(support),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub structure: ReturnStructure,
    /// Present when a verified conjugacy identifies the induced map with the
    /// parent; letters are then the parent's.
    pub substitution: Option<Substitution>,
    pub conjugacy: Option<Similarity>,
}

/// Frame of a region: its boundary vertices and rays.
fn frame(r: &ConvexRegion) -> Option<(Vec<Point>, Vec<Point>)> {
    let b = r.vertices_and_rays().ok()?;
    Some((b.vertices, b.rays))
}

fn complex_of(p: &Point) -> AlgebraicComplex {
    p.to_complex()
}

/// Positive real ratio b/a of two parallel nonzero vectors.
fn positive_ratio(a: &Point, b: &Point) -> Option<AlgebraicComplex> {
    if a.is_zero() || b.is_zero() || !a.cross(b).is_zero() || a.dot(b).sign() <= 0 {
        return None;
    }
    let s = if !a.x.is_zero() {
        &b.x / &a.x
    } else {
        &b.y / &a.y
    };
    Some(s.into_complex())
}

fn scale_candidates(parent: &PiecewiseMap, rs: &ReturnStructure) -> Vec<AlgebraicComplex> {
    let mut out = vec![AlgebraicComplex::one(parent.order)];
    for b in &parent.branches {
        let Some((vb, _)) = frame(&b.domain) else {
            continue;
        };
        if vb.len() < 2 {
            continue;
        }
        let eb = vb[1].sub(&vb[0]);
        for p in &rs.pieces {
            let Some((vp, _)) = frame(&p.region) else {
                continue;
            };
            if vp.len() != vb.len() {
                continue;
            }
            for k in 0..vp.len() {
                let ep = vp[(k + 1) % vp.len()].sub(&vp[k]);
                if let Some(s) = positive_ratio(&eb, &ep) {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

/// Checks h against every parent branch and returns the substitution it
/// induces (parent letter ↦ return word of the matching piece).
fn verify_conjugacy(
    parent: &PiecewiseMap,
    rs: &ReturnStructure,
    h: &Similarity,
) -> Option<Substitution> {
    // matching every branch onto a distinct piece also matches the supports
    let mut images = vec![Vec::new(); parent.alphabet.len()];
    let mut used = vec![false; rs.pieces.len()];
    for b in &parent.branches {
        let img = b.domain.transform_similarity(h);
        let i = rs
            .pieces
            .iter()
            .enumerate()
            .position(|(i, p)| !used[i] && p.region == img)?;
        used[i] = true;
        if h.conjugate(&b.map) != rs.pieces[i].map {
            return None;
        }
        let s = b.symbol as usize;
        if !images[s].is_empty() && images[s] != rs.pieces[i].word {
            return None;
        }
        images[s] = rs.pieces[i].word.clone();
    }
    if used.iter().any(|u| !u) || images.iter().any(|w| w.is_empty()) {
        return None;
    }
    Substitution::new(parent.alphabet.clone(), images).ok()
}

/// Complex ratio b/a of two nonzero vectors.
fn vector_ratio(a: &Point, b: &Point) -> Option<AlgebraicComplex> {
    if a.is_zero() {
        return None;
    }
    Some(&b.to_complex() / &a.to_complex())
}

fn is_positive_real(s: &AlgebraicComplex) -> bool {
    s.im_sign() == 0 && s.re_sign() > 0
}

/// Candidate similarities read off the frames: the parent's domain onto the
/// induction base, and one bounded parent piece onto each induced piece.
fn candidate_similarities(
    parent: &PiecewiseMap,
    rs: &ReturnStructure,
    allow_rotation: bool,
) -> Vec<Similarity> {
    let ok_scale = |s: &AlgebraicComplex| !s.is_zero() && (allow_rotation || is_positive_real(s));
    let mut pairs: Vec<(AlgebraicComplex, AlgebraicComplex)> = Vec::new();
    let mut push = |s: AlgebraicComplex, t: AlgebraicComplex| {
        if !pairs.iter().any(|(a, b)| *a == s && *b == t) {
            pairs.push((s, t));
        }
    };
    let support = parent.domain_set();
    if let (1, 1) = (support.len(), rs.base.len()) {
        if let (Some((vs, rays_s)), Some((vd, rays_d))) =
            (frame(&support.pieces[0]), frame(&rs.base.pieces[0]))
        {
            if vs.len() == vd.len() && rays_s.len() == rays_d.len() && !vs.is_empty() {
                let shifts: Vec<usize> = if rays_s.is_empty() {
                    (0..vs.len()).collect()
                } else {
                    vec![0]
                };
                let mut scales = Vec::new();
                if vs.len() >= 2 {
                    for &k in &shifts {
                        let es = vs[1].sub(&vs[0]);
                        let ed = vd[(k + 1) % vd.len()].sub(&vd[k]);
                        if let Some(s) = vector_ratio(&es, &ed) {
                            scales.push(s);
                        }
                    }
                }
                if !rays_s.is_empty() {
                    if let Some(s) = vector_ratio(&rays_s[0], &rays_d[0]) {
                        // rays fix the direction only; the size comes from
                        // the pieces
                        if s.im_sign() == 0 && s.re_sign() > 0 {
                            scales.extend(scale_candidates(parent, rs));
                        }
                    }
                }
                for s in scales.into_iter().filter(|s| ok_scale(s)) {
                    for &k in &shifts {
                        let t = &complex_of(&vd[k]) - &(&s * &complex_of(&vs[0]));
                        push(s.clone(), t);
                    }
                }
            }
        }
    }
    if let Some(x) = parent.branches.iter().find(|b| b.domain.is_bounded()) {
        let vx = x.domain.vertices();
        if vx.len() >= 2 {
            let ex = vx[1].sub(&vx[0]);
            for p in rs.pieces.iter().filter(|p| p.region.is_bounded()) {
                let vy = p.region.vertices();
                if vy.len() != vx.len() {
                    continue;
                }
                for j in 0..vy.len() {
                    let ey = vy[(j + 1) % vy.len()].sub(&vy[j]);
                    if let Some(s) = vector_ratio(&ex, &ey).filter(|s| ok_scale(s)) {
                        let t = &complex_of(&vy[j]) - &(&s * &complex_of(&vx[0]));
                        push(s, t);
                    }
                }
            }
        }
    }
    pairs
        .into_iter()
        .filter_map(|(s, t)| Similarity::new(s, t).ok())
        .collect()
}

/// Searches similarities z ↦ s z + t carrying the parent's domain onto the
/// induction base and conjugating branch by branch. Only s > 0 is tried
/// unless `allow_rotation` is set.
pub fn find_conjugacy_with(
    parent: &PiecewiseMap,
    rs: &ReturnStructure,
    allow_rotation: bool,
) -> Option<(Similarity, Substitution)> {
    for h in candidate_similarities(parent, rs, allow_rotation) {
        if let Some(sub) = verify_conjugacy(parent, rs, &h) {
            return Some((h, sub));
        }
    }
    None
}

pub fn find_conjugacy(
    parent: &PiecewiseMap,
    rs: &ReturnStructure,
) -> Option<(Similarity, Substitution)> {
    find_conjugacy_with(parent, rs, false)
}

/// Induces `parent` on the domain of `piece` and looks for a renormalizing
/// similarity.
pub fn extract_substitution(
    parent: &PiecewiseMap,
    piece: &str,
    max_steps: usize,
) -> Result<Extraction, InductionError> {
    let sym = parent
        .symbol_by_name(piece)
        .ok_or_else(|| InductionError::UnknownPiece(piece.to_string()))?;
    let base = RegionSet::new(parent.domains_of(sym).cloned().collect());
    let rs = first_return(parent, &base, max_steps)?;
    if !rs.unresolved.is_empty() {
        return Err(InductionError::Unresolved(rs.unresolved.len(), max_steps));
    }
    let found = find_conjugacy(parent, &rs);
    let (conjugacy, substitution) = match found {
        Some((h, s)) => (Some(h), Some(s)),
        None => (None, None),
    };
    Ok(Extraction {
        structure: rs,
        substitution,
        conjugacy,
    })
}

/// Default step cap: 4q per return level, overridden by PWROT_MAX_STEPS.
pub fn default_max_steps(q: u32) -> usize {
    std::env::var("PWROT_MAX_STEPS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(4 * q as usize)
}

/// Images of `region` along the first |w| steps of `w`: the orbit tiles of a
/// cell coded by w.
pub fn prefix_images(m: &PiecewiseMap, region: &ConvexRegion, w: &[Symbol]) -> Vec<ConvexRegion> {
    let mut out = vec![region.clone()];
    let mut cur = region.clone();
    for &s in w.iter().take(w.len().saturating_sub(1)) {
        let g = m.isometry_of(s).expect("symbol of the map");
        cur = cur.transform(g);
        out.push(cur.clone());
    }
    out
}

/// Number of vertices of a nonempty bounded periodic cell of w^ω.
pub fn periodic_cell_vertices(m: &PiecewiseMap, w: &[Symbol]) -> Option<usize> {
    let r = periodic_cell(m, w);
    if r.periodic {
        r.vertices
    } else {
        None
    }
}
