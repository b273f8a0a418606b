//! Words, substitutions, substitutive languages and cells of codings.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{PiecewiseMap, Symbol, Word};
use crate::geometry::{ConvexRegion, Isometry, RegionSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("invalid angle {0}/{1}")]
    InvalidAngle(i64, i64),
    #[error("bad word syntax: {0}")]
    Parse(String),
    #[error("substitution image of {0:?} is empty")]
    EmptyImage(String),
}

/// Parses a word over single-character letters, accepting `X^3`, `X^{12}`
/// and superscript exponents (`X³`).
pub fn parse_word(alphabet: &[String], s: &str) -> Result<Word, SymbolicError> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let letter = alphabet
            .iter()
            .position(|a| a.chars().eq(std::iter::once(c)))
            .ok_or_else(|| SymbolicError::UnknownLetter(c.to_string()))?
            as Symbol;
        i += 1;
        let mut exp = String::new();
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            // one digit, or several in braces, since letters may be digits
            if i < chars.len() && chars[i] == '{' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    exp.push(chars[i]);
                    i += 1;
                }
                if i >= chars.len() || chars[i] != '}' {
                    return Err(SymbolicError::Parse(s.to_string()));
                }
                i += 1;
            } else if i < chars.len() && chars[i].is_ascii_digit() {
                exp.push(chars[i]);
                i += 1;
            }
            if exp.is_empty() {
                return Err(SymbolicError::Parse(s.to_string()));
            }
        } else {
            while i < chars.len() {
                match superscript_digit(chars[i]) {
                    Some(d) => {
                        exp.push(d);
                        i += 1;
                    }
                    None => break,
                }
            }
        }
        let k: usize = if exp.is_empty() {
            1
        } else {
            exp.parse()
                .map_err(|_| SymbolicError::Parse(s.to_string()))?
        };
        out.extend(std::iter::repeat_n(letter, k));
    }
    Ok(out)
}

fn superscript_digit(c: char) -> Option<char> {
    let sup = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    sup.iter()
        .position(|&s| s == c)
        .map(|d| char::from(b'0' + d as u8))
}

pub fn word_string(alphabet: &[String], w: &[Symbol]) -> String {
    w.iter().map(|&s| alphabet[s as usize].as_str()).collect()
}

/// Run-length form with caret exponents, e.g. `01^30^2`.
pub fn exponent_form(alphabet: &[String], w: &[Symbol]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        out.push_str(&alphabet[w[i] as usize]);
        if j - i > 9 {
            out.push_str(&format!("^{{{}}}", j - i));
        } else if j - i > 1 {
            out.push('^');
            out.push_str(&(j - i).to_string());
        }
        i = j;
    }
    out
}

pub fn binary_alphabet() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

/// `A`, `B`, … for induced maps.
pub fn letter_alphabet(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                char::from(b'A' + i as u8).to_string()
            } else {
                format!("X{i}")
            }
        })
        .collect()
}

/// Smallest p such that w is a power of its prefix of length p.
pub fn primitive_period(w: &[Symbol]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]))
        .unwrap_or(0)
}

pub fn cyclic_eq(a: &[Symbol], b: &[Symbol]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|k| (0..a.len()).all(|i| a[(i + k) % a.len()] == b[i]))
}

/// Equality of the periodic words a^ω and b^ω up to shift.
pub fn periodic_eq(a: &[Symbol], b: &[Symbol]) -> bool {
    let pa = primitive_period(a);
    let pb = primitive_period(b);
    cyclic_eq(&a[..pa], &b[..pb])
}

/// Smallest shift p ≤ max_p with w[i] = w[i + p] for all valid i.
pub fn smallest_period(w: &[Symbol], max_p: usize) -> Option<usize> {
    (1..=max_p.min(w.len().saturating_sub(1))).find(|&p| (p..w.len()).all(|i| w[i] == w[i - p]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub alphabet: Vec<String>,
    pub images: Vec<Word>,
}

impl Substitution {
    pub fn new(alphabet: Vec<String>, images: Vec<Word>) -> Result<Self, SymbolicError> {
        let k = alphabet.len();
        for (i, im) in images.iter().enumerate() {
            if im.is_empty() {
                return Err(SymbolicError::EmptyImage(alphabet[i].clone()));
            }
            if let Some(&bad) = im.iter().find(|&&s| s as usize >= k) {
                return Err(SymbolicError::UnknownLetter(bad.to_string()));
            }
        }
        Ok(Substitution { alphabet, images })
    }

    /// Builds from image strings listed in alphabet order.
    pub fn from_strs(alphabet: &[String], images: &[&str]) -> Result<Self, SymbolicError> {
        let ims = images
            .iter()
            .map(|s| parse_word(alphabet, s))
            .collect::<Result<Vec<_>, _>>()?;
        Substitution::new(alphabet.to_vec(), ims)
    }

    /// Builds from a letter → image map (the JSON file form).
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, SymbolicError> {
        let alphabet: Vec<String> = map.keys().cloned().collect();
        let ims: Vec<&str> = map.values().map(|s| s.as_str()).collect();
        Substitution::from_strs(&alphabet, &ims)
    }

    pub fn apply(&self, w: &[Symbol]) -> Result<Word, SymbolicError> {
        let mut out = Vec::new();
        for &s in w {
            let im = self
                .images
                .get(s as usize)
                .ok_or_else(|| SymbolicError::UnknownLetter(s.to_string()))?;
            out.extend_from_slice(im);
        }
        Ok(out)
    }

    pub fn apply_n(&self, w: &[Symbol], n: usize) -> Result<Word, SymbolicError> {
        let mut cur = w.to_vec();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    pub fn image_strings(&self) -> Vec<String> {
        self.images
            .iter()
            .map(|w| word_string(&self.alphabet, w))
            .collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.alphabet
            .iter()
            .cloned()
            .zip(self.image_strings())
            .collect()
    }

    /// Two-row array: letters over images.
    pub fn table(&self) -> String {
        let ims: Vec<String> = self
            .images
            .iter()
            .map(|w| exponent_form(&self.alphabet, w))
            .collect();
        let widths: Vec<usize> = self
            .alphabet
            .iter()
            .zip(&ims)
            .map(|(a, b)| a.chars().count().max(b.chars().count()))
            .collect();
        let row = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        let top = row(&self.alphabet);
        let bottom = row(&ims);
        let rule = "-".repeat(top.chars().count().max(bottom.chars().count()));
        format!("{}\n{}\n{}\n", top.trim_end(), rule, bottom.trim_end())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub substitution: Substitution,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionGraph {
    pub alphabet: Vec<String>,
    /// Seed words attached to each vertex.
    pub seeds: Vec<Vec<Word>>,
    pub edges: Vec<GraphEdge>,
}

/// JSON form: `{"alphabet": "ABC", "vertices": [["B","DCB"]],
/// "edges": [{"from": 0, "to": 0, "images": {"A": "A", ...}}]}`.
#[derive(Deserialize)]
struct GraphFile {
    alphabet: String,
    vertices: Vec<Vec<String>>,
    edges: Vec<EdgeFile>,
}

#[derive(Deserialize)]
struct EdgeFile {
    from: usize,
    to: usize,
    images: BTreeMap<String, String>,
}

impl SubstitutionGraph {
    /// The one-vertex graph with a single loop.
    pub fn single_loop(s: Substitution, seeds: Vec<Word>) -> Self {
        SubstitutionGraph {
            alphabet: s.alphabet.clone(),
            seeds: vec![seeds],
            edges: vec![GraphEdge {
                from: 0,
                to: 0,
                substitution: s,
            }],
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SymbolicError> {
        let f: GraphFile =
            serde_json::from_str(text).map_err(|e| SymbolicError::Parse(e.to_string()))?;
        let alphabet: Vec<String> = f.alphabet.chars().map(|c| c.to_string()).collect();
        let seeds = f
            .vertices
            .iter()
            .map(|v| v.iter().map(|s| parse_word(&alphabet, s)).collect())
            .collect::<Result<Vec<Vec<Word>>, _>>()?;
        let nv = seeds.len();
        let mut edges = Vec::new();
        for e in f.edges {
            if e.from >= nv || e.to >= nv {
                return Err(SymbolicError::Parse(format!(
                    "edge {} -> {} names a missing vertex",
                    e.from, e.to
                )));
            }
            let mut images = Vec::new();
            for a in &alphabet {
                let im = e
                    .images
                    .get(a)
                    .ok_or_else(|| SymbolicError::UnknownLetter(a.clone()))?;
                images.push(parse_word(&alphabet, im)?);
            }
            edges.push(GraphEdge {
                from: e.from,
                to: e.to,
                substitution: Substitution::new(alphabet.clone(), images)?,
            });
        }
        Ok(SubstitutionGraph {
            alphabet,
            seeds,
            edges,
        })
    }

    /// Words attached to all paths with at most `depth` edges.
    pub fn path_words(&self, depth: usize) -> BTreeSet<Word> {
        let mut cur: Vec<BTreeSet<Word>> = self
            .seeds
            .iter()
            .map(|s| s.iter().cloned().collect())
            .collect();
        for _ in 0..depth {
            let mut next = cur.clone();
            for e in &self.edges {
                for w in &cur[e.from] {
                    next[e.to].insert(e.substitution.apply(w).expect("validated alphabet"));
                }
            }
            if next == cur {
                break;
            }
            cur = next;
        }
        cur.into_iter().flatten().collect()
    }
}

/// Factors of length 1..=n of z^ω, inserted into `out`.
pub fn periodic_factors(z: &[Symbol], n: usize, out: &mut BTreeSet<Word>) {
    if z.is_empty() {
        return;
    }
    let p = primitive_period(z);
    let z = &z[..p];
    for start in 0..p {
        let mut f = Vec::with_capacity(n);
        for k in 0..n {
            f.push(z[(start + k) % p]);
            out.insert(f.clone());
        }
    }
}

/// Factors of length ≤ n of the periodic words z^ω, z attached to a path
/// of at most `depth` edges.
pub fn graph_language(g: &SubstitutionGraph, n: usize, depth: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for z in g.path_words(depth) {
        periodic_factors(&z, n, &mut out);
    }
    out
}

/// Factors of length ≤ n of the finite word w.
pub fn finite_factors(w: &[Symbol], n: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for i in 0..w.len() {
        for j in i + 1..=(i + n).min(w.len()) {
            out.insert(w[i..j].to_vec());
        }
    }
    out
}

/// The θ = 1/3 periods {AⁿBⁿC, Aⁿ⁺¹BⁿC, Bⁿ⁺¹AⁿC} for n ≤ bound, over A=0,
/// B=1, C=2. Entries with an empty word part are skipped.
pub fn third_turn_family(bound: usize) -> Vec<Word> {
    let mk = |a: usize, x: Symbol, b: usize, y: Symbol| {
        let mut w = vec![x; a];
        w.extend(std::iter::repeat_n(y, b));
        w.push(2);
        w
    };
    let mut out = Vec::new();
    for n in 0..=bound {
        for w in [mk(n, 0, n, 1), mk(n + 1, 0, n, 1), mk(n + 1, 1, n, 0)] {
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// Points whose coding starts with w. With one domain per symbol this is a
/// single convex region; symbols with several domains can split it.
pub fn cell_of_prefix(m: &PiecewiseMap, w: &[Symbol]) -> RegionSet {
    let mut cur: Vec<(ConvexRegion, Isometry)> = match &m.support {
        _ if w.is_empty() => {
            return m
                .support
                .clone()
                .unwrap_or_else(|| RegionSet::single(ConvexRegion::plane(m.order)))
        }
        _ => vec![(ConvexRegion::plane(m.order), Isometry::identity(m.order))],
    };
    // Track the image g(R) of the cell so each clip is against a branch
    // domain directly.
    for &s in w {
        let mut next = Vec::new();
        for (img, g) in &cur {
            for b in m.branches.iter().filter(|b| b.symbol == s) {
                let part = img.intersect(&b.domain);
                if !part.is_empty() {
                    next.push((part.transform(&b.map), b.map.compose(g)));
                }
            }
        }
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    RegionSet::new(
        cur.into_iter()
            .map(|(img, g)| img.transform(&g.inverse()))
            .collect(),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicCellReport {
    pub period_word: Word,
    /// Points coded by the periodic word.
    pub cell: RegionSet,
    /// Smallest r with (g_w)^r = id, when it exists.
    pub rotation_order: Option<u32>,
    /// Point period r·|w| when periodic.
    pub point_period: Option<usize>,
    pub periodic: bool,
    /// Vertex count when the cell is a single bounded polygon.
    pub vertices: Option<usize>,
}

/// The cell of w^ω. The composed isometry g_w is a rotation of finite order
/// r or a translation; in the first case the cell is the set of points coded
/// by w^r, on which g_w^r is the identity.
pub fn periodic_cell(m: &PiecewiseMap, w: &[Symbol]) -> PeriodicCellReport {
    let g = m.compose_word(w).ok();
    let r = g.as_ref().and_then(|g| {
        if g.is_identity() {
            Some(1)
        } else if g.is_translation() {
            None
        } else {
            g.rotation_order()
        }
    });
    let (cell, periodic) = match r {
        Some(r) if !w.is_empty() => {
            let ww: Word = w.repeat(r as usize);
            let cell = cell_of_prefix(m, &ww);
            let ok = !cell.is_empty();
            (cell, ok)
        }
        _ => (RegionSet::default(), false),
    };
    let vertices = if cell.len() == 1 && cell.pieces[0].is_bounded() {
        Some(cell.pieces[0].vertices().len())
    } else {
        None
    };
    PeriodicCellReport {
        period_word: w.to_vec(),
        point_period: if periodic {
            r.map(|r| r as usize * w.len())
        } else {
            None
        },
        rotation_order: r,
        periodic,
        vertices,
        cell,
    }
}

/// Concatenation of return words: the morphism back to the parent alphabet.
pub fn project_word(return_words: &[Word], w: &[Symbol]) -> Result<Word, SymbolicError> {
    let mut out = Vec::new();
    for &s in w {
        out.extend_from_slice(
            return_words
                .get(s as usize)
                .ok_or_else(|| SymbolicError::UnknownLetter(s.to_string()))?,
        );
    }
    Ok(out)
}

/// One period of each coding of the rotation by 2πp/q about the origin.
pub fn rotation_words(p: u32, q: u32) -> Result<Vec<Word>, SymbolicError> {
    if p == 0 || p >= q || p.gcd(&q) != 1 {
        return Err(SymbolicError::InvalidAngle(p as i64, q as i64));
    }
    let k = (q / 2) as usize;
    let block = |a: usize, b: usize| {
        let mut w = vec![0; a];
        w.extend(std::iter::repeat_n(1, b));
        w
    };
    let base = if q.is_multiple_of(2) {
        vec![block(k, k)]
    } else {
        vec![block(k, k + 1), block(k + 1, k)]
    };
    let q = q as usize;
    let mut out: Vec<Word> = Vec::new();
    for u in base {
        let w: Word = (0..q).map(|i| u[(i * p as usize) % q]).collect();
        if !out.iter().any(|v| cyclic_eq(v, &w)) {
            out.push(w);
        }
    }
    Ok(out)
}

/// p_k/q_k = (p₀ + k c)/(q₀ + k d) reduced, where p₀/q₀ is the largest
/// fraction below c/d with denominator smaller than d.
pub fn approx_sequence(c: u64, d: u64, k: u64) -> (u64, u64) {
    let mut best = (0u64, 1u64);
    for b in 1..d.max(2) {
        // largest a with a/b < c/d
        let a = (c * b).div_ceil(d).saturating_sub(1);
        if a * best.1 > best.0 * b {
            best = (a, b);
        }
    }
    let g = best.0.gcd(&best.1);
    let (p0, q0) = (best.0 / g, best.1 / g);
    let (p, q) = (p0 + k * c, q0 + k * d);
    let g = p.gcd(&q);
    (p / g, q / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_map, Variant};
    use crate::geometry::{Location, Point};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn abc(n: usize) -> Vec<String> {
        letter_alphabet(n)
    }

    fn sigma6() -> Substitution {
        Substitution::from_strs(&abc(5), &["A", "AB", "AC", "ACB", "ACCBB"]).unwrap()
    }

    #[test]
    fn word_syntax() {
        let b = binary_alphabet();
        assert_eq!(parse_word(&b, "01^30^2").unwrap(), vec![0, 1, 1, 1, 0, 0]);
        assert_eq!(parse_word(&b, "01³0²").unwrap(), vec![0, 1, 1, 1, 0, 0]);
        assert_eq!(exponent_form(&b, &[0, 1, 1, 1, 0, 0]), "01^30^2");
        assert!(parse_word(&b, "012").is_err());
        assert_eq!(parse_word(&b, "1^{12}").unwrap(), vec![1; 12]);
        assert_eq!(exponent_form(&b, &[1; 12]), "1^{12}");
        let a = abc(10);
        let w = parse_word(&a, "E^2JIH^2FGF").unwrap();
        assert_eq!(word_string(&a, &w), "EEJIHHFGF");
    }

    #[test]
    fn substitution_images() {
        let s = sigma6();
        let e = parse_word(&s.alphabet, "E").unwrap();
        assert_eq!(word_string(&s.alphabet, &s.apply(&e).unwrap()), "ACCBB");
        assert!(s.apply(&[]).unwrap().is_empty());
        let s4 = Substitution::from_strs(&abc(4), &["DBC", "DB", "DC", "D"]).unwrap();
        assert_eq!(s4.apply_n(&[3], 7).unwrap(), vec![3]);
        assert_eq!(s.apply(&[7]), Err(SymbolicError::UnknownLetter("7".into())));
        assert!(Substitution::from_strs(&abc(2), &["A", ""]).is_err());
        let t = s4.table();
        assert!(t.starts_with("A   | B  | C  | D"));
        assert!(t.ends_with("DBC | DB | DC | D\n"));
    }

    #[test]
    fn sixth_turn_language() {
        let a = abc(5);
        let seeds = ["E", "B", "C", "D", "DCB"]
            .iter()
            .map(|s| parse_word(&a, s).unwrap())
            .collect();
        let g = SubstitutionGraph::single_loop(sigma6(), seeds);
        let l0 = graph_language(&g, 3, 0);
        for f in ["DCB", "CBD", "BDC", "EEE", "BB"] {
            assert!(l0.contains(&parse_word(&a, f).unwrap()), "{f}");
        }
        assert!(!l0.contains(&parse_word(&a, "ACB").unwrap()));
        let l1 = graph_language(&g, 3, 1);
        assert!(l1.contains(&parse_word(&a, "ACB").unwrap()));
        assert!(l1.is_superset(&l0));
        // σ₆(DCB) = ACB·AC·AB
        assert_eq!(
            word_string(
                &a,
                &sigma6().apply(&parse_word(&a, "DCB").unwrap()).unwrap()
            ),
            "ACBACAB"
        );
    }

    #[test]
    fn graph_from_json() {
        let text = r#"{"alphabet": "ABCDE", "vertices": [["E","B","C","D","DCB"]],
            "edges": [{"from": 0, "to": 0, "images":
                {"A":"A","B":"AB","C":"AC","D":"ACB","E":"ACCBB"}}]}"#;
        let g = SubstitutionGraph::from_json(text).unwrap();
        assert_eq!(g.edges[0].substitution, sigma6());
        assert!(SubstitutionGraph::from_json(
            r#"{"alphabet":"A","vertices":[["A"]],
            "edges":[{"from":0,"to":3,"images":{"A":"A"}}]}"#
        )
        .is_err());
    }

    #[test]
    fn third_turn_words() {
        let a = abc(3);
        let fam: Vec<String> = third_turn_family(2)
            .iter()
            .map(|w| word_string(&a, w))
            .collect();
        assert_eq!(
            fam,
            ["C", "AC", "BC", "ABC", "AABC", "BBAC", "AABBC", "AAABBC", "BBBAAC"]
        );
    }

    #[test]
    fn cells_of_prefixes() {
        let m = build_map(
            1,
            6,
            &Variant::Bijective {
                sigma: BigRational::from_integer(BigInt::from(0)),
            },
        )
        .unwrap();
        assert!(cell_of_prefix(&m, &[]).equals(&RegionSet::single(ConvexRegion::plane(12))));
        assert!(cell_of_prefix(&m, &[0]).equals(&RegionSet::single(ConvexRegion::upper_half(12))));
        let hex = cell_of_prefix(&m, &[0; 6]);
        assert_eq!(hex.len(), 1);
        assert_eq!(hex.pieces[0].vertices().len(), 6);
        assert!(hex.equals(&cell_of_prefix(&m, &[0; 9])));
        let z0 = Point::from_complex(&m.centers()[0]).unwrap();
        assert_eq!(hex.pieces[0].contains(&z0), Location::Interior);
        let rep = periodic_cell(&m, &[0]);
        assert!(rep.periodic);
        assert_eq!(rep.rotation_order, Some(6));
        assert_eq!(rep.vertices, Some(6));
        // 0¹ composes to a translation-free rotation; 01 over the symmetric
        // map composes to a translation, so no cell
        let t = periodic_cell(&m, &[0, 1]);
        assert!(!t.periodic);
    }

    #[test]
    fn projections_and_rotation_words() {
        let b = binary_alphabet();
        let rw = vec![
            parse_word(&b, "01^30^2").unwrap(),
            parse_word(&b, "01^30^3").unwrap(),
        ];
        assert_eq!(
            project_word(&rw, &[1]).unwrap(),
            parse_word(&b, "01^30^3").unwrap()
        );
        assert!(project_word(&rw, &[]).unwrap().is_empty());
        assert!(project_word(&rw, &[2]).is_err());
        let w6 = rotation_words(1, 6).unwrap();
        assert_eq!(w6, vec![parse_word(&b, "000111").unwrap()]);
        let w5 = rotation_words(1, 5).unwrap();
        assert_eq!(
            w5,
            vec![
                parse_word(&b, "00111").unwrap(),
                parse_word(&b, "00011").unwrap()
            ]
        );
        assert!(rotation_words(2, 4).is_err());
        assert!(periodic_eq(
            &parse_word(&b, "000111000111").unwrap(),
            &parse_word(&b, "011100").unwrap()
        ));
        assert!(!periodic_eq(
            &parse_word(&b, "0011").unwrap(),
            &parse_word(&b, "0101").unwrap()
        ));
    }

    /// Codes the pure rotation by 2πp/q in floating point.
    fn rotation_oracle(p: u32, q: u32, phase: f64) -> Word {
        (0..q)
            .map(|n| {
                let a = phase + 2.0 * std::f64::consts::PI * (n * p) as f64 / q as f64;
                if a.sin() > 0.0 {
                    0
                } else {
                    1
                }
            })
            .collect()
    }

    #[test]
    fn rotation_words_match_oracle() {
        for q in 3..=10u32 {
            for p in 1..q {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let words = rotation_words(p, q).unwrap();
                for i in 0..97 {
                    let phase = 0.013 + i as f64 * 0.0647;
                    let o = rotation_oracle(p, q, phase);
                    assert!(words.iter().any(|w| cyclic_eq(w, &o)), "p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn approximation_sequence() {
        assert_eq!(approx_sequence(1, 4, 0), (0, 1));
        assert_eq!(approx_sequence(1, 4, 1), (1, 5));
        assert_eq!(approx_sequence(1, 4, 2), (2, 9));
        assert_eq!(approx_sequence(1, 6, 0), (0, 1));
        // below 3/8 with denominator < 8 the best is 1/3
        assert_eq!(approx_sequence(3, 8, 0), (1, 3));
        assert_eq!(approx_sequence(3, 8, 1), (4, 11));
    }

    proptest! {
        #[test]
        fn language_is_factor_closed(n in 1usize..8, depth in 0usize..3) {
            let a = abc(5);
            let seeds = ["E", "B", "C", "D", "DCB"].iter().map(|s| parse_word(&a, s).unwrap()).collect();
            let g = SubstitutionGraph::single_loop(sigma6(), seeds);
            let l = graph_language(&g, n, depth);
            for w in &l {
                for f in finite_factors(w, n) {
                    prop_assert!(l.contains(&f));
                }
            }
        }

        #[test]
        fn rotation_word_balance(k in 1u32..12) {
            let w = rotation_words(1, 2 * k).unwrap();
            prop_assert_eq!(w[0].iter().filter(|&&s| s == 0).count(), k as usize);
            for w in rotation_words(1, 2 * k + 1).unwrap() {
                let z = w.iter().filter(|&&s| s == 0).count() as i64;
                prop_assert_eq!((2 * z - w.len() as i64).abs(), 1);
            }
        }

        #[test]
        fn substitution_is_a_morphism(u in proptest::collection::vec(0u16..5, 0..12), v in proptest::collection::vec(0u16..5, 0..12)) {
            let s = sigma6();
            let mut uv = u.clone();
            uv.extend(&v);
            let mut su = s.apply(&u).unwrap();
            su.extend(s.apply(&v).unwrap());
            prop_assert_eq!(s.apply(&uv).unwrap(), su);
        }
    }
}
