//! End-to-end acceptance suite. Runs every criterion, prints its checks and
//! one PASS/FAIL line per criterion, and exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use pwrot_core::attractor::{
    annulus_check, attractor_candidate, image, image_complement, orbit_cells, stay_set,
    verify_tiling, Certificate,
};
use pwrot_core::cyclotomic::{AlgebraicComplex, RealAlgebraic};
use pwrot_core::dynamics::{build_map, parse_rational, MapClass, PiecewiseMap, Variant, Word};
use pwrot_core::geometry::{ConvexRegion, HalfPlane, Isometry, Point, Real, RegionSet};
use pwrot_core::induction::{
    base_cone, extract_substitution, find_conjugacy_with, first_return, induced_map, prefix_images,
    restrict, ReturnStructure,
};
use pwrot_core::symbolic::{
    binary_alphabet, cell_of_prefix, cyclic_eq, exponent_form, graph_language, parse_word,
    periodic_cell, primitive_period, project_word, smallest_period, word_string, Substitution,
    SubstitutionGraph,
};

// ---- reporting -------------------------------------------------------

#[derive(Default)]
struct Log {
    lines: Vec<String>,
    ok: bool,
}

impl Log {
    fn new() -> Self {
        Log {
            lines: Vec::new(),
            ok: true,
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.lines.push(format!("      {}", s.into()));
    }

    fn check(&mut self, what: &str, ok: bool, detail: impl Into<String>) -> bool {
        let d = detail.into();
        let tag = if ok { "ok  " } else { "FAIL" };
        if d.is_empty() {
            self.lines.push(format!("  [{tag}] {what}"));
        } else {
            self.lines.push(format!("  [{tag}] {what}: {d}"));
        }
        self.ok &= ok;
        ok
    }
}

type Criterion = fn(&mut Log);

fn main() {
    let criteria: [(u32, &str, u64, Criterion); 11] = [
        (1, "θ=1/6 cone return table", 10, c1),
        (2, "θ=1/6 substitution and cell shapes", 30, c2),
        (3, "θ=1/4 substitution, projections, window area", 60, c3),
        (4, "θ=1/3 periodic family", 60, c4),
        (
            5,
            "θ=1/8 table, substitution, invariant decomposition",
            600,
            c5,
        ),
        (6, "non-symmetric θ=1/4 regimes", 60, c6),
        (7, "non-symmetric θ=1/8 annulus", 300, c7),
        (8, "non-injective π/2 tiling", 60, c8),
        (9, "non-injective π/4 hull and shifted octagon", 300, c9),
        (10, "non-surjective π/2 compact sets", 60, c10),
        (11, "property suites", 300, c11),
    ];
    let only: Option<BTreeSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    // panics become FAIL lines; keep the report readable
    std::panic::set_hook(Box::new(|_| {}));
    let mut summary = Vec::new();
    for (id, name, limit, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        println!("criterion {id}: {name}");
        let mut log = Log::new();
        let t0 = Instant::now();
        let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut log)));
        let dt = t0.elapsed();
        if let Err(e) = res {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            log.check("ran to completion", false, format!("panicked: {msg}"));
        }
        log.check(
            "runtime",
            dt <= Duration::from_secs(limit),
            format!("{:.2}s (limit {limit}s)", dt.as_secs_f64()),
        );
        for l in &log.lines {
            println!("{l}");
        }
        let verdict = if log.ok { "PASS" } else { "FAIL" };
        summary.push(format!(
            "criterion {id:>2}: {verdict}  {name} ({:.1}s)",
            dt.as_secs_f64()
        ));
        println!();
    }
    println!("acceptance summary");
    for s in &summary {
        println!("{s}");
    }
    if summary.iter().any(|s| s.contains(": FAIL")) {
        std::process::exit(1);
    }
}

// ---- shared helpers --------------------------------------------------

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn bij(q_: u32, sigma: &str) -> PiecewiseMap {
    build_map(1, q_, &Variant::Bijective { sigma: q(sigma) }).unwrap()
}

fn centers(q_: u32, c0: (i64, i64), c1: (i64, i64)) -> PiecewiseMap {
    let n = pwrot_core::dynamics::coordinate_order(q_);
    build_map(
        1,
        q_,
        &Variant::General {
            c0: Point::ints(n, c0.0, c0.1).to_complex(),
            c1: Point::ints(n, c1.0, c1.1).to_complex(),
        },
    )
    .unwrap()
}

fn table(rows: &[(&str, &str)]) -> Vec<(String, Word)> {
    let b = binary_alphabet();
    rows.iter()
        .map(|(l, w)| (l.to_string(), parse_word(&b, w).unwrap()))
        .collect()
}

fn cone_return(m: &PiecewiseMap, steps: usize) -> (ConvexRegion, ReturnStructure) {
    let c = base_cone(m).unwrap();
    let rs = first_return(m, &RegionSet::single(c.region.clone()), steps).unwrap();
    (c.region, rs)
}

fn exp_table(rs: &ReturnStructure) -> String {
    let b = binary_alphabet();
    rs.pieces
        .iter()
        .map(|p| format!("{}={}", p.label, exponent_form(&b, &p.word)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn sub_string(s: &Substitution) -> String {
    s.to_map()
        .iter()
        .map(|(k, v)| format!("{k}→{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn expect_sub(rows: &[(&str, &str)]) -> BTreeMap<String, String> {
    rows.iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn rect(n: u32, x0: i64, x1: i64, y0: i64, y1: i64) -> ConvexRegion {
    let r = |v| Real::integer(n, v);
    ConvexRegion::rect(&r(x0), &r(x1), &r(y0), &r(y1))
}

fn squared_sides(r: &ConvexRegion) -> Vec<Real> {
    let v = r.vertices();
    (0..v.len())
        .map(|i| {
            let e = v[(i + 1) % v.len()].sub(&v[i]);
            e.dot(&e)
        })
        .collect()
}

fn area(rs: &RegionSet) -> Real {
    rs.area().finite().cloned().expect("bounded set")
}

fn f(r: &Real) -> String {
    format!("{:.4}", r.to_f64())
}

/// Float iteration of z ↦ ζ(z + σ ± 1): the oracle for the bijective maps.
fn float_step(q_: u32, sigma: f64, (x, y): (f64, f64)) -> Option<(u16, (f64, f64))> {
    if y.abs() < 1e-9 {
        return None;
    }
    let t = 2.0 * std::f64::consts::PI / q_ as f64;
    let (s, shift) = if y > 0.0 {
        (0, sigma + 1.0)
    } else {
        (1, sigma - 1.0)
    };
    let xs = x + shift;
    Some((s, (t.cos() * xs - t.sin() * y, t.sin() * xs + t.cos() * y)))
}

/// Distinct first-return words of float orbits started on a grid inside
/// `region`.
fn float_return_words(q_: u32, sigma: f64, region: &ConvexRegion, extent: f64) -> BTreeSet<Word> {
    let hs: Vec<(f64, f64, f64)> = region.halfplanes().iter().map(|h| h.to_f64()).collect();
    let inside = |(x, y): (f64, f64)| hs.iter().all(|(a, b, c)| a * x + b * y + c > 1e-7);
    let mut out = BTreeSet::new();
    let k = 200;
    for i in 0..k {
        for j in 0..k {
            let p = (
                -extent + 2.0 * extent * (i as f64 + 0.37) / k as f64,
                -extent + 2.0 * extent * (j as f64 + 0.61) / k as f64,
            );
            if !inside(p) {
                continue;
            }
            let mut z = p;
            let mut w = Vec::new();
            for _ in 0..200 {
                match float_step(q_, sigma, z) {
                    Some((s, n)) => {
                        w.push(s);
                        z = n;
                    }
                    None => break,
                }
                if inside(z) {
                    out.insert(w.clone());
                    break;
                }
            }
        }
    }
    out
}

// ---- criteria --------------------------------------------------------

fn c1(log: &mut Log) {
    let m = bij(6, "0");
    let (cone, mut rs) = cone_return(&m, 12);
    log.check("return resolved", rs.is_resolved(), "");
    log.check(
        "five pieces",
        rs.pieces.len() == 5,
        format!("{}", rs.pieces.len()),
    );
    let reference = [
        ("A", "01^30^2"),
        ("B", "01^30^3"),
        ("C", "01^40^2"),
        ("D", "01^40^4"),
        ("E", "01^50^4"),
    ];
    let al = rs.align(&table(&reference));
    log.check(
        "return words equal the reference table",
        al.is_exact(),
        format!(
            "computed {} | missing {:?} | unmatched {:?}",
            exp_table(&rs),
            al.missing,
            al.extra
        ),
    );
    // independent oracle: float first returns from a grid in the cone
    let b = binary_alphabet();
    let fl: BTreeSet<String> = float_return_words(6, 0.0, &cone, 12.0)
        .iter()
        .map(|w| exponent_form(&b, w))
        .collect();
    let ex: BTreeSet<String> = rs
        .pieces
        .iter()
        .map(|p| exponent_form(&b, &p.word))
        .collect();
    log.check(
        "float oracle return words agree with the exact ones",
        fl == ex,
        format!("{fl:?}"),
    );
}

fn c2(log: &mut Log) {
    let m = bij(6, "0");
    let (_, mut rs) = cone_return(&m, 12);
    rs.align(&table(&[
        ("A", "01^30^2"),
        ("B", "01^30^3"),
        ("C", "01^40^2"),
        ("D", "01^40^3"),
        ("E", "01^50^4"),
    ]));
    let t = induced_map(&rs).unwrap();
    let ex = extract_substitution(&t, "A", 24).unwrap();
    let want = expect_sub(&[
        ("A", "A"),
        ("B", "AB"),
        ("C", "AC"),
        ("D", "ACB"),
        ("E", "ACCBB"),
    ]);
    match &ex.substitution {
        Some(s) => log.check("σ₆ extracted", s.to_map() == want, sub_string(s)),
        None => log.check("σ₆ extracted", false, "no conjugacy"),
    };
    let translation = ex.conjugacy.as_ref().is_some_and(|h| {
        h.rot()
            .as_rational()
            .is_some_and(|r| r > BigRational::from_integer(0.into()))
    });
    log.check(
        "conjugacy has no rotation part",
        translation,
        format!("{:?}", ex.conjugacy.as_ref().map(|h| h.scale2().to_f64())),
    );
    let cell = |w: &str| periodic_cell(&t, &parse_word(&t.alphabet, w).unwrap());
    let e = cell("E");
    log.check(
        "E^ω cell is a triangle",
        e.vertices == Some(3),
        format!("{:?}", e.vertices),
    );
    let dbc = cell("DBC");
    let dcb = cell("DCB");
    log.check(
        "three-letter D,B,C cycle has a triangle cell",
        dbc.vertices == Some(3) || dcb.vertices == Some(3),
        format!("DBC {:?}, DCB {:?}", dbc.vertices, dcb.vertices),
    );
    let mut hex = None;
    for w in ["B", "C", "D"] {
        let r = cell(w);
        log.check(
            &format!("{w}^ω cell is a hexagon"),
            r.vertices == Some(6),
            format!("{:?}", r.vertices),
        );
        if w == "B" && r.periodic {
            hex = Some(r.cell.pieces[0].clone());
        }
    }
    if let (true, Some(h)) = (e.periodic, hex) {
        let es = squared_sides(&e.cell.pieces[0]);
        let hs = squared_sides(&h);
        let same = es.iter().chain(hs.iter()).all(|s| *s == es[0]);
        log.check(
            "E edges equal the hexagon edge",
            same,
            format!(
                "E² {:?} hexagon² {:?}",
                es.iter().map(f).collect::<Vec<_>>(),
                hs.iter().map(f).collect::<Vec<_>>()
            ),
        );
    } else {
        log.check("E edges equal the hexagon edge", false, "cells missing");
    }
}

fn c3(log: &mut Log) {
    let m = bij(4, "0");
    let (cone, mut rs) = cone_return(&m, 16);
    rs.align(&table(&[
        ("A", "011100"),
        ("B", "01110"),
        ("C", "01100"),
        ("D", "0110"),
    ]));
    log.note(format!("return table {}", exp_table(&rs)));
    let t = induced_map(&rs).unwrap();
    // A is the fixed square next to the vertex; D carries the renormalization
    let ex = extract_substitution(&t, "D", 32).unwrap();
    let want = expect_sub(&[("A", "DBC"), ("B", "DB"), ("C", "DC"), ("D", "D")]);
    let s = ex.substitution.clone();
    log.check(
        "σ₄ extracted",
        s.as_ref().is_some_and(|s| s.to_map() == want),
        s.as_ref()
            .map(sub_string)
            .unwrap_or_else(|| "no conjugacy".into()),
    );
    let b = binary_alphabet();
    let words = rs.words();
    let proj = |w: &str| project_word(&words, &parse_word(&t.alphabet, w).unwrap()).unwrap();
    for (w, want) in [
        ("A", "0^31^3"),
        ("B", "0^21^2"),
        ("C", "0^31^2"),
        ("DBC", "0^31^20^21^30^21^20^3"),
    ] {
        let got = proj(w);
        let exp = parse_word(&b, want).unwrap();
        log.check(
            &format!("projection of ({w})^ω is ({want})^ω"),
            cyclic_eq(&got, &exp),
            format!(
                "computed {} (length {})",
                exponent_form(&b, &got),
                got.len()
            ),
        );
    }
    // every point of an 8×8 cone window away from the vertex is periodic:
    // tiles of periodic cells exhaust it exactly
    let c = base_cone(&m).unwrap();
    let n = m.order;
    let (vx, vy) = (c.vertex.x.clone(), c.vertex.y.clone());
    let w = ConvexRegion::rect(
        &(&vx - &Real::integer(n, 9)),
        &(&vx - &Real::integer(n, 1)),
        &vy,
        &(&vy + &Real::integer(n, 8)),
    )
    .intersect(&cone);
    let win = RegionSet::single(w);
    let rep = verify_tiling(&m, &win, 64, 64);
    let tiled = rep.tile_area(n);
    log.check(
        "periodic cells tile the cone window exactly",
        tiled == area(&win) && rep.leftover.is_empty(),
        format!(
            "tile area {} of {}, {} tiles, periods {:?}",
            f(&tiled),
            f(&area(&win)),
            rep.tiles.len(),
            rep.periods()
        ),
    );
}

fn c4(log: &mut Log) {
    let m = bij(3, "0");
    let (_, mut rs) = cone_return(&m, 12);
    rs.align(&table(&[("A", "010"), ("B", "011"), ("C", "0110")]));
    log.note(format!("return table {}", exp_table(&rs)));
    let t = induced_map(&rs).unwrap();
    let mut empty = Vec::new();
    let mut total = 0;
    for n in 0..=4usize {
        for (a, x, b, y) in [(n, "A", n, "B"), (n + 1, "A", n, "B"), (n + 1, "B", n, "A")] {
            let s = format!("{}{}C", x.repeat(a), y.repeat(b));
            let r = periodic_cell(&t, &parse_word(&t.alphabet, &s).unwrap());
            total += 1;
            if !r.periodic {
                empty.push(s);
            }
        }
    }
    log.check(
        "every family word has a nonempty periodic cell",
        empty.is_empty(),
        format!("{} of {total} empty: {empty:?}", empty.len()),
    );
    let mut swapped = Vec::new();
    for n in 1..=4usize {
        let s = format!("{}{}C", "A".repeat(n), "B".repeat(n + 1));
        if periodic_cell(&t, &parse_word(&t.alphabet, &s).unwrap()).periodic {
            swapped.push(s);
        }
    }
    log.note(format!(
        "periodic with the exponents swapped (AⁿBⁿ⁺¹C): {swapped:?}"
    ));
}

fn c5(log: &mut Log) {
    let m = bij(8, "0");
    let (cone, mut rs) = cone_return(&m, 16);
    let al = rs.align(&table(&[
        ("A", "01^40^3"),
        ("B", "01^50^3"),
        ("C", "01^40^4"),
        ("D", "01^50^4"),
        ("E", "01^50^5"),
        ("F", "01^60^5"),
        ("G", "01^70^6"),
        ("H", "01^60^4"),
        ("I", "01^70^5"),
        ("J", "01^60^6"),
    ]));
    log.check(
        "ten pieces with the reference return words",
        rs.pieces.len() == 10 && al.is_exact(),
        format!("missing {:?} unmatched {:?}", al.missing, al.extra),
    );
    let t = induced_map(&rs).unwrap();
    let ex = extract_substitution(&t, "A", 48).unwrap();
    let want = expect_sub(&[
        ("A", "A"),
        ("B", "AB"),
        ("C", "AC"),
        ("D", "ABC"),
        ("E", "ABCCA"),
        ("F", "ABBCB"),
        ("G", "ABBBBCC"),
        ("H", "ABBCA"),
        ("I", "ABBBBCA"),
        ("J", "ABBCBC"),
    ]);
    let s = ex.substitution.clone();
    log.check(
        "σ₈,₃ equals the reference table",
        s.as_ref().is_some_and(|s| s.to_map() == want),
        s.as_ref()
            .map(sub_string)
            .unwrap_or_else(|| "no conjugacy".into()),
    );

    // the three invariant pieces of the cone
    let c1_syms: Vec<u16> = ["E", "F", "G", "H", "I", "J"]
        .iter()
        .map(|l| t.symbol_by_name(l).unwrap())
        .collect();
    let c1 = RegionSet::new(
        c1_syms
            .iter()
            .flat_map(|&s| t.domains_of(s).cloned())
            .collect(),
    );
    let c3 = RegionSet::new(
        ex.structure
            .pieces
            .iter()
            .flat_map(|p| prefix_images(&t, &p.region, &p.word))
            .collect(),
    );
    let c2 = RegionSet::single(cone.clone()).subtract(&c1).subtract(&c3);
    log.check("𝔠₁ and 𝔠₃ are disjoint", c1.intersect(&c3).is_empty(), "");
    for (name, set) in [("𝔠₁", &c1), ("𝔠₂", &c2), ("𝔠₃", &c3)] {
        let img = image(&t, set);
        log.check(
            &format!("{name} is invariant"),
            !set.is_empty() && img.subset_of(set) && set.subset_of(&img),
            format!("{} pieces", set.len()),
        );
    }

    let words = [
        "F",
        "E",
        "G",
        "H",
        "E^2JIH^2FGF",
        "E^2FG^2J",
        "FH^2IG^2",
        "E^5FGEH^5JI",
    ];
    let mut bad = Vec::new();
    for w in words {
        let r = periodic_cell(&t, &parse_word(&t.alphabet, w).unwrap());
        if r.vertices != Some(8) {
            bad.push(format!("{w}:{:?}", r.vertices));
        }
    }
    log.check(
        "𝔠₁ periodic words have octagon cells",
        bad.is_empty(),
        format!("failing {bad:?}"),
    );

    // a non-periodic point needs a renormalization of the map on 𝔠₁
    let r1 = restrict(&t, &c1_syms);
    let mut found = None;
    for &s in &c1_syms {
        let base = RegionSet::new(r1.domains_of(s).cloned().collect());
        if let Ok(rs1) = first_return(&r1, &base, 200) {
            if rs1.is_resolved() {
                if let Some((_, sub)) = find_conjugacy_with(&r1, &rs1, true) {
                    found = Some((t.alphabet[s as usize].clone(), sub));
                    break;
                }
            }
        }
    }
    match found {
        Some((piece, sub)) => {
            // nested cells of the fixed point of sub: its coding must not be periodic
            let mut w = vec![r1.symbol_by_name(&piece).unwrap()];
            while w.len() < 10_000 {
                let nw = sub.apply(&w).unwrap();
                if nw.len() <= w.len() {
                    break;
                }
                w = nw;
            }
            let long = w.len() >= 10_000;
            let per = smallest_period(&w[..w.len().min(10_000)], 2000);
            log.check(
                "non-periodic coding on 𝔠₁",
                long && per.is_none(),
                format!("word length {}, period {per:?}", w.len()),
            );
        }
        None => {
            log.check(
                "non-periodic coding on 𝔠₁",
                false,
                "no self-similar first return on any single piece of 𝔠₁; the nested-cell point cannot be built",
            );
        }
    }
}

fn c6(log: &mut Log) {
    let literal = [
        ("A", "0110"),
        ("B", "01^30"),
        ("C", "01100"),
        ("D", "01110"),
    ];
    let computed = [
        ("A", "0110"),
        ("B", "01^30"),
        ("C", "01100"),
        ("D", "01^30^2"),
    ];
    let want0 = expect_sub(&[("A", "A"), ("B", "AB"), ("C", "AC"), ("D", "ABC")]);
    let mut subs0 = Vec::new();
    for s in ["1/3", "1/2", "2/3"] {
        let m = bij(4, s);
        let (_, mut rs) = cone_return(&m, 16);
        let al = rs.align(&table(&literal));
        log.check(
            &format!("σ={s}: four pieces with the reference words"),
            rs.pieces.len() == 4 && al.is_exact(),
            format!("computed {} | missing {:?}", exp_table(&rs), al.missing),
        );
        rs.align(&table(&computed));
        let t = induced_map(&rs).unwrap();
        let ex = extract_substitution(&t, "A", 32).unwrap();
        let got = ex.substitution.map(|s| s.to_map());
        log.check(
            &format!("σ={s}: σ₄,s,₀ extracted"),
            got.as_ref() == Some(&want0),
            format!("{got:?}"),
        );
        subs0.push(got);
    }
    log.check(
        "σ₄,s,₀ identical across σ<1",
        subs0.windows(2).all(|w| w[0] == w[1]),
        "",
    );
    let want1 = expect_sub(&[("A", "A"), ("B", "ACB"), ("C", "AC")]);
    let mut subs1 = Vec::new();
    for s in ["3/2", "2"] {
        let m = bij(4, s);
        let (_, rs) = cone_return(&m, 16);
        log.check(
            &format!("σ={s}: three pieces"),
            rs.pieces.len() == 3 && rs.is_resolved(),
            exp_table(&rs),
        );
        let t = induced_map(&rs).unwrap();
        // B is the translate of the cone; A is an unbounded strip whose
        // return words grow without bound
        let ex = extract_substitution(&t, "B", 32).unwrap();
        let got = ex.substitution.map(|s| s.to_map());
        let words: Vec<String> = ex
            .structure
            .pieces
            .iter()
            .map(|p| word_string(&t.alphabet, &p.word))
            .collect();
        log.check(
            &format!("σ={s}: σ₄,s,₁ extracted"),
            got.as_ref() == Some(&want1),
            match &got {
                Some(g) => format!("{g:?}"),
                None => format!("no similarity conjugacy; return words to B {words:?}"),
            },
        );
        // the same words with A and B exchanged, read as a substitution
        let swapped: BTreeSet<String> = words
            .iter()
            .map(|w| {
                w.chars()
                    .map(|c| match c {
                        'A' => 'B',
                        'B' => 'A',
                        c => c,
                    })
                    .collect()
            })
            .collect();
        let images: BTreeSet<String> = want1.values().cloned().collect();
        log.note(format!(
            "σ={s}: return words to B with A and B exchanged {} the images of σ₄,s,₁",
            if swapped == images {
                "equal"
            } else {
                "differ from"
            }
        ));
        subs1.push(words);
    }
    log.check(
        "return words to B identical across σ>1",
        subs1.windows(2).all(|w| w[0] == w[1]),
        "",
    );
}

fn c7(log: &mut Log) {
    let m = bij(8, "1/3");
    let mut all = Vec::new();
    for w in ["0^41^5", "1^50^6", "1^40^5"] {
        let word = parse_word(&m.alphabet, w).unwrap();
        let r = periodic_cell(&m, &word);
        log.check(
            &format!("{w} has a nonempty periodic cell"),
            r.periodic,
            format!("{:?} vertices", r.vertices),
        );
        all.extend(orbit_cells(&m, &word));
    }
    let a = annulus_check(&all);
    log.check(
        "orbit cells are adjacency-connected",
        a.connected(),
        format!("{} cells, {} components", all.len(), a.components),
    );
    log.check(
        "orbit cells enclose the origin",
        a.encloses_origin(),
        format!("winding {}, origin covered {}", a.winding, a.origin_covered),
    );
    let mut two = Vec::new();
    for w in ["0^41^5", "1^40^5"] {
        two.extend(orbit_cells(&m, &parse_word(&m.alphabet, w).unwrap()));
    }
    let b = annulus_check(&two);
    log.note(format!(
        "0⁴1⁵ with 1⁴0⁵ alone: {} components, winding {}",
        b.components, b.winding
    ));
}

fn c8(log: &mut Log) {
    let m = centers(4, (-1, 1), (-3, 1));
    let n = m.order;
    log.check(
        "map is non-injective",
        matches!(m.classify(), MapClass::NonInjective(_)),
        "",
    );
    let cross = RegionSet::new(vec![
        rect(n, -2, 0, 0, 2),
        rect(n, -2, 0, 2, 4),
        rect(n, -2, 0, -2, 0),
        rect(n, -4, -2, 0, 2),
    ]);
    let cert = attractor_candidate(&m, &cross, 0);
    log.check(
        "declared polygon is invariant",
        cert.is_ok(),
        format!("{:?}", cert.err()),
    );
    let rep = verify_tiling(&m, &cross, 12, 12);
    let periods = rep.periods();
    log.check(
        "tile periods are {1, 3, 4}",
        periods == BTreeSet::from([1, 3, 4]),
        format!("{periods:?}"),
    );
    let sides: BTreeSet<String> = rep
        .tiles
        .iter()
        .map(|t| f(&t.region.area().finite().unwrap().clone()))
        .collect();
    log.check(
        "tiles are unit squares",
        sides == BTreeSet::from(["1.0000".to_string()]),
        format!("tile areas {sides:?}"),
    );
    log.check(
        "tile area equals attractor area",
        rep.tile_area(n) == area(&cross),
        format!("{} of {}", f(&rep.tile_area(n)), f(&area(&cross))),
    );
    // a second center pair; its attractor is found by shrinking a box
    let m2 = centers(4, (-1, 1), (-5, 1));
    let mut s = RegionSet::single(rect(n, -12, 12, -12, 12));
    for _ in 0..40 {
        let t = image(&m2, &s).intersect(&s);
        if t.equals(&s) {
            break;
        }
        s = t;
    }
    let rep2 = verify_tiling(&m2, &s, 12, 12);
    log.note(format!(
        "centers (−1,1),(−5,1): attractor area {}, tile periods {:?}",
        f(&area(&s)),
        rep2.periods()
    ));
}

fn c9(log: &mut Log) {
    let n = 8;
    let i = AlgebraicComplex::imag_unit(n).unwrap();
    let one = AlgebraicComplex::one(n);
    let m = build_map(
        1,
        8,
        &Variant::General {
            c0: &one + &i,
            c1: -(&one + &i),
        },
    )
    .unwrap();
    let o0 = periodic_cell(&m, &[0]);
    let o1 = periodic_cell(&m, &[1]);
    log.check(
        "fixed cells are octagons",
        o0.vertices == Some(8) && o1.vertices == Some(8),
        format!("{:?} {:?}", o0.vertices, o1.vertices),
    );
    let pts: Vec<Point> = o0
        .cell
        .iter()
        .chain(o1.cell.iter())
        .flat_map(|c| c.vertices())
        .collect();
    let hull = RegionSet::single(ConvexRegion::hull(&pts));
    let cert = attractor_candidate(&m, &hull, 0);
    log.check(
        "hull of the octagons is invariant",
        cert.is_ok(),
        format!("area {}", f(&area(&hull))),
    );
    let rep = verify_tiling(&m, &hull, 8, 8);
    let lb = &rep.leftover_by_depth;
    log.check(
        "leftover strictly decreases at depths 4, 6, 8",
        lb[4] > lb[6] && lb[6] > lb[8],
        format!("by depth {:?}", lb.iter().map(f).collect::<Vec<_>>()),
    );
    // shifted centers i and i − (2+√2)
    let s2 = &AlgebraicComplex::root_of_unity(n, 1) + &AlgebraicComplex::root_of_unity(n, -1);
    let x = &AlgebraicComplex::integer(n, 2) + &s2;
    let ms = build_map(
        1,
        8,
        &Variant::General {
            c0: i.clone(),
            c1: &i - &x,
        },
    )
    .unwrap();
    let oct = periodic_cell(&ms, &[0]);
    let cert = attractor_candidate(&ms, &oct.cell, 0);
    log.check(
        "shifted variant: the octagon is invariant",
        oct.vertices == Some(8) && cert.is_ok(),
        format!("{:?} vertices", oct.vertices),
    );
    let extra = RegionSet::new(orbit_cells(&ms, &[0, 0, 0, 1]));
    let invariant = image(&ms, &extra).equals(&extra) && extra.intersect(&oct.cell).is_empty();
    log.note(format!(
        "shifted variant: the (0001)^ω orbit cells form a second invariant set (exact: {invariant}) outside the octagon, area {}",
        f(&area(&extra))
    ));
}

/// Second center, width of Σ, declared squares (x0, x1, y0, y1).
type Case = ((i64, i64), i64, Vec<(i64, i64, i64, i64)>);

fn c10(log: &mut Log) {
    let cases: [Case; 2] = [
        ((3, -1), 2, vec![(-2, 0, 0, 2), (2, 4, -2, 0)]),
        (
            (2, -1),
            1,
            vec![
                (-2, 0, 0, 2),
                (1, 3, -2, 0),
                (1, 2, 1, 2),
                (-2, -1, 3, 4),
                (-4, -3, 0, 1),
                (4, 5, -1, 0),
                (2, 3, -4, -3),
                (-1, 0, -2, -1),
            ],
        ),
    ];
    for (k, (c1, width, squares)) in cases.into_iter().enumerate() {
        let m = centers(4, (-1, 1), c1);
        let n = m.order;
        let tag = format!("map {}", k + 1);
        // the half-planes rotate onto x<0 and x>width
        let strip = ConvexRegion::from_halfplanes(
            n,
            vec![
                HalfPlane::ints(n, 1, 0, 0),
                HalfPlane::ints(n, -1, 0, width),
            ],
        );
        let sigma = image_complement(&m);
        let class_ok = matches!(m.classify(), MapClass::NonSurjective(s) if s.equals(&sigma));
        log.check(
            &format!("{tag}: Σ is the strip 0<x<{width}"),
            class_ok && sigma.equals(&RegionSet::single(strip)),
            "",
        );
        let k_set = RegionSet::new(
            squares
                .iter()
                .map(|&(a, b, c, d)| rect(n, a, b, c, d))
                .collect(),
        );
        let cert = attractor_candidate(&m, &k_set, 5);
        log.check(
            &format!("{tag}: declared set invariant and off T^0..5(Σ)"),
            matches!(&cert, Ok(c) if c.certificate == Certificate::InvariantAvoidingSigma { depth: 5 }),
            format!("{:?}", cert.as_ref().err()),
        );
        let stay = stay_set(&m, &rect(n, -8, 8, -8, 8), 24);
        log.check(
            &format!("{tag}: bounded orbits in [−8,8]² are exactly the declared set"),
            stay.equals(&k_set),
            format!(
                "stay area {}, declared {}",
                f(&area(&stay)),
                f(&area(&k_set))
            ),
        );
        let rep = verify_tiling(&m, &k_set, 12, 12);
        let fixed = rep.tiles.iter().filter(|t| t.period == 1).count();
        let side2: Vec<String> = rep
            .tiles
            .iter()
            .filter(|t| t.period == 1)
            .map(|t| f(&squared_sides(&t.region)[0]))
            .collect();
        log.note(format!("{tag}: fixed squares have squared side {side2:?}"));
        if k == 0 {
            log.check(
                &format!("{tag}: two squares"),
                fixed == 2 && rep.tiles.len() == 2 && rep.leftover.is_empty(),
                format!("periods {:?}", rep.periods()),
            );
        } else {
            let six: Vec<_> = rep.tiles.iter().filter(|t| t.period == 6).collect();
            let one_orbit = six.iter().map(|t| t.orbit).collect::<BTreeSet<_>>().len() == 1;
            let unit = six
                .iter()
                .all(|t| t.region.area().finite() == Some(&Real::integer(n, 1)));
            log.check(
                &format!("{tag}: two squares plus six small squares in one period-6 orbit"),
                fixed == 2 && six.len() == 6 && one_orbit && unit && rep.leftover.is_empty(),
                format!("periods {:?}, {} tiles", rep.periods(), rep.tiles.len()),
            );
        }
    }
}

// ---- criterion 11: property suites -----------------------------------

fn runner(cases: u32) -> TestRunner {
    let cfg = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn suite<S: Strategy>(
    log: &mut Log,
    name: &str,
    strat: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) where
    S::Value: std::fmt::Debug,
{
    let mut r = runner(1000);
    let res = r.run(&strat, test);
    log.check(
        &format!("{name} (1000 cases)"),
        res.is_ok(),
        res.err().map(|e| e.to_string()).unwrap_or_default(),
    );
}

const ORDERS: [u32; 6] = [4, 5, 6, 8, 12, 20];

fn elem(n: u32, c: &[(i64, i64)]) -> AlgebraicComplex {
    let r: Vec<BigRational> = c
        .iter()
        .map(|&(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
        .collect();
    AlgebraicComplex::new(n, &r).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-9i64..=9, 1i64..=5), 1..=4)
}

fn float_of(n: u32, c: &[(i64, i64)]) -> (f64, f64) {
    c.iter()
        .enumerate()
        .fold((0.0, 0.0), |(x, y), (k, &(a, b))| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let v = a as f64 / b as f64;
            (x + v * t.cos(), y + v * t.sin())
        })
}

fn c11(log: &mut Log) {
    suite(
        log,
        "field ring axioms",
        (
            prop::sample::select(ORDERS.to_vec()),
            coeffs(),
            coeffs(),
            coeffs(),
        ),
        |(n, a, b, c)| {
            let (a, b, c) = (elem(n, &a), elem(n, &b), elem(n, &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &AlgebraicComplex::one(n), a.clone());
            prop_assert!((&(&(&a + &b) - &b) - &a).is_zero());
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a);
            }
            Ok(())
        },
    );
    suite(
        log,
        "sign agrees with a float oracle",
        (prop::sample::select(ORDERS.to_vec()), coeffs()),
        |(n, c)| {
            let z = elem(n, &c);
            let (x, y) = float_of(n, &c);
            let sgn = |v: f64| if v > 0.0 { 1 } else { -1 };
            if x.abs() > 1e-9 {
                prop_assert_eq!(z.re_sign(), sgn(x));
            }
            if y.abs() > 1e-9 {
                prop_assert_eq!(z.im_sign(), sgn(y));
            }
            let r = RealAlgebraic::new(&z + &z.conj()).unwrap();
            if x.abs() > 1e-9 {
                prop_assert_eq!(r.sign(), sgn(x));
            }
            Ok(())
        },
    );
    suite(
        log,
        "clip, transform and area invariants",
        (
            prop::collection::vec((-8i64..=8, -8i64..=8), 3..8),
            (-3i64..=3, -3i64..=3, -6i64..=6),
            (0i64..8, -5i64..=5, -5i64..=5),
        ),
        |(pts, (ha, hb, hc), (k, tx, ty))| {
            let n = 8;
            let pts: Vec<Point> = pts.iter().map(|&(x, y)| Point::ints(n, x, y)).collect();
            let poly = ConvexRegion::hull(&pts);
            let a = poly
                .area()
                .finite()
                .cloned()
                .unwrap_or_else(|| Real::zero(n));
            if ha != 0 || hb != 0 {
                let h = HalfPlane::ints(n, ha, hb, hc);
                let l = poly.clip(&h);
                let r = poly.clip(&h.flip());
                prop_assert!(l.subset_of(&poly));
                prop_assert_eq!(l.clip(&h), l.clone());
                let al = l.area().finite().cloned().unwrap_or_else(|| Real::zero(n));
                let ar = r.area().finite().cloned().unwrap_or_else(|| Real::zero(n));
                prop_assert_eq!(&al + &ar, a.clone());
            }
            let g = Isometry::new(
                AlgebraicComplex::root_of_unity(n, k),
                Point::ints(n, tx, ty).to_complex(),
            )
            .unwrap();
            let img = poly.transform(&g);
            prop_assert_eq!(img.area(), poly.area());
            prop_assert_eq!(img.transform(&g.inverse()), poly);
            Ok(())
        },
    );
    suite(
        log,
        "exact coding agrees with float coding",
        (
            prop::sample::select(vec![3u32, 4, 5, 6, 8]),
            -6i64..=6,
            (-40i64..=40, -40i64..=40, 1i64..=9),
        ),
        |(q_, s, (x, y, d))| {
            let sigma = BigRational::new(BigInt::from(s), BigInt::from(3));
            let m = build_map(
                1,
                q_,
                &Variant::Bijective {
                    sigma: sigma.clone(),
                },
            )
            .unwrap();
            let p = Point::fracs(m.order, (x, d), (y, d));
            let exact = m.code_orbit(&p, 40);
            let sf = sigma.to_f64().unwrap();
            let mut z = (x as f64 / d as f64, y as f64 / d as f64);
            let mut w = Vec::new();
            for _ in 0..40 {
                if z.1.abs() < 1e-6 {
                    return Ok(());
                }
                let (sym, nz) = float_step(q_, sf, z).unwrap();
                w.push(sym);
                z = nz;
            }
            prop_assert_eq!(exact.hit_boundary_at, None);
            prop_assert_eq!(exact.word, w);
            Ok(())
        },
    );
    // substitution soundness: factors of the generated language of the
    // induced map and their σ₆ images are realized by nonempty cells
    let m = bij(6, "0");
    let (_, mut rs) = cone_return(&m, 12);
    rs.align(&table(&[
        ("A", "01^30^2"),
        ("B", "01^30^3"),
        ("C", "01^40^2"),
        ("D", "01^40^3"),
        ("E", "01^50^4"),
    ]));
    let t = induced_map(&rs).unwrap();
    let s6 = Substitution::from_strs(&t.alphabet, &["A", "AB", "AC", "ACB", "ACCBB"]).unwrap();
    let seeds = ["E", "B", "C", "D", "DBC"]
        .iter()
        .map(|w| parse_word(&t.alphabet, w).unwrap())
        .collect();
    let g = SubstitutionGraph::single_loop(s6.clone(), seeds);
    let pool: Vec<Word> = graph_language(&g, 20, 3).into_iter().collect();
    log.note(format!("generated {} factors of length ≤ 20", pool.len()));
    let words = rs.words();
    suite(
        log,
        "substitution soundness α(L′) ⊂ L",
        prop::sample::select(pool),
        |w| {
            prop_assert!(!cell_of_prefix(&t, &w).is_empty(), "factor not realized");
            let img = s6.apply(&w).unwrap();
            prop_assert!(!cell_of_prefix(&t, &img).is_empty(), "image not realized");
            let bin = project_word(&words, &w).unwrap();
            prop_assert!(
                !cell_of_prefix(&m, &bin).is_empty(),
                "binary word not realized"
            );
            prop_assert!(primitive_period(&w) <= w.len());
            Ok(())
        },
    );
}
