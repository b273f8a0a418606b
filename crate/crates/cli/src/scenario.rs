//! Scenario files: a map plus a pipeline of checks, each carrying the value
//! it expects and where that value comes from.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use pwrot_core::attractor::{
    annulus_check, attractor_candidate, image, orbit_cells, stay_set, verify_tiling, TilingReport,
};
use pwrot_core::dynamics::{MapClass, PiecewiseMap, Symbol, Word};
use pwrot_core::geometry::{Area, ConvexRegion, Point, Real, RegionSet};
use pwrot_core::induction::{
    base_cone, default_max_steps, find_conjugacy_with, first_return, induced_map, prefix_images,
    Cone, Extraction, ReturnStructure,
};
use pwrot_core::symbolic::{
    cyclic_eq, exponent_form, graph_language, parse_word, periodic_cell, project_word, word_string,
    SubstitutionGraph,
};

use crate::input::{invalid, parse_point, real, InputError, MapSpec, Window};
use crate::render::{render_svg, Labelled};
use crate::tables::float_coding;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub map: MapSpec,
    /// Step cap for first returns when an action gives none.
    #[serde(default)]
    pub max_steps: Option<usize>,
    pub pipeline: Vec<Action>,
}

/// An expected value and the reference it was taken from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect<T> {
    pub value: T,
    pub source: String,
}

/// Which map an action works on: the base map or the map induced by the
/// latest first return.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    #[default]
    Induced,
    Base,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub word: String,
    #[serde(default)]
    pub vertices: Option<usize>,
}

/// A subset of the induction cone: the domains of some letters of the
/// induced map, the orbit tiles of an earlier induction, or what is left.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub name: String,
    #[serde(default)]
    pub letters: Vec<String>,
    #[serde(default)]
    pub orbit_of: Option<String>,
    #[serde(default)]
    pub rest: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seed {
    /// Convex hulls of point lists.
    #[serde(default)]
    pub polygons: Vec<Vec<String>>,
    /// Rectangles "x0,y0,x1,y1".
    #[serde(default)]
    pub rects: Vec<String>,
    /// Orbit cells of periodic words.
    #[serde(default)]
    pub cells: Vec<String>,
    /// Convex hull of the orbit cells of these periodic words.
    #[serde(default)]
    pub hull_of_cells: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TilingExpect {
    #[serde(default)]
    pub periods: Option<BTreeSet<usize>>,
    /// Area every tile must have.
    #[serde(default)]
    pub tile_area: Option<String>,
    /// Whether the tiles cover the set up to measure zero.
    #[serde(default)]
    pub covers: Option<bool>,
    /// Depths along which the uncovered area must strictly decrease.
    #[serde(default)]
    pub decreasing_at: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusExpect {
    pub connected: bool,
    pub encloses_origin: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderLayer {
    Domains,
    Return,
    Cells,
    Sets,
    Sigma,
    Attractor,
    Tiling,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case", deny_unknown_fields)]
pub enum Action {
    /// The cone next to the fixed cell, base of the first induction.
    Cone {
        #[serde(default)]
        cell_vertices: Option<Expect<usize>>,
    },
    /// First return to the cone; the expected table is label → word.
    FirstReturn {
        #[serde(default)]
        max_steps: Option<usize>,
        #[serde(default)]
        expect: Option<Expect<BTreeMap<String, String>>>,
    },
    /// Induces the induced map on one piece and looks for a renormalizing
    /// similarity; the expected substitution is letter → image.
    Induce {
        piece: String,
        #[serde(default)]
        max_steps: Option<usize>,
        #[serde(default)]
        allow_rotation: bool,
        #[serde(default)]
        expect: Option<Expect<BTreeMap<String, String>>>,
    },
    PeriodicWords {
        #[serde(default)]
        on: Level,
        cells: Vec<CellSpec>,
        source: String,
    },
    /// Words over the induced alphabet and their expected images in the
    /// base alphabet, compared up to cyclic shift.
    Project {
        words: BTreeMap<String, String>,
        source: String,
    },
    InvariantSets {
        sets: Vec<SetSpec>,
        source: String,
    },
    Classify {
        expect: Expect<String>,
    },
    Orbit {
        point: String,
        steps: usize,
        #[serde(default)]
        float_check: bool,
        #[serde(default)]
        expect: Option<Expect<String>>,
    },
    Attractor {
        seed: Seed,
        #[serde(default)]
        depth: usize,
    },
    /// Compares the declared attractor with the points of a window whose
    /// orbit stays in the window for the given number of steps.
    StaySet {
        window: String,
        steps: usize,
        source: String,
    },
    Tiling {
        max_period: usize,
        depth: usize,
        #[serde(default)]
        expect: Option<Expect<TilingExpect>>,
    },
    Annulus {
        #[serde(default)]
        on: Level,
        words: Vec<String>,
        expect: Expect<AnnulusExpect>,
    },
    /// Factors of a substitution graph language. The graph is inline JSON
    /// or a path relative to the scenario file.
    Language {
        graph: serde_json::Value,
        length: usize,
        depth: usize,
        #[serde(default)]
        expect_count: Option<Expect<usize>>,
    },
    Render {
        layers: Vec<RenderLayer>,
        window: String,
    },
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::Cone { .. } => "cone",
            Action::FirstReturn { .. } => "first_return",
            Action::Induce { .. } => "induce",
            Action::PeriodicWords { .. } => "periodic_words",
            Action::Project { .. } => "project",
            Action::InvariantSets { .. } => "invariant_sets",
            Action::Classify { .. } => "classify",
            Action::Orbit { .. } => "orbit",
            Action::Attractor { .. } => "attractor",
            Action::StaySet { .. } => "stay_set",
            Action::Tiling { .. } => "tiling",
            Action::Annulus { .. } => "annulus",
            Action::Language { .. } => "language",
            Action::Render { .. } => "render",
        }
    }
}

// ---- report ------------------------------------------------------------

/// A mismatch between an expected value and the computed one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diff {
    pub what: String,
    pub expected: String,
    pub source: String,
    pub computed: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionReport {
    pub action: String,
    pub pass: bool,
    pub summary: String,
    pub details: Vec<String>,
    pub diffs: Vec<Diff>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub pass: bool,
    pub actions: Vec<ActionReport>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn text(&self) -> String {
        let mut out = format!("scenario {}\n", self.scenario);
        for (i, a) in self.actions.iter().enumerate() {
            let tag = if a.pass { "pass" } else { "FAIL" };
            let time = a.seconds.map(|s| format!(" ({s:.3}s)")).unwrap_or_default();
            out.push_str(&format!(
                "[{tag}] {:>2} {}: {}{time}\n",
                i + 1,
                a.action,
                a.summary
            ));
            for d in &a.details {
                for l in d.lines() {
                    out.push_str(&format!("       {l}\n"));
                }
            }
            for d in &a.diffs {
                out.push_str(&format!(
                    "       diff {}: expected {} [{}], computed {}\n",
                    d.what, d.expected, d.source, d.computed
                ));
            }
        }
        let passed = self.actions.iter().filter(|a| a.pass).count();
        out.push_str(&format!(
            "result: {} ({passed}/{} actions passed)\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.actions.len()
        ));
        out
    }
}

#[derive(Default)]
struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
    diffs: Vec<Diff>,
}

impl Outcome {
    fn new(summary: impl Into<String>) -> Self {
        Outcome {
            pass: true,
            summary: summary.into(),
            ..Default::default()
        }
    }

    fn fail(summary: impl Into<String>) -> Self {
        Outcome {
            pass: false,
            summary: summary.into(),
            ..Default::default()
        }
    }

    fn diff(
        &mut self,
        what: impl Into<String>,
        expected: impl Into<String>,
        source: &str,
        computed: impl Into<String>,
    ) {
        self.pass = false;
        self.diffs.push(Diff {
            what: what.into(),
            expected: expected.into(),
            source: source.to_string(),
            computed: computed.into(),
        });
    }

    fn detail(&mut self, s: impl Into<String>) {
        self.details.push(s.into());
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub timing: bool,
}

// ---- running -----------------------------------------------------------

struct Ctx {
    dir: PathBuf,
    map: PiecewiseMap,
    cap: Option<usize>,
    cone: Option<Cone>,
    rs: Option<ReturnStructure>,
    induced: Option<PiecewiseMap>,
    extractions: BTreeMap<String, Extraction>,
    cells: Vec<Labelled>,
    sets: Vec<Labelled>,
    sigma: Option<RegionSet>,
    attractor: Option<RegionSet>,
    tiling: Option<TilingReport>,
    render: Option<(Vec<RenderLayer>, Window)>,
}

pub fn load(path: &Path) -> Result<Scenario, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Schema {
        path: path.display().to_string(),
        source,
    })
}

pub fn run_scenario(path: &Path, opts: RunOptions) -> Result<Report, InputError> {
    let sc = load(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(run(&sc, &dir, opts)?.0)
}

/// Output of a run that the render and attractor commands reuse.
pub struct Artifacts {
    pub layers: Vec<Labelled>,
    pub window: Option<Window>,
    pub order: u32,
    pub attractor: Option<RegionSet>,
    pub tiling: Option<TilingReport>,
}

/// Runs every action in order. Input problems abort with an error; failed
/// checks and exhausted step caps are reported per action.
pub fn run(sc: &Scenario, dir: &Path, opts: RunOptions) -> Result<(Report, Artifacts), InputError> {
    let map = sc.map.build()?;
    let mut ctx = Ctx {
        dir: dir.to_path_buf(),
        map,
        cap: sc.max_steps,
        cone: None,
        rs: None,
        induced: None,
        extractions: BTreeMap::new(),
        cells: Vec::new(),
        sets: Vec::new(),
        sigma: None,
        attractor: None,
        tiling: None,
        render: None,
    };
    check_order(&sc.pipeline)?;
    let mut actions = Vec::new();
    for a in &sc.pipeline {
        let t0 = Instant::now();
        let o = match step(&mut ctx, a) {
            Ok(o) => o,
            // the order check passed, so an earlier action failed
            Err(InputError::Missing(what)) => Outcome::fail(format!("skipped: {what}")),
            Err(e) => return Err(e),
        };
        actions.push(ActionReport {
            action: a.name().to_string(),
            pass: o.pass,
            summary: o.summary,
            details: o.details,
            diffs: o.diffs,
            seconds: opts.timing.then(|| t0.elapsed().as_secs_f64()),
        });
    }
    let pass = actions.iter().all(|a| a.pass);
    let (layers, window) = match &ctx.render {
        Some((ls, w)) => (collect_layers(&ctx, ls), Some(w.clone())),
        None => {
            let all = [
                RenderLayer::Return,
                RenderLayer::Sets,
                RenderLayer::Attractor,
                RenderLayer::Tiling,
                RenderLayer::Cells,
            ];
            (collect_layers(&ctx, &all), None)
        }
    };
    let art = Artifacts {
        layers,
        window,
        order: ctx.map.order,
        attractor: ctx.attractor.clone(),
        tiling: ctx.tiling.clone(),
    };
    Ok((
        Report {
            scenario: sc.name.clone(),
            pass,
            actions,
        },
        art,
    ))
}

/// Actions that consume an earlier result must come after its producer.
fn check_order(pipeline: &[Action]) -> Result<(), InputError> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut induced_on: BTreeSet<&str> = BTreeSet::new();
    for (i, a) in pipeline.iter().enumerate() {
        let needs: &[&str] = match a {
            Action::Induce { .. } | Action::Project { .. } | Action::InvariantSets { .. } => {
                &["first_return"]
            }
            Action::PeriodicWords {
                on: Level::Induced, ..
            }
            | Action::Annulus {
                on: Level::Induced, ..
            } => &["first_return"],
            Action::StaySet { .. } | Action::Tiling { .. } => &["attractor"],
            _ => &[],
        };
        for n in needs {
            if !seen.contains(n) {
                return Err(invalid(format!(
                    "action {} ({}) needs a {n} action before it",
                    i + 1,
                    a.name()
                )));
            }
        }
        if let Action::InvariantSets { sets, .. } = a {
            for p in sets.iter().filter_map(|s| s.orbit_of.as_deref()) {
                if !induced_on.contains(p) {
                    return Err(invalid(format!(
                        "action {} (invariant_sets) needs an induce on '{p}' before it",
                        i + 1
                    )));
                }
            }
        }
        if let Action::Induce { piece, .. } = a {
            induced_on.insert(piece);
        }
        seen.insert(a.name());
    }
    Ok(())
}

impl Ctx {
    /// PWROT_MAX_STEPS wins, then the action's cap, then the scenario's.
    fn steps(&self, local: Option<usize>) -> usize {
        if let Some(v) = std::env::var("PWROT_MAX_STEPS")
            .ok()
            .and_then(|s| s.parse().ok())
        {
            return v;
        }
        let q = self.map.angle.map(|a| a.1).unwrap_or(4);
        local.or(self.cap).unwrap_or_else(|| default_max_steps(q))
    }

    fn target(&self, on: Level) -> Result<&PiecewiseMap, InputError> {
        match on {
            Level::Base => Ok(&self.map),
            Level::Induced => self
                .induced
                .as_ref()
                .ok_or_else(|| InputError::Missing("no resolved first return".into())),
        }
    }

    fn word(&self, on: Level, s: &str) -> Result<Word, InputError> {
        let m = self.target(on)?;
        parse_word(&m.alphabet, s).map_err(|e| invalid(format!("word '{s}': {e}")))
    }
}

fn fmt_real(r: &Real) -> String {
    format!("{:.4}", r.to_f64())
}

fn fmt_point(p: &Point) -> String {
    let (x, y) = p.to_f64();
    format!("({}, {})", crate::render::coord(x), crate::render::coord(y))
}

fn area_of(rs: &RegionSet) -> String {
    match rs.area() {
        Area::Finite(a) => fmt_real(&a),
        Area::Infinite => "infinite".into(),
    }
}

fn step(ctx: &mut Ctx, a: &Action) -> Result<Outcome, InputError> {
    match a {
        Action::Cone { cell_vertices } => {
            let c = match base_cone(&ctx.map) {
                Ok(c) => c,
                Err(e) => return Ok(Outcome::fail(format!("no cone: {e}"))),
            };
            let k = c.cell.vertices().len();
            let mut o = Outcome::new(format!(
                "vertex {}, fixed cell with {k} vertices",
                fmt_point(&c.vertex)
            ));
            if let Some(e) = cell_vertices {
                if e.value != k {
                    o.diff(
                        "fixed cell vertices",
                        e.value.to_string(),
                        &e.source,
                        k.to_string(),
                    );
                }
            }
            ctx.cone = Some(c);
            Ok(o)
        }
        Action::FirstReturn { max_steps, expect } => {
            first_return_step(ctx, *max_steps, expect.as_ref())
        }
        Action::Induce {
            piece,
            max_steps,
            allow_rotation,
            expect,
        } => induce_step(ctx, piece, *max_steps, *allow_rotation, expect.as_ref()),
        Action::PeriodicWords { on, cells, source } => {
            let mut o = Outcome::new(format!("{} periodic words", cells.len()));
            let mut found = Vec::new();
            for c in cells {
                let w = ctx.word(*on, &c.word)?;
                let m = ctx.target(*on)?;
                let r = periodic_cell(m, &w);
                let got = match (r.periodic, r.vertices) {
                    (false, _) => "no periodic cell".to_string(),
                    (true, Some(v)) => format!("{v} vertices"),
                    (true, None) => format!("{} pieces", r.cell.len()),
                };
                o.detail(format!(
                    "{}: {got}, point period {}",
                    c.word,
                    r.point_period
                        .map(|p| p.to_string())
                        .unwrap_or_else(|| "-".into())
                ));
                if !r.periodic {
                    o.diff(
                        format!("cell of ({})^ω", c.word),
                        "a nonempty periodic cell",
                        source,
                        got,
                    );
                    continue;
                }
                if let Some(v) = c.vertices {
                    if r.vertices != Some(v) {
                        o.diff(
                            format!("cell of ({})^ω", c.word),
                            format!("{v} vertices"),
                            source,
                            got,
                        );
                    }
                }
                for region in orbit_cells(m, &w) {
                    found.push(Labelled {
                        label: c.word.clone(),
                        region,
                    });
                }
            }
            ctx.cells.extend(found);
            Ok(o)
        }
        Action::Project { words, source } => {
            let rs = ctx
                .rs
                .as_ref()
                .ok_or_else(|| InputError::Missing("no first return".into()))?;
            let returns = rs.words();
            let mut o = Outcome::new(format!("{} projections", words.len()));
            for (w, want) in words {
                let ww = ctx.word(Level::Induced, w)?;
                let want_w = ctx.word(Level::Base, want)?;
                let got = project_word(&returns, &ww)
                    .map_err(|e| invalid(format!("project '{w}': {e}")))?;
                let got_s = exponent_form(&ctx.map.alphabet, &got);
                o.detail(format!("{w} ↦ {got_s}"));
                if !cyclic_eq(&got, &want_w) {
                    o.diff(format!("projection of {w}"), want.clone(), source, got_s);
                }
            }
            Ok(o)
        }
        Action::InvariantSets { sets, source } => invariant_sets_step(ctx, sets, source),
        Action::Classify { expect } => {
            let class = ctx.map.classify();
            let name = class.name();
            let mut o = Outcome::new(name.to_string());
            match &class {
                MapClass::NonSurjective(s) => {
                    o.detail(format!("uncovered region Σ: {} pieces", s.len()));
                    ctx.sigma = Some(s.clone());
                }
                MapClass::NonInjective(s) => {
                    o.detail(format!("doubly covered region: {} pieces", s.len()));
                    ctx.sigma = Some(s.clone());
                }
                MapClass::Bijective => {}
            }
            if expect.value != name {
                o.diff("class", expect.value.clone(), &expect.source, name);
            }
            Ok(o)
        }
        Action::Orbit {
            point,
            steps,
            float_check,
            expect,
        } => {
            let p = parse_point(ctx.map.order, point)?;
            let c = ctx.map.code_orbit(&p, *steps);
            let got = exponent_form(&ctx.map.alphabet, &c.word);
            let mut o = Outcome::new(format!("coding {got}"));
            if let Some(k) = c.hit_boundary_at {
                o.detail(format!("orbit meets a discontinuity at step {k}"));
            }
            if let Some(k) = c.left_domain_at {
                o.detail(format!("orbit leaves the domain at step {k}"));
            }
            if let Some(e) = expect {
                let want = ctx.word(Level::Base, &e.value)?;
                if want != c.word {
                    o.diff("coding", e.value.clone(), &e.source, got.clone());
                }
            }
            if *float_check {
                let f = float_coding(&ctx.map, p.to_f64(), c.word.len());
                if f != c.word {
                    o.pass = false;
                    o.detail(format!(
                        "float iteration codes {}",
                        word_string(&ctx.map.alphabet, &f)
                    ));
                } else {
                    o.detail("float iteration agrees");
                }
            }
            Ok(o)
        }
        Action::Attractor { seed, depth } => {
            let set = seed_set(ctx, seed)?;
            let res = attractor_candidate(&ctx.map, &set, *depth);
            let o = match &res {
                Ok(c) => Outcome::new(format!(
                    "certified {:?}, {} pieces, area {}",
                    c.certificate,
                    set.len(),
                    area_of(&set)
                )),
                Err(e) => Outcome::fail(format!("not certified: {e}")),
            };
            ctx.attractor = Some(set);
            Ok(o)
        }
        Action::StaySet {
            window,
            steps,
            source,
        } => {
            let w = Window::parse(ctx.map.order, window)?;
            let att = ctx
                .attractor
                .clone()
                .ok_or_else(|| InputError::Missing("no attractor".into()))?;
            let s = stay_set(&ctx.map, &w.region(), *steps);
            let mut o = Outcome::new(format!("stay set area {} after {steps} steps", area_of(&s)));
            if !s.equals(&att) {
                o.diff(
                    "points staying in the window",
                    format!("the declared attractor (area {})", area_of(&att)),
                    source,
                    format!("area {}", area_of(&s)),
                );
            }
            Ok(o)
        }
        Action::Tiling {
            max_period,
            depth,
            expect,
        } => tiling_step(ctx, *max_period, *depth, expect.as_ref()),
        Action::Annulus { on, words, expect } => {
            let m = ctx.target(*on)?;
            let mut cells = Vec::new();
            for s in words {
                let w = ctx.word(*on, s)?;
                for region in orbit_cells(m, &w) {
                    cells.push(Labelled {
                        label: s.clone(),
                        region,
                    });
                }
            }
            let regions: Vec<ConvexRegion> = cells.iter().map(|c| c.region.clone()).collect();
            let r = annulus_check(&regions);
            let mut o = Outcome::new(format!(
                "{} cells, {} components, winding {}",
                r.cells, r.components, r.winding
            ));
            if r.connected() != expect.value.connected {
                o.diff(
                    "connected",
                    expect.value.connected.to_string(),
                    &expect.source,
                    r.connected().to_string(),
                );
            }
            if r.encloses_origin() != expect.value.encloses_origin {
                o.diff(
                    "encloses the origin",
                    expect.value.encloses_origin.to_string(),
                    &expect.source,
                    r.encloses_origin().to_string(),
                );
            }
            ctx.cells.extend(cells);
            Ok(o)
        }
        Action::Language {
            graph,
            length,
            depth,
            expect_count,
        } => {
            let text = match graph {
                serde_json::Value::String(p) => {
                    let path = ctx.dir.join(p);
                    std::fs::read_to_string(&path).map_err(|source| InputError::Io {
                        path: path.display().to_string(),
                        source,
                    })?
                }
                v => v.to_string(),
            };
            let g =
                SubstitutionGraph::from_json(&text).map_err(|e| invalid(format!("graph: {e}")))?;
            let lang = graph_language(&g, *length, *depth);
            let mut o = Outcome::new(format!("{} factors of length ≤ {length}", lang.len()));
            let mut by_len = BTreeMap::new();
            for w in &lang {
                *by_len.entry(w.len()).or_insert(0usize) += 1;
            }
            o.detail(format!("by length {by_len:?}"));
            if let Some(e) = expect_count {
                if e.value != lang.len() {
                    o.diff(
                        "factor count",
                        e.value.to_string(),
                        &e.source,
                        lang.len().to_string(),
                    );
                }
            }
            Ok(o)
        }
        Action::Render { layers, window } => {
            let w = Window::parse(ctx.map.order, window)?;
            let parts = collect_layers(ctx, layers);
            let svg = render_svg(&parts, &w);
            let drawn = svg.matches("<polygon").count();
            ctx.render = Some((layers.clone(), w));
            Ok(Outcome::new(format!("{drawn} regions inside the window")))
        }
    }
}

fn first_return_step(
    ctx: &mut Ctx,
    max_steps: Option<usize>,
    expect: Option<&Expect<BTreeMap<String, String>>>,
) -> Result<Outcome, InputError> {
    if ctx.cone.is_none() {
        match base_cone(&ctx.map) {
            Ok(c) => ctx.cone = Some(c),
            Err(e) => return Ok(Outcome::fail(format!("no cone: {e}"))),
        }
    }
    let cone = ctx.cone.as_ref().expect("set above").region.clone();
    let steps = ctx.steps(max_steps);
    let mut rs = match first_return(&ctx.map, &RegionSet::single(cone), steps) {
        Ok(rs) => rs,
        Err(e) => return Ok(Outcome::fail(format!("first return failed: {e}"))),
    };
    let expected = match expect {
        Some(e) => {
            let mut t = Vec::new();
            for (label, w) in &e.value {
                t.push((label.clone(), ctx.word(Level::Base, w)?));
            }
            Some((t, e.source.as_str()))
        }
        None => None,
    };
    let mut o = Outcome::new(format!("{} pieces", rs.pieces.len()));
    if let Some((t, source)) = &expected {
        rs.align(t);
        table_diffs(&mut o, &rs, t, source, &ctx.map.alphabet);
    }
    o.detail(rs.table());
    if !rs.is_resolved() {
        o.pass = false;
        o.summary = format!(
            "{} pieces, {} regions still travelling after {steps} steps (raise max_steps or PWROT_MAX_STEPS)",
            rs.pieces.len(),
            rs.unresolved.len()
        );
    } else {
        match induced_map(&rs) {
            Ok(t) => ctx.induced = Some(t),
            Err(e) => {
                o.pass = false;
                o.detail(format!("induced map: {e}"));
            }
        }
    }
    ctx.rs = Some(rs);
    Ok(o)
}

/// Pairs each expected row with the computed piece of the same label.
fn table_diffs(
    o: &mut Outcome,
    rs: &ReturnStructure,
    t: &[(String, Word)],
    source: &str,
    alphabet: &[String],
) {
    let mut used = vec![false; rs.pieces.len()];
    for (label, w) in t {
        if let Some(i) = (0..rs.pieces.len())
            .find(|&i| !used[i] && rs.pieces[i].label == *label && rs.pieces[i].word == *w)
        {
            used[i] = true;
        }
    }
    for (label, w) in t {
        let ok = rs.pieces.iter().any(|p| p.label == *label && p.word == *w);
        if ok {
            continue;
        }
        let other = (0..rs.pieces.len()).find(|&i| !used[i] && rs.pieces[i].label == *label);
        let computed = match other {
            Some(i) => {
                used[i] = true;
                exponent_form(alphabet, &rs.pieces[i].word)
            }
            None => "no such piece".into(),
        };
        o.diff(
            format!("piece {label}"),
            exponent_form(alphabet, w),
            source,
            computed,
        );
    }
    for (i, p) in rs.pieces.iter().enumerate() {
        if !used[i] && !t.iter().any(|(l, w)| *l == p.label && *w == p.word) {
            o.diff(
                format!("piece {}", p.label),
                "no such piece",
                source,
                exponent_form(alphabet, &p.word),
            );
        }
    }
}

fn induce_step(
    ctx: &mut Ctx,
    piece: &str,
    max_steps: Option<usize>,
    allow_rotation: bool,
    expect: Option<&Expect<BTreeMap<String, String>>>,
) -> Result<Outcome, InputError> {
    let steps = ctx.steps(max_steps);
    let parent = ctx.target(Level::Induced)?;
    let sym = parent
        .symbol_by_name(piece)
        .ok_or_else(|| invalid(format!("no piece '{piece}' in the induced map")))?;
    let base = RegionSet::new(parent.domains_of(sym).cloned().collect());
    let rs = match first_return(parent, &base, steps) {
        Ok(rs) => rs,
        Err(e) => {
            return Ok(Outcome::fail(format!(
                "first return to {piece} failed: {e}"
            )))
        }
    };
    if !rs.is_resolved() {
        let mut o = Outcome::fail(format!(
            "{} regions still travelling after {steps} steps (raise max_steps or PWROT_MAX_STEPS)",
            rs.unresolved.len()
        ));
        o.detail(rs.table());
        return Ok(o);
    }
    let found = find_conjugacy_with(parent, &rs, allow_rotation);
    let mut o = Outcome::new(format!(
        "first return to {piece}: {} pieces",
        rs.pieces.len()
    ));
    o.detail(rs.table());
    match &found {
        Some((h, s)) => {
            o.summary.push_str(&format!(
                ", renormalizes with squared scale {}",
                fmt_real(h.scale2())
            ));
            o.detail(s.table());
        }
        None => {
            o.pass = false;
            o.summary
                .push_str(", no similarity conjugates it to the parent");
        }
    }
    if let Some(e) = expect {
        match &found {
            Some((_, s)) => {
                let got = s.to_map();
                let letters: BTreeSet<&String> = got.keys().chain(e.value.keys()).collect();
                for l in letters {
                    let (want, have) = (e.value.get(l), got.get(l));
                    if want != have {
                        o.diff(
                            format!("image of {l}"),
                            want.cloned().unwrap_or_else(|| "none".into()),
                            &e.source,
                            have.cloned().unwrap_or_else(|| "none".into()),
                        );
                    }
                }
            }
            None => {
                let want: Vec<String> = e.value.iter().map(|(k, v)| format!("{k}→{v}")).collect();
                o.diff("substitution", want.join(" "), &e.source, "none");
            }
        }
    }
    let (conjugacy, substitution) = match found {
        Some((h, s)) => (Some(h), Some(s)),
        None => (None, None),
    };
    ctx.extractions.insert(
        piece.to_string(),
        Extraction {
            structure: rs,
            substitution,
            conjugacy,
        },
    );
    Ok(o)
}

fn invariant_sets_step(
    ctx: &mut Ctx,
    sets: &[SetSpec],
    source: &str,
) -> Result<Outcome, InputError> {
    let t = ctx.target(Level::Induced)?.clone();
    let mut named: Vec<(String, RegionSet)> = Vec::new();
    let mut rest = None;
    for s in sets {
        let kinds = [!s.letters.is_empty(), s.orbit_of.is_some(), s.rest];
        if kinds.iter().filter(|k| **k).count() != 1 {
            return Err(invalid(format!(
                "set '{}' needs exactly one of letters, orbit_of, rest",
                s.name
            )));
        }
        if s.rest {
            rest = Some(s.name.clone());
            continue;
        }
        let set = if let Some(p) = &s.orbit_of {
            let ex = ctx
                .extractions
                .get(p)
                .ok_or_else(|| InputError::Missing(format!("no induction on '{p}'")))?;
            RegionSet::new(
                ex.structure
                    .pieces
                    .iter()
                    .flat_map(|q| prefix_images(&t, &q.region, &q.word))
                    .collect(),
            )
        } else {
            let mut pieces = Vec::new();
            for l in &s.letters {
                let sym: Symbol = t
                    .symbol_by_name(l)
                    .ok_or_else(|| invalid(format!("set '{}': no letter '{l}'", s.name)))?;
                pieces.extend(t.domains_of(sym).cloned());
            }
            RegionSet::new(pieces)
        };
        named.push((s.name.clone(), set));
    }
    if let Some(name) = rest {
        let mut left = t.domain_set();
        for (_, s) in &named {
            left = left.subtract(s);
        }
        named.push((name, left));
    }
    let mut o = Outcome::new(format!("{} sets", named.len()));
    for (i, (a, sa)) in named.iter().enumerate() {
        let img = image(&t, sa);
        let inv = img.subset_of(sa) && sa.subset_of(&img);
        o.detail(format!("{a}: {} pieces, area {}", sa.len(), area_of(sa)));
        if sa.is_empty() {
            o.diff(a.to_string(), "nonempty", source, "empty");
        } else if !inv {
            o.diff(
                a.to_string(),
                "invariant",
                source,
                "image differs from the set",
            );
        }
        for (b, sb) in &named[i + 1..] {
            if !sa.intersect(sb).is_empty() {
                o.diff(format!("{a} and {b}"), "disjoint", source, "overlapping");
            }
        }
    }
    for (name, s) in named {
        for region in s.iter() {
            ctx.sets.push(Labelled {
                label: name.clone(),
                region: region.clone(),
            });
        }
    }
    Ok(o)
}

fn seed_set(ctx: &Ctx, seed: &Seed) -> Result<RegionSet, InputError> {
    let n = ctx.map.order;
    let mut set = RegionSet::default();
    for poly in &seed.polygons {
        let pts = poly
            .iter()
            .map(|p| parse_point(n, p))
            .collect::<Result<Vec<_>, _>>()?;
        set = set.union(&RegionSet::single(ConvexRegion::hull(&pts)));
    }
    for r in &seed.rects {
        set = set.union(&RegionSet::single(Window::parse(n, r)?.region()));
    }
    for w in &seed.cells {
        let w = ctx.word(Level::Base, w)?;
        set = set.union(&RegionSet::new(orbit_cells(&ctx.map, &w)));
    }
    if !seed.hull_of_cells.is_empty() {
        let mut pts = Vec::new();
        for w in &seed.hull_of_cells {
            let w = ctx.word(Level::Base, w)?;
            for c in orbit_cells(&ctx.map, &w) {
                pts.extend(c.vertices());
            }
        }
        set = set.union(&RegionSet::single(ConvexRegion::hull(&pts)));
    }
    if set.is_empty() {
        return Err(invalid("attractor seed is empty"));
    }
    Ok(set)
}

fn tiling_step(
    ctx: &mut Ctx,
    max_period: usize,
    depth: usize,
    expect: Option<&Expect<TilingExpect>>,
) -> Result<Outcome, InputError> {
    let n = ctx.map.order;
    let att = ctx
        .attractor
        .clone()
        .ok_or_else(|| InputError::Missing("no attractor".into()))?;
    let rep = verify_tiling(&ctx.map, &att, max_period, depth);
    let periods = rep.periods();
    let mut o = Outcome::new(format!(
        "{} tiles in {} orbits, periods {periods:?}, uncovered area {}",
        rep.tiles.len(),
        rep.orbit_count(),
        fmt_real(&rep.leftover_area(n))
    ));
    for id in 0..rep.orbit_count() {
        let tiles: Vec<_> = rep.orbit(id).collect();
        if let Some(t) = tiles.first() {
            o.detail(format!(
                "orbit {id}: {} tiles, period {}, coding ({})^ω, tile area {}",
                tiles.len(),
                t.period,
                word_string(&ctx.map.alphabet, &t.word),
                t.region
                    .area()
                    .finite()
                    .map(fmt_real)
                    .unwrap_or_else(|| "infinite".into())
            ));
        }
    }
    let lb: Vec<String> = rep.leftover_by_depth.iter().map(fmt_real).collect();
    o.detail(format!("uncovered area by depth {lb:?}"));
    if let Some(e) = expect {
        let v = &e.value;
        if let Some(p) = &v.periods {
            if *p != periods {
                o.diff(
                    "tile periods",
                    format!("{p:?}"),
                    &e.source,
                    format!("{periods:?}"),
                );
            }
        }
        if let Some(a) = &v.tile_area {
            let want = real(n, a)?;
            let areas: BTreeSet<String> = rep
                .tiles
                .iter()
                .map(|t| {
                    t.region
                        .area()
                        .finite()
                        .map(fmt_real)
                        .unwrap_or_else(|| "infinite".into())
                })
                .collect();
            let all = rep.tiles.iter().all(|t| {
                t.region
                    .area()
                    .finite()
                    .and_then(|x| x.lift(n).ok())
                    .is_some_and(|x| x == want)
            });
            if !all {
                o.diff("tile area", a.clone(), &e.source, format!("{areas:?}"));
            }
        }
        if let Some(c) = v.covers {
            let covered = rep.leftover.is_empty();
            if covered != c {
                o.diff(
                    "tiles cover the set",
                    c.to_string(),
                    &e.source,
                    format!(
                        "{covered} (uncovered area {})",
                        fmt_real(&rep.leftover_area(n))
                    ),
                );
            }
        }
        let lbd = &rep.leftover_by_depth;
        for pair in v.decreasing_at.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let ok = a < b && b < lbd.len() && lbd[b] < lbd[a];
            if !ok {
                o.diff(
                    format!("uncovered area from depth {a} to {b}"),
                    "strict decrease",
                    &e.source,
                    format!("{lb:?}"),
                );
            }
        }
    }
    ctx.tiling = Some(rep);
    Ok(o)
}

fn collect_layers(ctx: &Ctx, layers: &[RenderLayer]) -> Vec<Labelled> {
    let mut out = Vec::new();
    let one = |label: &str, rs: &RegionSet, out: &mut Vec<Labelled>| {
        for r in rs.iter() {
            out.push(Labelled {
                label: label.to_string(),
                region: r.clone(),
            });
        }
    };
    for l in layers {
        match l {
            RenderLayer::Domains => {
                for b in &ctx.map.branches {
                    out.push(Labelled {
                        label: ctx.map.alphabet[b.symbol as usize].clone(),
                        region: b.domain.clone(),
                    });
                }
            }
            RenderLayer::Return => {
                if let Some(rs) = &ctx.rs {
                    for p in &rs.pieces {
                        out.push(Labelled {
                            label: p.label.clone(),
                            region: p.region.clone(),
                        });
                    }
                }
            }
            RenderLayer::Cells => out.extend(ctx.cells.iter().cloned()),
            RenderLayer::Sets => out.extend(ctx.sets.iter().cloned()),
            RenderLayer::Sigma => {
                if let Some(s) = &ctx.sigma {
                    one("sigma", s, &mut out);
                }
            }
            RenderLayer::Attractor => {
                if let Some(s) = &ctx.attractor {
                    one("attractor", s, &mut out);
                }
            }
            RenderLayer::Tiling => {
                if let Some(t) = &ctx.tiling {
                    for tile in &t.tiles {
                        out.push(Labelled {
                            label: format!("orbit {} period {}", tile.orbit, tile.period),
                            region: tile.region.clone(),
                        });
                    }
                    one("uncovered", &t.leftover, &mut out);
                }
            }
        }
    }
    out
}
