use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pwrot_cli::input::{invalid, parse_point, InputError, MapSpec, Window};
use pwrot_cli::render::{coord, render_svg};
use pwrot_cli::scenario::{load, run, RunOptions};
use pwrot_cli::tables::{emit_tables, float_coding};
use pwrot_core::dynamics::PiecewiseMap;
use pwrot_core::geometry::{ConvexRegion, RegionSet};
use pwrot_core::induction::{
    base_cone, default_max_steps, find_conjugacy, first_return, induced_map, ReturnStructure,
};
use pwrot_core::symbolic::{exponent_form, graph_language, word_string, SubstitutionGraph};

/// Writes to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "pwrot",
    version,
    about = "Exact renormalization of piecewise rotations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct MapArgs {
    /// Rotation angle as a fraction of a full turn, e.g. 1/6.
    #[arg(long)]
    theta: String,
    /// Translation parameter of the symmetric family.
    #[arg(long, conflicts_with = "centers")]
    sigma: Option<String>,
    /// Rotation centers of the upper and lower branch, e.g. "(-1,1)" "(-3,1)".
    #[arg(long, num_args = 2, value_names = ["C0", "C1"], allow_hyphen_values = true)]
    centers: Option<Vec<String>>,
}

impl MapArgs {
    fn build(&self) -> Result<PiecewiseMap, InputError> {
        MapSpec {
            theta: self.theta.clone(),
            sigma: self.sigma.clone(),
            centers: self.centers.as_ref().map(|c| [c[0].clone(), c[1].clone()]),
        }
        .build()
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and report each check.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        json: bool,
        /// Include wall-clock times, which makes output nondeterministic.
        #[arg(long)]
        timing: bool,
    },
    /// Code the orbit of a point.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        /// "(x, y)" with rational coordinates, or cyclo(N)[...].
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Repeat the iteration in floating point and compare codings.
        #[arg(long)]
        float_check: bool,
    },
    /// First return to the cone, or to one piece of the induced map.
    Return {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        piece: Option<String>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Induce on a piece of the induced map and extract the substitution.
    Induce {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        piece: String,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// List the factors of a substitution graph language.
    Language {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Run a scenario and print its attractor and tiling as JSON.
    Attractor { scenario: PathBuf },
    /// Run a scenario and draw its render layers as SVG.
    Render {
        scenario: PathBuf,
        /// x0,y0,x1,y1; defaults to the scenario's render window.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn steps_for(m: &PiecewiseMap, local: Option<usize>) -> usize {
    if std::env::var("PWROT_MAX_STEPS").is_ok() {
        return default_max_steps(0);
    }
    local.unwrap_or_else(|| default_max_steps(m.angle.map(|a| a.1).unwrap_or(4)))
}

fn cone_return(m: &PiecewiseMap, cap: usize) -> Result<ReturnStructure, InputError> {
    let c = base_cone(m).map_err(|e| invalid(format!("cone: {e}")))?;
    first_return(m, &RegionSet::single(c.region), cap)
        .map_err(|e| invalid(format!("first return: {e}")))
}

fn report_unresolved(rs: &ReturnStructure, cap: usize) -> u8 {
    if rs.is_resolved() {
        0
    } else {
        eprintln!(
            "{} regions still travelling after {cap} steps; raise --max-steps or PWROT_MAX_STEPS",
            rs.unresolved.len()
        );
        1
    }
}

fn polygon_json(r: &ConvexRegion) -> serde_json::Value {
    let pts: Vec<[String; 2]> = r
        .vertices()
        .iter()
        .map(|v| {
            let (x, y) = v.to_f64();
            [coord(x), coord(y)]
        })
        .collect();
    json!(pts)
}

fn dispatch(cmd: Cmd) -> Result<u8, InputError> {
    match cmd {
        Cmd::Run {
            scenario,
            json,
            timing,
        } => {
            let sc = load(&scenario)?;
            let dir = scenario
                .parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_default();
            let (rep, _) = run(&sc, &dir, RunOptions { timing })?;
            if json {
                outln!(
                    "{}",
                    serde_json::to_string_pretty(&rep).expect("report serializes")
                );
            } else {
                out!("{}", rep.text());
            }
            Ok(rep.exit_code() as u8)
        }
        Cmd::Orbit {
            map,
            point,
            steps,
            float_check,
        } => {
            let m = map.build()?;
            let p = parse_point(m.order, &point)?;
            let c = m.code_orbit(&p, steps);
            outln!("coding: {}", word_string(&m.alphabet, &c.word));
            outln!("exponent form: {}", exponent_form(&m.alphabet, &c.word));
            if let Some(k) = c.hit_boundary_at {
                outln!("meets a discontinuity at step {k}");
            }
            if let Some(k) = c.left_domain_at {
                outln!("leaves the domain at step {k}");
            }
            if float_check {
                let f = float_coding(&m, p.to_f64(), c.word.len());
                if f == c.word {
                    outln!("float check: agrees");
                } else {
                    outln!(
                        "float check: DIFFERS, float coding {}",
                        word_string(&m.alphabet, &f)
                    );
                    return Ok(1);
                }
            }
            Ok(0)
        }
        Cmd::Return {
            map,
            piece,
            max_steps,
        } => {
            let m = map.build()?;
            let cap = steps_for(&m, max_steps);
            let rs = cone_return(&m, cap)?;
            out!("{}", emit_tables(&rs, None));
            let mut code = report_unresolved(&rs, cap);
            if let Some(p) = piece {
                if code != 0 {
                    return Ok(code);
                }
                let t = induced_map(&rs).map_err(|e| invalid(format!("induced map: {e}")))?;
                let sym = t
                    .symbol_by_name(&p)
                    .ok_or_else(|| invalid(format!("no piece '{p}'")))?;
                let base = RegionSet::new(t.domains_of(sym).cloned().collect());
                let rs2 = first_return(&t, &base, cap)
                    .map_err(|e| invalid(format!("first return: {e}")))?;
                outln!("\nfirst return to {p}");
                out!("{}", emit_tables(&rs2, None));
                code = report_unresolved(&rs2, cap);
            }
            Ok(code)
        }
        Cmd::Induce {
            map,
            piece,
            max_steps,
        } => {
            let m = map.build()?;
            let cap = steps_for(&m, max_steps);
            let rs = cone_return(&m, cap)?;
            if report_unresolved(&rs, cap) != 0 {
                return Ok(1);
            }
            let t = induced_map(&rs).map_err(|e| invalid(format!("induced map: {e}")))?;
            let sym = t
                .symbol_by_name(&piece)
                .ok_or_else(|| invalid(format!("no piece '{piece}'")))?;
            let base = RegionSet::new(t.domains_of(sym).cloned().collect());
            let rs2 =
                first_return(&t, &base, cap).map_err(|e| invalid(format!("first return: {e}")))?;
            if report_unresolved(&rs2, cap) != 0 {
                out!("{}", emit_tables(&rs2, None));
                return Ok(1);
            }
            match find_conjugacy(&t, &rs2) {
                Some((h, s)) => {
                    out!("{}", emit_tables(&rs2, Some(&s)));
                    outln!("squared scale {:.6}", h.scale2().to_f64());
                    Ok(0)
                }
                None => {
                    out!("{}", emit_tables(&rs2, None));
                    outln!("no similarity conjugates the return map to the parent");
                    Ok(1)
                }
            }
        }
        Cmd::Language {
            graph,
            length,
            depth,
        } => {
            let text = std::fs::read_to_string(&graph).map_err(|source| InputError::Io {
                path: graph.display().to_string(),
                source,
            })?;
            let g =
                SubstitutionGraph::from_json(&text).map_err(|e| invalid(format!("graph: {e}")))?;
            for w in graph_language(&g, length, depth) {
                outln!("{}", word_string(&g.alphabet, &w));
            }
            Ok(0)
        }
        Cmd::Attractor { scenario } => {
            let sc = load(&scenario)?;
            let dir = scenario
                .parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_default();
            let (rep, art) = run(&sc, &dir, RunOptions::default())?;
            let att = art
                .attractor
                .as_ref()
                .ok_or_else(|| invalid("the scenario declares no attractor"))?;
            let tiles: Vec<serde_json::Value> = art
                .tiling
                .iter()
                .flat_map(|t| t.tiles.iter())
                .map(|t| {
                    json!({
                        "orbit": t.orbit,
                        "period": t.period,
                        "point_period": t.point_period,
                        "polygon": polygon_json(&t.region),
                    })
                })
                .collect();
            let out = json!({
                "scenario": sc.name,
                "pass": rep.pass,
                "attractor": att.iter().map(polygon_json).collect::<Vec<_>>(),
                "tiles": tiles,
                "uncovered": art.tiling.as_ref().map(|t| t.leftover.iter().map(polygon_json).collect::<Vec<_>>()),
            });
            outln!("{}", serde_json::to_string_pretty(&out).expect("json"));
            Ok(rep.exit_code() as u8)
        }
        Cmd::Render {
            scenario,
            window,
            out,
        } => {
            let sc = load(&scenario)?;
            let dir = scenario
                .parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_default();
            let (rep, art) = run(&sc, &dir, RunOptions::default())?;
            let w = match window {
                Some(s) => Window::parse(art.order, &s)?,
                None => art
                    .window
                    .clone()
                    .ok_or_else(|| invalid("no --window and no render action in the scenario"))?,
            };
            let svg = render_svg(&art.layers, &w);
            std::fs::write(&out, svg).map_err(|source| InputError::Io {
                path: out.display().to_string(),
                source,
            })?;
            if !rep.pass {
                eprintln!("note: some scenario checks failed; run it for details");
            }
            Ok(0)
        }
    }
}
