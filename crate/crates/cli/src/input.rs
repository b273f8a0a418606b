//! Parsing of map descriptions, points and windows given as text.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use pwrot_core::cyclotomic::AlgebraicComplex;
use pwrot_core::dynamics::{
    build_map, coordinate_order, parse_angle, parse_rational, PiecewiseMap, Variant,
};
use pwrot_core::geometry::{ConvexRegion, Point, Real};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario {path}: {source}")]
    Schema {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
    /// A prerequisite computation is absent because an earlier action failed.
    #[error("{0}")]
    Missing(String),
}

pub fn invalid(s: impl Into<String>) -> InputError {
    InputError::Invalid(s.into())
}

/// A map given by its angle and either a translation parameter or two
/// rotation centers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub theta: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<[String; 2]>,
}

impl MapSpec {
    pub fn build(&self) -> Result<PiecewiseMap, InputError> {
        let (p, q) = parse_angle(&self.theta)
            .ok_or_else(|| invalid(format!("bad angle '{}', expected p/q", self.theta)))?;
        let variant = match (&self.sigma, &self.centers) {
            (Some(_), Some(_)) => return Err(invalid("give either sigma or centers, not both")),
            (None, Some([c0, c1])) => {
                let n = coordinate_order(q);
                Variant::General {
                    c0: parse_point(n, c0)?.to_complex(),
                    c1: parse_point(n, c1)?.to_complex(),
                }
            }
            (s, None) => {
                let s = s.as_deref().unwrap_or("0");
                Variant::Bijective {
                    sigma: parse_rational(s).ok_or_else(|| invalid(format!("bad sigma '{s}'")))?,
                }
            }
        };
        build_map(p, q, &variant).map_err(|e| invalid(format!("map: {e}")))
    }
}

/// Parses "(x, y)" with rational coordinates, or a field element written
/// "cyclo(N)[c0, c1, ...]" in the basis of powers of e^{2iπ/N}.
pub fn parse_point(n: u32, s: &str) -> Result<Point, InputError> {
    let t = s.trim();
    if t.starts_with("cyclo(") {
        let z = AlgebraicComplex::from_str(t).map_err(|e| invalid(format!("point '{s}': {e}")))?;
        let z = z
            .lift(n)
            .map_err(|e| invalid(format!("point '{s}' is not in the map's field: {e}")))?;
        return Point::from_complex(&z).map_err(|e| invalid(format!("point '{s}': {e}")));
    }
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(t);
    let (x, y) = inner
        .split_once(',')
        .ok_or_else(|| invalid(format!("point '{s}': expected (x, y)")))?;
    Ok(Point::new(real(n, x)?, real(n, y)?))
}

pub fn real(n: u32, s: &str) -> Result<Real, InputError> {
    let r =
        parse_rational(s.trim()).ok_or_else(|| invalid(format!("bad rational '{}'", s.trim())))?;
    Ok(Real::rational(n, &r))
}

/// An axis-parallel rectangle with rational corners.
#[derive(Clone, Debug)]
pub struct Window {
    pub x0: Real,
    pub y0: Real,
    pub x1: Real,
    pub y1: Real,
    /// The text it was parsed from, normalised.
    pub text: String,
}

impl Window {
    /// Parses "x0,y0,x1,y1".
    pub fn parse(n: u32, s: &str) -> Result<Window, InputError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(invalid(format!("window '{s}': expected x0,y0,x1,y1")));
        }
        let v = parts
            .iter()
            .map(|p| real(n, p))
            .collect::<Result<Vec<_>, _>>()?;
        if v[0] >= v[2] || v[1] >= v[3] {
            return Err(invalid(format!("window '{s}' is empty")));
        }
        Ok(Window {
            x0: v[0].clone(),
            y0: v[1].clone(),
            x1: v[2].clone(),
            y1: v[3].clone(),
            text: parts.join(","),
        })
    }

    pub fn region(&self) -> ConvexRegion {
        ConvexRegion::rect(&self.x0, &self.x1, &self.y0, &self.y1)
    }

    pub fn to_f64(&self) -> (f64, f64, f64, f64) {
        (
            self.x0.to_f64(),
            self.y0.to_f64(),
            self.x1.to_f64(),
            self.y1.to_f64(),
        )
    }
}
