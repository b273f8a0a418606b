//! Plain-text tables and a floating-point cross-check of orbit codings.

use pwrot_core::dynamics::{PiecewiseMap, Symbol, Word};
use pwrot_core::induction::ReturnStructure;
use pwrot_core::symbolic::Substitution;

/// A return table, optionally followed by the substitution it induces.
pub fn emit_tables(rs: &ReturnStructure, sub: Option<&Substitution>) -> String {
    let mut out = rs.table();
    if let Some(s) = sub {
        out.push('\n');
        out.push_str(&s.table());
    }
    out
}

/// Branch chosen by float membership; None when no open domain holds the
/// point.
fn float_branch(m: &PiecewiseMap, (x, y): (f64, f64)) -> Option<Symbol> {
    m.branches
        .iter()
        .find(|b| {
            b.domain.halfplanes().iter().all(|h| {
                let (a, bb, c) = h.to_f64();
                a * x + bb * y + c > 0.0
            })
        })
        .map(|b| b.symbol)
}

/// Codes up to `n` steps of the orbit in double precision. Stops early when
/// the point leaves every domain.
pub fn float_coding(m: &PiecewiseMap, p: (f64, f64), n: usize) -> Word {
    let mut w = Vec::new();
    let (mut x, mut y) = p;
    for _ in 0..n {
        let Some(s) = float_branch(m, (x, y)) else {
            break;
        };
        let g = m.isometry_of(s).expect("symbol of the map");
        let (rr, ri) = g.rot().to_f64();
        let (tr, ti) = g.trans().to_f64();
        (x, y) = (rr * x - ri * y + tr, rr * y + ri * x + ti);
        w.push(s);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::{parse_point, MapSpec};

    #[test]
    fn float_and_exact_codings_agree_off_the_boundary() {
        let m = MapSpec {
            theta: "1/6".into(),
            sigma: Some("0".into()),
            centers: None,
        }
        .build()
        .unwrap();
        let p = parse_point(m.order, "(1/7, 3/11)").unwrap();
        let exact = m.code_orbit(&p, 30);
        assert_eq!(exact.hit_boundary_at, None);
        assert_eq!(float_coding(&m, p.to_f64(), 30), exact.word);
    }
}
