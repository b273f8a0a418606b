//! Per-order tables for ℚ(ζ_N): the cyclotomic polynomial, power reduction,
//! Galois action and the data needed to evaluate real and imaginary parts.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;

/// Largest order accepted by the registry. Tables are stored as i64, which
/// holds the Chebyshev-type coefficients up to this order, and the initial
/// float enclosure of 2cos(2π/N) is far narrower than the root gaps.
pub const MAX_ORDER: u32 = 96;

#[derive(Debug)]
pub struct FieldData {
    pub n: u32,
    pub degree: usize,
    /// x^k mod Φ_N for k in 0..max(N, 2φ-1), each of length φ.
    pub powmod: Vec<Vec<i64>>,
    /// Matrices of ζ ↦ ζ^k for every unit k ≠ 1, row j is the image of ζ^j.
    pub galois: Vec<(u32, Vec<Vec<i64>>)>,
    /// Complex conjugation, ζ ↦ ζ^{-1}.
    pub conj: Vec<Vec<i64>>,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub eta: EtaData,
}

/// Data on η = 2cos(2π/N), a generator of the maximal real subfield.
#[derive(Debug)]
pub struct EtaData {
    /// Minimal polynomial of η, coefficients low to high.
    pub minpoly: Vec<i64>,
    /// 2cos(2πk/N) as an integer polynomial in η (k = 0 gives the constant 2).
    pub cos_polys: Vec<Vec<i64>>,
    /// sin(2πk/N)/sin(2π/N) as an integer polynomial in η.
    pub sin_polys: Vec<Vec<i64>>,
    pub approx: f64,
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of integer polynomials by a monic divisor.
fn poly_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![0];
    }
    let mut quot = vec![0i64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (j, d) in den.iter().enumerate() {
            rem[k + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    // x^n - 1 = prod_{d | n} Φ_d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    let mut acc = vec![1i64];
    for d in 1..n {
        if n.is_multiple_of(d) {
            acc = poly_mul(&acc, &cyclotomic_poly(d));
        }
    }
    poly_div_monic(&num, &acc)
}

pub fn totient(n: u32) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

fn chebyshev_like(count: usize, c0: Vec<i64>, c1: Vec<i64>) -> Vec<Vec<i64>> {
    // P_{k+1} = x P_k - P_{k-1}
    let mut out = vec![c0, c1];
    while out.len() < count.max(2) {
        let k = out.len();
        let mut next = vec![0i64; out[k - 1].len() + 1];
        for (i, c) in out[k - 1].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in out[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        while next.len() > 1 && *next.last().unwrap() == 0 {
            next.pop();
        }
        out.push(next);
    }
    out.truncate(count);
    out
}

impl FieldData {
    fn build(n: u32) -> FieldData {
        let phi = cyclotomic_poly(n);
        let degree = phi.len() - 1;
        let table_len = (n as usize).max(2 * degree);
        let mut powmod = Vec::with_capacity(table_len);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..table_len {
            powmod.push(cur.clone());
            // multiply by x and reduce with the monic modulus
            let top = cur[degree - 1];
            let mut next = vec![0i64; degree];
            for j in (1..degree).rev() {
                next[j] = cur[j - 1];
            }
            for (j, slot) in next.iter_mut().enumerate() {
                *slot -= top * phi[j];
            }
            cur = next;
        }
        let image_of = |k: u32| -> Vec<Vec<i64>> {
            (0..degree)
                .map(|j| powmod[((j as u64 * k as u64) % n as u64) as usize].clone())
                .collect()
        };
        let galois: Vec<(u32, Vec<Vec<i64>>)> = (2..n.max(2))
            .filter(|k| k.gcd(&n) == 1)
            .map(|k| (k, image_of(k)))
            .collect();
        let conj = if n <= 2 { image_of(1) } else { image_of(n - 1) };
        let cos = (0..degree)
            .map(|k| (2.0 * PI * k as f64 / n as f64).cos())
            .collect();
        let sin = (0..degree)
            .map(|k| (2.0 * PI * k as f64 / n as f64).sin())
            .collect();
        let eta = EtaData::build(n, &phi, degree);
        FieldData {
            n,
            degree,
            powmod,
            galois,
            conj,
            cos,
            sin,
            eta,
        }
    }
}

impl EtaData {
    fn build(n: u32, phi: &[i64], degree: usize) -> EtaData {
        let cos_polys = chebyshev_like(degree.max(1), vec![2], vec![0, 1]);
        let sin_polys = chebyshev_like(degree.max(1), vec![0], vec![1]);
        let minpoly = match n {
            1 => vec![-2, 1],
            2 => vec![2, 1],
            _ => {
                // Φ_N(x) = x^m Ψ(x + 1/x) with Φ_N palindromic of degree 2m.
                let m = degree / 2;
                let all = chebyshev_like(m + 1, vec![2], vec![0, 1]);
                let mut psi = vec![0i64; m + 1];
                psi[0] += phi[m];
                for k in 1..=m {
                    for (i, c) in all[k].iter().enumerate() {
                        psi[i] += phi[m + k] * c;
                    }
                }
                psi
            }
        };
        EtaData {
            minpoly,
            cos_polys,
            sin_polys,
            approx: 2.0 * (2.0 * PI / n as f64).cos(),
        }
    }
}

static REGISTRY: OnceLock<Mutex<HashMap<u32, &'static FieldData>>> = OnceLock::new();

/// Returns the shared tables for ℚ(ζ_n). Panics outside 1..=MAX_ORDER;
/// public constructors validate first.
pub fn field(n: u32) -> &'static FieldData {
    assert!(
        (1..=MAX_ORDER).contains(&n),
        "unsupported cyclotomic order {n}"
    );
    let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = reg.lock().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return f;
    }
    let built = FieldData::build(n);
    let mut guard = reg.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(n).or_insert_with(|| Box::leak(Box::new(built)))
}
