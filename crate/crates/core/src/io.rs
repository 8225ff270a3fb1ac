//! JSON tensor files.
//!
//! ```text
//! {"kind":"weyl","w_plus":[[..],[..],[..]],"w_minus":[[..],[..],[..]]}
//! {"kind":"riemann","components":[{"i":0,"j":1,"k":0,"l":1,"v":1.0}, ...]}
//! {"kind":"kahler","components":[{"a":1,"b":1,"c":2,"d":2,"re":1.0,"im":0.0}, ...]}
//! ```
//!
//! Riemann indices run over `0..=3`, Kähler indices over `1..=2`. Listed
//! components form a generating set; every symmetry image of a listed
//! component is filled in, and images that are listed twice must agree.

use std::path::Path;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curvature::{pair_group, Riemann4, Tensor4, WeylBlocks};
use crate::error::{Error, Result};
use crate::kahler::{orbit_slots, KahlerCurv2};

#[derive(Clone, Debug, PartialEq)]
pub enum TensorFile {
    Weyl(WeylBlocks),
    Riemann(Riemann4),
    Kahler(KahlerCurv2),
}

impl TensorFile {
    pub fn kind(&self) -> &'static str {
        match self {
            TensorFile::Weyl(_) => "weyl",
            TensorFile::Riemann(_) => "riemann",
            TensorFile::Kahler(_) => "kahler",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Repr {
    Weyl {
        w_plus: [[f64; 3]; 3],
        w_minus: [[f64; 3]; 3],
    },
    Riemann {
        components: Vec<RiemannEntry>,
    },
    Kahler {
        components: Vec<KahlerEntry>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiemannEntry {
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    v: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KahlerEntry {
    a: usize,
    b: usize,
    c: usize,
    d: usize,
    re: f64,
    #[serde(default)]
    im: f64,
}

fn rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)]))
}

fn from_json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof => Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
        _ => Error::Schema(e.to_string()),
    }
}

/// Parses and validates a tensor file against the invariant tolerance `tol`.
pub fn parse_tensor(text: &str, tol: f64) -> Result<TensorFile> {
    let repr: Repr = serde_json::from_str(text).map_err(from_json_error)?;
    match repr {
        Repr::Weyl { w_plus, w_minus } => {
            let m = |r: [[f64; 3]; 3]| Matrix3::from_fn(|i, j| r[i][j]);
            let (p, q) = (m(w_plus), m(w_minus));
            if p.iter().chain(q.iter()).any(|x| !x.is_finite()) {
                return Err(Error::Schema("non-finite block entry".into()));
            }
            let asym = (p - p.transpose()).amax().max((q - q.transpose()).amax());
            if asym > tol {
                return Err(Error::Invariant(format!("blocks are not symmetric (residual {asym:e})")));
            }
            if p.trace().abs() > tol || q.trace().abs() > tol {
                return Err(Error::NotTraceFree {
                    plus: p.trace(),
                    minus: q.trace(),
                });
            }
            Ok(TensorFile::Weyl(WeylBlocks::new(p, q)?))
        }
        Repr::Riemann { components } => Ok(TensorFile::Riemann(fill_riemann(&components, tol)?)),
        Repr::Kahler { components } => Ok(TensorFile::Kahler(fill_kahler(&components, tol)?)),
    }
}

fn fill_riemann(entries: &[RiemannEntry], tol: f64) -> Result<Riemann4> {
    let mut t = Tensor4::zero();
    let mut seen = [false; 256];
    for (n, e) in entries.iter().enumerate() {
        if [e.i, e.j, e.k, e.l].iter().any(|&x| x > 3) {
            return Err(Error::Schema(format!("component {n}: indices must lie in 0..=3")));
        }
        if !e.v.is_finite() {
            return Err(Error::Schema(format!("component {n}: non-finite value")));
        }
        for (g, sign) in pair_group() {
            let [a, b, c, d] = g([e.i, e.j, e.k, e.l]);
            let slot = crate::curvature::idx(a, b, c, d);
            let v = if (a == b || c == d) && e.v != 0.0 {
                return Err(Error::Invariant(format!(
                    "component {n} ({},{},{},{}) must vanish by antisymmetry",
                    e.i, e.j, e.k, e.l
                )));
            } else {
                sign * e.v
            };
            if seen[slot] && (t.0[slot] - v).abs() > tol {
                return Err(Error::Invariant(format!(
                    "component {n} conflicts with an earlier entry at ({a},{b},{c},{d})"
                )));
            }
            if !seen[slot] {
                t.0[slot] = v;
                seen[slot] = true;
            }
        }
    }
    Riemann4::from_tensor(t, tol)
}

fn fill_kahler(entries: &[KahlerEntry], tol: f64) -> Result<KahlerCurv2> {
    let mut t = KahlerCurv2::zero();
    let mut seen = [false; 16];
    for (n, e) in entries.iter().enumerate() {
        let ix = [e.a, e.b, e.c, e.d];
        if ix.iter().any(|&x| !(1..=2).contains(&x)) {
            return Err(Error::Schema(format!("component {n}: indices must lie in 1..=2")));
        }
        if !e.re.is_finite() || !e.im.is_finite() {
            return Err(Error::Schema(format!("component {n}: non-finite value")));
        }
        let v = Complex64::new(e.re, e.im);
        for (slot, conj) in orbit_slots(ix.map(|x| x - 1)) {
            let w = if conj { v.conj() } else { v };
            if seen[slot] {
                if (t.raw()[slot] - w).norm() > tol {
                    return Err(Error::Invariant(format!(
                        "component {n} ({},{},{},{}) conflicts with its symmetry images",
                        e.a, e.b, e.c, e.d
                    )));
                }
            } else {
                t.set_slot(slot, w);
                seen[slot] = true;
            }
        }
    }
    Ok(t)
}

/// Smallest slot of each Kähler orbit, in increasing order.
fn kahler_representatives() -> Vec<[usize; 4]> {
    let mut reps = Vec::new();
    let mut covered = [false; 16];
    for slot in 0..16 {
        if covered[slot] {
            continue;
        }
        let ix = [(slot >> 3) & 1, (slot >> 2) & 1, (slot >> 1) & 1, slot & 1];
        reps.push(ix);
        for (s, _) in orbit_slots(ix) {
            covered[s] = true;
        }
    }
    reps
}

fn riemann_entries(r: &Riemann4) -> Vec<RiemannEntry> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut out = Vec::new();
    for (p, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[p..] {
            let v = r.get(i, j, k, l);
            if v != 0.0 {
                out.push(RiemannEntry { i, j, k, l, v });
            }
        }
    }
    out
}

fn kahler_entries(t: &KahlerCurv2) -> Vec<KahlerEntry> {
    kahler_representatives()
        .into_iter()
        .filter_map(|[a, b, c, d]| {
            let z = t.get(a, b, c, d);
            (z != Complex64::new(0.0, 0.0)).then_some(KahlerEntry {
                a: a + 1,
                b: b + 1,
                c: c + 1,
                d: d + 1,
                re: z.re,
                im: z.im,
            })
        })
        .collect()
}

/// Canonical text of a tensor file: pretty JSON with a trailing newline.
pub fn write_tensor(f: &TensorFile) -> String {
    let repr = match f {
        TensorFile::Weyl(w) => Repr::Weyl {
            w_plus: rows(&w.w_plus),
            w_minus: rows(&w.w_minus),
        },
        TensorFile::Riemann(r) => Repr::Riemann {
            components: riemann_entries(r),
        },
        TensorFile::Kahler(k) => Repr::Kahler {
            components: kahler_entries(k),
        },
    };
    let mut s = serde_json::to_string_pretty(&repr).expect("finite values serialize");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads, parses, and validates a tensor file; returns it with the digest of its bytes.
pub fn read_tensor_file(path: &Path, tol: f64) -> Result<(TensorFile, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
        line: 1,
        column: e.valid_up_to() + 1,
        message: "input is not UTF-8".into(),
    })?;
    Ok((parse_tensor(text, tol)?, sha256_hex(&bytes)))
}

pub fn write_tensor_file(path: &Path, f: &TensorFile) -> Result<String> {
    let text = write_tensor(f);
    std::fs::write(path, &text).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(text.as_bytes()))
}
