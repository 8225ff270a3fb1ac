//! Kähler curvature on C², holomorphic sectional curvature over CP¹, and the
//! Laplacian formula at a critical holomorphic direction.
//!
//! Components `R[a,b,c,d]` stand for `R_{a b̄ c d̄}` with indices in `{0, 1}`
//! (the first and second unitary basis vectors). A tensor is determined by
//!
//! ```text
//! a = R0000, d = R1111, c = R0011 (real), e = R0001, f = R1110, B = R0101 (complex)
//! ```
//!
//! and on `v = (cos t, e^{iφ} sin t)` the holomorphic sectional curvature is a
//! trigonometric polynomial of degree 2 in `φ`.

use std::sync::OnceLock;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::bochner::Verdict;
use crate::error::{Error, Result};
use crate::rng::SampleStream;
use crate::Tolerances;

pub type C2 = [Complex64; 2];

const fn kidx(a: usize, b: usize, c: usize, d: usize) -> usize {
    a * 8 + b * 4 + c * 2 + d
}

/// One element of the 8-element symmetry group: an index permutation and
/// whether the value is conjugated.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Sym {
    perm: [usize; 4],
    conj: bool,
}

impl Sym {
    fn apply(&self, i: [usize; 4]) -> [usize; 4] {
        [i[self.perm[0]], i[self.perm[1]], i[self.perm[2]], i[self.perm[3]]]
    }

    fn then(&self, other: &Sym) -> Sym {
        Sym {
            perm: [
                self.perm[other.perm[0]],
                self.perm[other.perm[1]],
                self.perm[other.perm[2]],
                self.perm[other.perm[3]],
            ],
            conj: self.conj ^ other.conj,
        }
    }
}

/// Closure of `(a,b,c,d) -> (c,b,a,d)`, `-> (a,d,c,b)` and `-> conj (b,a,d,c)`.
fn symmetry_group() -> &'static [Sym] {
    static GROUP: OnceLock<Vec<Sym>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens = [
            Sym { perm: [2, 1, 0, 3], conj: false },
            Sym { perm: [0, 3, 2, 1], conj: false },
            Sym { perm: [1, 0, 3, 2], conj: true },
        ];
        let mut group = vec![Sym { perm: [0, 1, 2, 3], conj: false }];
        let mut k = 0;
        while k < group.len() {
            for g in &gens {
                let h = group[k].then(g);
                if !group.contains(&h) {
                    group.push(h);
                }
            }
            k += 1;
        }
        group
    })
}

fn split(i: usize) -> [usize; 4] {
    [(i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1]
}

fn join(i: [usize; 4]) -> usize {
    kidx(i[0], i[1], i[2], i[3])
}

/// Components `R_{a b̄ c d̄}` on C².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KahlerCurv2 {
    c: [Complex64; 16],
}

impl Default for KahlerCurv2 {
    fn default() -> Self {
        Self::zero()
    }
}

/// The six independent components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KahlerComponents {
    pub a: f64,
    pub c: f64,
    pub d: f64,
    pub e: [f64; 2],
    pub f: [f64; 2],
    pub b: [f64; 2],
}

impl KahlerCurv2 {
    pub fn zero() -> Self {
        Self {
            c: [Complex64::new(0.0, 0.0); 16],
        }
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.c[kidx(a, b, c, d)]
    }

    pub fn raw(&self) -> &[Complex64; 16] {
        &self.c
    }

    /// Builds a tensor from its independent components, filling every orbit.
    pub fn from_components(a: f64, c: f64, d: f64, e: Complex64, f: Complex64, b: Complex64) -> Self {
        let mut t = Self::zero();
        t.fill([0, 0, 0, 0], Complex64::new(a, 0.0));
        t.fill([1, 1, 1, 1], Complex64::new(d, 0.0));
        t.fill([0, 0, 1, 1], Complex64::new(c, 0.0));
        t.fill([0, 0, 0, 1], e);
        t.fill([1, 1, 1, 0], f);
        t.fill([0, 1, 0, 1], b);
        t
    }

    pub fn components(&self) -> KahlerComponents {
        let pair = |z: Complex64| [z.re, z.im];
        KahlerComponents {
            a: self.get(0, 0, 0, 0).re,
            c: self.get(0, 0, 1, 1).re,
            d: self.get(1, 1, 1, 1).re,
            e: pair(self.get(0, 0, 0, 1)),
            f: pair(self.get(1, 1, 1, 0)),
            b: pair(self.get(0, 1, 0, 1)),
        }
    }

    /// Sets `idx` to `v` and every symmetry image accordingly; orbits that
    /// contain their own conjugate keep only the real part.
    fn fill(&mut self, idx: [usize; 4], v: Complex64) {
        let slot = join(idx);
        let real = symmetry_group()
            .iter()
            .any(|g| g.conj && join(g.apply(idx)) == slot);
        let v = if real { Complex64::new(v.re, 0.0) } else { v };
        for g in symmetry_group() {
            self.c[join(g.apply(idx))] = if g.conj { v.conj() } else { v };
        }
    }

    pub(crate) fn set_slot(&mut self, slot: usize, v: Complex64) {
        self.c[slot] = v;
    }

    /// Sets a component together with its symmetry images; the caller's
    /// value must be compatible with the orbit (e.g. real for `R0000`).
    pub fn set_orbit(&mut self, a: usize, b: usize, c: usize, d: usize, v: Complex64) {
        self.fill([a, b, c, d], v);
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &KahlerCurv2) -> f64 {
        self.c
            .iter()
            .zip(other.c.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut out = *self;
        for z in out.c.iter_mut() {
            *z *= t;
        }
        out
    }

    /// Largest violation of the symmetry and Hermitian relations.
    pub fn symmetry_residual(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..16 {
            let idx = split(i);
            for g in symmetry_group() {
                let v = self.c[join(g.apply(idx))];
                let w = if g.conj { self.c[i].conj() } else { self.c[i] };
                m = m.max((v - w).norm());
            }
        }
        m
    }

    /// `R'[a,b,c,d] = Σ U_pa conj(U_qb) U_rc conj(U_sd) R[p,q,r,s]`: the
    /// components in the unitary frame whose columns are the columns of `u`.
    pub fn in_frame(&self, u: &UnitaryFrame2) -> Self {
        let m = &u.cols;
        let col = |k: usize, p: usize| m[k][p];
        let mut out = Self::zero();
        for i in 0..16 {
            let [a, b, c, d] = split(i);
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..16 {
                let [p, q, r, t] = split(j);
                let z = self.c[j];
                if z == Complex64::new(0.0, 0.0) {
                    continue;
                }
                s += col(a, p) * col(b, q).conj() * col(c, r) * col(d, t).conj() * z;
            }
            out.c[i] = s;
        }
        out.orbit_exact()
    }

    /// Rewrites each orbit from its smallest slot so the symmetries hold exactly.
    fn orbit_exact(mut self) -> Self {
        let mut done = [false; 16];
        for slot in 0..16 {
            if done[slot] {
                continue;
            }
            let idx = split(slot);
            self.fill(idx, self.c[slot]);
            for g in symmetry_group() {
                done[join(g.apply(idx))] = true;
            }
        }
        self
    }
}

/// Slots of the orbit of `idx` (0-based) with whether each holds the conjugate.
pub(crate) fn orbit_slots(idx: [usize; 4]) -> Vec<(usize, bool)> {
    symmetry_group()
        .iter()
        .map(|g| (join(g.apply(idx)), g.conj))
        .collect()
}

/// Orthogonal projection onto tensors with the Kähler symmetries.
pub fn kahler_symmetrize(raw: &[Complex64; 16]) -> KahlerCurv2 {
    let group = symmetry_group();
    let mut out = KahlerCurv2::zero();
    for i in 0..16 {
        let idx = split(i);
        let mut s = Complex64::new(0.0, 0.0);
        for g in group {
            let v = raw[join(g.apply(idx))];
            s += if g.conj { v.conj() } else { v };
        }
        out.c[i] = s / group.len() as f64;
    }
    out.orbit_exact()
}

/// `Ric_{a b̄} = Σ_c R[a,b,c,c]`.
pub fn kahler_ricci(r: &KahlerCurv2) -> Matrix2<Complex64> {
    Matrix2::from_fn(|a, b| r.get(a, b, 0, 0) + r.get(a, b, 1, 1))
}

/// `λ` with `‖Ric - λ I‖` below `tol`, if the tensor is Einstein.
pub fn einstein_constant(r: &KahlerCurv2, tol: f64) -> Option<f64> {
    let ric = kahler_ricci(r);
    let lambda = 0.5 * (ric[(0, 0)].re + ric[(1, 1)].re);
    let residual = (ric[(0, 0)] - lambda)
        .norm()
        .max((ric[(1, 1)] - lambda).norm())
        .max(ric[(0, 1)].norm())
        .max(ric[(1, 0)].norm());
    (residual <= tol).then_some(lambda)
}

/// `H(v) = Σ v_a conj(v_b) v_c conj(v_d) R[a,b,c,d]` for unit `v`.
pub fn hol_sectional(r: &KahlerCurv2, v: &C2) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..16 {
        let [a, b, c, d] = split(i);
        s += v[a] * v[b].conj() * v[c] * v[d].conj() * r.c[i];
    }
    s.re
}

/// Chart `v = (cos t, e^{iφ} sin t)`.
pub fn chart(t: f64, phi: f64) -> C2 {
    let (s, c) = t.sin_cos();
    [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]
}

/// `H(t, ·) = h0 + p cos φ + q sin φ + s cos 2φ + w sin 2φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolForm {
    k: KahlerComponents,
}

impl HolForm {
    pub fn new(r: &KahlerCurv2) -> Self {
        Self { k: r.components() }
    }

    pub fn coefficients(&self, t: f64) -> [f64; 5] {
        let k = &self.k;
        let (s, c) = t.sin_cos();
        let (c2, s2) = (c * c, s * s);
        let h0 = k.a * c2 * c2 + 4.0 * k.c * c2 * s2 + k.d * s2 * s2;
        let (u, w) = (4.0 * c2 * c * s, 4.0 * c * s2 * s);
        let p = u * k.e[0] + w * k.f[0];
        let q = u * k.e[1] - w * k.f[1];
        let m = 2.0 * c2 * s2;
        [h0, p, q, m * k.b[0], m * k.b[1]]
    }

    pub fn eval(&self, t: f64, phi: f64) -> f64 {
        let [h0, p, q, s, w] = self.coefficients(t);
        let (sp, cp) = phi.sin_cos();
        let (s2p, c2p) = (2.0 * phi).sin_cos();
        h0 + p * cp + q * sp + s * c2p + w * s2p
    }
}

/// Unitary frame of C², stored by columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryFrame2 {
    cols: [C2; 2],
}

impl UnitaryFrame2 {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { cols: [[o, z], [z, o]] }
    }

    /// The frame `(v, (-conj v1, conj v0))` for unit `v`.
    pub fn with_first(v: &C2) -> Self {
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let v = [v[0] / n, v[1] / n];
        Self {
            cols: [v, [-v[1].conj(), v[0].conj()]],
        }
    }

    pub fn from_columns(cols: [C2; 2], tol: f64) -> Result<Self> {
        let dot = |a: &C2, b: &C2| a[0].conj() * b[0] + a[1].conj() * b[1];
        let err = (dot(&cols[0], &cols[0]).re - 1.0)
            .abs()
            .max((dot(&cols[1], &cols[1]).re - 1.0).abs())
            .max(dot(&cols[0], &cols[1]).norm());
        if err > tol {
            return Err(Error::NotOrthonormal(err));
        }
        Ok(Self { cols })
    }

    pub fn column(&self, k: usize) -> C2 {
        self.cols[k]
    }

    pub fn apply(&self, v: &C2) -> C2 {
        [
            self.cols[0][0] * v[0] + self.cols[1][0] * v[1],
            self.cols[0][1] * v[0] + self.cols[1][1] * v[1],
        ]
    }

    /// Haar-distributed element of `U(2)`.
    pub fn random(stream: &mut SampleStream) -> Self {
        let g: [f64; 4] = stream.unit_vector();
        let v = [Complex64::new(g[0], g[1]), Complex64::new(g[2], g[3])];
        let phase = Complex64::from_polar(1.0, stream.range(0.0, std::f64::consts::TAU));
        let f = Self::with_first(&v);
        Self {
            cols: [f.cols[0], [f.cols[1][0] * phase, f.cols[1][1] * phase]],
        }
    }
}

/// Largest modulus among components with exactly three equal indices, in a
/// unitary frame whose first vector is `v`.
pub fn critical_frame_check(r: &KahlerCurv2, v: &C2) -> f64 {
    let rr = r.in_frame(&UnitaryFrame2::with_first(v));
    (0..16)
        .filter(|&i| {
            let ones = split(i).iter().sum::<usize>();
            ones == 1 || ones == 3
        })
        .fold(0.0, |m, i| m.max(rr.c[i].norm()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolExtremaReport {
    pub h_max: f64,
    pub h_min: f64,
    /// Fubini-Study average of `H` by quadrature.
    pub h_av: f64,
    /// `2λ/3` when the tensor is Einstein.
    pub h_av_identity: Option<f64>,
    #[serde(serialize_with = "ser_c2")]
    pub dir_max: C2,
    #[serde(serialize_with = "ser_c2")]
    pub dir_min: C2,
    pub lambda: Option<f64>,
    pub grid_max: f64,
    pub grid_min: f64,
}

fn ser_c2<S: serde::Serializer>(v: &C2, s: S) -> std::result::Result<S::Ok, S::Error> {
    [[v[0].re, v[0].im], [v[1].re, v[1].im]].serialize(s)
}

pub const HOL_GRID: usize = 2001;
pub const H_AV_TOL: f64 = 1e-6;

/// Grid extrema of `H` in the `(t, φ)` chart, with their arguments.
pub fn hol_grid_extrema(r: &KahlerCurv2, n: usize) -> ((f64, f64, f64), (f64, f64, f64)) {
    let form = HolForm::new(r);
    let n = n.max(3);
    let trig: Vec<[f64; 4]> = (0..n)
        .map(|j| {
            let phi = std::f64::consts::TAU * j as f64 / n as f64;
            let (s, c) = phi.sin_cos();
            let (s2, c2) = (2.0 * phi).sin_cos();
            [c, s, c2, s2]
        })
        .collect();
    let mut lo = (f64::INFINITY, 0.0, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64;
        let [h0, p, q, s, w] = form.coefficients(t);
        for (j, tr) in trig.iter().enumerate() {
            let h = h0 + p * tr[0] + q * tr[1] + s * tr[2] + w * tr[3];
            if h < lo.0 {
                lo = (h, t, std::f64::consts::TAU * j as f64 / n as f64);
            }
            if h > hi.0 {
                hi = (h, t, std::f64::consts::TAU * j as f64 / n as f64);
            }
        }
    }
    (lo, hi)
}

/// Fubini-Study mean of `H`: `u = cos² t` is uniformly distributed, so Simpson
/// in `u` and the trapezoid rule in `φ` integrate the degree-2 form exactly.
pub fn hol_average(r: &KahlerCurv2) -> f64 {
    let form = HolForm::new(r);
    let (nu, nphi) = (64usize, 16usize);
    let mut total = 0.0;
    for i in 0..=nu {
        let u = i as f64 / nu as f64;
        let t = u.sqrt().acos();
        let w = if i == 0 || i == nu {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let ring: f64 = (0..nphi)
            .map(|j| form.eval(t, std::f64::consts::TAU * j as f64 / nphi as f64))
            .sum::<f64>()
            / nphi as f64;
        total += w * ring;
    }
    total / (3.0 * nu as f64)
}

/// Local rotation data at `v`: value, gradient, and Hessian of `H` in the
/// coordinates `ζ = u + i w` of `(v + ζ v⊥)/√(1 + |ζ|²)`.
fn local_model(r: &KahlerCurv2, v: &C2) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let rr = r.in_frame(&UnitaryFrame2::with_first(v));
    let a = rr.get(0, 0, 0, 0).re;
    let c = rr.get(0, 0, 1, 1).re;
    let e = rr.get(0, 0, 0, 1);
    let b = rr.get(0, 1, 0, 1);
    let kappa = 4.0 * c - 2.0 * a;
    (
        a,
        [4.0 * e.re, 4.0 * e.im],
        [
            [2.0 * (kappa + 2.0 * b.re), 4.0 * b.im],
            [4.0 * b.im, 2.0 * (kappa - 2.0 * b.re)],
        ],
    )
}

fn normalize(v: C2) -> C2 {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn moved(v: &C2, zeta: Complex64) -> C2 {
    let perp = [-v[1].conj(), v[0].conj()];
    normalize([v[0] + zeta * perp[0], v[1] + zeta * perp[1]])
}

/// Newton descent of `sign·H` on CP¹ from `v`; returns the final direction and
/// gradient norm.
fn newton_on_line(r: &KahlerCurv2, mut v: C2, sign: f64) -> (C2, f64) {
    let scale = r.max_abs().max(1.0);
    let floor = 1e-9 * scale;
    let mut grad_norm = f64::INFINITY;
    for _ in 0..100 {
        let (h, g, hess) = local_model(r, &v);
        let (f0, g) = (sign * h, [sign * g[0], sign * g[1]]);
        grad_norm = g[0].hypot(g[1]);
        if grad_norm < 1e-13 * scale {
            break;
        }
        let m = Matrix2::new(hess[0][0], hess[0][1], hess[1][0], hess[1][1]) * sign;
        let eig = m.symmetric_eigen();
        let gv = nalgebra::Vector2::new(g[0], g[1]);
        let mut d = nalgebra::Vector2::zeros();
        for k in 0..2 {
            let e = eig.eigenvectors.column(k);
            d -= e * (e.dot(&gv) / eig.eigenvalues[k].abs().max(floor));
        }
        if d.norm() > 0.5 {
            d *= 0.5 / d.norm();
        }
        let slope = gv.dot(&d);
        let near = grad_norm < 1e-6 * scale;
        let mut step = 1.0;
        let mut next = None;
        while step > 1e-10 {
            let cand = moved(&v, Complex64::new(d[0], d[1]) * step);
            if near || sign * hol_sectional(r, &cand) <= f0 + 1e-4 * step * slope {
                next = Some(cand);
                break;
            }
            step *= 0.5;
        }
        match next {
            Some(c) => v = c,
            None => break,
        }
    }
    (v, grad_norm)
}

fn refine(r: &KahlerCurv2, starts: &[C2], sign: f64) -> Result<(f64, C2)> {
    let scale = r.max_abs().max(1.0);
    let mut best: Option<(f64, C2)> = None;
    let mut worst: f64 = 0.0;
    for s in starts {
        let (v, g) = newton_on_line(r, *s, sign);
        if g > 1e-10 * scale {
            worst = worst.max(g);
            continue;
        }
        let h = sign * hol_sectional(r, &v);
        if best.is_none_or(|(b, _)| h < b - 1e-13 * scale) {
            best = Some((h, v));
        }
    }
    best.map(|(h, v)| (sign * h, v))
        .ok_or(Error::NonConvergence { grad_norm: worst })
}

/// Extremizes `H` over CP¹: grid seeding in the `(t, φ)` chart followed by
/// Newton refinement on the projective line.
pub fn extremize_hol(r: &KahlerCurv2) -> Result<HolExtremaReport> {
    extremize_hol_with(r, &Tolerances::default(), HOL_GRID)
}

pub fn extremize_hol_with(r: &KahlerCurv2, tol: &Tolerances, grid: usize) -> Result<HolExtremaReport> {
    let (lo, hi) = hol_grid_extrema(r, grid);
    let mut starts: Vec<C2> = vec![chart(0.0, 0.0), chart(std::f64::consts::FRAC_PI_2, 0.0)];
    for k in 0..4 {
        starts.push(chart(std::f64::consts::FRAC_PI_4, k as f64 * std::f64::consts::FRAC_PI_2));
    }
    let mut min_starts = vec![chart(lo.1, lo.2)];
    min_starts.extend_from_slice(&starts);
    let mut max_starts = vec![chart(hi.1, hi.2)];
    max_starts.extend_from_slice(&starts);
    let (h_min, dir_min) = refine(r, &min_starts, 1.0)?;
    let (h_max, dir_max) = refine(r, &max_starts, -1.0)?;
    let scale = r.max_abs().max(1.0);
    let lambda = einstein_constant(r, tol.invariant * scale);
    let h_av = hol_average(r);
    let h_av_identity = lambda.map(|l| 2.0 * l / 3.0);
    if let Some(id) = h_av_identity {
        if (id - h_av).abs() > H_AV_TOL * scale {
            return Err(Error::Invariant(format!(
                "quadrature mean {h_av} of H disagrees with 2λ/3 = {id}"
            )));
        }
    }
    Ok(HolExtremaReport {
        h_max: h_max.max(hi.0),
        h_min: h_min.min(lo.0),
        h_av,
        h_av_identity,
        dir_max,
        dir_min,
        lambda,
        grid_max: hi.0,
        grid_min: lo.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `e1` minimizes `H`.
    Min,
    /// `e1` maximizes `H`.
    Max,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiuYangCertificate {
    pub orientation: Orientation,
    pub h_min: f64,
    pub h_max: f64,
    /// `A = 2R_{11̄22̄} - R_{11̄11̄}`
    pub a_value: f64,
    /// `|B| = |R_{12̄12̄}|`
    pub b_modulus: f64,
    pub r11_22: f64,
    /// `-A R_{11̄22̄} + |B|²`
    pub laplacian_value: f64,
    /// `-3H_min² + (2H_max + H_min)²`, or the swapped form at a maximum.
    pub closed_form_value: f64,
    pub frame_residual: f64,
    pub sign_conclusion: Verdict,
}

pub const LAPLACIAN_AGREEMENT_TOL: f64 = 1e-8;

/// Evaluates the Laplacian formula in the frame whose first vector is the
/// extremal direction of `hol` chosen by `orientation`.
pub fn siu_yang_laplacian(
    r: &KahlerCurv2,
    hol: &HolExtremaReport,
    orientation: Orientation,
    tol: &Tolerances,
) -> Result<SiuYangCertificate> {
    let scale = r.max_abs().max(1.0);
    let ric = kahler_ricci(r).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if ric > tol.invariant * scale {
        return Err(Error::NotRicciFlat {
            residual: ric,
            tolerance: tol.invariant * scale,
        });
    }
    let v = match orientation {
        Orientation::Min => hol.dir_min,
        Orientation::Max => hol.dir_max,
    };
    let frame_residual = critical_frame_check(r, &v);
    if frame_residual > tol.critical * scale {
        return Err(Error::FrameNotCritical {
            residual: frame_residual,
            tolerance: tol.critical * scale,
        });
    }
    let rr = r.in_frame(&UnitaryFrame2::with_first(&v));
    let r1111 = rr.get(0, 0, 0, 0).re;
    let r11_22 = rr.get(0, 0, 1, 1).re;
    let a_value = 2.0 * r11_22 - r1111;
    let b_modulus = rr.get(0, 1, 0, 1).norm();
    let laplacian_value = -a_value * r11_22 + b_modulus * b_modulus;
    let (h_min, h_max) = (hol.h_min, hol.h_max);
    let closed_form_value = match orientation {
        Orientation::Min => -3.0 * h_min * h_min + (2.0 * h_max + h_min).powi(2),
        Orientation::Max => -3.0 * h_max * h_max + (2.0 * h_min + h_max).powi(2),
    };
    if (laplacian_value - closed_form_value).abs() > LAPLACIAN_AGREEMENT_TOL * scale * scale {
        return Err(Error::Invariant(format!(
            "Laplacian {laplacian_value} from components disagrees with {closed_form_value} from extrema"
        )));
    }
    let sign_conclusion = match orientation {
        Orientation::Min if laplacian_value < 0.0 => Verdict::Negative,
        Orientation::Max if laplacian_value > 0.0 => Verdict::Positive,
        _ => Verdict::Inconclusive,
    };
    Ok(SiuYangCertificate {
        orientation,
        h_min,
        h_max,
        a_value,
        b_modulus,
        r11_22,
        laplacian_value,
        closed_form_value,
        frame_residual,
        sign_conclusion,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PinchingSlacks {
    /// `(H_av - H_min) - (H_max - H_min)/3`, `2(H_max - H_min)/3 - (H_av - H_min)`,
    /// `H_av - H_min`, `H_max - H_av`.
    pub ke: [f64; 4],
    /// `H_max + H_min/2`, `-2H_min - H_max` for Ricci-flat input.
    pub ke2: Option<[f64; 2]>,
    pub pass: bool,
}

pub const PINCHING_SLACK_TOL: f64 = 1e-8;

pub fn kahler_pinching_bounds(report: &HolExtremaReport) -> PinchingSlacks {
    let (lo, hi) = (report.h_min, report.h_max);
    let av = report.h_av_identity.unwrap_or(report.h_av);
    let ke = [
        (av - lo) - (hi - lo) / 3.0,
        2.0 * (hi - lo) / 3.0 - (av - lo),
        av - lo,
        hi - av,
    ];
    let ke2 = match report.lambda {
        Some(l) if l.abs() <= 1e-10 => Some([hi + 0.5 * lo, -2.0 * lo - hi]),
        _ => None,
    };
    let pass = ke
        .iter()
        .chain(ke2.iter().flatten())
        .all(|s| *s >= -PINCHING_SLACK_TOL);
    PinchingSlacks { ke, ke2, pass }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KahlerThresholds {
    /// `(1 + √3)/2`
    pub c_min_case: f64,
    /// `√3 - 1`
    pub c_max_case: f64,
}

pub fn kahler_thresholds() -> KahlerThresholds {
    let s3 = 3f64.sqrt();
    KahlerThresholds {
        c_min_case: (1.0 + s3) / 2.0,
        c_max_case: s3 - 1.0,
    }
}

/// `R0000 = R1111 = -1`, `R0011 = 1`, `R0101 = b`, three-equal-index terms 0.
pub fn family_f(b: f64) -> KahlerCurv2 {
    let z = Complex64::new(0.0, 0.0);
    KahlerCurv2::from_components(-1.0, 1.0, -1.0, z, z, Complex64::new(b, 0.0))
}

fn random_components(stream: &mut SampleStream, scale: f64) -> ([Complex64; 16], Complex64) {
    let mut raw = [Complex64::new(0.0, 0.0); 16];
    for z in raw.iter_mut() {
        *z = Complex64::new(stream.symmetric(scale), stream.symmetric(scale));
    }
    let e = Complex64::new(stream.symmetric(scale), stream.symmetric(scale));
    (raw, e)
}

/// Einstein sample with constant `lambda`: symmetrized random draw with
/// `c = λ - a`, `d = a`, `f = -conj(e)`.
pub fn sample_einstein_kahler(seed: u64, index: u64, scale: f64, lambda: f64) -> KahlerCurv2 {
    let mut stream = SampleStream::new(seed, index);
    let (raw, _) = random_components(&mut stream, 0.5 * scale);
    let k = kahler_symmetrize(&raw).components();
    let e = Complex64::new(k.e[0], k.e[1]);
    KahlerCurv2::from_components(
        k.a,
        lambda - k.a,
        k.a,
        e,
        -e.conj(),
        Complex64::new(k.b[0], k.b[1]),
    )
}

/// Ricci-flat sample, deterministic in `seed`.
pub fn sample_ricci_flat_kahler(seed: u64, scale: f64) -> KahlerCurv2 {
    sample_einstein_kahler(seed, 0, scale, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn group_has_eight_elements() {
        assert_eq!(symmetry_group().len(), 8);
    }

    #[test]
    fn symmetrize_basics() {
        let zero = [c(0.0, 0.0); 16];
        assert_eq!(kahler_symmetrize(&zero), KahlerCurv2::zero());
        let t = sample_ricci_flat_kahler(3, 1.0);
        assert!(kahler_symmetrize(t.raw()).max_abs_diff(&t) < 1e-14);
        let mut raw = [c(0.0, 0.0); 16];
        raw[kidx(0, 1, 0, 1)] = c(0.0, 1.0);
        let p = kahler_symmetrize(&raw);
        assert!(p.symmetry_residual() < 1e-15);
        assert_eq!(p.get(1, 0, 1, 0), p.get(0, 1, 0, 1).conj());
        assert!((p.get(1, 0, 1, 0) - c(0.0, -0.5)).norm() < 1e-15);
        let again = kahler_symmetrize(p.raw());
        assert!(again.max_abs_diff(&p) < 1e-15);
    }

    #[test]
    fn family_ricci_vanishes() {
        for b in [0.0, 1.0, 2.5] {
            let ric = kahler_ricci(&family_f(b));
            assert!(ric.iter().all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn scaled_identity_is_einstein() {
        // R0000 = R1111 = 2, R0011 = 1: the Fubini-Study pattern, λ = 3
        let t = KahlerCurv2::from_components(2.0, 1.0, 2.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(einstein_constant(&t, 1e-12), Some(3.0));
    }

    #[test]
    fn hol_family_expansion() {
        let b = 0.7;
        let t = family_f(b);
        assert_eq!(hol_sectional(&t, &chart(0.0, 0.0)), -1.0);
        let form = HolForm::new(&t);
        for (tt, phi) in [(0.3f64, 1.1f64), (1.2, 4.0), (0.8, 0.0)] {
            let (s, cc) = f64::sin_cos(tt);
            let want = -cc.powi(4) - s.powi(4) + 4.0 * cc * cc * s * s
                + 2.0 * cc * cc * s * s * b * (2.0 * phi).cos();
            assert!((hol_sectional(&t, &chart(tt, phi)) - want).abs() < 1e-14);
            assert!((form.eval(tt, phi) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn trig_form_matches_direct_sum() {
        for seed in 0..10 {
            let t = sample_einstein_kahler(seed, 3, 1.0, 0.4);
            let form = HolForm::new(&t);
            for (tt, phi) in [(0.1, 0.2), (0.7, 2.9), (1.5, 5.5)] {
                assert!((form.eval(tt, phi) - hol_sectional(&t, &chart(tt, phi))).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn phase_invariance() {
        let t = sample_ricci_flat_kahler(11, 1.0);
        let v = chart(0.4, 1.3);
        let ph = Complex64::from_polar(1.0, 2.2);
        let w = [v[0] * ph, v[1] * ph];
        assert!((hol_sectional(&t, &v) - hol_sectional(&t, &w)).abs() < 1e-14);
    }

    #[test]
    fn family_extrema() {
        for (b, hmax) in [(0.0, 0.5), (1.0, 1.0), (3.0, 2.0)] {
            let rep = extremize_hol(&family_f(b)).unwrap();
            assert!((rep.h_min + 1.0).abs() < 1e-9, "b = {b}");
            assert!((rep.h_max - hmax).abs() < 1e-9, "b = {b}");
            assert!(rep.h_av.abs() < 1e-12);
        }
    }

    #[test]
    fn average_identity_on_einstein() {
        for seed in 0..10 {
            let t = sample_einstein_kahler(seed, 1, 1.0, 0.9);
            let rep = extremize_hol(&t).unwrap();
            assert!((rep.h_av - 0.6).abs() < 1e-10);
            assert!(kahler_pinching_bounds(&rep).pass);
        }
    }

    #[test]
    fn critical_frame_examples() {
        let t = family_f(1.0);
        assert_eq!(critical_frame_check(&t, &chart(0.0, 0.0)), 0.0);
        assert!(critical_frame_check(&t, &chart(0.3, 0.0)) > 1e-3);
        let s = sample_ricci_flat_kahler(5, 1.0);
        let rep = extremize_hol(&s).unwrap();
        assert!(critical_frame_check(&s, &rep.dir_min) < 1e-7);
        assert!(critical_frame_check(&s, &rep.dir_max) < 1e-7);
    }

    #[test]
    fn laplacian_family() {
        let tol = Tolerances::default();
        for b in [1.0, 2.0, 3f64.sqrt()] {
            let t = family_f(b);
            let rep = extremize_hol(&t).unwrap();
            let cert = siu_yang_laplacian(&t, &rep, Orientation::Min, &tol).unwrap();
            assert!((cert.laplacian_value - (b * b - 3.0)).abs() < 1e-9);
        }
        let t = family_f(1.0);
        let cert = siu_yang_laplacian(&t, &extremize_hol(&t).unwrap(), Orientation::Min, &tol).unwrap();
        assert!((cert.a_value - 3.0).abs() < 1e-12 && (cert.b_modulus - 1.0).abs() < 1e-12);
        assert_eq!(cert.sign_conclusion, Verdict::Negative);
    }

    #[test]
    fn unitary_invariance() {
        let t = sample_ricci_flat_kahler(21, 1.0);
        let u = UnitaryFrame2::random(&mut SampleStream::new(21, 5));
        let tu = t.in_frame(&u);
        assert!(tu.symmetry_residual() < 1e-14);
        let v = chart(0.5, 0.6);
        assert!((hol_sectional(&tu, &v) - hol_sectional(&t, &u.apply(&v))).abs() < 1e-13);
        let (a, b) = (extremize_hol(&t).unwrap(), extremize_hol(&tu).unwrap());
        assert!((a.h_max - b.h_max).abs() < 1e-8 && (a.h_min - b.h_min).abs() < 1e-8);
    }

    #[test]
    fn samplers() {
        let a = sample_ricci_flat_kahler(9, 2.0);
        assert_eq!(a, sample_ricci_flat_kahler(9, 2.0));
        assert!(a.symmetry_residual() == 0.0);
        assert!(kahler_ricci(&a).iter().all(|z| z.norm() < 1e-10 * 2.0));
    }

    #[test]
    fn thresholds() {
        let k = kahler_thresholds();
        assert!((k.c_min_case - 1.366025403784).abs() < 1e-12);
        assert!((k.c_max_case - 0.732050807569).abs() < 1e-12);
        assert!(((3f64.sqrt() - 1.0) * (3f64.sqrt() + 1.0) - 2.0).abs() < 1e-14);
    }
}
