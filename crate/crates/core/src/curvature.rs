//! Algebraic curvature tensors on a four-dimensional inner-product space.
//!
//! Components are stored densely as `R[i][j][k][l]` with the sign convention
//! that `R[i][j][i][j]` is the sectional curvature of `span(e_i, e_j)`. The
//! Ricci contraction is `Ric_ij = sum_p R[i][p][j][p]`.
//!
//! Bivectors use the fixed basis
//! `(e0^e1, e0^e2, e0^e3, e2^e3, e3^e1, e1^e2)`, and the self-dual /
//! anti-self-dual bases are `w_k^± = (e0^e_k ± e_l^e_m) / sqrt(2)` with
//! `(k, l, m)` cyclic in `(1, 2, 3)`.

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector4, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SampleStream;

/// Index pairs of the bivector basis, in order.
pub const BIVECTOR_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

#[inline]
pub const fn idx(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 4 + j) * 4 + k) * 4 + l
}

/// The eight signed index permutations generated by the two antisymmetries
/// and pair symmetry.
const PAIR_GROUP: [(fn([usize; 4]) -> [usize; 4], f64); 8] = [
    (|[i, j, k, l]| [i, j, k, l], 1.0),
    (|[i, j, k, l]| [j, i, k, l], -1.0),
    (|[i, j, k, l]| [i, j, l, k], -1.0),
    (|[i, j, k, l]| [j, i, l, k], 1.0),
    (|[i, j, k, l]| [k, l, i, j], 1.0),
    (|[i, j, k, l]| [l, k, i, j], -1.0),
    (|[i, j, k, l]| [k, l, j, i], -1.0),
    (|[i, j, k, l]| [l, k, j, i], 1.0),
];

pub(crate) fn pair_group() -> impl Iterator<Item = (fn([usize; 4]) -> [usize; 4], f64)> {
    PAIR_GROUP.into_iter()
}

/// Rewrites every entry from the smallest-index member of its signed orbit so
/// that antisymmetry and pair symmetry hold bit-for-bit.
fn orbit_exact(t: Tensor4) -> Tensor4 {
    let mut out = Tensor4::zero();
    for ix in all_indices() {
        let [i, j, k, l] = ix;
        if i == j || k == l {
            continue;
        }
        let (rep, sign) = PAIR_GROUP
            .iter()
            .map(|(g, sign)| {
                let [a, b, c, d] = g(ix);
                (idx(a, b, c, d), *sign)
            })
            .min_by_key(|&(n, _)| n)
            .expect("nonempty group");
        out.0[idx(i, j, k, l)] = sign * t.0[rep];
    }
    out
}

fn all_indices() -> impl Iterator<Item = [usize; 4]> {
    (0..256).map(|n| [n >> 6, (n >> 4) & 3, (n >> 2) & 3, n & 3])
}

/// A dense rank-4 array over R^4 with no symmetry assumptions.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4(pub [f64; 256]);

impl Default for Tensor4 {
    fn default() -> Self {
        Self::zero()
    }
}

impl Tensor4 {
    pub fn zero() -> Self {
        Tensor4([0.0; 256])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.0[idx(i, j, k, l)] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn random(stream: &mut SampleStream, bound: f64) -> Self {
        let mut t = Self::zero();
        for x in t.0.iter_mut() {
            *x = stream.symmetric(bound);
        }
        t
    }
}

/// An algebraic curvature tensor on R^4.
#[derive(Clone, Debug, PartialEq)]
pub struct Riemann4(Tensor4);

/// Largest violations of each invariant family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.antisymmetry.max(self.pair_symmetry).max(self.bianchi)
    }
}

pub fn symmetry_residuals(t: &Tensor4) -> SymmetryResiduals {
    let mut r = SymmetryResiduals::default();
    for [i, j, k, l] in all_indices() {
        let v = t.get(i, j, k, l);
        r.antisymmetry = r
            .antisymmetry
            .max((v + t.get(j, i, k, l)).abs())
            .max((v + t.get(i, j, l, k)).abs());
        r.pair_symmetry = r.pair_symmetry.max((v - t.get(k, l, i, j)).abs());
        r.bianchi = r
            .bianchi
            .max((v + t.get(i, k, l, j) + t.get(i, l, j, k)).abs());
    }
    r
}

impl Riemann4 {
    pub fn zero() -> Self {
        Riemann4(Tensor4::zero())
    }

    /// Accepts a dense array that already satisfies every curvature symmetry.
    pub fn from_tensor(t: Tensor4, tol: f64) -> Result<Self> {
        let res = symmetry_residuals(&t);
        if res.max() > tol {
            return Err(Error::Invariant(format!(
                "not an algebraic curvature tensor (antisymmetry {:e}, pair symmetry {:e}, Bianchi {:e})",
                res.antisymmetry, res.pair_symmetry, res.bianchi
            )));
        }
        Ok(Riemann4(orbit_exact(t)))
    }

    /// Builds the tensor whose curvature operator is `m` in the fixed bivector basis.
    ///
    /// `m` must be symmetric with a vanishing Bianchi (totally antisymmetric)
    /// part, i.e. `m[0][3] + m[1][4] + m[2][5] = 0`.
    pub fn from_operator(m: &Matrix6<f64>, tol: f64) -> Result<Self> {
        let mut t = Tensor4::zero();
        for (a, &(i, j)) in BIVECTOR_BASIS.iter().enumerate() {
            for (b, &(k, l)) in BIVECTOR_BASIS.iter().enumerate() {
                let v = m[(a, b)];
                t.set(i, j, k, l, v);
                t.set(j, i, k, l, -v);
                t.set(i, j, l, k, -v);
                t.set(j, i, l, k, v);
            }
        }
        Self::from_tensor(t, tol)
    }

    /// Diagonal tensor with `K01 = K23 = k[0]`, `K02 = K13 = k[1]`, `K03 = K12 = k[2]`
    /// and all mixed components zero.
    pub fn diagonal(k: [f64; 3]) -> Self {
        let m = Matrix6::from_diagonal(&Vector6::new(k[0], k[1], k[2], k[0], k[1], k[2]));
        Self::from_operator(&m, f64::INFINITY).expect("diagonal operator has no Bianchi part")
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0.get(i, j, k, l)
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.0
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut out = self.0.clone();
        for x in out.0.iter_mut() {
            *x *= t;
        }
        Riemann4(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn max_abs_diff(&self, other: &Riemann4) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// Sectional curvature of the coordinate plane `span(e_i, e_j)`.
    pub fn k(&self, i: usize, j: usize) -> f64 {
        self.get(i, j, i, j)
    }
}

/// Orthogonal projection onto algebraic curvature tensors.
///
/// Averages over the signed pair-symmetry group, then removes the totally
/// antisymmetric part.
pub fn symmetrize(raw: &Tensor4) -> Riemann4 {
    let mut pair = Tensor4::zero();
    for ix in all_indices() {
        let s: f64 = PAIR_GROUP
            .iter()
            .map(|(g, sign)| {
                let [a, b, c, d] = g(ix);
                sign * raw.get(a, b, c, d)
            })
            .sum();
        pair.0[idx(ix[0], ix[1], ix[2], ix[3])] = s / 8.0;
    }
    let mut out = Tensor4::zero();
    for [i, j, k, l] in all_indices() {
        let alt = (pair.get(i, j, k, l) + pair.get(i, k, l, j) + pair.get(i, l, j, k)) / 3.0;
        out.set(i, j, k, l, pair.get(i, j, k, l) - alt);
    }
    Riemann4(orbit_exact(out))
}

pub fn ricci(r: &Riemann4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| (0..4).map(|p| r.get(i, p, j, p)).sum())
}

pub fn scalar_curvature(r: &Riemann4) -> f64 {
    ricci(r).trace()
}

/// `R(a, b, c, d)` for arbitrary vectors.
pub fn evaluate(r: &Riemann4, a: &[f64; 4], b: &[f64; 4], c: &[f64; 4], d: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for [i, j, k, l] in all_indices() {
        let w = a[i] * b[j] * c[k] * d[l];
        if w != 0.0 {
            s += w * r.get(i, j, k, l);
        }
    }
    s
}

pub fn sectional(r: &Riemann4, p: &Plane2) -> f64 {
    evaluate(r, &p.u, &p.v, &p.u, &p.v)
}

/// `B[i,j,k,l] = sum_{p,q} R[i,p,j,q] R[k,p,l,q]`.
pub fn b_tensor(r: &Riemann4) -> Tensor4 {
    let mut b = Tensor4::zero();
    for [i, j, k, l] in all_indices() {
        let mut s = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                s += r.get(i, p, j, q) * r.get(k, p, l, q);
            }
        }
        b.set(i, j, k, l, s);
    }
    b
}

/// `Q = 2(B_ijkl - B_ijlk + B_ikjl - B_iljk)`, the quadratic term of the
/// Bochner formula `ΔR + Q(R) = 2λR`.
pub fn q_tensor(r: &Riemann4) -> Tensor4 {
    q_from_b(&b_tensor(r))
}

pub(crate) fn q_from_b(b: &Tensor4) -> Tensor4 {
    let mut q = Tensor4::zero();
    for [i, j, k, l] in all_indices() {
        let v = b.get(i, j, k, l) - b.get(i, j, l, k) + b.get(i, k, j, l) - b.get(i, l, j, k);
        q.set(i, j, k, l, 2.0 * v);
    }
    q
}

/// Matrix of the curvature operator in the fixed bivector basis.
pub fn curvature_operator(r: &Riemann4) -> Matrix6<f64> {
    Matrix6::from_fn(|a, b| {
        let (i, j) = BIVECTOR_BASIS[a];
        let (k, l) = BIVECTOR_BASIS[b];
        r.get(i, j, k, l)
    })
}

/// The curvature operator in the `w^+ / w^-` basis: diagonal blocks and the
/// off-diagonal (traceless Ricci) block.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBlocks {
    pub plus: Matrix3<f64>,
    pub minus: Matrix3<f64>,
    pub cross: Matrix3<f64>,
}

impl DualBlocks {
    /// Max entry of the cross block. Zero exactly for Einstein tensors, for
    /// which `K(V) = K(V^perp)` on every plane.
    pub fn duality_residual(&self) -> f64 {
        self.cross.amax()
    }
}

pub fn dual_blocks(r: &Riemann4) -> DualBlocks {
    split_operator(&curvature_operator(r))
}

pub(crate) fn split_operator(m: &Matrix6<f64>) -> DualBlocks {
    let a = m.fixed_view::<3, 3>(0, 0).into_owned();
    let b = m.fixed_view::<3, 3>(0, 3).into_owned();
    let c = m.fixed_view::<3, 3>(3, 3).into_owned();
    let bt = b.transpose();
    DualBlocks {
        plus: (a + b + bt + c) * 0.5,
        minus: (a - b - bt + c) * 0.5,
        cross: (a - b + bt - c) * 0.5,
    }
}

/// The self-dual and anti-self-dual Weyl blocks of a Ricci-flat tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylBlocks {
    pub w_plus: Matrix3<f64>,
    pub w_minus: Matrix3<f64>,
}

const TRACE_TOL: f64 = 1e-10;

impl WeylBlocks {
    pub fn new(w_plus: Matrix3<f64>, w_minus: Matrix3<f64>) -> Result<Self> {
        let asym = (w_plus - w_plus.transpose())
            .amax()
            .max((w_minus - w_minus.transpose()).amax());
        if asym > TRACE_TOL {
            return Err(Error::Invariant(format!(
                "Weyl blocks must be symmetric (asymmetry {asym:e})"
            )));
        }
        let (tp, tm) = (w_plus.trace(), w_minus.trace());
        if tp.abs() > TRACE_TOL || tm.abs() > TRACE_TOL {
            return Err(Error::NotTraceFree {
                plus: tp,
                minus: tm,
            });
        }
        Ok(Self { w_plus, w_minus })
    }

    pub fn from_diagonals(plus: [f64; 3], minus: [f64; 3]) -> Result<Self> {
        Self::new(
            Matrix3::from_diagonal(&plus.into()),
            Matrix3::from_diagonal(&minus.into()),
        )
    }

    pub fn zero() -> Self {
        Self {
            w_plus: Matrix3::zeros(),
            w_minus: Matrix3::zeros(),
        }
    }

    /// Recovers the blocks of a Ricci-flat tensor.
    pub fn from_riemann(r: &Riemann4, tol: f64) -> Result<Self> {
        let ric = ricci(r).amax();
        if ric > tol {
            return Err(Error::NotRicciFlat {
                residual: ric,
                tolerance: tol,
            });
        }
        let d = dual_blocks(r);
        let sym = |m: Matrix3<f64>| (m + m.transpose()) * 0.5;
        let mut p = sym(d.plus);
        let mut m = sym(d.minus);
        // remove round-off so the trace-free check is exact
        let (tp, tm) = (p.trace() / 3.0, m.trace() / 3.0);
        for k in 0..3 {
            p[(k, k)] -= tp;
            m[(k, k)] -= tm;
        }
        Self::new(p, m)
    }

    pub fn to_riemann(&self) -> Riemann4 {
        to_riemann(self)
    }
}

/// Reconstructs the tensor whose curvature operator is `diag(W+, W-)` in the
/// `w^+ / w^-` basis.
pub fn to_riemann(w: &WeylBlocks) -> Riemann4 {
    let a = (w.w_plus + w.w_minus) * 0.5;
    let b = (w.w_plus - w.w_minus) * 0.5;
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&a);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&b);
    Riemann4::from_operator(&m, f64::INFINITY).expect("unchecked construction")
}

/// Draws trace-free symmetric blocks with entries bounded by `scale`.
pub fn sample_weyl(stream: &mut SampleStream, scale: f64) -> WeylBlocks {
    let mut block = || {
        let mut m = Matrix3::zeros();
        for i in 0..3 {
            // |d_i - mean(d)| <= 4/3 max|d|, so shrink the diagonal range
            m[(i, i)] = stream.symmetric(0.75 * scale);
            for j in (i + 1)..3 {
                let v = stream.symmetric(scale);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let t = m.trace() / 3.0;
        for i in 0..3 {
            m[(i, i)] -= t;
        }
        m
    };
    let w_plus = block();
    let w_minus = block();
    WeylBlocks { w_plus, w_minus }
}

/// Ricci-flat sample for a single seed (stream 0 of that seed).
pub fn sample_ricci_flat(seed: u64, scale: f64) -> WeylBlocks {
    sample_weyl(&mut SampleStream::new(seed, 0), scale)
}

/// An oriented 2-plane given by an orthonormal pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plane2 {
    pub u: [f64; 4],
    pub v: [f64; 4],
}

const PLANE_TOL: f64 = 1e-12;

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Plane2 {
    pub fn new(u: [f64; 4], v: [f64; 4]) -> Result<Self> {
        let dev = (dot4(&u, &u) - 1.0)
            .abs()
            .max((dot4(&v, &v) - 1.0).abs())
            .max(dot4(&u, &v).abs());
        if dev > PLANE_TOL {
            return Err(Error::Invariant(format!(
                "plane basis is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self { u, v })
    }

    /// Uniformly distributed random plane.
    pub fn random(stream: &mut SampleStream) -> Self {
        loop {
            if let Ok(p) = Self::spanned_by(stream.unit_vector(), stream.unit_vector()) {
                return p;
            }
        }
    }

    /// Gram-Schmidt on two independent vectors.
    pub fn spanned_by(a: [f64; 4], b: [f64; 4]) -> Result<Self> {
        let na = dot4(&a, &a).sqrt();
        if na < 1e-12 {
            return Err(Error::Invariant("degenerate spanning pair".into()));
        }
        let u = a.map(|x| x / na);
        let p = dot4(&u, &b);
        let w: [f64; 4] = std::array::from_fn(|i| b[i] - p * u[i]);
        let nw = dot4(&w, &w).sqrt();
        if nw < 1e-12 * dot4(&b, &b).sqrt().max(1.0) {
            return Err(Error::Invariant("degenerate spanning pair".into()));
        }
        Ok(Self {
            u,
            v: w.map(|x| x / nw),
        })
    }

    pub fn coordinate(i: usize, j: usize) -> Self {
        let mut u = [0.0; 4];
        let mut v = [0.0; 4];
        u[i] = 1.0;
        v[j] = 1.0;
        Self { u, v }
    }

    /// Components of `u ^ v` in the fixed bivector basis.
    pub fn bivector(&self) -> Vector6<f64> {
        Vector6::from_fn(|a, _| {
            let (i, j) = BIVECTOR_BASIS[a];
            self.u[i] * self.v[j] - self.u[j] * self.v[i]
        })
    }

    /// Recovers a plane from a unit decomposable bivector.
    pub fn from_bivector(w: &Vector6<f64>) -> Result<Self> {
        let norm = w.norm();
        let wedge = w[0] * w[3] + w[1] * w[4] + w[2] * w[5];
        if (norm - 1.0).abs() > 1e-10 || wedge.abs() > 1e-10 {
            return Err(Error::Invariant(format!(
                "bivector is not unit decomposable (|w| = {norm}, w^w = {wedge:e})"
            )));
        }
        let mut omega = Matrix4::zeros();
        for (a, &(i, j)) in BIVECTOR_BASIS.iter().enumerate() {
            omega[(i, j)] = w[a];
            omega[(j, i)] = -w[a];
        }
        // omega = u v^T - v u^T; any nonzero column lies in the plane
        let col = (0..4)
            .max_by(|&a, &b| {
                omega
                    .column(a)
                    .norm()
                    .total_cmp(&omega.column(b).norm())
                    .then(b.cmp(&a))
            })
            .expect("four columns");
        let u = omega.column(col).normalize();
        let v = -(omega * u);
        let u: [f64; 4] = u.into();
        let v: [f64; 4] = v.into();
        Self::spanned_by(u, v)
    }

    /// The orthogonal complement with the orientation making `(u, v, u', v')` positive.
    pub fn orthogonal_complement(&self) -> Self {
        let f = complete_frame(&self.u, &self.v);
        Self {
            u: f.column(2),
            v: f.column(3),
        }
    }

    /// `(u, v) -> (cos t u + sin t v, -sin t u + cos t v)`; same plane.
    pub fn rotated(&self, t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self {
            u: std::array::from_fn(|i| c * self.u[i] + s * self.v[i]),
            v: std::array::from_fn(|i| -s * self.u[i] + c * self.v[i]),
        }
    }
}

/// Oriented orthonormal frame; `basis` column `a` holds `e_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame4 {
    basis: Matrix4<f64>,
}

const FRAME_TOL: f64 = 1e-10;

impl Frame4 {
    pub fn new(basis: Matrix4<f64>) -> Result<Self> {
        let dev = (basis.transpose() * basis - Matrix4::identity()).amax();
        if dev > FRAME_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { basis })
    }

    pub fn from_columns(cols: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, a| cols[a][i]))
    }

    pub fn identity() -> Self {
        Self {
            basis: Matrix4::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.basis
    }

    pub fn column(&self, a: usize) -> [f64; 4] {
        std::array::from_fn(|i| self.basis[(i, a)])
    }

    pub fn columns(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|a| self.column(a))
    }

    pub fn transpose(&self) -> Self {
        Self {
            basis: self.basis.transpose(),
        }
    }

    /// Frame whose columns are `self * other` (apply `other`, then `self`).
    pub fn compose(&self, other: &Frame4) -> Self {
        Self {
            basis: self.basis * other.basis,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.basis.determinant()
    }

    /// Haar-distributed rotation (determinant +1).
    pub fn random(stream: &mut SampleStream) -> Self {
        let cols: [[f64; 4]; 4] = std::array::from_fn(|_| stream.unit_vector::<4>());
        let mut m = Matrix4::from_fn(|i, a| cols[a][i]);
        gram_schmidt(&mut m);
        if m.determinant() < 0.0 {
            m.column_mut(3).neg_mut();
        }
        Self { basis: m }
    }

    /// Rotation by `t` in the coordinate plane `(e_i, e_j)`.
    pub fn coordinate_rotation(i: usize, j: usize, t: f64) -> Self {
        let (s, c) = t.sin_cos();
        let mut m = Matrix4::identity();
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(j, i)] = s;
        m[(i, j)] = -s;
        Self { basis: m }
    }
}

fn gram_schmidt(m: &mut Matrix4<f64>) {
    for a in 0..4 {
        for b in 0..a {
            let p = m.column(a).dot(&m.column(b));
            let cb = m.column(b).into_owned();
            m.column_mut(a).axpy(-p, &cb, 1.0);
        }
        let n = m.column(a).norm();
        m.column_mut(a).unscale_mut(n);
    }
}

/// Completes an orthonormal pair to a positively oriented frame.
pub(crate) fn complete_frame(u: &[f64; 4], v: &[f64; 4]) -> Frame4 {
    let u = Vector4::from(*u);
    let v = Vector4::from(*v);
    let mut picked: Vec<Vector4<f64>> = vec![u, v];
    for _ in 0..2 {
        let mut best: Option<(f64, Vector4<f64>)> = None;
        for axis in 0..4 {
            let mut w = Vector4::zeros();
            w[axis] = 1.0;
            for p in &picked {
                w -= p * p.dot(&w);
            }
            let n = w.norm();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn + 1e-12) {
                best = Some((n, w / n));
            }
        }
        let (_, w) = best.expect("four axes");
        // re-orthogonalize once more for accuracy
        let mut w = w;
        for p in &picked {
            w -= p * p.dot(&w);
        }
        picked.push(w.normalize());
    }
    let mut m = Matrix4::from_columns(&picked);
    if m.determinant() < 0.0 {
        m.column_mut(3).neg_mut();
    }
    Frame4 { basis: m }
}

/// Components of `r` in the frame `f`: `R'(a,b,c,d) = R(e_a, e_b, e_c, e_d)`.
pub fn conjugate(r: &Riemann4, f: &Frame4) -> Riemann4 {
    Riemann4(orbit_exact(conjugate_tensor(&r.0, &f.basis)))
}

/// As [`conjugate`] but for an arbitrary matrix, rejected unless orthonormal.
pub fn conjugate_by_matrix(r: &Riemann4, m: &Matrix4<f64>) -> Result<Riemann4> {
    let f = Frame4::new(*m)?;
    Ok(conjugate(r, &f))
}

pub(crate) fn conjugate_tensor(t: &Tensor4, m: &Matrix4<f64>) -> Tensor4 {
    // contract one slot at a time; each pass moves the transformed slot to the back
    let mut cur = t.clone();
    for _ in 0..4 {
        let mut next = Tensor4::zero();
        for p in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v = cur.get(p, j, k, l);
                        if v == 0.0 {
                            continue;
                        }
                        for a in 0..4 {
                            next.0[idx(j, k, l, a)] += m[(p, a)] * v;
                        }
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Ricci tensor proportional to the identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EinsteinData {
    pub lambda: f64,
}

impl EinsteinData {
    /// `Some` when `Ric = λ Id` within `tol`.
    pub fn of(r: &Riemann4, tol: f64) -> Option<Self> {
        let ric = ricci(r);
        let lambda = ric.trace() / 4.0;
        let dev = (ric - Matrix4::identity() * lambda).amax();
        (dev <= tol).then_some(Self { lambda })
    }
}
