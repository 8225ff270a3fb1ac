//! Reference implementations with deliberately different evaluation orders.
//!
//! These exist so batch verification can compare the production contractions
//! against something that does not share their loop structure.

use crate::curvature::{idx, Riemann4, Tensor4};

/// `B[i,j,k,l] = sum_{p,q} R[i,p,j,q] R[k,p,l,q]`, accumulated with the
/// summation indices outermost.
pub fn b_tensor_reference(r: &Riemann4) -> Tensor4 {
    let mut b = [0.0f64; 256];
    for q in 0..4 {
        for p in 0..4 {
            for l in 0..4 {
                for k in 0..4 {
                    let rkplq = r.get(k, p, l, q);
                    if rkplq == 0.0 {
                        continue;
                    }
                    for j in 0..4 {
                        for i in 0..4 {
                            b[idx(i, j, k, l)] += r.get(i, p, j, q) * rkplq;
                        }
                    }
                }
            }
        }
    }
    Tensor4(b)
}

/// `Q(R)` expanded directly in terms of `R`, without materializing `B`.
pub fn q_tensor_reference(r: &Riemann4) -> Tensor4 {
    let mut out = Tensor4::zero();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut s = 0.0;
                    for q in 0..4 {
                        for p in 0..4 {
                            s += r.get(i, p, j, q) * r.get(k, p, l, q)
                                - r.get(i, p, j, q) * r.get(l, p, k, q)
                                + r.get(i, p, k, q) * r.get(j, p, l, q)
                                - r.get(i, p, l, q) * r.get(j, p, k, q);
                        }
                    }
                    out.set(i, j, k, l, 2.0 * s);
                }
            }
        }
    }
    out
}

/// Largest entry difference relative to `max(1, |a|_max)`.
pub fn relative_gap(a: &Tensor4, b: &Tensor4) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(1.0)
}
