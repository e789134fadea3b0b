//! General complex eigendecomposition.
//!
//! Householder reduction to Hessenberg form, then shifted QR iterations with
//! Givens rotations to reach the complex Schur form `A = Z T Z†`. Right
//! eigenvectors come from back substitution on `T`; left eigenvectors are the
//! rows of the inverse right-eigenvector matrix, which makes the two sets
//! biorthonormal by construction.

use super::{vec_norm, CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvector-matrix 1-norm condition number above which a matrix is
/// treated as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e8;

/// Relative eigenvalue gap, scaled by `max(1, spectral radius)`, below which
/// a matrix is treated as defective.
///
/// Round-off splits a coalesced pair by about `sqrt(eps)·‖M‖ ≈ 1e-8`, so the
/// gap test sits two decades above that.
pub const DEFECTIVE_GAP: f64 = 1e-6;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;

#[derive(Clone, Debug)]
pub struct EigenResult {
    /// Sorted by descending real part, ties by descending imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub right_vectors: CMatrix,
    /// Left eigenvectors as columns, scaled so `left[:, i]† right[:, j] = δ_ij`.
    /// Meaningless (zero) when the right eigenvector matrix is singular.
    pub left_vectors: CMatrix,
    pub defective: bool,
    /// 1-norm condition number of `right_vectors`; infinite when singular.
    pub vector_condition: f64,
    /// Smallest pairwise distance between eigenvalues.
    pub min_gap: f64,
}

impl EigenResult {
    pub fn right(&self, i: usize) -> Vec<C64> {
        self.right_vectors.column(i)
    }

    pub fn left(&self, i: usize) -> Vec<C64> {
        self.left_vectors.column(i)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn eig_general(m: &CMatrix) -> Result<EigenResult> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("eigendecomposition of a {}x{} matrix", m.rows(), m.cols())));
    }
    if !m.is_finite() {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    let n = m.rows();
    let (mut t, mut z) = hessenberg(m);
    schur_qr(&mut t, &mut z)?;

    let mut pairs: Vec<(C64, Vec<C64>)> = triangular_eigenvectors(&t)
        .into_iter()
        .enumerate()
        .map(|(k, y)| {
            let mut v = z.matvec(&y);
            let nv = vec_norm(&v);
            for x in &mut v {
                *x /= nv;
            }
            (t[(k, k)], v)
        })
        .collect();

    let radius = pairs.iter().map(|p| p.0.norm()).fold(0.0, f64::max);
    sort_descending(&mut pairs, 1e-10 * radius.max(1.0));

    let eigenvalues: Vec<C64> = pairs.iter().map(|p| p.0).collect();
    let mut right_vectors = CMatrix::zeros(n, n);
    for (j, (_, v)) in pairs.iter().enumerate() {
        right_vectors.set_column(j, v);
    }

    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min_gap = min_gap.min((eigenvalues[i] - eigenvalues[j]).norm());
        }
    }

    let (left_vectors, vector_condition) = match right_vectors.inverse() {
        Ok(inv) => {
            let cond = right_vectors.norm1() * inv.norm1();
            (inv.adjoint(), if cond.is_finite() { cond } else { f64::INFINITY })
        }
        Err(_) => (CMatrix::zeros(n, n), f64::INFINITY),
    };
    let defective =
        vector_condition > DEFECTIVE_CONDITION || min_gap < DEFECTIVE_GAP * radius.max(1.0);

    Ok(EigenResult { eigenvalues, right_vectors, left_vectors, defective, vector_condition, min_gap })
}

/// Unitary reduction `A = Q H Q†` with `H` upper Hessenberg.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let mut v = x;
        v[0] += phase * xnorm;
        let vn = vec_norm(&v);
        for e in &mut v {
            *e /= vn;
        }
        // H ← P H P with P = I − 2 v v† acting on indices k+1..n.
        for j in 0..n {
            let s: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= 2.0 * v[i] * s;
            }
        }
        for i in 0..n {
            let s: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= 2.0 * s * v[j].conj();
            }
            let s: C64 = (0..v.len()).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                q[(i, k + 1 + j)] -= 2.0 * s * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Rotation `G = [[c, s], [-s̄, c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, ONE);
    }
    let norm = ax.hypot(y.norm());
    (ax / norm, (x / ax) * y.conj() / norm)
}

/// Explicitly shifted QR iterations on a Hessenberg matrix. On return `h` is
/// upper triangular and `z` has accumulated the similarity transforms.
fn schur_qr(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let hnorm = h.norm1().max(f64::MIN_POSITIVE);
    let max_total = MAX_SWEEPS_PER_EIGENVALUE * n.max(1);
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n.saturating_sub(1);

    while hi > 0 {
        // Locate the start of the unreduced active block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = hnorm;
            }
            if sub <= eps * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NoConvergence { iterations: total });
        }

        let mu = if iter.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = c * a + s * b;
                h[(k + 1, j)] = -s.conj() * a + c * b;
            }
            h[(k + 1, k)] = ZERO;
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            let rmax = (k + 1).min(hi);
            for i in 0..=rmax {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = z[(i, k)];
                let b = z[(i, k + 1)];
                z[(i, k)] = a * c + b * s.conj();
                z[(i, k + 1)] = -a * s + b * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let e1 = mid + disc;
    let e2 = mid - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvectors of an upper-triangular matrix, one per diagonal entry.
fn triangular_eigenvectors(t: &CMatrix) -> Vec<Vec<C64>> {
    let n = t.rows();
    let smin = (f64::EPSILON * t.norm1()).max(f64::MIN_POSITIVE * 1e10);
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = vec![ZERO; n];
            y[k] = ONE;
            for j in (0..k).rev() {
                let s: C64 = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
                let mut denom = t[(j, j)] - lambda;
                if denom.norm() < smin {
                    denom = C64::new(smin, 0.0);
                }
                y[j] = -s / denom;
                let big = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if big > 1e100 {
                    for e in &mut y {
                        *e /= big;
                    }
                }
            }
            y
        })
        .collect()
}

fn precedes(a: C64, b: C64, tol: f64) -> bool {
    if (a.re - b.re).abs() > tol {
        a.re > b.re
    } else {
        a.im > b.im + tol
    }
}

/// Stable insertion sort; the tolerance keeps conjugate pairs ordered by
/// imaginary part even when round-off splits their real parts.
fn sort_descending(pairs: &mut [(C64, Vec<C64>)], tol: f64) {
    for i in 1..pairs.len() {
        let mut j = i;
        while j > 0 && precedes(pairs[j].0, pairs[j - 1].0, tol) {
            pairs.swap(j, j - 1);
            j -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn reconstruction_error(m: &CMatrix, r: &EigenResult) -> f64 {
        let d = CMatrix::from_diag(&r.eigenvalues);
        let rec = &(&r.right_vectors * &d) * &r.left_vectors.adjoint();
        (&rec - m).max_abs()
    }

    #[test]
    fn diagonal_matrix() {
        let m = CMatrix::from_diag(&[c(2.0), c(-1.0)]);
        let r = eig_general(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![c(2.0), c(-1.0)]);
        assert!((&r.right_vectors - &CMatrix::identity(2)).max_abs() < 1e-15);
        assert!(!r.defective);
    }

    #[test]
    fn diagonal_reversed_order_is_sorted() {
        let m = CMatrix::from_diag(&[c(-1.0), c(2.0)]);
        let r = eig_general(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![c(2.0), c(-1.0)]);
        assert!((r.right(0)[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jordan_block_is_defective() {
        let m = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let r = eig_general(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![ZERO, ZERO]);
        assert!(r.defective);
    }

    #[test]
    fn rotation_generator_has_conjugate_pair() {
        let m = CMatrix::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let r = eig_general(&m).unwrap();
        assert!((r.eigenvalues[0] - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((r.eigenvalues[1] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(reconstruction_error(&m, &r) < 1e-14);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(matches!(eig_general(&CMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn dense_nonnormal_reconstructs() {
        let m = CMatrix::from_rows(&[
            [c(1.0), C64::new(2.0, 1.0), c(0.0), c(-3.0)],
            [c(0.5), c(-2.0), C64::new(0.0, 1.0), c(1.0)],
            [C64::new(1.0, -1.0), c(0.0), c(3.0), c(2.0)],
            [c(0.0), c(4.0), c(-1.0), C64::new(0.5, 0.5)],
        ]);
        let r = eig_general(&m).unwrap();
        assert!(!r.defective);
        assert!(reconstruction_error(&m, &r) < 1e-12 * m.norm1());
        let bi = &r.left_vectors.adjoint() * &r.right_vectors;
        assert!((&bi - &CMatrix::identity(4)).max_abs() < 1e-12);
        for w in r.eigenvalues.windows(2) {
            assert!(w[0].re >= w[1].re - 1e-12);
        }
    }

    #[test]
    fn triple_jordan_block() {
        let m = CMatrix::from_real_rows(&[[3.0, 1.0, 0.0], [0.0, 3.0, 1.0], [0.0, 0.0, 3.0]]);
        let r = eig_general(&m).unwrap();
        assert!(r.defective);
        for l in &r.eigenvalues {
            assert!((l - c(3.0)).norm() < 1e-12);
        }
    }
}
