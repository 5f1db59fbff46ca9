//! Dense linear algebra substrate.
//!
//! Vectors and matrices are `nalgebra` dynamic types. Symmetric
//! eigendecompositions use a cyclic Jacobi sweep, which is accurate and
//! deterministic at the problem sizes this crate targets (n <= 200).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Default tolerance wherever none is given.
pub const DEFAULT_TOL: f64 = 1e-10;

const POWER_MAX_ITER: usize = 100_000;
const POWER_SEED: u64 = 0x5eed_0f11;

/// The adjoint (transpose) of a real matrix.
pub fn adjoint(m: &Matrix) -> Matrix {
    m.transpose()
}

/// Largest singular value of `m` to relative accuracy `tol`.
pub fn operator_norm(m: &Matrix, tol: f64) -> Result<f64> {
    operator_norm_with(m, tol, POWER_MAX_ITER, POWER_SEED)
}

/// Power iteration on `m* m`.
///
/// The run starts from `(1,…,1)/√n`; a seeded random start confirms the
/// result and replaces the deterministic start when the latter stagnates
/// (for instance when it lies in the kernel of `m`).
pub fn operator_norm_with(m: &Matrix, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let gram = m.transpose() * m;
    let scale = gram.amax();
    if scale == 0.0 {
        return Ok(0.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = Vector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut best = 0.0_f64;
    let mut used = 0usize;
    let mut converged_runs = 0usize;
    let mut attempts = 0usize;
    loop {
        let (outcome, iters) = power_run(&gram, start, tol, max_iter.saturating_sub(used), scale);
        used += iters;
        attempts += 1;
        match outcome {
            PowerOutcome::Converged(lambda) => {
                best = best.max(lambda);
                converged_runs += 1;
            }
            PowerOutcome::Stagnated(lambda) => best = best.max(lambda),
            PowerOutcome::Exhausted(lambda) => {
                best = best.max(lambda);
                break;
            }
        }
        // deterministic run plus one random confirmation
        if converged_runs >= 2 || attempts >= 4 {
            break;
        }
        let v = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        start = if v.norm() > 0.0 { v.normalize() } else { Vector::from_element(n, 1.0).normalize() };
    }
    if converged_runs == 0 {
        return Err(Error::NoConvergence {
            estimate: best.max(0.0).sqrt(),
            iterations: used,
        });
    }
    Ok(best.max(0.0).sqrt())
}

enum PowerOutcome {
    Converged(f64),
    Stagnated(f64),
    Exhausted(f64),
}

fn power_run(gram: &Matrix, start: Vector, tol: f64, max_iter: usize, scale: f64) -> (PowerOutcome, usize) {
    let mut v = start;
    let mut lambda = 0.0;
    for it in 0..max_iter {
        let w = gram * &v;
        lambda = v.dot(&w);
        let wn = w.norm();
        if wn <= 1e-14 * scale {
            return (PowerOutcome::Stagnated(lambda), it + 1);
        }
        let residual = (&w - &v * lambda).norm();
        if residual <= tol * lambda {
            return (PowerOutcome::Converged(lambda), it + 1);
        }
        v = w / wn;
    }
    (PowerOutcome::Exhausted(lambda), max_iter)
}

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vector,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigensolver. Only the symmetric part of `s` is used.
pub fn sym_eigen(s: &Matrix) -> SymEigen {
    let n = s.nrows();
    assert_eq!(n, s.ncols(), "sym_eigen needs a square matrix");
    let mut a = (s + s.transpose()) * 0.5;
    let mut v = Matrix::identity(n, n);
    let frob = a.norm();
    if n > 1 && frob > 0.0 {
        for _sweep in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off.sqrt() <= 1e-15 * frob {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - sn * akq;
                        a[(k, q)] = sn * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - sn * aqk;
                        a[(q, k)] = sn * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - sn * vkq;
                        v[(k, q)] = sn * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymEigen { values, vectors }
}

fn check_psd_input(s: &Matrix, tol: f64) -> Result<Matrix> {
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch {
            context: "square matrix",
            expected: s.nrows(),
            got: s.ncols(),
        });
    }
    let asym = (s - s.transpose()).amax();
    if asym > tol * (1.0 + s.amax()) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok((s + s.transpose()) * 0.5)
}

/// Principal square root of a symmetric PSD matrix. Eigenvalues in
/// `[-tol, 0)` are clamped to zero.
pub fn principal_sqrt_psd(s: &Matrix, tol: f64) -> Result<Matrix> {
    let sym = check_psd_input(s, tol)?;
    let n = sym.nrows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let eig = sym_eigen(&sym);
    let floor = -tol * sym.amax().max(1.0);
    let min = eig.values[0];
    if min < floor {
        return Err(Error::NotPsd { eigenvalue: min, tol });
    }
    let roots = eig.values.map(|l| l.max(0.0).sqrt());
    let r = &eig.vectors * Matrix::from_diagonal(&roots) * eig.vectors.transpose();
    Ok((&r + r.transpose()) * 0.5)
}

/// Lower-triangular `R` with `R R* = S` for symmetric PSD `S`.
///
/// Pivots at or below `tol` are clamped: the column is zeroed, which is exact
/// for PSD input since the Schur column must then vanish.
pub fn cholesky_psd(s: &Matrix, tol: f64) -> Result<Matrix> {
    let sym = check_psd_input(s, tol)?;
    let n = sym.nrows();
    let scale = sym.amax().max(1.0);
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = sym[(j, j)];
        for k in 0..j {
            d -= r[(j, k)] * r[(j, k)];
        }
        if d < -tol * scale {
            return Err(Error::NotPsd { eigenvalue: d, tol });
        }
        if d <= tol * scale {
            for i in (j + 1)..n {
                let mut off = sym[(i, j)];
                for k in 0..j {
                    off -= r[(i, k)] * r[(j, k)];
                }
                if off.abs() > (tol * scale).sqrt() * scale.sqrt() {
                    return Err(Error::NotPsd { eigenvalue: d, tol });
                }
            }
            continue;
        }
        let piv = d.sqrt();
        r[(j, j)] = piv;
        for i in (j + 1)..n {
            let mut off = sym[(i, j)];
            for k in 0..j {
                off -= r[(i, k)] * r[(j, k)];
            }
            r[(i, j)] = off / piv;
        }
    }
    Ok(r)
}

/// Rank threshold used for range/null space computations.
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn orth(m: &Matrix, tol: f64) -> Matrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Matrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd requested u");
    let smax = svd.singular_values.max();
    let cut = tol * smax.max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    Matrix::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `q` inside R^n.
pub fn complement(q: &Matrix, n: usize) -> Matrix {
    if q.ncols() == 0 {
        return Matrix::identity(n, n);
    }
    if q.ncols() >= n {
        return Matrix::zeros(n, 0);
    }
    let proj = Matrix::identity(n, n) - q * q.transpose();
    let eig = sym_eigen(&proj);
    let keep: Vec<usize> = (0..n).filter(|&i| eig.values[i] > 0.5).collect();
    Matrix::from_fn(n, keep.len(), |r, c| eig.vectors[(r, keep[c])])
}

/// Orthonormal basis of `ker m`.
pub fn null_space(m: &Matrix, tol: f64) -> Matrix {
    let n = m.ncols();
    if m.nrows() == 0 {
        return Matrix::identity(n, n);
    }
    complement(&orth(&m.transpose(), tol), n)
}

/// Numerical rank of `m`.
pub fn rank(m: &Matrix, tol: f64) -> usize {
    orth(m, tol).ncols()
}

/// Minimum-norm least-squares solution of `m x = b`.
pub fn lstsq(m: &Matrix, b: &Vector) -> Vector {
    let (rows, cols) = m.shape();
    assert_eq!(rows, b.len(), "lstsq: rhs length");
    if rows == 0 || cols == 0 {
        return Vector::zeros(cols);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = RANK_TOL * smax.max(1.0);
    svd.solve(b, eps).expect("svd solve with both factors")
}

/// Moore-Penrose pseudo-inverse.
pub fn pinv(m: &Matrix) -> Matrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Matrix::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    svd.pseudo_inverse(RANK_TOL * smax.max(1.0))
        .expect("pseudo inverse with both factors")
}

/// Solves the square system `m x = b`; `None` when singular.
pub fn solve(m: &Matrix, b: &Vector) -> Option<Vector> {
    if m.nrows() == 0 {
        return Some(Vector::zeros(0));
    }
    m.clone().lu().solve(b)
}

/// Stacks matrices with equal column counts vertically.
pub fn vstack(blocks: &[&Matrix]) -> Matrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack: column count");
        out.view_mut((r0, 0), (b.nrows(), cols)).copy_from(b);
        r0 += b.nrows();
    }
    out
}

/// Stacks matrices with equal row counts horizontally.
pub fn hstack(blocks: &[&Matrix]) -> Matrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack: row count");
        out.view_mut((0, c0), (rows, b.ncols())).copy_from(b);
        c0 += b.ncols();
    }
    out
}

/// Concatenates vectors.
pub fn concat(parts: &[&Vector]) -> Vector {
    let n: usize = parts.iter().map(|p| p.len()).sum();
    let mut out = Vector::zeros(n);
    let mut i0 = 0;
    for p in parts {
        out.rows_mut(i0, p.len()).copy_from(p);
        i0 += p.len();
    }
    out
}

/// Splits `v` into a head of length `n` and the remainder.
pub fn split(v: &Vector, n: usize) -> (Vector, Vector) {
    let head = v.rows(0, n).into_owned();
    let tail = v.rows(n, v.len() - n).into_owned();
    (head, tail)
}

/// Gaussian vector with standard deviation `scale`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |_, _| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
}

/// Gaussian matrix with unit entries' standard deviation.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
}

pub fn all_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn adjoint_of_rotation() {
        let m = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let expected = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(adjoint(&m), expected);
        assert_eq!(adjoint(&Matrix::identity(2, 2)), Matrix::identity(2, 2));
    }

    #[test]
    fn adjoint_inner_product_identity() {
        let m = random_matrix(3, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = Vector::from_fn(2, |_, _| StandardNormal.sample(&mut rng));
            let y = Vector::from_fn(3, |_, _| StandardNormal.sample(&mut rng));
            let lhs = (&m * &x).dot(&y);
            let rhs = x.dot(&(adjoint(&m) * &y));
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + x.norm() * y.norm()));
        }
    }

    #[test]
    fn norm_of_identity_and_rotation() {
        assert!((operator_norm(&Matrix::identity(3, 3), 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let rot = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((operator_norm(&rot, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(operator_norm(&Matrix::zeros(2, 3), 1e-10).unwrap(), 0.0);
        assert_eq!(operator_norm(&Matrix::zeros(0, 3), 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn norm_finds_direction_orthogonal_to_ones() {
        // the top right-singular vector is (1,-1)/√2, orthogonal to the start
        let m = Matrix::from_row_slice(2, 2, &[3.0, -3.0, 1.0, 1.0]);
        let n = operator_norm(&m, 1e-12).unwrap();
        assert!((n - 18f64.sqrt()).abs() < 1e-9, "{n}");
    }

    #[test]
    fn norm_matches_jacobi_singular_values() {
        let m = random_matrix(4, 3, 7);
        let eig = sym_eigen(&(m.transpose() * &m));
        let oracle = eig.values[2].sqrt();
        let got = operator_norm(&m, 1e-12).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn norm_rejects_bad_tol() {
        assert!(operator_norm(&Matrix::identity(2, 2), 0.0).is_err());
    }

    #[test]
    fn jacobi_reconstructs() {
        let g = random_matrix(5, 5, 3);
        let s = &g + g.transpose();
        let eig = sym_eigen(&s);
        let rec = &eig.vectors * Matrix::from_diagonal(&eig.values) * eig.vectors.transpose();
        assert!((rec - &s).amax() < 1e-12);
        let gram = eig.vectors.transpose() * &eig.vectors;
        assert!((gram - Matrix::identity(5, 5)).amax() < 1e-12);
        for i in 1..5 {
            assert!(eig.values[i - 1] <= eig.values[i]);
        }
    }

    #[test]
    fn sqrt_examples() {
        let id = Matrix::identity(3, 3);
        assert!((principal_sqrt_psd(&id, 1e-10).unwrap() - &id).amax() < 1e-14);
        let d = Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 9.0]));
        let r = principal_sqrt_psd(&d, 1e-10).unwrap();
        let expected = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 3.0]));
        assert!((r - expected).amax() < 1e-14);
    }

    #[test]
    fn sqrt_of_scaled_isometry_remainder_is_zero() {
        // rows orthogonal with length 1/sqrt(sigma*tau)
        let (sigma, tau) = (0.5_f64, 2.0);
        let l = Matrix::from_row_slice(1, 2, &[1.0, 0.0]) / (sigma * tau).sqrt();
        let s = Matrix::identity(1, 1) - l.clone() * l.transpose() * (sigma * tau);
        let r = principal_sqrt_psd(&s, 1e-10).unwrap();
        assert!(r.amax() < 1e-7);
    }

    #[test]
    fn sqrt_rejects_indefinite_and_asymmetric() {
        let s = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, -0.5]));
        assert!(matches!(principal_sqrt_psd(&s, 1e-10), Err(Error::NotPsd { .. })));
        let a = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(principal_sqrt_psd(&a, 1e-10), Err(Error::NotSymmetric { .. })));
        assert!(matches!(cholesky_psd(&s, 1e-10), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn cholesky_examples() {
        let id = Matrix::identity(2, 2);
        assert!((cholesky_psd(&id, 1e-10).unwrap() - &id).amax() < 1e-15);
        let d = Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 0.0]));
        let r = cholesky_psd(&d, 1e-10).unwrap();
        let expected = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 0.0]));
        assert!((r - expected).amax() < 1e-15);
    }

    #[test]
    fn cholesky_random_psd() {
        let g = random_matrix(4, 4, 11);
        let s = &g * g.transpose();
        let r = cholesky_psd(&s, 1e-10).unwrap();
        assert!((&r * r.transpose() - &s).amax() <= 1e-10);
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn cholesky_singular_psd() {
        let g = random_matrix(4, 2, 12);
        let s = &g * g.transpose();
        let r = cholesky_psd(&s, 1e-10).unwrap();
        assert!((&r * r.transpose() - &s).amax() <= 1e-8);
    }

    #[test]
    fn subspace_helpers() {
        let m = Matrix::from_row_slice(3, 2, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(rank(&m, RANK_TOL), 1);
        let k = null_space(&m, RANK_TOL);
        assert_eq!(k.ncols(), 1);
        assert!((&m * &k).amax() < 1e-12);
        let q = orth(&m, RANK_TOL);
        let c = complement(&q, 3);
        assert_eq!(c.ncols(), 2);
        assert!((q.transpose() * &c).amax() < 1e-12);
        let b = Vector::from_vec(vec![2.0, 0.0, 2.0]);
        let x = lstsq(&m, &b);
        assert!((&m * &x - &b).norm() < 1e-12);
        assert!((x[0] - x[1]).abs() < 1e-12);
    }
}
