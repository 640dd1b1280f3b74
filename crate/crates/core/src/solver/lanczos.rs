//! Shift-invert Lanczos for the smallest eigenpairs of the SPD pencil
//! `A x = omega^2 M x`.
//!
//! The iteration runs on `(A - shift*M)^{-1} M` with basis vectors kept
//! orthonormal in the M-inner product and full reorthogonalization at every
//! step. The shift-inverted operator is self-adjoint in that inner product,
//! its largest eigenvalues map to the smallest pencil eigenvalues via
//! `omega^2 = shift + 1/theta`, and one SPD factorization serves every
//! iteration. Clustered eigenvalues are handled by iterating until two more
//! Ritz pairs than requested pass the residual test.

use super::spd_factorize;
use crate::assembly::SparseSymmetric;
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ritz extraction cadence: forming Ritz vectors costs `O(extra * k * n)`, so
/// convergence is tested every few steps rather than every step.
const CHECK_EVERY: usize = 10;

/// Eigensolver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Number of eigenpairs to return.
    pub count: usize,
    /// Relative residual tolerance: `||A x - w^2 M x|| <= tol * ||A x||`.
    pub tol: f64,
    /// Spectral shift; must stay below the smallest eigenvalue.
    pub shift: f64,
    /// Seed for the start vector, making runs bit-reproducible.
    pub seed: u64,
    /// Cap on the Krylov subspace dimension.
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            count: 6,
            tol: 1e-9,
            shift: 0.0,
            seed: 42,
            max_iter: 500,
        }
    }
}

/// Converged eigenpairs, ascending by eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenPairSet {
    /// Pencil eigenvalues `omega^2`.
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors over free dofs.
    pub vectors: Vec<Vec<f64>>,
    /// Relative residuals `||A x - w^2 M x|| / ||A x||`.
    pub residuals: Vec<f64>,
}

/// Computes the `opts.count` algebraically smallest eigenpairs of
/// `A x = omega^2 M x` for SPD `A` and `M`.
pub fn smallest_eigenpairs(
    a: &SparseSymmetric,
    m: &SparseSymmetric,
    opts: &EigenOptions,
) -> Result<EigenPairSet> {
    let n = a.dim();
    if m.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
    }
    if opts.count == 0 {
        return Err(Error::InvalidSolverParameter("count must be at least 1".into()));
    }
    if opts.count > n {
        return Err(Error::InvalidSolverParameter(format!(
            "requested {} eigenpairs of a {n}-dimensional pencil",
            opts.count
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidSolverParameter("tol must be positive".into()));
    }

    // Two extra pairs resolve clusters around the requested window.
    let extra = (opts.count + 2).min(n);
    let max_dim = opts.max_iter.min(n).max(extra);

    let shifted = if opts.shift == 0.0 {
        a.clone()
    } else {
        a.linear_combination(1.0, m, -opts.shift)?
    };
    let factor = spd_factorize(&shifted)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let v0 = random_m_normalized(&mut rng, m, &basis, n)?;
    basis.push(v0);

    loop {
        let j = basis.len() - 1;
        let mv = m.mul_vec_alloc(&basis[j]);
        let mut u = factor.solve(&mv);
        let alpha = dot(&u, &mv);
        axpy(&mut u, -alpha, &basis[j]);
        if j > 0 {
            let beta_prev = betas[j - 1];
            axpy(&mut u, -beta_prev, &basis[j - 1]);
        }
        alphas.push(alpha);

        // Full reorthogonalization in the M-inner product (two passes).
        for _ in 0..2 {
            let z = m.mul_vec_alloc(&u);
            for vi in &basis {
                let c = dot(&z, vi);
                axpy(&mut u, -c, vi);
            }
        }

        let beta = m_norm(m, &u);
        let done_growing = basis.len() == max_dim;

        if !done_growing {
            if beta > 1e-12 * alpha.abs().max(1.0) {
                scale(&mut u, 1.0 / beta);
                betas.push(beta);
                basis.push(u);
            } else {
                // Invariant subspace: restart the recurrence with a fresh
                // random direction, keeping the block structure via beta = 0.
                let w = random_m_normalized(&mut rng, m, &basis, n)?;
                betas.push(0.0);
                basis.push(w);
            }
        }

        let k = alphas.len();
        if k >= extra && (k % CHECK_EVERY == 0 || done_growing) {
            if let Some(result) =
                extract_if_converged(a, m, &basis, &alphas, &betas, opts, extra)?
            {
                return Ok(result);
            }
        }
        if done_growing {
            break;
        }
    }

    let converged = count_converged(a, m, &basis, &alphas, &betas, opts, extra)?;
    Err(Error::EigenNonConvergence {
        requested: extra,
        converged,
        iterations: alphas.len(),
    })
}

/// Ritz extraction: diagonalizes the tridiagonal matrix, forms the leading
/// `extra` Ritz pairs, and returns the first `count` once all `extra` pass the
/// explicit pencil residual test.
fn extract_if_converged(
    a: &SparseSymmetric,
    m: &SparseSymmetric,
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    opts: &EigenOptions,
    extra: usize,
) -> Result<Option<EigenPairSet>> {
    let k = alphas.len();
    if k < extra {
        return Ok(None);
    }
    let candidates = ritz_candidates(alphas, betas, extra);
    let mut values = Vec::with_capacity(extra);
    let mut vectors = Vec::with_capacity(extra);
    let mut residuals = Vec::with_capacity(extra);
    for (theta, s) in candidates {
        if !(theta > 0.0) {
            // The shift-inverted operator is positive definite; a
            // non-positive Ritz value is a not-yet-converged artifact.
            return Ok(None);
        }
        let omega2 = opts.shift + 1.0 / theta;
        let mut y = vec![0.0; basis[0].len()];
        for (c, v) in s.iter().zip(basis.iter()) {
            axpy(&mut y, *c, v);
        }
        // Normalize in the M-inner product.
        let nrm = m_norm(m, &y);
        if nrm == 0.0 {
            return Ok(None);
        }
        scale(&mut y, 1.0 / nrm);
        let ay = a.mul_vec_alloc(&y);
        let my = m.mul_vec_alloc(&y);
        let mut r = 0.0;
        let mut ay_norm = 0.0;
        for i in 0..y.len() {
            let ri = ay[i] - omega2 * my[i];
            r += ri * ri;
            ay_norm += ay[i] * ay[i];
        }
        let rel = (r / ay_norm.max(f64::MIN_POSITIVE)).sqrt();
        if rel > opts.tol {
            return Ok(None);
        }
        values.push(omega2);
        vectors.push(y);
        residuals.push(rel);
    }
    // Candidates arrive with theta descending = omega^2 ascending.
    values.truncate(opts.count);
    vectors.truncate(opts.count);
    residuals.truncate(opts.count);
    Ok(Some(EigenPairSet { values, vectors, residuals }))
}

fn count_converged(
    a: &SparseSymmetric,
    m: &SparseSymmetric,
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    opts: &EigenOptions,
    extra: usize,
) -> Result<usize> {
    let candidates = ritz_candidates(alphas, betas, extra);
    let mut converged = 0;
    for (theta, s) in candidates {
        if !(theta > 0.0) {
            continue;
        }
        let omega2 = opts.shift + 1.0 / theta;
        let mut y = vec![0.0; basis[0].len()];
        for (c, v) in s.iter().zip(basis.iter()) {
            axpy(&mut y, *c, v);
        }
        let nrm = m_norm(m, &y);
        if nrm == 0.0 {
            continue;
        }
        scale(&mut y, 1.0 / nrm);
        let ay = a.mul_vec_alloc(&y);
        let my = m.mul_vec_alloc(&y);
        let mut r = 0.0;
        let mut ay_norm = 0.0;
        for i in 0..y.len() {
            let ri = ay[i] - omega2 * my[i];
            r += ri * ri;
            ay_norm += ay[i] * ay[i];
        }
        if (r / ay_norm.max(f64::MIN_POSITIVE)).sqrt() <= opts.tol {
            converged += 1;
        }
    }
    Ok(converged)
}

/// Largest `extra` eigenpairs of the Lanczos tridiagonal matrix, by value
/// descending.
fn ritz_candidates(alphas: &[f64], betas: &[f64], extra: usize) -> Vec<(f64, Vec<f64>)> {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k && i < betas.len() {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[y]
            .partial_cmp(&eig.eigenvalues[x])
            .expect("finite Ritz values")
    });
    order
        .into_iter()
        .take(extra)
        .map(|idx| {
            let s: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
            (eig.eigenvalues[idx], s)
        })
        .collect()
}

/// Draws a random vector, M-orthogonalizes it against the basis, and
/// normalizes it in the M-inner product.
fn random_m_normalized(
    rng: &mut ChaCha8Rng,
    m: &SparseSymmetric,
    basis: &[Vec<f64>],
    n: usize,
) -> Result<Vec<f64>> {
    for _ in 0..20 {
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            let z = m.mul_vec_alloc(&w);
            for vi in basis {
                let c = dot(&z, vi);
                axpy(&mut w, -c, vi);
            }
        }
        let nrm = m_norm(m, &w);
        if nrm > 1e-12 {
            scale(&mut w, 1.0 / nrm);
            return Ok(w);
        }
    }
    Err(Error::InvalidSolverParameter(
        "could not draw a start vector outside the converged subspace".into(),
    ))
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(x: &mut [f64], s: f64) {
    for xi in x {
        *xi *= s;
    }
}

fn m_norm(m: &SparseSymmetric, x: &[f64]) -> f64 {
    m.quadratic_form(x).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn opts(count: usize) -> EigenOptions {
        EigenOptions { count, ..Default::default() }
    }

    #[test]
    fn diagonal_pencil() {
        let a = SparseSymmetric::diagonal(&[1.0, 2.0, 3.0]);
        let m = SparseSymmetric::identity(3);
        let eig = smallest_eigenpairs(&a, &m, &opts(2)).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-10);
        assert!((eig.values[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn identity_pencil_all_ones() {
        // A = M: every eigenvalue is 1; the identity operator breaks the
        // recurrence down immediately and random restarts must fill the block.
        let mut triplets = Vec::new();
        for i in 0..6 {
            triplets.push((i, i, 2.0));
            if i + 1 < 6 {
                triplets.push((i, i + 1, -0.5));
            }
        }
        let a = SparseSymmetric::from_upper_triplets(6, triplets).unwrap();
        let eig = smallest_eigenpairs(&a, &a, &opts(3)).unwrap();
        for v in &eig.values {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    fn random_spd(n: usize, rng: &mut StdRng, diag_boost: f64) -> DMatrix<f64> {
        let b = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &b * b.transpose() + DMatrix::identity(n, n) * diag_boost
    }

    /// Dense generalized eigenvalue oracle via Cholesky reduction.
    fn dense_oracle(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
        let chol = m.clone().cholesky().expect("M SPD");
        let l_inv = chol.l().try_inverse().expect("invertible");
        let c = &l_inv * a * l_inv.transpose();
        let sym = (&c + c.transpose()) * 0.5;
        let mut eigs: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    #[test]
    fn random_pencil_matches_dense_oracle() {
        let mut rng = StdRng::seed_from_u64(3);
        for trial in 0..5 {
            let n = 50;
            let a_d = random_spd(n, &mut rng, 1.0);
            let m_d = random_spd(n, &mut rng, 5.0);
            let a = SparseSymmetric::from_dense(&a_d).unwrap();
            let m = SparseSymmetric::from_dense(&m_d).unwrap();
            let want = dense_oracle(&a_d, &m_d);
            let eig = smallest_eigenpairs(&a, &m, &opts(5)).unwrap();
            for i in 0..5 {
                assert!(
                    (eig.values[i] - want[i]).abs() <= 1e-8 * want[i].abs().max(1.0),
                    "trial {trial} index {i}: {} vs {}",
                    eig.values[i],
                    want[i]
                );
            }
            // M-orthonormality of the returned vectors.
            for i in 0..5 {
                for j in i..5 {
                    let my = m.mul_vec_alloc(&eig.vectors[j]);
                    let d = dot(&eig.vectors[i], &my);
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((d - expect).abs() < 1e-8, "({i},{j}) -> {d}");
                }
            }
            for r in &eig.residuals {
                assert!(*r <= 1e-9);
            }
        }
    }

    #[test]
    fn shift_invariance() {
        let mut rng = StdRng::seed_from_u64(4);
        let a_d = random_spd(40, &mut rng, 2.0);
        let m_d = random_spd(40, &mut rng, 4.0);
        let a = SparseSymmetric::from_dense(&a_d).unwrap();
        let m = SparseSymmetric::from_dense(&m_d).unwrap();
        let base = smallest_eigenpairs(&a, &m, &opts(4)).unwrap();
        let shifted = smallest_eigenpairs(
            &a,
            &m,
            &EigenOptions {
                shift: 0.5 * base.values[0],
                ..opts(4)
            },
        )
        .unwrap();
        for (x, y) in base.values.iter().zip(&shifted.values) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn ascending_order_and_validation() {
        let a = SparseSymmetric::diagonal(&[5.0, 1.0, 4.0, 2.0, 3.0]);
        let m = SparseSymmetric::identity(5);
        let eig = smallest_eigenpairs(&a, &m, &opts(4)).unwrap();
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for (got, want) in eig.values.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-10);
        }

        assert!(smallest_eigenpairs(&a, &m, &opts(0)).is_err());
        assert!(smallest_eigenpairs(&a, &m, &opts(9)).is_err());
    }

    #[test]
    fn shift_above_spectrum_rejected() {
        let a = SparseSymmetric::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let m = SparseSymmetric::identity(4);
        let res = smallest_eigenpairs(
            &a,
            &m,
            &EigenOptions { shift: 2.5, ..opts(1) },
        );
        assert!(matches!(res, Err(Error::NotPositiveDefinite { .. })));
    }
}
