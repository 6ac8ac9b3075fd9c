//! Small complex linear-algebra helpers shared by the estimation modules.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermitian part `(A + A^H) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order.
///
/// Each eigenvector is rotated so that its first component whose magnitude
/// exceeds `1e-8` of the vector's largest component is real and positive,
/// which makes the result a deterministic function of the input.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = col
            .iter()
            .find(|z| z.norm() > 1e-8 * peak)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let rotation = pivot.conj() / pivot.norm();
        for r in 0..n {
            vectors[(r, dst)] = col[r] * rotation;
        }
    }
    (values, vectors)
}

/// Cholesky factor of a Hermitian positive-definite matrix, `None` if the
/// factorization breaks down.
pub fn cholesky(a: &CMatrix) -> Option<Cholesky<Complex64, Dyn>> {
    Cholesky::new(hermitian_part(a))
}

/// `A A^H` computed on the lower triangle and mirrored.
pub fn gram_outer(a: &CMatrix) -> CMatrix {
    let mut g = a * a.adjoint();
    let n = g.nrows();
    for i in 0..n {
        g[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
        for j in 0..i {
            let v = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    g
}

/// `A^H A`, Hermitian by construction.
pub fn gram_inner(a: &CMatrix) -> CMatrix {
    gram_outer(&a.adjoint())
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace_re(a: &CMatrix) -> f64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)].re).sum()
}

/// Kronecker product `a ⊗ b` of two vectors, `b`'s index varying fastest.
pub fn kron(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

/// Solves `A x = b` for Hermitian `A`: Cholesky first, then LU with a
/// residual check for indefinite but nonsingular systems.
pub fn solve_hermitian(a: &CMatrix, b: &CVector) -> Option<CVector> {
    if let Some(ch) = cholesky(a) {
        let x = ch.solve(b);
        if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Some(x);
        }
    }
    let x = a.clone().lu().solve(b)?;
    let scale = frobenius(a) * x.norm() + b.norm();
    let residual = (a * &x - b).norm();
    (residual.is_finite() && residual <= 1e-8 * scale.max(f64::MIN_POSITIVE)).then_some(x)
}

/// Rank-one update `m += w · v v^H`.
pub fn add_outer(m: &mut CMatrix, v: &CVector, w: f64) {
    let n = v.len();
    for c in 0..n {
        let vc = v[c].conj() * w;
        for r in 0..n {
            m[(r, c)] += v[r] * vc;
        }
    }
}
