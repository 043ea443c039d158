//! Row-major dense Cholesky routines for the likelihood inner loop.

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// In-place lower Cholesky of the symmetric `n × n` matrix `a` (lower triangle read).
/// Returns `false` if the matrix is not numerically positive definite.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for i in 0..n {
        let (head, tail) = a.split_at_mut(i * n);
        let row_i = &mut tail[..n];
        for j in 0..i {
            let row_j = &head[j * n..j * n + j + 1];
            let v = row_i[j] - dot(&row_i[..j], &row_j[..j]);
            row_i[j] = v / row_j[j];
        }
        let v = row_i[i] - dot(&row_i[..i], &row_i[..i]);
        if !(v > 0.0) {
            return false;
        }
        row_i[i] = v.sqrt();
        for x in &mut row_i[i + 1..] {
            *x = 0.0;
        }
    }
    true
}

/// Lower triangle of `(L Lᵀ)⁻¹` from the lower Cholesky factor `l`.
pub(crate) fn inverse_from_cholesky(l: &[f64], n: usize) -> Vec<f64> {
    // m = (L⁻¹)ᵀ, upper triangular; row j of m is column j of L⁻¹
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        let diag = 1.0 / l[i * n + i];
        m[i * n + i] = diag;
        let row_l = &l[i * n..i * n + i];
        for j in 0..i {
            let s = dot(&row_l[j..i], &m[j * n + j..j * n + i]);
            m[j * n + i] = -s * diag;
        }
    }
    // (A⁻¹)_{ij} = Σ_{k ≥ i} m_{ik} m_{jk} for j ≤ i
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            inv[i * n + j] = dot(&m[i * n + i..i * n + n], &m[j * n + i..j * n + n]);
        }
    }
    inv
}

/// Solve `L Lᵀ x = b` in place.
pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let s = dot(&l[i * n..i * n + i], &b[..i]);
        b[i] = (b[i] - s) / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}
