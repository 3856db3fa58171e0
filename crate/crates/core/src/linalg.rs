//! Small dense complex linear algebra kit.
//!
//! Everything the simulator needs and nothing more: a row-major complex
//! matrix, Cholesky factorization for Hermitian positive-definite solves,
//! Householder tridiagonalization plus implicit-shift QL for Hermitian
//! eigenvalues, a cyclic Jacobi eigendecomposition (eigenvalues and
//! vectors, used on small matrices and as a second algebraic route in
//! tests), and power iteration for a dominant eigenvector.

use num_complex::Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Build from row slices; all rows must share a length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * v` for a column vector.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn scaled(&self, s: f64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max |A - A^H| entry, as a Hermitian-symmetry residual.
    pub fn hermitian_residual(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let dev = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugated inner product `a^H b`.
pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(&x, &y)| x.conj() * y).sum()
}

// ---------------------------------------------------------------------------
// Cholesky and Hermitian solves
// ---------------------------------------------------------------------------

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
///
/// Returns `Err(j)` with the pivot index at which positivity fails.
pub fn cholesky(a: &CMat) -> Result<CMat, usize> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "cholesky needs a square matrix");
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= 0.0 || diag.is_nan() {
            return Err(j);
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solve `A X = B` for Hermitian positive-definite `A` via Cholesky.
pub fn hermitian_solve(a: &CMat, b: &CMat) -> Result<CMat, usize> {
    let l = cholesky(a)?;
    Ok(cholesky_solve(&l, b))
}

/// Solve with a precomputed lower Cholesky factor: forward then back
/// substitution, column by column.
pub fn cholesky_solve(l: &CMat, b: &CMat) -> CMat {
    let n = l.rows();
    assert_eq!(b.rows(), n, "dimension mismatch in cholesky_solve");
    let mut x = b.clone();
    for col in 0..b.cols() {
        // L y = b
        for i in 0..n {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)].re;
        }
        // L^H x = y
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in (i + 1)..n {
                s -= l[(k, i)].conj() * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)].re;
        }
    }
    x
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn hermitian_inverse(a: &CMat) -> Result<CMat, usize> {
    hermitian_solve(a, &CMat::identity(a.rows()))
}

// ---------------------------------------------------------------------------
// Hermitian eigenvalues: Householder tridiagonalization + implicit QL
// ---------------------------------------------------------------------------

/// Reduce a Hermitian matrix to real symmetric tridiagonal form, returning
/// `(diagonal, subdiagonal)`. Eigenvalues are preserved; the unitary
/// transform is not accumulated.
fn hermitian_tridiagonalize(a: &CMat) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut w = a.clone();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n.saturating_sub(1)];

    for k in 0..n.saturating_sub(2) {
        // Householder reflector for column k below the diagonal.
        let alpha = w[(k + 1, k)];
        let mut xnorm_sq = 0.0;
        for i in (k + 2)..n {
            xnorm_sq += w[(i, k)].norm_sqr();
        }
        let col_norm = (alpha.norm_sqr() + xnorm_sq).sqrt();
        if col_norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        // beta real, opposite sign of Re(alpha) to avoid cancellation
        let beta = if alpha.re >= 0.0 { -col_norm } else { col_norm };
        let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
        let denom = alpha - beta;
        // v[0] = 1 at row k+1; scale the rest of the column
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k + 1] = Complex64::new(1.0, 0.0);
        for i in (k + 2)..n {
            v[i] = w[(i, k)] / denom;
        }
        // Two-sided update of the trailing block: B -= v w^H + w v^H with
        // w = p - (tau/2)(p^H v) v and p = tau B v.
        let mut p = vec![Complex64::new(0.0, 0.0); n];
        for i in (k + 1)..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                s += w[(i, j)] * v[j];
            }
            p[i] = tau * s;
        }
        let phv: Complex64 = ((k + 1)..n).map(|i| p[i].conj() * v[i]).sum();
        let corr = tau * phv * 0.5;
        for i in (k + 1)..n {
            p[i] -= corr * v[i];
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                w[(i, j)] -= upd;
            }
        }
        e[k] = beta.abs();
        w[(k + 1, k)] = Complex64::new(beta, 0.0);
    }
    if n >= 2 {
        e[n - 2] = w[(n - 1, n - 2)].norm();
    }
    for i in 0..n {
        d[i] = w[(i, i)].re;
    }
    (d, e)
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit-shift QL.
fn tridiag_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    if n <= 1 {
        return d;
    }
    e.resize(n, 0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                // No practical covariance matrix gets here; return what we
                // have rather than spinning.
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(a: &CMat) -> Vec<f64> {
    let n = a.rows();
    match n {
        0 => vec![],
        1 => vec![a[(0, 0)].re],
        _ => {
            let (d, e) = hermitian_tridiagonalize(a);
            tridiag_eigenvalues(d, e)
        }
    }
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition: cyclic complex Jacobi
// ---------------------------------------------------------------------------

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending and the matrix whose columns are the
/// matching unit eigenvectors. Quadratic in accuracy, cubic per sweep;
/// intended for small matrices and oracle checks.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "eigh needs a square matrix");
    let mut w = a.clone();
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += w[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = w[(p, q)];
                let gmag = g.norm();
                if gmag <= 1e-300 {
                    continue;
                }
                let u = g / gmag; // phase of the off-diagonal entry
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                let tau = (aqq - app) / (2.0 * gmag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let su = s * u;
                let suc = s * u.conj();
                // A <- R^H A R, columns then rows
                for k in 0..n {
                    let akp = w[(k, p)];
                    let akq = w[(k, q)];
                    w[(k, p)] = c * akp - suc * akq;
                    w[(k, q)] = su * akp + c * akq;
                }
                for k in 0..n {
                    let apk = w[(p, k)];
                    let aqk = w[(q, k)];
                    w[(p, k)] = c * apk - su * aqk;
                    w[(q, k)] = suc * apk + c * aqk;
                }
                w[(p, q)] = Complex64::new(0.0, 0.0);
                w[(q, p)] = Complex64::new(0.0, 0.0);
                // V <- V R
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - suc * vkq;
                    v[(k, q)] = su * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.partial_cmp(&w[(j, j)].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| w[(i, i)].re).collect();
    let vecs = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (vals, vecs)
}

// ---------------------------------------------------------------------------
// Power iteration
// ---------------------------------------------------------------------------

/// Dominant eigenpair of a Hermitian PSD matrix by power iteration.
///
/// Starts from the first canonical basis vector, which doubles as the
/// documented tie-break for degenerate spectra (`A = I` returns `e_1`).
/// Returns `None` for an all-zero matrix.
pub fn dominant_eigenpair(a: &CMat, max_iter: usize) -> Option<(f64, Vec<Complex64>)> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return None;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[0] = Complex64::new(1.0, 0.0);
    let mut lambda = 0.0f64;
    for _ in 0..max_iter {
        let mut av = a.mul_vec(&v);
        let norm = vec_norm(&av);
        if norm == 0.0 {
            // start vector in the null space; nudge to the next basis vector
            let zero_idx = v.iter().position(|z| z.norm() == 0.0)?;
            v = vec![Complex64::new(0.0, 0.0); n];
            v[zero_idx] = Complex64::new(1.0, 0.0);
            continue;
        }
        for z in av.iter_mut() {
            *z /= norm;
        }
        v = av;
        let av2 = a.mul_vec(&v);
        lambda = dot_conj(&v, &av2).re;
        let residual: f64 = av2
            .iter()
            .zip(&v)
            .map(|(&x, &y)| (x - y * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= 1e-12 * lambda.abs().max(scale * 1e-6) {
            break;
        }
    }
    Some((lambda, v))
}
