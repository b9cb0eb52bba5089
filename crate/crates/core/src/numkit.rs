//! Dense kernels for small nonnegative matrices.
//!
//! Everything here works on plain `f64` slices and a row-major [`Mat`].
//! Problem sizes are tens of users, so the algorithms are the textbook
//! dense ones: power iteration for the spectral radius and partial-pivot
//! Gaussian elimination for linear solves.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the numeric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("empty vector or matrix")]
    Empty,
    #[error("weight entry {index} is not strictly positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("matrix entry ({row}, {col}) is negative ({value})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("entry {index} is not finite ({value})")]
    NotFinite { index: usize, value: f64 },
    #[error("ragged matrix: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("singular linear system (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("no positive solution: component {index} of (I - M)^-1 x is {value}")]
    Infeasible { index: usize, value: f64 },
    #[error("spectral radius {rho} >= 1: no weight vector gives a contraction")]
    CertificateImpossible { rho: f64 },
    #[error(
        "power iteration did not converge after {iterations} steps; rho in [{lower}, {upper}]"
    )]
    NotConverged {
        estimate: f64,
        lower: f64,
        upper: f64,
        iterations: usize,
    },
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row vectors. Rejects ragged input and non-finite entries.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, NumError> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(NumError::Empty);
        }
        let ncols = rows[0].as_ref().len();
        if ncols == 0 {
            return Err(NumError::Empty);
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(NumError::Ragged {
                    row: r,
                    len: row.len(),
                    expected: ncols,
                });
            }
            for &x in row {
                if !x.is_finite() {
                    return Err(NumError::NotFinite {
                        index: data.len(),
                        value: x,
                    });
                }
                data.push(x);
            }
        }
        Ok(Mat {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Plain (unweighted) induced infinity norm: the largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Scales row `i` by `scale[i]`.
    pub fn scale_rows(&self, scale: &[f64]) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| scale[i] * self[(i, j)])
    }

    pub fn check_nonnegative(&self) -> Result<(), NumError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self[(i, j)];
                if x < 0.0 {
                    return Err(NumError::NegativeEntry {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn check_square(&self) -> Result<(), NumError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(NumError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_weights(v: &[f64]) -> Result<(), NumError> {
    if v.is_empty() {
        return Err(NumError::Empty);
    }
    for (index, &value) in v.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(NumError::NonPositiveWeight { index, value });
        }
    }
    Ok(())
}

fn check_len(expected: usize, actual: usize) -> Result<(), NumError> {
    if expected == actual {
        Ok(())
    } else {
        Err(NumError::DimensionMismatch { expected, actual })
    }
}

/// Weighted maximum norm `max_i |x_i| / v_i`.
pub fn weighted_max_norm_vec(x: &[f64], v: &[f64]) -> Result<f64, NumError> {
    check_weights(v)?;
    check_len(v.len(), x.len())?;
    Ok(x.iter()
        .zip(v)
        .map(|(xi, vi)| xi.abs() / vi)
        .fold(0.0, f64::max))
}

/// Induced weighted maximum norm of a nonnegative matrix,
/// `max_i (sum_j A_ij v_j) / v_i`.
pub fn weighted_max_norm_mat(a: &Mat, v: &[f64]) -> Result<f64, NumError> {
    check_weights(v)?;
    check_len(a.cols(), v.len())?;
    check_len(a.rows(), v.len())?;
    a.check_nonnegative()?;
    Ok((0..a.rows())
        .map(|i| dot(a.row(i), v) / v[i])
        .fold(0.0, f64::max))
}

/// Tuning for [`spectral_radius_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    /// Relative width of the Collatz-Wielandt bracket accepted as converged.
    pub tol: f64,
    pub max_steps: usize,
    /// First-phase shift as a fraction of the largest entry.
    pub shift_factor: f64,
    /// Steps spent with the small shift before switching to a shift of `||A||_inf`.
    pub small_shift_steps: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            tol: 1e-12,
            max_steps: 100_000,
            shift_factor: 1e-9,
            small_shift_steps: 5_000,
        }
    }
}

/// Result of a converged spectral-radius computation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRadius {
    pub value: f64,
    /// Collatz-Wielandt bracket `[min_i (Ax)_i/x_i, max_i (Ax)_i/x_i]`.
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    /// Positive iterate normalised to unit max-norm. For irreducible `A` this
    /// approximates the Perron vector.
    pub perron: Vec<f64>,
}

/// Spectral radius of a square nonnegative matrix with default settings.
pub fn spectral_radius(a: &Mat) -> Result<SpectralRadius, NumError> {
    spectral_radius_with(a, &SpectralConfig::default())
}

/// Best available estimate even when the bracket never closes: the upper
/// Collatz-Wielandt bound, which is always a valid bound and converges to the
/// spectral radius for reducible matrices too.
pub fn spectral_radius_estimate(a: &Mat) -> Result<f64, NumError> {
    match spectral_radius(a) {
        Ok(s) => Ok(s.value),
        Err(NumError::NotConverged { estimate, .. }) => Ok(estimate),
        Err(e) => Err(e),
    }
}

fn collatz_wielandt(a: &Mat, x: &[f64]) -> (f64, f64) {
    let mut lower = f64::INFINITY;
    let mut upper = 0.0_f64;
    for i in 0..a.rows() {
        if x[i] <= f64::MIN_POSITIVE {
            continue;
        }
        let r = dot(a.row(i), x) / x[i];
        lower = lower.min(r);
        upper = upper.max(r);
    }
    if !lower.is_finite() {
        lower = 0.0;
    }
    (lower, upper)
}

/// Power iteration on `A + sI` with Collatz-Wielandt stopping.
///
/// The shift starts tiny (breaks exact ties without slowing convergence on
/// nilpotent parts) and switches to `||A||_inf` if the bracket has not closed
/// after `small_shift_steps`; periodic matrices such as `[[0, a], [b, 0]]`
/// only converge under the larger shift.
pub fn spectral_radius_with(a: &Mat, cfg: &SpectralConfig) -> Result<SpectralRadius, NumError> {
    a.check_square()?;
    if a.rows() == 0 {
        return Err(NumError::Empty);
    }
    a.check_nonnegative()?;
    let n = a.rows();
    let max_entry = a.max_entry();
    if max_entry == 0.0 {
        return Ok(SpectralRadius {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
            perron: vec![1.0; n],
        });
    }
    let floor = cfg.tol * max_entry;
    let mut x = vec![1.0; n];
    let mut shift = cfg.shift_factor * max_entry;
    let mut lower = 0.0;
    let mut upper = a.inf_norm();
    for step in 0..cfg.max_steps {
        if step == cfg.small_shift_steps {
            shift = a.inf_norm();
        }
        let (lo, hi) = collatz_wielandt(a, &x);
        lower = lo;
        upper = hi;
        if upper - lower <= cfg.tol * upper || upper - lower <= floor {
            return Ok(SpectralRadius {
                value: 0.5 * (lower + upper),
                lower,
                upper,
                iterations: step,
                perron: x,
            });
        }
        let mut y = a.mul_vec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
        }
        let scale = y.iter().fold(0.0_f64, |m, &v| m.max(v));
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / scale;
        }
    }
    Err(NumError::NotConverged {
        estimate: upper,
        lower,
        upper,
        iterations: cfg.max_steps,
    })
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Mat, b: &[f64]) -> Result<Vec<f64>, NumError> {
    a.check_square()?;
    let n = a.rows();
    check_len(n, b.len())?;
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m.max_entry().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        let pivot = m[(pivot_row, col)];
        if pivot.abs() <= 1e-14 * scale {
            return Err(NumError::Singular { column: col, pivot });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            rhs.swap(col, pivot_row);
        }
        for i in col + 1..n {
            let factor = m[(i, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[(i, j)] -= factor * m[(col, j)];
            }
            rhs[i] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - tail) / m[(i, i)];
    }
    Ok(x)
}

fn i_minus(m: &Mat) -> Mat {
    Mat::from_fn(m.rows(), m.cols(), |i, j| {
        if i == j {
            1.0 - m[(i, j)]
        } else {
            -m[(i, j)]
        }
    })
}

/// Fixed point `p* = (I - M)^-1 N` of the affine map `p -> M p + N`.
pub fn solve_linear_fixed_point(m: &Mat, n: &[f64]) -> Result<Vec<f64>, NumError> {
    m.check_square()?;
    check_len(m.rows(), n.len())?;
    let p = solve_linear(&i_minus(m), n)?;
    if let Some((index, &value)) = p.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(NumError::Infeasible { index, value });
    }
    Ok(p)
}

/// Weight vector `v = (I - M)^-1 x` with `M v < v`, so `||M||_inf^v < 1`.
///
/// Works without irreducibility. Fails with [`NumError::CertificateImpossible`]
/// when no such vector exists, i.e. when `rho(M) >= 1`.
pub fn weight_vector_for(m: &Mat, x: &[f64]) -> Result<Vec<f64>, NumError> {
    m.check_square()?;
    m.check_nonnegative()?;
    check_len(m.rows(), x.len())?;
    check_weights(x)?;
    let impossible = || NumError::CertificateImpossible {
        rho: spectral_radius_estimate(m).unwrap_or(f64::NAN),
    };
    let v = match solve_linear(&i_minus(m), x) {
        Ok(v) => v,
        Err(NumError::Singular { .. }) => return Err(impossible()),
        Err(e) => return Err(e),
    };
    if v.iter().any(|&vi| !(vi > 0.0) || !vi.is_finite()) {
        return Err(impossible());
    }
    let mv = m.mul_vec(&v);
    if mv.iter().zip(&v).any(|(a, b)| !(a < b)) {
        return Err(impossible());
    }
    Ok(v)
}
