//! Small dense linear algebra over `Scalar`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

/// Outcome of a semidefiniteness test.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdOutcome {
    pub psd: bool,
    /// A vector `u` with `uᵀAu < 0` when the test fails.
    pub witness: Option<Vec<Scalar>>,
    /// `uᵀAu` for the witness, evaluated on the original matrix.
    pub witness_value: Option<Scalar>,
}

/// `uᵀAv`.
pub fn bilinear(a: &Matrix, u: &[Scalar], v: &[Scalar]) -> Scalar {
    let mut sum = Scalar::zero();
    for (i, row) in a.iter().enumerate() {
        if u[i].is_zero() {
            continue;
        }
        let mut inner = Scalar::zero();
        for (j, x) in row.iter().enumerate() {
            if !v[j].is_zero() {
                inner = inner + x * &v[j];
            }
        }
        sum = sum + &u[i] * inner;
    }
    sum
}

fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = &*yi + a * xi;
        }
    }
}

/// Rounding allowance for matrices holding real entries: a few ulps of the
/// working precision, relative to the trace.
fn rounding_floor(a: &Matrix, scale: &Scalar) -> Scalar {
    let exact = a.iter().flatten().all(Scalar::is_exact);
    if exact {
        return Scalar::zero();
    }
    let bits = a
        .iter()
        .flatten()
        .filter_map(Scalar::precision)
        .min()
        .unwrap_or_else(crate::scalar::working_precision);
    let eps = Scalar::int(2).powi(-(i64::from(bits) - 16));
    eps * scale
}

/// Symmetric pivoted elimination. A matrix passes when no Schur-complement
/// pivot drops below `-tol·trace`. On failure an explicit vector `u` with
/// `uᵀAu < 0` is produced; for rational input with `tol = 0` the verdict
/// is exact.
pub fn psd_test(a: &Matrix, tol: &Scalar) -> PsdOutcome {
    let n = a.len();
    let trace: Scalar = (0..n).map(|i| a[i][i].clone()).sum();
    let scale = trace.abs().max(Scalar::one());
    let thr = tol * &scale + rounding_floor(a, &scale);

    let mut s: Matrix = a.clone();
    let mut basis: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();

    let fail = |u: Vec<Scalar>| {
        let value = bilinear(a, &u, &u);
        PsdOutcome {
            psd: false,
            witness: Some(u),
            witness_value: Some(value),
        }
    };

    while !active.is_empty() {
        let p = *active
            .iter()
            .max_by(|&&i, &&j| s[i][i].partial_cmp(&s[j][j]).expect("comparable"))
            .expect("nonempty");
        let d = s[p][p].clone();
        if d < -thr.clone() {
            return fail(basis[p].clone());
        }
        if d <= thr {
            // All remaining pivots are numerically zero: the rest must vanish.
            for (ai, &i) in active.iter().enumerate() {
                for &j in &active[ai + 1..] {
                    let sij = s[i][j].clone();
                    if sij.abs() <= thr {
                        continue;
                    }
                    let sii = s[i][i].clone();
                    let sjj = s[j][j].clone();
                    let x = if sii.is_positive() {
                        -(&sij / &sii)
                    } else {
                        -((sjj.abs() + Scalar::one()) / (Scalar::int(2) * &sij))
                    };
                    let value = &x * &x * &sii + Scalar::int(2) * &x * &sij + &sjj;
                    if value < -thr.clone() {
                        let mut u = basis[j].clone();
                        axpy(&mut u, &x, &basis[i]);
                        return fail(u);
                    }
                }
            }
            break;
        }
        active.retain(|&i| i != p);
        let row_p = s[p].clone();
        let up = basis[p].clone();
        for &i in &active {
            let f = &row_p[i] / &d;
            if f.is_zero() {
                continue;
            }
            for &j in &active {
                s[i][j] = &s[i][j] - &f * &row_p[j];
            }
            let neg = -f;
            axpy(&mut basis[i], &neg, &up);
        }
    }
    PsdOutcome {
        psd: true,
        witness: None,
        witness_value: None,
    }
}

/// Smallest eigenvalue in double precision, for reporting.
pub fn min_eigenvalue_f64(a: &Matrix) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j].to_f64());
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::LengthMismatch(format!("system of size {n} with right side of length {}", b.len())));
    }
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).expect("comparable"))
            .expect("nonempty range");
        if m[piv][col].is_zero() {
            return Err(Error::Numerical("singular linear system".into()));
        }
        m.swap(col, piv);
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            let f = &row[col] / &pivot_row[col];
            if f.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = &*x - &f * p;
            }
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc - &m[i][j] * &x[j];
        }
        x[i] = acc / &m[i][i];
    }
    Ok(x)
}
