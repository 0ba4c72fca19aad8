//! Dense linear algebra for the 2- and 4-dimensional operator spaces the
//! rest of the crate lives in.
//!
//! Everything is specialised to fixed small dimensions: a cyclic Jacobi
//! eigensolver for Hermitian matrices, a scaling-and-squaring matrix
//! exponential for real 4x4 generators, Kronecker products and partial
//! traces over the qubit-pair factorisation, and a spectral logarithm for
//! positive semidefinite matrices.  No pivoting heuristics, no growth
//! policies: the sizes are 2 and 4, full sweeps are cheap, and the
//! accuracy targets are set by the tolerances below.

use num_complex::Complex64;

use crate::Error;

/// Jacobi stops once the off-diagonal Frobenius norm drops below
/// `JACOBI_TOL * ||M||_F`.
const JACOBI_TOL: f64 = 1e-14;

/// Full sweeps before giving up; 4x4 Hermitian input converges in well
/// under ten.
const JACOBI_MAX_SWEEPS: usize = 50;

/// Inputs must satisfy `max|M - M^H| <= HERMITIAN_TOL * max|M|`.
const HERMITIAN_TOL: f64 = 1e-13;

/// The Taylor core of the matrix exponential runs on arguments scaled to
/// one-norm below this threshold.  1/16 keeps the degree-8 remainder near
/// 4e-17, far inside the 1e-12 accuracy budget.
const EXP_SCALE_THRESHOLD: f64 = 1.0 / 16.0;

/// Degree of the Taylor core of [`matrix_exp`].
const EXP_TAYLOR_DEGREE: usize = 8;

/// Eigenvalues are clamped to this floor before a logarithm is taken, so
/// rank-deficient states yield large negative logs instead of -inf.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-300;

/// Eigenvalues below `-PSD_TOL` disqualify a matrix from the positive
/// semidefinite operations.
const PSD_TOL: f64 = 1e-10;

/// Square complex matrix of dimension 2 or 4, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix.  Panics unless `dim` is 2 or 4.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "only dimensions 2 and 4 are supported");
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from a row-major closure over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Pauli matrix sigma_k for k in 0..=3 (sigma_0 is the identity).
    pub fn pauli(k: usize) -> Self {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let rows = match k {
            0 => [[l, o], [o, l]],
            1 => [[o, l], [l, o]],
            2 => [[o, -i], [i, o]],
            3 => [[l, o], [o, -l]],
            _ => panic!("pauli index must be 0..=3"),
        };
        Self::from_fn(2, |r, c| rows[r][c])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self::from_fn(self.dim, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..self.dim {
                acc += self.get(r, k) * rhs.get(k, c);
            }
            acc
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self::from_fn(self.dim, |r, c| self.get(r, c) + rhs.get(r, c))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self::from_fn(self.dim, |r, c| self.get(r, c) - rhs.get(r, c))
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(r, c) * z)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from the adjoint.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }
}

/// Real 4x4 matrix; the Bloch 4-vector generator and propagator live here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealMatrix4 {
    m: [[f64; 4]; 4],
}

impl RealMatrix4 {
    pub fn zeros() -> Self {
        RealMatrix4 { m: [[0.0; 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut r = Self::zeros();
        for i in 0..4 {
            r.m[i][i] = 1.0;
        }
        r
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        RealMatrix4 { m: rows }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.m[r][c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.m[r][c] = v;
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros();
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += self.m[r][k] * rhs.m[k][c];
                }
                out.m[r][c] = acc;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.m[r][c] += rhs.m[r][c];
            }
        }
        out
    }

    pub fn scale(&self, x: f64) -> Self {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.m[r][c] *= x;
            }
        }
        out
    }

    /// Applies the matrix to a 4-vector.
    pub fn apply(&self, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for r in 0..4 {
            out[r] = (0..4).map(|c| self.m[r][c] * v[c]).sum();
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..4)
            .map(|c| (0..4).map(|r| self.m[r][c].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                d = d.max((self.m[r][c] - rhs.m[r][c]).abs());
            }
        }
        d
    }
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending, the
/// k-th column of `eigenvectors` belonging to `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

fn offdiag_frobenius(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += a.get(r, c).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian 2x2 or 4x4 matrix by cyclic Jacobi
/// rotations.
///
/// The input must be Hermitian within `1e-13 * max|M|`; it is symmetrised
/// before iteration so roundoff asymmetry cannot leak into the result.
/// Sweeps stop once the off-diagonal Frobenius norm falls below
/// `1e-14 * ||M||_F`.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum, Error> {
    let dev = m.hermitian_deviation();
    let tolerance = HERMITIAN_TOL * m.max_abs();
    if dev > tolerance && dev > 0.0 {
        return Err(Error::NotHermitian { deviation: dev, tolerance });
    }

    let n = m.dim();
    let mut a = ComplexMatrix::from_fn(n, |r, c| (m.get(r, c) + m.get(c, r).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let target = JACOBI_TOL * a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if offdiag_frobenius(&a) <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Factor out the phase of the pivot, then zero it with a
                // real Givens rotation: U = diag(1, u*) . R(theta) in the
                // (p, q) plane, u = apq/|apq|.
                let u = apq / r;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let us = u.conj() * s;
                let uc = u.conj() * c;

                // Columns: A <- A U, V <- V U.
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c + aiq * us);
                    a.set(i, q, -aip * s + aiq * uc);
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c + viq * us);
                    v.set(i, q, -vip * s + viq * uc);
                }
                // Rows: A <- U^H A.
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c + aqj * us.conj());
                    a.set(q, j, -apj * s + aqj * uc.conj());
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let eigenvalues = order.iter().map(|&i| a.get(i, i).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |r, c| v.get(r, order[c]));
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Matrix exponential of a real 4x4 matrix by scaling and squaring with a
/// degree-8 Taylor core.
///
/// The argument is scaled by a power of two until its one-norm is below
/// 1/16; the Taylor remainder is then of order 4e-17 and the squaring
/// chain dominates the error at well under 1e-12 for the generator norms
/// that occur here.
pub fn matrix_exp(a: &RealMatrix4) -> RealMatrix4 {
    let norm = a.one_norm();
    let squarings = if norm > EXP_SCALE_THRESHOLD {
        (norm / EXP_SCALE_THRESHOLD).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5_f64.powi(squarings as i32));

    // Horner form of sum_{k<=8} B^k / k!.
    let mut result = RealMatrix4::identity();
    for k in (1..=EXP_TAYLOR_DEGREE).rev() {
        result = RealMatrix4::identity().add(&scaled.matmul(&result).scale(1.0 / k as f64));
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// Kronecker product of two 2x2 matrices, row index `2*i_first + i_second`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.dim(), 2, "kron expects 2x2 factors");
    assert_eq!(b.dim(), 2, "kron expects 2x2 factors");
    ComplexMatrix::from_fn(4, |r, c| a.get(r / 2, c / 2) * b.get(r % 2, c % 2))
}

/// Which tensor factor [`partial_trace`] removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of a 4x4 matrix over one qubit factor, with the same
/// index convention as [`kron`].
pub fn partial_trace(m: &ComplexMatrix, traced: Subsystem) -> ComplexMatrix {
    assert_eq!(m.dim(), 4, "partial trace expects a 4x4 matrix");
    match traced {
        Subsystem::Second => ComplexMatrix::from_fn(2, |i, j| {
            m.get(2 * i, 2 * j) + m.get(2 * i + 1, 2 * j + 1)
        }),
        Subsystem::First => ComplexMatrix::from_fn(2, |k, l| {
            m.get(k, l) + m.get(2 + k, 2 + l)
        }),
    }
}

/// Spectral logarithm of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues below `floor` are clamped to `floor` before the scalar log,
/// so projectors and other rank-deficient inputs stay finite.  Eigenvalues
/// below -1e-10 are rejected.
pub fn matrix_log_psd(m: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix, Error> {
    let spec = hermitian_eig(m)?;
    if spec.eigenvalues[0] < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: spec.eigenvalues[0] });
    }
    let n = m.dim();
    let v = &spec.eigenvectors;
    let logs: Vec<f64> = spec.eigenvalues.iter().map(|&l| l.max(floor).ln()).collect();
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += v.get(r, k) * logs[k] * v.get(c, k).conj();
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}
