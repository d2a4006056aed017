//! Dense complex matrices for one, two and three qubits.
//!
//! Everything here is deterministic: the eigensolver is a cyclic complex
//! Jacobi sweep with a fixed pivot order, so repeated calls on identical
//! input return bit-identical results.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 8;

/// Hermiticity tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix of dimension 2, 4 or 8, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        d if d > MAX_DIM => Err(Error::DimensionOverflow(d)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::Structural(format!(
                "{} entries supplied for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Result<Self> {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(N, data)
    }

    pub fn diag(entries: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(entries.len())?;
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        Ok(m)
    }

    /// Projector `|psi><psi|` for an amplitude vector of length 2, 4 or 8.
    pub fn outer(psi: &[Complex64]) -> Result<Self> {
        let dim = psi.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Self { dim: n, data }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry of `M - M†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(M + M†)/2`; removes roundoff asymmetry before an eigensolve.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            out[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    /// `<u| M |v>` for amplitude vectors.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            let mut row = ZERO;
            for j in 0..n {
                row += self[(i, j)] * v[j];
            }
            acc += u[i].conj() * row;
        }
        acc
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(
            self.dim, other.dim,
            "trace_product on mismatched dimensions"
        );
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dimensions");
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        ComplexMatrix { dim: n, data }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum on mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.dim, rhs.dim,
            "matrix difference on mismatched dimensions"
        );
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }
}

/// Kronecker product; block `(i, j)` of the result is `a[i, j] · b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    if n > MAX_DIM {
        return Err(Error::DimensionOverflow(n));
    }
    let mut out = ComplexMatrix::zeros(n)?;
    for i in 0..na {
        for j in 0..na {
            let s = a[(i, j)];
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out qubit `qubit` (0 = leftmost tensor factor) of a 4x4 or 8x8 matrix.
pub fn partial_trace_qubit(m: &ComplexMatrix, qubit: usize) -> Result<ComplexMatrix> {
    let n = m.dim;
    let qubits = match n {
        4 => 2,
        8 => 3,
        d => return Err(Error::UnsupportedDimension(d)),
    };
    if qubit >= qubits {
        return Err(Error::Structural(format!(
            "qubit {qubit} out of range for a {qubits}-qubit operator"
        )));
    }
    let shift = qubits - 1 - qubit;
    let low_mask = (1usize << shift) - 1;
    // Removes the traced bit from a full index.
    let squeeze = |idx: usize| ((idx >> (shift + 1)) << shift) | (idx & low_mask);
    let mut out = ComplexMatrix::zeros(n / 2)?;
    for i in 0..n {
        for j in 0..n {
            if (i >> shift) & 1 == (j >> shift) & 1 {
                out[(squeeze(i), squeeze(j))] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenResult {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.dim;
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= self.eigenvalues[j];
            }
        }
        &scaled * &self.eigenvectors.adjoint()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.eigenvectors.dim;
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi. `a` must be Hermitian; on return its diagonal holds
/// the eigenvalues and `v` (if given) the accumulated rotations.
fn jacobi_in_place(a: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) {
    let n = a.dim;
    let scale = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return;
    }
    let threshold = scale * f64::EPSILON * 0.5;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= threshold * 1e-3 {
                    continue;
                }
                let phase = apq / mag; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on the (p, q) plane.
                let pc = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * pc * s;
                    a[(k, q)] = akp * s + akq * pc * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * pc * s;
                        v[(k, q)] = vkp * s + vkq * pc * c;
                    }
                }
            }
        }
    }
}

fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = m.hermiticity_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Full spectrum and eigenvectors of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenResult> {
    require_hermitian(m)?;
    let n = m.dim;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n)?;
    jacobi_in_place(&mut a, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n)?;
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only; skips eigenvector accumulation.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(m)?;
    let mut a = m.hermitian_part();
    jacobi_in_place(&mut a, None);
    let mut ev: Vec<f64> = (0..a.dim).map(|i| a[(i, i)].re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as roundoff and set to zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Below this an operator is rejected as not positive semidefinite.
pub const PSD_REJECT: f64 = 1e-6;

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues[0];
    if min < -PSD_REJECT {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let roots = EigenResult {
        eigenvalues: eig
            .eigenvalues
            .iter()
            .map(|&l| if l < PSD_CLAMP { 0.0 } else { l.sqrt() })
            .collect(),
        eigenvectors: eig.eigenvectors,
    };
    Ok(roots.reconstruct().hermitian_part())
}

/// Tolerance on `|Tr ρ - 1|` accepted by [`uhlmann_fidelity`].
pub const TRACE_TOL: f64 = 1e-6;

pub(crate) fn require_state(m: &ComplexMatrix) -> Result<()> {
    require_hermitian(m)?;
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::Normalization { trace });
    }
    Ok(())
}

/// Uhlmann fidelity `Tr sqrt(sqrt(ρ) σ sqrt(ρ))`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.dim != sigma.dim {
        return Err(Error::DimensionMismatch {
            left: rho.dim,
            right: sigma.dim,
        });
    }
    require_state(rho)?;
    require_state(sigma)?;
    Ok(unnormalized_fidelity(rho, sigma)?.clamp(0.0, 1.0))
}

/// `Tr sqrt(sqrt(P) Q sqrt(P))` for PSD `P`, `Q` of any trace.
pub(crate) fn unnormalized_fidelity(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<f64> {
    let root = psd_sqrt(p)?;
    let inner = (&(&root * q) * &root).hermitian_part();
    let ev = hermitian_eigenvalues(&inner)?;
    if ev[0] < -PSD_REJECT {
        return Err(Error::NotPsd {
            min_eigenvalue: ev[0],
        });
    }
    Ok(ev.iter().map(|&l| l.max(0.0).sqrt()).sum())
}

/// Pauli matrices and the Hadamard-like axes used by the settings.
pub mod pauli {
    use super::ComplexMatrix;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        let i = Complex64::new(0.0, 1.0);
        ComplexMatrix::from_row_major(2, vec![0.0.into(), -i, i, 0.0.into()]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]]).unwrap()
    }

    /// `(σz + σx)/√2`.
    pub fn h() -> ComplexMatrix {
        let s = FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows([[s, s], [s, -s]]).unwrap()
    }

    /// `(σz − σx)/√2`.
    pub fn v() -> ComplexMatrix {
        let s = FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows([[s, -s], [-s, -s]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let data = (0..n * n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::from_row_major(n, data).unwrap()
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let m = random_matrix(rng, n);
        (&m + &m.adjoint()).scale(0.5)
    }

    fn random_state(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let g = random_matrix(rng, n);
        let p = &g * &g.adjoint();
        let t = p.trace().re;
        p.scale(1.0 / t)
    }

    #[test]
    fn kron_identities() {
        let i4 = kron(&pauli::identity(), &pauli::identity()).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4).unwrap());
        let zz = kron(&pauli::z(), &pauli::z()).unwrap();
        assert_eq!(zz, ComplexMatrix::diag(&[1.0, -1.0, -1.0, 1.0]).unwrap());
        let xx = kron(&pauli::x(), &pauli::x()).unwrap();
        let ket00 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let ket11 = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(xx.sandwich(&ket11, &ket00), c(1.0, 0.0));
    }

    #[test]
    fn kron_overflow() {
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert_eq!(kron(&i4, &i4), Err(Error::DimensionOverflow(16)));
    }

    #[test]
    fn eig_basic_cases() {
        let e = hermitian_eig(&ComplexMatrix::identity(4).unwrap()).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-15));
        let e = hermitian_eig(&pauli::z()).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);
        let e = hermitian_eig(&pauli::y()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows([[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 4, 8] {
            for _ in 0..50 {
                let m = random_hermitian(&mut rng, n);
                let e = hermitian_eig(&m).unwrap();
                assert!(e.reconstruct().max_abs_diff(&m) <= 1e-10);
                let gram = &e.eigenvectors.adjoint() * &e.eigenvectors;
                assert!(gram.max_abs_diff(&ComplexMatrix::identity(n).unwrap()) <= 1e-10);
                assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_hermitian(&mut rng, 8);
        let a = hermitian_eig(&m).unwrap();
        let b = hermitian_eig(&m).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eig_degenerate_spectrum() {
        // Block structure with repeated eigenvalues.
        let m = kron(&pauli::z(), &pauli::identity()).unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, -1.0, 1.0, 1.0]);
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn sqrt_cases() {
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert!(psd_sqrt(&i4).unwrap().max_abs_diff(&i4) < 1e-14);
        let d = ComplexMatrix::diag(&[4.0, 1.0, 0.0, 0.0]).unwrap();
        let expect = ComplexMatrix::diag(&[2.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(psd_sqrt(&d).unwrap().max_abs_diff(&expect) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 8] {
            let rho = random_state(&mut rng, n);
            let s = psd_sqrt(&rho).unwrap();
            assert!((&s * &s).max_abs_diff(&rho) < 1e-9);
            assert!(s.is_hermitian(1e-12));
        }
    }

    #[test]
    fn sqrt_clamps_tiny_negatives_and_rejects_large_ones() {
        let tiny = ComplexMatrix::diag(&[1.0, -5e-11]).unwrap();
        let s = psd_sqrt(&tiny).unwrap();
        assert_eq!(s[(1, 1)], c(0.0, 0.0));
        let bad = ComplexMatrix::diag(&[1.0, -1e-3]).unwrap();
        assert!(matches!(psd_sqrt(&bad), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn fidelity_cases() {
        let p0 = ComplexMatrix::diag(&[1.0, 0.0]).unwrap();
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]).unwrap();
        let mixed = ComplexMatrix::diag(&[0.5, 0.5]).unwrap();
        assert!((uhlmann_fidelity(&p0, &p0).unwrap() - 1.0).abs() < 1e-12);
        assert!(uhlmann_fidelity(&p0, &p1).unwrap().abs() < 1e-12);
        let f = uhlmann_fidelity(&mixed, &p0).unwrap();
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn fidelity_normalization_error() {
        let bad = ComplexMatrix::diag(&[0.7, 0.7]).unwrap();
        let ok = ComplexMatrix::diag(&[0.5, 0.5]).unwrap();
        assert!(matches!(
            uhlmann_fidelity(&bad, &ok),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn fidelity_symmetric_and_pure_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let rho = random_state(&mut rng, 4);
            let sigma = random_state(&mut rng, 4);
            let f1 = uhlmann_fidelity(&rho, &sigma).unwrap();
            let f2 = uhlmann_fidelity(&sigma, &rho).unwrap();
            assert!((f1 - f2).abs() < 1e-8);
            // Pure target: F = sqrt(<psi|rho|psi>).
            let psi: Vec<Complex64> = (0..4)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
            let proj = ComplexMatrix::outer(&psi).unwrap();
            let expect = rho.sandwich(&psi, &psi).re.sqrt();
            assert!((uhlmann_fidelity(&rho, &proj).unwrap() - expect).abs() < 1e-7);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_state(&mut rng, 2);
        let b = random_state(&mut rng, 2);
        let ab = kron(&a, &b).unwrap();
        assert!(partial_trace_qubit(&ab, 1).unwrap().max_abs_diff(&a) < 1e-14);
        assert!(partial_trace_qubit(&ab, 0).unwrap().max_abs_diff(&b) < 1e-14);
        let cc = random_state(&mut rng, 2);
        let abc = kron(&ab, &cc).unwrap();
        assert!(
            partial_trace_qubit(&abc, 1)
                .unwrap()
                .max_abs_diff(&kron(&a, &cc).unwrap())
                < 1e-14
        );
        assert!(partial_trace_qubit(&abc, 2).unwrap().max_abs_diff(&ab) < 1e-14);
    }

    #[test]
    fn hadamard_axes() {
        let h = pauli::h();
        let v = pauli::v();
        let sum = (&h + &v).scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(sum.max_abs_diff(&pauli::z()) < 1e-15);
        assert!((&h * &h).max_abs_diff(&pauli::identity()) < 1e-15);
        assert!((&v * &v).max_abs_diff(&pauli::identity()) < 1e-15);
    }
}
