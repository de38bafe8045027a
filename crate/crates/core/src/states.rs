//! Qubit state algebra.
//!
//! Density matrices and Bloch vectors, rank-1 projective bases, Helstrom
//! matrices, the trace norm, ℓ₁ coherence and the decohering map
//! `ℙ[X] = P_n X P_n + P_{-n} X P_{-n}`.
//!
//! Every 2×2 spectral quantity is computed in closed form.

use nalgebra::{Matrix2, Vector3};

use crate::{Error, Mat2, Result, C64, STATE_TOL};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrix `σ_k` for `k ∈ {0, 1, 2, 3}` with `σ_0 = 1`.
pub fn sigma(k: usize) -> Mat2 {
    match k {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Matrix unit `E_ij = |i⟩⟨j|` in the σ3 eigenbasis.
pub fn matrix_unit(i: usize, j: usize) -> Mat2 {
    let mut m = Mat2::zeros();
    m[(i, j)] = ONE;
    m
}

/// Complex Pauli coefficients `c_α = Tr(σ_α X)`, so that `X = ½ Σ c_α σ_α`.
pub fn pauli_coefficients(x: &Mat2) -> [C64; 4] {
    [
        x[(0, 0)] + x[(1, 1)],
        x[(0, 1)] + x[(1, 0)],
        I * (x[(0, 1)] - x[(1, 0)]),
        x[(0, 0)] - x[(1, 1)],
    ]
}

/// Inverse of [`pauli_coefficients`].
pub fn from_pauli_coefficients(c: &[C64; 4]) -> Mat2 {
    let half = 0.5;
    Matrix2::new(
        (c[0] + c[3]) * half,
        (c[1] - I * c[2]) * half,
        (c[1] + I * c[2]) * half,
        (c[0] - c[3]) * half,
    )
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(h: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian 2×2 matrix, ascending. Only the Hermitian part
/// is read.
pub fn hermitian_eigenvalues(h: &Mat2) -> [f64; 2] {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b.norm());
    [mean - radius, mean + radius]
}

/// Trace norm `‖H‖₁ = Σ |eigenvalues|` of a Hermitian 2×2 matrix.
pub fn trace_norm(h: &Mat2) -> Result<f64> {
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermiticity_defect(h) > STATE_TOL * scale {
        return Err(Error::Domain("trace norm requires a Hermitian matrix".into()));
    }
    let [lo, hi] = hermitian_eigenvalues(h);
    Ok(lo.abs() + hi.abs())
}

/// Real 3-vector `r` with `ρ = (1 + r·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub Vector3<f64>);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    /// Unit vector `(sin χ cos ξ, sin χ sin ξ, cos χ)`.
    pub fn from_angles(chi: f64, xi: f64) -> Self {
        Self::new(chi.sin() * xi.cos(), chi.sin() * xi.sin(), chi.cos())
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }
}

impl From<Vector3<f64>> for BlochVector {
    fn from(v: Vector3<f64>) -> Self {
        Self(v)
    }
}

/// `(1 + r·σ)/2` for any real `r`, without validation.
pub fn bloch_operator(r: &Vector3<f64>) -> Mat2 {
    let c = [ONE, C64::from(r[0]), C64::from(r[1]), C64::from(r[2])];
    from_pauli_coefficients(&c)
}

/// A qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: Mat2,
}

impl DensityMatrix {
    /// Validates with the default tolerance [`STATE_TOL`].
    pub fn new(entries: Mat2) -> Result<Self> {
        Self::with_tolerance(entries, STATE_TOL)
    }

    pub fn with_tolerance(entries: Mat2, tol: f64) -> Result<Self> {
        if hermiticity_defect(&entries) > tol {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        let tr = entries.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let [lo, _] = hermitian_eigenvalues(&entries);
        if lo < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self { entries })
    }

    /// `(1 + r·σ)/2`; fails when `‖r‖ > 1 + tol`.
    pub fn from_bloch(r: &BlochVector) -> Result<Self> {
        let n = r.norm();
        if n > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("Bloch vector norm {n} exceeds 1")));
        }
        Ok(Self { entries: bloch_operator(&r.0) })
    }

    pub fn maximally_mixed() -> Self {
        Self { entries: sigma(0) * C64::from(0.5) }
    }

    pub fn bloch(&self) -> BlochVector {
        let c = pauli_coefficients(&self.entries);
        BlochVector::new(c[1].re, c[2].re, c[3].re)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.entries
    }

    /// Classical mixture `Σ p_i P_i` of the basis projectors.
    pub fn diagonal_in(basis: &ProjectorBasis, probs: [f64; 2]) -> Result<Self> {
        if probs.iter().any(|p| *p < -STATE_TOL) || (probs[0] + probs[1] - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("{probs:?} is not a probability vector")));
        }
        let [p, q] = basis.projectors();
        Self::new(p * C64::from(probs[0]) + q * C64::from(probs[1]))
    }

    pub fn l1_coherence(&self, basis: &ProjectorBasis) -> f64 {
        l1_coherence(&self.entries, basis)
    }

    pub fn decohere(&self, basis: &ProjectorBasis) -> DensityMatrix {
        DensityMatrix { entries: decohere(&self.entries, basis) }
    }
}

/// Bloch-vector form of [`DensityMatrix::from_bloch`].
pub fn bloch_to_density(r: &BlochVector) -> Result<DensityMatrix> {
    DensityMatrix::from_bloch(r)
}

pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    rho.bloch()
}

/// Orthogonal pair of rank-1 projectors `P_n = (1 + n·σ)/2`, `P_{-n} = 1 − P_n`.
///
/// The eigenvector gauge follows the spherical angles of `n`:
/// `|n⟩ = (cos χ/2, e^{iξ} sin χ/2)`, `|−n⟩ = (−e^{−iξ} sin χ/2, cos χ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorBasis {
    n: Vector3<f64>,
}

impl ProjectorBasis {
    /// Fails unless `‖n‖` is within 1e−9 of one; the stored axis is renormalised.
    pub fn new(n: BlochVector) -> Result<Self> {
        let norm = n.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("basis axis must be a unit vector, got norm {norm}")));
        }
        Ok(Self { n: n.0 / norm })
    }

    pub fn from_angles(chi: f64, xi: f64) -> Self {
        Self { n: BlochVector::from_angles(chi, xi).0 }
    }

    /// The σ3 eigenbasis `{E_00, E_11}`.
    pub fn computational() -> Self {
        Self { n: Vector3::z() }
    }

    pub fn axis(&self) -> &Vector3<f64> {
        &self.n
    }

    /// Polar angle χ ∈ [0, π].
    pub fn chi(&self) -> f64 {
        self.n[2].clamp(-1.0, 1.0).acos()
    }

    /// Azimuth ξ ∈ (−π, π].
    pub fn xi(&self) -> f64 {
        self.n[1].atan2(self.n[0])
    }

    /// `[P_n, P_{-n}]`.
    pub fn projectors(&self) -> [Mat2; 2] {
        [bloch_operator(&self.n), bloch_operator(&-self.n)]
    }

    /// Unitary whose columns are `|n⟩`, `|−n⟩`.
    pub fn unitary(&self) -> Mat2 {
        let (chi, xi) = (self.chi(), self.xi());
        let (c, s) = ((0.5 * chi).cos(), (0.5 * chi).sin());
        let phase = C64::from_polar(1.0, xi);
        Matrix2::new(C64::from(c), -phase.conj() * s, phase * s, C64::from(c))
    }
}

/// Helstrom matrix `Δ_μ(ρ, σ) = μρ − (1 − μ)σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelstromMatrix {
    pub entries: Mat2,
    pub mu: f64,
}

impl HelstromMatrix {
    pub fn trace_norm(&self) -> f64 {
        let [lo, hi] = hermitian_eigenvalues(&self.entries);
        lo.abs() + hi.abs()
    }
}

pub fn helstrom(rho: &DensityMatrix, sigma: &DensityMatrix, mu: f64) -> Result<HelstromMatrix> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("prior μ = {mu} outside [0, 1]")));
    }
    Ok(HelstromMatrix {
        entries: rho.matrix() * C64::from(mu) - sigma.matrix() * C64::from(1.0 - mu),
        mu,
    })
}

/// ℓ₁ coherence `Σ_{i≠j} |X_ij|` with `X` written in the eigenbasis of `basis`.
pub fn l1_coherence(x: &Mat2, basis: &ProjectorBasis) -> f64 {
    let u = basis.unitary();
    let rotated = u.adjoint() * x * u;
    rotated[(0, 1)].norm() + rotated[(1, 0)].norm()
}

/// Decohering map `P_n X P_n + P_{-n} X P_{-n}`.
pub fn decohere(x: &Mat2, basis: &ProjectorBasis) -> Mat2 {
    let [p, q] = basis.projectors();
    p * x * p + q * x * q
}
