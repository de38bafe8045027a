//! Static qubit linear maps in the Pauli representation.
//!
//! A Hermiticity-preserving map `Φ` is stored as the real 4×4 matrix
//! `Φ_αβ = ½ Tr(σ_α Φ[σ_β])`. For trace-preserving maps the first row is
//! `(1, 0, 0, 0)` and the action on Bloch vectors is affine,
//! `r ↦ Φ̃ r + v`, with `Φ̃` the lower-right 3×3 block and `v` the first column.
//!
//! Non-positive maps are representable: positivity is a queried property.

use std::fmt;

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4};
use serde::Serialize;

use crate::sphere::maximize_quadratic;
use crate::states::{from_pauli_coefficients, matrix_unit, pauli_coefficients, ProjectorBasis};
use crate::{Error, Mat2, Result, C64};

/// Outcome of a certificate: whether it holds, and by how much.
///
/// A non-negative margin means the condition holds with that much room;
/// `holds` already accounts for the tolerance the check was run with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub margin: f64,
}

impl Verdict {
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        Self { holds: margin >= -tol, margin }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (margin {:.3e})", if self.holds { "holds" } else { "fails" }, self.margin)
    }
}

/// Hermiticity-preserving qubit map in the Pauli representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitChannel {
    pauli: Matrix4<f64>,
}

impl QubitChannel {
    /// Trace-preserving map `r ↦ bloch·r + translation`.
    pub fn new(bloch: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        let mut pauli = Matrix4::zeros();
        pauli[(0, 0)] = 1.0;
        pauli.fixed_view_mut::<3, 1>(1, 0).copy_from(&translation);
        pauli.fixed_view_mut::<3, 3>(1, 1).copy_from(&bloch);
        Self { pauli }
    }

    /// Any Hermiticity-preserving map from its full Pauli matrix.
    pub fn from_pauli_matrix(pauli: Matrix4<f64>) -> Self {
        Self { pauli }
    }

    pub fn identity() -> Self {
        Self { pauli: Matrix4::identity() }
    }

    /// Unitary channel rotating Bloch vectors by `angle` about `axis`.
    pub fn rotation(axis: &Vector3<f64>, angle: f64) -> Self {
        let k = axis.normalize();
        let cross = k.cross_matrix();
        let r = Matrix3::identity() + cross * angle.sin() + cross * cross * (1.0 - angle.cos());
        Self::new(r, Vector3::zeros())
    }

    /// Pauli channel `Φ̃ = diag(l1, l2, l3)`.
    pub fn pauli_diagonal(l1: f64, l2: f64, l3: f64) -> Self {
        Self::new(Matrix3::from_diagonal(&Vector3::new(l1, l2, l3)), Vector3::zeros())
    }

    /// Transposition in the σ3 basis: `Φ̃ = diag(1, −1, 1)`.
    pub fn transposition() -> Self {
        Self::pauli_diagonal(1.0, -1.0, 1.0)
    }

    /// Unital map rotating the xy-plane by `alpha` while scaling it by
    /// `lambda`, and scaling z by `eta`. Singular values are `lambda` and `eta`.
    pub fn scaled_planar_rotation(lambda: f64, alpha: f64, eta: f64) -> Self {
        let (c, s) = (alpha.cos(), alpha.sin());
        let m = Matrix3::new(lambda * c, -lambda * s, 0.0, lambda * s, lambda * c, 0.0, 0.0, 0.0, eta);
        Self::new(m, Vector3::zeros())
    }

    /// Builds the Pauli matrix of an arbitrary complex-linear map on 2×2
    /// matrices. The map must preserve Hermiticity for the result to be real.
    pub fn from_superoperator(map: impl Fn(&Mat2) -> Mat2) -> Self {
        let mut pauli = Matrix4::zeros();
        for beta in 0..4 {
            let out = pauli_coefficients(&map(&crate::states::sigma(beta)));
            for alpha in 0..4 {
                pauli[(alpha, beta)] = 0.5 * out[alpha].re;
            }
        }
        Self { pauli }
    }

    pub fn pauli_matrix(&self) -> &Matrix4<f64> {
        &self.pauli
    }

    /// The 3×3 block `Φ̃`.
    pub fn bloch_matrix(&self) -> Matrix3<f64> {
        self.pauli.fixed_view::<3, 3>(1, 1).into_owned()
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.pauli.fixed_view::<3, 1>(1, 0).into_owned()
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        (self.pauli[(0, 0)] - 1.0).abs() <= tol && (1..4).all(|j| self.pauli[(0, j)].abs() <= tol)
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        (self.pauli[(0, 0)] - 1.0).abs() <= tol && (1..4).all(|i| self.pauli[(i, 0)].abs() <= tol)
    }

    /// Linear action on an arbitrary 2×2 matrix. For trace-preserving maps
    /// the Bloch vector of a Hermitian input moves as `r ↦ Φ̃ r + v`.
    pub fn apply(&self, x: &Mat2) -> Mat2 {
        let c = pauli_coefficients(x);
        let mut d = [C64::new(0.0, 0.0); 4];
        for (a, slot) in d.iter_mut().enumerate() {
            *slot = (0..4).map(|b| c[b] * self.pauli[(a, b)]).sum();
        }
        from_pauli_coefficients(&d)
    }

    pub fn apply_bloch(&self, r: &Vector3<f64>) -> Vector3<f64> {
        self.bloch_matrix() * r + self.translation()
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &QubitChannel) -> QubitChannel {
        Self { pauli: self.pauli * other.pauli }
    }

    pub fn determinant(&self) -> f64 {
        self.pauli.determinant()
    }

    pub fn inverse(&self) -> Option<QubitChannel> {
        self.pauli.try_inverse().map(|pauli| Self { pauli })
    }

    /// `Σ_ij Φ[E_ij] ⊗ E_ij`.
    pub fn choi(&self) -> ChoiMatrix {
        let mut entries = Matrix4::<C64>::zeros();
        for i in 0..2 {
            for j in 0..2 {
                entries += self.apply(&matrix_unit(i, j)).kronecker(&matrix_unit(i, j));
            }
        }
        ChoiMatrix { entries }
    }

    pub fn is_completely_positive(&self, tol: f64) -> Verdict {
        Verdict::from_margin(self.choi().min_eigenvalue(), tol)
    }

    /// Positivity of a trace-preserving map: `max_{‖m‖=1} ‖Φ̃m + v‖ ≤ 1`.
    /// The margin is `1 − max`. Unital maps use the largest singular value.
    pub fn is_positive(&self, tol: f64) -> Result<Verdict> {
        if !self.is_trace_preserving(1e-12) {
            return Err(Error::Domain("positivity test needs a trace-preserving map".into()));
        }
        let m = self.bloch_matrix();
        let v = self.translation();
        let max_norm = if v.norm() == 0.0 {
            self.norm()
        } else {
            let q = m.transpose() * m;
            let b = m.transpose() * v;
            (maximize_quadratic(&q, &b).value + v.norm_squared()).max(0.0).sqrt()
        };
        Ok(Verdict::from_margin(1.0 - max_norm, tol))
    }

    /// Operator norm `‖Φ̃‖`, the largest singular value of the Bloch block.
    pub fn norm(&self) -> f64 {
        self.bloch_matrix().singular_values().max()
    }

    /// `ℓ(Φ̃) = sup_{‖n‖=1} |⟨n|Φ̃|n⟩|`, the spectral radius of `(Φ̃ + Φ̃ᵀ)/2`.
    pub fn ell_functional(&self) -> Result<f64> {
        if !self.is_unital(1e-12) || !self.is_trace_preserving(1e-12) {
            return Err(Error::Domain("ℓ functional is defined for unital trace-preserving maps".into()));
        }
        let m = self.bloch_matrix();
        let sym = (m + m.transpose()) * 0.5;
        Ok(SymmetricEigen::new(sym).eigenvalues.amax())
    }

    /// Heisenberg-picture dual. Its Pauli matrix is the transpose, so the dual
    /// of a trace-preserving map is unital but trace-preserving only if the
    /// original was unital.
    pub fn dual(&self) -> QubitChannel {
        Self { pauli: self.pauli.transpose() }
    }

    pub fn is_self_dual(&self, tol: f64) -> bool {
        (self.pauli - self.pauli.transpose()).amax() <= tol
    }

    /// `T_ij = Tr(P_i Φ[P_j])` for `P_0 = P_n`, `P_1 = P_{−n}`.
    pub fn classical_reduction_matrix(&self, basis: &ProjectorBasis) -> ClassicalReduction {
        let n = basis.axis();
        let legs = [Vector4::new(1.0, n[0], n[1], n[2]), Vector4::new(1.0, -n[0], -n[1], -n[2])];
        let matrix = Matrix2::from_fn(|i, j| 0.5 * legs[i].dot(&(self.pauli * legs[j])));
        ClassicalReduction::new(matrix)
    }
}

/// Stochastic matrix extracted from a map, with a flag for entrywise
/// non-negativity (column sums are 1 whenever the map is trace-preserving).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalReduction {
    pub matrix: Matrix2<f64>,
    pub stochastic: bool,
}

impl ClassicalReduction {
    pub const TOL: f64 = 1e-12;

    fn new(matrix: Matrix2<f64>) -> Self {
        let nonneg = matrix.iter().all(|&x| x >= -Self::TOL);
        let sums = (0..2).all(|j| (matrix[(0, j)] + matrix[(1, j)] - 1.0).abs() <= Self::TOL);
        Self { matrix, stochastic: nonneg && sums }
    }
}

/// Choi matrix `Σ_ij Φ[E_ij] ⊗ E_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix {
    pub entries: Matrix4<C64>,
}

impl ChoiMatrix {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.entries + self.entries.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.entries - self.entries.adjoint()).iter().all(|z| z.norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{fibonacci_lattice, lattice_minimize};
    use crate::states::{bloch_operator, sigma};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    fn example_one(eps: f64, alpha: f64) -> QubitChannel {
        let lambda = 1.0 + eps;
        QubitChannel::scaled_planar_rotation(lambda, alpha, lambda * alpha.cos())
    }

    #[test]
    fn apply_examples() {
        let rho = bloch_operator(&Vector3::new(0.2, -0.3, 0.4));
        assert!(close(&QubitChannel::identity().apply(&rho), &rho, 1e-16));

        let y_plus = bloch_operator(&Vector3::y());
        let y_minus = bloch_operator(&-Vector3::y());
        assert!(close(&QubitChannel::transposition().apply(&y_plus), &y_minus, 1e-16));
        assert!(close(&QubitChannel::transposition().apply(&y_plus), &y_plus.transpose(), 1e-16));

        let (lambda, alpha) = (0.9, 0.7);
        let phi = QubitChannel::scaled_planar_rotation(lambda, alpha, 0.5);
        let out = phi.apply(&bloch_operator(&Vector3::x()));
        let expected = bloch_operator(&Vector3::new(lambda * alpha.cos(), lambda * alpha.sin(), 0.0));
        assert!(close(&out, &expected, 1e-15));
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn superoperator_round_trip() {
        let phi = QubitChannel::new(
            Matrix3::new(0.3, 0.1, -0.2, 0.0, 0.5, 0.1, 0.2, 0.0, 0.4),
            Vector3::new(0.1, 0.0, -0.2),
        );
        let rebuilt = QubitChannel::from_superoperator(|x| phi.apply(x));
        assert!((rebuilt.pauli_matrix() - phi.pauli_matrix()).amax() < 1e-15);
    }

    #[test]
    fn compose_examples() {
        let phi = QubitChannel::new(Matrix3::new(0.3, 0.1, 0.0, 0.0, 0.5, 0.1, 0.2, 0.0, 0.4), Vector3::new(0.1, 0.0, 0.2));
        assert_eq!(QubitChannel::identity().compose(&phi), phi);

        let axis = Vector3::new(1.0, 2.0, -1.0);
        let ab = QubitChannel::rotation(&axis, 0.4).compose(&QubitChannel::rotation(&axis, 1.1));
        assert!((ab.pauli_matrix() - QubitChannel::rotation(&axis, 1.5).pauli_matrix()).amax() < 1e-14);

        let d = QubitChannel::pauli_diagonal(0.2, 0.3, 0.4).compose(&QubitChannel::pauli_diagonal(0.5, -0.6, 0.7));
        assert!((d.bloch_matrix() - Matrix3::from_diagonal(&Vector3::new(0.1, -0.18, 0.28))).amax() < 1e-15);
    }

    #[test]
    fn choi_examples() {
        let id = QubitChannel::identity().choi();
        let ev = id.eigenvalues();
        assert_abs_diff_eq!(ev[3], 2.0, epsilon = 1e-14);
        for e in &ev[..3] {
            assert_abs_diff_eq!(*e, 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(id.trace(), 2.0, epsilon = 1e-15);

        let t = QubitChannel::transposition().choi();
        assert!(t.is_hermitian(1e-15));
        assert_abs_diff_eq!(t.min_eigenvalue(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn positivity_examples() {
        let t = QubitChannel::transposition().is_positive(1e-9).unwrap();
        assert!(t.holds);
        assert_abs_diff_eq!(t.margin, 0.0, epsilon = 1e-14);

        let blow_up = QubitChannel::new(Matrix3::identity() * 1.2, Vector3::zeros());
        assert!(!blow_up.is_positive(1e-9).unwrap().holds);

        let ex1 = example_one(0.01, FRAC_PI_3).is_positive(1e-9).unwrap();
        assert!(!ex1.holds);
        assert_abs_diff_eq!(ex1.margin, -0.01, epsilon = 1e-12);

        // amplitude damping with γ = 0.36: Φ̃ = diag(0.8, 0.8, 0.64), v = (0, 0, 0.36)
        let damping = QubitChannel::new(Matrix3::from_diagonal(&Vector3::new(0.8, 0.8, 0.64)), Vector3::new(0.0, 0.0, 0.36));
        let v = damping.is_positive(1e-9).unwrap();
        assert!(v.holds);
        assert_abs_diff_eq!(v.margin, 0.0, epsilon = 1e-12);
        assert!(damping.is_completely_positive(1e-12).holds);
    }

    #[test]
    fn positivity_requires_trace_preservation() {
        let amp = QubitChannel::new(Matrix3::identity() * 0.5, Vector3::new(0.0, 0.0, 0.3));
        assert!(matches!(amp.dual().is_positive(1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn ell_functional_examples() {
        let sym = QubitChannel::new(Matrix3::new(0.5, 0.2, 0.0, 0.2, -0.3, 0.1, 0.0, 0.1, 0.4), Vector3::zeros());
        assert_abs_diff_eq!(sym.ell_functional().unwrap(), sym.norm(), epsilon = 1e-14);

        let (eps, alpha) = (0.05, FRAC_PI_3);
        let ex1 = example_one(eps, alpha);
        assert_abs_diff_eq!(ex1.ell_functional().unwrap(), (1.0 + eps) * alpha.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(ex1.norm(), 1.0 + eps, epsilon = 1e-14);

        let rot = QubitChannel::rotation(&Vector3::z(), FRAC_PI_2);
        let ell = rot.ell_functional().unwrap();
        // oracle: maximise |⟨n|Φ̃|n⟩| on a lattice
        let m = rot.bloch_matrix();
        let oracle = fibonacci_lattice(4096).iter().map(|n| n.dot(&(m * n)).abs()).fold(0.0, f64::max);
        assert_abs_diff_eq!(ell, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(oracle, ell, epsilon = 1e-3);

        let nonunital = QubitChannel::new(Matrix3::identity() * 0.5, Vector3::new(0.0, 0.0, 0.3));
        assert!(matches!(nonunital.ell_functional(), Err(Error::Domain(_))));
    }

    #[test]
    fn dual_examples() {
        let axis = Vector3::new(0.3, -0.2, 1.0);
        let rot = QubitChannel::rotation(&axis, 0.8);
        let inv = QubitChannel::rotation(&axis, -0.8);
        assert!((rot.dual().pauli_matrix() - inv.pauli_matrix()).amax() < 1e-14);
        assert!(!rot.is_self_dual(1e-12));
        assert!(QubitChannel::rotation(&axis, 0.0).is_self_dual(1e-12));
        assert!(QubitChannel::rotation(&axis, PI).is_self_dual(1e-12));
        assert!(QubitChannel::pauli_diagonal(0.1, -0.4, 0.7).is_self_dual(0.0));

        // dual of a trace-preserving map is unital
        let damping = QubitChannel::new(Matrix3::from_diagonal(&Vector3::new(0.8, 0.8, 0.64)), Vector3::new(0.0, 0.0, 0.36));
        assert!(damping.dual().is_unital(0.0));
        assert!(!damping.dual().is_trace_preserving(1e-12));
        assert!(!damping.is_self_dual(1e-12));
        // Tr(X Φ[ρ]) = Tr(Φ‡[X] ρ)
        let x = sigma(1) * C64::new(0.3, 0.0) + sigma(3) * C64::new(-0.7, 0.0);
        let rho = bloch_operator(&Vector3::new(0.1, 0.4, -0.5));
        let lhs = (x * damping.apply(&rho)).trace();
        let rhs = (damping.dual().apply(&x) * rho).trace();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn classical_reduction_examples() {
        let basis = ProjectorBasis::from_angles(0.7, 1.9);
        let t = QubitChannel::identity().classical_reduction_matrix(&basis);
        assert!((t.matrix - Matrix2::identity()).amax() < 1e-15);
        assert!(t.stochastic);

        let unital = QubitChannel::rotation(&Vector3::new(1.0, 1.0, 0.0), 1.2).compose(&QubitChannel::pauli_diagonal(0.9, 0.6, 0.8));
        let t = unital.classical_reduction_matrix(&basis).matrix;
        assert_abs_diff_eq!(t[(0, 0)], t[(1, 1)], epsilon = 1e-15);
        assert_abs_diff_eq!(t[(0, 1)], 1.0 - t[(0, 0)], epsilon = 1e-15);
        assert_abs_diff_eq!(t[(1, 0)], t[(0, 1)], epsilon = 1e-15);

        // direct trace evaluation
        let [p, q] = basis.projectors();
        let ps = [p, q];
        for i in 0..2 {
            for j in 0..2 {
                let direct = (ps[i] * unital.apply(&ps[j])).trace().re;
                assert_abs_diff_eq!(t[(i, j)], direct, epsilon = 1e-15);
            }
        }

        let ex1 = example_one(0.05, FRAC_PI_3);
        for n in fibonacci_lattice(200) {
            let basis = ProjectorBasis::new(n.into()).unwrap();
            assert!(ex1.classical_reduction_matrix(&basis).stochastic);
        }
    }

    fn arb_kraus_channel() -> impl Strategy<Value = QubitChannel> {
        proptest::collection::vec(-1.0..1.0f64, 16).prop_map(|v| {
            let k1 = Mat2::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]), C64::new(v[4], v[5]), C64::new(v[6], v[7]));
            let k2 = Mat2::new(C64::new(v[8], v[9]), C64::new(v[10], v[11]), C64::new(v[12], v[13]), C64::new(v[14], v[15]));
            let k1 = k1 + Mat2::identity() * C64::from(1.5);
            let s = k1.adjoint() * k1 + k2.adjoint() * k2;
            let herm = SymmetricEigen::new(s);
            let inv_sqrt = herm.eigenvectors
                * Matrix2::from_diagonal(&herm.eigenvalues.map(|e| C64::from(1.0 / e.sqrt())))
                * herm.eigenvectors.adjoint();
            let (a, b) = (k1 * inv_sqrt, k2 * inv_sqrt);
            QubitChannel::from_superoperator(|x| a * x * a.adjoint() + b * x * b.adjoint())
        })
    }

    fn arb_affine() -> impl Strategy<Value = QubitChannel> {
        (proptest::collection::vec(-0.8..0.8f64, 9), proptest::collection::vec(-0.5..0.5f64, 3)).prop_map(|(m, v)| {
            QubitChannel::new(Matrix3::from_row_slice(&m), Vector3::new(v[0], v[1], v[2]))
        })
    }

    proptest! {
        #[test]
        fn kraus_channels_are_cp_and_positive(phi in arb_kraus_channel()) {
            prop_assert!(phi.is_trace_preserving(1e-10));
            prop_assert!(phi.is_completely_positive(1e-10).holds);
            prop_assert!(phi.is_positive(1e-9).unwrap().holds);
        }

        #[test]
        fn cp_implies_positive(phi in arb_affine()) {
            if phi.is_completely_positive(1e-12).holds {
                prop_assert!(phi.is_positive(1e-9).unwrap().holds);
            }
        }

        #[test]
        fn positivity_margin_matches_lattice_oracle(phi in arb_affine()) {
            let m = phi.bloch_matrix();
            let v = phi.translation();
            let q = m.transpose() * m;
            let neg = |n: &Vector3<f64>| -(m * n + v).norm_squared();
            let grad = |n: &Vector3<f64>| -(q * n + m.transpose() * v) * 2.0;
            let oracle = lattice_minimize(neg, grad, 2048, 200, 2.0 * (q.norm() + v.norm()));
            let margin = phi.is_positive(1e-9).unwrap().margin;
            let oracle_margin = 1.0 - (-oracle.value).sqrt();
            prop_assert!(oracle_margin >= margin - 1e-10);
            prop_assert!(oracle_margin - margin < 1e-5);
        }

        #[test]
        fn unital_positivity_is_singular_value_bound(m in proptest::collection::vec(-0.8..0.8f64, 9)) {
            let phi = QubitChannel::new(Matrix3::from_row_slice(&m), Vector3::zeros());
            let verdict = phi.is_positive(1e-9).unwrap();
            prop_assert_eq!(verdict.holds, phi.norm() <= 1.0 + 1e-9);
        }

        #[test]
        fn stochastic_for_all_bases_iff_ell_at_most_one(m in proptest::collection::vec(-0.9..0.9f64, 9)) {
            let phi = QubitChannel::new(Matrix3::from_row_slice(&m), Vector3::zeros());
            let ell = phi.ell_functional().unwrap();
            let lattice_ok = fibonacci_lattice(512)
                .into_iter()
                .all(|n| phi.classical_reduction_matrix(&ProjectorBasis::new(n.into()).unwrap()).stochastic);
            if ell <= 1.0 {
                prop_assert!(lattice_ok);
            } else {
                // the maximising eigenvector is a witness basis
                let sym = (phi.bloch_matrix() + phi.bloch_matrix().transpose()) * 0.5;
                let eig = SymmetricEigen::new(sym);
                let k = eig.eigenvalues.iamax();
                let witness = ProjectorBasis::new(eig.eigenvectors.column(k).into_owned().into()).unwrap();
                prop_assert!(!phi.classical_reduction_matrix(&witness).stochastic);
            }
        }
    }
}
