//! Classical stochastic processes obtained by sandwiching qubit dynamics
//! between the projectors of a fixed basis.
//!
//! Two reductions are available and they generally differ: reducing the
//! dynamical map gives `T_ij(t) = Tr(P_i Λ_t[P_j])`, reducing the generator
//! gives `L_ij(t) = Tr(P_i ℒ_t[P_j])`, whose master equation `Ḋ = L D` has
//! its own solution `D(t)`.

use nalgebra::{DMatrix, Vector4};

use crate::channels::{QubitChannel, Verdict};
use crate::generators::{GeneratorSpec, Propagator, TimeGrid};
use crate::states::ProjectorBasis;
use crate::{Error, Result};

/// `T(t)` sampled on a grid.
#[derive(Debug, Clone)]
pub struct StochasticProcess {
    pub times: Vec<f64>,
    pub matrices: Vec<DMatrix<f64>>,
    pub basis: Option<ProjectorBasis>,
}

/// `L(t)` sampled on a grid.
#[derive(Debug, Clone)]
pub struct ClassicalGenerator {
    pub times: Vec<f64>,
    pub matrices: Vec<DMatrix<f64>>,
}

fn basis_legs(basis: &ProjectorBasis) -> [Vector4<f64>; 2] {
    let n = basis.axis();
    [Vector4::new(1.0, n[0], n[1], n[2]), Vector4::new(1.0, -n[0], -n[1], -n[2])]
}

/// `Tr(P_i X[P_j])` for a map given by its 4×4 Pauli matrix.
fn sandwich(pauli: &nalgebra::Matrix4<f64>, legs: &[Vector4<f64>; 2]) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |i, j| 0.5 * legs[i].dot(&(pauli * legs[j])))
}

impl StochasticProcess {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t00(&self) -> Vec<f64> {
        self.matrices.iter().map(|m| m[(0, 0)]).collect()
    }

    pub fn determinants(&self) -> Vec<f64> {
        self.matrices.iter().map(|m| m.determinant()).collect()
    }

    /// Largest deviation of a column sum from 1.
    pub fn column_sum_defect(&self) -> f64 {
        self.matrices
            .iter()
            .flat_map(|m| m.row_sum().iter().map(|s| (s - 1.0).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.matrices.iter().map(|m| m.min()).fold(f64::INFINITY, f64::min)
    }

    /// `T(t, s) = T(t) T(s)⁻¹` between grid indices.
    pub fn intertwiner(&self, k: usize, j: usize) -> Result<DMatrix<f64>> {
        let inv = self.matrices[j]
            .clone()
            .try_inverse()
            .ok_or(Error::SingularProcess { t: self.times[j], det: self.matrices[j].determinant() })?;
        Ok(&self.matrices[k] * inv)
    }
}

impl ClassicalGenerator {
    /// Constant generator on a grid.
    pub fn constant(grid: &TimeGrid, l: DMatrix<f64>) -> Self {
        Self { times: grid.points().to_vec(), matrices: vec![l; grid.len()] }
    }

    pub fn column_sum_defect(&self) -> f64 {
        self.matrices
            .iter()
            .flat_map(|m| m.row_sum().iter().map(|s| s.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }
}

pub fn reduce_map(p: &Propagator, basis: &ProjectorBasis) -> StochasticProcess {
    let legs = basis_legs(basis);
    StochasticProcess {
        times: p.times().to_vec(),
        matrices: p.maps().iter().map(|m| sandwich(m.pauli_matrix(), &legs)).collect(),
        basis: Some(*basis),
    }
}

pub fn reduce_channel(channel: &QubitChannel, basis: &ProjectorBasis) -> DMatrix<f64> {
    sandwich(channel.pauli_matrix(), &basis_legs(basis))
}

pub fn reduce_generator(g: &GeneratorSpec, basis: &ProjectorBasis, grid: &TimeGrid) -> ClassicalGenerator {
    let legs = basis_legs(basis);
    ClassicalGenerator {
        times: grid.points().to_vec(),
        matrices: grid.points().iter().map(|&t| sandwich(&g.pauli_matrix(t), &legs)).collect(),
    }
}

/// Solves `Ḋ = L D`, `D(0) = 1`, stepping with `exp(δt (L_k + L_{k+1})/2)`.
pub fn solve_classical_master(lg: &ClassicalGenerator) -> StochasticProcess {
    let n = lg.matrices.first().map_or(2, |m| m.nrows());
    let mut d = DMatrix::identity(n, n);
    let mut matrices = vec![d.clone()];
    for k in 1..lg.times.len() {
        let dt = lg.times[k] - lg.times[k - 1];
        let avg = (&lg.matrices[k - 1] + &lg.matrices[k]) * (0.5 * dt);
        d = avg.exp() * d;
        matrices.push(d.clone());
    }
    StochasticProcess { times: lg.times.clone(), matrices, basis: None }
}

/// Time derivative of a sampled series: five-point central differences on
/// uniform grids with fourth-order one-sided stencils at the two ends, and
/// second-order three-point differences on non-uniform grids.
pub fn differentiate(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    assert_eq!(n, values.len(), "times and values differ in length");
    if n < 2 {
        return vec![0.0; n];
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if uniform && n >= 5 {
        let f = values;
        return (0..n)
            .map(|k| match k {
                0 => (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h),
                1 => (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h),
                k if k == n - 2 => {
                    (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h)
                }
                k if k == n - 1 => {
                    (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h)
                }
                k => (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h),
            })
            .collect();
    }
    (0..n)
        .map(|k| {
            if k == 0 {
                (values[1] - values[0]) / (times[1] - times[0])
            } else if k == n - 1 {
                (values[n - 1] - values[n - 2]) / (times[n - 1] - times[n - 2])
            } else {
                let (h0, h1) = (times[k] - times[k - 1], times[k + 1] - times[k]);
                (values[k + 1] * h0 * h0 - values[k - 1] * h1 * h1 + values[k] * (h1 * h1 - h0 * h0)) / (h0 * h1 * (h0 + h1))
            }
        })
        .collect()
}

/// `L(t) = Ṫ(t) T(t)⁻¹` with entrywise finite-difference derivatives.
pub fn classical_generator_from_t(sp: &StochasticProcess, tol: f64) -> Result<ClassicalGenerator> {
    let n = sp.matrices.first().map_or(0, |m| m.nrows());
    let mut derivs = vec![DMatrix::zeros(n, n); sp.len()];
    for i in 0..n {
        for j in 0..n {
            let series: Vec<f64> = sp.matrices.iter().map(|m| m[(i, j)]).collect();
            for (d, v) in derivs.iter_mut().zip(differentiate(&sp.times, &series)) {
                d[(i, j)] = v;
            }
        }
    }
    let mut matrices = Vec::with_capacity(sp.len());
    for ((t, m), d) in sp.times.iter().zip(&sp.matrices).zip(derivs) {
        let det = m.determinant();
        if det.abs() < tol {
            return Err(Error::SingularProcess { t: *t, det });
        }
        let inv = m.clone().try_inverse().ok_or(Error::SingularProcess { t: *t, det })?;
        matrices.push(d * inv);
    }
    Ok(ClassicalGenerator { times: sp.times.clone(), matrices })
}

/// `f_t = Ṫ_00(t) / (2T_00(t) − 1)` along a bistochastic 2×2 process.
#[derive(Debug, Clone)]
pub struct FCriterion {
    pub times: Vec<f64>,
    pub t00: Vec<f64>,
    pub t00_dot: Vec<f64>,
    /// `None` where `|2T_00 − 1| < tol`.
    pub f: Vec<Option<f64>>,
    /// Times excluded from the verdict because `T(t)` is (nearly) singular.
    pub singular_times: Vec<f64>,
    /// Largest `f_t` over the non-singular points.
    pub max_f: Option<f64>,
    /// `max_f ≤ tol`; the margin is `−max_f`.
    pub divisible: Verdict,
}

impl FCriterion {
    pub fn from_series(times: Vec<f64>, t00: Vec<f64>, t00_dot: Vec<f64>, tol: f64) -> Self {
        let mut singular_times = Vec::new();
        let f: Vec<Option<f64>> = times
            .iter()
            .zip(t00.iter().zip(&t00_dot))
            .map(|(&t, (&a, &da))| {
                let den = 2.0 * a - 1.0;
                if den.abs() < tol {
                    singular_times.push(t);
                    None
                } else {
                    Some(da / den)
                }
            })
            .collect();
        let max_f = f.iter().flatten().copied().reduce(f64::max);
        let divisible = Verdict::from_margin(-max_f.unwrap_or(0.0), tol);
        Self { times, t00, t00_dot, f, singular_times, max_f, divisible }
    }

    /// Every grid point is singular.
    pub fn fully_singular(&self) -> bool {
        self.f.iter().all(Option::is_none)
    }

    /// Whether `2T_00 − 1 > 0` at every grid point.
    pub fn invertible_throughout(&self) -> bool {
        self.t00.iter().all(|&a| 2.0 * a - 1.0 > 0.0)
    }
}

/// Singular-point tolerance used by [`f_criterion`].
pub const SINGULAR_TOL: f64 = 1e-12;

/// [`FCriterion`] with `Ṫ_00` from finite differences.
pub fn f_criterion(sp: &StochasticProcess, tol: f64) -> FCriterion {
    let t00 = sp.t00();
    let dot = differentiate(&sp.times, &t00);
    FCriterion::from_series(sp.times.clone(), t00, dot, tol)
}

/// Kolmogorov conditions: off-diagonals `≥ −tol` and column sums within `tol`
/// of zero at every grid point. The margin is the smallest off-diagonal entry.
pub fn kolmogorov_check(lg: &ClassicalGenerator, tol: f64) -> Verdict {
    let mut margin = f64::INFINITY;
    for m in &lg.matrices {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    margin = margin.min(m[(i, j)]);
                }
            }
        }
    }
    let sums_ok = lg.column_sum_defect() <= tol;
    let verdict = Verdict::from_margin(margin, tol);
    Verdict { holds: verdict.holds && sums_ok, margin }
}

/// `Σ_i |δ_i|`.
pub fn kolmogorov_distance(delta: &[f64]) -> f64 {
    delta.iter().map(|d| d.abs()).sum()
}

/// `T(t/N)^N` for a one-parameter family of maps: the classical process seen
/// through `N` intermediate measurements.
pub fn iterated_reduction(channel_at: impl Fn(f64) -> QubitChannel, basis: &ProjectorBasis, t: f64, n: u32) -> DMatrix<f64> {
    let step = reduce_channel(&channel_at(t / n as f64), basis);
    (0..n).fold(DMatrix::identity(2, 2), |acc, _| &step * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{propagate_timesplitting, GkslParams, SplittingRule};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix3, Vector3};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unitary(omega: f64, axis: Vector3<f64>, t_max: f64, steps: usize) -> Propagator {
        let grid = TimeGrid::uniform(t_max, steps).unwrap();
        let axis = axis.normalize();
        Propagator::from_fn(grid, move |t| QubitChannel::rotation(&axis, omega * t))
    }

    #[test]
    fn identity_dynamics_reduces_to_identity() {
        let grid = TimeGrid::uniform(1.0, 10).unwrap();
        let p = Propagator::from_fn(grid, |_| QubitChannel::identity());
        let sp = reduce_map(&p, &ProjectorBasis::from_angles(0.4, 1.0));
        for m in &sp.matrices {
            assert!((m - DMatrix::identity(2, 2)).amax() < 1e-15);
        }
    }

    #[test]
    fn unitary_t00_closed_form() {
        let (omega, theta) = (1.3, PI / 5.0);
        let p = unitary(omega, Vector3::z(), 10.0, 1000);
        let sp = reduce_map(&p, &ProjectorBasis::from_angles(theta, 0.3));
        for (t, a) in sp.times.iter().zip(sp.t00()) {
            let exact = 0.5 * (1.0 + theta.cos().powi(2) + (omega * t).cos() * theta.sin().powi(2));
            assert_abs_diff_eq!(a, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn unitary_f_on_axis_is_zero() {
        let p = unitary(2.0, Vector3::z(), 5.0, 500);
        let fc = f_criterion(&reduce_map(&p, &ProjectorBasis::computational()), SINGULAR_TOL);
        assert!(fc.f.iter().all(|f| f.unwrap().abs() < 1e-12));
        assert!(fc.divisible.holds);
    }

    #[test]
    fn unitary_f_off_axis_changes_sign() {
        let (omega, theta) = (1.0, PI / 6.0);
        let p = unitary(omega, Vector3::z(), 4.0 * PI, 4000);
        let fc = f_criterion(&reduce_map(&p, &ProjectorBasis::from_angles(theta, 0.0)), SINGULAR_TOL);
        assert!(fc.invertible_throughout());
        assert!(!fc.divisible.holds);
        assert!(fc.f.iter().flatten().any(|&f| f < -1e-3));
    }

    #[test]
    fn hamiltonian_generator_reduces_to_zero() {
        let g = GeneratorSpec::hamiltonian(Vector3::new(0.4, -1.0, 2.0));
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        for (chi, xi) in [(0.0, 0.0), (0.7, 2.0), (PI / 2.0, 1.0)] {
            let lg = reduce_generator(&g, &ProjectorBasis::from_angles(chi, xi), &grid);
            assert!(lg.matrices.iter().all(|m| m.amax() < 1e-15));
        }
    }

    #[test]
    fn pauli_generator_reduction_in_z_basis() {
        let (g1, g2, g3) = (0.3, 0.5, 1.1);
        let g = GeneratorSpec::pauli(move |_| [g1, g2, g3]);
        let grid = TimeGrid::uniform(1.0, 2).unwrap();
        let lg = reduce_generator(&g, &ProjectorBasis::computational(), &grid);
        // direct trace evaluation: Tr(E_11 ℒ[E_00]) = (γ1 + γ2)/2 = Γ3/2
        let r = 0.5 * (g1 + g2);
        let expected = DMatrix::from_row_slice(2, 2, &[-r, r, r, -r]);
        assert!((&lg.matrices[0] - expected).amax() < 1e-15);
        assert!(kolmogorov_check(&lg, 1e-12).holds);
    }

    #[test]
    fn master_equation_constant_generator() {
        let l = DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 1.0, -0.5]);
        let grid = TimeGrid::uniform(2.0, 20).unwrap();
        let sp = solve_classical_master(&ClassicalGenerator::constant(&grid, l.clone()));
        let exact = (l * 2.0).exp();
        assert!((sp.matrices.last().unwrap() - exact).amax() < 1e-13);
        assert!(sp.column_sum_defect() < 1e-13);

        let zero = solve_classical_master(&ClassicalGenerator::constant(&grid, DMatrix::zeros(2, 2)));
        assert!(zero.matrices.iter().all(|m| (m - DMatrix::identity(2, 2)).amax() == 0.0));
    }

    #[test]
    fn generator_from_exponential() {
        let l = DMatrix::from_row_slice(2, 2, &[-0.7, 0.2, 0.7, -0.2]);
        let grid = TimeGrid::uniform(1.0, 1000).unwrap();
        let sp = solve_classical_master(&ClassicalGenerator::constant(&grid, l.clone()));
        let back = classical_generator_from_t(&sp, 1e-12).unwrap();
        for m in &back.matrices {
            assert!((m - &l).amax() < 1e-9);
        }
    }

    #[test]
    fn singular_process_is_reported() {
        let p = unitary(1.0, Vector3::z(), PI, 1000);
        // θ = π/2: det T = cos(t) vanishes at t = π/2
        let sp = reduce_map(&p, &ProjectorBasis::from_angles(PI / 2.0, 0.0));
        match classical_generator_from_t(&sp, 1e-9) {
            Err(Error::SingularProcess { t, .. }) => assert_abs_diff_eq!(t, PI / 2.0, epsilon = 1e-9),
            other => panic!("expected singular process, got {other:?}"),
        }
        let fc = f_criterion(&sp, 1e-9);
        assert_eq!(fc.singular_times.len(), 1);
    }

    #[test]
    fn constant_pauli_has_f_minus_one() {
        let g = GeneratorSpec::pauli(|_| [1.0, 1.0, 1.0]);
        let grid = TimeGrid::uniform(3.0, 3000).unwrap();
        let p = propagate_timesplitting(&g, &grid, SplittingRule::GaussLegendre);
        for (chi, xi) in [(0.0, 0.0), (1.0, 0.3), (PI / 2.0, 2.0)] {
            let fc = f_criterion(&reduce_map(&p, &ProjectorBasis::from_angles(chi, xi)), SINGULAR_TOL);
            for f in fc.f.iter().flatten() {
                assert_abs_diff_eq!(*f, -1.0, epsilon = 1e-8);
            }
            assert!(fc.divisible.holds);
        }
    }

    #[test]
    fn kolmogorov_examples() {
        let grid = TimeGrid::uniform(1.0, 2).unwrap();
        let good = ClassicalGenerator::constant(&grid, DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]));
        let bad = ClassicalGenerator::constant(&grid, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        assert!(kolmogorov_check(&good, 1e-12).holds);
        assert!(!kolmogorov_check(&bad, 1e-12).holds);
        assert_eq!(kolmogorov_distance(&[0.5, -0.5]), 1.0);
        assert_eq!(kolmogorov_distance(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn differentiate_polynomials() {
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
        let values: Vec<f64> = times.iter().map(|t| t.powi(4) - 2.0 * t * t).collect();
        for (t, d) in times.iter().zip(differentiate(&times, &values)) {
            assert_abs_diff_eq!(d, 4.0 * t.powi(3) - 4.0 * t, epsilon = 1e-10);
        }
        let uneven = vec![0.0, 0.1, 0.3, 0.6, 1.0];
        let quad: Vec<f64> = uneven.iter().map(|t| 3.0 * t * t).collect();
        let d = differentiate(&uneven, &quad);
        for k in 1..4 {
            assert_abs_diff_eq!(d[k], 6.0 * uneven[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn iterated_measurement_limit() {
        // semigroup: Pauli rates plus a σ3 Hamiltonian
        let params = GkslParams::new(
            Vector3::new(0.0, 0.0, 2.0),
            Matrix3::from_diagonal(&Vector3::new(0.2, 0.3, 0.1)).map(crate::C64::from),
        );
        let generator = params.pauli_matrix();
        let basis = ProjectorBasis::from_angles(1.0, 0.4);
        let l = reduce_channel(&QubitChannel::from_pauli_matrix(generator), &basis);
        let d = l.exp();
        let channel_at = |s: f64| QubitChannel::from_pauli_matrix((generator * s).exp());
        let mut prev = f64::INFINITY;
        for n in [2, 4, 8, 16, 32, 64, 128, 256] {
            let err = (iterated_reduction(channel_at, &basis, 1.0, n) - &d).amax();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-2);
        // without intermediate measurements the process differs from D(t)
        assert!((reduce_channel(&channel_at(1.0), &basis) - d).amax() > 1e-2);
    }

    proptest! {
        #[test]
        fn reduced_maps_are_stochastic(
            w in proptest::collection::vec(-1.0..1.0f64, 3),
            k in proptest::collection::vec(0.0..1.0f64, 3),
            chi in 0.0..PI, xi in 0.0..(2.0 * PI),
        ) {
            let params = GkslParams::new(
                Vector3::new(w[0], w[1], w[2]),
                Matrix3::from_diagonal(&Vector3::new(k[0], k[1], k[2])).map(crate::C64::from),
            );
            let g = GeneratorSpec::constant(params);
            let grid = TimeGrid::uniform(2.0, 40).unwrap();
            let p = propagate_timesplitting(&g, &grid, SplittingRule::GaussLegendre);
            let sp = reduce_map(&p, &ProjectorBasis::from_angles(chi, xi));
            prop_assert!(sp.column_sum_defect() < 1e-12);
            prop_assert!(sp.min_entry() >= -1e-12);
        }

        #[test]
        fn f_criterion_agrees_with_kolmogorov(
            d in proptest::collection::vec(0.0..1.0f64, 3),
            wz in -2.0..2.0f64,
            chi in 0.0..(PI / 6.0), xi in 0.0..(2.0 * PI),
        ) {
            // unital dynamics, basis near the z axis keeps T(t) invertible
            let params = GkslParams::new(
                Vector3::new(0.0, 0.0, wz),
                Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])).map(crate::C64::from),
            );
            let grid = TimeGrid::uniform(2.0, 2000).unwrap();
            let p = propagate_timesplitting(&GeneratorSpec::constant(params), &grid, SplittingRule::GaussLegendre);
            let sp = reduce_map(&p, &ProjectorBasis::from_angles(chi, xi));
            let fc = f_criterion(&sp, 1e-6);
            prop_assume!(fc.singular_times.is_empty());
            let lg = classical_generator_from_t(&sp, 1e-6).unwrap();
            for (k, m) in lg.matrices.iter().enumerate() {
                let f = fc.f[k].unwrap();
                // L = f [[1, −1], [−1, 1]]
                prop_assert!((m[(0, 0)] - f).abs() < 1e-8);
                prop_assert!((m[(0, 1)] + f).abs() < 1e-8);
            }
            prop_assert_eq!(fc.divisible.holds, kolmogorov_check(&lg, 1e-6).holds);
        }
    }
}
