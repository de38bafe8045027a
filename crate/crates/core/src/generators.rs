//! Time-local qubit generators and the dynamical maps they produce.
//!
//! A generator is stored in GKSL form,
//! `ℒ[ρ] = −i[H, ρ] + ½ Σ_ij K_ij (σ_i ρ σ_j − ½{σ_j σ_i, ρ})` with
//! `H = ½ ω·σ`. In the Bloch picture it acts as `ṙ = L̃ r + v`, where
//! `L̃ = [ω]_× + S − tr(S)·1`, `S = Re K`, and `v = −2a` with
//! `Im K_ij = ε_ijk a_k`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4};

use crate::channels::{QubitChannel, Verdict};
use crate::sphere::minimize_quadratic;
use crate::states::{matrix_unit, sigma};
use crate::{Error, Mat2, Result, C64};

/// GKSL data of a generator at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkslParams {
    /// Hamiltonian `H = ½ ω·σ`.
    pub omega: Vector3<f64>,
    /// Hermitian Kossakowski matrix in the Pauli basis.
    pub kossakowski: Matrix3<C64>,
}

fn levi_civita_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    // m antisymmetric with m_ij = ε_ijk x_k
    Vector3::new(m[(1, 2)], m[(2, 0)], m[(0, 1)])
}

fn levi_civita_matrix(x: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, x[2], -x[1], -x[2], 0.0, x[0], x[1], -x[0], 0.0)
}

impl GkslParams {
    pub fn zero() -> Self {
        Self { omega: Vector3::zeros(), kossakowski: Matrix3::zeros() }
    }

    pub fn new(omega: Vector3<f64>, kossakowski: Matrix3<C64>) -> Self {
        Self { omega, kossakowski }
    }

    /// Bloch generator `(L̃, v)`.
    pub fn bloch(&self) -> (Matrix3<f64>, Vector3<f64>) {
        let s = self.kossakowski.map(|z| z.re);
        let a = levi_civita_vector(&self.kossakowski.map(|z| z.im));
        let l = self.omega.cross_matrix() + s - Matrix3::identity() * s.trace();
        (l, -a * 2.0)
    }

    /// Inverse of [`GkslParams::bloch`].
    pub fn from_bloch(l: &Matrix3<f64>, v: &Vector3<f64>) -> Self {
        let anti = (l - l.transpose()) * 0.5;
        let omega = Vector3::new(anti[(2, 1)], anti[(0, 2)], anti[(1, 0)]);
        let sym = (l + l.transpose()) * 0.5;
        let tr_s = -0.5 * sym.trace();
        let s = sym + Matrix3::identity() * tr_s;
        let a = levi_civita_matrix(&(-v * 0.5));
        let kossakowski = Matrix3::from_fn(|i, j| C64::new(s[(i, j)], a[(i, j)]));
        Self { omega, kossakowski }
    }

    /// 4×4 Pauli representation; its first row vanishes.
    pub fn pauli_matrix(&self) -> Matrix4<f64> {
        let (l, v) = self.bloch();
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 1>(1, 0).copy_from(&v);
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&l);
        m
    }

    /// Direct action on a 2×2 matrix.
    pub fn apply(&self, x: &Mat2) -> Mat2 {
        let i = C64::i();
        let h: Mat2 = (0..3).map(|k| sigma(k + 1) * C64::from(0.5 * self.omega[k])).sum();
        let mut out = -(h * x - x * h) * i;
        for a in 0..3 {
            for b in 0..3 {
                let k = self.kossakowski[(a, b)];
                if k == C64::from(0.0) {
                    continue;
                }
                let (sa, sb) = (sigma(a + 1), sigma(b + 1));
                let ba = sb * sa;
                out += (sa * x * sb - (ba * x + x * ba) * C64::from(0.5)) * (k * 0.5);
            }
        }
        out
    }

    /// `Y = (1 − P⁺)(ℒ ⊗ id)[Σ_ij E_ij ⊗ E_ij](1 − P⁺)` with `P⁺` the
    /// normalised maximally entangled projector. `ℒ` acts on the first factor.
    pub fn y_matrix(&self) -> Matrix4<C64> {
        let mut x = Matrix4::<C64>::zeros();
        for i in 0..2 {
            for j in 0..2 {
                x += self.apply(&matrix_unit(i, j)).kronecker(&matrix_unit(i, j));
            }
        }
        let omega = Vector4::new(1.0, 0.0, 0.0, 1.0).map(C64::from);
        let proj = Matrix4::identity() - omega * omega.transpose() * C64::from(0.5);
        proj * x * proj
    }

    /// Recovers `K` from `Y` via `K_ij = ½⟨ψ_i|Y|ψ_j⟩`, `ψ_i = (σ_i ⊗ 1)|Ω⟩`.
    pub fn kossakowski_from_y(y: &Matrix4<C64>) -> Matrix3<C64> {
        let omega = Vector4::new(1.0, 0.0, 0.0, 1.0).map(C64::from);
        let psi: Vec<Vector4<C64>> = (1..4).map(|k| sigma(k).kronecker(&Mat2::identity()) * omega).collect();
        Matrix3::from_fn(|i, j| (psi[i].adjoint() * y * psi[j])[(0, 0)] * 0.5)
    }

    /// Eigenvalues of the Hermitian part of `K`, ascending.
    pub fn kossakowski_eigenvalues(&self) -> [f64; 3] {
        let k = (self.kossakowski + self.kossakowski.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(k).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    /// `min_{‖n‖=1} −⟨n, L̃n + v⟩ = 2 min_n Tr(P_{−n} ℒ[P_n])`.
    pub fn p_div_margin(&self) -> f64 {
        let (l, v) = self.bloch();
        if v == Vector3::zeros() {
            let sym = -(l + l.transpose()) * 0.5;
            return SymmetricEigen::new(sym).eigenvalues.min();
        }
        let q = -(l + l.transpose()) * 0.5;
        minimize_quadratic(&q, &(-v * 0.5)).value
    }

    /// Smallest eigenvalue of `K` read off from `Y`.
    pub fn cp_div_margin(&self) -> f64 {
        let k = Self::kossakowski_from_y(&self.y_matrix());
        let herm = (k + k.adjoint()) * C64::from(0.5);
        SymmetricEigen::new(herm).eigenvalues.min()
    }
}

impl std::ops::Add for GkslParams {
    type Output = GkslParams;
    fn add(self, rhs: GkslParams) -> GkslParams {
        GkslParams { omega: self.omega + rhs.omega, kossakowski: self.kossakowski + rhs.kossakowski }
    }
}

type TimeFn<T> = Arc<dyn Fn(f64) -> T + Send + Sync>;

/// A time-dependent generator `t ↦ ℒ_t`. Evaluation is a pure function of `t`.
#[derive(Clone)]
pub struct GeneratorSpec {
    eval: TimeFn<GkslParams>,
}

impl std::fmt::Debug for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratorSpec").field("at_0", &self.at(0.0)).finish()
    }
}

impl GeneratorSpec {
    pub fn new(f: impl Fn(f64) -> GkslParams + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    /// From separate Hamiltonian and Kossakowski time-functions.
    pub fn from_parts(
        omega: impl Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
        kossakowski: impl Fn(f64) -> Matrix3<C64> + Send + Sync + 'static,
    ) -> Self {
        Self::new(move |t| GkslParams::new(omega(t), kossakowski(t)))
    }

    /// From a Bloch generator `t ↦ (L̃(t), v(t))`.
    pub fn from_bloch(f: impl Fn(f64) -> (Matrix3<f64>, Vector3<f64>) + Send + Sync + 'static) -> Self {
        Self::new(move |t| {
            let (l, v) = f(t);
            GkslParams::from_bloch(&l, &v)
        })
    }

    pub fn constant(params: GkslParams) -> Self {
        Self::new(move |_| params)
    }

    pub fn zero() -> Self {
        Self::constant(GkslParams::zero())
    }

    /// `H = ½ ω·σ`, no dissipation.
    pub fn hamiltonian(omega: Vector3<f64>) -> Self {
        Self::constant(GkslParams::new(omega, Matrix3::zeros()))
    }

    /// `ℒ_t[ρ] = ½ Σ_k γ_k(t)(σ_k ρ σ_k − ρ)`.
    pub fn pauli(rates: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Self::new(move |t| {
            let g = rates(t);
            GkslParams::new(Vector3::zeros(), Matrix3::from_diagonal(&Vector3::new(g[0], g[1], g[2]).map(C64::from)))
        })
    }

    /// Unital generator whose Bloch matrix for `t ≤ π` is
    /// `[[−1, cos t, 0], [cos t, −1, 0], [0, 0, −2]]` and `−diag(1, 2, 1)`
    /// afterwards. It commutes with its own integral, so the dynamics is
    /// `exp(∫₀ᵗ L̃)` without time ordering; see [`switched_planar_exact`].
    pub fn switched_planar() -> Self {
        Self::from_bloch(|t| {
            let l = if t <= PI {
                let c = t.cos();
                Matrix3::new(-1.0, c, 0.0, c, -1.0, 0.0, 0.0, 0.0, -2.0)
            } else {
                -Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 1.0))
            };
            (l, Vector3::zeros())
        })
    }

    pub fn plus(&self, other: &GeneratorSpec) -> GeneratorSpec {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::new(move |t| a(t) + b(t))
    }

    pub fn at(&self, t: f64) -> GkslParams {
        (self.eval)(t)
    }

    pub fn bloch_generator(&self, t: f64) -> (Matrix3<f64>, Vector3<f64>) {
        self.at(t).bloch()
    }

    pub fn pauli_matrix(&self, t: f64) -> Matrix4<f64> {
        self.at(t).pauli_matrix()
    }
}

/// Closed-form dynamics of [`GeneratorSpec::switched_planar`].
pub fn switched_planar_exact(t: f64) -> QubitChannel {
    let integral = if t <= PI {
        let s = t.sin();
        Matrix3::new(-t, s, 0.0, s, -t, 0.0, 0.0, 0.0, -2.0 * t)
    } else {
        let d = t - PI;
        -Matrix3::from_diagonal(&Vector3::new(PI + d, PI + 2.0 * d, 2.0 * PI + d))
    };
    QubitChannel::new(integral.exp(), Vector3::zeros())
}

/// Strictly increasing time points starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// `steps + 1` equally spaced points on `[0, t_max]`.
    pub fn uniform(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0) || steps == 0 {
            return Err(Error::Domain(format!("grid needs t_max > 0 and steps ≥ 1, got {t_max}, {steps}")));
        }
        let dt = t_max / steps as f64;
        Ok(Self { points: (0..=steps).map(|k| k as f64 * dt).collect() })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.first() != Some(&0.0) {
            return Err(Error::Domain("grid must start at t = 0".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.points.last().expect("grid is non-empty")
    }

    /// Index of the grid point closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        match self.points.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(k) => k,
            Err(0) => 0,
            Err(k) if k == self.points.len() => k - 1,
            Err(k) => {
                if t - self.points[k - 1] <= self.points[k] - t {
                    k - 1
                } else {
                    k
                }
            }
        }
    }
}

/// How each time-splitting step samples the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplittingRule {
    /// `exp(δt ℒ(t_j))`: first order.
    LeftPoint,
    /// `exp(δt ℒ̄_j)` with `ℒ̄_j` the three-point Gauss–Legendre average over
    /// the step. Exact for generators that commute at different times.
    #[default]
    GaussLegendre,
}

/// Dynamical map sampled on a grid, `Λ_0 = id`.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: TimeGrid,
    maps: Vec<QubitChannel>,
}

impl Propagator {
    pub fn from_maps(grid: TimeGrid, maps: Vec<QubitChannel>) -> Result<Self> {
        if grid.len() != maps.len() {
            return Err(Error::Domain(format!("{} grid points but {} maps", grid.len(), maps.len())));
        }
        Ok(Self { grid, maps })
    }

    /// Samples a closed-form dynamical map.
    pub fn from_fn(grid: TimeGrid, map: impl Fn(f64) -> QubitChannel) -> Self {
        let maps = grid.points().iter().map(|&t| map(t)).collect();
        Self { grid, maps }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn maps(&self) -> &[QubitChannel] {
        &self.maps
    }

    pub fn map_at(&self, k: usize) -> &QubitChannel {
        &self.maps[k]
    }

    /// Whether the Bloch block of `Λ_{t_k}` has `|det| > tol`.
    pub fn is_invertible(&self, k: usize, tol: f64) -> bool {
        self.maps[k].bloch_matrix().determinant().abs() > tol
    }

    /// `Λ_{t,s} = Λ_t Λ_s⁻¹` at the grid points nearest to `t` and `s`.
    pub fn intertwiner(&self, t: f64, s: f64) -> Result<QubitChannel> {
        if t < s {
            return Err(Error::Domain(format!("intertwiner needs t ≥ s, got t = {t}, s = {s}")));
        }
        self.intertwiner_at(self.grid.nearest_index(t), self.grid.nearest_index(s))
    }

    pub fn intertwiner_at(&self, k: usize, j: usize) -> Result<QubitChannel> {
        let s = self.grid.points()[j];
        if !self.is_invertible(j, 1e-12) {
            return Err(Error::SingularMap { t: s });
        }
        let inv = self.maps[j].inverse().ok_or(Error::SingularMap { t: s })?;
        Ok(self.maps[k].compose(&inv))
    }
}

const GL3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// `Λ_{t_{k+1}} = exp(δt_k ℒ_k) Λ_{t_k}` in the 4×4 representation.
pub fn propagate_timesplitting(g: &GeneratorSpec, grid: &TimeGrid, rule: SplittingRule) -> Propagator {
    let pts = grid.points();
    let mut maps = Vec::with_capacity(pts.len());
    let mut current = Matrix4::identity();
    maps.push(QubitChannel::from_pauli_matrix(current));
    for w in pts.windows(2) {
        let dt = w[1] - w[0];
        let step = match rule {
            SplittingRule::LeftPoint => g.pauli_matrix(w[0]),
            SplittingRule::GaussLegendre => GL3_NODES
                .iter()
                .zip(GL3_WEIGHTS)
                .map(|(x, wt)| g.pauli_matrix(w[0] + 0.5 * dt * (1.0 + x)) * wt)
                .sum(),
        };
        current = (step * dt).exp() * current;
        maps.push(QubitChannel::from_pauli_matrix(current));
    }
    Propagator { grid: grid.clone(), maps }
}

/// Fourth-order Runge–Kutta on `Λ̇ = ℒ_t Λ`.
pub fn propagate_ode(g: &GeneratorSpec, grid: &TimeGrid) -> Propagator {
    let pts = grid.points();
    let mut maps = Vec::with_capacity(pts.len());
    let mut y = Matrix4::identity();
    maps.push(QubitChannel::from_pauli_matrix(y));
    for w in pts.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let l_mid = g.pauli_matrix(t + 0.5 * h);
        let k1 = g.pauli_matrix(t) * y;
        let k2 = l_mid * (y + k1 * (0.5 * h));
        let k3 = l_mid * (y + k2 * (0.5 * h));
        let k4 = g.pauli_matrix(t + h) * (y + k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        maps.push(QubitChannel::from_pauli_matrix(y));
    }
    Propagator { grid: grid.clone(), maps }
}

/// Instantaneous P-divisibility: `Tr(P_{−n} ℒ_t[P_n]) ≥ 0` for every unit `n`.
/// The margin is `min_n −⟨n, L̃n + v⟩`.
pub fn instantaneous_p_div(g: &GeneratorSpec, t: f64, tol: f64) -> Verdict {
    Verdict::from_margin(g.at(t).p_div_margin(), tol)
}

/// Instantaneous CP-divisibility: `Y_t ≥ 0`, i.e. `K(t) ≥ 0`. The margin is
/// the smallest eigenvalue of `K(t)` as read off from `Y_t`.
pub fn instantaneous_cp_div(g: &GeneratorSpec, t: f64, tol: f64) -> Verdict {
    Verdict::from_margin(g.at(t).cp_div_margin(), tol)
}

/// Per-point margins of a certificate on a grid plus the worst case.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisibilityScan {
    pub margins: Vec<f64>,
    pub worst: Verdict,
    /// Time of the worst margin.
    pub worst_t: f64,
}

fn scan(grid: &TimeGrid, tol: f64, margin: impl Fn(f64) -> f64) -> DivisibilityScan {
    let margins: Vec<f64> = grid.points().iter().map(|&t| margin(t)).collect();
    let (k, &m) = margins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    DivisibilityScan { worst: Verdict::from_margin(m, tol), worst_t: grid.points()[k], margins }
}

pub fn p_div_scan(g: &GeneratorSpec, grid: &TimeGrid, tol: f64) -> DivisibilityScan {
    scan(grid, tol, |t| g.at(t).p_div_margin())
}

pub fn cp_div_scan(g: &GeneratorSpec, grid: &TimeGrid, tol: f64) -> DivisibilityScan {
    scan(grid, tol, |t| g.at(t).cp_div_margin())
}
