//! Qubit maps covariant under the diagonal sign flips `σ3 · σ3`.
//!
//! A map in the class is fixed by a real 2×2 population matrix `A` and two
//! complex numbers `λ`, `μ`:
//!
//! ```text
//! Φ[X] = Σ_ij A_ij E_ij X E_ji + λ E_00 X E_11 + λ̄ E_11 X E_00
//!        + μ E_00 Xᵀ E_11 + μ̄ E_11 Xᵀ E_00
//! ```
//!
//! so that `Φ[X]_01 = λ X_01 + μ X_10`. The class is closed under
//! composition, and the generator of a dynamics inside the class belongs to
//! it too.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::channels::{QubitChannel, Verdict};
use crate::generators::{GeneratorSpec, GkslParams, Propagator, TimeGrid};
use crate::states::matrix_unit;
use crate::{Error, Mat2, Result, C64};

/// Tolerance for recognising a map as a member of the class.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// A member `Φ(A, λ, μ)` of the class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantTriple {
    /// Population matrix `A`, acting on the diagonal as `diag(AX_diag)`.
    pub populations: Matrix2<f64>,
    pub lambda: C64,
    pub mu: C64,
}

impl CovariantTriple {
    /// Trace-preserving member with `A = [[a, 1 − b], [1 − a, b]]`.
    pub fn new(a: f64, b: f64, lambda: C64, mu: C64) -> Self {
        Self { populations: Matrix2::new(a, 1.0 - b, 1.0 - a, b), lambda, mu }
    }

    pub fn from_parts(populations: Matrix2<f64>, lambda: C64, mu: C64) -> Self {
        Self { populations, lambda, mu }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 1.0, C64::from(1.0), C64::from(0.0))
    }

    pub fn a(&self) -> f64 {
        self.populations[(0, 0)]
    }

    pub fn b(&self) -> f64 {
        self.populations[(1, 1)]
    }

    pub fn apply(&self, x: &Mat2) -> Mat2 {
        let p = &self.populations;
        Mat2::new(
            x[(0, 0)] * p[(0, 0)] + x[(1, 1)] * p[(0, 1)],
            self.lambda * x[(0, 1)] + self.mu * x[(1, 0)],
            self.lambda.conj() * x[(1, 0)] + self.mu.conj() * x[(0, 1)],
            x[(0, 0)] * p[(1, 0)] + x[(1, 1)] * p[(1, 1)],
        )
    }

    /// The same map in the Pauli representation.
    pub fn channel(&self) -> QubitChannel {
        QubitChannel::from_superoperator(|x| self.apply(x))
    }

    /// Reads `(A, λ, μ)` back from a map, failing if the map is not in the class.
    pub fn from_channel(channel: &QubitChannel) -> Result<Self> {
        let e00 = channel.apply(&matrix_unit(0, 0));
        let e11 = channel.apply(&matrix_unit(1, 1));
        let e01 = channel.apply(&matrix_unit(0, 1));
        let off = [e00[(0, 1)], e00[(1, 0)], e11[(0, 1)], e11[(1, 0)], e01[(0, 0)], e01[(1, 1)]];
        if off.iter().any(|z| z.norm() > MEMBERSHIP_TOL) {
            return Err(Error::Domain("map does not commute with the diagonal sign flips".into()));
        }
        let populations = Matrix2::new(e00[(0, 0)].re, e11[(0, 0)].re, e00[(1, 1)].re, e11[(1, 1)].re);
        Ok(Self { populations, lambda: e01[(0, 1)], mu: e01[(1, 0)].conj() })
    }

    /// `self ∘ other` by composing the maps and reading the triple back.
    pub fn compose(&self, other: &CovariantTriple) -> CovariantTriple {
        Self::from_channel(&self.channel().compose(&other.channel())).expect("the class is closed under composition")
    }

    /// Group law `(AA′, λλ′ + μμ̄′, λμ′ + μλ̄′)`.
    pub fn compose_symbolic(&self, other: &CovariantTriple) -> CovariantTriple {
        Self {
            populations: self.populations * other.populations,
            lambda: self.lambda * other.lambda + self.mu * other.mu.conj(),
            mu: self.lambda * other.mu + self.mu * other.lambda.conj(),
        }
    }

    /// Heisenberg dual `(Aᵀ, λ̄, μ)`.
    pub fn dual(&self) -> CovariantTriple {
        Self { populations: self.populations.transpose(), lambda: self.lambda.conj(), mu: self.mu }
    }

    pub fn is_self_dual(&self, tol: f64) -> bool {
        (self.populations - self.populations.transpose()).amax() <= tol && self.lambda.im.abs() <= tol
    }

    /// Positivity: `A ≥ 0` entrywise and `|λ| + |μ| ≤ √(ab) + √((1−a)(1−b))`.
    pub fn positivity(&self, tol: f64) -> Verdict {
        let (a, b) = (self.a(), self.b());
        let bound = (a * b).max(0.0).sqrt() + ((1.0 - a) * (1.0 - b)).max(0.0).sqrt();
        let margin = self.populations.min().min(bound - self.lambda.norm() - self.mu.norm());
        Verdict::from_margin(margin, tol)
    }

    /// Complete positivity: `A ≥ 0`, `|λ| ≤ √(ab)` and `|μ| ≤ √((1−a)(1−b))`.
    pub fn complete_positivity(&self, tol: f64) -> Verdict {
        let (a, b) = (self.a(), self.b());
        let margin = self
            .populations
            .min()
            .min((a * b).max(0.0).sqrt() - self.lambda.norm())
            .min(((1.0 - a) * (1.0 - b)).max(0.0).sqrt() - self.mu.norm());
        Verdict::from_margin(margin, tol)
    }

    /// Bloch matrix from the block form: the xy block mixes `λ ± μ`, z scales
    /// by `A_00 − A_01 − A_10 + A_11` over two.
    pub fn bloch_matrix(&self) -> Matrix3<f64> {
        let (l, m, p) = (self.lambda, self.mu, &self.populations);
        Matrix3::new(
            (l + m).re,
            (l - m).im,
            0.0,
            -(l + m).im,
            (l - m).re,
            0.0,
            0.0,
            0.0,
            0.5 * (p[(0, 0)] - p[(0, 1)] - p[(1, 0)] + p[(1, 1)]),
        )
    }

    /// `T_00 = Tr(P_n Φ[P_n])` for `n = (sin χ cos ξ, sin χ sin ξ, cos χ)`.
    pub fn t00(&self, chi: f64, xi: f64) -> f64 {
        let p = [0.5 * (1.0 + chi.cos()), 0.5 * (1.0 - chi.cos())];
        let diag: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| self.populations[(i, j)] * p[i] * p[j]).sum();
        let s2 = chi.sin().powi(2);
        let coherent = 0.5 * s2 * (self.lambda.re + self.mu.norm() * (self.mu.arg() + 2.0 * xi).cos());
        diag + coherent
    }
}

/// Time derivative of a triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleRate {
    pub populations: Matrix2<f64>,
    pub lambda: C64,
    pub mu: C64,
}

/// Finite-difference step for families without analytic derivatives.
pub const FD_STEP: f64 = 1e-5;

/// A smooth one-parameter family `t ↦ Φ(A_t, λ_t, μ_t)` with `Φ_0 = id`.
pub trait CovariantFamily: Send + Sync {
    fn triple(&self, t: f64) -> CovariantTriple;

    /// Central differences with step [`FD_STEP`]; second-order forward
    /// differences when `t < FD_STEP`.
    fn derivative(&self, t: f64) -> TripleRate {
        let h = FD_STEP;
        let (c0, c1, c2) = if t >= h {
            let (lo, hi) = (self.triple(t - h), self.triple(t + h));
            return TripleRate {
                populations: (hi.populations - lo.populations) / (2.0 * h),
                lambda: (hi.lambda - lo.lambda) / (2.0 * h),
                mu: (hi.mu - lo.mu) / (2.0 * h),
            };
        } else {
            (self.triple(t), self.triple(t + h), self.triple(t + 2.0 * h))
        };
        TripleRate {
            populations: (c1.populations * 4.0 - c0.populations * 3.0 - c2.populations) / (2.0 * h),
            lambda: (c1.lambda * 4.0 - c0.lambda * 3.0 - c2.lambda) / (2.0 * h),
            mu: (c1.mu * 4.0 - c0.mu * 3.0 - c2.mu) / (2.0 * h),
        }
    }

    /// Generator at `t`; [`generator_triple`] unless the family knows it in
    /// closed form.
    fn generator(&self, t: f64) -> Result<CovariantGenerator> {
        generator_triple(self, t)
    }
}

impl<F: Fn(f64) -> CovariantTriple + Send + Sync> CovariantFamily for F {
    fn triple(&self, t: f64) -> CovariantTriple {
        self(t)
    }
}

/// Generator `Φ(B, l, m)` of a dynamics in the class, with
/// `B = [[−γ₋, γ₊], [γ₋, −γ₊]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantGenerator {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub l: C64,
    pub m: C64,
}

/// Closed-form divisibility certificate of a covariant generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantDivisibility {
    /// Overall verdict; the margin matches the generic certificate.
    pub verdict: Verdict,
    /// `min(γ₊, γ₋)`.
    pub rate_margin: f64,
    /// P: `Γ_T − Γ_L/2 + √(γ₊γ₋) − |m|`; CP: `γ₊γ₋ − |m|²`.
    pub coupling_margin: f64,
}

impl CovariantGenerator {
    pub fn transversal_rate(&self) -> f64 {
        -self.l.re
    }

    pub fn longitudinal_rate(&self) -> f64 {
        self.gamma_plus + self.gamma_minus
    }

    pub fn omega(&self) -> f64 {
        -self.l.im
    }

    pub fn kappa(&self) -> f64 {
        -self.m.re
    }

    pub fn eta(&self) -> f64 {
        -self.m.im
    }

    pub fn delta(&self) -> f64 {
        0.5 * (self.gamma_plus - self.gamma_minus)
    }

    pub fn rate_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(-self.gamma_minus, self.gamma_plus, self.gamma_minus, -self.gamma_plus)
    }

    /// Direct action on a 2×2 matrix.
    pub fn apply(&self, x: &Mat2) -> Mat2 {
        CovariantTriple::from_parts(self.rate_matrix(), self.l, self.m).apply(x)
    }

    /// Kossakowski matrix in the Pauli basis.
    pub fn kossakowski(&self) -> Matrix3<C64> {
        let half_l = 0.5 * self.longitudinal_rate();
        let off = C64::new(self.eta(), -self.delta());
        Matrix3::new(
            C64::from(half_l - self.kappa()),
            off,
            C64::from(0.0),
            off.conj(),
            C64::from(half_l + self.kappa()),
            C64::from(0.0),
            C64::from(0.0),
            C64::from(0.0),
            C64::from(self.transversal_rate() - half_l),
        )
    }

    /// GKSL form with `H = ½ ω σ3`.
    pub fn to_gksl(&self) -> GkslParams {
        GkslParams::new(Vector3::new(0.0, 0.0, self.omega()), self.kossakowski())
    }

    /// `Tr(Q ℒ[P])` for `P = |ψ⟩⟨ψ|`, `ψ = (w₁, √(1 − w₁²) e^{−iΩ/2})`, `Q = 1 − P`:
    /// `γ₋x² + γ₊(1−x)² + 2(Γ_T − Γ_L/2 − |m| cos(arg m − Ω)) x(1−x)` with `x = w₁²`.
    pub fn transition_rate(&self, w1: f64, phase: f64) -> f64 {
        let x = w1 * w1;
        let coupling = self.transversal_rate() - 0.5 * self.longitudinal_rate() - self.m.norm() * (self.m.arg() - phase).cos();
        self.gamma_minus * x * x + self.gamma_plus * (1.0 - x) * (1.0 - x) + 2.0 * coupling * x * (1.0 - x)
    }

    /// P-divisibility: `γ± ≥ 0` and `Γ_T − Γ_L/2 + √(γ₊γ₋) ≥ |m|`.
    ///
    /// The margin is `2 min_P Tr(Q ℒ[P])`, the minimum of the quadratic
    /// transition rate over `x ∈ [0, 1]` at the worst phase.
    pub fn p_divisibility(&self, tol: f64) -> CovariantDivisibility {
        let (gp, gm) = (self.gamma_plus, self.gamma_minus);
        let c = self.transversal_rate() - 0.5 * self.longitudinal_rate() - self.m.norm();
        // g(x) = γ₋x² + γ₊(1−x)² + 2c x(1−x)
        let quad = gm + gp - 2.0 * c;
        let lin = 2.0 * (c - gp);
        let mut min = gp.min(gm);
        if quad > 0.0 {
            let x = -lin / (2.0 * quad);
            if (0.0..=1.0).contains(&x) {
                min = min.min(gp + lin * x + quad * x * x);
            }
        }
        let coupling_margin = self.transversal_rate() - 0.5 * self.longitudinal_rate() + (gp * gm).max(0.0).sqrt() - self.m.norm();
        CovariantDivisibility { verdict: Verdict::from_margin(2.0 * min, tol), rate_margin: gp.min(gm), coupling_margin }
    }

    /// CP-divisibility: `γ± ≥ 0`, `γ₊γ₋ ≥ |m|²` and `Γ_T ≥ Γ_L/2`. The
    /// margin is the smallest Kossakowski eigenvalue,
    /// `min(Γ_L/2 − √(|m|² + δ²), Γ_T − Γ_L/2)`.
    pub fn cp_divisibility(&self, tol: f64) -> CovariantDivisibility {
        let half_l = 0.5 * self.longitudinal_rate();
        let margin = (half_l - (self.m.norm_sqr() + self.delta().powi(2)).sqrt()).min(self.transversal_rate() - half_l);
        CovariantDivisibility {
            verdict: Verdict::from_margin(margin, tol),
            rate_margin: self.gamma_plus.min(self.gamma_minus),
            coupling_margin: self.gamma_plus * self.gamma_minus - self.m.norm_sqr(),
        }
    }
}

/// Generator of `family` at `t`: `B = Ȧ A⁻¹` and
/// `l = (λ̇λ̄ − μ̇μ̄)/(|λ|² − |μ|²)`, `m = (μ̇λ − λ̇μ)/(|λ|² − |μ|²)`.
pub fn generator_triple<F: CovariantFamily + ?Sized>(family: &F, t: f64) -> Result<CovariantGenerator> {
    let tr = family.triple(t);
    let rate = family.derivative(t);
    let det = tr.populations.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::SingularGenerator { t, reason: "population matrix is singular" });
    }
    let gap = tr.lambda.norm_sqr() - tr.mu.norm_sqr();
    if gap.abs() <= 1e-12 * (tr.lambda.norm_sqr() + tr.mu.norm_sqr()) {
        return Err(Error::SingularGenerator { t, reason: "|λ| = |μ|" });
    }
    let b = rate.populations * tr.populations.try_inverse().expect("determinant checked");
    let l = (rate.lambda * tr.lambda.conj() - rate.mu * tr.mu.conj()) / gap;
    let m = (rate.mu * tr.lambda - rate.lambda * tr.mu) / gap;
    Ok(CovariantGenerator { gamma_plus: b[(0, 1)], gamma_minus: b[(1, 0)], l, m })
}

/// `GeneratorSpec` of a family. Times where the family's generator is
/// singular evaluate to NaN entries.
pub fn family_generator(family: Arc<dyn CovariantFamily>) -> GeneratorSpec {
    GeneratorSpec::new(move |t| match family.generator(t) {
        Ok(g) => g.to_gksl(),
        Err(_) => GkslParams::new(Vector3::repeat(f64::NAN), Matrix3::repeat(C64::new(f64::NAN, f64::NAN))),
    })
}

/// Samples the family's maps on a grid.
pub fn family_propagator(family: &dyn CovariantFamily, grid: &TimeGrid) -> Propagator {
    Propagator::from_fn(grid.clone(), |t| family.triple(t).channel())
}

/// `T_00(t)` of a family in the basis `(χ, ξ)`:
/// `½(1 + (2a − 1)cos²χ + |λ| cos φ sin²χ + |μ| sin²χ cos(θ + 2ξ))` for unital
/// families, with the population part taken exactly in general.
pub fn t00_closed_form(family: &dyn CovariantFamily, t: f64, chi: f64, xi: f64) -> f64 {
    family.triple(t).t00(chi, xi)
}

/// The self-dual-generator family with `|λ| = e^{−2t} cosh t`,
/// `|μ| = e^{−2t} sinh t`, `arg λ = C tanh³ t`, `arg μ = 3C tanh t` and
/// `a = b = e^{−t} cosh t`. P-divisible iff `C ≤ 3/2`, CP-divisible iff `C = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example4 {
    pub c: f64,
}

impl Example4 {
    pub fn new(c: f64) -> Self {
        Self { c }
    }

    /// `r_t = 3C (1 − tanh²t) tanh t`, so that `|m_t| = √(1 + r_t²)`.
    pub fn r(&self, t: f64) -> f64 {
        let th = t.tanh();
        3.0 * self.c * (1.0 - th * th) * th
    }

    /// `max_t r_t = 2C/√3`, reached at `tanh² t = 1/3`.
    pub fn max_r(&self) -> f64 {
        2.0 * self.c / 3.0_f64.sqrt()
    }

    /// Closed-form generator: `l = −2`, `γ± = 1`, `m = (1 + i r_t) e^{i(θ + φ)}`.
    pub fn analytic_generator(&self, t: f64) -> CovariantGenerator {
        let th = t.tanh();
        let phase = self.c * th.powi(3) + 3.0 * self.c * th;
        CovariantGenerator {
            gamma_plus: 1.0,
            gamma_minus: 1.0,
            l: C64::from(-2.0),
            m: C64::new(1.0, self.r(t)) * C64::from_polar(1.0, phase),
        }
    }
}

impl CovariantFamily for Example4 {
    fn triple(&self, t: f64) -> CovariantTriple {
        let damp = (-2.0 * t).exp();
        let th = t.tanh();
        let a = (-t).exp() * t.cosh();
        CovariantTriple::new(
            a,
            a,
            C64::from_polar(damp * t.cosh(), self.c * th.powi(3)),
            C64::from_polar(damp * t.sinh(), 3.0 * self.c * th),
        )
    }

    fn derivative(&self, t: f64) -> TripleRate {
        let damp = (-2.0 * t).exp();
        let (ch, sh, th) = (t.cosh(), t.sinh(), t.tanh());
        let sech2 = 1.0 - th * th;
        let (mod_l, mod_m) = (damp * ch, damp * sh);
        let (dmod_l, dmod_m) = (damp * (sh - 2.0 * ch), damp * (ch - 2.0 * sh));
        let (phi, theta) = (self.c * th.powi(3), 3.0 * self.c * th);
        let (dphi, dtheta) = (3.0 * self.c * th * th * sech2, 3.0 * self.c * sech2);
        let da = -damp;
        TripleRate {
            populations: Matrix2::new(da, -da, -da, da),
            lambda: C64::new(dmod_l, mod_l * dphi) * C64::from_polar(1.0, phi),
            mu: C64::new(dmod_m, mod_m * dtheta) * C64::from_polar(1.0, theta),
        }
    }

    /// Closed form, free of the cancellation in `a + b − 1 = e^{−2t}` that
    /// limits [`generator_triple`] at large `t`.
    fn generator(&self, t: f64) -> Result<CovariantGenerator> {
        Ok(self.analytic_generator(t))
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Unital family with a self-dual generator, built from `g = |λ| + |μ|`,
/// `h = |λ| − |μ|`, the phase `θ` of `μ` and the population `a = b`. The
/// phase `φ` of `λ` follows from `φ̇|λ|² = θ̇|μ|²`, `φ(0) = 0`.
#[derive(Clone)]
pub struct SelfDualFamily {
    pub g: ScalarFn,
    pub h: ScalarFn,
    pub theta: ScalarFn,
    pub a: ScalarFn,
    /// Optional analytic derivatives of `g`, `h`, `θ` and `a`.
    pub g_dot: Option<ScalarFn>,
    pub h_dot: Option<ScalarFn>,
    pub theta_dot: Option<ScalarFn>,
    pub a_dot: Option<ScalarFn>,
}

fn central(f: &ScalarFn, t: f64) -> f64 {
    if t >= FD_STEP {
        (f(t + FD_STEP) - f(t - FD_STEP)) / (2.0 * FD_STEP)
    } else {
        (4.0 * f(t + FD_STEP) - 3.0 * f(t) - f(t + 2.0 * FD_STEP)) / (2.0 * FD_STEP)
    }
}

fn rate_of(f: &ScalarFn, df: &Option<ScalarFn>, t: f64) -> f64 {
    df.as_ref().map_or_else(|| central(f, t), |d| d(t))
}

impl SelfDualFamily {
    pub fn new(
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        theta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { g: Arc::new(g), h: Arc::new(h), theta: Arc::new(theta), a: Arc::new(a), g_dot: None, h_dot: None, theta_dot: None, a_dot: None }
    }

    /// `g = e^{−t}`, `h = e^{−3t}`, `θ = 3C tanh t`, `a = e^{−t} cosh t`.
    pub fn example4(c: f64) -> Self {
        let mut f = Self::new(|t| (-t).exp(), |t| (-3.0 * t).exp(), move |t| 3.0 * c * t.tanh(), |t| (-t).exp() * t.cosh());
        f.g_dot = Some(Arc::new(|t| -(-t).exp()));
        f.h_dot = Some(Arc::new(|t| -3.0 * (-3.0 * t).exp()));
        f.theta_dot = Some(Arc::new(move |t| 3.0 * c * (1.0 - t.tanh().powi(2))));
        f.a_dot = Some(Arc::new(|t| -(-2.0 * t).exp()));
        f
    }

    fn moduli(&self, t: f64) -> (f64, f64) {
        let (g, h) = ((self.g)(t), (self.h)(t));
        (0.5 * (g + h), 0.5 * (g - h))
    }

    /// `φ̇ = θ̇ |μ|²/|λ|²`.
    pub fn phase_rate(&self, t: f64) -> f64 {
        let (ml, mm) = self.moduli(t);
        if mm == 0.0 {
            return 0.0;
        }
        rate_of(&self.theta, &self.theta_dot, t) * (mm / ml).powi(2)
    }

    /// P-divisibility margin `(ġ/g)(ḣ/h) − θ̇² ((g − h)/(g + h))²`, valid when
    /// `Γ_T = −ġ/(2g) − ḣ/(2h) ≥ 0`.
    pub fn p_div_condition(&self, t: f64) -> f64 {
        let (g, h) = ((self.g)(t), (self.h)(t));
        let (dg, dh) = (rate_of(&self.g, &self.g_dot, t), rate_of(&self.h, &self.h_dot, t));
        let dtheta = rate_of(&self.theta, &self.theta_dot, t);
        (dg / g) * (dh / h) - dtheta * dtheta * ((g - h) / (g + h)).powi(2)
    }

    /// `Γ_T = −ġ/(2g) − ḣ/(2h)`.
    pub fn transversal_rate(&self, t: f64) -> f64 {
        let (g, h) = ((self.g)(t), (self.h)(t));
        -rate_of(&self.g, &self.g_dot, t) / (2.0 * g) - rate_of(&self.h, &self.h_dot, t) / (2.0 * h)
    }

    /// Integrates `φ` on `grid` by the cumulative trapezoid rule.
    pub fn build(&self, grid: &TimeGrid) -> Result<BuiltSelfDualFamily> {
        for &t in grid.points() {
            let (g, h) = ((self.g)(t), (self.h)(t));
            if !(h > 0.0 && h <= g) {
                return Err(Error::Domain(format!("need 0 < h ≤ g, got g = {g}, h = {h} at t = {t}")));
            }
        }
        let pts = grid.points();
        let rates: Vec<f64> = pts.iter().map(|&t| self.phase_rate(t)).collect();
        let mut phi = vec![0.0; pts.len()];
        for k in 1..pts.len() {
            phi[k] = phi[k - 1] + 0.5 * (pts[k] - pts[k - 1]) * (rates[k] + rates[k - 1]);
        }
        Ok(BuiltSelfDualFamily { spec: self.clone(), times: pts.to_vec(), phi, phi_rate: rates })
    }
}

/// A [`SelfDualFamily`] with its `λ` phase tabulated. Between grid points the
/// phase is interpolated by cubic Hermite polynomials using `φ̇`; beyond the
/// grid it is held at the end values.
#[derive(Clone)]
pub struct BuiltSelfDualFamily {
    spec: SelfDualFamily,
    times: Vec<f64>,
    phi: Vec<f64>,
    phi_rate: Vec<f64>,
}

impl BuiltSelfDualFamily {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn phases(&self) -> &[f64] {
        &self.phi
    }

    pub fn phase(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.phi[0];
        }
        if t >= self.times[n - 1] {
            return self.phi[n - 1];
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (h00, h10, h01, h11) = (
            2.0 * s.powi(3) - 3.0 * s * s + 1.0,
            s.powi(3) - 2.0 * s * s + s,
            -2.0 * s.powi(3) + 3.0 * s * s,
            s.powi(3) - s * s,
        );
        h00 * self.phi[k] + h10 * h * self.phi_rate[k] + h01 * self.phi[k + 1] + h11 * h * self.phi_rate[k + 1]
    }

    pub fn spec(&self) -> &SelfDualFamily {
        &self.spec
    }
}

impl CovariantFamily for BuiltSelfDualFamily {
    fn triple(&self, t: f64) -> CovariantTriple {
        let (ml, mm) = self.spec.moduli(t);
        let a = (self.spec.a)(t);
        CovariantTriple::new(a, a, C64::from_polar(ml, self.phase(t)), C64::from_polar(mm, (self.spec.theta)(t)))
    }

    fn derivative(&self, t: f64) -> TripleRate {
        let s = &self.spec;
        let (ml, mm) = s.moduli(t);
        let (dg, dh) = (rate_of(&s.g, &s.g_dot, t), rate_of(&s.h, &s.h_dot, t));
        let (dml, dmm) = (0.5 * (dg + dh), 0.5 * (dg - dh));
        let (phi, theta) = (self.phase(t), (s.theta)(t));
        let dtheta = rate_of(&s.theta, &s.theta_dot, t);
        let da = rate_of(&s.a, &s.a_dot, t);
        TripleRate {
            populations: Matrix2::new(da, -da, -da, da),
            lambda: C64::new(dml, ml * s.phase_rate(t)) * C64::from_polar(1.0, phi),
            mu: C64::new(dmm, mm * dtheta) * C64::from_polar(1.0, theta),
        }
    }
}

/// Default basis grids for witness scans: `χ ∈ {0, π/16, …, π/2}` and
/// `ξ ∈ {0, π/16, …, π}`.
pub fn default_basis_grid() -> (Vec<f64>, Vec<f64>) {
    let step = PI / 16.0;
    ((0..=8).map(|k| k as f64 * step).collect(), (0..=16).map(|k| k as f64 * step).collect())
}
