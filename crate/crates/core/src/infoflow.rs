//! Internal information of pairs of states and its classical counterpart.
//!
//! For classical states `ρ_p = Σ p_i P_i`, `ρ_q = Σ q_i P_i` and a prior `μ`,
//! the quantum internal information is `‖Λ_t[Δ_μ]‖₁`, the classical one is
//! `‖ℙΛ_t[Δ_μ]‖₁` with `ℙ` the decohering map, and their difference is the
//! coherent internal information.

use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{differentiate, f_criterion, reduce_map, SINGULAR_TOL};
use crate::generators::Propagator;
use crate::states::{decohere, helstrom, l1_coherence, trace_norm, DensityMatrix, HelstromMatrix, ProjectorBasis};
use crate::Result;

/// Tolerance of the decomposition and of the coherence-bound chain.
pub const CHAIN_TOL: f64 = 1e-10;
/// Derivative threshold for a revival.
pub const REVIVAL_TOL: f64 = 1e-6;

/// `‖Λ_{t_k}[Δ]‖₁` at grid index `k`.
pub fn quantum_info(p: &Propagator, delta: &HelstromMatrix, k: usize) -> f64 {
    trace_norm(&p.map_at(k).apply(&delta.entries)).expect("image of a Hermitian matrix is Hermitian")
}

/// Quantum, classical and coherent internal information along a propagator.
#[derive(Debug, Clone, Serialize)]
pub struct InfoTrajectory {
    pub times: Vec<f64>,
    pub i_quantum: Vec<f64>,
    pub i_classical: Vec<f64>,
    pub coherent: Vec<f64>,
    /// `(C_ℓ1(Λ_t[ρ_p]), C_ℓ1(Λ_t[ρ_q]))`.
    pub coherences: Vec<(f64, f64)>,
    pub mu: f64,
}

pub fn info_trajectory(p: &Propagator, basis: &ProjectorBasis, pvec: [f64; 2], qvec: [f64; 2], mu: f64) -> Result<InfoTrajectory> {
    let rho = DensityMatrix::diagonal_in(basis, pvec)?;
    let sigma = DensityMatrix::diagonal_in(basis, qvec)?;
    let delta = helstrom(&rho, &sigma, mu)?;
    let n = p.times().len();
    let mut traj = InfoTrajectory {
        times: p.times().to_vec(),
        i_quantum: Vec::with_capacity(n),
        i_classical: Vec::with_capacity(n),
        coherent: Vec::with_capacity(n),
        coherences: Vec::with_capacity(n),
        mu,
    };
    for map in p.maps() {
        let evolved = map.apply(&delta.entries);
        let iq = trace_norm(&evolved)?;
        let icl = trace_norm(&decohere(&evolved, basis))?;
        traj.i_quantum.push(iq);
        traj.i_classical.push(icl);
        traj.coherent.push(iq - icl);
        traj.coherences.push((l1_coherence(&map.apply(rho.matrix()), basis), l1_coherence(&map.apply(sigma.matrix()), basis)));
    }
    Ok(traj)
}

/// The chain `ΔI^cl_{t,s} ≤ C_s ≤ μ C_ℓ1(Λ_s[ρ_p]) + (1 − μ) C_ℓ1(Λ_s[ρ_q])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceBound {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    /// Whether the chain holds within [`CHAIN_TOL`].
    pub holds: bool,
    /// Whether `I^q_t ≤ I^q_s`, the balance the chain is derived from.
    pub balance_holds: bool,
}

/// Evaluates the coherence bound between grid indices `s ≤ t`.
pub fn coherence_bound_check(traj: &InfoTrajectory, s: usize, t: usize) -> CoherenceBound {
    assert!(s <= t, "coherence bound needs s ≤ t");
    let lhs = traj.i_classical[t] - traj.i_classical[s];
    let mid = traj.coherent[s];
    let (cp, cq) = traj.coherences[s];
    let rhs = traj.mu * cp + (1.0 - traj.mu) * cq;
    CoherenceBound {
        lhs,
        mid,
        rhs,
        holds: lhs <= mid + CHAIN_TOL && mid <= rhs + CHAIN_TOL,
        balance_holds: balance_holds(traj, s, t),
    }
}

/// `I^cl_t + C_t ≤ I^cl_s + C_s` within [`CHAIN_TOL`].
pub fn balance_holds(traj: &InfoTrajectory, s: usize, t: usize) -> bool {
    traj.i_classical[t] + traj.coherent[t] <= traj.i_classical[s] + traj.coherent[s] + CHAIN_TOL
}

/// A maximal time window over which a series grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevivalInterval {
    pub start: f64,
    pub end: f64,
}

/// Maximal intervals where the finite-difference derivative of `series`
/// exceeds `tol`. Runs spanning fewer than two grid steps are dropped.
pub fn detect_backflow(times: &[f64], series: &[f64], tol: f64) -> Vec<RevivalInterval> {
    if times.len() < 3 {
        return Vec::new();
    }
    let rate = differentiate(times, series);
    let mut out = Vec::new();
    let mut start = None;
    for k in 0..=rate.len() {
        let rising = k < rate.len() && rate[k] > tol;
        match (rising, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                if k - 1 - s >= 2 {
                    out.push(RevivalInterval { start: times[s], end: times[k - 1] });
                }
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// One row of a basis scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRow {
    pub chi: f64,
    pub xi: f64,
    /// Largest `f_t` over non-singular points.
    pub max_f: Option<f64>,
    pub invertible: bool,
    /// Revivals of `|2T_00 − 1|`, the classical information of `P_n` against `P_{−n}`.
    pub revivals: usize,
}

impl WitnessRow {
    /// Classical P-divisibility is lost in this basis.
    pub fn breaks_divisibility(&self, tol: f64) -> bool {
        self.max_f.is_some_and(|f| f > tol)
    }
}

/// Reduces `p` onto every basis of the grid and records the `f_t` witness.
pub fn witness_search(p: &Propagator, chi_grid: &[f64], xi_grid: &[f64]) -> Vec<WitnessRow> {
    let pairs: Vec<(f64, f64)> = chi_grid.iter().flat_map(|&c| xi_grid.iter().map(move |&x| (c, x))).collect();
    pairs
        .into_par_iter()
        .map(|(chi, xi)| {
            let sp = reduce_map(p, &ProjectorBasis::from_angles(chi, xi));
            let crit = f_criterion(&sp, SINGULAR_TOL);
            let info: Vec<f64> = crit.t00.iter().map(|a| (2.0 * a - 1.0).abs()).collect();
            WitnessRow {
                chi,
                xi,
                max_f: crit.max_f,
                invertible: crit.invertible_throughout(),
                revivals: detect_backflow(&sp.times, &info, REVIVAL_TOL).len(),
            }
        })
        .collect()
}
