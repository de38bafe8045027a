//! Builds the dynamics of a scenario and evaluates every diagnostic on its grid.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use qreduce::classical::{classical_generator_from_t, f_criterion, kolmogorov_check, reduce_map};
use qreduce::covariant::{default_basis_grid, family_generator, family_propagator, CovariantFamily, Example4};
use qreduce::generators::{propagate_ode, propagate_timesplitting};
use qreduce::infoflow::{detect_backflow, info_trajectory, witness_search, InfoTrajectory, RevivalInterval, WitnessRow};
use qreduce::{FCriterion, GeneratorSpec, GkslParams, ProjectorBasis, Propagator, SplittingRule, StochasticProcess, TimeGrid, Verdict, C64};

use crate::config::{ParamValue, Scenario, ScenarioConfig};
use crate::CliError;

/// Generator and sampled dynamical map of a scenario.
pub struct Dynamics {
    pub generator: GeneratorSpec,
    pub propagator: Propagator,
    /// Present for covariant scenarios.
    pub family: Option<Arc<dyn CovariantFamily>>,
}

fn pauli_rates(cfg: &ScenarioConfig) -> impl Fn(f64) -> [f64; 3] + Send + Sync + 'static {
    let g = [cfg.number("gamma1"), cfg.number("gamma2"), cfg.number("gamma3")];
    let eternal = cfg.text("preset") == "eternal";
    move |t| if eternal { [g[0], g[1], -g[2] * t.tanh()] } else { g }
}

pub fn build(cfg: &ScenarioConfig) -> Result<Dynamics, CliError> {
    let grid = TimeGrid::uniform(cfg.grid.t_max, cfg.grid.steps).map_err(|e| CliError::Config(e.to_string()))?;
    let dynamics = match cfg.scenario {
        Scenario::Unitary => {
            let axis = Vector3::new(cfg.number("rx"), cfg.number("ry"), cfg.number("rz"));
            if axis.norm() == 0.0 {
                return Err(CliError::Config("rotation axis must be non-zero".into()));
            }
            let omega = axis.normalize() * cfg.number("omega");
            let generator = GeneratorSpec::hamiltonian(omega);
            Dynamics { propagator: propagate_ode(&generator, &grid), generator, family: None }
        }
        Scenario::Pauli => {
            let generator = GeneratorSpec::pauli(pauli_rates(cfg));
            Dynamics { propagator: propagate_ode(&generator, &grid), generator, family: None }
        }
        Scenario::PauliHamiltonian => {
            let generator = GeneratorSpec::pauli(pauli_rates(cfg)).plus(&GeneratorSpec::hamiltonian(Vector3::new(0.0, 0.0, cfg.number("omega"))));
            Dynamics { propagator: propagate_ode(&generator, &grid), generator, family: None }
        }
        Scenario::Remark4 => {
            let generator = GeneratorSpec::switched_planar();
            Dynamics { propagator: propagate_timesplitting(&generator, &grid, SplittingRule::GaussLegendre), generator, family: None }
        }
        Scenario::CovariantExample4 => {
            let family: Arc<dyn CovariantFamily> = Arc::new(Example4::new(cfg.number("C")));
            Dynamics { propagator: family_propagator(family.as_ref(), &grid), generator: family_generator(family.clone()), family: Some(family) }
        }
        Scenario::Custom => {
            let c = |re: &str, im: &str| C64::new(cfg.number(re), cfg.number(im));
            let (k12, k13, k23) = (c("k12_re", "k12_im"), c("k13_re", "k13_im"), c("k23_re", "k23_im"));
            let k = Matrix3::new(
                C64::from(cfg.number("k11")),
                k12,
                k13,
                k12.conj(),
                C64::from(cfg.number("k22")),
                k23,
                k13.conj(),
                k23.conj(),
                C64::from(cfg.number("k33")),
            );
            let omega = Vector3::new(cfg.number("omega_x"), cfg.number("omega_y"), cfg.number("omega_z"));
            let generator = GeneratorSpec::constant(GkslParams::new(omega, k));
            Dynamics { propagator: propagate_ode(&generator, &grid), generator, family: None }
        }
    };
    Ok(dynamics)
}

/// A verdict together with the time of the smallest margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanVerdict {
    pub holds: bool,
    pub margin: f64,
    pub worst_t: f64,
}

fn worst_of(times: &[f64], margins: &[f64], tol: f64) -> Option<ScanVerdict> {
    let (k, &m) = margins.iter().enumerate().filter(|(_, m)| m.is_finite()).min_by(|a, b| a.1.total_cmp(b.1))?;
    Some(ScanVerdict { holds: Verdict::from_margin(m, tol).holds, margin: m, worst_t: times[k] })
}

#[derive(Debug, Clone, Serialize)]
pub struct Revivals {
    /// Revivals of the quantum internal information.
    pub quantum: Vec<RevivalInterval>,
    /// Revivals of the classical internal information.
    pub classical: Vec<RevivalInterval>,
}

/// Closed-form verdicts for covariant scenarios.
#[derive(Debug, Clone, Serialize)]
pub struct CovariantVerdicts {
    pub p_div: Option<ScanVerdict>,
    pub cp_div: Option<ScanVerdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scenario: Scenario,
    pub params: BTreeMap<String, ParamValue>,
    pub t_max: f64,
    pub steps: usize,
    pub chi: f64,
    pub xi: f64,
    pub mu: f64,
    pub quantum_p_div: Option<ScanVerdict>,
    pub quantum_cp_div: Option<ScanVerdict>,
    pub covariant: Option<CovariantVerdicts>,
    /// Classical P-divisibility in the configured basis.
    pub classical_p_div: Option<Verdict>,
    /// `f_t` for bistochastic processes, Kolmogorov conditions otherwise.
    pub classical_method: &'static str,
    pub max_f_t: Option<f64>,
    /// No singular point on the grid.
    pub invertible: bool,
    pub singular_points: usize,
    /// Grid times before the first singular point.
    pub invertible_until: Option<f64>,
    pub revivals: Revivals,
    /// Classical divisibility over the default basis grid.
    pub witness: Option<Vec<WitnessRow>>,
}

/// Per-grid-point series, one CSV row each.
pub struct Series {
    pub times: Vec<f64>,
    pub t00: Vec<f64>,
    pub f: Vec<Option<f64>>,
    pub det: Vec<f64>,
    pub info: InfoTrajectory,
    pub eigmin_k: Vec<f64>,
    pub p_margin: Vec<f64>,
    pub cp_margin: Vec<f64>,
}

pub struct Analysis {
    pub summary: Summary,
    pub series: Series,
}

fn is_bistochastic(sp: &StochasticProcess) -> bool {
    sp.column_sum_defect() < 1e-9 && sp.matrices.iter().all(|m| m.row_iter().all(|r| (r.sum() - 1.0).abs() < 1e-9))
}

pub fn analyse(cfg: &ScenarioConfig, dynamics: &Dynamics) -> Result<Analysis, CliError> {
    let tol = &cfg.tolerances;
    let p = &dynamics.propagator;
    let times = p.times().to_vec();
    let basis = ProjectorBasis::from_angles(cfg.basis.chi, cfg.basis.xi);
    let sp = reduce_map(p, &basis);
    let det = sp.determinants();

    let params: Vec<GkslParams> = times.iter().map(|&t| dynamics.generator.at(t)).collect();
    let eigmin_k: Vec<f64> = params.iter().map(|g| g.kossakowski_eigenvalues()[0]).collect();
    let p_margin: Vec<f64> = params.iter().map(GkslParams::p_div_margin).collect();
    let cp_margin: Vec<f64> = params.iter().map(GkslParams::cp_div_margin).collect();

    let bistochastic = is_bistochastic(&sp);
    let crit = bistochastic.then(|| f_criterion(&sp, tol.singular));
    let (classical_p_div, classical_method) = match &crit {
        Some(c) => (Some(Verdict::from_margin(-c.max_f.unwrap_or(f64::NAN), tol.divisibility)).filter(|_| c.max_f.is_some()), "f_t"),
        None => (classical_generator_from_t(&sp, tol.singular).ok().map(|lg| kolmogorov_check(&lg, tol.divisibility)), "kolmogorov"),
    };
    let singular: Vec<bool> = match &crit {
        Some(c) => c.f.iter().map(Option::is_none).collect(),
        None => det.iter().map(|d| d.abs() < tol.singular).collect(),
    };
    let singular_points = singular.iter().filter(|&&s| s).count();
    let invertible_until = match singular.iter().position(|&s| s) {
        Some(0) => None,
        Some(k) => Some(times[k - 1]),
        None => times.last().copied(),
    };

    let info = info_trajectory(p, &basis, cfg.states.p, cfg.states.q, cfg.states.mu).map_err(|e| CliError::Config(e.to_string()))?;
    let revivals = Revivals {
        quantum: detect_backflow(&times, &info.i_quantum, tol.revival),
        classical: detect_backflow(&times, &info.i_classical, tol.revival),
    };

    let covariant = dynamics.family.as_ref().map(|fam| {
        let gens: Vec<_> = times.iter().map(|&t| fam.generator(t).ok()).collect();
        let margins = |f: &dyn Fn(&qreduce::CovariantGenerator) -> f64| -> Vec<f64> { gens.iter().map(|g| g.as_ref().map_or(f64::NAN, f)).collect() };
        CovariantVerdicts {
            p_div: worst_of(&times, &margins(&|g| g.p_divisibility(tol.divisibility).verdict.margin), tol.divisibility),
            cp_div: worst_of(&times, &margins(&|g| g.cp_divisibility(tol.divisibility).verdict.margin), tol.divisibility),
        }
    });

    let witness = cfg.witness.then(|| {
        let (chi, xi) = default_basis_grid();
        witness_search(p, &chi, &xi)
    });

    let mut resolved: BTreeMap<String, ParamValue> = BTreeMap::new();
    for (key, default) in cfg.scenario.defaults() {
        let value = cfg.params.get(*key).cloned().unwrap_or(match default {
            crate::config::ParamDefault::Number(x) => ParamValue::Number(*x),
            crate::config::ParamDefault::Text(s) => ParamValue::Text(s.to_string()),
        });
        resolved.insert(key.to_string(), value);
    }

    let summary = Summary {
        scenario: cfg.scenario,
        params: resolved,
        t_max: cfg.grid.t_max,
        steps: cfg.grid.steps,
        chi: cfg.basis.chi,
        xi: cfg.basis.xi,
        mu: cfg.states.mu,
        quantum_p_div: worst_of(&times, &p_margin, tol.divisibility),
        quantum_cp_div: worst_of(&times, &cp_margin, tol.divisibility),
        covariant,
        classical_p_div,
        classical_method,
        max_f_t: crit.as_ref().and_then(|c| c.max_f),
        invertible: singular_points == 0,
        singular_points,
        invertible_until,
        revivals,
        witness,
    };
    let f = crit.map_or_else(|| vec![None; times.len()], |c: FCriterion| c.f);
    let series = Series { t00: sp.t00(), times, f, det, info, eigmin_k, p_margin, cp_margin };
    Ok(Analysis { summary, series })
}
