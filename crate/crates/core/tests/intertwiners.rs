use std::f64::consts::PI;

use qreduce::classical::{f_criterion, reduce_map, SINGULAR_TOL};
use qreduce::covariant::{family_propagator, Example4, SelfDualFamily};
use qreduce::generators::{propagate_ode, propagate_timesplitting};
use qreduce::{GeneratorSpec, ProjectorBasis, Propagator, SplittingRule, TimeGrid};

fn worst_intertwiner(p: &Propagator, every: usize, cp: bool) -> f64 {
    let n = p.times().len();
    let mut worst = f64::INFINITY;
    for s in (0..n).step_by(every) {
        for t in (s + 1..n).step_by(every) {
            let map = p.intertwiner_at(t, s).unwrap();
            let margin = if cp { map.choi().min_eigenvalue() } else { map.is_positive(0.0).unwrap().margin };
            worst = worst.min(margin);
        }
    }
    worst
}

#[test]
fn example4_intertwiners_follow_the_p_boundary() {
    let grid = TimeGrid::uniform(3.0, 300).unwrap();
    let inside = family_propagator(&Example4::new(1.5), &grid);
    assert!(worst_intertwiner(&inside, 5, false) > -1e-9);
    let outside = family_propagator(&Example4::new(2.0), &grid);
    assert!(worst_intertwiner(&outside, 5, false) < -1e-4);
}

#[test]
fn example4_intertwiners_follow_the_cp_boundary() {
    let grid = TimeGrid::uniform(3.0, 300).unwrap();
    assert!(worst_intertwiner(&family_propagator(&Example4::new(0.0), &grid), 5, true) > -1e-9);
    assert!(worst_intertwiner(&family_propagator(&Example4::new(1.0), &grid), 5, true) < -1e-4);
}

#[test]
fn self_dual_reconstruction_matches_direct_family() {
    let grid = TimeGrid::uniform(10.0, 10_000).unwrap();
    let basis = ProjectorBasis::from_angles(PI / 2.0, PI / 4.0);
    let built = SelfDualFamily::example4(1.5).build(&grid).unwrap();
    let rebuilt = f_criterion(&reduce_map(&family_propagator(&built, &grid), &basis), SINGULAR_TOL);
    let direct = f_criterion(&reduce_map(&family_propagator(&Example4::new(1.5), &grid), &basis), SINGULAR_TOL);
    assert!((rebuilt.max_f.unwrap() - direct.max_f.unwrap()).abs() < 1e-5);
    assert!(rebuilt.max_f.unwrap() > 0.0 && rebuilt.invertible_throughout());
}

#[test]
fn propagators_agree_on_a_smooth_generator() {
    let spec = GeneratorSpec::pauli(|t| [0.3 + 0.2 * t.sin(), 0.4, 0.1]).plus(&GeneratorSpec::hamiltonian(nalgebra::Vector3::new(0.5, 0.0, 1.0)));
    let grid = TimeGrid::uniform(4.0, 4000).unwrap();
    let ode = propagate_ode(&spec, &grid);
    let split = propagate_timesplitting(&spec, &grid, SplittingRule::GaussLegendre);
    for (a, b) in ode.maps().iter().zip(split.maps()) {
        assert!((a.pauli_matrix() - b.pauli_matrix()).amax() < 1e-8);
    }
}
