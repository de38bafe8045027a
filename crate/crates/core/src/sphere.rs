//! Minimisation of functions on the unit sphere of ℝ³.
//!
//! Two independent routes are provided. [`minimize_quadratic`] solves
//! `min_{‖n‖=1} nᵀQn + 2bᵀn` exactly through the secular equation of the
//! Lagrange condition `(Q − τ)n = −b`, and is what the positivity and
//! divisibility certificates use. [`lattice_minimize`] scans a Fibonacci lattice
//! and refines the best point by projected gradient descent; it works for any
//! smooth objective and serves as a cross-check.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

/// Default number of lattice points.
pub const LATTICE_POINTS: usize = 2048;
/// Default number of projected-gradient refinement steps.
pub const REFINE_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMin {
    pub value: f64,
    pub argmin: Vector3<f64>,
}

fn quad_value(q: &Matrix3<f64>, b: &Vector3<f64>, n: &Vector3<f64>) -> f64 {
    n.dot(&(q * n)) + 2.0 * b.dot(n)
}

/// Exact `min_{‖n‖=1} nᵀQn + 2bᵀn` for symmetric `Q`.
pub fn minimize_quadratic(q: &Matrix3<f64>, b: &Vector3<f64>) -> SphereMin {
    let sym = (q + q.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs: Vec<Vector3<f64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let bh: Vec<f64> = vecs.iter().map(|u| u.dot(b)).collect();

    let q_min = vals[0];
    let scale = vals.iter().map(|v| v.abs()).fold(b.norm(), f64::max).max(1e-300);
    let deg_tol = 1e-12 * scale;
    let bnorm = b.norm();

    let lowest: Vec<usize> = (0..3).filter(|&i| vals[i] - q_min <= deg_tol).collect();
    let weight_low: f64 = lowest.iter().map(|&i| bh[i] * bh[i]).sum::<f64>().sqrt();

    let solve_shift = |s: f64| -> Vector3<f64> {
        // n = −Σ b̂_i / (q_i − τ) u_i with τ = q_min − s
        (0..3)
            .map(|i| {
                let denom = vals[i] - q_min + s;
                if denom <= 0.0 {
                    Vector3::zeros()
                } else {
                    vecs[i] * (-bh[i] / denom)
                }
            })
            .sum()
    };

    let mut candidate = if bnorm <= 1e-300 {
        vecs[0]
    } else if weight_low <= 1e-13 * scale {
        // hard case: try τ = q_min with a free component along the lowest eigenspace
        let partial: Vector3<f64> = (0..3)
            .filter(|i| !lowest.contains(i))
            .map(|i| vecs[i] * (-bh[i] / (vals[i] - q_min)))
            .sum();
        let pn = partial.norm_squared();
        if pn <= 1.0 {
            partial + vecs[lowest[0]] * (1.0 - pn).sqrt()
        } else {
            bisect_shift(&solve_shift, bnorm)
        }
    } else {
        bisect_shift(&solve_shift, bnorm)
    };
    let norm = candidate.norm();
    if norm > 0.0 {
        candidate /= norm;
    } else {
        candidate = vecs[0];
    }

    let mut best = SphereMin { value: quad_value(q, b, &candidate), argmin: candidate };
    for u in vecs.iter().take(1) {
        for cand in [*u, -*u] {
            let v = quad_value(q, b, &cand);
            if v < best.value {
                best = SphereMin { value: v, argmin: cand };
            }
        }
    }
    best
}

/// Root of `‖n(s)‖² = 1` for `s ∈ (0, ‖b‖]`, where `‖n(s)‖` decreases in `s`.
fn bisect_shift(solve: &impl Fn(f64) -> Vector3<f64>, bnorm: f64) -> Vector3<f64> {
    let (mut lo, mut hi) = (0.0_f64, bnorm);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if solve(mid).norm_squared() > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    solve(hi)
}

/// Exact `max_{‖n‖=1} nᵀQn + 2bᵀn`.
pub fn maximize_quadratic(q: &Matrix3<f64>, b: &Vector3<f64>) -> SphereMin {
    let m = minimize_quadratic(&-q, &-b);
    SphereMin { value: -m.value, argmin: m.argmin }
}

/// Fibonacci lattice of `count` nearly uniform points on the unit sphere.
pub fn fibonacci_lattice(count: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Lattice scan followed by `steps` projected-gradient steps from the best
/// lattice point. `lipschitz` bounds the gradient's Lipschitz constant and
/// sets the step size.
pub fn lattice_minimize<F, G>(f: F, grad: G, points: usize, steps: usize, lipschitz: f64) -> SphereMin
where
    F: Fn(&Vector3<f64>) -> f64,
    G: Fn(&Vector3<f64>) -> Vector3<f64>,
{
    let mut best = fibonacci_lattice(points)
        .into_iter()
        .map(|n| SphereMin { value: f(&n), argmin: n })
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("lattice is non-empty");
    let step = 1.0 / lipschitz.max(1e-12);
    for _ in 0..steps {
        let n = best.argmin;
        let g = grad(&n);
        let tangent = g - n * n.dot(&g);
        let trial = (n - tangent * step).normalize();
        let value = f(&trial);
        if value < best.value {
            best = SphereMin { value, argmin: trial };
        } else {
            break;
        }
    }
    best
}

/// [`lattice_minimize`] specialised to a quadratic objective.
pub fn lattice_minimize_quadratic(q: &Matrix3<f64>, b: &Vector3<f64>, points: usize, steps: usize) -> SphereMin {
    let sym = (q + q.transpose()) * 0.5;
    let lip = 2.0 * (sym.norm() + b.norm());
    lattice_minimize(
        |n| quad_value(&sym, b, n),
        |n| (sym * n + b) * 2.0,
        points,
        steps,
        lip,
    )
}
