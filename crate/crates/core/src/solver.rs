//! Inversion of the ψ_λ coordinates: recover edge lengths from a target
//! point by damped Newton iteration in log-length variables.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::paths::EnumerationOptions;
use crate::polytope::{build_polytope, PolytopeSystem, Verdict, DEFAULT_MEMBERSHIP_TOL};
use crate::psi::{
    cosh_power, forward_map, hexagon_geometries, Lambda, Metric, PsiError, PsiVector,
};
use crate::triangulation::IdealTriangulation;

/// Step for central finite differences on lengths.
pub const FD_STEP: f64 = 1e-6;
/// Entrywise relative agreement required in [`JacobianMode::CrossCheck`].
pub const CROSS_CHECK_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("target is {verdict} the polytope ({violated} violated, {active} active)")]
    NotInPolytope {
        verdict: &'static str,
        violated: usize,
        active: usize,
    },
    #[error("no convergence after {} iterations, residual {:.3e}", .0.iterations, .0.final_residual)]
    NoConvergence(Box<SolveReport>),
    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("Jacobian entry ({row}, {col}): analytic {analytic} vs finite difference {numeric}")]
    JacobianMismatch {
        row: usize,
        col: usize,
        analytic: f64,
        numeric: f64,
    },
    #[error("target has {got} values, complex has {expected} edges")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Psi(#[from] PsiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianMode {
    #[default]
    Analytic,
    FiniteDifference,
    /// Analytic, verified against finite differences at every iteration.
    CrossCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Bound on `‖Ψ(l) - z‖_∞` for convergence.
    pub residual_tolerance: f64,
    /// Bound on the `∞`-norm of each log-length update.
    pub step_cap: f64,
    pub backtracking_limit: usize,
    pub jacobian_mode: JacobianMode,
    /// Skip the membership precondition when false.
    pub require_membership: bool,
    pub membership_tolerance: f64,
    /// Starting point; all lengths 1 when absent.
    pub initial: Option<Metric>,
    pub enumeration: EnumerationOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            residual_tolerance: 1e-10,
            step_cap: 1.0,
            backtracking_limit: 40,
            jacobian_mode: JacobianMode::Analytic,
            require_membership: true,
            membership_tolerance: DEFAULT_MEMBERSHIP_TOL,
            initial: None,
            enumeration: EnumerationOptions::default(),
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<(), SolveError> {
        if self.max_iterations == 0 || self.backtracking_limit == 0 {
            return Err(SolveError::InvalidOptions(
                "iteration limits must be positive",
            ));
        }
        if !(self.residual_tolerance > 0.0 && self.step_cap > 0.0) {
            return Err(SolveError::InvalidOptions(
                "tolerance and step cap must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    /// `‖Ψ(l) - z‖_∞` before the step.
    pub residual: f64,
    /// `‖Ψ(l) - z‖_2` before the step; strictly decreases across the trace.
    pub merit: f64,
    /// `∞`-norm of the accepted log-length update.
    pub step: f64,
    pub backtracks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    #[serde(rename = "lengths")]
    pub metric: Metric,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

/// `∂ψ(e)/∂l(e')` as an `|E| × |E|` matrix.
///
/// Each occurrence of `e` in a hexagon contributes `cosh^λ(r)·∂r/∂l` for the
/// r-coordinate facing `e`; entries vanish unless `e` and `e'` share a hexagon.
pub fn jacobian(
    complex: &IdealTriangulation,
    metric: &Metric,
    lambda: Lambda,
) -> Result<DMatrix<f64>, PsiError> {
    let geometries = hexagon_geometries(complex, metric)?;
    let m = complex.edge_count();
    let mut jac = DMatrix::zeros(m, m);
    for (h, geom) in geometries.iter().enumerate() {
        let dr = geom.r_jacobian();
        let edges = complex.hexagon_edges(h);
        for (slot, &e) in edges.iter().enumerate() {
            let weight = cosh_power(lambda, geom.r[slot]);
            for (col, &f) in edges.iter().enumerate() {
                jac[(e, f)] += weight * dr[slot][col];
            }
        }
    }
    Ok(jac)
}

/// Central differences of [`forward_map`] in the lengths.
pub fn jacobian_finite_difference(
    complex: &IdealTriangulation,
    metric: &Metric,
    lambda: Lambda,
    step: f64,
) -> Result<DMatrix<f64>, PsiError> {
    let m = complex.edge_count();
    let mut jac = DMatrix::zeros(m, m);
    let base = metric.lengths();
    for col in 0..m {
        let h = step.min(0.5 * base[col]);
        let mut plus = base.to_vec();
        let mut minus = base.to_vec();
        plus[col] += h;
        minus[col] -= h;
        let fp = forward_map(complex, &Metric::new(plus)?, lambda)?;
        let fm = forward_map(complex, &Metric::new(minus)?, lambda)?;
        for row in 0..m {
            jac[(row, col)] = (fp.0[row] - fm.0[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Largest entrywise relative disagreement, `|a - b| / max(|a|, |b|)`,
/// ignoring entries that are zero in both.
pub fn relative_discrepancy(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (f64, (usize, usize)) {
    let mut worst = (0.0, (0, 0));
    for row in 0..a.nrows() {
        for col in 0..a.ncols() {
            let (x, y) = (a[(row, col)], b[(row, col)]);
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                continue;
            }
            let rel = (x - y).abs() / scale;
            if rel > worst.0 {
                worst = (rel, (row, col));
            }
        }
    }
    worst
}

fn jacobian_for_mode(
    complex: &IdealTriangulation,
    metric: &Metric,
    lambda: Lambda,
    mode: JacobianMode,
) -> Result<DMatrix<f64>, SolveError> {
    match mode {
        JacobianMode::Analytic => Ok(jacobian(complex, metric, lambda)?),
        JacobianMode::FiniteDifference => Ok(jacobian_finite_difference(
            complex, metric, lambda, FD_STEP,
        )?),
        JacobianMode::CrossCheck => {
            let analytic = jacobian(complex, metric, lambda)?;
            let numeric = jacobian_finite_difference(complex, metric, lambda, FD_STEP)?;
            let (rel, (row, col)) = relative_discrepancy(&analytic, &numeric);
            if rel > CROSS_CHECK_TOL {
                return Err(SolveError::JacobianMismatch {
                    row,
                    col,
                    analytic: analytic[(row, col)],
                    numeric: numeric[(row, col)],
                });
            }
            Ok(analytic)
        }
    }
}

fn norm_inf(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn metric_from_log(u: &DVector<f64>) -> Result<Metric, PsiError> {
    Metric::new(u.iter().map(|x| x.exp()).collect())
}

/// Find lengths whose invariant is `target`, after confirming that `target`
/// lies strictly inside the polytope (unless the options waive it).
pub fn invert(
    complex: &IdealTriangulation,
    target: &PsiVector,
    lambda: Lambda,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    if opts.require_membership {
        let system = build_polytope(complex, lambda, &opts.enumeration);
        invert_within(complex, &system, target, lambda, opts)
    } else {
        newton(complex, target, lambda, opts)
    }
}

/// As [`invert`], with a prebuilt system for the membership check.
pub fn invert_within(
    complex: &IdealTriangulation,
    system: &PolytopeSystem,
    target: &PsiVector,
    lambda: Lambda,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    if target.len() != complex.edge_count() {
        return Err(SolveError::DimensionMismatch {
            expected: complex.edge_count(),
            got: target.len(),
        });
    }
    if opts.require_membership {
        let membership = system
            .check_membership(target, opts.membership_tolerance)
            .expect("dimension checked above");
        if membership.verdict != Verdict::Inside {
            return Err(SolveError::NotInPolytope {
                verdict: membership.verdict.as_str(),
                violated: membership.violated.len(),
                active: membership.active.len(),
            });
        }
    }
    newton(complex, target, lambda, opts)
}

fn newton(
    complex: &IdealTriangulation,
    target: &PsiVector,
    lambda: Lambda,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    opts.validate()?;
    let m = complex.edge_count();
    if target.len() != m {
        return Err(SolveError::DimensionMismatch {
            expected: m,
            got: target.len(),
        });
    }
    let z = DVector::from_column_slice(target.values());
    let mut u = match &opts.initial {
        Some(init) if init.len() == m => {
            DVector::from_iterator(m, init.lengths().iter().map(|l| l.ln()))
        }
        Some(init) => {
            return Err(SolveError::DimensionMismatch {
                expected: m,
                got: init.len(),
            })
        }
        None => DVector::zeros(m),
    };
    let residual_at = |u: &DVector<f64>| -> Result<DVector<f64>, SolveError> {
        let psi = forward_map(complex, &metric_from_log(u)?, lambda)?;
        Ok(DVector::from_vec(psi.0) - &z)
    };

    let mut g = residual_at(&u)?;
    let mut trace = Vec::new();
    let mut perturbed = false;
    let mut iteration = 0;
    let report = |u: &DVector<f64>, g: &DVector<f64>, trace: Vec<IterationRecord>, it: usize| {
        let final_residual = norm_inf(g);
        Ok::<_, PsiError>(SolveReport {
            metric: metric_from_log(u)?,
            iterations: it,
            final_residual,
            converged: final_residual < opts.residual_tolerance,
            trace,
        })
    };

    loop {
        let residual = norm_inf(&g);
        if residual < opts.residual_tolerance {
            return Ok(report(&u, &g, trace, iteration)?);
        }
        if iteration >= opts.max_iterations {
            return Err(SolveError::NoConvergence(Box::new(report(
                &u, &g, trace, iteration,
            )?)));
        }

        let metric = metric_from_log(&u)?;
        let mut jac = jacobian_for_mode(complex, &metric, lambda, opts.jacobian_mode)?;
        // chain rule for l = exp(u)
        for (col, l) in metric.lengths().iter().enumerate() {
            jac.column_mut(col).scale_mut(*l);
        }
        let direction = jac
            .lu()
            .solve(&(-&g))
            .filter(|d| d.iter().all(|x| x.is_finite()));
        let Some(mut direction) = direction else {
            if perturbed {
                return Err(SolveError::SingularJacobian { iteration });
            }
            perturbed = true;
            for (i, x) in u.iter_mut().enumerate() {
                *x += if i % 2 == 0 { 1e-3 } else { -1e-3 };
            }
            g = residual_at(&u)?;
            continue;
        };
        let size = norm_inf(&direction);
        if size > opts.step_cap {
            direction *= opts.step_cap / size;
        }

        let merit = g.norm();
        let mut t = 1.0;
        let mut accepted = None;
        for backtracks in 0..opts.backtracking_limit {
            let trial = &u + &direction * t;
            let g_trial = residual_at(&trial)?;
            if g_trial.norm() < merit {
                accepted = Some((trial, g_trial, backtracks));
                break;
            }
            t *= 0.5;
        }
        let Some((next, g_next, backtracks)) = accepted else {
            return Err(SolveError::NoConvergence(Box::new(report(
                &u, &g, trace, iteration,
            )?)));
        };
        trace.push(IterationRecord {
            residual,
            merit,
            step: norm_inf(&direction) * t,
            backtracks,
        });
        u = next;
        g = g_next;
        iteration += 1;
    }
}
