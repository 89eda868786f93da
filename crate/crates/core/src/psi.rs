//! The integral `F_λ(x) = ∫_0^x cosh^λ(t) dt`, its total mass `M_λ`, and the
//! per-edge invariant `ψ_λ(e) = F_λ(r) + F_λ(r')` built from the
//! r-coordinates of the two A-arcs facing `e`.

use std::f64::consts::{FRAC_PI_2, LN_10, LN_2};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexagon::{HexGeometry, HexagonError};
use crate::quadrature::integrate;
use crate::special::ln_cosh;
use crate::triangulation::IdealTriangulation;

/// Absolute tolerance for every quadrature of `cosh^λ`.
pub const QUADRATURE_ABS_TOL: f64 = 1e-12;
/// Relative floor so that large values (λ > 0) terminate at rounding level.
pub const QUADRATURE_REL_TOL: f64 = 5e-14;
/// Tail beyond the truncation point is below this.
pub const TAIL_BOUND: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsiError {
    #[error("lambda must be finite, got {0}")]
    NonFiniteLambda(f64),
    #[error("F_λ(±∞) diverges for λ = {0} >= 0")]
    InfiniteArgumentWithNonnegativeLambda(f64),
    #[error("argument is NaN")]
    NanArgument,
    #[error("edge {0} is not in the complex")]
    UnknownEdge(usize),
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("edge {edge}: length {value} is not positive and finite")]
    InvalidLength { edge: usize, value: f64 },
    #[error(transparent)]
    Hexagon(#[from] HexagonError),
}

/// The exponent λ.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Lambda(f64);

impl Lambda {
    pub fn new(value: f64) -> Result<Self, PsiError> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(PsiError::NonFiniteLambda(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `M_λ` is finite exactly when λ < 0.
    pub fn has_finite_mass(self) -> bool {
        self.0 < 0.0
    }

    fn closed_form(self) -> Option<ClosedForm> {
        Some(match self.0 {
            0.0 => ClosedForm::Zero,
            1.0 => ClosedForm::One,
            2.0 => ClosedForm::Two,
            -1.0 => ClosedForm::MinusOne,
            -2.0 => ClosedForm::MinusTwo,
            _ => return None,
        })
    }

    /// Point beyond which the analytic tail bound `2^{-λ} e^{λT} / (-λ)`
    /// falls below [`TAIL_BOUND`], moved out to `ln(4|λ|)/2` when needed so
    /// the tail series stays well conditioned. Only meaningful for λ < 0.
    pub fn truncation_point(self) -> f64 {
        let mu = -self.0;
        let bound = (mu * LN_2 - mu.ln() - TAIL_BOUND.log10() * LN_10) / mu;
        bound.max(0.5 * (4.0 * mu).ln())
    }
}

impl TryFrom<f64> for Lambda {
    type Error = PsiError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Lambda::new(v)
    }
}

impl From<Lambda> for f64 {
    fn from(l: Lambda) -> f64 {
        l.0
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy)]
enum ClosedForm {
    Zero,
    One,
    Two,
    MinusOne,
    MinusTwo,
}

impl ClosedForm {
    fn eval(self, x: f64) -> f64 {
        match self {
            ClosedForm::Zero => x,
            ClosedForm::One => x.sinh(),
            ClosedForm::Two => 0.5 * (x + 0.5 * (2.0 * x).sinh()),
            ClosedForm::MinusOne => x.sinh().atan(),
            ClosedForm::MinusTwo => x.tanh(),
        }
    }
}

/// `cosh^λ(t)`, evaluated as `exp(λ ln cosh t)`.
pub fn cosh_power(lambda: Lambda, t: f64) -> f64 {
    (lambda.0 * ln_cosh(t)).exp()
}

/// `∫_x^∞ cosh^λ` for λ < 0 and `x >= ln 2`, from the binomial series of
/// `(1 + e^{-2t})^λ`.
fn tail(lambda: Lambda, x: f64) -> f64 {
    let mu = -lambda.0;
    let q = (-2.0 * x).exp();
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            coeff *= (-mu - kf + 1.0) / kf;
            power *= q;
        }
        let term = coeff * power / (mu + 2.0 * kf);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    (mu * LN_2 - mu * x).exp() * sum
}

fn quad_segment(lambda: Lambda, x: f64) -> f64 {
    integrate(
        |t| cosh_power(lambda, t),
        0.0,
        x,
        &[1.0],
        QUADRATURE_ABS_TOL,
        QUADRATURE_REL_TOL,
    )
    .value
}

/// `M_λ = ∫_0^∞ cosh^λ` by quadrature up to the truncation point plus the
/// series tail. `+∞` for λ >= 0.
pub fn mass(lambda: Lambda) -> f64 {
    if !lambda.has_finite_mass() {
        return f64::INFINITY;
    }
    let t = lambda.truncation_point();
    quad_segment(lambda, t) + tail(lambda, t)
}

/// `M_λ = 2^{-λ-2} B(-λ/2, -λ/2)`; an independent route for cross-checking.
pub fn mass_beta(lambda: Lambda) -> f64 {
    if !lambda.has_finite_mass() {
        return f64::INFINITY;
    }
    let mu = -lambda.0;
    ((mu - 2.0) * LN_2 + statrs::function::beta::ln_beta(0.5 * mu, 0.5 * mu)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub quadrature: f64,
    pub beta: f64,
}

impl MassEstimate {
    pub fn relative_gap(&self) -> f64 {
        if self.quadrature.is_infinite() && self.beta.is_infinite() {
            return 0.0;
        }
        (self.quadrature - self.beta).abs() / self.beta.abs()
    }
}

pub fn mass_both(lambda: Lambda) -> MassEstimate {
    MassEstimate {
        quadrature: mass(lambda),
        beta: mass_beta(lambda),
    }
}

/// `F_λ(x)` by quadrature only, bypassing closed forms.
pub fn cosh_power_integral_quadrature(lambda: Lambda, x: f64) -> Result<f64, PsiError> {
    if x.is_nan() {
        return Err(PsiError::NanArgument);
    }
    let sign = x.signum();
    let ax = x.abs();
    if lambda.has_finite_mass() {
        let t = lambda.truncation_point();
        if ax > t {
            let rest = if ax.is_infinite() {
                0.0
            } else {
                tail(lambda, ax)
            };
            return Ok(sign * (mass(lambda) - rest));
        }
    } else if ax.is_infinite() {
        return Err(PsiError::InfiniteArgumentWithNonnegativeLambda(lambda.0));
    }
    Ok(sign * quad_segment(lambda, ax))
}

/// `F_λ(x) = ∫_0^x cosh^λ(t) dt`, using closed forms for λ ∈ {-2,-1,0,1,2}.
pub fn cosh_power_integral(lambda: Lambda, x: f64) -> Result<f64, PsiError> {
    if x.is_nan() {
        return Err(PsiError::NanArgument);
    }
    match lambda.closed_form() {
        Some(cf) => {
            if x.is_infinite() {
                return match cf {
                    ClosedForm::MinusOne => Ok(x.signum() * FRAC_PI_2),
                    ClosedForm::MinusTwo => Ok(x.signum()),
                    _ => Err(PsiError::InfiniteArgumentWithNonnegativeLambda(lambda.0)),
                };
            }
            Ok(cf.eval(x))
        }
        None => cosh_power_integral_quadrature(lambda, x),
    }
}

/// `F_λ(a + x) + F_λ(a - x)` for `a >= 0`.
///
/// When `|x| > a` this is `∫_{|x|-a}^{|x|+a} cosh^λ`, integrated directly so
/// that two nearly saturated values of `F_λ` never cancel.
pub fn pair_sum(lambda: Lambda, a: f64, x: f64) -> Result<f64, PsiError> {
    if a.is_nan() || x.is_nan() {
        return Err(PsiError::NanArgument);
    }
    let ax = x.abs();
    if ax <= a {
        return Ok(cosh_power_integral(lambda, a + ax)? + cosh_power_integral(lambda, a - ax)?);
    }
    Ok(integrate(
        |t| cosh_power(lambda, t),
        ax - a,
        ax + a,
        &[1.0],
        QUADRATURE_ABS_TOL,
        QUADRATURE_REL_TOL,
    )
    .value)
}

/// Edge lengths indexed by edge number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Metric(Vec<f64>);

impl Metric {
    pub fn new(lengths: Vec<f64>) -> Result<Self, PsiError> {
        for (edge, &value) in lengths.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(PsiError::InvalidLength { edge, value });
            }
        }
        Ok(Self(lengths))
    }

    pub fn uniform(edge_count: usize, length: f64) -> Result<Self, PsiError> {
        Self::new(vec![length; edge_count])
    }

    pub fn lengths(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    fn check_dimension(&self, complex: &IdealTriangulation) -> Result<(), PsiError> {
        if self.0.len() != complex.edge_count() {
            return Err(PsiError::DimensionMismatch {
                expected: complex.edge_count(),
                got: self.0.len(),
            });
        }
        Ok(())
    }

    /// Side lengths of one hexagon, in slot order.
    pub fn hexagon_lengths(&self, complex: &IdealTriangulation, hexagon: usize) -> [f64; 3] {
        complex.hexagon_edges(hexagon).map(|e| self.0[e])
    }
}

impl TryFrom<Vec<f64>> for Metric {
    type Error = PsiError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Metric::new(v)
    }
}

impl From<Metric> for Vec<f64> {
    fn from(m: Metric) -> Self {
        m.0
    }
}

/// A point of `R^E`: either ψ values or a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PsiVector(pub Vec<f64>);

impl PsiVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Geometry of every hexagon under `metric`.
pub fn hexagon_geometries(
    complex: &IdealTriangulation,
    metric: &Metric,
) -> Result<Vec<HexGeometry>, PsiError> {
    metric.check_dimension(complex)?;
    (0..complex.hexagon_count())
        .map(|h| {
            Ok(HexGeometry::from_lengths(
                metric.hexagon_lengths(complex, h),
            )?)
        })
        .collect()
}

fn edge_value(
    complex: &IdealTriangulation,
    geometries: &[HexGeometry],
    lambda: Lambda,
    e: usize,
) -> Result<f64, PsiError> {
    let edge = complex.edge(e).ok_or(PsiError::UnknownEdge(e))?;
    edge.ends.iter().try_fold(0.0, |acc, end| {
        Ok(acc + cosh_power_integral(lambda, geometries[end.hexagon].r[end.slot])?)
    })
}

pub fn psi_edge(
    complex: &IdealTriangulation,
    metric: &Metric,
    lambda: Lambda,
    e: usize,
) -> Result<f64, PsiError> {
    if e >= complex.edge_count() {
        return Err(PsiError::UnknownEdge(e));
    }
    let geometries = hexagon_geometries(complex, metric)?;
    edge_value(complex, &geometries, lambda, e)
}

pub fn forward_map(
    complex: &IdealTriangulation,
    metric: &Metric,
    lambda: Lambda,
) -> Result<PsiVector, PsiError> {
    let geometries = hexagon_geometries(complex, metric)?;
    (0..complex.edge_count())
        .map(|e| edge_value(complex, &geometries, lambda, e))
        .collect::<Result<_, _>>()
        .map(PsiVector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{build_complex, samples};

    fn lam(v: f64) -> Lambda {
        Lambda::new(v).unwrap()
    }

    #[test]
    fn lambda_rejects_non_finite() {
        assert!(Lambda::new(f64::NAN).is_err());
        assert!(Lambda::new(f64::INFINITY).is_err());
    }

    #[test]
    fn zero_exponent_is_identity() {
        for x in [-3.0, 0.0, 0.25, 17.0] {
            assert_eq!(cosh_power_integral(lam(0.0), x).unwrap(), x);
            assert!((cosh_power_integral_quadrature(lam(0.0), x).unwrap() - x).abs() < 1e-13);
        }
    }

    #[test]
    fn minus_two_is_tanh() {
        let x = 0.852_458;
        let closed = cosh_power_integral(lam(-2.0), x).unwrap();
        let quad = cosh_power_integral_quadrature(lam(-2.0), x).unwrap();
        assert!((closed - 0.692_35).abs() < 1e-5);
        assert!((closed - quad).abs() < 1e-13);
    }

    #[test]
    fn odd_in_x() {
        for l in [-3.7, -0.5, 0.3, 1.5] {
            for x in [0.1, 1.0, 4.2, 30.0] {
                let p = cosh_power_integral(lam(l), x).unwrap();
                let m = cosh_power_integral(lam(l), -x).unwrap();
                assert_eq!(p, -m);
            }
        }
    }

    #[test]
    fn infinite_arguments() {
        assert_eq!(cosh_power_integral(lam(-2.0), f64::INFINITY).unwrap(), 1.0);
        assert_eq!(
            cosh_power_integral(lam(-1.0), f64::NEG_INFINITY).unwrap(),
            -FRAC_PI_2
        );
        let m = mass(lam(-3.0));
        assert_eq!(cosh_power_integral(lam(-3.0), f64::INFINITY).unwrap(), m);
        assert_eq!(
            cosh_power_integral(lam(0.5), f64::INFINITY),
            Err(PsiError::InfiniteArgumentWithNonnegativeLambda(0.5))
        );
        assert!(cosh_power_integral(lam(0.0), f64::NEG_INFINITY).is_err());
        assert_eq!(
            cosh_power_integral(lam(1.0), f64::NAN),
            Err(PsiError::NanArgument)
        );
    }

    #[test]
    fn masses() {
        assert!((mass(lam(-2.0)) - 1.0).abs() < 1e-12);
        assert!((mass(lam(-1.0)) - FRAC_PI_2).abs() < 1e-12);
        // ∫ sech^4 = tanh - tanh^3/3
        let m4 = mass_both(lam(-4.0));
        assert!((m4.quadrature - 2.0 / 3.0).abs() < 1e-12);
        assert!((m4.beta - 2.0 / 3.0).abs() < 1e-12);
        assert!(mass(lam(0.0)).is_infinite());
        assert!(mass_beta(lam(2.0)).is_infinite());
    }

    #[test]
    fn tail_series_matches_quadrature() {
        let l = lam(-1.3);
        let x = 2.0;
        let direct =
            integrate(|t| cosh_power(l, t), x, 60.0, &[], 1e-15, 0.0).value + tail(l, 60.0);
        assert!((tail(l, x) - direct).abs() < 1e-13);
    }

    #[test]
    fn continuous_across_truncation_point() {
        let l = lam(-3.0);
        let t = l.truncation_point();
        let below = cosh_power_integral(l, t * (1.0 - 1e-12)).unwrap();
        let above = cosh_power_integral(l, t * (1.0 + 1e-12)).unwrap();
        assert!((below - above).abs() < 1e-13);
    }

    #[test]
    fn pair_sum_agrees_with_direct_sum() {
        for (l, a, x) in [
            (-2.5, 0.3, 1.2),
            (1.5, 2.0, -0.5),
            (-0.5, 1.0, -4.0),
            (0.0, 0.5, 3.0),
        ] {
            let direct = cosh_power_integral(lam(l), a + x).unwrap()
                + cosh_power_integral(lam(l), a - x).unwrap();
            assert!((pair_sum(lam(l), a, x).unwrap() - direct).abs() < 1e-12);
        }
        // the direct sum cancels to zero here; the integral does not
        assert!(pair_sum(lam(-5.0), 0.01, 20.0).unwrap() > 0.0);
    }

    #[test]
    fn unit_metric_on_pants() {
        let c = build_complex(&samples::pair_of_pants()).unwrap();
        let m = Metric::uniform(3, 1.0).unwrap();
        let psi0 = forward_map(&c, &m, lam(0.0)).unwrap();
        for v in psi0.values() {
            assert!((v - 1.704_912_832_358_014).abs() < 1e-12);
        }
        let psi2 = forward_map(&c, &m, lam(-2.0)).unwrap();
        for v in psi2.values() {
            assert!((v - 1.384_701_161_561_142_6).abs() < 1e-12);
        }
    }

    #[test]
    fn short_edge_pushes_to_edge_bound() {
        let c = build_complex(&samples::pair_of_pants()).unwrap();
        let m = Metric::new(vec![1e-6, 1.0, 1.0]).unwrap();
        let v = psi_edge(&c, &m, lam(-2.0), 0).unwrap();
        assert!(v > 1.99 && v < 2.0);
    }

    #[test]
    fn self_glued_edge_uses_both_slots() {
        let c = build_complex(&samples::self_glued_pair()).unwrap();
        let m = Metric::new(vec![0.7, 1.1, 2.3]).unwrap();
        let g = HexGeometry::from_lengths(m.hexagon_lengths(&c, 0)).unwrap();
        let expected = g.r[0] + g.r[1];
        let v = psi_edge(&c, &m, lam(0.0), 0).unwrap();
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        let c = build_complex(&samples::pair_of_pants()).unwrap();
        let m = Metric::uniform(3, 1.0).unwrap();
        assert_eq!(psi_edge(&c, &m, lam(0.0), 3), Err(PsiError::UnknownEdge(3)));
        let short = Metric::uniform(2, 1.0).unwrap();
        assert_eq!(
            forward_map(&c, &short, lam(0.0)),
            Err(PsiError::DimensionMismatch {
                expected: 3,
                got: 2
            })
        );
        assert_eq!(
            Metric::new(vec![1.0, -2.0]),
            Err(PsiError::InvalidLength {
                edge: 1,
                value: -2.0
            })
        );
    }
}
