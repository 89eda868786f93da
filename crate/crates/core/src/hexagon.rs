//! Trigonometry of colored right-angled hyperbolic hexagons.
//!
//! A hexagon is described by its three red side lengths `l`, the three
//! black sides (A-arcs) `theta`, with `theta[i]` opposite `l[i]`, and the
//! r-coordinates `r[i] = (theta[j] + theta[k] - theta[i]) / 2`.
//!
//! The two directions of the cosine law have the same shape,
//!
//! ```text
//! cosh y_j = (cosh x_j + cosh x_i cosh x_k) / (sinh x_i sinh x_k)
//! ```
//!
//! so both are served by [`opposite_side`], which evaluates the excess
//! `cosh y_j - 1 = (cosh x_j + cosh(x_i - x_k)) / (sinh x_i sinh x_k)` in
//! log space. This stays accurate when `y_j` is tiny and when the `x` are
//! large enough for `cosh` to overflow.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::special::{arccosh_one_plus, ln_add_exp, ln_cosh, ln_sinh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HexagonError {
    #[error("side {index} has non-positive length {value}")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("side {index} is not finite")]
    NonFiniteInput { index: usize },
    #[error("r-triple {0:?} has a pair with non-positive sum")]
    InvalidRTriple([f64; 3]),
    #[error("unknown degeneration scenario `{0}`")]
    UnknownScenario(String),
    #[error("degeneration grid must be positive and strictly increasing")]
    InvalidGrid,
}

/// Indices of the two other sides, in cyclic order.
#[inline]
pub(crate) fn others(j: usize) -> (usize, usize) {
    ((j + 1) % 3, (j + 2) % 3)
}

fn validate_positive(x: &[f64; 3]) -> Result<(), HexagonError> {
    for (index, &value) in x.iter().enumerate() {
        if !value.is_finite() {
            return Err(HexagonError::NonFiniteInput { index });
        }
        if value <= 0.0 {
            return Err(HexagonError::NonPositiveLength { index, value });
        }
    }
    Ok(())
}

/// Side opposite `x[j]` in the dual triple, from the hexagon cosine law.
pub fn opposite_side(x: &[f64; 3], j: usize) -> f64 {
    let (i, k) = others(j);
    let ln_num = ln_add_exp(ln_cosh(x[j]), ln_cosh(x[i] - x[k]));
    let ln_excess = ln_num - ln_sinh(x[i]) - ln_sinh(x[k]);
    arccosh_one_plus(ln_excess)
}

/// A-arc lengths from red side lengths.
pub fn theta_from_lengths(l: [f64; 3]) -> Result<[f64; 3], HexagonError> {
    validate_positive(&l)?;
    Ok([0, 1, 2].map(|j| opposite_side(&l, j)))
}

/// Red side lengths from A-arc lengths (the dual cosine law).
pub fn lengths_from_theta(theta: [f64; 3]) -> Result<[f64; 3], HexagonError> {
    validate_positive(&theta)?;
    Ok([0, 1, 2].map(|i| opposite_side(&theta, i)))
}

pub fn r_from_theta(theta: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| {
        let (j, k) = others(i);
        0.5 * (theta[j] + theta[k] - theta[i])
    })
}

pub fn theta_from_r(r: [f64; 3]) -> Result<[f64; 3], HexagonError> {
    if r.iter().any(|v| !v.is_finite()) {
        return Err(HexagonError::InvalidRTriple(r));
    }
    let theta = [0, 1, 2].map(|i| {
        let (j, k) = others(i);
        r[j] + r[k]
    });
    if theta.iter().any(|&t| t <= 0.0) {
        return Err(HexagonError::InvalidRTriple(r));
    }
    Ok(theta)
}

/// Full geometry of one colored right-angled hexagon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexGeometry {
    pub l: [f64; 3],
    pub theta: [f64; 3],
    pub r: [f64; 3],
}

impl HexGeometry {
    pub fn from_lengths(l: [f64; 3]) -> Result<Self, HexagonError> {
        let theta = theta_from_lengths(l)?;
        Ok(Self {
            l,
            theta,
            r: r_from_theta(theta),
        })
    }

    pub fn from_theta(theta: [f64; 3]) -> Result<Self, HexagonError> {
        let l = lengths_from_theta(theta)?;
        Ok(Self {
            l,
            theta,
            r: r_from_theta(theta),
        })
    }

    /// `d theta[row] / d l[col]`.
    ///
    /// Implicit differentiation of the cosine law gives
    /// `d theta_j = A_j (dl_j - cosh theta_k dl_i - cosh theta_i dl_k)` with
    /// `A_j = sinh l_j / (sinh l_i sinh l_k sinh theta_j)`.
    pub fn theta_jacobian(&self) -> [[f64; 3]; 3] {
        let mut jac = [[0.0; 3]; 3];
        for (j, row) in jac.iter_mut().enumerate() {
            let (i, k) = others(j);
            let ln_a = ln_sinh(self.l[j])
                - ln_sinh(self.l[i])
                - ln_sinh(self.l[k])
                - ln_sinh(self.theta[j]);
            row[j] = ln_a.exp();
            row[i] = -(ln_a + ln_cosh(self.theta[k])).exp();
            row[k] = -(ln_a + ln_cosh(self.theta[i])).exp();
        }
        jac
    }

    /// `d r[row] / d l[col]`.
    pub fn r_jacobian(&self) -> [[f64; 3]; 3] {
        let dt = self.theta_jacobian();
        let mut jac = [[0.0; 3]; 3];
        for i in 0..3 {
            let (j, k) = others(i);
            for c in 0..3 {
                jac[i][c] = 0.5 * (dt[j][c] + dt[k][c] - dt[i][c]);
            }
        }
        jac
    }
}

/// Largest violation of the tangent law over the three sides, in the
/// normalized form `|tanh^2(l_i/2) - cosh r_j cosh r_k / (cosh r_i cosh(r_i+r_j+r_k))|`.
///
/// Both terms lie in `(0, 1)`, so the residual is meaningful across the
/// whole range where the unnormalized products overflow or lose precision.
pub fn tangent_law_residual(geom: &HexGeometry) -> f64 {
    let r = geom.r;
    let s = r[0] + r[1] + r[2];
    (0..3)
        .map(|i| {
            let (j, k) = others(i);
            let lhs = (0.5 * geom.l[i]).tanh().powi(2);
            let rhs = (ln_cosh(r[j]) + ln_cosh(r[k]) - ln_cosh(r[i]) - ln_cosh(s)).exp();
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// One-parameter families of degenerating hexagons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// `l = (1/t, f1, f2)`
    IToZero,
    /// `l = (t, f1, f2)`
    OneToInf,
    /// `l = (t, t, f)`
    TwoToInf,
    /// `l = (t, t, t)`
    ThreeToInf,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::IToZero,
        Scenario::OneToInf,
        Scenario::TwoToInf,
        Scenario::ThreeToInf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::IToZero => "i_to_zero",
            Scenario::OneToInf => "one_to_inf",
            Scenario::TwoToInf => "two_to_inf",
            Scenario::ThreeToInf => "three_to_inf",
        }
    }

    /// Red side lengths at parameter `t`. Missing fixed values default to 1.
    pub fn lengths(self, t: f64, fixed: &[f64]) -> [f64; 3] {
        let f = |i: usize| fixed.get(i).copied().unwrap_or(1.0);
        match self {
            Scenario::IToZero => [1.0 / t, f(0), f(1)],
            Scenario::OneToInf => [t, f(0), f(1)],
            Scenario::TwoToInf => [t, t, f(0)],
            Scenario::ThreeToInf => [t, t, t],
        }
    }
}

impl FromStr for Scenario {
    type Err = HexagonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| HexagonError::UnknownScenario(s.to_string()))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerationRow {
    pub t: f64,
    pub geometry: HexGeometry,
}

pub fn degeneration_table(
    scenario: Scenario,
    grid: &[f64],
    fixed: &[f64],
) -> Result<Vec<DegenerationRow>, HexagonError> {
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    if grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) || !increasing {
        return Err(HexagonError::InvalidGrid);
    }
    grid.iter()
        .map(|&t| {
            Ok(DegenerationRow {
                t,
                geometry: HexGeometry::from_lengths(scenario.lengths(t, fixed))?,
            })
        })
        .collect()
}
