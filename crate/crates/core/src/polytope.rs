//! Linear inequalities cutting out the image of the ψ_λ coordinates, and
//! membership tests against them.
//!
//! Three families, all over `z ∈ R^E`:
//!
//! * edge bounds `z(e) < 2 M_λ` (λ < 0 only),
//! * path inequalities `Σ z(e_i) > -2 M_λ` over fundamental edge paths (λ < 0 only),
//! * cycle inequalities `Σ z(e_i) > 0` over fundamental edge cycles.
//!
//! Coefficient vectors are edge multiplicities, so they do not depend on λ;
//! only the right-hand sides scale with `M_λ`.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::format::sig12;
use crate::paths::{
    enumerate_fundamental_cycles_with, enumerate_fundamental_paths_with, EdgePath, Enumeration,
    EnumerationOptions,
};
use crate::psi::{mass, Lambda, PsiVector};
use crate::triangulation::IdealTriangulation;

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolytopeError {
    #[error("point has {got} coordinates, system has {expected} edges")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sense {
    Greater,
    Less,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Greater => ">",
            Sense::Less => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    EdgeBound(usize),
    Path(EdgePath),
    Cycle(EdgePath),
}

impl Origin {
    fn class(&self) -> u8 {
        match self {
            Origin::EdgeBound(_) => 0,
            Origin::Path(_) => 1,
            Origin::Cycle(_) => 2,
        }
    }

    fn label(&self) -> String {
        match self {
            Origin::EdgeBound(e) => format!("edge_bound e{e}"),
            Origin::Path(p) => format!("path {p}"),
            Origin::Cycle(p) => format!("cycle {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coefficients: Vec<u8>,
    pub sense: Sense,
    pub rhs: f64,
    pub origin: Origin,
}

impl LinearInequality {
    pub fn lhs(&self, z: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(z)
            .map(|(&c, &v)| c as f64 * v)
            .sum()
    }

    /// Positive when the (strict) inequality holds.
    /// `c0 c1 ... <sense> <rhs> # <origin>`, as written by
    /// [`PolytopeSystem::export_hrep`].
    pub fn hrep_line(&self) -> String {
        let mut out = String::new();
        for c in &self.coefficients {
            write!(out, "{c} ").unwrap();
        }
        write!(
            out,
            "{} {} # {}",
            self.sense.symbol(),
            sig12(self.rhs),
            self.origin.label()
        )
        .unwrap();
        out
    }

    pub fn slack(&self, z: &[f64]) -> f64 {
        match self.sense {
            Sense::Greater => self.lhs(z) - self.rhs,
            Sense::Less => self.rhs - self.lhs(z),
        }
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|&c| (c as f64).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Signed Euclidean distance from `z` to the bounding hyperplane.
    pub fn margin(&self, z: &[f64]) -> f64 {
        self.slack(z) / self.norm()
    }

    fn sort_key(&self) -> (u8, &[u8], Sense) {
        (self.origin.class(), &self.coefficients, self.sense)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeSystem {
    /// `None` when the system was read back from text.
    pub lambda: Option<Lambda>,
    pub edge_count: usize,
    pub inequalities: Vec<LinearInequality>,
    pub truncated: bool,
}

pub fn build_polytope(
    complex: &IdealTriangulation,
    lambda: Lambda,
    opts: &EnumerationOptions,
) -> PolytopeSystem {
    let cycles = enumerate_fundamental_cycles_with(complex, opts);
    let paths = if lambda.has_finite_mass() {
        Some(enumerate_fundamental_paths_with(complex, opts))
    } else {
        None
    };
    PolytopeSystem::from_enumerations(complex.edge_count(), lambda, paths.as_ref(), &cycles)
}

impl PolytopeSystem {
    /// Assemble a system from enumerations computed once and reused across λ.
    /// `paths` may be `None` when λ >= 0.
    pub fn from_enumerations(
        edge_count: usize,
        lambda: Lambda,
        paths: Option<&Enumeration>,
        cycles: &Enumeration,
    ) -> Self {
        let mut inequalities = Vec::new();
        let mut truncated = cycles.truncated;
        if lambda.has_finite_mass() {
            let m = mass(lambda);
            for e in 0..edge_count {
                let mut coefficients = vec![0; edge_count];
                coefficients[e] = 1;
                inequalities.push(LinearInequality {
                    coefficients,
                    sense: Sense::Less,
                    rhs: 2.0 * m,
                    origin: Origin::EdgeBound(e),
                });
            }
            let paths = paths.expect("path enumeration is required when λ < 0");
            truncated |= paths.truncated;
            for p in &paths.items {
                inequalities.push(LinearInequality {
                    coefficients: p.multiplicities(edge_count),
                    sense: Sense::Greater,
                    rhs: -2.0 * m,
                    origin: Origin::Path(p.clone()),
                });
            }
        }
        for p in &cycles.items {
            inequalities.push(LinearInequality {
                coefficients: p.multiplicities(edge_count),
                sense: Sense::Greater,
                rhs: 0.0,
                origin: Origin::Cycle(p.clone()),
            });
        }
        let mut system = Self {
            lambda: Some(lambda),
            edge_count,
            inequalities,
            truncated,
        };
        system.canonicalize();
        system
    }

    fn canonicalize(&mut self) {
        self.inequalities
            .sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut seen = HashSet::new();
        self.inequalities
            .retain(|q| seen.insert((q.coefficients.clone(), q.sense, q.rhs.to_bits())));
    }

    pub fn count(&self, class: fn(&Origin) -> bool) -> usize {
        self.inequalities
            .iter()
            .filter(|q| class(&q.origin))
            .count()
    }

    /// Drops every inequality that is an integer multiple of another one
    /// with the same sense (coefficients and right-hand side both scaled).
    pub fn minimize(&self) -> Self {
        let keys: HashSet<(Vec<u8>, Sense, u64)> = self
            .inequalities
            .iter()
            .map(|q| (q.coefficients.clone(), q.sense, q.rhs.to_bits()))
            .collect();
        // Multiplicities are at most 2, so 2 is the only possible factor.
        let is_scaled = |q: &LinearInequality| {
            q.coefficients.iter().all(|&c| c % 2 == 0)
                && keys.contains(&(
                    q.coefficients.iter().map(|&c| c / 2).collect(),
                    q.sense,
                    (q.rhs / 2.0).to_bits(),
                ))
        };
        let inequalities = self
            .inequalities
            .iter()
            .filter(|q| !is_scaled(q))
            .cloned()
            .collect();
        Self {
            inequalities,
            ..self.clone()
        }
    }

    pub fn check_membership(&self, z: &PsiVector, tol: f64) -> Result<Membership, PolytopeError> {
        if z.len() != self.edge_count {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.edge_count,
                got: z.len(),
            });
        }
        let mut violated = Vec::new();
        let mut active = Vec::new();
        let mut min_margin = f64::INFINITY;
        for (i, q) in self.inequalities.iter().enumerate() {
            let m = q.margin(z.values());
            min_margin = min_margin.min(m);
            if m < -tol {
                violated.push(i);
            } else if m <= tol {
                active.push(i);
            }
        }
        let verdict = if !violated.is_empty() {
            Verdict::Outside
        } else if !active.is_empty() {
            Verdict::Boundary
        } else {
            Verdict::Inside
        };
        Ok(Membership {
            verdict,
            incomplete_certificate: self.truncated && verdict != Verdict::Outside,
            violated,
            active,
            min_margin,
        })
    }

    /// One line per inequality: `c0 c1 ... <sense> <rhs> # <origin>`.
    /// A truncated system starts with the comment line `# truncated`.
    pub fn export_hrep(&self) -> String {
        let mut out = String::new();
        if self.truncated {
            out.push_str("# truncated\n");
        }
        for q in &self.inequalities {
            writeln!(out, "{}", q.hrep_line()).unwrap();
        }
        out
    }

    pub fn parse_hrep(text: &str) -> Result<Self, PolytopeError> {
        let mut inequalities = Vec::new();
        let mut truncated = false;
        let mut edge_count = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| PolytopeError::Parse { line, message };
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if comment.trim() == "truncated" {
                    truncated = true;
                }
                continue;
            }
            let (body, origin) = trimmed
                .split_once('#')
                .ok_or_else(|| err("missing `# origin`".into()))?;
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.len() < 3 {
                return Err(err("too few fields".into()));
            }
            let (coef_tokens, tail) = tokens.split_at(tokens.len() - 2);
            let coefficients = coef_tokens
                .iter()
                .map(|t| {
                    t.parse::<u8>()
                        .map_err(|e| err(format!("coefficient `{t}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let sense = match tail[0] {
                ">" => Sense::Greater,
                "<" => Sense::Less,
                s => return Err(err(format!("unknown sense `{s}`"))),
            };
            let rhs: f64 = tail[1]
                .parse()
                .map_err(|e| err(format!("rhs `{}`: {e}", tail[1])))?;
            match edge_count {
                None => edge_count = Some(coefficients.len()),
                Some(m) if m != coefficients.len() => {
                    return Err(err(format!("expected {m} coefficients")));
                }
                _ => {}
            }
            let origin = parse_origin(origin.trim()).map_err(err)?;
            inequalities.push(LinearInequality {
                coefficients,
                sense,
                rhs,
                origin,
            });
        }
        Ok(Self {
            lambda: None,
            edge_count: edge_count.unwrap_or(0),
            inequalities,
            truncated,
        })
    }
}

fn parse_index(token: &str, prefix: char) -> Result<usize, String> {
    token
        .strip_prefix(prefix)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("expected `{prefix}<n>`, got `{token}`"))
}

fn parse_origin(text: &str) -> Result<Origin, String> {
    let mut words = text.split_whitespace();
    let kind = words.next().ok_or("empty origin")?;
    let rest: Vec<&str> = words.collect();
    match kind {
        "edge_bound" => match rest.as_slice() {
            [e] => Ok(Origin::EdgeBound(parse_index(e, 'e')?)),
            _ => Err("edge_bound takes one edge".into()),
        },
        "path" | "cycle" => {
            if rest.len().is_multiple_of(2) {
                return Err("witness must alternate hexagons and edges".into());
            }
            let mut hexagons = Vec::new();
            let mut edges = Vec::new();
            for (i, tok) in rest.iter().enumerate() {
                if i % 2 == 0 {
                    hexagons.push(parse_index(tok, 'H')?);
                } else {
                    edges.push(parse_index(tok, 'e')?);
                }
            }
            let p = EdgePath { hexagons, edges };
            Ok(if kind == "path" {
                Origin::Path(p)
            } else {
                Origin::Cycle(p)
            })
        }
        other => Err(format!("unknown origin `{other}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Inside,
    Boundary,
    Outside,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Inside => "inside",
            Verdict::Boundary => "boundary",
            Verdict::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub verdict: Verdict,
    /// Enumeration was truncated and the verdict is not `outside`, so a
    /// missing inequality could still change it.
    pub incomplete_certificate: bool,
    /// Indices into the system's inequalities with margin below `-tol`.
    pub violated: Vec<usize>,
    /// Indices with margin in `[-tol, tol]`.
    pub active: Vec<usize>,
    pub min_margin: f64,
}
