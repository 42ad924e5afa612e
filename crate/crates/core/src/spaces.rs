//! Finite-dimensional normed spaces: the lp family and polyhedral max-norms.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Scalar, Tolerances};
use crate::vector::{dot, euclidean, Functional, Vector};

/// The exponent of an lp norm. Infinity is a distinct token, never a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> Serialize for Exponent<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(p.as_f64()),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Exponent<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tok(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent::Finite(S::lit(p))),
            Raw::Tok(t) if t == "inf" => Ok(Exponent::Infinity),
            Raw::Tok(t) => Err(de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

/// Which norm a space carries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub enum NormSpec<S> {
    Lp { p: Exponent<S> },
    /// `‖x‖ = max_i |⟨f_i, x⟩|`.
    Polyhedral { functionals: Vec<Functional<S>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    ZeroDimension,
    ExponentBelowOne(String),
    ExponentNotFinite,
    NoFunctionals,
    FunctionalLength { index: usize, len: usize, dim: usize },
    NonFiniteFunctional { index: usize },
    NotSpanning { rank: usize, dim: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "dimension must be at least 1"),
            Violation::ExponentBelowOne(p) => write!(f, "exponent p = {p} is below 1"),
            Violation::ExponentNotFinite => write!(f, "finite exponent must be a finite number; use \"inf\""),
            Violation::NoFunctionals => write!(f, "polyhedral norm needs at least one functional"),
            Violation::FunctionalLength { index, len, dim } => {
                write!(f, "functional {index} has length {len}, space dimension is {dim}")
            }
            Violation::NonFiniteFunctional { index } => write!(f, "functional {index} has a non-finite entry"),
            Violation::NotSpanning { rank, dim } => {
                write!(f, "functionals do not span (rank {rank} < {dim}); formula is only a seminorm")
            }
        }
    }
}

/// Outcome of [`validate_space`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every invariant of a `(dim, spec)` pair, collecting all violations.
pub fn validate_space<S: Scalar>(dim: usize, spec: &NormSpec<S>) -> ValidationReport {
    let mut violations = Vec::new();
    if dim == 0 {
        violations.push(Violation::ZeroDimension);
    }
    match spec {
        NormSpec::Lp { p: Exponent::Finite(p) } => {
            if !p.is_finite() {
                violations.push(Violation::ExponentNotFinite);
            } else if *p < S::one() {
                violations.push(Violation::ExponentBelowOne(p.to_string()));
            }
        }
        NormSpec::Lp { p: Exponent::Infinity } => {}
        NormSpec::Polyhedral { functionals } => {
            if functionals.is_empty() {
                violations.push(Violation::NoFunctionals);
            }
            let mut shapes_ok = true;
            for (index, f) in functionals.iter().enumerate() {
                if f.dim() != dim {
                    shapes_ok = false;
                    violations.push(Violation::FunctionalLength { index, len: f.dim(), dim });
                }
                if f.as_slice().iter().any(|c| !c.is_finite()) {
                    shapes_ok = false;
                    violations.push(Violation::NonFiniteFunctional { index });
                }
            }
            if shapes_ok && dim > 0 && !functionals.is_empty() {
                let rows: Vec<_> = functionals.iter().map(|f| f.to_f64s()).collect();
                let rank = linalg::rank(&rows, dim);
                if rank < dim {
                    violations.push(Violation::NotSpanning { rank, dim });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Borrowed view of a space's norm, with `p = 1` split out of the finite case.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Family<'a, S> {
    One,
    P(S),
    Inf,
    Poly(&'a [Functional<S>]),
}

#[derive(Deserialize, Serialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
struct RawSpace<S> {
    dim: usize,
    norm: NormSpec<S>,
}

/// A validated finite-dimensional real normed space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace<S>", into = "RawSpace<S>")]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Space<S> {
    dim: usize,
    norm: NormSpec<S>,
    tol: Tolerances<S>,
}

impl<S: Scalar> TryFrom<RawSpace<S>> for Space<S> {
    type Error = Error;
    fn try_from(raw: RawSpace<S>) -> Result<Self> {
        Space::new(raw.dim, raw.norm)
    }
}

impl<S: Scalar> From<Space<S>> for RawSpace<S> {
    fn from(s: Space<S>) -> Self {
        RawSpace { dim: s.dim, norm: s.norm }
    }
}

impl<S: Scalar> Space<S> {
    pub fn new(dim: usize, norm: NormSpec<S>) -> Result<Self> {
        let report = validate_space(dim, &norm);
        if !report.is_valid() {
            return Err(Error::InvalidSpace(report));
        }
        Ok(Self { dim, norm, tol: Tolerances::default() })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, NormSpec::Lp { p: Exponent::Finite(S::lit(p)) })
    }

    pub fn linf(dim: usize) -> Result<Self> {
        Self::new(dim, NormSpec::Lp { p: Exponent::Infinity })
    }

    pub fn polyhedral(dim: usize, functionals: &[&[f64]]) -> Result<Self> {
        let functionals = functionals
            .iter()
            .map(|f| Functional::from_f64s(f))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, NormSpec::Polyhedral { functionals })
    }

    pub fn with_tolerances(mut self, tol: Tolerances<S>) -> Self {
        self.tol = tol;
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &NormSpec<S> {
        &self.norm
    }

    #[inline]
    pub fn tol(&self) -> &Tolerances<S> {
        &self.tol
    }

    pub fn validate(&self) -> ValidationReport {
        validate_space(self.dim, &self.norm)
    }

    pub(crate) fn family(&self) -> Family<'_, S> {
        match &self.norm {
            NormSpec::Lp { p: Exponent::Infinity } => Family::Inf,
            NormSpec::Lp { p: Exponent::Finite(p) } if *p == S::one() => Family::One,
            NormSpec::Lp { p: Exponent::Finite(p) } => Family::P(*p),
            NormSpec::Polyhedral { functionals } => Family::Poly(functionals),
        }
    }

    /// True for the strictly convex, smooth members (lp with 1 < p < ∞).
    pub fn is_smooth_family(&self) -> bool {
        matches!(self.family(), Family::P(_))
    }

    /// Short human label such as `l2`, `linf` or `polyhedral(3)`.
    pub fn label(&self) -> String {
        match self.family() {
            Family::One => "l1".into(),
            Family::P(p) => format!("l{p}"),
            Family::Inf => "linf".into(),
            Family::Poly(f) => format!("polyhedral({})", f.len()),
        }
    }

    pub(crate) fn check(&self, x: &Vector<S>) -> Result<()> {
        x.check_dim(self.dim)
    }

    /// `‖x‖`.
    pub fn norm(&self, x: &Vector<S>) -> Result<S> {
        self.check(x)?;
        Ok(self.norm_raw(x.as_slice()))
    }

    pub(crate) fn norm_raw(&self, x: &[S]) -> S {
        match self.family() {
            Family::One => x.iter().map(|c| c.abs()).sum(),
            Family::Inf => max_abs(x),
            Family::P(p) => {
                let m = max_abs(x);
                if m.is_zero() {
                    return m;
                }
                m * x.iter().map(|&c| (c.abs() / m).powf(p)).sum::<S>().powf(p.recip())
            }
            Family::Poly(fs) => fs.iter().fold(S::zero(), |m, f| m.max(dot(f.as_slice(), x).abs())),
        }
    }

    /// `‖x + t·y‖ − ‖x‖` for `nx = norm_raw(x) > 0`, rearranged so the
    /// subtraction never cancels: coordinates (or functional values) whose
    /// sign survives the step contribute their increment directly, and the
    /// `ℓp` power sum goes through `ln_1p`/`exp_m1`.
    pub(crate) fn norm_step(&self, x: &[S], y: &[S], t: S, nx: S) -> S {
        // |a + d| − |a| without cancellation when the sign of a survives.
        let abs_step = |a: S, d: S| {
            if !a.is_zero() && d.abs() <= a.abs() {
                if a > S::zero() {
                    d
                } else {
                    -d
                }
            } else {
                (a + d).abs() - a.abs()
            }
        };
        match self.family() {
            Family::One => x.iter().zip(y).map(|(&a, &b)| abs_step(a, t * b)).sum(),
            Family::Inf => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| (a.abs() - nx) + abs_step(a, t * b))
                .fold(S::neg_infinity(), S::max),
            Family::Poly(fs) => fs
                .iter()
                .map(|f| {
                    let a = dot(f.as_slice(), x);
                    (a.abs() - nx) + abs_step(a, t * dot(f.as_slice(), y))
                })
                .fold(S::neg_infinity(), S::max),
            Family::P(p) => {
                // With u = x/‖x‖ and D = Σ (|u_i + t v_i|^p − |u_i|^p):
                // ‖x + t y‖ − ‖x‖ = ‖x‖·((1 + D)^(1/p) − 1).
                let half = S::lit(0.5);
                let d: S = x
                    .iter()
                    .zip(y)
                    .map(|(&a, &b)| {
                        let (u, v) = (a / nx, b / nx);
                        let r = t * v / u;
                        if !u.is_zero() && r.abs() < half {
                            u.abs().powf(p) * (p * r.ln_1p()).exp_m1()
                        } else {
                            (u + t * v).abs().powf(p) - u.abs().powf(p)
                        }
                    })
                    .sum();
                nx * (d.ln_1p() / p).exp_m1()
            }
        }
    }

    /// Rounding bound for [`norm_step`](Self::norm_step) at step `t`. Only
    /// polyhedral norms pick up a term independent of `t`, from the rounding
    /// of the dot products `f(x)`.
    pub(crate) fn norm_step_allowance(&self, x: &[S], t: S, nx: S, ny: S) -> S {
        let unit = S::lit(64.0 * self.dim as f64) * S::epsilon();
        let fixed = match self.family() {
            Family::Poly(fs) => fs
                .iter()
                .map(|f| f.as_slice().iter().zip(x).fold(S::zero(), |acc, (&a, &b)| acc + (a * b).abs()))
                .fold(nx, S::max),
            _ => S::zero(),
        };
        unit * (t.abs() * ny + fixed)
    }

    /// Norm of `a - b` without allocating.
    pub(crate) fn dist_raw(&self, a: &[S], b: &[S], scratch: &mut [S]) -> S {
        for ((s, &u), &v) in scratch.iter_mut().zip(a).zip(b) {
            *s = u - v;
        }
        self.norm_raw(scratch)
    }

    pub fn dist(&self, a: &Vector<S>, b: &Vector<S>) -> Result<S> {
        self.check(a)?;
        self.check(b)?;
        let mut scratch = vec![S::zero(); self.dim];
        Ok(self.dist_raw(a.as_slice(), b.as_slice(), &mut scratch))
    }

    /// `‖f‖_* = sup { f(x) : ‖x‖ ≤ 1 }`. The polyhedral case solves a linear
    /// program over the facet description of the unit ball.
    pub fn dual_norm(&self, f: &Functional<S>) -> Result<S> {
        f.check_dim(self.dim)?;
        let c = f.as_slice();
        Ok(match self.family() {
            Family::One => max_abs(c),
            Family::Inf => c.iter().map(|v| v.abs()).sum(),
            Family::P(p) => {
                let q = p / (p - S::one());
                let m = max_abs(c);
                if m.is_zero() {
                    m
                } else {
                    m * c.iter().map(|&v| (v.abs() / m).powf(q)).sum::<S>().powf(q.recip())
                }
            }
            Family::Poly(fs) => {
                if f.is_zero() {
                    return Ok(S::zero());
                }
                let gens: Vec<_> = fs.iter().map(|g| g.to_f64s()).collect();
                S::lit(linalg::polyhedral_dual_norm(&gens, &f.to_f64s())?.0)
            }
        })
    }

    /// Certified `(c1, c2)` with `c1·‖x‖₂ ≤ ‖x‖ ≤ c2·‖x‖₂`.
    pub fn equivalence_constants(&self) -> (S, S) {
        let n = S::from_usize(self.dim).expect("dimension fits scalar");
        let half = S::lit(0.5);
        match self.family() {
            Family::One => (S::one(), n.sqrt()),
            Family::Inf => (n.sqrt().recip(), S::one()),
            Family::P(p) => {
                let e = n.powf(p.recip() - half);
                if p >= S::lit(2.0) {
                    (e, S::one())
                } else {
                    (S::one(), e)
                }
            }
            Family::Poly(fs) => {
                let rows: Vec<_> = fs.iter().map(|f| f.to_f64s()).collect();
                let smin = linalg::singular_values(&rows, self.dim).last().copied().unwrap_or(0.0);
                let m = S::from_usize(fs.len()).expect("count fits scalar");
                let c2 = fs.iter().fold(S::zero(), |a, f| a.max(f.euclidean()));
                (S::lit(smin) / m.sqrt(), c2)
            }
        }
    }

    /// `(L, A)` with `‖c‖ ≥ L` whenever `‖c‖∞ = 1`, and `‖v‖ ≤ A·‖v‖∞` for
    /// every `v` with at least one zero coordinate. Drives the cube-face net.
    pub(crate) fn cube_constants(&self) -> (S, S) {
        let n1 = S::from_usize(self.dim.saturating_sub(1).max(1)).expect("dimension fits scalar");
        match self.family() {
            Family::One => (S::one(), n1),
            Family::Inf => (S::one(), S::one()),
            Family::P(p) => (S::one(), n1.powf(p.recip())),
            Family::Poly(fs) => {
                let (c1, _) = self.equivalence_constants();
                let a = fs
                    .iter()
                    .fold(S::zero(), |m, f| m.max(f.as_slice().iter().map(|c| c.abs()).sum()));
                (c1, a)
            }
        }
    }
}

#[inline]
pub(crate) fn max_abs<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |m, c| m.max(c.abs()))
}

/// Euclidean length, re-exported for callers converting between norms.
pub fn euclidean_norm<S: Scalar>(x: &Vector<S>) -> S {
    euclidean(x.as_slice())
}
