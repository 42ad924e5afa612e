//! Moving a ball-covering witness from a non-smooth point to nearby smooth
//! points.
//!
//! If `y` has a witness ball on the ray through `x`, then along any sequence
//! of smooth points `x_n → x` some `x_{n₀}` also carries a witness for `y`.
//! In `ℓ∞^d` the points `(1, 1−1/n, …, 1−1/n) → (1, …, 1)` are such a
//! sequence: a unique active coordinate makes each term smooth.

use serde::Serialize;

use crate::derivatives::{is_smooth, rho_analytic};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{Family, Space};
use crate::vector::Vector;
use crate::witness::{positive_witness, Witness, WitnessOutcome};

pub const DEFAULT_N_MAX: usize = 10_000;

/// `u_n = (1, 1−1/n, …, 1−1/n) ∈ ℝ^d`.
pub fn linf_shrink_sequence<S: Scalar>(d: usize, n: usize) -> Result<Vector<S>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sequence index starts at 1".into()));
    }
    let t = S::one() - S::one() / S::lit(n as f64);
    let mut u = vec![t; d];
    u[0] = S::one();
    Vector::new(u)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SmoothingSequence<S> {
    /// For `x ∈ ℓ∞^d`: keep the first coordinate with `|x_j| = ‖x‖∞` and
    /// scale every other coordinate by `1 − 1/n`. At `x = 𝟙` this is
    /// [`linf_shrink_sequence`].
    LinfShrink,
    /// Explicit terms `x_1, x_2, …`.
    CustomList(Vec<Vector<S>>),
}

impl<S: Scalar> SmoothingSequence<S> {
    pub fn label(&self) -> &'static str {
        match self {
            SmoothingSequence::LinfShrink => "linf_shrink",
            SmoothingSequence::CustomList(_) => "custom_list",
        }
    }

    /// Term `n` (1-based) of the sequence approaching `x`, or `None` past the
    /// end of a custom list.
    pub fn term(&self, space: &Space<S>, x: &Vector<S>, n: usize) -> Result<Option<Vector<S>>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sequence index starts at 1".into()));
        }
        match self {
            SmoothingSequence::LinfShrink => {
                if !matches!(space.family(), Family::Inf) {
                    return Err(Error::UnsupportedFamily("the linf_shrink sequence needs an linf space"));
                }
                let nx = space.norm(x)?;
                if nx.is_zero() {
                    return Err(Error::ZeroVector { what: "x" });
                }
                let xs = x.as_slice();
                let keep = xs.iter().position(|c| c.abs() == nx).expect("norm is attained");
                let t = S::one() - S::one() / S::lit(n as f64);
                let v = xs.iter().enumerate().map(|(j, &c)| if j == keep { c } else { c * t }).collect();
                Ok(Some(Vector::new(v)?))
            }
            SmoothingSequence::CustomList(terms) => {
                let Some(t) = terms.get(n - 1) else { return Ok(None) };
                space.check(t)?;
                Ok(Some(t.clone()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct Transfer<S> {
    pub n0: usize,
    pub point: Vector<S>,
    /// `ρ'₋(x_{n₀}, y)`.
    pub rho_minus: S,
    pub witness: Witness<S>,
}

/// Scans `n = 1..=n_max` for the first smooth term `x_n` with
/// `ρ'₋(x_n, y) > tol` and returns its witness.
pub fn transfer_witness<S: Scalar>(
    space: &Space<S>,
    x: &Vector<S>,
    y: &Vector<S>,
    seq: &SmoothingSequence<S>,
    n_max: usize,
) -> Result<Transfer<S>> {
    if !positive_witness(space, x, y)?.is_found() {
        let rho = rho_analytic(space, x, y)?.rho_minus;
        return Err(Error::HypothesisViolated(format!("y has no witness ball on the ray through x (rho_minus = {rho})")));
    }
    let tol = space.tol().analytic;
    for n in 1..=n_max {
        let Some(xn) = seq.term(space, x, n)? else {
            break;
        };
        if !is_smooth(space, &xn)?.smooth {
            return Err(match seq {
                SmoothingSequence::LinfShrink => Error::Inconsistency(format!("linf_shrink term {n} is not smooth")),
                SmoothingSequence::CustomList(_) => Error::InvalidArgument(format!("sequence term {n} is not smooth")),
            });
        }
        let rho_minus = rho_analytic(space, &xn, y)?.rho_minus;
        if rho_minus <= tol {
            continue;
        }
        return match positive_witness(space, &xn, y)? {
            WitnessOutcome::Found(witness) => Ok(Transfer { n0: n, point: xn, rho_minus, witness }),
            WitnessOutcome::Absent(_) => {
                Err(Error::Inconsistency(format!("rho_minus = {rho_minus} at term {n} but no witness was found")))
            }
        };
    }
    Err(Error::NotFoundWithin { n_max })
}
