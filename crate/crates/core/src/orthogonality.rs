//! Birkhoff-James orthogonality and the positive/negative/orthogonal
//! trichotomy for pairs of vectors.

use serde::Serialize;

use crate::derivatives::{rho_analytic, DerivativePair, Method};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::search::golden_section;
use crate::spaces::Space;
use crate::vector::Vector;

/// Golden-section iterations used by [`bj_bruteforce_oracle`].
pub const ORACLE_ITERATIONS: usize = 200;

/// `x ⊥_B y`, decided from `ρ'₋(x,y) ≤ tol` and `ρ'₊(x,y) ≥ −tol`.
pub fn bj_orthogonal<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<bool> {
    let r = rho_analytic(space, x, y)?;
    let tol = space.tol().analytic;
    Ok(r.rho_minus <= tol && r.rho_plus >= -tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BjOracle<S> {
    pub orthogonal: bool,
    /// Smallest `‖x + λ·y‖` found.
    pub h_min: S,
    pub argmin: S,
}

/// Decides `‖x + λ·y‖ ≥ ‖x‖` for all `λ` by direct minimization.
///
/// `h(λ) = ‖x + λy‖` is convex and `h(λ) ≥ |λ|·‖y‖ − ‖x‖`, so any minimizer
/// satisfies `|λ| ≤ 2‖x‖/‖y‖`; the search runs on `[−4‖x‖/‖y‖, 4‖x‖/‖y‖]`.
/// The search minimizes `h(λ) − ‖x‖` evaluated without cancellation, and a
/// dip counts only if it exceeds the rounding bound of that evaluation.
pub fn bj_bruteforce_oracle<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<BjOracle<S>> {
    let nx = space.norm(x)?;
    let ny = space.norm(y)?;
    if nx.is_zero() {
        return Err(Error::ZeroVector { what: "x" });
    }
    if ny.is_zero() {
        return Err(Error::ZeroVector { what: "y" });
    }
    let bound = S::lit(4.0) * nx / ny;
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let step = |lambda: S| space.norm_step(xs, ys, lambda, nx);
    let mut best = golden_section(step, -bound, bound, ORACLE_ITERATIONS);
    if best.value > S::zero() {
        best.value = S::zero();
        best.arg = S::zero();
    }
    let allowance = space.norm_step_allowance(xs, best.arg, nx, ny);
    Ok(BjOracle { orthogonal: best.value >= -allowance, h_min: nx + best.value, argmin: best.arg })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairTag {
    /// `ρ'₋(x,y) > 0`: some ball on the positive ray through `x` holds `y`.
    PositiveSide,
    /// `ρ'₊(x,y) < 0`: some ball on the negative ray holds `y`.
    NegativeSide,
    BjOrthogonal,
    /// A finite-difference sign decision fell inside its error band.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairClass<S> {
    pub tag: PairTag,
    pub rho: DerivativePair<S>,
}

/// Sorts a derivative pair into the trichotomy. At most one side can be
/// reported since `ρ'₋ ≤ ρ'₊`.
pub fn classify_derivatives<S: Scalar>(rho: DerivativePair<S>, tol: S) -> PairClass<S> {
    if rho.method == Method::FiniteDifference {
        let band = rho.error_bound;
        if (rho.rho_minus - tol).abs() <= band || (rho.rho_plus + tol).abs() <= band {
            return PairClass { tag: PairTag::Inconclusive, rho };
        }
    }
    let tag = if rho.rho_minus > tol {
        PairTag::PositiveSide
    } else if rho.rho_plus < -tol {
        PairTag::NegativeSide
    } else {
        PairTag::BjOrthogonal
    };
    PairClass { tag, rho }
}

pub fn classify_pair<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<PairClass<S>> {
    if space.norm(y)?.is_zero() {
        return Err(Error::ZeroVector { what: "y" });
    }
    let rho = rho_analytic(space, x, y)?;
    Ok(classify_derivatives(rho, space.tol().analytic))
}
