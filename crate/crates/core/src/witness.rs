//! Local ball-covering: is there a ball centred on the ray through `x` that
//! contains `y` but not the origin?
//!
//! The decision runs on the gap `g(λ) = ‖λx − y‖ − |λ|·‖x‖`. A ball
//! `B(λx, r)` with `‖λx − y‖ < r ≤ |λ|·‖x‖` exists exactly when `g(λ) < 0`.
//! For `λ > 0`, `g` is convex with `g(0) = ‖y‖` and
//! `g(λ) → −ρ'₋(x, y)/‖x‖` as `λ → ∞`, hence nonincreasing, so doubling
//! probes find a negative value whenever `ρ'₋(x, y) > 0` and certify absence
//! otherwise.

use serde::Serialize;

use crate::derivatives::rho_raw;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::Space;
use crate::vector::Vector;

/// Largest doubling exponent probed.
pub const MAX_DOUBLINGS: i32 = 60;

/// A certified ball `B(λx, radius)` containing `y` and excluding 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness<S> {
    pub lambda: S,
    pub radius: S,
    /// `radius − ‖λx − y‖`.
    pub margin: S,
}

impl<S: Scalar> Witness<S> {
    /// Re-evaluates `‖λx − y‖ < radius ≤ |λ|·‖x‖` from scratch.
    pub fn verify(&self, space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<bool> {
        let d = gap_distance(space, x, y, self.lambda)?;
        let reach = self.lambda.abs() * space.norm(x)?;
        Ok(self.margin > S::zero() && d < self.radius && self.radius <= reach)
    }
}

/// Certified absence of a witness on one side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Absence<S> {
    /// `ρ'₋(x, y)` for the positive side, `ρ'₊(x, y)` for the negative side.
    pub rho: S,
    /// Stabilized value of the gap along the probe sequence.
    pub gap_limit: S,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum WitnessOutcome<S> {
    Found(Witness<S>),
    Absent(Absence<S>),
}

impl<S: Scalar> WitnessOutcome<S> {
    pub fn witness(&self) -> Option<&Witness<S>> {
        match self {
            WitnessOutcome::Found(w) => Some(w),
            WitnessOutcome::Absent(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.witness().is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

fn gap_distance<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>, lambda: S) -> Result<S> {
    space.check(x)?;
    space.check(y)?;
    let v: Vec<S> = x.as_slice().iter().zip(y.as_slice()).map(|(&a, &b)| lambda * a - b).collect();
    Ok(space.norm_raw(&v))
}

/// `g(λ) = ‖λx − y‖ − |λ|·‖x‖`.
pub fn gap<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>, lambda: S) -> Result<S> {
    let nx = space.norm(x)?;
    if nx.is_zero() {
        return Err(Error::ZeroVector { what: "x" });
    }
    Ok(gap_distance(space, x, y, lambda)? - lambda.abs() * nx)
}

/// Samples of `g` along `λ_k = 2^k·‖y‖/‖x‖`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapProfile<S> {
    pub samples: Vec<(S, S)>,
    /// Approximates `−ρ'₋(x, y)/‖x‖`.
    pub limit_estimate: S,
}

/// Probes `g` until successive samples differ by less than
/// `1e−7·max(1, ‖y‖)` or the doubling budget runs out.
pub fn gap_profile<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<GapProfile<S>> {
    let nx = nonzero(space, x, "x")?;
    let ny = nonzero(space, y, "y")?;
    let stop = S::lit(1e-7) * S::one().max(ny);
    let mut scratch = vec![S::zero(); space.dim()];
    let mut samples: Vec<(S, S)> = Vec::new();
    let mut lambda = ny / nx;
    for _ in 0..=MAX_DOUBLINGS {
        let g = raw_gap(space, x.as_slice(), y.as_slice(), lambda, nx, &mut scratch);
        let settled = samples.last().is_some_and(|&(_, prev): &(S, S)| (g - prev).abs() < stop);
        samples.push((lambda, g));
        if settled {
            break;
        }
        lambda = lambda + lambda;
    }
    let limit_estimate = samples.last().expect("at least one sample").1;
    Ok(GapProfile { samples, limit_estimate })
}

fn nonzero<S: Scalar>(space: &Space<S>, v: &Vector<S>, what: &'static str) -> Result<S> {
    let n = space.norm(v)?;
    if n.is_zero() {
        return Err(Error::ZeroVector { what });
    }
    Ok(n)
}

#[inline]
pub(crate) fn raw_gap<S: Scalar>(space: &Space<S>, x: &[S], y: &[S], lambda: S, nx: S, scratch: &mut [S]) -> S {
    for ((s, &a), &b) in scratch.iter_mut().zip(x).zip(y) {
        *s = lambda * a - b;
    }
    space.norm_raw(scratch) - lambda * nx
}

/// How far the doubling search pushes `λ` before stopping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stopping<S> {
    /// First probe with `g(λ) < −tol`.
    FirstNegative,
    /// First probe with `−g(λ) ≥ fraction·ρ'₋(x,y)/‖x‖`, i.e. margin within
    /// `fraction` of the best achievable along the ray.
    FractionOfLimit(S),
}

/// Witness for `λ > 0`, or certified absence when `ρ'₋(x, y) ≤ tol`.
pub fn positive_witness<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<WitnessOutcome<S>> {
    positive_witness_with(space, x, y, Stopping::FirstNegative)
}

pub fn positive_witness_with<S: Scalar>(
    space: &Space<S>,
    x: &Vector<S>,
    y: &Vector<S>,
    stopping: Stopping<S>,
) -> Result<WitnessOutcome<S>> {
    let nx = nonzero(space, x, "x")?;
    let ny = nonzero(space, y, "y")?;
    let mut scratch = vec![S::zero(); space.dim()];
    let rho_minus = rho_raw(space, x.as_slice(), y.as_slice(), nx).rho_minus;
    let tol = space.tol().analytic;
    if rho_minus <= tol {
        let limit = gap_profile(space, x, y)?.limit_estimate;
        return Ok(WitnessOutcome::Absent(Absence { rho: rho_minus, gap_limit: limit }));
    }
    search_raw(space, x.as_slice(), y.as_slice(), nx, ny, rho_minus, stopping, &mut scratch)
        .map(WitnessOutcome::Found)
}

/// Doubling search on validated slices; `rho_minus > tol` is assumed.
#[allow(clippy::too_many_arguments)]
pub(crate) fn search_raw<S: Scalar>(
    space: &Space<S>,
    x: &[S],
    y: &[S],
    nx: S,
    ny: S,
    rho_minus: S,
    stopping: Stopping<S>,
    scratch: &mut [S],
) -> Result<Witness<S>> {
    let tol = space.tol().analytic;
    let target = match stopping {
        Stopping::FirstNegative => -tol,
        Stopping::FractionOfLimit(f) => (-(f * rho_minus / nx)).min(-tol),
    };
    let mut best: Option<(S, S)> = None;
    let mut lambda = ny / nx;
    for _ in 0..=MAX_DOUBLINGS {
        let g = raw_gap(space, x, y, lambda, nx, scratch);
        if g < -tol && best.is_none_or(|(_, bg)| g < bg) {
            best = Some((lambda, g));
        }
        if g < target {
            break;
        }
        lambda = lambda + lambda;
    }
    let Some((lambda, _)) = best else {
        return Err(Error::Inconsistency(format!(
            "rho_minus = {rho_minus} > tol but the gap never dropped below -tol within 2^{MAX_DOUBLINGS} doublings"
        )));
    };
    let reach = lambda * nx;
    for ((s, &a), &b) in scratch.iter_mut().zip(x).zip(y) {
        *s = lambda * a - b;
    }
    let d = space.norm_raw(scratch);
    let radius = (d + reach) / S::lit(2.0);
    let margin = radius - d;
    if !(margin > S::zero() && d < radius && radius <= reach) {
        return Err(Error::Inconsistency(format!(
            "witness at lambda = {lambda} fails re-check: distance {d}, radius {radius}, reach {reach}"
        )));
    }
    Ok(Witness { lambda, radius, margin })
}

/// Witness for `λ < 0`, or certified absence when `ρ'₊(x, y) ≥ −tol`.
/// Runs the positive search on `−x`, since `ρ'₋(−x, y) = −ρ'₊(x, y)`.
pub fn negative_witness<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<WitnessOutcome<S>> {
    Ok(match positive_witness(space, &-x, y)? {
        WitnessOutcome::Found(w) => WitnessOutcome::Found(Witness { lambda: -w.lambda, ..w }),
        WitnessOutcome::Absent(a) => WitnessOutcome::Absent(Absence { rho: -a.rho, gap_limit: a.gap_limit }),
    })
}

pub fn witness_for_side<S: Scalar>(
    space: &Space<S>,
    x: &Vector<S>,
    y: &Vector<S>,
    side: Side,
) -> Result<WitnessOutcome<S>> {
    match side {
        Side::Positive => positive_witness(space, x, y),
        Side::Negative => negative_witness(space, x, y),
    }
}

/// Independent check of ball existence: scans `g` on the logarithmic grid
/// `±1e−6·1.01^j` up to `1e9·‖y‖/‖x‖` and reports whether the minimum is
/// below `−10·tol`.
pub fn witness_bruteforce_oracle<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>, side: Side) -> Result<bool> {
    let nx = nonzero(space, x, "x")?;
    let ny = nonzero(space, y, "y")?;
    let threshold = -S::lit(10.0) * space.tol().analytic;
    let top = S::lit(1e9) * ny / nx;
    let growth = S::lit(1.01);
    let sign = match side {
        Side::Positive => S::one(),
        Side::Negative => -S::one(),
    };
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let mut scratch = vec![S::zero(); space.dim()];
    let mut mag = S::lit(1e-6);
    while mag <= top {
        let lambda = sign * mag;
        for ((s, &a), &b) in scratch.iter_mut().zip(xs).zip(ys) {
            *s = lambda * a - b;
        }
        if space.norm_raw(&scratch) - mag * nx < threshold {
            return Ok(true);
        }
        mag = mag * growth;
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::from_f64s(c).unwrap()
    }

    #[test]
    fn gap_examples() {
        let l2 = Space::<f64>::lp(2, 2.0).unwrap();
        assert_abs_diff_eq!(gap(&l2, &v(&[1.0, 0.0]), &v(&[1.0, 1.0]), 2.0).unwrap(), 2f64.sqrt() - 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gap(&l2, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 5.0).unwrap(), 26f64.sqrt() - 5.0, epsilon = 1e-15);
        let linf = Space::<f64>::linf(3).unwrap();
        let x = v(&[0.5, -1.0, 2.0]);
        let y = x.scale(-3.0);
        assert_abs_diff_eq!(gap(&linf, &x, &y, -3.0).unwrap(), -6.0, epsilon = 1e-15);
    }

    #[test]
    fn positive_examples() {
        let l2 = Space::<f64>::lp(2, 2.0).unwrap();
        let w = *positive_witness(&l2, &v(&[1.0, 0.0]), &v(&[1.0, 1.0])).unwrap().witness().unwrap();
        // λ = ‖y‖/‖x‖ = √2 gives g = √(0.17…+1) − √2 < 0 already.
        assert!(w.verify(&l2, &v(&[1.0, 0.0]), &v(&[1.0, 1.0])).unwrap());
        let d = ((w.lambda - 1.0).powi(2) + 1.0).sqrt();
        assert_abs_diff_eq!(w.radius, (d + w.lambda) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.margin, (w.lambda - d) / 2.0, epsilon = 1e-15);

        assert!(!positive_witness(&l2, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap().is_found());

        let l1 = Space::<f64>::lp(2, 1.0).unwrap();
        let out = positive_witness(&l1, &v(&[1.0, 0.0]), &v(&[1.0, 1.0])).unwrap();
        assert!(matches!(out, WitnessOutcome::Absent(Absence { rho, .. }) if rho == 0.0));
        // Brute force: no λ in (0, 2^20] gives g < 0.
        for k in 0..=2000 {
            let lambda = 2f64.powf(20.0 * k as f64 / 2000.0) * 1e-3;
            assert!(gap(&l1, &v(&[1.0, 0.0]), &v(&[1.0, 1.0]), lambda).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn midpoint_radius_at_lambda_two() {
        // With the midpoint rule at λ = 2: r = (√2 + 2)/2, margin = (2 − √2)/2.
        let l2 = Space::<f64>::lp(2, 2.0).unwrap();
        let d = gap(&l2, &v(&[1.0, 0.0]), &v(&[1.0, 1.0]), 2.0).unwrap() + 2.0;
        assert_abs_diff_eq!((d + 2.0) / 2.0, 1.7071067811865475, epsilon = 1e-12);
        assert_abs_diff_eq!((2.0 - d) / 2.0, 0.2928932188134524, epsilon = 1e-12);
    }

    #[test]
    fn negative_examples() {
        let l2 = Space::<f64>::lp(2, 2.0).unwrap();
        let x = v(&[1.0, 0.0]);
        let y = v(&[-1.0, 0.1]);
        let w = *negative_witness(&l2, &x, &y).unwrap().witness().unwrap();
        assert!(w.lambda < 0.0);
        assert!(w.verify(&l2, &x, &y).unwrap());
        // At λ = −2: ‖−2x − y‖ = ‖(−1, −0.1)‖ ≈ 1.005 < 2.
        assert!(gap(&l2, &x, &y, -2.0).unwrap() < 0.0);

        assert!(!negative_witness(&l2, &x, &v(&[1.0, 1.0])).unwrap().is_found());
        let linf = Space::<f64>::linf(2).unwrap();
        let out = negative_witness(&linf, &v(&[1.0, 1.0]), &v(&[1.0, -1.0])).unwrap();
        assert!(matches!(out, WitnessOutcome::Absent(Absence { rho, .. }) if rho == 1.0));
    }

    #[test]
    fn oracle_examples() {
        let l2 = Space::<f64>::lp(2, 2.0).unwrap();
        assert!(witness_bruteforce_oracle(&l2, &v(&[1.0, 0.0]), &v(&[1.0, 1.0]), Side::Positive).unwrap());
        assert!(!witness_bruteforce_oracle(&l2, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), Side::Positive).unwrap());
        let linf = Space::<f64>::linf(2).unwrap();
        assert!(witness_bruteforce_oracle(&linf, &v(&[1.0, 1.0]), &v(&[0.5, 0.5]), Side::Positive).unwrap());
    }

    #[test]
    fn profile_converges_to_minus_rho() {
        let l3 = Space::<f64>::lp(3, 3.0).unwrap();
        let x = v(&[0.4, -1.0, 0.7]);
        let y = v(&[1.0, 0.2, 0.3]);
        let p = gap_profile(&l3, &x, &y).unwrap();
        let rho = crate::derivatives::rho_analytic(&l3, &x, &y).unwrap().rho_minus;
        let nx = l3.norm(&x).unwrap();
        assert!((p.limit_estimate + rho / nx).abs() < 1e-5);
        for w in p.samples.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12);
        }
    }

    #[test]
    fn fraction_stopping_widens_margin() {
        let l2 = Space::<f64>::lp(2, 2.0).unwrap();
        let x = v(&[1.0, 0.0]);
        let y = v(&[0.3, 0.95]);
        let first = *positive_witness(&l2, &x, &y).unwrap().witness().unwrap();
        let wide = *positive_witness_with(&l2, &x, &y, Stopping::FractionOfLimit(0.9)).unwrap().witness().unwrap();
        assert!(wide.margin >= 0.9 * 0.3 / 2.0);
        assert!(wide.margin >= first.margin);
        assert!(wide.verify(&l2, &x, &y).unwrap());
    }
}
