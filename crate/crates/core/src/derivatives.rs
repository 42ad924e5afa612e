//! One-sided norm derivatives
//! `ρ'±(x, y) = lim_{t→0±} ‖x‖·(‖x + t·y‖ − ‖x‖)/t`, the duality set `J(x)`,
//! and the smoothness test built on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;
use crate::spaces::{max_abs, Family, Space};
use crate::vector::{dot, Functional, Vector};

/// Cap on the number of extreme points enumerated for an l1 duality set.
const MAX_L1_ZEROS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivativePair<S> {
    pub rho_minus: S,
    pub rho_plus: S,
    pub method: Method,
    pub error_bound: S,
}

impl<S: Scalar> DerivativePair<S> {
    fn exact(rho_minus: S, rho_plus: S) -> Self {
        Self { rho_minus, rho_plus, method: Method::Analytic, error_bound: S::zero() }
    }
}

fn nonzero<S: Scalar>(space: &Space<S>, x: &Vector<S>) -> Result<S> {
    let nx = space.norm(x)?;
    if nx.is_zero() {
        return Err(Error::ZeroVector { what: "x" });
    }
    Ok(nx)
}

#[inline]
fn sgn<S: Scalar>(v: S) -> S {
    if v > S::zero() {
        S::one()
    } else if v < S::zero() {
        -S::one()
    } else {
        S::zero()
    }
}

/// Closed-form `ρ'±(x, y)`.
pub fn rho_analytic<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<DerivativePair<S>> {
    let nx = nonzero(space, x)?;
    space.check(y)?;
    Ok(rho_raw(space, x.as_slice(), y.as_slice(), nx))
}

/// `ρ'±` for pre-validated slices with `nx = ‖x‖ > 0`.
pub(crate) fn rho_raw<S: Scalar>(space: &Space<S>, x: &[S], y: &[S], nx: S) -> DerivativePair<S> {
    match space.family() {
        Family::P(p) => {
            // ‖x‖·Σ sgn(x_i)·(|x_i|/‖x‖)^(p−1)·y_i, i.e. ‖x‖^(2−p)·Σ|x_i|^(p−1) sgn(x_i) y_i.
            let pm1 = p - S::one();
            let s = x
                .iter()
                .zip(y)
                .filter(|(xi, _)| !xi.is_zero())
                .fold(S::zero(), |acc, (&xi, &yi)| acc + sgn(xi) * (xi.abs() / nx).powf(pm1) * yi);
            let r = nx * s;
            DerivativePair::exact(r, r)
        }
        Family::One => {
            let mut on = S::zero();
            let mut off = S::zero();
            for (&xi, &yi) in x.iter().zip(y) {
                if xi.is_zero() {
                    off = off + yi.abs();
                } else {
                    on = on + sgn(xi) * yi;
                }
            }
            DerivativePair::exact(nx * (on - off), nx * (on + off))
        }
        Family::Inf => {
            let cut = nx * (S::one() - S::tie_tol());
            let (lo, hi) = active_range(x.iter().zip(y).map(|(&v, &w)| (v, w, cut)));
            DerivativePair::exact(nx * lo, nx * hi)
        }
        Family::Poly(fs) => {
            let (lo, hi) = active_range(
                fs.iter().map(|f| (dot(f.as_slice(), x), dot(f.as_slice(), y), generator_cut(f.as_slice(), x, nx))),
            );
            DerivativePair::exact(nx * lo, nx * hi)
        }
    }
}

/// Threshold above which `|f(x)|` counts as attaining `‖x‖`. The band is
/// relative to `Σ|f_j x_j|`, which bounds the rounding of the dot product.
fn generator_cut<S: Scalar>(f: &[S], x: &[S], nx: S) -> S {
    let mass = f.iter().zip(x).fold(S::zero(), |acc, (&a, &b)| acc + (a * b).abs());
    nx - S::tie_tol() * nx.max(mass)
}

/// Min and max of `sgn(v)·w` over triples `(v, w, cut)` with `|v| ≥ cut`.
fn active_range<S: Scalar>(items: impl Iterator<Item = (S, S, S)>) -> (S, S) {
    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    for (v, w, cut) in items {
        if v.abs() >= cut {
            let s = sgn(v) * w;
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    (lo, hi)
}

/// One probe of the difference quotient `q(t) = ‖x‖(‖x + t·y‖ − ‖x‖)/t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdProbe<S> {
    pub t: S,
    /// `q(t)`, which decreases to `ρ'₊` as `t ↓ 0`.
    pub q_plus: S,
    /// `q(−t)`, which increases to `ρ'₋`.
    pub q_minus: S,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdTrace<S> {
    pub probes: Vec<FdProbe<S>>,
    pub pair: DerivativePair<S>,
}

/// Number of halvings of the finite-difference step.
pub const FD_STEPS: usize = 48;

/// Full probe sequence of the bracketing finite-difference estimator.
pub fn fd_trace<S: Scalar>(space: &Space<S>, x: &Vector<S>, y: &Vector<S>) -> Result<FdTrace<S>> {
    let nx = nonzero(space, x)?;
    let ny = space.norm(y)?;
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let quotient = |t: S| nx * space.norm_step(xs, ys, t, nx) / t;

    let scale = S::one().max(nx * ny);
    let stop = S::lit(1e-9) * scale;
    let t0 = nx / S::one().max(ny);
    let half = S::lit(0.5);

    let mut probes: Vec<FdProbe<S>> = Vec::with_capacity(FD_STEPS + 1);
    let mut t = t0;
    let mut change = S::infinity();
    for k in 0..=FD_STEPS {
        let probe = FdProbe { t, q_plus: quotient(t), q_minus: quotient(-t) };
        if let Some(prev) = probes.last() {
            change = (probe.q_plus - prev.q_plus).abs().max((probe.q_minus - prev.q_minus).abs());
        }
        probes.push(probe);
        if k > 0 && change < stop {
            break;
        }
        t = t * half;
    }
    let last = *probes.last().expect("at least one probe");
    // The step is evaluated without cancellation, so rounding stays at a
    // few ulps of the quotient's natural scale ‖x‖·‖y‖.
    let allowance = S::lit(32.0 * space.dim() as f64) * S::epsilon() * scale;
    let error_bound = if change.is_finite() { change + allowance } else { allowance };
    Ok(FdTrace {
        probes,
        pair: DerivativePair {
            rho_minus: last.q_minus,
            rho_plus: last.q_plus,
            method: Method::FiniteDifference,
            error_bound,
        },
    })
}

/// Finite-difference estimate of `ρ'±`, independent of the closed forms.
pub fn rho_finite_difference<S: Scalar>(
    space: &Space<S>,
    x: &Vector<S>,
    y: &Vector<S>,
) -> Result<DerivativePair<S>> {
    Ok(fd_trace(space, x, y)?.pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualityKind {
    Singleton,
    Polytope,
}

/// `J(x) = { f : ‖f‖_* = 1, f(x) = ‖x‖ }` as a list of extreme points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualitySet<S> {
    pub kind: DualityKind,
    pub extreme_points: Vec<Functional<S>>,
}

impl<S: Scalar> DualitySet<S> {
    fn from_points(extreme_points: Vec<Functional<S>>) -> Self {
        let kind = if extreme_points.len() == 1 { DualityKind::Singleton } else { DualityKind::Polytope };
        Self { kind, extreme_points }
    }

    pub fn is_singleton(&self) -> bool {
        self.kind == DualityKind::Singleton
    }

    /// `max { f(y) : f ∈ J(x) }`.
    pub fn support_max(&self, y: &[S]) -> S {
        self.extreme_points.iter().fold(S::neg_infinity(), |m, f| m.max(f.apply_raw(y)))
    }

    /// `min { f(y) : f ∈ J(x) }`.
    pub fn support_min(&self, y: &[S]) -> S {
        self.extreme_points.iter().fold(S::infinity(), |m, f| m.min(f.apply_raw(y)))
    }

    /// Extreme point attaining [`support_min`](Self::support_min).
    pub fn argmin(&self, y: &[S]) -> &Functional<S> {
        self.extreme_points
            .iter()
            .min_by(|a, b| a.apply_raw(y).partial_cmp(&b.apply_raw(y)).unwrap())
            .expect("duality set is nonempty")
    }
}

pub fn duality_set<S: Scalar>(space: &Space<S>, x: &Vector<S>) -> Result<DualitySet<S>> {
    let nx = nonzero(space, x)?;
    let xs = x.as_slice();
    let n = space.dim();
    let points = match space.family() {
        Family::P(p) => {
            let pm1 = p - S::one();
            vec![Functional::from_raw(xs.iter().map(|&xi| sgn(xi) * (xi.abs() / nx).powf(pm1)).collect())]
        }
        Family::One => {
            let zeros: Vec<usize> = (0..n).filter(|&i| xs[i].is_zero()).collect();
            if zeros.len() > MAX_L1_ZEROS {
                return Err(Error::CombinatorialBlowup { size: 1u128 << zeros.len(), cap: 1u128 << MAX_L1_ZEROS });
            }
            let base: Vec<S> = xs.iter().map(|&xi| sgn(xi)).collect();
            (0..1usize << zeros.len())
                .map(|mask| {
                    let mut f = base.clone();
                    for (bit, &i) in zeros.iter().enumerate() {
                        f[i] = if mask >> bit & 1 == 0 { S::one() } else { -S::one() };
                    }
                    Functional::from_raw(f)
                })
                .collect()
        }
        Family::Inf => {
            let cut = nx * (S::one() - S::tie_tol());
            (0..n)
                .filter(|&i| xs[i].abs() >= cut)
                .map(|i| {
                    let mut f = vec![S::zero(); n];
                    f[i] = sgn(xs[i]);
                    Functional::from_raw(f)
                })
                .collect()
        }
        Family::Poly(fs) => {
            let dedup = S::lit(1e-9);
            let mut cands: Vec<Functional<S>> = Vec::new();
            for f in fs {
                let v = f.apply_raw(xs);
                if v.abs() < generator_cut(f.as_slice(), xs, nx) {
                    continue;
                }
                // Active generators already have dual norm 1; the factor only
                // removes the rounding of |f(x)| against ‖x‖.
                let g = f.scale(sgn(v) * nx / v.abs());
                let dup = cands.iter().any(|h| {
                    h.as_slice().iter().zip(g.as_slice()).all(|(&a, &b)| (a - b).abs() <= dedup)
                });
                if !dup {
                    cands.push(g);
                }
            }
            prune_to_extreme(cands)?
        }
    };
    Ok(DualitySet::from_points(points))
}

/// Drops candidates lying in the convex hull of the others.
fn prune_to_extreme<S: Scalar>(cands: Vec<Functional<S>>) -> Result<Vec<Functional<S>>> {
    if cands.len() < 3 {
        return Ok(cands);
    }
    let raw: Vec<Vec<f64>> = cands.iter().map(|f| f.to_f64s()).collect();
    let mut keep = vec![true; cands.len()];
    for i in 0..cands.len() {
        let others: Vec<Vec<f64>> = raw
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && keep[j])
            .map(|(_, r)| r.clone())
            .collect();
        if linalg::in_convex_hull(&raw[i], &others)? {
            keep[i] = false;
        }
    }
    Ok(cands.into_iter().zip(keep).filter(|(_, k)| *k).map(|(f, _)| f).collect())
}

/// Outcome of [`is_smooth`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Smoothness<S> {
    pub smooth: bool,
    /// `max_j (ρ'₊(x, e_j) − ρ'₋(x, e_j))`, zero exactly at smooth points.
    pub margin: S,
}

pub fn is_smooth<S: Scalar>(space: &Space<S>, x: &Vector<S>) -> Result<Smoothness<S>> {
    let nx = nonzero(space, x)?;
    let n = space.dim();
    let mut e = vec![S::zero(); n];
    let mut margin = S::zero();
    for j in 0..n {
        e[j] = S::one();
        let r = rho_raw(space, x.as_slice(), &e, nx);
        margin = margin.max(r.rho_plus - r.rho_minus);
        e[j] = S::zero();
    }
    let smooth = duality_set(space, x)?.is_singleton();
    Ok(Smoothness { smooth, margin })
}

/// Largest coordinate gap between two functionals; used by tests and checks.
pub fn functional_distance<S: Scalar>(a: &Functional<S>, b: &Functional<S>) -> S {
    let diff: Vec<S> = a.as_slice().iter().zip(b.as_slice()).map(|(&u, &v)| u - v).collect();
    max_abs(&diff)
}
