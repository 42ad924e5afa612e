//! Ball-coverings built from families of exposed functionals, their
//! ε-net certificates, and uncovered points for undersized candidates.

use serde::{Deserialize, Serialize};

use crate::derivatives::{duality_set, functional_distance, rho_raw};
use crate::error::{Error, Result};
use crate::linalg;
use crate::net::{unit_sphere_net, SphereNet};
use crate::scalar::Scalar;
use crate::spaces::{Family, Space};
use crate::vector::{Functional, Vector};
use crate::witness::{search_raw, Stopping};

use rayon::prelude::*;

/// Witnesses used for coverings stop once the gap reaches this fraction of
/// its limit, so every point keeps a margin of roughly `0.45·ρ'₋`.
pub const COVER_FRACTION: f64 = 0.9;

/// Slack allowed when checking that a ball excludes the origin or that a
/// point lies outside a ball.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// Open ball `{y : ‖c − y‖ < r}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Ball<S> {
    pub center: Vector<S>,
    pub radius: S,
}

impl<S: Scalar> Ball<S> {
    pub fn new(center: Vector<S>, radius: S) -> Result<Self> {
        if !(radius > S::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must be positive and finite, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// `r − ‖c − y‖`; positive exactly when `y` is inside.
    pub fn slack(&self, space: &Space<S>, y: &Vector<S>) -> Result<S> {
        Ok(self.radius - space.dist(&self.center, y)?)
    }

    pub fn excludes_origin(&self, space: &Space<S>) -> Result<bool> {
        Ok(self.radius <= space.norm(&self.center)? + S::lit(BOUNDARY_SLACK))
    }

    /// The ball `B(−c, r)`.
    pub fn mirrored(&self) -> Self {
        Self { center: -&self.center, radius: self.radius }
    }
}

/// The set a covering must contain.
#[derive(Clone, Debug)]
pub enum TargetSet<S> {
    FinitePoints(Vec<Vector<S>>),
    UnitSphere(SphereNet<S>),
}

impl<S: Scalar> TargetSet<S> {
    pub fn finite_points(space: &Space<S>, points: Vec<Vector<S>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("finite target set is empty".into()));
        }
        for p in &points {
            if space.norm(p)?.is_zero() {
                return Err(Error::ZeroVector { what: "target point" });
            }
        }
        Ok(TargetSet::FinitePoints(points))
    }

    pub fn unit_sphere(space: &Space<S>, delta: S) -> Result<Self> {
        Ok(TargetSet::UnitSphere(unit_sphere_net(space, delta)?))
    }

    /// Number of points actually evaluated.
    pub fn len(&self) -> usize {
        match self {
            TargetSet::FinitePoints(p) => p.len(),
            TargetSet::UnitSphere(net) => net.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Net resolution δ; zero for finite point sets.
    pub fn resolution(&self) -> S {
        match self {
            TargetSet::FinitePoints(_) => S::zero(),
            TargetSet::UnitSphere(net) => net.resolution(),
        }
    }

    pub fn point(&self, k: usize) -> Vector<S> {
        match self {
            TargetSet::FinitePoints(p) => p[k].clone(),
            TargetSet::UnitSphere(net) => net.point(k),
        }
    }

    fn check(&self, space: &Space<S>) -> Result<()> {
        match self {
            TargetSet::FinitePoints(points) => points.iter().try_for_each(|p| space.check(p)),
            TargetSet::UnitSphere(net) if net.space() != space => Err(Error::InvalidArgument(
                "target net was built for a different space".into(),
            )),
            TargetSet::UnitSphere(_) => Ok(()),
        }
    }

    fn par_fold<T, F, C>(&self, identity: T, f: F, combine: C) -> T
    where
        T: Clone + Send + Sync,
        F: Fn(T, usize, &[S]) -> T + Send + Sync,
        C: Fn(T, T) -> T + Send + Sync,
    {
        match self {
            TargetSet::UnitSphere(net) => net.par_fold(identity, f, combine),
            TargetSet::FinitePoints(points) => points
                .par_iter()
                .enumerate()
                .fold(|| identity.clone(), |acc, (k, p)| f(acc, k, p.as_slice()))
                .reduce(|| identity.clone(), &combine),
        }
    }
}

/// Result of checking a family of balls against a target set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct CoverageCertificate<S> {
    /// Minimum over target points of the best per-ball slack `r − ‖c − y‖`.
    pub min_slack: S,
    /// δ of the net, zero for finite point sets.
    pub net_resolution: S,
    /// `origin_excluded ∧ δ < min_slack`.
    pub full_cover: bool,
    pub origin_excluded: bool,
    /// Target index attaining `min_slack` (lowest index on ties).
    pub worst_index: usize,
    pub points_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Covering<S> {
    pub balls: Vec<Ball<S>>,
    pub certificate: Option<CoverageCertificate<S>>,
}

impl<S: Scalar> Covering<S> {
    pub fn is_certified(&self) -> bool {
        self.certificate.is_some_and(|c| c.full_cover)
    }
}

/// A point outside every ball of a candidate covering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct UncoveredPoint<S> {
    pub point: Vector<S>,
    /// `r_i − ‖c_i − point‖` per ball, each `≤ 1e−12` up to scale.
    pub per_ball_slack: Vec<S>,
}

/// Running union bound for balls `B(λ_i x, r_i)` on one ray: the smallest
/// ball centred at `λx` (for `λ ≥ max λ_i`) containing all of them has radius
/// `λ‖x‖ + max_i (r_i − λ_i‖x‖)`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct RayAccumulator<S> {
    lambda: S,
    offset: S,
}

impl<S: Scalar> RayAccumulator<S> {
    fn new(lambda: S, radius: S, nx: S) -> Self {
        Self { lambda, offset: radius - lambda * nx }
    }

    fn join(self, other: Self) -> Self {
        Self { lambda: self.lambda.max(other.lambda), offset: self.offset.max(other.offset) }
    }

    fn radius_at(&self, lambda: S, nx: S) -> S {
        lambda * nx + self.offset
    }
}

fn join_opt<S: Scalar>(a: Option<RayAccumulator<S>>, b: Option<RayAccumulator<S>>) -> Option<RayAccumulator<S>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.join(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Replaces balls centred on the ray `ℝ⁺x` by one ball at `λx` containing
/// their union.
pub fn merge_collinear<S: Scalar>(
    space: &Space<S>,
    balls: &[Ball<S>],
    direction: &Vector<S>,
    lambda_target: S,
) -> Result<Ball<S>> {
    let nx = space.norm(direction)?;
    if nx.is_zero() {
        return Err(Error::ZeroVector { what: "direction" });
    }
    if balls.is_empty() {
        return Err(Error::InvalidArgument("no balls to merge".into()));
    }
    let xs = direction.as_slice();
    let pivot = (0..xs.len()).max_by(|&a, &b| xs[a].abs().partial_cmp(&xs[b].abs()).unwrap()).unwrap();
    let eps = S::lit(BOUNDARY_SLACK);
    let mut acc: Option<RayAccumulator<S>> = None;
    let mut lambda_max = S::neg_infinity();
    for (i, b) in balls.iter().enumerate() {
        space.check(&b.center)?;
        let lambda = b.center[pivot] / xs[pivot];
        let off_ray = space.dist(&b.center, &direction.scale(lambda))?;
        let scale = S::one().max(space.norm(&b.center)?);
        if !(lambda > S::zero()) || off_ray > eps * scale {
            return Err(Error::InvalidArgument(format!(
                "ball {i} is not centred on the positive ray of the direction"
            )));
        }
        if !(b.radius > S::zero()) || b.radius > lambda * nx + eps * scale {
            return Err(Error::InvalidArgument(format!(
                "ball {i} radius {} must lie in (0, {}]",
                b.radius,
                lambda * nx
            )));
        }
        lambda_max = lambda_max.max(lambda);
        acc = join_opt(acc, Some(RayAccumulator::new(lambda, b.radius, nx)));
    }
    if lambda_target < lambda_max * (S::one() - S::tie_tol()) {
        return Err(Error::InvalidArgument(format!(
            "lambda_target {lambda_target} is below the largest ball parameter {lambda_max}"
        )));
    }
    let acc = acc.expect("balls is non-empty");
    Ok(Ball { center: direction.scale(lambda_target), radius: acc.radius_at(lambda_target, nx) })
}

/// A unit vector `x` with `J(x) = {f/‖f‖_*}`, which exists exactly when
/// `f/‖f‖_*` is an exposed point of the dual ball whose norming set has a
/// smooth point.
pub fn exposed_norming_point<S: Scalar>(space: &Space<S>, f: &Functional<S>) -> Result<Vector<S>> {
    f.check_dim(space.dim())?;
    if f.is_zero() {
        return Err(Error::ZeroVector { what: "functional" });
    }
    let not_exposed = |reason: String| Error::NotExposed { index: 0, reason };
    let fs = f.as_slice();
    let n = space.dim();
    let fnorm = space.dual_norm(f)?;
    let g: Vec<S> = fs.iter().map(|&c| c / fnorm).collect();
    let sgn = |c: S| if c < S::zero() { -S::one() } else { S::one() };
    let raw = match space.family() {
        Family::P(p) => {
            let q = p / (p - S::one());
            g.iter().map(|&c| sgn(c) * c.abs().powf(q - S::one())).collect()
        }
        Family::One => {
            let cut = S::one() - S::tie_tol();
            if let Some(i) = g.iter().position(|c| c.abs() < cut) {
                return Err(not_exposed(format!(
                    "coordinate {i} has |f_i| below the dual sup-norm, so f is not a vertex of the dual cube"
                )));
            }
            let inv = S::one() / S::lit(n as f64);
            g.iter().map(|&c| sgn(c) * inv).collect()
        }
        Family::Inf => {
            let cut = S::tie_tol();
            let support: Vec<usize> = (0..n).filter(|&i| g[i].abs() > cut).collect();
            if support.len() != 1 {
                return Err(not_exposed(format!(
                    "f has {} non-zero coordinates; only ±e_i are exposed in the dual l1 ball",
                    support.len()
                )));
            }
            let mut x = vec![S::zero(); n];
            x[support[0]] = sgn(g[support[0]]);
            x
        }
        Family::Poly(gens) => {
            let close = |h: &[S], sign: S| h.iter().zip(&g).all(|(&a, &b)| (sign * a - b).abs() <= S::lit(1e-9));
            if !gens.iter().any(|h| close(h.as_slice(), S::one()) || close(h.as_slice(), -S::one())) {
                return Err(not_exposed(
                    "f/‖f‖_* is not one of the ±generators, so it is not a vertex of the dual ball".into(),
                ));
            }
            let others: Vec<Vec<f64>> = gens
                .iter()
                .filter(|h| !close(h.as_slice(), S::one()) && !close(h.as_slice(), -S::one()))
                .map(|h| h.to_f64s())
                .collect();
            let anchor: Vec<f64> = g.iter().map(|c| c.as_f64()).collect();
            let (slack, x) = linalg::facet_interior_point(&anchor, &others)?;
            if slack <= 1e-9 {
                return Err(not_exposed(format!(
                    "the face normed by f has no point where f alone is active (slack {slack:e})"
                )));
            }
            x.into_iter().map(S::lit).collect()
        }
    };
    let x = Vector::new(raw)?;
    let nx = space.norm(&x)?;
    let x = x.scale(S::one() / nx);
    let j = duality_set(space, &x)?;
    let target = Functional::from_raw(g);
    let tol = space.tol().analytic.max(S::tie_tol());
    if !j.is_singleton() || functional_distance(&j.extreme_points[0], &target) > tol {
        let listed: Vec<Vec<f64>> = j.extreme_points.iter().map(|e| e.to_f64s()).collect();
        return Err(not_exposed(format!("candidate norming point has duality set {listed:?}")));
    }
    Ok(x)
}

/// Evaluates every target point against every ball.
pub fn verify_cover<S: Scalar>(space: &Space<S>, balls: &[Ball<S>], target: &TargetSet<S>) -> Result<CoverageCertificate<S>> {
    target.check(space)?;
    let mut origin_excluded = true;
    for b in balls {
        space.check(&b.center)?;
        origin_excluded &= b.excludes_origin(space)?;
    }
    let n = space.dim();
    let worst = |a: (S, usize), b: (S, usize)| {
        if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let identity = (S::infinity(), usize::MAX);
    let (min_slack, worst_index) = target.par_fold(
        identity,
        |acc, k, y| {
            let mut scratch = vec![S::zero(); n];
            let best = balls
                .iter()
                .map(|b| b.radius - space.dist_raw(b.center.as_slice(), y, &mut scratch))
                .fold(S::neg_infinity(), S::max);
            worst(acc, (best, k))
        },
        worst,
    );
    let delta = target.resolution();
    Ok(CoverageCertificate {
        min_slack,
        net_resolution: delta,
        full_cover: origin_excluded && delta < min_slack,
        origin_excluded,
        worst_index,
        points_checked: target.len(),
    })
}

#[derive(Clone, Debug)]
enum Failure {
    Separation { index: usize, value: f64 },
    Internal { index: usize, message: String },
}

impl Failure {
    fn index(&self) -> usize {
        match self {
            Failure::Separation { index, .. } | Failure::Internal { index, .. } => *index,
        }
    }
}

#[derive(Clone, Debug)]
struct BuildAcc<S> {
    rays: Vec<Option<RayAccumulator<S>>>,
    failure: Option<Failure>,
}

fn first_failure(a: Option<Failure>, b: Option<Failure>) -> Option<Failure> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.index() < a.index() { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Per functional, the merged witness data of all target points assigned to
/// it (by largest `f_i(y)`, lowest index on ties).
fn assign_and_merge<S: Scalar>(
    space: &Space<S>,
    target: &TargetSet<S>,
    functionals: &[Functional<S>],
    points: &[Vector<S>],
    norms: &[S],
) -> Result<Vec<Option<RayAccumulator<S>>>> {
    let m = functionals.len();
    let n = space.dim();
    let tol = space.tol().analytic;
    let fraction = Stopping::FractionOfLimit(S::lit(COVER_FRACTION));
    let identity = BuildAcc { rays: vec![None; m], failure: None };
    let acc = target.par_fold(
        identity,
        |mut acc, k, y| {
            if acc.failure.as_ref().is_some_and(|f| f.index() < k) {
                return acc;
            }
            let (best, value) = functionals
                .iter()
                .map(|f| f.apply_raw(y))
                .enumerate()
                .fold((0, S::neg_infinity()), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
            let x = points[best].as_slice();
            let rho = rho_raw(space, x, y, norms[best]).rho_minus;
            if !(value > tol) || !(rho > tol) {
                acc.failure = first_failure(acc.failure, Some(Failure::Separation { index: k, value: value.as_f64() }));
                return acc;
            }
            let ny = space.norm_raw(y);
            let mut scratch = vec![S::zero(); n];
            match search_raw(space, x, y, norms[best], ny, rho, fraction, &mut scratch) {
                Ok(w) => {
                    let ray = RayAccumulator::new(w.lambda, w.radius, norms[best]);
                    acc.rays[best] = join_opt(acc.rays[best], Some(ray));
                }
                Err(e) => {
                    acc.failure =
                        first_failure(acc.failure, Some(Failure::Internal { index: k, message: e.to_string() }));
                }
            }
            acc
        },
        |a, b| BuildAcc {
            rays: a.rays.into_iter().zip(b.rays).map(|(u, v)| join_opt(u, v)).collect(),
            failure: first_failure(a.failure, b.failure),
        },
    );
    match acc.failure {
        None => Ok(acc.rays),
        Some(Failure::Separation { index, value }) => Err(Error::SeparationViolated { index, value }),
        Some(Failure::Internal { index, message }) => {
            Err(Error::Inconsistency(format!("witness search failed at target point {index}: {message}")))
        }
    }
}

fn ball_for_ray<S: Scalar>(x: &Vector<S>, nx: S, ray: Option<RayAccumulator<S>>) -> Ball<S> {
    match ray {
        Some(r) => Ball { center: x.scale(r.lambda), radius: r.radius_at(r.lambda, nx) },
        None => Ball { center: x.clone(), radius: nx / S::lit(2.0) },
    }
}

fn norming_points<S: Scalar>(space: &Space<S>, functionals: &[Functional<S>]) -> Result<Vec<Vector<S>>> {
    let tol = space.tol().analytic.max(S::tie_tol());
    functionals
        .iter()
        .enumerate()
        .map(|(index, f)| {
            let d = space.dual_norm(f)?;
            if (d - S::one()).abs() > tol {
                return Err(Error::NotUnitDualNorm { index, dual_norm: d.as_f64() });
            }
            exposed_norming_point(space, f).map_err(|e| match e {
                Error::NotExposed { reason, .. } => Error::NotExposed { index, reason },
                other => other,
            })
        })
        .collect()
}

/// Covering with one ball per functional: each target point `y` is assigned
/// to some `f_i` with `f_i(y) > 0`, receives a witness on the ray through
/// the norming point `x_i`, and the witnesses on each ray are merged.
pub fn cover_from_functionals<S: Scalar>(
    space: &Space<S>,
    target: &TargetSet<S>,
    functionals: &[Functional<S>],
) -> Result<Covering<S>> {
    target.check(space)?;
    if functionals.is_empty() {
        return Err(Error::InvalidArgument("at least one functional is required".into()));
    }
    let points = norming_points(space, functionals)?;
    let norms: Vec<S> = points.iter().map(|x| space.norm_raw(x.as_slice())).collect();
    let rays = assign_and_merge(space, target, functionals, &points, &norms)?;
    let balls: Vec<Ball<S>> =
        points.iter().zip(&norms).zip(rays).map(|((x, &nx), ray)| ball_for_ray(x, nx, ray)).collect();
    let certificate = verify_cover(space, &balls, target)?;
    Ok(Covering { balls, certificate: Some(certificate) })
}

fn normalized<S: Scalar>(space: &Space<S>, functionals: &[Functional<S>]) -> Result<Vec<Functional<S>>> {
    let n = space.dim();
    if functionals.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} functionals, got {}", functionals.len())));
    }
    let rows: Vec<Vec<f64>> = functionals
        .iter()
        .map(|f| f.check_dim(n).map(|_| f.to_f64s()))
        .collect::<Result<_>>()?;
    let rank = linalg::rank(&rows, n);
    if rank < n {
        return Err(Error::RankDeficient { rank, needed: n });
    }
    functionals.iter().map(|f| Ok(f.scale(S::one() / space.dual_norm(f)?))).collect()
}

fn require_certified<S: Scalar>(covering: Covering<S>) -> Result<Covering<S>> {
    let cert = covering.certificate.expect("constructions always certify");
    if !cert.full_cover {
        return Err(Error::CertificateFailed { min_slack: cert.min_slack.as_f64(), delta: cert.net_resolution.as_f64() });
    }
    Ok(covering)
}

/// `2n` balls in mirrored pairs `±B` covering the unit sphere, from `n`
/// linearly independent exposed functionals (normalized to unit dual norm).
///
/// Points assigned to `−f_i` are handled on the ray `−x_i`; by symmetry of
/// the norm their witnesses mirror onto `+x_i`, so both halves are merged on
/// one ray and the result mirrored.
pub fn symmetric_cover_2n<S: Scalar>(space: &Space<S>, functionals: &[Functional<S>], delta: S) -> Result<Covering<S>> {
    let fs = normalized(space, functionals)?;
    let target = TargetSet::unit_sphere(space, delta)?;
    let half = norming_points(space, &fs)?;
    let mut signed_fs = Vec::with_capacity(2 * fs.len());
    let mut points = Vec::with_capacity(2 * fs.len());
    for (f, x) in fs.iter().zip(&half) {
        signed_fs.push(f.clone());
        signed_fs.push(-f);
        points.push(x.clone());
        points.push(-x);
    }
    for (index, (f, x)) in signed_fs.iter().zip(&points).enumerate().skip(1).step_by(2) {
        // −x_i must norm −f_i; holds whenever x_i norms f_i.
        let j = duality_set(space, x)?;
        if !j.is_singleton() || functional_distance(&j.extreme_points[0], f) > S::tie_tol().max(space.tol().analytic) {
            return Err(Error::NotExposed { index, reason: "mirrored norming point is not smooth".into() });
        }
    }
    let norms: Vec<S> = points.iter().map(|x| space.norm_raw(x.as_slice())).collect();
    let rays = assign_and_merge(space, &target, &signed_fs, &points, &norms)?;
    let mut balls = Vec::with_capacity(points.len());
    for (i, pair) in rays.chunks(2).enumerate() {
        let ball = ball_for_ray(&points[2 * i], norms[2 * i], join_opt(pair[0], pair[1]));
        balls.push(ball.mirrored());
        balls.push(ball);
    }
    // Keep the order (+f_1, −f_1, +f_2, ...).
    for pair in balls.chunks_mut(2) {
        pair.swap(0, 1);
    }
    let certificate = verify_cover(space, &balls, &target)?;
    require_certified(Covering { balls, certificate: Some(certificate) })
}

/// `n + 1` balls for smooth `ℓp` spaces, from `n` independent functionals
/// and `f_{n+1} = −Σ f_i` (all normalized to unit dual norm).
pub fn smooth_cover_n_plus_1<S: Scalar>(
    space: &Space<S>,
    functionals: &[Functional<S>],
    target: &TargetSet<S>,
) -> Result<Covering<S>> {
    if !space.is_smooth_family() {
        return Err(Error::NonSmoothFamily);
    }
    let mut fs = normalized(space, functionals)?;
    let n = space.dim();
    let sum: Vec<S> = (0..n).map(|j| -fs.iter().map(|f| f.as_slice()[j]).sum::<S>()).collect();
    let last = Functional::new(sum)?;
    let d = space.dual_norm(&last)?;
    fs.push(last.scale(S::one() / d));
    require_certified(cover_from_functionals(space, target, &fs)?)
}

/// Sign convention for kernel vectors: first coordinate above `1e−9` in
/// magnitude is positive.
fn canonical_sign<S: Scalar>(z: &mut [S]) {
    if let Some(c) = z.iter().find(|c| c.abs() > S::lit(1e-9)) {
        if *c < S::zero() {
            z.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

fn first_extreme<S: Scalar>(space: &Space<S>, c: &Vector<S>) -> Result<Vec<f64>> {
    Ok(duality_set(space, c)?.extreme_points[0].to_f64s())
}

fn unit_kernel_vector<S: Scalar>(space: &Space<S>, rows: &[Vec<f64>]) -> Result<Vec<S>> {
    let n = space.dim();
    let basis = linalg::null_space(rows, n);
    let Some(z) = basis.first() else {
        return Err(Error::Inconsistency(format!(
            "null space of {} functionals in dimension {n} is numerically empty",
            rows.len()
        )));
    };
    let mut z: Vec<S> = z.iter().map(|&c| S::lit(c)).collect();
    let nz = space.norm_raw(&z);
    z.iter_mut().for_each(|c| *c = *c / nz);
    canonical_sign(&mut z);
    Ok(z)
}

/// Pairs each ball with its mirror image; returns one representative per pair.
fn symmetric_representatives<S: Scalar>(space: &Space<S>, balls: &[Ball<S>]) -> Result<Vec<usize>> {
    let mut used = vec![false; balls.len()];
    let mut reps = Vec::new();
    for i in 0..balls.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let scale = S::one().max(space.norm(&balls[i].center)?);
        let tol = S::lit(BOUNDARY_SLACK) * scale;
        let mirror = (0..balls.len()).find(|&j| {
            !used[j]
                && (balls[j].radius - balls[i].radius).abs() <= tol
                && balls[j].center.as_slice().iter().zip(balls[i].center.as_slice()).all(|(&a, &b)| (a + b).abs() <= tol)
        });
        match mirror {
            Some(j) => {
                used[j] = true;
                reps.push(i);
            }
            None => {
                return Err(Error::HypothesisViolated(format!("ball {i} has no mirrored partner in the candidate")));
            }
        }
    }
    Ok(reps)
}

/// A unit vector outside every ball of an undersized candidate: fewer than
/// `n` mirrored pairs (`symmetric`), or at most `n` balls otherwise.
pub fn adversary_uncovered<S: Scalar>(space: &Space<S>, balls: &[Ball<S>], symmetric: bool) -> Result<UncoveredPoint<S>> {
    let n = space.dim();
    if balls.is_empty() {
        return Err(Error::InvalidArgument("candidate covering has no balls".into()));
    }
    for (i, b) in balls.iter().enumerate() {
        space.check(&b.center)?;
        if space.norm(&b.center)?.is_zero() {
            return Err(Error::ZeroVector { what: "ball center" });
        }
        if !b.excludes_origin(space)? {
            return Err(Error::HypothesisViolated(format!("ball {i} contains the origin")));
        }
    }
    let z = if symmetric {
        let reps = symmetric_representatives(space, balls)?;
        if reps.len() >= n {
            return Err(Error::HypothesisViolated(format!(
                "{} symmetric pairs in dimension {n}; need fewer than {n}",
                reps.len()
            )));
        }
        let rows = reps.iter().map(|&i| first_extreme(space, &balls[i].center)).collect::<Result<Vec<_>>>()?;
        unit_kernel_vector(space, &rows)?
    } else {
        let m = balls.len();
        if m > n {
            return Err(Error::HypothesisViolated(format!("{m} balls in dimension {n}; need at most {n}")));
        }
        let k = if m == n { n - 1 } else { m };
        let rows = balls[..k].iter().map(|b| first_extreme(space, &b.center)).collect::<Result<Vec<_>>>()?;
        let mut z = unit_kernel_vector(space, &rows)?;
        if m == n {
            let c = balls[n - 1].center.as_slice();
            let rho = rho_raw(space, c, &z, space.norm_raw(c)).rho_minus;
            if rho > S::zero() {
                z.iter_mut().for_each(|v| *v = -*v);
            }
        }
        z
    };
    let mut scratch = vec![S::zero(); n];
    let per_ball_slack: Vec<S> =
        balls.iter().map(|b| b.radius - space.dist_raw(b.center.as_slice(), &z, &mut scratch)).collect();
    for (i, (b, &s)) in balls.iter().zip(&per_ball_slack).enumerate() {
        let scale = S::one().max(space.norm(&b.center)?);
        if s > S::lit(BOUNDARY_SLACK) * scale {
            return Err(Error::Inconsistency(format!("constructed point lies inside ball {i} with slack {s}")));
        }
    }
    Ok(UncoveredPoint { point: Vector::new(z)?, per_ball_slack })
}
