//! Positive separation by subdifferential selections and its equivalence with
//! ball-coverings whose centres lie on prescribed rays.
//!
//! A selection `φ` picks one `φ(x_i) ∈ J(x_i)` per direction; it positively
//! separates `A` when `max_i φ(x_i)(a) > 0` for each `a ∈ A`. Since
//! `ρ'₋(x_i, a) = ‖x_i‖·min_{f ∈ J(x_i)} f(a)`, every selection separates
//! exactly when each point has some direction with `ρ'₋(x_i, a) > 0`; the
//! enumeration in [`selection_oracle_exhaustive`] is kept only as an
//! independent check of that reduction.

use serde::Serialize;

use crate::covering::{merge_collinear, verify_cover, Ball, CoverageCertificate, Covering, TargetSet, COVER_FRACTION};
use crate::derivatives::{duality_set, rho_analytic};
use crate::error::{Error, Result};
use crate::orthogonality::{bj_orthogonal, classify_pair, PairTag};
use crate::scalar::Scalar;
use crate::spaces::{Family, Space};
use crate::vector::{Functional, Vector};
use crate::witness::{positive_witness, positive_witness_with, Stopping, WitnessOutcome};

/// Cap on the number of selections [`selection_oracle_exhaustive`] visits.
pub const SELECTION_CAP: u128 = 1_000_000;

/// Unit directions `x_i` and a finite nonzero point set `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionInstance<S> {
    space: Space<S>,
    directions: Vec<Vector<S>>,
    points: Vec<Vector<S>>,
}

impl<S: Scalar> SelectionInstance<S> {
    pub fn new(space: Space<S>, directions: Vec<Vector<S>>, points: Vec<Vector<S>>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidArgument("at least one direction is required".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("point set is empty".into()));
        }
        for (i, x) in directions.iter().enumerate() {
            let nx = space.norm(x)?;
            if (nx - S::one()).abs() > S::lit(1e-9) {
                return Err(Error::InvalidArgument(format!("direction {i} has norm {nx}, expected 1")));
            }
        }
        for p in &points {
            if space.norm(p)?.is_zero() {
                return Err(Error::ZeroVector { what: "instance point" });
            }
        }
        Ok(Self { space, directions, points })
    }

    pub fn space(&self) -> &Space<S> {
        &self.space
    }

    pub fn directions(&self) -> &[Vector<S>] {
        &self.directions
    }

    pub fn points(&self) -> &[Vector<S>] {
        &self.points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationVerdict<S> {
    pub separated: bool,
    /// Per point, the direction with the largest `ρ'₋(x_i, a)` if it exceeds
    /// the tolerance.
    pub witness_index: Vec<Option<usize>>,
    /// First point no direction separates.
    pub failing_point: Option<usize>,
    /// For the failing point, `f_i ∈ J(x_i)` with `f_i(a) = min_J f(a) ≤ 0`.
    pub violating_selection: Option<Vec<Functional<S>>>,
}

/// `ρ'₋(x_i, a)` for every point (rows) and direction (columns).
fn rho_table<S: Scalar>(inst: &SelectionInstance<S>, points: &[Vector<S>]) -> Result<Vec<Vec<S>>> {
    points
        .iter()
        .map(|a| inst.directions.iter().map(|x| Ok(rho_analytic(&inst.space, x, a)?.rho_minus)).collect())
        .collect()
}

fn best_direction<S: Scalar>(row: &[S], tol: S) -> Option<usize> {
    let (i, v) = row.iter().enumerate().fold((0, S::neg_infinity()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    (v > tol).then_some(i)
}

pub fn positively_separates<S: Scalar>(inst: &SelectionInstance<S>) -> Result<SeparationVerdict<S>> {
    let tol = inst.space.tol().analytic;
    let table = rho_table(inst, &inst.points)?;
    let witness_index: Vec<Option<usize>> = table.iter().map(|row| best_direction(row, tol)).collect();
    let failing_point = witness_index.iter().position(Option::is_none);
    let violating_selection = match failing_point {
        Some(k) => Some(
            inst.directions
                .iter()
                .map(|x| Ok(duality_set(&inst.space, x)?.argmin(inst.points[k].as_slice()).clone()))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(SeparationVerdict { separated: failing_point.is_none(), witness_index, failing_point, violating_selection })
}

/// Enumerates every choice of one extreme point of `J(x_i)` per direction
/// and checks that each choice separates every point.
pub fn selection_oracle_exhaustive<S: Scalar>(inst: &SelectionInstance<S>) -> Result<bool> {
    if let Family::P(_) = inst.space.family() {
        return Err(Error::UnsupportedFamily("selection enumeration needs l1, linf or polyhedral duality sets"));
    }
    let sets: Vec<Vec<Functional<S>>> =
        inst.directions.iter().map(|x| Ok(duality_set(&inst.space, x)?.extreme_points)).collect::<Result<_>>()?;
    let total = sets.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128)).unwrap_or(u128::MAX);
    if total > SELECTION_CAP {
        return Err(Error::CombinatorialBlowup { size: total, cap: SELECTION_CAP });
    }
    let tol = inst.space.tol().analytic;
    // values[i][j][k] = f_{i,j}(a_k)
    let values: Vec<Vec<Vec<S>>> = sets
        .iter()
        .map(|set| set.iter().map(|f| inst.points.iter().map(|a| f.apply_raw(a.as_slice())).collect()).collect())
        .collect();
    let mut choice = vec![0usize; sets.len()];
    for _ in 0..total {
        let separates = (0..inst.points.len()).all(|k| choice.iter().enumerate().any(|(i, &j)| values[i][j][k] > tol));
        if !separates {
            return Ok(false);
        }
        for (i, c) in choice.iter_mut().enumerate() {
            *c += 1;
            if *c < sets[i].len() {
                break;
            }
            *c = 0;
        }
    }
    Ok(true)
}

/// One ball per direction: witnesses on `ℝ⁺x_i` for the points assigned to
/// `x_i`, merged at the largest parameter; directions with nothing assigned
/// keep `B(x_i, ‖x_i‖/2)`.
fn ray_covering<S: Scalar>(
    space: &Space<S>,
    directions: &[Vector<S>],
    points: &[Vector<S>],
    assignment: &[usize],
) -> Result<Vec<Ball<S>>> {
    let stopping = Stopping::FractionOfLimit(S::lit(COVER_FRACTION));
    let mut per_dir: Vec<Vec<(S, Ball<S>)>> = vec![Vec::new(); directions.len()];
    for (a, &i) in points.iter().zip(assignment) {
        let x = &directions[i];
        match positive_witness_with(space, x, a, stopping)? {
            WitnessOutcome::Found(w) => per_dir[i].push((w.lambda, Ball { center: x.scale(w.lambda), radius: w.radius })),
            WitnessOutcome::Absent(_) => {
                return Err(Error::Inconsistency("assigned direction has no positive witness".into()));
            }
        }
    }
    directions
        .iter()
        .zip(per_dir)
        .map(|(x, found)| {
            if found.is_empty() {
                let nx = space.norm(x)?;
                return Ok(Ball { center: x.clone(), radius: nx / S::lit(2.0) });
            }
            let lambda = found.iter().map(|(l, _)| *l).fold(S::neg_infinity(), S::max);
            let balls: Vec<Ball<S>> = found.into_iter().map(|(_, b)| b).collect();
            merge_collinear(space, &balls, x, lambda)
        })
        .collect()
}

/// Checks the necessity direction on a given covering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessityCheck {
    /// Every ball is centred on `ℝ⁺x_i` (ball `i` on direction `i`) and
    /// excludes the origin.
    pub well_formed: bool,
    pub all_points_covered: bool,
    /// Each covered point has `ρ'₋(x_i, a) > 0` for a ball `i` covering it.
    pub derivative_positive: bool,
    /// First point breaking coverage or positivity.
    pub offending_point: Option<usize>,
}

impl NecessityCheck {
    pub fn holds(&self) -> bool {
        self.well_formed && self.all_points_covered && self.derivative_positive
    }
}

/// If `B(λ_i x_i, r_i)` with `r_i ≤ λ_i‖x_i‖` covers `A`, then every covered
/// point has positive `ρ'₋` along its ball's direction.
pub fn necessity_check<S: Scalar>(inst: &SelectionInstance<S>, balls: &[Ball<S>]) -> Result<NecessityCheck> {
    let space = &inst.space;
    let mut well_formed = balls.len() == inst.directions.len();
    for (b, x) in balls.iter().zip(&inst.directions) {
        let lambda = b.center.as_slice().iter().zip(x.as_slice()).map(|(&c, &d)| c * d).sum::<S>()
            / x.as_slice().iter().map(|&d| d * d).sum::<S>();
        let off = space.dist(&b.center, &x.scale(lambda))?;
        well_formed &= lambda > S::zero() && off <= S::lit(1e-9) * S::one().max(lambda) && b.excludes_origin(space)?;
    }
    let mut all_points_covered = true;
    let mut derivative_positive = true;
    let mut offending_point = None;
    for (k, a) in inst.points.iter().enumerate() {
        let mut covered_by = None;
        for (i, b) in balls.iter().enumerate().take(inst.directions.len()) {
            if b.slack(space, a)? > S::zero() {
                covered_by = Some(i);
                break;
            }
        }
        let ok = match covered_by {
            None => {
                all_points_covered = false;
                false
            }
            Some(i) => {
                let positive = classify_pair(space, &inst.directions[i], a)?.tag == PairTag::PositiveSide;
                derivative_positive &= positive;
                positive
            }
        };
        if !ok && offending_point.is_none() {
            offending_point = Some(k);
        }
    }
    Ok(NecessityCheck { well_formed, all_points_covered, derivative_positive, offending_point })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct EquivalenceReport<S> {
    pub verdict: SeparationVerdict<S>,
    /// Covering built from witnesses when the instance is separated.
    pub covering: Option<Covering<S>>,
    pub covering_certified: bool,
    /// Necessity checked on the constructed covering.
    pub necessity: Option<NecessityCheck>,
    /// When not separated: the failing point has certified witness absence on
    /// every ray, so no covering with centres on those rays exists.
    pub absence_certified: Option<bool>,
    pub agree: bool,
}

pub fn separation_ballcover_equivalence<S: Scalar>(inst: &SelectionInstance<S>) -> Result<EquivalenceReport<S>> {
    let space = &inst.space;
    let verdict = positively_separates(inst)?;
    if verdict.separated {
        let assignment: Vec<usize> = verdict.witness_index.iter().map(|w| w.expect("separated")).collect();
        let balls = ray_covering(space, &inst.directions, &inst.points, &assignment)?;
        let target = TargetSet::finite_points(space, inst.points.clone())?;
        let cert = verify_cover(space, &balls, &target)?;
        let necessity = necessity_check(inst, &balls)?;
        let covering_certified = cert.full_cover;
        let agree = covering_certified && necessity.holds();
        return Ok(EquivalenceReport {
            verdict,
            covering: Some(Covering { balls, certificate: Some(cert) }),
            covering_certified,
            necessity: Some(necessity),
            absence_certified: None,
            agree,
        });
    }
    let k = verdict.failing_point.expect("not separated");
    let a = &inst.points[k];
    let mut absent = true;
    for x in &inst.directions {
        absent &= !positive_witness(space, x, a)?.is_found();
    }
    Ok(EquivalenceReport {
        verdict,
        covering: None,
        covering_certified: false,
        necessity: None,
        absence_certified: Some(absent),
        agree: absent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrthogonalHit<S> {
    pub closure_index: usize,
    pub direction_index: usize,
    pub rho_minus: S,
    pub rho_plus: S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConclusionStatus {
    /// Every closure point has some `ρ'₋(x_i, a) > tol`.
    Verified,
    /// The hypotheses hold but this closure point is not separated.
    Failed { closure_index: usize },
    /// The open instance is not separated, so there is nothing to extend.
    NotApplicable,
    /// A hypothesis fails; the failure is demonstrated instead.
    HypothesisViolated,
}

/// Shows the consequence of a violated hypothesis on one closure point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureDemonstration<S> {
    pub closure_index: usize,
    /// `ρ'₋(x_i, a)` per direction.
    pub rho_minus: Vec<S>,
    /// No direction admits a positive witness for this point.
    pub no_positive_witness: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct ClosureReport<S> {
    /// `min ‖a‖` over the instance and closure points.
    pub min_norm: S,
    /// Hypothesis (i) fails: the closure reaches the origin.
    pub zero_distance: bool,
    /// Hypothesis (ii) fails at these pairs: `x_i ⊥_B a`.
    pub orthogonal_hits: Vec<OrthogonalHit<S>>,
    pub hypotheses_hold: bool,
    pub instance_separated: bool,
    pub conclusion: ConclusionStatus,
    pub demonstration: Option<FailureDemonstration<S>>,
    /// Certificate of the witness covering over instance ∪ closure points.
    pub closure_covering: Option<CoverageCertificate<S>>,
}

/// Checks the hypotheses under which separation of `A` extends to its
/// closure (`d(0, Ā) > 0` and `Ā ∩ ⋃ x_i^⊥ = ∅`), then either verifies the
/// extension and covers the closure or demonstrates the failure.
pub fn closure_precondition_check<S: Scalar>(
    inst: &SelectionInstance<S>,
    closure_points: &[Vector<S>],
) -> Result<ClosureReport<S>> {
    let space = &inst.space;
    let tol = space.tol().analytic;
    let mut min_norm = S::infinity();
    for a in inst.points.iter().chain(closure_points) {
        min_norm = min_norm.min(space.norm(a)?);
    }
    let zero_distance = min_norm <= tol;
    let mut orthogonal_hits = Vec::new();
    for (k, a) in closure_points.iter().enumerate() {
        if space.norm(a)? <= tol {
            continue;
        }
        for (i, x) in inst.directions.iter().enumerate() {
            if bj_orthogonal(space, x, a)? {
                let r = rho_analytic(space, x, a)?;
                orthogonal_hits.push(OrthogonalHit {
                    closure_index: k,
                    direction_index: i,
                    rho_minus: r.rho_minus,
                    rho_plus: r.rho_plus,
                });
            }
        }
    }
    let hypotheses_hold = !zero_distance && orthogonal_hits.is_empty();
    let instance_separated = positively_separates(inst)?.separated;

    let table = rho_table(inst, closure_points)?;
    let unseparated = table.iter().position(|row| best_direction(row, tol).is_none());

    let (conclusion, demonstration) = if !hypotheses_hold {
        let k = if zero_distance {
            closure_points.iter().position(|a| space.norm(a).is_ok_and(|n| n <= tol))
        } else {
            Some(orthogonal_hits[0].closure_index)
        };
        let demo = match k {
            Some(k) if space.norm(&closure_points[k])? > tol => {
                let mut no_positive_witness = true;
                for x in &inst.directions {
                    no_positive_witness &= !positive_witness(space, x, &closure_points[k])?.is_found();
                }
                Some(FailureDemonstration { closure_index: k, rho_minus: table[k].clone(), no_positive_witness })
            }
            // The origin lies in every ball's complement, so nothing covers it.
            Some(k) => Some(FailureDemonstration {
                closure_index: k,
                rho_minus: vec![S::zero(); inst.directions.len()],
                no_positive_witness: true,
            }),
            None => None,
        };
        (ConclusionStatus::HypothesisViolated, demo)
    } else if !instance_separated {
        (ConclusionStatus::NotApplicable, None)
    } else if let Some(k) = unseparated {
        (ConclusionStatus::Failed { closure_index: k }, None)
    } else {
        (ConclusionStatus::Verified, None)
    };

    let closure_covering = if conclusion == ConclusionStatus::Verified {
        let all: Vec<Vector<S>> = inst.points.iter().chain(closure_points).cloned().collect();
        let full = rho_table(inst, &all)?;
        let assignment: Vec<usize> = full.iter().map(|row| best_direction(row, tol).expect("verified")).collect();
        let balls = ray_covering(space, &inst.directions, &all, &assignment)?;
        Some(verify_cover(space, &balls, &TargetSet::finite_points(space, all)?)?)
    } else {
        None
    };

    Ok(ClosureReport {
        min_norm,
        zero_distance,
        orthogonal_hits,
        hypotheses_hold,
        instance_separated,
        conclusion,
        demonstration,
        closure_covering,
    })
}
