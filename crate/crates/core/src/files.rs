//! JSON exchange formats for coverings and separation instances (`f64`).

use serde::{Deserialize, Serialize};

use crate::covering::{Ball, CoverageCertificate, Covering, TargetSet};
use crate::error::{Error, Result};
use crate::separation::SelectionInstance;
use crate::spaces::Space;
use crate::vector::{Functional, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    UnitSphere { delta: f64 },
    FinitePoints { points: Vec<Vector<f64>> },
}

impl TargetSpec {
    pub fn build(&self, space: &Space<f64>) -> Result<TargetSet<f64>> {
        match self {
            TargetSpec::UnitSphere { delta } => TargetSet::unit_sphere(space, *delta),
            TargetSpec::FinitePoints { points } => TargetSet::finite_points(space, points.clone()),
        }
    }
}

/// `{"balls": [...], "target": {...}, "certificate": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringFile {
    pub balls: Vec<Ball<f64>>,
    /// Absent for bare candidate coverings, e.g. adversary input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CoverageCertificate<f64>>,
}

impl CoveringFile {
    pub fn new(covering: Covering<f64>, target: TargetSpec) -> Self {
        Self { balls: covering.balls, target: Some(target), certificate: covering.certificate }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("covering file: {e}")))?;
        for (i, b) in file.balls.iter().enumerate() {
            if !(b.radius > 0.0) || !b.radius.is_finite() {
                return Err(Error::InvalidArgument(format!("covering file: ball {i} has radius {}", b.radius)));
            }
        }
        Ok(file)
    }

    /// Pretty JSON with a trailing newline; stable across read/write cycles.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("covering file serializes");
        s.push('\n');
        s
    }
}

/// `{"space": {...}, "directions": [...], "points": [...], "closure_points": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub space: Space<f64>,
    pub directions: Vec<Vector<f64>>,
    pub points: Vec<Vector<f64>>,
    #[serde(default)]
    pub closure_points: Vec<Vector<f64>>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("instance file: {e}")))
    }

    pub fn instance(&self) -> Result<SelectionInstance<f64>> {
        for p in &self.closure_points {
            self.space.check(p)?;
        }
        SelectionInstance::new(self.space.clone(), self.directions.clone(), self.points.clone())
    }
}

/// A list of functionals, `[[f_11, ...], ...]` or `{"functionals": [...]}`.
pub fn functionals_from_json(text: &str) -> Result<Vec<Functional<f64>>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Form {
        Bare(Vec<Functional<f64>>),
        Wrapped { functionals: Vec<Functional<f64>> },
    }
    match serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("functionals file: {e}")))? {
        Form::Bare(f) | Form::Wrapped { functionals: f } => Ok(f),
    }
}

pub fn space_from_json(text: &str) -> Result<Space<f64>> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("space file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::symmetric_cover_2n;

    #[test]
    fn covering_round_trip_is_byte_stable() {
        let space = Space::<f64>::lp(2, 3.0).unwrap();
        let fs = [Functional::basis(2, 0), Functional::basis(2, 1)];
        let c = symmetric_cover_2n(&space, &fs, 0.05).unwrap();
        let file = CoveringFile::new(c, TargetSpec::UnitSphere { delta: 0.05 });
        let text = file.to_json();
        let back = CoveringFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn instance_and_functionals() {
        let text = r#"{"space": {"dim": 2, "norm": {"kind": "lp", "p": "inf"}},
                       "directions": [[1, 1]], "points": [[1, -1]]}"#;
        let file = InstanceFile::from_json(text).unwrap();
        assert!(file.closure_points.is_empty());
        assert_eq!(file.instance().unwrap().points().len(), 1);

        assert_eq!(functionals_from_json("[[1, 0], [0, 1]]").unwrap().len(), 2);
        assert_eq!(functionals_from_json(r#"{"functionals": [[1, 0]]}"#).unwrap().len(), 1);
        assert!(functionals_from_json("[[1, \"a\"]]").is_err());

        let bare = CoveringFile::from_json(r#"{"balls": [{"center": [2, 0], "radius": 1.9}]}"#).unwrap();
        assert!(bare.target.is_none() && bare.certificate.is_none());
        assert!(CoveringFile::from_json(r#"{"balls": [{"center": [2, 0], "radius": -1}]}"#).is_err());
    }

    #[test]
    fn targets() {
        let space = Space::<f64>::lp(2, 2.0).unwrap();
        let t: TargetSpec = serde_json::from_str(r#"{"kind": "finite_points", "points": [[1, 0]]}"#).unwrap();
        assert_eq!(t.build(&space).unwrap().len(), 1);
        let t: TargetSpec = serde_json::from_str(r#"{"kind": "unit_sphere", "delta": 0.5}"#).unwrap();
        assert!(t.build(&space).unwrap().len() > 1);
    }
}
