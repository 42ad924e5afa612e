//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real field the library computes over: `f32` or `f64`.
///
/// Linear-algebra kernels (SVD, LP) run in `f64` regardless of the scalar
/// and convert at the boundary.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Relative tolerance used to decide that two norm-attaining values tie.
    #[inline]
    fn tie_tol() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Tolerance set carried by a [`Space`](crate::Space).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<S> {
    /// Sign decisions on analytic quantities.
    pub analytic: S,
    /// Comparisons against finite-difference estimates.
    pub finite_difference: S,
    /// Slack allowed on certificate inequalities.
    pub slack: S,
}

impl<S: Scalar> Default for Tolerances<S> {
    fn default() -> Self {
        Self {
            analytic: S::lit(1e-9),
            finite_difference: S::lit(1e-5),
            slack: S::lit(1e-12),
        }
    }
}
