//! Coordinate vectors in the primal space and linear functionals on it.

use std::ops::{Add, Index, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

macro_rules! coord_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name<S>(Vec<S>);

        impl<S: Scalar> $name<S> {
            /// Wraps `coords`, rejecting NaN and infinities.
            pub fn new(coords: Vec<S>) -> Result<Self> {
                if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
                    return Err(Error::NonFinite { index });
                }
                Ok(Self(coords))
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![S::zero(); dim])
            }

            /// The `i`-th standard basis element.
            pub fn basis(dim: usize, i: usize) -> Self {
                let mut v = vec![S::zero(); dim];
                v[i] = S::one();
                Self(v)
            }

            pub fn from_f64s(coords: &[f64]) -> Result<Self> {
                Self::new(coords.iter().map(|&c| S::lit(c)).collect())
            }

            #[inline]
            pub fn dim(&self) -> usize {
                self.0.len()
            }

            #[inline]
            pub fn as_slice(&self) -> &[S] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<S> {
                self.0
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|c| c.is_zero())
            }

            pub fn scale(&self, alpha: S) -> Self {
                Self(self.0.iter().map(|&c| c * alpha).collect())
            }

            /// Euclidean length, used only for conversions between norms.
            pub fn euclidean(&self) -> S {
                euclidean(&self.0)
            }

            pub fn to_f64s(&self) -> Vec<f64> {
                self.0.iter().map(|c| c.as_f64()).collect()
            }

            pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
                if self.0.len() != expected {
                    return Err(Error::DimensionMismatch { expected, found: self.0.len() });
                }
                Ok(())
            }

            pub(crate) fn from_raw(coords: Vec<S>) -> Self {
                Self(coords)
            }
        }

        impl<S> Index<usize> for $name<S> {
            type Output = S;
            fn index(&self, i: usize) -> &S {
                &self.0[i]
            }
        }

        impl<S: Scalar> Add for &$name<S> {
            type Output = $name<S>;
            fn add(self, rhs: Self) -> $name<S> {
                $name(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
            }
        }

        impl<S: Scalar> Sub for &$name<S> {
            type Output = $name<S>;
            fn sub(self, rhs: Self) -> $name<S> {
                $name(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
            }
        }

        impl<S: Scalar> Neg for &$name<S> {
            type Output = $name<S>;
            fn neg(self) -> $name<S> {
                $name(self.0.iter().map(|&a| -a).collect())
            }
        }

    };
}

coord_newtype!(
    /// A point of the primal space.
    Vector
);

coord_newtype!(
    /// A linear functional, acting by the standard dot product.
    Functional
);

impl<S: Scalar> Functional<S> {
    /// `f(x)`, with a dimension check.
    pub fn apply(&self, x: &Vector<S>) -> Result<S> {
        x.check_dim(self.dim())?;
        Ok(dot(self.as_slice(), x.as_slice()))
    }

    pub(crate) fn apply_raw(&self, x: &[S]) -> S {
        dot(self.as_slice(), x)
    }
}

/// `Σ f_i x_i`.
pub fn dual_pair<S: Scalar>(f: &Functional<S>, x: &Vector<S>) -> Result<S> {
    f.apply(x)
}

#[inline]
pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&u, &v)| acc + u * v)
}

pub(crate) fn euclidean<S: Scalar>(a: &[S]) -> S {
    let m = a.iter().fold(S::zero(), |m, c| m.max(c.abs()));
    if m.is_zero() {
        return m;
    }
    m * a.iter().map(|&c| (c / m) * (c / m)).sum::<S>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_pair_examples() {
        let f = Functional::<f64>::from_f64s(&[1.0, 0.0]).unwrap();
        let x = Vector::from_f64s(&[0.0, 1.0]).unwrap();
        assert_eq!(dual_pair(&f, &x).unwrap(), 0.0);

        let f = Functional::<f64>::from_f64s(&[1.0, 1.0]).unwrap();
        let x = Vector::from_f64s(&[2.0, 3.0]).unwrap();
        assert_eq!(dual_pair(&f, &x).unwrap(), 5.0);

        let f = Functional::<f64>::from_f64s(&[0.5, -0.5]).unwrap();
        let x = Vector::from_f64s(&[1.0, 1.0]).unwrap();
        assert_eq!(dual_pair(&f, &x).unwrap(), 0.0);
    }

    #[test]
    fn dual_pair_rejects_mismatch() {
        let f = Functional::<f64>::from_f64s(&[1.0, 0.0, 0.0]).unwrap();
        let x = Vector::from_f64s(&[0.0, 1.0]).unwrap();
        assert!(matches!(
            dual_pair(&f, &x),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Vector::<f64>::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(Vector::<f32>::new(vec![f32::INFINITY]).is_err());
    }
}
