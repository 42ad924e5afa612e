//! Certified finite nets of the unit sphere.
//!
//! A net is generated lazily from its grid description: point `k` is
//! recomputed on demand, so nets with millions of points cost no memory.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::Space;
use crate::vector::Vector;

/// Limits on net generation.
#[derive(Clone, Copy, Debug)]
pub struct NetOptions {
    pub dim_cap: usize,
    pub max_points: usize,
}

impl Default for NetOptions {
    fn default() -> Self {
        Self { dim_cap: 6, max_points: 50_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    /// One point; valid once `delta ≥ 2`, the diameter bound of the sphere.
    Single,
    /// `count` equally spaced angles, normalized onto the sphere (dim 2).
    Angular { count: usize },
    /// Grid with `per_axis` nodes per coordinate on each face of the cube
    /// `‖c‖∞ = 1`, normalized onto the sphere (dim ≥ 3).
    CubeFaces { per_axis: usize },
}

/// Unit-norm points such that every unit vector lies within `resolution`
/// (in the space's norm) of one of them.
#[derive(Clone, Debug)]
pub struct SphereNet<S> {
    space: Space<S>,
    layout: Layout,
    len: usize,
    resolution: S,
}

/// Builds a net with the default [`NetOptions`].
pub fn unit_sphere_net<S: Scalar>(space: &Space<S>, delta: S) -> Result<SphereNet<S>> {
    unit_sphere_net_with(space, delta, NetOptions::default())
}

pub fn unit_sphere_net_with<S: Scalar>(space: &Space<S>, delta: S, opts: NetOptions) -> Result<SphereNet<S>> {
    if !(delta > S::zero()) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("net resolution must be positive, got {delta}")));
    }
    let n = space.dim();
    if n > opts.dim_cap {
        return Err(Error::DimensionCap { dim: n, cap: opts.dim_cap });
    }
    let two = S::lit(2.0);
    let (layout, needed): (Layout, u128) = if delta >= two || n == 1 {
        // In dimension 1 the sphere is {±e}; both points are listed below.
        if n == 1 {
            (Layout::CubeFaces { per_axis: 1 }, 2)
        } else {
            (Layout::Single, 1)
        }
    } else if n == 2 {
        // Adjacent chord 2·sin(π/N) ≤ δ₂ = δ·c1 / (4·c2).
        let (c1, c2) = space.equivalence_constants();
        let d2 = (delta * c1 / (S::lit(4.0) * c2)).as_f64();
        let count = (std::f64::consts::PI / (d2 / 2.0).asin()).ceil() as u128;
        (Layout::Angular { count: count.max(3) as usize }, count.max(3))
    } else {
        // ‖u − y‖ ≤ 2·‖c − g‖ / ‖c‖ ≤ 2·(h/2)·A / L with h the node spacing.
        let (l, a) = space.cube_constants();
        let h_max = (delta * l / a).as_f64();
        let per_axis = (2.0 / h_max).ceil() as u128 + 1;
        let faces = 2 * n as u128;
        let needed = per_axis
            .checked_pow(n as u32 - 1)
            .and_then(|c| c.checked_mul(faces))
            .unwrap_or(u128::MAX);
        (Layout::CubeFaces { per_axis: per_axis.min(usize::MAX as u128) as usize }, needed)
    };
    if needed > opts.max_points as u128 {
        return Err(Error::NetTooLarge { needed, limit: opts.max_points });
    }
    Ok(SphereNet { space: space.clone(), layout, len: needed as usize, resolution: delta })
}

impl<S: Scalar> SphereNet<S> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn resolution(&self) -> S {
        self.resolution
    }

    pub fn space(&self) -> &Space<S> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Writes point `k` (in lexicographic grid order) into `out`.
    pub fn point_into(&self, k: usize, out: &mut [S]) {
        debug_assert!(k < self.len);
        let n = self.dim();
        match self.layout {
            Layout::Single => {
                out.iter_mut().for_each(|c| *c = S::zero());
                out[0] = S::one();
            }
            Layout::Angular { count } => {
                let theta = S::TAU() * S::from_usize(k).unwrap() / S::from_usize(count).unwrap();
                out[0] = theta.cos();
                out[1] = theta.sin();
            }
            Layout::CubeFaces { per_axis } => {
                let cells = self.len / (2 * n);
                let face = k / cells;
                let mut rem = k % cells;
                let axis = face / 2;
                let sign = if face.is_multiple_of(2) { S::one() } else { -S::one() };
                let step = if per_axis > 1 {
                    S::lit(2.0) / S::from_usize(per_axis - 1).unwrap()
                } else {
                    S::zero()
                };
                // Last free axis varies fastest.
                for j in (0..n).rev() {
                    if j == axis {
                        out[j] = sign;
                        continue;
                    }
                    let idx = rem % per_axis;
                    rem /= per_axis;
                    out[j] = -S::one() + step * S::from_usize(idx).unwrap();
                }
            }
        }
        let norm = self.space.norm_raw(out);
        out.iter_mut().for_each(|c| *c = *c / norm);
    }

    pub fn point(&self, k: usize) -> Vector<S> {
        let mut out = vec![S::zero(); self.dim()];
        self.point_into(k, &mut out);
        Vector::from_raw(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vector<S>> + '_ {
        (0..self.len).map(move |k| self.point(k))
    }

    /// Folds `f(k, point)` over all points in parallel, reducing with an
    /// associative, commutative `combine` so results do not depend on
    /// scheduling.
    pub fn par_fold<T, F, C>(&self, identity: T, f: F, combine: C) -> T
    where
        T: Clone + Send + Sync,
        F: Fn(T, usize, &[S]) -> T + Send + Sync,
        C: Fn(T, T) -> T + Send + Sync,
    {
        let n = self.dim();
        (0..self.len)
            .into_par_iter()
            .fold(
                || (identity.clone(), vec![S::zero(); n]),
                |(acc, mut buf), k| {
                    self.point_into(k, &mut buf);
                    (f(acc, k, &buf), buf)
                },
            )
            .map(|(acc, _)| acc)
            .reduce(|| identity.clone(), &combine)
    }
}
