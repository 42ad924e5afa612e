//! Golden-section minimization of a unimodal function on a closed interval.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum<S> {
    pub arg: S,
    pub value: S,
}

/// Runs exactly `iterations` golden-section reductions of `[lo, hi]`.
///
/// The best point ever evaluated is returned, endpoints included, so the
/// result is never worse than `f(lo)`, `f(hi)` or any interior probe.
pub fn golden_section<S: Scalar>(f: impl Fn(S) -> S, lo: S, hi: S, iterations: usize) -> Minimum<S> {
    let inv_phi = (S::lit(5.0).sqrt() - S::one()) / S::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));

    let mut best = Minimum { arg: lo, value: f(lo) };
    for (arg, value) in [(hi, f(hi)), (c, fc), (d, fd)] {
        if value < best.value {
            best = Minimum { arg, value };
        }
    }
    for _ in 0..iterations {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc < best.value {
                best = Minimum { arg: c, value: fc };
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd < best.value {
                best = Minimum { arg: d, value: fd };
            }
        }
    }
    best
}
