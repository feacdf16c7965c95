//! Knot sequences, spline spaces of arbitrary smoothness and B-spline
//! evaluation.

mod function;
mod knots;
mod space;

pub use function::SplineFunction;
pub use knots::KnotSequence;
pub use space::SplineSpace;

/// Knot sequence with `n_interior + 2` equispaced break points.
pub fn uniform_knots(a: f64, b: f64, n_interior: usize) -> crate::Result<KnotSequence> {
    KnotSequence::uniform(a, b, n_interior)
}

/// Spline space of degree `p` and smoothness `k` on `knots`.
pub fn make_space(knots: KnotSequence, p: usize, k: i32) -> crate::Result<SplineSpace> {
    SplineSpace::new(knots, p, k)
}
