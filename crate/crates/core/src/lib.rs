//! Quaternionic slice-regular power series.
//!
//! Series are written `f(q) = Σ qⁿ aₙ` with quaternion coefficients on the
//! right. The crate provides the regular (⋆) product and its companions,
//! evaluation at quaternionic points, and checkers for the Carathéodory and
//! Borel-Carathéodory inequalities on the unit ball of `H`.

pub mod caratheodory;
pub mod error;
pub mod evaluation;
pub mod quaternion;
pub mod sampling;
pub mod series;

pub use caratheodory::{
    averaging_identity_check, averaging_identity_check_with_root, check_borel_caratheodory, check_caratheodory_bounds,
    check_coefficient_bounds, check_extremal_coefficients, equivalence_coefficient_margins, equivalence_transform,
    kernel_eval_closed, kernel_series, mix_series, mobius_transform, sup_re_estimate, BorelReport, BoundReport,
    ExtremalCheck, HerglotzMix, Inequality, KernelSpec, Margin,
};
pub use error::{Error, Result};
pub use evaluation::{eval, pointwise_star_eval, quotient_eval, split, t_map, tail_bound, SplitPair};
pub use quaternion::{exp_slice, qconj, qinv, qmul, slice_decompose, unit_of, Quaternion, SlicePoint, UnitImaginary};
pub use series::{leibniz_residual, star_mul, QSeries, TailBound};
