//! Polynomial root localization.
//!
//! Two independent root finders:
//!
//! * [`descent`]: repeated Argand steps that decrease `|p(v) - t|`, with
//!   [`all_roots`] deflating one root at a time.
//! * [`matcher::gauss_root`]: traces the level curves `Re f = ε₁` and
//!   `Im f = ε₂` from a large circle inward, finds a pair of arcs that must
//!   cross, and pins the crossing with a Miranda box.
//!
//! [`series`] holds truncated power series and the implicit-function
//! contraction used for local branches of `F(x, y) = 0`.

pub mod annulus;
pub mod bounds;
pub mod descent;
pub mod error;
pub mod matcher;
pub mod poly;
pub mod series;
pub mod tracer;

pub use num_complex::Complex64;

pub use annulus::{resolve_annulus, BoundaryNode, NodeKind, NodeSet};
pub use bounds::{boundary_min, openness_radius, reich_radius};
pub use descent::{all_roots, descent_step, preimage_count, solve_root, DescentStepReport};
pub use error::{Error, Result};
pub use matcher::{find_separated_pair, gauss_root, gauss_run, locate_crossing, GaussOptions, GaussRun};
pub use poly::{Field, HarmonicEval, Poly};
pub use series::{implicit_series_solve, BivariateSeries, TruncatedSeries};
pub use tracer::{compute_matchings, perturb_regular, trace_curve, Arc, Matching, PerturbedProblem, StepControl};
