//! Symmetric plane-curve singularities and equivariant link-diagram movies.
//!
//! The library is organised bottom-up:
//!
//! * [`realalg`] — polynomial arithmetic, real-root isolation, and
//!   two-branch intersection solving (the numeric kernel);
//! * [`germ`] — equivariant multigerms of plane curves and their jet-level
//!   invariants (multiplicity, cusp type, tangency order, axis relation);
//! * [`strata`] — the classifier sorting a multigerm into the regular
//!   stratum, one of 8 codimension-1 strata, one of 18 codimension-2
//!   strata, a coincidence, or a deeper degeneration;
//! * [`bifurcation`] — the versal-deformation catalog for the 18
//!   codimension-2 strata and the circle-traversal engine that reads off
//!   loops of symmetric Reidemeister moves;
//! * [`diagram`] — combinatorial transvergent link diagrams with a mirror
//!   involution and the full catalog of symmetric moves as local rewrites;
//! * [`movie`] — movies of diagrams, trace invariants, the 39 elementary
//!   loops, and movie-move rewriting;
//! * [`cli`] — the command-line front end (`classify`, `loops`, `movie`,
//!   `render`).
//!
//! The default numeric tolerance can be overridden with the
//! `INVOLINK_TOL` environment variable.

pub mod bifurcation;
pub mod cli;
pub mod diagram;
pub mod germ;
pub mod movie;
pub mod realalg;
pub mod strata;

/// Default residual tolerance used throughout the numeric kernel.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Resolve the working tolerance: `INVOLINK_TOL` if set and parseable,
/// otherwise [`DEFAULT_TOL`].
pub fn working_tol() -> f64 {
    std::env::var("INVOLINK_TOL")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(DEFAULT_TOL)
}
