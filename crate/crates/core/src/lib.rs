//! Exact enumerative geometry of nodal plane curves.
//!
//! - [`exactseries`]: truncated power series over exact rationals
//! - [`tangency`]: tangency sequences and recursion states
//! - [`chengine`]: memoized Caporaso–Harris recursion for Severi degrees
//! - [`modforms`]: the quasimodular series `u`, `B₃`, `B₄` and `Δ`
//! - [`nodepoly`]: node polynomials, thresholds and their exponential structure
//! - [`gyz`]: extraction of `B₁`, `B₂` and prediction of Severi degrees

pub mod chengine;
pub mod exactseries;
pub mod gyz;
pub mod modforms;
pub mod nodepoly;
pub mod tangency;
