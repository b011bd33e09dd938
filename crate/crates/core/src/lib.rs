//! Analysis toolkit for a palimpsest memory model with binary neurons and
//! binary synapses.
//!
//! A network of `N + 1` binary neurons learns an external signal through `r`
//! presentations and then forgets it as further random signals arrive. The
//! synaptic current onto one neuron, restricted to the `K` presynaptic neurons
//! selective to the learnt signal, is a Markov chain on `{0, ..., K}`. This
//! crate computes its law three independent ways and evaluates the analytic
//! memory-lifetime bounds built on it:
//!
//! * [`exact`] — dense transition matrices, spectra, distribution propagation,
//!   the invariant measure, and exact error curves for the threshold readout;
//! * [`mixture`] — the Binomial-mixture representation: the mixing-law update
//!   operator, moment-space dynamics, atomic (weighted-Dirac) dynamics with
//!   pruning, the stationary mixing law, and support recursions;
//! * [`montecarlo`] — deterministic, parallel replica simulation of the
//!   learning/forgetting protocol;
//! * [`lifetime`] — Chernoff tail bounds, the decision threshold, and the
//!   guaranteed-retention-time formulas with their large-`N` equivalents;
//! * [`model`] — parameters, derived constants, validation, and the
//!   asymptotic-regime classification.

pub mod binom;
mod dist;
pub mod exact;
pub mod lifetime;
pub mod mixture;
pub mod model;
pub mod montecarlo;

pub use dist::{tv_distance, DistVec};
pub use model::ModelParams;
