//! Distributionally robust Bayesian optimization with continuous context,
//! under Wasserstein ambiguity.
//!
//! A learner repeatedly picks a decision `x`, observes an exogenous context
//! `c` and a noisy reward `f(x, c)`, and wants to maximize the expected
//! reward under a context distribution it does not know exactly. The
//! distribution is only known to lie in a Wasserstein ball, either given
//! (general setting) or centered on the empirical distribution of past
//! contexts with a shrinking radius (data-driven setting).
//!
//! The crate provides:
//!
//! - [`kernel`]: bounded stationary kernels with a feature-map Lipschitz
//!   constant.
//! - [`surrogate`]: the kernel ridge posterior (mean, scale, confidence
//!   width, mean-norm bound, information gain) with O(t^2) incremental
//!   updates.
//! - [`ambiguity`]: ball centers, radius schedules, and a 1-d Wasserstein
//!   oracle.
//! - [`acquisition`]: the Lipschitz-penalized robust expected-UCB rule, its
//!   plain, min-over-context, and context-blind baselines, and a
//!   deterministic multi-start maximizer.
//! - [`environments`]: synthetic test problems with contextual couplings.
//! - [`regret`]: frozen-panel expected-regret evaluation against a grid +
//!   refinement oracle.
//! - [`harness`]: JSON-configured multi-seed experiment runner with CSV/SVG
//!   outputs.

pub mod acquisition;
pub mod ambiguity;
pub mod domain;
pub mod environments;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod linalg;
pub mod regret;
pub mod surrogate;

pub use domain::BoxDomain;
pub use error::{Error, Result};
