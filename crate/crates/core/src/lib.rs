//! Inertial dynamics with viscous damping, Hessian-driven damping and time
//! scaling on the Moreau envelope of a nonsmooth convex function.
//!
//! * [`prox`]: objective catalog, proximal maps, Moreau envelopes and a
//!   brute-force prox oracle.
//! * [`schedule`]: monomial parameter functions `lambda`, `beta`, `b`.
//! * [`dynamics`]: the first-order reformulation and its adaptive integration.
//! * [`analysis`]: energy, parameter conditions, integrals and rate fits.
//! * [`cli`]: experiment configs, figure presets and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod dynamics;
mod error;
pub mod prox;
pub mod schedule;

pub use error::{Error, Result};
pub use prox::{MoreauEval, ProxFunction, ProxKind};
pub use schedule::{default_b0, PolynomialSchedule, ScheduleEval};
