//! Desk-scale model of a telecom-wavelength quantum repeater built from single
//! atoms in crossed optical cavities.
//!
//! Modules, bottom-up:
//!
//! * [`dynamics`]: a small open-quantum-system engine, with the Lindblad
//!   master equation and Monte Carlo wave-function trajectories.
//! * [`cavity`]: Gaussian-resonator and cavity-QED design formulas.
//! * [`cascade`]: the ⁸⁷Rb cascade emitter in crossed cavities, built on the
//!   engine. Covers pulse calibration, output fluxes, success probability and
//!   the multi-photon bound.
//! * [`indist`]: kernel-density reconstruction of conditional telecom
//!   envelopes, and Hong-Ou-Mandel contrast.
//! * [`herald`]: closed-form fidelity loss from a degenerate heralding mode.
//! * [`repeater`]: chain rates, storage times and the swap-strategy Monte Carlo.
//! * [`keyrate`]: Bell-diagonal algebra, secret fraction and purification.

pub mod cascade;
pub mod cavity;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod herald;
pub mod indist;
pub mod keyrate;
pub mod repeater;
pub mod rng;

pub use error::{Error, Result};
