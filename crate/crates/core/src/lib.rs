#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Characteristic operators of quantum input-plant-output (SLH) models on
//! finite-dimensional plant spaces.
//!
//! The crate is organised bottom-up: [`matrix`] and [`operators`] provide the
//! dense complex algebra, [`model`] the validated triples and their
//! composition, [`characteristic`] the evaluators of `T(s)`, [`stratonovich`]
//! the coefficient conversions, [`reduction`] the block (Schur–Feshbach)
//! machinery, [`adiabatic`] the k → ∞ limits and [`zoo`] a catalogue of
//! worked models with closed-form oracles.

pub mod adiabatic;
pub mod block;
pub mod characteristic;
pub mod error;
pub mod matrix;
pub mod model;
pub mod operators;
pub mod reduction;
pub mod stratonovich;
pub mod zoo;

pub use block::{BlockKind, BlockOperatorMatrix};
pub use error::{Result, SlhError};
pub use matrix::{CMatrix, C64};
pub use model::{series_product, SlhModel};
