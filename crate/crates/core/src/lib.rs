//! Link dynamics between two nodes moving as Ornstein-Uhlenbeck processes in the plane,
//! with optional Rayleigh fading.
//!
//! The squared separation distance is a Cox-Ingersoll-Ross process, which gives closed
//! forms for the distance and link-SNR laws. This crate evaluates those laws
//! ([`analytic`]), simulates the underlying processes ([`procsim`], [`fading`]) and
//! compares the two ([`verify`]).

pub mod analytic;
pub mod error;
pub mod fading;
pub mod model;
pub mod procsim;
pub mod quad;
pub mod rng;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use model::*;
