//! Harmonic generation from a quantum particle in a one-dimensional hard-wall
//! box, driven either by a monochromatic dipole field or by a harmonically
//! breathing wall.
//!
//! Both problems are solved by Galerkin truncation in the box sine basis and
//! fixed-step fourth-order Runge–Kutta propagation. The dipole time series is
//! projected onto harmonics of the drive frequency to give the spectrum.

pub mod basis;
pub mod cli;
pub mod config;
pub mod error;
pub mod integrator;
pub mod io;
pub mod moving_wall;
pub mod run;
pub mod schedule;
pub mod spectrum;
pub mod static_drive;

pub use error::{Error, Result};
