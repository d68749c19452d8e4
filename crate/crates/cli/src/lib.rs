//! Command-line driver for the `transmutant` library.

pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod potentials;
pub mod verify;
