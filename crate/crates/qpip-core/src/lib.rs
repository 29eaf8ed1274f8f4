#![no_std]
//! Simulation and verification of quantum authentication schemes and of the
//! interactive proof protocols built on them.

extern crate alloc;

pub mod audit;
pub mod cliffauth;
pub mod error;
pub mod polyauth;
pub mod pcalg;
pub mod polycode;
pub mod qcore;
pub mod qpip;

pub use error::{Error, Result};
