//! Twisted Jacquet modules of parabolically induced representations of Sp4(F_q)
//! with respect to a rank-one character of the Siegel unipotent radical.

#![allow(clippy::needless_range_loop)]

pub mod chars;
pub mod cli;
pub mod cosets;
pub mod error;
pub mod ff;
pub mod jacquet;
pub mod matgrp;

pub use error::{Error, Result};
