//! Monte Carlo percolation simulator for ballistic cluster states.

pub mod cli;
pub mod config;
pub mod graphstate;
pub mod oracle;
pub mod fusion;
pub mod rng;
pub mod microcluster;
pub mod lattice;
pub mod percolation;
pub mod resources;
