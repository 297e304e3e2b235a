//! Arbitrary-precision workbench for unbounded iterated maps.

pub mod chaos;
pub mod cli;
pub mod engine;
pub mod helix;
pub mod mapexpr;
pub mod numerics;
pub mod scan;
