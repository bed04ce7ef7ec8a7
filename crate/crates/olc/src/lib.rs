//! Command-line front end for `ol-crystal`.

pub mod commands;
pub mod render;
