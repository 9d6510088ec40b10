#![allow(dead_code)]

pub mod checks;
pub mod cycles;
pub mod exact_planar;
pub mod fixtures;
