//! Exact arithmeticity classification of hyperbolic reflection groups.

pub mod algfield;
pub mod classifier;
pub mod covers;
pub mod diagram;
pub mod exactlin;
pub mod groundfield;
pub mod interval;
pub mod lobell;
pub mod poly;
