pub mod error;
pub mod linalg;
pub mod matrix;
pub mod rng;
pub mod problem;
pub mod solver;
pub mod certificate;
pub mod harness;
pub mod parallel;
