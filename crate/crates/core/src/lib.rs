pub mod dataset;
pub mod error;
pub mod io;
pub mod kernel;
pub mod learner;
pub mod par;
pub mod solver;
pub mod reductions;
pub mod synth;
pub mod costgen;
pub mod soft;
pub mod eval;
pub mod harness;
