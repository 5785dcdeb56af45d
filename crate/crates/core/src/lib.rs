pub mod normalize;
pub mod harness;
pub mod metrics;
pub mod pec;
pub mod reward;
pub mod syntax;
pub mod tcl;
pub mod wrapper;
