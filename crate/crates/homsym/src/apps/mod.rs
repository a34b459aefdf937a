//! Worked applications: rigid-body dynamics identification, scale-invariant
//! glyph recognition, and homogeneous-norm refinement. Each harness is a
//! deterministic batch job driven by a seed and emits CSV artifacts.

pub mod moments;
pub mod norm_refine;
pub mod rigid_body;
