//! Library half of the experiment CLI: model-file I/O, synthetic instance
//! generation and the comparison-run machinery. The `dgmf` binary is a thin
//! argument parser over these modules.

pub mod experiment;
pub mod model_io;
