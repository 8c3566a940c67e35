//! Exact computations with R-matrices of minuscule quantum group modules
//! and the Cartan-matrix extension they induce.

pub mod data;
pub mod exactq;
pub mod inductor;
pub mod pipeline;
pub mod repmod;
pub mod rmatrix;
pub mod rootsys;
pub mod sparse;
pub mod specnorm;
