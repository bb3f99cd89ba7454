pub mod characterize;
pub mod denoise;
pub mod gen;
pub mod perf;
pub mod track;
