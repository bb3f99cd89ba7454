//! Criterion benchmarks for `nomf-core`; see `benches/`.
