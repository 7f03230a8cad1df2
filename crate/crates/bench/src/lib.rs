//! Criterion benchmarks for `bconv-core`; see `benches/kernels.rs`.
