//! Criterion benchmarks for `qreduce-core`; see `benches/`.
