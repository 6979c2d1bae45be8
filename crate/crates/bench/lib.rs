//! Criterion benchmarks for the probe kernels and training loop; see `benches/`.
