//! Criterion benchmarks for the corrsim kernels live in `benches/`.
