//! Criterion benchmarks for the numeric kernels; run `cargo bench -p roccut-bench`.
