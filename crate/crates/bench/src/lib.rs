//! Criterion benchmarks for element kernels and global solves; see `benches/`.
