//! Benchmarks for the hopfren crate; see `benches/algebra.rs`.
