//! Criterion benchmarks of the generate, explore and check pipeline; see
//! `benches/pipeline.rs`.
