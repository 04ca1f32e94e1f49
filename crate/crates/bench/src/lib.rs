//! Benchmarks for the operator pipeline live in `benches/`.
