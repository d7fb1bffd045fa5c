//! Criterion benchmarks for the hot paths of `concyclic-core`; see
//! `benches/geometry.rs`.
