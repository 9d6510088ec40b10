//! Benchmarks for the larkit workspace; see `benches/`.
