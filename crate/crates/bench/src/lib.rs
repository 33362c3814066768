//! Criterion benchmarks for popmatch; see `benches/`.
