//! Criterion benchmarks for `diqc-core`. See `benches/`.
