//! Criterion benchmarks for the series engine, the step-function sweep and
//! the spacing counter. See `benches/`.
