//! Criterion benchmarks for the invariant pipeline; see benches/.
