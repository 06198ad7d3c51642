// SPDX-License-Identifier: Apache-2.0
//! Criterion benchmarks for the simulators; see `benches/arrays.rs`.
