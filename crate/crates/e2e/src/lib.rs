//! End-to-end acceptance run; see `tests/acceptance.rs`.
