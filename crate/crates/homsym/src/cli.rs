//! Command implementations behind the thin binary.
