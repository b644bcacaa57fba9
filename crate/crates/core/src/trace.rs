//! Placeholder; filled in by later build stages.
