//! Shifted elliptic divisibility sequences over Q and Q(i).

pub mod curve;
pub mod heights;
pub mod numberfield;
pub mod reduction;
pub mod report;
pub mod sequences;
