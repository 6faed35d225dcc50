pub mod error;
pub mod exact;
pub mod group;
pub mod prf;
pub mod order;
pub mod multiorder;
pub mod dynamics;
pub mod asymptotic;
pub mod experiment;
