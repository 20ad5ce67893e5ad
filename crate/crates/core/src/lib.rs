//! Exact solver toolkit for the team orienteering problem with service
//! times, mandatory nodes and incompatibilities.

pub mod engine;
pub mod forge;
pub mod formulation;
pub mod lagrangian;
pub mod lp;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod separation;
