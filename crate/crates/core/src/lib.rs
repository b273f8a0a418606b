pub mod attractor;
pub mod cyclotomic;
pub mod dynamics;
pub mod geometry;
pub mod induction;
pub mod symbolic;
