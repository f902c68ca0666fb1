pub mod lattice;
pub mod miura;
pub mod tau;
