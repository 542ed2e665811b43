pub mod bits;
pub mod dense;
pub mod error;
pub mod gf2;
pub mod pauli;
pub mod stabilizer;
pub mod constructions;
pub mod gme;
pub mod bell;
pub mod random;
pub mod selftest;
pub mod faces;
