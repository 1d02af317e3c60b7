//! Spin-flip lifetimes of magnetically trapped atoms above planar metallic and
//! superconducting films.

pub mod asymptotics;
pub mod cli_io;
pub mod layered_green;
pub mod quadrature;
pub mod quantities;
pub mod spin_flip;
