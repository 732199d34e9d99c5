pub mod bilinear_certifier;
pub mod cli_io;
pub mod dyadic;
pub mod linear_verifier;
pub mod norms;
pub mod probes;
pub mod resonance;
pub mod solver;
pub mod spectral_core;
