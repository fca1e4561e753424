//! Numerical statistical-mechanics workbench.
//!
//! Units are `hbar = k_B = 1` throughout: temperatures are energies and
//! `beta = 1/T`. Conductances are quoted in units of `e^2/(2*pi*hbar)`.
//!
//! The crate is organised around the physics, not the numerics:
//!
//! * [`numerics`] — quadrature, root finding, RK4, FFT correlation
//!   estimation, seeded counter-based random streams.
//! * [`special`] — gamma, Riemann zeta and polylogarithm evaluation.
//! * [`ensembles`] — canonical partition functions and observables.
//! * [`gases`] — grand-canonical ideal Bose/Fermi/Boltzmann gases,
//!   condensation, Sommerfeld expansion, blackbody radiation.
//! * [`chemical`] — Gibbs-prescription chemical equilibrium and site systems.
//! * [`interactions`] — cluster/virial expansion and two-particle quantum
//!   partition functions.
//! * [`ising`] — 1D transfer matrix, 2D Onsager quadrature, mean-field
//!   family, Lee-Yang zeros, Ornstein-Zernike and RG flow.
//! * [`stochastic`] — Langevin, Fokker-Planck, rate equations.
//! * [`master`] — quantum master equations (Lindblad, secular, Pauli, Bloch).
//! * [`response`] — power spectra, Kubo susceptibility, FDT checks,
//!   adiabatic curvature, Drude closed forms.
//! * [`transport`] — S-matrix algebra, Landauer, BPT pumping, Friedel.
//! * [`noneq`] — work distributions, Crooks/Jarzynski, heat-conduction
//!   fluctuation theorem.

pub mod chemical;
pub mod ensembles;
pub mod gases;
pub mod interactions;
pub mod ising;
pub mod linalg;
pub mod master;
pub mod noneq;
pub mod numerics;
pub mod response;
pub mod special;
pub mod stochastic;
pub mod transport;

mod error;

pub use error::{Error, Result};
pub use numerics::{RandomStream, Tolerance};
