//! Certified length spectra, dynamical zeta functions, and thermodynamic
//! estimators for Schottky groups acting on hyperbolic 2- and 3-space.
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`schottky`] — group data (generators + ping-pong disks), validation
//!    certificates, and certified enumeration of closed geodesics below a
//!    length cutoff;
//! 2. [`thermo`] — weight systems (potentials integrated along closed
//!    orbits) and the entropy / pressure / critical-exponent estimators;
//! 3. [`zeta`] — dynamical zeta functions built from the length data, with
//!    truncation-tail bounds;
//! 4. [`spectral`] — consequences for the spectrum and counting functions
//!    (eigenvalue bounds, refined orbit counting, essential strips).
//!
//! Supporting modules: [`moebius`] (isometries of the half-plane and
//! half-space models), [`disk`] (boundary disks as Hermitian forms), and
//! [`fit`] (deterministic sums and least squares). The [`cli`] module backs
//! the `orbitzeta` binary.

pub mod cli;
pub mod disk;
pub mod fit;
pub mod moebius;
pub mod schottky;
pub mod spectral;
pub mod thermo;
pub mod zeta;
