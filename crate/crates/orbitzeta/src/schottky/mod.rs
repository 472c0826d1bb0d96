//! Schottky groups: definition and validation, certified enumeration of the
//! closed-geodesic length spectrum, and spectrum persistence.

mod enumerate;
mod group;
mod spectrum;
pub mod word;

pub use enumerate::{enumerate_spectrum, orbit_displacements, EnumerationError, ResourceLimits};
pub use group::{
    id_to_letter, inverse_id, letter_to_id, CompletenessCertificate, LetterId, SchottkyError,
    SchottkyGroup,
};
pub use spectrum::{
    ClosedGeodesic, CountPoint, EnumerationStats, LengthSpectrum, NonArithVerdict, SpectrumError,
};

#[cfg(test)]
pub(crate) use group::test_groups;
