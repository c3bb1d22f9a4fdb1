//! Boundary points as finite sample tails, and the relations between the
//! metric (horofunction) boundary and the Gromov boundary.
//!
//! A boundary point is represented by a [`BoundarySample`]: a sequence of
//! group elements with strictly increasing norms. Limit statements become
//! [`DivergenceCertificate`]s, horofunction limits become
//! [`HorofunctionProfile`]s.

mod certificate;
mod profile;
mod quotient;
mod sample;
mod witness;

pub(crate) use certificate::equiv_certificate;
pub use certificate::{
    converges_to_infinity, extended_product, gromov_equiv, DivergenceCertificate, EquivMode,
    ExtendedProduct, Operand,
};
pub use profile::{
    horofunction_profile, horofunction_profile_with, metric_equiv, HorofunctionProfile,
    MetricEquivReport, MetricVerdict, ProbeDiff, ProbeValue,
};
pub use quotient::{
    continuity_probe, quotient_partition, quotient_partition_with, ContinuityRow, PairEntry,
    QuotientPartition, TransitivityViolation,
};
pub use sample::BoundarySample;
pub use witness::{geodesic_layer, witness_large_horofunction, LemmaWitness};

/// Largest index a tail threshold may take: `⌊H/2⌋`, at least 1.
pub(crate) fn tail_limit(horizon: usize) -> usize {
    (horizon / 2).max(1)
}

/// Default probe radius: the full ball of radius `min(R, 6)`.
pub fn default_probe_radius(window_radius: u32) -> u32 {
    window_radius.min(6)
}
