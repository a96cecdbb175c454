//! Linear secure degrees-of-freedom toolkit for the two-transmitter MIMO
//! wiretap channel (one message sender plus a cooperative jammer) and the
//! MIMO multiple-access wiretap channel, with no eavesdropper CSIT.
//!
//! * [`matcore`]: exact rational matrices (rank, inverse, block assembly).
//! * [`channel`]: seeded channel realizations and slot stacking.
//! * [`scheme`]: linear precoding schemes and the two-slot aligned-noise
//!   construction, plus multiple-access time sharing.
//! * [`verifier`]: rank-based decodability and leakage checks.
//! * [`bounds`]: closed-form sum s.d.o.f. curves.
//! * [`entropy`]: Gaussian mutual information and high-SNR slope fits.
//! * [`oracles`]: Monte Carlo checks of the generic-rank lemmas and a
//!   randomized search against the linear converse.

pub mod bounds;
pub mod channel;
pub mod codec;
pub mod entropy;
pub mod error;
pub mod matcore;
pub mod oracles;
pub mod sampling;
pub mod scheme;
pub mod verifier;

pub use channel::{sample_realization, stack, ChannelRealization, LegitimateCsi, StackedChannel, SystemDims, Transmitter};
pub use error::{Result, SdofError};
pub use matcore::RationalMatrix;
pub use num_rational::BigRational;
pub use sampling::RationalGrid;
pub use scheme::{compose_mac_timeshare, construct_helper_scheme, construct_wth_scheme, LinearScheme};
pub use verifier::{verify, VerificationReport};
