//! Precision limits for Stokes-vector rotation estimation in noisy
//! polarimetric channels.
//!
//! The crate simulates two-mode bosonic polarization states on a truncated
//! Fock space, pushes them through CPTP channel pipelines (retarder,
//! diattenuator, three depolarizer models), and evaluates quantum and
//! classical Fisher information for the retarder rotation angle. A harness
//! module drives sweeps over probe families and photon numbers and emits
//! CSV/SVG output.

pub mod channels;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod hilbert;
pub(crate) mod linalg;
pub mod polarization;

pub use error::Error;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<C64>;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
