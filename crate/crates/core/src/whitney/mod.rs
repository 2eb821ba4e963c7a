//! C¹ horizontal extension of curve fragments and Lusin approximation.

mod check;
mod classical;
mod extend;
mod fragment;
mod lusin;

pub use check::{check_whitney, default_etas, WhitneyTable};
pub use classical::{classical_whitney_1d, Whitney1D};
pub use extend::{extend, extend_on, ExtendOptions, ExtensionDiagnostics, ExtensionResult, GapReport};
pub use fragment::{CompactSet1D, CurveFragment, FragmentSample};
pub use lusin::{lusin, lusin_approximate, lusin_degenerate, measure_agreement, LusinOptions, LusinResult, LusinRoute};
