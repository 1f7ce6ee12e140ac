//! The measurement engine: empirical contraction functions, the
//! fellow-travelling constants kappa and kappa', Morse-gauge excursions,
//! image-theorem checks, barycenter hyperbolicity estimates, and
//! fellow-travelling membership.

mod contraction;
mod delta;
mod fellow;
mod morse;
mod paths;

pub use contraction::{
    estimate_contraction, kappa, kappa_prime, sublinearity_verdict, Rho, SublinearEstimate,
    Verdict, DEFAULT_DECAY_FACTOR, DEFAULT_TAIL_BOUND,
};
pub use delta::{delta_barycenter, estimate_delta, DeltaEstimate, DeltaWitness, GeodesicPolicy};
pub use fellow::fellow_traveling_membership;
pub use morse::{git_check, morse_excursion, GitReport, MorseExcursion};
pub use paths::{quasi_geodesic_family, QgFamily};
