//! Cusped spaces and coarse-geometry diagnostics on finite truncations.
//!
//! The crate builds finite pieces of the spaces used to study relative
//! hyperbolicity — Cayley balls of concrete groups, combinatorial horoballs
//! over their cosets, the glued cusped space, and a family of hand-built
//! wedge spaces — and measures metric behavior on them: empirical
//! contraction functions, Morse-gauge excursions, fellow-travelling
//! constants and membership, barycenter-based hyperbolicity estimates, and
//! horoball visual sizes. Everything is deterministic under a fixed seed,
//! including parallel runs.

pub mod analysis;
pub mod config;
pub mod cusped;
pub mod error;
pub mod graph;
pub mod group;
pub mod horoball;
pub mod oracles;
pub mod report;
pub mod rng;
pub mod spaces;
pub mod visual;

pub use analysis::{
    delta_barycenter, estimate_contraction, estimate_delta, fellow_traveling_membership,
    git_check, kappa, kappa_prime, morse_excursion, quasi_geodesic_family, sublinearity_verdict,
    DeltaEstimate, GeodesicPolicy, Rho, SublinearEstimate, Verdict,
};
pub use cusped::{build_by_name, build_cusped_space, CuspedSpace};
pub use error::{AnalysisError, BuildError, GraphError, GroupError};
pub use graph::{from_text, to_text, Graph, PathRecord, VertexId, VertexTag};
pub use group::{coset_decompose, CosetId, GroupFamily, GroupModel, SubgroupSpec, Word};
pub use horoball::{build_horoball, Horoball, HoroballSpec, VerticalRay};
pub use spaces::{cusped_plane_wedge, strip_wedge, WedgeSpace};
pub use visual::{visual_set, visual_size, visual_size_profile, VisualProfile, VisualSet};
