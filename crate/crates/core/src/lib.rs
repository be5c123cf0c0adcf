//! Geodesic folding of the regular tetrahedron.
//!
//! Subdividing each face of a regular tetrahedron along a triangular grid
//! whose edge vector is `a·eₓ + b·e_y` and forcing every grid segment to unit
//! length yields a family of deltahedra with `S(a,b) = 4(a² + ab + b²)` faces.
//! This crate builds those surfaces exactly as quotients of the plane
//! ([`lattice`], [`mesh`]), splits them into `gcd(a, b)` geodesic bands
//! ([`bands`]), finds pairs sharing a common band ([`classify`]) and embeds
//! them numerically in 3-space ([`embed`]).
//!
//! Combinatorics use exact integers. The geometric code is generic over
//! [`Real`] (`f32` or `f64`); the `*64` aliases below are what the CLI uses.

pub mod bands;
pub mod classify;
pub mod embed;
pub mod error;
pub mod geom;
pub mod lattice;
pub mod mesh;
pub mod scalar;

pub use bands::{band_count, trace_bands, trace_bands_along, unfold_band, GeodesicBand, PlanarStrip, StripDirection};
pub use classify::{enumerate_common, s_value, SValueGroup};
pub use embed::{initial_guess, relax, relax_max_volume, volume_table, Embedding, Metrics, RelaxConfig, VolumeTable};
pub use error::{Error, Result};
pub use lattice::{GridCoord, Isometry, LatticeTriangle, Orientation, TilingGroup};
pub use mesh::{build_mesh, face_count, mirror_mesh, DeltaMesh};
pub use scalar::Real;

pub type Embedding64 = Embedding<f64>;
pub type Embedding32 = Embedding<f32>;
pub type Metrics64 = Metrics<f64>;
pub type Metrics32 = Metrics<f32>;
pub type Point3 = geom::Vec3<f64>;
