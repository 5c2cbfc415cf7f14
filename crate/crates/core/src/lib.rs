//! Numerical convex geometry around L_p affine surface areas: convex body
//! representations, curvature integrals, John and Löwner ellipsoids, isotropic
//! position, thin-shell sampling, extremal affine surface area searches and
//! Steiner-formula quermassintegrals.

pub mod corpus;
pub mod curvature;
pub mod error;
pub mod extremal;
pub mod fit;
pub mod geometry;
pub mod quermass;
pub mod report;
pub mod sampling;
pub mod util;

pub use error::{Error, Result};
pub use geometry::{AffineMap, ConvexBody, Ellipsoid, Estimate, Polytope, SupportBody2D};
