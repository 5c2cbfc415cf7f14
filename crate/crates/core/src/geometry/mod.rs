//! Convex bodies and exact primitive geometry.

mod affine;
mod arcpoly;
mod body;
pub mod ellipsoid;
mod json;
mod polytope;
mod support2d;

pub use affine::{random_rotation, AffineMap};
pub use arcpoly::{asp_exponents, ArcPolygon, Piece, SegmentRule};
pub use body::ConvexBody;
pub use ellipsoid::Ellipsoid;
pub use json::{load_body, parse_body, BodySpec};
pub use polytope::{clip_halfplane, convex_hull_2d, polygon_area, Estimate, Polytope};
pub use support2d::{SupportBody2D, DEFAULT_GRID};
