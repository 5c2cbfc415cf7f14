//! JSON body files.
//!
//! ```json
//! {"type": "vpolytope", "vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}
//! {"type": "hpolytope", "normals": [[1, 0], ...], "offsets": [1, ...]}
//! {"type": "ellipsoid", "center": [0, 0], "shape": [[0.25, 0], [0, 1]]}
//! {"type": "ball", "center": [0, 0], "radius": 1}
//! {"type": "support2d", "cos": [1, 0, 0.05], "sin": [0, 0, 0.02], "grid": 2048}
//! {"type": "support2d", "samples": [...]}
//! ```
//!
//! Bodies are translated so that their centroid is the origin unless
//! `"recenter": false` is given.

use super::body::ConvexBody;
use super::support2d::{SupportBody2D, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::util::{Matrix, Vector};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BodySpec {
    Hpolytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        #[serde(default = "yes")]
        recenter: bool,
        #[serde(default)]
        id: Option<String>,
    },
    Vpolytope {
        vertices: Vec<Vec<f64>>,
        #[serde(default = "yes")]
        recenter: bool,
        #[serde(default)]
        id: Option<String>,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
        #[serde(default = "yes")]
        recenter: bool,
        #[serde(default)]
        id: Option<String>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "yes")]
        recenter: bool,
        #[serde(default)]
        id: Option<String>,
    },
    Support2d {
        #[serde(default)]
        samples: Option<Vec<f64>>,
        #[serde(default)]
        cos: Option<Vec<f64>>,
        #[serde(default)]
        sin: Option<Vec<f64>>,
        #[serde(default)]
        grid: Option<usize>,
        #[serde(default = "yes")]
        recenter: bool,
        #[serde(default)]
        id: Option<String>,
    },
}

fn yes() -> bool {
    true
}

fn vectors(rows: &[Vec<f64>]) -> Vec<Vector> {
    rows.iter().map(|r| Vector::from_vec(r.clone())).collect()
}

fn matrix(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidBody("shape matrix must be square".into()));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl BodySpec {
    pub fn id(&self) -> Option<&str> {
        match self {
            BodySpec::Hpolytope { id, .. }
            | BodySpec::Vpolytope { id, .. }
            | BodySpec::Ellipsoid { id, .. }
            | BodySpec::Ball { id, .. }
            | BodySpec::Support2d { id, .. } => id.as_deref(),
        }
    }

    fn recenter(&self) -> bool {
        match self {
            BodySpec::Hpolytope { recenter, .. }
            | BodySpec::Vpolytope { recenter, .. }
            | BodySpec::Ellipsoid { recenter, .. }
            | BodySpec::Ball { recenter, .. }
            | BodySpec::Support2d { recenter, .. } => *recenter,
        }
    }

    pub fn build(&self) -> Result<ConvexBody> {
        let body = match self {
            BodySpec::Hpolytope { normals, offsets, .. } => ConvexBody::hpolytope(&vectors(normals), offsets)?,
            BodySpec::Vpolytope { vertices, .. } => ConvexBody::vpolytope(&vectors(vertices))?,
            BodySpec::Ellipsoid { center, shape, .. } => {
                ConvexBody::ellipsoid(Vector::from_vec(center.clone()), matrix(shape)?)?
            }
            BodySpec::Ball { center, radius, .. } => ConvexBody::ball(Vector::from_vec(center.clone()), *radius)?,
            BodySpec::Support2d { samples, cos, sin, grid, .. } => {
                let support = match (samples, cos) {
                    (Some(s), None) => SupportBody2D::from_samples(s)?,
                    (None, Some(c)) => {
                        let s = sin.clone().unwrap_or_default();
                        SupportBody2D::from_coefficients(c.clone(), s, grid.unwrap_or(DEFAULT_GRID))?
                    }
                    _ => {
                        return Err(Error::InvalidBody(
                            "support2d needs exactly one of `samples` or `cos`".into(),
                        ))
                    }
                };
                ConvexBody::Support2D(support)
            }
        };
        Ok(if self.recenter() { body.centered() } else { body })
    }
}

pub fn parse_body(text: &str) -> Result<ConvexBody> {
    let spec: BodySpec =
        serde_json::from_str(text).map_err(|e| Error::InvalidBody(format!("malformed body JSON: {e}")))?;
    spec.build()
}

pub fn load_body(path: &Path) -> Result<ConvexBody> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_body(&text)
}
