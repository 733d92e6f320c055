use thiserror::Error;

use crate::torus::LinearPart;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown map `{0}`")]
    UnknownMap(String),
    #[error("malformed map spec `{spec}`: {reason}")]
    MapSpec { spec: String, reason: String },
    #[error("map `{name}` expects {expected} parameter(s), got {got}")]
    ParamCount { name: String, expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires a lift homotopic to the identity, got linear part {0}")]
    NotHomotopicToIdentity(LinearPart),
    #[error("map `{0}` has no inverse; backward iterates are unavailable")]
    MissingInverse(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("point lies within {distance:e} of the polyline")]
    PointOnPath { distance: f64 },
    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),
    #[error("winding of a closed polyline is not an integer (residual {0:e})")]
    NonIntegerWinding(f64),
    #[error("point is not {k}-periodic for the lift (residual {residual:e})")]
    NotPeriodic { k: usize, residual: f64 },
    #[error("point is not fixed by the lift (residual {0:e})")]
    NotFixed(f64),
    #[error("fixed point lies inside the region")]
    PointInsideRegion,
    #[error("region is essential; linking numbers need a simply connected region")]
    EssentialRegion,
    #[error("region must be a single connected component, found {0}")]
    DisconnectedRegion(usize),
    #[error("no path inside the region joins the iterate back to the base point")]
    NoPathInRegion,
    #[error("malformed bitmap: {0}")]
    Bitmap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
