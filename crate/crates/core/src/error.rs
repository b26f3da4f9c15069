use thiserror::Error;

use crate::atlas::{BoundaryKind, Region};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("materials are not well-ordered: need K1 < K2 and L1 < L2")]
    NotWellOrdered,
    #[error("volume fraction {name} = {value} must lie strictly inside (0, 1)")]
    DegenerateFraction { name: &'static str, value: f64 },
    #[error("fractions exceed 1: m1 + m2 = {0} leaves no void")]
    FractionsExceedOne(f64),
    #[error("anisotropy level rho = {0} outside [-1, 1]")]
    RhoOutOfRange(f64),
    #[error("boundary {kind} is not defined at rho = {rho}")]
    InvalidRange { kind: BoundaryKind, rho: f64 },
    #[error("boundary {kind} has no root on the scanned interval at rho = {rho}")]
    RootNotFound { kind: BoundaryKind, rho: f64 },
    #[error("effective moduli are undefined in region E")]
    RegionEUndefined,
    #[error("no single-region finite-difference stencil at rho = {rho} (step shrunk to {step:e})")]
    BoundaryTooClose { rho: f64, step: f64 },
    #[error("no attaining structure is known in region {0}; the structure there is conjectured only")]
    RegionNotAttained(Region),
    #[error("structure requested for region {expected} but the point lies in region {actual}")]
    WrongRegion { expected: Region, actual: Region },
    #[error("lamination parameter {name} = {value} outside [0, 1]")]
    BetaOutOfRange { name: &'static str, value: f64 },
    #[error("invalid laminate: {0}")]
    InvalidLaminate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
