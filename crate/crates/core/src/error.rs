// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::network::validate::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge after refining to {panels} panels")]
    NonConvergence { panels: usize },
    #[error("quadrature lattice needs {cells} cells, above the cap of {cap}")]
    Budget { cells: usize, cap: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("invalid network: {0}")]
    Invalid(ValidationReport),
    #[error("remesh would weld vertices {a} and {b}")]
    RemeshCollision { a: usize, b: usize },
    #[error("label {label} bounds an unbounded region")]
    UnboundedRegion { label: u32 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("infeasible test function shape: {0}")]
    Infeasible(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoveError {
    #[error("move not applicable: {0}")]
    NotApplicable(String),
    #[error("region of label {label} is not a topological disk")]
    NotADisk { label: u32 },
    #[error("no label occupies a majority of the ball around label {label}")]
    DominanceAmbiguity { label: u32 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("infeasible parameters: {relation} is violated ({detail})")]
    Infeasible { relation: &'static str, detail: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("time step too large: dt * max|h| = {product:e} exceeds h_min / 2 = {limit:e}")]
    StepTooLarge { product: f64, limit: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("non-finite vertex position after step {step}")]
    NonFinite { step: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("{line}:{column}: expected {expected}")]
    Syntax { line: usize, column: usize, expected: String },
    #[error("{line}:{column}: {message}")]
    Semantic { line: usize, column: usize, message: String },
    #[error("scene does not describe a valid partition: {0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticError {
    #[error("time {0} is outside the trace")]
    OutOfRange(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("trace does not hold the per-step fields needed here")]
    MissingFields,
}
