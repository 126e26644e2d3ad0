// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Multiphase mean curvature flow of grain-boundary networks in the plane
//! or on the unit torus, by alternating Lipschitz deformations with motion
//! by kernel-smoothed mean curvature, plus runtime diagnostics.
//!
//! Every numeric routine is generic over [`scalar::Scalar`] (`f32` or `f64`).

pub mod domain;
pub mod error;
pub mod geometry;
pub mod network;
pub mod quadrature;
pub mod scalar;
pub mod kernel;
pub mod weights;
pub mod varifold;
pub mod deformation;
pub mod flow;
pub mod diagnostics;
pub mod scene;
pub mod io;

/// Default scalar.
pub type Real = f64;
pub type Network = network::LabeledNetwork<Real>;
pub type Network32 = network::LabeledNetwork<f32>;
pub type Trace = flow::RunTrace<Real>;
pub type Trace32 = flow::RunTrace<f32>;
pub type Point = geometry::Vec2<Real>;
