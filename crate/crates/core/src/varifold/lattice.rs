// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Lattice evaluation of `Φ_ε ∗ ‖V‖`, `Φ_ε ∗ δV`, the smoothed curvature
//! `h_ε` and the approximate L² energy.

use std::collections::HashMap;

use crate::domain::Domain;
use crate::error::QuadratureError;
use crate::geometry::{Mat2, Vec2};
use crate::kernel::Kernel;
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Scalar};
use crate::weights::{ScalarField, VectorField, WeightFunction};

use super::VarifoldView;

/// Discretization parameters for the lattice quadratures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig<T> {
    /// Lattice spacing is `ε / lattice_ratio`.
    pub lattice_ratio: T,
    /// Mass sources use 3-point Gauss–Legendre on panels of at most
    /// `ε · mass_panel`.
    pub mass_panel: T,
    /// Largest lattice the evaluation may allocate.
    pub max_nodes: usize,
    /// Relative tolerance quoted for the quadratures.
    pub tolerance: T,
}

impl<T: Scalar> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self { lattice_ratio: lit(4.0), mass_panel: lit(0.5), max_nodes: 1 << 23, tolerance: lit(1e-6) }
    }
}

/// Dense node grid covering the carrier's neighbourhood; the whole torus
/// in periodic mode.
#[derive(Clone, Debug)]
struct Grid<T> {
    spacing: T,
    origin: (i64, i64),
    dims: (usize, usize),
    periodic: bool,
}

impl<T: Scalar> Grid<T> {
    fn position(&self, i: usize, j: usize) -> Vec2<T> {
        let x = T::from_i64((i as i64) + self.origin.0).unwrap() * self.spacing;
        let y = T::from_i64((j as i64) + self.origin.1).unwrap() * self.spacing;
        Vec2::new(x, y)
    }

    /// Grid columns (or rows) whose coordinate lies within `r` of `c`, as
    /// (unwrapped integer coordinate, storage index).
    fn span(&self, c: T, r: T, axis: usize, out: &mut Vec<(i64, usize)>) {
        out.clear();
        let lo = ((c - r) / self.spacing).ceil().to_i64().unwrap();
        let hi = ((c + r) / self.spacing).floor().to_i64().unwrap();
        let (o, n) = if axis == 0 { (self.origin.0, self.dims.0) } else { (self.origin.1, self.dims.1) };
        for k in lo..=hi {
            let idx = k - o;
            if self.periodic {
                out.push((k, idx.rem_euclid(n as i64) as usize));
            } else if idx >= 0 && (idx as usize) < n {
                out.push((k, idx as usize));
            }
        }
    }
}

/// Visits every node `y` with `|y − p| ≤ R`, passing the storage index,
/// the offset `y − p` and `Φ_ε(y − p)`.
fn for_each_node<T: Scalar>(
    grid: &Grid<T>,
    k: &Kernel<T>,
    p: Vec2<T>,
    cols: &mut Vec<(i64, usize)>,
    rows: &mut Vec<(i64, usize)>,
    gx: &mut Vec<T>,
    mut f: impl FnMut(usize, Vec2<T>, T),
) {
    let r = k.support();
    let r2 = r * r;
    grid.span(p.x, r, 0, cols);
    grid.span(p.y, r, 1, rows);
    let two_e2 = lit::<T>(2.0) * k.epsilon * k.epsilon;
    let separable = k.is_separable();
    let peak = k.peak();
    gx.clear();
    if separable {
        gx.extend(cols.iter().map(|&(i, _)| {
            let dx = T::from_i64(i).unwrap() * grid.spacing - p.x;
            (-dx * dx / two_e2).exp()
        }));
    }
    let nx = grid.dims.0;
    for &(j, jy) in rows.iter() {
        let dy = T::from_i64(j).unwrap() * grid.spacing - p.y;
        let gy = if separable { peak * (-dy * dy / two_e2).exp() } else { T::zero() };
        for (c, &(i, ix)) in cols.iter().enumerate() {
            let dx = T::from_i64(i).unwrap() * grid.spacing - p.x;
            let d2 = dx * dx + dy * dy;
            if d2 > r2 {
                continue;
            }
            let d = Vec2::new(dx, dy);
            let phi = if separable { gx[c] * gy } else { k.value(d) };
            f(jy * nx + ix, d, phi);
        }
    }
}

/// Smoothed mean curvature and energy of a varifold, with the lattice
/// retained so `h_ε` can be evaluated anywhere.
#[derive(Clone, Debug)]
pub struct CurvatureField<T> {
    pub points: Vec<Vec2<T>>,
    /// `h̃_ε` at the evaluation points.
    pub h_tilde: Vec<Vec2<T>>,
    /// `h_ε` at the evaluation points.
    pub h_eps: Vec<Vec2<T>>,
    /// `∫ |Φ_ε∗δV|² Ω / (Φ_ε∗‖V‖ + εΩ⁻¹)`.
    pub energy: T,
    kernel: Kernel<T>,
    omega: WeightFunction<T>,
    domain: Domain<T>,
    grid: Grid<T>,
    first_variation: Vec<Vec2<T>>,
    mass: Vec<T>,
    tilde: Vec<Vec2<T>>,
}

struct Sources<T> {
    mass: Vec<(Vec2<T>, T)>,
    turning: Vec<(Vec2<T>, Vec2<T>)>,
}

fn sources<T: Scalar>(v: &VarifoldView<T>, k: &Kernel<T>, cfg: &QuadratureConfig<T>) -> Sources<T> {
    let rule = GaussLegendre::<T>::new(3);
    let panel = k.epsilon * cfg.mass_panel;
    let mut mass = Vec::new();
    for s in &v.segments {
        let m = (s.length / panel).ceil().to_usize().unwrap_or(1).max(1);
        let h = T::one() / T::from_usize_lossy(m);
        for p in 0..m {
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let t = h * (T::from_usize_lossy(p) + x);
                mass.push((v.domain.wrap(s.a + (s.b - s.a) * t), w * h * s.length));
            }
        }
    }
    let turning = v.sources.iter().map(|s| (s.position, s.turning)).collect();
    Sources { mass, turning }
}

/// Uniform bins for neighbour queries among source points.
struct Bins {
    cell: f64,
    wrap: Option<i64>,
    map: HashMap<(i64, i64), Vec<u32>>,
}

impl Bins {
    fn new<T: Scalar>(pts: impl Iterator<Item = Vec2<T>>, cell: T, periodic: bool) -> Self {
        let cell = cell.to_f64_lossy();
        let wrap = periodic.then(|| ((1.0 / cell).floor() as i64).max(1));
        let mut bins = Self { cell, wrap, map: HashMap::new() };
        for (i, p) in pts.enumerate() {
            let key = bins.key(p.x.to_f64_lossy(), p.y.to_f64_lossy());
            bins.map.entry(key).or_default().push(i as u32);
        }
        bins
    }

    fn key(&self, x: f64, y: f64) -> (i64, i64) {
        let (i, j) = ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64);
        match self.wrap {
            Some(m) => (i.rem_euclid(m), j.rem_euclid(m)),
            None => (i, j),
        }
    }

    /// Candidate indices within one cell of `(x, y)`; a superset of the
    /// points within `cell`.
    fn near(&self, x: f64, y: f64, out: &mut Vec<u32>) {
        out.clear();
        let (ci, cj) = ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64);
        let mut seen: Vec<(i64, i64)> = Vec::with_capacity(9);
        for di in -1..=1 {
            for dj in -1..=1 {
                let key = match self.wrap {
                    Some(m) => ((ci + di).rem_euclid(m), (cj + dj).rem_euclid(m)),
                    None => (ci + di, cj + dj),
                };
                if seen.contains(&key) {
                    continue;
                }
                seen.push(key);
                if let Some(v) = self.map.get(&key) {
                    out.extend_from_slice(v);
                }
            }
        }
    }
}

/// Computes `h̃_ε`, `h_ε` at `points` and the energy.
///
/// `Φ_ε∗‖V‖` and `Φ_ε∗δV` are scattered onto a lattice of spacing
/// `ε/lattice_ratio` over the truncated support `min(1, 6ε)`; `h_ε` is the
/// lattice quadrature of `Φ_ε ∗ h̃_ε`.
pub fn smoothed_mean_curvature<T: Scalar>(
    v: &VarifoldView<T>,
    k: &Kernel<T>,
    cfg: &QuadratureConfig<T>,
    points: &[Vec2<T>],
) -> Result<CurvatureField<T>, QuadratureError> {
    let src = sources(v, k, cfg);
    let radius = k.support();
    let grid = match v.domain {
        Domain::Torus => {
            let m = (cfg.lattice_ratio / k.epsilon).ceil().to_usize().unwrap_or(1).max(1);
            if m.saturating_mul(m) > cfg.max_nodes {
                return Err(QuadratureError::Budget { cells: m * m, cap: cfg.max_nodes });
            }
            Grid { spacing: T::one() / T::from_usize_lossy(m), origin: (0, 0), dims: (m, m), periodic: true }
        }
        Domain::Plane { .. } => {
            let spacing = k.epsilon / cfg.lattice_ratio;
            let all = src.mass.iter().map(|s| s.0).chain(src.turning.iter().map(|s| s.0)).chain(points.iter().copied());
            let mut lo = Vec2::new(T::infinity(), T::infinity());
            let mut hi = Vec2::new(T::neg_infinity(), T::neg_infinity());
            for p in all {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            if lo.x > hi.x {
                lo = Vec2::zero();
                hi = Vec2::zero();
            }
            let i0 = ((lo.x - radius) / spacing).floor().to_i64().unwrap() - 1;
            let j0 = ((lo.y - radius) / spacing).floor().to_i64().unwrap() - 1;
            let i1 = ((hi.x + radius) / spacing).ceil().to_i64().unwrap() + 1;
            let j1 = ((hi.y + radius) / spacing).ceil().to_i64().unwrap() + 1;
            let (nx, ny) = ((i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize);
            if nx.saturating_mul(ny) > cfg.max_nodes {
                return Err(QuadratureError::Budget { cells: nx.saturating_mul(ny), cap: cfg.max_nodes });
            }
            Grid { spacing, origin: (i0, j0), dims: (nx, ny), periodic: false }
        }
    };
    let n = grid.dims.0 * grid.dims.1;
    let mut fv = vec![Vec2::zero(); n];
    let mut mass = vec![T::zero(); n];
    let (mut cols, mut rows, mut gx) = (Vec::new(), Vec::new(), Vec::new());
    for &(p, w) in &src.mass {
        for_each_node(&grid, k, p, &mut cols, &mut rows, &mut gx, |idx, _, phi| mass[idx] += w * phi);
    }
    for &(p, t) in &src.turning {
        for_each_node(&grid, k, p, &mut cols, &mut rows, &mut gx, |idx, _, phi| fv[idx] += t * phi);
    }
    let cell = grid.spacing * grid.spacing;
    let mut tilde = vec![Vec2::zero(); n];
    let mut energy = T::zero();
    let om = v.omega;
    for j in 0..grid.dims.1 {
        for i in 0..grid.dims.0 {
            let idx = j * grid.dims.0 + i;
            let f = fv[idx];
            if f == Vec2::zero() {
                continue;
            }
            let y = grid.position(i, j);
            let denom = mass[idx] + k.epsilon * om.inverse(y);
            tilde[idx] = f * (-T::one() / denom);
            energy += cell * f.norm2() * om.value(y) / denom;
        }
    }
    let mut field = CurvatureField {
        points: points.to_vec(),
        h_tilde: Vec::new(),
        h_eps: Vec::new(),
        energy,
        kernel: *k,
        omega: om,
        domain: v.domain,
        grid,
        first_variation: fv,
        mass,
        tilde,
    };
    field.h_eps = points.iter().map(|&p| field.eval(p).0).collect();
    field.h_tilde = pointwise_tilde(v, k, &src, points);
    Ok(field)
}

/// `h̃_ε` at arbitrary points from the same quadrature sources.
fn pointwise_tilde<T: Scalar>(v: &VarifoldView<T>, k: &Kernel<T>, src: &Sources<T>, points: &[Vec2<T>]) -> Vec<Vec2<T>> {
    let r = k.support();
    let periodic = v.domain.is_torus();
    let brute = periodic && r * lit(3.0) > T::one();
    let mb = Bins::new(src.mass.iter().map(|s| s.0), r, periodic);
    let tb = Bins::new(src.turning.iter().map(|s| s.0), r, periodic);
    let mut cand = Vec::new();
    let r2 = r * r;
    points
        .iter()
        .map(|&y| {
            let (yx, yy) = (y.x.to_f64_lossy(), y.y.to_f64_lossy());
            let mut m = T::zero();
            let mut f = Vec2::zero();
            if brute {
                cand = (0..src.mass.len() as u32).collect();
            } else {
                mb.near(yx, yy, &mut cand);
            }
            for &i in &cand {
                let (p, w) = src.mass[i as usize];
                let d = v.domain.delta(y, p);
                if d.norm2() <= r2 {
                    m += w * k.value(d);
                }
            }
            if brute {
                cand = (0..src.turning.len() as u32).collect();
            } else {
                tb.near(yx, yy, &mut cand);
            }
            for &i in &cand {
                let (p, t) = src.turning[i as usize];
                let d = v.domain.delta(y, p);
                if d.norm2() <= r2 {
                    f += t * k.value(d);
                }
            }
            f * (-T::one() / (m + k.epsilon * v.omega.inverse(y)))
        })
        .collect()
}

impl<T: Scalar> CurvatureField<T> {
    /// `(h_ε(x), ∇h_ε(x))` by lattice quadrature.
    pub fn eval(&self, x: Vec2<T>) -> (Vec2<T>, Mat2<T>) {
        let x = self.domain.wrap(x);
        let cell = self.grid.spacing * self.grid.spacing;
        let e2 = self.kernel.epsilon * self.kernel.epsilon;
        let separable = self.kernel.is_separable();
        let mut h = Vec2::zero();
        let mut jac = Mat2::zero();
        let (mut cols, mut rows, mut gx) = (Vec::new(), Vec::new(), Vec::new());
        for_each_node(&self.grid, &self.kernel, x, &mut cols, &mut rows, &mut gx, |idx, d, phi| {
            let t = self.tilde[idx];
            if t == Vec2::zero() {
                return;
            }
            h += t * phi;
            // ∂/∂x Φ(y − x) = −∇Φ(d).
            let g = if separable { d * (phi / e2) } else { -self.kernel.eval(d).1 };
            jac = jac.add(&Mat2::outer(t, g));
        });
        (h * cell, jac.scale(cell))
    }

    pub(crate) fn kernel_epsilon(&self) -> T {
        self.kernel.epsilon
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    pub fn max_h_eps(&self) -> T {
        self.h_eps.iter().fold(T::zero(), |m, h| m.max(h.norm()))
    }

    pub fn max_h_tilde(&self) -> T {
        self.h_tilde.iter().fold(T::zero(), |m, h| m.max(h.norm()))
    }

    pub fn spacing(&self) -> T {
        self.grid.spacing
    }

    pub fn node_count(&self) -> usize {
        self.grid.dims.0 * self.grid.dims.1
    }

    fn nodes(&self) -> impl Iterator<Item = (usize, Vec2<T>)> + '_ {
        let (nx, ny) = self.grid.dims;
        (0..ny).flat_map(move |j| (0..nx).map(move |i| (j * nx + i, self.grid.position(i, j))))
    }

    /// `∫ φ |Φ_ε∗δV|² / (Φ_ε∗‖V‖ + εΩ⁻¹) dx`.
    pub fn weighted_energy(&self, phi: &impl ScalarField<T>) -> T {
        let cell = self.grid.spacing * self.grid.spacing;
        let mut acc = T::zero();
        for (idx, y) in self.nodes() {
            let f = self.first_variation[idx];
            if f == Vec2::zero() {
                continue;
            }
            acc += cell * phi.value(y) * f.norm2() / (self.mass[idx] + self.kernel.epsilon * self.omega.inverse(y));
        }
        acc
    }

    /// `∫ (Φ_ε∗δV) · g dy`.
    pub fn pair_first_variation(&self, g: &impl VectorField<T>) -> T {
        let cell = self.grid.spacing * self.grid.spacing;
        let mut acc = T::zero();
        for (idx, y) in self.nodes() {
            let f = self.first_variation[idx];
            if f != Vec2::zero() {
                acc += cell * f.dot(g.value(y));
            }
        }
        acc
    }

    /// Lattice value of `Φ_ε∗‖V‖` at the node nearest to `y`.
    pub fn mass_near(&self, y: Vec2<T>) -> T {
        let y = self.domain.wrap(y);
        let s = self.grid.spacing;
        let i = (y.x / s).round().to_i64().unwrap() - self.grid.origin.0;
        let j = (y.y / s).round().to_i64().unwrap() - self.grid.origin.1;
        let (nx, ny) = self.grid.dims;
        let (i, j) = if self.grid.periodic {
            (i.rem_euclid(nx as i64), j.rem_euclid(ny as i64))
        } else {
            (i, j)
        };
        if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
            return T::zero();
        }
        self.mass[j as usize * nx + i as usize]
    }
}

impl<T: Scalar> VectorField<T> for CurvatureField<T> {
    fn value(&self, x: Vec2<T>) -> Vec2<T> {
        self.eval(x).0
    }
    fn jacobian(&self, x: Vec2<T>) -> Mat2<T> {
        self.eval(x).1
    }
}

/// `∫ |Φ_ε∗δV|² Ω / (Φ_ε∗‖V‖ + εΩ⁻¹) dx`.
pub fn l2_energy<T: Scalar>(v: &VarifoldView<T>, k: &Kernel<T>, cfg: &QuadratureConfig<T>) -> Result<T, QuadratureError> {
    smoothed_mean_curvature(v, k, cfg, &[]).map(|f| f.energy)
}
