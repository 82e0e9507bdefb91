//! Zero-velocity curves 2Ω(x, y) = C in the orbital plane.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, Position};
use crate::roots;

/// Nodes closer than this to a singular centre are masked.
pub const MASK_EPS: f64 = 1e-3;
pub const DEFAULT_HALF_WIDTH: f64 = 2.0;
pub const DEFAULT_RESOLUTION: usize = 800;

/// Which height field is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZvField {
    /// 2Ω with the disk potential V.
    #[default]
    Omega,
    /// Twice the potential of the force field. Its critical points are the
    /// equilibria, so its level sets pinch there.
    ForcePotential,
}

impl ZvField {
    pub fn eval(self, model: &Model, p: Position) -> Result<f64> {
        Ok(2.0
            * match self {
                ZvField::Omega => model.omega(p)?,
                ZvField::ForcePotential => model.force_potential(p)?,
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn square(half: f64) -> Self {
        Self { x_min: -half, x_max: half, y_min: -half, y_max: half }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_max > self.x_min
            && self.y_max > self.y_min
            && [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("degenerate window {self:?}")))
        }
    }
}

impl Default for Window {
    fn default() -> Self {
        Self::square(DEFAULT_HALF_WIDTH)
    }
}

/// 2Ω sampled on a uniform grid. Node (i, j) sits at
/// (x_min + i·dx, y_min + j·dy); storage is row-major in j.
#[derive(Debug, Clone, PartialEq)]
pub struct ZvGrid {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub field: ZvField,
    /// Node values, NaN where masked.
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    /// Values at cell centres, used to split saddle cells.
    pub centers: Vec<f64>,
}

impl ZvGrid {
    pub fn dx(&self) -> f64 {
        (self.window.x_max - self.window.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.window.y_max - self.window.y_min) / (self.ny - 1) as f64
    }

    pub fn node(&self, i: usize, j: usize) -> Position {
        Position::new(self.window.x_min + i as f64 * self.dx(), self.window.y_min + j as f64 * self.dy())
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn masked(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.nx + i]
    }

    fn cell_masked(&self, i: usize, j: usize) -> bool {
        self.masked(i, j) || self.masked(i + 1, j) || self.masked(i, j + 1) || self.masked(i + 1, j + 1)
    }

    /// Smallest unmasked node value.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min)
    }
}

fn singular_centres(model: &Model) -> Vec<Position> {
    let mu = model.mu();
    let mut c = vec![Position::new(-mu, 0.0), Position::new(1.0 - mu, 0.0)];
    if model.has_disk() {
        c.push(Position::new(0.0, 0.0));
    }
    c
}

/// Sample the chosen field on an nx × ny grid.
pub fn sample_grid(model: &Model, window: Window, nx: usize, ny: usize, field: ZvField) -> Result<ZvGrid> {
    window.validate()?;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParams(format!("grid must be at least 2x2, got {nx}x{ny}")));
    }
    let centres = singular_centres(model);
    let dx = (window.x_max - window.x_min) / (nx - 1) as f64;
    let dy = (window.y_max - window.y_min) / (ny - 1) as f64;
    let eval = |p: Position| -> Option<f64> {
        if centres.iter().any(|c| (p.x - c.x).hypot(p.y - c.y) < MASK_EPS) {
            return None;
        }
        field.eval(model, p).ok().filter(|v| v.is_finite())
    };
    let rows: Vec<Vec<Option<f64>>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let y = window.y_min + j as f64 * dy;
            (0..nx).map(|i| eval(Position::new(window.x_min + i as f64 * dx, y))).collect()
        })
        .collect();
    let centers: Vec<f64> = (0..ny - 1)
        .into_par_iter()
        .flat_map_iter(|j| {
            let y = window.y_min + (j as f64 + 0.5) * dy;
            (0..nx - 1)
                .map(move |i| eval(Position::new(window.x_min + (i as f64 + 0.5) * dx, y)).unwrap_or(f64::NAN))
                .collect::<Vec<_>>()
        })
        .collect();
    let flat: Vec<Option<f64>> = rows.into_iter().flatten().collect();
    Ok(ZvGrid {
        window,
        nx,
        ny,
        field,
        values: flat.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
        mask: flat.iter().map(Option::is_none).collect(),
        centers,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet {
    pub level: f64,
    pub polylines: Vec<Vec<(f64, f64)>>,
}

impl ContourSet {
    pub fn vertices(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.polylines.iter().flatten()
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }
}

/// Identifier of a grid edge: horizontal edges (i, j)–(i+1, j) are even,
/// vertical edges (i, j)–(i, j+1) odd.
type EdgeId = usize;

/// Marching squares at `level`, with linear interpolation along cell edges.
pub fn extract_contours(grid: &ZvGrid, level: f64) -> ContourSet {
    let nx = grid.nx;
    let h_edge = |i: usize, j: usize| 2 * (j * nx + i);
    let v_edge = |i: usize, j: usize| 2 * (j * nx + i) + 1;
    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();

    for j in 0..grid.ny - 1 {
        for i in 0..nx - 1 {
            if grid.cell_masked(i, j) {
                continue;
            }
            let above = |ii, jj| grid.value(ii, jj) > level;
            let (b00, b10, b11, b01) = (above(i, j), above(i + 1, j), above(i + 1, j + 1), above(i, j + 1));
            let bottom = h_edge(i, j);
            let top = h_edge(i, j + 1);
            let left = v_edge(i, j);
            let right = v_edge(i + 1, j);
            let mut crossed = Vec::with_capacity(4);
            if b00 != b10 {
                crossed.push(bottom);
            }
            if b10 != b11 {
                crossed.push(right);
            }
            if b11 != b01 {
                crossed.push(top);
            }
            if b01 != b00 {
                crossed.push(left);
            }
            match crossed.len() {
                2 => segments.push((crossed[0], crossed[1])),
                4 => {
                    let center = grid.centers[j * (nx - 1) + i];
                    if (center > level) == b00 {
                        segments.push((bottom, right));
                        segments.push((left, top));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => {}
            }
        }
    }

    let point_of = |e: EdgeId| -> (f64, f64) {
        let node = e / 2;
        let (i, j) = (node % nx, node / nx);
        let (i2, j2) = if e.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (va, vb) = (grid.value(i, j), grid.value(i2, j2));
        let t = ((level - va) / (vb - va)).clamp(0.0, 1.0);
        let (pa, pb) = (grid.node(i, j), grid.node(i2, j2));
        (pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y))
    };

    ContourSet {
        level,
        polylines: join_segments(&segments).into_iter().map(|ids| ids.into_iter().map(point_of).collect()).collect(),
    }
}

/// Chain segments sharing an edge into polylines. Closed loops repeat their
/// first vertex at the end.
fn join_segments(segments: &[(EdgeId, EdgeId)]) -> Vec<Vec<EdgeId>> {
    use std::collections::HashMap;
    let mut by_edge: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(k);
        by_edge.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start_seg: usize, start_edge: EdgeId, used: &mut Vec<bool>| -> Vec<EdgeId> {
        let mut line = vec![start_edge];
        let mut seg = start_seg;
        let mut edge = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            edge = if a == edge { b } else { a };
            line.push(edge);
            match by_edge[&edge].iter().copied().find(|&s| !used[s]) {
                Some(s) => seg = s,
                None => break,
            }
        }
        line
    };

    // Open chains start at edges touched once.
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let (a, b) = segments[k];
        let start = if by_edge[&a].len() == 1 {
            Some(a)
        } else if by_edge[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(e) = start {
            out.push(walk(k, e, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            out.push(walk(k, segments[k].0, &mut used));
        }
    }
    out
}

/// Number of 4-connected node components on each side of the level. Masked
/// nodes border a singularity where 2Ω → +∞ and count as allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    /// 2Ω < C: motion impossible.
    pub forbidden: usize,
    /// 2Ω ≥ C.
    pub allowed: usize,
}

pub fn region_components(grid: &ZvGrid, level: f64) -> RegionCounts {
    let (nx, ny) = (grid.nx, grid.ny);
    let allowed: Vec<bool> = (0..nx * ny).map(|k| grid.mask[k] || grid.values[k] >= level).collect();
    let mut seen = vec![false; nx * ny];
    let mut counts = RegionCounts { forbidden: 0, allowed: 0 };
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if seen[start] {
            continue;
        }
        let side = allowed[start];
        if side {
            counts.allowed += 1;
        } else {
            counts.forbidden += 1;
        }
        seen[start] = true;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (i, j) = (k % nx, k / nx);
            let mut push = |n: usize| {
                if !seen[n] && allowed[n] == side {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if i > 0 {
                push(k - 1);
            }
            if i + 1 < nx {
                push(k + 1);
            }
            if j > 0 {
                push(k - nx);
            }
            if j + 1 < ny {
                push(k + nx);
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarSample {
    /// Radius of the pure-rotation circle n²r² = C.
    pub radius: f64,
    pub level: f64,
    /// Largest deviation of the true contour from that circle over the rays.
    pub defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearSample {
    /// Distance from the larger primary.
    pub rho: f64,
    /// Largest n²r² / |2Ω| over the rays: the share of the rotational term
    /// that the equipotential approximation drops.
    pub rotation_share: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaySample {
    pub theta: f64,
    /// Outermost radius along the ray where the field equals C, if any.
    pub contour_radius: Option<f64>,
    /// √C / n with n taken at that radius.
    pub circle_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub level: f64,
    pub far: Vec<FarSample>,
    pub near: Vec<NearSample>,
    pub rays: Vec<RaySample>,
}

const RAYS: usize = 16;

fn ray(theta: f64, r: f64) -> Position {
    Position::new(r * theta.cos(), r * theta.sin())
}

/// Outermost crossing of the field with `level` along a ray, searched inwards
/// from `r_hi`.
fn outer_crossing(model: &Model, field: ZvField, theta: f64, level: f64, r_hi: f64) -> Option<f64> {
    let f = |r: f64| field.eval(model, ray(theta, r)).map(|v| v - level).unwrap_or(f64::NAN);
    if !(f(r_hi) > 0.0) {
        return None;
    }
    let mut hi = r_hi;
    let mut lo = r_hi * 0.5;
    while lo > 1e-3 {
        let v = f(lo);
        if v <= 0.0 {
            return roots::polish(f, lo, hi, 1e-13).ok();
        }
        hi = lo;
        lo *= 0.5;
    }
    None
}

/// Far-field and near-field behaviour of the zero-velocity curves.
///
/// Far field: for each radius R of `far_radii`, the level C_R = n²R² is set
/// and the true contour radius is found along 16 rays; the defect is the
/// largest |r − R|. Near field: at each distance ρ of `near_rho` from the
/// larger primary, the rotational share n²r²/|2Ω|. Rays: the outer contour
/// radius at `level` compared with √C/n.
pub fn limit_diagnostics(
    model: &Model,
    level: f64,
    field: ZvField,
    far_radii: &[f64],
    near_rho: &[f64],
) -> LimitReport {
    let thetas: Vec<f64> = (0..RAYS).map(|k| k as f64 * std::f64::consts::TAU / RAYS as f64 + 0.1).collect();
    let far = far_radii
        .iter()
        .map(|&radius| {
            let n2 = model.mean_motion_sq_at(Position::new(radius, 0.0));
            let c_r = n2 * radius * radius;
            let defect = thetas
                .iter()
                .map(|&t| {
                    outer_crossing(model, field, t, c_r, 4.0 * radius).map_or(f64::INFINITY, |r| (r - radius).abs())
                })
                .fold(0.0, f64::max);
            FarSample { radius, level: c_r, defect }
        })
        .collect();
    let mu = model.mu();
    let near = near_rho
        .iter()
        .map(|&rho| {
            let share = thetas
                .iter()
                .filter_map(|&t| {
                    let p = Position::new(-mu + rho * t.cos(), rho * t.sin());
                    let two_omega = field.eval(model, p).ok()?;
                    let n2 = model.mean_motion_sq_at(p);
                    Some(n2 * (p.x * p.x + p.y * p.y) / two_omega.abs())
                })
                .fold(0.0, f64::max);
            NearSample { rho, rotation_share: share }
        })
        .collect();
    let rays = thetas
        .iter()
        .map(|&theta| {
            let r_hi = 4.0 * (level.abs() / model.mean_motion_sq().min(1.0)).sqrt().max(4.0);
            let contour_radius = outer_crossing(model, field, theta, level, r_hi);
            let n2 = model.mean_motion_sq_at(ray(theta, contour_radius.unwrap_or(r_hi)));
            RaySample { theta, contour_radius, circle_radius: (level.max(0.0) / n2).sqrt() }
        })
        .collect();
    LimitReport { level, far, near, rays }
}
