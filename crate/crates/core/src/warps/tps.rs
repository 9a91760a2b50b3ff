//! Thin-plate spline warps.
//!
//! Each axis is modelled as
//!
//! ```text
//! f(x, y) = a1 + a2 x + a3 y + sum_i w_i U(|(x, y) - (x_i, y_i)|),   U(r) = r^2 ln r, U(0) = 0
//! ```
//!
//! with `f(x_i, y_i)` equal to the target coordinate and the side conditions
//! `sum w_i = sum w_i x_i = sum w_i y_i = 0`. The `(N + 3)` square system is
//! solved in scaled units: source points are centred on their centroid and
//! divided by their largest distance from it. Under the side conditions a
//! change of scale only adds an affine term, so the fitted warp is the same
//! function of pixel coordinates. The system is solved for the displacement
//! `target - source`, which keeps identity and translation fits exact.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::UVField;

/// Above this condition number the fit is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Key-point pairs: `source[i]` maps to `target[i]`, both in pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpsControlSet {
    pub source: Vec<[f64; 2]>,
    pub target: Vec<[f64; 2]>,
}

impl TpsControlSet {
    pub fn new(source: Vec<[f64; 2]>, target: Vec<[f64; 2]>) -> Result<Self> {
        let set = Self { source, target };
        set.validate()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.source.len() != self.target.len() {
            return Err(Error::param(
                "controls",
                format!("{} sources but {} targets", self.source.len(), self.target.len()),
            ));
        }
        if self.source.len() < 3 {
            return Err(Error::param("controls", format!("need at least 3 points, got {}", self.source.len())));
        }
        if !self.source.iter().chain(&self.target).flatten().all(|c| c.is_finite()) {
            return Err(Error::param("controls", "coordinates must be finite"));
        }
        Ok(())
    }
}

/// Regular `nx x ny` grid spanning the image corners; each target is its
/// source plus isotropic Gaussian jitter of `sigma` pixels.
pub fn jittered_grid<R: Rng + ?Sized>(
    width: usize,
    height: usize,
    nx: usize,
    ny: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<TpsControlSet> {
    if nx < 2 || ny < 2 {
        return Err(Error::param("grid", format!("need at least 2x2 control points, got {nx}x{ny}")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::param("jitter", e.to_string()))?;
    let mut source = Vec::with_capacity(nx * ny);
    let mut target = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let sx = i as f64 * (width as f64 - 1.0) / (nx - 1) as f64;
            let sy = j as f64 * (height as f64 - 1.0) / (ny - 1) as f64;
            let dx = normal.sample(rng);
            let dy = normal.sample(rng);
            source.push([sx, sy]);
            target.push([sx + dx, sy + dy]);
        }
    }
    TpsControlSet::new(source, target)
}

#[inline]
fn kernel_sq(r2: f64) -> f64 {
    // r^2 ln r = r^2 ln(r^2) / 2
    if r2 == 0.0 {
        0.0
    } else {
        0.5 * r2 * r2.ln()
    }
}

/// A fitted spline pair (one per axis), evaluated as displacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpsModel {
    origin: [f64; 2],
    scale: f64,
    /// Control points in scaled units.
    nodes: Vec<[f64; 2]>,
    /// Kernel weights per axis, in pixels.
    weights: [Vec<f64>; 2],
    /// Affine displacement coefficients per axis over scaled coordinates.
    affine: [[f64; 3]; 2],
}

impl TpsModel {
    #[inline]
    fn to_scaled(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.origin[0]) / self.scale, (y - self.origin[1]) / self.scale)
    }

    /// `(f_x(x, y) - x, f_y(x, y) - y)` in pixels.
    pub fn displacement(&self, x: f64, y: f64) -> (f64, f64) {
        let (qx, qy) = self.to_scaled(x, y);
        let [ax, ay] = &self.affine;
        let mut dx = ax[0] + ax[1] * qx + ax[2] * qy;
        let mut dy = ay[0] + ay[1] * qx + ay[2] * qy;
        for (i, n) in self.nodes.iter().enumerate() {
            let (ex, ey) = (qx - n[0], qy - n[1]);
            let u = kernel_sq(ex * ex + ey * ey);
            dx += self.weights[0][i] * u;
            dy += self.weights[1][i] * u;
        }
        (dx, dy)
    }

    /// `(f_x(x, y), f_y(x, y))`.
    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let (dx, dy) = self.displacement(x, y);
        (x + dx, y + dy)
    }

    pub fn kernel_weights(&self) -> [&[f64]; 2] {
        [&self.weights[0], &self.weights[1]]
    }

    /// Affine part of `f` in pixel coordinates: axis `a` maps to
    /// `c[a][0] + c[a][1] x + c[a][2] y` plus the kernel sum.
    pub fn affine(&self) -> [[f64; 3]; 2] {
        let s = self.scale;
        let [ox, oy] = self.origin;
        let to_pixel = |b: &[f64; 3], identity: [f64; 2]| {
            let cx = b[1] / s + identity[0];
            let cy = b[2] / s + identity[1];
            [b[0] - b[1] * ox / s - b[2] * oy / s, cx, cy]
        };
        [to_pixel(&self.affine[0], [1.0, 0.0]), to_pixel(&self.affine[1], [0.0, 1.0])]
    }

    /// `[sum w, sum w qx, sum w qy]` per axis, in scaled units.
    pub fn side_constraints(&self) -> [[f64; 3]; 2] {
        let sums = |w: &[f64]| {
            w.iter().zip(&self.nodes).fold([0.0; 3], |acc, (wi, n)| {
                [acc[0] + wi, acc[1] + wi * n[0], acc[2] + wi * n[1]]
            })
        };
        [sums(&self.weights[0]), sums(&self.weights[1])]
    }
}

pub fn tps_fit(controls: &TpsControlSet) -> Result<TpsModel> {
    controls.validate()?;
    let n = controls.len();
    let inv_n = 1.0 / n as f64;
    let origin = controls
        .source
        .iter()
        .fold([0.0, 0.0], |acc, p| [acc[0] + p[0] * inv_n, acc[1] + p[1] * inv_n]);
    let scale = controls
        .source
        .iter()
        .map(|p| (p[0] - origin[0]).hypot(p[1] - origin[1]))
        .fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    let nodes: Vec<[f64; 2]> = controls
        .source
        .iter()
        .map(|p| [(p[0] - origin[0]) / scale, (p[1] - origin[1]) / scale])
        .collect();

    let m = n + 3;
    let mut system = DMatrix::<f64>::zeros(m, m);
    for i in 0..n {
        for j in (i + 1)..n {
            let (ex, ey) = (nodes[i][0] - nodes[j][0], nodes[i][1] - nodes[j][1]);
            let u = kernel_sq(ex * ex + ey * ey);
            system[(i, j)] = u;
            system[(j, i)] = u;
        }
        let row = [1.0, nodes[i][0], nodes[i][1]];
        for (k, &p) in row.iter().enumerate() {
            system[(i, n + k)] = p;
            system[(n + k, i)] = p;
        }
    }

    let singular = system.clone().singular_values();
    let (smax, smin) = singular
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }

    let mut rhs = DMatrix::<f64>::zeros(m, 2);
    for (i, (s, t)) in controls.source.iter().zip(&controls.target).enumerate() {
        rhs[(i, 0)] = t[0] - s[0];
        rhs[(i, 1)] = t[1] - s[1];
    }
    let lu = system.clone().lu();
    let mut solution = lu.solve(&rhs).ok_or(Error::IllConditioned { condition })?;
    // One step of iterative refinement.
    let residual = &rhs - &system * &solution;
    if let Some(correction) = lu.solve(&residual) {
        solution += correction;
    }

    let column = |c: usize| -> DVector<f64> { solution.column(c).into_owned() };
    let (sx, sy) = (column(0), column(1));
    Ok(TpsModel {
        origin,
        scale,
        nodes,
        weights: [sx.rows(0, n).iter().copied().collect(), sy.rows(0, n).iter().copied().collect()],
        affine: [[sx[n], sx[n + 1], sx[n + 2]], [sy[n], sy[n + 1], sy[n + 2]]],
    })
}

/// Displacement `(f_x - x, f_y - y)` at every pixel.
pub fn tps_uv(model: &TpsModel, width: usize, height: usize) -> Result<UVField> {
    let n = width * height;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    u.par_chunks_mut(width.max(1))
        .zip(v.par_chunks_mut(width.max(1)))
        .enumerate()
        .for_each(|(y, (urow, vrow))| {
            for x in 0..width {
                let (dx, dy) = model.displacement(x as f64, y as f64);
                urow[x] = dx + 0.0;
                vrow[x] = dy + 0.0;
            }
        });
    UVField::new(width, height, u, v)
}
