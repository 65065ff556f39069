//! Finite-difference estimate of the Beltrami coefficient of a piece.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::piece::QrPiece;
use crate::error::{QrwdError, Result};
use crate::numerics::{c, C64, I};

pub const MIN_GRID_RES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilatationReport {
    pub piece: String,
    pub d: Option<u32>,
    pub grid_res: usize,
    pub sup_mu: f64,
    #[serde(rename = "sup_K")]
    pub sup_k: f64,
    pub argmax: [f64; 2],
    /// Largest relative jump across declared seams.
    pub seam_jump: f64,
    /// Points this close to a branch change are left out of the sup.
    pub excluded_band: f64,
    pub excluded_points: usize,
    pub evaluated_points: usize,
}

struct Sample {
    mu: f64,
    z: C64,
}

/// `f_x`, `f_y` by central differences at step `h`.
fn partials(vals: &[C64; 4], h: f64) -> (C64, C64) {
    ((vals[0] - vals[1]) / (2.0 * h), (vals[2] - vals[3]) / (2.0 * h))
}

/// Richardson-extrapolated `μ̂` at `z` from central differences at `h` and `h/2`.
///
/// Returns `None` when a stencil point leaves the domain or, with `strict`,
/// lands on another branch; `|μ̂| >= 1` is an orientation error.
pub fn mu_estimate(piece: &dyn QrPiece, z: C64, h: f64, strict: bool) -> Result<Option<C64>> {
    let dirs = [c(1.0, 0.0), c(-1.0, 0.0), I, -I];
    let (_, branch) = piece.eval_branch(z)?;
    let at = |step: f64| -> Result<Option<[C64; 4]>> {
        let mut out = [C64::new(0.0, 0.0); 4];
        for (k, d) in dirs.iter().enumerate() {
            let p = z + d * step;
            if !piece.contains(p) {
                return Ok(None);
            }
            let (w, b) = piece.eval_branch(p)?;
            if strict && b != branch {
                return Ok(None);
            }
            out[k] = w;
        }
        Ok(Some(out))
    };
    // the outer ring only decides exclusion
    if strict && at(2.0 * h)?.is_none() {
        return Ok(None);
    }
    let (Some(coarse), Some(fine)) = (at(h)?, at(h / 2.0)?) else {
        return Ok(None);
    };
    let (cx, cy) = partials(&coarse, h);
    let (fx, fy) = partials(&fine, h / 2.0);
    let fx = (fx * 4.0 - cx) / 3.0;
    let fy = (fy * 4.0 - cy) / 3.0;
    let dz = (fx - I * fy) * 0.5;
    let dzb = (fx + I * fy) * 0.5;
    if dzb.norm() == 0.0 {
        return Ok(Some(c(0.0, 0.0)));
    }
    let mu = dzb / dz;
    if !(mu.norm() < 1.0) {
        return Err(QrwdError::Orientation { re: z.re, im: z.im, mu_abs: mu.norm() });
    }
    Ok(Some(mu))
}

fn sample_point(piece: &dyn QrPiece, z: C64, h: f64) -> Result<Option<Sample>> {
    Ok(mu_estimate(piece, z, h, true)?.map(|mu| Sample { mu: mu.norm(), z }))
}

/// Relative jump of the map across each seam vertex, one-sided at distance `eps`.
pub fn seam_jump(piece: &dyn QrPiece, eps: f64) -> f64 {
    let mut worst = 0.0f64;
    for line in piece.seams() {
        for k in 0..line.len() {
            let a = line[k.saturating_sub(1)];
            let b = line[(k + 1).min(line.len() - 1)];
            let tangent = b - a;
            if tangent.norm() == 0.0 {
                continue;
            }
            let n = I * tangent / tangent.norm();
            let (p, q) = (line[k] + n * eps, line[k] - n * eps);
            if !(piece.contains(p) && piece.contains(q)) {
                continue;
            }
            if let (Ok(u), Ok(v)) = (piece.eval(p), piece.eval(q)) {
                let scale = u.norm().max(v.norm()).max(1.0);
                worst = worst.max((u - v).norm() / scale);
            }
        }
    }
    worst
}

/// Samples `μ̂` on a `grid_res × grid_res` grid over the bounding box of the piece.
pub fn estimate_dilatation(piece: &dyn QrPiece, grid_res: usize) -> Result<DilatationReport> {
    if grid_res < MIN_GRID_RES {
        return Err(QrwdError::Precondition(format!("grid_res must be >= {MIN_GRID_RES}, got {grid_res}")));
    }
    let bbox = piece.domain().bbox();
    let (w, h) = (2.0 * bbox.half_width, 2.0 * bbox.half_height);
    let (dx, dy) = (w / grid_res as f64, h / grid_res as f64);
    let step = dx.min(dy) / 8.0;
    let corner = bbox.center - c(bbox.half_width, bbox.half_height);
    let rows: Vec<Result<(Option<Sample>, usize, usize)>> = (0..grid_res)
        .into_par_iter()
        .map(|j| {
            let mut best: Option<Sample> = None;
            let (mut used, mut excluded) = (0, 0);
            for k in 0..grid_res {
                let z = corner + c((k as f64 + 0.5) * dx, (j as f64 + 0.5) * dy);
                if !piece.contains(z) {
                    continue;
                }
                match sample_point(piece, z, step)? {
                    Some(s) => {
                        used += 1;
                        if best.as_ref().map_or(true, |b| s.mu > b.mu) {
                            best = Some(s);
                        }
                    }
                    None => excluded += 1,
                }
            }
            Ok((best, used, excluded))
        })
        .collect();
    let (mut best, mut used, mut excluded) = (Sample { mu: 0.0, z: bbox.center }, 0, 0);
    for row in rows {
        let (b, u, e) = row?;
        used += u;
        excluded += e;
        if let Some(b) = b {
            if b.mu > best.mu {
                best = b;
            }
        }
    }
    let diam = w.hypot(h);
    Ok(DilatationReport {
        piece: piece.name(),
        d: piece.degree(),
        grid_res,
        sup_mu: best.mu,
        sup_k: (1.0 + best.mu) / (1.0 - best.mu),
        argmax: [best.z.re, best.z.im],
        seam_jump: seam_jump(piece, 1e-10 * diam),
        excluded_band: 2.0 * step,
        excluded_points: excluded,
        evaluated_points: used,
    })
}
