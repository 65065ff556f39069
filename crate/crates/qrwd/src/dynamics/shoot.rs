//! Fixed-point iteration `w_n ← c_{n+1}(w)` and the inclusion checks at the fixed point.

use serde::{Deserialize, Serialize};

use super::{center_chain, InstanceConfig, ToyInstance, BOUNDARY_SAMPLES, M_STEPS, TARGET_CENTER, TARGET_RADIUS};
use crate::error::{QrwdError, Result};
use crate::numerics::{c, Disc, C64};
use crate::qr_map::ParameterSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootStep {
    /// Free parameters `w_N … w_{T-1}` at this iterate.
    pub w: Vec<C64>,
    /// `c_{N+1} … c_T` computed from them.
    pub centers: Vec<C64>,
    /// `sup_n |w_n - c_{n+1}(w)|`.
    pub residual: f64,
    pub solve_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootReport {
    pub w_star: ParameterSequence,
    pub residual: f64,
    /// Largest ratio of successive residuals; 0 when one step sufficed.
    pub contraction: f64,
    pub converged: bool,
    /// Updates performed.
    pub iterations: usize,
    pub history: Vec<ShootStep>,
    /// `(iteration, n, w_n)` outside the closed disc `D(1/2, 1/8)`.
    pub excursions: Vec<(usize, u32, C64)>,
}

fn centers(inst: &ToyInstance) -> Result<Vec<C64>> {
    (inst.first_index() + 1..=inst.last_index()).map(|n| Ok(center_chain(n, inst)?.c_n)).collect()
}

/// Iterates `w_n ← c_{n+1}(w)` for `N <= n < T`; `w_T` and beyond keep the fill `1/2`.
///
/// Every iterate rebuilds `g_w` and re-solves for `φ`.
pub fn shoot(config: &InstanceConfig, w0: &ParameterSequence, tol: f64, max_iter: usize) -> Result<ShootReport> {
    if !(tol > 0.0) {
        return Err(QrwdError::OutOfRange(format!("shooting tol must be positive, got {tol}")));
    }
    let first = config.toy.first_index;
    let free = config.toy.d.len().saturating_sub(1);
    let fill = c(TARGET_CENTER, 0.0);
    let mut w: Vec<C64> = (0..free).map(|k| w0.get(first + k as u32)).collect();
    let mut history = Vec::new();
    let mut excursions = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    loop {
        for (k, wk) in w.iter().enumerate() {
            if (wk - TARGET_CENTER).norm() > TARGET_RADIUS {
                excursions.push((iterations, first + k as u32, *wk));
            }
        }
        let seq = ParameterSequence::new(first, w.clone(), fill);
        let inst = ToyInstance::build(config, &seq)?;
        let cs = centers(&inst)?;
        let residual = w.iter().zip(&cs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        history.push(ShootStep { w: w.clone(), centers: cs.clone(), residual, solve_terms: inst.solve_terms });
        if residual < tol {
            converged = true;
            break;
        }
        if iterations == max_iter {
            break;
        }
        w = cs;
        iterations += 1;
    }
    let contraction = history
        .windows(2)
        .map(|p| if p[0].residual > 0.0 { p[1].residual / p[0].residual } else { 0.0 })
        .fold(0.0, f64::max);
    let residual = history.last().map(|s| s.residual).unwrap_or(f64::NAN);
    Ok(ShootReport {
        w_star: ParameterSequence::new(first, w, fill),
        residual,
        contraction,
        converged,
        iterations,
        history,
        excursions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionRow {
    pub n: u32,
    pub d: u32,
    pub r_prime: f64,
    /// `(1/2)^{2d_n}`.
    pub image_radius: f64,
    /// Largest `|f(z) - w_n|` over `z ∈ ∂D(φ(ih_n), R'_n)`.
    pub image_max_dev: f64,
    pub image_ok: bool,
    /// Measured inner radius of the pull-back of `U_{n+1}` around `c_{n+1}`.
    pub inner_radius_next: Option<f64>,
    /// Koebe lower bound `|Ψ'| R'_{n+1} / 4` for that radius.
    pub koebe_next: Option<f64>,
    /// `ρ̂_{n+1} - |w_n - c_{n+1}| - (1/2)^{2d_n}`.
    pub disc_margin: Option<f64>,
    /// Boundary samples whose fourth image lands in `U_{n+1}`.
    pub orbit_hits: Option<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub rows: Vec<InclusionRow>,
    pub pass: bool,
}

/// Samples `∂U_n`, `U_n = D(φ(ih_n), R'_n)`, and checks `f(U_n) ⊆ D(w_n, (1/2)^{2d_n}) ⊆ pull-back of U_{n+1}`.
pub fn verify_inclusions(inst: &ToyInstance, samples: usize) -> Result<InclusionReport> {
    let samples = if samples == 0 { BOUNDARY_SAMPLES } else { samples };
    let mut rows = Vec::new();
    for (n, l) in inst.schedule.toy_levels()? {
        let wn = inst.w.get(n);
        let r_prime = inst.rprime(n)?;
        let centre = inst.phi.eval(c(0.0, l.h));
        let image_radius = 0.5f64.powi(2 * l.d as i32);
        let boundary = Disc::new(centre, r_prime)?.boundary_samples(samples);
        let images: Vec<C64> = boundary.iter().map(|&z| inst.f(z)).collect::<Result<_>>()?;
        let image_max_dev = images.iter().map(|v| (v - wn).norm()).fold(0.0, f64::max);
        let image_ok = image_max_dev <= image_radius;
        let mut row = InclusionRow {
            n,
            d: l.d,
            r_prime,
            image_radius,
            image_max_dev,
            image_ok,
            inner_radius_next: None,
            koebe_next: None,
            disc_margin: None,
            orbit_hits: None,
            pass: image_ok,
        };
        if n < inst.last_index() {
            let next = center_chain(n + 1, inst)?;
            let rho = inst.inner_radius(n + 1, &next)?;
            let rp_next = inst.rprime(n + 1)?;
            let koebe = inst.pull_back_derivative(next.start)?.norm() * rp_next / 4.0;
            let margin = rho - (wn - next.c_n).norm() - image_radius;
            let mut hits = 0;
            for &v in &images {
                let mut z = v;
                let mut ok = true;
                for _ in 0..M_STEPS {
                    match inst.f(z) {
                        Ok(u) => z = u,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && (z - next.start).norm() < rp_next {
                    hits += 1;
                }
            }
            row.inner_radius_next = Some(rho);
            row.koebe_next = Some(koebe);
            row.disc_margin = Some(margin);
            row.orbit_hits = Some(hits);
            row.pass = image_ok && margin > 0.0;
        }
        rows.push(row);
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(InclusionReport { rows, pass })
}
