//! Toy-scale dynamics of `f = g_w ∘ φ⁻¹`: centre chains, containment checks,
//! the shooting solver for the parameters `w_n`, inclusions and orbits.
//!
//! Every toy level takes exactly three inverse steps from `φ(ih_n)` to its
//! landing centre `c_n`, so `f^3(c_n) = φ(ih_n)` and `f(φ(ih_n)) = w_n`.

mod orbit;
mod phi;
mod shoot;

pub use orbit::{escape_time_field, iterate_orbit, EscapeField, ESCAPE_FAILED, ESCAPE_INTERIOR};
pub use phi::PhiMap;
pub use shoot::{shoot, verify_inclusions, InclusionReport, InclusionRow, ShootReport, ShootStep};

use serde::{Deserialize, Serialize};

use crate::base_map::{build_schedule, g_inverse_branch, Schedule, ScheduleMode, ToyLevel, ToyParams};
use crate::beltrami::{solve_mrmt, BeltramiField, Grid, GridMap, DEFAULT_MAX_TERMS, DEFAULT_TOL};
use crate::error::{QrwdError, Result};
use crate::numerics::{c, Disc, Rectangle, C64, I};
use crate::qr_map::{ParameterSequence, QrMap, RegionLabel};

/// Inverse steps from `φ(ih_n)` down to the landing centre.
pub const M_STEPS: usize = 3;
/// Boundary samples used by the containment and inclusion checks.
pub const BOUNDARY_SAMPLES: usize = 1000;
/// Parameters must stay inside this disc for the shift maps to exist.
pub const PARAMETER_RADIUS: f64 = 0.75;
/// Target disc of the landing centres.
pub const TARGET_CENTER: f64 = 0.5;
pub const TARGET_RADIUS: f64 = 0.125;

fn default_resolution() -> usize {
    256
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_max_terms() -> usize {
    DEFAULT_MAX_TERMS
}
fn default_mu_scale() -> f64 {
    1.0
}
fn default_pad() -> f64 {
    2.0
}

/// Everything needed to rebuild a toy instance for a given parameter sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub toy: ToyParams,
    /// Use the real-symmetric map instead of the even one.
    #[serde(default)]
    pub symmetric: bool,
    /// The solver grid holds about `resolution²` nodes with square cells.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    /// Multiplies the Beltrami coefficient; 0 makes `φ` the identity.
    #[serde(default = "default_mu_scale")]
    pub mu_scale: f64,
    /// Margin around the squares covered by the solver box.
    #[serde(default = "default_pad")]
    pub pad: f64,
}

impl InstanceConfig {
    pub fn new(toy: ToyParams) -> Self {
        InstanceConfig {
            toy,
            symmetric: false,
            resolution: default_resolution(),
            tol: default_tol(),
            max_terms: default_max_terms(),
            mu_scale: default_mu_scale(),
            pad: default_pad(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 64 {
            return Err(QrwdError::OutOfRange(format!("resolution must be >= 64, got {}", self.resolution)));
        }
        if !(self.tol > 0.0) || self.max_terms == 0 {
            return Err(QrwdError::OutOfRange("solver tol and max_terms must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mu_scale) {
            return Err(QrwdError::OutOfRange(format!("mu_scale must lie in [0, 1], got {}", self.mu_scale)));
        }
        if !(self.pad >= 0.0) {
            return Err(QrwdError::OutOfRange(format!("pad must be >= 0, got {}", self.pad)));
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Schedule> {
        build_schedule(self.toy.d.len() as u32, ScheduleMode::Toy, Some(&self.toy))
    }

    /// The starting sequence `w_n = 1/2`.
    pub fn half_parameters(&self) -> ParameterSequence {
        ParameterSequence::constant(self.toy.first_index, c(TARGET_CENTER, 0.0))
    }
}

/// `g_w`, the solved `φ` and the schedule; immutable once built.
#[derive(Debug, Clone)]
pub struct ToyInstance {
    pub config: InstanceConfig,
    pub schedule: Schedule,
    pub w: ParameterSequence,
    pub map: QrMap,
    pub phi: PhiMap,
    /// The solver box.
    pub window: Rectangle,
    /// Neumann terms used by the solve.
    pub solve_terms: usize,
}

/// Box around the squares with roughly square cells and `res²` nodes.
fn solver_grid(map: &QrMap, res: usize, pad: f64) -> Result<Grid> {
    let ext = map.extent().ok_or_else(|| QrwdError::Invalid("toy map has no squares".into()))?;
    let bbox = Rectangle { center: ext.center, half_width: ext.half_width + pad, half_height: ext.half_height + pad };
    let aspect = bbox.half_height / bbox.half_width;
    let nx = ((res as f64 / aspect.sqrt()).round() as usize).max(2);
    let ny = (res * res / nx).max(2);
    Grid::new(bbox, nx, ny)
}

impl ToyInstance {
    pub fn build(config: &InstanceConfig, w: &ParameterSequence) -> Result<Self> {
        config.validate()?;
        let schedule = config.schedule()?;
        let map = if config.symmetric { QrMap::symmetric(&schedule, w)? } else { QrMap::even(&schedule, w)? };
        let grid = solver_grid(&map, config.resolution, config.pad)?;
        let (phi, solve_terms) = if config.mu_scale == 0.0 {
            (GridMap::identity(grid), 0)
        } else {
            let regions = map.support_regions();
            let field = BeltramiField::from_fn(
                grid,
                |z| regions.iter().any(|r| r.contains(z)),
                |z| Ok(map.beltrami(z)? * config.mu_scale),
            )?;
            let phi = solve_mrmt(&field, config.tol, config.max_terms)?;
            let terms = phi.residuals.len();
            (phi, terms)
        };
        Ok(ToyInstance {
            config: config.clone(),
            schedule,
            w: w.clone(),
            map,
            phi: PhiMap::new(phi),
            window: grid.bbox,
            solve_terms,
        })
    }

    pub fn first_index(&self) -> u32 {
        self.schedule.first_index
    }

    pub fn last_index(&self) -> u32 {
        self.schedule.last_index()
    }

    pub fn level(&self, n: u32) -> Result<&ToyLevel> {
        self.schedule.toy_level(n)
    }

    /// `f = g_w ∘ φ⁻¹`.
    pub fn f(&self, z: C64) -> Result<C64> {
        self.map.eval(self.phi.invert(z)?)
    }

    /// Same as [`ToyInstance::f`] with the unpolished grid inverse, for rendering.
    pub fn f_fast(&self, z: C64) -> Result<C64> {
        self.map.eval(self.phi.invert_fast(z)?)
    }

    /// `(φ ∘ g⁻¹)^3` along the branch with `Re ≥ 0`; also returns the intermediate preimages.
    pub fn pull_back(&self, start: C64) -> Result<(Vec<C64>, Vec<C64>)> {
        let (mut hats, mut cs) = (Vec::with_capacity(M_STEPS), Vec::with_capacity(M_STEPS));
        let mut p = start;
        for _ in 0..M_STEPS {
            let z = g_inverse_branch(p)?;
            p = self.phi.eval(z);
            hats.push(z);
            cs.push(p);
        }
        Ok((hats, cs))
    }

    /// Derivative of [`ToyInstance::pull_back`] at `start` by the chain rule.
    pub fn pull_back_derivative(&self, start: C64) -> Result<C64> {
        let (hats, _) = self.pull_back(start)?;
        Ok(hats.iter().map(|&z| self.phi.derivative(z) / (2.0 * z.sinh())).product())
    }

    /// `R'_n = C4 R_n` with `C4` the largest ratio such that
    /// `D(φ(ih_n), C4 R_n) ⊆ φ((1/2) D_n)`.
    pub fn rprime(&self, n: u32) -> Result<f64> {
        let l = self.level(n)?;
        let centre = self.phi.eval(c(0.0, l.h));
        let circle = Disc::new(c(0.0, l.h), l.r / 2.0)?.boundary_samples(BOUNDARY_SAMPLES);
        let nearest = self.phi.eval_many(&circle).iter().map(|p| (p - centre).norm()).fold(f64::INFINITY, f64::min);
        Ok(nearest)
    }

    /// Smallest distance from `c_n` to the pulled-back circle `∂D(φ(ih_n), R'_n)`.
    pub fn inner_radius(&self, n: u32, chain: &CenterChain) -> Result<f64> {
        let rp = self.rprime(n)?;
        let circle = Disc::new(chain.start, rp)?.boundary_samples(BOUNDARY_SAMPLES);
        let mut best = f64::INFINITY;
        for p in circle {
            let (_, cs) = self.pull_back(p)?;
            best = best.min((cs[M_STEPS - 1] - chain.c_n).norm());
        }
        Ok(best)
    }
}

/// The three inverse steps from `φ(ih_n)` to `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterChain {
    pub n: u32,
    /// `φ(ih_n)`.
    pub start: C64,
    /// `ĉ_{n,k}`: the preimages under `g`.
    pub hat_c: Vec<C64>,
    /// `c_{n,k} = φ(ĉ_{n,k})`; the last one is `c_n`.
    pub c: Vec<C64>,
    pub c_n: C64,
    /// Largest `|g_w(ĉ_{n,k}) - c_{n,k-1}|`, relative.
    pub residual: f64,
}

/// Builds the chain of level `n` and checks `ĉ_{n,1} ∈ Q_n` and that every
/// step stays off the squares, where `g_w = 2cosh`.
pub fn center_chain(n: u32, inst: &ToyInstance) -> Result<CenterChain> {
    let l = inst.level(n)?;
    let start = inst.phi.eval(c(0.0, l.h));
    let (hat_c, cs) = inst.pull_back(start)?;
    if !l.q.contains_closed(hat_c[0]) {
        return Err(QrwdError::Constructive(format!("level {n}: first preimage {} leaves Q_{n}", hat_c[0])));
    }
    let mut residual = 0.0f64;
    let mut prev = start;
    for (k, (&z, &p)) in hat_c.iter().zip(&cs).enumerate() {
        if inst.map.classify(z) != RegionLabel::Outside {
            return Err(QrwdError::Constructive(format!("level {n}: step {k} preimage {z} lies in a square")));
        }
        residual = residual.max((inst.map.eval(z)? - prev).norm() / prev.norm().max(1.0));
        prev = p;
    }
    Ok(CenterChain { n, start, c_n: cs[M_STEPS - 1], hat_c, c: cs, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentItem {
    pub name: String,
    pub n: i64,
    /// Positive when contained, in the units of the target set.
    pub margin: f64,
    pub pass: bool,
    /// Reported but not part of the verdict.
    #[serde(default)]
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub items: Vec<ContainmentItem>,
    /// `(n, C4)` per level.
    pub c4: Vec<(u32, f64)>,
    pub rprime: Vec<(u32, f64)>,
    pub pass: bool,
}

/// Margin of `z` inside `Q(x)` with both half-sides scaled by `s`.
fn q_margin(q: &Rectangle, z: C64, s: f64) -> f64 {
    (q.half_width * s - (z.re - q.center.re).abs()).min(q.half_height * s - (z.im - q.center.im).abs())
}

/// Boundary-sampled containment checks of the toy instance; `q_scale < 1`
/// shrinks the rectangles `Q_n` (a negative control).
pub fn containment_suite(inst: &ToyInstance, q_scale: f64) -> Result<ContainmentReport> {
    let mut items = Vec::new();
    let (mut c4, mut rprime) = (Vec::new(), Vec::new());
    for (n, l) in inst.schedule.toy_levels()? {
        for sign in [1.0, -1.0] {
            let disc = Disc::new(c(0.0, sign * l.h), l.r)?;
            let images = inst.phi.eval_many(&disc.boundary_samples(BOUNDARY_SAMPLES));
            let (mut q_worst, mut land_worst, mut target_worst) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
            for p in images {
                let z = g_inverse_branch(p)?;
                q_worst = q_worst.min(q_margin(&l.q, z, q_scale));
                let mut end = p;
                for _ in 0..M_STEPS {
                    end = inst.phi.eval(g_inverse_branch(end)?);
                }
                land_worst = land_worst.min(PARAMETER_RADIUS - end.norm());
                target_worst = target_worst.min(TARGET_RADIUS - (end - TARGET_CENTER).norm());
            }
            let signed = if sign > 0.0 { n as i64 } else { -(n as i64) };
            items.push(ContainmentItem { name: "phi(D_n) in g(Q_n)".into(), n: signed, margin: q_worst, pass: q_worst > 0.0, informational: false });
            items.push(ContainmentItem {
                name: "pull-back of phi(D_n) in D(0, 3/4)".into(),
                n: signed,
                margin: land_worst,
                pass: land_worst > 0.0,
                informational: false,
            });
            items.push(ContainmentItem {
                name: "pull-back of phi(D_n) in D(1/2, 1/8)".into(),
                n: signed,
                margin: target_worst,
                pass: target_worst > 0.0,
                informational: true,
            });
        }
        let rp = inst.rprime(n)?;
        c4.push((n, rp / l.r));
        rprime.push((n, rp));
    }
    let pass = items.iter().all(|it| it.informational || it.pass);
    Ok(ContainmentReport { items, c4, rprime, pass })
}

/// Largest `|Im φ(x)|` over real `x` sampled across the solver box, relative to its width.
pub fn real_axis_deviation(inst: &ToyInstance, samples: usize) -> f64 {
    let b = inst.window;
    let xs: Vec<C64> =
        (0..samples).map(|k| c(b.center.re - b.half_width + 2.0 * b.half_width * (k as f64 + 0.5) / samples as f64, 0.0)).collect();
    let worst = inst.phi.eval_many(&xs).iter().map(|p| p.im.abs()).fold(0.0, f64::max);
    worst / (2.0 * b.half_width)
}

/// `g^{-3}(ih_n)` with `φ = id`: the landing centre of the identity limit.
pub fn identity_landing(h: f64) -> Result<C64> {
    let mut p = I * h;
    for _ in 0..M_STEPS {
        p = g_inverse_branch(p)?;
    }
    Ok(p)
}
