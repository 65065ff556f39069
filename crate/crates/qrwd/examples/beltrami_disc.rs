//! Solves the Beltrami equation for a constant coefficient on the unit disc
//! and compares with the closed form at two resolutions.
//!
//! cargo run --release --example beltrami_disc

use qrwd::beltrami::{solve_mrmt, BeltramiField, Grid, DEFAULT_MAX_TERMS};
use qrwd::numerics::{c, Rectangle, C64};

fn main() -> qrwd::Result<()> {
    let k = 0.2;
    // interior z + k conj z, exterior z + k / z; normalised so 0 -> 0, 1 -> 1
    let exact = |z: C64| if z.norm() < 1.0 { z + z.conj() * k } else { z + k / z };
    let scale = exact(c(1.0, 0.0));
    for n in [128, 256, 512] {
        let grid = Grid::new(Rectangle::new(c(0.0, 0.0), 2.0, 2.0)?, n, n)?;
        let field = BeltramiField::from_fn(grid, |z| z.norm() < 1.0, |_| Ok(c(k, 0.0)))?;
        let phi = solve_mrmt(&field, 1e-10, DEFAULT_MAX_TERMS)?;
        let err = grid
            .nodes()
            .iter()
            .zip(&phi.values)
            .map(|(&z, &v)| (v - exact(z) / scale).norm())
            .fold(0.0, f64::max);
        println!("{n:>4}^2: {} Neumann terms, sup error {err:.3e}", phi.residuals.len());
    }
    Ok(())
}
