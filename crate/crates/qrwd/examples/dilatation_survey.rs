//! Estimated dilatation of the cosh-power map for several degrees and of the
//! shift map on a grid of shifts.
//!
//! cargo run --release --example dilatation_survey

use qrwd::interpolation::{build_g, build_rho, disc_radius, estimate_dilatation, QrPiece};
use qrwd::numerics::c;

fn main() -> qrwd::Result<()> {
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "d", "K_hat", "K_exact", "declared", "seam_jump");
    for d in 1..=8 {
        let g = build_g(d, disc_radius(d))?;
        let rep = estimate_dilatation(&g, 256)?;
        let mu = g.analytic_sup_mu(512)?;
        println!(
            "{d:>3} {:>10.4} {:>10.4} {:>10.4} {:>10.2e}",
            rep.sup_k,
            (1.0 + mu) / (1.0 - mu),
            g.declared_bound(),
            rep.seam_jump
        );
    }
    println!();
    println!("{:>6} {:>6} {:>10}", "Re w", "Im w", "K_hat");
    for i in 0..5 {
        for j in 0..5 {
            let w = c(-0.49 + 0.245 * i as f64, -0.49 + 0.245 * j as f64);
            if w.norm() >= 0.7 {
                continue;
            }
            let rep = estimate_dilatation(&build_rho(w)?, 128)?;
            println!("{:>6.3} {:>6.3} {:>10.4}", w.re, w.im, rep.sup_k);
        }
    }
    Ok(())
}
