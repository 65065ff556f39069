//! Right-hand side of the key inequality for a small disc family, and how it
//! grows as the moving point approaches one of the discs.
//!
//! cargo run --release --example key_inequality

use qrwd::estimates::{check_assumption, key_inequality_rhs, DiscFamily, KeyConstants};
use qrwd::numerics::{c, Disc};

fn main() -> qrwd::Result<()> {
    let family = DiscFamily {
        discs: vec![
            Disc::new(c(10.0, 0.0), 0.8)?,
            Disc::new(c(0.0, 25.0), 1.5)?,
            Disc::new(c(-40.0, -10.0), 2.0)?,
        ],
        k: 2.5,
    };
    let consts = KeyConstants::default();
    let assumption = check_assumption(&family, consts.delta1);
    println!("separation hypotheses hold: {} (C1 = {:?})", assumption.passed(), assumption.c1);
    let alpha = c(0.0, 0.0);
    for t in [0.2, 0.5, 0.8, 0.95, 1.0] {
        let beta = c(10.0 * t, 0.0);
        let gamma = beta * 0.05;
        let rep = key_inequality_rhs(alpha, beta, gamma, &family, consts)?;
        let per: Vec<String> = rep.per_disc.iter().map(|v| format!("{v:.4e}")).collect();
        println!("beta = {:>5.2}: total {:.6e}  per disc [{}]", beta.re, rep.total, per.join(", "));
    }
    Ok(())
}
