//! Shoots a toy instance and prints the fixed point, the containment checks
//! and the post-shooting inclusions.
//!
//! cargo run --release --example shoot_toy -- 2,3,4
//! cargo run --release --example shoot_toy -- 5,6,7

use qrwd::base_map::ToyParams;
use qrwd::dynamics::{containment_suite, shoot, verify_inclusions, InstanceConfig, ToyInstance};

fn main() -> qrwd::Result<()> {
    let d: Vec<u32> = match std::env::args().nth(1) {
        Some(list) => list.split(',').map(|x| x.trim().parse().expect("degrees are integers")).collect(),
        None => vec![2, 3, 4],
    };
    let cfg = InstanceConfig::new(ToyParams::new(d));
    let rep = shoot(&cfg, &cfg.half_parameters(), 1e-10, 20)?;
    println!("converged {} after {} updates, contraction {:.2e}", rep.converged, rep.iterations, rep.contraction);
    for (k, step) in rep.history.iter().enumerate() {
        let w: Vec<String> = step.w.iter().map(|w| format!("{:.10}{:+.10}i", w.re, w.im)).collect();
        println!("  {k}: w = [{}]  residual {:.2e}", w.join(", "), step.residual);
    }
    let inst = ToyInstance::build(&cfg, &rep.w_star)?;
    let cont = containment_suite(&inst, 1.0)?;
    println!("containment pass {}", cont.pass);
    for it in &cont.items {
        let note = if it.informational { " (informational)" } else { "" };
        println!("  n = {:>2} {:<40} margin {:+.3e}{note}", it.n, it.name, it.margin);
    }
    let inc = verify_inclusions(&inst, 200)?;
    println!("inclusions pass {}", inc.pass);
    for r in &inc.rows {
        println!(
            "  n = {} d = {}: image radius {:.3e}, inner radius of next {:?}, margin {:?}",
            r.n, r.d, r.image_radius, r.inner_radius_next, r.disc_margin
        );
    }
    Ok(())
}
