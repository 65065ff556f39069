//! The true-scale schedule in log form and the growth inequalities it satisfies.
//!
//! cargo run --release --example growth_table

use qrwd::base_map::{build_schedule, verify_growth, ScheduleMode};

fn main() -> qrwd::Result<()> {
    let s = build_schedule(11, ScheduleMode::TrueScale, None)?;
    println!("{:>3} {:>14} {:>14} {:>14}", "n", "log d_n", "log R_n", "log h_n");
    for e in s.entries.iter().take(3) {
        println!("{:>3} {:>14.6} {:>14.6} {:>14.6}", e.n, e.d.logmag, e.r.logmag, e.h.logmag);
    }
    println!("(from n = 4 on the logs carry symbolic ln x_k terms)");
    let rep = verify_growth(&s, 3, 10)?;
    for row in rep.rows.iter().filter(|r| r.n == 3 || r.n == 10) {
        println!("n = {:>2} {:<52} {}", row.n, row.inequality, if row.pass { "holds" } else { "FAILS" });
    }
    println!("all {} rows hold: {}", rep.rows.len(), rep.all_pass);
    Ok(())
}
