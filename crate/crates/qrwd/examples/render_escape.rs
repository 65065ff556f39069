//! Escape-time picture of `2cosh z` written as a binary PPM.
//!
//! cargo run --release --example render_escape -- out.ppm

use qrwd::base_map::g_eval;
use qrwd::dynamics::escape_time_field;
use qrwd::io::{sha256_hex, ppm_bytes, write_atomic};
use qrwd::numerics::{c, Rectangle};

fn main() -> qrwd::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "cosh.ppm".into());
    let window = Rectangle { center: c(0.0, 0.0), half_width: 4.0, half_height: 4.0 };
    let field = escape_time_field(g_eval, window, 512, 512, 100, 1e3)?;
    let bytes = ppm_bytes(&field);
    write_atomic(std::path::Path::new(&path), &bytes)?;
    let slow = field.counts.iter().filter(|&&k| k > 3).count();
    println!("{path}: {} pixels, {slow} need more than 3 steps, sha256 {}", field.counts.len(), sha256_hex(&bytes));
    Ok(())
}
