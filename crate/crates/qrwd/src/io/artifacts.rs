//! Byte-deterministic writers for reports, images and orbit dumps.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dynamics::{EscapeField, ESCAPE_FAILED, ESCAPE_INTERIOR};
use crate::error::{QrwdError, Result};
use crate::numerics::C64;

/// Colour of pixels whose orbit never escaped.
pub const PALETTE_INTERIOR: [u8; 3] = [0, 0, 0];
/// Colour of pixels where the map could not be evaluated.
pub const PALETTE_FAILED: [u8; 3] = [255, 0, 255];
/// Escape count `k` is drawn as `PALETTE[k % 16]`.
pub const PALETTE: [[u8; 3]; 16] = [
    [66, 30, 15],
    [25, 7, 26],
    [9, 1, 47],
    [4, 4, 73],
    [0, 7, 100],
    [12, 44, 138],
    [24, 82, 177],
    [57, 125, 209],
    [134, 181, 229],
    [211, 236, 248],
    [241, 233, 191],
    [248, 201, 95],
    [255, 170, 0],
    [204, 128, 0],
    [153, 87, 0],
    [106, 52, 3],
];

fn colour(count: u32) -> [u8; 3] {
    match count {
        ESCAPE_INTERIOR => PALETTE_INTERIOR,
        ESCAPE_FAILED => PALETTE_FAILED,
        k => PALETTE[k as usize % PALETTE.len()],
    }
}

/// Writes through a sibling temp file and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().ok_or_else(|| QrwdError::Io(format!("{} has no file name", path.display())))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(|e| QrwdError::Io(format!("{}: {e}", path.display())))
}

/// Binary PPM (P6, maxval 255), rows top to bottom.
pub fn ppm_bytes(field: &EscapeField) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", field.width, field.height).into_bytes();
    out.reserve(3 * field.counts.len());
    for &k in &field.counts {
        out.extend_from_slice(&colour(k));
    }
    out
}

pub fn write_image(field: &EscapeField, path: &Path) -> Result<()> {
    if field.counts.len() != field.width * field.height {
        return Err(QrwdError::Invalid("field size does not match its dimensions".into()));
    }
    write_atomic(path, &ppm_bytes(field))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `step,re,im,abs` rows with shortest round-trip formatting.
pub fn orbit_csv(points: &[C64]) -> String {
    let mut s = String::from("step,re,im,abs\n");
    for (k, z) in points.iter().enumerate() {
        s.push_str(&format!("{k},{:e},{:e},{:e}\n", z.re, z.im, z.norm()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, Rectangle};

    fn field(w: usize, h: usize, counts: Vec<u32>) -> EscapeField {
        EscapeField {
            window: Rectangle { center: c(0.0, 0.0), half_width: 1.0, half_height: 1.0 },
            width: w,
            height: h,
            max_iter: 10,
            bailout: 10.0,
            counts,
        }
    }

    #[test]
    fn ppm_layout() {
        let bytes = ppm_bytes(&field(2, 2, vec![ESCAPE_INTERIOR; 4]));
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len() - header.len(), 12);
        assert!(bytes[header.len()..].iter().all(|&b| b == 0));
        let big = ppm_bytes(&field(256, 256, vec![3; 256 * 256]));
        assert!(big.starts_with(b"P6\n256 256\n255\n"));
        assert_eq!(big, ppm_bytes(&field(256, 256, vec![3; 256 * 256])));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn csv_and_digest() {
        let s = orbit_csv(&[c(3.0, 0.0), c(-1.5, 2.0)]);
        assert_eq!(s, "step,re,im,abs\n0,3e0,0e0,3e0\n1,-1.5e0,2e0,2.5e0\n");
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
