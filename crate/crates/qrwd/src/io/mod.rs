//! Run configuration, artifact writers and the command runner behind the `qrwd` binary.
//!
//! A config is one JSON document whose top-level keys are the fields of
//! [`RunConfig`]. Command-line flags `--key value` override file values; a
//! dotted key such as `--window.half_width 2` reaches into nested objects.
//! Values are read as JSON when they parse and as strings otherwise.

mod artifacts;
mod run;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::base_map::{ScheduleMode, ToyParams};
use crate::dynamics::InstanceConfig;
use crate::error::{QrwdError, Result};
use crate::numerics::{c, Rectangle, C64};

pub use artifacts::{orbit_csv, ppm_bytes, sha256_hex, write_atomic, write_image, PALETTE, PALETTE_FAILED, PALETTE_INTERIOR};
pub use run::{run, run_command, Outcome};

/// Exit status when every check passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status when a suite reported a failure.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for malformed flags or configs.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when reading or writing a file failed.
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Build a schedule and write it as JSON.
    Schedule,
    /// Growth inequalities, inclusion sweep, separation and the matching identity.
    Verify,
    /// Estimated dilatation of the cosh-power map or a shift map.
    Dilatation,
    /// Beltrami solve for a toy instance; writes the grid map container.
    Solve,
    /// Fixed-point shooting with containment and inclusion diagnostics.
    Shoot,
    /// Escape-time image as PPM.
    Render,
    /// Randomized estimate suites driven by `rng_seed`.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Schedule => "schedule",
            Command::Verify => "verify",
            Command::Dilatation => "dilatation",
            Command::Solve => "solve",
            Command::Shoot => "shoot",
            Command::Render => "render",
            Command::Report => "report",
        }
    }
}

/// Which map the renderer iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMap {
    /// `2cosh z`.
    Base,
    /// The toy `f = g_w ∘ φ⁻¹` at the configured parameters.
    Toy,
}

/// Every knob of every command. Unused fields are ignored by a command but
/// still validated, so a report always embeds one complete, checked config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub schedule_mode: ScheduleMode,
    /// Index range for the true-scale checks.
    pub nmin: u32,
    pub nmax: u32,
    pub toy_params: ToyParams,
    pub symmetric: bool,
    /// Beltrami solver grid holds about `resolution²` nodes.
    pub resolution: usize,
    pub tol: f64,
    pub max_terms: usize,
    pub mu_scale: f64,
    pub pad: f64,
    /// Stop shooting when the residual drops below this.
    pub shoot_tol: f64,
    pub max_shoot_iter: usize,
    /// Starting value for every free parameter.
    pub w0: C64,
    pub delta1: f64,
    #[serde(rename = "C")]
    pub c_const: f64,
    /// Family constant for the generated disc family.
    #[serde(rename = "K")]
    pub k_const: f64,
    /// Values of `C5` for the inclusion sweep.
    pub c5: Vec<f64>,
    /// Cases per randomized suite.
    pub samples: usize,
    pub degree: u32,
    /// When set, `dilatation` measures `ρ_w` for this shift instead of `G`.
    pub shift: Option<C64>,
    pub grid_res: usize,
    pub window: Rectangle,
    pub width: usize,
    pub height: usize,
    pub max_iter: u32,
    pub bailout: f64,
    pub render_map: RenderMap,
    /// Dump the orbit of this point as CSV.
    pub orbit_start: Option<C64>,
    pub out_dir: String,
    /// Defaults to `<out_dir>/<command>.json`.
    pub report: Option<String>,
    /// Defaults to `<out_dir>/render.ppm`.
    pub image: Option<String>,
    /// Defaults to `<out_dir>/orbit.csv` when an orbit is dumped.
    pub orbit_csv: Option<String>,
    /// Defaults to `<out_dir>/phi.qrwd`.
    pub field: Option<String>,
    pub rng_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let inst = InstanceConfig::new(ToyParams::new(vec![2, 3, 4]));
        RunConfig {
            command: Command::Verify,
            schedule_mode: ScheduleMode::TrueScale,
            nmin: 3,
            nmax: 10,
            toy_params: inst.toy,
            symmetric: inst.symmetric,
            resolution: inst.resolution,
            tol: inst.tol,
            max_terms: inst.max_terms,
            mu_scale: inst.mu_scale,
            pad: inst.pad,
            shoot_tol: 1e-10,
            max_shoot_iter: 20,
            w0: c(0.5, 0.0),
            delta1: crate::estimates::DEFAULT_DELTA1,
            c_const: crate::estimates::DEFAULT_C,
            k_const: 2.5,
            c5: vec![1.0, 1e2, 1e4],
            samples: 100,
            degree: 3,
            shift: None,
            grid_res: 256,
            window: Rectangle { center: c(0.0, 0.0), half_width: 4.0, half_height: 4.0 },
            width: 256,
            height: 256,
            max_iter: 100,
            bailout: 1e3,
            render_map: RenderMap::Base,
            orbit_start: None,
            out_dir: "qrwd-out".into(),
            report: None,
            image: None,
            orbit_csv: None,
            field: None,
            rng_seed: 0,
        }
    }
}

fn range_error(key: &str, msg: impl std::fmt::Display) -> QrwdError {
    QrwdError::OutOfRange(format!("{key}: {msg}"))
}

impl RunConfig {
    /// The toy instance described by the solver and schedule fields.
    pub fn instance(&self) -> InstanceConfig {
        InstanceConfig {
            toy: self.toy_params.clone(),
            symmetric: self.symmetric,
            resolution: self.resolution,
            tol: self.tol,
            max_terms: self.max_terms,
            mu_scale: self.mu_scale,
            pad: self.pad,
        }
    }

    /// Checks every numeric field against its documented range.
    pub fn validate(&self) -> Result<()> {
        if self.nmin < 1 || self.nmin > self.nmax || self.nmax > 60 {
            return Err(range_error("nmin/nmax", format!("need 1 <= nmin <= nmax <= 60, got {}..{}", self.nmin, self.nmax)));
        }
        let toy = &self.toy_params;
        if toy.d.is_empty() || toy.d.iter().any(|&d| !(1..=crate::interpolation::cosh_power::MAX_DEGREE).contains(&d)) {
            return Err(range_error("toy_params.d", "degrees must be non-empty and within 1..=64"));
        }
        if toy.first_index < 1 {
            return Err(range_error("toy_params.first_index", "must be >= 1"));
        }
        if !(toy.min_height > 0.0) || !(toy.gap_factor >= 1.0) {
            return Err(range_error("toy_params", "min_height must be positive and gap_factor >= 1"));
        }
        self.instance().validate().map_err(|e| range_error("solver", e))?;
        if !(self.shoot_tol > 0.0) || self.max_shoot_iter == 0 {
            return Err(range_error("shoot_tol/max_shoot_iter", "must be positive"));
        }
        if !(self.w0.norm() < crate::dynamics::PARAMETER_RADIUS) {
            return Err(range_error("w0", "must lie in the disc |w| < 3/4"));
        }
        if !(self.delta1 > 0.0 && self.delta1 < 1.0) {
            return Err(range_error("delta1", "must lie in (0, 1)"));
        }
        if !(self.c_const > 0.0) || !(self.k_const > 0.0) {
            return Err(range_error("C/K", "must be positive"));
        }
        if self.c5.is_empty() || self.c5.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(range_error("c5", "needs at least one positive finite value"));
        }
        if self.samples == 0 || self.samples > 100_000 {
            return Err(range_error("samples", "must lie in 1..=100000"));
        }
        if !(1..=crate::interpolation::cosh_power::MAX_DEGREE).contains(&self.degree) {
            return Err(range_error("degree", "must lie in 1..=64"));
        }
        if let Some(w) = self.shift {
            if !(w.norm() < crate::interpolation::shift::MAX_SHIFT) {
                return Err(range_error("shift", "must lie in the disc |w| < 3/4"));
            }
        }
        if self.grid_res < crate::interpolation::dilatation::MIN_GRID_RES || self.grid_res > 8192 {
            return Err(range_error("grid_res", "must lie in 64..=8192"));
        }
        let win = &self.window;
        if !(win.half_width > 0.0 && win.half_height > 0.0) || !(win.center.re.is_finite() && win.center.im.is_finite()) {
            return Err(range_error("window", "needs a finite centre and positive half sizes"));
        }
        if !(1..=16384).contains(&self.width) || !(1..=16384).contains(&self.height) {
            return Err(range_error("width/height", "must lie in 1..=16384"));
        }
        if self.max_iter == 0 || self.max_iter >= crate::dynamics::ESCAPE_FAILED {
            return Err(range_error("max_iter", "must be positive"));
        }
        if !(self.bailout > 1.0 && self.bailout.is_finite()) {
            return Err(range_error("bailout", "must be finite and > 1"));
        }
        if self.out_dir.is_empty() {
            return Err(range_error("out_dir", "must not be empty"));
        }
        Ok(())
    }

    fn path_or(&self, explicit: &Option<String>, default: &str) -> PathBuf {
        explicit.as_ref().map(PathBuf::from).unwrap_or_else(|| Path::new(&self.out_dir).join(default))
    }

    pub fn report_path(&self) -> PathBuf {
        self.path_or(&self.report, &format!("{}.json", self.command.name()))
    }

    pub fn image_path(&self) -> PathBuf {
        self.path_or(&self.image, "render.ppm")
    }

    pub fn orbit_path(&self) -> PathBuf {
        self.path_or(&self.orbit_csv, "orbit.csv")
    }

    pub fn field_path(&self) -> PathBuf {
        self.path_or(&self.field, "phi.qrwd")
    }
}

/// Reads a flag value: JSON when it parses, a plain string otherwise.
fn flag_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Sets `root[a][b]…` for a dotted key, creating objects on the way.
fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(QrwdError::Invalid(format!("malformed flag key `{key}`")));
        }
        let obj = match cur {
            Value::Object(m) => m,
            Value::Null => {
                *cur = Value::Object(Default::default());
                cur.as_object_mut().expect("just made an object")
            }
            _ => return Err(QrwdError::Invalid(format!("{}: not an object", parts[..i].join(".")))),
        };
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert(Value::Null);
    }
    unreachable!("split yields at least one part")
}

/// Recursively lays `over` on top of `base`; objects merge, everything else replaces.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Builds a config from defaults, an optional JSON document and `(key, value)` flags.
///
/// Unknown keys, type mismatches and range violations come back as
/// [`QrwdError::Invalid`] or [`QrwdError::OutOfRange`] naming the key path.
pub fn parse_config(file_text: Option<&str>, flags: &[(String, String)]) -> Result<RunConfig> {
    let mut value = serde_json::to_value(RunConfig::default()).expect("default config serializes");
    if let Some(text) = file_text {
        if !text.trim().is_empty() {
            let doc: Value =
                serde_json::from_str(text).map_err(|e| QrwdError::Invalid(format!("config is not valid JSON: {e}")))?;
            if !doc.is_object() {
                return Err(QrwdError::Invalid("config must be a JSON object".into()));
            }
            merge(&mut value, doc);
        }
    }
    for (key, raw) in flags {
        let mut patch = Value::Object(Default::default());
        set_path(&mut patch, key, flag_value(raw))?;
        merge(&mut value, patch);
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        QrwdError::Invalid(format!("{path}: {}", e.into_inner()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Splits `<command> [--config path] [--key value …]` into a config.
///
/// Returns the config path separately so the caller can map read failures to
/// an I/O exit code.
pub fn parse_args(args: &[String]) -> Result<(Option<String>, Vec<(String, String)>)> {
    let mut iter = args.iter();
    let command = iter.next().ok_or_else(|| QrwdError::Invalid("missing command".into()))?;
    if command.starts_with("--") {
        return Err(QrwdError::Invalid(format!("expected a command before `{command}`")));
    }
    let mut config = None;
    let mut flags = vec![("command".to_string(), command.clone())];
    while let Some(arg) = iter.next() {
        let key = arg
            .strip_prefix("--")
            .ok_or_else(|| QrwdError::Invalid(format!("unexpected argument `{arg}`")))?;
        let value = iter.next().ok_or_else(|| QrwdError::Invalid(format!("flag --{key} needs a value")))?;
        if key == "config" {
            config = Some(value.clone());
        } else {
            flags.push((key.to_string(), value.clone()));
        }
    }
    Ok((config, flags))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(kv: &[(&str, &str)]) -> Vec<(String, String)> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config(Some(""), &[]).unwrap(), RunConfig::default());
        assert_eq!(parse_config(Some("{}"), &[]).unwrap(), RunConfig::default());
        assert_eq!(parse_config(None, &[]).unwrap(), RunConfig::default());
    }

    #[test]
    fn flags_override_file() {
        let cfg = parse_config(Some(r#"{"nmax": 8, "command": "render"}"#), &flags(&[("command", "verify"), ("nmax", "10")]))
            .unwrap();
        assert_eq!(cfg.command, Command::Verify);
        assert_eq!((cfg.nmin, cfg.nmax), (3, 10));
        let cfg = parse_config(None, &flags(&[("window.half_width", "2"), ("toy_params.d", "[5,6]")])).unwrap();
        assert_eq!(cfg.window.half_width, 2.0);
        assert_eq!(cfg.window.half_height, 4.0);
        assert_eq!(cfg.toy_params.d, vec![5, 6]);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = parse_config(Some(r#"{"toy_params": {"d": [2], "colour": 1}}"#), &[]).unwrap_err().to_string();
        assert!(msg.contains("toy_params") && msg.contains("colour"), "{msg}");
        let msg = parse_config(None, &flags(&[("bogus", "1")])).unwrap_err().to_string();
        assert!(msg.contains("bogus"), "{msg}");
        let msg = parse_config(None, &flags(&[("nmax", "ten")])).unwrap_err().to_string();
        assert!(msg.contains("nmax"), "{msg}");
        let msg = parse_config(None, &flags(&[("bailout", "0.5")])).unwrap_err().to_string();
        assert!(msg.contains("bailout"), "{msg}");
        assert!(matches!(parse_config(Some("{nope"), &[]), Err(QrwdError::Invalid(_))));
    }

    #[test]
    fn args_split_into_flags() {
        let args: Vec<String> = ["verify", "--nmax", "10", "--config", "c.json"].iter().map(|s| s.to_string()).collect();
        let (path, fl) = parse_args(&args).unwrap();
        assert_eq!(path.as_deref(), Some("c.json"));
        assert_eq!(fl, flags(&[("command", "verify"), ("nmax", "10")]));
        assert!(parse_args(&args[..2]).is_err());
        assert!(parse_args(&[]).is_err());
    }
}
