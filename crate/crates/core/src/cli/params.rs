use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{DiskProfile, MeanMotion, PiMode, SystemParams};

/// Sun–Jupiter mass ratio, the default μ of the classical preset.
pub const SUN_JUPITER_MU: f64 = 0.000953728;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Paper,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PiArg {
    Exact,
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanMotionArg {
    Frozen,
    Local,
}

/// Model parameters: a preset, then an optional file, then individual flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Starting parameter set (default: paper).
    #[arg(long, value_enum, global = true)]
    pub preset: Option<Preset>,
    /// Shorthand for --preset classical.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub classical: bool,
    /// TOML parameter file applied on top of the preset.
    #[arg(long, value_name = "FILE", global = true)]
    pub params: Option<PathBuf>,
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true)]
    pub q1: Option<f64>,
    #[arg(long, global = true)]
    pub a2: Option<f64>,
    #[arg(long = "disk-a", global = true)]
    pub disk_a: Option<f64>,
    #[arg(long = "disk-b", global = true)]
    pub disk_b: Option<f64>,
    #[arg(long = "disk-h", global = true)]
    pub disk_h: Option<f64>,
    /// Density factor c of ρ = c/r³.
    #[arg(long = "disk-c", global = true, conflicts_with = "disk_mb")]
    pub disk_c: Option<f64>,
    /// Total disk mass; c follows from the closure.
    #[arg(long = "disk-mb", global = true)]
    pub disk_mb: Option<f64>,
    /// Radius at which the mean motion is evaluated.
    #[arg(long, global = true)]
    pub rref: Option<f64>,
    #[arg(long, value_enum, global = true)]
    pub pi: Option<PiArg>,
    #[arg(long = "mean-motion", value_enum, global = true)]
    pub mean_motion: Option<MeanMotionArg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamFile {
    mu: Option<f64>,
    q1: Option<f64>,
    a2: Option<f64>,
    r_ref: Option<f64>,
    pi_mode: Option<PiMode>,
    mean_motion: Option<MeanMotion>,
    disk: Option<DiskFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiskFile {
    a: f64,
    b: f64,
    h: f64,
    c: Option<f64>,
    mb: Option<f64>,
}

fn apply_file(p: &mut SystemParams, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
    let f: ParamFile =
        toml::from_str(&text).map_err(|e| Error::InvalidParams(format!("{}: {}", path.display(), e.message())))?;
    if let Some(v) = f.mu {
        p.mu = v;
    }
    if let Some(v) = f.q1 {
        p.q1 = v;
    }
    if let Some(v) = f.a2 {
        p.a2 = v;
    }
    if let Some(v) = f.r_ref {
        p.r_ref = v;
    }
    if let Some(v) = f.pi_mode {
        p.pi_mode = v;
    }
    if let Some(v) = f.mean_motion {
        p.mean_motion = v;
    }
    if let Some(d) = f.disk {
        p.disk = match (d.c, d.mb) {
            (Some(c), None) => DiskProfile::with_density(d.a, d.b, d.h, c),
            (None, Some(m)) => DiskProfile::with_mass(d.a, d.b, d.h, m),
            _ => {
                return Err(Error::InvalidParams(format!(
                    "{}: the disk table needs exactly one of c and mb",
                    path.display()
                )))
            }
        };
    }
    Ok(())
}

impl ParamArgs {
    pub fn preset(&self) -> Preset {
        if self.classical {
            Preset::Classical
        } else {
            self.preset.unwrap_or(Preset::Paper)
        }
    }

    pub fn resolve(&self) -> Result<SystemParams> {
        let mut p = match self.preset() {
            Preset::Paper => SystemParams::paper(),
            Preset::Classical => SystemParams::classical(SUN_JUPITER_MU),
        };
        if let Some(path) = &self.params {
            apply_file(&mut p, path)?;
        }
        if let Some(v) = self.mu {
            p.mu = v;
        }
        if let Some(v) = self.q1 {
            p.q1 = v;
        }
        if let Some(v) = self.a2 {
            p.a2 = v;
        }
        if let Some(v) = self.rref {
            p.r_ref = v;
        }
        if let Some(v) = self.pi {
            p.pi_mode = match v {
                PiArg::Exact => PiMode::Exact,
                PiArg::Paper => PiMode::Paper314,
            };
        }
        if let Some(v) = self.mean_motion {
            p.mean_motion = match v {
                MeanMotionArg::Frozen => MeanMotion::Frozen,
                MeanMotionArg::Local => MeanMotion::Local,
            };
        }
        let d = &mut p.disk;
        if let Some(v) = self.disk_a {
            d.a = v;
        }
        if let Some(v) = self.disk_b {
            d.b = v;
        }
        if let Some(v) = self.disk_h {
            d.h = v;
        }
        if let Some(c) = self.disk_c {
            *d = DiskProfile::with_density(d.a, d.b, d.h, c);
        }
        if let Some(m) = self.disk_mb {
            *d = DiskProfile::with_mass(d.a, d.b, d.h, m);
        }
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiskDensity;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn default_is_disk_preset() {
        assert_eq!(ParamArgs::default().resolve().unwrap(), SystemParams::paper());
    }

    #[test]
    fn flags_override_file() {
        let f = file("mu = 0.01\nq1 = 0.9\n[disk]\na = 1.0\nb = 2.0\nh = 1e-4\nmb = 0.4\n");
        let args = ParamArgs { params: Some(f.path().into()), q1: Some(0.8), ..Default::default() };
        let p = args.resolve().unwrap();
        assert_eq!(p.mu, 0.01);
        assert_eq!(p.q1, 0.8);
        assert_eq!(p.disk.density, DiskDensity::Mass(0.4));
    }

    #[test]
    fn dotted_keys_are_accepted() {
        let f = file("disk.a = 1.0\ndisk.b = 1.5\ndisk.h = 1e-4\ndisk.c = 1910.83\npi_mode = \"paper\"\n");
        let args = ParamArgs { params: Some(f.path().into()), ..Default::default() };
        let p = args.resolve().unwrap();
        assert_eq!(p.disk.density, DiskDensity::Density(1910.83));
        assert_eq!(p.pi_mode, PiMode::Paper314);
    }

    #[test]
    fn closure_key_required() {
        let f = file("[disk]\na = 1.0\nb = 2.0\nh = 1e-4\n");
        let args = ParamArgs { params: Some(f.path().into()), ..Default::default() };
        assert!(matches!(args.resolve(), Err(Error::InvalidParams(_))));
        let f = file("[disk]\na = 1.0\nb = 2.0\nh = 1e-4\nc = 1.0\nmb = 0.4\n");
        let args = ParamArgs { params: Some(f.path().into()), ..Default::default() };
        assert!(args.resolve().is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        let f = file("mass = 0.1\n");
        let args = ParamArgs { params: Some(f.path().into()), ..Default::default() };
        assert!(args.resolve().is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let args = ParamArgs { mu: Some(0.7), ..Default::default() };
        assert!(args.resolve().is_err());
    }
}
