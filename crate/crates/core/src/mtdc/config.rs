//! TOML system description.
//!
//! ```toml
//! focus = "A"
//!
//! [paths]
//! J1 = [4, 6]
//!
//! [base]
//! Sbase = 1000.0
//! Ubase = 270.0
//! fbase = 50.0
//! Udcbase = 400.0
//!
//! [[vscs]]
//! name = "A"
//! P0 = -0.5
//! Q0 = 0.0
//! Udc0 = 1.0
//! Ut0 = 1.0
//! Us0 = 1.0
//! C = 0.05
//! Xf = 0.25
//! Xg = 0.2
//! Cf = 0.0
//! gains = { kp1 = 1.3, ki1 = 113.7, kp2 = 25.0, ki2 = 2000.0, kd = 1.5, kp6 = 0.6, ki6 = 640.0 }
//!
//! [[cables]]
//! from = "A"
//! to = "C"
//! R = 0.4
//! L = 0.01
//! ```
//!
//! An optional `[model]` table selects `blocks`, `flow_factor`, `fe12` and
//! `fe16_g0u2_term`.

use std::path::Path;

use serde::Deserialize;

use super::index::PathSet;
use super::powerflow;
use super::system::{BaseValues, Cable, ControllerGains, ModelOptions, MtdcSystem, OperatingPoint, VscParams};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileVsc {
    name: String,
    #[serde(rename = "P0")]
    p0: f64,
    #[serde(rename = "Q0", default)]
    q0: f64,
    #[serde(rename = "Udc0")]
    udc0: f64,
    #[serde(rename = "Ut0")]
    ut0: f64,
    #[serde(rename = "Us0")]
    us0: f64,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "Xf")]
    xf: f64,
    #[serde(rename = "Xg")]
    xg: f64,
    #[serde(rename = "Cf", default)]
    cf: f64,
    gains: ControllerGains,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCable {
    from: String,
    to: String,
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "L")]
    l: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileBase {
    #[serde(rename = "Sbase")]
    sbase: f64,
    #[serde(rename = "Ubase")]
    ubase: f64,
    fbase: f64,
    #[serde(rename = "Udcbase")]
    udcbase: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePaths {
    #[serde(rename = "J1", default)]
    j1: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileModel {
    blocks: super::system::BlockModel,
    flow_factor: f64,
    fe12: super::system::Fe12Reading,
    fe16_g0u2_term: bool,
}

impl Default for FileModel {
    fn default() -> Self {
        let m = ModelOptions::default();
        Self {
            blocks: m.blocks,
            flow_factor: m.flow_factor,
            fe12: m.fe12,
            fe16_g0u2_term: m.fe16_g0u2_term,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    focus: String,
    #[serde(default)]
    paths: FilePaths,
    base: Option<FileBase>,
    #[serde(default)]
    model: FileModel,
    vscs: Vec<FileVsc>,
    #[serde(default)]
    cables: Vec<FileCable>,
}

/// A loaded system plus the uncertain paths named in the file.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub system: MtdcSystem,
    pub j1: PathSet,
}

pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let f: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut vscs = Vec::with_capacity(f.vscs.len());
    for v in f.vscs {
        let mut p = VscParams {
            name: v.name,
            c: v.c,
            xf: v.xf,
            xg: v.xg,
            cf: v.cf,
            op: OperatingPoint {
                p0: v.p0,
                q0: v.q0,
                udc0: v.udc0,
                ut0: v.ut0,
                us0: v.us0,
                theta0: 0.0,
                thetat0: 0.0,
                thetas0: 0.0,
            },
            gains: v.gains,
        };
        let pf = powerflow::solve(&p)?;
        p.op.theta0 = pf.theta0;
        p.op.thetat0 = pf.thetat0;
        vscs.push(p);
    }
    let index = |name: &str| {
        vscs.iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::Config(format!("cable endpoint '{name}' is not a VSC")))
    };
    let cables = f
        .cables
        .iter()
        .map(|c| {
            Ok(Cable {
                from: index(&c.from)?,
                to: index(&c.to)?,
                r: c.r,
                l: c.l,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let focus = index(&f.focus).map_err(|_| Error::Config(format!("focus '{}' is not a VSC", f.focus)))?;
    let base = f.base.map_or_else(BaseValues::default, |b| BaseValues {
        sbase_mva: b.sbase,
        ubase_kv: b.ubase,
        fbase_hz: b.fbase,
        udcbase_kv: b.udcbase,
    });
    if !(base.fbase_hz > 0.0) {
        return Err(Error::Config("fbase must be > 0".into()));
    }
    let n = vscs.len();
    let system = MtdcSystem {
        vscs,
        cables,
        focus,
        base,
        options: ModelOptions {
            blocks: f.model.blocks,
            flow_factor: f.model.flow_factor,
            fe12: f.model.fe12,
            fe16_g0u2_term: f.model.fe16_g0u2_term,
        },
        overrides: vec![Default::default(); n],
    };
    system.validate()?;
    Ok(SystemConfig {
        system,
        j1: PathSet::new(f.paths.j1)?,
    })
}

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// The three-terminal benchmark shipped with the repository.
pub const BENCHMARK_3T: &str = include_str!("../../../../benchmark_3t.cfg");

pub fn benchmark() -> SystemConfig {
    parse_config(BENCHMARK_3T).expect("bundled benchmark parses")
}
