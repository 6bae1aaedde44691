use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfun::RationalFunction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub p0: f64,
    pub q0: f64,
    pub udc0: f64,
    pub ut0: f64,
    pub us0: f64,
    /// Internal voltage angle, solved from the power flow.
    pub theta0: f64,
    pub thetat0: f64,
    pub thetas0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    pub kp1: f64,
    pub ki1: f64,
    pub kp2: f64,
    pub ki2: f64,
    pub kd: f64,
    pub kp6: f64,
    pub ki6: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainKey {
    Kp1,
    Ki1,
    Kp2,
    Ki2,
    Kd,
    Kp6,
    Ki6,
}

impl GainKey {
    pub const ALL: [GainKey; 7] = [
        GainKey::Kp1,
        GainKey::Ki1,
        GainKey::Kp2,
        GainKey::Ki2,
        GainKey::Kd,
        GainKey::Kp6,
        GainKey::Ki6,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GainKey::Kp1 => "kp1",
            GainKey::Ki1 => "ki1",
            GainKey::Kp2 => "kp2",
            GainKey::Ki2 => "ki2",
            GainKey::Kd => "kd",
            GainKey::Kp6 => "kp6",
            GainKey::Ki6 => "ki6",
        }
    }
}

impl FromStr for GainKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GainKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown gain '{s}' (expected one of kp1, ki1, kp2, ki2, kd, kp6, ki6)")))
    }
}

impl ControllerGains {
    pub fn get(&self, k: GainKey) -> f64 {
        match k {
            GainKey::Kp1 => self.kp1,
            GainKey::Ki1 => self.ki1,
            GainKey::Kp2 => self.kp2,
            GainKey::Ki2 => self.ki2,
            GainKey::Kd => self.kd,
            GainKey::Kp6 => self.kp6,
            GainKey::Ki6 => self.ki6,
        }
    }

    pub fn set(&mut self, k: GainKey, v: f64) {
        let slot = match k {
            GainKey::Kp1 => &mut self.kp1,
            GainKey::Ki1 => &mut self.ki1,
            GainKey::Kp2 => &mut self.kp2,
            GainKey::Ki2 => &mut self.ki2,
            GainKey::Kd => &mut self.kd,
            GainKey::Kp6 => &mut self.kp6,
            GainKey::Ki6 => &mut self.ki6,
        };
        *slot = v;
    }

    pub fn validate(&self) -> Result<()> {
        for k in GainKey::ALL {
            let v = self.get(k);
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("gain {} must be finite and >= 0, got {v}", k.name())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VscParams {
    pub name: String,
    pub c: f64,
    pub xf: f64,
    pub xg: f64,
    pub cf: f64,
    pub op: OperatingPoint,
    pub gains: ControllerGains,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cable {
    pub from: usize,
    pub to: usize,
    pub r: f64,
    pub l: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseValues {
    pub sbase_mva: f64,
    pub ubase_kv: f64,
    pub fbase_hz: f64,
    pub udcbase_kv: f64,
}

impl Default for BaseValues {
    fn default() -> Self {
        Self {
            sbase_mva: 1000.0,
            ubase_kv: 270.0,
            fbase_hz: 50.0,
            udcbase_kv: 400.0,
        }
    }
}

impl BaseValues {
    pub fn omega_base(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.fbase_hz
    }
}

/// Construction of the per-VSC transfer blocks `G_in`, `G_dc`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockModel {
    /// DVC PI through the current loop into the power order, with the I-U
    /// droop fed back through the same loop.
    #[default]
    DroopFeedback,
    /// DVC PI plus droop as a static gain on the angle channel, PLL tracking
    /// response on the power channel.
    PllPhase,
}

/// Which VSC's quantities appear in the first fraction of `F_E12`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fe12Reading {
    /// Focus-VSC quantities in both fractions.
    #[default]
    Focus,
    /// VSC-2 quantities, mirroring `F_E14`.
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    pub blocks: BlockModel,
    /// Multiplier on the `P0 / Udc0` flow term of `A_ii`.
    pub flow_factor: f64,
    pub fe12: Fe12Reading,
    /// Keep the `K_P02 G(s)` term in the third denominator line of `F_E16`
    /// (read as `G_dc2`); `false` drops it.
    pub fe16_g0u2_term: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            blocks: BlockModel::DroopFeedback,
            flow_factor: 1.0,
            fe12: Fe12Reading::Focus,
            fe16_g0u2_term: true,
        }
    }
}

/// User-supplied transfer blocks that replace the built-in construction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockOverride {
    pub g_in: Option<RationalFunction>,
    pub g_dc: Option<RationalFunction>,
    pub k_p0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MtdcSystem {
    pub vscs: Vec<VscParams>,
    pub cables: Vec<Cable>,
    pub focus: usize,
    pub base: BaseValues,
    pub options: ModelOptions,
    pub overrides: Vec<BlockOverride>,
}

/// A controller gain addressed as `vsc<ID>.<gain>`, e.g. `vscB.kp1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamPath {
    pub vsc: String,
    pub gain: GainKey,
}

impl FromStr for ParamPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (v, g) = s
            .split_once('.')
            .ok_or_else(|| Error::Config(format!("parameter '{s}' must look like vscB.kp1")))?;
        let vsc = v
            .strip_prefix("vsc")
            .filter(|id| !id.is_empty())
            .ok_or_else(|| Error::Config(format!("parameter '{s}' must start with vsc<ID>")))?;
        Ok(Self {
            vsc: vsc.to_string(),
            gain: g.parse()?,
        })
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vsc{}.{}", self.vsc, self.gain.name())
    }
}

/// Parses `vscB.kp1=0.3`.
pub fn parse_assignment(s: &str) -> Result<(ParamPath, f64)> {
    let (p, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{s}' must look like vscB.kp1=0.3")))?;
    let value: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("override '{s}': '{v}' is not a number")))?;
    Ok((p.trim().parse()?, value))
}

impl MtdcSystem {
    pub fn vsc_index(&self, name: &str) -> Result<usize> {
        self.vscs
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::Config(format!("no VSC named '{name}'")))
    }

    pub fn gain(&self, p: &ParamPath) -> Result<f64> {
        Ok(self.vscs[self.vsc_index(&p.vsc)?].gains.get(p.gain))
    }

    pub fn with_gain(&self, p: &ParamPath, value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!("{p} = {value}: gains must be finite and >= 0")));
        }
        let i = self.vsc_index(&p.vsc)?;
        let mut out = self.clone();
        out.vscs[i].gains.set(p.gain, value);
        Ok(out)
    }

    pub fn with_gains(&self, assignments: &[(ParamPath, f64)]) -> Result<Self> {
        let mut out = self.clone();
        for (p, v) in assignments {
            out = out.with_gain(p, *v)?;
        }
        Ok(out)
    }

    pub fn with_focus(&self, name: &str) -> Result<Self> {
        let mut out = self.clone();
        out.focus = self.vsc_index(name)?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vscs.is_empty() {
            return Err(Error::Config("no VSCs defined".into()));
        }
        if self.focus >= self.vscs.len() {
            return Err(Error::Config(format!("focus index {} out of range", self.focus)));
        }
        for v in &self.vscs {
            if !(v.c > 0.0) {
                return Err(Error::Domain(format!("VSC {}: C must be > 0", v.name)));
            }
            if !(v.xf + v.xg > 0.0) {
                return Err(Error::Domain(format!("VSC {}: Xf + Xg must be > 0", v.name)));
            }
            if !(v.op.udc0 > 0.0 && v.op.us0 > 0.0 && v.op.ut0 > 0.0) {
                return Err(Error::Domain(format!("VSC {}: voltage magnitudes must be > 0", v.name)));
            }
            v.gains.validate()?;
        }
        for c in &self.cables {
            if c.from >= self.vscs.len() || c.to >= self.vscs.len() || c.from == c.to {
                return Err(Error::Config(format!("cable {}-{} has invalid endpoints", c.from, c.to)));
            }
            if c.r < 0.0 || c.l < 0.0 {
                return Err(Error::Domain("cable R and L must be >= 0".into()));
            }
        }
        if !self.is_connected() {
            return Err(Error::Config("cable graph is not connected".into()));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let n = self.vscs.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for c in &self.cables {
                for (a, b) in [(c.from, c.to), (c.to, c.from)] {
                    if a == i && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
