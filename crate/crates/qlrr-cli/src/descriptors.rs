//! Text descriptors for baths and force pulses, plus the flat key/value
//! configuration file ( TOML sections; command-line flags override file
//! values).

use qlrr::bath::{SpectralDistribution, TabulatedSpectrum};
use qlrr::dynamics::ForceProfile;
use qlrr::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// kind:key=value,key=value
fn parse_kv(desc: &str) -> Result<(String, BTreeMap<String, String>)> {
    let (kind, rest) = match desc.split_once(':') {
        Some((k, r)) => (k, r),
        None => (desc, ""),
    };
    let mut map = BTreeMap::new();
    if !rest.is_empty() {
        for item in rest.split(',') {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::Input(format!("descriptor item {item:?} is not key=value"))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok((kind.trim().to_string(), map))
}

fn take_f64(map: &mut BTreeMap<String, String>, key: &str) -> Result<f64> {
    let v = map
        .remove(key)
        .ok_or_else(|| Error::Input(format!("missing descriptor key {key:?}")))?;
    v.parse()
        .map_err(|_| Error::Input(format!("bad number for {key:?}: {v:?}")))
}

fn take_f64_or(map: &mut BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match map.remove(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Input(format!("bad number for {key:?}: {v:?}"))),
    }
}

fn reject_extras(kind: &str, map: &BTreeMap<String, String>) -> Result<()> {
    if let Some(k) = map.keys().next() {
        return Err(Error::Input(format!("unknown key {k:?} for {kind:?}")));
    }
    Ok(())
}

/// `ohmic:zeta=..` | `blackbody:coupling=..,cutoff=..` |
/// `tabulated:path=spectrum.csv`
pub fn parse_bath(desc: &str) -> Result<SpectralDistribution> {
    let (kind, mut map) = parse_kv(desc)?;
    let bath = match kind.as_str() {
        "ohmic" => SpectralDistribution::Ohmic {
            zeta: take_f64(&mut map, "zeta")?,
        },
        "blackbody" => SpectralDistribution::Blackbody {
            coupling: take_f64_or(&mut map, "coupling", 1.0)?,
            cutoff: take_f64(&mut map, "cutoff")?,
        },
        "tabulated" => {
            let path = map
                .remove("path")
                .ok_or_else(|| Error::Input("tabulated bath needs path=<csv>".into()))?;
            let text = std::fs::read_to_string(Path::new(&path))
                .map_err(|e| Error::Input(format!("read {path}: {e}")))?;
            SpectralDistribution::Tabulated(TabulatedSpectrum::from_csv(&text)?)
        }
        other => {
            return Err(Error::Input(format!(
                "unknown bath kind {other:?} (ohmic | blackbody | tabulated)"
            )))
        }
    };
    reject_extras(&kind, &map)?;
    Ok(bath)
}

/// `zero` | `gaussian:f0=..,t0=..,sigma=..` | `step:f0=..,t_on=..,ramp=..` |
/// `gate:f0=..,t_on=..,ramp=..,plateau=..` |
/// `sinusoid:f0=..,omega=..[,t_on=..,t_off=..,ramp=..]` |
/// `sampled:path=force.csv`
pub fn parse_pulse(desc: &str) -> Result<ForceProfile> {
    let (kind, mut map) = parse_kv(desc)?;
    let profile = match kind.as_str() {
        "zero" => ForceProfile::Zero,
        "gaussian" => ForceProfile::GaussianPulse {
            f0: take_f64(&mut map, "f0")?,
            t0: take_f64(&mut map, "t0")?,
            sigma: take_f64(&mut map, "sigma")?,
        },
        "step" => ForceProfile::SmoothStep {
            f0: take_f64(&mut map, "f0")?,
            t_on: take_f64_or(&mut map, "t_on", 0.0)?,
            ramp: take_f64(&mut map, "ramp")?,
        },
        "gate" => ForceProfile::CapacitorGate {
            f0: take_f64(&mut map, "f0")?,
            t_on: take_f64_or(&mut map, "t_on", 0.0)?,
            ramp: take_f64(&mut map, "ramp")?,
            plateau: take_f64(&mut map, "plateau")?,
        },
        "sinusoid" => {
            let f0 = take_f64(&mut map, "f0")?;
            let omega = take_f64(&mut map, "omega")?;
            let window = if map.contains_key("t_on") || map.contains_key("t_off") {
                let t_on = take_f64(&mut map, "t_on")?;
                let t_off = take_f64(&mut map, "t_off")?;
                let ramp = take_f64_or(&mut map, "ramp", (t_off - t_on) / 10.0)?;
                Some((t_on, t_off, ramp))
            } else {
                None
            };
            ForceProfile::Sinusoid { f0, omega, window }
        }
        "sampled" => {
            let path = map
                .remove("path")
                .ok_or_else(|| Error::Input("sampled pulse needs path=<csv>".into()))?;
            let text = std::fs::read_to_string(Path::new(&path))
                .map_err(|e| Error::Input(format!("read {path}: {e}")))?;
            let mut ts = Vec::new();
            let mut fs = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if i == 0 || line.trim().is_empty() {
                    continue;
                }
                let mut cols = line.split(',');
                let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                    return Err(Error::Input(format!("{path}:{}: expected t,f", i + 1)));
                };
                ts.push(a.trim().parse().map_err(|_| {
                    Error::Input(format!("{path}:{}: bad time {a:?}", i + 1))
                })?);
                fs.push(b.trim().parse().map_err(|_| {
                    Error::Input(format!("{path}:{}: bad force {b:?}", i + 1))
                })?);
            }
            ForceProfile::Sampled(qlrr::dynamics::CubicSpline::natural(ts, fs)?)
        }
        other => {
            return Err(Error::Input(format!(
                "unknown pulse kind {other:?} (zero | gaussian | step | gate | sinusoid | sampled)"
            )))
        }
    };
    reject_extras(&kind, &map)?;
    profile.validate()?;
    Ok(profile)
}

/// Parsed configuration file: [section] tables of string values.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("read {}: {e}", path.display())))?;
        let value: toml::Value = text
            .parse()
            .map_err(|e| Error::Input(format!("parse {}: {e}", path.display())))?;
        let table = value
            .as_table()
            .ok_or_else(|| Error::Input("config root must be a table".into()))?;
        let mut sections = BTreeMap::new();
        for (name, section) in table {
            let t = section.as_table().ok_or_else(|| {
                Error::Input(format!("config section {name:?} must be a table"))
            })?;
            let mut map = BTreeMap::new();
            for (k, v) in t {
                let s = match v {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                map.insert(k.clone(), s);
            }
            sections.insert(name.clone(), map);
        }
        Ok(ConfigFile { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(|s| s.as_str())
    }
}
