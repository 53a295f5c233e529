//! Scenario files.
//!
//! A scenario file is flat `key = value` text with dotted section prefixes.
//! `#` starts a comment; blank lines are ignored; keys may appear once.
//!
//! ```text
//! environment.a1 = 12.08        # all environment keys optional
//! main.kind = g2a               # a2a | a2g | g2a | g2g
//! main.horizontal = 100         # meters
//! main.vertical = 70
//! interferer.kind = a2a
//! interferer.length = 150       # 3-D distance; angle from kind or elevation
//! interferer.elevation = 90 deg # mandatory unit suffix: deg | rad
//! power.p_m = 1e-8              # watts, default 1e-8
//! power.p_i = 1e-9
//! target.gamma_t = 2            # or target.rate + target.bandwidth
//! ```
//!
//! A link is given either by node positions (`main.tx = x, y, z` and
//! `main.rx = x, y, z`, kind inferred from which nodes are airborne) or by a
//! kind plus distances, never both.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::Path;

use crate::channel::Environment;
use crate::error::{Error, Result};
use crate::geometry::{ChannelKind, LinkGeometry, NodePosition};
use crate::outage::target_sir;
use crate::scenario::{LinkSpec, Scenario};

pub const DEFAULT_MAIN_POWER: f64 = 1e-8;

const ENV_KEYS: [&str; 6] = ["a1", "b1", "alpha_0", "alpha_90", "k_0", "k_90"];
const LINK_KEYS: [&str; 7] = [
    "kind",
    "horizontal",
    "vertical",
    "length",
    "elevation",
    "tx",
    "rx",
];

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

fn config_error(line: Option<usize>, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: Some(field.to_string()),
        message: message.into(),
    }
}

fn is_known(key: &str) -> bool {
    match key.split_once('.') {
        Some(("environment", k)) => ENV_KEYS.contains(&k),
        Some(("main" | "interferer", k)) => LINK_KEYS.contains(&k),
        Some(("power", k)) => k == "p_m" || k == "p_i",
        Some(("target", k)) => ["gamma_t", "rate", "bandwidth"].contains(&k),
        _ => false,
    }
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line: Some(line),
                field: None,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !is_known(&key) {
                return Err(config_error(Some(line), &key, "unknown key"));
            }
            if value.is_empty() {
                return Err(config_error(Some(line), &key, "missing value"));
            }
            if let Some(prev) = map.get(&key) {
                let prev: &Entry = prev;
                return Err(config_error(
                    Some(line),
                    &key,
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
            map.insert(key, Entry { line, value });
        }
        Ok(Entries(map))
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.0.get(key).map(|e| e.line)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.0.get(key) else {
            return Ok(None);
        };
        let v: f64 = e
            .value
            .parse()
            .map_err(|_| config_error(Some(e.line), key, format!("not a number: {:?}", e.value)))?;
        if !v.is_finite() {
            return Err(config_error(Some(e.line), key, "must be finite"));
        }
        Ok(Some(v))
    }

    fn angle(&self, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.0.get(key) else {
            return Ok(None);
        };
        let v = e.value.trim();
        let (num, to_rad): (&str, fn(f64) -> f64) = if let Some(n) = v.strip_suffix("deg") {
            (n, f64::to_radians)
        } else if let Some(n) = v.strip_suffix("rad") {
            (n, |x| x)
        } else {
            return Err(config_error(
                Some(e.line),
                key,
                "angle needs a unit suffix: deg or rad",
            ));
        };
        let x: f64 = num
            .trim()
            .parse()
            .map_err(|_| config_error(Some(e.line), key, format!("not an angle: {v:?}")))?;
        Ok(Some(to_rad(x)))
    }

    fn position(&self, key: &str) -> Result<Option<NodePosition>> {
        let Some(e) = self.0.get(key) else {
            return Ok(None);
        };
        let parts: Vec<f64> = e
            .value
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| config_error(Some(e.line), key, "expected `x, y, z`"))?;
        let [x, y, z] = parts[..] else {
            return Err(config_error(
                Some(e.line),
                key,
                "expected three coordinates",
            ));
        };
        NodePosition::new(x, y, z)
            .map(Some)
            .map_err(|err| config_error(Some(e.line), key, err.to_string()))
    }
}

fn parse_link(entries: &Entries, section: &str, power: f64) -> Result<LinkSpec> {
    let key = |k: &str| format!("{section}.{k}");
    let has_positions = entries.has(&key("tx")) || entries.has(&key("rx"));
    let distance_keys = ["kind", "horizontal", "vertical", "length", "elevation"];
    let has_distances = distance_keys.iter().any(|k| entries.has(&key(k)));

    if has_positions && has_distances {
        return Err(config_error(
            entries.line(&key("tx")).or(entries.line(&key("rx"))),
            section,
            "give either tx/rx positions or kind + distances, not both",
        ));
    }
    if has_positions {
        let tx = entries.position(&key("tx"))?;
        let rx = entries.position(&key("rx"))?;
        let (Some(tx), Some(rx)) = (tx, rx) else {
            return Err(config_error(
                None,
                section,
                "both tx and rx positions are required",
            ));
        };
        return LinkSpec::from_positions(tx, rx, power)
            .map_err(|e| config_error(entries.line(&key("tx")), section, e.to_string()));
    }

    let kind_key = key("kind");
    let kind: ChannelKind = match entries.0.get(&kind_key) {
        Some(e) => e
            .value
            .parse()
            .map_err(|err: Error| config_error(Some(e.line), &kind_key, err.to_string()))?,
        None => {
            return Err(config_error(
                None,
                section,
                "missing link: give kind + distances or tx/rx positions",
            ))
        }
    };

    let horizontal = entries.number(&key("horizontal"))?;
    let vertical = entries.number(&key("vertical"))?;
    let length = entries.number(&key("length"))?;
    let elevation = entries.angle(&key("elevation"))?;
    let line = entries.line(&kind_key);
    let geometry = match (horizontal, vertical, length) {
        (Some(h), Some(v), None) => {
            if elevation.is_some() {
                return Err(config_error(
                    entries.line(&key("elevation")),
                    &key("elevation"),
                    "elevation only combines with length",
                ));
            }
            LinkGeometry::from_distances(h, v)
        }
        (None, None, Some(l)) => {
            let theta = match (elevation, kind) {
                (Some(t), _) => t,
                (None, ChannelKind::A2A) => FRAC_PI_2,
                (None, ChannelKind::G2G) => 0.0,
                (None, _) => {
                    return Err(config_error(
                        line,
                        &key("elevation"),
                        "a2g/g2a links given by length need an elevation",
                    ))
                }
            };
            LinkGeometry::from_length(l, theta)
        }
        _ => {
            return Err(config_error(
                line,
                section,
                "give horizontal + vertical, or length (+ elevation)",
            ))
        }
    }
    .map_err(|e| config_error(line, section, e.to_string()))?;
    LinkSpec::new(kind, geometry, power)
}

/// Parses scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let entries = Entries::parse(text)?;

    let mut environment = Environment::default();
    for (slot, name) in [
        (&mut environment.a1, "a1"),
        (&mut environment.b1, "b1"),
        (&mut environment.alpha_0, "alpha_0"),
        (&mut environment.alpha_90, "alpha_90"),
        (&mut environment.k_0, "k_0"),
        (&mut environment.k_90, "k_90"),
    ] {
        if let Some(v) = entries.number(&format!("environment.{name}"))? {
            *slot = v;
        }
    }
    environment
        .validate()
        .map_err(|e| config_error(None, "environment", e.to_string()))?;

    let p_m = entries.number("power.p_m")?.unwrap_or(DEFAULT_MAIN_POWER);
    let p_i = entries
        .number("power.p_i")?
        .ok_or_else(|| config_error(None, "power.p_i", "missing interferer power"))?;
    for (name, p) in [("power.p_m", p_m), ("power.p_i", p_i)] {
        if p <= 0.0 {
            return Err(config_error(entries.line(name), name, "must be > 0"));
        }
    }

    let gamma = entries.number("target.gamma_t")?;
    let rate = entries.number("target.rate")?;
    let bandwidth = entries.number("target.bandwidth")?;
    let gamma_t = match (gamma, rate, bandwidth) {
        (Some(g), None, None) => {
            if g <= 0.0 {
                return Err(config_error(
                    entries.line("target.gamma_t"),
                    "target.gamma_t",
                    "must be > 0",
                ));
            }
            g
        }
        (None, Some(r), Some(w)) => target_sir(r, w)
            .map_err(|e| config_error(entries.line("target.rate"), "target", e.to_string()))?,
        (None, None, None) => {
            return Err(config_error(
                None,
                "target",
                "missing target SIR: give gamma_t or rate + bandwidth",
            ))
        }
        _ => {
            return Err(config_error(
                None,
                "target",
                "give exactly one of gamma_t or rate + bandwidth",
            ))
        }
    };

    let main = parse_link(&entries, "main", p_m)?;
    let interferer = parse_link(&entries, "interferer", p_i)?;
    Scenario::new(environment, main, interferer, gamma_t)
}

/// Reads and parses a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Config {
            line,
            field,
            message,
        } => Error::Config {
            line,
            field,
            message: format!("{message} (in {})", path.display()),
        },
        other => other,
    })
}

/// Serialises a scenario in the format read by [`parse_scenario`]. Links are
/// written as kind + horizontal/vertical distances.
pub fn render_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let env = &s.environment;
    for (name, v) in [
        ("a1", env.a1),
        ("b1", env.b1),
        ("alpha_0", env.alpha_0),
        ("alpha_90", env.alpha_90),
        ("k_0", env.k_0),
        ("k_90", env.k_90),
    ] {
        let _ = writeln!(out, "environment.{name} = {v:?}");
    }
    for (section, link) in [("main", &s.main), ("interferer", &s.interferer)] {
        let _ = writeln!(out, "{section}.kind = {}", link.kind);
        let _ = writeln!(
            out,
            "{section}.horizontal = {:?}",
            link.geometry.horizontal()
        );
        let _ = writeln!(out, "{section}.vertical = {:?}", link.geometry.vertical());
    }
    let _ = writeln!(out, "power.p_m = {:?}", s.main.power);
    let _ = writeln!(out, "power.p_i = {:?}", s.interferer.power);
    let _ = writeln!(out, "target.gamma_t = {:?}", s.gamma_t);
    out
}
