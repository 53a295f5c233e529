//! Node positions, link geometry and the channel-kind angle rule.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{require_nonnegative, require_positive, Error, Result};

/// A node in the local Cartesian frame, in meters; `z` is height above ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl NodePosition {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::invalid("position", "coordinates must be finite"));
        }
        require_nonnegative("height z", z)?;
        Ok(NodePosition { x, y, z })
    }
}

/// Distances and elevation angle of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    d_h: f64,
    d_v: f64,
    ell: f64,
    theta: f64,
}

impl LinkGeometry {
    /// Builds the geometry from horizontal and vertical separations.
    pub fn from_distances(horizontal: f64, vertical: f64) -> Result<Self> {
        require_nonnegative("horizontal distance", horizontal)?;
        require_nonnegative("vertical distance", vertical)?;
        let ell = horizontal.hypot(vertical);
        if ell == 0.0 {
            return Err(Error::ZeroDistance);
        }
        Ok(LinkGeometry {
            d_h: horizontal,
            d_v: vertical,
            ell,
            theta: vertical.atan2(horizontal),
        })
    }

    /// Builds the geometry from the 3-D length and the elevation angle in radians.
    pub fn from_length(length: f64, theta: f64) -> Result<Self> {
        require_positive("link length", length)?;
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::invalid(
                "elevation angle",
                format!("must lie in [0, pi/2] rad, got {theta}"),
            ));
        }
        Ok(LinkGeometry {
            d_h: length * theta.cos(),
            d_v: length * theta.sin(),
            ell: length,
            theta,
        })
    }

    pub fn horizontal(&self) -> f64 {
        self.d_h
    }

    pub fn vertical(&self) -> f64 {
        self.d_v
    }

    /// 3-D link distance.
    pub fn length(&self) -> f64 {
        self.ell
    }

    /// Elevation angle in radians, in `[0, π/2]`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Same horizontal distance, new vertical distance.
    pub fn with_vertical(&self, vertical: f64) -> Result<Self> {
        LinkGeometry::from_distances(self.d_h, vertical)
    }

    /// Same vertical distance, new horizontal distance.
    pub fn with_horizontal(&self, horizontal: f64) -> Result<Self> {
        LinkGeometry::from_distances(horizontal, self.d_v)
    }
}

/// Geometry of the link between `tx` and `rx`.
pub fn link_geometry(tx: NodePosition, rx: NodePosition) -> Result<LinkGeometry> {
    let d_h = (tx.x - rx.x).hypot(tx.y - rx.y);
    let d_v = (tx.z - rx.z).abs();
    LinkGeometry::from_distances(d_h, d_v)
}

/// Air/ground role of the two link endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    A2A,
    A2G,
    G2A,
    G2G,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::A2A,
        ChannelKind::A2G,
        ChannelKind::G2A,
        ChannelKind::G2G,
    ];
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChannelKind::A2A => "a2a",
            ChannelKind::A2G => "a2g",
            ChannelKind::G2A => "g2a",
            ChannelKind::G2G => "g2g",
        };
        f.write_str(s)
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a2a" => Ok(ChannelKind::A2A),
            "a2g" => Ok(ChannelKind::A2G),
            "g2a" => Ok(ChannelKind::G2A),
            "g2g" => Ok(ChannelKind::G2G),
            other => Err(Error::invalid(
                "channel kind",
                format!("expected one of a2a, a2g, g2a, g2g; got {other:?}"),
            )),
        }
    }
}

/// Elevation angle that drives the channel model for a link of `kind`.
///
/// Air-to-air links are treated as vertical and ground-to-ground links as
/// horizontal regardless of their actual geometry; the mixed kinds use the
/// measured angle. The rule applies to every main/interferer combination.
pub fn scenario_theta(kind: ChannelKind, geom: &LinkGeometry) -> f64 {
    match kind {
        ChannelKind::A2A => FRAC_PI_2,
        ChannelKind::G2G => 0.0,
        ChannelKind::A2G | ChannelKind::G2A => geom.theta(),
    }
}
