//! A complete evaluation scenario: environment, both links, powers and target SIR.

use crate::channel::{Environment, LinkParams};
use crate::error::{require_positive, Result};
use crate::geometry::{link_geometry, ChannelKind, LinkGeometry, NodePosition};
use crate::outage::LinkPair;

/// One link: its kind, geometry and transmit power (watts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub kind: ChannelKind,
    pub geometry: LinkGeometry,
    pub power: f64,
}

impl LinkSpec {
    pub fn new(kind: ChannelKind, geometry: LinkGeometry, power: f64) -> Result<Self> {
        require_positive("transmit power", power)?;
        Ok(LinkSpec {
            kind,
            geometry,
            power,
        })
    }

    /// Link between two positioned nodes. The kind follows from which ends
    /// are airborne (`z > 0`): both → A2A, transmitter only → A2G,
    /// receiver only → G2A, neither → G2G.
    pub fn from_positions(tx: NodePosition, rx: NodePosition, power: f64) -> Result<Self> {
        let kind = match (tx.z > 0.0, rx.z > 0.0) {
            (true, true) => ChannelKind::A2A,
            (true, false) => ChannelKind::A2G,
            (false, true) => ChannelKind::G2A,
            (false, false) => ChannelKind::G2G,
        };
        LinkSpec::new(kind, link_geometry(tx, rx)?, power)
    }

    pub fn params(&self, env: &Environment) -> Result<LinkParams> {
        LinkParams::derive(env, self.kind, &self.geometry, self.power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub environment: Environment,
    pub main: LinkSpec,
    pub interferer: LinkSpec,
    pub gamma_t: f64,
}

impl Scenario {
    pub fn new(
        environment: Environment,
        main: LinkSpec,
        interferer: LinkSpec,
        gamma_t: f64,
    ) -> Result<Self> {
        environment.validate()?;
        require_positive("gamma_t", gamma_t)?;
        Ok(Scenario {
            environment,
            main,
            interferer,
            gamma_t,
        })
    }

    /// Derived per-link parameters for both links.
    pub fn link_pair(&self) -> Result<LinkPair> {
        LinkPair::new(
            self.main.params(&self.environment)?,
            self.interferer.params(&self.environment)?,
            self.gamma_t,
        )
    }

    /// Same scenario with the main link's vertical distance (UAV height) replaced.
    pub fn with_main_height(&self, height: f64) -> Result<Self> {
        let mut s = *self;
        s.main.geometry = self.main.geometry.with_vertical(height)?;
        Ok(s)
    }

    /// Same scenario with the interference link's horizontal distance replaced.
    pub fn with_interferer_horizontal(&self, distance: f64) -> Result<Self> {
        let mut s = *self;
        s.interferer.geometry = self.interferer.geometry.with_horizontal(distance)?;
        Ok(s)
    }

    /// Ground-to-air main link with horizontal distance 100 m at `height`,
    /// and an air-to-air interferer at `interferer_length` with power
    /// `interferer_power_ratio · P_m`, `P_m = 1e-8 W`.
    pub fn height_study(
        height: f64,
        gamma_t: f64,
        interferer_length: f64,
        interferer_power_ratio: f64,
    ) -> Result<Self> {
        const P_M: f64 = 1e-8;
        let main = LinkSpec::new(
            ChannelKind::G2A,
            LinkGeometry::from_distances(100.0, height)?,
            P_M,
        )?;
        let interferer = LinkSpec::new(
            ChannelKind::A2A,
            LinkGeometry::from_length(interferer_length, std::f64::consts::FRAC_PI_2)?,
            interferer_power_ratio * P_M,
        )?;
        Scenario::new(Environment::default(), main, interferer, gamma_t)
    }
}
