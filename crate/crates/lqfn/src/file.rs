//! The JSON network file format (`"version": 1`).
//!
//! ```json
//! {
//!   "version": 1,
//!   "components": [
//!     {"name": "cav", "kind": "cavity", "params": {"gamma": 1.0, "omega": 0.0}}
//!   ],
//!   "connections": [],
//!   "external": {"inputs": ["cav.0"], "outputs": ["cav.0"]}
//! }
//! ```
//!
//! Complex numbers are `[re, im]` (a bare number is read as real), matrices
//! are row-major nested arrays and doubled matrices are
//! `{"minus": ..., "plus": ...}`. Ports are written `node.port`, 0-based.

use std::fmt;
use std::path::Path;

use lqfn_core::linalg::CMatrix;
use lqfn_core::{
    component::make_component, ComponentKind, Complex64, DoubledMatrix, Edge, NetworkGraph, PortRef,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue::Pair([z.re, z.im])
    }
}

/// Row-major matrix of complex entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixValue(pub Vec<Vec<ComplexValue>>);

impl MatrixValue {
    pub fn to_matrix(&self) -> Result<CMatrix, String> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if self.0.iter().any(|r| r.len() != cols) {
            return Err("matrix rows have different lengths".into());
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| self.0[i][j].to_complex()))
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixValue(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubledValue {
    pub minus: MatrixValue,
    pub plus: MatrixValue,
}

impl DoubledValue {
    pub fn to_doubled(&self) -> Result<DoubledMatrix, String> {
        let minus = self.minus.to_matrix()?;
        let plus = self.plus.to_matrix()?;
        DoubledMatrix::new(minus, plus).map_err(|e| e.to_string())
    }

    pub fn from_doubled(d: &DoubledMatrix) -> Self {
        DoubledValue {
            minus: MatrixValue::from_matrix(d.minus()),
            plus: MatrixValue::from_matrix(d.plus()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum KindSpec {
    Static {
        s: DoubledValue,
    },
    Identity {
        channels: usize,
    },
    Cavity {
        gamma: f64,
        #[serde(default)]
        omega: f64,
    },
    Dpa {
        kappa: f64,
        epsilon: f64,
    },
    Squeezer {
        r: f64,
    },
    Beamsplitter {
        epsilon: f64,
    },
    BeamsplitterAb {
        alpha: ComplexValue,
        beta: ComplexValue,
    },
    PhaseShift {
        theta: f64,
    },
    Custom {
        s: DoubledValue,
        c: DoubledValue,
        omega_minus: MatrixValue,
        omega_plus: MatrixValue,
    },
}

impl KindSpec {
    pub fn to_kind(&self) -> Result<ComponentKind, String> {
        Ok(match self {
            KindSpec::Static { s } => ComponentKind::Static(s.to_doubled()?),
            KindSpec::Identity { channels } => ComponentKind::Identity(*channels),
            KindSpec::Cavity { gamma, omega } => ComponentKind::Cavity {
                gamma: *gamma,
                omega: *omega,
            },
            KindSpec::Dpa { kappa, epsilon } => ComponentKind::Dpa {
                kappa: *kappa,
                epsilon: *epsilon,
            },
            KindSpec::Squeezer { r } => ComponentKind::Squeezer { r: *r },
            KindSpec::Beamsplitter { epsilon } => ComponentKind::Beamsplitter { epsilon: *epsilon },
            KindSpec::BeamsplitterAb { alpha, beta } => ComponentKind::BeamsplitterAb {
                alpha: alpha.to_complex(),
                beta: beta.to_complex(),
            },
            KindSpec::PhaseShift { theta } => ComponentKind::PhaseShift { theta: *theta },
            KindSpec::Custom {
                s,
                c,
                omega_minus,
                omega_plus,
            } => ComponentKind::Custom {
                s: s.to_doubled()?,
                c_minus: c.minus.to_matrix()?,
                c_plus: c.plus.to_matrix()?,
                omega_minus: omega_minus.to_matrix()?,
                omega_plus: omega_plus.to_matrix()?,
            },
        })
    }

    /// Parses `{"kind": ..., "params": ...}` given as separate strings.
    pub fn from_parts(kind: &str, params: &str) -> Result<Self, CliError> {
        let params: serde_json::Value = serde_json::from_str(params).map_err(|e| CliError::parse(&e))?;
        let wrapped = serde_json::json!({ "kind": kind, "params": params });
        serde_json::from_value(wrapped).map_err(|e| CliError::Usage(format!("--kind {kind}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: KindSpec,
}

/// A port written as `node.port`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortName(pub PortRef);

impl fmt::Display for PortName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0.node, self.0.port)
    }
}

impl std::str::FromStr for PortName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (node, port) = s
            .rsplit_once('.')
            .ok_or_else(|| format!("port {s:?} is not of the form node.port"))?;
        if node.is_empty() {
            return Err(format!("port {s:?} has an empty node name"));
        }
        let port = port
            .parse::<usize>()
            .map_err(|_| format!("port {s:?} has a non-numeric port index"))?;
        Ok(PortName(PortRef::new(node, port)))
    }
}

impl Serialize for PortName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PortName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub from: PortName,
    pub to: PortName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalSpec {
    pub inputs: Vec<PortName>,
    pub outputs: Vec<PortName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub connections: Vec<ConnectionSpec>,
    pub external: ExternalSpec,
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: NetworkFile = serde_json::from_str(text).map_err(|e| CliError::parse(&e))?;
        if file.version != VERSION {
            return Err(CliError::Validation(format!(
                "unsupported version {} (expected {VERSION})",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        crate::output::to_json(self)
    }

    /// Builds the component graph and checks its wiring.
    pub fn to_graph(&self) -> Result<NetworkGraph, CliError> {
        let mut nodes = Vec::with_capacity(self.components.len());
        for spec in &self.components {
            let kind = spec
                .kind
                .to_kind()
                .map_err(|e| CliError::Validation(format!("component {}: {e}", spec.name)))?;
            let g = make_component(kind)
                .map_err(|e| CliError::Validation(format!("component {}: {e}", spec.name)))?;
            nodes.push((spec.name.clone(), g));
        }
        let edges = self
            .connections
            .iter()
            .map(|c| Edge {
                from: c.from.0.clone(),
                to: c.to.0.clone(),
                delay: c.delay,
            })
            .collect();
        let graph = NetworkGraph {
            nodes,
            edges,
            inputs: self.external.inputs.iter().map(|p| p.0.clone()).collect(),
            outputs: self.external.outputs.iter().map(|p| p.0.clone()).collect(),
        };
        if let Some(bad) = self.connections.iter().find_map(|c| c.delay.filter(|t| !(*t >= 0.0 && t.is_finite()))) {
            return Err(CliError::Validation(format!("delays must be finite and >= 0, got {bad}")));
        }
        graph.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(graph)
    }

    /// The same network with every delay removed.
    pub fn without_delays(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.connections {
            c.delay = None;
        }
        out
    }
}

pub fn parse_network_str(text: &str) -> Result<NetworkGraph, CliError> {
    NetworkFile::from_json(text)?.to_graph()
}

pub fn parse_network(path: &Path) -> Result<NetworkGraph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_network_str(&text)
}
