use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PortDirection {
    In,
    Out,
}

impl PortDirection {
    pub fn opposite(self) -> Self {
        match self {
            PortDirection::In => PortDirection::Out,
            PortDirection::Out => PortDirection::In,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            PortDirection::In => "in",
            PortDirection::Out => "out",
        }
    }
}

impl fmt::Display for PortDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PortDirection::In => f.write_str("IN"),
            PortDirection::Out => f.write_str("OUT"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortSpec {
    pub name: String,
    pub direction: PortDirection,
}

impl PortSpec {
    pub fn new(name: impl Into<String>, direction: PortDirection) -> Self {
        PortSpec {
            name: name.into(),
            direction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentType {
    pub name: String,
    pub ports: Vec<PortSpec>,
}

impl ComponentType {
    pub fn new(name: impl Into<String>) -> Self {
        ComponentType {
            name: name.into(),
            ports: Vec::new(),
        }
    }

    pub fn with_port(mut self, name: impl Into<String>, direction: PortDirection) -> Self {
        self.ports.push(PortSpec::new(name, direction));
        self
    }

    pub fn port(&self, name: &str) -> Option<&PortSpec> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn direction_of(&self, port: &str) -> Option<PortDirection> {
        self.port(port).map(|p| p.direction)
    }
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.name)?;
        for (i, p) in self.ports.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", p.name, p.direction)?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HostStatus {
    Available,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HostDescriptor {
    pub id: String,
    pub status: HostStatus,
}

impl HostDescriptor {
    pub fn available(id: impl Into<String>) -> Self {
        HostDescriptor {
            id: id.into(),
            status: HostStatus::Available,
        }
    }

    pub fn is_available(&self) -> bool {
        self.status == HostStatus::Available
    }
}
