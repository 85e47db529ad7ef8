use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProbeKind {
    HostFailed,
    ComponentFailed,
    HostAdded,
}

/// Notification from the deployed system to the management engine.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProbeEvent {
    pub kind: ProbeKind,
    /// Host id or instance id, depending on `kind`.
    pub subject: String,
    pub tick: u64,
}

impl ProbeEvent {
    pub fn new(kind: ProbeKind, subject: impl Into<String>, tick: u64) -> Self {
        ProbeEvent {
            kind,
            subject: subject.into(),
            tick,
        }
    }
}

impl fmt::Display for ProbeEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ProbeKind::HostFailed => "HOST_FAILED",
            ProbeKind::ComponentFailed => "COMPONENT_FAILED",
            ProbeKind::HostAdded => "HOST_ADDED",
        };
        write!(f, "{kind}({})", self.subject)
    }
}
