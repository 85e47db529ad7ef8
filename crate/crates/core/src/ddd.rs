//! Deployment Description Documents and reconfiguration plans.
//!
//! A DDD is the canonical JSON image of a [`Configuration`]: keys sorted,
//! two-space indentation, instances sorted by id and channels by
//! `(from, to)`. Equal configurations always produce identical bytes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Action, Channel, ChannelRecord, ComponentInstance, ConfigError, Configuration, Goal,
    ReconfigurationPlan,
};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DeploymentDescription {
    pub format_version: u64,
    pub goal_name: String,
    pub goal_revision: u64,
    pub instances: Vec<ComponentInstance>,
    pub channels: Vec<ChannelRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DddError {
    #[error("malformed deployment description: {0}")]
    Malformed(String),
    #[error("unsupported DDD format version {0} (this build reads version {FORMAT_VERSION})")]
    UnsupportedVersion(u64),
    #[error("channel {channel} references unknown instance `{instance}`")]
    DanglingEndpoint { channel: String, instance: String },
    #[error("duplicate instance id `{0}`")]
    DuplicateId(String),
    #[error("duplicate channel {0}")]
    DuplicateChannel(String),
}

impl From<ConfigError> for DddError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::DuplicateInstance(id) => DddError::DuplicateId(id),
            ConfigError::DuplicateChannel(c) => DddError::DuplicateChannel(c),
            ConfigError::DanglingEndpoint { channel, instance } => {
                DddError::DanglingEndpoint { channel, instance }
            }
            other => DddError::Malformed(other.to_string()),
        }
    }
}

impl DeploymentDescription {
    /// Canonical bytes: sorted keys, two-space indent, trailing newline.
    pub fn to_json(&self) -> String {
        // serde_json's default map is ordered, so a Value round trip sorts keys.
        let value = serde_json::to_value(self).expect("DDD serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("DDD serializes");
        out.push('\n');
        out
    }

    pub fn to_configuration(&self) -> Result<Configuration, DddError> {
        let channels = self
            .channels
            .iter()
            .map(|r| Channel::try_from(r.clone()).map_err(DddError::Malformed))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Configuration::new(self.instances.clone(), channels, self.goal_revision)?)
    }
}

pub fn emit_ddd(config: &Configuration, goal: &Goal) -> DeploymentDescription {
    DeploymentDescription {
        format_version: FORMAT_VERSION,
        goal_name: goal.name().to_string(),
        goal_revision: config.goal_revision(),
        instances: config.instances().to_vec(),
        channels: config.channels().iter().cloned().map(ChannelRecord::from).collect(),
    }
}

/// Reads a document, checking the version before the schema.
pub fn parse_document(text: &str) -> Result<DeploymentDescription, DddError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| DddError::Malformed(e.to_string()))?;
    match value.get("formatVersion").and_then(serde_json::Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(DddError::UnsupportedVersion(v)),
        None => return Err(DddError::Malformed("missing or non-integer `formatVersion`".into())),
    }
    serde_json::from_value(value).map_err(|e| DddError::Malformed(e.to_string()))
}

pub fn parse_ddd(text: &str) -> Result<Configuration, DddError> {
    parse_document(text)?.to_configuration()
}

/// The actions that turn `from` into `to`.
///
/// Instances present in both with the same type and host, and channels
/// present in both between such instances, are left alone. Everything else
/// is unwired, removed, installed, instantiated and wired, in that order.
pub fn diff(from: &Configuration, to: &Configuration) -> ReconfigurationPlan {
    let stays = |i: &ComponentInstance| to.instance(&i.id) == Some(i);
    let kept: BTreeSet<&str> = from
        .instances()
        .iter()
        .filter(|i| stays(i))
        .map(|i| i.id.as_str())
        .collect();
    let channel_stays = |c: &Channel| {
        kept.contains(c.from_instance.as_str()) && kept.contains(c.to_instance.as_str())
    };

    let mut actions = Vec::new();
    for c in from.channels() {
        if !(channel_stays(c) && to.has_channel(c)) {
            actions.push(Action::Unwire { channel: c.clone() });
        }
    }
    for i in from.instances() {
        if !kept.contains(i.id.as_str()) {
            actions.push(Action::Remove {
                instance: i.id.clone(),
            });
        }
    }
    let added: Vec<&ComponentInstance> = to
        .instances()
        .iter()
        .filter(|i| !kept.contains(i.id.as_str()))
        .collect();
    let installs: BTreeSet<(&str, &str)> = added
        .iter()
        .map(|i| (i.type_name.as_str(), i.host.as_str()))
        .filter(|&(t, h)| !from.instances().iter().any(|i| i.type_name == t && i.host == h))
        .collect();
    for (type_name, host) in installs {
        actions.push(Action::Install {
            type_name: type_name.to_string(),
            host: host.to_string(),
        });
    }
    for i in &added {
        actions.push(Action::Instantiate {
            instance: i.id.clone(),
            type_name: i.type_name.clone(),
            host: i.host.clone(),
        });
    }
    for c in to.channels() {
        if !(channel_stays(c) && from.has_channel(c)) {
            actions.push(Action::Wire { channel: c.clone() });
        }
    }
    ReconfigurationPlan {
        goal_revision: to.goal_revision(),
        actions,
    }
}
