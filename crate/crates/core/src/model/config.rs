use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::goal::Goal;
use super::resources::PortDirection;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentInstance {
    pub id: String,
    #[serde(rename = "type")]
    pub type_name: String,
    pub host: String,
}

impl ComponentInstance {
    pub fn new(id: impl Into<String>, type_name: impl Into<String>, host: impl Into<String>) -> Self {
        ComponentInstance {
            id: id.into(),
            type_name: type_name.into(),
            host: host.into(),
        }
    }
}

/// A directed link from an OUT port to an IN port.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "ChannelRecord", try_from = "ChannelRecord")]
pub struct Channel {
    pub from_instance: String,
    pub from_port: String,
    pub to_instance: String,
    pub to_port: String,
}

impl Channel {
    pub fn new(
        from_instance: impl Into<String>,
        from_port: impl Into<String>,
        to_instance: impl Into<String>,
        to_port: impl Into<String>,
    ) -> Self {
        Channel {
            from_instance: from_instance.into(),
            from_port: from_port.into(),
            to_instance: to_instance.into(),
            to_port: to_port.into(),
        }
    }

    pub fn from_endpoint(&self) -> String {
        format!("{}.{}", self.from_instance, self.from_port)
    }

    pub fn to_endpoint(&self) -> String {
        format!("{}.{}", self.to_instance, self.to_port)
    }

    pub fn touches(&self, instance: &str) -> bool {
        self.from_instance == instance || self.to_instance == instance
    }

    /// Canonical ordering key, `(from, to)` as `inst.port` strings.
    pub fn sort_key(&self) -> (String, String) {
        (self.from_endpoint(), self.to_endpoint())
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from_endpoint(), self.to_endpoint())
    }
}

/// Wire form of a channel: `{"from": "inst.port", "to": "inst.port"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelRecord {
    pub from: String,
    pub to: String,
}

impl From<Channel> for ChannelRecord {
    fn from(c: Channel) -> Self {
        ChannelRecord {
            from: c.from_endpoint(),
            to: c.to_endpoint(),
        }
    }
}

impl TryFrom<ChannelRecord> for Channel {
    type Error = String;

    fn try_from(r: ChannelRecord) -> Result<Self, Self::Error> {
        let split = |s: &str| -> Result<(String, String), String> {
            match s.rsplit_once('.') {
                Some((inst, port)) if !inst.is_empty() && !port.is_empty() => {
                    Ok((inst.to_string(), port.to_string()))
                }
                _ => Err(format!("malformed channel endpoint `{s}`, expected `instance.port`")),
            }
        };
        let (from_instance, from_port) = split(&r.from)?;
        let (to_instance, to_port) = split(&r.to)?;
        Ok(Channel {
            from_instance,
            from_port,
            to_instance,
            to_port,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("duplicate instance id `{0}`")]
    DuplicateInstance(String),
    #[error("duplicate channel {0}")]
    DuplicateChannel(String),
    #[error("channel {channel} references unknown instance `{instance}`")]
    DanglingEndpoint { channel: String, instance: String },
    #[error("instance `{instance}` is placed on unknown host `{host}`")]
    UnknownHost { instance: String, host: String },
    #[error("instance `{instance}` is placed on failed host `{host}`")]
    FailedHost { instance: String, host: String },
    #[error("instance `{instance}` has unknown component type `{type_name}`")]
    UnknownType { instance: String, type_name: String },
    #[error("channel {channel}: `{port}` is not a {expected} port of `{type_name}`")]
    BadPort {
        channel: String,
        type_name: String,
        port: String,
        expected: PortDirection,
    },
}

/// A concrete deployment: instances placed on hosts and the channels between them.
///
/// Instances are kept sorted by id and channels by `(from, to)`, so two
/// configurations describing the same deployment compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Configuration {
    instances: Vec<ComponentInstance>,
    channels: Vec<Channel>,
    goal_revision: u64,
}

impl Configuration {
    pub fn empty(goal_revision: u64) -> Self {
        Configuration {
            instances: Vec::new(),
            channels: Vec::new(),
            goal_revision,
        }
    }

    /// Builds a configuration, enforcing id uniqueness and referential integrity.
    pub fn new(
        mut instances: Vec<ComponentInstance>,
        mut channels: Vec<Channel>,
        goal_revision: u64,
    ) -> Result<Self, ConfigError> {
        instances.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in instances.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ConfigError::DuplicateInstance(pair[0].id.clone()));
            }
        }
        channels.sort_by_cached_key(Channel::sort_key);
        for pair in channels.windows(2) {
            if pair[0] == pair[1] {
                return Err(ConfigError::DuplicateChannel(pair[0].to_string()));
            }
        }
        let ids: BTreeSet<&str> = instances.iter().map(|i| i.id.as_str()).collect();
        for c in &channels {
            for end in [&c.from_instance, &c.to_instance] {
                if !ids.contains(end.as_str()) {
                    return Err(ConfigError::DanglingEndpoint {
                        channel: c.to_string(),
                        instance: end.clone(),
                    });
                }
            }
        }
        Ok(Configuration {
            instances,
            channels,
            goal_revision,
        })
    }

    pub fn instances(&self) -> &[ComponentInstance] {
        &self.instances
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn goal_revision(&self) -> u64 {
        self.goal_revision
    }

    pub fn with_goal_revision(mut self, goal_revision: u64) -> Self {
        self.goal_revision = goal_revision;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instance(&self, id: &str) -> Option<&ComponentInstance> {
        self.instances
            .binary_search_by(|i| i.id.as_str().cmp(id))
            .ok()
            .map(|ix| &self.instances[ix])
    }

    pub fn has_channel(&self, channel: &Channel) -> bool {
        self.channels.contains(channel)
    }

    pub fn instances_of<'a>(&'a self, type_name: &'a str) -> impl Iterator<Item = &'a ComponentInstance> {
        self.instances.iter().filter(move |i| i.type_name == type_name)
    }

    pub fn instances_on<'a>(&'a self, host: &'a str) -> impl Iterator<Item = &'a ComponentInstance> {
        self.instances.iter().filter(move |i| i.host == host)
    }

    /// Instance counts per type, keyed by type name.
    pub fn type_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for i in &self.instances {
            *counts.entry(i.type_name.as_str()).or_default() += 1;
        }
        counts
    }

    /// Keeps only instances accepted by `keep` and the channels between them.
    pub fn retain_instances(&self, mut keep: impl FnMut(&ComponentInstance) -> bool) -> Configuration {
        let instances: Vec<_> = self.instances.iter().filter(|i| keep(i)).cloned().collect();
        let ids: BTreeSet<&str> = instances.iter().map(|i| i.id.as_str()).collect();
        let channels = self
            .channels
            .iter()
            .filter(|c| ids.contains(c.from_instance.as_str()) && ids.contains(c.to_instance.as_str()))
            .cloned()
            .collect();
        Configuration {
            instances,
            channels,
            goal_revision: self.goal_revision,
        }
    }

    pub fn without_channel(&self, channel: &Channel) -> Configuration {
        let mut out = self.clone();
        out.channels.retain(|c| c != channel);
        out
    }

    /// Checks the configuration against the goal's resources: hosts exist and
    /// are available, types exist, and every channel runs OUT to IN.
    pub fn check_against(&self, goal: &Goal) -> Vec<ConfigError> {
        let mut errors = Vec::new();
        for i in &self.instances {
            match goal.host(&i.host) {
                None => errors.push(ConfigError::UnknownHost {
                    instance: i.id.clone(),
                    host: i.host.clone(),
                }),
                Some(h) if !h.is_available() => errors.push(ConfigError::FailedHost {
                    instance: i.id.clone(),
                    host: i.host.clone(),
                }),
                _ => {}
            }
            if goal.component_type(&i.type_name).is_none() {
                errors.push(ConfigError::UnknownType {
                    instance: i.id.clone(),
                    type_name: i.type_name.clone(),
                });
            }
        }
        for c in &self.channels {
            let ends = [
                (&c.from_instance, &c.from_port, PortDirection::Out),
                (&c.to_instance, &c.to_port, PortDirection::In),
            ];
            for (inst, port, expected) in ends {
                let Some(i) = self.instance(inst) else { continue };
                let Some(t) = goal.component_type(&i.type_name) else { continue };
                if t.direction_of(port) != Some(expected) {
                    errors.push(ConfigError::BadPort {
                        channel: c.to_string(),
                        type_name: t.name.clone(),
                        port: port.clone(),
                        expected,
                    });
                }
            }
        }
        errors
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instances {
            writeln!(f, "{} : {} @ {}", i.id, i.type_name, i.host)?;
        }
        for c in &self.channels {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
