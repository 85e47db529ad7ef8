use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{Channel, ComponentInstance, ConfigError, Configuration};

/// One step of a reconfiguration script.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Install {
        #[serde(rename = "type")]
        type_name: String,
        host: String,
    },
    Instantiate {
        instance: String,
        #[serde(rename = "type")]
        type_name: String,
        host: String,
    },
    Wire {
        #[serde(flatten)]
        channel: Channel,
    },
    Unwire {
        #[serde(flatten)]
        channel: Channel,
    },
    Remove {
        instance: String,
    },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Install { type_name, host } => write!(f, "install {type_name} on {host}"),
            Action::Instantiate {
                instance,
                type_name,
                host,
            } => write!(f, "instantiate {instance} ({type_name}) on {host}"),
            Action::Wire { channel } => write!(f, "wire {channel}"),
            Action::Unwire { channel } => write!(f, "unwire {channel}"),
            Action::Remove { instance } => write!(f, "remove {instance}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("action {index}: {reason}")]
    Invalid { index: usize, reason: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Ordered actions taking one configuration to another.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReconfigurationPlan {
    /// Revision of the goal the target configuration was solved against.
    pub goal_revision: u64,
    pub actions: Vec<Action>,
}

impl ReconfigurationPlan {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    /// Replays the plan on `from` at the configuration level. Install actions
    /// are no-ops here; they only matter to a host fabric.
    pub fn apply(&self, from: &Configuration) -> Result<Configuration, PlanError> {
        let mut instances: Vec<ComponentInstance> = from.instances().to_vec();
        let mut channels: Vec<Channel> = from.channels().to_vec();
        for (index, action) in self.actions.iter().enumerate() {
            let fail = |reason: String| PlanError::Invalid { index, reason };
            match action {
                Action::Install { .. } => {}
                Action::Instantiate {
                    instance,
                    type_name,
                    host,
                } => {
                    if instances.iter().any(|i| &i.id == instance) {
                        return Err(fail(format!("instance `{instance}` already exists")));
                    }
                    instances.push(ComponentInstance::new(instance, type_name, host));
                }
                Action::Remove { instance } => {
                    let Some(pos) = instances.iter().position(|i| &i.id == instance) else {
                        return Err(fail(format!("unknown instance `{instance}`")));
                    };
                    if let Some(c) = channels.iter().find(|c| c.touches(instance)) {
                        return Err(fail(format!("instance `{instance}` still wired by {c}")));
                    }
                    instances.remove(pos);
                }
                Action::Wire { channel } => {
                    if channels.contains(channel) {
                        return Err(fail(format!("channel {channel} already wired")));
                    }
                    for end in [&channel.from_instance, &channel.to_instance] {
                        if !instances.iter().any(|i| &i.id == end) {
                            return Err(fail(format!("wire endpoint `{end}` does not exist")));
                        }
                    }
                    channels.push(channel.clone());
                }
                Action::Unwire { channel } => {
                    let Some(pos) = channels.iter().position(|c| c == channel) else {
                        return Err(fail(format!("channel {channel} is not wired")));
                    };
                    channels.remove(pos);
                }
            }
        }
        Ok(Configuration::new(instances, channels, self.goal_revision)?)
    }

    /// JSON array of tagged action records.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.actions).expect("actions serialize");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str, goal_revision: u64) -> Result<Self, serde_json::Error> {
        Ok(ReconfigurationPlan {
            goal_revision,
            actions: serde_json::from_str(text)?,
        })
    }
}

impl fmt::Display for ReconfigurationPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.actions {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}
