//! A simulated host fabric.
//!
//! Plans are "executed" by mutating in-memory host state and appending one
//! script line per action to an enactment log. Faults are injected from a
//! scenario, and each injection queues the probe event the management engine
//! will later drain.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Action, Channel, ComponentInstance, Configuration, Goal, ProbeEvent, ProbeKind,
    ReconfigurationPlan,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HostState {
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimulatedHost {
    pub id: String,
    pub status: HostState,
    pub installed: BTreeSet<String>,
    pub running: BTreeSet<String>,
}

impl SimulatedHost {
    fn up(id: impl Into<String>) -> Self {
        SimulatedHost {
            id: id.into(),
            status: HostState::Up,
            installed: BTreeSet::new(),
            running: BTreeSet::new(),
        }
    }

    pub fn is_up(&self) -> bool {
        self.status == HostState::Up
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScenarioAction {
    FailHost,
    AddHost,
    FailComponent,
}

/// One scripted perturbation: `{"tick": 3, "action": "FAIL_HOST", "subject": "h6"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEvent {
    pub tick: u64,
    pub action: ScenarioAction,
    pub subject: String,
}

impl ScenarioEvent {
    pub fn new(tick: u64, action: ScenarioAction, subject: impl Into<String>) -> Self {
        ScenarioEvent {
            tick,
            action,
            subject: subject.into(),
        }
    }
}

impl fmt::Display for ScenarioEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = match self.action {
            ScenarioAction::FailHost => "FAIL_HOST",
            ScenarioAction::AddHost => "ADD_HOST",
            ScenarioAction::FailComponent => "FAIL_COMPONENT",
        };
        write!(f, "{action}({})@{}", self.subject, self.tick)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("malformed scenario: {0}")]
    Malformed(String),
    #[error("scenario event {index} goes back in time (tick {tick} after {previous})")]
    TickOrder { index: usize, tick: u64, previous: u64 },
}

pub fn parse_scenario(text: &str) -> Result<Vec<ScenarioEvent>, ScenarioError> {
    let events: Vec<ScenarioEvent> =
        serde_json::from_str(text).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
    for (index, pair) in events.windows(2).enumerate() {
        if pair[1].tick < pair[0].tick {
            return Err(ScenarioError::TickOrder {
                index: index + 1,
                tick: pair[1].tick,
                previous: pair[0].tick,
            });
        }
    }
    Ok(events)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("enactment failed at action {index}: {reason}")]
pub struct EnactmentError {
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InjectError {
    #[error("unknown host `{0}`")]
    UnknownHost(String),
    #[error("host `{0}` is already down")]
    HostAlreadyDown(String),
    #[error("host `{0}` already exists")]
    HostExists(String),
    #[error("no running instance `{0}`")]
    UnknownInstance(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FabricState {
    hosts: BTreeMap<String, SimulatedHost>,
    instances: BTreeMap<String, ComponentInstance>,
    channels: BTreeMap<(String, String), Channel>,
    clock: u64,
    goal_revision: u64,
    events: VecDeque<ProbeEvent>,
    log: Vec<String>,
}

impl FabricState {
    /// A fabric of empty, running hosts.
    pub fn new<I, S>(host_ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let hosts = host_ids
            .into_iter()
            .map(|id| {
                let h = SimulatedHost::up(id);
                (h.id.clone(), h)
            })
            .collect();
        FabricState {
            hosts,
            ..FabricState::default()
        }
    }

    /// One empty host per available host of the goal.
    pub fn for_goal(goal: &Goal) -> Self {
        Self::new(goal.available_hosts().map(|h| h.id.clone()))
    }

    pub fn hosts(&self) -> impl Iterator<Item = &SimulatedHost> {
        self.hosts.values()
    }

    pub fn host(&self, id: &str) -> Option<&SimulatedHost> {
        self.hosts.get(id)
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn advance_to(&mut self, tick: u64) {
        self.clock = self.clock.max(tick);
    }

    /// Every script line executed so far, in order.
    pub fn log(&self) -> &[String] {
        &self.log
    }

    /// The lines that ran on one host.
    pub fn host_log<'a>(&'a self, host: &'a str) -> impl Iterator<Item = &'a str> {
        self.log
            .iter()
            .filter_map(move |l| l.strip_prefix(host)?.strip_prefix(": "))
    }

    /// Applies every action of `plan` in order, or none of them.
    pub fn enact(&mut self, plan: &ReconfigurationPlan) -> Result<(), EnactmentError> {
        let snapshot = self.clone();
        for (index, action) in plan.actions.iter().enumerate() {
            if let Err(reason) = self.execute(action) {
                *self = snapshot;
                return Err(EnactmentError { index, reason });
            }
        }
        self.goal_revision = plan.goal_revision;
        Ok(())
    }

    fn up_host(&mut self, id: &str) -> Result<&mut SimulatedHost, String> {
        match self.hosts.get_mut(id) {
            None => Err(format!("unknown host `{id}`")),
            Some(h) if !h.is_up() => Err(format!("host `{id}` is down")),
            Some(h) => Ok(h),
        }
    }

    fn execute(&mut self, action: &Action) -> Result<(), String> {
        match action {
            Action::Install { type_name, host } => {
                self.up_host(host)?.installed.insert(type_name.clone());
                self.log.push(format!("{host}: install {type_name}"));
            }
            Action::Instantiate {
                instance,
                type_name,
                host,
            } => {
                if self.instances.contains_key(instance) {
                    return Err(format!("instance `{instance}` is already running"));
                }
                let h = self.up_host(host)?;
                if !h.installed.contains(type_name) {
                    return Err(format!("`{type_name}` is not installed on `{host}`"));
                }
                h.running.insert(instance.clone());
                self.instances.insert(
                    instance.clone(),
                    ComponentInstance::new(instance.clone(), type_name.clone(), host.clone()),
                );
                self.log.push(format!("{host}: instantiate {instance}"));
            }
            Action::Wire { channel } => {
                for end in [&channel.from_instance, &channel.to_instance] {
                    if !self.instances.contains_key(end) {
                        return Err(format!("unknown instance `{end}`"));
                    }
                }
                if self.channels.insert(channel.sort_key(), channel.clone()).is_some() {
                    return Err(format!("channel {channel} is already wired"));
                }
                self.log.push(format!("wire {channel}"));
            }
            Action::Unwire { channel } => {
                if self.channels.remove(&channel.sort_key()).is_none() {
                    return Err(format!("channel {channel} is not wired"));
                }
                self.log.push(format!("unwire {channel}"));
            }
            Action::Remove { instance } => {
                let Some(inst) = self.instances.get(instance) else {
                    return Err(format!("unknown instance `{instance}`"));
                };
                if self.channels.values().any(|c| c.touches(instance)) {
                    return Err(format!("instance `{instance}` is still wired"));
                }
                let host = inst.host.clone();
                self.up_host(&host)?.running.remove(instance);
                self.instances.remove(instance);
                self.log.push(format!("{host}: remove {instance}"));
            }
        }
        Ok(())
    }

    /// Applies a scripted fault or arrival and queues the matching probe event.
    pub fn inject(&mut self, event: &ScenarioEvent) -> Result<(), InjectError> {
        let subject = &event.subject;
        let kind = match event.action {
            ScenarioAction::FailHost => {
                let host = self
                    .hosts
                    .get_mut(subject)
                    .ok_or_else(|| InjectError::UnknownHost(subject.clone()))?;
                if !host.is_up() {
                    return Err(InjectError::HostAlreadyDown(subject.clone()));
                }
                host.status = HostState::Down;
                for id in std::mem::take(&mut host.running) {
                    self.drop_instance(&id);
                }
                ProbeKind::HostFailed
            }
            ScenarioAction::AddHost => {
                if self.hosts.contains_key(subject) {
                    return Err(InjectError::HostExists(subject.clone()));
                }
                self.hosts.insert(subject.clone(), SimulatedHost::up(subject.clone()));
                ProbeKind::HostAdded
            }
            ScenarioAction::FailComponent => {
                let host = match self.instances.get(subject) {
                    Some(inst) => inst.host.clone(),
                    None => return Err(InjectError::UnknownInstance(subject.clone())),
                };
                if let Some(h) = self.hosts.get_mut(&host) {
                    h.running.remove(subject);
                }
                self.drop_instance(subject);
                ProbeKind::ComponentFailed
            }
        };
        self.advance_to(event.tick);
        self.events
            .push_back(ProbeEvent::new(kind, subject.clone(), event.tick));
        Ok(())
    }

    fn drop_instance(&mut self, id: &str) {
        self.instances.remove(id);
        self.channels.retain(|_, c| !c.touches(id));
    }

    /// The running topology: instances on up hosts and their live channels.
    pub fn observe(&self) -> Configuration {
        Configuration::new(
            self.instances.values().cloned().collect(),
            self.channels.values().cloned().collect(),
            self.goal_revision,
        )
        .expect("fabric state is always a well-formed configuration")
    }

    /// Drains queued probe events in emission order.
    pub fn poll_events(&mut self) -> Vec<ProbeEvent> {
        self.events.drain(..).collect()
    }

    pub fn pending_events(&self) -> usize {
        self.events.len()
    }
}
