//! The autonomic deployment and management engine.
//!
//! Each tick the engine drains probe events, folds them into the goal's
//! resource set, re-checks the goal against the observed topology and, if
//! the goal no longer holds, re-solves and enacts the difference.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::ddd::diff;
use crate::fabric::{FabricState, ScenarioEvent};
use crate::model::{
    Configuration, Goal, HostDescriptor, HostStatus, ProbeEvent, ProbeKind, ReconfigurationPlan,
};
use crate::solver::{check_configuration, solve_incremental, SolveOptions, SolveStatus, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    Steady,
    Resolving,
    Enacting,
    StalledUnsat,
    Stopped,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Steady => "STEADY",
            Phase::Resolving => "RESOLVING",
            Phase::Enacting => "ENACTING",
            Phase::StalledUnsat => "STALLED_UNSAT",
            Phase::Stopped => "STOPPED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub tick: u64,
    pub from: Phase,
    pub to: Phase,
    pub cause: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AdmeStatus {
    pub phase: Phase,
    pub goal_revision: u64,
    pub last_verdict: Verdict,
    pub history: Vec<Transition>,
    pub solver_calls: u64,
    pub recoveries: u64,
}

impl AdmeStatus {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("status serializes");
        s.push('\n');
        s
    }
}

/// Folds probe events into the goal's resources. Constraints are never touched.
pub fn evolve_goal(goal: &Goal, events: &[ProbeEvent]) -> Goal {
    let mut next = goal.clone();
    let mut changed = false;
    for e in events {
        match e.kind {
            ProbeKind::HostFailed => changed |= next.set_host_status(&e.subject, HostStatus::Failed),
            ProbeKind::HostAdded => {
                if next.host(&e.subject).is_some() {
                    changed |= next.set_host_status(&e.subject, HostStatus::Available);
                } else {
                    next.hosts.push(HostDescriptor::available(e.subject.clone()));
                    changed = true;
                }
            }
            // Placement is the solver's business; the resources are unchanged.
            ProbeKind::ComponentFailed => {}
        }
    }
    if changed {
        next.revision += 1;
    }
    next
}

pub fn assess(goal: &Goal, observed: &Configuration) -> Verdict {
    check_configuration(observed, goal)
}

/// One plan the engine enacted, with the tick it ran at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnactedPlan {
    pub tick: u64,
    pub plan: ReconfigurationPlan,
}

/// Goal, fabric and status, owned together by a single control loop.
#[derive(Clone, Debug)]
pub struct Engine {
    goal: Goal,
    fabric: FabricState,
    status: AdmeStatus,
    opts: SolveOptions,
    retry: bool,
    log: Vec<String>,
    plans: Vec<EnactedPlan>,
}

impl Engine {
    /// An engine over an empty fabric with one host per available goal host.
    pub fn new(goal: Goal, opts: SolveOptions) -> Self {
        let fabric = FabricState::for_goal(&goal);
        Self::with_fabric(goal, fabric, opts)
    }

    pub fn with_fabric(goal: Goal, fabric: FabricState, opts: SolveOptions) -> Self {
        let status = AdmeStatus {
            phase: Phase::Stopped,
            goal_revision: goal.revision,
            last_verdict: assess(&goal, &fabric.observe()),
            history: Vec::new(),
            solver_calls: 0,
            recoveries: 0,
        };
        Engine {
            goal,
            fabric,
            status,
            opts,
            // The first step always solves: that is the cold start.
            retry: true,
            log: Vec::new(),
            plans: Vec::new(),
        }
    }

    pub fn goal(&self) -> &Goal {
        &self.goal
    }

    pub fn fabric(&self) -> &FabricState {
        &self.fabric
    }

    pub fn status(&self) -> &AdmeStatus {
        &self.status
    }

    pub fn phase(&self) -> Phase {
        self.status.phase
    }

    /// One line per phase transition, plus rejected scenario events.
    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn log_text(&self) -> String {
        self.log.iter().fold(String::new(), |mut s, l| {
            let _ = writeln!(s, "{l}");
            s
        })
    }

    pub fn plans(&self) -> &[EnactedPlan] {
        &self.plans
    }

    /// Injects a scripted event into the fabric. A rejected event is logged
    /// and otherwise ignored.
    pub fn inject(&mut self, event: &ScenarioEvent) {
        if let Err(e) = self.fabric.inject(event) {
            self.log.push(format!("tick={} rejected event {event}: {e}", event.tick));
        }
    }

    /// Replaces the goal wholesale, e.g. after an administrator edits it.
    pub fn reload_goal(&mut self, mut goal: Goal) {
        goal.revision = self.goal.revision + 1;
        self.goal = goal;
        self.retry = true;
    }

    pub fn stop(&mut self, tick: u64, cause: &str) {
        self.transition(tick, Phase::Stopped, cause.to_string(), None);
    }

    fn transition(&mut self, tick: u64, to: Phase, cause: String, nodes: Option<u64>) {
        let from = self.status.phase;
        let mut line = format!(
            "tick={tick} phase={to} from={from} cause={cause:?} rev={} solver_calls={}",
            self.goal.revision, self.status.solver_calls
        );
        if let Some(n) = nodes {
            let _ = write!(line, " nodes={n}");
        }
        self.log.push(line);
        self.status.history.push(Transition { tick, from, to, cause });
        self.status.phase = to;
    }

    /// One pass of poll, evolve, assess and (if needed) recover.
    ///
    /// A cycle runs when the goal is violated, when probe events arrived, or
    /// after a failed enactment. When the survivors still satisfy the goal
    /// the cycle ends with an empty plan.
    pub fn step(&mut self, tick: u64) {
        if self.status.phase == Phase::Stopped && !self.status.history.is_empty() {
            return;
        }
        self.fabric.advance_to(tick);
        let events = self.fabric.poll_events();
        let evolved = evolve_goal(&self.goal, &events);
        let goal_changed = evolved.revision != self.goal.revision;
        self.goal = evolved;
        self.status.goal_revision = self.goal.revision;

        let observed = self.fabric.observe();
        let verdict = assess(&self.goal, &observed);
        self.status.last_verdict = verdict.clone();
        let event_text = events.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");

        if self.status.phase == Phase::StalledUnsat && !goal_changed && !self.retry {
            // Same resources, same answer: wait for the goal to change.
            return;
        }
        if verdict.is_valid() && !self.retry && events.is_empty() {
            if self.status.phase != Phase::Steady {
                self.transition(tick, Phase::Steady, "goal satisfied".into(), None);
            }
            return;
        }

        let cause = if self.status.history.is_empty() {
            "cold start".to_string()
        } else if !verdict.is_valid() {
            let clauses = verdict
                .violated_clauses()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",");
            if event_text.is_empty() {
                format!("violated clauses {clauses}")
            } else {
                format!("violated clauses {clauses} after {event_text}")
            }
        } else if !event_text.is_empty() {
            format!("probe events {event_text}")
        } else {
            "retry".to_string()
        };
        self.retry = false;
        self.transition(tick, Phase::Resolving, cause, None);

        self.status.solver_calls += 1;
        let result = solve_incremental(&self.goal, &observed, &self.opts);
        let nodes = Some(result.nodes_explored);
        let target = match (result.status, result.solutions.into_iter().next()) {
            (SolveStatus::Sat, Some(c)) => c.with_goal_revision(self.goal.revision),
            (SolveStatus::BudgetExhausted, _) => {
                let cause = format!("solver budget exhausted at revision {}", self.goal.revision);
                return self.transition(tick, Phase::StalledUnsat, cause, nodes);
            }
            _ => {
                let cause = format!("UNSAT at revision {}", self.goal.revision);
                return self.transition(tick, Phase::StalledUnsat, cause, nodes);
            }
        };

        let plan = diff(&observed, &target);
        let cause = format!("plan of {} actions", plan.len());
        self.transition(tick, Phase::Enacting, cause, nodes);
        match self.fabric.enact(&plan) {
            Ok(()) => {
                if !self.plans.is_empty() {
                    self.status.recoveries += 1;
                }
                self.plans.push(EnactedPlan { tick, plan });
                let verdict = assess(&self.goal, &self.fabric.observe());
                self.status.last_verdict = verdict.clone();
                if verdict.is_valid() {
                    self.transition(tick, Phase::Steady, "enacted".into(), None);
                } else {
                    self.retry = true;
                    let cause = format!("enacted configuration violates clauses {:?}", verdict.violated_clauses());
                    self.transition(tick, Phase::Resolving, cause, None);
                }
            }
            Err(e) => {
                self.retry = true;
                self.transition(tick, Phase::Resolving, format!("{e}"), None);
            }
        }
    }
}

/// Cold start at tick 0, then ticks `1..=max_ticks`, injecting each tick's
/// scenario events before stepping.
pub fn run(goal: Goal, scenario: &[ScenarioEvent], max_ticks: u64, opts: SolveOptions) -> Engine {
    run_observed(goal, scenario, max_ticks, opts, |_, _| {})
}

/// [`run`], calling `after_tick` once per tick after the step.
pub fn run_observed(
    goal: Goal,
    scenario: &[ScenarioEvent],
    max_ticks: u64,
    opts: SolveOptions,
    mut after_tick: impl FnMut(u64, &Engine),
) -> Engine {
    let mut engine = Engine::new(goal, opts);
    let mut pending = scenario.iter().peekable();
    for tick in 0..=max_ticks {
        while let Some(event) = pending.next_if(|e| e.tick <= tick) {
            engine.inject(event);
        }
        engine.step(tick);
        after_tick(tick, &engine);
        if engine.phase() == Phase::Stopped {
            break;
        }
    }
    engine
}
