//! Scripted ADME runs shared by the scenario tests and the acceptance target.

use deladas::adme::{run_observed, Engine, Phase};
use deladas::fabric::{parse_scenario, ScenarioAction, ScenarioEvent};
use deladas::model::Goal;
use deladas::solver::{check_configuration, SolveOptions};
use rand::RngExt;

use super::{naive_violations, randc, rng};

/// Ticks observed across runs, and every STEADY tick whose topology broke the goal.
#[derive(Debug, Default)]
pub struct SafetyReport {
    pub runs: usize,
    pub ticks: u64,
    pub steady_ticks: u64,
    pub violations: Vec<String>,
}

impl SafetyReport {
    pub fn observe(&mut self, label: &str, tick: u64, engine: &Engine) {
        self.ticks += 1;
        if engine.phase() != Phase::Steady {
            return;
        }
        self.steady_ticks += 1;
        let observed = engine.fabric().observe();
        let fast = check_configuration(&observed, engine.goal());
        let naive = naive_violations(engine.goal(), &observed);
        if !fast.is_valid() || !naive.is_empty() {
            self.violations.push(format!("{label} tick {tick}: {:?} / {naive:?}", fast.violated_clauses()));
        }
    }
}

/// The scenario files shipped with the examples, with their goals and tick counts.
pub fn shipped() -> Vec<(&'static str, Goal, Vec<ScenarioEvent>, u64)> {
    let file = |s: &str| parse_scenario(s).unwrap();
    vec![
        ("randc-6 quiet", randc(6), Vec::new(), 10),
        ("randc-6 fail-h6", randc(6), file(include_str!("../../examples/fail-h6.scenario.json")), 10),
        ("randc-2 fail-h2", randc(2), file(include_str!("../../examples/fail-h2.scenario.json")), 8),
        (
            "randc-2 fail-h2-add-h3",
            randc(2),
            file(include_str!("../../examples/fail-h2-add-h3.scenario.json")),
            10,
        ),
    ]
}

/// A seeded walk of faults and arrivals over randc, choosing each event
/// from the fabric's current state so every subject exists.
pub fn random_walk(seed: u64, hosts: usize, ticks: u64, mut after_tick: impl FnMut(u64, &Engine)) -> Engine {
    let mut r = rng(seed);
    let mut engine = Engine::new(randc(hosts), SolveOptions::default());
    let mut next_host = hosts + 1;
    engine.step(0);
    after_tick(0, &engine);
    for tick in 1..=ticks {
        if r.random_bool(0.3) {
            let up: Vec<String> = engine.fabric().hosts().filter(|h| h.is_up()).map(|h| h.id.clone()).collect();
            let running: Vec<String> = engine.fabric().observe().instances().iter().map(|i| i.id.clone()).collect();
            let event = match r.random_range(0..3) {
                0 if up.len() > 1 => Some(ScenarioEvent::new(tick, ScenarioAction::FailHost, up[r.random_range(0..up.len())].clone())),
                1 if up.len() < 6 => {
                    next_host += 1;
                    Some(ScenarioEvent::new(tick, ScenarioAction::AddHost, format!("h{}", next_host - 1)))
                }
                2 if !running.is_empty() => Some(ScenarioEvent::new(
                    tick,
                    ScenarioAction::FailComponent,
                    running[r.random_range(0..running.len())].clone(),
                )),
                _ => None,
            };
            if let Some(e) = event {
                engine.inject(&e);
            }
        }
        engine.step(tick);
        after_tick(tick, &engine);
    }
    engine
}

/// Every shipped scenario plus enough seeded walks to cover `min_ticks`.
pub fn safety_sweep(min_ticks: u64) -> SafetyReport {
    let mut report = SafetyReport::default();
    for (label, goal, scenario, ticks) in shipped() {
        run_observed(goal, &scenario, ticks, SolveOptions::default(), |t, e| report.observe(label, t, e));
        report.runs += 1;
    }
    let mut seed = 0;
    while report.ticks < min_ticks {
        let label = format!("walk seed {seed}");
        let hosts = 2 + (seed as usize % 4);
        random_walk(seed, hosts, 40, |t, e| report.observe(&label, t, e));
        report.runs += 1;
        seed += 1;
    }
    report
}
