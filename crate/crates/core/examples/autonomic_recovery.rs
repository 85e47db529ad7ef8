//! Deploy on six hosts, lose a client host at tick 3, and watch the engine.

use deladas::adme::{run_observed, Phase};
use deladas::fabric::parse_scenario;
use deladas::parser::parse_goal;
use deladas::solver::{check_configuration, SolveOptions};

fn main() {
    let goal = parse_goal(include_str!("randc.dls")).unwrap();
    let scenario = parse_scenario(include_str!("fail-h6.scenario.json")).unwrap();

    let engine = run_observed(goal, &scenario, 6, SolveOptions::default(), |tick, e| {
        let valid = check_configuration(&e.fabric().observe(), e.goal()).is_valid();
        println!("tick {tick}: {} (goal holds: {valid})", e.phase());
        if e.phase() == Phase::Steady {
            assert!(valid);
        }
    });

    println!("\nrun log:");
    print!("{}", engine.log_text());
    for p in engine.plans() {
        println!("plan at tick {}: {} actions", p.tick, p.plan.len());
    }
    println!("\nstatus:");
    print!("{}", engine.status().to_json());
}
