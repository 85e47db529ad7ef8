//! Two routers on two hosts. Losing one leaves the goal unsatisfiable until a
//! new host shows up.

use deladas::adme::run_observed;
use deladas::fabric::parse_scenario;
use deladas::parser::parse_goal;
use deladas::solver::SolveOptions;

fn main() {
    let goal = parse_goal(include_str!("randc-2host.dls")).unwrap();
    let scenario = parse_scenario(include_str!("fail-h2-add-h3.scenario.json")).unwrap();

    let engine = run_observed(goal, &scenario, 8, SolveOptions::default(), |tick, e| {
        let config = e.fabric().observe();
        let placed: Vec<String> = config.instances().iter().map(|i| format!("{}@{}", i.id, i.host)).collect();
        println!("tick {tick}: {:<13} {}", e.phase().to_string(), placed.join(" "));
    });
    println!();
    print!("{}", engine.log_text());
}
