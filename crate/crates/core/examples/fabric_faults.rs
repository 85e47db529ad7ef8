//! Enact a deployment on simulated hosts, then break things.

use deladas::ddd::diff;
use deladas::fabric::{FabricState, ScenarioAction, ScenarioEvent};
use deladas::model::Configuration;
use deladas::parser::parse_goal;
use deladas::solver::{check_configuration, solve, SolveOptions};

fn main() {
    let goal = parse_goal(include_str!("randc.dls")).unwrap();
    let target = solve(&goal, &SolveOptions::default()).solutions.remove(0);

    let mut fabric = FabricState::for_goal(&goal);
    fabric.enact(&diff(&Configuration::empty(0), &target)).unwrap();
    println!("enactment log:");
    for line in fabric.log() {
        println!("  {line}");
    }
    assert_eq!(fabric.observe(), target);

    let victim = target.instances_on("h6").next().unwrap().id.clone();
    fabric.inject(&ScenarioEvent::new(3, ScenarioAction::FailHost, "h6")).unwrap();
    println!("\nafter FAIL_HOST(h6): {} instances, {} channels", fabric.observe().instances().len(), fabric.observe().channels().len());
    println!("{victim} is gone: {}", fabric.observe().instance(&victim).is_none());
    println!("probe events: {:?}", fabric.poll_events().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("still satisfies the original goal: {}", check_configuration(&fabric.observe(), &goal).is_valid());

    let rejected = fabric.inject(&ScenarioEvent::new(4, ScenarioAction::FailComponent, victim));
    println!("failing it again: {}", rejected.unwrap_err());

    // Re-deploying the original layout needs h6, which is down: the
    // plan is rejected and the fabric restored from its snapshot.
    let before = fabric.clone();
    let err = fabric.enact(&diff(&fabric.observe(), &target)).unwrap_err();
    println!("re-enacting the original layout: {err}");
    println!("fabric unchanged after rollback: {}", fabric == before);
}
