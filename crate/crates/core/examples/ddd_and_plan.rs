//! Serialize a configuration, read it back, and plan the move to another one.

use deladas::ddd::{diff, emit_ddd, parse_ddd};
use deladas::parser::parse_goal;
use deladas::solver::{solve, solve_incremental, SolveOptions};
use deladas::model::{Configuration, HostStatus};

fn main() {
    let goal = parse_goal(include_str!("randc.dls")).unwrap();
    let opts = SolveOptions::default();
    let before = solve(&goal, &opts).solutions.remove(0);

    let text = emit_ddd(&before, &goal).to_json();
    assert_eq!(parse_ddd(&text).unwrap(), before);
    println!("{} bytes of DDD round-trip exactly", text.len());

    let cold = diff(&Configuration::empty(0), &before);
    println!("\ncold start, {} actions:", cold.len());
    for a in &cold.actions {
        println!("  {a}");
    }

    // Lose h6 and ask for the closest configuration on what remains.
    let mut evolved = goal.clone();
    evolved.set_host_status("h6", HostStatus::Failed);
    evolved.revision += 1;
    let after = solve_incremental(&evolved, &before, &opts).solutions.remove(0);
    let plan = diff(&before, &after);
    println!("\nafter losing h6, {} actions:", plan.len());
    print!("{}", plan.to_json());
}
