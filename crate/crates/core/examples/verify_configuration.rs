//! Check configurations against a goal: a solver answer, then a damaged copy.

use deladas::parser::parse_goal;
use deladas::solver::{check_configuration, solve, SolveOptions, Verdict};

fn main() {
    let goal = parse_goal(include_str!("randc.dls")).unwrap();
    let config = solve(&goal, &SolveOptions::default()).solutions.remove(0);
    println!("solver answer: {:?}", check_configuration(&config, &goal));

    // Cut one client's uplink: the client no longer reaches any router.
    let cut = config
        .channels()
        .iter()
        .find(|c| c.from_instance.starts_with("Client"))
        .unwrap()
        .clone();
    let damaged = config.without_channel(&cut);
    println!("without {cut}:");
    match check_configuration(&damaged, &goal) {
        Verdict::Valid => println!("  still valid"),
        Verdict::Violated(v) => {
            for v in v {
                println!("  clause {} (line {}) violated", v.index, v.span.line);
            }
        }
    }
}
