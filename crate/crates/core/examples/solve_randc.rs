//! Solve the peer-to-peer goal on 1 to 6 hosts and print the largest layout.

use std::time::Instant;

use deladas::ddd::emit_ddd;
use deladas::parser::parse_goal;
use deladas::solver::{check_configuration, solve, strongly_connected_reachability, SolveOptions};

fn main() {
    let goal = parse_goal(include_str!("randc.dls")).unwrap();
    let opts = SolveOptions::default();

    for n in 1..=6 {
        let g = goal.with_hosts((1..=n).map(|i| format!("h{i}")));
        let start = Instant::now();
        let result = solve(&g, &opts);
        let shape = result.first().map(|c| {
            assert!(check_configuration(c, &g).is_valid());
            let counts = c.type_counts();
            format!("{counts:?}, {} channels", c.channels().len())
        });
        println!(
            "{n} host(s): {:?} after {} nodes in {:?} {}",
            result.status,
            result.nodes_explored,
            start.elapsed(),
            shape.unwrap_or_default()
        );
    }

    let config = solve(&goal, &opts).solutions.remove(0);
    let routers = strongly_connected_reachability(&config, "Router");
    println!("\nrouters strongly connected: {}", routers.is_strongly_connected());
    print!("{}", emit_ddd(&config, &goal).to_json());
}
