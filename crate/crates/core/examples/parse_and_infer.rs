//! Parse the peer-to-peer goal and show the ports inferred for each type.
//!
//! cargo run --example parse_and_infer [goal.dls]

use deladas::model::validate_goal;
use deladas::parser::parse_goal;

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable goal file"),
        None => include_str!("randc.dls").to_string(),
    };
    let goal = match parse_goal(&text) {
        Ok(goal) => goal,
        Err(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            std::process::exit(2);
        }
    };
    for d in validate_goal(&goal) {
        eprintln!("{d}");
    }

    println!("hosts: {}", goal.hosts.iter().map(|h| h.id.as_str()).collect::<Vec<_>>().join(" "));
    println!("inferred component types:");
    for t in &goal.component_types {
        println!("  {t}");
    }
    println!();
    println!("canonical form:");
    println!("{}", goal.constraints);
}
