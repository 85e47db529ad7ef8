//! The solver's evaluator against the naive one in tests/support.

mod support;

use deladas::model::{Channel, ComponentInstance, Configuration};
use deladas::solver::{check_configuration, evaluate, Binding};
use proptest::prelude::*;
use support::{naive_holds, naive_violations, random_configuration, randc, rng, ExprGen};

fn ring(routers: &[(&str, &str)], edges: &[(&str, &str)]) -> Configuration {
    Configuration::new(
        routers.iter().map(|(id, h)| ComponentInstance::new(*id, "Router", *h)).collect(),
        edges.iter().map(|(a, b)| Channel::new(*a, "rou", *b, "rin")).collect(),
        0,
    )
    .unwrap()
}

#[test]
fn clause_examples() {
    let goal = randc(2);
    let clause = |i: usize| &goal.constraints.clauses[i - 1].expr;
    let pair = ring(&[("R1", "h1"), ("R2", "h2")], &[("R1", "R2"), ("R2", "R1")]);
    assert!(evaluate(clause(5), &pair, &goal, &Binding::new()));
    let lone = ring(&[("R1", "h1")], &[]);
    assert!(!evaluate(clause(4), &lone, &goal, &Binding::new()));

    let mut instances = vec![ComponentInstance::new("R1", "Router", "h1")];
    let mut channels = Vec::new();
    for c in ["C1", "C2", "C3"] {
        instances.push(ComponentInstance::new(c, "Client", "h2"));
        channels.push(Channel::new(c, "out", "R1", "cin"));
        channels.push(Channel::new("R1", "cout", c, "in"));
    }
    let crowded = Configuration::new(instances, channels, 0).unwrap();
    assert!(!evaluate(clause(3), &crowded, &goal, &Binding::new()));
}

#[test]
fn bindings_reach_inside_clauses() {
    let goal = randc(2);
    let config = ring(&[("R1", "h1"), ("R2", "h2")], &[("R1", "R2"), ("R2", "R1")]);
    let deladas::model::ConstraintExpr::Quantified { body, .. } = &goal.constraints.clauses[0].expr else {
        panic!("clause 1 is quantified");
    };
    assert!(evaluate(&body[0], &config, &goal, &Binding::new().host("h", "h1")));
    assert!(!evaluate(&body[0], &config, &goal, &Binding::new().host("h", "nowhere")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn evaluators_agree(seed: u64) {
        let goal = ExprGen::new(seed).goal(4, 3);
        let hosts: Vec<String> = goal.hosts.iter().map(|h| h.id.clone()).collect();
        let mut r = rng(seed.rotate_left(17));
        for _ in 0..4 {
            let config = random_configuration(&mut r, &goal.component_types, &hosts, 5);
            prop_assert_eq!(
                check_configuration(&config, &goal).violated_clauses(),
                naive_violations(&goal, &config),
                "{}\n{}", goal.constraints, config
            );
            for c in &goal.constraints.clauses {
                prop_assert_eq!(evaluate(&c.expr, &config, &goal, &Binding::new()), naive_holds(&goal, &config, &c.expr));
            }
        }
    }
}
