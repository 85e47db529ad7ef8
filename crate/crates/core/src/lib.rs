//! Constraint-based deployment and autonomic management of component-based
//! distributed applications.
//!
//! The pipeline:
//!
//! 1. [`parser::parse_goal`] reads a Deladas goal — component types, hosts
//!    and a `constraintset` — and infers port directions from `connectsto`.
//! 2. [`solver::solve`] searches for [`model::Configuration`]s (instances on
//!    hosts plus directed channels) that satisfy every clause.
//! 3. [`ddd::emit_ddd`] writes a configuration as a canonical Deployment
//!    Description Document; [`ddd::diff`] turns two configurations into an
//!    install/instantiate/wire plan.
//! 4. [`fabric::FabricState`] enacts plans on simulated hosts, injects faults
//!    and queues probe events.
//! 5. [`adme::Engine`] closes the loop: it drains probes, evolves the goal's
//!    host set, re-checks the goal and re-solves when needed.
//!
//! ```
//! use deladas::{parser::parse_goal, solver::{solve, check_configuration, SolveOptions}};
//!
//! let goal = parse_goal(
//!     "components { Router }
//!      hosts { h1, h2 }
//!      constraintset pair = constraintset {
//!          forall host h in deployment ( card(instancesof Router in h) = 1 )
//!          forall Router a in deployment ( exists Router b in deployment (
//!              a.rou connectsto b.rin  a != b ))
//!      }",
//! ).unwrap();
//! let result = solve(&goal, &SolveOptions::default());
//! let config = result.first().unwrap();
//! assert_eq!(config.instances().len(), 2);
//! assert!(check_configuration(config, &goal).is_valid());
//! ```

pub mod adme;
pub mod cli;
pub mod ddd;
pub mod diagnostic;
pub mod fabric;
pub mod model;
pub mod parser;
pub mod solver;
