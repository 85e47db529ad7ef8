//! Domain types shared by every stage of the pipeline.

mod config;
mod expr;
mod goal;
mod plan;
mod probe;
mod resources;
pub(crate) mod validate;

pub use config::{Channel, ChannelRecord, ComponentInstance, ConfigError, Configuration};
pub use expr::{CmpOp, ConstraintExpr, Domain, IntExpr, PortRef, Quantifier, Scope, VarRef};
pub use goal::{Clause, ConstraintSet, Goal};
pub use plan::{Action, PlanError, ReconfigurationPlan};
pub use probe::{ProbeEvent, ProbeKind};
pub use resources::{ComponentType, HostDescriptor, HostStatus, PortDirection, PortSpec};
pub use validate::validate_goal;
