//! Constraint semantics over a fixed placement.
//!
//! A [`Topology`] holds instances already placed on hosts plus a universe of
//! channel slots, each present, absent or still undecided. Evaluation uses
//! Kleene three-valued logic, so the same code answers "is this complete
//! configuration valid" and "can this partial wiring still be completed".

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::diagnostic::Span;
use crate::model::{
    Channel, CmpOp, ComponentInstance, Configuration, ConstraintExpr, Domain, Goal, IntExpr,
    PortDirection, Quantifier, Scope, VarRef,
};

use super::reach::ReachIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Truth {
    False,
    Unknown,
    True,
}

impl Truth {
    fn and(self, other: Truth) -> Truth {
        self.min(other)
    }

    fn or(self, other: Truth) -> Truth {
        self.max(other)
    }

    fn not(self) -> Truth {
        match self {
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
            Truth::True => Truth::False,
        }
    }

    fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Entity {
    Host(usize),
    Instance(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Slot {
    pub from: usize,
    pub from_port: u32,
    pub to: usize,
    pub to_port: u32,
}

/// Placed instances plus channel slots with three-valued presence.
pub(crate) struct Topology<'g> {
    goal: &'g Goal,
    type_ix: HashMap<&'g str, usize>,
    /// Indices into `goal.hosts` of available hosts, in goal order.
    hosts: Vec<usize>,
    ids: Vec<String>,
    inst_type: Vec<Option<usize>>,
    inst_host: Vec<Option<usize>>,
    by_type: Vec<Vec<usize>>,
    port_names: Vec<String>,
    port_ix: HashMap<String, u32>,
    slots: Vec<Slot>,
    lookup: HashMap<(usize, u32, usize, u32), usize>,
    incident: Vec<Vec<usize>>,
    pub(crate) state: Vec<Truth>,
}

impl<'g> Topology<'g> {
    /// Instances are `(id, type, host)`; `host` is an index into `goal.hosts`.
    pub(crate) fn new(goal: &'g Goal, instances: &[(String, usize, usize)]) -> Self {
        let type_ix = goal
            .component_types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.name.as_str(), i))
            .collect();
        let mut t = Topology {
            goal,
            type_ix,
            hosts: (0..goal.hosts.len()).filter(|&h| goal.hosts[h].is_available()).collect(),
            ids: Vec::new(),
            inst_type: Vec::new(),
            inst_host: Vec::new(),
            by_type: vec![Vec::new(); goal.component_types.len()],
            port_names: Vec::new(),
            port_ix: HashMap::new(),
            slots: Vec::new(),
            lookup: HashMap::new(),
            incident: Vec::new(),
            state: Vec::new(),
        };
        for (id, ty, host) in instances {
            t.push_instance(id.clone(), Some(*ty), Some(*host));
        }
        t
    }

    /// Topology of a complete configuration: every channel present, nothing else possible.
    pub(crate) fn of_configuration(goal: &'g Goal, config: &Configuration) -> Self {
        let mut t = Topology::new(goal, &[]);
        let mut pos = HashMap::new();
        for ComponentInstance { id, type_name, host } in config.instances() {
            let ty = t.type_ix.get(type_name.as_str()).copied();
            let h = goal.hosts.iter().position(|d| &d.id == host);
            pos.insert(id.as_str(), t.ids.len());
            t.push_instance(id.clone(), ty, h);
        }
        for c in config.channels() {
            let (Some(&a), Some(&b)) = (pos.get(c.from_instance.as_str()), pos.get(c.to_instance.as_str()))
            else {
                continue;
            };
            let slot = t.add_slot(a, &c.from_port, b, &c.to_port);
            t.state[slot] = Truth::True;
        }
        t
    }

    fn push_instance(&mut self, id: String, ty: Option<usize>, host: Option<usize>) {
        let ix = self.ids.len();
        self.ids.push(id);
        self.inst_type.push(ty);
        self.inst_host.push(host);
        self.incident.push(Vec::new());
        if let Some(ty) = ty {
            self.by_type[ty].push(ix);
        }
    }

    fn intern(&mut self, port: &str) -> u32 {
        if let Some(&p) = self.port_ix.get(port) {
            return p;
        }
        let p = self.port_names.len() as u32;
        self.port_names.push(port.to_string());
        self.port_ix.insert(port.to_string(), p);
        p
    }

    /// Adds an undecided slot (or returns the existing one).
    pub(crate) fn add_slot(&mut self, from: usize, from_port: &str, to: usize, to_port: &str) -> usize {
        let fp = self.intern(from_port);
        let tp = self.intern(to_port);
        if let Some(&s) = self.lookup.get(&(from, fp, to, tp)) {
            return s;
        }
        let s = self.slots.len();
        self.slots.push(Slot {
            from,
            from_port: fp,
            to,
            to_port: tp,
        });
        self.lookup.insert((from, fp, to, tp), s);
        self.incident[from].push(s);
        if to != from {
            self.incident[to].push(s);
        }
        self.state.push(Truth::Unknown);
        s
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub(crate) fn slot_channel(&self, s: usize) -> Channel {
        let slot = &self.slots[s];
        Channel::new(
            self.ids[slot.from].clone(),
            self.port_names[slot.from_port as usize].clone(),
            self.ids[slot.to].clone(),
            self.port_names[slot.to_port as usize].clone(),
        )
    }

    /// The configuration made of every instance and every present slot.
    pub(crate) fn to_configuration(&self, goal_revision: u64) -> Configuration {
        let instances = (0..self.ids.len())
            .map(|i| {
                ComponentInstance::new(
                    self.ids[i].clone(),
                    self.goal.component_types[self.inst_type[i].expect("placed type")].name.clone(),
                    self.goal.hosts[self.inst_host[i].expect("placed host")].id.clone(),
                )
            })
            .collect();
        let channels = (0..self.slots.len())
            .filter(|&s| self.state[s] == Truth::True)
            .map(|s| self.slot_channel(s))
            .collect();
        Configuration::new(instances, channels, goal_revision).expect("search builds consistent configurations")
    }

    fn direction(&self, inst: usize, port: &str) -> Option<PortDirection> {
        let ty = self.inst_type[inst]?;
        self.goal.component_types[ty].direction_of(port)
    }

    fn channel(&self, from: usize, from_port: &str, to: usize, to_port: &str) -> Truth {
        let (Some(&fp), Some(&tp)) = (self.port_ix.get(from_port), self.port_ix.get(to_port)) else {
            return Truth::False;
        };
        match self.lookup.get(&(from, fp, to, tp)) {
            Some(&s) => self.state[s],
            None => Truth::False,
        }
    }

    pub(crate) fn host_index(&self, id: &str) -> Option<usize> {
        self.goal.hosts.iter().position(|h| h.id == id)
    }

    pub(crate) fn instance_index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    pub(crate) fn evaluator(&self) -> Evaluator<'_, 'g> {
        Evaluator {
            topo: self,
            reach: RefCell::new(HashMap::new()),
        }
    }
}

/// One evaluation pass over a topology; caches reachability per type.
pub(crate) struct Evaluator<'t, 'g> {
    topo: &'t Topology<'g>,
    reach: RefCell<HashMap<usize, (ReachIndex, ReachIndex)>>,
}

type Frames<'a> = Vec<(&'a str, Entity)>;

impl<'t, 'g> Evaluator<'t, 'g> {
    pub(crate) fn eval<'e>(&self, e: &'e ConstraintExpr, frames: &mut Frames<'e>) -> Truth {
        match e {
            ConstraintExpr::Quantified {
                quantifier,
                domain,
                vars,
                scope,
                body,
                ..
            } => {
                let candidates = self.domain(domain, scope, frames);
                let mark = frames.len();
                let result = self.quantify(*quantifier, vars, &candidates, body, frames);
                frames.truncate(mark);
                result
            }
            ConstraintExpr::And(items) => self.conjunction(items, frames),
            ConstraintExpr::Or(items) => {
                let mut acc = Truth::False;
                for i in items {
                    acc = acc.or(self.eval(i, frames));
                    if acc == Truth::True {
                        break;
                    }
                }
                acc
            }
            ConstraintExpr::Not(inner) => self.eval(inner, frames).not(),
            ConstraintExpr::Compare { lhs, op, rhs, .. } => {
                let (Some(a), Some(b)) = (self.int(lhs, frames), self.int(rhs, frames)) else {
                    return Truth::False;
                };
                compare(a, *op, b)
            }
            ConstraintExpr::ConnectsTo { from, to, .. } => {
                let (Some(x), Some(y)) = (self.instance(&from.var, frames), self.instance(&to.var, frames)) else {
                    return Truth::False;
                };
                let dirs = (self.topo.direction(x, &from.port), self.topo.direction(y, &to.port));
                match dirs {
                    (Some(PortDirection::Out), Some(PortDirection::In)) => {
                        self.topo.channel(x, &from.port, y, &to.port)
                    }
                    (Some(PortDirection::In), Some(PortDirection::Out)) => {
                        self.topo.channel(y, &to.port, x, &from.port)
                    }
                    _ => Truth::False,
                }
            }
            ConstraintExpr::Reachable { from, to, .. } => {
                let (Some(a), Some(b)) = (self.instance(from, frames), self.instance(to, frames)) else {
                    return Truth::False;
                };
                self.reachable(a, b)
            }
            ConstraintExpr::SameEntity {
                lhs, rhs, equal, ..
            } => {
                let (Some(a), Some(b)) = (lookup(frames, &lhs.name), lookup(frames, &rhs.name)) else {
                    return Truth::False;
                };
                Truth::from_bool((a == b) == *equal)
            }
        }
    }

    fn conjunction<'e>(&self, items: &'e [ConstraintExpr], frames: &mut Frames<'e>) -> Truth {
        let mut acc = Truth::True;
        for i in items {
            acc = acc.and(self.eval(i, frames));
            if acc == Truth::False {
                break;
            }
        }
        acc
    }

    fn quantify<'e>(
        &self,
        quantifier: Quantifier,
        vars: &'e [String],
        candidates: &[Entity],
        body: &'e [ConstraintExpr],
        frames: &mut Frames<'e>,
    ) -> Truth {
        let Some((var, rest)) = vars.split_first() else {
            return self.conjunction(body, frames);
        };
        let (mut acc, stop) = match quantifier {
            Quantifier::Forall => (Truth::True, Truth::False),
            Quantifier::Exists => (Truth::False, Truth::True),
        };
        for &c in candidates {
            frames.push((var.as_str(), c));
            let t = self.quantify(quantifier, rest, candidates, body, frames);
            frames.pop();
            acc = match quantifier {
                Quantifier::Forall => acc.and(t),
                Quantifier::Exists => acc.or(t),
            };
            if acc == stop {
                break;
            }
        }
        acc
    }

    fn domain(&self, domain: &Domain, scope: &Scope, frames: &Frames<'_>) -> Vec<Entity> {
        match domain {
            Domain::Hosts => self.topo.hosts.iter().map(|&h| Entity::Host(h)).collect(),
            Domain::Instances(t) => {
                let Some(&ty) = self.topo.type_ix.get(t.as_str()) else {
                    return Vec::new();
                };
                let on = match scope {
                    Scope::Deployment => None,
                    Scope::Host(v) => match lookup(frames, &v.name) {
                        Some(Entity::Host(h)) => Some(h),
                        _ => return Vec::new(),
                    },
                };
                self.topo.by_type[ty]
                    .iter()
                    .filter(|&&i| on.is_none() || self.topo.inst_host[i] == on)
                    .map(|&i| Entity::Instance(i))
                    .collect()
            }
        }
    }

    fn instance(&self, v: &VarRef, frames: &Frames<'_>) -> Option<usize> {
        match lookup(frames, &v.name)? {
            Entity::Instance(i) => Some(i),
            Entity::Host(_) => None,
        }
    }

    /// Lower and upper bound of an integer expression.
    fn int(&self, e: &IntExpr, frames: &Frames<'_>) -> Option<(i64, i64)> {
        match e {
            IntExpr::Literal(n) => Some((*n, *n)),
            IntExpr::InstancesOf {
                type_name, scope, ..
            } => {
                let Some(&ty) = self.topo.type_ix.get(type_name.as_str()) else {
                    return Some((0, 0));
                };
                let members = &self.topo.by_type[ty];
                let n = match scope {
                    Scope::Deployment => members.len(),
                    Scope::Host(v) => match lookup(frames, &v.name)? {
                        Entity::Host(h) => members.iter().filter(|&&i| self.topo.inst_host[i] == Some(h)).count(),
                        Entity::Instance(_) => return None,
                    },
                } as i64;
                Some((n, n))
            }
            IntExpr::ConnectedCount {
                type_name, target, ..
            } => {
                let r = self.instance(target, frames)?;
                let Some(&ty) = self.topo.type_ix.get(type_name.as_str()) else {
                    return Some((0, 0));
                };
                let mut best: BTreeMap<usize, Truth> = BTreeMap::new();
                for &s in &self.topo.incident[r] {
                    let slot = &self.topo.slots[s];
                    let other = if slot.from == r { slot.to } else { slot.from };
                    if self.topo.inst_type[other] != Some(ty) {
                        continue;
                    }
                    let e = best.entry(other).or_insert(Truth::False);
                    *e = (*e).or(self.topo.state[s]);
                }
                let lo = best.values().filter(|&&t| t == Truth::True).count() as i64;
                let hi = best.values().filter(|&&t| t != Truth::False).count() as i64;
                Some((lo, hi))
            }
        }
    }

    fn reachable(&self, a: usize, b: usize) -> Truth {
        if a == b {
            return Truth::True;
        }
        let Some(ty) = self.topo.inst_type[a] else {
            return Truth::False;
        };
        let mut cache = self.reach.borrow_mut();
        let (sure, possible) = cache.entry(ty).or_insert_with(|| {
            let members = &self.topo.by_type[ty];
            let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let mut sure = Vec::new();
            let mut possible = Vec::new();
            for (s, slot) in self.topo.slots.iter().enumerate() {
                let (Some(&x), Some(&y)) = (local.get(&slot.from), local.get(&slot.to)) else {
                    continue;
                };
                match self.topo.state[s] {
                    Truth::True => {
                        sure.push((x, y));
                        possible.push((x, y));
                    }
                    Truth::Unknown => possible.push((x, y)),
                    Truth::False => {}
                }
            }
            (
                ReachIndex::new(members.len(), sure),
                ReachIndex::new(members.len(), possible),
            )
        });
        let members = &self.topo.by_type[ty];
        let (Some(x), Some(y)) = (
            members.iter().position(|&m| m == a),
            members.iter().position(|&m| m == b),
        ) else {
            return Truth::False;
        };
        if sure.reachable(x, y) {
            Truth::True
        } else if possible.reachable(x, y) {
            Truth::Unknown
        } else {
            Truth::False
        }
    }
}

fn lookup(frames: &Frames<'_>, name: &str) -> Option<Entity> {
    frames.iter().rev().find(|(n, _)| *n == name).map(|(_, e)| *e)
}

fn compare((alo, ahi): (i64, i64), op: CmpOp, (blo, bhi): (i64, i64)) -> Truth {
    // Truth values over every pair (a, b) drawn from the two intervals.
    let (always, never) = match op {
        CmpOp::Eq => (alo == ahi && blo == bhi && alo == blo, ahi < blo || bhi < alo),
        CmpOp::Ne => (ahi < blo || bhi < alo, alo == ahi && blo == bhi && alo == blo),
        CmpOp::Le => (ahi <= blo, alo > bhi),
        CmpOp::Lt => (ahi < blo, alo >= bhi),
        CmpOp::Ge => (alo >= bhi, ahi < blo),
        CmpOp::Gt => (alo > bhi, ahi <= blo),
    };
    if always {
        Truth::True
    } else if never {
        Truth::False
    } else {
        Truth::Unknown
    }
}

/// An assignment of quantified variable names to hosts or instances, by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binding {
    vars: Vec<(String, BoundEntity)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundEntity {
    Host(String),
    Instance(String),
}

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn host(mut self, var: impl Into<String>, id: impl Into<String>) -> Self {
        self.vars.push((var.into(), BoundEntity::Host(id.into())));
        self
    }

    pub fn instance(mut self, var: impl Into<String>, id: impl Into<String>) -> Self {
        self.vars.push((var.into(), BoundEntity::Instance(id.into())));
        self
    }
}

/// Truth value of `expr` for a complete configuration. Variables free in
/// `expr` must be bound in `binding`; an unresolvable reference is false.
pub fn evaluate(expr: &ConstraintExpr, config: &Configuration, goal: &Goal, binding: &Binding) -> bool {
    let topo = Topology::of_configuration(goal, config);
    let mut frames: Frames<'_> = Vec::new();
    for (name, e) in &binding.vars {
        let entity = match e {
            BoundEntity::Host(id) => topo.host_index(id).map(Entity::Host),
            BoundEntity::Instance(id) => topo.instance_index(id).map(Entity::Instance),
        };
        let Some(entity) = entity else { return false };
        frames.push((name.as_str(), entity));
    }
    topo.evaluator().eval(expr, &mut frames) == Truth::True
}

/// A top-level clause that does not hold. `index` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "violations", rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Violated(Vec<Violation>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    /// 1-based indices of violated clauses; empty when valid.
    pub fn violated_clauses(&self) -> Vec<usize> {
        match self {
            Verdict::Valid => Vec::new(),
            Verdict::Violated(v) => v.iter().map(|v| v.index).collect(),
        }
    }
}

/// Evaluates each top-level clause of the goal against the configuration.
pub fn check_configuration(config: &Configuration, goal: &Goal) -> Verdict {
    let topo = Topology::of_configuration(goal, config);
    let ev = topo.evaluator();
    let violations: Vec<Violation> = goal
        .constraints
        .clauses
        .iter()
        .enumerate()
        .filter(|(_, c)| ev.eval(&c.expr, &mut Vec::new()) != Truth::True)
        .map(|(i, c)| Violation {
            index: i + 1,
            span: c.span,
        })
        .collect();
    if violations.is_empty() {
        Verdict::Valid
    } else {
        Verdict::Violated(violations)
    }
}
