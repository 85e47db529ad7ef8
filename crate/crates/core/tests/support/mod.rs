//! Test-only machinery: a naive evaluator written without reference to the
//! solver, a brute-force configuration enumerator built on it, and seeded
//! generators for goals, expressions and configurations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use deladas::model::{
    Channel, Clause, CmpOp, ComponentInstance, ComponentType, Configuration, ConstraintExpr,
    ConstraintSet, Domain, Goal, HostDescriptor, HostStatus, IntExpr, PortDirection, PortRef,
    Quantifier, Scope, VarRef,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod scenarios;

pub const RANDC: &str = include_str!("../../examples/randc.dls");

pub fn randc(hosts: usize) -> Goal {
    let goal = deladas::parser::parse_goal(RANDC).expect("randc parses");
    goal.with_hosts((1..=hosts).map(|i| format!("h{i}")))
}

// ---------------------------------------------------------------------------
// Naive evaluator

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ent {
    Host(String),
    Inst(String),
}

struct Naive<'a> {
    goal: &'a Goal,
    config: &'a Configuration,
}

impl Naive<'_> {
    fn lookup<'e>(&self, env: &'e [(String, Ent)], name: &str) -> Option<&'e Ent> {
        env.iter().rev().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    fn inst<'e>(&self, env: &'e [(String, Ent)], v: &VarRef) -> Option<&'e str> {
        match self.lookup(env, &v.name)? {
            Ent::Inst(id) => Some(id),
            Ent::Host(_) => None,
        }
    }

    fn type_of(&self, id: &str) -> Option<&str> {
        self.config.instance(id).map(|i| i.type_name.as_str())
    }

    fn direction(&self, id: &str, port: &str) -> Option<PortDirection> {
        self.goal.port_direction(self.type_of(id)?, port)
    }

    fn channel(&self, a: &str, p: &str, b: &str, q: &str) -> bool {
        self.config.has_channel(&Channel::new(a, p, b, q))
    }

    /// Depth-first search over channels whose ends both have `a`'s type.
    fn reachable(&self, a: &str, b: &str) -> bool {
        if a == b {
            return true;
        }
        let Some(ty) = self.type_of(a) else { return false };
        let mut seen = BTreeSet::from([a.to_string()]);
        let mut stack = vec![a.to_string()];
        while let Some(x) = stack.pop() {
            for c in self.config.channels() {
                if c.from_instance != x || self.type_of(&c.to_instance) != Some(ty) {
                    continue;
                }
                if c.to_instance == b {
                    return true;
                }
                if seen.insert(c.to_instance.clone()) {
                    stack.push(c.to_instance.clone());
                }
            }
        }
        false
    }

    fn domain(&self, domain: &Domain, scope: &Scope, env: &[(String, Ent)]) -> Vec<Ent> {
        match domain {
            Domain::Hosts => self
                .goal
                .hosts
                .iter()
                .filter(|h| h.status == HostStatus::Available)
                .map(|h| Ent::Host(h.id.clone()))
                .collect(),
            Domain::Instances(t) => {
                if self.goal.component_type(t).is_none() {
                    return Vec::new();
                }
                let host = match scope {
                    Scope::Deployment => None,
                    Scope::Host(v) => match self.lookup(env, &v.name) {
                        Some(Ent::Host(h)) => Some(h.clone()),
                        _ => return Vec::new(),
                    },
                };
                self.config
                    .instances()
                    .iter()
                    .filter(|i| &i.type_name == t)
                    .filter(|i| host.as_ref().is_none_or(|h| &i.host == h))
                    .map(|i| Ent::Inst(i.id.clone()))
                    .collect()
            }
        }
    }

    fn int(&self, e: &IntExpr, env: &[(String, Ent)]) -> Option<i64> {
        match e {
            IntExpr::Literal(n) => Some(*n),
            IntExpr::InstancesOf {
                type_name, scope, ..
            } => {
                if self.goal.component_type(type_name).is_none() {
                    return Some(0);
                }
                let on = match scope {
                    Scope::Deployment => None,
                    Scope::Host(v) => match self.lookup(env, &v.name)? {
                        Ent::Host(h) => Some(h.clone()),
                        Ent::Inst(_) => return None,
                    },
                };
                let n = self
                    .config
                    .instances()
                    .iter()
                    .filter(|i| &i.type_name == type_name && on.as_ref().is_none_or(|h| &i.host == h))
                    .count();
                Some(n as i64)
            }
            IntExpr::ConnectedCount {
                type_name, target, ..
            } => {
                let r = self.inst(env, target)?;
                if self.goal.component_type(type_name).is_none() {
                    return Some(0);
                }
                let n = self
                    .config
                    .instances()
                    .iter()
                    .filter(|x| &x.type_name == type_name)
                    .filter(|x| {
                        self.config.channels().iter().any(|c| {
                            (c.from_instance == r && c.to_instance == x.id)
                                || (c.from_instance == x.id && c.to_instance == r)
                        })
                    })
                    .count();
                Some(n as i64)
            }
        }
    }

    fn holds(&self, e: &ConstraintExpr, env: &mut Vec<(String, Ent)>) -> bool {
        match e {
            ConstraintExpr::Quantified {
                quantifier,
                domain,
                vars,
                scope,
                body,
                ..
            } => {
                let candidates = self.domain(domain, scope, env);
                self.quantify(*quantifier, vars, &candidates, body, env)
            }
            ConstraintExpr::And(items) => items.iter().all(|i| self.holds(i, env)),
            ConstraintExpr::Or(items) => items.iter().any(|i| self.holds(i, env)),
            ConstraintExpr::Not(inner) => !self.holds(inner, env),
            ConstraintExpr::Compare { lhs, op, rhs, .. } => {
                match (self.int(lhs, env), self.int(rhs, env)) {
                    (Some(a), Some(b)) => op.holds(a, b),
                    _ => false,
                }
            }
            ConstraintExpr::ConnectsTo { from, to, .. } => {
                let (Some(a), Some(b)) = (self.inst(env, &from.var), self.inst(env, &to.var)) else {
                    return false;
                };
                match (self.direction(a, &from.port), self.direction(b, &to.port)) {
                    (Some(PortDirection::Out), Some(PortDirection::In)) => {
                        self.channel(a, &from.port, b, &to.port)
                    }
                    (Some(PortDirection::In), Some(PortDirection::Out)) => {
                        self.channel(b, &to.port, a, &from.port)
                    }
                    _ => false,
                }
            }
            ConstraintExpr::Reachable { from, to, .. } => {
                match (self.inst(env, from), self.inst(env, to)) {
                    (Some(a), Some(b)) => self.reachable(a, b),
                    _ => false,
                }
            }
            ConstraintExpr::SameEntity {
                lhs, rhs, equal, ..
            } => match (self.lookup(env, &lhs.name), self.lookup(env, &rhs.name)) {
                (Some(a), Some(b)) => (a == b) == *equal,
                _ => false,
            },
        }
    }

    fn quantify(
        &self,
        q: Quantifier,
        vars: &[String],
        candidates: &[Ent],
        body: &[ConstraintExpr],
        env: &mut Vec<(String, Ent)>,
    ) -> bool {
        let Some((var, rest)) = vars.split_first() else {
            return body.iter().all(|b| self.holds(b, env));
        };
        let mut results = candidates.iter().map(|c| {
            env.push((var.clone(), c.clone()));
            let r = self.quantify(q, rest, candidates, body, env);
            env.pop();
            r
        });
        match q {
            Quantifier::Forall => results.all(|r| r),
            Quantifier::Exists => results.any(|r| r),
        }
    }
}

/// 1-based indices of the top-level clauses that do not hold.
pub fn naive_violations(goal: &Goal, config: &Configuration) -> Vec<usize> {
    let n = Naive { goal, config };
    goal.constraints
        .clauses
        .iter()
        .enumerate()
        .filter(|(_, c)| !n.holds(&c.expr, &mut Vec::new()))
        .map(|(i, _)| i + 1)
        .collect()
}

pub fn naive_holds(goal: &Goal, config: &Configuration, expr: &ConstraintExpr) -> bool {
    Naive { goal, config }.holds(expr, &mut Vec::new())
}

// ---------------------------------------------------------------------------
// Wiring patterns, derived straight from the constraint text

/// `(from type, out port, to type, in port)` for every `connectsto` atom.
pub fn channel_patterns(goal: &Goal) -> BTreeSet<(String, String, String, String)> {
    fn walk(
        goal: &Goal,
        e: &ConstraintExpr,
        env: &mut Vec<(String, Option<String>)>,
        out: &mut BTreeSet<(String, String, String, String)>,
    ) {
        let ty = |env: &[(String, Option<String>)], v: &str| {
            env.iter().rev().find(|(n, _)| n == v).and_then(|(_, t)| t.clone())
        };
        match e {
            ConstraintExpr::Quantified {
                domain, vars, body, ..
            } => {
                let t = match domain {
                    Domain::Hosts => None,
                    Domain::Instances(t) => Some(t.clone()),
                };
                let mark = env.len();
                env.extend(vars.iter().map(|v| (v.clone(), t.clone())));
                for b in body {
                    walk(goal, b, env, out);
                }
                env.truncate(mark);
            }
            ConstraintExpr::And(xs) | ConstraintExpr::Or(xs) => {
                for x in xs {
                    walk(goal, x, env, out);
                }
            }
            ConstraintExpr::Not(x) => walk(goal, x, env, out),
            ConstraintExpr::ConnectsTo { from, to, .. } => {
                let (Some(a), Some(b)) = (ty(env, &from.var.name), ty(env, &to.var.name)) else {
                    return;
                };
                match (goal.port_direction(&a, &from.port), goal.port_direction(&b, &to.port)) {
                    (Some(PortDirection::Out), Some(PortDirection::In)) => {
                        out.insert((a, from.port.clone(), b, to.port.clone()));
                    }
                    (Some(PortDirection::In), Some(PortDirection::Out)) => {
                        out.insert((b, to.port.clone(), a, from.port.clone()));
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    for c in &goal.constraints.clauses {
        walk(goal, &c.expr, &mut Vec::new(), &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force enumeration

#[derive(Clone, Copy, Debug)]
pub struct EnumerationBounds {
    pub max_hosts: usize,
    pub max_instances_per_type: usize,
}

impl EnumerationBounds {
    pub const MAX_CANDIDATES: u128 = 100_000_000;

    pub fn per_type(max_instances_per_type: usize) -> Self {
        EnumerationBounds {
            max_hosts: 4,
            max_instances_per_type,
        }
    }
}

fn mentions_channels(e: &ConstraintExpr) -> bool {
    let mut found = false;
    e.walk(&mut |x| match x {
        ConstraintExpr::ConnectsTo { .. } | ConstraintExpr::Reachable { .. } => found = true,
        ConstraintExpr::Compare { lhs, rhs, .. } => {
            found |= [lhs, rhs].iter().any(|i| matches!(i, IntExpr::ConnectedCount { .. }))
        }
        _ => {}
    });
    found
}

/// Nondecreasing sequences of length `k` over `0..n`.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for prefix in multisets(n, k - 1) {
        let start = prefix.last().copied().unwrap_or(0);
        for h in start..n {
            let mut p = prefix.clone();
            p.push(h);
            out.push(p);
        }
    }
    out
}

/// Every configuration within `bounds` that satisfies the goal, by the naive
/// evaluator. Instances of a type are placed on hosts in nondecreasing
/// order (every placement up to renaming); every subset of the channels the
/// goal's `connectsto` atoms could ask for is tried.
pub fn enumerate_all(goal: &Goal, bounds: EnumerationBounds) -> Result<Vec<Configuration>, String> {
    let hosts: Vec<&str> = goal.available_hosts().map(|h| h.id.as_str()).collect();
    if hosts.len() > bounds.max_hosts || bounds.max_hosts > 4 {
        return Err(format!("{} hosts exceed the enumeration bound", hosts.len()));
    }
    if bounds.max_instances_per_type > 4 {
        return Err("more than 4 instances per type".into());
    }
    let patterns = channel_patterns(goal);
    let placement_only: Vec<&Clause> = goal
        .constraints
        .clauses
        .iter()
        .filter(|c| !mentions_channels(&c.expr))
        .collect();

    let per_type: Vec<Vec<Vec<usize>>> = goal
        .component_types
        .iter()
        .map(|_| (0..=bounds.max_instances_per_type).flat_map(|k| multisets(hosts.len(), k)).collect())
        .collect();

    // Placements that survive the channel-free clauses, with their channel candidates.
    let mut work: Vec<(Vec<ComponentInstance>, Vec<Channel>)> = Vec::new();
    let mut index = vec![0usize; per_type.len()];
    loop {
        let mut instances = Vec::new();
        for (t, choice) in index.iter().enumerate() {
            let ty = &goal.component_types[t].name;
            for (k, &h) in per_type[t][*choice].iter().enumerate() {
                instances.push(ComponentInstance::new(format!("{ty}-{}", k + 1), ty.clone(), hosts[h]));
            }
        }
        let bare = Configuration::new(instances.clone(), Vec::new(), goal.revision).unwrap();
        let naive = Naive { goal, config: &bare };
        if placement_only.iter().all(|c| naive.holds(&c.expr, &mut Vec::new())) {
            let mut candidates = Vec::new();
            for (ft, fp, tt, tp) in &patterns {
                for a in instances.iter().filter(|i| &i.type_name == ft) {
                    for b in instances.iter().filter(|i| &i.type_name == tt) {
                        candidates.push(Channel::new(a.id.clone(), fp.clone(), b.id.clone(), tp.clone()));
                    }
                }
            }
            candidates.sort_by_key(Channel::sort_key);
            candidates.dedup();
            work.push((instances, candidates));
        }

        // Odometer over the per-type placement lists.
        let mut t = 0;
        loop {
            if t == index.len() {
                return finish(goal, work);
            }
            index[t] += 1;
            if index[t] < per_type[t].len() {
                break;
            }
            index[t] = 0;
            t += 1;
        }
    }

    fn finish(goal: &Goal, work: Vec<(Vec<ComponentInstance>, Vec<Channel>)>) -> Result<Vec<Configuration>, String> {
        let space: u128 = work.iter().map(|(_, c)| 1u128 << c.len()).sum();
        if space > EnumerationBounds::MAX_CANDIDATES {
            return Err(format!("{space} candidate configurations exceed the bound"));
        }
        let mut out = Vec::new();
        for (instances, candidates) in work {
            for mask in 0u64..(1u64 << candidates.len()) {
                let channels = candidates
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, c)| c.clone())
                    .collect();
                let config = Configuration::new(instances.clone(), channels, goal.revision).unwrap();
                if naive_violations(goal, &config).is_empty() {
                    out.push(config);
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Canonical form up to renaming of instances

/// A string equal for two configurations iff one is the other with instance
/// ids permuted within each type.
pub fn canonical(config: &Configuration) -> String {
    let mut groups: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
    for i in config.instances() {
        groups.entry((&i.type_name, &i.host)).or_default().push(&i.id);
    }
    let groups: Vec<((&str, &str), Vec<&str>)> = groups.into_iter().collect();
    let mut best: Option<String> = None;
    let mut assignment: BTreeMap<&str, String> = BTreeMap::new();
    search(config, &groups, 0, &mut assignment, &mut best);
    return best.unwrap_or_default();

    fn search<'a>(
        config: &Configuration,
        groups: &[((&'a str, &'a str), Vec<&'a str>)],
        g: usize,
        assignment: &mut BTreeMap<&'a str, String>,
        best: &mut Option<String>,
    ) {
        if g == groups.len() {
            let mut channels: Vec<String> = config
                .channels()
                .iter()
                .map(|c| {
                    format!(
                        "{}.{}>{}.{}",
                        assignment[c.from_instance.as_str()],
                        c.from_port,
                        assignment[c.to_instance.as_str()],
                        c.to_port
                    )
                })
                .collect();
            channels.sort();
            let mut labels: Vec<&String> = assignment.values().collect();
            labels.sort();
            let text = format!("{labels:?}|{channels:?}");
            if best.as_ref().is_none_or(|b| &text < b) {
                *best = Some(text);
            }
            return;
        }
        let ((ty, host), ids) = &groups[g];
        for perm in permutations(ids.len()) {
            for (k, &p) in perm.iter().enumerate() {
                assignment.insert(ids[p], format!("{ty}@{host}#{k}"));
            }
            search(config, groups, g + 1, assignment, best);
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Seeded generators

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Router and Client with the ports the peer-to-peer goal infers.
pub fn p2p_types() -> Vec<ComponentType> {
    vec![
        ComponentType::new("Router")
            .with_port("rin", PortDirection::In)
            .with_port("rou", PortDirection::Out)
            .with_port("cin", PortDirection::In)
            .with_port("cout", PortDirection::Out),
        ComponentType::new("Client")
            .with_port("in", PortDirection::In)
            .with_port("out", PortDirection::Out),
    ]
}

/// A structurally valid configuration over `types` and `hosts`.
pub fn random_configuration(rng: &mut ChaCha8Rng, types: &[ComponentType], hosts: &[String], max_instances: usize) -> Configuration {
    let n = rng.random_range(0..=max_instances);
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    let mut instances = Vec::new();
    for _ in 0..n {
        let t = &types[rng.random_range(0..types.len())];
        let k = counters.entry(&t.name).or_insert(0);
        *k += 1;
        let host = hosts[rng.random_range(0..hosts.len())].clone();
        instances.push(ComponentInstance::new(format!("{}-{k}", t.name), t.name.clone(), host));
    }
    let density = rng.random_range(0.0..0.5);
    let mut channels = Vec::new();
    for a in &instances {
        let ta = types.iter().find(|t| t.name == a.type_name).unwrap();
        for b in &instances {
            let tb = types.iter().find(|t| t.name == b.type_name).unwrap();
            for p in ta.ports.iter().filter(|p| p.direction == PortDirection::Out) {
                for q in tb.ports.iter().filter(|q| q.direction == PortDirection::In) {
                    if rng.random_bool(density) {
                        channels.push(Channel::new(a.id.clone(), p.name.clone(), b.id.clone(), q.name.clone()));
                    }
                }
            }
        }
    }
    Configuration::new(instances, channels, rng.random_range(0..4)).unwrap()
}

#[derive(Clone)]
enum Bound {
    Host(String),
    Inst(String, String),
}

/// Random closed constraint expressions over the peer-to-peer types.
pub struct ExprGen {
    rng: ChaCha8Rng,
    types: Vec<ComponentType>,
    fresh: usize,
}

impl ExprGen {
    pub fn new(seed: u64) -> Self {
        ExprGen {
            rng: rng(seed),
            types: p2p_types(),
            fresh: 0,
        }
    }

    fn var(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.rng.random_range(0..xs.len())]
    }

    pub fn clause(&mut self) -> ConstraintExpr {
        self.expr(&[], 3)
    }

    pub fn goal(&mut self, clauses: usize, hosts: usize) -> Goal {
        let clauses = (0..clauses).map(|_| Clause::new(self.clause())).collect();
        let mut goal = Goal::new(
            self.types.clone(),
            (1..=hosts).map(|i| HostDescriptor::available(format!("h{i}"))).collect(),
            ConstraintSet::new("random", clauses),
        );
        if hosts > 1 && self.rng.random_bool(0.3) {
            goal.hosts[0].status = HostStatus::Failed;
        }
        goal
    }

    fn expr(&mut self, env: &[Bound], depth: u32) -> ConstraintExpr {
        let choice = if depth == 0 { 4 + self.rng.random_range(0..4) } else { self.rng.random_range(0..8) };
        match choice {
            0 | 1 => self.quantified(env, depth),
            2 => {
                let n = self.rng.random_range(2..=3);
                let items = (0..n).map(|_| self.expr(env, depth - 1)).collect();
                if self.rng.random_bool(0.5) {
                    ConstraintExpr::And(items)
                } else {
                    ConstraintExpr::Or(items)
                }
            }
            3 => ConstraintExpr::Not(Box::new(self.expr(env, depth - 1))),
            _ => self.atom(env),
        }
    }

    fn quantified(&mut self, env: &[Bound], depth: u32) -> ConstraintExpr {
        let quantifier = if self.rng.random_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
        let hosts_bound: Vec<String> = env
            .iter()
            .filter_map(|b| match b {
                Bound::Host(h) => Some(h.clone()),
                _ => None,
            })
            .collect();
        let over_hosts = self.rng.random_bool(0.3);
        let nvars = self.rng.random_range(1..=2);
        let (domain, scope, vars, bound): (Domain, Scope, Vec<String>, Vec<Bound>) = if over_hosts {
            let vars: Vec<String> = (0..nvars).map(|_| self.var("hv")).collect();
            let bound = vars.iter().map(|v| Bound::Host(v.clone())).collect();
            (Domain::Hosts, Scope::Deployment, vars, bound)
        } else {
            let t = self.pick(&self.types.clone()).name.clone();
            let scope = if !hosts_bound.is_empty() && self.rng.random_bool(0.4) {
                Scope::Host(VarRef::new(self.pick(&hosts_bound).clone()))
            } else {
                Scope::Deployment
            };
            let vars: Vec<String> = (0..nvars).map(|_| self.var("v")).collect();
            let bound = vars.iter().map(|v| Bound::Inst(v.clone(), t.clone())).collect();
            (Domain::Instances(t), scope, vars, bound)
        };
        let mut inner = env.to_vec();
        inner.extend(bound);
        let n = self.rng.random_range(1..=2);
        let body = (0..n).map(|_| self.expr(&inner, depth.saturating_sub(1))).collect();
        ConstraintExpr::Quantified {
            quantifier,
            domain,
            vars,
            scope,
            body,
            span: Default::default(),
        }
    }

    fn int(&mut self, env: &[Bound]) -> IntExpr {
        let hosts: Vec<String> = env
            .iter()
            .filter_map(|b| match b {
                Bound::Host(h) => Some(h.clone()),
                _ => None,
            })
            .collect();
        let insts: Vec<String> = env
            .iter()
            .filter_map(|b| match b {
                Bound::Inst(v, _) => Some(v.clone()),
                _ => None,
            })
            .collect();
        let t = self.pick(&self.types.clone()).name.clone();
        match self.rng.random_range(0..3) {
            0 => IntExpr::Literal(self.rng.random_range(0..=3)),
            1 if !insts.is_empty() => IntExpr::ConnectedCount {
                type_name: t,
                var: self.var("c"),
                target: VarRef::new(self.pick(&insts).clone()),
                span: Default::default(),
            },
            _ => IntExpr::InstancesOf {
                type_name: t,
                scope: if !hosts.is_empty() && self.rng.random_bool(0.6) {
                    Scope::Host(VarRef::new(self.pick(&hosts).clone()))
                } else {
                    Scope::Deployment
                },
                span: Default::default(),
            },
        }
    }

    fn atom(&mut self, env: &[Bound]) -> ConstraintExpr {
        let insts: Vec<(String, String)> = env
            .iter()
            .filter_map(|b| match b {
                Bound::Inst(v, t) => Some((v.clone(), t.clone())),
                _ => None,
            })
            .collect();
        let choice = if insts.is_empty() { 0 } else { self.rng.random_range(0..5) };
        match choice {
            1 | 2 => {
                let (a, ta) = self.pick(&insts).clone();
                let (b, tb) = self.pick(&insts).clone();
                let types = self.types.clone();
                let ports = |t: &str, d: PortDirection| -> Vec<String> {
                    types
                        .iter()
                        .find(|x| x.name == t)
                        .unwrap()
                        .ports
                        .iter()
                        .filter(|p| p.direction == d)
                        .map(|p| p.name.clone())
                        .collect()
                };
                // Written either out-to-in or in-to-out, as the goal file allows.
                let forward = self.rng.random_bool(0.7);
                let (da, db) = if forward {
                    (PortDirection::Out, PortDirection::In)
                } else {
                    (PortDirection::In, PortDirection::Out)
                };
                let p = self.pick(&ports(&ta, da)).clone();
                let q = self.pick(&ports(&tb, db)).clone();
                ConstraintExpr::ConnectsTo {
                    from: PortRef::new(a, p),
                    to: PortRef::new(b, q),
                    span: Default::default(),
                }
            }
            3 => {
                let (a, _) = self.pick(&insts).clone();
                let (b, _) = self.pick(&insts).clone();
                ConstraintExpr::Reachable {
                    from: VarRef::new(a),
                    to: VarRef::new(b),
                    span: Default::default(),
                }
            }
            4 => {
                let (a, _) = self.pick(&insts).clone();
                let (b, _) = self.pick(&insts).clone();
                ConstraintExpr::SameEntity {
                    lhs: VarRef::new(a),
                    rhs: VarRef::new(b),
                    equal: self.rng.random_bool(0.5),
                    span: Default::default(),
                }
            }
            _ => {
                let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Le, CmpOp::Lt, CmpOp::Ge, CmpOp::Gt];
                ConstraintExpr::Compare {
                    lhs: self.int(env),
                    op: *self.pick(&ops),
                    rhs: self.int(env),
                    span: Default::default(),
                }
            }
        }
    }
}
