//! Backtracking search for satisfying configurations.
//!
//! Three layers: instance counts per component type, placement of those
//! instances on hosts, then wiring of candidate channels. After every
//! decision the constraint set is evaluated in three-valued logic and the
//! branch is abandoned as soon as some clause is definitely false.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::validate::{Bindings, VarKind};
use crate::model::{Channel, Configuration, ConstraintExpr, Domain, Goal, PortDirection};

use super::eval::{check_configuration, Topology, Truth};
use super::{SolveOptions, SolveResult, SolveStatus};

/// A kind of channel the constraints can talk about: some OUT port of one
/// type wired to some IN port of another (or the same) type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct WiringPattern {
    pub from_type: usize,
    pub from_port: String,
    pub to_type: usize,
    pub to_port: String,
}

/// Channel kinds named by `connectsto` atoms, oriented OUT to IN.
pub(crate) fn wiring_patterns(goal: &Goal) -> Vec<WiringPattern> {
    let mut patterns: Vec<WiringPattern> = Vec::new();
    for clause in &goal.constraints.clauses {
        let mut scope = Bindings::default();
        patterns_in(goal, &clause.expr, &mut scope, &mut patterns);
    }
    patterns
}

fn patterns_in<'e>(
    goal: &Goal,
    e: &'e ConstraintExpr,
    scope: &mut Bindings<'e>,
    out: &mut Vec<WiringPattern>,
) {
    match e {
        ConstraintExpr::Quantified {
            domain, vars, body, ..
        } => {
            let kind = match domain {
                Domain::Hosts => VarKind::Host,
                Domain::Instances(t) => VarKind::Instance(t.clone()),
            };
            let mark = scope.len();
            for v in vars {
                scope.push(v, kind.clone());
            }
            for b in body {
                patterns_in(goal, b, scope, out);
            }
            scope.truncate(mark);
        }
        ConstraintExpr::And(items) | ConstraintExpr::Or(items) => {
            items.iter().for_each(|i| patterns_in(goal, i, scope, out))
        }
        ConstraintExpr::Not(inner) => patterns_in(goal, inner, scope, out),
        ConstraintExpr::ConnectsTo { from, to, .. } => {
            let (Some(VarKind::Instance(a)), Some(VarKind::Instance(b))) =
                (scope.lookup(&from.var.name), scope.lookup(&to.var.name))
            else {
                return;
            };
            let ty = |n: &str| goal.component_types.iter().position(|t| t.name == n);
            let (Some(ta), Some(tb)) = (ty(a), ty(b)) else { return };
            let da = goal.component_types[ta].direction_of(&from.port);
            let db = goal.component_types[tb].direction_of(&to.port);
            let oriented = match (da, db) {
                (Some(PortDirection::Out), Some(PortDirection::In)) => {
                    (ta, from.port.clone(), tb, to.port.clone())
                }
                (Some(PortDirection::In), Some(PortDirection::Out)) => {
                    (tb, to.port.clone(), ta, from.port.clone())
                }
                _ => return,
            };
            let (from_type, from_port, to_type, to_port) = oriented;
            let pattern = WiringPattern {
                from_type,
                from_port,
                to_type,
                to_port,
            };
            if !out.contains(&pattern) {
                out.push(pattern);
            }
        }
        _ => {}
    }
}

/// Whether the search should keep going.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

#[derive(Clone, Debug)]
struct Placed {
    id: String,
    ty: usize,
    host: usize,
}

struct Search<'g> {
    goal: &'g Goal,
    patterns: Vec<WiringPattern>,
    /// Available host indices (into `goal.hosts`) in search order.
    hosts: Vec<usize>,
    /// Type indices, most-ported first.
    types: Vec<usize>,
    max_per_type: usize,
    max_solutions: usize,
    limit: u64,
    nodes: u64,
    exhausted: bool,
    preferred: HashSet<Channel>,
    solutions: Vec<Configuration>,
}

impl<'g> Search<'g> {
    fn new(goal: &'g Goal, opts: &SolveOptions) -> Self {
        let mut hosts: Vec<usize> = (0..goal.hosts.len()).filter(|&h| goal.hosts[h].is_available()).collect();
        if opts.seed != 0 {
            hosts.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
        }
        let mut types: Vec<usize> = (0..goal.component_types.len()).collect();
        types.sort_by(|&a, &b| {
            let (ta, tb) = (&goal.component_types[a], &goal.component_types[b]);
            tb.ports.len().cmp(&ta.ports.len()).then_with(|| ta.name.cmp(&tb.name))
        });
        Search {
            goal,
            patterns: wiring_patterns(goal),
            max_per_type: opts.max_instances_per_type.unwrap_or(hosts.len()),
            hosts,
            types,
            max_solutions: opts.max_solutions.max(1),
            limit: opts.node_budget,
            nodes: 0,
            exhausted: false,
            preferred: HashSet::new(),
            solutions: Vec::new(),
        }
    }

    fn tick(&mut self) -> Flow {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.exhausted = true;
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    fn record(&mut self, config: Configuration) -> Flow {
        debug_assert!(check_configuration(&config, self.goal).is_valid());
        if !self.solutions.contains(&config) {
            self.solutions.push(config);
        }
        if self.solutions.len() >= self.max_solutions {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    /// Count vectors over `self.types` with each entry in `0..=caps[i]`,
    /// smallest total first, then lexicographic.
    fn count_vectors(caps: &[usize]) -> Vec<Vec<usize>> {
        let mut all: Vec<Vec<usize>> = vec![Vec::new()];
        for &cap in caps {
            all = all
                .into_iter()
                .flat_map(|prefix| {
                    (0..=cap).map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        all.sort_by(|a, b| a.iter().sum::<usize>().cmp(&b.iter().sum()).then_with(|| a.cmp(b)));
        all
    }

    /// Tries every placement of `counts` new instances alongside `kept`.
    fn place(&mut self, kept: &[Placed], counts: &[usize], next_id: &BTreeMap<usize, usize>) -> Flow {
        let mut fresh: Vec<Placed> = Vec::new();
        for (slot, &ty) in self.types.iter().enumerate() {
            let start = next_id.get(&ty).copied().unwrap_or(1);
            for k in 0..counts[slot] {
                fresh.push(Placed {
                    id: format!("{}-{}", self.goal.component_types[ty].name, start + k),
                    ty,
                    host: usize::MAX,
                });
            }
        }
        self.place_from(kept, &mut fresh, 0)
    }

    fn place_from(&mut self, kept: &[Placed], fresh: &mut Vec<Placed>, i: usize) -> Flow {
        if i == fresh.len() {
            let mut all: Vec<Placed> = kept.to_vec();
            all.extend(fresh.iter().cloned());
            return self.wire_placement(&all);
        }
        // Instances of one type take hosts in nondecreasing search order.
        let min = if i > 0 && fresh[i - 1].ty == fresh[i].ty {
            fresh[i - 1].host
        } else {
            0
        };
        for h in min..self.hosts.len() {
            fresh[i].host = h;
            if self.place_from(kept, fresh, i + 1) == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn wire_placement(&mut self, placed: &[Placed]) -> Flow {
        if self.tick() == Flow::Stop {
            return Flow::Stop;
        }
        let instances: Vec<(String, usize, usize)> = placed
            .iter()
            .map(|p| (p.id.clone(), p.ty, if p.host == usize::MAX { 0 } else { self.hosts[p.host] }))
            .collect();
        let mut topo = Topology::new(self.goal, &instances);

        let mut candidates = Vec::new();
        for (pi, p) in self.patterns.iter().enumerate() {
            for a in (0..placed.len()).filter(|&a| placed[a].ty == p.from_type) {
                // Self-loops included: `r1.rou connectsto r2.rin` holds with r1 = r2.
                for b in (0..placed.len()).filter(|&b| placed[b].ty == p.to_type) {
                    candidates.push(((a.min(b), a.max(b)), pi, a, b));
                }
            }
        }
        // Slots joining the same pair of instances are decided together.
        candidates.sort();
        candidates.dedup();
        for &(_, pi, a, b) in &candidates {
            let p = &self.patterns[pi];
            topo.add_slot(a, &p.from_port, b, &p.to_port);
        }
        let order: Vec<[Truth; 2]> = (0..topo.slot_count())
            .map(|s| {
                if self.preferred.contains(&topo.slot_channel(s)) {
                    [Truth::True, Truth::False]
                } else {
                    [Truth::False, Truth::True]
                }
            })
            .collect();

        if self.status(&topo) == Truth::False {
            return Flow::Continue;
        }
        self.wire(&mut topo, &order, 0)
    }

    fn status(&self, topo: &Topology<'_>) -> Truth {
        let ev = topo.evaluator();
        let mut acc = Truth::True;
        for c in &self.goal.constraints.clauses {
            acc = acc.min(ev.eval(&c.expr, &mut Vec::new()));
            if acc == Truth::False {
                break;
            }
        }
        acc
    }

    fn wire(&mut self, topo: &mut Topology<'_>, order: &[[Truth; 2]], k: usize) -> Flow {
        if k == topo.slot_count() {
            let config = topo.to_configuration(self.goal.revision);
            return self.record(config);
        }
        for value in order[k] {
            if self.tick() == Flow::Stop {
                return Flow::Stop;
            }
            topo.state[k] = value;
            if self.status(topo) != Truth::False && self.wire(topo, order, k + 1) == Flow::Stop {
                return Flow::Stop;
            }
        }
        topo.state[k] = Truth::Unknown;
        Flow::Continue
    }

    /// Full search from an empty deployment.
    fn run_fresh(&mut self) -> Flow {
        let caps = vec![self.max_per_type; self.types.len()];
        for counts in Self::count_vectors(&caps) {
            if self.place(&[], &counts, &BTreeMap::new()) == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn result(self) -> SolveResult {
        let status = if !self.solutions.is_empty() {
            SolveStatus::Sat
        } else if self.exhausted {
            SolveStatus::BudgetExhausted
        } else {
            SolveStatus::Unsat
        };
        SolveResult {
            status,
            solutions: self.solutions,
            nodes_explored: self.nodes.min(self.limit),
        }
    }
}

pub fn solve(goal: &Goal, opts: &SolveOptions) -> SolveResult {
    let mut search = Search::new(goal, opts);
    search.run_fresh();
    search.result()
}

/// Like [`solve`], but prefers solutions that keep the instances of
/// `previous` that sit on available hosts, along with their channels.
///
/// Order of attempts: the surviving configuration unchanged; survivors kept
/// in place with new instances added (fewest first) and previous channels
/// tried first; finally a fresh search, which keeps the answer complete.
pub fn solve_incremental(goal: &Goal, previous: &Configuration, opts: &SolveOptions) -> SolveResult {
    let mut search = Search::new(goal, opts);
    search.preferred = previous.channels().iter().cloned().collect();
    let survivors = previous
        .retain_instances(|i| goal.is_host_available(&i.host) && goal.component_type(&i.type_name).is_some())
        .with_goal_revision(goal.revision);

    if search.tick() == Flow::Continue
        && check_configuration(&survivors, goal).is_valid()
        && search.record(survivors.clone()) == Flow::Stop
    {
        return search.result();
    }
    if search.exhausted {
        return search.result();
    }

    let kept: Vec<Placed> = survivors
        .instances()
        .iter()
        .map(|i| {
            let ty = goal.component_types.iter().position(|t| t.name == i.type_name).unwrap();
            let host = goal.hosts.iter().position(|h| h.id == i.host).unwrap();
            Placed {
                id: i.id.clone(),
                ty,
                host: search.hosts.iter().position(|&h| h == host).unwrap(),
            }
        })
        .collect();
    let mut next_id: BTreeMap<usize, usize> = BTreeMap::new();
    for i in previous.instances() {
        let Some(ty) = goal.component_types.iter().position(|t| t.name == i.type_name) else {
            continue;
        };
        let n = i
            .id
            .strip_prefix(&format!("{}-", i.type_name))
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(0);
        let e = next_id.entry(ty).or_insert(1);
        *e = (*e).max(n + 1);
    }
    let caps: Option<Vec<usize>> = search
        .types
        .iter()
        .map(|&ty| search.max_per_type.checked_sub(kept.iter().filter(|p| p.ty == ty).count()))
        .collect();

    // Keeping survivors gets a quarter of the budget; the fresh search after
    // it is what makes an UNSAT answer exhaustive.
    if let Some(caps) = caps {
        let full_limit = search.limit;
        search.limit = search.nodes + full_limit.saturating_sub(search.nodes) / 4;
        let mut stopped = false;
        for counts in Search::count_vectors(&caps) {
            if search.place(&kept, &counts, &next_id) == Flow::Stop {
                stopped = true;
                break;
            }
        }
        search.limit = full_limit;
        if stopped && !search.exhausted {
            return search.result();
        }
        search.exhausted = false;
    }
    search.run_fresh();
    search.result()
}
