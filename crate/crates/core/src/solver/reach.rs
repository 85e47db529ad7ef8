//! Strongly connected components (Tarjan) and reachability over the
//! condensation DAG.

use std::collections::BTreeMap;

use crate::model::Configuration;

/// Reachability closure of a directed graph on `0..n`.
#[derive(Clone, Debug)]
pub(crate) struct ReachIndex {
    component: Vec<usize>,
    /// Bitset per component: components reachable from it, itself included.
    closure: Vec<Vec<u64>>,
}

impl ReachIndex {
    pub(crate) fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            adjacency[a].push(b);
        }
        let (component, count) = tarjan(&adjacency);

        // Tarjan emits components in reverse topological order, so every
        // successor component has a smaller index and is already closed.
        let words = count.div_ceil(64).max(1);
        let mut closure = vec![vec![0u64; words]; count];
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (v, &c) in component.iter().enumerate() {
            members[c].push(v);
        }
        for c in 0..count {
            closure[c][c / 64] |= 1 << (c % 64);
            for &v in &members[c] {
                for &w in &adjacency[v] {
                    let d = component[w];
                    if d != c {
                        debug_assert!(d < c);
                        let (lo, hi) = closure.split_at_mut(c);
                        for (x, y) in hi[0].iter_mut().zip(&lo[d]) {
                            *x |= *y;
                        }
                    }
                }
            }
        }
        ReachIndex { component, closure }
    }

    pub(crate) fn reachable(&self, from: usize, to: usize) -> bool {
        let (a, b) = (self.component[from], self.component[to]);
        self.closure[a][b / 64] & (1 << (b % 64)) != 0
    }

    pub(crate) fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }
}

/// Iterative Tarjan. Returns the component index of each vertex and the
/// component count; indices follow completion order (sinks first).
fn tarjan(adjacency: &[Vec<usize>]) -> (Vec<usize>, usize) {
    const UNVISITED: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component = vec![UNVISITED; n];
    let mut next_index = 0;
    let mut count = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = frames.last_mut() {
            if let Some(&w) = adjacency[v].get(*edge) {
                *edge += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    component[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (component, count)
}

/// Ordered-pair reachability among the instances of one component type,
/// following channels whose endpoints are both of that type.
#[derive(Clone, Debug)]
pub struct Reachability {
    ids: Vec<String>,
    index: ReachIndex,
}

impl Reachability {
    pub fn instances(&self) -> &[String] {
        &self.ids
    }

    /// `None` when either id is not an instance of the type.
    pub fn reachable(&self, from: &str, to: &str) -> Option<bool> {
        let a = self.ids.iter().position(|i| i == from)?;
        let b = self.ids.iter().position(|i| i == to)?;
        Some(self.index.reachable(a, b))
    }

    /// Every ordered pair with its reachability, in id order.
    pub fn pairs(&self) -> Vec<(&str, &str, bool)> {
        let mut out = Vec::with_capacity(self.ids.len() * self.ids.len());
        for (a, x) in self.ids.iter().enumerate() {
            for (b, y) in self.ids.iter().enumerate() {
                out.push((x.as_str(), y.as_str(), self.index.reachable(a, b)));
            }
        }
        out
    }

    /// True when every ordered pair is reachable.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.ids.len();
        (0..n).all(|v| self.index.component_of(v) == self.index.component_of(0))
    }
}

pub fn strongly_connected_reachability(config: &Configuration, type_name: &str) -> Reachability {
    let ids: Vec<String> = config.instances_of(type_name).map(|i| i.id.clone()).collect();
    let pos: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let edges = config.channels().iter().filter_map(|c| {
        Some((*pos.get(c.from_instance.as_str())?, *pos.get(c.to_instance.as_str())?))
    });
    let index = ReachIndex::new(ids.len(), edges);
    Reachability { ids, index }
}
