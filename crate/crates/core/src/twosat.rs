//! Implication digraphs of 2-CNF formulas and their cycle structure.
//!
//! A clause `a ∨ b` contributes the conjugate arcs `¬a → b` and `¬b → a`.
//! Vertices are the `2n` literals, indexed by [`Literal::code`]. The formula
//! is unsatisfiable iff some strongly connected component holds both `x` and
//! `¬x` (a bicycle). Unicycles and pretzels are the two substructures used to
//! bound the 2-SAT threshold from above and below.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula, Literal, Sign};
use crate::solver::SatResult;

/// Largest `n` for which unicycles are enumerated.
pub const MAX_UNICYCLE_VARS: usize = 64;

/// An arc together with the index of the clause that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub from: Literal,
    pub to: Literal,
    pub clause: usize,
}

#[derive(Clone, Debug)]
pub struct ImplicationDigraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    provenance: Vec<u32>,
    rev_offsets: Vec<usize>,
    sources: Vec<u32>,
}

impl ImplicationDigraph {
    pub fn new(formula: &Formula) -> Result<ImplicationDigraph> {
        if formula.k() != 2 && !(formula.k() == 0 && formula.is_empty()) {
            return Err(Error::BadWidth {
                expected: 2,
                got: formula.k(),
            });
        }
        let mut arcs = Vec::with_capacity(2 * formula.m());
        for (ci, c) in formula.clauses().iter().enumerate() {
            let [a, b] = [c.literals()[0], c.literals()[1]];
            arcs.push((a.negated().code(), b.code(), ci as u32));
            arcs.push((b.negated().code(), a.code(), ci as u32));
        }
        Ok(Self::from_coded(formula.n(), &arcs))
    }

    /// A digraph on the `2n` literal vertices with exactly the given arcs, not
    /// necessarily closed under conjugation. The provenance of each arc is its
    /// position in `arcs`.
    pub fn from_arcs(n: usize, arcs: &[(Literal, Literal)]) -> Result<ImplicationDigraph> {
        let mut coded = Vec::with_capacity(arcs.len());
        for (i, &(from, to)) in arcs.iter().enumerate() {
            for l in [from, to] {
                if l.var() as usize > n {
                    return Err(Error::BadIndex { index: l.var(), n });
                }
            }
            coded.push((from.code(), to.code(), i as u32));
        }
        Ok(Self::from_coded(n, &coded))
    }

    fn from_coded(n: usize, arcs: &[(usize, usize, u32)]) -> ImplicationDigraph {
        let nv = 2 * n;
        let csr = |key: &dyn Fn(&(usize, usize, u32)) -> usize| {
            let mut offsets = vec![0usize; nv + 1];
            for a in arcs {
                offsets[key(a) + 1] += 1;
            }
            for v in 0..nv {
                offsets[v + 1] += offsets[v];
            }
            offsets
        };
        let offsets = csr(&|a| a.0);
        let rev_offsets = csr(&|a| a.1);
        let mut fill = offsets.clone();
        let mut rev_fill = rev_offsets.clone();
        let mut targets = vec![0u32; arcs.len()];
        let mut provenance = vec![0u32; arcs.len()];
        let mut sources = vec![0u32; arcs.len()];
        for &(from, to, prov) in arcs {
            targets[fill[from]] = to as u32;
            provenance[fill[from]] = prov;
            fill[from] += 1;
            sources[rev_fill[to]] = from as u32;
            rev_fill[to] += 1;
        }
        ImplicationDigraph {
            n,
            offsets,
            targets,
            provenance,
            rev_offsets,
            sources,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// Out-neighbours of vertex `code`.
    pub fn successors(&self, code: usize) -> &[u32] {
        &self.targets[self.offsets[code]..self.offsets[code + 1]]
    }

    pub fn predecessors(&self, code: usize) -> impl Iterator<Item = usize> + '_ {
        self.sources[self.rev_offsets[code]..self.rev_offsets[code + 1]]
            .iter()
            .map(|&w| w as usize)
    }

    pub fn has_arc(&self, from: Literal, to: Literal) -> bool {
        self.successors(from.code()).contains(&(to.code() as u32))
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            (self.offsets[v]..self.offsets[v + 1]).map(move |slot| Arc {
                from: Literal::from_code(v),
                to: Literal::from_code(self.targets[slot] as usize),
                clause: self.provenance[slot] as usize,
            })
        })
    }

    /// No arc joins two pure literals or two negated literals.
    pub fn is_polarity_bipartite(&self) -> bool {
        self.arcs().all(|a| a.from.sign() != a.to.sign())
    }

    /// Strongly connected components by an iterative lowlink pass.
    pub fn components(&self) -> Components {
        tarjan(self)
    }
}

pub fn implication_digraph(formula: &Formula) -> Result<ImplicationDigraph> {
    ImplicationDigraph::new(formula)
}

/// Component id per vertex. Ids are assigned in reverse topological order of
/// the condensation: if an arc leads from component `a` to `b != a` then `b < a`.
#[derive(Clone, Debug)]
pub struct Components {
    pub id: Vec<u32>,
    pub count: usize,
}

fn tarjan(g: &ImplicationDigraph) -> Components {
    const NONE: u32 = u32::MAX;
    let nv = g.vertex_count();
    let mut index = vec![NONE; nv];
    let mut low = vec![0u32; nv];
    let mut on_stack = vec![false; nv];
    let mut id = vec![NONE; nv];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0u32;

    for root in 0..nv {
        if index[root] != NONE {
            continue;
        }
        call.push((root as u32, g.offsets[root]));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut slot)) = call.last_mut() {
            let v = v as usize;
            if *slot < g.offsets[v + 1] {
                let w = g.targets[*slot] as usize;
                *slot += 1;
                if index[w] == NONE {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, g.offsets[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let parent = parent as usize;
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("component root is on the stack") as usize;
                    on_stack[w] = false;
                    id[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    Components {
        id,
        count: count as usize,
    }
}

/// Linear-time 2-SAT: UNSAT iff some `x` and `¬x` share a component;
/// otherwise `x` is TRUE iff its component comes later in topological order.
pub fn solve_2sat(formula: &Formula) -> Result<SatResult> {
    let g = ImplicationDigraph::new(formula)?;
    let comps = g.components();
    let mut values = Vec::with_capacity(g.n);
    for v in 0..g.n {
        let (pos, neg) = (comps.id[2 * v], comps.id[2 * v + 1]);
        if pos == neg {
            return Ok(SatResult::unsat());
        }
        values.push(Sign::from_bool(pos < neg));
    }
    let witness = Assignment::new(values);
    debug_assert!(formula.is_satisfied_by(&witness));
    Ok(SatResult::sat(witness))
}

/// A closed directed walk through both `x` and `¬x` for `variable`.
///
/// `walk[i] → walk[i+1]` and `walk[last] → walk[0]` are arcs. The walk may
/// revisit vertices: two literals in one strong component always lie on a
/// common closed walk but not necessarily on a common simple cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bicycle {
    pub variable: u32,
    #[serde(with = "literal_list")]
    pub walk: Vec<Literal>,
}

/// Some bicycle, if the digraph has one.
pub fn has_bicycle(g: &ImplicationDigraph) -> Option<Bicycle> {
    let comps = g.components();
    let v = (0..g.n).find(|&v| comps.id[2 * v] == comps.id[2 * v + 1])?;
    let (x, not_x) = (2 * v, 2 * v + 1);
    let mut walk = shortest_path_within(g, &comps, x, not_x);
    let back = shortest_path_within(g, &comps, not_x, x);
    walk.pop();
    walk.extend(&back[..back.len() - 1]);
    Some(Bicycle {
        variable: v as u32 + 1,
        walk: walk.into_iter().map(Literal::from_code).collect(),
    })
}

/// BFS path `from → … → to` inside one strong component, both ends included.
fn shortest_path_within(g: &ImplicationDigraph, comps: &Components, from: usize, to: usize) -> Vec<usize> {
    let comp = comps.id[from];
    let mut parent = vec![usize::MAX; g.vertex_count()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to && u != from {
            break;
        }
        for &w in g.successors(u) {
            let w = w as usize;
            if comps.id[w] == comp && parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Checks that `walk` is a closed walk in `g` through some `x` and `¬x`.
pub fn is_valid_bicycle(g: &ImplicationDigraph, walk: &[Literal]) -> bool {
    if walk.len() < 2 {
        return false;
    }
    let closed = (0..walk.len()).all(|i| g.has_arc(walk[i], walk[(i + 1) % walk.len()]));
    closed
        && walk
            .iter()
            .any(|&l| walk.contains(&l.negated()))
}

/// A directed path `head → interior[0] → … → interior[t-1] → tail` whose
/// interior literals are on distinct variables and whose end literals are on
/// interior variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pretzel {
    #[serde(with = "literal_one")]
    pub head: Literal,
    #[serde(with = "literal_list")]
    pub interior: Vec<Literal>,
    #[serde(with = "literal_one")]
    pub tail: Literal,
}

impl Pretzel {
    pub fn t(&self) -> usize {
        self.interior.len()
    }

    pub fn is_valid(&self, g: &ImplicationDigraph) -> bool {
        let t = self.interior.len();
        if t == 0 {
            return false;
        }
        let distinct = (0..t).all(|i| {
            self.interior[..i]
                .iter()
                .all(|l| l.var() != self.interior[i].var())
        });
        let on_interior = |l: Literal| self.interior.iter().any(|z| z.var() == l.var());
        let arcs = g.has_arc(self.head, self.interior[0])
            && self.interior.windows(2).all(|w| g.has_arc(w[0], w[1]))
            && g.has_arc(self.interior[t - 1], self.tail);
        distinct && on_interior(self.head) && on_interior(self.tail) && arcs
    }
}

/// Extracts a pretzel from a bicycle by growing a maximal run of literals on
/// distinct variables along the walk.
pub fn pretzel_from_bicycle(bicycle: &Bicycle) -> Pretzel {
    let w = &bicycle.walk;
    let len = w.len();
    let at = |i: isize| w[i.rem_euclid(len as isize) as usize];
    let mut vars = vec![w[0].var()];
    let (mut start, mut end) = (0isize, 0isize);
    while !vars.contains(&at(end + 1).var()) {
        end += 1;
        vars.push(at(end).var());
    }
    while !vars.contains(&at(start - 1).var()) {
        start -= 1;
        vars.push(at(start).var());
    }
    Pretzel {
        head: at(start - 1),
        interior: (start..=end).map(at).collect(),
        tail: at(end + 1),
    }
}

/// Depth-first search for a pretzel with at most `max_t` interior literals.
///
/// Starting vertices are tried in index order and paths are extended through
/// successors in adjacency order. With `max_t ≥ n` the search is exhaustive;
/// its worst case is exponential in `n`.
pub fn find_pretzel(g: &ImplicationDigraph, max_t: usize) -> Option<Pretzel> {
    let max_t = max_t.min(g.n);
    if max_t == 0 {
        return None;
    }
    let mut in_path = vec![false; g.n];
    let mut path: Vec<usize> = Vec::new();
    // (vertex, next successor slot)
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for start in 0..g.vertex_count() {
        if g.successors(start).is_empty() && g.predecessors(start).next().is_none() {
            continue;
        }
        path.push(start);
        in_path[start / 2] = true;
        stack.push((start, g.offsets[start]));
        while let Some(&mut (v, ref mut slot)) = stack.last_mut() {
            if *slot == g.offsets[v] {
                // first visit of this state: test the endpoint conditions
                let head = g.predecessors(path[0]).find(|&u| in_path[u / 2]);
                let tail = g.successors(v).iter().find(|&&u| in_path[u as usize / 2]);
                if let (Some(head), Some(&tail)) = (head, tail) {
                    return Some(Pretzel {
                        head: Literal::from_code(head),
                        interior: path.iter().map(|&c| Literal::from_code(c)).collect(),
                        tail: Literal::from_code(tail as usize),
                    });
                }
            }
            if path.len() < max_t && *slot < g.offsets[v + 1] {
                let w = g.targets[*slot] as usize;
                *slot += 1;
                if !in_path[w / 2] {
                    path.push(w);
                    in_path[w / 2] = true;
                    stack.push((w, g.offsets[w]));
                }
                continue;
            }
            stack.pop();
            let v = path.pop().expect("path mirrors stack");
            in_path[v / 2] = false;
        }
    }
    None
}

/// An even directed cycle `cycle[0] → … → cycle[2t-1] → cycle[0]` with
/// `cycle[0] = x`, `cycle[t] = ¬x`, and every other literal on its own variable.
///
/// Orientation matters: in a formula's digraph the conjugate (reversed and
/// negated) cycle is a different unicycle on the same clauses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unicycle {
    pub variable: u32,
    #[serde(with = "literal_list")]
    pub cycle: Vec<Literal>,
}

impl Unicycle {
    pub fn t(&self) -> usize {
        self.cycle.len() / 2
    }

    pub fn is_valid(&self, g: &ImplicationDigraph) -> bool {
        let c = &self.cycle;
        let len = c.len();
        if len < 2 || !len.is_multiple_of(2) {
            return false;
        }
        let t = len / 2;
        let x = c[0];
        if x.var() != self.variable || c[t] != x.negated() {
            return false;
        }
        let mut seen = vec![x.var()];
        for (i, l) in c.iter().enumerate() {
            if i == 0 || i == t {
                continue;
            }
            if seen.contains(&l.var()) {
                return false;
            }
            seen.push(l.var());
        }
        (0..len).all(|i| g.has_arc(c[i], c[(i + 1) % len]))
    }
}

/// Visits every unicycle whose half-length lies in `t_range`, anchored at the
/// pure literal of its repeated variable, so each directed cycle is visited
/// exactly once whatever its rotation. Cycles are vertex sequences: parallel
/// arcs from repeated clauses do not multiply them.
/// The visitor returns `false` to stop early.
pub fn for_each_unicycle(
    g: &ImplicationDigraph,
    t_range: std::ops::RangeInclusive<usize>,
    mut visit: impl FnMut(&Unicycle) -> bool,
) -> Result<()> {
    if g.n > MAX_UNICYCLE_VARS {
        return Err(Error::Unsupported(format!(
            "unicycle enumeration is exhaustive and limited to n ≤ {MAX_UNICYCLE_VARS}, got n = {}",
            g.n
        )));
    }
    let comps = g.components();
    let t_max = (*t_range.end()).min(g.n);
    let t_min = (*t_range.start()).max(1);
    if t_min > t_max {
        return Ok(());
    }
    for v in 0..g.n {
        let (x, not_x) = (2 * v, 2 * v + 1);
        if comps.id[x] != comps.id[not_x] {
            continue;
        }
        let to_not_x = distances_to(g, &comps, not_x);
        let to_x = distances_to(g, &comps, x);
        let mut search = UnicycleSearch {
            g,
            t_min,
            t_max,
            anchor_var: v,
            to_not_x: &to_not_x,
            to_x: &to_x,
            cycle: vec![x],
            used: 1u64 << v,
            stop: false,
        };
        search.first_half(x, &mut visit);
        if search.stop {
            break;
        }
    }
    Ok(())
}

struct UnicycleSearch<'a> {
    g: &'a ImplicationDigraph,
    t_min: usize,
    t_max: usize,
    anchor_var: usize,
    to_not_x: &'a [u32],
    to_x: &'a [u32],
    cycle: Vec<usize>,
    used: u64,
    stop: bool,
}

impl UnicycleSearch<'_> {
    fn first_half(&mut self, u: usize, visit: &mut impl FnMut(&Unicycle) -> bool) {
        let steps = self.cycle.len() - 1;
        let not_x = 2 * self.anchor_var + 1;
        let succ = self.g.successors(u);
        for (slot, &w) in succ.iter().enumerate() {
            if self.stop {
                return;
            }
            // parallel arcs (repeated clauses) trace the same cycle
            if succ[..slot].contains(&w) {
                continue;
            }
            let w = w as usize;
            let taken = steps + 1;
            if w == not_x {
                if taken >= self.t_min {
                    self.cycle.push(w);
                    self.second_half(w, taken, visit);
                    self.cycle.pop();
                }
                continue;
            }
            let bit = 1u64 << (w / 2);
            if self.used & bit != 0 || taken + self.to_not_x[w] as usize > self.t_max {
                continue;
            }
            self.used |= bit;
            self.cycle.push(w);
            self.first_half(w, visit);
            self.cycle.pop();
            self.used &= !bit;
        }
    }

    fn second_half(&mut self, u: usize, t: usize, visit: &mut impl FnMut(&Unicycle) -> bool) {
        let steps = self.cycle.len() - 1 - t;
        let x = 2 * self.anchor_var;
        let succ = self.g.successors(u);
        for (slot, &w) in succ.iter().enumerate() {
            if self.stop {
                return;
            }
            if succ[..slot].contains(&w) {
                continue;
            }
            let w = w as usize;
            let taken = steps + 1;
            if w == x {
                if taken == t {
                    let u = Unicycle {
                        variable: self.anchor_var as u32 + 1,
                        cycle: self.cycle.iter().map(|&c| Literal::from_code(c)).collect(),
                    };
                    if !visit(&u) {
                        self.stop = true;
                    }
                }
                continue;
            }
            let bit = 1u64 << (w / 2);
            if self.used & bit != 0 || taken + self.to_x[w] as usize > t {
                continue;
            }
            self.used |= bit;
            self.cycle.push(w);
            self.second_half(w, t, visit);
            self.cycle.pop();
            self.used &= !bit;
        }
    }
}

/// BFS distances to `target` along arcs inside its strong component.
fn distances_to(g: &ImplicationDigraph, comps: &Components, target: usize) -> Vec<u32> {
    let comp = comps.id[target];
    let mut dist = vec![u32::MAX / 2; g.vertex_count()];
    dist[target] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(u) = queue.pop_front() {
        for w in g.predecessors(u) {
            if comps.id[w] == comp && dist[w] > dist[u] + 1 {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Number of distinct unicycles on exactly `2t` vertices.
pub fn count_unicycles(g: &ImplicationDigraph, t: usize) -> Result<u64> {
    let mut count = 0u64;
    for_each_unicycle(g, t..=t, |_| {
        count += 1;
        true
    })?;
    Ok(count)
}

/// Some unicycle of any length, if one exists.
pub fn find_unicycle(g: &ImplicationDigraph) -> Result<Option<Unicycle>> {
    let mut found = None;
    for_each_unicycle(g, 1..=g.n, |u| {
        found = Some(u.clone());
        false
    })?;
    Ok(found)
}

mod literal_one {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::formula::{Literal, Sign};

    pub fn serialize<S: Serializer>(l: &Literal, s: S) -> Result<S::Ok, S::Error> {
        l.to_dimacs().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Literal, D::Error> {
        let v = i64::deserialize(d)?;
        let sign = if v > 0 { Sign::Pos } else { Sign::Neg };
        u32::try_from(v.unsigned_abs())
            .ok()
            .and_then(|var| Literal::new(var, sign).ok())
            .ok_or_else(|| serde::de::Error::custom(format!("invalid literal {v}")))
    }
}

mod literal_list {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::formula::Literal;

    pub fn serialize<S: Serializer>(ls: &[Literal], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(ls.iter().map(|l| l.to_dimacs()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Literal>, D::Error> {
        #[derive(serde::Deserialize)]
        struct One(#[serde(with = "super::literal_one")] Literal);
        Ok(Vec::<One>::deserialize(d)?.into_iter().map(|o| o.0).collect())
    }
}
