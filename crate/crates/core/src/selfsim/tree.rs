//! Automorphisms of the rooted `m`-ary tree given by wreath recursion
//! `α = (α_0, …, α_{m-1})σ`, acting on the right: `(x w)^α = x^σ w^{α_x}`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Display, Write as _};
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

/// A lazily expandable family of tree automorphisms indexed by states.
pub trait TreeAction {
    type State: Clone + Eq + Hash;

    fn alphabet(&self) -> usize;

    /// Root permutation (`perm[x] = x^σ`) and the first-level states.
    fn expand(&self, s: &Self::State) -> Result<(Vec<u32>, Vec<Self::State>)>;

    /// The root permutation alone.
    fn permutation(&self, s: &Self::State) -> Result<Vec<u32>> {
        Ok(self.expand(s)?.0)
    }

    /// A cheap sufficient test for the trivial automorphism.
    fn is_trivial_state(&self, _s: &Self::State) -> bool {
        false
    }
}

fn is_identity_perm(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PNode {
    pub perm: Vec<u32>,
    /// Node ids of the states; empty on the last level.
    pub children: Vec<u32>,
}

/// A depth-truncated automorphism stored as a DAG of distinct subtrees.
///
/// Nodes are numbered in depth-first preorder from the root (node 0), so
/// equal portraits have equal node lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Portrait {
    depth: usize,
    alphabet: usize,
    nodes: Vec<PNode>,
}

#[derive(Default)]
struct Interner {
    ids: HashMap<PNode, u32>,
    nodes: Vec<PNode>,
}

impl Interner {
    fn intern(&mut self, n: PNode) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        self.ids.insert(n, id);
        id
    }

    fn identity_chain(&mut self, alphabet: usize, height: usize) -> u32 {
        let perm: Vec<u32> = (0..alphabet as u32).collect();
        let mut id = self.intern(PNode { perm: perm.clone(), children: Vec::new() });
        for _ in 1..height {
            id = self.intern(PNode { perm: perm.clone(), children: vec![id; alphabet] });
        }
        id
    }

    fn finish(self, root: Option<u32>, depth: usize, alphabet: usize) -> Portrait {
        let mut order: HashMap<u32, u32> = HashMap::new();
        let mut nodes = Vec::new();
        if let Some(r) = root {
            let mut stack = vec![r];
            let mut seen = Vec::new();
            while let Some(id) = stack.pop() {
                if order.contains_key(&id) {
                    continue;
                }
                order.insert(id, seen.len() as u32);
                seen.push(id);
                for &c in self.nodes[id as usize].children.iter().rev() {
                    if !order.contains_key(&c) {
                        stack.push(c);
                    }
                }
            }
            for id in seen {
                let n = &self.nodes[id as usize];
                nodes.push(PNode { perm: n.perm.clone(), children: n.children.iter().map(|c| order[c]).collect() });
            }
        }
        Portrait { depth, alphabet, nodes }
    }
}

impl Portrait {
    /// Portrait of `state` truncated to `depth` levels.
    pub fn of<A: TreeAction>(action: &A, state: &A::State, depth: usize) -> Result<Portrait> {
        let mut int = Interner::default();
        let mut memo: HashMap<(A::State, usize), u32> = HashMap::new();
        let root = if depth == 0 { None } else { Some(build(action, state, depth, &mut int, &mut memo)?) };
        Ok(int.finish(root, depth, action.alphabet()))
    }

    pub fn identity(alphabet: usize, depth: usize) -> Portrait {
        let mut int = Interner::default();
        let root = (depth > 0).then(|| int.identity_chain(alphabet, depth));
        int.finish(root, depth, alphabet)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn nodes(&self) -> &[PNode] {
        &self.nodes
    }

    pub fn root_permutation(&self) -> Option<&[u32]> {
        self.nodes.first().map(|n| n.perm.as_slice())
    }

    pub fn is_identity(&self) -> bool {
        self.nodes.iter().all(|n| is_identity_perm(&n.perm))
    }

    /// Least level (1-based) with a nontrivial permutation.
    pub fn first_nontrivial_level(&self) -> Option<usize> {
        let mut level = vec![0u32];
        for l in 1..=self.depth {
            if level.iter().any(|&i| !is_identity_perm(&self.nodes[i as usize].perm)) {
                return Some(l);
            }
            let next: BTreeSet<u32> =
                level.iter().flat_map(|&i| self.nodes[i as usize].children.iter().copied()).collect();
            level = next.into_iter().collect();
        }
        None
    }

    fn check_compatible(&self, other: &Portrait) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(self.alphabet, other.alphabet));
        }
        if self.depth != other.depth {
            return Err(Error::Precondition(format!("portrait depths {} and {} differ", self.depth, other.depth)));
        }
        Ok(())
    }

    /// `self` then `other` (right action).
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        self.check_compatible(other)?;
        let mut int = Interner::default();
        let mut memo = HashMap::new();
        let root = (self.depth > 0).then(|| compose_rec(self, other, 0, 0, &mut int, &mut memo));
        Ok(int.finish(root, self.depth, self.alphabet))
    }

    pub fn inverse(&self) -> Portrait {
        let mut int = Interner::default();
        let mut memo = HashMap::new();
        let root = (self.depth > 0).then(|| inverse_rec(self, 0, &mut int, &mut memo));
        int.finish(root, self.depth, self.alphabet)
    }

    /// Image of a word of length at most the depth.
    pub fn act_on_word(&self, word: &[u32]) -> Result<Vec<u32>> {
        if word.len() > self.depth {
            return Err(Error::Precondition(format!("word length {} exceeds portrait depth {}", word.len(), self.depth)));
        }
        let mut node = 0usize;
        let mut out = Vec::with_capacity(word.len());
        for &x in word {
            if x as usize >= self.alphabet {
                return Err(Error::Precondition(format!("letter {x} outside alphabet of size {}", self.alphabet)));
            }
            let n = &self.nodes[node];
            out.push(n.perm[x as usize]);
            if let Some(&c) = n.children.get(x as usize) {
                node = c as usize;
            }
        }
        Ok(out)
    }

    /// One line per node: id, permutation and children.
    pub fn to_text(&self) -> String {
        let mut s = format!("portrait depth={} alphabet={} nodes={}\n", self.depth, self.alphabet, self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = write!(s, "{i}: perm={}", fmt_perm(&n.perm));
            if !n.children.is_empty() {
                let c: Vec<String> = n.children.iter().map(|c| c.to_string()).collect();
                let _ = write!(s, " states=[{}]", c.join(","));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph portrait {\n  node [shape=box];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", fmt_perm(&n.perm));
            for (x, c) in n.children.iter().enumerate() {
                let _ = writeln!(s, "  n{i} -> n{c} [label=\"{x}\"];");
            }
        }
        s.push_str("}\n");
        s
    }
}

fn fmt_perm(p: &[u32]) -> String {
    if is_identity_perm(p) {
        return "id".to_string();
    }
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

fn build<A: TreeAction>(
    action: &A,
    state: &A::State,
    height: usize,
    int: &mut Interner,
    memo: &mut HashMap<(A::State, usize), u32>,
) -> Result<u32> {
    if action.is_trivial_state(state) {
        return Ok(int.identity_chain(action.alphabet(), height));
    }
    if let Some(&id) = memo.get(&(state.clone(), height)) {
        return Ok(id);
    }
    let (perm, children) = if height > 1 {
        let (perm, states) = action.expand(state)?;
        (perm, states.iter().map(|s| build(action, s, height - 1, int, memo)).collect::<Result<Vec<_>>>()?)
    } else {
        (action.permutation(state)?, Vec::new())
    };
    let id = int.intern(PNode { perm, children });
    memo.insert((state.clone(), height), id);
    Ok(id)
}

fn compose_rec(a: &Portrait, b: &Portrait, x: u32, y: u32, int: &mut Interner, memo: &mut HashMap<(u32, u32), u32>) -> u32 {
    if let Some(&id) = memo.get(&(x, y)) {
        return id;
    }
    let (na, nb) = (&a.nodes[x as usize], &b.nodes[y as usize]);
    let perm: Vec<u32> = na.perm.iter().map(|&p| nb.perm[p as usize]).collect();
    let children = (0..na.children.len())
        .map(|i| compose_rec(a, b, na.children[i], nb.children[na.perm[i] as usize], int, memo))
        .collect();
    let id = int.intern(PNode { perm, children });
    memo.insert((x, y), id);
    id
}

fn inverse_rec(a: &Portrait, x: u32, int: &mut Interner, memo: &mut HashMap<u32, u32>) -> u32 {
    if let Some(&id) = memo.get(&x) {
        return id;
    }
    let n = &a.nodes[x as usize];
    let mut inv = vec![0u32; n.perm.len()];
    for (i, &p) in n.perm.iter().enumerate() {
        inv[p as usize] = i as u32;
    }
    let children = if n.children.is_empty() {
        Vec::new()
    } else {
        (0..n.perm.len()).map(|i| inverse_rec(a, n.children[inv[i] as usize], int, memo)).collect()
    };
    let id = int.intern(PNode { perm: inv, children });
    memo.insert(x, id);
    id
}

/// Image of `word` under the automorphism of `state`, expanding lazily.
pub fn act_on_word<A: TreeAction>(action: &A, state: &A::State, word: &[u32]) -> Result<Vec<u32>> {
    let m = action.alphabet();
    let mut s = state.clone();
    let mut out = Vec::with_capacity(word.len());
    for &x in word {
        if x as usize >= m {
            return Err(Error::Precondition(format!("letter {x} outside alphabet of size {m}")));
        }
        if action.is_trivial_state(&s) {
            out.push(x);
            continue;
        }
        let (perm, states) = action.expand(&s)?;
        out.push(perm[x as usize]);
        s = states[x as usize].clone();
    }
    Ok(out)
}

/// Distinct states reachable from `state` within `depth` levels, as depth-`depth` portraits.
pub fn states<A: TreeAction>(action: &A, state: &A::State, depth: usize) -> Result<BTreeSet<Portrait>> {
    let reached = reachable(action, state, depth)?;
    reached.order.iter().map(|s| Portrait::of(action, s, depth)).collect()
}

struct Reached<S> {
    order: Vec<S>,
    ids: HashMap<S, usize>,
    expanded: Vec<Option<(Vec<u32>, Vec<usize>)>>,
    complete: bool,
}

fn reachable<A: TreeAction>(action: &A, state: &A::State, depth: usize) -> Result<Reached<A::State>> {
    let mut r = Reached { order: vec![state.clone()], ids: HashMap::new(), expanded: vec![None], complete: true };
    r.ids.insert(state.clone(), 0);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((id, level)) = queue.pop_front() {
        if level >= depth {
            r.complete = false;
            continue;
        }
        let (perm, next) = action.expand(&r.order[id].clone())?;
        let mut next_ids = Vec::with_capacity(next.len());
        for s in next {
            let nid = match r.ids.get(&s) {
                Some(&n) => n,
                None => {
                    let n = r.order.len();
                    r.ids.insert(s.clone(), n);
                    r.order.push(s);
                    r.expanded.push(None);
                    queue.push_back((n, level + 1));
                    n
                }
            };
            next_ids.push(nid);
        }
        r.expanded[id] = Some((perm, next_ids));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomatonState {
    /// Empty for states past the depth bound.
    pub perm: Vec<u32>,
    pub next: Vec<usize>,
    pub element: String,
}

/// The states reachable within a depth bound; `complete` when the bound
/// was not hit, in which case this is a finite automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Automaton {
    pub alphabet: usize,
    pub states: Vec<AutomatonState>,
    pub initial: usize,
    pub complete: bool,
}

impl Automaton {
    pub fn explore<A: TreeAction>(action: &A, state: &A::State, depth: usize) -> Result<Automaton>
    where
        A::State: Display,
    {
        let r = reachable(action, state, depth)?;
        let states = r
            .order
            .iter()
            .zip(r.expanded)
            .map(|(s, e)| {
                let (perm, next) = e.unwrap_or_default();
                AutomatonState { perm, next, element: s.to_string() }
            })
            .collect();
        Ok(Automaton { alphabet: action.alphabet(), states, initial: 0, complete: r.complete })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph automaton {\n");
        for (i, st) in self.states.iter().enumerate() {
            let shape = if i == self.initial { "doublecircle" } else { "circle" };
            let perm = if st.perm.is_empty() { "?".to_string() } else { fmt_perm(&st.perm) };
            let _ = writeln!(s, "  s{i} [shape={shape}, label=\"{}\\n{perm}\"];", st.element);
            for (x, n) in st.next.iter().enumerate() {
                let _ = writeln!(s, "  s{i} -> s{n} [label=\"{x}|{}\"];", st.perm[x]);
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("automaton alphabet={} states={} complete={}\n", self.alphabet, self.states.len(), self.complete);
        for (i, st) in self.states.iter().enumerate() {
            if st.perm.is_empty() {
                let _ = writeln!(s, "{i}: {} unexpanded", st.element);
                continue;
            }
            let next: Vec<String> = st.next.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(s, "{i}: {} perm={} next=[{}]", st.element, fmt_perm(&st.perm), next.join(","));
        }
        s
    }
}

impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binary adding machine over integer states: `n = 2q + r`.
    struct Odometer;

    impl TreeAction for Odometer {
        type State = i64;
        fn alphabet(&self) -> usize {
            2
        }
        fn expand(&self, s: &i64) -> Result<(Vec<u32>, Vec<i64>)> {
            let odd = s.rem_euclid(2) == 1;
            let perm = if odd { vec![1, 0] } else { vec![0, 1] };
            let half = s.div_euclid(2);
            let states = if odd { vec![half, half + 1] } else { vec![half, half] };
            Ok((perm, states))
        }
        fn is_trivial_state(&self, s: &i64) -> bool {
            *s == 0
        }
    }

    #[test]
    fn increments_little_endian() {
        for n in 0..8u32 {
            let w: Vec<u32> = (0..3).map(|i| (n >> i) & 1).collect();
            let out = act_on_word(&Odometer, &1, &w).unwrap();
            let m: u32 = out.iter().enumerate().map(|(i, &b)| b << i).sum();
            assert_eq!(m, (n + 1) % 8);
        }
    }

    #[test]
    fn portrait_is_homomorphic() {
        for a in -5i64..5 {
            for b in -5i64..5 {
                let pa = Portrait::of(&Odometer, &a, 4).unwrap();
                let pb = Portrait::of(&Odometer, &b, 4).unwrap();
                assert_eq!(pa.compose(&pb).unwrap(), Portrait::of(&Odometer, &(a + b), 4).unwrap());
                assert!(pa.compose(&pa.inverse()).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn two_states() {
        assert_eq!(states(&Odometer, &1, 5).unwrap().len(), 2);
        let a = Automaton::explore(&Odometer, &1, 5).unwrap();
        assert!(a.complete);
        assert_eq!(a.states.len(), 2);
    }

    #[test]
    fn depth_of_powers_of_two() {
        for k in 0..5 {
            let p = Portrait::of(&Odometer, &(1 << k), 6).unwrap();
            assert_eq!(p.first_nontrivial_level(), Some(k + 1));
        }
    }

    #[test]
    fn portrait_words_match_lazy_action() {
        let p = Portrait::of(&Odometer, &3, 3).unwrap();
        assert_eq!(p.act_on_word(&[1, 1, 0]).unwrap(), act_on_word(&Odometer, &3, &[1, 1, 0]).unwrap());
        assert!(Portrait::identity(2, 3).act_on_word(&[1, 0, 1]).unwrap() == vec![1, 0, 1]);
    }
}
