//! Deterministic fixtures and corpora: size-explosion families, exhaustive
//! enumeration of small graphs, and seeded random terms and sharings.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{
    canonical_form, AtomId, AtomTable, BuildOptions, GraphBuilder, LamGraph, NodeId, NodeKind,
};
use crate::surface::{compile_many, Expr};

/// Environment variable overriding generator seeds.
pub const SEED_ENV: &str = "SHAREQ_SEED";

/// `default`, unless `SHAREQ_SEED` holds an integer.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    SharedPower,
    UnsharedTree,
    RandomTerm,
    RandomDag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u64,
    pub seed: u64,
}

impl FamilySpec {
    /// A graph of the family and its designated root.
    ///
    /// `RandomTerm` compiles the term without sharing, `RandomDag` applies a
    /// random sharing to it.
    pub fn generate(&self) -> (LamGraph, NodeId) {
        match self.family {
            Family::SharedPower => gen_shared_power(self.n as usize),
            Family::UnsharedTree => gen_unshared_tree(self.n as u32),
            Family::RandomTerm => {
                let t = gen_random_term(self.n.max(1) as usize, self.seed);
                let (g, roots) = compile_many(&[&t]).expect("generated terms are closed under scope");
                (g, roots[0])
            }
            Family::RandomDag => {
                let t = gen_random_term(self.n.max(1) as usize, self.seed);
                let (g, roots) = gen_random_sharing_many(&[&t], self.seed.rotate_left(17) ^ 0x5eed);
                (g, roots[0])
            }
        }
    }
}

/// `s_0 = x`, `s_{k+1} = s_k s_k` with `s_k` shared: `n + 1` nodes, `2n`
/// edges, unfolding to `2^(n+1) - 1` constructors.
pub fn gen_shared_power(n: usize) -> (LamGraph, NodeId) {
    let mut b = GraphBuilder::new();
    let root = push_shared_power(&mut b, n);
    let g = b.build(BuildOptions::default()).expect("shared power is a λ-graph");
    (g, root)
}

/// Two copies of `s_n` sharing only the free variable, so `2n + 1` nodes.
pub fn gen_shared_power_pair(n: usize) -> (LamGraph, NodeId, NodeId) {
    let mut b = GraphBuilder::new();
    let r1 = push_shared_power(&mut b, n);
    let r2 = push_shared_power(&mut b, n);
    let g = b.build(BuildOptions::default()).expect("shared power is a λ-graph");
    (g, r1, r2)
}

fn push_shared_power(b: &mut GraphBuilder, n: usize) -> NodeId {
    let mut s = b.free_var("x");
    for _ in 0..n {
        s = b.app(s, s);
    }
    s
}

/// The complete binary application tree of depth `n` over one free variable:
/// the unfolding of [`gen_shared_power`] (leaves merged, as all occurrences
/// of a free name are). Exponential in `n`.
pub fn gen_unshared_tree(n: u32) -> (LamGraph, NodeId) {
    let mut b = GraphBuilder::new();
    let x = b.free_var("x");
    let mut level = vec![x; 1usize << n];
    while level.len() > 1 {
        level = level.chunks(2).map(|p| b.app(p[0], p[1])).collect();
    }
    let root = level[0];
    (b.build(BuildOptions::default()).expect("tree is a λ-graph"), root)
}

const ENUM_ATOMS: [&str; 2] = ["x", "y"];

/// Every λ-graph with at most `max_nodes` nodes and at most two free
/// variables (named `x` and `y`), once per isomorphism class, in a
/// deterministic order.
///
/// # Panics
/// If `max_nodes > 7`.
pub fn enumerate_graphs(max_nodes: usize) -> Vec<LamGraph> {
    assert!(max_nodes <= 7, "enumeration beyond 7 nodes is too large");
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for size in 1..=max_nodes {
        let mut e = Enumerator {
            size,
            kinds: Vec::with_capacity(size),
            atoms_used: [false; 2],
            seen: &mut seen,
            out: &mut out,
        };
        e.structure();
    }
    out
}

/// Nodes are chosen in child-first order (children have smaller ids), which
/// reaches every acyclic shape; binders of variables, which must be
/// ancestors, are then chosen among later abstractions.
struct Enumerator<'a> {
    size: usize,
    kinds: Vec<NodeKind>,
    atoms_used: [bool; 2],
    seen: &'a mut HashSet<Vec<u64>>,
    out: &'a mut Vec<LamGraph>,
}

impl Enumerator<'_> {
    fn structure(&mut self) {
        let i = self.kinds.len();
        if i == self.size {
            let vars: Vec<usize> = (0..i)
                .filter(|&v| matches!(self.kinds[v], NodeKind::BoundVar { .. }))
                .collect();
            self.binders(&vars, 0);
            return;
        }
        for a in 0..ENUM_ATOMS.len() {
            if !self.atoms_used[a] {
                self.atoms_used[a] = true;
                self.push(NodeKind::FreeVar { atom: AtomId(a as u32) });
                self.atoms_used[a] = false;
            }
        }
        // Placeholder binder, fixed in `binders`.
        self.push(NodeKind::BoundVar { binder: NodeId(0) });
        for body in 0..i {
            self.push(NodeKind::Abs { body: NodeId::from_index(body) });
        }
        for left in 0..i {
            for right in 0..i {
                self.push(NodeKind::App {
                    left: NodeId::from_index(left),
                    right: NodeId::from_index(right),
                });
            }
        }
    }

    fn push(&mut self, kind: NodeKind) {
        self.kinds.push(kind);
        self.structure();
        self.kinds.pop();
    }

    fn binders(&mut self, vars: &[usize], k: usize) {
        let Some(&v) = vars.get(k) else {
            self.emit();
            return;
        };
        for b in v + 1..self.size {
            if matches!(self.kinds[b], NodeKind::Abs { .. }) {
                self.kinds[v] = NodeKind::BoundVar { binder: NodeId::from_index(b) };
                self.binders(vars, k + 1);
            }
        }
    }

    fn emit(&mut self) {
        let Ok(g) = LamGraph::from_nodes(
            self.kinds.clone(),
            AtomTable::from_names(ENUM_ATOMS),
            BuildOptions::default(),
        ) else {
            return;
        };
        if self.seen.insert(canonical_form(&g)) {
            self.out.push(g);
        }
    }
}

const BINDER_NAMES: [&str; 3] = ["x", "y", "z"];
const FREE_NAMES: [&str; 3] = ["u", "v", "w"];

/// A random term with exactly `size` constructors (no `let`).
///
/// Binders are drawn from `x, y, z` (so shadowing occurs) and free names
/// from `u, v, w`. Where a binder is in scope, a variable is bound with
/// probability 1/2.
pub fn gen_random_term(size: usize, seed: u64) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_term(&mut rng, size.max(1), &mut Vec::new())
}

fn random_var(rng: &mut ChaCha8Rng, scope: &[&'static str]) -> Expr {
    if !scope.is_empty() && rng.gen_bool(0.5) {
        Expr::var(*scope.choose(rng).expect("non-empty scope"))
    } else {
        Expr::var(*FREE_NAMES.choose(rng).expect("non-empty pool"))
    }
}

fn random_term(rng: &mut ChaCha8Rng, size: usize, scope: &mut Vec<&'static str>) -> Expr {
    if size == 1 {
        return random_var(rng, scope);
    }
    if size == 2 || rng.gen_bool(0.4) {
        let param = *BINDER_NAMES.choose(rng).expect("non-empty pool");
        scope.push(param);
        let body = random_term(rng, size - 1, scope);
        scope.pop();
        return Expr::lam(param, body);
    }
    let left = rng.gen_range(1..=size - 2);
    let l = random_term(rng, left, scope);
    let r = random_term(rng, size - 1 - left, scope);
    Expr::app(l, r)
}

/// Renames every binder to a fresh `b0, b1, …`; the result denotes the same
/// term.
pub fn alpha_rename(e: &Expr) -> Expr {
    fn go(e: &Expr, env: &mut Vec<(String, String)>, next: &mut usize) -> Expr {
        match e {
            Expr::Var { name, .. } => match env.iter().rev().find(|(old, _)| old == name) {
                Some((_, new)) => Expr::var(new.clone()),
                None => Expr::var(name.clone()),
            },
            Expr::App { left, right, .. } => Expr::app(go(left, env, next), go(right, env, next)),
            Expr::Lam { param, body, .. } => {
                let fresh = format!("b{next}");
                *next += 1;
                env.push((param.clone(), fresh.clone()));
                let b = go(body, env, next);
                env.pop();
                Expr::lam(fresh, b)
            }
            Expr::Let {
                name, bound, body, ..
            } => Expr::let_in(name.clone(), go(bound, env, next), go(body, env, next)),
        }
    }
    go(e, &mut Vec::new(), &mut 0)
}

/// Replaces one randomly chosen variable occurrence of a `let`-free term by a
/// random variable. The result is often, but not always, a different term.
pub fn mutate_variable(e: &Expr, seed: u64) -> Expr {
    fn count(e: &Expr) -> usize {
        match e {
            Expr::Var { .. } => 1,
            Expr::App { left, right, .. } => count(left) + count(right),
            Expr::Lam { body, .. } => count(body),
            Expr::Let { bound, body, .. } => count(bound) + count(body),
        }
    }
    fn go(
        e: &Expr,
        target: &mut usize,
        scope: &mut Vec<&'static str>,
        rng: &mut ChaCha8Rng,
    ) -> Expr {
        match e {
            Expr::Var { .. } => {
                let hit = *target == 0;
                *target = target.wrapping_sub(1);
                if hit {
                    random_var(rng, scope)
                } else {
                    e.clone()
                }
            }
            Expr::App { left, right, .. } => {
                let l = go(left, target, scope, rng);
                let r = go(right, target, scope, rng);
                Expr::app(l, r)
            }
            Expr::Lam { param, body, .. } => {
                let known = BINDER_NAMES.iter().find(|b| **b == param.as_str());
                if let Some(b) = known {
                    scope.push(b);
                }
                let body = go(body, target, scope, rng);
                if known.is_some() {
                    scope.pop();
                }
                Expr::lam(param.clone(), body)
            }
            Expr::Let {
                name, bound, body, ..
            } => Expr::let_in(
                name.clone(),
                go(bound, target, scope, rng),
                go(body, target, scope, rng),
            ),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut target = rng.gen_range(0..count(e));
    go(e, &mut target, &mut Vec::new(), &mut rng)
}

/// Compiles `ast` and then collapses randomly chosen occurrences of identical
/// subterms into shared nodes. The readback is unchanged.
pub fn gen_random_sharing(ast: &Expr, seed: u64) -> LamGraph {
    gen_random_sharing_many(&[ast], seed).0
}

/// Like [`gen_random_sharing`] for several terms in one graph; sharing may
/// cross between terms, but roots are never merged into anything.
///
/// Two subgraphs are merged only when their unfoldings coincide, with
/// variables bound outside the subgraph identified by their binder node.
/// Merging such subgraphs keeps every binder on every path to its variables,
/// so the result stays dominated.
pub fn gen_random_sharing_many(asts: &[&Expr], seed: u64) -> (LamGraph, Vec<NodeId>) {
    let (g, roots) = compile_many(asts).expect("terms compile");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut groups: HashMap<Vec<KeyToken>, Vec<NodeId>> = HashMap::new();
    for v in g.node_ids() {
        if matches!(g.kind(v), NodeKind::App { .. } | NodeKind::Abs { .. }) && !g.is_root(v) {
            groups.entry(subterm_key(&g, v)).or_default().push(v);
        }
    }
    let mut groups: Vec<Vec<NodeId>> = groups.into_values().filter(|m| m.len() > 1).collect();
    groups.sort();

    let mut forward: Vec<NodeId> = g.node_ids().collect();
    for members in groups {
        let target = *members.choose(&mut rng).expect("non-empty group");
        for m in members {
            if m != target && rng.gen_bool(0.5) {
                forward[m.index()] = target;
            }
        }
    }

    let mut b = GraphBuilder::new();
    *b.atoms_mut() = g.atoms().clone();
    let f = |n: NodeId| forward[n.index()];
    for v in g.node_ids() {
        b.push(match g.kind(v) {
            NodeKind::App { left, right } => NodeKind::App {
                left: f(left),
                right: f(right),
            },
            NodeKind::Abs { body } => NodeKind::Abs { body: f(body) },
            other => other,
        });
    }
    b.build_reachable(&roots, BuildOptions::default())
        .expect("merging equal subterms keeps the graph valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum KeyToken {
    App,
    Lam,
    Bound(u32),
    Escaped(NodeId),
    Free(AtomId),
}

/// Locally nameless unfolding of `v`, with variables bound above `v` named
/// by their binder.
fn subterm_key(g: &LamGraph, v: NodeId) -> Vec<KeyToken> {
    fn go(g: &LamGraph, v: NodeId, binders: &mut Vec<NodeId>, out: &mut Vec<KeyToken>) {
        match g.kind(v) {
            NodeKind::App { left, right } => {
                out.push(KeyToken::App);
                go(g, left, binders, out);
                go(g, right, binders, out);
            }
            NodeKind::Abs { body } => {
                out.push(KeyToken::Lam);
                binders.push(v);
                go(g, body, binders, out);
                binders.pop();
            }
            NodeKind::BoundVar { binder } => {
                out.push(match binders.iter().rev().position(|&b| b == binder) {
                    Some(i) => KeyToken::Bound(i as u32),
                    None => KeyToken::Escaped(binder),
                });
            }
            NodeKind::FreeVar { atom } => out.push(KeyToken::Free(atom)),
        }
    }
    let mut out = Vec::new();
    go(g, v, &mut Vec::new(), &mut out);
    out
}

/// A graph holding two random terms of size at most `max_size` and their
/// roots. A third of the pairs are α-variants (equal terms), a third differ
/// in one variable, and a third are independent; each is randomly shared.
pub fn gen_random_pair(max_size: usize, seed: u64) -> (LamGraph, NodeId, NodeId) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let size = rng.gen_range(1..=max_size.max(1));
        let t1 = gen_random_term(size, rng.gen());
        let t2 = match rng.gen_range(0..3) {
            0 => alpha_rename(&t1),
            1 => mutate_variable(&t1, rng.gen()),
            _ => gen_random_term(size, rng.gen()),
        };
        let (g, roots) = gen_random_sharing_many(&[&t1, &t2], rng.gen());
        // A lone free variable may occur inside the other term.
        if roots.iter().all(|&r| g.is_root(r)) {
            return (g, roots[0], roots[1]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::isomorphic;
    use crate::surface::to_locally_nameless;
    use crate::term::{readback, term_eq, ReadbackError};

    #[test]
    fn shared_power_shape() {
        for n in [0, 1, 2, 10] {
            let (g, root) = gen_shared_power(n);
            assert_eq!(g.node_count(), n + 1);
            assert_eq!(g.edge_count(), 2 * n);
            assert_eq!(g.roots(), &[root]);
        }
        let (g, root) = gen_shared_power(2);
        let t = readback(&g, root, 100).unwrap();
        assert_eq!(t.size(), 7);
        assert_eq!(t.display(g.atoms()).to_string(), "x x (x x)");
        let (g, _) = gen_shared_power(20);
        assert!(matches!(
            readback(&g, NodeId(20), 100_000),
            Err(ReadbackError::LimitExceeded { .. })
        ));
    }

    #[test]
    fn shared_power_pair_shares_only_the_variable() {
        let (g, a, b) = gen_shared_power_pair(5);
        assert_eq!(g.node_count(), 11);
        assert_eq!(g.roots(), &[a, b]);
    }

    #[test]
    fn unshared_tree_unfolds_like_the_power() {
        let (t, tr) = gen_unshared_tree(4);
        let (p, pr) = gen_shared_power(4);
        assert_eq!(t.node_count(), 16);
        assert!(term_eq(&readback(&t, tr, 100).unwrap(), &readback(&p, pr, 100).unwrap()));
    }

    #[test]
    fn enumeration_small_sizes() {
        let one = enumerate_graphs(1);
        assert_eq!(one.len(), 2);
        assert!(one
            .iter()
            .all(|g| matches!(g.kind(NodeId(0)), NodeKind::FreeVar { .. })));

        let two = enumerate_graphs(2);
        let abs_x = LamGraph::from_nodes(
            vec![
                NodeKind::FreeVar { atom: AtomId(0) },
                NodeKind::Abs { body: NodeId(0) },
            ],
            AtomTable::from_names(ENUM_ATOMS),
            BuildOptions::default(),
        )
        .unwrap();
        let identity = LamGraph::from_nodes(
            vec![
                NodeKind::BoundVar { binder: NodeId(1) },
                NodeKind::Abs { body: NodeId(0) },
            ],
            AtomTable::from_names(ENUM_ATOMS),
            BuildOptions::default(),
        )
        .unwrap();
        assert!(two.iter().any(|g| isomorphic(g, &abs_x)));
        assert!(two.iter().any(|g| isomorphic(g, &identity)));
        // x, y; x y as two roots; λx, λy, λ.0, x x, y y.
        assert_eq!(two.len(), 8);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_valid() {
        let graphs = enumerate_graphs(4);
        let mut forms = HashSet::new();
        for g in &graphs {
            g.validate_acyclic().unwrap();
            g.validate_dominated().unwrap();
            assert!(forms.insert(canonical_form(g)));
        }
    }

    #[test]
    fn random_terms_are_deterministic() {
        assert_eq!(gen_random_term(1, 3).size(), 1);
        assert!(matches!(gen_random_term(1, 3), Expr::Var { .. }));
        for size in [1, 2, 5, 12, 40] {
            for seed in 0..20 {
                let t = gen_random_term(size, seed);
                assert_eq!(t.size(), size);
                assert_eq!(t, gen_random_term(size, seed));
            }
        }
    }

    #[test]
    fn random_sharing_preserves_readback() {
        let mut shared_somewhere = false;
        for seed in 0..1000 {
            let t = gen_random_term(12, seed);
            let g = gen_random_sharing(&t, seed ^ 0xabc);
            let mut atoms = g.atoms().clone();
            let direct = to_locally_nameless(&t, &mut atoms);
            assert_eq!(atoms.len(), g.atoms().len());
            let root = g.roots()[0];
            assert!(term_eq(&readback(&g, root, 1000).unwrap(), &direct), "seed {seed}");
            let (tree, _) = compile_many(&[&t]).unwrap();
            shared_somewhere |= g.node_count() < tree.node_count();
            assert_eq!(g, gen_random_sharing(&t, seed ^ 0xabc));
        }
        assert!(shared_somewhere);
    }

    #[test]
    fn random_pairs_have_root_endpoints() {
        for seed in 0..200 {
            let (g, a, b) = gen_random_pair(12, seed);
            assert!(g.is_root(a) && g.is_root(b));
        }
    }

    #[test]
    fn alpha_variants_denote_the_same_term() {
        for seed in 0..100 {
            let t = gen_random_term(10, seed);
            let mut atoms = AtomTable::new();
            let a = to_locally_nameless(&t, &mut atoms);
            let b = to_locally_nameless(&alpha_rename(&t), &mut atoms);
            assert!(term_eq(&a, &b));
        }
    }

    #[test]
    fn families_generate() {
        for family in [Family::SharedPower, Family::UnsharedTree, Family::RandomTerm, Family::RandomDag] {
            let spec = FamilySpec { family, n: 5, seed: 9 };
            let (g, root) = spec.generate();
            assert!(g.is_root(root));
            assert_eq!(spec.generate().0, g);
        }
    }
}
