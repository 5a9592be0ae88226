//! The Grothendieck-class recursion for melonic constructions.
//!
//! The class of the bare edge is `T+1`; a depth-1 construction is a string
//! of bananas whose class is the product of the banana classes. For deeper
//! constructions, take a terminal stage `t` with tuple `(a_1..a_r)`:
//!
//! - singleton tuple `(a)`: drop the stage and raise the label of its parent
//!   entry by `a-1` (an equivalent construction, same class);
//! - all-ones tuple of length `r`: the stage only splits an edge, so the
//!   class is `(T+1)^(r-1)` times the class without the stage;
//! - otherwise, with `a` the first maximal entry (`a >= 2`):
//!   `U = f_a U(T') + g_a U(T'') + (prod_{i != m} B_{a_i}) h_a U(T''')`
//!   where `T'` replaces the entry by 1, `T''` deletes it, and `T'''` drops
//!   the stage and decrements its parent entry's label. `T'''` may come out
//!   non-reduced; it is reduced eagerly so memo keys are always canonical
//!   reduced trees.
//!
//! Results are memoized per canonical tree key; the memo is a concurrent
//! map, safe to share across enumeration workers (all writers compute
//! identical values, so overwrites are benign).

use std::fmt;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::construction::{ConstructionError, MelonTree, MelonicConstruction, WhiteNode};
use crate::polyring::{Basis, IntPoly};

/// Class of the complement of a graph hypersurface in its ambient affine
/// space: a monic polynomial in `T` of degree equal to the edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrothendieckClass {
    pub poly: IntPoly,
    pub edges: usize,
}

impl GrothendieckClass {
    pub fn new(poly: IntPoly, edges: usize) -> Self {
        debug_assert_eq!(poly.basis(), Basis::T);
        GrothendieckClass { poly, edges }
    }

    /// Degree equals the edge count and the leading coefficient is 1.
    pub fn invariants_hold(&self) -> bool {
        self.poly.degree() == Some(self.edges) && self.poly.leading_coeff().is_one()
    }
}

impl fmt::Display for GrothendieckClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly.render_expanded())
    }
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    basis: String,
    coeffs: Vec<String>,
    edges: usize,
}

impl Serialize for GrothendieckClass {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        ClassJson {
            basis: self.poly.basis().letter().to_string(),
            coeffs: self.poly.coeffs().iter().map(|c| c.to_string()).collect(),
            edges: self.edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GrothendieckClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ClassJson::deserialize(deserializer)?;
        let poly_json = serde_json::json!({"basis": raw.basis, "coeffs": raw.coeffs});
        let poly: IntPoly =
            serde_json::from_value(poly_json).map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(GrothendieckClass {
            poly,
            edges: raw.edges,
        })
    }
}

fn tvar() -> IntPoly {
    IntPoly::variable(Basis::T)
}

fn tp1() -> IntPoly {
    IntPoly::linear(Basis::T, 1)
}

/// `binom(n, k)` with the usual convention that it vanishes for `k < 0` or
/// `k > n`.
pub(crate) fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n || n < 0 {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `(T^m - (-1)^m) / (T+1)`, `m T^(m-1) - f_m` and `(T^m + (-1)^m T) / (T+1)`.
///
/// These drive the parallel-edge step of the recursion. The divisions are
/// exact for every integer `m >= 1`; a failure would be a bug, hence the
/// expect.
pub fn fgh(m: u32) -> (IntPoly, IntPoly, IntPoly) {
    assert!(m >= 1);
    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
    let tm = IntPoly::monomial(Basis::T, 1, m as usize);
    let f = tm
        .sub(&IntPoly::constant(Basis::T, sign))
        .unwrap()
        .exact_div(&tp1())
        .expect("T^m - (-1)^m is divisible by T+1");
    let g = &IntPoly::monomial(Basis::T, m as i64, m as usize - 1) - &f;
    let h = tm
        .add(&IntPoly::monomial(Basis::T, sign, 1))
        .unwrap()
        .exact_div(&tp1())
        .expect("T^m + (-1)^m T is divisible by T+1");
    (f, g, h)
}

/// Class of the `m`-banana: `B_m = m T^(m-1) + T f_m`.
pub fn banana_class(m: u32) -> GrothendieckClass {
    let (f, _, _) = fgh(m);
    let poly = &IntPoly::monomial(Basis::T, m as i64, m as usize - 1) + &(&tvar() * &f);
    GrothendieckClass::new(poly, m as usize)
}

/// The double-binomial expansion of `f_m` in the `S` variable:
/// `sum_{j=1}^{m-1} sum_{i=1}^{floor(m/2)} C(m-2i, j-1) S^j`, plus 1 when `m`
/// is odd. All terms are binomials, so nonnegativity is visible term by
/// term; the result must agree with `change_basis(f_m, S)`.
pub fn claim_pos_expansion(m: u32) -> IntPoly {
    let mut coeffs = vec![BigInt::zero(); m as usize];
    if !m.is_multiple_of(2) {
        coeffs[0] = BigInt::one();
    }
    for j in 1..m as i64 {
        for i in 1..=(m / 2) as i64 {
            coeffs[j as usize] += binomial(m as i64 - 2 * i, j - 1);
        }
    }
    IntPoly::new(Basis::S, coeffs)
}

/// Multiplicativity: the class of graphs joined at one vertex (or disjoint)
/// is the product of the classes.
pub fn join_at_vertex(classes: &[GrothendieckClass]) -> GrothendieckClass {
    assert!(!classes.is_empty());
    let mut poly = IntPoly::one(Basis::T);
    let mut edges = 0;
    for c in classes {
        poly = &poly * &c.poly;
        edges += c.edges;
    }
    GrothendieckClass::new(poly, edges)
}

/// Splitting edges `k` times multiplies the class by `(T+1)^k`.
pub fn subdivide(u: &GrothendieckClass, k: u32) -> GrothendieckClass {
    GrothendieckClass::new(&u.poly * &tp1().pow(k), u.edges + k as usize)
}

/// Memoizing evaluator for the class recursion.
pub struct ClassEngine {
    memo: DashMap<Vec<u8>, IntPoly>,
    memo_enabled: bool,
    memo_edge_cap: usize,
}

impl Default for ClassEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassEngine {
    pub fn new() -> Self {
        ClassEngine {
            memo: DashMap::new(),
            memo_enabled: true,
            memo_edge_cap: usize::MAX,
        }
    }

    /// An engine that recomputes everything; only sensible for small inputs
    /// (used to cross-check memo soundness).
    pub fn without_memo() -> Self {
        ClassEngine {
            memo: DashMap::new(),
            memo_enabled: false,
            memo_edge_cap: usize::MAX,
        }
    }

    /// Memoize only subproblems with at most `cap` edges. Large enumeration
    /// sweeps use this to keep the table bounded: one-off top-level trees
    /// are never looked up again, while the small shared subproblems that
    /// carry all the reuse stay cached.
    pub fn with_memo_edge_cap(cap: usize) -> Self {
        ClassEngine {
            memo: DashMap::new(),
            memo_enabled: true,
            memo_edge_cap: cap,
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn class_of(
        &self,
        c: &MelonicConstruction,
    ) -> Result<GrothendieckClass, ConstructionError> {
        Ok(self.class_of_tree(&c.to_tree()?))
    }

    pub fn class_of_tree(&self, tree: &MelonTree) -> GrothendieckClass {
        let edges = tree.edge_count();
        let mut work = tree.clone();
        let poly = self.class_rec(&mut work);
        let class = GrothendieckClass::new(poly, edges);
        debug_assert!(class.invariants_hold());
        class
    }

    fn class_rec(&self, tree: &mut MelonTree) -> IntPoly {
        tree.reduce();
        let memoizable = self.memo_enabled && tree.edge_count() <= self.memo_edge_cap;
        let key = if memoizable {
            let key = tree.canonical_key();
            if let Some(hit) = self.memo.get(&key) {
                return hit.clone();
            }
            Some(key)
        } else {
            None
        };
        let result = self.class_rec_reduced(tree);
        if let Some(key) = key {
            self.memo.insert(key, result.clone());
        }
        result
    }

    fn class_rec_reduced(&self, tree: &mut MelonTree) -> IntPoly {
        let root = match &mut tree.root {
            None => return tp1(),
            Some(root) => root,
        };
        let path = match find_terminal_path(root) {
            None => {
                // depth 1: a string of bananas
                let mut poly = IntPoly::one(Basis::T);
                for entry in &root.entries {
                    poly = &poly * &banana_class(entry.label).poly;
                }
                return poly;
            }
            Some(path) => path,
        };
        let (parent_path, &(last_entry, last_child)) =
            (&path[..path.len() - 1], path.last().unwrap());
        let terminal = node_at(root, &path);
        let labels: Vec<u32> = terminal.entries.iter().map(|e| e.label).collect();

        if labels.len() == 1 {
            // merge the singleton into its parent entry
            let a = labels[0];
            let parent = node_at(root, parent_path);
            parent.entries[last_entry].children.remove(last_child);
            parent.entries[last_entry].label += a - 1;
            return self.class_rec(tree);
        }

        if labels.iter().all(|&a| a == 1) {
            // pure subdivision stage
            let r = labels.len() as u32;
            let parent = node_at(root, parent_path);
            parent.entries[last_entry].children.remove(last_child);
            return &tp1().pow(r - 1) * &self.class_rec(tree);
        }

        // first maximal entry; the result is independent of the choice but
        // a fixed tie-break keeps the memo deterministic
        let mut m = 0;
        for (i, &x) in labels.iter().enumerate() {
            if x > labels[m] {
                m = i;
            }
        }
        let a = labels[m];
        debug_assert!(a >= 2);
        let (f, g, h) = fgh(a);

        let mut one_tree = tree.clone();
        node_at(one_tree.root.as_mut().unwrap(), &path).entries[m].label = 1;
        let u_one = self.class_rec(&mut one_tree);

        let mut del_tree = tree.clone();
        node_at(del_tree.root.as_mut().unwrap(), &path)
            .entries
            .remove(m);
        let u_del = self.class_rec(&mut del_tree);

        let mut drop_tree = tree.clone();
        {
            let parent = node_at(drop_tree.root.as_mut().unwrap(), parent_path);
            let entry = &mut parent.entries[last_entry];
            entry.children.remove(last_child);
            debug_assert!(entry.label >= 2, "terminal stage targets a >= 2 entry");
            entry.label -= 1;
            // drop_tree may now be non-reduced; class_rec reduces on entry
        }
        let u_drop = self.class_rec(&mut drop_tree);

        let mut side = IntPoly::one(Basis::T);
        for (i, &ai) in labels.iter().enumerate() {
            if i != m {
                side = &side * &banana_class(ai).poly;
            }
        }

        let t1 = &f * &u_one;
        let t2 = &g * &u_del;
        let t3 = &(&side * &h) * &u_drop;
        &(&t1 + &t2) + &t3
    }
}

/// Path (entry index, child index) from the root to the first terminal
/// non-root white node in DFS order, or `None` at depth <= 1.
fn find_terminal_path(root: &WhiteNode) -> Option<Vec<(usize, usize)>> {
    fn is_terminal(w: &WhiteNode) -> bool {
        w.entries.iter().all(|e| e.children.is_empty())
    }
    fn dfs(node: &WhiteNode, path: &mut Vec<(usize, usize)>) -> bool {
        for (ei, entry) in node.entries.iter().enumerate() {
            for (ci, child) in entry.children.iter().enumerate() {
                path.push((ei, ci));
                if is_terminal(child) || dfs(child, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let mut path = Vec::new();
    dfs(root, &mut path).then_some(path)
}

fn node_at<'a>(root: &'a mut WhiteNode, path: &[(usize, usize)]) -> &'a mut WhiteNode {
    let mut cur = root;
    for &(ei, ci) in path {
        cur = &mut cur.entries[ei].children[ci];
    }
    cur
}

/// Convenience one-shot evaluation with a private memo table.
pub fn class_of(c: &MelonicConstruction) -> Result<GrothendieckClass, ConstructionError> {
    ClassEngine::new().class_of(c)
}

/// Distinct class polynomials per edge count, over every enumerated reduced
/// construction with at most `max_edges` edges. Trees are streamed in
/// batches that fan out to the rayon pool; the output is sorted, so the
/// result is deterministic regardless of worker scheduling.
pub fn distinct_classes(max_edges: usize) -> Vec<(usize, Vec<IntPoly>)> {
    use rayon::prelude::*;
    // Over-cap trees are visited once each and never looked up again, so
    // memoizing them would only balloon the table; everything at or below
    // the cap is shared heavily across the sweep.
    let engine = if max_edges <= 11 {
        ClassEngine::new()
    } else {
        ClassEngine::with_memo_edge_cap(10)
    };
    let mut by_edges: std::collections::BTreeMap<usize, std::collections::BTreeSet<IntPoly>> =
        std::collections::BTreeMap::new();
    let mut batch: Vec<MelonTree> = Vec::new();
    let mut flush = |batch: &mut Vec<MelonTree>| {
        let pairs: Vec<(usize, IntPoly)> = batch
            .par_iter()
            .map(|t| {
                let class = engine.class_of_tree(t);
                (class.edges, class.poly)
            })
            .collect();
        batch.clear();
        for (e, p) in pairs {
            by_edges.entry(e).or_default().insert(p);
        }
    };
    crate::construction::for_each_reduced(max_edges, &mut |tree| {
        batch.push(tree);
        if batch.len() >= 65536 {
            flush(&mut batch);
        }
    });
    flush(&mut batch);
    by_edges
        .into_iter()
        .map(|(e, set)| (e, set.into_iter().collect()))
        .collect()
}

/// Sizes of the distinct-class sets for edge counts `1..=max_edges`.
pub fn distinct_class_counts(max_edges: usize) -> Vec<usize> {
    let by_edges = distinct_classes(max_edges);
    let mut counts = vec![0usize; max_edges];
    for (e, set) in by_edges {
        if e >= 1 && e <= max_edges {
            counts[e - 1] = set.len();
        }
    }
    counts
}
