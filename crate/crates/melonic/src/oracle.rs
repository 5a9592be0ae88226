//! Ground truth independent of the class recursion: build the Kirchhoff
//! polynomial by spanning-tree enumeration and count points of the affine
//! hypersurface complement over small finite fields.
//!
//! For a mixed-Tate class the point count over `F_q` must equal the class
//! polynomial evaluated at `L = q`; comparing the two validates the whole
//! recursion pipeline on any concrete graph.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::construction::{ConstructionError, Graph, MelonicConstruction};
use crate::motive::GrothendieckClass;

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unsupported field size {0} (supported: 2, 3, 4, 5)")]
    UnsupportedField(u64),
    #[error(
        "point count budget exceeded: {points} points > budget {budget}; use a smaller graph or q"
    )]
    BudgetExceeded { points: u128, budget: u64 },
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// The Kirchhoff polynomial of a graph, stored as the set of its monomials:
/// one edge-index subset per spanning tree, each the complement of the
/// tree's edge set. Homogeneous of degree `loops = E - V + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KirchhoffPoly {
    pub edge_count: usize,
    pub monomials: Vec<Vec<usize>>,
}

impl KirchhoffPoly {
    pub fn degree(&self) -> usize {
        self.monomials.first().map_or(0, Vec::len)
    }
}

/// Enumerate spanning trees by recursive deletion/contraction on the edge
/// list; parallel edges stay distinct by index. Emits the monomial set of
/// the Kirchhoff polynomial.
pub fn kirchhoff(g: &Graph) -> Result<KirchhoffPoly, OracleError> {
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    let edges: Vec<(usize, usize, usize)> = g
        .edges
        .iter()
        .enumerate()
        .map(|(id, &(u, w))| (id, u, w))
        .collect();
    let mut trees: Vec<Vec<usize>> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    span_rec(&edges, g.vertex_count, &mut chosen, &mut trees);
    let loops = g.loop_number();
    let mut monomials: Vec<Vec<usize>> = trees
        .iter()
        .map(|tree| {
            (0..g.edges.len())
                .filter(|id| !tree.contains(id))
                .collect::<Vec<_>>()
        })
        .collect();
    monomials.sort();
    debug_assert!(monomials.iter().all(|m| m.len() == loops));
    Ok(KirchhoffPoly {
        edge_count: g.edges.len(),
        monomials,
    })
}

fn connected(edges: &[(usize, usize, usize)], nv: usize) -> bool {
    if nv <= 1 {
        return true;
    }
    let mut dsu: Vec<usize> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut comps = 0usize;
    let mut id_of = |v: usize, dsu: &mut Vec<usize>, comps: &mut usize| -> usize {
        *index.entry(v).or_insert_with(|| {
            dsu.push(dsu.len());
            *comps += 1;
            dsu.len() - 1
        })
    };
    fn find(dsu: &mut [usize], mut x: usize) -> usize {
        while dsu[x] != x {
            dsu[x] = dsu[dsu[x]];
            x = dsu[x];
        }
        x
    }
    let mut merged = 0usize;
    for &(_, u, w) in edges {
        let a = id_of(u, &mut dsu, &mut comps);
        let b = id_of(w, &mut dsu, &mut comps);
        let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
        if ra != rb {
            dsu[ra] = rb;
            merged += 1;
        }
    }
    // every vertex 0..nv must appear; vertices with no incident edge can
    // never be connected
    comps == nv && merged == nv - 1
}

fn span_rec(
    edges: &[(usize, usize, usize)],
    nv: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if nv == 1 {
        out.push(chosen.clone());
        return;
    }
    let pos = match edges.iter().position(|&(_, u, w)| u != w) {
        Some(p) => p,
        None => return,
    };
    let (id, u, w) = edges[pos];
    // contract: the edge goes into the tree, w is relabeled to u
    let contracted: Vec<(usize, usize, usize)> = edges
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .map(|(_, &(eid, a, b))| {
            let a = if a == w { u } else { a };
            let b = if b == w { u } else { b };
            (eid, a, b)
        })
        .filter(|&(_, a, b)| a != b)
        .collect();
    chosen.push(id);
    span_rec(&contracted, nv - 1, chosen, out);
    chosen.pop();
    // delete: only worth recursing if the rest can still connect everything
    let deleted: Vec<(usize, usize, usize)> = edges
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .map(|(_, &e)| e)
        .collect();
    if connected(&deleted, nv) {
        span_rec(&deleted, nv, chosen, out);
    }
}

/// Spanning-tree count from an integer determinant of a Laplacian minor
/// (fraction-free Gaussian elimination). Independent cross-check for the
/// deletion/contraction enumeration.
pub fn matrix_tree_count(g: &Graph) -> BigInt {
    let n = g.vertex_count;
    if n <= 1 {
        return BigInt::one();
    }
    // Laplacian with multiplicities, first row/column removed
    let m = n - 1;
    let mut a = vec![vec![BigInt::zero(); m]; m];
    for &(u, w) in &g.edges {
        if u == w {
            continue;
        }
        if u > 0 {
            a[u - 1][u - 1] += 1;
        }
        if w > 0 {
            a[w - 1][w - 1] += 1;
        }
        if u > 0 && w > 0 {
            a[u - 1][w - 1] -= 1;
            a[w - 1][u - 1] -= 1;
        }
    }
    // Bareiss
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..m {
        if a[k][k].is_zero() {
            let swap = (k + 1..m).find(|&i| !a[i][k].is_zero());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[m - 1][m - 1].clone()
}

/// Arithmetic tables for GF(q), q in {2, 3, 4, 5}. GF(4) is the one
/// non-prime case; its addition is XOR and multiplication follows
/// w^2 = w + 1 on the elements {0, 1, w, w+1} coded as 0..3.
#[derive(Debug, Clone)]
pub struct FieldTables {
    pub q: u64,
    add: [[u8; 5]; 5],
    mul: [[u8; 5]; 5],
}

pub fn field_tables(q: u64) -> Result<FieldTables, OracleError> {
    let mut add = [[0u8; 5]; 5];
    let mut mul = [[0u8; 5]; 5];
    match q {
        2 | 3 | 5 => {
            for a in 0..q as usize {
                for b in 0..q as usize {
                    add[a][b] = ((a + b) % q as usize) as u8;
                    mul[a][b] = ((a * b) % q as usize) as u8;
                }
            }
        }
        4 => {
            let gf4_mul = [[0u8, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
            for (a, (add_row, mul_row)) in add.iter_mut().zip(&mut mul).enumerate().take(4) {
                for (b, (add_slot, mul_slot)) in add_row
                    .iter_mut()
                    .zip(mul_row.iter_mut())
                    .enumerate()
                    .take(4)
                {
                    *add_slot = (a ^ b) as u8;
                    *mul_slot = gf4_mul[a][b];
                }
            }
        }
        other => return Err(OracleError::UnsupportedField(other)),
    }
    Ok(FieldTables { q, add, mul })
}

impl FieldTables {
    #[inline]
    fn eval(&self, psi: &KirchhoffPoly, point: &[u8]) -> u8 {
        let mut acc = 0u8;
        for mono in &psi.monomials {
            let mut prod = 1u8;
            for &e in mono {
                prod = self.mul[prod as usize][point[e] as usize];
                if prod == 0 {
                    break;
                }
            }
            acc = self.add[acc as usize][prod as usize];
        }
        acc
    }
}

/// Number of points of `F_q^n` where the Kirchhoff polynomial does not
/// vanish, by exhaustive evaluation in odometer order. The range is split
/// across workers; the result does not depend on the partitioning.
pub fn point_count_psi(psi: &KirchhoffPoly, q: u64, budget: u64) -> Result<u64, OracleError> {
    let tables = field_tables(q)?;
    let n = psi.edge_count;
    let total: u128 = (q as u128)
        .checked_pow(n as u32)
        .ok_or(OracleError::BudgetExceeded {
            points: u128::MAX,
            budget,
        })?;
    if total > budget as u128 {
        return Err(OracleError::BudgetExceeded {
            points: total,
            budget,
        });
    }
    let total = total as u64;
    let workers = rayon::current_num_threads().max(1) as u64;
    let chunk = total.div_ceil(workers).max(1);
    let ranges: Vec<(u64, u64)> = (0..total)
        .step_by(chunk as usize)
        .map(|start| (start, (start + chunk).min(total)))
        .collect();
    let count = ranges
        .into_par_iter()
        .map(|(start, end)| {
            // decode the odometer at `start`, then step
            let mut point = vec![0u8; n];
            let mut v = start;
            for slot in point.iter_mut() {
                *slot = (v % q) as u8;
                v /= q;
            }
            let mut nonzero = 0u64;
            for _ in start..end {
                if tables.eval(psi, &point) != 0 {
                    nonzero += 1;
                }
                for slot in point.iter_mut() {
                    *slot += 1;
                    if u64::from(*slot) == q {
                        *slot = 0;
                    } else {
                        break;
                    }
                }
            }
            nonzero
        })
        .sum();
    Ok(count)
}

pub fn point_count(g: &Graph, q: u64, budget: u64) -> Result<u64, OracleError> {
    point_count_psi(&kirchhoff(g)?, q, budget)
}

/// One finite-field comparison inside a [`VerifyReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QCheck {
    pub q: u64,
    pub expected: BigInt,
    pub counted: u64,
    pub ok: bool,
}

/// Detailed comparison of a class against the brute-force oracle.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub edges: usize,
    pub loops: usize,
    pub degree_psi_ok: bool,
    pub degree_class_ok: bool,
    pub checks: Vec<QCheck>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.degree_psi_ok && self.degree_class_ok && self.checks.iter().all(|c| c.ok)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "edges={} loops={} deg(psi) {} deg(class) {}",
            self.edges,
            self.loops,
            if self.degree_psi_ok { "ok" } else { "MISMATCH" },
            if self.degree_class_ok {
                "ok"
            } else {
                "MISMATCH"
            },
        )?;
        for c in &self.checks {
            write!(
                f,
                "; q={}: expected {} got {}{}",
                c.q,
                c.expected,
                c.counted,
                if c.ok { "" } else { " MISMATCH" }
            )?;
        }
        Ok(())
    }
}

/// Check a computed class against the oracle on the realized graph: the
/// class evaluated at `L = q` must equal the point count for each `q`, the
/// Kirchhoff degree must equal the loop number, and the class degree must
/// equal the edge count.
pub fn verify_class(
    c: &MelonicConstruction,
    u: &GrothendieckClass,
    qs: &[u64],
    budget: u64,
) -> Result<VerifyReport, OracleError> {
    let g = c.realize_graph()?;
    verify_class_on_graph(&g, u, qs, budget)
}

pub fn verify_class_on_graph(
    g: &Graph,
    u: &GrothendieckClass,
    qs: &[u64],
    budget: u64,
) -> Result<VerifyReport, OracleError> {
    let psi = kirchhoff(g)?;
    let mut checks = Vec::new();
    for &q in qs {
        let counted = point_count_psi(&psi, q, budget)?;
        let expected = u.poly.eval_at_l(&BigInt::from(q));
        let ok = !expected.is_negative() && expected == BigInt::from(counted);
        checks.push(QCheck {
            q,
            expected,
            counted,
            ok,
        });
    }
    Ok(VerifyReport {
        edges: g.edges.len(),
        loops: g.loop_number(),
        degree_psi_ok: psi.degree() == g.loop_number(),
        degree_class_ok: u.poly.degree() == Some(g.edges.len()) && u.edges == g.edges.len(),
        checks,
    })
}
