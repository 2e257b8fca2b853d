//! Branch-and-bound over LP relaxations.
//!
//! Nodes differ from the root only in the bounds of integer variables. The
//! open-node order is depth first; among nodes at equal depth the smaller
//! parent bound wins, and the "round up" child of a branch is explored before
//! its sibling.
//!
//! Branching uses pseudo-costs: every solved child records the objective rise
//! per unit of bound change on its branching variable. A candidate scores the
//! product of its estimated down and up rises, and the highest score wins,
//! lowest index on ties. Variables with no history borrow the running mean,
//! so before any history exists the rule is most-fractional.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::WarmLp;
use super::{LpError, LpProblem, LpSolution, SolveStatus, SolverOptions};
use super::INTEGRALITY_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    /// Incumbent (or terminal status); `simplex_iterations` sums every node.
    pub lp: LpSolution,
    pub branch_nodes_explored: usize,
    /// `incumbent - best open bound` when stopped early, zero when optimal.
    pub integrality_gap_at_stop: f64,
}

impl MilpSolution {
    pub fn status(&self) -> SolveStatus {
        self.lp.status
    }

    pub fn objective_value(&self) -> f64 {
        self.lp.objective_value
    }

    pub fn x(&self) -> &[f64] {
        &self.lp.x
    }
}

struct Node {
    depth: usize,
    bound: f64,
    up_child: bool,
    seq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    origin: Option<Branch>,
}

/// How a node was created from its parent.
#[derive(Clone, Copy)]
struct Branch {
    var: usize,
    up: bool,
    /// Distance the parent's value had to move to reach the new bound.
    dist: f64,
    parent_obj: f64,
}

/// Per-variable objective rise per unit change, split by direction.
struct PseudoCosts {
    sum: Vec<[f64; 2]>,
    count: Vec<[u32; 2]>,
    total: [f64; 2],
    total_count: [u32; 2],
}

impl PseudoCosts {
    fn new(n: usize) -> Self {
        Self { sum: vec![[0.0; 2]; n], count: vec![[0; 2]; n], total: [0.0; 2], total_count: [0; 2] }
    }

    fn record(&mut self, b: &Branch, child_obj: f64) {
        if b.dist <= INTEGRALITY_TOL {
            return;
        }
        let gain = ((child_obj - b.parent_obj) / b.dist).max(0.0);
        let d = b.up as usize;
        self.sum[b.var][d] += gain;
        self.count[b.var][d] += 1;
        self.total[d] += gain;
        self.total_count[d] += 1;
    }

    fn estimate(&self, j: usize, d: usize) -> f64 {
        if self.count[j][d] > 0 {
            self.sum[j][d] / self.count[j][d] as f64
        } else if self.total_count[d] > 0 {
            self.total[d] / self.total_count[d] as f64
        } else {
            1.0
        }
    }

    fn select(&self, x: &[f64], mask: &[bool]) -> Option<usize> {
        const FLOOR: f64 = 1e-6;
        let mut best: Option<(usize, f64)> = None;
        for (j, (&v, &int)) in x.iter().zip(mask).enumerate() {
            if !int {
                continue;
            }
            let down = v - v.floor();
            let up = v.ceil() - v;
            if down.min(up) <= INTEGRALITY_TOL {
                continue;
            }
            let score = (down * self.estimate(j, 0)).max(FLOOR) * (up * self.estimate(j, 1)).max(FLOOR);
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }
}

impl Node {
    fn key(&self) -> (usize, std::cmp::Reverse<OrdF64>, bool, std::cmp::Reverse<usize>) {
        (self.depth, std::cmp::Reverse(OrdF64(self.bound)), self.up_child, std::cmp::Reverse(self.seq))
    }
}

#[derive(PartialEq, PartialOrd)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

fn prune_tolerance(incumbent: f64) -> f64 {
    1e-9 * (1.0 + incumbent.abs())
}

/// Solves `problem` to global optimality over its integer-marked variables.
pub fn solve_milp(problem: &LpProblem, opts: &SolverOptions) -> Result<MilpSolution, LpError> {
    search(problem, opts, None)
}

/// Like [`solve_milp`], seeded with a guess. The integer entries of `start`
/// are rounded and fixed, and if the remaining LP is feasible its optimum
/// becomes the first incumbent. A good guess prunes the tree early; a bad one
/// costs one LP solve. The result is the same optimum either way, up to ties.
pub fn solve_milp_from(problem: &LpProblem, opts: &SolverOptions, start: &[f64]) -> Result<MilpSolution, LpError> {
    if start.len() != problem.num_vars() {
        return Err(LpError::StartLength { expected: problem.num_vars(), got: start.len() });
    }
    search(problem, opts, Some(start))
}

fn search(problem: &LpProblem, opts: &SolverOptions, start: Option<&[f64]>) -> Result<MilpSolution, LpError> {
    problem.validate()?;
    if !problem.has_integers() {
        return Err(LpError::NoIntegerVariables);
    }
    let mask = problem.integer_mask().to_vec();
    let int_vars: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
    let mut lp = WarmLp::new(problem);
    let mut iterations = 0usize;
    let mut nodes = 0usize;
    let mut seq = 0usize;
    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut hit_iteration_limit = false;
    let mut costs = PseudoCosts::new(mask.len());

    if let Some(start) = start {
        for &j in &int_vars {
            let v = start[j].round().clamp(problem.lower()[j], problem.upper()[j]);
            lp.set_bounds(j, v, v);
        }
        let fixed = lp.solve(opts);
        iterations += fixed.simplex_iterations;
        if fixed.status == SolveStatus::Optimal {
            incumbent = Some((fixed.x, fixed.objective_value));
        }
    }

    let mut open = BinaryHeap::new();
    open.push(Node {
        depth: 0,
        bound: f64::NEG_INFINITY,
        up_child: true,
        seq,
        lower: problem.lower().to_vec(),
        upper: problem.upper().to_vec(),
        origin: None,
    });

    let finish = |status: SolveStatus,
                  incumbent: Option<(Vec<f64>, f64)>,
                  iterations: usize,
                  nodes: usize,
                  gap: f64| {
        let (x, objective_value) = incumbent.unwrap_or_else(|| {
            let v = if status == SolveStatus::Unbounded { f64::NEG_INFINITY } else { f64::INFINITY };
            (Vec::new(), v)
        });
        MilpSolution {
            lp: LpSolution { status, x, objective_value, simplex_iterations: iterations },
            branch_nodes_explored: nodes,
            integrality_gap_at_stop: gap,
        }
    };

    while let Some(node) = open.pop() {
        if let Some((_, best)) = &incumbent {
            if node.bound >= best - prune_tolerance(*best) {
                continue;
            }
        }
        if nodes >= opts.max_nodes {
            let open_bound = open
                .iter()
                .map(|n| n.bound)
                .chain(std::iter::once(node.bound))
                .fold(f64::INFINITY, f64::min);
            let gap = incumbent.as_ref().map_or(f64::INFINITY, |(_, b)| b - open_bound);
            return Ok(finish(SolveStatus::NodeLimit, incumbent, iterations, nodes, gap));
        }
        nodes += 1;

        for &j in &int_vars {
            lp.set_bounds(j, node.lower[j], node.upper[j]);
        }
        let relax = lp.solve(opts);
        iterations += relax.simplex_iterations;
        match relax.status {
            SolveStatus::Optimal => {
                if let Some(b) = &node.origin {
                    costs.record(b, relax.objective_value);
                }
            }
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                return Ok(finish(SolveStatus::Unbounded, None, iterations, nodes, f64::INFINITY));
            }
            _ => {
                hit_iteration_limit = true;
                continue;
            }
        }
        if let Some((_, best)) = &incumbent {
            if relax.objective_value >= best - prune_tolerance(*best) {
                continue;
            }
        }

        match costs.select(&relax.x, &mask) {
            None => {
                let (x, obj) = polish(&mut lp, &node, &relax, &int_vars, opts, &mut iterations);
                if incumbent.as_ref().map_or(true, |(_, b)| obj < *b) {
                    incumbent = Some((x, obj));
                }
            }
            Some(j) => {
                let v = relax.x[j];
                let depth = node.depth + 1;
                let mut down_upper = node.upper.clone();
                down_upper[j] = v.floor();
                let mut up_lower = node.lower.clone();
                up_lower[j] = v.ceil();
                seq += 1;
                open.push(Node {
                    depth,
                    bound: relax.objective_value,
                    up_child: true,
                    seq,
                    lower: up_lower,
                    upper: node.upper.clone(),
                    origin: Some(Branch { var: j, up: true, dist: v.ceil() - v, parent_obj: relax.objective_value }),
                });
                seq += 1;
                open.push(Node {
                    depth,
                    bound: relax.objective_value,
                    up_child: false,
                    seq,
                    lower: node.lower,
                    upper: down_upper,
                    origin: Some(Branch { var: j, up: false, dist: v - v.floor(), parent_obj: relax.objective_value }),
                });
            }
        }
    }

    let status = match (&incumbent, hit_iteration_limit) {
        (Some(_), false) => SolveStatus::Optimal,
        (_, true) => SolveStatus::IterationLimit,
        (None, false) => SolveStatus::Infeasible,
    };
    let gap = if status == SolveStatus::Optimal { 0.0 } else { f64::INFINITY };
    Ok(finish(status, incumbent, iterations, nodes, gap))
}

/// Snaps the integer variables of an integral relaxation to exact integers
/// and re-optimises the continuous part with them fixed.
fn polish(
    lp: &mut WarmLp<'_>,
    node: &Node,
    relax: &LpSolution,
    int_vars: &[usize],
    opts: &SolverOptions,
    iterations: &mut usize,
) -> (Vec<f64>, f64) {
    for &j in int_vars {
        let v = relax.x[j].round().clamp(node.lower[j], node.upper[j]);
        lp.set_bounds(j, v, v);
    }
    let fixed = lp.solve(opts);
    *iterations += fixed.simplex_iterations;
    if fixed.status == SolveStatus::Optimal {
        (fixed.x, fixed.objective_value)
    } else {
        (relax.x.clone(), relax.objective_value)
    }
}
