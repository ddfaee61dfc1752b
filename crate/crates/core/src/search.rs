//! Branch-and-bound search for the extreme adjusted slopes, plus the
//! exhaustive enumerator used as its reference.
//!
//! A node `(included, candidates)` stands for every model that contains all
//! of `included` and any subset of `candidates`. Popping a node fits the
//! model with exactly `included`, then asks the envelope whether any
//! extension could move the running minimum or maximum. If so the node is
//! split on one candidate: one child drops it, the other adds it to the
//! model.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::bounds::{self, Envelope};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Largest `p` the enumerator accepts by default.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 25;

/// Covariate indices in the model so far, and those still undecided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub included: Vec<usize>,
    pub candidates: Vec<usize>,
}

impl Node {
    pub fn root(p: usize) -> Self {
        Self {
            included: Vec::new(),
            candidates: (0..p).collect(),
        }
    }

    /// `(included, candidates − {var})` and `(included + {var}, candidates − {var})`.
    pub fn split(&self, var: usize) -> (Node, Node) {
        let candidates: Vec<usize> = self
            .candidates
            .iter()
            .copied()
            .filter(|&c| c != var)
            .collect();
        let mut included = self.included.clone();
        let at = included.partition_point(|&i| i < var);
        included.insert(at, var);
        (
            Node {
                included: self.included.clone(),
                candidates: candidates.clone(),
            },
            Node {
                included,
                candidates,
            },
        )
    }
}

/// Running minimum and maximum slope with the subsets that attain them.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrema {
    pub lower: f64,
    pub upper: f64,
    pub argmin: Vec<usize>,
    pub argmax: Vec<usize>,
}

impl Extrema {
    pub fn new(beta: f64, subset: &[usize]) -> Self {
        Self {
            lower: beta,
            upper: beta,
            argmin: subset.to_vec(),
            argmax: subset.to_vec(),
        }
    }

    pub fn update(&mut self, beta: f64, subset: &[usize]) {
        if beta < self.lower {
            self.lower = beta;
            self.argmin = subset.to_vec();
        }
        if beta > self.upper {
            self.upper = beta;
            self.argmax = subset.to_vec();
        }
    }
}

pub fn update_extrema(mut ext: Extrema, beta: f64, subset: &[usize]) -> Extrema {
    ext.update(beta, subset);
    ext
}

/// True when the envelope reaches strictly beyond the current extrema.
pub fn has_potential(env: &Envelope, ext: &Extrema) -> bool {
    env.lower < ext.lower || env.upper > ext.upper
}

/// Picks the candidate whose residualized column has the largest
/// `|corr(z, x) · corr(z, y)|`. Ties go to the smallest index; a column that
/// vanished after residualization scores zero.
///
/// `z_res` holds the residualized columns of `candidates`, in order.
pub fn select_branch_var(
    x_res: &[f64],
    y_res: &[f64],
    z_res: &Matrix,
    candidates: &[usize],
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidates to branch on".into()));
    }
    if z_res.ncols() != candidates.len() {
        return Err(Error::InvalidInput(format!(
            "{} residualized columns for {} candidates",
            z_res.ncols(),
            candidates.len()
        )));
    }
    let score = |col: &[f64]| -> f64 {
        match (
            linalg::correlation(col, x_res),
            linalg::correlation(col, y_res),
        ) {
            (Ok(a), Ok(b)) if (a * b).is_finite() => (a * b).abs(),
            _ => 0.0,
        }
    };
    let mut best = (candidates[0], score(z_res.column(0)));
    for (k, &c) in candidates.iter().enumerate().skip(1) {
        let s = score(z_res.column(k));
        if s > best.1 || (s == best.1 && c < best.0) {
            best = (c, s);
        }
    }
    Ok(best.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum QueueDiscipline {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub discipline: QueueDiscipline,
    /// Stop after this many pops and report a partial result.
    pub node_budget: Option<u64>,
    /// With `false` every node with candidates is expanded.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            discipline: QueueDiscipline::Fifo,
            node_budget: None,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub extrema: Extrema,
    pub nodes_popped: u64,
    /// Popped nodes with candidates whose envelope showed no potential.
    pub nodes_pruned: u64,
    pub nodes_pushed: u64,
    pub elapsed: Duration,
    /// Set when a node budget stopped the search early.
    pub partial: bool,
}

/// What happened at one popped node; handed to the observer of
/// [`branch_and_bound_observed`].
#[derive(Debug)]
pub struct NodeVisit<'a> {
    pub node: &'a Node,
    /// Slope of the model with exactly `node.included`.
    pub beta: f64,
    /// `None` for nodes without candidates.
    pub envelope: Option<Envelope>,
    /// Extrema after folding in `beta`, before any children are processed.
    pub extrema: &'a Extrema,
    /// Variable the node was split on, if it was expanded.
    pub branch_var: Option<usize>,
}

pub fn branch_and_bound(data: &Dataset) -> Result<SearchResult> {
    branch_and_bound_with(data, &SearchOptions::default())
}

pub fn branch_and_bound_with(data: &Dataset, opts: &SearchOptions) -> Result<SearchResult> {
    branch_and_bound_observed(data, opts, |_| {})
}

pub fn branch_and_bound_observed<F>(
    data: &Dataset,
    opts: &SearchOptions,
    mut observe: F,
) -> Result<SearchResult>
where
    F: FnMut(&NodeVisit<'_>),
{
    let start = Instant::now();
    let s = data.covariates();
    let empty = Matrix::empty(data.n());

    let beta_empty = bounds::bound_inputs(data.x(), data.y(), &empty)?.slope();
    let mut extrema = Extrema::new(beta_empty, &[]);

    let mut frontier = VecDeque::new();
    frontier.push_back(Node::root(data.p()));
    let mut pushed = 1u64;
    let mut popped = 0u64;
    let mut pruned = 0u64;
    let mut partial = false;

    loop {
        if opts.node_budget.is_some_and(|b| popped >= b) && !frontier.is_empty() {
            partial = true;
            break;
        }
        let node = match opts.discipline {
            QueueDiscipline::Fifo => frontier.pop_front(),
            QueueDiscipline::Lifo => frontier.pop_back(),
        };
        let Some(node) = node else { break };
        popped += 1;

        // Residuals are rebuilt from `included` on every pop.
        let ctx = linalg::make_context(&s.select(&node.included))?;
        let x_res = ctx.residual(data.x())?;
        let y_res = ctx.residual(data.y())?;
        let z_res = linalg::residualize(&ctx, &s.select(&node.candidates))?;
        let inputs = bounds::bound_inputs(&x_res, &y_res, &z_res)?;
        let beta = inputs.slope();
        extrema.update(beta, &node.included);

        let mut env = None;
        let mut branch_var = None;
        if !node.candidates.is_empty() {
            let e = bounds::envelope(&inputs);
            env = Some(e);
            if !opts.prune || has_potential(&e, &extrema) {
                let var = select_branch_var(&x_res, &y_res, &z_res, &node.candidates)?;
                branch_var = Some(var);
            } else {
                pruned += 1;
            }
        }

        observe(&NodeVisit {
            node: &node,
            beta,
            envelope: env,
            extrema: &extrema,
            branch_var,
        });

        if let Some(var) = branch_var {
            let (without, with) = node.split(var);
            frontier.push_back(without);
            frontier.push_back(with);
            pushed += 2;
        }
    }

    Ok(SearchResult {
        extrema,
        nodes_popped: popped,
        nodes_pruned: pruned,
        nodes_pushed: pushed,
        elapsed: start.elapsed(),
        partial,
    })
}

/// Fits all `2^p` models with a full least-squares solve each.
pub fn brute_force(data: &Dataset) -> Result<SearchResult> {
    brute_force_with_cap(data, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_with_cap(data: &Dataset, cap: usize) -> Result<SearchResult> {
    let p = data.p();
    if p > cap || p >= 63 {
        return Err(Error::NodeBudgetExceeded {
            requested: 1u64.checked_shl(p as u32).unwrap_or(u64::MAX),
            limit: 1u64 << cap.min(62),
        });
    }
    let start = Instant::now();
    let s = data.covariates();
    let total = 1u64 << p;
    let mut extrema: Option<Extrema> = None;
    let mut subset = Vec::with_capacity(p);

    for mask in 0..total {
        subset.clear();
        subset.extend((0..p).filter(|&b| mask >> b & 1 == 1));
        let mut design = Vec::with_capacity(subset.len() + 1);
        design.push(data.x().to_vec());
        design.extend(subset.iter().map(|&i| s.column(i).to_vec()));
        let beta = linalg::householder_lstsq(design, data.y()).map_err(|j| {
            Error::RankDeficient(if j == 0 {
                data.provenance().x_col.clone()
            } else {
                s.label(subset[j - 1]).to_string()
            })
        })?[0];
        match extrema.as_mut() {
            None => extrema = Some(Extrema::new(beta, &subset)),
            Some(e) => e.update(beta, &subset),
        }
    }

    Ok(SearchResult {
        extrema: extrema.expect("at least the empty model is fitted"),
        nodes_popped: total,
        nodes_pruned: 0,
        nodes_pushed: total,
        elapsed: start.elapsed(),
        partial: false,
    })
}
