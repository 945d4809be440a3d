//! Branch-and-cut over assignments of items to bins.
//!
//! The search enumerates assignments that respect clique fixing, per-bin capacity filters
//! and the cut pool. Each complete assignment is checked bin by bin; an infeasible bin
//! yields reduced and lifted cuts and the search resumes.

mod clique;
mod context;
mod pool;
mod search;

use std::time::{Duration, Instant};

use serde::Serialize;

pub use clique::{incompatibility_graph, incompatible, max_clique};
pub use context::{branching_order, build_contexts, dff_inequalities, BinContext, CapacityFilter};
pub use pool::CutPool;
pub use search::{AssignmentModel, CombinatorialSearch, LazyCutBackend, SearchOutcome, Separation};

use crate::cuts::{find_mis, lift_cut, CheckMemo, Checked, Cut, CutScope, MisMode, MisOptions};
use crate::dff::{compute_bounds, guarded_ceil};
use crate::heuristic::{initial_solution, StartMode};
use crate::instance::{continuous_bound_ceil, verify_solution, Instance, PackedBin, Solution, SolveStats, SolveStatus};
use crate::preprocess::{enlarged_continuous_bound, preprocess, PreprocessOptions, Reduction};

#[derive(Debug, Clone)]
pub struct MasterConfig {
    pub time_limit: Option<Duration>,
    /// DFF pairs used as bin inequalities.
    pub alpha: usize,
    /// Scale pairs used as bin inequalities.
    pub beta: usize,
    /// Extra random reduction passes per infeasible bin.
    pub gamma: usize,
    /// Once a bin of a candidate solution is infeasible, bins with this many items are not checked.
    pub tilde_n: usize,
    pub per_check_limit: Option<Duration>,
    pub eta: usize,
    pub seed: u64,
    pub start: StartMode,
    pub preprocess: PreprocessOptions,
    /// Assign the members of a maximum clique of incompatible items to their own bins.
    pub clique_fixing: bool,
    /// Seed the pool with the lifted cut of every incompatible pair.
    pub root_pair_cuts: bool,
}

impl Default for MasterConfig {
    fn default() -> Self {
        MasterConfig {
            time_limit: Some(Duration::from_secs(3600)),
            alpha: 700,
            beta: 700,
            gamma: 0,
            tilde_n: 18,
            per_check_limit: Some(Duration::from_secs(2)),
            eta: 8,
            seed: 0,
            start: StartMode::Heuristic,
            preprocess: PreprocessOptions::default(),
            clique_fixing: true,
            root_pair_cuts: false,
        }
    }
}

/// Solve log entry, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    Root { lower: usize, upper: usize, fixed_bins: usize, residual_items: usize, clique: usize, seconds: f64 },
    Decision { bins: usize, outcome: &'static str, stats: SolveStats },
    Incumbent { bins: usize, stats: SolveStats },
    Cut { cut: Cut },
    Done { status: SolveStatus, lower: usize, upper: usize, stats: SolveStats },
}

/// Solves with default logging disabled and a fresh cut pool.
pub fn solve(inst: &Instance, cfg: &MasterConfig) -> Solution {
    solve_with(inst, cfg, &mut CutPool::new(), &mut |_| {})
}

struct Run<'a> {
    red: &'a Reduction,
    dims: Vec<(u32, u32)>,
    width: u32,
    height: u32,
    stats: SolveStats,
    memo: CheckMemo,
    deadline: Option<Instant>,
}

impl Run<'_> {
    fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }

    fn check(&mut self, items: &[usize], limit: Option<Duration>) -> (Checked, Option<Vec<(u32, u32)>>) {
        let sub: Vec<(u32, u32)> = items.iter().map(|&j| self.dims[j]).collect();
        let out = self.memo.check(&sub, self.width, self.height, limit);
        if out.from_memo {
            self.stats.memo_hits += 1;
        } else {
            self.stats.opp_calls += 1;
            self.stats.opp_seconds += out.seconds;
        }
        (out.status, out.coords)
    }

    /// Cuts for the infeasible content `items` of bin `bin`.
    fn cuts_for(&mut self, items: &[usize], ctx: &BinContext, cfg: &MasterConfig) -> Vec<Cut> {
        let forced: Vec<usize> = ctx.forced.into_iter().filter(|f| items.contains(f)).collect();
        let limit = match (cfg.per_check_limit, self.remaining()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let opts = MisOptions { per_check_limit: limit, gamma: cfg.gamma, seed: cfg.seed, mode: MisMode::StopAtFirst };
        let mis = find_mis(&self.dims, items, &forced, self.width, self.height, &self.memo, &opts);
        self.stats.opp_calls += mis.checks;
        self.stats.memo_hits += mis.memo_hits;
        self.stats.opp_seconds += mis.seconds;
        let area = |j: usize| self.dims[j].0 as u64 * self.dims[j].1 as u64;
        let mut by_area: Vec<usize> = (0..self.dims.len()).collect();
        by_area.sort_by_key(|&j| (std::cmp::Reverse(area(j)), j));
        mis.sets
            .into_iter()
            .map(|set| {
                let f: Vec<usize> = forced.iter().copied().filter(|f| set.contains(f)).collect();
                let (cands, scope): (Vec<usize>, CutScope) = if f.is_empty() {
                    (by_area.iter().copied().filter(|j| !set.contains(j)).collect(), CutScope::AllBins)
                } else {
                    (by_area.iter().copied().filter(|&j| ctx.allowed[j] && !set.contains(&j)).collect(), CutScope::Bin(ctx.index))
                };
                lift_cut(&self.dims, &set, &cands, &f, self.width, self.height, scope)
            })
            .collect()
    }
}

fn expanded_solution(red: &Reduction, bins: &[Vec<(usize, u32, u32)>]) -> Vec<PackedBin> {
    red.expand(bins)
}

/// Full pipeline: reduce, bound, start solution, then decide `k` bins for increasing `k`.
/// `pool` may carry cuts from an earlier run on the same instance and configuration.
pub fn solve_with(inst: &Instance, cfg: &MasterConfig, pool: &mut CutPool, log: &mut dyn FnMut(&LogEvent)) -> Solution {
    let start = Instant::now();
    let deadline = cfg.time_limit.map(|t| start + t);
    let red = preprocess(inst, cfg.preprocess);
    let fixed = red.fixed.len();
    let rinst = red.instance();
    let mut run = Run {
        red: &red,
        dims: rinst.dims(),
        width: red.width,
        height: red.height,
        stats: SolveStats::default(),
        memo: CheckMemo::new(),
        deadline,
    };

    // Start solution on the residual instance.
    let mut incumbent: Option<Vec<PackedBin>> = None;
    let mut upper;
    let mut external = false;
    match cfg.start {
        StartMode::Heuristic => {
            let h = initial_solution(&rinst, StartMode::Heuristic);
            let bins: Vec<Vec<(usize, u32, u32)>> =
                h.bins.iter().map(|b| b.placement.coords.iter().map(|p| (p.id, p.x, p.y)).collect()).collect();
            let packed = expanded_solution(&red, &bins);
            upper = packed.len();
            incumbent = Some(packed);
        }
        StartMode::GivenU0(v) => {
            upper = v;
            external = true;
        }
    }
    if let Some(bins) = &incumbent {
        record_incumbent(inst, bins, &mut run.stats);
    }

    let (bounds, clique) = if rinst.is_empty() {
        (None, Vec::new())
    } else {
        let b = compute_bounds(&rinst, cfg.eta, cfg.alpha);
        let graph = incompatibility_graph(&run.dims, run.width, run.height);
        let clique = if cfg.clique_fixing { max_clique(&graph) } else { Vec::new() };
        (Some((b, graph)), clique)
    };
    let l0 = fixed + bounds.as_ref().map_or(0, |(b, _)| b.l0);
    let mut lower = l0.max(fixed + clique.len());
    if !rinst.is_empty() {
        lower = lower.max(fixed + 1);
    }
    lower = lower.max(continuous_bound_ceil(inst)).max(guarded_ceil(enlarged_continuous_bound(inst)));
    run.stats.root_seconds = start.elapsed().as_secs_f64();
    log(&LogEvent::Root {
        lower,
        upper,
        fixed_bins: fixed,
        residual_items: rinst.len(),
        clique: clique.len(),
        seconds: run.stats.root_seconds,
    });
    let pool_start = pool.len();

    if let Some((bounds, graph)) = &bounds {
        let order = branching_order(&run.dims, &clique);
        if cfg.root_pair_cuts {
            let area = |d: (u32, u32)| d.0 as u64 * d.1 as u64;
            let mut by_area: Vec<usize> = (0..run.dims.len()).collect();
            by_area.sort_by_key(|&j| (std::cmp::Reverse(area(run.dims[j])), j));
            for a in 0..run.dims.len() {
                for b in a + 1..run.dims.len() {
                    if graph[a][b] {
                        let cands: Vec<usize> = by_area.iter().copied().filter(|&j| j != a && j != b).collect();
                        let cut = lift_cut(&run.dims, &[a, b], &cands, &[], run.width, run.height, CutScope::AllBins);
                        if pool.insert(cut.clone()) {
                            log(&LogEvent::Cut { cut });
                        }
                    }
                }
            }
        }
        let dims = run.dims.clone();
        let mut backend = CombinatorialSearch::new();
        loop {
            if incumbent.is_some() && lower >= upper {
                break;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                break;
            }
            let k = lower - fixed;
            let contexts = build_contexts(&run.dims, run.width, run.height, &order, clique.len(), k);
            let filters = dff_inequalities(&run.dims, run.width, run.height, &contexts, bounds, cfg.alpha, cfg.beta);
            let model = AssignmentModel {
                dims: &dims,
                contexts: &contexts,
                order: &order,
                clique_len: clique.len(),
                conflicts: graph,
                filters: &filters,
                deadline,
            };
            let mut accepted: Option<Vec<Vec<(usize, u32, u32)>>> = None;
            let outcome = {
                let run = &mut run;
                let accepted = &mut accepted;
                let log = &mut *log;
                let mut separate = |bins: &[Vec<usize>]| -> Separation {
                    let mut infeasible = Vec::new();
                    let mut placed: Vec<Vec<(usize, u32, u32)>> = Vec::with_capacity(bins.len());
                    let mut complete = true;
                    for (b, items) in bins.iter().enumerate() {
                        if items.is_empty() {
                            continue;
                        }
                        if !infeasible.is_empty() && items.len() >= cfg.tilde_n {
                            complete = false;
                            continue;
                        }
                        let limit = run.remaining();
                        match run.check(items, limit) {
                            (Checked::Feasible, Some(c)) => {
                                placed.push(items.iter().zip(c).map(|(&j, (x, y))| (j, x, y)).collect());
                            }
                            (Checked::Infeasible, _) => infeasible.push(b),
                            _ => return Separation::Abort,
                        }
                    }
                    if infeasible.is_empty() {
                        if complete {
                            *accepted = Some(placed);
                            return Separation::Accept;
                        }
                        return Separation::Abort;
                    }
                    let mut cuts = Vec::new();
                    for b in infeasible {
                        for cut in run.cuts_for(&bins[b], &contexts[b], cfg) {
                            log(&LogEvent::Cut { cut: cut.clone() });
                            cuts.push(cut);
                        }
                    }
                    Separation::Reject(cuts)
                };
                backend.search(&model, pool, &mut separate)
            };
            run.stats.nodes = backend.nodes();
            run.stats.cuts_added = (pool.len() - pool_start) as u64;
            let label = match &outcome {
                SearchOutcome::Found(_) => "found",
                SearchOutcome::Exhausted => "exhausted",
                SearchOutcome::TimedOut => "timed_out",
            };
            log(&LogEvent::Decision { bins: k, outcome: label, stats: run.stats.clone() });
            match outcome {
                SearchOutcome::Found(_) => {
                    let bins = accepted.take().expect("accepted assignment has coordinates");
                    let packed = expanded_solution(run.red, &bins);
                    record_incumbent(inst, &packed, &mut run.stats);
                    upper = packed.len();
                    incumbent = Some(packed);
                    external = false;
                    log(&LogEvent::Incumbent { bins: upper, stats: run.stats.clone() });
                }
                SearchOutcome::Exhausted => lower = fixed + k + 1,
                SearchOutcome::TimedOut => break,
            }
        }
    } else {
        let packed = red.expand(&[]);
        if incumbent.is_none() {
            record_incumbent(inst, &packed, &mut run.stats);
        }
        upper = packed.len();
        incumbent = Some(packed);
        external = false;
    }

    let optimal = incumbent.is_some() && lower >= upper;
    run.stats.cuts_added = (pool.len() - pool_start) as u64;
    run.stats.seconds = start.elapsed().as_secs_f64();
    let status = if optimal { SolveStatus::Optimal } else { SolveStatus::TimedOut };
    let lower = lower.min(upper);
    log(&LogEvent::Done { status, lower, upper, stats: run.stats.clone() });
    Solution {
        status,
        lower_bound: lower,
        upper_bound: upper,
        bins: incumbent.unwrap_or_default(),
        stats: run.stats,
        external_bound: external,
    }
}

fn record_incumbent(inst: &Instance, bins: &[PackedBin], stats: &mut SolveStats) {
    let sol = Solution {
        status: SolveStatus::Feasible,
        lower_bound: 0,
        upper_bound: bins.len(),
        bins: bins.to_vec(),
        stats: SolveStats::default(),
        external_bound: false,
    };
    if !inst.is_empty() {
        if let Err(v) = verify_solution(inst, &sol) {
            panic!("incumbent fails verification: {v}");
        }
    }
    stats.incumbent_updates += 1;
}
