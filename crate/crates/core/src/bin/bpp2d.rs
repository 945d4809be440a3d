use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bpp2d::bench::{aggregate, generated_suite, load_dir, render_table, run_all, to_csv};
use bpp2d::dff::compute_bounds;
use bpp2d::heuristic::StartMode;
use bpp2d::instance::{continuous_bound, parse_instance, parse_twobp_collection, DimsOrder, Format, Instance};
use bpp2d::master::{solve_with, CutPool, MasterConfig};
use bpp2d::opp::{opp_check, Verdict};
use bpp2d::preprocess::{enlarged_continuous_bound, preprocess, PreprocessOptions};

#[derive(Parser)]
#[command(name = "bpp2d", version, about = "Exact two-dimensional bin packing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print the solution as JSON.
        #[arg(long)]
        json: bool,
        /// Write the solve log (JSON lines) here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Solve every benchmark file in a directory (or a generated suite) and print the grouped table.
    Bench {
        dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DimsArg::Wh)]
        dims_order: DimsArg,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write per-instance and per-group rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Use generated class instances instead of files.
        #[arg(long)]
        generate: bool,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
        classes: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "20")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        per_group: usize,
    },
    /// Show what preprocessing does to an instance.
    Preprocess {
        path: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Skip bin shrinking and item enlarging.
        #[arg(long)]
        no_shrink: bool,
    },
    /// Print the lower bounds of an instance.
    Bound {
        path: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 8)]
        eta: usize,
    },
    /// Decide whether all items of an instance fit in one bin.
    Opp {
        path: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        time_limit: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DimsArg {
    Wh,
    Hw,
}

impl From<DimsArg> for DimsOrder {
    fn from(d: DimsArg) -> Self {
        match d {
            DimsArg::Wh => DimsOrder::WidthHeight,
            DimsArg::Hw => DimsOrder::HeightWidth,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Native,
    #[value(name = "2bp")]
    TwoBp,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    #[arg(long, value_enum, default_value_t = DimsArg::Wh)]
    dims_order: DimsArg,
    /// Instance number (from 1) inside a multi-instance file.
    #[arg(long, default_value_t = 1)]
    index: usize,
}

#[derive(Args)]
struct SolverArgs {
    /// Seconds per instance.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 700)]
    alpha: usize,
    #[arg(long, default_value_t = 700)]
    beta: usize,
    #[arg(long, default_value_t = 0)]
    gamma: usize,
    #[arg(long, default_value_t = 18)]
    tilde_n: usize,
    #[arg(long, default_value_t = 8)]
    eta: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Known upper bound to start from instead of the heuristic.
    #[arg(long)]
    u0: Option<usize>,
    /// Seconds per check while shrinking an infeasible bin.
    #[arg(long, default_value_t = 2.0)]
    per_check_limit: f64,
}

impl SolverArgs {
    fn config(&self) -> MasterConfig {
        MasterConfig {
            time_limit: Some(Duration::from_secs_f64(self.time_limit)),
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            tilde_n: self.tilde_n.max(2),
            per_check_limit: Some(Duration::from_secs_f64(self.per_check_limit)),
            eta: self.eta,
            seed: self.seed,
            start: self.u0.map_or(StartMode::Heuristic, StartMode::GivenU0),
            ..MasterConfig::default()
        }
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("bpp2d: {msg}");
    ExitCode::from(2)
}

fn load(path: &Path, input: &InputArgs) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let order = DimsOrder::from(input.dims_order);
    let pick = |text: &str| -> Result<Instance, String> {
        let mut all = parse_twobp_collection(text, order).map_err(|e| format!("{}: {e}", path.display()))?;
        if input.index == 0 || input.index > all.len() {
            return Err(format!("{}: instance {} requested, file holds {}", path.display(), input.index, all.len()));
        }
        Ok(all.swap_remove(input.index - 1).instance)
    };
    match input.format {
        FormatArg::Native => parse_instance(&text, Format::Native, order).map_err(|e| format!("{}: {e}", path.display())),
        FormatArg::TwoBp => pick(&text),
        FormatArg::Auto => parse_instance(&text, Format::Native, order).or_else(|_| pick(&text)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Solve { path, input, solver, json, log } => {
            let inst = match load(&path, &input) {
                Ok(i) => i,
                Err(e) => return fail(e),
            };
            let mut sink: Option<std::io::BufWriter<std::fs::File>> = match log {
                Some(p) => match std::fs::File::create(&p) {
                    Ok(f) => Some(std::io::BufWriter::new(f)),
                    Err(e) => return fail(format!("{}: {e}", p.display())),
                },
                None => None,
            };
            let sol = solve_with(&inst, &solver.config(), &mut CutPool::new(), &mut |e| {
                if let Some(w) = sink.as_mut() {
                    let _ = writeln!(w, "{}", serde_json::to_string(e).expect("log event serializes"));
                }
            });
            if json {
                println!("{}", sol.to_json());
            } else {
                println!("status   {:?}", sol.status);
                println!("L        {}", sol.lower_bound);
                println!("U        {}", sol.upper_bound);
                println!("opp      {} ({} memo hits)", sol.stats.opp_calls, sol.stats.memo_hits);
                println!("cuts     {}", sol.stats.cuts_added);
                println!("nodes    {}", sol.stats.nodes);
                println!("seconds  {:.3} (root {:.3}, opp {:.3})", sol.stats.seconds, sol.stats.root_seconds, sol.stats.opp_seconds);
                for (k, b) in sol.bins.iter().enumerate() {
                    let items: Vec<String> = b.placement.coords.iter().map(|p| format!("{}@({},{})", p.id, p.x, p.y)).collect();
                    println!("bin {k}: {}", items.join(" "));
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Bench { dir, dims_order, solver, csv, threads, generate, classes, sizes, per_group } => {
            let instances = if generate {
                if let Some(c) = classes.iter().find(|c| !(1..=10).contains(*c)) {
                    return fail(format!("unknown class {c}"));
                }
                generated_suite(&classes, &sizes, per_group, solver.seed)
            } else {
                let Some(dir) = dir else {
                    return fail("bench needs a directory or --generate");
                };
                match load_dir(&dir, dims_order.into()) {
                    Ok((found, warnings)) => {
                        for w in warnings {
                            eprintln!("warning: skipped {w}");
                        }
                        found
                    }
                    Err(e) => return fail(format!("{}: {e}", dir.display())),
                }
            };
            let rows = run_all(&instances, &solver.config(), threads);
            let groups = aggregate(&rows);
            print!("{}", render_table(&groups));
            if let Some(p) = csv {
                if let Err(e) = std::fs::write(&p, to_csv(&rows, &groups)) {
                    return fail(format!("{}: {e}", p.display()));
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Preprocess { path, input, no_shrink } => {
            let inst = match load(&path, &input) {
                Ok(i) => i,
                Err(e) => return fail(e),
            };
            let red = preprocess(&inst, PreprocessOptions { shrink_enlarge: !no_shrink, fix_and_remove: true });
            println!("bin        {}x{} -> {}x{}", inst.width(), inst.height(), red.width, red.height);
            println!("items      {} -> {} (+{} full-bin)", inst.len(), red.items.len(), red.fixed.len());
            println!("removed    {:.1}%", red.percent_removed());
            for (item, host, rule) in &red.record.removed_items {
                println!("  item {item} packed with {host} ({rule:?})");
            }
            for (lead, (w, h)) in &red.record.enlarged {
                let o = &inst.items()[*lead];
                println!("  item {lead} enlarged {}x{} -> {w}x{h}", o.width, o.height);
            }
            ExitCode::SUCCESS
        }
        Cmd::Bound { path, input, eta } => {
            let inst = match load(&path, &input) {
                Ok(i) => i,
                Err(e) => return fail(e),
            };
            let b = compute_bounds(&inst, eta, 0);
            println!("Lc       {} ({})", bpp2d::instance::continuous_bound_ceil(&inst), continuous_bound(&inst));
            println!("L'c      {:.4}", enlarged_continuous_bound(&inst));
            println!("L2_CCM   {}", b.ccm);
            println!("L_BKRS   {}", b.bkrs);
            println!("L0       {}", b.l0);
            ExitCode::SUCCESS
        }
        Cmd::Opp { path, input, time_limit } => {
            let inst = match load(&path, &input) {
                Ok(i) => i,
                Err(e) => return fail(e),
            };
            let r = opp_check(&inst.dims(), inst.width(), inst.height(), time_limit.map(Duration::from_secs_f64));
            match &r.verdict {
                Verdict::Feasible(p) => {
                    println!("feasible");
                    for c in &p.coords {
                        println!("  {} at ({}, {})", c.id, c.x, c.y);
                    }
                }
                Verdict::Infeasible => println!("infeasible"),
                Verdict::Timeout => println!("timeout"),
            }
            println!("nodes {} seconds {:.3}", r.nodes, r.seconds);
            ExitCode::SUCCESS
        }
    }
}
