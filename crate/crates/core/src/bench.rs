//! Benchmark harness: instance classes, per-instance runs, grouped report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dff::guarded_ceil;
use crate::instance::{continuous_bound_ceil, parse_twobp_collection, DimsOrder, Instance, SolveStatus};
use crate::master::{solve_with, CutPool, LogEvent, MasterConfig};
use crate::preprocess::{enlarged_continuous_bound, preprocess};

/// Random instance of one of the ten standard classes.
///
/// Classes 1 to 6 draw both sides uniformly from a class range; classes 7 to 10 mix four
/// item shapes, with 70% of the items of the dominant shape.
pub fn generate_class(class: u32, n: usize, seed: u64) -> Instance {
    assert!((1..=10).contains(&class), "class must be in 1..=10");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((class as u64) << 32) ^ ((n as u64) << 40));
    let (bin, lo, hi) = match class {
        1 => (10, 1, 10),
        2 => (30, 1, 10),
        3 => (40, 1, 35),
        4 => (100, 1, 35),
        5 => (100, 1, 100),
        6 => (300, 1, 100),
        _ => (100, 0, 0),
    };
    let dims: Vec<(u32, u32)> = (0..n)
        .map(|_| {
            if class <= 6 {
                return (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
            }
            let dominant = class - 6;
            let roll: f64 = rng.gen();
            let shape = if roll < 0.7 {
                dominant
            } else {
                let others: Vec<u32> = (1..=4).filter(|&t| t != dominant).collect();
                others[((roll - 0.7) / 0.1).floor().min(2.0) as usize]
            };
            let big = |rng: &mut ChaCha8Rng, lo: u32| rng.gen_range(lo..=bin);
            let small = |rng: &mut ChaCha8Rng| rng.gen_range(1..=bin / 2);
            match shape {
                1 => (big(&mut rng, 2 * bin / 3), small(&mut rng)),
                2 => (small(&mut rng), big(&mut rng, 2 * bin / 3)),
                3 => (big(&mut rng, bin / 2), big(&mut rng, bin / 2)),
                _ => (small(&mut rng), small(&mut rng)),
            }
        })
        .collect();
    Instance::new(bin, bin, &dims).expect("generated items fit the bin")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchInstance {
    pub name: String,
    pub class: u32,
    pub instance: Instance,
}

/// Generated stand-ins for the standard suite: `per_group` instances per class and size.
pub fn generated_suite(classes: &[u32], sizes: &[usize], per_group: usize, seed: u64) -> Vec<BenchInstance> {
    let mut out = Vec::new();
    for &class in classes {
        for &n in sizes {
            for k in 0..per_group {
                out.push(BenchInstance {
                    name: format!("gen_cl{class:02}_{n:03}_{:02}", k + 1),
                    class,
                    instance: generate_class(class, n, seed + k as u64),
                });
            }
        }
    }
    out
}

/// Class number from names like `cl07_040_03` or `Class_07.2bp`.
fn class_from_name(name: &str) -> Option<u32> {
    let lower = name.to_ascii_lowercase();
    let at = lower.find("cl")?;
    let digits: String = lower[at..].chars().skip_while(|c| !c.is_ascii_digit()).take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

/// Reads every benchmark file under `dir`. Unreadable files produce a warning instead.
pub fn load_dir(dir: &Path, order: DimsOrder) -> std::io::Result<(Vec<BenchInstance>, Vec<String>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_file()).collect();
    paths.sort();
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for path in paths {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                warnings.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        match parse_twobp_collection(&text, order) {
            Ok(entries) => {
                let single = entries.len() == 1;
                for (k, e) in entries.into_iter().enumerate() {
                    let class = e.class().or_else(|| class_from_name(&stem)).unwrap_or(0);
                    let name = if single { stem.clone() } else { format!("{stem}_{:03}", k + 1) };
                    out.push(BenchInstance { name, class, instance: e.instance });
                }
            }
            Err(e) => warnings.push(format!("{}: {e}", path.display())),
        }
    }
    Ok((out, warnings))
}

/// Measurements for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub name: String,
    pub class: u32,
    pub n: usize,
    pub lc: usize,
    pub rmv: f64,
    pub lc_prime: usize,
    pub l0: usize,
    pub u0: usize,
    pub sec0: f64,
    pub opt0: bool,
    pub lower: usize,
    pub upper: usize,
    pub opp: u64,
    pub cuts: u64,
    pub sec_opp: f64,
    pub sec: f64,
    pub opt: bool,
    /// OPP calls as reported by the solve log.
    pub logged_opp: u64,
}

pub fn run_instance(b: &BenchInstance, cfg: &MasterConfig) -> InstanceRow {
    let inst = &b.instance;
    let lc = continuous_bound_ceil(inst);
    let lc_prime = guarded_ceil(enlarged_continuous_bound(inst));
    let rmv = preprocess(inst, cfg.preprocess).percent_removed();
    let (mut l0, mut u0, mut sec0, mut logged_opp) = (0, 0, 0.0, 0);
    let sol = solve_with(inst, cfg, &mut CutPool::new(), &mut |e| match e {
        LogEvent::Root { lower, upper, seconds, .. } => {
            l0 = *lower;
            u0 = *upper;
            sec0 = *seconds;
        }
        LogEvent::Done { stats, .. } => logged_opp = stats.opp_calls,
        _ => {}
    });
    InstanceRow {
        name: b.name.clone(),
        class: b.class,
        n: inst.len(),
        lc,
        rmv,
        lc_prime,
        l0,
        u0,
        sec0,
        opt0: l0 == u0,
        lower: sol.lower_bound,
        upper: sol.upper_bound,
        opp: sol.stats.opp_calls,
        cuts: sol.stats.cuts_added,
        sec_opp: sol.stats.opp_seconds,
        sec: sol.stats.seconds,
        opt: sol.status == SolveStatus::Optimal,
        logged_opp,
    }
}

/// Runs every instance on `threads` workers (0: all cores); rows come back in input order.
pub fn run_all(instances: &[BenchInstance], cfg: &MasterConfig, threads: usize) -> Vec<InstanceRow> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    pool.install(|| instances.par_iter().map(|b| run_instance(b, cfg)).collect())
}

/// Sums over one `(class, n)` group; `rmv` is the mean percentage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub class: u32,
    pub n: usize,
    pub instances: usize,
    pub lc: usize,
    pub rmv: f64,
    pub lc_prime: usize,
    pub l0: usize,
    pub u0: usize,
    pub sec0: f64,
    pub opt0: usize,
    pub lower: usize,
    pub upper: usize,
    pub opp: u64,
    pub cuts: u64,
    pub sec_opp: f64,
    pub sec: f64,
    pub opt: usize,
}

/// One row per `(class, n)`, ordered by class then size.
pub fn aggregate(rows: &[InstanceRow]) -> Vec<BenchRow> {
    let mut groups: BTreeMap<(u32, usize), Vec<&InstanceRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.class, r.n)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((class, n), g)| BenchRow {
            class,
            n,
            instances: g.len(),
            lc: g.iter().map(|r| r.lc).sum(),
            rmv: g.iter().map(|r| r.rmv).sum::<f64>() / g.len() as f64,
            lc_prime: g.iter().map(|r| r.lc_prime).sum(),
            l0: g.iter().map(|r| r.l0).sum(),
            u0: g.iter().map(|r| r.u0).sum(),
            sec0: g.iter().map(|r| r.sec0).sum(),
            opt0: g.iter().filter(|r| r.opt0).count(),
            lower: g.iter().map(|r| r.lower).sum(),
            upper: g.iter().map(|r| r.upper).sum(),
            opp: g.iter().map(|r| r.opp).sum(),
            cuts: g.iter().map(|r| r.cuts).sum(),
            sec_opp: g.iter().map(|r| r.sec_opp).sum(),
            sec: g.iter().map(|r| r.sec).sum(),
            opt: g.iter().filter(|r| r.opt).count(),
        })
        .collect()
}

/// Fixed-width table in the column order of the grouped report.
pub fn render_table(groups: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>4} {:>6} {:>6} {:>6} {:>6} {:>6} {:>8} {:>4} {:>6} {:>6} {:>8} {:>7} {:>9} {:>9} {:>4}",
        "class", "n", "Lc", "%rmv", "L'c", "L0", "U0", "sec0", "opt0", "L", "U", "#OPP", "#cuts", "secOPP", "sec", "opt"
    );
    for g in groups {
        let _ = writeln!(
            out,
            "{:>5} {:>4} {:>6} {:>6.1} {:>6} {:>6} {:>6} {:>8.2} {:>4} {:>6} {:>6} {:>8} {:>7} {:>9.2} {:>9.2} {:>4}",
            g.class, g.n, g.lc, g.rmv, g.lc_prime, g.l0, g.u0, g.sec0, g.opt0, g.lower, g.upper, g.opp, g.cuts, g.sec_opp, g.sec, g.opt
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CsvRecord {
    row: String,
    name: String,
    class: u32,
    n: usize,
    instances: usize,
    lc: usize,
    rmv: f64,
    lc_prime: usize,
    l0: usize,
    u0: usize,
    sec0: f64,
    opt0: usize,
    lower: usize,
    upper: usize,
    opp: u64,
    cuts: u64,
    sec_opp: f64,
    sec: f64,
    opt: usize,
    logged_opp: u64,
}

/// CSV with one `instance` row per instance followed by one `group` row per group.
pub fn to_csv(rows: &[InstanceRow], groups: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(CsvRecord {
            row: "instance".into(),
            name: r.name.clone(),
            class: r.class,
            n: r.n,
            instances: 1,
            lc: r.lc,
            rmv: r.rmv,
            lc_prime: r.lc_prime,
            l0: r.l0,
            u0: r.u0,
            sec0: r.sec0,
            opt0: r.opt0 as usize,
            lower: r.lower,
            upper: r.upper,
            opp: r.opp,
            cuts: r.cuts,
            sec_opp: r.sec_opp,
            sec: r.sec,
            opt: r.opt as usize,
            logged_opp: r.logged_opp,
        })
        .expect("csv write");
    }
    for g in groups {
        w.serialize(CsvRecord {
            row: "group".into(),
            name: String::new(),
            class: g.class,
            n: g.n,
            instances: g.instances,
            lc: g.lc,
            rmv: g.rmv,
            lc_prime: g.lc_prime,
            l0: g.l0,
            u0: g.u0,
            sec0: g.sec0,
            opt0: g.opt0,
            lower: g.lower,
            upper: g.upper,
            opp: g.opp,
            cuts: g.cuts,
            sec_opp: g.sec_opp,
            sec: g.sec,
            opt: g.opt,
            logged_opp: 0,
        })
        .expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("csv is utf-8")
}

/// Inverse of [`to_csv`].
pub fn from_csv(text: &str) -> Result<(Vec<InstanceRow>, Vec<BenchRow>), csv::Error> {
    let mut rows = Vec::new();
    let mut groups = Vec::new();
    for rec in csv::Reader::from_reader(text.as_bytes()).deserialize::<CsvRecord>() {
        let r = rec?;
        if r.row == "group" {
            groups.push(BenchRow {
                class: r.class,
                n: r.n,
                instances: r.instances,
                lc: r.lc,
                rmv: r.rmv,
                lc_prime: r.lc_prime,
                l0: r.l0,
                u0: r.u0,
                sec0: r.sec0,
                opt0: r.opt0,
                lower: r.lower,
                upper: r.upper,
                opp: r.opp,
                cuts: r.cuts,
                sec_opp: r.sec_opp,
                sec: r.sec,
                opt: r.opt,
            });
        } else {
            rows.push(InstanceRow {
                name: r.name,
                class: r.class,
                n: r.n,
                lc: r.lc,
                rmv: r.rmv,
                lc_prime: r.lc_prime,
                l0: r.l0,
                u0: r.u0,
                sec0: r.sec0,
                opt0: r.opt0 == 1,
                lower: r.lower,
                upper: r.upper,
                opp: r.opp,
                cuts: r.cuts,
                sec_opp: r.sec_opp,
                sec: r.sec,
                opt: r.opt == 1,
                logged_opp: r.logged_opp,
            });
        }
    }
    Ok((rows, groups))
}
