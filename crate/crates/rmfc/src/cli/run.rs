//! Command dispatch and run reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_traits::{One, ToPrimitive};
use sha2::{Digest, Sha256};

use super::format::{serialize_metric, serialize_tree, Instance, Solution, TreeFile};
use super::generate::{generate_metric, generate_tree, MetricKind};
use crate::compress_tree::compress;
use crate::dp_tree::{exhaustive_exact, EXHAUSTIVE_LIMIT};
use crate::error::{Error, Result};
use crate::nukc::analysis::{classify, PairClass};
use crate::nukc::{
    budget_stretch as nukc_stretch, compress_nukc, coverage_dilation, exhaustive_nukc, is_feasible, level_counts as nukc_counts,
    solve_nukc, solve_snukc, CenterSet, NukcLimits, NukcThresholds, SnukcInstance,
};
use crate::oracles::{core_vertices, thinned_core, thinned_core_bounds, AnalysisContext};
use crate::pipeline_tree::{solve_rmfc, solve_srmfc, Limits, RmfcMode};
use crate::ratio::{fmt_q, q, Q};
use crate::tree_core::{budget_stretch, check_protection, level_counts, stretch_of, ProtectionSet, RmfcInstance, SrmfcInstance, Stretch};

/// Exit status for successful runs.
pub const EXIT_OK: i32 = 0;
/// Exit status for infeasible instances, failed checks and solver failures.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for malformed input.
pub const EXIT_MALFORMED: i32 = 2;
/// Exit status for runs stopped by a resource cap.
pub const EXIT_RESOURCE: i32 = 3;

/// Largest metric handed to the exhaustive oracle inside reports.
pub const ORACLE_MAX_POINTS: usize = 10;

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MalformedInput(_) => EXIT_MALFORMED,
        Error::ResourceCap(_) => EXIT_RESOURCE,
        _ => EXIT_FAILED,
    }
}

/// Problem selected by `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Rmfc,
    Srmfc,
    Nukc,
    Snukc,
}

/// Search limits for every solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: Option<usize>,
    pub max_partitions: Option<usize>,
    pub max_support: Option<usize>,
    pub max_solutions: Option<usize>,
}

impl SearchLimits {
    fn tree(&self) -> Limits {
        let d = Limits::default();
        Limits {
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
            max_partitions: self.max_partitions.unwrap_or(d.max_partitions),
            max_support: self.max_support.unwrap_or(d.max_support),
        }
    }

    fn metric(&self) -> NukcLimits {
        let d = NukcLimits::default();
        NukcLimits {
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
            max_solutions: self.max_solutions.unwrap_or(d.max_solutions),
            max_support: self.max_support.unwrap_or(d.max_support),
            ..d
        }
    }
}

/// A command applied to one instance document.
#[derive(Debug, Clone)]
pub enum Command {
    Solve { problem: Problem, mode: RmfcMode, eps: Q, limits: SearchLimits },
    /// Checks a solution at stretch `alpha` (and dilation `beta` for
    /// metrics). `classic` switches to per-level budgets.
    Check { solution: Solution, alpha: Q, beta: Q, classic: bool },
    Compress { eps: Q },
    Oracle,
    Analyze { eps: Q },
}

/// Instance family swept by `bench`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Tree { n: usize, depth: usize, branching: usize },
    Metric { n: usize, kind: MetricKind, levels: usize },
}

/// Parameters of a benchmark sweep.
#[derive(Debug, Clone)]
pub struct BenchParams {
    pub family: Family,
    pub problem: Problem,
    pub mode: RmfcMode,
    pub eps: Q,
    pub count: usize,
    pub seed: u64,
    pub threads: usize,
    pub limits: SearchLimits,
}

/// Certificate attached to a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Prefix-budget stretch of a protecting set.
    Stretch(Q),
    /// Per-level budget of a classic protecting set.
    Budget(u64),
    /// Budget stretch and coverage dilation of a center set.
    Bicriteria { alpha: Q, beta: Q },
}

/// Outcome of one command.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    /// `sha256:` digest of the input document.
    pub digest: String,
    pub seed: Option<u64>,
    /// False when a check failed.
    pub ok: bool,
    /// Command-specific result lines.
    pub fields: BTreeMap<String, String>,
    pub solution: Option<Solution>,
    pub certificate: Option<Certificate>,
    /// Claimed guarantee; `None` whenever a search was truncated.
    pub guarantee: Option<String>,
    pub truncated: bool,
    pub wall: Duration,
    /// Document produced by the command (instance or table).
    pub output: Option<String>,
}

impl RunReport {
    fn new(command: &str, input: &str, seed: Option<u64>) -> Self {
        RunReport {
            command: command.to_string(),
            digest: digest(input),
            seed,
            ok: true,
            fields: BTreeMap::new(),
            solution: None,
            certificate: None,
            guarantee: None,
            truncated: false,
            wall: Duration::ZERO,
            output: None,
        }
    }

    fn set(&mut self, k: &str, v: impl ToString) {
        self.fields.insert(k.to_string(), v.to_string());
    }

    /// Exit status of a completed run.
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }

    /// Renders `key: value` lines, followed by the output document if any.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "digest: {}", self.digest);
        let _ = writeln!(s, "seed: {}", self.seed.map_or("none".into(), |x| x.to_string()));
        let _ = writeln!(s, "status: {}", if self.ok { "ok" } else { "failed" });
        for (k, v) in &self.fields {
            let _ = writeln!(s, "{k}: {v}");
        }
        if let Some(sol) = &self.solution {
            let _ = writeln!(s, "solution: {}", solution_line(sol));
        }
        if let Some(c) = &self.certificate {
            let text = match c {
                Certificate::Stretch(a) => format!("stretch {}", fmt_q(a)),
                Certificate::Budget(b) => format!("budget {b}"),
                Certificate::Bicriteria { alpha, beta } => format!("alpha {} beta {}", fmt_q(alpha), fmt_q(beta)),
            };
            let _ = writeln!(s, "certificate: {text}");
        }
        let _ = writeln!(s, "guarantee: {}", self.guarantee.as_deref().unwrap_or("none"));
        let _ = writeln!(s, "truncated: {}", self.truncated);
        let _ = writeln!(s, "wall_ms: {}", self.wall.as_millis());
        if let Some(o) = &self.output {
            s.push('\n');
            s += o;
        }
        s
    }
}

fn digest(text: &str) -> String {
    let h = Sha256::digest(text.as_bytes());
    let hex: String = h.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn solution_line(s: &Solution) -> String {
    match s {
        Solution::Protect(r) => r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
        Solution::Centers(c) => c.iter().map(|(p, l)| format!("{p}@{l}")).collect::<Vec<_>>().join(" "),
    }
}

fn fmt_stretch(s: &Stretch) -> String {
    match s {
        Stretch::Finite(a) => fmt_q(a),
        Stretch::Infinite => "infinite".into(),
        Stretch::Unprotected => "unprotected".into(),
    }
}

fn mapped(r: &ProtectionSet, map: &[usize]) -> ProtectionSet {
    r.iter().map(|&v| map[v]).collect()
}

/// Runs `cmd` on the instance document `input`.
pub fn run(command: &str, cmd: &Command, input: &Instance, input_text: &str, seed: Option<u64>) -> Result<RunReport> {
    let start = Instant::now();
    let mut rep = RunReport::new(command, input_text, seed);
    match (cmd, input) {
        (Command::Solve { problem, mode, eps, limits }, Instance::Tree(f)) => solve_tree(&mut rep, f, *problem, *mode, eps, limits)?,
        (Command::Solve { problem, eps, limits, .. }, Instance::Metric(m)) => solve_metric(&mut rep, m, *problem, eps, limits)?,
        (Command::Check { solution, alpha, classic, .. }, Instance::Tree(f)) => check_tree(&mut rep, f, solution, alpha, *classic)?,
        (Command::Check { solution, alpha, beta, classic }, Instance::Metric(m)) => {
            check_metric(&mut rep, m, solution, alpha, beta, *classic)?
        }
        (Command::Compress { eps }, Instance::Tree(f)) => {
            let (inst, _) = f.srmfc()?;
            let c = compress(&inst, eps)?;
            rep.set("levels_before", inst.height());
            rep.set("levels_after", c.inst.height());
            rep.output = Some(serialize_tree(&TreeFile::from_srmfc(&c.inst)));
        }
        (Command::Compress { eps }, Instance::Metric(m)) => {
            let (c, _) = compress_nukc(m, eps, m.levels())?;
            rep.set("levels_before", m.levels());
            rep.set("levels_after", c.levels());
            rep.output = Some(serialize_metric(&c));
        }
        (Command::Oracle, Instance::Tree(f)) => {
            let (inst, map) = f.srmfc()?;
            let ex = exhaustive_exact(&inst)?;
            rep.set("alpha_opt", fmt_stretch(&ex.alpha));
            rep.set("classic_budget_opt", ex.classic_budget);
            rep.set("antichains", ex.enumerated);
            rep.solution = Some(Solution::Protect(mapped(&ex.witness, &map)));
        }
        (Command::Oracle, Instance::Metric(m)) => match exhaustive_nukc(m)? {
            Some(o) => {
                rep.set("beta_opt", fmt_q(&o.beta));
                rep.solution = Some(Solution::Centers(o.witness));
            }
            None => {
                rep.ok = false;
                rep.set("beta_opt", "none (no budget-respecting cover)");
            }
        },
        (Command::Analyze { eps }, Instance::Tree(f)) => analyze_tree(&mut rep, f, eps)?,
        (Command::Analyze { eps }, Instance::Metric(m)) => analyze_metric(&mut rep, m, eps)?,
    }
    rep.wall = start.elapsed();
    Ok(rep)
}

fn solve_tree(rep: &mut RunReport, f: &TreeFile, problem: Problem, mode: RmfcMode, eps: &Q, limits: &SearchLimits) -> Result<()> {
    match problem {
        Problem::Rmfc => {
            let (inst, map) = f.rmfc()?;
            let o = solve_rmfc(&inst, mode, eps, &limits.tree())?;
            let counts = level_counts(&inst.tree, &o.solution);
            if !check_protection(&inst.tree, &o.solution) || counts.iter().any(|&c| c as u64 > o.budget) {
                return Err(Error::PreconditionViolated("solver output failed re-verification".into()));
            }
            rep.set("mode", mode_name(mode));
            rep.set("budget", o.budget);
            rep.set("guess", o.guess);
            if inst.tree.vertex_count() <= EXHAUSTIVE_LIMIT {
                let uni = RmfcInstance { tree: inst.tree.clone(), budget: 1 }.to_srmfc();
                let opt = exhaustive_exact(&uni)?.classic_budget as u64;
                rep.set("budget_opt", opt);
                rep.set("within_target", o.budget <= mode.target(opt, eps));
            }
            rep.truncated = o.truncated;
            if !o.truncated {
                rep.guarantee = Some(match mode {
                    RmfcMode::TwoApprox => "budget <= 2 B_OPT".into(),
                    RmfcMode::ThreeApprox => "budget <= 3 B_OPT".into(),
                    RmfcMode::Budget4Eps => format!("budget <= ceil((4+{}) B_OPT)", fmt_q(eps)),
                });
            }
            rep.certificate = Some(Certificate::Budget(o.budget));
            rep.solution = Some(Solution::Protect(mapped(&o.solution, &map)));
        }
        Problem::Srmfc => {
            let (inst, map) = f.srmfc()?;
            let o = solve_srmfc(&inst, eps, &limits.tree())?;
            if stretch_of(&inst, &o.solution) != Stretch::Finite(o.stretch.clone()) {
                return Err(Error::PreconditionViolated("solver output failed re-verification".into()));
            }
            if inst.tree.vertex_count() <= EXHAUSTIVE_LIMIT {
                let ex = exhaustive_exact(&inst)?;
                rep.set("alpha_opt", fmt_stretch(&ex.alpha));
                if let Some(a) = ex.alpha.finite() {
                    rep.set("within_target", o.stretch <= &o.guarantee * a);
                }
            }
            rep.truncated = o.truncated;
            rep.set("eps_in_range", o.eps_in_range);
            rep.set("nodes", o.nodes);
            if !o.truncated && o.eps_in_range {
                rep.guarantee = Some(format!("stretch <= {} alpha_OPT", fmt_q(&o.guarantee)));
            }
            rep.certificate = Some(Certificate::Stretch(o.stretch));
            rep.solution = Some(Solution::Protect(mapped(&o.solution, &map)));
        }
        _ => return Err(Error::MalformedInput("k-center problems need a metric instance".into())),
    }
    Ok(())
}

fn solve_metric(rep: &mut RunReport, m: &SnukcInstance, problem: Problem, eps: &Q, limits: &SearchLimits) -> Result<()> {
    let (smooth, centers, alpha) = match problem {
        Problem::Snukc => {
            let o = solve_snukc(m, eps, &limits.metric())?;
            let a = o.alpha.clone();
            (o, None, a)
        }
        Problem::Nukc => {
            let o = solve_nukc(m, eps, &limits.metric())?;
            (o.smooth, Some(o.centers), o.alpha)
        }
        _ => return Err(Error::MalformedInput("tree problems need a tree instance".into())),
    };
    let classic = centers.is_some();
    let c = centers.unwrap_or_else(|| smooth.centers.clone());
    let beta = coverage_dilation(m, &c).ok_or_else(|| Error::PreconditionViolated("solver output covers nothing".into()))?;
    if !is_feasible(m, &c, &alpha, &beta, !classic) {
        return Err(Error::PreconditionViolated("solver output failed re-verification".into()));
    }
    if m.n() <= ORACLE_MAX_POINTS {
        if let Ok(Some(o)) = exhaustive_nukc(m) {
            rep.set("beta_opt", fmt_q(&o.beta));
            rep.set("within_target", beta <= &smooth.dilation_constant * &o.beta);
        }
    }
    rep.truncated = smooth.truncated;
    rep.set("eps_in_range", smooth.eps_in_range);
    rep.set("fallback", smooth.fallback);
    rep.set("guesses", smooth.guesses_tried);
    rep.set("nodes", smooth.nodes);
    if smooth.certified && !smooth.truncated && !smooth.fallback && smooth.eps_in_range {
        let g = smooth.beta_guess.as_ref().map_or("0".into(), fmt_q);
        rep.guarantee = Some(format!(
            "alpha <= {} (prefix), beta <= {} x guess {g}",
            fmt_q(&(Q::one() + q(14) * eps)),
            fmt_q(&smooth.dilation_constant)
        ));
    }
    rep.certificate = Some(Certificate::Bicriteria { alpha, beta });
    rep.solution = Some(Solution::Centers(c));
    Ok(())
}

fn check_tree(rep: &mut RunReport, f: &TreeFile, sol: &Solution, alpha: &Q, classic: bool) -> Result<()> {
    let r = sol.protection().cloned().ok_or_else(|| Error::MalformedInput("center solutions need a metric instance".into()))?;
    let n = f.tree.vertex_count();
    if let Some(v) = r.iter().find(|&&v| v >= n) {
        return Err(Error::MalformedInput(format!("vertex {v} out of range 0..{n}")));
    }
    let (norm, map) = f.srmfc()?;
    let mut back = vec![None; n];
    for (new, &old) in map.iter().enumerate() {
        back[old] = Some(new);
    }
    let inner: ProtectionSet = r.iter().filter_map(|&v| back[v]).collect();
    let protecting = !r.contains(&f.tree.root()) && check_protection(&norm.tree, &inner);
    let full = SrmfcInstance::new(f.tree.clone(), f.level_budgets()?)?;
    let counts = level_counts(&f.tree, &r);
    let usage: Vec<String> =
        (1..=full.height()).map(|l| format!("{}/{}", counts[l], fmt_q(full.budget(l)))).collect();
    rep.set("protecting", protecting);
    rep.set("level_usage", usage.join(" "));
    let stretch = budget_stretch(&full, &r);
    rep.set("stretch", fmt_stretch(&stretch));
    let within = if classic {
        (1..=full.height()).all(|l| q(counts[l] as i64) <= alpha * full.budget(l))
    } else {
        stretch.at_most(alpha)
    };
    rep.set("within_budget", within);
    rep.ok = protecting && within;
    Ok(())
}

fn check_metric(rep: &mut RunReport, m: &SnukcInstance, sol: &Solution, alpha: &Q, beta: &Q, classic: bool) -> Result<()> {
    let c: CenterSet = sol.centers().ok_or_else(|| Error::MalformedInput("protect solutions need a tree instance".into()))?;
    if let Some(&(p, l)) = c.iter().find(|&&(p, l)| p >= m.n() || l > m.levels()) {
        return Err(Error::MalformedInput(format!("center ({p}, {l}) out of range")));
    }
    let counts = nukc_counts(m.levels(), &c);
    let usage: Vec<String> = (1..=m.levels()).map(|l| format!("{}/{}", counts[l - 1], fmt_q(m.k(l)))).collect();
    rep.set("level_usage", usage.join(" "));
    rep.set("dilation", coverage_dilation(m, &c).map_or("uncovered".into(), |b| fmt_q(&b)));
    rep.set("stretch", nukc_stretch(m, &c, !classic).map_or("infinite".into(), |a| fmt_q(&a)));
    rep.ok = is_feasible(m, &c, alpha, beta, !classic);
    Ok(())
}

fn analyze_tree(rep: &mut RunReport, f: &TreeFile, eps: &Q) -> Result<()> {
    let (inst, map) = f.srmfc()?;
    let ctx = AnalysisContext::new(&inst, eps)?;
    let ids = |s: &std::collections::BTreeSet<usize>| s.iter().map(|&v| map[v].to_string()).collect::<Vec<_>>().join(" ");
    rep.set("h_hat", ctx.th.h_hat);
    rep.set("h_check", ctx.th.h_check);
    rep.set("opt", ids(&ctx.opt));
    rep.set("core_h_hat", ids(&core_vertices(&ctx, ctx.th.h_hat)));
    rep.set("core_h_check", ids(&core_vertices(&ctx, ctx.th.h_check)));
    rep.set("thinned_core", ids(&thinned_core(&ctx)));
    let (lo, hi) = thinned_core_bounds(&ctx);
    rep.set("thinned_core_bounds", format!("low {lo} high {hi}"));
    rep.ok = lo && hi;
    Ok(())
}

fn analyze_metric(rep: &mut RunReport, m: &SnukcInstance, eps: &Q) -> Result<()> {
    let opt = exhaustive_nukc(m)?.ok_or(Error::NoSolutionFound)?;
    // Scaling radii by the optimum makes the instance 1-feasible.
    let scaled = m.scaled_radii(&opt.beta);
    let th = NukcThresholds::new(&scaled, eps)?;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in 1..=th.h_hat {
        for v in 0..m.n() {
            let name = match classify(&scaled, &th, (v, l), &opt.witness) {
                PairClass::Big => "big",
                PairClass::Small => "small",
                PairClass::Sep => "separable",
                PairClass::NonSep => "non_separable",
            };
            *counts.entry(name).or_default() += 1;
        }
    }
    rep.set("beta_opt", fmt_q(&opt.beta));
    rep.set("h_hat", th.h_hat);
    rep.set("h_check", th.h_check);
    rep.set("pair_classes", counts.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "));
    rep.solution = Some(Solution::Centers(opt.witness));
    Ok(())
}

/// Mode name as accepted on the command line.
pub fn mode_name(m: RmfcMode) -> &'static str {
    match m {
        RmfcMode::TwoApprox => "two_approx",
        RmfcMode::ThreeApprox => "three_approx",
        RmfcMode::Budget4Eps => "budget_4eps",
    }
}

/// One row of a benchmark table.
#[derive(Debug, Clone)]
struct Row {
    index: usize,
    seed: u64,
    n: usize,
    levels: usize,
    value: String,
    opt: String,
    ratio: String,
    ms: u128,
    truncated: bool,
    error: Option<String>,
}

fn ratio(a: &Q, b: &Q) -> String {
    if b == &Q::default() {
        return "-".into();
    }
    let r = a / b;
    format!("{:.4}", r.to_f64().unwrap_or(f64::NAN))
}

fn bench_one(p: &BenchParams, index: usize) -> Row {
    let seed = p.seed.wrapping_add(index as u64);
    let start = Instant::now();
    let mut row = Row {
        index,
        seed,
        n: 0,
        levels: 0,
        value: "-".into(),
        opt: "-".into(),
        ratio: "-".into(),
        ms: 0,
        truncated: false,
        error: None,
    };
    let res: Result<()> = (|| {
        match p.family {
            Family::Tree { n, depth, branching } => {
                let inst = generate_tree(n, depth, branching, seed)?;
                row.n = n;
                row.levels = inst.height();
                if p.problem == Problem::Rmfc {
                    let ri = RmfcInstance { tree: inst.tree.clone(), budget: 1 };
                    let o = solve_rmfc(&ri, p.mode, &p.eps, &p.limits.tree())?;
                    row.ms = start.elapsed().as_millis();
                    row.truncated = o.truncated;
                    row.value = o.budget.to_string();
                    let opt = exhaustive_exact(&ri.to_srmfc())?.classic_budget as i64;
                    row.opt = opt.to_string();
                    row.ratio = ratio(&q(o.budget as i64), &q(opt));
                } else {
                    let o = solve_srmfc(&inst, &p.eps, &p.limits.tree())?;
                    row.ms = start.elapsed().as_millis();
                    row.truncated = o.truncated;
                    row.value = fmt_q(&o.stretch);
                    if let Some(a) = exhaustive_exact(&inst)?.alpha.finite() {
                        row.opt = fmt_q(a);
                        row.ratio = ratio(&o.stretch, a);
                    }
                }
            }
            Family::Metric { n, kind, levels } => {
                let inst = generate_metric(n, kind, levels, seed)?;
                row.n = n;
                row.levels = levels;
                let o = solve_snukc(&inst, &p.eps, &p.limits.metric())?;
                row.ms = start.elapsed().as_millis();
                row.truncated = o.truncated;
                row.value = format!("{}/{}", fmt_q(&o.alpha), fmt_q(&o.beta));
                if let Some(opt) = exhaustive_nukc(&inst)? {
                    row.opt = fmt_q(&opt.beta);
                    row.ratio = ratio(&o.beta, &opt.beta);
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = res {
        row.error = Some(e.to_string());
        row.ms = start.elapsed().as_millis();
    }
    row
}

/// Sweeps `count` seeded instances and returns a tab-separated table with
/// one row per instance. Instances run on up to `threads` threads.
pub fn bench(command: &str, p: &BenchParams) -> Result<RunReport> {
    if p.count == 0 {
        return Err(Error::ParameterOutOfRange("count must be positive".into()));
    }
    let start = Instant::now();
    let threads = p.threads.max(1);
    let mut rows: Vec<Row> = Vec::with_capacity(p.count);
    let indices: Vec<usize> = (0..p.count).collect();
    for chunk in indices.chunks(threads) {
        let done: Vec<Row> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|&i| s.spawn(move || bench_one(p, i))).collect();
            handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
        });
        rows.extend(done);
    }
    let mut table = String::from("index\tseed\tn\tlevels\tvalue\topt\tratio\tms\ttruncated\terror\n");
    for r in &rows {
        let _ = writeln!(
            table,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.index,
            r.seed,
            r.n,
            r.levels,
            r.value,
            r.opt,
            r.ratio,
            r.ms,
            r.truncated,
            r.error.as_deref().unwrap_or("-")
        );
    }
    let mut rep = RunReport::new(command, &table, Some(p.seed));
    rep.truncated = rows.iter().any(|r| r.truncated);
    rep.set("instances", rows.len());
    rep.set("truncated_runs", rows.iter().filter(|r| r.truncated).count());
    rep.set("errors", rows.iter().filter(|r| r.error.is_some()).count());
    rep.output = Some(table);
    rep.wall = start.elapsed();
    Ok(rep)
}
