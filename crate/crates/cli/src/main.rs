//! `btq`: build quotients, their homology and modular symbols, and check
//! the index and group-homology bounds.
//!
//! Every option can also come from a flat `key = value` file given with
//! `--config`; flags win over the file. Exit codes: 2 for configuration
//! errors, 3 when a budget runs out, 4 when a bound is violated.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use btq::grouphom::harvest_json;
use btq::quotient::{build_quotient, transition_between, GroupSpec, QuotientComplex, QuotientJson, QuotientOptions};
use btq::symbols::{bound_constants, index_and_exponent, ms_lattice, GeneratorStream, StreamBudget};
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "btq", version, about = "Quotients of Bruhat-Tits buildings over F_q(t) and their modular symbols")]
struct Cli {
    /// Flat `key = value` configuration file. Flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized work. No command currently draws random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker cap. Computations run on one thread.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct GroupArgs {
    /// Size of the constant field (a prime).
    #[arg(long)]
    q: Option<u32>,
    /// Rank.
    #[arg(long)]
    d: Option<usize>,
    /// Generator of the level ideal, e.g. `t^2+t+1`; `1` is the full group.
    #[arg(long)]
    ideal: Option<String>,
    /// Truncation level, > d − 1.
    #[arg(long)]
    alpha: Option<i64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the quotient pair and write it as JSON.
    Quotient {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the quotient graph as DOT (d = 2 only).
        #[arg(long)]
        dot: bool,
        /// List stabilizer elements for orbits with at most this many.
        #[arg(long)]
        stab_cap: Option<u128>,
    },
    /// Top relative homology of the quotient pair.
    Homology {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Modular symbol lattice inside the top relative homology.
    Symbols {
        #[command(flatten)]
        group: GroupArgs,
        /// Feed all bases with entries of degree ≤ this instead of the
        /// unimodular classes.
        #[arg(long)]
        max_deg: Option<i64>,
        #[arg(long)]
        max_bases: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank equality, index and the exponent bound in one verdict.
    Verify {
        #[command(flatten)]
        group: GroupArgs,
        /// Highest α tried while looking for a stable level.
        #[arg(long)]
        max_alpha: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group-homology bounds on the stabilizers listed in a quotient file.
    Ghom {
        #[arg(long)]
        from_quotient: Option<PathBuf>,
        #[arg(long)]
        max_s: Option<usize>,
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DOT graph of a quotient file.
    ExportDot {
        #[arg(long)]
        from_quotient: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Quotient { .. } => "quotient",
            Cmd::Homology { .. } => "homology",
            Cmd::Symbols { .. } => "symbols",
            Cmd::Verify { .. } => "verify",
            Cmd::Ghom { .. } => "ghom",
            Cmd::ExportDot { .. } => "export-dot",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Budget(String),
    Bound(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Bound(_) => 4,
        }
    }
}

impl From<btq::Error> for Failure {
    fn from(e: btq::Error) -> Self {
        use btq::Error::*;
        match e {
            BudgetExceeded(_) | SearchBudgetExceeded { .. } | NonStabilized(_) => Failure::Budget(e.to_string()),
            RankDeficient { .. } => Failure::Bound(e.to_string()),
            Parse(_) | Invalid(_) => Failure::Config(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

/// Values from the config file, keyed by flag name.
struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Res<Self> {
        let Some(path) = path else { return Ok(Config(HashMap::new())) };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::Config(format!("{}:{}: expected `key = value`", path.display(), n + 1)))?;
            map.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(Config(map))
    }

    /// The flag if given, else the config value.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Res<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Failure::Config(format!("bad value `{v}` for `{key}`"))),
        }
    }

    fn need<T: FromStr>(&self, flag: Option<T>, key: &str) -> Res<T> {
        self.pick(flag, key)?.ok_or_else(|| Failure::Config(format!("missing --{key}")))
    }

    fn flag(&self, flag: bool, key: &str) -> Res<bool> {
        Ok(flag || self.pick(None, key)?.unwrap_or(false))
    }
}

struct Run {
    cfg: Config,
    deadline: Option<Instant>,
}

impl Run {
    fn group(&self, g: &GroupArgs) -> Res<GroupSpec> {
        let q = self.cfg.need(g.q, "q")?;
        let d = self.cfg.need(g.d, "d")?;
        let ideal: String = self.cfg.need(g.ideal.clone(), "ideal")?;
        Ok(GroupSpec::parse(q, d, &ideal)?)
    }

    fn alpha(&self, g: &GroupArgs) -> Res<i64> {
        self.cfg.need(g.alpha, "alpha")
    }

    fn options(&self) -> QuotientOptions {
        QuotientOptions { deadline: self.deadline, ..Default::default() }
    }

    fn quotient(&self, g: &GroupArgs) -> Res<QuotientComplex> {
        Ok(build_quotient(&self.group(g)?, self.alpha(g)?, &self.options())?)
    }

    fn quotient_file(&self, flag: Option<PathBuf>) -> Res<QuotientJson> {
        let path: PathBuf = self.cfg.need(flag, "from-quotient")?;
        let text = std::fs::read_to_string(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    fn output(&self, flag: Option<PathBuf>) -> Res<Option<PathBuf>> {
        self.cfg.pick(flag, "out")
    }
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Other(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Integers that fit in u64 become JSON numbers, larger ones strings.
fn big(x: &impl ToString) -> Value {
    let s = x.to_string();
    s.parse::<u64>().map_or(Value::String(s), Value::from)
}

fn group_json(g: &GroupSpec, alpha: i64) -> Value {
    json!({ "q": g.q, "d": g.d, "ideal": g.m.to_string(), "alpha": alpha })
}

fn homology_json(quot: &QuotientComplex) -> Res<Value> {
    let h = quot.top_homology()?;
    let basis: Vec<Vec<(usize, i64)>> = (0..h.rank()).map(|k| h.basis_chain(k).entries.into_iter().collect()).collect();
    Ok(json!({
        "group": group_json(&quot.group, quot.alpha),
        "counts": quot.complex.counts(),
        "core_vertices": quot.core_vertices().len(),
        "dim": h.dim,
        "rank": h.rank(),
        "relative_euler_characteristic": quot.relative_euler_characteristic(),
        "basis": basis,
    }))
}

fn symbols_json(quot: &QuotientComplex, stream: &GeneratorStream, budget: &StreamBudget) -> Res<Value> {
    let l = ms_lattice(quot, stream, budget)?;
    let levels: Vec<Value> = l
        .levels
        .iter()
        .map(|r| json!({ "level": r.level, "bases": r.bases, "rank": r.rank, "changed": r.changed }))
        .collect();
    let divisors: Vec<Value> = l.span.divisors().iter().map(big).collect();
    Ok(json!({
        "group": group_json(&quot.group, quot.alpha),
        "homology_rank": l.homology_rank,
        "ms_rank": l.rank(),
        "divisors": divisors,
        "stabilized": l.stabilized,
        "bases_used": l.bases_used,
        "provenance": l.provenance,
        "levels": levels,
        "generators": l.generators,
    }))
}

/// Smallest α from `start` whose homology maps isomorphically from α + 1.
fn stable_quotient(run: &Run, g: &GroupSpec, start: i64, max_alpha: i64) -> Res<QuotientComplex> {
    let mut lo = build_quotient(g, start, &run.options())?;
    for a in start..max_alpha {
        let hi = build_quotient(g, a + 1, &run.options())?;
        if transition_between(&hi, &lo)?.iso {
            return Ok(lo);
        }
        lo = hi;
    }
    Err(Failure::Budget(format!("no stable level found up to α = {max_alpha}")))
}

fn verify(run: &Run, group: &GroupArgs, max_alpha: Option<i64>) -> Res<(Value, bool)> {
    let g = run.group(group)?;
    let quot = match run.cfg.pick(group.alpha, "alpha")? {
        Some(a) => build_quotient(&g, a, &run.options())?,
        None => {
            let start = g.d as i64;
            let max_alpha = run.cfg.pick(max_alpha, "max-alpha")?.unwrap_or(start + 4);
            stable_quotient(run, &g, start, max_alpha)?
        }
    };
    let budget = StreamBudget { deadline: run.deadline, ..Default::default() };
    let l = ms_lattice(&quot, &GeneratorStream::Unimodular, &budget)?;
    let b = bound_constants(g.d, g.q, g.q);
    let mut v = json!({
        "group": group_json(&g, quot.alpha),
        "homology_rank": l.homology_rank,
        "ms_rank": l.rank(),
        "bound": big(&b.bound),
        "p_power": big(&b.p_power),
    });
    let ok = match index_and_exponent(&l) {
        Ok(r) => {
            let divides = r.within(&b);
            v["rank_ok"] = json!(true);
            v["index"] = big(&r.index);
            v["exponent"] = big(&r.exponent);
            v["divides"] = json!(divides);
            divides
        }
        Err(btq::Error::RankDeficient { .. }) => {
            v["rank_ok"] = json!(false);
            v["index"] = Value::Null;
            v["exponent"] = Value::Null;
            v["divides"] = json!(false);
            false
        }
        Err(e) => return Err(e.into()),
    };
    Ok((v, ok))
}

fn run(cli: Cli) -> Res<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    if cfg.pick(cli.jobs, "jobs")? == Some(0) {
        return Err(Failure::Config("--jobs must be at least 1".into()));
    }
    cfg.pick(cli.seed, "seed")?;
    let deadline = match std::env::var("BTQ_BUDGET_MS") {
        Ok(ms) => {
            let ms: u64 = ms.trim().parse().map_err(|_| Failure::Config(format!("bad BTQ_BUDGET_MS `{ms}`")))?;
            Some(Instant::now() + Duration::from_millis(ms))
        }
        Err(_) => None,
    };
    let run = Run { cfg, deadline };
    match cli.cmd {
        Cmd::Quotient { group, out, dot, stab_cap } => {
            let g = run.group(&group)?;
            let mut opts = run.options();
            if let Some(cap) = run.cfg.pick(stab_cap, "stab-cap")? {
                opts.stab_element_cap = cap;
            }
            let dot = run.cfg.flag(dot, "dot")?;
            if dot && g.d != 2 {
                return Err(Failure::Config("--dot needs d = 2".into()));
            }
            let quot = build_quotient(&g, run.alpha(&group)?, &opts)?;
            let j = quot.to_json()?;
            let out = run.output(out)?;
            if dot {
                if let Some(p) = &out {
                    emit(Some(p), &pretty(&j))?;
                }
                emit(None, &j.to_dot())
            } else {
                emit(out.as_deref(), &pretty(&j))
            }
        }
        Cmd::Homology { group, out } => {
            let quot = run.quotient(&group)?;
            emit(run.output(out)?.as_deref(), &pretty(&homology_json(&quot)?))
        }
        Cmd::Symbols { group, max_deg, max_bases, out } => {
            let quot = run.quotient(&group)?;
            let stream = match run.cfg.pick(max_deg, "max-deg")? {
                Some(k) => GeneratorStream::AllBases { max_deg: k },
                None => GeneratorStream::Unimodular,
            };
            let mut budget = StreamBudget { deadline: run.deadline, ..Default::default() };
            if let Some(n) = run.cfg.pick(max_bases, "max-bases")? {
                budget.max_bases = n;
            }
            emit(run.output(out)?.as_deref(), &pretty(&symbols_json(&quot, &stream, &budget)?))
        }
        Cmd::Verify { group, max_alpha, out } => {
            let (v, ok) = verify(&run, &group, max_alpha)?;
            eprintln!(
                "rank_ok {}  index {}  exponent {}  bound {}  divides {}",
                v["rank_ok"], v["index"], v["exponent"], v["bound"], v["divides"]
            );
            emit(run.output(out)?.as_deref(), &pretty(&v))?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Bound("the index bound does not hold for this group".into()))
            }
        }
        Cmd::Ghom { from_quotient, max_s, max_order, out } => {
            let j = run.quotient_file(from_quotient)?;
            let max_s = run.cfg.pick(max_s, "max-s")?.unwrap_or(2);
            let max_order = run.cfg.pick(max_order, "max-order")?.unwrap_or(16);
            let verdicts = harvest_json(&j, max_order, max_s)?;
            let failed = verdicts.iter().filter(|v| !v.passed()).count();
            let v = json!({ "checked": verdicts.len(), "failed": failed, "verdicts": verdicts });
            emit(run.output(out)?.as_deref(), &pretty(&v))?;
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Bound(format!("{failed} stabilizer checks violate a bound")))
            }
        }
        Cmd::ExportDot { from_quotient, out } => {
            let j = run.quotient_file(from_quotient)?;
            if j.d != 2 {
                return Err(Failure::Config("DOT export needs d = 2".into()));
            }
            emit(run.output(out)?.as_deref(), &j.to_dot())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.cmd.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => {
                    eprintln!("error: {m}\n");
                    let mut cmd = Cli::command();
                    cmd.build();
                    let usage = cmd.find_subcommand_mut(name).map(|c| c.render_usage());
                    if let Some(u) = usage {
                        eprintln!("{u}");
                    }
                }
                Failure::Budget(m) => eprintln!("inconclusive: {m}"),
                Failure::Bound(m) => eprintln!("BOUND VIOLATED: {m}"),
                Failure::Other(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
