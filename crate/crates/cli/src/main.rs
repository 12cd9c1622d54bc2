//! `lfree`: build gadgets, run the exact oracles and the reductions, and
//! print the results as JSON.
//!
//! Exit status is 0 when everything requested succeeded and verified, 1 when
//! a verification failed and 2 for bad input or a failed precondition.

mod input;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lfree::gadgets::{self, BuildOptions, GadgetSet};
use lfree::graphs::{self, generate};
use lfree::reductions;
use lfree::{classify, json, oracle, standardize, SearchConfig};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "lfree", version, about = "Solution-free subsets of the integers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads for the parallel phases (1 runs sequentially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tuple budget for the exact oracles.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Skip the oracle verification of constructed instances.
    #[arg(long, global = true)]
    no_verify: bool,
    /// Seed for random graph generators.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include wall-clock timing (makes the output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Equation utilities.
    Eq {
        #[command(subcommand)]
        cmd: EqCmd,
    },
    /// Build a gadget set from an equation and a graph.
    Gadget(GadgetArgs),
    /// Exact oracles on a set.
    Solve {
        mode: SolveMode,
        #[command(flatten)]
        set: SetArgs,
    },
    /// Checks that fail with exit status 1.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Reductions from independent-set problems.
    Reduce {
        #[command(subcommand)]
        cmd: ReduceCmd,
    },
    /// Graph utilities.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
}

#[derive(Subcommand, Debug)]
enum EqCmd {
    /// Profile and standard form of an equation.
    Info {
        #[arg(short, long)]
        equation: Option<String>,
        #[arg(conflicts_with = "equation")]
        text: Option<String>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Kind {
    Hom,
    HomSef,
    Inhom,
    Count3,
    Count4,
    CountInhom,
}

#[derive(Args, Debug)]
struct GadgetArgs {
    kind: Kind,
    #[arg(short, long)]
    equation: String,
    /// Graph file (JSON or DIMACS) or generator spec (edge, p3, cycle:5, ...).
    #[arg(short, long)]
    graph: String,
    /// Copies per edge for the counting gadgets.
    #[arg(short)]
    r: Option<usize>,
    /// Free set whose elements must add no solutions (inhomogeneous only).
    #[arg(long = "Sprime")]
    s_prime: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SolveMode {
    Max,
    Count,
    Free,
}

#[derive(Args, Debug)]
struct SetArgs {
    #[arg(short, long)]
    equation: String,
    /// Inline JSON array, comma list or a file.
    #[arg(short = 'A', long = "set")]
    set: Option<String>,
    #[arg(conflicts_with = "set")]
    set_pos: Option<String>,
}

impl SetArgs {
    fn spec(&self) -> Result<&str> {
        match (&self.set, &self.set_pos) {
            (Some(s), _) | (None, Some(s)) => Ok(s),
            (None, None) => bail!("a set is required (-A)"),
        }
    }
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Exit 1 unless the set is free.
    Free(SetArgs),
}

#[derive(Subcommand, Debug)]
enum ReduceCmd {
    /// `(G, k)` to `(A, |A_E| + k)`.
    Decision {
        #[arg(short, long)]
        equation: String,
        #[arg(short, long)]
        graph: String,
        #[arg(short)]
        k: usize,
    },
    /// `(A, k)` to `B` with threshold `ceil(eps |B|)`.
    Epsilon {
        #[arg(short, long)]
        equation: String,
        /// Source set; omit it and pass -g to use the decision gadget.
        #[arg(short = 'A', long = "set")]
        set: Option<String>,
        #[arg(short, long)]
        graph: Option<String>,
        /// Target size in `A` (or in the graph when -g is used).
        #[arg(short)]
        k: usize,
        #[arg(long = "S")]
        s: String,
        #[arg(long = "Sprime")]
        s_prime: String,
        /// `num/den`.
        #[arg(long)]
        epsilon: String,
    },
    /// Recover the number of independent sets from free-subset counts.
    Count {
        #[arg(short, long)]
        equation: String,
        #[arg(short, long)]
        graph: String,
    },
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    /// Print a generated graph as JSON.
    Gen { spec: String },
}

struct Report {
    inputs: Map<String, Value>,
    body: Map<String, Value>,
    ok: bool,
}

impl Report {
    fn new() -> Self {
        Report {
            inputs: Map::new(),
            body: Map::new(),
            ok: true,
        }
    }

    fn input(&mut self, key: &str, v: Value) {
        self.inputs.insert(key.into(), v);
    }

    fn put(&mut self, key: &str, v: Value) {
        self.body.insert(key.into(), v);
    }
}

struct Ctx {
    global: Global,
    cfg: SearchConfig,
    opts: BuildOptions,
}

impl Ctx {
    fn new(global: Global) -> Result<Self> {
        let mut cfg = SearchConfig::default();
        if let Some(b) = global.budget {
            cfg.tuple_budget = b;
        }
        let parallel = lfree::par::available() && global.threads != Some(1);
        cfg.parallel = parallel;
        #[cfg(feature = "parallel")]
        if let Some(n) = global.threads.filter(|&n| n > 1) {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("cannot configure the thread pool")?;
        }
        let opts = BuildOptions {
            parallel,
            ..Default::default()
        };
        Ok(Ctx { global, cfg, opts })
    }

    fn equation(&self, rep: &mut Report, text: &str) -> Result<lfree::LinearEquation> {
        let eq = input::equation(text)?;
        rep.input("equation", json!(eq.to_string()));
        Ok(eq)
    }

    fn graph(&self, rep: &mut Report, spec: &str) -> Result<input::GraphInput> {
        let g = input::graph(spec, self.global.seed)?;
        rep.input("graph", json!({"n": g.graph.n(), "m": g.graph.m(), "sha256": g.digest}));
        Ok(g)
    }

    fn set(&self, rep: &mut Report, key: &str, spec: &str) -> Result<Vec<i64>> {
        let s = oracle::normalize_set(&input::set(spec)?);
        let canonical = serde_json::to_string(&s)?;
        rep.input(key, json!({"size": s.len(), "sha256": input::digest(canonical.as_bytes())}));
        Ok(s)
    }

    /// Runs the gadget checks unless disabled; a budget overrun counts as a
    /// failed verification.
    fn verify(&self, rep: &mut Report, gs: &GadgetSet) {
        if self.global.no_verify {
            return;
        }
        match gadgets::verify_gadget(gs, &self.cfg) {
            Ok(v) => {
                rep.ok &= v.passed();
                rep.put("verification", json!({"passed": v.passed(), "conditions": v.conditions}));
            }
            Err(e) => {
                rep.ok = false;
                rep.put("verification", json!({"passed": false, "error": e.to_string()}));
            }
        }
    }
}

fn eq_info(ctx: &Ctx, rep: &mut Report, text: &str) -> Result<()> {
    let eq = ctx.equation(rep, text)?;
    let sf = eq.is_homogeneous().then(|| standardize(&eq)).transpose()?;
    rep.put(
        "answer",
        json!({
            "coefficients": eq.coefficients(),
            "constant": eq.constant(),
            "profile": classify(&eq),
            "standard_form": sf,
            "special": sf.as_ref().is_some_and(gadgets::is_special),
        }),
    );
    Ok(())
}

fn gadget(ctx: &Ctx, rep: &mut Report, a: &GadgetArgs) -> Result<()> {
    let eq = ctx.equation(rep, &a.equation)?;
    let g = ctx.graph(rep, &a.graph)?;
    let need_r = || a.r.context("this gadget needs -r");
    let s_prime = match &a.s_prime {
        Some(s) => ctx.set(rep, "s_prime", s)?,
        None => Vec::new(),
    };
    let (graph, parts, opts) = (&g.graph, g.partition.as_ref(), ctx.opts);
    let gs = match a.kind {
        Kind::Hom => gadgets::build_homogeneous(&eq, graph, opts)?,
        Kind::HomSef => gadgets::build_homogeneous_sef(&eq, graph, opts)?,
        Kind::Inhom => gadgets::build_inhomogeneous(&eq, graph, parts, &s_prime, opts)?,
        Kind::Count3 => gadgets::build_counting_l3(&eq, graph, need_r()?, opts)?,
        Kind::Count4 => gadgets::build_counting_l4(&eq, graph, need_r()?, opts)?,
        Kind::CountInhom => gadgets::build_counting_inhom(&eq, graph, parts, need_r()?, opts)?,
    };
    rep.put("answer", json!({"size": gs.len()}));
    rep.put("gadget", gs.to_json());
    ctx.verify(rep, &gs);
    Ok(())
}

fn solve(ctx: &Ctx, rep: &mut Report, mode: SolveMode, a: &SetArgs, strict: bool) -> Result<()> {
    let eq = ctx.equation(rep, &a.equation)?;
    let set = ctx.set(rep, "set", a.spec()?)?;
    match mode {
        SolveMode::Max => {
            let (size, witness) = oracle::max_free_subset(&eq, &set, &ctx.cfg)?;
            rep.put("answer", json!({"size": size}));
            rep.put("witness", json!(witness));
        }
        SolveMode::Count => {
            let n = oracle::count_free_subsets(&eq, &set, &ctx.cfg)?;
            rep.put("answer", json!({"count": json::biguint(&n)}));
        }
        SolveMode::Free => {
            let first = oracle::enumerate_nontrivial_solutions(&eq, &set, &ctx.cfg)?
                .into_iter()
                .next();
            rep.put("answer", json!({"free": first.is_none()}));
            if let Some(sol) = first {
                rep.put("witness", json!(sol.tuple));
                rep.ok &= !strict;
            }
        }
    }
    Ok(())
}

fn reduce(ctx: &Ctx, rep: &mut Report, cmd: &ReduceCmd) -> Result<()> {
    match cmd {
        ReduceCmd::Decision { equation, graph, k } => {
            let eq = ctx.equation(rep, equation)?;
            let g = ctx.graph(rep, graph)?;
            rep.input("k", json!(k));
            let inst = reductions::reduce_decision(&eq, &g.graph, *k, ctx.opts)?;
            let mut answer = json!({
                "threshold": inst.threshold,
                "k": inst.k,
                "gadget_size": inst.set.len(),
                "edge_labels": inst.set.a_e().len(),
            });
            if !ctx.global.no_verify {
                let check = reductions::verify_decision(&inst, &ctx.cfg)?;
                answer["equiv_verified"] = json!(check.agrees());
                rep.ok &= check.agrees();
                rep.put("ledger", json!(check));
            }
            rep.put("answer", answer);
            rep.put("gadget", inst.set.to_json());
        }
        ReduceCmd::Epsilon {
            equation,
            set,
            graph,
            k,
            s,
            s_prime,
            epsilon,
        } => {
            let eq = ctx.equation(rep, equation)?;
            let eps = input::rational(epsilon)?;
            rep.input("epsilon", json::rational(&eps));
            let (a, k) = match (set, graph) {
                (Some(spec), None) => (ctx.set(rep, "set", spec)?, *k),
                (None, Some(spec)) => {
                    let g = ctx.graph(rep, spec)?;
                    let inst = reductions::reduce_decision(&eq, &g.graph, *k, ctx.opts)?;
                    (inst.set.elements.clone(), inst.threshold)
                }
                _ => bail!("give exactly one of -A and -g"),
            };
            rep.input("k", json!(k));
            let s = ctx.set(rep, "s", s)?;
            let s_prime = ctx.set(rep, "s_prime", s_prime)?;
            let inst = reductions::reduce_epsilon(&eq, &a, k, &s, &s_prime, &eps, ctx.opts, &ctx.cfg)?;
            let equiv = inst.equivalence.map(|c| c.source == c.target);
            rep.ok &= inst.extension.confirmed && equiv != Some(false);
            rep.put(
                "answer",
                json!({"size": inst.b.len(), "threshold": inst.threshold, "equiv_verified": equiv}),
            );
            rep.put("witness", json!(inst.b));
            rep.put("ledger", json::portable(inst.to_json()));
        }
        ReduceCmd::Count { equation, graph } => {
            let eq = ctx.equation(rep, equation)?;
            let g = ctx.graph(rep, graph)?;
            let led = reductions::recover_count(&eq, &g.graph, ctx.opts, &ctx.cfg)?;
            rep.ok &= led.matches();
            rep.put(
                "answer",
                json!({"independent_sets": json::biguint(&led.recovered), "path": led.path}),
            );
            rep.put("ledger", led.to_json());
        }
    }
    Ok(())
}

fn run(cli: &Cli, rep: &mut Report) -> Result<()> {
    let ctx = Ctx::new(cli.global.clone())?;
    match &cli.command {
        Command::Eq {
            cmd: EqCmd::Info { equation, text },
        } => {
            let text = equation.as_ref().or(text.as_ref()).context("an equation is required")?;
            eq_info(&ctx, rep, text)
        }
        Command::Gadget(a) => gadget(&ctx, rep, a),
        Command::Solve { mode, set } => solve(&ctx, rep, *mode, set, false),
        Command::Verify {
            cmd: VerifyCmd::Free(a),
        } => solve(&ctx, rep, SolveMode::Free, a, true),
        Command::Reduce { cmd } => reduce(&ctx, rep, cmd),
        Command::Graph {
            cmd: GraphCmd::Gen { spec },
        } => {
            let g = generate(&input::graph_kind(spec, cli.global.seed)?);
            let parts = graphs::find_partition(&g, 2).ok();
            rep.put("answer", g.to_json(parts.as_ref()));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut rep = Report::new();
    let outcome = run(&cli, &mut rep);
    let command: Vec<String> = std::env::args().skip(1).collect();
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    out.insert("inputs".into(), Value::Object(std::mem::take(&mut rep.inputs)));
    let code = match outcome {
        Ok(()) => {
            out.extend(std::mem::take(&mut rep.body));
            out.insert("ok".into(), json!(rep.ok));
            if rep.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            out.insert("error".into(), json!(format!("{e:#}")));
            out.insert("ok".into(), json!(false));
            ExitCode::from(2)
        }
    };
    if cli.global.timing {
        out.insert("timing_ms".into(), json!(started.elapsed().as_millis() as u64));
    }
    let v = json::portable(Value::Object(out));
    let text = if cli.global.pretty {
        serde_json::to_string_pretty(&v)
    } else {
        serde_json::to_string(&v)
    };
    // a closed pipe (`| head`) is not worth a panic
    if writeln!(std::io::stdout().lock(), "{}", text.expect("JSON output")).is_err() {
        return ExitCode::from(2);
    }
    code
}
