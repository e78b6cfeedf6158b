use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use balseq::balanced::{colour_literal, estar_exact, oracle_estimate};
use balseq::cfrac::ContinuedFraction;
use balseq::cgap::{enumerate_pairs, failing_letter};
use balseq::forcing::admissible_set;
use balseq::matcls::{ClassContext, PeriodPair};
use balseq::numeric::{rational_decimal, QuadraticNumber};
use balseq::search::{rtb_star, SearchOptions};
use balseq::sturmian::{e_sturmian, estar_sturmian, generate_prefix, rt_star_witness};
use balseq::tails_graph::{build_graph, build_graph_any, ReduceOptions};

#[derive(Parser)]
#[command(name = "balseq", version, about = "Critical exponents of balanced sequences")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact E* of a coloured Sturmian sequence.
    Estar {
        cf: String,
        #[arg(long, value_name = "P,P'")]
        pp: String,
    },
    /// Critical and asymptotic critical exponent of a Sturmian sequence.
    Esturmian { cf: String },
    /// Graph of admissible tails.
    Graph {
        #[arg(long, value_name = "P,P'")]
        pp: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        reduce: bool,
        /// History depth for refinement during reduction.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[arg(long, default_value_t = 12)]
        walk_cap: usize,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Admissible sets D(beta, A) per class.
    Dset {
        #[arg(long, value_name = "P,P'")]
        pp: String,
        #[arg(long)]
        beta: String,
    },
    /// Period pairs to examine for an alphabet size.
    Pairs {
        d: usize,
        #[arg(long)]
        beta: Option<String>,
    },
    /// Search for the asymptotic repetitive threshold.
    Rtbstar {
        d: usize,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = 12)]
        walk_cap: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Directory for one DOT file per pair at the final beta.
        #[arg(long, value_name = "DIR")]
        dot: Option<PathBuf>,
    },
    /// Empirical exponent from maximal repetitions of a coloured prefix.
    Oracle {
        cf: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        y2: String,
        #[arg(short = 'n', long = "prefix-len", default_value_t = 100_000)]
        prefix_len: usize,
        #[arg(long, default_value_t = 100)]
        lo: usize,
        #[arg(long, default_value_t = 1000)]
        hi: usize,
    },
    /// Binary word with small asymptotic critical exponent.
    RtstarWitness {
        #[arg(default_value_t = 7)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        prefix_len: usize,
    },
}

enum Failure {
    Parse(String),
    Incomplete,
    Other(String),
}

type Res = Result<(), Failure>;

fn parse<T: FromStr>(s: &str, what: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Failure::Parse(format!("{what}: {e}")))
}

fn parse_beta(s: &str) -> Result<QuadraticNumber, Failure> {
    QuadraticNumber::parse(s).map_err(|e| Failure::Parse(format!("beta: {e}")))
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    let out = if json {
        serde_json::to_string_pretty(value).expect("serialisable") + "\n"
    } else {
        text()
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

/// Letters of a constant gap period: digits, or comma separated numbers.
fn parse_letters(s: &str, what: &str) -> Result<Vec<u32>, Failure> {
    let word: Option<Vec<u32>> = if s.contains(',') {
        s.split(',').map(|w| w.trim().parse().ok()).collect()
    } else {
        s.chars().map(|c| c.to_digit(10)).collect()
    };
    let word = word.filter(|w| !w.is_empty()).ok_or_else(|| Failure::Parse(format!("{what}: bad letters `{s}`")))?;
    if let Some(x) = failing_letter(&word) {
        return Err(Failure::Parse(format!("{what}: `{s}` is not a constant gap sequence (letter {x})")));
    }
    Ok(word)
}

fn cmd_estar(json: bool, cf: &str, pp: &str) -> Res {
    let cf: ContinuedFraction = parse(cf, "continued fraction")?;
    let pair: PeriodPair = parse(pp, "--pp")?;
    let r = estar_exact(&cf, pair).map_err(|e| Failure::Other(e.to_string()))?;
    let w = r.witness;
    let delta = cf.tail_value(w.n);
    let x = cf.reversed_limit(w.n);
    let out = json!({
        "theta": cf.to_string(),
        "pair": pair.to_string(),
        "estar": r.value.to_string(),
        "decimal": r.value.decimal(12),
        "witness": { "j": w.n, "m": w.m, "k": w.k, "l": w.l },
        "delta_j": delta.to_string(),
        "x_j": x.to_string(),
        "cycle_start": r.cycle_start,
        "cycle_len": r.cycle_len,
    });
    emit(json, &out, || {
        format!(
            "E* = {} ~ {}\nattained at j={} m={} k={} l={}\ndelta_j = {} ~ {}\nx_j = {} ~ {}\n",
            r.value,
            r.value.decimal(12),
            w.n,
            w.m,
            w.k,
            w.l,
            delta,
            delta.decimal(8),
            x,
            x.decimal(8)
        )
    });
    Ok(())
}

fn cmd_esturmian(json: bool, cf: &str) -> Res {
    let cf: ContinuedFraction = parse(cf, "continued fraction")?;
    let es = estar_sturmian(&cf).map_err(|e| Failure::Other(e.to_string()))?;
    let e = e_sturmian(&cf);
    let out = json!({
        "theta": cf.to_string(),
        "e": e.to_string(), "e_decimal": e.decimal(12),
        "estar": es.to_string(), "estar_decimal": es.decimal(12),
    });
    emit(json, &out, || format!("E  = {} ~ {}\nE* = {} ~ {}\n", e, e.decimal(12), es, es.decimal(12)));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_graph(json: bool, pp: &str, beta: &str, reduce: bool, depth: usize, walk_cap: usize, dot: Option<PathBuf>) -> Res {
    let pair: PeriodPair = parse(pp, "--pp")?;
    let beta = parse_beta(beta)?;
    let mut g = build_graph(pair, &beta).map_err(|e| Failure::Parse(e.to_string()))?;
    if reduce {
        g.reduce(ReduceOptions { max_depth: depth, ..ReduceOptions::default() });
    }
    if let Some(path) = &dot {
        fs::write(path, g.to_dot()).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    }
    let (cands, complete) = g.extract_candidates(walk_cap, 1000);
    let evaluated: Vec<_> = cands
        .iter()
        .map(|cf| {
            let v = estar_exact(cf, pair).map(|r| r.value);
            json!({
                "theta": cf.to_string(),
                "estar": v.as_ref().map(|x| x.to_string()).ok(),
                "decimal": v.as_ref().map(|x| x.decimal(10)).ok(),
            })
        })
        .collect();
    let out = json!({ "graph": g.to_json(), "candidates": evaluated, "complete": complete });
    emit(json, &out, || {
        let mut s = format!("Gamma for {} at beta = {} (depth {})\n", pair, beta, g.depth);
        let comps = g.components();
        if comps.is_empty() {
            s.push_str("no strongly connected component\n");
        }
        for (i, c) in comps.iter().enumerate() {
            let names: Vec<String> = c.iter().map(|&v| g.vertex_name(v)).collect();
            s += &format!("component {}: {}\n", i, names.join(" "));
        }
        for &(u, a, v) in &g.edges {
            s += &format!("  {} --{}--> {}\n", g.vertex_name(u), a, g.vertex_name(v));
        }
        for c in &evaluated {
            s += &format!("candidate {} E* = {}\n", c["theta"].as_str().unwrap_or("?"), c["decimal"].as_str().unwrap_or("?"));
        }
        if !complete {
            s.push_str("candidate list may be incomplete\n");
        }
        s
    });
    Ok(())
}

fn cmd_dset(json: bool, pp: &str, beta: &str) -> Res {
    let pair: PeriodPair = parse(pp, "--pp")?;
    let beta = parse_beta(beta)?;
    let ctx = ClassContext::new(pair);
    let rows: Vec<_> = ctx
        .all_reachable()
        .iter()
        .map(|c| {
            let a = admissible_set(&ctx, c, &beta);
            json!({ "class": c.short(), "long": c.long(&pair), "d": a.set.to_string() })
        })
        .collect();
    emit(json, &rows, || {
        rows.iter()
            .map(|r| format!("{:<16} {:<28} {}\n", r["class"].as_str().unwrap_or(""), r["long"].as_str().unwrap_or(""), r["d"].as_str().unwrap_or("")))
            .collect()
    });
    Ok(())
}

fn cmd_pairs(json: bool, d: usize, beta: Option<String>) -> Res {
    if d < 2 {
        return Err(Failure::Parse("alphabet size must be at least 2".into()));
    }
    let beta = beta.as_deref().map(parse_beta).transpose()?;
    let pairs = enumerate_pairs(d, beta.as_ref());
    emit(json, &pairs, || pairs.iter().map(|c| format!("{} from {}+{} letters\n", c.pair, c.d_a, c.d_b)).collect());
    Ok(())
}

fn cmd_rtbstar(json: bool, d: usize, beta: Option<String>, walk_cap: usize, depth: usize, dot: Option<PathBuf>) -> Res {
    if d < 2 {
        return Err(Failure::Parse("alphabet size must be at least 2".into()));
    }
    if d >= 9 {
        log::warn!("d = {d}: expect a long run");
    }
    let opts = SearchOptions {
        beta: beta.as_deref().map(parse_beta).transpose()?,
        walk_cap,
        max_depth: depth,
        ..SearchOptions::default()
    };
    let r = rtb_star(d, &opts);
    if let Some(dir) = &dot {
        fs::create_dir_all(dir).map_err(|e| Failure::Other(format!("{}: {e}", dir.display())))?;
        let beta = r.betas.last().map(|b| parse_beta(b)).transpose()?;
        for l in r.log.iter().filter(|l| l.pair.l() > 1) {
            if let Some(b) = &beta {
                let mut g = build_graph_any(l.pair, b).map_err(|e| Failure::Other(e.to_string()))?;
                g.reduce(ReduceOptions { max_depth: depth, ..ReduceOptions::default() });
                let path = dir.join(format!("pair_{}_{}.dot", l.pair.p, l.pair.pp));
                fs::write(&path, g.to_dot()).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
            }
        }
    }
    emit(json, &r, || {
        let mut s = format!("d = {}\n", r.d);
        match (&r.best, &r.pair, &r.theta) {
            (Some(b), Some(p), Some(t)) => {
                s += &format!("RTB* = {} ~ {}\npair {}  theta [{}]\n", b, b.decimal(10), p, t);
            }
            _ => s.push_str("no candidate found\n"),
        }
        s += &format!("rounds: beta = {}\n", r.betas.join(" -> "));
        for l in &r.log {
            s += &format!("  {} ({}+{}): {}\n", l.pair, l.d_a, l.d_b, l.status);
        }
        s += &format!("walk cap {}, {}\n", r.walk_cap, if r.complete { "complete" } else { "INCOMPLETE" });
        s
    });
    if r.complete {
        Ok(())
    } else {
        Err(Failure::Incomplete)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(json: bool, cf: &str, y: &str, y2: &str, n: usize, lo: usize, hi: usize) -> Res {
    let cf: ContinuedFraction = parse(cf, "continued fraction")?;
    let y = parse_letters(y, "--y")?;
    let y2 = parse_letters(y2, "--y2")?;
    if let Some(x) = y.iter().find(|x| y2.contains(x)) {
        return Err(Failure::Parse(format!("letter {x} occurs in both --y and --y2")));
    }
    let u = generate_prefix(&cf, n);
    let v = colour_literal(&u, &y, &y2);
    let hi = hi.min(n / 2);
    let w = oracle_estimate(&v, lo, hi).map_err(|e| Failure::Parse(e.to_string()))?;
    let e = w.exponent();
    let head: String = v.iter().take(40).map(|x| if *x < 10 { x.to_string() } else { format!("<{x}>") }).collect();
    let out = json!({
        "prefix": head,
        "estimate": rational_decimal(&e, 8),
        "position": w.position, "period": w.period, "length": w.length,
        "window": [lo, hi], "prefix_len": n,
    });
    emit(json, &out, || {
        format!(
            "v = {}...\nestimate {} from a repetition of period {} and length {} at {}\n",
            head,
            rational_decimal(&e, 8),
            w.period,
            w.length,
            w.position
        )
    });
    Ok(())
}

fn cmd_rtstar_witness(json: bool, k: u32, prefix_len: usize) -> Res {
    let r = rt_star_witness(k, prefix_len).map_err(|e| Failure::Parse(e.to_string()))?;
    emit(json, &r, || {
        format!(
            "k = {} over {} inner letters\nmeasured {:.6} (period {}, length {}, at {})\nbound {} = {:.6}\n",
            r.k, r.d, r.measured, r.period, r.length, r.position, r.bound, r.bound_value
        )
    });
    Ok(())
}

fn run(cli: Cli) -> Res {
    let json = cli.json;
    match cli.cmd {
        Cmd::Estar { cf, pp } => cmd_estar(json, &cf, &pp),
        Cmd::Esturmian { cf } => cmd_esturmian(json, &cf),
        Cmd::Graph { pp, beta, reduce, depth, walk_cap, dot } => cmd_graph(json, &pp, &beta, reduce, depth, walk_cap, dot),
        Cmd::Dset { pp, beta } => cmd_dset(json, &pp, &beta),
        Cmd::Pairs { d, beta } => cmd_pairs(json, d, beta),
        Cmd::Rtbstar { d, beta, walk_cap, depth, dot } => cmd_rtbstar(json, d, beta, walk_cap, depth, dot),
        Cmd::Oracle { cf, y, y2, prefix_len, lo, hi } => cmd_oracle(json, &cf, &y, &y2, prefix_len, lo, hi),
        Cmd::RtstarWitness { k, prefix_len } => cmd_rtstar_witness(json, k, prefix_len),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Incomplete) => {
            eprintln!("search incomplete: some component was not resolved within the caps");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
