//! `fpm` — solvers, checkers and generators for proportionally fair
//! matching on edge-colored graphs, with machine-readable JSON output.
//!
//! Exit codes: 0 success, 1 usage or parse errors, 2 no solution /
//! infeasible / unbalanced, 3 not found at the stated confidence (and
//! inconclusive rainbow searches).

mod fmt;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use fpm_core::approx::{solve_alpha_positive, solve_beta_limited};
use fpm_core::exact::{solve_exact_with_stats, ExactQuery};
use fpm_core::graph::{is_balanced, parse_graph, random_graph, serialize_graph};
use fpm_core::oracle::{brute_force_opt, DEFAULT_EDGE_CAP};
use fpm_core::rainbow::{find_rainbow_matching, RainbowOutcome, RainbowQuery};
use fpm_core::reduce::{parse_dimacs_3sat3, reduce_to_path};
use fpm_core::{FairnessSpec, Matching, Rat};

use fmt::{
    edges_value, emit, envelope, format_rational, fractions_value, parse_matching_file,
    parse_rational, read_input, report_value, sha256_hex, OutputFormat,
};

const EXIT_OK: u8 = 0;
const EXIT_NO_SOLUTION: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Text => OutputFormat::Text,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fpm",
    version,
    about = "Solvers for proportionally fair matching on edge-colored graphs"
)]
struct Cli {
    /// Output format on stdout; `-o` files always receive JSON.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Upper bound on worker threads. The bundled solvers are sequential,
    /// so this is a cap, not a demand.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random edge-colored graph file.
    Gen {
        /// Number of vertices (at least 2).
        #[arg(short = 'n', long)]
        vertices: usize,
        /// Number of colors.
        #[arg(short = 'l', long)]
        colors: usize,
        /// Probability of each possible edge.
        #[arg(long)]
        edge_prob: f64,
        /// RNG seed; falls back to $FPM_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Output graph file.
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Check a matching file against fairness bounds.
    Check {
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// File of whitespace-separated 1-based edge indices.
        #[arg(long)]
        matching: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Find a rainbow matching of a given size.
    Rainbow {
        #[arg(short = 'k', long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// Node-expansion budget for the search.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Approximation solver for specs with alpha > 0.
    Approx {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Polynomial-time solver for the upper-bound-only case (alpha = 0).
    BetaLimited {
        #[arg(long)]
        beta: String,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Randomized exact solver for a balanced matching of size exactly k.
    Exact {
        #[arg(short = 'k', long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        /// RNG seed; falls back to $FPM_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Probability of missing an existing solution.
        #[arg(long, default_value = "1/1000")]
        fail_prob: String,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Brute-force optimum for small instances.
    Oracle {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// Edge-count cap; the oracle refuses larger instances.
        #[arg(long, default_value_t = DEFAULT_EDGE_CAP)]
        cap: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Turn a 3SAT-3 formula into a path instance with pinned bounds.
    Reduce {
        /// DIMACS CNF input.
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// Output graph file.
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Output JSON describing gadget edge indices.
        #[arg(long)]
        layout: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("FPM_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| anyhow!("FPM_SEED must be an unsigned 64-bit integer")),
        Err(_) => Ok(0),
    }
}

fn parse_spec(alpha: &str, beta: &str) -> Result<FairnessSpec> {
    let alpha = parse_rational(alpha).context("bad --alpha")?;
    let beta = parse_rational(beta).context("bad --beta")?;
    FairnessSpec::new(alpha, beta).map_err(|e| anyhow!("{e}"))
}

fn run(cli: Cli) -> Result<u8> {
    let format: OutputFormat = cli.format.into();
    match cli.command {
        Command::Gen {
            vertices,
            colors,
            edge_prob,
            seed,
            output,
        } => {
            if vertices < 2 {
                bail!("need at least 2 vertices");
            }
            if colors < 1 {
                bail!("need at least 1 color");
            }
            if !(0.0..=1.0).contains(&edge_prob) {
                bail!("--edge-prob must lie in [0, 1]");
            }
            let seed = resolve_seed(seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(vertices, colors, edge_prob, &mut rng);
            fs::write(&output, serialize_graph(&g))
                .with_context(|| format!("cannot write {}", output.display()))?;
            let params = format!("gen {vertices} {colors} {edge_prob} {seed}");
            let doc = envelope(
                "gen",
                &sha256_hex(params.as_bytes()),
                json!({
                    "path": output.display().to_string(),
                    "num_vertices": vertices,
                    "num_edges": g.num_edges(),
                    "num_colors": colors,
                    "edge_prob": edge_prob,
                    "seed": seed,
                }),
                &[],
            );
            let text = format!(
                "wrote {} ({} vertices, {} edges, {} colors, seed {})",
                output.display(),
                vertices,
                g.num_edges(),
                colors,
                seed
            );
            emit(&doc, text, format, None)?;
            Ok(EXIT_OK)
        }

        Command::Check {
            input,
            matching,
            alpha,
            beta,
        } => {
            let spec = parse_spec(&alpha, &beta)?;
            let (text, hash) = read_input(&input)?;
            let g = parse_graph(&text).map_err(|e| anyhow!("{e}"))?;
            let mtext = fs::read_to_string(&matching)
                .with_context(|| format!("cannot read {}", matching.display()))?;
            let indices = parse_matching_file(&mtext)?;
            // An invalid matching (overlap, bad index, empty) is a usage
            // error, distinct from "valid but unbalanced".
            let m = Matching::from_indices(&g, indices).map_err(|e| anyhow!("{e}"))?;
            let balanced = is_balanced(&m, &g, &spec).map_err(|e| anyhow!("{e}"))?;
            let fractions = m.fractions();
            let doc = envelope(
                "check",
                &hash,
                json!({
                    "balanced": balanced,
                    "size": m.len(),
                    "fractions": fractions_value(&fractions),
                }),
                &[],
            );
            let shares = fractions
                .iter()
                .enumerate()
                .map(|(c, f)| format!("{}: {}", c + 1, format_rational(*f)))
                .collect::<Vec<_>>()
                .join(", ");
            let text = format!(
                "{} (size {}; shares {})",
                if balanced { "balanced" } else { "not balanced" },
                m.len(),
                shares
            );
            emit(&doc, text, format, None)?;
            Ok(if balanced { EXIT_OK } else { EXIT_NO_SOLUTION })
        }

        Command::Rainbow {
            k,
            input,
            budget,
            output,
        } => {
            let (text, hash) = read_input(&input)?;
            let g = parse_graph(&text).map_err(|e| anyhow!("{e}"))?;
            let mut query = RainbowQuery::new(k as usize);
            query.node_budget = budget;
            let (result, rendered, code) = match find_rainbow_matching(&g, &query) {
                RainbowOutcome::Found(m) => (
                    json!({"size": m.len(), "edges": edges_value(&g, &m)}),
                    format!("found a rainbow matching of size {}", m.len()),
                    EXIT_OK,
                ),
                RainbowOutcome::NotFound => (
                    json!("none"),
                    format!("no rainbow matching of size {k}"),
                    EXIT_NO_SOLUTION,
                ),
                RainbowOutcome::BudgetExceeded => (
                    json!("budget_exceeded"),
                    "search budget exceeded before an answer".to_string(),
                    EXIT_NOT_FOUND,
                ),
            };
            let doc = envelope("rainbow", &hash, result, &[]);
            emit(&doc, rendered, format, output.as_deref())?;
            Ok(code)
        }

        Command::Approx {
            alpha,
            beta,
            input,
            output,
        } => {
            let spec = parse_spec(&alpha, &beta)?;
            if spec.is_beta_limited() {
                bail!("alpha = 0 selects the upper-bound-only problem; use `fpm beta-limited`");
            }
            let (text, hash) = read_input(&input)?;
            let g = parse_graph(&text).map_err(|e| anyhow!("{e}"))?;
            let report = solve_alpha_positive(&g, &spec).map_err(|e| anyhow!("{e}"))?;
            finish_solver("approx", &g, report, hash, format, output)
        }

        Command::BetaLimited {
            beta,
            input,
            output,
        } => {
            let spec = parse_spec("0", &beta)?;
            let (text, hash) = read_input(&input)?;
            let g = parse_graph(&text).map_err(|e| anyhow!("{e}"))?;
            let report = solve_beta_limited(&g, &spec).map_err(|e| anyhow!("{e}"))?;
            finish_solver("beta-limited", &g, report, hash, format, output)
        }

        Command::Exact {
            k,
            alpha,
            beta,
            seed,
            fail_prob,
            input,
            output,
        } => {
            let spec = parse_spec(&alpha, &beta)?;
            let fail_prob = parse_rational(&fail_prob).context("bad --fail-prob")?;
            if fail_prob <= Rat::from_integer(0) || fail_prob >= Rat::from_integer(1) {
                bail!("--fail-prob must lie strictly between 0 and 1");
            }
            let seed = resolve_seed(seed)?;
            let (text, hash) = read_input(&input)?;
            let g = parse_graph(&text).map_err(|e| anyhow!("{e}"))?;
            let query = ExactQuery::new(k as usize, spec, seed).with_failure_prob(fail_prob);
            let (found, stats) = solve_exact_with_stats(&g, &query);
            match found {
                Some(m) => {
                    let doc = envelope(
                        "exact",
                        &hash,
                        json!({
                            "size": m.len(),
                            "edges": edges_value(&g, &m),
                            "trials": stats.trials_run,
                            "seed": seed,
                        }),
                        &[],
                    );
                    let text = format!(
                        "found a balanced matching of size {} after {} trials",
                        m.len(),
                        stats.trials_run
                    );
                    emit(&doc, text, format, output.as_deref())?;
                    Ok(EXIT_OK)
                }
                None => {
                    let confidence = Rat::from_integer(1) - fail_prob;
                    let doc = envelope(
                        "exact",
                        &hash,
                        json!("not_found"),
                        &[("confidence", json!(format_rational(confidence)))],
                    );
                    let text = format!(
                        "no balanced matching of size {k} found (confidence {})",
                        format_rational(confidence)
                    );
                    emit(&doc, text, format, output.as_deref())?;
                    Ok(EXIT_NOT_FOUND)
                }
            }
        }

        Command::Oracle {
            alpha,
            beta,
            input,
            cap,
            output,
        } => {
            let spec = parse_spec(&alpha, &beta)?;
            let (text, hash) = read_input(&input)?;
            let g = parse_graph(&text).map_err(|e| anyhow!("{e}"))?;
            let result = brute_force_opt(&g, &spec, cap).map_err(|e| anyhow!("{e}"))?;
            let witness = result.opt_matching.as_ref();
            let per_color: Option<Value> = witness.map(|m| {
                let map: std::collections::BTreeMap<String, usize> = m
                    .color_counts()
                    .iter()
                    .enumerate()
                    .map(|(c, &count)| ((c + 1).to_string(), count))
                    .collect();
                json!(map)
            });
            let doc = envelope(
                "oracle",
                &hash,
                json!({
                    "opt_size": result.opt_size,
                    "matching": witness.map(|m| edges_value(&g, m)),
                    "per_color": per_color,
                    "min_color": result
                        .min_color
                        .map(|(c, count)| json!({"color": c + 1, "count": count})),
                }),
                &[],
            );
            let text = format!("optimum balanced matching size: {}", result.opt_size);
            emit(&doc, text, format, output.as_deref())?;
            Ok(if result.opt_size == 0 {
                EXIT_NO_SOLUTION
            } else {
                EXIT_OK
            })
        }

        Command::Reduce {
            input,
            output,
            layout,
        } => {
            let (text, hash) = read_input(&input)?;
            let formula = parse_dimacs_3sat3(&text).map_err(|e| anyhow!("{e}"))?;
            let reduction = reduce_to_path(&formula);
            fs::write(&output, serialize_graph(&reduction.graph))
                .with_context(|| format!("cannot write {}", output.display()))?;
            let layout_doc = json!({
                "num_vars": formula.num_vars(),
                "num_clauses": formula.num_clauses(),
                "num_colors": reduction.graph.num_colors(),
                "alpha": format_rational(reduction.spec.alpha()),
                "beta": format_rational(reduction.spec.beta()),
                "target_size": reduction.target_size(),
                "var_gadgets": reduction
                    .var_gadgets
                    .iter()
                    .enumerate()
                    .map(|(i, gadget)| {
                        json!({
                            "variable": i + 1,
                            "edge_indices": gadget.edge_indices.iter().map(|&e| e + 1).collect::<Vec<_>>(),
                            "clause_colors": gadget.clause_colors.iter().map(|&c| c + 1).collect::<Vec<_>>(),
                            "middle_positive": gadget.middle_positive,
                        })
                    })
                    .collect::<Vec<_>>(),
                "spacer_gadgets": reduction
                    .spacer_gadgets
                    .iter()
                    .map(|spacer| {
                        json!({
                            "edge_indices": spacer.edge_indices.iter().map(|&e| e + 1).collect::<Vec<_>>(),
                            "color": spacer.color + 1,
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            fs::write(&layout, serde_json::to_string(&layout_doc)? + "\n")
                .with_context(|| format!("cannot write {}", layout.display()))?;
            let doc = envelope(
                "reduce",
                &hash,
                json!({
                    "instance": output.display().to_string(),
                    "layout": layout.display().to_string(),
                    "num_vars": formula.num_vars(),
                    "num_clauses": formula.num_clauses(),
                    "num_colors": reduction.graph.num_colors(),
                    "path_edges": reduction.graph.num_edges(),
                    "alpha": format_rational(reduction.spec.alpha()),
                    "beta": format_rational(reduction.spec.beta()),
                    "target_size": reduction.target_size(),
                }),
                &[],
            );
            let text = format!(
                "wrote {} and {} ({} vars, {} clauses -> {} edges, {} colors)",
                output.display(),
                layout.display(),
                formula.num_vars(),
                formula.num_clauses(),
                reduction.graph.num_edges(),
                reduction.graph.num_colors()
            );
            emit(&doc, text, format, None)?;
            Ok(EXIT_OK)
        }
    }
}

fn finish_solver(
    tool: &str,
    g: &fpm_core::ColoredGraph,
    report: Option<fpm_core::SolveReport>,
    hash: String,
    format: OutputFormat,
    output: Option<PathBuf>,
) -> Result<u8> {
    match report {
        Some(report) => {
            let doc = envelope(tool, &hash, report_value(g, &report), &[]);
            let text = format!(
                "size {} (probe {}, certified bounds [{}, {}])",
                report.size,
                report.probed_t.map_or_else(|| "-".into(), |t| t.to_string()),
                format_rational(report.certified_lower),
                format_rational(report.certified_upper),
            );
            emit(&doc, text, format, output.as_deref())?;
            Ok(EXIT_OK)
        }
        None => {
            let doc = envelope(tool, &hash, json!("no_solution"), &[]);
            emit(
                &doc,
                "no solution certified".to_string(),
                format,
                output.as_deref(),
            )?;
            Ok(EXIT_NO_SOLUTION)
        }
    }
}
