//! `hyperex`: build instances, run checks and emit canonical JSON reports.
//!
//! Exit codes: 0 when every check passes or is only measured, 1 when any
//! check fails, 2 for usage and input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use hyperex_core::{
    build_assembly, build_gnk, chain_components, gnk_metric, hausdorff_ccp, kantorovich,
    lipschitz_constant, pi_lemma_probe, retraction_lower_bound, run_suite, to_canonical_json,
    verify_metric, AssemblyKind, AssemblyParams, ConvexMeasureSet, DiscreteMeasure, Error,
    ExperimentConfig, FiniteMetricSpace, PointMap, ProbeFamily, RetractionInstance, SampleSpec,
    Scheme, SolverOptions, Tolerances,
};

#[derive(Parser)]
#[command(name = "hyperex", version, about = "Finite-scale hyperspace and retraction experiments")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    XprimeSlice,
    XTrunc,
    YTrunc,
    #[value(name = "x-n")]
    XN,
}

impl From<KindArg> for AssemblyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::XprimeSlice => AssemblyKind::XprimeSlice,
            KindArg::XTrunc => AssemblyKind::XTrunc,
            KindArg::YTrunc => AssemblyKind::YTrunc,
            KindArg::XN => AssemblyKind::XN,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    General,
    Squared,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::General => Scheme::General,
            SchemeArg::Squared => Scheme::Squared,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleArg {
    Minimal,
    Default,
}

impl From<SampleArg> for SampleSpec {
    fn from(s: SampleArg) -> Self {
        match s {
            SampleArg::Minimal => SampleSpec::Minimal,
            SampleArg::Default => SampleSpec::Default,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Identical,
    Singletons,
    Perturbed,
    TiltedSegments,
}

#[derive(Subcommand)]
enum Command {
    /// The graph G(n,k) and its path metric.
    Gnk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Build an assembled space and check the metric axioms.
    Space {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Values of n: `a..b` (inclusive) or a comma list.
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value = "general")]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value = "default")]
        sample: SampleArg,
    },
    /// Kantorovich distance; input `{"space", "mu", "nu"}`.
    Ot {
        #[arg(long)]
        input: PathBuf,
    },
    /// Hausdorff distance of two hulls; input `{"space", "a", "b"}` with
    /// generator weight lists.
    Hyper {
        #[arg(long)]
        input: PathBuf,
    },
    /// Ratio probe of the min-norm-point map.
    PiProbe {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "tilted-segments")]
        family: FamilyArg,
    },
    /// Chain components of a truncated Y space for each scale C.
    Asdim {
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: String,
        #[arg(long = "c")]
        c: String,
        #[arg(long, value_enum, default_value = "general")]
        scheme: SchemeArg,
    },
    /// `λ*(ε)` of a map; input `{"source", "target", "assignment"}`.
    Lip {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Minimal retraction constant of X_N per k.
    Obstruct {
        #[arg(long)]
        n: usize,
        #[arg(long = "k-range")]
        k_range: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, value_enum, default_value = "default")]
        sample: SampleArg,
        /// Gap tolerance for convergence.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run verification suites from a JSON config.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides every tolerance in the config.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the CSV projection here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_range(text: &str, field: &str) -> anyhow::Result<Vec<usize>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().with_context(|| format!("{field}: bad start {a:?}"))?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("{field}: bad end {b:?}"))?;
        if a > b {
            bail!("{field}: empty range {text}");
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().with_context(|| format!("{field}: bad value {s:?}")))
        .collect()
}

fn parse_reals(text: &str, field: &str) -> anyhow::Result<Vec<f64>> {
    if text.contains("..") {
        return Ok(parse_range(text, field)?.into_iter().map(|v| v as f64).collect());
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().with_context(|| format!("{field}: bad value {s:?}")))
        .collect()
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = to_canonical_json(value)?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Deserialize)]
struct OtInput {
    space: FiniteMetricSpace,
    mu: Vec<f64>,
    nu: Vec<f64>,
}

#[derive(Deserialize)]
struct HyperInput {
    space: FiniteMetricSpace,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct LipInput {
    source: FiniteMetricSpace,
    target: FiniteMetricSpace,
    assignment: Vec<usize>,
}

fn hull<'a>(space: &'a FiniteMetricSpace, gens: &[Vec<f64>]) -> anyhow::Result<ConvexMeasureSet<'a>> {
    let gens = gens
        .iter()
        .map(|w| DiscreteMeasure::new(space, w.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvexMeasureSet::new(gens)?)
}

/// Returns whether every check passed or was only measured.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gnk { n, k } => {
            let g = build_gnk(n, k)?;
            let metric = gnk_metric(&g)?;
            let labels: Vec<String> = (0..g.vertex_count()).map(|v| g.label(v)).collect();
            let metric = metric.relabel(labels)?;
            emit(&json!({"graph": g, "metric": metric}), out)?;
            Ok(true)
        }
        Command::Space {
            kind,
            n,
            k,
            scheme,
            sample,
        } => {
            let params = AssemblyParams::new(parse_range(&n, "n")?, parse_range(&k, "k")?)
                .with_scheme(scheme.into())
                .with_sample(sample.into());
            let asm = build_assembly(kind.into(), &params)?;
            let axioms = verify_metric(&asm.space)?;
            let pass = axioms.pass;
            emit(&json!({"assembly": asm, "axioms": axioms}), out)?;
            Ok(pass)
        }
        Command::Ot { input } => {
            let inp: OtInput = read_json(&input)?;
            let mu = DiscreteMeasure::new(&inp.space, inp.mu)?;
            let nu = DiscreteMeasure::new(&inp.space, inp.nu)?;
            emit(&kantorovich(&mu, &nu)?, out)?;
            Ok(true)
        }
        Command::Hyper { input } => {
            let inp: HyperInput = read_json(&input)?;
            let a = hull(&inp.space, &inp.a)?;
            let b = hull(&inp.space, &inp.b)?;
            emit(&hausdorff_ccp(&a, &b)?, out)?;
            Ok(true)
        }
        Command::PiProbe {
            trials,
            seed,
            family,
        } => {
            let family = match family {
                FamilyArg::Identical => ProbeFamily::Identical {
                    dim: 2,
                    max_vertices: 4,
                    scale: 1.0,
                },
                FamilyArg::Singletons => ProbeFamily::TranslatedSingletons { dim: 2, scale: 1.0 },
                FamilyArg::Perturbed => ProbeFamily::Perturbed {
                    dim: 3,
                    max_vertices: 5,
                    scale: 1.0,
                    noise: 0.05,
                },
                FamilyArg::TiltedSegments => ProbeFamily::TiltedSegments {
                    max_length: 0.5,
                    max_drop: 0.05,
                },
            };
            emit(&pi_lemma_probe(trials, seed, &family)?, out)?;
            Ok(true)
        }
        Command::Asdim { n, k, c, scheme } => {
            let params = AssemblyParams::new(parse_range(&n, "n")?, parse_range(&k, "k")?)
                .with_scheme(scheme.into());
            let cs = parse_reals(&c, "c")?;
            if cs.is_empty() {
                bail!("c: empty grid");
            }
            let asm = build_assembly(AssemblyKind::YTrunc, &params)?;
            let mut pass = true;
            let mut rows = Vec::new();
            for c in cs {
                let r = chain_components(&asm.space, c)?;
                let bound = 10f64.sqrt() * c;
                let ok = r.max_diameter <= bound + hyperex_core::TOL;
                pass &= ok;
                rows.push(json!({
                    "C": c,
                    "components": r.components.len(),
                    "max_diameter": r.max_diameter,
                    "bound": bound,
                    "pass": ok,
                    "witness": [asm.space.label(r.witness_pair.0), asm.space.label(r.witness_pair.1)],
                }));
            }
            emit(&json!({"params": params, "points": asm.space.len(), "chains": rows}), out)?;
            Ok(pass)
        }
        Command::Lip { input, eps } => {
            let inp: LipInput = read_json(&input)?;
            let f = PointMap::new(&inp.source, &inp.target, inp.assignment)?;
            emit(&lipschitz_constant(&f, eps)?, out)?;
            Ok(true)
        }
        Command::Obstruct {
            n,
            k_range,
            eps,
            sample,
            tol,
        } => {
            let mut opts = SolverOptions::default();
            if let Some(t) = tol {
                opts.gap_tolerance = t;
            }
            let mut table = Vec::new();
            for k in parse_range(&k_range, "k-range")? {
                let params = AssemblyParams::new(vec![n], vec![k]).with_sample(sample.into());
                let asm = build_assembly(AssemblyKind::XN, &params)?;
                let inst = RetractionInstance::from_assembly(&asm, eps)?;
                let r = retraction_lower_bound(&inst, &opts)?;
                table.push(json!({"n": n, "k": k, "points": asm.space.len(), "result": r}));
            }
            emit(&json!({"epsilon": eps, "lambda_min": table}), out)?;
            Ok(true)
        }
        Command::Suite {
            config,
            seed,
            tol,
            csv,
        } => {
            let mut cfg = match config {
                Some(p) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    ExperimentConfig::from_json(&text)?
                }
                None => ExperimentConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = tol {
                cfg.tolerances = Tolerances {
                    metric: t,
                    duality: t,
                    shortness: t,
                    min_norm: t,
                    obstruction_gap: t,
                    multistart: t,
                };
            }
            let report = run_suite(&cfg)?;
            let target = out.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(PathBuf::from));
            emit(&report, target.as_deref())?;
            if let Some(p) = csv {
                fs::write(&p, report.to_csv()?).with_context(|| format!("writing {}", p.display()))?;
            }
            let s = &report.summary;
            eprintln!("pass {} fail {} measured {}", s.pass, s.fail, s.measured);
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Lp(_)) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
