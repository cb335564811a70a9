//! Batch verification suites and their deterministic reports.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::euclid::{
    barycenter, min_norm_point, pi_lemma_probe, EmbeddedMeasure, ProbeFamily,
};
use crate::hyperspace::{ccp_pushforward, hausdorff_ccp, ConvexMeasureSet};
use crate::metric::{chain_components, euclidean_distance, verify_metric, FiniteMetricSpace, PointMap, TOL};
use crate::obstruction::{retraction_lower_bound, Initialization, RetractionInstance, SolverOptions};
use crate::sample;
use crate::spaces::{build_assembly, build_gnk, gnk_metric, AssemblyKind, AssemblyParams, SampleSpec};
use crate::transport::{kantorovich, pushforward, DiscreteMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Metrics,
    Transport,
    Hyperspace,
    Euclid,
    Chains,
    Obstruction,
    All,
}

impl Suite {
    const CONCRETE: [Suite; 6] = [
        Suite::Metrics,
        Suite::Transport,
        Suite::Hyperspace,
        Suite::Euclid,
        Suite::Chains,
        Suite::Obstruction,
    ];

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::CONCRETE.to_vec(),
            s => vec![s],
        }
    }

    fn stream_base(self) -> u64 {
        (self as u64) << 32
    }

    /// Grid fields the suite reads.
    fn needs(self) -> &'static [&'static str] {
        match self {
            Suite::Metrics => &["n", "k"],
            Suite::Chains => &["n", "k", "C"],
            Suite::Obstruction => &["n", "k", "eps"],
            Suite::Transport | Suite::Hyperspace | Suite::Euclid => &[],
            Suite::All => &["n", "k", "C", "eps"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    pub eps: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            n: vec![2, 3],
            k: vec![1, 2, 3, 4],
            c: (1..=10).map(f64::from).collect(),
            eps: vec![0.0, 1.0, 5.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub metric: f64,
    pub duality: f64,
    pub shortness: f64,
    pub min_norm: f64,
    pub obstruction_gap: f64,
    pub multistart: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            metric: TOL,
            duality: 1e-7,
            shortness: 1e-7,
            min_norm: 1e-9,
            obstruction_gap: 1e-3,
            multistart: 2e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub grids: Grids,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Random instances per randomized check.
    pub instances: usize,
    pub output: Option<String>,
    /// Adds wall-clock runtime to the report, which breaks byte identity.
    pub record_runtime: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            grids: Grids::default(),
            seed: 0,
            tolerances: Tolerances::default(),
            instances: 20,
            output: None,
            record_runtime: false,
        }
    }
}

fn config_error(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for field in self.suite.needs() {
            let empty = match *field {
                "n" => self.grids.n.is_empty(),
                "k" => self.grids.k.is_empty(),
                "C" => self.grids.c.is_empty(),
                _ => self.grids.eps.is_empty(),
            };
            if empty {
                return Err(config_error(field, "grid is empty"));
            }
        }
        if self.grids.n.iter().any(|&n| n < 2) {
            return Err(config_error("n", "values must be >= 2"));
        }
        if self.grids.k.iter().any(|&k| k < 1) {
            return Err(config_error("k", "values must be >= 1"));
        }
        if self.grids.c.iter().any(|&c| c.is_nan() || c <= 0.0) {
            return Err(config_error("C", "values must be > 0"));
        }
        if self.grids.eps.iter().any(|&e| e.is_nan() || e < 0.0) {
            return Err(config_error("eps", "values must be >= 0"));
        }
        if self.instances == 0 {
            return Err(config_error("instances", "must be >= 1"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.metric", t.metric),
            ("tolerances.duality", t.duality),
            ("tolerances.shortness", t.shortness),
            ("tolerances.min_norm", t.min_norm),
            ("tolerances.obstruction_gap", t.obstruction_gap),
            ("tolerances.multistart", t.multistart),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(config_error(name, "must be >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Trend values with no pass/fail criterion at finite scale.
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub check: String,
    pub inputs: Value,
    pub inputs_digest: String,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub witness: Option<Value>,
    pub error: Option<String>,
}

fn digest(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(inputs).unwrap_or_default();
    Sha256::digest(&bytes)[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl CheckRecord {
    fn new(suite: Suite, check: &str, inputs: Value) -> Self {
        Self {
            suite,
            check: check.into(),
            inputs_digest: digest(&inputs),
            inputs,
            value: None,
            bound: None,
            tolerance: None,
            status: Status::Measured,
            witness: None,
            error: None,
        }
    }

    /// Passes when `value ≤ bound + tolerance`; the witness is kept either way.
    fn at_most(mut self, value: f64, bound: f64, tolerance: f64, witness: Value) -> Self {
        self.value = Some(value);
        self.bound = Some(bound);
        self.tolerance = Some(tolerance);
        self.status = if value <= bound + tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        self.witness = Some(witness);
        self
    }

    fn measured(mut self, value: f64, witness: Value) -> Self {
        self.value = Some(value);
        self.status = Status::Measured;
        self.witness = Some(witness);
        self
    }

    fn failed(mut self, err: &Error) -> Self {
        self.status = Status::Fail;
        self.error = Some(err.to_string());
        self.witness = Some(self.inputs.clone());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub measured: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: ExperimentConfig,
    /// Sorted by suite, check name and input digest.
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    pub environment: Environment,
    pub runtime_seconds: Option<f64>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> Result<String> {
        crate::to_canonical_json(self)
    }

    /// Flat projection of the records.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record(["suite", "check", "inputs_digest", "status", "value", "bound", "tolerance"])
            .map_err(ser)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let suite = serde_json::to_value(r.suite).map_err(|e| Error::Serialization(e.to_string()))?;
            let status = serde_json::to_value(r.status).map_err(|e| Error::Serialization(e.to_string()))?;
            w.write_record([
                suite.as_str().unwrap_or_default(),
                &r.check,
                &r.inputs_digest,
                status.as_str().unwrap_or_default(),
                &opt(r.value),
                &opt(r.bound),
                &opt(r.tolerance),
            ])
            .map_err(ser)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }
}

type Cell<'a> = Box<dyn Fn() -> Result<Vec<CheckRecord>> + Send + Sync + 'a>;

/// A failing cell becomes one failed record named after the cell.
struct NamedCell<'a> {
    suite: Suite,
    name: String,
    inputs: Value,
    run: Cell<'a>,
}

fn cell<'a>(
    suite: Suite,
    name: &str,
    inputs: Value,
    run: impl Fn() -> Result<Vec<CheckRecord>> + Send + Sync + 'a,
) -> NamedCell<'a> {
    NamedCell {
        suite,
        name: name.into(),
        inputs,
        run: Box::new(run),
    }
}

pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let mut cells = Vec::new();
    for suite in config.suite.expand() {
        match suite {
            Suite::Metrics => metrics_cells(config, &mut cells),
            Suite::Transport => transport_cells(config, &mut cells),
            Suite::Hyperspace => hyperspace_cells(config, &mut cells),
            Suite::Euclid => euclid_cells(config, &mut cells),
            Suite::Chains => chain_cells(config, &mut cells),
            Suite::Obstruction => obstruction_cells(config, &mut cells),
            Suite::All => unreachable!("expanded above"),
        }
    }
    let mut records: Vec<CheckRecord> = cells
        .par_iter()
        .flat_map_iter(|c| match (c.run)() {
            Ok(recs) => recs,
            Err(e) => vec![CheckRecord::new(c.suite, &c.name, c.inputs.clone()).failed(&e)],
        })
        .collect();
    records.sort_by(|a, b| {
        (a.suite, &a.check, &a.inputs_digest).cmp(&(b.suite, &b.check, &b.inputs_digest))
    });
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let summary = Summary {
        pass: count(Status::Pass),
        fail: count(Status::Fail),
        measured: count(Status::Measured),
    };
    Ok(SuiteReport {
        config: config.clone(),
        summary,
        records,
        environment: Environment::current(),
        runtime_seconds: config.record_runtime.then(|| start.elapsed().as_secs_f64()),
    })
}

fn axioms_record(suite: Suite, check: &str, inputs: Value, space: &FiniteMetricSpace, tol: f64) -> Result<CheckRecord> {
    let report = verify_metric(space)?;
    let witness = json!({
        "points": space.len(),
        "first_violation": report.violations.first(),
    });
    let mut rec = CheckRecord::new(suite, check, inputs).at_most(report.violation_count as f64, 0.0, 0.0, witness);
    rec.tolerance = Some(tol);
    Ok(rec)
}

fn metrics_cells<'a>(cfg: &'a ExperimentConfig, cells: &mut Vec<NamedCell<'a>>) {
    let s = Suite::Metrics;
    let tol = cfg.tolerances.metric;
    for &n in &cfg.grids.n {
        for &k in &cfg.grids.k {
            let inputs = json!({"n": n, "k": k});
            cells.push(cell(s, "gnk_metric_axioms", inputs.clone(), move || {
                let space = gnk_metric(&build_gnk(n, k)?)?;
                Ok(vec![axioms_record(s, "gnk_metric_axioms", inputs.clone(), &space, tol)?])
            }));
        }
    }
    let params = AssemblyParams::new(cfg.grids.n.clone(), cfg.grids.k.clone());
    for (kind, check) in [
        (AssemblyKind::XprimeSlice, "xprime_slice_axioms"),
        (AssemblyKind::XTrunc, "x_trunc_axioms"),
        (AssemblyKind::YTrunc, "y_trunc_axioms"),
    ] {
        let params = params.clone();
        let inputs = json!({"kind": kind, "params": params});
        cells.push(cell(s, check, inputs.clone(), move || {
            let asm = build_assembly(kind, &params)?;
            Ok(vec![axioms_record(s, check, inputs.clone(), &asm.space, tol)?])
        }));
    }
    for &n in &cfg.grids.n {
        let params = AssemblyParams::new(vec![n], cfg.grids.k.clone());
        let inputs = json!({"kind": AssemblyKind::XN, "params": params});
        cells.push(cell(s, "x_n_axioms", inputs.clone(), move || {
            let asm = build_assembly(AssemblyKind::XN, &params)?;
            Ok(vec![axioms_record(s, "x_n_axioms", inputs.clone(), &asm.space, tol)?])
        }));
    }
}

fn transport_cells<'a>(cfg: &'a ExperimentConfig, cells: &mut Vec<NamedCell<'a>>) {
    let s = Suite::Transport;
    for i in 0..cfg.instances {
        let inputs = json!({"seed": cfg.seed, "instance": i});
        cells.push(cell(s, "transport_instance", inputs.clone(), move || {
            let mut rng = sample::rng(cfg.seed, s.stream_base() + i as u64);
            let m = rng.gen_range(2..=12);
            let (space, _) = sample::random_euclidean_space(&mut rng, m, 2, 5.0)?;
            let mu = DiscreteMeasure::new(&space, sample::random_weights(&mut rng, m, 0.3))?;
            let nu = DiscreteMeasure::new(&space, sample::random_weights(&mut rng, m, 0.3))?;
            let k = kantorovich(&mu, &nu)?;
            let duality = CheckRecord::new(s, "kantorovich_duality_gap", inputs.clone()).at_most(
                k.duality_gap,
                0.0,
                cfg.tolerances.duality,
                json!({"primal": k.value, "dual": k.potential.value}),
            );

            let mut worst = (0.0f64, (0, 0));
            for a in 0..m {
                for b in a + 1..m {
                    let w = kantorovich(&DiscreteMeasure::dirac(&space, a)?, &DiscreteMeasure::dirac(&space, b)?)?;
                    let err = (w.value - space.dist(a, b)).abs();
                    if err > worst.0 {
                        worst = (err, (a, b));
                    }
                }
            }
            let dirac = CheckRecord::new(s, "dirac_isometry", inputs.clone()).at_most(
                worst.0,
                0.0,
                TOL,
                json!({"pair": [space.label(worst.1 .0), space.label(worst.1 .1)]}),
            );

            let target_len = rng.gen_range(1..=m);
            let inst = sample::short_map_instance(&mut rng, m, target_len)?;
            let f = PointMap::new(&inst.source, &inst.target, inst.assignment.clone())?;
            let a = DiscreteMeasure::new(&inst.source, sample::random_weights(&mut rng, m, 0.3))?;
            let b = DiscreteMeasure::new(&inst.source, sample::random_weights(&mut rng, m, 0.3))?;
            let before = kantorovich(&a, &b)?.value;
            let after = kantorovich(&pushforward(&f, &a)?, &pushforward(&f, &b)?)?.value;
            let short = CheckRecord::new(s, "pushforward_short", inputs.clone()).at_most(
                after - before,
                0.0,
                cfg.tolerances.shortness,
                json!({"source_distance": before, "image_distance": after}),
            );
            Ok(vec![duality, dirac, short])
        }));
    }
}

fn random_hull<'a>(rng: &mut impl Rng, space: &'a FiniteMetricSpace, max_generators: usize) -> Result<ConvexMeasureSet<'a>> {
    let g = rng.gen_range(1..=max_generators);
    let gens = (0..g)
        .map(|_| DiscreteMeasure::new(space, sample::random_weights(rng, space.len(), 0.4)))
        .collect::<Result<Vec<_>>>()?;
    ConvexMeasureSet::new(gens)
}

fn hyperspace_cells<'a>(cfg: &'a ExperimentConfig, cells: &mut Vec<NamedCell<'a>>) {
    let s = Suite::Hyperspace;
    for i in 0..cfg.instances {
        let inputs = json!({"seed": cfg.seed, "instance": i});
        cells.push(cell(s, "hyperspace_instance", inputs.clone(), move || {
            let mut rng = sample::rng(cfg.seed, s.stream_base() + i as u64);
            let m = rng.gen_range(2..=6);
            let (space, _) = sample::random_euclidean_space(&mut rng, m, 2, 5.0)?;
            let (x, y) = (rng.gen_range(0..m), rng.gen_range(0..m));
            let h = hausdorff_ccp(&ConvexMeasureSet::dirac(&space, x)?, &ConvexMeasureSet::dirac(&space, y)?)?;
            let dirac = CheckRecord::new(s, "dirac_isometry", inputs.clone()).at_most(
                (h.value - space.dist(x, y)).abs(),
                0.0,
                TOL,
                json!({"pair": [space.label(x), space.label(y)], "hausdorff": h.value}),
            );

            let a = random_hull(&mut rng, &space, 3)?;
            let b = random_hull(&mut rng, &space, 3)?;
            let c = random_hull(&mut rng, &space, 3)?;
            let (ab, bc, ac) = (
                hausdorff_ccp(&a, &b)?.value,
                hausdorff_ccp(&b, &c)?.value,
                hausdorff_ccp(&a, &c)?.value,
            );
            let triangle = CheckRecord::new(s, "hausdorff_triangle", inputs.clone()).at_most(
                ac,
                ab + bc,
                cfg.tolerances.shortness,
                json!({"ab": ab, "bc": bc, "ac": ac}),
            );

            let target_len = rng.gen_range(1..=m);
            let inst = sample::short_map_instance(&mut rng, m, target_len)?;
            let f = PointMap::new(&inst.source, &inst.target, inst.assignment.clone())?;
            let a = random_hull(&mut rng, &inst.source, 3)?;
            let b = random_hull(&mut rng, &inst.source, 3)?;
            let before = hausdorff_ccp(&a, &b)?.value;
            let after = hausdorff_ccp(&ccp_pushforward(&f, &a)?, &ccp_pushforward(&f, &b)?)?.value;
            let short = CheckRecord::new(s, "ccp_pushforward_short", inputs.clone()).at_most(
                after - before,
                0.0,
                cfg.tolerances.shortness,
                json!({"source_distance": before, "image_distance": after}),
            );
            Ok(vec![dirac, triangle, short])
        }));
    }
}

fn euclid_cells<'a>(cfg: &'a ExperimentConfig, cells: &mut Vec<NamedCell<'a>>) {
    let s = Suite::Euclid;
    let trials = cfg.instances.max(1);
    let families = [
        ("pi_probe_tilted_segments", ProbeFamily::TiltedSegments { max_length: 0.5, max_drop: 0.05 }),
        (
            "pi_probe_perturbed",
            ProbeFamily::Perturbed { dim: 3, max_vertices: 5, scale: 1.0, noise: 0.05 },
        ),
    ];
    for (check, family) in families {
        let inputs = json!({"seed": cfg.seed, "trials": trials, "family": family});
        cells.push(cell(s, check, inputs.clone(), move || {
            let r = pi_lemma_probe(trials, cfg.seed, &family)?;
            let witness = json!({
                "shortness_violated": r.shortness_violated,
                "family_max_ratio": r.family_max_ratio,
                "fixed": r.fixed,
                "witness": r.witness,
            });
            Ok(vec![CheckRecord::new(s, check, inputs.clone()).measured(r.max_ratio, witness)])
        }));
    }
    let family = ProbeFamily::TranslatedSingletons { dim: 3, scale: 2.0 };
    let inputs = json!({"seed": cfg.seed, "trials": trials, "family": family});
    cells.push(cell(s, "pi_probe_singletons", inputs.clone(), move || {
        let r = pi_lemma_probe(trials, cfg.seed, &family)?;
        let worst = r.records.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
        Ok(vec![CheckRecord::new(s, "pi_probe_singletons", inputs.clone()).at_most(
            r.family_max_ratio.unwrap_or(0.0),
            1.0,
            1e-9,
            json!({"witness": worst}),
        )])
    }));

    for i in 0..cfg.instances {
        let inputs = json!({"seed": cfg.seed, "instance": i});
        cells.push(cell(s, "euclid_instance", inputs.clone(), move || {
            let mut rng = sample::rng(cfg.seed, s.stream_base() + i as u64);
            let dim = rng.gen_range(1..=6);
            let nv = rng.gen_range(1..=12);
            let p = sample::random_polytope(&mut rng, dim, nv, 2.0)?;
            let y = min_norm_point(&p);
            let (violation, vertex) = p
                .vertices()
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let vi: f64 = v.iter().zip(&y).map(|(a, b)| b * (a - b)).sum();
                    (-vi, j)
                })
                .fold((f64::NEG_INFINITY, 0), |acc, c| if c.0 > acc.0 { c } else { acc });
            let vi = CheckRecord::new(s, "min_norm_certificate", inputs.clone()).at_most(
                violation,
                0.0,
                cfg.tolerances.min_norm,
                json!({"polytope": p, "point": y, "vertex": vertex}),
            );

            let m = rng.gen_range(2..=8);
            let (space, pts) = sample::random_euclidean_space(&mut rng, m, dim, 3.0)?;
            let wa = sample::random_weights(&mut rng, m, 0.3);
            let wb = sample::random_weights(&mut rng, m, 0.3);
            let w1 = kantorovich(&DiscreteMeasure::new(&space, wa.clone())?, &DiscreteMeasure::new(&space, wb.clone())?)?.value;
            let ba = barycenter(&EmbeddedMeasure::new(pts.clone(), wa)?);
            let bb = barycenter(&EmbeddedMeasure::new(pts, wb)?);
            let gap = euclidean_distance(&ba, &bb);
            let bary = CheckRecord::new(s, "barycenter_short", inputs.clone()).at_most(
                gap,
                w1,
                cfg.tolerances.shortness,
                json!({"barycenter_distance": gap, "kantorovich": w1}),
            );
            Ok(vec![vi, bary])
        }));
    }
}

fn chain_cells<'a>(cfg: &'a ExperimentConfig, cells: &mut Vec<NamedCell<'a>>) {
    let s = Suite::Chains;
    let params = AssemblyParams::new(cfg.grids.n.clone(), cfg.grids.k.clone());
    let inputs = json!({"kind": AssemblyKind::YTrunc, "params": params, "C": cfg.grids.c});
    cells.push(cell(s, "chains", inputs.clone(), move || {
        let asm = build_assembly(AssemblyKind::YTrunc, &params)?;
        let mut cs = cfg.grids.c.clone();
        cs.sort_by(f64::total_cmp);
        cs.dedup();
        let reports = cs
            .par_iter()
            .map(|&c| chain_components(&asm.space, c))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for r in &reports {
            let bound = 10f64.sqrt() * r.c;
            let (a, b) = r.witness_pair;
            out.push(
                CheckRecord::new(s, "chain_diameter_bound", json!({"params": params, "C": r.c})).at_most(
                    r.max_diameter,
                    bound,
                    TOL,
                    json!({
                        "components": r.components.len(),
                        "pair": [asm.space.label(a), asm.space.label(b)],
                    }),
                ),
            );
        }
        // every component at a smaller C must sit inside one at the larger C
        let mut broken = None;
        for w in reports.windows(2) {
            let mut owner = vec![0; asm.space.len()];
            for (ci, comp) in w[1].components.iter().enumerate() {
                for &p in comp {
                    owner[p] = ci;
                }
            }
            let nested = w[0]
                .components
                .iter()
                .all(|comp| comp.iter().all(|&p| owner[p] == owner[comp[0]]));
            if !nested && broken.is_none() {
                broken = Some((w[0].c, w[1].c));
            }
        }
        let counts: Vec<usize> = reports.iter().map(|r| r.components.len()).collect();
        out.push(
            CheckRecord::new(s, "chain_components_monotone", inputs.clone()).at_most(
                f64::from(u8::from(broken.is_some())),
                0.0,
                0.0,
                json!({"component_counts": counts, "first_break": broken}),
            ),
        );
        Ok(out)
    }));
}

fn obstruction_cells<'a>(cfg: &'a ExperimentConfig, cells: &mut Vec<NamedCell<'a>>) {
    let s = Suite::Obstruction;
    let opts = SolverOptions {
        gap_tolerance: cfg.tolerances.obstruction_gap,
        ..SolverOptions::default()
    };
    for &n in &cfg.grids.n {
        for &k in &cfg.grids.k {
            for &eps in &cfg.grids.eps {
                let opts = opts.clone();
                let params = AssemblyParams::new(vec![n], vec![k]);
                let inputs = json!({"params": params, "eps": eps});
                cells.push(cell(s, "lambda_min", inputs.clone(), move || {
                    let asm = build_assembly(AssemblyKind::XN, &params)?;
                    let inst = RetractionInstance::from_assembly(&asm, eps)?;
                    let r = retraction_lower_bound(&inst, &opts)?;
                    let witness = json!({
                        "lower_bound": r.lower_bound,
                        "gap": r.gap,
                        "status": r.status,
                        "iterations": r.iterations,
                        "placement": r.placement,
                    });
                    let mut rec = CheckRecord::new(s, "lambda_min", inputs.clone()).measured(r.lambda_min, witness);
                    rec.bound = Some(r.lower_bound);
                    rec.tolerance = Some(opts.gap_tolerance);
                    Ok(vec![rec])
                }));
            }

            let opts = opts.clone();
            let eps = cfg.grids.eps.iter().copied().fold(f64::INFINITY, f64::min);
            let inputs = json!({"n": n, "k": k, "eps": eps});
            cells.push(cell(s, "lambda_min_checks", inputs.clone(), move || {
                let base = AssemblyParams::new(vec![n], vec![k]);
                let solve = |sample: SampleSpec, init: Initialization| -> Result<f64> {
                    let asm = build_assembly(AssemblyKind::XN, &base.clone().with_sample(sample))?;
                    let inst = RetractionInstance::from_assembly(&asm, eps)?;
                    Ok(retraction_lower_bound(&inst, &SolverOptions { init, ..opts.clone() })?.lambda_min)
                };
                let starts = [
                    Initialization::Own,
                    Initialization::AnchorCentroid,
                    Initialization::Scaled { factor: 2.0 },
                ];
                let values = starts
                    .iter()
                    .map(|&i| solve(SampleSpec::Default, i))
                    .collect::<Result<Vec<_>>>()?;
                let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                    - values.iter().copied().fold(f64::INFINITY, f64::min);
                let multistart = CheckRecord::new(s, "multistart_agreement", inputs.clone()).at_most(
                    spread,
                    0.0,
                    cfg.tolerances.multistart,
                    json!({"values": values}),
                );

                let chain = [
                    SampleSpec::Minimal,
                    SampleSpec::Default,
                    SampleSpec::Lattice {
                        spacing: k as f64,
                        half_width: 1,
                    },
                ];
                let lambdas = chain
                    .iter()
                    .map(|c| solve(c.clone(), Initialization::Own))
                    .collect::<Result<Vec<_>>>()?;
                let drop = lambdas
                    .windows(2)
                    .map(|w| w[0] - w[1])
                    .fold(0.0f64, f64::max);
                let nested = CheckRecord::new(s, "anchor_enlargement_monotone", inputs.clone()).at_most(
                    drop,
                    0.0,
                    cfg.tolerances.obstruction_gap,
                    json!({"samples": chain, "lambda_min": lambdas}),
                );
                Ok(vec![multistart, nested])
            }));
        }
    }
}
