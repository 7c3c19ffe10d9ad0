//! The `lipkit` command line.
//!
//! Every command writes `certificate.json` into `--out-dir` (with the tool
//! version and the resolved configuration) together with its value tables.
//! Exit code 0 means every certificate passed, 2 that some failed, 1 an
//! input error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::certify::{self, Certificate};
use crate::error::{LipError, Result};
use crate::extension::{
    extend_to_interval, mcshane_envelopes, pointwise_envelopes, pointwise_extend_to_interval,
    PointwiseWitness,
};
use crate::fixtures;
use crate::io;
use crate::local_lipschitz::{decompose, local_extend, modulus_witness, LocalWitness, ModulusMode};
use crate::metric_space::{MetricSpace, Subset};
use crate::partition_of_unity::{
    frolik_grouped, frolik_pou, staircase_partial_sum, FrolikPartition,
};
use crate::scalar_field::{global_lip_values, Field, Interval};
use crate::selection::{
    decreasing_approx, insert, select_with, IntervalMapping, Prescribed, MAX_DEPTH, START_DEPTH,
};

pub const TOL_FLOOR: f64 = 1e-12;
pub const TOL_CEILING: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "lipkit",
    version,
    about = "Lipschitz extensions, partitions of unity and selections on finite metric samples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

/// Flags shared by all commands. `--out-dir` is left out of the recorded
/// configuration so that runs into different directories compare equal.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// Space file: matrix or point-cloud CSV, graph or grid JSON
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// JSON array of point ids
    #[arg(long, global = true)]
    pub subset: Option<PathBuf>,
    /// `id,value` CSV or a JSON field expression
    #[arg(long, global = true)]
    pub values: Option<PathBuf>,
    /// Witness JSON
    #[arg(long, global = true)]
    pub witness: Option<PathBuf>,
    /// Cover JSON
    #[arg(long, global = true)]
    pub cover: Option<PathBuf>,
    /// Lower envelope (value CSV or field JSON); omitted means −∞
    #[arg(long, global = true)]
    pub lower: Option<PathBuf>,
    /// Upper envelope (value CSV or field JSON); omitted means +∞
    #[arg(long, global = true)]
    pub upper: Option<PathBuf>,
    /// Lipschitz constant
    #[arg(long, global = true)]
    pub k: Option<f64>,
    /// Target interval `lo,hi,open|closed,open|closed`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Largest dyadic depth for selections
    #[arg(long, global = true)]
    pub grid_depth: Option<u32>,
    /// Number of approximation steps
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Certificate tolerance, between 1e-12 and 1e-3
    #[arg(long, global = true, default_value_t = certify::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value = ".")]
    #[serde(skip)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Check the metric axioms
    CertifyMetric,
    /// Extend K-Lipschitz data from a subset, optionally into an interval
    Extend,
    /// Extend with per-point constants (`--witness` as [{p, L}])
    ExtendPointwise,
    /// Partition of unity subordinated to a countable cover
    Pou {
        /// One member per cover set instead of the full double family
        #[arg(long)]
        grouped: bool,
    },
    /// Write a locally Lipschitz field as a locally finite sum
    Decompose,
    /// Continuous modulus witness for a locally Lipschitz field
    Modulus {
        #[arg(long, value_enum, default_value_t = ModeArg::Bounded)]
        mode: ModeArg,
    },
    /// Extend locally Lipschitz data from a subset into an interval
    ExtendLocal,
    /// Locally Lipschitz selection strictly between two envelopes
    Select,
    /// Insertion between envelopes, optionally through prescribed data
    Insert,
    /// Strictly decreasing locally Lipschitz approximation from above
    Approx,
    /// Run a built-in fixture
    Demo {
        #[arg(value_enum)]
        fixture: DemoFixture,
    },
    /// Brute-force checks of user data
    Certify {
        #[command(subcommand)]
        check: CertifyCommand,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Bounded,
    Transported,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoFixture {
    SinInvT,
    CuspCurve,
    ReciprocalStaircase,
    DowkerStep,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "check")]
pub enum CertifyCommand {
    /// `--values` is K-Lipschitz
    Lipschitz,
    /// `--witness` is a local Lipschitz witness for `--values`
    Witness,
    /// Seeded random K-Lipschitz extension, checked against the envelopes
    RandomExtension,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Checks that must pass.
    pub certificates: Vec<Certificate>,
    /// Checks a fixture is known to fail; they must fail.
    pub counterexamples: Vec<Certificate>,
    pub summary: BTreeMap<String, Value>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass) && self.counterexamples.iter().all(|c| !c.pass)
    }

    fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }
}

fn need<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| LipError::InvalidParameter(format!("--{flag} is required")))
}

struct Ctx<'a> {
    opts: &'a Options,
    out: &'a Path,
}

impl Ctx<'_> {
    fn space(&self) -> Result<MetricSpace> {
        io::read_space(need(&self.opts.space, "space")?)
    }

    fn subset(&self, space: &MetricSpace) -> Result<Subset> {
        io::read_subset(need(&self.opts.subset, "subset")?, space)
    }

    /// Subset values as a field defined on the subset.
    fn subset_data(&self, space: &MetricSpace, a: &Subset) -> Result<(Field, Vec<f64>)> {
        let vals = io::read_subset_values(need(&self.opts.values, "values")?, a)?;
        let field = Field::partial(
            space.len(),
            a.ids().iter().copied().zip(vals.iter().copied()),
        )?;
        Ok((field, vals))
    }

    fn field(&self, space: &MetricSpace) -> Result<Field> {
        io::read_field(need(&self.opts.values, "values")?, space.len())
    }

    fn witness(&self, space: &MetricSpace) -> Result<LocalWitness> {
        io::read_witness(need(&self.opts.witness, "witness")?, space)
    }

    /// Witness entries centred in `a`; the others say nothing about data
    /// on `a` and are dropped. Returns the number dropped.
    fn witness_on(&self, space: &MetricSpace, a: &Subset) -> Result<(LocalWitness, usize)> {
        let w = self.witness(space)?;
        let kept: Vec<_> = w
            .entries()
            .iter()
            .filter(|e| a.contains(e.p))
            .cloned()
            .collect();
        let dropped = w.len() - kept.len();
        Ok((LocalWitness::new(kept)?, dropped))
    }

    fn k(&self) -> Result<f64> {
        let k = *need(&self.opts.k, "k")?;
        if !(k.is_finite() && k >= 0.0) {
            return Err(LipError::InvalidParameter(format!(
                "--k must be finite and nonnegative, got {k}"
            )));
        }
        Ok(k)
    }

    fn interval(&self) -> Result<Interval> {
        match &self.opts.interval {
            None => Ok(Interval::real_line()),
            Some(s) => {
                let i: Interval = s.parse().map_err(LipError::InvalidParameter)?;
                i.require_nondegenerate()?;
                Ok(i)
            }
        }
    }

    fn bounds(&self, space: &MetricSpace) -> Result<IntervalMapping> {
        let read = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| io::read_field(p, space.len()))
                .transpose()
        };
        Ok(IntervalMapping::new(
            read(&self.opts.lower)?,
            read(&self.opts.upper)?,
        ))
    }

    fn write_values(&self, name: &str, vals: &[f64]) -> Result<()> {
        io::write_values(&self.out.join(name), vals)
    }

    fn write_table(
        &self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<f64>>,
    ) -> Result<()> {
        io::write_table(&self.out.join(name), header, rows)
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<()> {
        let text =
            serde_json::to_string_pretty(value).map_err(|e| LipError::Io(e.to_string()))? + "\n";
        fs::write(self.out.join(name), text).map_err(|e| LipError::Io(format!("{name}: {e}")))
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            print_outcome(&outcome);
            if outcome.pass() {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("lipkit: {e}");
            1
        }
    }
}

fn print_outcome(outcome: &Outcome) {
    for c in &outcome.certificates {
        println!(
            "{:<6} {:<15} worst {:e} (tol {:e}) at {:?}",
            if c.pass { "PASS" } else { "FAIL" },
            serde_json::to_value(c.kind)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            c.worst_violation,
            c.tolerance,
            c.witness
        );
    }
    for c in &outcome.counterexamples {
        println!(
            "{:<6} {:<15} expected failure, worst {:e} at {:?}",
            if c.pass { "FAIL" } else { "PASS" },
            serde_json::to_value(c.kind)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            c.worst_violation,
            c.witness
        );
    }
}

/// Runs one command and writes its outputs.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let opts = &cli.opts;
    if !(TOL_FLOOR..=TOL_CEILING).contains(&opts.tol) {
        return Err(LipError::InvalidParameter(format!(
            "--tol must lie in [{TOL_FLOOR:e}, {TOL_CEILING:e}], got {}",
            opts.tol
        )));
    }
    fs::create_dir_all(&opts.out_dir)
        .map_err(|e| LipError::Io(format!("{}: {e}", opts.out_dir.display())))?;
    let ctx = Ctx {
        opts,
        out: &opts.out_dir,
    };
    let outcome = match &cli.command {
        Command::CertifyMetric => certify_metric(&ctx)?,
        Command::Extend => extend(&ctx)?,
        Command::ExtendPointwise => extend_pointwise(&ctx)?,
        Command::Pou { grouped } => pou(&ctx, *grouped)?,
        Command::Decompose => decompose_cmd(&ctx)?,
        Command::Modulus { mode } => modulus(&ctx, *mode)?,
        Command::ExtendLocal => extend_local(&ctx)?,
        Command::Select => select_cmd(&ctx)?,
        Command::Insert => insert_cmd(&ctx)?,
        Command::Approx => approx(&ctx)?,
        Command::Demo { fixture } => demo(&ctx, *fixture)?,
        Command::Certify { check } => certify_cmd(&ctx, check)?,
    };
    let doc = json!({
        "tool": "lipkit",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {"command": cli.command, "options": opts},
        "pass": outcome.pass(),
        "certificates": outcome.certificates,
        "counterexamples": outcome.counterexamples,
        "summary": outcome.summary,
    });
    ctx.write_json("certificate.json", &doc)?;
    Ok(outcome)
}

fn all(space: &MetricSpace) -> Vec<usize> {
    space.points().collect()
}

fn embed(space: &MetricSpace, a: &Subset, vals: &[f64]) -> Vec<f64> {
    let mut full = vec![f64::NAN; space.len()];
    for (&p, &v) in a.ids().iter().zip(vals) {
        full[p] = v;
    }
    full
}

fn certify_metric(ctx: &Ctx) -> Result<Outcome> {
    let space = ctx.space()?;
    let mut out = Outcome::default();
    out.note("points", json!(space.len()));
    out.note("backend", json!(space.backend_name()));
    out.certificates.push(certify::check_metric(&space));
    if out.certificates[0].pass {
        out.note("diameter", json!(space.diameter()));
        out.note("min_separation", json!(space.min_separation()));
    }
    Ok(out)
}

fn extend(ctx: &Ctx) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let space = ctx.space()?;
    let a = ctx.subset(&space)?;
    let (phi, phi_vals) = ctx.subset_data(&space, &a)?;
    let k = ctx.k()?;
    let delta = ctx.interval()?;
    let f = extend_to_interval(&space, &a, &phi, k, &delta)?;
    let env = mcshane_envelopes(&space, &a, &phi, k)?;
    let lo = env.lower.tabulate(&space)?;
    let hi = env.upper.tabulate(&space)?;
    let mirrored = mcshane_envelopes(&space, &a, &phi.neg(), k)?
        .upper
        .tabulate(&space)?;
    let vals = f.tabulate(&space)?;
    let mut out = Outcome::default();
    out.certificates
        .push(certify::check_k_lipschitz(&space, &vals, k, tol));
    out.certificates
        .push(certify::check_sandwich(&lo, &vals, &hi, tol));
    out.certificates
        .push(certify::check_duality(&lo, &mirrored));
    out.certificates.push(certify::check_reconstruction(
        &vals,
        &embed(&space, &a, &phi_vals),
        a.ids(),
        0.0,
    ));
    out.certificates
        .push(certify::check_range(&vals, &all(&space), &delta, tol));
    if delta.is_bounded() {
        let margins: Vec<f64> = space
            .points()
            .map(|p| {
                let d = space.dist_to_set(p, &a)?;
                Ok(if d > 0.0 {
                    (k * d).min(delta.hi - delta.lo) / 2.0
                } else {
                    0.0
                })
            })
            .collect::<Result<_>>()?;
        out.certificates.push(certify::check_margins(
            &vals,
            &all(&space),
            delta.lo,
            delta.hi,
            &margins,
            tol,
        ));
    }
    out.note("interval", json!(delta.to_string()));
    out.note("achieved_lip", json!(global_lip_values(&space, &vals)));
    ctx.write_values("values.csv", &vals)?;
    ctx.write_table(
        "envelopes.csv",
        &["id", "lower", "upper"],
        space.points().map(|p| vec![p as f64, lo[p], hi[p]]),
    )?;
    Ok(out)
}

#[derive(Deserialize)]
struct PointwiseEntry {
    p: usize,
    #[serde(rename = "L")]
    l: f64,
}

fn extend_pointwise(ctx: &Ctx) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let space = ctx.space()?;
    let a = ctx.subset(&space)?;
    let (phi, phi_vals) = ctx.subset_data(&space, &a)?;
    let delta = ctx.interval()?;
    let path = need(&ctx.opts.witness, "witness")?;
    let text =
        fs::read_to_string(path).map_err(|e| LipError::Io(format!("{}: {e}", path.display())))?;
    let entries: Vec<PointwiseEntry> =
        serde_json::from_str(&text).map_err(|e| LipError::Parse {
            file: path.display().to_string(),
            message: format!("line {}: expected [{{p, L}}]: {e}", e.line()),
        })?;
    let w = PointwiseWitness::new(entries.iter().map(|e| (e.p, e.l)))?;
    let f = pointwise_extend_to_interval(&space, &a, &phi, &w, &delta)?;
    let vals = f.tabulate(&space)?;
    let mut out = Outcome::default();
    out.certificates.push(certify::check_reconstruction(
        &vals,
        &embed(&space, &a, &phi_vals),
        a.ids(),
        0.0,
    ));
    out.certificates
        .push(certify::check_range(&vals, &all(&space), &delta, tol));
    let env = pointwise_envelopes(&space, &a, &phi, &w)?;
    let lo = env.lower.tabulate(&space)?;
    let hi = env.upper.tabulate(&space)?;
    if delta.is_bounded() {
        let d: Vec<f64> = space
            .points()
            .map(|p| space.dist_to_set(p, &a))
            .collect::<Result<_>>()?;
        let n = space.len();
        let cap: Vec<f64> = d.iter().map(|d| delta.hi - d).collect();
        let floor: Vec<f64> = d.iter().map(|d| delta.lo + d).collect();
        out.certificates.push(certify::check_sandwich(
            &vec![f64::NEG_INFINITY; n],
            &lo,
            &cap,
            tol,
        ));
        out.certificates.push(certify::check_sandwich(
            &floor,
            &hi,
            &vec![f64::INFINITY; n],
            tol,
        ));
        let margins: Vec<f64> = d
            .iter()
            .map(|&d| d.min(delta.hi - delta.lo) / 2.0)
            .collect();
        out.certificates.push(certify::check_margins(
            &vals,
            &all(&space),
            delta.lo,
            delta.hi,
            &margins,
            tol,
        ));
    }
    out.note("lifted_constants", json!(w.lifted()));
    out.note("interval", json!(delta.to_string()));
    ctx.write_values("values.csv", &vals)?;
    ctx.write_table(
        "envelopes.csv",
        &["id", "lower", "upper"],
        space.points().map(|p| vec![p as f64, lo[p], hi[p]]),
    )?;
    Ok(out)
}

/// Nonzero member values as `member,id,value` rows.
fn member_rows(tables: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for (m, t) in tables.iter().enumerate() {
        for (p, &v) in t.iter().enumerate() {
            if v != 0.0 {
                rows.push(vec![m as f64, p as f64, v]);
            }
        }
    }
    rows
}

fn pou(ctx: &Ctx, grouped: bool) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let space = ctx.space()?;
    let cover = io::read_cover(need(&ctx.opts.cover, "cover")?, &space)?;
    let frolik: FrolikPartition = if grouped {
        frolik_grouped(&space, &cover)?
    } else {
        frolik_pou(&space, &cover)?
    };
    let report = certify::pou_report(&space, &frolik.pou, Some(cover.tables()), tol)?;
    let mut out = Outcome::default();
    out.certificates.extend(report.certificates());
    out.certificates.extend(certify::check_mather(
        &frolik.refinement.refined,
        &frolik.refinement.total,
        &frolik.refinement.activity_bound,
    ));
    out.note("members", json!(report.members));
    out.note("labels", json!(frolik.pou.labels()));
    out.note("member_lip", json!(report.member_lip));
    out.note("activity_histogram", json!(report.activity_histogram));
    out.note("truncation", json!(frolik.pou.truncation()));
    let tables: Vec<Vec<f64>> = frolik
        .pou
        .members()
        .iter()
        .map(|m| m.tabulate(&space))
        .collect::<Result<_>>()?;
    ctx.write_table(
        "members.csv",
        &["member", "id", "value"],
        member_rows(&tables),
    )?;
    Ok(out)
}

fn decompose_cmd(ctx: &Ctx) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let space = ctx.space()?;
    let f = ctx.field(&space)?;
    let w = ctx.witness(&space)?;
    let dec = decompose(&space, &f, &w)?;
    let vals = f.tabulate(&space)?;
    let sum = dec.series.tabulate(&space)?;
    let mut out = Outcome::default();
    out.certificates.push(certify::check_reconstruction(
        &sum,
        &vals,
        &all(&space),
        tol,
    ));
    let tables: Vec<Vec<f64>> = dec
        .members
        .iter()
        .map(|m| m.tabulate(&space))
        .collect::<Result<_>>()?;
    out.certificates
        .extend(certify::member_certificates(&space, &dec, &tables, tol)?);
    out.note("slices", json!(dec.slices));
    ctx.write_values("values.csv", &sum)?;
    ctx.write_table(
        "members.csv",
        &["member", "id", "value"],
        member_rows(&tables),
    )?;
    Ok(out)
}

fn modulus(ctx: &Ctx, mode: ModeArg) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let space = ctx.space()?;
    let f = ctx.field(&space)?;
    let w = ctx.witness(&space)?;
    let mode = match mode {
        ModeArg::Bounded => ModulusMode::Bounded,
        ModeArg::Transported => ModulusMode::Transported,
    };
    let mw = modulus_witness(&space, &f, &w, mode)?;
    let vals = f.tabulate(&space)?;
    let mut out = Outcome::default();
    out.certificates
        .extend(certify::modulus_certificates(&space, &vals, &mw, tol)?);
    out.note("slope", json!(mw.slope));
    out.note("max_level", json!(mw.levels.iter().max()));
    ctx.write_table(
        "modulus.csv",
        &["id", "level", "ell"],
        space
            .points()
            .map(|p| vec![p as f64, mw.levels[p] as f64, mw.ell_values[p]]),
    )?;
    Ok(out)
}

fn extend_local(ctx: &Ctx) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let space = ctx.space()?;
    let a = ctx.subset(&space)?;
    let (phi, phi_vals) = ctx.subset_data(&space, &a)?;
    let (w, dropped) = ctx.witness_on(&space, &a)?;
    let delta = ctx.interval()?;
    let ext = local_extend(&space, &a, &phi, &w, &delta)?;
    let vals = ext.field.tabulate(&space)?;
    let mut out = Outcome::default();
    out.certificates.push(certify::check_reconstruction(
        &vals,
        &embed(&space, &a, &phi_vals),
        a.ids(),
        tol,
    ));
    out.certificates
        .push(certify::check_range(&vals, &all(&space), &delta, 0.0));
    out.certificates.push(certify::certify_local_witness(
        &space,
        &vals,
        &ext.witness,
        None,
        tol,
    ));
    out.note("ignored_witness_entries", json!(dropped));
    out.note("cover_levels", json!(ext.cover_levels));
    out.note("members", json!(ext.pou.len()));
    ctx.write_values("values.csv", &vals)?;
    ctx.write_json("witness.json", &ext.witness)?;
    Ok(out)
}

fn selection_outcome(
    ctx: &Ctx,
    space: &MetricSpace,
    omega: &IntervalMapping,
    vals: &[f64],
    witness: &LocalWitness,
) -> Result<Outcome> {
    let bounds = omega.sample(space)?;
    let mut out = Outcome::default();
    out.certificates.push(certify::check_strictly_between(
        &bounds.raw_lower,
        vals,
        &bounds.raw_upper,
    ));
    out.certificates.push(certify::certify_local_witness(
        space,
        vals,
        witness,
        None,
        ctx.opts.tol,
    ));
    ctx.write_values("values.csv", vals)?;
    ctx.write_json("witness.json", witness)?;
    Ok(out)
}

fn select_cmd(ctx: &Ctx) -> Result<Outcome> {
    let space = ctx.space()?;
    let omega = ctx.bounds(&space)?;
    let max_depth = ctx.opts.grid_depth.unwrap_or(MAX_DEPTH);
    let sel = select_with(&space, &omega, START_DEPTH.min(max_depth), max_depth)?;
    let witness = crate::selection::output_witness(&space, &sel.values)?;
    let mut out = selection_outcome(ctx, &space, &omega, &sel.values, &witness)?;
    out.note("grid_depth", json!(sel.grid.depth));
    out.note("levels", json!(sel.grid.levels));
    out.note("min_margin", json!(sel.min_margin));
    Ok(out)
}

fn insert_cmd(ctx: &Ctx) -> Result<Outcome> {
    let space = ctx.space()?;
    let omega = ctx.bounds(&space)?;
    let prescribed = match &ctx.opts.subset {
        Some(_) => {
            let a = ctx.subset(&space)?;
            let (phi, vals) = ctx.subset_data(&space, &a)?;
            let (w, _) = ctx.witness_on(&space, &a)?;
            Some((a, phi, vals, w))
        }
        None => None,
    };
    let res = insert(
        &space,
        omega.lower.clone(),
        omega.upper.clone(),
        prescribed.as_ref().map(|(a, phi, _, w)| Prescribed {
            subset: a,
            values: phi,
            witness: w,
        }),
    )?;
    let mut out = selection_outcome(ctx, &space, &omega, &res.values, &res.witness)?;
    if let Some((a, _, vals, _)) = &prescribed {
        out.certificates.push(certify::check_reconstruction(
            &res.values,
            &embed(&space, a, vals),
            a.ids(),
            0.0,
        ));
    }
    out.note("blended", json!(res.blended));
    out.note("min_margin", json!(res.min_margin));
    Ok(out)
}

fn approx(ctx: &Ctx) -> Result<Outcome> {
    let space = ctx.space()?;
    let phi = ctx.field(&space)?;
    let n_max = ctx.opts.n_max.unwrap_or(10);
    let steps = decreasing_approx(&space, &phi, n_max)?;
    let base = phi.tabulate(&space)?;
    let mut out = Outcome::default();
    out.certificates
        .extend(certify::approx_certificates(&base, &steps));
    out.note(
        "residuals",
        json!(steps.iter().map(|s| s.residual).collect::<Vec<_>>()),
    );
    out.note(
        "depths",
        json!(steps.iter().map(|s| s.depth).collect::<Vec<_>>()),
    );
    let mut header = vec!["id".to_string(), "phi".to_string()];
    header.extend((1..=steps.len()).map(|n| format!("f{n}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    ctx.write_table(
        "approx.csv",
        &header,
        space.points().map(|p| {
            let mut row = vec![p as f64, base[p]];
            row.extend(steps.iter().map(|s| s.values[p]));
            row
        }),
    )?;
    Ok(out)
}

fn certify_cmd(ctx: &Ctx, check: &CertifyCommand) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let space = ctx.space()?;
    let mut out = Outcome::default();
    match check {
        CertifyCommand::Lipschitz => {
            let vals = ctx.field(&space)?.tabulate(&space)?;
            out.certificates
                .push(certify::check_k_lipschitz(&space, &vals, ctx.k()?, tol));
        }
        CertifyCommand::Witness => {
            let vals = ctx.field(&space)?.tabulate(&space)?;
            let w = ctx.witness(&space)?;
            out.certificates
                .push(certify::certify_local_witness(&space, &vals, &w, None, tol));
        }
        CertifyCommand::RandomExtension => {
            let a = ctx.subset(&space)?;
            let (phi, phi_vals) = ctx.subset_data(&space, &a)?;
            let k = ctx.k()?;
            let vals = certify::random_k_extension(&space, &a, &phi_vals, k, None, ctx.opts.seed)?;
            let env = mcshane_envelopes(&space, &a, &phi, k)?;
            out.certificates
                .push(certify::check_k_lipschitz(&space, &vals, k, tol));
            out.certificates.push(certify::check_sandwich(
                &env.lower.tabulate(&space)?,
                &vals,
                &env.upper.tabulate(&space)?,
                tol,
            ));
            ctx.write_values("values.csv", &vals)?;
        }
    }
    Ok(out)
}

fn demo(ctx: &Ctx, fixture: DemoFixture) -> Result<Outcome> {
    let tol = ctx.opts.tol;
    let mut out = Outcome::default();
    match fixture {
        DemoFixture::SinInvT => {
            let (peaks, pairs) = fixtures::sin_inv_t_peaks(20)?;
            let sp = &peaks.space;
            let diffs: Vec<f64> = pairs
                .iter()
                .map(|&(s, t)| (peaks.values[s] - peaks.values[t]).abs())
                .collect();
            let ids: Vec<usize> = (0..pairs.len()).collect();
            out.certificates.push(certify::check_reconstruction(
                &diffs,
                &vec![2.0; pairs.len()],
                &ids,
                tol,
            ));
            let lip = global_lip_values(sp, &peaks.values);
            out.note("global_lip", json!(lip));
            out.counterexamples
                .push(certify::check_k_lipschitz(sp, &peaks.values, 100.0, tol));
            let grid = fixtures::sin_inv_t_grid(0.05, 1.0, 400)?;
            let w = fixtures::inverse_square_witness(&grid.space, grid.space.points())?;
            out.certificates.push(certify::certify_local_witness(
                &grid.space,
                &grid.values,
                &w,
                None,
                tol,
            ));
            ctx.write_table(
                "pairs.csv",
                &["n", "s_n", "t_n", "diff", "dist", "ratio"],
                pairs.iter().enumerate().map(|(i, &(s, t))| {
                    let d = sp.dist(s, t).unwrap_or(f64::NAN);
                    let (xs, xt) = (
                        sp.coordinate(s, 0).unwrap_or(f64::NAN),
                        sp.coordinate(t, 0).unwrap_or(f64::NAN),
                    );
                    vec![(i + 1) as f64, xs, xt, diffs[i], d, diffs[i] / d]
                }),
            )?;
        }
        DemoFixture::CuspCurve => {
            let ratio = 0.8;
            let (cusp, pairs) = fixtures::cusp_curve(30, ratio)?;
            let sp = &cusp.space;
            let ratios: Vec<f64> = pairs
                .iter()
                .map(|&(a, b)| {
                    (cusp.values[a] - cusp.values[b]).abs() / sp.dist(a, b).unwrap_or(f64::NAN)
                })
                .collect();
            let inverse: Vec<f64> = (0..pairs.len())
                .map(|k| 1.0 / ratio.powi(k as i32))
                .collect();
            let rel: Vec<f64> = ratios.iter().zip(&inverse).map(|(r, i)| r / i).collect();
            let ids: Vec<usize> = (0..pairs.len()).collect();
            out.certificates.push(certify::check_reconstruction(
                &rel,
                &vec![1.0; pairs.len()],
                &ids,
                tol,
            ));
            // same-sign branch: difference quotients at most 1
            let positive: Vec<usize> = pairs.iter().map(|&(a, _)| a).collect();
            let same_sign = positive
                .iter()
                .enumerate()
                .flat_map(|(i, &x)| positive[i + 1..].iter().map(move |&y| (x, y)));
            out.certificates.push(certify::check_k_lipschitz_over(
                sp,
                &cusp.values,
                1.0,
                same_sign,
                tol,
            ));
            let w = LocalWitness::uniform(sp.points(), 0.5, 10.0)?;
            let c = certify::certify_local_witness(sp, &cusp.values, &w, None, tol);
            out.note(
                "witness_pair_is_symmetric",
                json!(pairs.iter().any(|&(a, b)| c.witness == [a, b])),
            );
            out.counterexamples.push(c);
            ctx.write_table(
                "ratios.csv",
                &["t", "ratio", "inverse_t"],
                (0..pairs.len()).map(|k| vec![ratio.powi(k as i32), ratios[k], inverse[k]]),
            )?;
        }
        DemoFixture::ReciprocalStaircase => {
            let ts = [0.4, 0.5, 2.0];
            let k_max = 4;
            let table = fixtures::staircase_table(&ts, k_max)?;
            let sums: Vec<f64> = table.iter().map(|(_, row)| row.iter().sum()).collect();
            let partial: Vec<f64> = ts
                .iter()
                .map(|&t| staircase_partial_sum(k_max, t))
                .collect();
            let expected: Vec<f64> = ts.iter().map(|t| 1.0 / t).collect();
            let ids: Vec<usize> = (0..ts.len()).collect();
            out.certificates
                .push(certify::check_reconstruction(&sums, &expected, &ids, tol));
            out.certificates.push(certify::check_reconstruction(
                &partial, &expected, &ids, 0.0,
            ));
            let mut header = vec!["t".to_string()];
            header.extend((1..=k_max).map(|k| format!("l{k}")));
            header.push("sum".into());
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            ctx.write_table(
                "staircase.csv",
                &header,
                table.iter().zip(&sums).map(|((t, row), s)| {
                    let mut r = vec![*t];
                    r.extend(row);
                    r.push(*s);
                    r
                }),
            )?;
        }
        DemoFixture::DowkerStep => {
            let space = MetricSpace::grid(-1.0, 1.0, 0.05)?;
            let omega = fixtures::dowker_step();
            let res = insert(&space, omega.lower.clone(), omega.upper.clone(), None)?;
            let mut inner = selection_outcome(ctx, &space, &omega, &res.values, &res.witness)?;
            out.certificates.append(&mut inner.certificates);
            let step = fixtures::step_bounds(&space)?;
            let sel = select_with(&space, &step, START_DEPTH, MAX_DEPTH)?;
            let b = step.sample(&space)?;
            out.certificates.push(certify::check_strictly_between(
                &b.raw_lower,
                &sel.values,
                &b.raw_upper,
            ));
            out.note("step_grid_depth", json!(sel.grid.depth));
            out.note("min_margin", json!(res.min_margin));
            ctx.write_table(
                "step.csv",
                &["id", "lower", "value", "upper"],
                space
                    .points()
                    .map(|p| vec![p as f64, b.raw_lower[p], sel.values[p], b.raw_upper[p]]),
            )?;
        }
    }
    Ok(out)
}
