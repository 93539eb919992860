//! JSON-in, JSON-out dispatcher over the toolkit: every subcommand reads
//! matrices, channels or Choi blocks from files, runs one operation, and
//! emits a single JSON result on stdout.
//!
//! Exit codes are part of the contract: 0 the computation succeeded, 1 a
//! predicate came out false or a search failed, 2 the input was rejected.
//! Stochastic commands take `--seed` and echo it back; identical inputs and
//! seeds give byte-identical output.

use std::path::{Path, PathBuf};

use chronoglass::channel::KrausMap;
use chronoglass::gentrans::compat::prep_compat;
use chronoglass::gentrans::ubb::{ubb_search, unitalize, UbbOptions};
use chronoglass::gentrans::{
    fractional_transpose, gen_transpose, gen_transpose_channel, is_unital_gt, kernel_system_dim,
    partial_gen_transpose_channel,
};
use chronoglass::matcore::DimensionSpec;
use chronoglass::measures::diamond::{diamond_norm_choi, DiamondOptions};
use chronoglass::measures::{
    geometric_capacity, info_destruction, leakage, verify_cauloc, verify_cauloc2,
    xi_nonswappability, MeasureOutcome, OptimizerBudget,
};
use chronoglass::tensors::{
    chebyshev_thetas, dynamics_tensor_witness, is_perfect_tensor, is_rotationally_perfect,
    proper_dynamics_witness, TensorNode,
};
use chronoglass::{io, selftest, Error};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    PredicateFalse,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::PredicateFalse => 1,
            Status::InputError => 2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CommandResult {
    fn ok(payload: Value) -> Self {
        CommandResult { status: Status::Ok, payload, diagnostics: Vec::new(), seed: None }
    }

    fn falsified(payload: Value, why: String) -> Self {
        CommandResult {
            status: Status::PredicateFalse,
            payload,
            diagnostics: vec![why],
            seed: None,
        }
    }

    fn rejected(why: String) -> Self {
        CommandResult {
            status: Status::InputError,
            payload: Value::Null,
            diagnostics: vec![why],
            seed: None,
        }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialization cannot fail")
    }
}

#[derive(Parser)]
#[command(
    name = "chronoglass",
    version,
    about = "Generalized transposition toolkit: kernels, channels, tensors, measures",
    disable_help_subcommand = true
)]
struct Cli {
    /// Tolerance for predicates and convergence checks (default 1e-9).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for stochastic searches.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Iteration cap for iterative searches.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

impl Cli {
    fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-9)
    }

    fn budget(&self) -> OptimizerBudget {
        let mut b = OptimizerBudget::default();
        if let Some(s) = self.seed {
            b.seed = s;
        }
        if let Some(n) = self.max_iter {
            b.max_iters = n;
        }
        if let Some(t) = self.tol {
            b.tol = t;
        }
        b
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generalized transpositions: apply kernels, test compatibility.
    #[command(subcommand)]
    Gtrans(GtransCmd),
    /// Dynamics-tensor witnesses and perfect-tensor predicates.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Information measures (diamond norm, Ξ, C_G, D_S, leakage).
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Inequality validators relating leakage and kernel measures.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Run the full acceptance battery and report per criterion.
    Selftest,
}

#[derive(Subcommand)]
enum GtransCmd {
    /// unvec(W · vec M) for a matrix file and a kernel file.
    Apply(ApplyArgs),
    /// Fractional transpose of a matrix at angle theta.
    Fractional(FractionalArgs),
    /// Does a channel stay a channel under the kernel action?
    Compat(CompatArgs),
    /// State preparation commuting through a kernel: returns tau or none.
    PrepCompat(PrepCompatArgs),
    /// Search for a unitary-to-unitary pair (U, V) with U^{T[W]} = V.
    Ubb(UbbArgs),
}

#[derive(Args)]
struct ApplyArgs {
    /// Kernel matrix file (side rows·cols of the input).
    #[arg(long)]
    w: PathBuf,
    /// Input matrix file.
    #[arg(long)]
    m: PathBuf,
}

#[derive(Args)]
struct FractionalArgs {
    /// Angle in radians; pi gives the plain transpose.
    #[arg(long)]
    theta: f64,
    /// Input matrix file.
    #[arg(long)]
    m: PathBuf,
}

#[derive(Args)]
struct CompatArgs {
    /// Channel file (Kraus form).
    #[arg(long)]
    channel: PathBuf,
    /// Kernel matrix file.
    #[arg(long)]
    w: PathBuf,
    /// Apply the kernel to one leg only; the sole supported label is B
    /// (the second tensor factor).
    #[arg(long)]
    partial: Option<String>,
}

#[derive(Args)]
struct PrepCompatArgs {
    /// Kernel matrix file.
    #[arg(long)]
    w: PathBuf,
    /// State file on the kernel's column factor.
    #[arg(long)]
    sigma: PathBuf,
}

#[derive(Args)]
struct UbbArgs {
    /// Kernel matrix file.
    #[arg(long)]
    w: PathBuf,
}

#[derive(Subcommand)]
enum TensorCmd {
    /// Build the kernel witness carrying phi+ to a normalized seed matrix.
    Witness(WitnessArgs),
    /// Is a tensor perfect (every balanced bipartition unitary)?
    Perfect(PerfectArgs),
    /// Is a matrix rotationally perfect across a Chebyshev angle grid?
    RotPerfect(RotPerfectArgs),
}

#[derive(Args)]
struct WitnessArgs {
    /// Seed matrix file; the witness maps phi+ onto its normalization.
    #[arg(long)]
    x: PathBuf,
    /// Build the unital (proper-dynamics) witness instead; needs even dim.
    #[arg(long)]
    unital: bool,
}

#[derive(Args)]
struct PerfectArgs {
    /// Tensor entries as a matrix file, flattened row-major.
    #[arg(long)]
    t: PathBuf,
    /// Number of legs.
    #[arg(long)]
    legs: usize,
    /// Dimension of every leg.
    #[arg(long)]
    dim: usize,
}

#[derive(Args)]
struct RotPerfectArgs {
    /// Square matrix file.
    #[arg(long)]
    m: PathBuf,
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Diamond norm of the map with the given (normalized) Choi block.
    Diamond(DiamondArgs),
    /// Nonswappability Ξ of a bipartite channel.
    Xi(ChannelArg),
    /// Geometric capacity C_G of a channel.
    Cg(ChannelArg),
    /// Information destruction D_S of a square channel.
    Ds(ChannelArg),
    /// Leakage of a bipartite channel with a fixed B-side preparation.
    Leak(LeakArgs),
}

#[derive(Args)]
struct DiamondArgs {
    /// Choi file: {in_dim, out_dim, matrix}, trace-normalized.
    #[arg(long)]
    choi: PathBuf,
}

#[derive(Args)]
struct ChannelArg {
    /// Channel file (Kraus form).
    #[arg(long)]
    channel: PathBuf,
}

#[derive(Args)]
struct LeakArgs {
    /// Bipartite channel file (Kraus form) on A⊗B.
    #[arg(long)]
    channel: PathBuf,
    /// Preparation state file on B.
    #[arg(long)]
    sigma: PathBuf,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Leakage ≤ nonswappability of the kernel, within slack.
    Cauloc(VerifyArgs),
    /// Non-catalyticity of the kernel ≤ twice the non-leakage, within slack.
    Cauloc2(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Bipartite unitary dynamics file.
    #[arg(long)]
    u: PathBuf,
    /// Kernel matrix file.
    #[arg(long)]
    w: PathBuf,
    /// Compatible preparation state file.
    #[arg(long)]
    sigma: PathBuf,
    /// Additive slack absorbing both estimates' optimization error.
    #[arg(long, default_value_t = 1e-4)]
    slack: f64,
}

/// Parses and dispatches one invocation. Never panics on user input; every
/// failure is folded into the status/diagnostics fields.
pub fn run(argv: &[String]) -> CommandResult {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return CommandResult::ok(json!({ "help": e.to_string() }));
        }
        Err(e) => return CommandResult::rejected(e.to_string()),
    };
    match dispatch(&cli) {
        Ok(result) => result,
        Err(e) => from_error(e),
    }
}

/// Search and solver breakdowns are physics outcomes (exit 1); everything
/// else the user can fix in the input (exit 2).
fn from_error(e: Error) -> CommandResult {
    match e {
        Error::SearchFailed(_) | Error::Numerical(_) => {
            CommandResult::falsified(Value::Null, e.to_string())
        }
        _ => CommandResult::rejected(e.to_string()),
    }
}

fn dispatch(cli: &Cli) -> chronoglass::Result<CommandResult> {
    match &cli.cmd {
        Cmd::Gtrans(GtransCmd::Apply(a)) => {
            let w = io::read_matrix(&a.w)?;
            let m = io::read_matrix(&a.m)?;
            let image = gen_transpose(&m, &w)?;
            Ok(CommandResult::ok(json!({ "matrix": io::MatrixJson::of(&image) })))
        }
        Cmd::Gtrans(GtransCmd::Fractional(a)) => {
            let m = io::read_matrix(&a.m)?;
            let image = fractional_transpose(&m, a.theta)?;
            Ok(CommandResult::ok(json!({
                "theta": a.theta,
                "matrix": io::MatrixJson::of(&image),
            })))
        }
        Cmd::Gtrans(GtransCmd::Compat(a)) => {
            let n = io::read_channel(&a.channel)?;
            let w = io::read_matrix(&a.w)?;
            let image = match a.partial.as_deref() {
                None => gen_transpose_channel(&n, &w)?,
                Some("B") => {
                    let d_b = kernel_system_dim(&w)?;
                    if n.in_dim() != n.out_dim() || n.in_dim() % d_b != 0 {
                        return Err(Error::DimMismatch(format!(
                            "--channel: {}→{} does not split as A⊗B with |B| = {}",
                            n.in_dim(),
                            n.out_dim(),
                            d_b
                        )));
                    }
                    let dims = DimensionSpec::pair(n.in_dim() / d_b, d_b);
                    partial_gen_transpose_channel(&n, &dims, 1, &w)?
                }
                Some(other) => {
                    return Err(Error::InvalidInput(format!(
                        "--partial: only the label B is supported, got {other}"
                    )));
                }
            };
            let compatible = image.is_cptp(cli.tol());
            let payload = json!({
                "compatible": compatible,
                "image": io::ChannelJson::of(&image),
            });
            if compatible {
                Ok(CommandResult::ok(payload))
            } else {
                Ok(CommandResult::falsified(
                    payload,
                    format!(
                        "transformed map is not a channel (trace-preservation defect {:.3e})",
                        image.tp_defect()
                    ),
                ))
            }
        }
        Cmd::Gtrans(GtransCmd::PrepCompat(a)) => {
            let w = io::read_matrix(&a.w)?;
            let sigma = io::read_matrix(&a.sigma)?;
            match prep_compat(&w, &sigma, cli.tol())? {
                Some(tau) => Ok(CommandResult::ok(json!({
                    "compatible": true,
                    "tau": io::MatrixJson::of(&tau),
                }))),
                None => Ok(CommandResult::falsified(
                    json!({ "compatible": false }),
                    "no state tau satisfies W(1⊗sigma^T)W† = 1⊗tau^T".into(),
                )),
            }
        }
        Cmd::Gtrans(GtransCmd::Ubb(a)) => {
            let w = io::read_matrix(&a.w)?;
            let mut opts = UbbOptions::default();
            if let Some(s) = cli.seed {
                opts.seed = s;
            }
            if let Some(n) = cli.max_iter {
                opts.max_iter = n;
            }
            if let Some(t) = cli.tol {
                opts.success_tol = t;
            }
            let seed = opts.seed;
            match ubb_search(&w, &opts)? {
                Some(pair) => {
                    let unital = unitalize(&w, &pair)?;
                    Ok(CommandResult::ok(json!({
                        "u": io::MatrixJson::of(&pair.u),
                        "v": io::MatrixJson::of(&pair.v),
                        "residual": pair.residual,
                        "unital_kernel": io::MatrixJson::of(&unital),
                        "unital_kernel_verified": is_unital_gt(&unital, 1e-8)?,
                    }))
                    .seeded(seed))
                }
                None => Ok(CommandResult::falsified(
                    json!({ "found": false }),
                    "no unitary-to-unitary pair found within the iteration budget".into(),
                )
                .seeded(seed)),
            }
        }
        Cmd::Tensor(TensorCmd::Witness(a)) => {
            let x = io::read_matrix(&a.x)?;
            if a.unital {
                let (w, gamma) = proper_dynamics_witness(&x)?;
                Ok(CommandResult::ok(json!({
                    "w": io::MatrixJson::of(&w),
                    "gamma": gamma,
                    "unital": is_unital_gt(&w, 1e-8)?,
                })))
            } else {
                let w = dynamics_tensor_witness(&x)?;
                Ok(CommandResult::ok(json!({ "w": io::MatrixJson::of(&w) })))
            }
        }
        Cmd::Tensor(TensorCmd::Perfect(a)) => {
            let m = io::read_matrix(&a.t)?;
            let want: usize = a.dim.checked_pow(a.legs as u32).ok_or_else(|| {
                Error::InvalidInput("--dim ^ --legs overflows".into())
            })?;
            if m.rows() * m.cols() != want {
                return Err(Error::DimMismatch(format!(
                    "--t: file holds {} entries, --legs {} at --dim {} needs {}",
                    m.rows() * m.cols(),
                    a.legs,
                    a.dim,
                    want
                )));
            }
            let node = TensorNode::new(&m, vec![a.dim; a.legs])?;
            let perfect = is_perfect_tensor(&node, cli.tol())?;
            let payload = json!({ "perfect": perfect, "legs": a.legs, "dim": a.dim });
            if perfect {
                Ok(CommandResult::ok(payload))
            } else {
                Ok(CommandResult::falsified(
                    payload,
                    "some balanced bipartition is not proportional to a unitary".into(),
                ))
            }
        }
        Cmd::Tensor(TensorCmd::RotPerfect(a)) => {
            let m = io::read_matrix(&a.m)?;
            let grid = chebyshev_thetas(cli.max_iter.unwrap_or(24));
            let ok = is_rotationally_perfect(&m, &grid, cli.tol.unwrap_or(1e-8));
            let payload = json!({ "rotationally_perfect": ok, "grid_points": grid.len() });
            if ok {
                Ok(CommandResult::ok(payload))
            } else {
                Ok(CommandResult::falsified(
                    payload,
                    "some fractional transpose on the grid is not unitary".into(),
                ))
            }
        }
        Cmd::Measure(MeasureCmd::Diamond(a)) => {
            let j = io::read_choi(&a.choi)?;
            let j_hat = j.matrix().scale_re(j.in_dim() as f64);
            let mut opts = DiamondOptions::default();
            if let Some(t) = cli.tol {
                opts.gap_tol = t;
            }
            if let Some(n) = cli.max_iter {
                opts.max_newton = n;
            }
            let report = diamond_norm_choi(&j_hat, j.out_dim(), j.in_dim(), &opts)?;
            Ok(CommandResult::ok(json!({
                "value": report.value,
                "certificate": report.gap,
            })))
        }
        Cmd::Measure(MeasureCmd::Xi(a)) => measure_outcome(cli, &a.channel, xi_nonswappability),
        Cmd::Measure(MeasureCmd::Cg(a)) => measure_outcome(cli, &a.channel, geometric_capacity),
        Cmd::Measure(MeasureCmd::Ds(a)) => measure_outcome(cli, &a.channel, info_destruction),
        Cmd::Measure(MeasureCmd::Leak(a)) => {
            let m = io::read_channel(&a.channel)?;
            let sigma = io::read_matrix(&a.sigma)?;
            let budget = cli.budget();
            let out = leakage(&m, &sigma, &budget)?;
            Ok(outcome_result(&out).seeded(budget.seed))
        }
        Cmd::Verify(v) => {
            let (name, a, check): (_, _, VerifyFn) = match v {
                VerifyCmd::Cauloc(a) => ("leakage ≤ Ξ", a, verify_cauloc),
                VerifyCmd::Cauloc2(a) => ("non-catalyticity ≤ 2·non-leakage", a, verify_cauloc2),
            };
            let u = io::read_matrix(&a.u)?;
            let w = io::read_matrix(&a.w)?;
            let sigma = io::read_matrix(&a.sigma)?;
            let budget = cli.budget();
            let report = check(&u, &w, &sigma, a.slack, &budget)?;
            let payload = json!({
                "lhs": report.lhs,
                "rhs": report.rhs,
                "slack": report.slack,
                "holds": report.holds,
            });
            if report.holds {
                Ok(CommandResult::ok(payload).seeded(budget.seed))
            } else {
                Ok(CommandResult::falsified(
                    payload,
                    format!("{name} violated beyond slack"),
                )
                .seeded(budget.seed))
            }
        }
        Cmd::Selftest => {
            let seed = cli.seed.unwrap_or(7);
            let results = selftest::run_all(seed);
            let all_pass = results.iter().all(|r| r.pass);
            let diagnostics = results
                .iter()
                .map(|r| {
                    format!(
                        "criterion {:02} {} {} ({})",
                        r.id,
                        if r.pass { "pass" } else { "FAIL" },
                        r.name,
                        r.detail
                    )
                })
                .collect();
            let criteria: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "name": r.name,
                        "pass": r.pass,
                        "detail": r.detail,
                    })
                })
                .collect();
            Ok(CommandResult {
                status: if all_pass { Status::Ok } else { Status::PredicateFalse },
                payload: json!({
                    "criteria": criteria,
                    "passed": results.iter().filter(|r| r.pass).count(),
                    "total": results.len(),
                }),
                diagnostics,
                seed: Some(seed),
            })
        }
    }
}

type MeasureFn = fn(&KrausMap, &OptimizerBudget) -> chronoglass::Result<MeasureOutcome>;
type VerifyFn = fn(
    &chronoglass::ComplexMatrix,
    &chronoglass::ComplexMatrix,
    &chronoglass::ComplexMatrix,
    f64,
    &OptimizerBudget,
) -> chronoglass::Result<chronoglass::measures::InequalityReport>;

fn measure_outcome(
    cli: &Cli,
    channel: &Path,
    f: MeasureFn,
) -> chronoglass::Result<CommandResult> {
    let m = io::read_channel(channel)?;
    let budget = cli.budget();
    let out = f(&m, &budget)?;
    Ok(outcome_result(&out).seeded(budget.seed))
}

fn outcome_result(out: &MeasureOutcome) -> CommandResult {
    CommandResult::ok(json!({
        "value": out.value,
        "certificate": out.certificate,
    }))
}
