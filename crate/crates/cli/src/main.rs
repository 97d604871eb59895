//! kakeya-lab: exact experiments on Kakeya/Nikodym phenomena over finite
//! fields and rings.
//!
//! Exit codes: 0 pass, 1 usage/config error, 2 inequality finding,
//! 3 witness found.

mod output;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use kakeya_core::amplify::{
    amplify, choose_m, collision_stats, expected_omega_size, TranslationMode,
};
use kakeya_core::caps::Caps;
use kakeya_core::gf::FieldElement;
use kakeya_core::maximal::{
    ensemble_ratios, kakeya_maximal, ratio_report, PointFunction, TheoremSpec,
};
use kakeya_core::polymethod::{
    find_vanishing_poly, kplane_bound, kplane_kakeya_check, CertificateKind,
    MultiplicityFunction,
};
use kakeya_core::rings::{
    minkowski_dim, ring_bound_check, ring_directions, ring_kakeya_check, RingElement, RingPoint,
    RingSpec,
};
use kakeya_core::{Error, FieldSpec, Result};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_FINDING: u8 = 2;
const EXIT_WITNESS: u8 = 3;

#[derive(Parser)]
#[command(name = "kakeya-lab", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a maximal-operator inequality on a point function.
    Maximal(MaximalArgs),
    /// Solve a vanishing system and emit the certificate.
    Certify(CertifyArgs),
    /// Seeded random-function ensembles as CSV.
    Ensemble(EnsembleArgs),
    /// Kakeya geometry over F[x]/x^k or Z/p^k.
    Ring(RingArgs),
    /// Random-translation amplification and collision statistics.
    Amplify(AmplifyArgs),
    /// k-plane Kakeya bounds and set checks.
    Kplane(KplaneArgs),
}

#[derive(Args, Serialize, Clone)]
struct FieldArgs {
    /// Prime characteristic.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree (default 1).
    #[arg(long)]
    m: Option<usize>,
    /// Prime power shorthand for p^m.
    #[arg(long)]
    q: Option<u64>,
}

impl FieldArgs {
    fn resolve(&self) -> Result<Option<FieldSpec>> {
        match (self.p, self.q) {
            (Some(_), Some(_)) => {
                Err(Error::BadParameters("give either --p/--m or --q, not both".into()))
            }
            (Some(p), None) => Ok(Some(FieldSpec::new(p, self.m.unwrap_or(1), None)?)),
            (None, Some(q)) => {
                let (p, m) = factor_prime_power(q)?;
                Ok(Some(FieldSpec::new(p, m, None)?))
            }
            (None, None) => Ok(None),
        }
    }
}

fn factor_prime_power(q: u64) -> Result<(u64, usize)> {
    if q < 2 {
        return Err(Error::BadParameters(format!("{q} is not a prime power")));
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut m = 0;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::BadParameters(format!("{q} is not a prime power")));
    }
    Ok((p, m))
}

#[derive(Args, Serialize, Clone, Copy)]
struct CapsArgs {
    /// Enumeration cap (elements).
    #[arg(long = "cap-enum")]
    cap_enum: Option<u64>,
    /// Matrix cap (entries).
    #[arg(long = "cap-matrix")]
    cap_matrix: Option<u64>,
}

impl CapsArgs {
    fn resolve(&self) -> Caps {
        let mut caps = Caps::default();
        if let Some(e) = self.cap_enum {
            caps.enum_cap = e;
        }
        if let Some(m) = self.cap_matrix {
            caps.matrix_cap = m;
        }
        caps.clamp_to_ceiling()
    }
}

#[derive(Args, Serialize)]
struct MaximalArgs {
    /// Theorem tag: exp | shoop | kakeq | nikodym | restricted_w |
    /// kplane_conj | mixedq.
    #[arg(long)]
    theorem: String,
    /// Point-function file (.pf text, or .json).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    field: FieldArgs,
    /// Ambient dimension; validated against the input header.
    #[arg(long)]
    n: Option<usize>,
    /// Subspace dimension for kplane_conj/mixedq.
    #[arg(long)]
    k: Option<usize>,
    /// Lebesgue exponent p for shoop/kplane_conj.
    #[arg(long)]
    pexp: Option<f64>,
    /// Lebesgue exponent q for shoop/kplane_conj.
    #[arg(long)]
    qexp: Option<f64>,
    /// Ratio above which the run is reported as a finding (exit 2).
    #[arg(long, default_value_t = 4.0)]
    max_ratio: f64,
    /// Attach per-direction witnesses to the report.
    #[arg(long)]
    witnesses: bool,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: CapsArgs,
}

#[derive(Args, Serialize)]
struct CertifyArgs {
    /// Point-set or multiplicity file: header "p m n", rows
    /// "x1 .. xn [mult]".
    #[arg(long)]
    input: PathBuf,
    /// Degree bound (default q - 1, the Dvir obstruction).
    #[arg(long = "D")]
    degree_bound: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: CapsArgs,
}

#[derive(Args, Serialize)]
struct EnsembleArgs {
    #[arg(long)]
    theorem: String,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    pexp: Option<f64>,
    #[arg(long)]
    qexp: Option<f64>,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Support density of the random functions.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 4.0)]
    max_ratio: f64,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: CapsArgs,
}

#[derive(Args, Serialize)]
struct RingArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Number of scales k in F[x]/x^k or Z/p^k.
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: usize,
    /// Ring kind: polyx (F[x]/x^k, default) or intpk (Z/p^k).
    #[arg(long, default_value = "polyx")]
    ring_kind: String,
    /// Count the directions of P^(n-1)(R).
    #[arg(long)]
    dirs: bool,
    /// Check a point-set file for the Kakeya property.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,
    /// Run the full embedding pipeline on a Kakeya set file.
    #[arg(long = "check-embed", value_name = "FILE")]
    check_embed: Option<PathBuf>,
    /// Report log|E|/log|R| for a set file.
    #[arg(long, value_name = "FILE")]
    minkowski: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: CapsArgs,
}

#[derive(Args, Serialize)]
struct AmplifyArgs {
    /// Point-function file.
    #[arg(long)]
    input: PathBuf,
    /// Number of random translations.
    #[arg(long = "M")]
    translations: Option<u64>,
    /// Derive M from lambda via floor((lambda/(K_0 ||f||_n))^n).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    k0: f64,
    /// Anchor file: rows of n-1 coordinates (default: support of f on the
    /// hyperplane).
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// Translation selection: sampled | best-of.
    #[arg(long, default_value = "best-of")]
    mode: String,
    #[arg(long, default_value_t = 16)]
    retries: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run collision statistics with this many trials.
    #[arg(long = "collision-trials")]
    collision_trials: Option<u64>,
    /// Flattening target dimension for collision statistics.
    #[arg(long = "target-n", default_value_t = 2)]
    target_n: usize,
    /// Threshold c in the image-size probability.
    #[arg(long = "collision-c", default_value_t = 0.5)]
    collision_c: f64,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: CapsArgs,
}

#[derive(Args, Serialize)]
struct KplaneArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Print the k-plane Kakeya lower bound (closed and binomial forms).
    #[arg(long)]
    bound: bool,
    /// Check a point-set file for the k-plane Kakeya property.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: CapsArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // one-line diagnostic on bad usage; full help still available
            if e.use_stderr() {
                eprintln!("{}", e.to_string().lines().next().unwrap_or("bad usage"));
                return ExitCode::from(EXIT_USAGE);
            }
            // --help / --version
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
    };
    if let Ok(threads) = std::env::var("KAKEYA_LAB_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = kakeya_core::set_worker_threads(Some(t));
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Maximal(args) => cmd_maximal(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Ensemble(args) => cmd_ensemble(args),
        Command::Ring(args) => cmd_ring(args),
        Command::Amplify(args) => cmd_amplify(args),
        Command::Kplane(args) => cmd_kplane(args),
    }
}

fn parse_theorem(
    tag: &str,
    k: Option<usize>,
    pexp: Option<f64>,
    qexp: Option<f64>,
) -> Result<TheoremSpec> {
    let need = |o: Option<f64>, name: &str| {
        o.ok_or(Error::BadParameters(format!("{tag} requires --{name}")))
    };
    match tag {
        "exp" => Ok(TheoremSpec::Exp),
        "shoop" => Ok(TheoremSpec::Shoop { p: need(pexp, "pexp")?, q: need(qexp, "qexp")? }),
        "kakeq" => Ok(TheoremSpec::Kakeq),
        "nikodym" => Ok(TheoremSpec::Nikodym),
        "restricted_w" | "restricted_W" => Ok(TheoremSpec::RestrictedW),
        "kplane_conj" => Ok(TheoremSpec::KplaneConj {
            k: k.ok_or(Error::BadParameters("kplane_conj requires --k".into()))?,
            p: need(pexp, "pexp")?,
            q: need(qexp, "qexp")?,
        }),
        "mixedq" => Ok(TheoremSpec::MixedQ {
            k: k.ok_or(Error::BadParameters("mixedq requires --k".into()))?,
        }),
        other => Err(Error::BadParameters(format!("unknown theorem tag {other:?}"))),
    }
}

fn check_field_consistency(f: &PointFunction, field: &Option<FieldSpec>, n: Option<usize>) -> Result<()> {
    if let Some(spec) = field {
        if spec.q() != f.field().q() {
            return Err(Error::BadParameters(format!(
                "flags request q = {} but input header has q = {}",
                spec.q(),
                f.field().q()
            )));
        }
    }
    if let Some(n) = n {
        if n != f.n() {
            return Err(Error::BadParameters(format!(
                "flags request n = {} but input header has n = {}",
                n,
                f.n()
            )));
        }
    }
    Ok(())
}

fn cmd_maximal(args: MaximalArgs) -> Result<u8> {
    let caps = args.caps.resolve();
    let f = PointFunction::read_path(&args.input, &caps)?;
    check_field_consistency(&f, &args.field.resolve()?, args.n)?;
    let theorem = parse_theorem(&args.theorem, args.k, args.pexp, args.qexp)?;
    let mut report = ratio_report(&f, &theorem, &caps)?;
    if args.witnesses {
        if let TheoremSpec::Exp = theorem {
            report.witnesses = Some(kakeya_maximal(&f, &caps)?.witness_json());
        }
    }
    let finding = report.ratio > args.max_ratio;
    let env = output::envelope(&args, None, &report);
    output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
    Ok(if finding { EXIT_FINDING } else { EXIT_OK })
}

/// Point-set / multiplicity file: header "p m n", rows "x1 .. xn [mult]".
fn read_multiplicity_file(
    path: &PathBuf,
    caps: &Caps,
) -> Result<(FieldSpec, usize, MultiplicityFunction, BTreeSet<Vec<FieldElement>>)> {
    let content = std::fs::read_to_string(path)?;
    let mut lines = content.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty point-set file".into()))?;
    let head: Vec<u64> = header
        .split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("header: {e}"))))
        .collect::<Result<_>>()?;
    let [p, m, n] = head[..] else {
        return Err(Error::Parse("header must be \"p m n\"".into()));
    };
    let field = FieldSpec::new(p, m as usize, None)?;
    let n = n as usize;
    caps.check_enum((field.q() as u128).pow(n as u32))?;
    let mut values: BTreeMap<Vec<FieldElement>, u32> = BTreeMap::new();
    for line in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != n && tokens.len() != n + 1 {
            return Err(Error::Parse(format!(
                "expected {n} coordinates with optional multiplicity, got {}",
                tokens.len()
            )));
        }
        let mut point = Vec::with_capacity(n);
        for t in &tokens[..n] {
            let idx: u64 = t.parse().map_err(|e| Error::Parse(format!("coordinate: {e}")))?;
            if idx >= field.q() {
                return Err(Error::Parse(format!("coordinate {idx} >= q = {}", field.q())));
            }
            point.push(FieldElement(idx));
        }
        let mult: u32 = if tokens.len() == n + 1 {
            tokens[n].parse().map_err(|e| Error::Parse(format!("multiplicity: {e}")))?
        } else {
            1
        };
        values.insert(point, mult);
    }
    let points: BTreeSet<Vec<FieldElement>> = values.keys().cloned().collect();
    let mult = MultiplicityFunction::new(n, values, &field);
    Ok((field, n, mult, points))
}

fn cmd_certify(args: CertifyArgs) -> Result<u8> {
    let caps = args.caps.resolve();
    let (field, _n, mult, _points) = read_multiplicity_file(&args.input, &caps)?;
    let degree_bound = args.degree_bound.unwrap_or(field.q() - 1);
    let cert = find_vanishing_poly(&mult, degree_bound, &field, &caps)?;
    let code = match cert.kind {
        CertificateKind::KernelTrivial => EXIT_OK,
        CertificateKind::WitnessPoly => EXIT_WITNESS,
    };
    let env = output::envelope(&args, None, &cert);
    output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
    Ok(code)
}

fn cmd_ensemble(args: EnsembleArgs) -> Result<u8> {
    let caps = args.caps.resolve();
    let field = args
        .field
        .resolve()?
        .ok_or(Error::BadParameters("ensemble requires --p/--m or --q".into()))?;
    if args.trials < 1 {
        return Err(Error::BadParameters("trials must be >= 1".into()));
    }
    let theorem = parse_theorem(&args.theorem, args.k, args.pexp, args.qexp)?;
    let (rows, stats) =
        ensemble_ratios(&field, args.n, &theorem, args.trials, args.seed, args.density, &caps)?;
    let mut csv = String::from("row,seed,trial,theorem,ratio\n");
    for (trial, ratio) in &rows {
        csv.push_str(&format!("trial,{},{},{},{}\n", args.seed, trial, theorem.label(), ratio));
    }
    csv.push_str(&format!(
        "summary_max,{},,{},{}\nsummary_mean,{},,{},{}\n",
        args.seed,
        theorem.label(),
        stats.max_ratio,
        args.seed,
        theorem.label(),
        stats.mean_ratio
    ));
    output::emit(args.output.as_ref(), &csv)?;
    Ok(if stats.max_ratio > args.max_ratio { EXIT_FINDING } else { EXIT_OK })
}

fn read_ring_set(path: &PathBuf, ring: &RingSpec, n: usize) -> Result<BTreeSet<RingPoint>> {
    let content = std::fs::read_to_string(path)?;
    let mut out = BTreeSet::new();
    for line in content.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} ring coordinates, got {}",
                tokens.len()
            )));
        }
        let mut point = Vec::with_capacity(n);
        for t in tokens {
            let idx: u64 = t.parse().map_err(|e| Error::Parse(format!("coordinate: {e}")))?;
            if idx >= ring.size() {
                return Err(Error::Parse(format!("coordinate {idx} >= |R| = {}", ring.size())));
            }
            point.push(RingElement(idx));
        }
        out.insert(point);
    }
    Ok(out)
}

fn cmd_ring(args: RingArgs) -> Result<u8> {
    let caps = args.caps.resolve();
    let ring = match args.ring_kind.as_str() {
        "polyx" => {
            let field = args
                .field
                .resolve()?
                .ok_or(Error::BadParameters("ring requires --p/--m or --q".into()))?;
            RingSpec::poly_mod_xk(field, args.k as usize)?
        }
        "intpk" => {
            let p = args
                .field
                .p
                .or(args.field.q)
                .ok_or(Error::BadParameters("intpk requires --p".into()))?;
            RingSpec::int_mod_pk(p, args.k)?
        }
        other => return Err(Error::BadParameters(format!("unknown ring kind {other:?}"))),
    };
    if args.dirs {
        let dirs = ring_directions(&ring, args.n, &caps)?;
        #[derive(Serialize)]
        struct DirReport {
            ring_size: u64,
            n: usize,
            direction_count: usize,
        }
        let report = DirReport { ring_size: ring.size(), n: args.n, direction_count: dirs.len() };
        let env = output::envelope(&args, None, &report);
        output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
        return Ok(EXIT_OK);
    }
    if let Some(path) = &args.check {
        let set = read_ring_set(path, &ring, args.n)?;
        let (ok, missing) = ring_kakeya_check(&set, args.n, &ring, &caps)?;
        #[derive(Serialize)]
        struct CheckReport {
            is_kakeya: bool,
            set_size: usize,
            missing_direction: Option<Vec<u64>>,
        }
        let report = CheckReport {
            is_kakeya: ok,
            set_size: set.len(),
            missing_direction: missing.map(|d| d.rep().iter().map(|e| e.0).collect()),
        };
        let env = output::envelope(&args, None, &report);
        output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
        return Ok(if ok { EXIT_OK } else { EXIT_WITNESS });
    }
    if let Some(path) = &args.check_embed {
        let set = read_ring_set(path, &ring, args.n)?;
        let report = ring_bound_check(&set, args.n, &ring, &caps)?;
        let pass = report.per_direction_transfer_ok && report.f_kakeya_ok && report.bound_satisfied;
        let env = output::envelope(&args, None, &report);
        output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
        return Ok(if pass { EXIT_OK } else { EXIT_FINDING });
    }
    if let Some(path) = &args.minkowski {
        let set = read_ring_set(path, &ring, args.n)?;
        #[derive(Serialize)]
        struct MinkowskiReport {
            set_size: usize,
            ring_size: u64,
            dimension: f64,
            density: f64,
        }
        let dim = minkowski_dim(set.len(), &ring)?;
        let report = MinkowskiReport {
            set_size: set.len(),
            ring_size: ring.size(),
            dimension: dim,
            density: set.len() as f64 / (ring.size() as f64).powi(args.n as i32),
        };
        let env = output::envelope(&args, None, &report);
        output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
        return Ok(EXIT_OK);
    }
    Err(Error::BadParameters(
        "ring needs one of --dirs, --check, --check-embed, --minkowski".into(),
    ))
}

fn read_anchor_file(path: &PathBuf, q: u64, dim: usize) -> Result<Vec<Vec<FieldElement>>> {
    let content = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in content.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords: Vec<FieldElement> = trimmed
            .split_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("anchor: {e}")))
                    .and_then(|i| {
                        if i < q {
                            Ok(FieldElement(i))
                        } else {
                            Err(Error::Parse(format!("anchor coordinate {i} >= q = {q}")))
                        }
                    })
            })
            .collect::<Result<_>>()?;
        if coords.len() != dim {
            return Err(Error::Parse(format!("anchors need {dim} coordinates")));
        }
        out.push(coords);
    }
    Ok(out)
}

fn cmd_amplify(args: AmplifyArgs) -> Result<u8> {
    let caps = args.caps.resolve();
    let f = PointFunction::read_path(&args.input, &caps)?;
    let n = f.n();
    let anchors: Vec<Vec<FieldElement>> = match &args.anchors {
        Some(path) => read_anchor_file(path, f.field().q(), n - 1)?,
        None => {
            let mut set: BTreeSet<Vec<FieldElement>> = f
                .support()
                .filter(|(p, _)| p[n - 1].is_zero())
                .map(|(p, _)| p[..n - 1].to_vec())
                .collect();
            if set.is_empty() {
                set.insert(vec![FieldElement::ZERO; n - 1]);
            }
            set.into_iter().collect()
        }
    };
    let (m, clamped) = match (args.translations, args.lambda) {
        (Some(m), _) => (m, false),
        (None, Some(lambda)) => {
            let chosen = choose_m(lambda, &f, args.k0)?;
            (chosen.m, chosen.clamped)
        }
        (None, None) => {
            return Err(Error::BadParameters("amplify requires --M or --lambda".into()))
        }
    };
    let mode = match args.mode.as_str() {
        "sampled" => TranslationMode::Sampled,
        "best-of" => TranslationMode::BestOf(args.retries),
        other => return Err(Error::BadParameters(format!("unknown mode {other:?}"))),
    };
    let instance = amplify(&f, &anchors, m, args.seed, mode)?;
    #[derive(Serialize)]
    struct AmplifyReport {
        seed: u64,
        m: u64,
        m_clamped: bool,
        anchor_count: usize,
        omega_size: usize,
        expected_omega_size: f64,
        norm_identity_rel_err: f64,
        translations: Vec<Vec<u64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        collisions: Option<CollisionReport>,
    }
    #[derive(Serialize)]
    struct CollisionReport {
        seed: u64,
        trials: u64,
        mean: f64,
        bound: f64,
        pass: bool,
        exact_expected: f64,
        image_large_prob: f64,
    }
    let collisions = match args.collision_trials {
        None => None,
        Some(trials) => {
            let stats = collision_stats(
                &instance.omega,
                f.field(),
                n,
                args.target_n,
                trials,
                args.seed,
                args.collision_c,
            )?;
            Some(CollisionReport {
                seed: stats.seed,
                trials: stats.trials,
                mean: stats.mean_collisions,
                bound: stats.heuristic_bound,
                pass: stats.mean_collisions <= 4.0 * stats.heuristic_bound,
                exact_expected: stats.exact_expected_collisions,
                image_large_prob: stats.image_large_prob,
            })
        }
    };
    let report = AmplifyReport {
        seed: args.seed,
        m,
        m_clamped: clamped,
        anchor_count: anchors.len(),
        omega_size: instance.omega.len(),
        expected_omega_size: expected_omega_size(f.field(), n, anchors.len(), m),
        norm_identity_rel_err: instance.norm_identity_rel_err,
        translations: instance
            .translations
            .iter()
            .map(|u| u.iter().map(|c| c.index()).collect())
            .collect(),
        collisions,
    };
    let env = output::envelope(&args, Some(args.seed), &report);
    output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
    Ok(EXIT_OK)
}

fn cmd_kplane(args: KplaneArgs) -> Result<u8> {
    let caps = args.caps.resolve();
    let field = args
        .field
        .resolve()?
        .ok_or(Error::BadParameters("kplane requires --p/--m or --q".into()))?;
    if args.bound {
        let bound = kplane_bound(args.n, args.k, &field)?;
        #[derive(Serialize)]
        struct BoundReport {
            n: usize,
            k: usize,
            q: u64,
            closed_form: String,
            closed_form_value: f64,
            binomial_form: String,
            binomial_form_value: f64,
            chain: Vec<String>,
        }
        let report = BoundReport {
            n: args.n,
            k: args.k,
            q: field.q(),
            closed_form: bound.closed_form.to_string(),
            closed_form_value: bound.closed_form_f64(),
            binomial_form: bound.binomial_form.to_string(),
            binomial_form_value: bound.binomial_form_f64(),
            chain: bound.chain.clone(),
        };
        println!("closed_form = {}", report.closed_form);
        println!("binomial_form = {}", report.binomial_form);
        if args.output.is_some() {
            let env = output::envelope(&args, None, &report);
            output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
        }
        return Ok(EXIT_OK);
    }
    if let Some(path) = &args.check {
        let content = std::fs::read_to_string(path)?;
        let (set_field, n, set) = parse_field_set(&content, &caps)?;
        if set_field.q() != field.q() || n != args.n {
            return Err(Error::BadParameters("set header disagrees with flags".into()));
        }
        let (ok, missing) = kplane_kakeya_check(&set, args.n, args.k, &field, &caps)?;
        #[derive(Serialize)]
        struct KpCheckReport {
            is_kplane_kakeya: bool,
            set_size: usize,
            missing_subspace: Option<serde_json::Value>,
        }
        let report = KpCheckReport {
            is_kplane_kakeya: ok,
            set_size: set.len(),
            missing_subspace: missing.map(|s| serde_json::to_value(&s).unwrap()),
        };
        let env = output::envelope(&args, None, &report);
        output::emit(args.output.as_ref(), &output::to_json_line(&env))?;
        return Ok(if ok { EXIT_OK } else { EXIT_WITNESS });
    }
    Err(Error::BadParameters("kplane needs --bound or --check".into()))
}

fn parse_field_set(
    content: &str,
    caps: &Caps,
) -> Result<(FieldSpec, usize, BTreeSet<Vec<FieldElement>>)> {
    let mut lines = content.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty set file".into()))?;
    let head: Vec<u64> = header
        .split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("header: {e}"))))
        .collect::<Result<_>>()?;
    let [p, m, n] = head[..] else {
        return Err(Error::Parse("header must be \"p m n\"".into()));
    };
    let field = FieldSpec::new(p, m as usize, None)?;
    let n = n as usize;
    caps.check_enum((field.q() as u128).pow(n as u32))?;
    let mut set = BTreeSet::new();
    for line in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords: Vec<FieldElement> = trimmed
            .split_whitespace()
            .take(n)
            .map(|t| {
                t.parse::<u64>().map_err(|e| Error::Parse(format!("coordinate: {e}"))).map(FieldElement)
            })
            .collect::<Result<_>>()?;
        if coords.len() != n {
            return Err(Error::Parse(format!("rows need {n} coordinates")));
        }
        set.insert(coords);
    }
    Ok((field, n, set))
}
