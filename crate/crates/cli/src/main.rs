//! `vw`: checks and constructions for masks and generalized filters on the
//! Vilenkin group.
//!
//! Exit status is 0 when a check passes, 1 when it fails and 2 on usage,
//! parse or I/O errors. Reports go to standard output as `key=value` lines;
//! CSV artifacts go to the `-o` path.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vilenkin::frame::{
    build_pseudo_scaling, frame_oracle, low_pass_check, parseval_check, pfmw_build, validate_filter,
    FilterMode, GeneralizedFilter, HighPassForm, Modulators,
};
use vilenkin::mask::{CascadeOptions, Mask};
use vilenkin::mra::mra_verdict;
use vilenkin::walsh::{chrestenson, Algorithm, Direction};
use vilenkin::{io, Error};

#[derive(Parser, Debug)]
#[command(name = "vw", version, about = "Wavelet checks on the Vilenkin group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mask diagnostics, refinable spectrum and scaling-function checks.
    MaskCheck(MaskArgs),
    /// Blocked-set MRA verdict for a mask.
    MraCheck(MaskArgs),
    /// Cascade iteration for a mask; writes the limit as CSV.
    Refine(RefineArgs),
    /// Generalized-filter conditions and the low-pass test.
    FilterCheck(FilterArgs),
    /// Builds the multiwavelet spectra of a filter and writes them as CSV.
    PfmwBuild(FilterArgs),
    /// Verifies the Parseval frame conditions for the multiwavelet of a filter.
    PfmwVerify(VerifyArgs),
    /// Chrestenson transform of a vector file.
    Transform(TransformArgs),
    /// Times the naive and fast transforms; prints CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct MaskArgs {
    input: PathBuf,
    /// Depth of the spectral grid.
    #[arg(long = "K", default_value_t = 4)]
    k: u32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Where to write the sampled spectrum.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RefineArgs {
    input: PathBuf,
    /// Cascade resolution.
    #[arg(long = "D", default_value_t = 8)]
    d: i64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 64)]
    max_iters: usize,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FilterArgs {
    input: PathBuf,
    #[arg(long = "K", default_value_t = 4)]
    k: u32,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sign convention for the cross condition: paper or classical.
    #[arg(long, default_value = "paper")]
    mode: FilterMode,
    /// Walsh modulation index of the wavelets.
    #[arg(long, default_value_t = 0)]
    alpha: u64,
    /// Use conj(m_i) instead of m_i in the wavelet spectra.
    #[arg(long)]
    conjugate: bool,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    filter: FilterArgs,
    /// Largest scale in the frame sums.
    #[arg(long = "J", default_value_t = 8)]
    j: u32,
    /// Largest lattice index of the sampled shifts.
    #[arg(long = "A_max", alias = "a-max", default_value_t = 32)]
    a_max: u64,
    /// Resolution of the time-domain oracle; the oracle runs only when set.
    #[arg(long = "D")]
    d: Option<i64>,
    #[arg(long = "J-inner", default_value_t = 3)]
    j_inner: u32,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TransformArgs {
    input: PathBuf,
    #[arg(long)]
    inverse: bool,
    #[arg(long)]
    naive: bool,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 3)]
    p: u8,
    /// Largest exponent n; sizes run over p^1 .. p^n.
    #[arg(long, default_value_t = 8)]
    max_n: u32,
    #[arg(long, default_value_t = 3)]
    repeats: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type Outcome = Result<bool, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("VW_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool can only be installed once; ignore the error if it already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match cli.command {
        Command::MaskCheck(a) => mask_check(&a),
        Command::MraCheck(a) => mra_check(&a),
        Command::Refine(a) => refine(&a),
        Command::FilterCheck(a) => filter_check(&a),
        Command::PfmwBuild(a) => pfmw_build_cmd(&a),
        Command::PfmwVerify(a) => pfmw_verify(&a),
        Command::Transform(a) => transform(&a),
        Command::Bench(a) => bench(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::InvalidInput(_)
        | Error::InvalidLength { .. }
        | Error::InvalidMask(_)
        | Error::InvalidOperand(_)
        | Error::Resolution(_)
        | Error::Io(_) => 2,
        Error::NonconvergentProduct(_)
        | Error::CascadeDivergence { .. }
        | Error::DegenerateFilter(_)
        | Error::NotApplicable(_) => 1,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    if let Some(path) = path {
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn load_mask(path: &Path) -> Result<Mask, Error> {
    io::parse_mask(&read(path)?)
}

fn load_filter(path: &Path) -> Result<GeneralizedFilter, Error> {
    io::parse_filter(&read(path)?)
}

fn mask_check(a: &MaskArgs) -> Outcome {
    let m = load_mask(&a.input)?;
    let d = m.diagnostics();
    println!("p={} n={}", m.p(), m.n());
    println!("coeff_sum={}", d.coeff_sum);
    println!("theta_value={}", d.theta_value);
    println!("qmf_residual={:e}", d.qmf_residual);
    let spectrum = m.refinable_spectrum(a.k)?;
    let r = m.scaling_checks(a.k)?;
    println!("strang_fix_residual={:e}", r.strang_fix_residual);
    println!("partition_residual={:e}", r.partition_residual);
    println!("two_scale_residual={:e}", r.two_scale_residual);
    println!("ortho_residual={:e}", r.ortho_residual);
    println!("lowpass_limit_ok={}", r.lowpass_limit_ok);
    println!("cascade_iterations={}", r.cascade_iterations);
    println!("cascade_converged={}", r.cascade_converged);
    write(&a.output, &spectrum.to_csv())?;
    let pass = d.qmf_residual <= a.tol
        && (d.theta_value - 1.0).norm() <= a.tol
        && r.strang_fix_residual <= a.tol
        && r.partition_residual <= a.tol
        && r.two_scale_residual <= a.tol
        && r.lowpass_limit_ok;
    println!("scaling_mask={pass}");
    Ok(pass)
}

fn mra_check(a: &MaskArgs) -> Outcome {
    let m = load_mask(&a.input)?;
    let report = mra_verdict(&m, a.k, a.tol)?;
    print!("{report}");
    if a.output.is_some() {
        write(&a.output, &m.refinable_spectrum(a.k)?.to_csv())?;
    }
    Ok(report.is_mra && !report.inconsistent)
}

fn refine(a: &RefineArgs) -> Outcome {
    let m = load_mask(&a.input)?;
    let out = m.cascade(a.d, CascadeOptions { max_iters: a.max_iters, tol: a.tol })?;
    println!("iterations={}", out.iterations);
    println!("converged={}", out.converged);
    println!("last_change={:e}", out.last_change);
    println!("l2_norm={}", out.phi.l2_norm());
    write(&a.output, &out.phi.to_csv())?;
    Ok(out.converged)
}

fn filter_check(a: &FilterArgs) -> Outcome {
    let f = load_filter(&a.input)?;
    let v = validate_filter(&f, a.mode, a.tol);
    print!("{v}");
    let lp = low_pass_check(&f, a.k, a.tol)?;
    print!("{lp}");
    Ok(v.passed() && lp.passed())
}

fn form(a: &FilterArgs) -> HighPassForm {
    if a.conjugate {
        HighPassForm::ConjugateFilter
    } else {
        HighPassForm::Filter
    }
}

fn pfmw_build_cmd(a: &FilterArgs) -> Outcome {
    let f = load_filter(&a.input)?;
    let phi = build_pseudo_scaling(&f, a.k)?;
    let psi = pfmw_build(&f, &phi, a.alpha, &Modulators::identity(f.p()), form(a))?;
    let w = psi.window();
    println!("window={}..{}", w.lo, w.hi);
    println!("refinement_residual={:e}", phi.refinement_residual());
    println!("cocycle_residual={:e}", phi.cocycle().residual);
    println!("wavelets={}", psi.spectra().len());
    write(&a.output, &psi.to_csv())?;
    Ok(true)
}

fn pfmw_verify(a: &VerifyArgs) -> Outcome {
    let fa = &a.filter;
    let f = load_filter(&fa.input)?;
    let v = validate_filter(&f, fa.mode, fa.tol);
    print!("{v}");
    let phi = build_pseudo_scaling(&f, fa.k)?;
    println!("refinement_residual={:e}", phi.refinement_residual());
    let psi = pfmw_build(&f, &phi, fa.alpha, &Modulators::identity(f.p()), form(fa))?;
    let report = parseval_check(&psi, a.a_max, a.j, fa.tol)?;
    print!("{report}");
    write(&fa.output, &psi.to_csv())?;
    let mut pass = report.passed();
    if let Some(d) = a.d {
        let oracle = frame_oracle(&psi, d, a.j_inner, a.trials, a.seed)?;
        print!("{oracle}");
        pass &= !oracle.degenerate && oracle.statistic <= 1e-6;
    }
    Ok(pass)
}

fn transform(a: &TransformArgs) -> Outcome {
    let v = io::parse_vector(&read(&a.input)?)?;
    let direction = if a.inverse { Direction::Inverse } else { Direction::Forward };
    let algorithm = if a.naive { Algorithm::Naive } else { Algorithm::Fast };
    let out = io::SampleVector { p: v.p, values: chrestenson(v.p, &v.values, direction, algorithm)? };
    let text = io::emit_vector(&out)?;
    match &a.output {
        Some(_) => write(&a.output, &text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn bench(a: &BenchArgs) -> Outcome {
    vilenkin::group::check_modulus(a.p)?;
    println!("N,algorithm,nanoseconds");
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for n in 1..=a.max_n {
        let len = (a.p as usize).pow(n);
        let v: Vec<Complex64> =
            (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for (name, alg) in [("naive", Algorithm::Naive), ("fast", Algorithm::Fast)] {
            let best = (0..a.repeats.max(1))
                .map(|_| {
                    let t = Instant::now();
                    let out = chrestenson(a.p, &v, Direction::Forward, alg).expect("valid length");
                    std::hint::black_box(out);
                    t.elapsed().as_nanos()
                })
                .min()
                .unwrap();
            println!("{len},{name},{best}");
        }
    }
    Ok(true)
}
