use crate::config::{positive, signature};
use crate::error::CliError;
use crate::output::{read_input, Sink};
use bigraded_toda::flows::{
    commutativity_check, integrate, richardson_ratio, Bth12Flow, Bth22Flow, FlowSpec, Monitors, Richardson, Special,
    System,
};
use bigraded_toda::lattice_ops::{mth_root_lower, nth_root_upper, shift_values, BandOperator, Lattice};
use bigraded_toda::Signature;
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

/// Tolerance on root residuals inside the exact window.
pub const ROOT_TOL: f64 = 1e-10;

/// Where the initial Lax operator comes from.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct LaxSource {
    /// Operator file: a band operator or a report holding `result.final_state`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Lattice size.
    #[arg(short = 'P', long = "sites")]
    pub p: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Noise amplitude around `Λ^N + Λ^{−M}`, below 1.
    #[arg(long)]
    pub amp: Option<f64>,
    /// Use `Λ^N + Λ^{−M}` instead of random coefficients.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub vacuum: Option<bool>,
}

fn read_operator(path: &Path) -> Result<BandOperator<f64>, CliError> {
    let value: Value = serde_json::from_str(&read_input(path)?)?;
    let inner = value.pointer("/result/final_state").cloned().unwrap_or(value);
    Ok(serde_json::from_value(inner)?)
}

impl LaxSource {
    /// Fills defaults and loads or draws the operator.
    pub fn load(&mut self, sig: Signature, default_p: usize) -> Result<BandOperator<f64>, CliError> {
        if let Some(path) = &self.input {
            let l = read_operator(path)?;
            let (lo, hi) = (l.min_offset().unwrap_or(0), l.max_offset().unwrap_or(0));
            if hi != sig.n as i32 || lo < -(sig.m as i32) {
                return Err(CliError::usage(format!("operator spans offsets {lo}..={hi}, signature {sig} needs -M..=N")));
            }
            self.p = Some(l.p());
            return Ok(l);
        }
        let lat = Lattice::new(*self.p.get_or_insert(default_p), 1.0)?;
        if *self.vacuum.get_or_insert(false) {
            let one = vec![1.0; lat.p];
            return Ok(BandOperator::lax(lat, sig, [(-(sig.m as i32), one)])?);
        }
        let amp = positive("amp", *self.amp.get_or_insert(0.1))?;
        let mut rng = ChaCha8Rng::seed_from_u64(*self.seed.get_or_insert(0));
        near_background(lat, sig, amp, &mut rng)
    }
}

/// `Λ^N + Λ^{−M}` plus uniform noise in `(−amp, amp)` on every free coefficient.
pub fn near_background(lat: Lattice, sig: Signature, amp: f64, rng: &mut ChaCha8Rng) -> Result<BandOperator<f64>, CliError> {
    if amp >= 1.0 {
        return Err(CliError::usage(format!("amp {amp} must be below 1 to keep u_{{-M}} positive")));
    }
    let low = -(sig.m as i32);
    let u: Vec<(i32, Vec<f64>)> = (low..sig.n as i32)
        .map(|d| {
            let base = if d == low { 1.0 } else { 0.0 };
            (d, (0..lat.p).map(|_| base + rng.gen_range(-amp..amp)).collect())
        })
        .collect();
    Ok(BandOperator::lax(lat, sig, u)?)
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Upper,
    Lower,
    Both,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct FracPowerArgs {
    #[arg(short = 'N')]
    pub n: Option<u32>,
    #[arg(short = 'M')]
    pub m: Option<u32>,
    #[arg(long, value_enum)]
    pub root: Option<RootKind>,
    /// Number of root coefficients below the leading one.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: LaxSource,
}

#[derive(Serialize)]
struct RootReport {
    upper: bool,
    depth: u32,
    power: u32,
    /// Largest coefficient of `root^k − L` inside the exact window.
    residual: f64,
    /// `max |Σ_{k<N} a_0(x+k) − u_{N−1}(x)|` for upper roots.
    #[serde(skip_serializing_if = "Option::is_none")]
    a0_defect: Option<f64>,
    root: BandOperator<f64>,
}

#[derive(Serialize)]
struct FracPowerResult {
    signature: Signature,
    tol: f64,
    passes: bool,
    roots: Vec<RootReport>,
}

fn a0_defect(root: &BandOperator<f64>, l: &BandOperator<f64>, n: u32) -> f64 {
    let a0 = root.diagonal_or_zero(0);
    let target = l.diagonal_or_zero(n as i32 - 1);
    let mut sum = vec![0.0; a0.len()];
    for k in 0..n as i64 {
        for (s, v) in sum.iter_mut().zip(shift_values(&a0, k)) {
            *s += v;
        }
    }
    sum.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn frac_power(args: FracPowerArgs, sink: &Sink) -> Result<(), CliError> {
    let mut a = args;
    let sig = signature(&mut a.n, &mut a.m)?;
    let l = a.source.load(sig, 13)?;
    let kind = *a.root.get_or_insert(RootKind::Both);
    let depth = *a.depth.get_or_insert(sig.n.max(sig.m) + 2);
    let tol = positive("tol", *a.tol.get_or_insert(ROOT_TOL))?;
    let mut roots = Vec::new();
    if kind != RootKind::Lower {
        let r = nth_root_upper(&l, sig, depth)?;
        let residual = r.pow(sig.n).residual_against(&l);
        roots.push(RootReport {
            upper: true,
            depth,
            power: sig.n,
            residual,
            a0_defect: Some(a0_defect(&r.op, &l, sig.n)),
            root: r.op,
        });
    }
    if kind != RootKind::Upper {
        let r = mth_root_lower(&l, sig, depth)?;
        let residual = r.pow(sig.m).residual_against(&l);
        roots.push(RootReport { upper: false, depth, power: sig.m, residual, a0_defect: None, root: r.op });
    }
    let passes = roots.iter().all(|r| r.residual <= tol && r.a0_defect.is_none_or(|d| d <= tol));
    let result = FracPowerResult { signature: sig, tol, passes, roots };
    let path = sink.json("frac-power.json", "frac-power", &a, &result)?;
    for r in &result.roots {
        let name = if r.upper { "L^{1/N}" } else { "L^{1/M}" };
        println!("{name}: residual {:.3e}", r.residual);
    }
    println!("wrote {}", path.display());
    if passes {
        Ok(())
    } else {
        Err(CliError::Failed(format!("root residual above {tol:e}")))
    }
}

/// Names of the hand-written systems.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialName {
    Toda11,
    Bm21T10,
    Bm21T20,
    Bth22T20,
    Bth22T10,
    Bth22Tm10,
    Bth12T10,
    Bth12Tm10,
}

impl From<SpecialName> for Special {
    fn from(s: SpecialName) -> Special {
        match s {
            SpecialName::Toda11 => Special::Toda11,
            SpecialName::Bm21T10 => Special::Bm21T10,
            SpecialName::Bm21T20 => Special::Bm21T20,
            SpecialName::Bth22T20 => Special::Bth22(Bth22Flow::T20),
            SpecialName::Bth22T10 => Special::Bth22(Bth22Flow::T10),
            SpecialName::Bth22Tm10 => Special::Bth22(Bth22Flow::Tm10),
            SpecialName::Bth12T10 => Special::Bth12(Bth12Flow::T10),
            SpecialName::Bth12Tm10 => Special::Bth12(Bth12Flow::Tm10),
        }
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct EvolveArgs {
    #[arg(short = 'N')]
    pub n: Option<u32>,
    #[arg(short = 'M')]
    pub m: Option<u32>,
    /// Flow index `γ` of the generic commutator flow `t[γ,n]`.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<i32>,
    /// Flow level `n`.
    #[arg(long)]
    pub level: Option<u32>,
    /// A hand-written system instead of the generic commutator.
    #[arg(long, value_enum)]
    pub special: Option<SpecialName>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Step count; overrides `--t-end`.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Tolerance on `|tr L^k(t) − tr L^k(0)|`, `k = 1, 2, 3`.
    #[arg(long)]
    pub trace_tol: Option<f64>,
    #[arg(long)]
    pub leakage_tol: Option<f64>,
    #[arg(long)]
    pub aux_tol: Option<f64>,
    /// Also run the step-halving convergence test.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub richardson: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: LaxSource,
}

#[derive(Serialize)]
struct RichardsonReport {
    #[serde(flatten)]
    run: Richardson,
    convergence_order: f64,
}

#[derive(Serialize)]
struct EvolveResult {
    system: System,
    steps: usize,
    t_end: f64,
    trajectory_csv: String,
    trajectory_sha256: String,
    records: usize,
    trace_drift: [f64; 3],
    max_leakage: f64,
    max_aux_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    richardson: Option<RichardsonReport>,
    final_state: BandOperator<f64>,
}

fn evolve_system(a: &mut EvolveArgs) -> Result<System, CliError> {
    if let Some(s) = a.special {
        let special = Special::from(s);
        let sig = special.sig();
        if a.n.is_some_and(|n| n != sig.n) || a.m.is_some_and(|m| m != sig.m) || a.gamma.is_some() || a.level.is_some() {
            return Err(CliError::usage(format!("--special fixes the signature {sig} and the flow")));
        }
        a.n = Some(sig.n);
        a.m = Some(sig.m);
        return Ok(System::Special(special));
    }
    let sig = signature(&mut a.n, &mut a.m)?;
    let flow = FlowSpec::new(*a.gamma.get_or_insert(1), *a.level.get_or_insert(0));
    flow.validate(sig)?;
    Ok(System::generic(sig, flow))
}

pub fn evolve(args: EvolveArgs, sink: &Sink) -> Result<(), CliError> {
    let mut a = args;
    let system = evolve_system(&mut a)?;
    let sig = system.sig();
    let l0 = a.source.load(sig, 13)?;
    let dt = positive("dt", *a.dt.get_or_insert(1e-3))?;
    let steps = match a.steps {
        Some(s) => s,
        None => (positive("t-end", *a.t_end.get_or_insert(1.0))? / dt).round() as usize,
    };
    if steps == 0 {
        return Err(CliError::usage("the run needs at least one step"));
    }
    let record_every = *a.record_every.get_or_insert(100);
    if record_every == 0 {
        return Err(CliError::usage("record-every must be at least 1"));
    }
    let monitors = Monitors {
        trace_drift: Some(positive("trace-tol", *a.trace_tol.get_or_insert(1e-8))?),
        leakage: Some(positive("leakage-tol", *a.leakage_tol.get_or_insert(1e-8))?),
        aux_defect: Some(positive("aux-tol", *a.aux_tol.get_or_insert(1e-8))?),
    };
    let richardson = if *a.richardson.get_or_insert(false) {
        let t = dt * steps as f64;
        let run = richardson_ratio(&system, &l0, dt.max(t / 20.0), t)?;
        Some(RichardsonReport { convergence_order: run.ratio.log2(), run })
    } else {
        None
    };
    let traj = integrate(&system, l0, dt, steps, &monitors, record_every)?;
    let (csv_path, csv_hash) = sink.csv("trajectory.csv", "evolve", &a, &traj.to_csv())?;
    let result = EvolveResult {
        system,
        steps,
        t_end: dt * steps as f64,
        trajectory_csv: csv_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        trajectory_sha256: csv_hash,
        records: traj.times.len(),
        trace_drift: traj.trace_drift(),
        max_leakage: traj.max_leakage(),
        max_aux_defect: traj.max_aux_defect(),
        richardson,
        final_state: traj.last().l.clone(),
    };
    let path = sink.json("evolve.json", "evolve", &a, &result)?;
    println!(
        "{} steps, trace drift {:.3e}, leakage {:.3e}; wrote {} and {}",
        steps,
        result.trace_drift.iter().copied().fold(0.0, f64::max),
        result.max_leakage,
        csv_path.display(),
        path.display()
    );
    if let Some(r) = &result.richardson {
        println!("step-halving ratio {:.3} (order {:.3})", r.run.ratio, r.convergence_order);
    }
    Ok(())
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct CommuteArgs {
    #[arg(short = 'N')]
    pub n: Option<u32>,
    #[arg(short = 'M')]
    pub m: Option<u32>,
    /// Finite-difference step.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: LaxSource,
}

#[derive(Serialize)]
struct PairDefect {
    a: FlowSpec,
    b: FlowSpec,
    defect: f64,
}

#[derive(Serialize)]
struct CommuteResult {
    signature: Signature,
    tol: f64,
    max_defect: f64,
    passes: bool,
    pairs: Vec<PairDefect>,
}

pub fn commute(args: CommuteArgs, sink: &Sink) -> Result<(), CliError> {
    let mut a = args;
    let sig = signature(&mut a.n, &mut a.m)?;
    let l = a.source.load(sig, 13)?;
    let h = positive("h", *a.h.get_or_insert(1e-3))?;
    let tol = positive("tol", *a.tol.get_or_insert(1e-6))?;
    let flows = FlowSpec::primaries(sig);
    let mut pairs = Vec::new();
    for (i, &fa) in flows.iter().enumerate() {
        for &fb in &flows[i + 1..] {
            pairs.push(PairDefect { a: fa, b: fb, defect: commutativity_check(&l, fa, fb, sig, h)? });
        }
    }
    let max_defect = pairs.iter().map(|p| p.defect).fold(0.0, f64::max);
    let passes = max_defect <= tol;
    let result = CommuteResult { signature: sig, tol, max_defect, passes, pairs };
    let path = sink.json("commute-check.json", "commute-check", &a, &result)?;
    println!("{} pairs, largest defect {max_defect:.3e}; wrote {}", result.pairs.len(), path.display());
    if passes {
        Ok(())
    } else {
        Err(CliError::Failed(format!("commutator defect {max_defect:e} above {tol:e}")))
    }
}
