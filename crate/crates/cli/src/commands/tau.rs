use crate::config::signature;
use crate::error::CliError;
use crate::output::{read_input, Sink};
use bigraded_toda::hirota_check::{full_sweep, random_moment_tau, ResidualReportJson};
use bigraded_toda::polytime::{TimeSet, YoungDiagram};
use bigraded_toda::tau_engine::{
    check_params, k_set, k_value, lax_from_tau, lax_left, rational_tau, young_decomposition, young_sum, DegreeDiagram, KChoice,
    Tail, TauError, TauSequence, TauSequenceJson,
};
use bigraded_toda::Signature;
use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::PathBuf;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct RationalTauArgs {
    #[arg(short = 'N')]
    pub n: Option<u32>,
    #[arg(short = 'M')]
    pub m: Option<u32>,
    /// Largest tau index.
    #[arg(short = 'j')]
    pub j: Option<u32>,
    /// Left offset, `0 ≤ m < N`.
    #[arg(short = 'm')]
    pub moff: Option<u32>,
    /// Right offset, `0 ≤ n < M`.
    #[arg(short = 'n')]
    pub noff: Option<u32>,
    /// Left time slots (default N).
    #[arg(long)]
    pub l_slots: Option<u32>,
    /// Right time slots (default M).
    #[arg(long)]
    pub r_slots: Option<u32>,
}

#[derive(Serialize)]
struct Level {
    s: u32,
    degree_rows: Vec<i64>,
    homogeneous_degree: Option<u64>,
    young: Vec<(Vec<u32>, Vec<u32>)>,
    young_matches: bool,
}

#[derive(Serialize)]
struct RationalTauResult {
    reduced: Signature,
    k: u64,
    k_set: Vec<KChoice>,
    tau: TauSequenceJson,
    levels: Vec<Level>,
}

fn rows(y: &YoungDiagram) -> Vec<u32> {
    y.rows().to_vec()
}

pub fn rational(args: RationalTauArgs, sink: &Sink) -> Result<(), CliError> {
    let mut a = args;
    let sig = signature(&mut a.n, &mut a.m)?;
    let j = *a.j.get_or_insert(1);
    let (mo, no) = (*a.moff.get_or_insert(0), *a.noff.get_or_insert(0));
    let red = sig.reduced();
    check_params(red, j, mo, no)?;
    let times = TimeSet::with_slots(red, *a.l_slots.get_or_insert(red.n), *a.r_slots.get_or_insert(red.m));
    let tau = rational_tau(sig, j, mo, no, &times)?;
    let k = k_value(red, j, mo, no);
    let mut levels = Vec::new();
    let mut all_match = true;
    for s in 1..=j {
        let young = young_decomposition(red, j, mo, no, s)?;
        let matches = young_sum(red, j, mo, no, s, &times)? == tau.taus()[s as usize];
        all_match &= matches;
        levels.push(Level {
            s,
            degree_rows: DegreeDiagram { k, s, n: red.n, m: red.m }.rows(),
            homogeneous_degree: tau.taus()[s as usize].homogeneous_degree(red),
            young: young.iter().map(|(l, r)| (rows(l), rows(r))).collect(),
            young_matches: matches,
        });
    }
    let result = RationalTauResult { reduced: red, k, k_set: k_set(red, j), tau: tau.to_json(), levels };
    let path = sink.json("rational-tau.json", "rational-tau", &a, &result)?;
    println!("K_{j} = {:?}", result.k_set.iter().map(|c| c.k).collect::<Vec<_>>());
    println!("wrote {}", path.display());
    if all_match {
        Ok(())
    } else {
        Err(CliError::Failed("Young decomposition differs from the determinant".into()))
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct MomentTauArgs {
    #[arg(short = 'N')]
    pub n: Option<u32>,
    #[arg(short = 'M')]
    pub m: Option<u32>,
    /// Largest tau index `T`.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct MomentTauResult {
    tau: TauSequenceJson,
}

fn moment_tau(sig: Signature, size: usize, seed: u64) -> TauSequence {
    random_moment_tau(sig, size, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn moment(args: MomentTauArgs, sink: &Sink) -> Result<(), CliError> {
    let mut a = args;
    let sig = signature(&mut a.n, &mut a.m)?;
    let size = *a.size.get_or_insert(4);
    if size == 0 || size > 8 {
        return Err(CliError::usage(format!("size {size} must lie in 1..=8")));
    }
    let tau = moment_tau(sig, size, *a.seed.get_or_insert(0));
    let path = sink.json("moment-tau.json", "moment-tau", &a, &MomentTauResult { tau: tau.to_json() })?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generate {
    Rational,
    Moment,
    Vacuum,
}

/// A tau sequence read from a file or generated from parameters.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct TauSource {
    /// Tau file: a tau sequence or the report of rational-tau / moment-tau.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generate instead of reading; `vacuum` is `τ_s = 1`, whose operator is `Λ^N`.
    #[arg(long, value_enum)]
    pub generate: Option<Generate>,
    #[arg(short = 'N')]
    pub n: Option<u32>,
    #[arg(short = 'M')]
    pub m: Option<u32>,
    /// Rational: largest tau index.
    #[arg(short = 'j')]
    pub j: Option<u32>,
    #[arg(short = 'm')]
    pub moff: Option<u32>,
    #[arg(short = 'n')]
    pub noff: Option<u32>,
    /// Moment and vacuum: largest tau index.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_tau(text: &str) -> Result<TauSequence, CliError> {
    let value: Value = serde_json::from_str(text)?;
    let inner = match value.pointer("/result/tau") {
        Some(t) => t.clone(),
        None => value,
    };
    let json: TauSequenceJson = serde_json::from_value(inner)?;
    Ok(TauSequence::from_json(&json)?)
}

impl TauSource {
    /// Fills defaults and loads or builds the sequence.
    pub fn load(&mut self) -> Result<TauSequence, CliError> {
        if let Some(path) = &self.input {
            if self.generate.is_some() {
                return Err(CliError::usage("give either --input or --generate"));
            }
            return parse_tau(&read_input(path)?);
        }
        let sig = signature(&mut self.n, &mut self.m)?;
        match *self.generate.get_or_insert(Generate::Rational) {
            Generate::Rational => {
                let j = *self.j.get_or_insert(3);
                let (mo, no) = (*self.moff.get_or_insert(0), *self.noff.get_or_insert(0));
                Ok(rational_tau(sig, j, mo, no, &TimeSet::for_lax(sig.reduced(), j))?)
            }
            Generate::Moment => {
                let size = *self.size.get_or_insert(4);
                if size == 0 || size > 8 {
                    return Err(CliError::usage(format!("size {size} must lie in 1..=8")));
                }
                Ok(moment_tau(sig, size, *self.seed.get_or_insert(0)))
            }
            Generate::Vacuum => {
                let size = *self.size.get_or_insert(4);
                Ok(TauSequence::vacuum(sig, TimeSet::for_lax(sig, size as u32), size, Tail::Unknown))
            }
        }
    }
}

#[derive(Serialize)]
struct HirotaResult {
    signature: Signature,
    last: usize,
    checked: usize,
    failed: usize,
    passes: bool,
    residuals: Vec<ResidualReportJson>,
}

pub fn hirota(mut args: TauSource, sink: &Sink) -> Result<(), CliError> {
    let tau = args.load()?;
    let reports = full_sweep(&tau)?;
    let residuals: Vec<ResidualReportJson> = reports.iter().map(|r| r.to_json()).collect();
    let failed = residuals.iter().filter(|r| !r.passes).count();
    let result = HirotaResult {
        signature: tau.sig,
        last: tau.last(),
        checked: residuals.len(),
        failed,
        passes: failed == 0,
        residuals,
    };
    let path = sink.json("hirota-check.json", "hirota-check", &args, &result)?;
    println!("{} residuals, {failed} nonzero; wrote {}", result.checked, path.display());
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{failed} of {} residuals are nonzero", result.checked)))
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct LaxArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: TauSource,
    /// Window size (default: the largest the sequence allows).
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Serialize)]
struct LaxEntry {
    i: usize,
    j: usize,
    num: String,
    den: String,
}

#[derive(Serialize)]
struct LaxResult {
    signature: Signature,
    window: usize,
    dual_formulas_agree: bool,
    /// Whether `L = Λ^N` on the window.
    pure_shift: bool,
    entries: Vec<LaxEntry>,
}

pub fn lax(args: LaxArgs, sink: &Sink) -> Result<(), CliError> {
    let mut a = args;
    let tau = a.source.load()?;
    let window = *a.window.get_or_insert(tau.last().saturating_sub(1).max(1));
    let (lax, dual_formulas_agree) = match lax_from_tau(&tau, window) {
        Ok(lax) => (lax, true),
        Err(TauError::LaxMismatch { .. } | TauError::BandViolation { .. }) => (lax_left(&tau, window)?, false),
        Err(e) => return Err(e.into()),
    };
    let n = tau.sig.n as usize;
    let mut entries = Vec::new();
    let mut pure_shift = true;
    for i in 1..=window {
        for j in 1..=window {
            let e = lax.get(i, j);
            let is_one = !e.num.is_zero() && e.num == e.den;
            pure_shift &= if j == i + n { is_one } else { e.is_zero() };
            if !e.is_zero() {
                entries.push(LaxEntry { i, j, num: e.num.to_string(), den: e.den.to_string() });
            }
        }
    }
    let vacuum = a.source.generate == Some(Generate::Vacuum);
    let result = LaxResult { signature: tau.sig, window, dual_formulas_agree, pure_shift, entries };
    let path = sink.json("lax-from-tau.json", "lax-from-tau", &a, &result)?;
    println!(
        "{window}×{window} window, formulas agree: {dual_formulas_agree}, L = Λ^N: {pure_shift}; wrote {}",
        path.display()
    );
    // the all-ones sequence has u_{−M} = 0, so only the left formula applies to it
    let passes = if vacuum { pure_shift } else { dual_formulas_agree };
    if passes {
        Ok(())
    } else if vacuum {
        Err(CliError::Failed("vacuum sequence does not give L = Λ^N".into()))
    } else {
        Err(CliError::Failed("left and right Lax formulas disagree".into()))
    }
}
