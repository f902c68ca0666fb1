use crate::config::{positive, signature};
use crate::error::CliError;
use crate::output::Sink;
use super::lattice::{near_background, LaxSource};
use bigraded_toda::flows::FlowSpec;
use bigraded_toda::lattice_ops::Lattice;
use bigraded_toda::miura::{
    equivalence_residual_with, mapped_flow, normalize_lowest, psi_for_signature, theorem_residual_with,
    EquivalenceReport, GaugeStats, PairResidual, PsiForm,
};
use bigraded_toda::Signature;
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct MiuraArgs {
    #[arg(short = 'N')]
    pub n: Option<u32>,
    #[arg(short = 'M')]
    pub m: Option<u32>,
    /// Number of random states (ignored with `--input`).
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Drop the anti-involution from the map.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub skip_dagger: Option<bool>,
    /// Rescale the lowest coefficient of an input operator to unit product.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub normalize: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: LaxSource,
}

#[derive(Serialize)]
struct StateReport {
    index: usize,
    psi: GaugeStats,
    pairs: Vec<PairResidual>,
    max_residual: f64,
}

#[derive(Serialize)]
struct MiuraResult {
    source: Signature,
    target: Signature,
    tol: f64,
    skip_dagger: bool,
    max_residual: f64,
    passes: bool,
    states: Vec<StateReport>,
}

fn theorem_report(l: &bigraded_toda::lattice_ops::BandOperator<f64>, sig: Signature, skip: bool) -> Result<EquivalenceReport, CliError> {
    let pairs = FlowSpec::primaries(sig)
        .into_iter()
        .map(|f| -> Result<PairResidual, CliError> {
            let theorem = theorem_residual_with(l, sig, f, skip)?;
            Ok(PairResidual {
                source: format!("{sig} {f}"),
                target: format!("{} {}", sig.swapped(), mapped_flow(f)),
                displayed: 0.0,
                theorem,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max_residual = pairs.iter().map(|p| p.theorem).fold(0.0, f64::max);
    Ok(EquivalenceReport { p: l.p(), pairs, psi: psi_for_signature(l, sig, PsiForm::Log)?.stats(), max_residual })
}

pub fn miura(args: MiuraArgs, sink: &Sink) -> Result<(), CliError> {
    let mut a = args;
    a.m.get_or_insert(2);
    let sig = signature(&mut a.n, &mut a.m)?;
    let tol = positive("tol", *a.tol.get_or_insert(1e-10))?;
    let skip = *a.skip_dagger.get_or_insert(false);
    let ops = if a.source.input.is_some() {
        let l = a.source.load(sig, 13)?;
        if *a.normalize.get_or_insert(false) {
            vec![normalize_lowest(&l, sig)?]
        } else {
            vec![l]
        }
    } else {
        let count = *a.states.get_or_insert(10);
        if count == 0 {
            return Err(CliError::usage("states must be at least 1"));
        }
        let lat = Lattice::new(*a.source.p.get_or_insert(13), 1.0)?;
        let amp = positive("amp", *a.source.amp.get_or_insert(0.1))?;
        let mut rng = ChaCha8Rng::seed_from_u64(*a.source.seed.get_or_insert(0));
        (0..count)
            .map(|_| Ok(normalize_lowest(&near_background(lat, sig, amp, &mut rng)?, sig)?))
            .collect::<Result<Vec<_>, CliError>>()?
    };
    let mut states = Vec::new();
    for (index, l) in ops.iter().enumerate() {
        let report =
            if sig == Signature::new(1, 2) { equivalence_residual_with(l, skip)? } else { theorem_report(l, sig, skip)? };
        states.push(StateReport { index, psi: report.psi, pairs: report.pairs, max_residual: report.max_residual });
    }
    let max_residual = states.iter().map(|s| s.max_residual).fold(0.0, f64::max);
    let passes = max_residual <= tol;
    let result = MiuraResult { source: sig, target: sig.swapped(), tol, skip_dagger: skip, max_residual, passes, states };
    let path = sink.json("miura-check.json", "miura-check", &a, &result)?;
    println!("{} states, largest residual {max_residual:.3e}; wrote {}", result.states.len(), path.display());
    if passes {
        Ok(())
    } else {
        Err(CliError::Failed(format!("residual {max_residual:e} above {tol:e}")))
    }
}
