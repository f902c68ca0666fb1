//! Gauge transformations `L ↦ Φ⁻¹ L Φ` and the correspondence between the
//! `(N,M)` and `(M,N)` hierarchies through `L ↦ (Ψ⁻¹ L Ψ)†`.

#[cfg(test)]
mod tests;

use crate::flows::{bth12_rhs, lax_rhs_generic, Bth12Flow, FlowError, FlowSpec};
use crate::lattice_ops::{shift_values, BandOperator, ConstLaurent, LatticeError};
use crate::Signature;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MiuraError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("{field} must be positive, found {value} at site {site}")]
    NonPositive { field: String, site: usize, value: f64 },
    #[error("operator is not a monic ({sig}) Lax operator")]
    NotLax { sig: Signature },
    #[error("product of u_{{-M}} is {product}, the gauge can only normalise it to 1 when the product is 1")]
    NonUnitProduct { product: f64 },
}

/// A strictly positive lattice field used as a multiplicative gauge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeField {
    phi: Vec<f64>,
}

impl GaugeField {
    pub fn new(phi: Vec<f64>) -> Result<Self, MiuraError> {
        check_positive("phi", &phi)?;
        Ok(GaugeField { phi })
    }

    pub fn from_log(log: &[f64]) -> Self {
        GaugeField { phi: log.iter().map(|x| x.exp()).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    pub fn stats(&self) -> GaugeStats {
        let p = self.phi.len() as f64;
        GaugeStats {
            min: self.phi.iter().copied().fold(f64::INFINITY, f64::min),
            max: self.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            geometric_mean: (self.phi.iter().map(|x| x.ln()).sum::<f64>() / p).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeStats {
    pub min: f64,
    pub max: f64,
    pub geometric_mean: f64,
}

fn check_positive(field: &str, v: &[f64]) -> Result<(), MiuraError> {
    match v.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        Some((site, &value)) => Err(MiuraError::NonPositive { field: field.into(), site, value }),
        None => Ok(()),
    }
}

/// `Φ⁻¹ L Φ`: `c̃_d(x) = φ(x)⁻¹ c_d(x) φ(x + d)`.
pub fn gauge_conjugate(l: &BandOperator<f64>, phi: &GaugeField) -> Result<BandOperator<f64>, MiuraError> {
    let p = l.p();
    if phi.phi.len() != p {
        return Err(LatticeError::LengthMismatch { expected: p, found: phi.phi.len() }.into());
    }
    let diags = l.diagonals().map(|(d, c)| {
        let ahead = shift_values(&phi.phi, d as i64);
        let v = (0..p).map(|x| c[x] * ahead[x] / phi.phi[x]).collect();
        (d, v)
    });
    Ok(BandOperator::from_diagonals(l.lattice(), diags.collect::<Vec<_>>())?)
}

/// Exponent used for `Ψ = exp((1 − Λ^{−M})⁻¹ ·)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiForm {
    /// `(1 − Λ^{−M})⁻¹ log u_{−M}`: normalises the lowest coefficient.
    #[default]
    Log,
    /// `(1 − Λ^{−M})⁻¹ u_{−M}`, kept for comparison.
    Literal,
}

/// `f` with `f(x) − f(x − m) = g(x) − ḡ` and `f̄ = 0`, where bars are means.
/// Needs `gcd(m, P) = 1`, so that the only kernel mode is the constant.
pub fn cyclic_difference_inverse(g: &[f64], m: usize) -> Result<Vec<f64>, MiuraError> {
    let p = g.len();
    let kernel = ConstLaurent::new([(0, 1.0), (-(m as i32), -1.0)]);
    let modes = kernel.vanishing_modes(p);
    if modes.len() > 1 {
        return Err(LatticeError::SingularKernel { kernel: kernel.to_string(), p, modes }.into());
    }
    let mean = g.iter().sum::<f64>() / p as f64;
    let mut f = vec![0.0; p];
    let mut x = 0;
    for _ in 1..p {
        let next = (x + m) % p;
        f[next] = f[x] + g[next] - mean;
        x = next;
    }
    let fm = f.iter().sum::<f64>() / p as f64;
    Ok(f.into_iter().map(|v| v - fm).collect())
}

/// Lowest coefficient `u_{−M}` of a monic `(N,M)` operator.
fn lowest(l: &BandOperator<f64>, sig: Signature) -> Result<Vec<f64>, MiuraError> {
    let (n, m) = (sig.n as i32, sig.m as i32);
    let top_is_one = l.diagonal(n).is_some_and(|v| v.iter().all(|x| *x == 1.0));
    if !top_is_one || l.max_offset() != Some(n) || l.min_offset().is_some_and(|d| d < -m) {
        return Err(MiuraError::NotLax { sig });
    }
    let um = l.diagonal_or_zero(-m);
    check_positive(&format!("u_{}", -m), &um)?;
    Ok(um)
}

/// `Ψ = exp((1 − Λ^{−M})⁻¹ log u_{−M})` (or the literal exponent), with
/// geometric mean 1. In the log form `Ψ⁻¹ L Ψ` has lowest coefficient equal to
/// the geometric mean of `u_{−M}` at every site.
pub fn psi_for_signature(l: &BandOperator<f64>, sig: Signature, form: PsiForm) -> Result<GaugeField, MiuraError> {
    let um = lowest(l, sig)?;
    let g: Vec<f64> = match form {
        PsiForm::Log => um.iter().map(|x| x.ln()).collect(),
        PsiForm::Literal => um,
    };
    Ok(GaugeField::from_log(&cyclic_difference_inverse(&g, sig.m as usize)?))
}

/// `Π_x u_{−M}(x)`, which every gauge leaves unchanged.
pub fn lowest_product(l: &BandOperator<f64>, sig: Signature) -> Result<f64, MiuraError> {
    Ok(lowest(l, sig)?.iter().map(|x| x.ln()).sum::<f64>().exp())
}

/// Divides `u_{−M}` by its geometric mean so that its product is 1.
pub fn normalize_lowest(l: &BandOperator<f64>, sig: Signature) -> Result<BandOperator<f64>, MiuraError> {
    let um = lowest(l, sig)?;
    let gm = (um.iter().map(|x| x.ln()).sum::<f64>() / um.len() as f64).exp();
    let mut out = l.clone();
    out.set_diagonal(-(sig.m as i32), um.iter().map(|x| x / gm).collect());
    Ok(out)
}

const UNIT_PRODUCT_TOL: f64 = 1e-12;

/// `(Ψ⁻¹ L Ψ)†` for a monic `(N,M)` operator whose `u_{−M}` has product 1:
/// a monic `(M,N)` operator with `ũ_j(x) = u_{−j}(x + j) Ψ(x) / Ψ(x + j)`.
pub fn nm_to_mn(l: &BandOperator<f64>, sig: Signature) -> Result<BandOperator<f64>, MiuraError> {
    let psi = psi_for_signature(l, sig, PsiForm::Log)?;
    let mean_log = lowest(l, sig)?.iter().map(|x| x.ln()).sum::<f64>() / l.p() as f64;
    if mean_log.abs() > UNIT_PRODUCT_TOL {
        return Err(MiuraError::NonUnitProduct { product: (mean_log * l.p() as f64).exp() });
    }
    let mut out = gauge_conjugate(l, &psi)?.dagger();
    // the leading coefficient is 1 up to rounding; store it exactly
    out.set_diagonal(sig.m as i32, vec![1.0; l.p()]);
    Ok(out)
}

/// The flow of the `(M,N)` hierarchy that `t_{γ,n}` becomes under [`nm_to_mn`].
pub fn mapped_flow(flow: FlowSpec) -> FlowSpec {
    FlowSpec::new(1 - flow.gamma, flow.n)
}

/// `max |d/dt nm_to_mn(L) − RHS_{(M,N)}(nm_to_mn(L))|` for the flow `t_{γ,n}`
/// and its image, with the time derivative of `Ψ` taken along the flow.
pub fn theorem_residual(l: &BandOperator<f64>, sig: Signature, flow: FlowSpec) -> Result<f64, MiuraError> {
    theorem_residual_with(l, sig, flow, false)
}

/// As [`theorem_residual`]; `skip_dagger` drops the anti-involution, as a negative control.
pub fn theorem_residual_with(l: &BandOperator<f64>, sig: Signature, flow: FlowSpec, skip_dagger: bool) -> Result<f64, MiuraError> {
    let m = sig.m as i32;
    let psi = psi_for_signature(l, sig, PsiForm::Log)?;
    let target = nm_to_mn(l, sig)?;
    let dl = lax_rhs_generic(l, flow, sig, flow.depth(sig))?.rhs;
    let um = lowest(l, sig)?;
    let dlog: Vec<f64> = dl.diagonal_or_zero(-m).iter().zip(&um).map(|(d, u)| d / u).collect();
    let dlog_psi = cyclic_difference_inverse(&dlog, sig.m as usize)?;
    let conj = gauge_conjugate(l, &psi)?;
    let d_diag = BandOperator::from_diagonals(l.lattice(), [(0, dlog_psi)])?;
    let d_conj = gauge_conjugate(&dl, &psi)?.op_add(&conj.commutator(&d_diag)?)?;
    let mapped = if skip_dagger { d_conj } else { d_conj.dagger() };
    let msig = sig.swapped();
    let image = mapped_flow(flow);
    let expected = lax_rhs_generic(&target, image, msig, image.depth(msig))?.rhs;
    Ok(mapped.op_sub(&expected)?.max_abs())
}

/// `v_j(x) = u_{−j}(x + j)`, `j = 0, 1, 2`: the `(1,2)` fields `[u_0, u_{−1}, u_{−2}]`
/// read off `L†`.
pub fn dagger_fields_12(u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..3).map(|j| shift_values(&u[j], j as i64)).collect()
}

/// `t_{1,0}` of `L̂ = v_2 Λ² + v_1 Λ + v_0 + Λ⁻¹` on `[v_0, v_1, v_2]`.
pub fn hat21_t10(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (v0, v1, v2) = (&v[0], &v[1], &v[2]);
    let p = v0.len();
    let (v0p1, v0p2, v1m, v2m) = (shift_values(v0, 1), shift_values(v0, 2), shift_values(v1, -1), shift_values(v2, -1));
    vec![
        (0..p).map(|x| v1[x] - v1m[x]).collect(),
        (0..p).map(|x| v2[x] - v2m[x] + v1[x] * (v0p1[x] - v0[x])).collect(),
        (0..p).map(|x| v2[x] * (v0p2[x] - v0[x])).collect(),
    ]
}

/// `t_{2,0}` of `L̂` with `w = exp((1 + Λ)⁻¹ log v_2)`.
pub fn hat21_t20(v: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, MiuraError> {
    let (v0, v1, v2) = (&v[0], &v[1], &v[2]);
    check_positive("v_2", v2)?;
    let p = v0.len();
    let lat = crate::lattice_ops::Lattice::unit(p);
    let logs: Vec<f64> = v2.iter().map(|x| x.ln()).collect();
    let w: Vec<f64> = crate::lattice_ops::KernelSolver::new(&ConstLaurent::geometric(2, 1), lat)?
        .solve(&logs)
        .into_iter()
        .map(f64::exp)
        .collect();
    let (wm, wp, v0p, v1p) = (shift_values(&w, -1), shift_values(&w, 1), shift_values(v0, 1), shift_values(v1, 1));
    Ok(vec![
        (0..p).map(|x| w[x] - wm[x]).collect(),
        (0..p).map(|x| w[x] * (v0p[x] - v0[x])).collect(),
        (0..p).map(|x| v1p[x] * w[x] - wp[x] * v1[x]).collect(),
    ])
}

/// Residuals for one pair of corresponding flows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResidual {
    pub source: String,
    pub target: String,
    /// Against the gauge-fixed `(2,1)` systems on `v_j(x) = u_{−j}(x + j)`.
    pub displayed: f64,
    /// Against the generic `(2,1)` commutator on `nm_to_mn(L)`.
    pub theorem: f64,
}

/// Per-flow residual norms and statistics of `Ψ` for one `(1,2)` state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub p: usize,
    pub pairs: Vec<PairResidual>,
    pub psi: GaugeStats,
    pub max_residual: f64,
}

/// Compares both `(1,2)` primary flows with their `(2,1)` images. `l` must be a
/// monic `(1,2)` operator with positive `u_{−2}` of product 1.
pub fn equivalence_residual(l: &BandOperator<f64>) -> Result<EquivalenceReport, MiuraError> {
    equivalence_residual_with(l, false)
}

/// As [`equivalence_residual`]; `skip_dagger` drops the anti-involution from
/// both maps, as a negative control.
pub fn equivalence_residual_with(l: &BandOperator<f64>, skip_dagger: bool) -> Result<EquivalenceReport, MiuraError> {
    let sig = Signature::new(1, 2);
    lowest(l, sig)?;
    let u: Vec<Vec<f64>> = [0, -1, -2].into_iter().map(|d| l.diagonal_or_zero(d)).collect();
    let to_v = |u: &[Vec<f64>]| if skip_dagger { u.to_vec() } else { dagger_fields_12(u) };
    let v = to_v(&u);
    let pairs = [(Bth12Flow::T10, FlowSpec::new(1, 0)), (Bth12Flow::Tm10, FlowSpec::new(-1, 0))]
        .into_iter()
        .map(|(flow12, spec)| -> Result<PairResidual, MiuraError> {
            let mapped = to_v(&bth12_rhs(flow12, &u)?);
            let hat = match flow12 {
                Bth12Flow::T10 => hat21_t10(&v),
                Bth12Flow::Tm10 => hat21_t20(&v)?,
            };
            let displayed = mapped
                .iter()
                .zip(&hat)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max);
            let theorem = theorem_residual_with(l, sig, spec, skip_dagger)?;
            Ok(PairResidual {
                source: format!("{sig} {spec}"),
                target: format!("{} {}", sig.swapped(), mapped_flow(spec)),
                displayed,
                theorem,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max_residual = pairs.iter().map(|r| r.displayed.max(r.theorem)).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        p: l.p(),
        pairs,
        psi: psi_for_signature(l, sig, PsiForm::Log)?.stats(),
        max_residual,
    })
}
