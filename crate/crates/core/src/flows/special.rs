//! Hand-written finite systems for small signatures. Fields are periodic
//! vectors; `x ± k` denotes a cyclic shift by `k` sites.

use super::generic::FlowSpec;
use super::FlowError;
use crate::lattice_ops::{lower_root_leading, shift_values, BandOperator, ConstLaurent, KernelSolver, Lattice};
use crate::Signature;
use serde::{Deserialize, Serialize};

fn sh(v: &[f64], k: i64) -> Vec<f64> {
    shift_values(v, k)
}

fn zip3(a: &[f64], b: &[f64], c: &[f64], f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).zip(c).map(|((x, y), z)| f(*x, *y, *z)).collect()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `(1 + Λ^{±1})⁻¹ f`.
fn inv_one_plus(f: &[f64], sign: i32) -> Result<Vec<f64>, FlowError> {
    let lat = Lattice::unit(f.len());
    Ok(KernelSolver::new(&ConstLaurent::geometric(2, sign), lat)?.solve(f))
}

/// Toda lattice `L = Λ + b + a Λ⁻¹`: `∂a_n = a_n (b_n − b_{n−1})`, `∂b_n = a_{n+1} − a_n`.
/// Returns `(∂a, ∂b)`.
pub fn toda11(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let bm = sh(b, -1);
    let da = zip3(a, b, &bm, |a, b, bm| a * (b - bm));
    (da, diff(&sh(a, 1), a))
}

/// Fields of `L = Λ² + c Λ + b + a Λ⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bm21Fields {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

/// The `t_{1,0}` flow of `(2,1)`:
/// `∂c_n = a_{n+2} − a_n`, `∂b_n = c_n a_{n+1} − a_n c_{n−1}`, `∂a_n = a_n (b_n − b_{n−1})`.
pub fn bm21_t10(f: &Bm21Fields) -> Bm21Fields {
    let (a, b, c) = (&f.a, &f.b, &f.c);
    Bm21Fields {
        c: diff(&sh(a, 2), a),
        b: zip3(c, &sh(a, 1), &a.iter().zip(sh(c, -1)).map(|(x, y)| x * y).collect::<Vec<_>>(), |c, a1, acm| {
            c * a1 - acm
        }),
        a: zip3(a, b, &sh(b, -1), |a, b, bm| a * (b - bm)),
    }
}

/// The `t_{2,0}` flow of `(2,1)` with `a_0 = (1 + Λ)⁻¹ c`:
/// `∂c_n = b_{n+1} − b_n + c_n (1 − Λ) a_0`, `∂b_n = a_{n+1} − a_n`, `∂a_n = a_n (1 − Λ⁻¹) a_0`.
pub fn bm21_t20(f: &Bm21Fields) -> Result<Bm21Fields, FlowError> {
    let (a, b, c) = (&f.a, &f.b, &f.c);
    let a0 = inv_one_plus(c, 1)?;
    Ok(Bm21Fields {
        c: zip3(&diff(&sh(b, 1), b), c, &diff(&a0, &sh(&a0, 1)), |db, c, d| db + c * d),
        b: diff(&sh(a, 1), a),
        a: zip3(a, &a0, &sh(&a0, -1), |a, x, xm| a * (x - xm)),
    })
}

/// The same flow in the variable `c̄` with `c_n = c̄_{n+1} + c̄_n`; the `c`
/// entry holds `∂c̄_{n+1} + ∂c̄_n = b_{n+1} − b_n + c̄_n² − c̄_{n+1}²`.
pub fn bm21_t20_bar(a: &[f64], b: &[f64], cbar: &[f64]) -> Bm21Fields {
    let c1 = sh(cbar, 1);
    Bm21Fields {
        c: zip3(&diff(&sh(b, 1), b), cbar, &c1, |db, x, x1| db + x * x - x1 * x1),
        b: diff(&sh(a, 1), a),
        a: zip3(a, cbar, &sh(cbar, -1), |a, x, xm| a * (x - xm)),
    }
}

/// Primary flows of `(2,2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bth22Flow {
    T20,
    T10,
    Tm10,
}

/// `(2,2)` systems on `u = [u_1, u_0, u_{−1}, u_{−2}]`, closed with an auxiliary field:
/// `a_0 = (1 + Λ)⁻¹ u_1` for `t_{2,0}` and `a'_{−1}` with `a'_{−1}(x) a'_{−1}(x−1) = u_{−2}`
/// for `t_{−1,0}`. Returns the field derivatives and the auxiliary derivative.
pub fn bth22_rhs(flow: Bth22Flow, u: &[Vec<f64>], aux: Option<&[f64]>) -> Result<(Vec<Vec<f64>>, Option<Vec<f64>>), FlowError> {
    let (u1, u0, um1, um2) = (&u[0], &u[1], &u[2], &u[3]);
    let need = || FlowError::MissingAux { system: format!("(2,2) {flow:?}") };
    match flow {
        Bth22Flow::T20 => {
            let a0 = aux.ok_or_else(need)?;
            let du1 = zip3(&diff(&sh(u0, 1), u0), u1, &diff(a0, &sh(a0, 1)), |d, u, x| d + u * x);
            let du0 = diff(&sh(um1, 1), um1);
            let dum1 = zip3(&diff(&sh(um2, 1), um2), um1, &diff(a0, &sh(a0, -1)), |d, u, x| d + u * x);
            let dum2 = zip3(um2, a0, &sh(a0, -2), |u, x, xm| u * (x - xm));
            // (1 + Λ) ∂a_0 = ∂u_1
            let da0 = inv_one_plus(&du1, 1)?;
            Ok((vec![du1, du0, dum1, dum2], Some(da0)))
        }
        Bth22Flow::T10 => {
            let du1 = diff(&sh(um1, 2), um1);
            let cross = diff(
                &u1.iter().zip(sh(um1, 1)).map(|(x, y)| x * y).collect::<Vec<_>>(),
                &um1.iter().zip(sh(u1, -1)).map(|(x, y)| x * y).collect::<Vec<_>>(),
            );
            let du0: Vec<f64> = diff(&sh(um2, 2), um2).iter().zip(&cross).map(|(x, y)| x + y).collect();
            let dum1 = zip3(
                &diff(
                    &u1.iter().zip(sh(um2, 1)).map(|(x, y)| x * y).collect::<Vec<_>>(),
                    &um2.iter().zip(sh(u1, -2)).map(|(x, y)| x * y).collect::<Vec<_>>(),
                ),
                um1,
                &diff(u0, &sh(u0, -1)),
                |d, u, x| d + u * x,
            );
            let dum2 = zip3(um2, u0, &sh(u0, -2), |u, x, xm| u * (x - xm));
            Ok((vec![du1, du0, dum1, dum2], None))
        }
        Bth22Flow::Tm10 => {
            let ap = aux.ok_or_else(need)?;
            let (du1, du0, dum1, dum2) = lower_flow(Some(u1), u0, um1, ap);
            // ∂ log a' = (1 − Λ⁻¹) w with (1 + Λ⁻¹) w = u_{−1} / a'
            let ratio: Vec<f64> = um1.iter().zip(ap).map(|(u, a)| u / a).collect();
            let w = inv_one_plus(&ratio, -1)?;
            let dap = zip3(ap, &w, &sh(&w, -1), |a, x, xm| a * (x - xm));
            Ok((vec![du1.expect("u_1 given"), du0, dum1, dum2], Some(dap)))
        }
    }
}

/// `−[a' Λ⁻¹, L]` on the fields of `L`, for `M = 2` with `N ∈ {1, 2}`.
#[allow(clippy::type_complexity)]
fn lower_flow(u1: Option<&Vec<f64>>, u0: &[f64], um1: &[f64], ap: &[f64]) -> (Option<Vec<f64>>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let apm = sh(ap, -1);
    let dum1 = zip3(ap, u0, &sh(u0, -1), |a, x, xm| a * (x - xm));
    let dum2 = diff(
        &um1.iter().zip(&apm).map(|(u, a)| u * a).collect::<Vec<_>>(),
        &ap.iter().zip(sh(um1, -1)).map(|(a, u)| a * u).collect::<Vec<_>>(),
    );
    match u1 {
        Some(u1) => {
            let du1 = diff(&sh(ap, 2), ap);
            let du0 = diff(
                &u1.iter().zip(sh(ap, 1)).map(|(u, a)| u * a).collect::<Vec<_>>(),
                &ap.iter().zip(sh(u1, -1)).map(|(a, u)| a * u).collect::<Vec<_>>(),
            );
            (Some(du1), du0, dum1, dum2)
        }
        None => (None, diff(&sh(ap, 1), ap), dum1, dum2),
    }
}

/// Primary flows of `(1,2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bth12Flow {
    T10,
    Tm10,
}

/// `(1,2)` systems on `u = [u_0, u_{−1}, u_{−2}]`; `t_{−1,0}` uses
/// `a' = exp((1 + Λ⁻¹)⁻¹ log u_{−2})` and needs `u_{−2} > 0`.
pub fn bth12_rhs(flow: Bth12Flow, u: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FlowError> {
    let (u0, um1, um2) = (&u[0], &u[1], &u[2]);
    match flow {
        Bth12Flow::T10 => {
            let du0 = diff(&sh(um1, 1), um1);
            let dum1 = zip3(&diff(&sh(um2, 1), um2), um1, &diff(u0, &sh(u0, -1)), |d, u, x| d + u * x);
            let dum2 = zip3(um2, u0, &sh(u0, -2), |u, x, xm| u * (x - xm));
            Ok(vec![du0, dum1, dum2])
        }
        Bth12Flow::Tm10 => {
            let ap = lower_leading(um2, Signature::new(1, 2))?;
            let (_, du0, dum1, dum2) = lower_flow(None, u0, um1, &ap);
            Ok(vec![du0, dum1, dum2])
        }
    }
}

/// `exp((1 + Λ⁻¹ + … + Λ^{−(M−1)})⁻¹ log u_{−M})`, checking positivity.
fn lower_leading(um: &[f64], sig: Signature) -> Result<Vec<f64>, FlowError> {
    if let Some((site, &value)) = um.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(FlowError::NonPositive { field: format!("u_{}", -(sig.m as i32)), site, value });
    }
    let lat = Lattice::unit(um.len());
    let l = BandOperator::lax(lat, sig, [(-(sig.m as i32), um.to_vec())])?;
    Ok(lower_root_leading(&l, sig)?)
}

/// The hand-written systems, as vector fields on a Lax operator plus an
/// optional auxiliary field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Special {
    Toda11,
    Bm21T10,
    Bm21T20,
    Bth22(Bth22Flow),
    Bth12(Bth12Flow),
}

impl Special {
    pub const ALL: [Special; 8] = [
        Special::Toda11,
        Special::Bm21T10,
        Special::Bm21T20,
        Special::Bth22(Bth22Flow::T20),
        Special::Bth22(Bth22Flow::T10),
        Special::Bth22(Bth22Flow::Tm10),
        Special::Bth12(Bth12Flow::T10),
        Special::Bth12(Bth12Flow::Tm10),
    ];

    pub fn sig(self) -> Signature {
        match self {
            Special::Toda11 => Signature::new(1, 1),
            Special::Bm21T10 | Special::Bm21T20 => Signature::new(2, 1),
            Special::Bth22(_) => Signature::new(2, 2),
            Special::Bth12(_) => Signature::new(1, 2),
        }
    }

    pub fn flow(self) -> FlowSpec {
        let gamma = match self {
            Special::Toda11 | Special::Bm21T10 => 1,
            Special::Bm21T20 => 2,
            Special::Bth22(Bth22Flow::T20) => 2,
            Special::Bth22(Bth22Flow::T10) | Special::Bth12(Bth12Flow::T10) => 1,
            Special::Bth22(Bth22Flow::Tm10) | Special::Bth12(Bth12Flow::Tm10) => -1,
        };
        FlowSpec::new(gamma, 0)
    }

    pub fn name(self) -> String {
        format!("{} {}", self.sig(), self.flow())
    }

    /// Whether the flow inverts `1 + Λ^{±1}`, which is singular on even lattices.
    pub fn is_nonlocal(self) -> bool {
        matches!(self, Special::Bm21T20 | Special::Bth22(Bth22Flow::T20 | Bth22Flow::Tm10) | Special::Bth12(Bth12Flow::Tm10))
    }

    pub fn needs_aux(self) -> bool {
        matches!(self, Special::Bth22(Bth22Flow::T20 | Bth22Flow::Tm10))
    }

    fn check_sig(self, l: &BandOperator<f64>) -> Result<(), FlowError> {
        let sig = self.sig();
        let (lo, hi) = (l.min_offset().unwrap_or(0), l.max_offset().unwrap_or(0));
        if hi != sig.n as i32 || lo < -(sig.m as i32) {
            let found = Signature::new(hi.max(1) as u32, (-lo).max(1) as u32);
            return Err(FlowError::WrongSignature { system: self.name(), expected: sig, found });
        }
        Ok(())
    }

    fn fields(self, l: &BandOperator<f64>) -> Vec<Vec<f64>> {
        let sig = self.sig();
        (-(sig.m as i32)..sig.n as i32).rev().map(|d| l.diagonal_or_zero(d)).collect()
    }

    /// Consistent auxiliary field for `l`, if the system uses one.
    pub fn init_aux(self, l: &BandOperator<f64>) -> Result<Option<Vec<f64>>, FlowError> {
        self.check_sig(l)?;
        match self {
            Special::Bth22(Bth22Flow::T20) => Ok(Some(inv_one_plus(&l.diagonal_or_zero(1), 1)?)),
            Special::Bth22(Bth22Flow::Tm10) => Ok(Some(lower_leading(&l.diagonal_or_zero(-2), self.sig())?)),
            _ => Ok(None),
        }
    }

    /// `max |(1 + Λ) a_0 − u_1|` or `max |a'(x) a'(x−1) − u_{−2}|`.
    pub fn aux_defect(self, l: &BandOperator<f64>, aux: &[f64]) -> Option<f64> {
        let (target, recon): (Vec<f64>, Vec<f64>) = match self {
            Special::Bth22(Bth22Flow::T20) => {
                (l.diagonal_or_zero(1), aux.iter().zip(sh(aux, 1)).map(|(x, y)| x + y).collect())
            }
            Special::Bth22(Bth22Flow::Tm10) => {
                (l.diagonal_or_zero(-2), aux.iter().zip(sh(aux, -1)).map(|(x, y)| x * y).collect())
            }
            _ => return None,
        };
        Some(target.iter().zip(&recon).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Field derivatives as a band operator on offsets `−M..=N−1`, plus the auxiliary derivative.
    pub fn rhs(self, l: &BandOperator<f64>, aux: Option<&[f64]>) -> Result<(BandOperator<f64>, Option<Vec<f64>>), FlowError> {
        self.check_sig(l)?;
        let sig = self.sig();
        let u = self.fields(l);
        let (du, daux) = match self {
            Special::Toda11 => {
                let (da, db) = toda11(&u[1], &u[0]);
                (vec![db, da], None)
            }
            Special::Bm21T10 | Special::Bm21T20 => {
                let f = Bm21Fields { c: u[0].clone(), b: u[1].clone(), a: u[2].clone() };
                let d = if self == Special::Bm21T10 { bm21_t10(&f) } else { bm21_t20(&f)? };
                (vec![d.c, d.b, d.a], None)
            }
            Special::Bth22(flow) => bth22_rhs(flow, &u, aux)?,
            Special::Bth12(flow) => (bth12_rhs(flow, &u)?, None),
        };
        let offsets = (-(sig.m as i32)..sig.n as i32).rev();
        Ok((BandOperator::from_diagonals(l.lattice(), offsets.zip(du))?, daux))
    }
}
