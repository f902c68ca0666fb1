use super::band::BandOperator;
use super::field::{Lattice, LatticeField};
use super::scalar::Scalar;
use super::LatticeError;
use std::collections::BTreeMap;
use std::fmt;

/// LU factorisation with partial pivoting of a dense square matrix.
#[derive(Clone, Debug)]
pub struct DenseLu<S> {
    lu: Vec<Vec<S>>,
    perm: Vec<usize>,
}

/// Returned when elimination meets a negligible pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("matrix is singular at elimination step {step}")]
pub struct SingularMatrix {
    pub step: usize,
}

impl<S: Scalar> DenseLu<S> {
    pub fn factor(mut a: Vec<Vec<S>>) -> Result<Self, SingularMatrix> {
        let n = a.len();
        let scale = a.iter().flat_map(|r| r.iter().map(|v| v.abs_f64())).fold(0.0, f64::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_mag = -1.0;
            for (i, row) in a.iter().enumerate().skip(k) {
                let mag = row[k].abs_f64();
                let usable = !row[k].is_zero();
                if usable && mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag < 0.0 || a[best][k].negligible(scale) {
                return Err(SingularMatrix { step: k });
            }
            a.swap(k, best);
            perm.swap(k, best);
            let pivot = a[k][k].clone();
            for i in (k + 1)..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone() / pivot.clone();
                for j in (k + 1)..n {
                    let t = f.clone() * a[k][j].clone();
                    a[i][j] = a[i][j].clone() - t;
                }
                a[i][k] = f;
            }
        }
        Ok(DenseLu { lu: a, perm })
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.lu.len();
        let mut y: Vec<S> = self.perm.iter().map(|&i| b[i].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[i][j].clone() * y[j].clone();
                y[i] = y[i].clone() - t;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = self.lu[i][j].clone() * y[j].clone();
                y[i] = y[i].clone() - t;
            }
            y[i] = y[i].clone() / self.lu[i][i].clone();
        }
        y
    }
}

/// Solves `a x = b` densely.
pub fn dense_solve<S: Scalar>(a: Vec<Vec<S>>, b: &[S]) -> Result<Vec<S>, SingularMatrix> {
    Ok(DenseLu::factor(a)?.solve(b))
}

/// Dense matrix product, used as a test oracle.
pub fn dense_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    let n = a.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).fold(S::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

/// A Laurent polynomial in `Λ` with constant coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstLaurent<S> {
    pub coeffs: BTreeMap<i32, S>,
}

impl<S: Scalar> ConstLaurent<S> {
    pub fn new(coeffs: impl IntoIterator<Item = (i32, S)>) -> Self {
        let mut map = BTreeMap::new();
        for (d, c) in coeffs {
            let e = map.remove(&d).unwrap_or_else(S::zero) + c;
            if !e.is_zero() {
                map.insert(d, e);
            }
        }
        ConstLaurent { coeffs: map }
    }

    pub fn one() -> Self {
        Self::new([(0, S::one())])
    }

    /// `Σ_{r=0}^{k−1} Λ^{sign·r}`.
    pub fn geometric(k: u32, sign: i32) -> Self {
        Self::new((0..k as i32).map(|r| (sign * r, S::one())))
    }

    pub fn to_operator(&self, lattice: Lattice) -> BandOperator<S> {
        BandOperator::from_diagonals(lattice, self.coeffs.iter().map(|(d, c)| (*d, vec![c.clone(); lattice.p])))
            .expect("lengths match the lattice")
    }

    /// Modes `k` where the symbol `Σ c_d ω^{kd}`, `ω = e^{2πi/p}`, vanishes.
    pub fn vanishing_modes(&self, p: usize) -> Vec<usize> {
        let scale: f64 = self.coeffs.values().map(|c| c.abs_f64()).sum::<f64>().max(1.0);
        (0..p)
            .filter(|&k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (d, c) in &self.coeffs {
                    let th = 2.0 * std::f64::consts::PI * (k as f64) * (*d as f64) / p as f64;
                    re += c.to_f64() * th.cos();
                    im += c.to_f64() * th.sin();
                }
                re.hypot(im) < 1e-9 * scale
            })
            .collect()
    }
}

impl<S: Scalar> fmt::Display for ConstLaurent<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(d, c)| {
                let base = match d {
                    0 => String::new(),
                    1 => "Λ".to_string(),
                    _ => format!("Λ^{d}"),
                };
                match (c.to_f64(), base.is_empty()) {
                    (v, true) => format!("{v}"),
                    (v, false) if v == 1.0 => base,
                    (v, false) => format!("{v}{base}"),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Factorised constant-coefficient kernel, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct KernelSolver<S> {
    lattice: Lattice,
    lu: DenseLu<S>,
}

impl<S: Scalar> KernelSolver<S> {
    pub fn new(kernel: &ConstLaurent<S>, lattice: Lattice) -> Result<Self, LatticeError> {
        let dense = kernel.to_operator(lattice).to_dense();
        match DenseLu::factor(dense) {
            Ok(lu) => Ok(KernelSolver { lattice, lu }),
            Err(_) => Err(LatticeError::SingularKernel {
                kernel: kernel.to_string(),
                p: lattice.p,
                modes: kernel.vanishing_modes(lattice.p),
            }),
        }
    }

    pub fn solve(&self, f: &[S]) -> Vec<S> {
        assert_eq!(f.len(), self.lattice.p, "right-hand side length must equal the lattice size");
        self.lu.solve(f)
    }
}

/// `g` with `p(Λ) g = f`.
pub fn nonlocal_solve<S: Scalar>(kernel: &ConstLaurent<S>, f: &LatticeField<S>) -> Result<LatticeField<S>, LatticeError> {
    let solver = KernelSolver::new(kernel, f.lattice)?;
    Ok(LatticeField { lattice: f.lattice, values: solver.solve(&f.values) })
}

/// `g` with `A g = f` for a variable-coefficient operator.
pub fn band_solve<S: Scalar>(a: &BandOperator<S>, f: &[S]) -> Result<Vec<S>, LatticeError> {
    dense_solve(a.to_dense(), f).map_err(|e| LatticeError::SingularOperator { step: e.step })
}
