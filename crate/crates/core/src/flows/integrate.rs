use super::generic::{lax_rhs_generic, FlowSpec};
use super::special::Special;
use super::FlowError;
use crate::lattice_ops::BandOperator;
use crate::Signature;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// A Lax operator together with the auxiliary field some systems carry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub l: BandOperator<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<Vec<f64>>,
}

impl FlowState {
    fn axpy(&self, c: f64, d: &FlowState) -> Result<FlowState, FlowError> {
        let l = self.l.op_add(&d.l.scale(&c))?;
        let aux = match (&self.aux, &d.aux) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x + c * y).collect()),
            (a, _) => a.clone(),
        };
        Ok(FlowState { l, aux })
    }

    /// `max |self − other|` over coefficients and auxiliary values.
    pub fn distance(&self, other: &FlowState) -> f64 {
        let l = (&self.l - &other.l).max_abs();
        let aux = match (&self.aux, &other.aux) {
            (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
            _ => 0.0,
        };
        l.max(aux)
    }

    fn is_finite(&self) -> bool {
        self.l.diagonals().all(|(_, v)| v.iter().all(|x| x.is_finite()))
            && self.aux.as_ref().is_none_or(|a| a.iter().all(|x| x.is_finite()))
    }
}

/// What drives the evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    /// The commutator with the projected root power, at the given root depth.
    Generic { sig: Signature, flow: FlowSpec, depth: u32 },
    Special(Special),
}

impl System {
    pub fn generic(sig: Signature, flow: FlowSpec) -> System {
        System::Generic { sig, flow, depth: flow.depth(sig) }
    }

    pub fn sig(&self) -> Signature {
        match self {
            System::Generic { sig, .. } => *sig,
            System::Special(s) => s.sig(),
        }
    }

    pub fn flow(&self) -> FlowSpec {
        match self {
            System::Generic { flow, .. } => *flow,
            System::Special(s) => s.flow(),
        }
    }

    /// Initial state with a consistent auxiliary field.
    pub fn prepare(&self, l: BandOperator<f64>) -> Result<FlowState, FlowError> {
        let aux = match self {
            System::Special(s) => s.init_aux(&l)?,
            System::Generic { .. } => None,
        };
        Ok(FlowState { l, aux })
    }

    /// Derivative of the state and the band leakage of the generic commutator.
    pub fn rhs(&self, state: &FlowState) -> Result<(FlowState, f64), FlowError> {
        match self {
            System::Generic { sig, flow, depth } => {
                let r = lax_rhs_generic(&state.l, *flow, *sig, *depth)?;
                Ok((FlowState { l: r.rhs, aux: None }, r.leakage))
            }
            System::Special(s) => {
                let (l, aux) = s.rhs(&state.l, state.aux.as_deref())?;
                Ok((FlowState { l, aux }, 0.0))
            }
        }
    }

    pub fn aux_defect(&self, state: &FlowState) -> Option<f64> {
        match (self, &state.aux) {
            (System::Special(s), Some(a)) => s.aux_defect(&state.l, a),
            _ => None,
        }
    }
}

/// One classical RK4 step; returns the new state and the largest leakage seen.
pub fn rk4_step(system: &System, state: &FlowState, dt: f64) -> Result<(FlowState, f64), FlowError> {
    let (k1, l1) = system.rhs(state)?;
    let (k2, l2) = system.rhs(&state.axpy(dt / 2.0, &k1)?)?;
    let (k3, l3) = system.rhs(&state.axpy(dt / 2.0, &k2)?)?;
    let (k4, l4) = system.rhs(&state.axpy(dt, &k3)?)?;
    let next = state
        .axpy(dt / 6.0, &k1)?
        .axpy(dt / 3.0, &k2)?
        .axpy(dt / 3.0, &k3)?
        .axpy(dt / 6.0, &k4)?;
    Ok((next, l1.max(l2).max(l3).max(l4)))
}

/// `tr L^k`, `k = 1, 2, 3`, with the cyclic trace `Σ_x c_0(x)`.
pub fn traces(l: &BandOperator<f64>) -> [f64; 3] {
    let l2 = l * l;
    let l3 = &l2 * l;
    [l.trace(), l2.trace(), l3.trace()]
}

/// Tolerances checked after every step; `None` disables a check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monitors {
    /// Bound on `|tr L^k(t) − tr L^k(0)|`.
    pub trace_drift: Option<f64>,
    pub leakage: Option<f64>,
    pub aux_defect: Option<f64>,
}

impl Default for Monitors {
    fn default() -> Self {
        Monitors { trace_drift: None, leakage: Some(1e-8), aux_defect: Some(1e-8) }
    }
}

/// Recorded states with per-record monitor values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FlowState>,
    pub traces: Vec<[f64; 3]>,
    /// Largest leakage over the steps since the previous record.
    pub leakage: Vec<f64>,
    pub aux_defect: Vec<Option<f64>>,
}

impl Trajectory {
    /// `max_t |tr L^k(t) − tr L^k(0)|` for `k = 1, 2, 3`.
    pub fn trace_drift(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for t in &self.traces {
            for k in 0..3 {
                out[k] = f64::max(out[k], (t[k] - self.traces[0][k]).abs());
            }
        }
        out
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_aux_defect(&self) -> Option<f64> {
        self.aux_defect.iter().flatten().copied().reduce(f64::max)
    }

    pub fn last(&self) -> &FlowState {
        self.states.last().expect("a trajectory holds its initial state")
    }

    /// One row per record: time, every coefficient `u_d(x)` from the top
    /// offset down, the auxiliary field, then the monitor columns.
    pub fn to_csv(&self) -> String {
        let first = &self.states[0];
        let offsets: Vec<i32> = {
            let mut o: Vec<i32> = self.states.iter().flat_map(|s| s.l.offsets().collect::<Vec<_>>()).collect();
            o.sort_unstable_by(|a, b| b.cmp(a));
            o.dedup();
            o
        };
        let p = first.l.p();
        let mut out = String::from("t");
        for d in &offsets {
            for x in 0..p {
                let _ = write!(out, ",u[{d}][{x}]");
            }
        }
        if first.aux.is_some() {
            for x in 0..p {
                let _ = write!(out, ",aux[{x}]");
            }
        }
        out.push_str(",tr1,tr2,tr3,leakage,aux_defect\n");
        for (i, s) in self.states.iter().enumerate() {
            let _ = write!(out, "{:e}", self.times[i]);
            for d in &offsets {
                for v in s.l.diagonal_or_zero(*d) {
                    let _ = write!(out, ",{v:e}");
                }
            }
            if let Some(a) = &s.aux {
                for v in a {
                    let _ = write!(out, ",{v:e}");
                }
            }
            let [t1, t2, t3] = self.traces[i];
            let aux = self.aux_defect[i].map(|v| format!("{v:e}")).unwrap_or_default();
            let _ = writeln!(out, ",{t1:e},{t2:e},{t3:e},{:e},{aux}", self.leakage[i]);
        }
        out
    }
}

fn breach(name: &str, step: usize, value: f64, tol: Option<f64>) -> Result<(), FlowError> {
    match tol {
        Some(tol) if !(value <= tol) => Err(FlowError::MonitorBreach { name: name.into(), step, value, tol }),
        _ => Ok(()),
    }
}

/// Fixed-step RK4 from `l0` with a freshly initialised auxiliary field,
/// recording every `record_every` steps and the final state.
pub fn integrate(
    system: &System,
    l0: BandOperator<f64>,
    dt: f64,
    steps: usize,
    monitors: &Monitors,
    record_every: usize,
) -> Result<Trajectory, FlowError> {
    integrate_state(system, system.prepare(l0)?, dt, steps, monitors, record_every)
}

/// As [`integrate`], from a state whose auxiliary field is supplied by the caller.
pub fn integrate_state(
    system: &System,
    mut state: FlowState,
    dt: f64,
    steps: usize,
    monitors: &Monitors,
    record_every: usize,
) -> Result<Trajectory, FlowError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::BadStep(dt));
    }
    system.rhs(&state)?;
    let defect0 = system.aux_defect(&state);
    if let (Some(d), Some(tol)) = (defect0, monitors.aux_defect) {
        if !(d <= tol) {
            return Err(FlowError::AuxInconsistent { defect: d, tol });
        }
    }
    let tr0 = traces(&state.l);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![state.clone()],
        traces: vec![tr0],
        leakage: vec![0.0],
        aux_defect: vec![defect0],
    };
    let every = record_every.max(1);
    let mut leak_since = 0.0f64;
    for step in 1..=steps {
        let (next, leak) = rk4_step(system, &state, dt)?;
        if !next.is_finite() {
            return Err(FlowError::NonFinite { step });
        }
        state = next;
        leak_since = leak_since.max(leak);
        breach("leakage", step, leak, monitors.leakage)?;
        let defect = system.aux_defect(&state);
        if let Some(d) = defect {
            breach("aux_defect", step, d, monitors.aux_defect)?;
        }
        let tr = traces(&state.l);
        if monitors.trace_drift.is_some() {
            let drift = (0..3).map(|k| (tr[k] - tr0[k]).abs()).fold(0.0, f64::max);
            breach("trace_drift", step, drift, monitors.trace_drift)?;
        }
        if step % every == 0 || step == steps {
            traj.times.push(step as f64 * dt);
            traj.states.push(state.clone());
            traj.traces.push(tr);
            traj.leakage.push(leak_since);
            traj.aux_defect.push(defect);
            leak_since = 0.0;
        }
    }
    Ok(traj)
}

/// Endpoint differences under step halving and their ratio (16 for a fourth-order method).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub dt: f64,
    pub coarse_gap: f64,
    pub fine_gap: f64,
    pub ratio: f64,
}

/// Integrates to `t_end` with `dt`, `dt/2`, `dt/4` and compares endpoints.
pub fn richardson_ratio(system: &System, l0: &BandOperator<f64>, dt: f64, t_end: f64) -> Result<Richardson, FlowError> {
    let run = |h: f64| -> Result<FlowState, FlowError> {
        let steps = (t_end / h).round() as usize;
        let monitors = Monitors { trace_drift: None, leakage: None, aux_defect: None };
        Ok(integrate(system, l0.clone(), h, steps, &monitors, steps.max(1))?.last().clone())
    };
    let (a, b, c) = (run(dt)?, run(dt / 2.0)?, run(dt / 4.0)?);
    let coarse_gap = a.distance(&b);
    let fine_gap = b.distance(&c);
    Ok(Richardson { dt, coarse_gap, fine_gap, ratio: coarse_gap / fine_gap })
}
