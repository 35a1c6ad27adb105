//! Quantum propagation: the exact FFT free propagator, evolved windows in
//! closed form, Strang split-step evolution for the full equation
//! i du/dt = -1/2 u'' + V(t,x) u, and an empirical growth-bound checker.
//!
//! Two independent routes exist for evolved windows: the polynomial-times-
//! Gaussian closed form from `packet` and the sampled free propagator.
//! They must agree to 1e-8 wherever both are defined; the tests enforce it.

use crate::error::{Error, Result};
use crate::fields::{Flagged, Grid1D, SampledField, WindowFamily};
use crate::packet::{evolved_window_atom, PolyGauss};
use crate::potential::{GrowthProfile, PotentialModel};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// DFT wavenumbers in FFT bin order: k_j = 2 pi m_j / L with
/// m_j = j for j < n/2 and j - n otherwise.
fn wavenumbers(grid: &Grid1D) -> Vec<f64> {
    let n = grid.len();
    let d_k = TAU / grid.span();
    (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
            m as f64 * d_k
        })
        .collect()
}

/// Free evolution by the Fourier multiplier e^{-i t k^2 / 2}.
///
/// Spectrally exact for band-limited boundary-clean data; the warning on
/// the result reports boundary contamination after spreading.
pub fn free_propagate(f: &SampledField, t: f64) -> Flagged<SampledField> {
    if t == 0.0 {
        let out = f.clone();
        let warning = out.decay_warning();
        return Flagged::new(out, warning);
    }
    let grid = f.grid().clone();
    let n = grid.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = f.samples().to_vec();
    fwd.process(&mut buf);
    for (b, k) in buf.iter_mut().zip(wavenumbers(&grid)) {
        *b *= Complex64::new(0.0, -0.5 * t * k * k).exp();
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    for b in buf.iter_mut() {
        *b *= scale;
    }
    let out = SampledField::new(grid, buf).expect("grid and buffer sizes match");
    let warning = out.decay_warning();
    Flagged::new(out, warning)
}

/// A scaled window after free evolution, held in closed form (polynomial
/// times Gaussian) and optionally alongside the sampled propagator route.
#[derive(Clone, Debug)]
pub struct EvolvedWindow {
    family: WindowFamily,
    lambda: f64,
    time: f64,
    atom: PolyGauss,
    sampled: Option<Flagged<SampledField>>,
}

impl EvolvedWindow {
    /// Closed-form representation only; valid for every supported base.
    pub fn new(family: &WindowFamily, lambda: f64, time: f64) -> Result<Self> {
        Ok(Self {
            family: family.clone(),
            lambda,
            time,
            atom: evolved_window_atom(family, lambda, time)?,
            sampled: None,
        })
    }

    /// Closed form plus the sampled route: the static window sampled on
    /// `grid` and pushed through the free propagator.
    pub fn on_grid(
        family: &WindowFamily,
        lambda: f64,
        time: f64,
        grid: &Grid1D,
    ) -> Result<Self> {
        let mut w = Self::new(family, lambda, time)?;
        let static_window = crate::fields::scaled_window(family, lambda, grid)?;
        w.sampled = Some(free_propagate(&static_window, time));
        Ok(w)
    }

    pub fn family(&self) -> &WindowFamily {
        &self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn atom(&self) -> &PolyGauss {
        &self.atom
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        self.atom.eval(y)
    }

    /// The propagator-route field when constructed with `on_grid`.
    pub fn sampled(&self) -> Option<&Flagged<SampledField>> {
        self.sampled.as_ref()
    }

    /// The closed form sampled pointwise on `grid`.
    pub fn closed_form_field(&self, grid: &Grid1D) -> SampledField {
        SampledField::from_fn(grid.clone(), |y| self.atom.eval(y))
    }
}

/// Strang split-step from time `t0` to `t1`: half potential phase, full
/// kinetic multiplier, half potential phase, with V frozen at each substep
/// midpoint. Both substeps are unitary, so mass is conserved to rounding.
pub fn split_step_evolve_from(
    u0: &SampledField,
    v: &PotentialModel,
    t0: f64,
    t1: f64,
    n_steps: usize,
) -> Result<Flagged<SampledField>> {
    if n_steps == 0 {
        return Err(Error::Domain("split-step needs n_steps >= 1".into()));
    }
    let grid = u0.grid().clone();
    let n = grid.len();
    let dt = (t1 - t0) / n_steps as f64;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let kinetic: Vec<Complex64> = wavenumbers(&grid)
        .iter()
        .map(|&k| Complex64::new(0.0, -0.5 * dt * k * k).exp())
        .collect();
    let nodes = grid.nodes();
    let half_phase = |t_mid: f64| -> Result<Vec<Complex64>> {
        nodes
            .iter()
            .map(|&x| {
                let val = v.value(t_mid, x);
                if !val.is_finite() {
                    return Err(Error::Domain(format!(
                        "potential not finite at t = {t_mid}, x = {x}"
                    )));
                }
                Ok(Complex64::new(0.0, -0.5 * dt * val).exp())
            })
            .collect()
    };
    let frozen = if v.is_time_dependent() {
        None
    } else {
        Some(half_phase(t0)?)
    };
    let mut buf: Vec<Complex64> = u0.samples().to_vec();
    let scale = 1.0 / n as f64;
    let mut fresh;
    for step in 0..n_steps {
        let t_mid = t0 + (step as f64 + 0.5) * dt;
        let phase = match &frozen {
            Some(p) => p,
            None => {
                fresh = half_phase(t_mid)?;
                &fresh
            }
        };
        for (b, p) in buf.iter_mut().zip(phase) {
            *b *= p;
        }
        fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&kinetic) {
            *b *= k * scale;
        }
        inv.process(&mut buf);
        for (b, p) in buf.iter_mut().zip(phase) {
            *b *= p;
        }
    }
    let out = SampledField::new(grid, buf)?;
    let warning = out.decay_warning();
    Ok(Flagged::new(out, warning))
}

/// Evolution from time 0 to `t`.
pub fn split_step_evolve(
    u0: &SampledField,
    v: &PotentialModel,
    t: f64,
    n_steps: usize,
) -> Result<Flagged<SampledField>> {
    split_step_evolve_from(u0, v, 0.0, t, n_steps)
}

#[derive(Clone, Copy, Debug)]
pub struct OrderCheck {
    pub order: usize,
    pub sup_ratio: f64,
    pub pass: bool,
}

/// Empirical check of |d^k V(t,x)| <= c (1+|x|)^{rho-k} on a sample box.
#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub growth: GrowthProfile,
    pub orders: Vec<OrderCheck>,
}

impl AssumptionReport {
    pub fn passes(&self) -> bool {
        self.orders.iter().all(|o| o.pass)
    }
}

/// Sample |d^k V|/(1+|x|)^{rho-k} densely over box x t_range for every
/// k <= orders and compare the sup against the declared constant.
pub fn validate_assumption(
    v: &PotentialModel,
    box_x: (f64, f64),
    t_range: (f64, f64),
    orders: usize,
) -> Result<AssumptionReport> {
    if !(box_x.0 < box_x.1) || !(t_range.0 <= t_range.1) {
        return Err(Error::Domain("empty sample box".into()));
    }
    let growth = v.growth();
    let n_x = 512;
    let t_samples: Vec<f64> = if v.is_time_dependent() {
        (0..=16)
            .map(|i| t_range.0 + (t_range.1 - t_range.0) * i as f64 / 16.0)
            .collect()
    } else {
        vec![t_range.0]
    };
    let mut checks = Vec::with_capacity(orders + 1);
    for order in 0..=orders {
        let mut sup = 0.0f64;
        for i in 0..=n_x {
            let x = box_x.0 + (box_x.1 - box_x.0) * i as f64 / n_x as f64;
            let weight = (1.0 + x.abs()).powf(growth.rho - order as f64);
            for &t in &t_samples {
                let d = v.x_derivative(t, x, order)?;
                if !d.is_finite() {
                    return Err(Error::Domain(format!(
                        "derivative order {order} not finite at t = {t}, x = {x}"
                    )));
                }
                sup = sup.max(d.abs() / weight);
            }
        }
        checks.push(OrderCheck { order, sup_ratio: sup, pass: sup <= growth.c });
    }
    Ok(AssumptionReport { growth, orders: checks })
}
