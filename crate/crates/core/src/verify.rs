//! Numerical checks of the exact relations the rest of the crate relies
//! on: the free-evolution shift identity, the second-order Taylor
//! remainder of the transformed Schrodinger equation, the transport
//! equation residual under stencil refinement, the flow identity with its
//! action phase, and a roundtrip comparison between the static probe on
//! evolved data and the flowed probe on the initial data.
//!
//! Every check compares two computational routes that share no
//! intermediate code, so agreement is evidence and disagreement is a bug
//! (or a genuinely violated assumption, which the reports surface rather
//! than hide).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{
    sample_signal, DecayWarning, Grid1D, SampledField, SignalDescriptor, WindowFamily,
};
use crate::hamflow::{action_integral, integrate_flow};
use crate::packet::{evolved_window_atom, window_atom};
use crate::potential::PotentialModel;
use crate::schrodinger::{free_propagate, split_step_evolve, split_step_evolve_from};
use crate::special::{erfc_complex, gauss_legendre};
use crate::wavefront::{
    classify, flowed_decay_probe, static_decay_probe, ConicNeighborhood, DirectionSet,
    ProbeInput, Verdict,
};
use crate::wpt::{wpt_direct, PhasePoint};

/// Gauss-Legendre node count for the Taylor parameter integral. The
/// integrand is entire in theta, so 16 nodes leave the quadrature error
/// far below every tolerance used by the callers.
const THETA_NODES: usize = 16;

/// Window tail level below which grid nodes are skipped in the remainder
/// quadrature. Matches the truncation used by the direct transform.
const REMAINDER_TRUNCATION: f64 = 1e-22;

/// Default split-step substep length for the evolutions driven by the
/// identity checks. Small enough that the splitting error sits well under
/// the identity tolerances.
const IDENTITY_SPLIT_DT: f64 = 2.5e-4;

/// Steps for the characteristic flow and its action integral inside the
/// flow-identity check.
const FLOW_IDENTITY_STEPS: usize = 2048;

fn merge_warning(acc: &mut Option<DecayWarning>, incoming: Option<DecayWarning>) {
    if let Some(w) = incoming {
        match acc {
            Some(prev) if prev.edge_ratio >= w.edge_ratio => {}
            _ => *acc = Some(w),
        }
    }
}

fn substeps(span: f64, dt: f64) -> usize {
    ((span.abs() / dt).ceil() as usize).max(1)
}

/// Worst-case deviation between two probe vectors, absolute and relative
/// to the larger route's peak magnitude.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    /// max_p |lhs_p - rhs_p|
    pub max_abs: f64,
    /// max_p max(|lhs_p|, |rhs_p|), the scale the relative error refers to
    pub scale: f64,
    /// max_abs / scale (zero when both routes vanish identically)
    pub max_rel: f64,
    pub n_probes: usize,
    pub warning: Option<DecayWarning>,
}

impl IdentityReport {
    fn from_routes(
        lhs: &[Complex64],
        rhs: &[Complex64],
        warning: Option<DecayWarning>,
    ) -> Self {
        let mut max_abs = 0.0f64;
        let mut scale = 0.0f64;
        for (a, b) in lhs.iter().zip(rhs) {
            max_abs = max_abs.max((a - b).norm());
            scale = scale.max(a.norm()).max(b.norm());
        }
        let max_rel = if scale > 0.0 { max_abs / scale } else { 0.0 };
        Self { max_abs, scale, max_rel, n_probes: lhs.len(), warning }
    }

    pub fn summary(&self) -> String {
        format!(
            "probes: {}  max abs: {:.3e}  scale: {:.3e}  max rel: {:.3e}{}",
            self.n_probes,
            self.max_abs,
            self.scale,
            self.max_rel,
            match &self.warning {
                Some(w) => format!("  [boundary ratio {:.1e}]", w.edge_ratio),
                None => String::new(),
            }
        )
    }
}

/// Check that transforming freely evolved data with the evolved window
/// equals the static transform of the initial data read at the shifted
/// point, times the quadratic phase:
///
///   W_{phi^(t)} [U0(t) u0] (x, xi) = e^{-i t xi^2 / 2} W_{phi0} u0 (x - t xi, xi)
///
/// The left route evolves the data spectrally and uses the closed-form
/// evolved atom; the right route never touches the propagator. Probe
/// frequencies are taken literally (callers scale by lambda themselves
/// when probing cones).
pub fn verify_free_identity(
    u0: &SampledField,
    family: &WindowFamily,
    lambda: f64,
    t: f64,
    probes: &[PhasePoint],
) -> Result<IdentityReport> {
    if probes.is_empty() {
        return Err(Error::Domain("no probe points".into()));
    }
    let mut warning = None;

    let u_t = free_propagate(u0, t);
    merge_warning(&mut warning, u_t.warning);
    let atom_t = evolved_window_atom(family, lambda, t)?;
    let lhs = wpt_direct(&u_t.value, &atom_t, probes);
    merge_warning(&mut warning, lhs.warning);

    let atom_0 = window_atom(family, lambda)?;
    let shifted: Vec<PhasePoint> = probes
        .iter()
        .map(|p| PhasePoint { x: p.x - t * p.xi, xi: p.xi })
        .collect();
    let base = wpt_direct(u0, &atom_0, &shifted);
    merge_warning(&mut warning, base.warning);
    let rhs: Vec<Complex64> = base
        .value
        .iter()
        .zip(probes)
        .map(|(w, p)| Complex64::new(0.0, -0.5 * t * p.xi * p.xi).exp() * w)
        .collect();

    Ok(IdentityReport::from_routes(&lhs.value, &rhs, warning))
}

/// Second-order Taylor remainder term of the transformed equation at one
/// phase-space point:
///
///   Ru(t, x, xi) = int conj(phi^(t)(y - x)) k(x, y) (y - x)^2 u(t, y) e^{-i y xi} dy
///   k(x, y)      = int_0^1 (1 - theta) V''(t, x + theta (y - x)) dtheta
///
/// so that V(t, y) = V(t, x) + V_x(t, x)(y - x) + k(x, y)(y - x)^2 exactly.
/// Trapezoid in y over the sampled grid restricted to the window support,
/// Gauss-Legendre in theta. The probe frequency `p.xi` is literal.
///
/// Affine potentials return an exact zero. Potentials without a second
/// derivative report which order is missing.
pub fn ru_quadrature(
    u_t: &SampledField,
    v: &PotentialModel,
    family: &WindowFamily,
    lambda: f64,
    t: f64,
    p: PhasePoint,
) -> Result<Complex64> {
    if v.max_order() < 2 {
        return Err(Error::MissingDerivative { order: 2, max: v.max_order() });
    }
    if matches!(v, PotentialModel::Zero | PotentialModel::Linear { .. }) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let atom = evolved_window_atom(family, lambda, t)?;
    let radius = atom.support_radius(REMAINDER_TRUNCATION);
    let grid = u_t.grid();
    let dx = grid.spacing();
    let (nodes, weights) = gauss_legendre(THETA_NODES);
    let samples = u_t.samples();

    let lo = grid.nearest_node(p.x - radius);
    let hi = grid.nearest_node(p.x + radius);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in lo..=hi.min(grid.len() - 1) {
        let y = grid.node(i);
        let u = y - p.x;
        let mut kernel = 0.0;
        for (&node, &w) in nodes.iter().zip(&weights) {
            // map [-1, 1] -> [0, 1]
            let theta = 0.5 * (node + 1.0);
            kernel += 0.5 * w * (1.0 - theta) * v.x_derivative(t, p.x + theta * u, 2)?;
        }
        let phase = Complex64::new(0.0, -p.xi * y).exp();
        acc += atom.eval(u).conj() * kernel * (u * u) * samples[i] * phase;
    }
    Ok(acc * dx)
}

/// One stencil level of the residual check.
#[derive(Clone, Copy, Debug)]
pub struct ResidualLevel {
    pub dt: f64,
    pub dx: f64,
    pub dxi: f64,
    pub sup: f64,
    pub rms: f64,
}

/// Residual norms per level plus the decrease ratios between consecutive
/// levels. Second-order centered stencils make both ratios approach 4
/// under joint halving once the background (splitting + quadrature) error
/// is negligible.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub levels: Vec<ResidualLevel>,
    pub sup_ratios: Vec<f64>,
    pub rms_ratios: Vec<f64>,
    /// Largest remainder magnitude over the probe set, for scale context.
    pub ru_scale: f64,
}

impl ResidualReport {
    pub fn passes(&self, min_ratio: f64) -> bool {
        !self.sup_ratios.is_empty()
            && self
                .sup_ratios
                .iter()
                .chain(&self.rms_ratios)
                .all(|r| *r >= min_ratio)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for l in &self.levels {
            out.push_str(&format!(
                "dt {:.3e}  dx {:.3e}  dxi {:.3e}  sup {:.6e}  rms {:.6e}\n",
                l.dt, l.dx, l.dxi, l.sup, l.rms
            ));
        }
        for (i, (s, r)) in self.sup_ratios.iter().zip(&self.rms_ratios).enumerate() {
            out.push_str(&format!("level {i} -> {}: sup x{s:.2}  rms x{r:.2}\n", i + 1));
        }
        out.push_str(&format!("remainder scale {:.3e}\n", self.ru_scale));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dt,dx,dxi,sup,rms\n");
        for l in &self.levels {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                l.dt, l.dx, l.dxi, l.sup, l.rms
            ));
        }
        out
    }
}

/// Evaluate the transported-equation residual
///
///   (i d/dt + i xi d/dx - i V_x(t,x) d/dxi - xi^2/2 - (V - x V_x)) W - Ru
///
/// on a probe grid with centered second-order differences, then halve all
/// three stencil steps `n_levels - 1` times. The time derivative differences
/// the full route (evolved window AND evolved data); the x and xi
/// derivatives reuse the time-t state. Probe frequencies are literal.
pub fn pde_residual(
    u0: &SampledField,
    v: &PotentialModel,
    family: &WindowFamily,
    lambda: f64,
    t: f64,
    x_list: &[f64],
    xi_list: &[f64],
    step0: (f64, f64, f64),
    n_levels: usize,
) -> Result<ResidualReport> {
    if x_list.is_empty() || xi_list.is_empty() {
        return Err(Error::Domain("empty probe grid".into()));
    }
    if n_levels == 0 {
        return Err(Error::Domain("need at least one stencil level".into()));
    }
    let (dt0, dx0, dxi0) = step0;
    if !(dt0 > 0.0 && dx0 > 0.0 && dxi0 > 0.0) {
        return Err(Error::Domain("stencil steps must be positive".into()));
    }
    let xi_peak = xi_list.iter().fold(0.0f64, |m, &xi| m.max(xi.abs())) + dxi0;
    if xi_peak > u0.grid().nyquist() {
        return Err(Error::Resolution {
            requested: xi_peak,
            max_admissible: u0.grid().nyquist(),
        });
    }

    let probes: Vec<PhasePoint> = x_list
        .iter()
        .flat_map(|&x| xi_list.iter().map(move |&xi| PhasePoint { x, xi }))
        .collect();

    // Time-t state and remainder are shared by every level.
    let u_t = split_step_evolve(u0, v, t, substeps(t, IDENTITY_SPLIT_DT))?.value;
    let atom_t = evolved_window_atom(family, lambda, t)?;
    let mut ru = Vec::with_capacity(probes.len());
    let mut ru_scale = 0.0f64;
    for p in &probes {
        let r = ru_quadrature(&u_t, v, family, lambda, t, *p)?;
        ru_scale = ru_scale.max(r.norm());
        ru.push(r);
    }

    let mut levels = Vec::with_capacity(n_levels);
    for level in 0..n_levels {
        let f = 0.5f64.powi(level as i32);
        let (dt, dx, dxi) = (dt0 * f, dx0 * f, dxi0 * f);

        let u_plus = split_step_evolve_from(&u_t, v, t, t + dt, substeps(dt, IDENTITY_SPLIT_DT))?;
        let u_minus = split_step_evolve_from(&u_t, v, t, t - dt, substeps(dt, IDENTITY_SPLIT_DT))?;
        let atom_plus = evolved_window_atom(family, lambda, t + dt)?;
        let atom_minus = evolved_window_atom(family, lambda, t - dt)?;

        let w_plus = wpt_direct(&u_plus.value, &atom_plus, &probes).value;
        let w_minus = wpt_direct(&u_minus.value, &atom_minus, &probes).value;

        let mut slice_points = Vec::with_capacity(5 * probes.len());
        for p in &probes {
            slice_points.push(*p);
            slice_points.push(PhasePoint { x: p.x + dx, xi: p.xi });
            slice_points.push(PhasePoint { x: p.x - dx, xi: p.xi });
            slice_points.push(PhasePoint { x: p.x, xi: p.xi + dxi });
            slice_points.push(PhasePoint { x: p.x, xi: p.xi - dxi });
        }
        let w_t = wpt_direct(&u_t, &atom_t, &slice_points).value;

        let mut sup = 0.0f64;
        let mut sum_sq = 0.0f64;
        let i_unit = Complex64::new(0.0, 1.0);
        for (k, p) in probes.iter().enumerate() {
            let f0 = w_t[5 * k];
            let f_t = (w_plus[k] - w_minus[k]) / (2.0 * dt);
            let f_x = (w_t[5 * k + 1] - w_t[5 * k + 2]) / (2.0 * dx);
            let f_xi = (w_t[5 * k + 3] - w_t[5 * k + 4]) / (2.0 * dxi);
            let vx = v.x_derivative(t, p.x, 1)?;
            let vt = v.tilde_v(t, p.x)?;
            let r = i_unit * f_t + i_unit * p.xi * f_x
                - i_unit * vx * f_xi
                - (0.5 * p.xi * p.xi + vt) * f0
                - ru[k];
            let n = r.norm();
            sup = sup.max(n);
            sum_sq += n * n;
        }
        let rms = (sum_sq / probes.len() as f64).sqrt();
        levels.push(ResidualLevel { dt, dx, dxi, sup, rms });
    }

    let sup_ratios = levels.windows(2).map(|w| w[0].sup / w[1].sup).collect();
    let rms_ratios = levels.windows(2).map(|w| w[0].rms / w[1].rms).collect();
    Ok(ResidualReport { levels, sup_ratios, rms_ratios, ru_scale })
}

/// How the flow identity is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowIdentityMode {
    /// The remainder vanishes identically (affine potentials), so the two
    /// routes must agree to quadrature accuracy.
    Exact,
    /// The remainder does not vanish; the discrepancy is reported next to
    /// the magnitude scale |Ru| * t0 it should be commensurate with.
    Bound,
}

#[derive(Clone, Copy, Debug)]
pub struct FlowProbeRow {
    pub x: f64,
    pub xi: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub discrepancy: f64,
    /// |Ru(t0, x, lambda xi)| * t0, present in bound mode.
    pub ru_scale: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct FlowIdentityReport {
    pub mode: FlowIdentityMode,
    pub rows: Vec<FlowProbeRow>,
    pub max_abs: f64,
    pub scale: f64,
    pub max_rel: f64,
    pub warning: Option<DecayWarning>,
}

impl FlowIdentityReport {
    pub fn summary(&self) -> String {
        let mut out = format!(
            "mode: {:?}  probes: {}  max abs: {:.3e}  scale: {:.3e}  max rel: {:.3e}\n",
            self.mode,
            self.rows.len(),
            self.max_abs,
            self.scale,
            self.max_rel
        );
        if self.mode == FlowIdentityMode::Bound {
            for r in &self.rows {
                out.push_str(&format!(
                    "x {:+.3}  xi {:+.3}  discrepancy {:.3e}  remainder scale {:.3e}\n",
                    r.x,
                    r.xi,
                    r.discrepancy,
                    r.ru_scale.unwrap_or(0.0)
                ));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,xi,lhs_re,lhs_im,rhs_re,rhs_im,discrepancy,ru_scale\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                r.x,
                r.xi,
                r.lhs.re,
                r.lhs.im,
                r.rhs.re,
                r.rhs.im,
                r.discrepancy,
                r.ru_scale.map(|s| format!("{s:.16e}")).unwrap_or_default()
            ));
        }
        out
    }
}

/// Check the flow identity at scaled probe points: the static-window
/// transform of the evolved state at (x, lambda xi) against the
/// action-phased transform of the *initial* state under the window evolved
/// to -t0, read at the backward flow endpoint:
///
///   W_{(phi0)_lambda} u(t0) (x, lambda xi)
///     = e^{-i A(t0; x, lambda xi)} W_{phi_lambda^(-t0)} u0 (x(0), xi(0)) + correction
///
/// with A the action integral of xi^2/2 + V - x V_x along the flow. The
/// correction vanishes identically for affine potentials; `Exact` mode
/// requires that and reports worst-case deviations, `Bound` mode reports
/// the per-probe discrepancy against the remainder scale |Ru| * t0.
/// Probe xi values here are cone coordinates: the frequency actually used
/// is lambda * xi.
pub fn verify_flow_identity(
    u0: &SampledField,
    v: &PotentialModel,
    family: &WindowFamily,
    lambda: f64,
    t0: f64,
    probes: &[PhasePoint],
    mode: FlowIdentityMode,
) -> Result<FlowIdentityReport> {
    if probes.is_empty() {
        return Err(Error::Domain("no probe points".into()));
    }
    let affine = matches!(v, PotentialModel::Zero | PotentialModel::Linear { .. });
    if mode == FlowIdentityMode::Exact && !affine {
        return Err(Error::Domain(
            "exact mode requires a potential with vanishing second derivative; \
             use bound mode for curved potentials"
                .into(),
        ));
    }

    let mut warning = None;
    let u_t = split_step_evolve(u0, v, t0, substeps(t0, IDENTITY_SPLIT_DT))?;
    merge_warning(&mut warning, u_t.warning);

    let atom_0 = window_atom(family, lambda)?;
    let scaled: Vec<PhasePoint> = probes
        .iter()
        .map(|p| PhasePoint { x: p.x, xi: lambda * p.xi })
        .collect();
    let lhs = wpt_direct(&u_t.value, &atom_0, &scaled);
    merge_warning(&mut warning, lhs.warning);

    let atom_back = evolved_window_atom(family, lambda, -t0)?;
    let mut flowed = Vec::with_capacity(probes.len());
    let mut actions = Vec::with_capacity(probes.len());
    for p in probes {
        let fr = integrate_flow(v, t0, p.x, lambda, p.xi, FLOW_IDENTITY_STEPS)?;
        actions.push(action_integral(&fr, v)?);
        flowed.push(PhasePoint { x: fr.x0(), xi: fr.xi0() });
    }
    let base = wpt_direct(u0, &atom_back, &flowed);
    merge_warning(&mut warning, base.warning);

    let mut rows = Vec::with_capacity(probes.len());
    let mut max_abs = 0.0f64;
    let mut scale = 0.0f64;
    for (k, p) in probes.iter().enumerate() {
        let rhs = Complex64::new(0.0, -actions[k]).exp() * base.value[k];
        let lhs_v = lhs.value[k];
        let discrepancy = (lhs_v - rhs).norm();
        max_abs = max_abs.max(discrepancy);
        scale = scale.max(lhs_v.norm()).max(rhs.norm());
        let ru_scale = match mode {
            FlowIdentityMode::Exact => None,
            FlowIdentityMode::Bound => Some(
                ru_quadrature(&u_t.value, v, family, lambda, 0.0, scaled[k])?.norm()
                    * t0.abs(),
            ),
        };
        rows.push(FlowProbeRow { x: p.x, xi: p.xi, lhs: lhs_v, rhs, discrepancy, ru_scale });
    }
    let max_rel = if scale > 0.0 { max_abs / scale } else { 0.0 };
    Ok(FlowIdentityReport { mode, rows, max_abs, scale, max_rel, warning })
}

/// One candidate direction in the roundtrip table.
#[derive(Clone, Copy, Debug)]
pub struct RoundtripRow {
    pub x0: f64,
    pub dir: f64,
    pub static_verdict: Verdict,
    pub static_slope: Option<f64>,
    pub flowed_verdict: Verdict,
    pub flowed_slope: Option<f64>,
}

impl RoundtripRow {
    /// Rows where either side is inconclusive carry no evidence either way
    /// and are excluded from the disagreement count.
    pub fn comparable(&self) -> bool {
        self.static_verdict != Verdict::Inconclusive
            && self.flowed_verdict != Verdict::Inconclusive
    }

    pub fn agrees(&self) -> bool {
        self.static_verdict == self.flowed_verdict
    }
}

/// Side-by-side verdicts from the static probe on the evolved state and
/// the flowed probe on the initial data.
#[derive(Clone, Debug)]
pub struct RoundtripTable {
    pub t: f64,
    pub rows: Vec<RoundtripRow>,
    /// Width of the Gaussian standing in for a point mass on the sampled
    /// side, when one was needed.
    pub mollification_width: Option<f64>,
    /// Smoothing width applied to jump data on the sampled side, when one
    /// was needed.
    pub jump_smoothing_width: Option<f64>,
}

impl RoundtripTable {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| r.comparable() && !r.agrees()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "x0,dir,static_slope,static_verdict,flowed_slope,flowed_verdict,comparison\n",
        );
        for r in &self.rows {
            let s_slope = r.static_slope.map(|s| format!("{s:.16e}")).unwrap_or_default();
            let f_slope = r.flowed_slope.map(|s| format!("{s:.16e}")).unwrap_or_default();
            let cmp = if !r.comparable() {
                "excluded"
            } else if r.agrees() {
                "agree"
            } else {
                "disagree"
            };
            out.push_str(&format!(
                "{:.16e},{},{s_slope},{},{f_slope},{},{cmp}\n",
                r.x0, r.dir, r.static_verdict, r.flowed_verdict
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let comparable = self.rows.iter().filter(|r| r.comparable()).count();
        let mut out = format!(
            "t = {}: {} candidate directions, {} comparable, {} disagreements\n",
            self.t,
            self.rows.len(),
            comparable,
            self.disagreements()
        );
        if let Some(w) = self.mollification_width {
            out.push_str(&format!("point mass mollified to width {w:.3e} on the sampled side\n"));
        }
        if let Some(w) = self.jump_smoothing_width {
            out.push_str(&format!("jump smoothed over width {w:.3e} on the sampled side\n"));
        }
        for r in &self.rows {
            out.push_str(&format!(
                "x0 {:+.3}  dir {:+}  static {:<12} flowed {:<12} {}\n",
                r.x0,
                r.dir,
                r.static_verdict.to_string(),
                r.flowed_verdict.to_string(),
                if !r.comparable() {
                    "excluded"
                } else if r.agrees() {
                    "agree"
                } else {
                    "DISAGREE"
                }
            ));
        }
        out
    }
}

/// Sampled stand-in for data the grid cannot hold verbatim. Point masses
/// become unit-mass Gaussians four grid spacings wide; jumps are smoothed
/// over one grid spacing and tapered far from the center so the periodic
/// boundary sees a clean field. Everything else samples directly.
pub fn roundtrip_surrogate(
    desc: &SignalDescriptor,
    grid: &Grid1D,
) -> Result<(SampledField, Option<f64>, Option<f64>)> {
    match desc {
        SignalDescriptor::Dirac { center } => {
            let w = 4.0 * grid.spacing();
            let c = *center;
            let norm = 1.0 / (w * (2.0 * std::f64::consts::PI).sqrt());
            let field = SampledField::from_fn(grid.clone(), |x| {
                Complex64::new(norm * (-0.5 * ((x - c) / w).powi(2)).exp(), 0.0)
            });
            Ok((field, Some(w), None))
        }
        SignalDescriptor::Heaviside { jump } => {
            let sigma = grid.spacing();
            let j = *jump;
            let mid = 0.5 * (grid.node(0) + grid.node(grid.len() - 1));
            let taper = 0.32 * (grid.node(grid.len() - 1) - grid.node(0));
            let field = SampledField::from_fn(grid.clone(), |x| {
                let u = (x - j) / (sigma * std::f64::consts::SQRT_2);
                let step = 0.5 * erfc_complex(Complex64::new(-u, 0.0)).re;
                let envelope = (-((x - mid) / taper).powi(8)).exp();
                Complex64::new(step * envelope, 0.0)
            });
            Ok((field, None, Some(sigma)))
        }
        other => Ok((sample_signal(other, grid)?, None, None)),
    }
}

/// Compare singularity verdicts from two independent routes: evolve the
/// data with the split-step propagator and run the static decay probe on
/// the result, versus keeping the data fixed and running the flowed probe
/// (evolved window read at the backward flow endpoint). Candidates use
/// both cone directions; the neighborhood half-width follows the candidate
/// spacing. Data the grid cannot represent verbatim is replaced on the
/// sampled side only; the flowed side always sees the exact descriptor.
#[allow(clippy::too_many_arguments)]
pub fn transport_roundtrip(
    desc: &SignalDescriptor,
    v: &PotentialModel,
    family: &WindowFamily,
    t: f64,
    x0_list: &[f64],
    a: f64,
    lambda_list: &[f64],
    thresholds: (f64, f64),
    grid: &Grid1D,
    split_dt: f64,
) -> Result<RoundtripTable> {
    if x0_list.is_empty() {
        return Err(Error::Domain("no candidate positions".into()));
    }
    if !(split_dt > 0.0) {
        return Err(Error::Domain("split_dt must be positive".into()));
    }
    let half_width = if x0_list.len() > 1 {
        0.5 * (x0_list[1] - x0_list[0]).abs()
    } else {
        0.5
    };

    let (surrogate, moll_w, smooth_w) = roundtrip_surrogate(desc, grid)?;
    let u_t = split_step_evolve(&surrogate, v, t, substeps(t, split_dt))?.value;
    let static_input = ProbeInput::Sampled(&u_t);
    let flowed_input = ProbeInput::Analytic(desc);

    let mut rows = Vec::with_capacity(2 * x0_list.len());
    for &x0 in x0_list {
        for (dir, set) in [(1.0, DirectionSet::Plus), (-1.0, DirectionSet::Minus)] {
            let nb = ConicNeighborhood::new((x0 - half_width, x0 + half_width), set, a)?;
            let candidate = PhasePoint { x: x0, xi: dir };
            let s_report = static_decay_probe(&static_input, family, candidate, &nb, lambda_list)?;
            let s_cls = classify(&s_report, thresholds.0, thresholds.1)?;
            let f_report =
                flowed_decay_probe(&flowed_input, v, family, t, candidate, &nb, lambda_list)?;
            let f_cls = classify(&f_report, thresholds.0, thresholds.1)?;
            rows.push(RoundtripRow {
                x0,
                dir,
                static_verdict: s_cls.verdict,
                static_slope: s_cls.slope,
                flowed_verdict: f_cls.verdict,
                flowed_slope: f_cls.slope,
            });
        }
    }
    Ok(RoundtripTable {
        t,
        rows,
        mollification_width: moll_w,
        jump_smoothing_width: smooth_w,
    })
}
