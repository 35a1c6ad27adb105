//! Classical Hamiltonian flow for H(s) = xi^2/2 + V(s, x), solved as a
//! terminal-value problem: given (x, lambda*xi) at s = t, the trajectory
//! (x(s), xi(s)) on [0, t] satisfies dx/ds = xi, dxi/ds = -V_x(s, x).
//!
//! Alongside the RK4 integrator: Picard iteration for the same terminal
//! problem, a sampled checker for the two-sided trajectory bound
//! (1/2a) |t*| lambda <= |x(s)| <= 2a |t*| lambda, the action integral
//! that phases the flow identity, and the straight-line remainder scaling.

use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::special::fit_line;
use rayon::prelude::*;

/// Magnitudes below this are treated as exactly zero when fitting
/// log-log slopes.
const ZERO_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug)]
pub struct FlowResult {
    t: f64,
    x_terminal: f64,
    xi_terminal: f64,
    /// Node times ascending, s_0 = 0 and s_n = t exactly.
    times: Vec<f64>,
    positions: Vec<f64>,
    momenta: Vec<f64>,
}

impl FlowResult {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x_terminal(&self) -> f64 {
        self.x_terminal
    }

    pub fn xi_terminal(&self) -> f64 {
        self.xi_terminal
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn step_count(&self) -> usize {
        self.times.len() - 1
    }

    /// Position at s = 0.
    pub fn x0(&self) -> f64 {
        self.positions[0]
    }

    /// Momentum at s = 0.
    pub fn xi0(&self) -> f64 {
        self.momenta[0]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x,xi\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.times[i], self.positions[i], self.momenta[i]
            ));
        }
        out
    }
}

fn force(v: &PotentialModel, s: f64, x: f64) -> Result<f64> {
    let f = v.x_derivative(s, x, 1)?;
    if !f.is_finite() || !x.is_finite() {
        return Err(Error::TrajectoryEscape(format!(
            "potential gradient not finite at s = {s}, x = {x}"
        )));
    }
    Ok(f)
}

/// Integrate the flow backward from the terminal data (x, lambda*xi) at
/// s = t down to s = 0 with classical RK4, run as forward integration in
/// sigma = t - s with the negated vector field. The terminal node stores
/// the input exactly.
pub fn integrate_flow(
    v: &PotentialModel,
    t: f64,
    x: f64,
    lambda: f64,
    xi: f64,
    n_steps: usize,
) -> Result<FlowResult> {
    if n_steps == 0 {
        return Err(Error::Domain("flow integration needs n_steps >= 1".into()));
    }
    let n = n_steps;
    // s grid with both endpoints exact; index i corresponds to s = t i/n.
    let times: Vec<f64> = (0..=n).map(|i| t * i as f64 / n as f64).collect();
    let mut positions = vec![0.0; n + 1];
    let mut momenta = vec![0.0; n + 1];
    let (mut xs, mut ps) = (x, lambda * xi);
    positions[n] = xs;
    momenta[n] = ps;
    // In sigma the system reads dx/dsigma = -xi, dxi/dsigma = +V_x(t - sigma, x).
    for i in (0..n).rev() {
        let s_hi = times[i + 1];
        let h = s_hi - times[i];
        let f = |s: f64, x: f64, p: f64| -> Result<(f64, f64)> {
            Ok((-p, force(v, s, x)?))
        };
        let (k1x, k1p) = f(s_hi, xs, ps)?;
        let (k2x, k2p) = f(s_hi - 0.5 * h, xs + 0.5 * h * k1x, ps + 0.5 * h * k1p)?;
        let (k3x, k3p) = f(s_hi - 0.5 * h, xs + 0.5 * h * k2x, ps + 0.5 * h * k2p)?;
        let (k4x, k4p) = f(s_hi - h, xs + h * k3x, ps + h * k3p)?;
        xs += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        ps += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if !xs.is_finite() || !ps.is_finite() {
            return Err(Error::TrajectoryEscape(format!(
                "trajectory not finite near s = {}",
                times[i]
            )));
        }
        positions[i] = xs;
        momenta[i] = ps;
    }
    Ok(FlowResult { t, x_terminal: x, xi_terminal: lambda * xi, times, positions, momenta })
}

/// Action along the trajectory: A = int_0^t (xi(s)^2 / 2 + tilde V(s, x(s))) ds
/// by trapezoid over the stored nodes, with tilde V = V - x V_x.
pub fn action_integral(fr: &FlowResult, v: &PotentialModel) -> Result<f64> {
    let vals: Vec<f64> = fr
        .times
        .iter()
        .zip(fr.positions.iter())
        .zip(fr.momenta.iter())
        .map(|((&s, &x), &p)| Ok(0.5 * p * p + v.tilde_v(s, x)?))
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    for i in 0..fr.times.len() - 1 {
        acc += 0.5 * (vals[i] + vals[i + 1]) * (fr.times[i + 1] - fr.times[i]);
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct PicardIterates {
    lambda: f64,
    /// Node times ascending, 0 to t0 inclusive.
    times: Vec<f64>,
    /// iterates[k] is the curve x^{(k)} on `times`.
    iterates: Vec<Vec<f64>>,
}

impl PicardIterates {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn iterate(&self, k: usize) -> &[f64] {
        &self.iterates[k]
    }

    pub fn n_iterates(&self) -> usize {
        self.iterates.len()
    }

    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("at least x^(0) present")
    }
}

/// Picard iteration for the terminal-value trajectory:
/// x^{(k+1)}(s) = x + (s - t0) lambda xi - int_{t0}^s (s - s1) V_x(s1, x^{(k)}(s1)) ds1,
/// starting from the exact straight line x^{(0)}(s) = x + (s - t0) lambda xi.
/// The kernel splits as s * F - s1 * F, so each sweep costs one pass of
/// cumulative trapezoid sums.
pub fn picard_iterate(
    v: &PotentialModel,
    t0: f64,
    x: f64,
    lambda: f64,
    xi: f64,
    n_iters: usize,
    n_quad: usize,
) -> Result<PicardIterates> {
    if n_quad < 2 {
        return Err(Error::Domain("picard quadrature needs n_quad >= 2".into()));
    }
    let n = n_quad;
    let times: Vec<f64> = (0..=n).map(|i| t0 * i as f64 / n as f64).collect();
    let straight: Vec<f64> = times.iter().map(|&s| x + (s - t0) * lambda * xi).collect();
    let mut iterates = vec![straight.clone()];
    for _ in 0..n_iters {
        let cur = iterates.last().expect("nonempty");
        let f: Vec<f64> = times
            .iter()
            .zip(cur.iter())
            .map(|(&s, &xc)| force(v, s, xc))
            .collect::<Result<_>>()?;
        // Cumulative trapezoid integrals from t0 down to each node of
        // F and of s1 * F; c1[i] = int_{t0}^{s_i} F, c2[i] = int_{t0}^{s_i} s1 F.
        let mut c1 = vec![0.0; n + 1];
        let mut c2 = vec![0.0; n + 1];
        for i in (0..n).rev() {
            let h = times[i + 1] - times[i];
            c1[i] = c1[i + 1] - 0.5 * (f[i] + f[i + 1]) * h;
            c2[i] = c2[i + 1] - 0.5 * (times[i] * f[i] + times[i + 1] * f[i + 1]) * h;
        }
        let next: Vec<f64> = (0..=n)
            .map(|i| straight[i] - (times[i] * c1[i] - c2[i]))
            .collect();
        iterates.push(next);
    }
    Ok(PicardIterates { lambda, times, iterates })
}

#[derive(Clone, Copy, Debug)]
pub struct BoundRow {
    pub lambda: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

/// Sampled verdict on (1/2a) |t*| lambda <= |x(s)| <= 2a |t*| lambda over
/// the admissible window lambda^{p-1} <= |t*| <= t0.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub a: f64,
    pub p: f64,
    pub rows: Vec<BoundRow>,
    /// Smallest tested lambda from which every larger tested lambda passes.
    pub lambda0: Option<f64>,
    /// Growth exponent below 1 puts the sweep outside the proved regime;
    /// results are still reported.
    pub outside_proved_regime: bool,
    pub n_x_samples: usize,
    pub n_xi_samples: usize,
    pub n_time_steps: usize,
}

impl BoundReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,min_ratio,max_ratio,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{}\n",
                r.lambda, r.min_ratio, r.max_ratio, r.pass
            ));
        }
        out
    }
}

/// Sweep trajectories from terminal points in K x {xi : 1/a <= |xi| <= a}
/// (both signs) and record the worst ratios |x(s)| / (|t*| lambda) with
/// t* = s - t0 restricted to lambda^{p-1} <= |t*| <= t0.
pub fn check_flow_bounds(
    v: &PotentialModel,
    k_interval: (f64, f64),
    a: f64,
    t0: f64,
    lambda_list: &[f64],
    p: f64,
) -> Result<BoundReport> {
    if a < 1.0 {
        return Err(Error::Domain(format!("cone parameter a must be >= 1, got {a}")));
    }
    if !(k_interval.0 <= k_interval.1) || t0 <= 0.0 || lambda_list.is_empty() {
        return Err(Error::Domain("bound sweep needs K, t0 > 0, and lambdas".into()));
    }
    let (n_x, n_xi, n_steps) = (5usize, 5usize, 512usize);
    let xs: Vec<f64> = (0..n_x)
        .map(|i| {
            k_interval.0 + (k_interval.1 - k_interval.0) * i as f64 / (n_x - 1) as f64
        })
        .collect();
    let xi_mags: Vec<f64> = (0..n_xi)
        .map(|i| 1.0 / a + (a - 1.0 / a) * i as f64 / (n_xi - 1) as f64)
        .collect();
    let rows: Vec<BoundRow> = lambda_list
        .par_iter()
        .map(|&lambda| -> Result<Option<BoundRow>> {
            let t_star_min = lambda.powf(p - 1.0);
            if t_star_min > t0 {
                return Ok(None);
            }
            let mut min_ratio = f64::INFINITY;
            let mut max_ratio = 0.0f64;
            for &x in &xs {
                for &m in &xi_mags {
                    for xi in [m, -m] {
                        let fr = integrate_flow(v, t0, x, lambda, xi, n_steps)?;
                        for (i, &s) in fr.times().iter().enumerate() {
                            let t_star = (s - t0).abs();
                            if t_star < t_star_min || t_star > t0 {
                                continue;
                            }
                            let ratio = fr.positions()[i].abs() / (t_star * lambda);
                            min_ratio = min_ratio.min(ratio);
                            max_ratio = max_ratio.max(ratio);
                        }
                    }
                }
            }
            if !min_ratio.is_finite() {
                return Ok(None);
            }
            let pass = min_ratio >= 1.0 / (2.0 * a) && max_ratio <= 2.0 * a;
            Ok(Some(BoundRow { lambda, min_ratio, max_ratio, pass }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if rows.is_empty() {
        return Err(Error::Domain(
            "no lambda in the list admits |t*| in [lambda^{p-1}, t0]".into(),
        ));
    }
    let lambda0 = rows
        .iter()
        .rev()
        .take_while(|r| r.pass)
        .last()
        .filter(|_| rows.last().is_some_and(|r| r.pass))
        .map(|r| r.lambda);
    Ok(BoundReport {
        a,
        p,
        rows,
        lambda0,
        outside_proved_regime: v.growth().rho < 1.0,
        n_x_samples: n_x,
        n_xi_samples: n_xi,
        n_time_steps: n_steps,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct RemainderRow {
    pub lambda: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Deviation of the backward flow from the free straight line,
/// delta1 = x(0) - (x - t lambda xi), delta2 = xi(0) - lambda xi, with
/// log-log slopes fitted over the lambda list.
#[derive(Clone, Debug)]
pub struct RemainderReport {
    pub rows: Vec<RemainderRow>,
    /// None when the deltas vanish identically (slope undefined).
    pub slope1: Option<f64>,
    pub slope2: Option<f64>,
}

impl RemainderReport {
    pub fn is_exact_zero(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.delta1.abs() < ZERO_FLOOR && r.delta2.abs() < ZERO_FLOOR)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,delta1,delta2\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                r.lambda, r.delta1, r.delta2
            ));
        }
        out
    }
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, mag)| *mag > ZERO_FLOOR)
        .map(|&(l, mag)| (l.ln(), mag.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    Some(fit_line(&usable).0)
}

pub fn straightline_remainder(
    v: &PotentialModel,
    t: f64,
    x: f64,
    xi: f64,
    lambda_list: &[f64],
) -> Result<RemainderReport> {
    if lambda_list.is_empty() {
        return Err(Error::Domain("remainder sweep needs lambdas".into()));
    }
    let rows: Vec<RemainderRow> = lambda_list
        .par_iter()
        .map(|&lambda| -> Result<RemainderRow> {
            let fr = integrate_flow(v, t, x, lambda, xi, 2048)?;
            Ok(RemainderRow {
                lambda,
                delta1: fr.x0() - (x - t * lambda * xi),
                delta2: fr.xi0() - lambda * xi,
            })
        })
        .collect::<Result<_>>()?;
    let slope1 = fit_slope(
        &rows.iter().map(|r| (r.lambda, r.delta1.abs())).collect::<Vec<_>>(),
    );
    let slope2 = fit_slope(
        &rows.iter().map(|r| (r.lambda, r.delta2.abs())).collect::<Vec<_>>(),
    );
    Ok(RemainderReport { rows, slope1, slope2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_flows_along_straight_lines() {
        let v = PotentialModel::zero();
        let fr = integrate_flow(&v, 1.3, 0.4, 8.0, 0.75, 128).unwrap();
        assert_eq!(fr.x_terminal(), 0.4);
        assert_eq!(fr.xi_terminal(), 6.0);
        assert!((fr.x0() - (0.4 - 1.3 * 6.0)).abs() < 1e-12);
        assert!((fr.xi0() - 6.0).abs() < 1e-12);
        for (i, &s) in fr.times().iter().enumerate() {
            assert!((fr.positions()[i] - (0.4 + (s - 1.3) * 6.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_potential_flow_is_exact() {
        // V = x: x(s) = x + (s-t) li - (s-t)^2/2, xi(s) = li - (s-t),
        // so t=1, x=0, lambda xi = 2 gives x(0) = -2.5, xi(0) = 3. RK4 is
        // exact on polynomial dynamics of this degree.
        let v = PotentialModel::linear(1.0);
        let fr = integrate_flow(&v, 1.0, 0.0, 2.0, 1.0, 64).unwrap();
        assert!((fr.x0() + 2.5).abs() < 1e-10, "x0 {}", fr.x0());
        assert!((fr.xi0() - 3.0).abs() < 1e-10, "xi0 {}", fr.xi0());
    }

    #[test]
    fn integrator_is_fourth_order() {
        let v = PotentialModel::subquad(1.0).unwrap();
        let x0 = |n: usize| integrate_flow(&v, 1.0, 0.3, 2.0, 1.0, n).unwrap().x0();
        let reference = x0(4096);
        let e64 = (x0(64) - reference).abs();
        let e128 = (x0(128) - reference).abs();
        let ratio = e64 / e128;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn flow_group_property() {
        let v = PotentialModel::subquad(1.0).unwrap();
        let full = integrate_flow(&v, 1.0, 0.2, 4.0, 0.8, 1000).unwrap();
        let mid_idx = 400;
        let s_mid = full.times()[mid_idx];
        let restarted = integrate_flow(
            &v,
            s_mid,
            full.positions()[mid_idx],
            1.0,
            full.momenta()[mid_idx],
            400,
        )
        .unwrap();
        assert!((restarted.x0() - full.x0()).abs() < 1e-8);
        assert!((restarted.xi0() - full.xi0()).abs() < 1e-8);
    }

    #[test]
    fn autonomous_energy_is_conserved() {
        let v = PotentialModel::subquad(1.0).unwrap();
        let fr = integrate_flow(&v, 2.0, 0.5, 3.0, 1.0, 512).unwrap();
        let energy = |x: f64, p: f64| 0.5 * p * p + v.value(0.0, x);
        let e_ref = energy(fr.x_terminal(), fr.xi_terminal());
        for i in 0..fr.times().len() {
            let e = energy(fr.positions()[i], fr.momenta()[i]);
            assert!((e - e_ref).abs() / e_ref.abs() < 1e-8, "node {i}: {e} vs {e_ref}");
        }
    }

    #[test]
    fn runaway_trajectory_is_an_escape_error() {
        let v = PotentialModel::expression("exp(x^2)").unwrap();
        let res = integrate_flow(&v, 1.0, 30.0, 1.0, 0.0, 16);
        assert!(matches!(res, Err(Error::TrajectoryEscape(_))), "{res:?}");
    }

    #[test]
    fn action_closed_forms() {
        // Free: A = li^2 t / 2, exact under trapezoid (constant integrand).
        let free = integrate_flow(&PotentialModel::zero(), 1.0, 0.3, 2.0, 1.0, 64).unwrap();
        let a_free = action_integral(&free, &PotentialModel::zero()).unwrap();
        assert!((a_free - 2.0).abs() < 1e-12);
        // Linear g=1: tilde V = 0 and xi(s) = 3 - s, so
        // A = 1/2 int_0^1 (3-s)^2 ds = 19/6.
        let v = PotentialModel::linear(1.0);
        let fr = integrate_flow(&v, 1.0, 0.0, 2.0, 1.0, 512).unwrap();
        let a = action_integral(&fr, &v).unwrap();
        assert!((a - 19.0 / 6.0).abs() < 1e-5, "A {a}");
    }

    #[test]
    fn action_quadrature_is_second_order() {
        let v = PotentialModel::subquad(1.0).unwrap();
        let action = |n: usize| {
            let fr = integrate_flow(&v, 1.0, 0.2, 2.0, 1.0, n).unwrap();
            action_integral(&fr, &v).unwrap()
        };
        let (a1, a2, a3) = (action(64), action(128), action(256));
        let ratio = (a1 - a2).abs() / (a2 - a3).abs();
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn picard_zero_and_linear_cases() {
        let zero = picard_iterate(&PotentialModel::zero(), 1.0, 0.4, 8.0, 1.0, 4, 64).unwrap();
        for k in 1..zero.n_iterates() {
            assert_eq!(zero.iterate(k), zero.iterate(0));
        }
        // Linear force integrates exactly in one sweep, and trapezoid is
        // exact on the linear integrand.
        let v = PotentialModel::linear(1.0);
        let pic = picard_iterate(&v, 1.0, 0.0, 2.0, 1.0, 1, 128).unwrap();
        for (i, &s) in pic.times().iter().enumerate() {
            let exact = (s - 1.0) * 2.0 - 0.5 * (s - 1.0) * (s - 1.0);
            assert!((pic.iterate(1)[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn picard_converges_to_integrator_reference() {
        let v = PotentialModel::subquad(1.0).unwrap();
        let (t0, x, lambda, xi) = (1.0, 0.5, 256.0, 1.0);
        let n_quad = 1024;
        let pic = picard_iterate(&v, t0, x, lambda, xi, 6, n_quad).unwrap();
        let fr = integrate_flow(&v, t0, x, lambda, xi, n_quad).unwrap();
        let sup_ref = fr.positions().iter().fold(0.0f64, |m, &p| m.max(p.abs()));
        let sup_err = |k: usize| {
            pic.iterate(k)
                .iter()
                .zip(fr.positions())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let errs: Vec<f64> = (0..=6).map(sup_err).collect();
        assert!(errs[6] <= 1e-6 * sup_ref, "err {} vs sup {sup_ref}", errs[6]);
        // Decrease is geometric until the trapezoid quadrature floor;
        // once there, successive iterates may wiggle within the floor.
        assert!(errs[1] < 0.01 * errs[0], "{errs:?}");
        for k in 1..6 {
            assert!(errs[k + 1] <= errs[k] * 1.02, "not monotone at {k}: {errs:?}");
        }
    }

    #[test]
    fn bound_sweep_free_particle() {
        // For V = 0 the ratio is | xi + x/(t* lambda) |. At lambda = 4 the
        // perturbation reaches 1/2 and the sample at x = 1, xi = 1/2,
        // |t*| = 1/2 collapses to ratio 0; by lambda = 64 the ratio stays
        // near |xi| inside [1/4, 4].
        let v = PotentialModel::zero();
        let report =
            check_flow_bounds(&v, (-1.0, 1.0), 2.0, 1.0, &[4.0, 64.0, 256.0], 0.5).unwrap();
        assert!(!report.rows[0].pass, "{:?}", report.rows[0]);
        assert!(report.rows[1].pass && report.rows[2].pass);
        assert_eq!(report.lambda0, Some(64.0));
        // rho = 0 for the free particle, so the sweep itself is outside
        // the proved growth regime even though the bounds hold.
        assert!(report.outside_proved_regime);
    }

    #[test]
    fn bound_sweep_flags_and_errors() {
        let sq_low = PotentialModel::subquad(0.5).unwrap();
        let report =
            check_flow_bounds(&sq_low, (-1.0, 1.0), 2.0, 1.0, &[64.0], 0.5).unwrap();
        assert!(report.outside_proved_regime);
        let sq = PotentialModel::subquad(1.0).unwrap();
        let report = check_flow_bounds(&sq, (-1.0, 1.0), 2.0, 1.0, &[64.0], 0.5).unwrap();
        assert!(!report.outside_proved_regime);
        // p > 1 pushes the admissible |t*| window above t0 entirely.
        let err = check_flow_bounds(&sq_low, (-1.0, 1.0), 2.0, 1.0, &[4.0], 2.0);
        assert!(matches!(err, Err(Error::Domain(_))), "{err:?}");
    }

    #[test]
    fn remainder_scaling() {
        let zero = straightline_remainder(
            &PotentialModel::zero(),
            1.0,
            0.0,
            1.0,
            &[16.0, 64.0, 256.0],
        )
        .unwrap();
        assert!(zero.is_exact_zero());
        assert!(zero.slope1.is_none() && zero.slope2.is_none());

        // Linear(1), t = 1: delta1 = -1/2 and delta2 = 1 for every lambda.
        let lin = straightline_remainder(
            &PotentialModel::linear(1.0),
            1.0,
            0.0,
            1.0,
            &[16.0, 64.0, 256.0],
        )
        .unwrap();
        for r in &lin.rows {
            assert!((r.delta1 + 0.5).abs() < 1e-9, "{r:?}");
            assert!((r.delta2 - 1.0).abs() < 1e-9, "{r:?}");
        }
        assert!(lin.slope1.unwrap().abs() < 1e-6);
        assert!(lin.slope2.unwrap().abs() < 1e-6);

        let lambdas: Vec<f64> = (4..=12).map(|k| (1u64 << k) as f64).collect();
        let sq = straightline_remainder(
            &PotentialModel::subquad(0.5).unwrap(),
            1.0,
            0.0,
            1.0,
            &lambdas,
        )
        .unwrap();
        let s1 = sq.slope1.unwrap();
        let s2 = sq.slope2.unwrap();
        assert!((-0.65..=-0.35).contains(&s1), "slope1 {s1}");
        assert!((-0.65..=-0.35).contains(&s2), "slope2 {s2}");
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let fr = integrate_flow(&PotentialModel::zero(), 1.0, 0.0, 2.0, 1.0, 4).unwrap();
        let csv = fr.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("s,x,xi"));
        assert_eq!(lines.count(), 5);
    }
}
