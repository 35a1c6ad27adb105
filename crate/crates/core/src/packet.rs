//! Closed-form transform machinery.
//!
//! Every window this crate ships, scaled or freely evolved, is a
//! polynomial times a complex Gaussian. Pairing such a window against the
//! analytic test signals reduces the transform integral to Gaussian
//! moments on the full line or the half line, so we get machine-accurate
//! reference values at arbitrary phase-space points with no grid anywhere.
//! The grid pipeline in `wpt` is tested against this module, never the
//! other way around.
//!
//! Full-line moments J_k = int u^k e^{-a u^2 - q u} du obey
//!     J_0 = sqrt(pi/a) e^{q^2/(4a)},   J_{k+1} = (k J_{k-1} - q J_k) / (2a).
//! We carry the scaled moments J_k e^{-q^2/(4a)} and fold the exponential
//! into one combined exponent per transform value, so intermediate factors
//! never overflow even when the final value is tiny.
//!
//! Half-line moments M_k = int_0^inf s^k e^{-a(s+d)^2 - i(s+d) xi} ds need
//! the Faddeeva function:
//!     M_0 = (1/2) sqrt(pi/a) e^{-a d^2 - i d xi} w(i zeta),
//!     zeta = sqrt(a) d + i xi / (2 sqrt(a)),
//! with w evaluated on the upper half-plane only; the lower-half case is
//! reflected analytically so the reflection exponent collapses to
//! e^{-xi^2/(4a)}, again overflow-free. The recurrence then matches the
//! full-line one with q = 2 a d + i xi and an extra boundary term:
//!     M_1 = (e^{-a d^2 - i d xi} - q M_0) / (2a),
//!     M_{k+1} = (k M_{k-1} - q M_k) / (2a).

use crate::error::{Error, Result};
use crate::fields::{SignalDescriptor, WindowBase, WindowFamily};
use crate::special::faddeeva_upper;
use num_complex::Complex64;
use std::f64::consts::PI;

/// p(u) e^{-alpha u^2} with complex coefficients and Re(alpha) > 0.
#[derive(Clone, Debug)]
pub struct PolyGauss {
    coeffs: Vec<Complex64>,
    alpha: Complex64,
}

impl PolyGauss {
    pub fn new(coeffs: Vec<Complex64>, alpha: Complex64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("atom needs at least one coefficient".into()));
        }
        if !(alpha.re > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "atom exponent must have positive real part, got {alpha}"
            )));
        }
        Ok(Self { coeffs, alpha })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        let mut p = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            p = p * u + c;
        }
        p * (-self.alpha * u * u).exp()
    }

    /// Complex conjugate atom; represents conj(phi) on the real line.
    pub fn conjugated(&self) -> PolyGauss {
        PolyGauss {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            alpha: self.alpha.conj(),
        }
    }

    /// Squared L^2 norm, from even Gaussian moments of |p(u)|^2 e^{-2 Re(alpha) u^2}.
    pub fn l2_norm_sqr(&self) -> f64 {
        let a = Complex64::new(2.0 * self.alpha.re, 0.0);
        let moments = gauss_moments_scaled(a, Complex64::new(0.0, 0.0), 2 * self.degree());
        let mut total = Complex64::new(0.0, 0.0);
        for (j, cj) in self.coeffs.iter().enumerate() {
            for (k, ck) in self.coeffs.iter().enumerate() {
                total += cj * ck.conj() * moments[j + k];
            }
        }
        total.re
    }

    /// Radius beyond which |p(u)| e^{-Re(alpha) u^2} stays below tol.
    /// Fixed-point refinement of r^2 = ln(P(r)/tol)/Re(alpha) with
    /// P(r) = sum |c_k| r^k; three sweeps over-shoot slightly, which is
    /// the safe direction for truncating quadrature.
    pub fn support_radius(&self, tol: f64) -> f64 {
        let re_a = self.alpha.re;
        let psum: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        let psum = psum.max(1e-300);
        let mut r = ((psum / tol).ln().max(1.0) / re_a).sqrt();
        for _ in 0..3 {
            let p: f64 = self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm() * r.powi(k as i32))
                .sum();
            r = ((p.max(psum) / tol).ln().max(1.0) / re_a).sqrt();
        }
        r
    }
}

/// Physicists' Hermite polynomial coefficients, H_m(x) = sum c_j x^j.
pub fn hermite_coefficients(m: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if m == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for k in 1..m {
        let mut next = vec![0.0; k + 2];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] += 2.0 * c;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= 2.0 * k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// L^2 normalization (2^m m! sqrt(pi))^{-1/2} of the Hermite function.
fn hermite_norm(m: usize) -> f64 {
    let mut fact = 1.0;
    for k in 2..=m {
        fact *= k as f64;
    }
    1.0 / (2f64.powi(m as i32) * fact * PI.sqrt()).sqrt()
}

/// Atom for the freely evolved scaled window
/// phi_lambda^{(t)}(u) = lambda^{b/2} [U0(t lambda^{2b}) phi0](lambda^b u).
///
/// The Gaussian base is the order-0 Hermite function, and free evolution
/// of an order-m Hermite function is again a polynomial times a Gaussian:
///     U0(tau) h_m(x) = (1 + i tau)^{-1/2} e^{-i m atan(tau)}
///                      h_m(x / sqrt(1 + tau^2)) e^{i tau x^2 / (2 (1 + tau^2))},
/// with combined Gaussian exponent x^2 / (2 (1 + i tau)). At t = 0 every
/// factor is exactly 1, so this reproduces the static scaled window bit
/// for bit.
pub fn evolved_window_atom(family: &WindowFamily, lambda: f64, t: f64) -> Result<PolyGauss> {
    if !(lambda >= 1.0) {
        return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
    }
    let m = match family.base {
        WindowBase::Gaussian => 0,
        WindowBase::Hermite(m) => m,
    };
    let b = family.scale_exponent;
    let lam_b = lambda.powf(b);
    let lam_2b = lam_b * lam_b;
    let tau = t * lam_2b;
    let one_itau = Complex64::new(1.0, tau);
    let spread = (1.0 + tau * tau).sqrt();
    let amp = lam_b.sqrt() * hermite_norm(m) / one_itau.sqrt()
        * Complex64::new(0.0, -(m as f64) * tau.atan()).exp();
    let coeffs = hermite_coefficients(m)
        .iter()
        .enumerate()
        .map(|(j, &hj)| amp * hj * (lam_b / spread).powi(j as i32))
        .collect();
    let alpha = Complex64::new(lam_2b, 0.0) / (2.0 * one_itau);
    PolyGauss::new(coeffs, alpha)
}

/// Atom for the static scaled window phi_lambda.
pub fn window_atom(family: &WindowFamily, lambda: f64) -> Result<PolyGauss> {
    evolved_window_atom(family, lambda, 0.0)
}

/// Scaled full-line moments J_k e^{-q^2/(4a)} for k = 0..=k_max.
fn gauss_moments_scaled(a: Complex64, q: Complex64, k_max: usize) -> Vec<Complex64> {
    let mut j = Vec::with_capacity(k_max + 1);
    j.push((PI / a).sqrt());
    if k_max >= 1 {
        j.push(-q * j[0] / (2.0 * a));
    }
    for k in 1..k_max {
        let next = (k as f64 * j[k - 1] - q * j[k]) / (2.0 * a);
        j.push(next);
    }
    j
}

/// Half-line moments M_k = int_0^inf s^k e^{-a(s+d)^2 - i(s+d) xi} ds
/// for k = 0..=k_max, evaluated overflow-free as described in the module
/// docs.
fn half_line_moments(a: Complex64, d: f64, xi: f64, k_max: usize) -> Vec<Complex64> {
    let i = Complex64::i();
    let sqrt_a = a.sqrt();
    let zeta = sqrt_a * d + i * xi / (2.0 * sqrt_a);
    let g0 = (-a * d * d - i * (d * xi)).exp();
    let half_pref = 0.5 * (PI / a).sqrt();
    let iz = i * zeta;
    let m0 = if iz.im >= 0.0 {
        half_pref * g0 * faddeeva_upper(iz)
    } else {
        // w(i zeta) = 2 e^{zeta^2} - w(-i zeta); the first term combines
        // with g0 to e^{-xi^2/(4a)}, which cannot overflow.
        2.0 * half_pref * (-xi * xi / (4.0 * a)).exp() - half_pref * g0 * faddeeva_upper(-iz)
    };
    let mut m = Vec::with_capacity(k_max + 1);
    m.push(m0);
    let q = 2.0 * a * d + i * xi;
    if k_max >= 1 {
        m.push((g0 - q * m[0]) / (2.0 * a));
    }
    for k in 1..k_max {
        let next = (k as f64 * m[k - 1] - q * m[k]) / (2.0 * a);
        m.push(next);
    }
    m
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// Closed-form transform W(x, xi) = int conj(phi(y - x)) f(y) e^{-i y xi} dy
/// of an analytic signal against an atom window. Cusp signals have no
/// closed form and are refused.
pub fn wpt_closed_form(
    atom: &PolyGauss,
    signal: &SignalDescriptor,
    x: f64,
    xi: f64,
) -> Result<Complex64> {
    signal.validate()?;
    let catom = atom.conjugated();
    let a = catom.alpha;
    let i = Complex64::i();
    match *signal {
        SignalDescriptor::Dirac { center } => {
            Ok(catom.eval(center - x) * (-i * (center * xi)).exp())
        }
        SignalDescriptor::PlaneWave { momentum } => {
            let q = i * (xi - momentum);
            let moments = gauss_moments_scaled(a, q, catom.degree());
            let s: Complex64 = catom.coeffs.iter().zip(&moments).map(|(c, j)| c * j).sum();
            let e = q * q / (4.0 * a) + i * (momentum * x - x * xi);
            Ok(e.exp() * s)
        }
        SignalDescriptor::Gaussian { center, width, momentum } => {
            let beta = 1.0 / (2.0 * width * width);
            let d = x - center;
            let amp = PI.powf(-0.25) / width.sqrt();
            let at = a + beta;
            let q = Complex64::new(2.0 * beta * d, xi - momentum);
            let moments = gauss_moments_scaled(at, q, catom.degree());
            let s: Complex64 = catom.coeffs.iter().zip(&moments).map(|(c, j)| c * j).sum();
            let e = q * q / (4.0 * at) + Complex64::new(-beta * d * d, momentum * x - x * xi);
            Ok(amp * e.exp() * s)
        }
        SignalDescriptor::Heaviside { jump } => {
            let d = jump - x;
            let moments = half_line_moments(a, d, xi, catom.degree());
            let mut s = Complex64::new(0.0, 0.0);
            for (k, c) in catom.coeffs.iter().enumerate() {
                let mut inner = Complex64::new(0.0, 0.0);
                for (j, mj) in moments.iter().enumerate().take(k + 1) {
                    inner += binomial(k, j) * d.powi((k - j) as i32) * mj;
                }
                s += c * inner;
            }
            Ok((-i * (x * xi)).exp() * s)
        }
        SignalDescriptor::Cusp { .. } => Err(Error::NoClosedForm(
            "cusp signals have no closed-form transform; use the grid route".into(),
        )),
    }
}

/// Closed-form transform against the static scaled window phi_lambda.
pub fn wpt_point(
    family: &WindowFamily,
    lambda: f64,
    signal: &SignalDescriptor,
    x: f64,
    xi: f64,
) -> Result<Complex64> {
    wpt_closed_form(&window_atom(family, lambda)?, signal, x, xi)
}

/// Closed-form transform against the evolved window phi_lambda^{(t)}.
pub fn wpt_point_evolved(
    family: &WindowFamily,
    lambda: f64,
    t: f64,
    signal: &SignalDescriptor,
    x: f64,
    xi: f64,
) -> Result<Complex64> {
    wpt_closed_form(&evolved_window_atom(family, lambda, t)?, signal, x, xi)
}
