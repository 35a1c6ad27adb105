//! Potentials V(t, x) with spatial derivatives and growth metadata.
//!
//! Built-ins: `zero`, `linear` with V = g x, and `subquad` with
//! V = (1 + x^2)^{rho/2}, whose derivatives follow the closed recurrence
//! V^{(k)} = P_k(x) (1 + x^2)^{rho/2 - k},
//! P_{k+1} = P_k'(x)(1 + x^2) + (rho - 2k) x P_k, P_0 = 1.
//! User expressions get finite-difference derivatives up to order 2.
//!
//! The growth profile (rho, c) declares |d^k V(t,x)| <= c (1+|x|)^{rho-k}
//! for k <= 2; the checker in `schrodinger` samples it empirically.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::special::fit_line;

/// Declared growth data: |d^k V| <= c (1 + |x|)^{rho - k} for k = 0..=2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthProfile {
    pub rho: f64,
    pub c: f64,
}

/// Largest spatial derivative order the closed recurrences are exposed
/// for; polynomial coefficient growth makes higher orders pointless here.
pub const MAX_ANALYTIC_ORDER: usize = 12;

/// Derivative order cap for expression potentials (finite differences).
pub const MAX_EXPRESSION_ORDER: usize = 2;

#[derive(Clone, Debug)]
pub enum PotentialModel {
    Zero,
    /// V = gradient * x.
    Linear { gradient: f64 },
    /// V = (1 + x^2)^{rho/2}, rho in [0, 2).
    SubQuadratic { rho: f64 },
    /// User expression in t and x with finite-difference derivatives.
    Expression { expr: Expr, growth: GrowthProfile, source: String },
}

impl PotentialModel {
    pub fn zero() -> Self {
        PotentialModel::Zero
    }

    pub fn linear(gradient: f64) -> Self {
        PotentialModel::Linear { gradient }
    }

    pub fn subquad(rho: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&rho) {
            return Err(Error::Domain(format!(
                "subquad exponent must lie in [0, 2), got {rho}"
            )));
        }
        Ok(PotentialModel::SubQuadratic { rho })
    }

    /// Expression potential with a numerically estimated growth profile.
    pub fn expression(source: &str) -> Result<Self> {
        let expr = Expr::parse(source)?;
        let growth = estimate_growth(&expr);
        Ok(PotentialModel::Expression { expr, growth, source: source.to_string() })
    }

    /// Expression potential with a caller-declared growth profile.
    pub fn expression_with_growth(source: &str, growth: GrowthProfile) -> Result<Self> {
        let expr = Expr::parse(source)?;
        Ok(PotentialModel::Expression { expr, growth, source: source.to_string() })
    }

    /// Parse the config forms `zero`, `linear g=<real>`,
    /// `subquad rho=<real>`, `expr <expression>`.
    pub fn parse(source: &str) -> Result<Self> {
        let s = source.trim();
        let (head, rest) = match s.split_once(char::is_whitespace) {
            Some((h, r)) => (h, r.trim()),
            None => (s, ""),
        };
        match head {
            "zero" if rest.is_empty() => Ok(PotentialModel::Zero),
            "linear" => Ok(PotentialModel::Linear { gradient: keyed_value(rest, "g")? }),
            "subquad" => PotentialModel::subquad(keyed_value(rest, "rho")?),
            "expr" if !rest.is_empty() => PotentialModel::expression(rest),
            _ => Err(Error::Config(format!(
                "unknown potential `{s}`; expected zero, linear g=<real>, subquad rho=<real>, or expr <expression>"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PotentialModel::Zero => "zero".into(),
            PotentialModel::Linear { gradient } => format!("linear g={gradient}"),
            PotentialModel::SubQuadratic { rho } => format!("subquad rho={rho}"),
            PotentialModel::Expression { source, .. } => format!("expr {source}"),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        match self {
            PotentialModel::Expression { expr, .. } => expr.mentions_time(),
            _ => false,
        }
    }

    pub fn max_order(&self) -> usize {
        match self {
            PotentialModel::Expression { .. } => MAX_EXPRESSION_ORDER,
            _ => MAX_ANALYTIC_ORDER,
        }
    }

    pub fn growth(&self) -> GrowthProfile {
        match *self {
            PotentialModel::Zero => GrowthProfile { rho: 0.0, c: 1.0 },
            PotentialModel::Linear { gradient } => GrowthProfile {
                rho: 1.0,
                c: gradient.abs().max(1.0),
            },
            PotentialModel::SubQuadratic { rho } => GrowthProfile {
                rho,
                c: subquad_growth_constant(rho),
            },
            PotentialModel::Expression { growth, .. } => growth,
        }
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        match self {
            PotentialModel::Zero => 0.0,
            PotentialModel::Linear { gradient } => gradient * x,
            PotentialModel::SubQuadratic { rho } => (1.0 + x * x).powf(rho / 2.0),
            PotentialModel::Expression { expr, .. } => expr.eval(t, x),
        }
    }

    /// k-th spatial derivative at (t, x); k = 0 is the value.
    pub fn x_derivative(&self, t: f64, x: f64, order: usize) -> Result<f64> {
        if order > self.max_order() {
            return Err(Error::MissingDerivative { order, max: self.max_order() });
        }
        Ok(match self {
            PotentialModel::Zero => 0.0,
            PotentialModel::Linear { gradient } => match order {
                0 => gradient * x,
                1 => *gradient,
                _ => 0.0,
            },
            PotentialModel::SubQuadratic { rho } => subquad_derivative(*rho, x, order),
            PotentialModel::Expression { expr, .. } => match order {
                0 => expr.eval(t, x),
                1 => {
                    let h = f64::EPSILON.cbrt() * (1.0 + x.abs());
                    (expr.eval(t, x + h) - expr.eval(t, x - h)) / (2.0 * h)
                }
                _ => {
                    let h = f64::EPSILON.powf(0.25) * (1.0 + x.abs());
                    (expr.eval(t, x + h) - 2.0 * expr.eval(t, x) + expr.eval(t, x - h))
                        / (h * h)
                }
            },
        })
    }

    /// tilde V(t, x) = V(t, x) - x dV/dx(t, x), always derived on the fly.
    pub fn tilde_v(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.value(t, x) - x * self.x_derivative(t, x, 1)?)
    }
}

fn keyed_value(params: &str, key: &str) -> Result<f64> {
    let (k, v) = params.split_once('=').ok_or_else(|| {
        Error::Config(format!("expected `{key}=<real>`, got `{params}`"))
    })?;
    if k.trim() != key {
        return Err(Error::Config(format!(
            "expected parameter `{key}`, got `{}`",
            k.trim()
        )));
    }
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad number `{}` for `{key}`", v.trim())))
}

/// V^{(k)}(x) for V = (1 + x^2)^{rho/2} via the polynomial recurrence.
fn subquad_derivative(rho: f64, x: f64, order: usize) -> f64 {
    // P_{k+1} = P_k'(1 + x^2) + (rho - 2k) x P_k, coefficients in powers of x.
    let mut p = vec![1.0f64];
    for k in 0..order {
        let mut next = vec![0.0; p.len() + 1];
        for (j, &c) in p.iter().enumerate() {
            if j >= 1 {
                // derivative term: j c x^{j-1} * (1 + x^2)
                next[j - 1] += j as f64 * c;
                next[j + 1] += j as f64 * c;
            }
            next[j + 1] += (rho - 2.0 * k as f64) * c;
        }
        while next.len() > 1 && next.last() == Some(&0.0) {
            next.pop();
        }
        p = next;
    }
    let mut poly = 0.0;
    for &c in p.iter().rev() {
        poly = poly * x + c;
    }
    poly * (1.0 + x * x).powf(rho / 2.0 - order as f64)
}

/// Smallest constant (up to a 1e-4 safety inflation) making the declared
/// bound |d^k V| <= c (1+|x|)^{rho-k} true for k <= 2 when
/// V = (1+x^2)^{rho/2}. The k = 2 ratio peaks near x ~ 0.3 and tends to
/// rho|rho-1| at infinity, so a dense sample of [0, 4] plus log-spaced
/// tail points plus the asymptotes covers the sup.
fn subquad_growth_constant(rho: f64) -> f64 {
    let mut sup = 1.0f64.max(rho).max(rho * (rho - 1.0).abs());
    let ratio = |x: f64, k: usize| {
        subquad_derivative(rho, x, k).abs() / (1.0 + x).powf(rho - k as f64)
    };
    for k in 1..=2 {
        for i in 0..=4096 {
            sup = sup.max(ratio(i as f64 / 1024.0, k));
        }
        for j in 0..=256 {
            sup = sup.max(ratio(4.0 * 1.06f64.powi(j), k));
        }
    }
    sup * 1.0001
}

/// Estimate (rho, c) for an expression by fitting the large-|x| growth of
/// |V| and taking the worst derivative ratio on a moderate box. Callers
/// needing exact constants should declare them instead.
fn estimate_growth(expr: &Expr) -> GrowthProfile {
    let t_samples = [0.0, 0.5, 1.0];
    let radii = [4.0f64, 16.0, 64.0, 256.0];
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let v = t_samples
                .iter()
                .flat_map(|&t| [expr.eval(t, r).abs(), expr.eval(t, -r).abs()])
                .fold(0.0f64, f64::max)
                .max(1e-12);
            (r.ln(), v.ln())
        })
        .collect();
    let (slope, _) = fit_line(&pts);
    let rho = slope.clamp(0.0, 2.0 - 1e-9);
    let model = PotentialModel::Expression {
        expr: expr.clone(),
        growth: GrowthProfile { rho, c: 1.0 },
        source: String::new(),
    };
    let mut c: f64 = 1.0;
    for order in 0..=MAX_EXPRESSION_ORDER {
        for &t in &t_samples {
            for i in 0..=64 {
                let x = -8.0 + 0.25 * i as f64;
                if let Ok(d) = model.x_derivative(t, x, order) {
                    let ratio = d.abs() / (1.0 + x.abs()).powf(rho - order as f64);
                    if ratio.is_finite() {
                        c = c.max(ratio);
                    }
                }
            }
        }
    }
    GrowthProfile { rho, c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config_forms() {
        assert!(matches!(PotentialModel::parse("zero"), Ok(PotentialModel::Zero)));
        match PotentialModel::parse("linear g=1.5") {
            Ok(PotentialModel::Linear { gradient }) => assert_eq!(gradient, 1.5),
            other => panic!("{other:?}"),
        }
        match PotentialModel::parse("subquad rho=0.5") {
            Ok(PotentialModel::SubQuadratic { rho }) => assert_eq!(rho, 0.5),
            other => panic!("{other:?}"),
        }
        assert!(PotentialModel::parse("expr 0.1*sin(x)").is_ok());
        assert!(PotentialModel::parse("subquad rho=2.5").is_err());
        assert!(PotentialModel::parse("linear q=1").is_err());
        assert!(PotentialModel::parse("cubic").is_err());
    }

    #[test]
    fn subquad_derivatives_match_hand_formulas() {
        // rho = 1: V' = x(1+x^2)^{-1/2}, V'' = (1+x^2)^{-3/2},
        // V''' = -3x(1+x^2)^{-5/2}.
        let v = PotentialModel::subquad(1.0).unwrap();
        for x in [-2.0, -0.7, 0.0, 0.4, 1.9] {
            let s = 1.0 + x * x;
            assert!((v.x_derivative(0.0, x, 1).unwrap() - x / s.sqrt()).abs() < 1e-14);
            assert!((v.x_derivative(0.0, x, 2).unwrap() - s.powf(-1.5)).abs() < 1e-14);
            assert!(
                (v.x_derivative(0.0, x, 3).unwrap() + 3.0 * x * s.powf(-2.5)).abs() < 1e-14
            );
        }
    }

    #[test]
    fn subquad_recurrence_consistent_with_finite_differences() {
        // d/dx of order k equals order k+1, checked by central differences.
        let v = PotentialModel::subquad(0.5).unwrap();
        let h = 1e-5;
        for order in 0..5 {
            for x in [-1.3, 0.2, 2.4] {
                let fd = (v.x_derivative(0.0, x + h, order).unwrap()
                    - v.x_derivative(0.0, x - h, order).unwrap())
                    / (2.0 * h);
                let direct = v.x_derivative(0.0, x, order + 1).unwrap();
                assert!(
                    (fd - direct).abs() < 1e-8 * direct.abs().max(1.0),
                    "order {order} at {x}: fd {fd}, direct {direct}"
                );
            }
        }
    }

    #[test]
    fn tilde_v_values() {
        // linear: V - x V' = gx - xg = 0.
        let lin = PotentialModel::linear(3.0);
        assert_eq!(lin.tilde_v(0.0, 1.7).unwrap(), 0.0);
        // subquad(1): (1+x^2)^{1/2} - x^2 (1+x^2)^{-1/2} = (1+x^2)^{-1/2}.
        let sq = PotentialModel::subquad(1.0).unwrap();
        assert!((sq.tilde_v(0.0, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn expression_finite_differences() {
        let v = PotentialModel::expression("0.5*x^2").unwrap();
        assert!((v.x_derivative(0.0, 1.3, 1).unwrap() - 1.3).abs() < 1e-9);
        assert!((v.x_derivative(0.0, -0.4, 2).unwrap() - 1.0).abs() < 1e-6);
        assert!(matches!(
            v.x_derivative(0.0, 0.0, 3),
            Err(Error::MissingDerivative { order: 3, max: 2 })
        ));
    }

    #[test]
    fn growth_profiles() {
        assert_eq!(PotentialModel::zero().growth().rho, 0.0);
        let lin = PotentialModel::linear(-2.0).growth();
        assert_eq!((lin.rho, lin.c), (1.0, 2.0));
        // Certified c covers the worst second-derivative ratio, which
        // exceeds max(1, rho): 1.1430 at rho = 1, about 1.57 at rho = 1.5.
        let sq1 = PotentialModel::subquad(1.0).unwrap().growth();
        assert_eq!(sq1.rho, 1.0);
        assert!((sq1.c - 1.143).abs() < 5e-3, "c {}", sq1.c);
        let sq = PotentialModel::subquad(1.5).unwrap().growth();
        assert_eq!(sq.rho, 1.5);
        assert!(sq.c > 1.5 && sq.c < 1.7, "c {}", sq.c);
        // Estimates: quadratic growth clamps to just under 2; bounded
        // oscillation reads as rho ~ 0.
        let quad = PotentialModel::expression("x^2").unwrap().growth();
        assert!(quad.rho > 1.9, "rho {}", quad.rho);
        let osc = PotentialModel::expression("sin(x)").unwrap().growth();
        assert!(osc.rho < 0.2, "rho {}", osc.rho);
    }

    #[test]
    fn time_dependence() {
        assert!(!PotentialModel::subquad(1.0).unwrap().is_time_dependent());
        assert!(PotentialModel::expression("sin(t)*x")
            .unwrap()
            .is_time_dependent());
    }
}
