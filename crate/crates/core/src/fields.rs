//! Grids, sampled fields and analytic descriptors.
//!
//! Everything downstream works on a uniform periodic grid of power-of-two
//! size: nodes x_k = x_min + k (x_max - x_min)/n for k = 0..n-1, with the
//! right endpoint excluded so the FFT dual grid is exact. Quadrature on
//! such a grid is the trapezoid rule of the periodic extension, i.e. a
//! plain node sum times the spacing; for fields that vanish at the box
//! edge this carries spectral accuracy on smooth data.
//!
//! A field is "boundary clean" when the outer 5% of nodes carry at most
//! 1e-8 of the global peak modulus. Operations that assume decay inside
//! the box check this and attach a [`DecayWarning`] instead of silently
//! producing wrap-around artifacts.

use crate::error::{Error, Result};
use crate::packet;
use num_complex::Complex64;

/// Edge-to-peak modulus ratio above which a field stops counting as
/// boundary clean.
pub const BOUNDARY_CLEAN_RATIO: f64 = 1e-8;

/// Largest number of grid spacings a scaled window may shrink to before
/// quadrature on it is refused: lambda^b * dx <= this.
pub const WINDOW_RESOLVABILITY: f64 = 0.5;

/// Uniform periodic grid on [x_min, x_max), n_points a power of two >= 16.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 16, got {n_points}"
            )));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Box length x_max - x_min.
    pub fn span(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        self.span() / self.n_points as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + self.spacing() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Nyquist frequency pi/dx of the dual grid.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    /// Index of the node nearest to x (clamped into range).
    pub fn nearest_node(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.spacing()).round();
        (i.max(0.0) as usize).min(self.n_points - 1)
    }
}

/// Warning that a field carries non-negligible mass at the box edge.
#[derive(Clone, Copy, Debug)]
pub struct DecayWarning {
    /// max |f| over the outer 5% of nodes divided by max |f| overall.
    pub edge_ratio: f64,
}

/// A value bundled with an optional boundary-decay warning.
#[derive(Clone, Debug)]
pub struct Flagged<T> {
    pub value: T,
    pub warning: Option<DecayWarning>,
}

impl<T> Flagged<T> {
    pub fn clean(value: T) -> Self {
        Self { value, warning: None }
    }

    pub fn new(value: T, warning: Option<DecayWarning>) -> Self {
        Self { value, warning }
    }
}

/// Complex samples over a [`Grid1D`].
#[derive(Clone, Debug)]
pub struct SampledField {
    grid: Grid1D,
    samples: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid1D, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples on a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid1D, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let samples = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self { grid, samples }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    /// Discrete L^2 norm sqrt(dx sum |f_k|^2).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.spacing()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Edge-to-peak modulus ratio over the outer 5% of nodes (2.5% per side,
    /// at least one node each). Zero fields report 0.
    pub fn boundary_ratio(&self) -> f64 {
        let n = self.samples.len();
        let edge = (n / 40).max(1);
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let left = self.samples[..edge].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let right = self.samples[n - edge..].iter().map(|z| z.norm()).fold(0.0, f64::max);
        left.max(right) / peak
    }

    pub fn boundary_clean(&self) -> bool {
        self.boundary_ratio() <= BOUNDARY_CLEAN_RATIO
    }

    pub fn decay_warning(&self) -> Option<DecayWarning> {
        let r = self.boundary_ratio();
        (r > BOUNDARY_CLEAN_RATIO).then_some(DecayWarning { edge_ratio: r })
    }

    /// Pointwise sum; grids must match exactly.
    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("adding fields on different grids".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SampledField { grid: self.grid, samples })
    }

    pub fn scaled(&self, c: Complex64) -> SampledField {
        SampledField {
            grid: self.grid,
            samples: self.samples.iter().map(|z| c * z).collect(),
        }
    }

    /// CSV serialization: header `x,re,im`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 64 + 16);
        out.push_str("x,re,im\n");
        for (i, z) in self.samples.iter().enumerate() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.grid.node(i),
                z.re,
                z.im
            ));
        }
        out
    }
}

/// Analytic test signals. `Dirac` never samples; it exists for the
/// closed-form transform routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalDescriptor {
    /// L^2-normalized pi^{-1/4} w^{-1/2} e^{-(x-center)^2/(2 w^2)} e^{i momentum x}.
    Gaussian { center: f64, width: f64, momentum: f64 },
    /// e^{i momentum x}.
    PlaneWave { momentum: f64 },
    /// 0 for x < jump, 1 for x >= jump.
    Heaviside { jump: f64 },
    /// |x - center|^exponent e^{i momentum x}, exponent in (0, 2).
    Cusp { center: f64, exponent: f64, momentum: f64 },
    /// Point mass at center; analytic-only.
    Dirac { center: f64 },
}

impl SignalDescriptor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SignalDescriptor::Gaussian { width, .. } if width <= 0.0 => Err(Error::Domain(
                format!("gaussian width must be positive, got {width}"),
            )),
            SignalDescriptor::Cusp { exponent, .. } if !(0.0 < exponent && exponent < 2.0) => {
                Err(Error::Domain(format!(
                    "cusp exponent must lie in (0, 2), got {exponent}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn is_dirac(&self) -> bool {
        matches!(self, SignalDescriptor::Dirac { .. })
    }

    /// Pointwise value; panics on `Dirac` (guarded by `sample_signal`).
    pub fn eval(&self, x: f64) -> Complex64 {
        match *self {
            SignalDescriptor::Gaussian { center, width, momentum } => {
                let amp = std::f64::consts::PI.powf(-0.25) / width.sqrt();
                let u = (x - center) / width;
                amp * (-0.5 * u * u).exp() * Complex64::new(0.0, momentum * x).exp()
            }
            SignalDescriptor::PlaneWave { momentum } => Complex64::new(0.0, momentum * x).exp(),
            SignalDescriptor::Heaviside { jump } => {
                Complex64::new(if x >= jump { 1.0 } else { 0.0 }, 0.0)
            }
            SignalDescriptor::Cusp { center, exponent, momentum } => {
                (x - center).abs().powf(exponent) * Complex64::new(0.0, momentum * x).exp()
            }
            SignalDescriptor::Dirac { .. } => {
                unreachable!("dirac signals cannot be evaluated pointwise")
            }
        }
    }
}

/// Sample a descriptor on a grid. Diracs are refused: they only exist
/// through the analytic transform route.
pub fn sample_signal(d: &SignalDescriptor, grid: &Grid1D) -> Result<SampledField> {
    d.validate()?;
    if d.is_dirac() {
        return Err(Error::UnsupportedSampling(
            "dirac carries no samples; use the analytic transform route".into(),
        ));
    }
    Ok(SampledField::from_fn(*grid, |x| d.eval(x)))
}

/// Window base shapes, all L^2-normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindowBase {
    /// pi^{-1/4} e^{-x^2/2}.
    Gaussian,
    /// Hermite function (2^m m! sqrt(pi))^{-1/2} H_m(x) e^{-x^2/2}.
    Hermite(usize),
}

/// A scaled window family phi_lambda(x) = lambda^{b/2} phi0(lambda^b x)
/// with concentration exponent b in (0, 1). The scaling is an L^2 isometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowFamily {
    pub base: WindowBase,
    pub scale_exponent: f64,
}

pub const MAX_HERMITE_ORDER: usize = 8;

impl WindowFamily {
    pub fn new(base: WindowBase, scale_exponent: f64) -> Result<Self> {
        if !(scale_exponent > 0.0 && scale_exponent < 1.0) {
            return Err(Error::Domain(format!(
                "scale exponent must lie in (0, 1), got {scale_exponent}"
            )));
        }
        if let WindowBase::Hermite(m) = base {
            if m > MAX_HERMITE_ORDER {
                return Err(Error::Domain(format!(
                    "hermite order {m} exceeds supported maximum {MAX_HERMITE_ORDER}"
                )));
            }
        }
        Ok(Self { base, scale_exponent })
    }

    pub fn gaussian(scale_exponent: f64) -> Result<Self> {
        Self::new(WindowBase::Gaussian, scale_exponent)
    }

    pub fn hermite(order: usize, scale_exponent: f64) -> Result<Self> {
        Self::new(WindowBase::Hermite(order), scale_exponent)
    }

    pub fn label(&self) -> String {
        match self.base {
            WindowBase::Gaussian => "gaussian".into(),
            WindowBase::Hermite(m) => format!("hermite{m}"),
        }
    }

    /// Largest lambda whose window is still resolvable on `grid`,
    /// from lambda^b dx <= WINDOW_RESOLVABILITY.
    pub fn max_resolvable_lambda(&self, grid: &Grid1D) -> f64 {
        (WINDOW_RESOLVABILITY / grid.spacing()).powf(1.0 / self.scale_exponent)
    }
}

/// Sample phi_lambda on a grid. Errors if the window is too narrow for the
/// spacing or carries boundary mass (box too small).
pub fn scaled_window(family: &WindowFamily, lambda: f64, grid: &Grid1D) -> Result<SampledField> {
    if lambda < 1.0 {
        return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
    }
    let max_lambda = family.max_resolvable_lambda(grid);
    if lambda > max_lambda {
        return Err(Error::Resolution { requested: lambda, max_admissible: max_lambda });
    }
    let atom = packet::window_atom(family, lambda)?;
    let field = SampledField::from_fn(*grid, |x| atom.eval(x));
    if !field.boundary_clean() {
        return Err(Error::InvalidGrid(format!(
            "scaled window at lambda {lambda} is not boundary clean (edge ratio {:.2e})",
            field.boundary_ratio()
        )));
    }
    Ok(field)
}
