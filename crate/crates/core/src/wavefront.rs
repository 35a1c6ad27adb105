//! Wavefront-set detection by windowed-transform decay: probe the sup of
//! |W_{phi_lambda} f(x, lambda xi)| over a conic neighborhood for a ladder
//! of lambda values and classify the fitted log-log slope. The flowed
//! variant evolves the window backward in time and reads the transform at
//! the classically flowed phase-space point, so singularities are tracked
//! along trajectories instead of at fixed points.
//!
//! Rapid decay cannot be certified on a finite ladder, only bounded: two
//! thresholds separate Regular / Inconclusive / InWavefront.

use crate::error::{Error, Result};
use crate::fields::{DecayWarning, SampledField, SignalDescriptor, WindowFamily};
use crate::hamflow::integrate_flow;
use crate::packet::{evolved_window_atom, window_atom, wpt_closed_form, PolyGauss};
use crate::potential::PotentialModel;
use crate::special::fit_line;
use crate::wpt::{wpt_direct, PhasePoint};

pub const THETA_REGULAR_DEFAULT: f64 = -2.5;
pub const THETA_WAVEFRONT_DEFAULT: f64 = -1.0;

/// Magnitudes below this floor are treated as numerically zero.
pub const MAG_FLOOR: f64 = 1e-300;

/// RK4 steps per probe trajectory in the flowed detector.
const FLOW_PROBE_STEPS: usize = 256;

/// Default window scale exponent b = min((2-rho)/4, 1/4) for detection
/// along the flow of a potential with growth exponent rho.
pub fn default_scale_exponent(rho: f64) -> f64 {
    ((2.0 - rho) / 4.0).min(0.25)
}

/// Corollary regime (rho < 1): b = min(1/4, 1-rho).
pub fn default_scale_exponent_corollary(rho: f64) -> f64 {
    0.25f64.min(1.0 - rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionSet {
    Plus,
    Minus,
    Both,
}

impl DirectionSet {
    pub fn directions(&self) -> &'static [f64] {
        match self {
            DirectionSet::Plus => &[1.0],
            DirectionSet::Minus => &[-1.0],
            DirectionSet::Both => &[1.0, -1.0],
        }
    }
}

/// Sampled conic neighborhood: positions in K, momenta lambda * r * dir
/// with the radial factor r in [1/a, a] and dir from the direction set.
#[derive(Clone, Debug)]
pub struct ConicNeighborhood {
    pub k_interval: (f64, f64),
    pub directions: DirectionSet,
    pub a: f64,
    pub n_x: usize,
    pub n_xi: usize,
}

impl ConicNeighborhood {
    pub fn new(
        k_interval: (f64, f64),
        directions: DirectionSet,
        a: f64,
    ) -> Result<Self> {
        Self::with_counts(k_interval, directions, a, 5, 5)
    }

    pub fn with_counts(
        k_interval: (f64, f64),
        directions: DirectionSet,
        a: f64,
        n_x: usize,
        n_xi: usize,
    ) -> Result<Self> {
        if !(k_interval.0 <= k_interval.1) {
            return Err(Error::Domain("empty position interval K".into()));
        }
        if a < 1.0 {
            return Err(Error::Domain(format!("cone parameter a must be >= 1, got {a}")));
        }
        if n_x < 3 || n_xi < 3 {
            return Err(Error::Domain("need at least 3 samples per axis".into()));
        }
        Ok(Self { k_interval, directions, a, n_x, n_xi })
    }

    fn x_samples(&self) -> Vec<f64> {
        let (lo, hi) = self.k_interval;
        (0..self.n_x)
            .map(|i| lo + (hi - lo) * i as f64 / (self.n_x - 1) as f64)
            .collect()
    }

    fn xi_samples(&self) -> Vec<f64> {
        let (lo, hi) = (1.0 / self.a, self.a);
        let mags: Vec<f64> = (0..self.n_xi)
            .map(|i| lo + (hi - lo) * i as f64 / (self.n_xi - 1) as f64)
            .collect();
        let mut out = Vec::with_capacity(mags.len() * 2);
        for &dir in self.directions.directions() {
            out.extend(mags.iter().map(|&m| dir * m));
        }
        out
    }
}

/// Probe target: closed-form descriptor or sampled data. Descriptors are
/// evaluated through the analytic transform (no grid, no lambda cap);
/// sampled data goes through truncated quadrature under the resolution
/// budget.
#[derive(Clone, Copy, Debug)]
pub enum ProbeInput<'a> {
    Analytic(&'a SignalDescriptor),
    Sampled(&'a SampledField),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlopeFit {
    /// Every magnitude on the fitting sub-range sat below the floor.
    NumericallyZero,
    Fitted(f64),
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub candidate: PhasePoint,
    pub lambda_list: Vec<f64>,
    pub sup_magnitudes: Vec<f64>,
    pub slope: SlopeFit,
    pub warning: Option<DecayWarning>,
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,sup_mag\n");
        for (l, m) in self.lambda_list.iter().zip(&self.sup_magnitudes) {
            out.push_str(&format!("{l:.16e},{m:.16e}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Regular,
    InWavefront,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Regular => write!(f, "Regular"),
            Verdict::InWavefront => write!(f, "InWavefront"),
            Verdict::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    /// None when the report was numerically zero.
    pub slope: Option<f64>,
    pub theta_regular: f64,
    pub theta_wavefront: f64,
}

/// Least-squares slope of log magnitude against log lambda over the upper
/// half of the ladder. Magnitudes below the floor are dropped; if the
/// whole sub-range is below the floor the decay is beyond any power law.
pub fn fit_decay_slope(lambda_list: &[f64], magnitudes: &[f64]) -> Result<SlopeFit> {
    if lambda_list.len() != magnitudes.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} lambdas vs {} magnitudes",
            lambda_list.len(),
            magnitudes.len()
        )));
    }
    let start = lambda_list.len() / 2;
    let lams = &lambda_list[start..];
    let mags = &magnitudes[start..];
    if mags.iter().all(|&m| m < MAG_FLOOR) {
        return Ok(SlopeFit::NumericallyZero);
    }
    let pts: Vec<(f64, f64)> = lams
        .iter()
        .zip(mags)
        .filter(|(_, &m)| m >= MAG_FLOOR)
        .map(|(&l, &m)| (l.ln(), m.ln()))
        .collect();
    if pts.len() < 3 {
        // An underflowed tail means the sup collapsed faster than any
        // representable power law; only a still-positive tail with too few
        // points is unusable.
        if mags.last().is_some_and(|&m| m < MAG_FLOOR) {
            return Ok(SlopeFit::NumericallyZero);
        }
        return Err(Error::InsufficientData(format!(
            "only {} positive magnitudes on the fitting sub-range",
            pts.len()
        )));
    }
    Ok(SlopeFit::Fitted(fit_line(&pts).0))
}

/// Verdict from a fitted slope against the two thresholds.
pub fn classify(
    report: &DecayReport,
    theta_regular: f64,
    theta_wavefront: f64,
) -> Result<Classification> {
    if !(theta_regular < theta_wavefront) {
        return Err(Error::Config(format!(
            "thresholds must satisfy theta_regular < theta_wavefront, got {theta_regular} >= {theta_wavefront}"
        )));
    }
    let (verdict, slope) = match report.slope {
        SlopeFit::NumericallyZero => (Verdict::Regular, None),
        SlopeFit::Fitted(s) => {
            let v = if s <= theta_regular {
                Verdict::Regular
            } else if s >= theta_wavefront {
                Verdict::InWavefront
            } else {
                Verdict::Inconclusive
            };
            (v, Some(s))
        }
    };
    Ok(Classification {
        verdict,
        slope,
        theta_regular,
        theta_wavefront,
    })
}

fn check_ladder(lambda_list: &[f64]) -> Result<()> {
    if lambda_list.len() < 6 {
        return Err(Error::Domain(format!(
            "lambda ladder needs >= 6 entries, got {}",
            lambda_list.len()
        )));
    }
    if lambda_list.windows(2).any(|w| w[1] <= w[0]) || lambda_list[0] < 1.0 {
        return Err(Error::Domain("lambda ladder must increase from >= 1".into()));
    }
    Ok(())
}

/// Resolution budget for sampled inputs: the scaled window must stay
/// resolvable and probe momenta must stay below Nyquist.
fn check_budget(
    input: &ProbeInput,
    family: &WindowFamily,
    nb: &ConicNeighborhood,
    lambda_max: f64,
) -> Result<()> {
    if let ProbeInput::Sampled(field) = input {
        let grid = field.grid();
        let max_admissible =
            family.max_resolvable_lambda(grid).min(grid.nyquist() / nb.a);
        if lambda_max > max_admissible {
            return Err(Error::Resolution {
                requested: lambda_max,
                max_admissible,
            });
        }
    }
    Ok(())
}

fn merge_warning(acc: &mut Option<DecayWarning>, incoming: Option<DecayWarning>) {
    if let Some(w) = incoming {
        match acc {
            Some(prev) if prev.edge_ratio >= w.edge_ratio => {}
            _ => *acc = Some(w),
        }
    }
}

/// Rounding-noise scale of the truncated quadrature behind `wpt_direct`:
/// the sum cannot resolve values below roughly eps times the magnitudes it
/// adds up, so anything smaller is reported as an exact zero rather than
/// fitted as a slope. Bounded by both the peak-sample and the mass route.
fn sampled_noise_floor(field: &SampledField, atom: &PolyGauss) -> f64 {
    const SAFETY: f64 = 64.0;
    let radius = atom.support_radius(crate::wpt::TRUNCATION_TOL);
    let n = 256;
    let mut window_sup = 0.0f64;
    let mut window_mass = 0.0f64;
    for k in 0..=n {
        let u = radius * (2.0 * k as f64 / n as f64 - 1.0);
        let m = atom.eval(u).norm();
        window_sup = window_sup.max(m);
        window_mass += m;
    }
    window_mass *= 2.0 * radius / n as f64;
    let dx = field.grid().spacing();
    let data_mass: f64 = field.samples().iter().map(|v| v.norm()).sum::<f64>() * dx;
    SAFETY
        * f64::EPSILON
        * (field.max_abs() * window_mass + data_mass * window_sup)
}

/// |W f| at the given phase-space points with the given window atom.
fn sup_magnitude(
    input: &ProbeInput,
    atom: &PolyGauss,
    points: &[PhasePoint],
    warning: &mut Option<DecayWarning>,
) -> Result<f64> {
    match input {
        ProbeInput::Analytic(desc) => {
            let mut sup = 0.0f64;
            for p in points {
                sup = sup.max(wpt_closed_form(atom, desc, p.x, p.xi)?.norm());
            }
            Ok(sup)
        }
        ProbeInput::Sampled(field) => {
            let vals = wpt_direct(field, atom, points);
            merge_warning(warning, vals.warning);
            let sup = vals.value.iter().map(|v| v.norm()).fold(0.0, f64::max);
            Ok(if sup < sampled_noise_floor(field, atom) { 0.0 } else { sup })
        }
    }
}

/// Decay of sup |W_{phi_lambda} f(x, lambda xi)| over the neighborhood as
/// lambda climbs the ladder.
pub fn static_decay_probe(
    input: &ProbeInput,
    family: &WindowFamily,
    candidate: PhasePoint,
    nb: &ConicNeighborhood,
    lambda_list: &[f64],
) -> Result<DecayReport> {
    check_ladder(lambda_list)?;
    check_budget(input, family, nb, *lambda_list.last().expect("nonempty"))?;
    let xs = nb.x_samples();
    let xis = nb.xi_samples();
    let mut warning = None;
    let mut sups = Vec::with_capacity(lambda_list.len());
    for &lambda in lambda_list {
        let atom = window_atom(family, lambda)?;
        let points: Vec<PhasePoint> = xs
            .iter()
            .flat_map(|&x| xis.iter().map(move |&xi| PhasePoint { x, xi: lambda * xi }))
            .collect();
        sups.push(sup_magnitude(input, &atom, &points, &mut warning)?);
    }
    let slope = fit_decay_slope(lambda_list, &sups)?;
    Ok(DecayReport {
        candidate,
        lambda_list: lambda_list.to_vec(),
        sup_magnitudes: sups,
        slope,
        warning,
    })
}

/// Flowed variant: the window is evolved to time -t and the transform of
/// the *initial* data is read at the flowed point
/// (x(0; t, x, lambda xi), xi(0; t, x, lambda xi)). At t = 0 both the
/// window and the flow are identities and the output matches the static
/// probe exactly.
pub fn flowed_decay_probe(
    input: &ProbeInput,
    v: &PotentialModel,
    family: &WindowFamily,
    t: f64,
    candidate: PhasePoint,
    nb: &ConicNeighborhood,
    lambda_list: &[f64],
) -> Result<DecayReport> {
    check_ladder(lambda_list)?;
    check_budget(input, family, nb, *lambda_list.last().expect("nonempty"))?;
    let xs = nb.x_samples();
    let xis = nb.xi_samples();
    let mut warning = None;
    let mut sups = Vec::with_capacity(lambda_list.len());
    for &lambda in lambda_list {
        let atom = evolved_window_atom(family, lambda, -t)?;
        let mut points = Vec::with_capacity(xs.len() * xis.len());
        for &x in &xs {
            for &xi in &xis {
                let fr = integrate_flow(v, t, x, lambda, xi, FLOW_PROBE_STEPS)?;
                points.push(PhasePoint { x: fr.x0(), xi: fr.xi0() });
            }
        }
        sups.push(sup_magnitude(input, &atom, &points, &mut warning)?);
    }
    let slope = fit_decay_slope(lambda_list, &sups)?;
    Ok(DecayReport {
        candidate,
        lambda_list: lambda_list.to_vec(),
        sup_magnitudes: sups,
        slope,
        warning,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct MapEntry {
    pub x0: f64,
    pub dir: f64,
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct WavefrontMap {
    pub entries: Vec<MapEntry>,
}

impl WavefrontMap {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x0,dir,slope,verdict\n");
        for e in &self.entries {
            let slope = e.slope.map(|s| format!("{s:.16e}")).unwrap_or_default();
            out.push_str(&format!("{:.16e},{},{slope},{}\n", e.x0, e.dir, e.verdict));
        }
        out
    }

    pub fn verdict_at(&self, x0: f64, dir: f64) -> Option<Verdict> {
        self.entries
            .iter()
            .find(|e| e.x0 == x0 && e.dir == dir)
            .map(|e| e.verdict)
    }
}

/// Sweep the static probe over candidate positions and both directions.
/// Neighborhood half-width follows the candidate spacing.
pub fn detect_wavefront_grid(
    input: &ProbeInput,
    family: &WindowFamily,
    x0_list: &[f64],
    a: f64,
    lambda_list: &[f64],
    thresholds: (f64, f64),
) -> Result<WavefrontMap> {
    if x0_list.is_empty() {
        return Err(Error::Domain("no candidate positions".into()));
    }
    let half_width = if x0_list.len() > 1 {
        0.5 * (x0_list[1] - x0_list[0]).abs()
    } else {
        0.5
    };
    let mut entries = Vec::with_capacity(x0_list.len() * 2);
    for &x0 in x0_list {
        for (dir, set) in [(1.0, DirectionSet::Plus), (-1.0, DirectionSet::Minus)] {
            let nb = ConicNeighborhood::new((x0 - half_width, x0 + half_width), set, a)?;
            let report = static_decay_probe(
                input,
                family,
                PhasePoint { x: x0, xi: dir },
                &nb,
                lambda_list,
            )?;
            let cls = classify(&report, thresholds.0, thresholds.1)?;
            entries.push(MapEntry { x0, dir, slope: cls.slope, verdict: cls.verdict });
        }
    }
    Ok(WavefrontMap { entries })
}
