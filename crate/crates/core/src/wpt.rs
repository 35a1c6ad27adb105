//! Grid pipeline for the wave packet transform
//!     W(x, xi) = int conj(phi(y - x)) f(y) e^{-i y xi} dy.
//!
//! Two evaluation routes. `wpt_direct` does truncated trapezoid
//! quadrature at arbitrary phase-space points; on a periodic grid with a
//! window that decays below the truncation tolerance inside the box this
//! is spectrally accurate for smooth signals. `wpt_slice` computes whole
//! frequency rows with one FFT per spatial point, which requires the
//! frequency grid to be the FFT dual of the field grid (or an
//! integer-stride subset of it): for xi_j = 2 pi m_j / L,
//!     W(x, xi_j) = dx e^{-i x_min xi_j} DFT[conj(phi(y_k - x)) f(y_k)]_{m_j mod n}.
//!
//! The inverse transform is
//!     f(x) = (2 pi)^{-1} |phi|_2^{-2} int int W(y, xi) phi(x - y) e^{i x xi} dxi dy,
//! and on the full dual grid the discrete version reproduces samples up to
//! the window's quadrature factor sum_i |phi(x - y_i)|^2 dy / |phi|^2,
//! which is 1 up to aliasing that is far below double precision for every
//! resolvable window here.

use crate::error::{Error, Result};
use crate::fields::{DecayWarning, Flagged, Grid1D, SampledField};
use crate::packet::PolyGauss;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

/// Window tail level below which direct quadrature truncates the sum.
pub const TRUNCATION_TOL: f64 = 1e-20;

/// Relative band-edge mass above which inversion refuses the matrix.
pub const BAND_EDGE_TOL: f64 = 1e-6;

/// A point (x, xi) in phase space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
}

impl PhasePoint {
    pub fn new(x: f64, xi: f64) -> Self {
        Self { x, xi }
    }
}

/// Uniform frequency grid xi_j = xi_min + j d_xi.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreqGrid1D {
    xi_min: f64,
    d_xi: f64,
    n: usize,
}

impl FreqGrid1D {
    pub fn new(xi_min: f64, d_xi: f64, n: usize) -> Result<Self> {
        if n == 0 || !(d_xi > 0.0) || !xi_min.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "frequency grid needs d_xi > 0 and n > 0, got d_xi {d_xi}, n {n}"
            )));
        }
        Ok(Self { xi_min, d_xi, n })
    }

    /// The FFT dual of a spatial grid: n frequencies spaced 2 pi / L,
    /// centered so the band is [-pi/dx, pi/dx).
    pub fn fft_dual(grid: &Grid1D) -> Self {
        let d_xi = 2.0 * PI / grid.span();
        let half = (grid.len() / 2) as f64;
        Self { xi_min: -half * d_xi, d_xi, n: grid.len() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.d_xi
    }

    pub fn node(&self, j: usize) -> f64 {
        self.xi_min + self.d_xi * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Integer dual indices m_j with xi_j = 2 pi m_j / L on the dual of
    /// `grid`, or an error when some frequency is off-lattice or outside
    /// the band [-pi/dx, pi/dx).
    fn dual_indices(&self, grid: &Grid1D) -> Result<Vec<i64>> {
        let d_dual = 2.0 * PI / grid.span();
        let half = (grid.len() / 2) as i64;
        (0..self.n)
            .map(|j| {
                let ratio = self.node(j) / d_dual;
                let m = ratio.round();
                if (ratio - m).abs() > 1e-9 * ratio.abs().max(1.0) {
                    return Err(Error::InvalidGrid(format!(
                        "frequency {} is not on the FFT dual lattice (spacing {})",
                        self.node(j),
                        d_dual
                    )));
                }
                let m = m as i64;
                if m < -half || m >= half {
                    return Err(Error::Bandwidth(format!(
                        "frequency {} lies outside the band [{}, {})",
                        self.node(j),
                        -(half as f64) * d_dual,
                        half as f64 * d_dual
                    )));
                }
                Ok(m)
            })
            .collect()
    }
}

/// Dense transform values on x_list (rows) times a frequency grid (columns).
#[derive(Clone, Debug)]
pub struct WptMatrix {
    x: Vec<f64>,
    freq: FreqGrid1D,
    data: Vec<Complex64>,
}

impl WptMatrix {
    fn new(x: Vec<f64>, freq: FreqGrid1D, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), x.len() * freq.len());
        Self { x, freq, data }
    }

    pub fn x_list(&self) -> &[f64] {
        &self.x
    }

    pub fn freq(&self) -> &FreqGrid1D {
        &self.freq
    }

    pub fn n_rows(&self) -> usize {
        self.x.len()
    }

    pub fn n_cols(&self) -> usize {
        self.freq.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.freq.len() + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.freq.len()..(i + 1) * self.freq.len()]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// CSV matrix: one row per x, one column per xi, modulus entries.
    /// With `complex` set each xi contributes interleaved re/im columns.
    pub fn to_csv(&self, complex: bool) -> String {
        let mut out = String::with_capacity(self.data.len() * 48 + 16);
        out.push('x');
        for j in 0..self.freq.len() {
            let xi = self.freq.node(j);
            if complex {
                out.push_str(&format!(",re({xi:.16e}),im({xi:.16e})"));
            } else {
                out.push_str(&format!(",{xi:.16e}"));
            }
        }
        out.push('\n');
        for (i, &x) in self.x.iter().enumerate() {
            out.push_str(&format!("{x:.16e}"));
            for j in 0..self.freq.len() {
                let z = self.get(i, j);
                if complex {
                    out.push_str(&format!(",{:.16e},{:.16e}", z.re, z.im));
                } else {
                    out.push_str(&format!(",{:.16e}", z.norm()));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Truncated trapezoid quadrature of the transform at arbitrary points.
/// The window is evaluated analytically from its atom; the sum runs over
/// grid nodes within the window's support radius at level
/// [`TRUNCATION_TOL`].
pub fn wpt_direct(
    field: &SampledField,
    window: &PolyGauss,
    points: &[PhasePoint],
) -> Flagged<Vec<Complex64>> {
    let grid = field.grid();
    let dx = grid.spacing();
    let radius = window.support_radius(TRUNCATION_TOL);
    let cwindow = window.conjugated();
    let values: Vec<Complex64> = points
        .par_iter()
        .map(|&PhasePoint { x, xi }| {
            let lo = grid.nearest_node(x - radius);
            let hi = grid.nearest_node(x + radius);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in lo..=hi {
                let y = grid.node(k);
                acc += cwindow.eval(y - x)
                    * field.samples()[k]
                    * Complex64::new(0.0, -y * xi).exp();
            }
            acc * dx
        })
        .collect();
    Flagged::new(values, field.decay_warning())
}

/// Whole frequency rows by FFT: one forward transform of
/// conj(phi(y - x)) f(y) per spatial point. `freq` must sit on the FFT
/// dual lattice of the field grid, inside the band.
pub fn wpt_slice(
    field: &SampledField,
    window: &PolyGauss,
    x_list: &[f64],
    freq: &FreqGrid1D,
) -> Result<Flagged<WptMatrix>> {
    let grid = *field.grid();
    let n = grid.len();
    let dual = freq.dual_indices(&grid)?;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let fft: Arc<dyn rustfft::Fft<f64>> = fft;
    let cwindow = window.conjugated();
    let dx = grid.spacing();
    let rows: Vec<Vec<Complex64>> = x_list
        .par_iter()
        .map(|&x| {
            let mut buf: Vec<Complex64> = (0..n)
                .map(|k| cwindow.eval(grid.node(k) - x) * field.samples()[k])
                .collect();
            fft.process(&mut buf);
            dual.iter()
                .enumerate()
                .map(|(j, &m)| {
                    let bin = m.rem_euclid(n as i64) as usize;
                    let xi = freq.node(j);
                    dx * Complex64::new(0.0, -grid.x_min() * xi).exp() * buf[bin]
                })
                .collect()
        })
        .collect();
    let data = rows.into_iter().flatten().collect();
    Ok(Flagged::new(
        WptMatrix::new(x_list.to_vec(), *freq, data),
        field.decay_warning(),
    ))
}

/// Transform over the full phase-space grid: every field node times the
/// full FFT dual grid.
pub fn wpt_full(field: &SampledField, window: &PolyGauss) -> Result<Flagged<WptMatrix>> {
    let freq = FreqGrid1D::fft_dual(field.grid());
    wpt_slice(field, window, &field.grid().nodes(), &freq)
}

/// Inverse transform onto `grid`. The matrix must carry the full FFT dual
/// frequency grid of `grid` (the e^{i x xi} sum is an inverse FFT), and
/// its rows must be uniformly spaced in y. Refuses matrices with relative
/// band-edge mass above [`BAND_EDGE_TOL`]: such data is not resolved by
/// the band and would alias.
pub fn wpt_inverse(
    mat: &WptMatrix,
    window: &PolyGauss,
    grid: &Grid1D,
) -> Result<Flagged<SampledField>> {
    let n = grid.len();
    if mat.n_cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "inversion needs the full dual grid: {} columns for {} nodes",
            mat.n_cols(),
            n
        )));
    }
    let dual = mat.freq.dual_indices(grid)?;
    let mut seen = vec![false; n];
    for &m in &dual {
        seen[m.rem_euclid(n as i64) as usize] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::InvalidGrid(
            "inversion needs every dual frequency exactly once".into(),
        ));
    }
    if mat.n_rows() < 2 {
        return Err(Error::InsufficientData(
            "inversion needs at least two spatial rows".into(),
        ));
    }
    let dy = mat.x[1] - mat.x[0];
    if !(dy > 0.0) {
        return Err(Error::InvalidGrid("row positions must increase".into()));
    }
    for w in mat.x.windows(2) {
        if ((w[1] - w[0]) - dy).abs() > 1e-9 * dy {
            return Err(Error::InvalidGrid(
                "inversion needs uniformly spaced rows".into(),
            ));
        }
    }
    let peak = mat.max_abs();
    if peak > 0.0 {
        let edge = (0..mat.n_rows())
            .flat_map(|i| [mat.get(i, 0), mat.get(i, n - 1)])
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if edge / peak > BAND_EDGE_TOL {
            return Err(Error::Bandwidth(format!(
                "band-edge mass {:.2e} of peak; data is not resolved by this grid",
                edge / peak
            )));
        }
    }
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let norm_sqr = window.l2_norm_sqr();
    let d_xi = mat.freq.spacing();
    let scale = d_xi * dy / (2.0 * PI * norm_sqr);
    let partial: Vec<Vec<Complex64>> = (0..mat.n_rows())
        .into_par_iter()
        .map(|i| {
            // h_i(x_k) = d_xi sum_j W(y_i, xi_j) e^{i x_k xi_j}, one inverse FFT.
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for (j, &m) in dual.iter().enumerate() {
                let xi = mat.freq.node(j);
                let bin = m.rem_euclid(n as i64) as usize;
                buf[bin] = mat.get(i, j) * Complex64::new(0.0, grid.x_min() * xi).exp();
            }
            fft.process(&mut buf);
            let y = mat.x[i];
            (0..n)
                .map(|k| buf[k] * window.eval(grid.node(k) - y) * scale)
                .collect()
        })
        .collect();
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for row in partial {
        for (k, v) in row.into_iter().enumerate() {
            samples[k] += v;
        }
    }
    let field = SampledField::new(*grid, samples)?;
    let warning: Option<DecayWarning> = field.decay_warning();
    Ok(Flagged::new(field, warning))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{sample_signal, SignalDescriptor, WindowFamily};
    use crate::packet::{window_atom, wpt_point};
    use proptest::prelude::*;

    fn grid() -> Grid1D {
        Grid1D::new(-32.0, 32.0, 1024).unwrap()
    }

    fn gaussian_field(grid: &Grid1D) -> SampledField {
        let sig = SignalDescriptor::Gaussian { center: 0.5, width: 1.0, momentum: 2.0 };
        sample_signal(&sig, grid).unwrap()
    }

    #[test]
    fn direct_matches_closed_form() {
        let g = grid();
        let sig = SignalDescriptor::Gaussian { center: 0.5, width: 1.0, momentum: 2.0 };
        let field = sample_signal(&sig, &g).unwrap();
        let fam = WindowFamily::gaussian(0.25).unwrap();
        let atom = window_atom(&fam, 16.0).unwrap();
        let points = [
            PhasePoint::new(0.5, 2.0),
            PhasePoint::new(-0.737, 4.2),
            PhasePoint::new(1.25, -1.0),
        ];
        let got = wpt_direct(&field, &atom, &points);
        assert!(got.warning.is_none());
        for (p, v) in points.iter().zip(&got.value) {
            let want = wpt_point(&fam, 16.0, &sig, p.x, p.xi).unwrap();
            assert!((v - want).norm() < 1e-12, "at ({}, {}): {v} vs {want}", p.x, p.xi);
        }
    }

    #[test]
    fn slice_matches_direct_on_dual_grid() {
        let g = grid();
        let field = gaussian_field(&g);
        let fam = WindowFamily::gaussian(0.25).unwrap();
        let atom = window_atom(&fam, 4.0).unwrap();
        let freq = FreqGrid1D::fft_dual(&g);
        let x_list = [0.0, 0.5, -3.0];
        let mat = wpt_slice(&field, &atom, &x_list, &freq).unwrap().value;
        // Spot-check a spread of columns against direct quadrature.
        for i in 0..x_list.len() {
            for j in [0usize, 17, 200, 512, 777, 1023] {
                let p = PhasePoint::new(x_list[i], freq.node(j));
                let direct = wpt_direct(&field, &atom, &[p]).value[0];
                assert!(
                    (mat.get(i, j) - direct).norm() < 1e-12,
                    "row {i} col {j}: {} vs {direct}",
                    mat.get(i, j)
                );
            }
        }
    }

    #[test]
    fn slice_accepts_stride_subset_and_rejects_off_lattice() {
        let g = grid();
        let field = gaussian_field(&g);
        let atom = window_atom(&WindowFamily::gaussian(0.25).unwrap(), 4.0).unwrap();
        let dual = FreqGrid1D::fft_dual(&g);
        // Every 4th dual frequency is fine.
        let sub = FreqGrid1D::new(dual.node(0), 4.0 * dual.spacing(), dual.len() / 4).unwrap();
        let mat = wpt_slice(&field, &atom, &[0.0], &sub).unwrap().value;
        let full = wpt_slice(&field, &atom, &[0.0], &dual).unwrap().value;
        for j in 0..sub.len() {
            assert_eq!(mat.get(0, j), full.get(0, 4 * j));
        }
        // An irrational offset is not.
        let off = FreqGrid1D::new(0.1, dual.spacing(), 8).unwrap();
        assert!(matches!(
            wpt_slice(&field, &atom, &[0.0], &off),
            Err(Error::InvalidGrid(_))
        ));
        // Outside the band is a bandwidth error.
        let wide = FreqGrid1D::new(0.0, dual.spacing() * 513.0, 2).unwrap();
        assert!(matches!(
            wpt_slice(&field, &atom, &[0.0], &wide),
            Err(Error::Bandwidth(_))
        ));
    }

    #[test]
    fn inverse_recovers_gaussian_to_machine_precision() {
        let g = grid();
        let field = gaussian_field(&g);
        let atom = window_atom(&WindowFamily::gaussian(0.25).unwrap(), 4.0).unwrap();
        let mat = wpt_full(&field, &atom).unwrap().value;
        let rec = wpt_inverse(&mat, &atom, &g).unwrap().value;
        let err = field
            .samples()
            .iter()
            .zip(rec.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "max reconstruction error {err:.3e}");
    }

    #[test]
    fn inverse_refuses_band_edge_mass() {
        let g = Grid1D::new(-32.0, 32.0, 512).unwrap();
        // Nyquist is 8 pi ~ 25.1; momentum 24 leaves visible edge mass.
        let sig = SignalDescriptor::Gaussian { center: 0.0, width: 1.0, momentum: 24.0 };
        let field = sample_signal(&sig, &g).unwrap();
        let atom = window_atom(&WindowFamily::gaussian(0.25).unwrap(), 1.0).unwrap();
        let mat = wpt_full(&field, &atom).unwrap().value;
        assert!(matches!(
            wpt_inverse(&mat, &atom, &g),
            Err(Error::Bandwidth(_))
        ));
    }

    #[test]
    fn heaviside_transform_carries_decay_warning() {
        let g = grid();
        let field = sample_signal(&SignalDescriptor::Heaviside { jump: 0.0 }, &g).unwrap();
        let atom = window_atom(&WindowFamily::gaussian(0.25).unwrap(), 4.0).unwrap();
        let got = wpt_direct(&field, &atom, &[PhasePoint::new(0.0, 1.0)]);
        assert!(got.warning.is_some());
        assert!(got.warning.unwrap().edge_ratio > 0.5);
    }

    #[test]
    fn matrix_csv_formats() {
        let g = Grid1D::new(-1.0, 1.0, 16).unwrap();
        let field = SampledField::from_fn(g, |x| Complex64::new((-x * x).exp(), 0.0));
        let atom = window_atom(&WindowFamily::gaussian(0.5).unwrap(), 1.0).unwrap();
        let freq = FreqGrid1D::fft_dual(&g);
        let mat = wpt_slice(&field, &atom, &[0.0], &freq).unwrap().value;
        let plain = mat.to_csv(false);
        assert!(plain.starts_with("x,"));
        assert_eq!(plain.lines().count(), 1 + 1);
        for line in plain.lines() {
            assert_eq!(line.split(',').count(), 1 + 16);
        }
        let complex = mat.to_csv(true);
        assert!(complex.lines().next().unwrap().contains("re("));
        assert_eq!(complex.lines().nth(1).unwrap().split(',').count(), 1 + 32);
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 6, .. ProptestConfig::default() })]
        #[test]
        fn transform_is_l2_isometric(
            center in -2.0..2.0f64,
            width in 0.5..2.0f64,
            momentum in -3.0..3.0f64,
            lambda in 1.0..5.0f64,
            b in 0.2..0.8f64,
        ) {
            // (dx dxi / 2pi) sum |W|^2 = |f|^2 |phi|^2 on the full
            // phase-space grid, up to window aliasing far below 1e-9.
            let g = Grid1D::new(-32.0, 32.0, 512).unwrap();
            let sig = SignalDescriptor::Gaussian { center, width, momentum };
            let field = sample_signal(&sig, &g).unwrap();
            let fam = WindowFamily::new(crate::fields::WindowBase::Gaussian, b).unwrap();
            let atom = window_atom(&fam, lambda).unwrap();
            let mat = wpt_full(&field, &atom).unwrap().value;
            let sum: f64 = (0..mat.n_rows())
                .map(|i| mat.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum();
            let lhs = sum * g.spacing() * mat.freq().spacing() / (2.0 * PI);
            let rhs = field.l2_norm().powi(2);
            prop_assert!((lhs - rhs).abs() / rhs < 1e-9, "lhs {lhs}, rhs {rhs}");
        }
    }
}
