//! One function per subcommand. Every command resolves its configuration
//! (defaults included), runs the corresponding library routine, writes its
//! CSV outputs plus a `manifest.txt` echoing the resolved parameters, and
//! prints a one-line machine-greppable summary on stdout. Diagnostics and
//! warnings go to stderr. Return value is the process exit code: 0 for
//! success, 2 when a checked tolerance is exceeded; configuration and
//! runtime errors surface as `Err` and exit 1 in `main`.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use wavepacket::fields::{
    sample_signal, Grid1D, SampledField, SignalDescriptor, WindowFamily,
};
use wavepacket::hamflow::{check_flow_bounds, integrate_flow};
use wavepacket::packet::window_atom;
use wavepacket::potential::PotentialModel;
use wavepacket::schrodinger::split_step_evolve;
use wavepacket::verify::{
    pde_residual, transport_roundtrip, verify_flow_identity, verify_free_identity,
    FlowIdentityMode,
};
use wavepacket::wavefront::{
    default_scale_exponent, detect_wavefront_grid, ProbeInput, Verdict,
    THETA_REGULAR_DEFAULT, THETA_WAVEFRONT_DEFAULT,
};
use wavepacket::wpt::{wpt_full, PhasePoint};

use crate::config::Config;

const GRID_KEYS: (&str, &[&str]) = ("grid", &["x_min", "x_max", "n"]);
const SIGNAL_KEYS: (&str, &[&str]) =
    ("signal", &["kind", "center", "width", "momentum", "jump", "exponent"]);
const WINDOW_KEYS: (&str, &[&str]) = ("window", &["base", "order", "b"]);
const POTENTIAL_KEYS: (&str, &[&str]) = ("potential", &["model"]);
const OUTPUT_KEYS: (&str, &[&str]) = ("output", &["dir"]);

fn lib_err(e: wavepacket::Error) -> String {
    e.to_string()
}

/// Resolved-configuration echo, written next to the data files so a run
/// can be reproduced from its outputs alone.
struct Manifest {
    lines: Vec<String>,
}

impl Manifest {
    fn new(command: &str) -> Self {
        Self { lines: vec![format!("command = {command}")] }
    }

    fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key} = {value}"));
    }

    fn push_list(&mut self, key: &str, values: &[f64]) {
        let joined: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        self.lines.push(format!("{key} = {}", joined.join(", ")));
    }

    fn write(&self, dir: &Path) -> Result<(), String> {
        write_text(&dir.join("manifest.txt"), &(self.lines.join("\n") + "\n"))
    }
}

fn write_text(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents)
        .map_err(|e| format!("cannot write `{}`: {e}", path.display()))
}

fn out_dir(cfg: &Config) -> Result<PathBuf, String> {
    let dir = PathBuf::from(cfg.str_or("output", "dir", "."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| format!("cannot create output directory `{}`: {e}", dir.display()))?;
    Ok(dir)
}

fn build_grid(cfg: &Config) -> Result<Grid1D, String> {
    Grid1D::new(cfg.f64("grid", "x_min")?, cfg.f64("grid", "x_max")?, cfg.usize("grid", "n")?)
        .map_err(lib_err)
}

fn grid_manifest(m: &mut Manifest, g: &Grid1D) {
    m.push("grid.x_min", g.x_min());
    m.push("grid.x_max", g.x_max());
    m.push("grid.n", g.len());
}

fn build_signal(cfg: &Config) -> Result<SignalDescriptor, String> {
    let kind = cfg.req("signal", "kind")?;
    let applicable: &[&str] = match kind {
        "gaussian" => &["kind", "center", "width", "momentum"],
        "plane_wave" => &["kind", "momentum"],
        "heaviside" => &["kind", "jump"],
        "cusp" => &["kind", "center", "exponent", "momentum"],
        "dirac" => &["kind", "center"],
        other => {
            return Err(format!(
                "unknown signal kind `{other}`; expected gaussian, plane_wave, heaviside, cusp or dirac"
            ))
        }
    };
    for k in cfg.keys("signal") {
        if !applicable.contains(&k) {
            return Err(format!("key `{k}` does not apply to signal kind `{kind}`"));
        }
    }
    let desc = match kind {
        "gaussian" => SignalDescriptor::Gaussian {
            center: cfg.f64_or("signal", "center", 0.0)?,
            width: cfg.f64_or("signal", "width", 1.0)?,
            momentum: cfg.f64_or("signal", "momentum", 0.0)?,
        },
        "plane_wave" => {
            SignalDescriptor::PlaneWave { momentum: cfg.f64_or("signal", "momentum", 0.0)? }
        }
        "heaviside" => SignalDescriptor::Heaviside { jump: cfg.f64_or("signal", "jump", 0.0)? },
        "cusp" => SignalDescriptor::Cusp {
            center: cfg.f64_or("signal", "center", 0.0)?,
            exponent: cfg.f64("signal", "exponent")?,
            momentum: cfg.f64_or("signal", "momentum", 0.0)?,
        },
        _ => SignalDescriptor::Dirac { center: cfg.f64_or("signal", "center", 0.0)? },
    };
    desc.validate().map_err(lib_err)?;
    Ok(desc)
}

fn signal_manifest(m: &mut Manifest, desc: &SignalDescriptor) {
    m.push("signal", format!("{desc:?}"));
}

/// Window family from `[window]`, defaulting the scale exponent to the
/// largest value the detection estimates cover for the given growth
/// exponent, b = min((2-rho)/4, 1/4). A larger explicit b still runs but
/// earns a warning; b outside (0, 1) is a schema error.
fn build_window(cfg: &Config, rho: f64) -> Result<WindowFamily, String> {
    let base = cfg.str_or("window", "base", "gaussian");
    let b_max = default_scale_exponent(rho);
    let b = cfg.f64_or("window", "b", b_max)?;
    if cfg.get("window", "order").is_some() && base != "hermite" {
        return Err("`window.order` only applies to base = hermite".into());
    }
    let family = match base {
        "gaussian" => WindowFamily::gaussian(b),
        "hermite" => WindowFamily::hermite(cfg.usize_or("window", "order", 1)?, b),
        other => return Err(format!("unknown window base `{other}`; expected gaussian or hermite")),
    }
    .map_err(lib_err)?;
    if b > b_max + 1e-12 {
        eprintln!(
            "warning: window.b = {b} exceeds min((2-rho)/4, 1/4) = {b_max}; \
             decay classifications are outside the covered exponent range"
        );
    }
    Ok(family)
}

fn window_manifest(m: &mut Manifest, family: &WindowFamily) {
    m.push("window.base", family.label());
    m.push("window.b", family.scale_exponent);
}

fn build_potential(cfg: &Config) -> Result<PotentialModel, String> {
    PotentialModel::parse(cfg.req("potential", "model")?).map_err(lib_err)
}

fn cross_probes(xs: &[f64], xis: &[f64]) -> Vec<PhasePoint> {
    xs.iter()
        .flat_map(|&x| xis.iter().map(move |&xi| PhasePoint { x, xi }))
        .collect()
}

fn warn_decay(w: &Option<wavepacket::fields::DecayWarning>) {
    if let Some(w) = w {
        eprintln!(
            "warning: field is not boundary-clean (edge ratio {:.1e}); quadrature accuracy degrades",
            w.edge_ratio
        );
    }
}

pub fn wpt(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["grid", "signal", "window", "wpt"],
        &[GRID_KEYS, SIGNAL_KEYS, WINDOW_KEYS, ("wpt", &["lambda", "complex"]), OUTPUT_KEYS],
    )?;
    let grid = build_grid(cfg)?;
    let desc = build_signal(cfg)?;
    let family = build_window(cfg, 0.0)?;
    let lambda = cfg.f64_or("wpt", "lambda", 1.0)?;
    let complex = cfg.bool_or("wpt", "complex", false)?;
    let dir = out_dir(cfg)?;

    let field = sample_signal(&desc, &grid).map_err(lib_err)?;
    let atom = window_atom(&family, lambda).map_err(lib_err)?;
    let mat = wpt_full(&field, &atom).map_err(lib_err)?;
    warn_decay(&mat.warning);
    let mat = mat.value;
    write_text(&dir.join("wpt.csv"), &mat.to_csv(complex))?;
    write_text(&dir.join("signal.csv"), &field.to_csv())?;

    let mut m = Manifest::new("wpt");
    grid_manifest(&mut m, &grid);
    signal_manifest(&mut m, &desc);
    window_manifest(&mut m, &family);
    m.push("wpt.lambda", lambda);
    m.push("wpt.complex", complex);
    m.push("output.files", "wpt.csv, signal.csv");
    m.write(&dir)?;

    println!(
        "wpt {}x{} max_abs {:.6e} -> {}",
        mat.n_rows(),
        mat.n_cols(),
        mat.max_abs(),
        dir.join("wpt.csv").display()
    );
    Ok(0)
}

pub fn evolve(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["grid", "signal", "potential", "evolve"],
        &[GRID_KEYS, SIGNAL_KEYS, POTENTIAL_KEYS, ("evolve", &["t", "n_steps"]), OUTPUT_KEYS],
    )?;
    let grid = build_grid(cfg)?;
    let desc = build_signal(cfg)?;
    let v = build_potential(cfg)?;
    let t = cfg.f64("evolve", "t")?;
    let n_steps = cfg.usize("evolve", "n_steps")?;
    let dir = out_dir(cfg)?;

    let u0 = sample_signal(&desc, &grid).map_err(lib_err)?;
    let ut = split_step_evolve(&u0, &v, t, n_steps).map_err(lib_err)?;
    warn_decay(&ut.warning);
    let ut = ut.value;
    let drift = (ut.l2_norm() - u0.l2_norm()).abs() / u0.l2_norm();
    write_text(&dir.join("evolved.csv"), &ut.to_csv())?;

    let mut m = Manifest::new("evolve");
    grid_manifest(&mut m, &grid);
    signal_manifest(&mut m, &desc);
    m.push("potential.model", v.label());
    m.push("evolve.t", t);
    m.push("evolve.n_steps", n_steps);
    m.push("output.files", "evolved.csv");
    m.write(&dir)?;

    println!("evolve t {t} steps {n_steps} mass_drift {drift:.3e} -> {}", dir.join("evolved.csv").display());
    Ok(0)
}

pub fn flow(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["potential", "flow"],
        &[POTENTIAL_KEYS, ("flow", &["t", "x", "xi", "lambda", "n_steps"]), OUTPUT_KEYS],
    )?;
    let v = build_potential(cfg)?;
    let t = cfg.f64("flow", "t")?;
    let x = cfg.f64("flow", "x")?;
    let xi = cfg.f64("flow", "xi")?;
    let lambda = cfg.f64_or("flow", "lambda", 1.0)?;
    let n_steps = cfg.usize_or("flow", "n_steps", 1024)?;
    let dir = out_dir(cfg)?;

    let res = integrate_flow(&v, t, x, lambda, xi, n_steps).map_err(lib_err)?;
    write_text(&dir.join("trajectory.csv"), &res.to_csv())?;

    let mut m = Manifest::new("flow");
    m.push("potential.model", v.label());
    m.push("flow.t", t);
    m.push("flow.x", x);
    m.push("flow.xi", xi);
    m.push("flow.lambda", lambda);
    m.push("flow.n_steps", n_steps);
    m.push("output.files", "trajectory.csv");
    m.write(&dir)?;

    println!(
        "flow terminal ({x}, {}) at t {t} -> initial x0 {:.16e} xi0 {:.16e}",
        lambda * xi,
        res.x0(),
        res.xi0()
    );
    Ok(0)
}

pub fn detect(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["signal", "window", "detect"],
        &[
            SIGNAL_KEYS,
            WINDOW_KEYS,
            GRID_KEYS,
            (
                "detect",
                &["x0_list", "a", "lambda_list", "theta_regular", "theta_wavefront"],
            ),
            OUTPUT_KEYS,
        ],
    )?;
    let desc = build_signal(cfg)?;
    let family = build_window(cfg, 0.0)?;
    let x0s = cfg.f64_list("detect", "x0_list")?;
    let a = cfg.f64_or("detect", "a", 2.0)?;
    let lams = cfg.f64_list("detect", "lambda_list")?;
    let theta_regular = cfg.f64_or("detect", "theta_regular", THETA_REGULAR_DEFAULT)?;
    let theta_wavefront = cfg.f64_or("detect", "theta_wavefront", THETA_WAVEFRONT_DEFAULT)?;
    let dir = out_dir(cfg)?;

    // With a [grid] section the signal is sampled and probed through the
    // truncated quadrature; without one the closed-form transform is used.
    let sampled: Option<SampledField> = if cfg.has_section("grid") {
        Some(sample_signal(&desc, &build_grid(cfg)?).map_err(lib_err)?)
    } else {
        None
    };
    let input = match &sampled {
        Some(f) => ProbeInput::Sampled(f),
        None => ProbeInput::Analytic(&desc),
    };
    let map = detect_wavefront_grid(&input, &family, &x0s, a, &lams, (theta_regular, theta_wavefront))
        .map_err(lib_err)?;
    write_text(&dir.join("classification.csv"), &map.to_csv())?;

    let mut m = Manifest::new("detect");
    signal_manifest(&mut m, &desc);
    window_manifest(&mut m, &family);
    if let Some(f) = &sampled {
        grid_manifest(&mut m, f.grid());
        m.push("detect.input", "sampled");
    } else {
        m.push("detect.input", "analytic");
    }
    m.push_list("detect.x0_list", &x0s);
    m.push("detect.a", a);
    m.push_list("detect.lambda_list", &lams);
    m.push("detect.theta_regular", theta_regular);
    m.push("detect.theta_wavefront", theta_wavefront);
    m.push("output.files", "classification.csv");
    m.write(&dir)?;

    let count = |v: Verdict| map.entries.iter().filter(|e| e.verdict == v).count();
    println!(
        "detect {} candidates: {} InWavefront, {} Regular, {} Inconclusive -> {}",
        map.entries.len(),
        count(Verdict::InWavefront),
        count(Verdict::Regular),
        count(Verdict::Inconclusive),
        dir.join("classification.csv").display()
    );
    Ok(0)
}

pub fn verify_free(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["grid", "signal", "window", "verify"],
        &[
            GRID_KEYS,
            SIGNAL_KEYS,
            WINDOW_KEYS,
            ("verify", &["t_list", "lambda_list", "x_list", "xi_list", "tol"]),
            OUTPUT_KEYS,
        ],
    )?;
    let grid = build_grid(cfg)?;
    let desc = build_signal(cfg)?;
    let family = build_window(cfg, 0.0)?;
    let t_list = cfg.f64_list("verify", "t_list")?;
    let lambda_list = cfg.f64_list("verify", "lambda_list")?;
    let x_list = cfg.f64_list("verify", "x_list")?;
    let xi_list = cfg.f64_list("verify", "xi_list")?;
    let tol = cfg.f64_or("verify", "tol", 1e-6)?;
    let dir = out_dir(cfg)?;

    let u0 = sample_signal(&desc, &grid).map_err(lib_err)?;
    let probes = cross_probes(&x_list, &xi_list);
    let mut csv = String::from("t,lambda,n_probes,max_abs,scale,max_rel\n");
    let mut worst = 0.0f64;
    for &t in &t_list {
        for &lambda in &lambda_list {
            let rep = verify_free_identity(&u0, &family, lambda, t, &probes).map_err(lib_err)?;
            warn_decay(&rep.warning);
            csv.push_str(&format!(
                "{t:.16e},{lambda:.16e},{},{:.16e},{:.16e},{:.16e}\n",
                rep.n_probes, rep.max_abs, rep.scale, rep.max_rel
            ));
            worst = worst.max(rep.max_rel);
        }
    }
    write_text(&dir.join("free_identity.csv"), &csv)?;

    let mut m = Manifest::new("verify-free");
    grid_manifest(&mut m, &grid);
    signal_manifest(&mut m, &desc);
    window_manifest(&mut m, &family);
    m.push_list("verify.t_list", &t_list);
    m.push_list("verify.lambda_list", &lambda_list);
    m.push_list("verify.x_list", &x_list);
    m.push_list("verify.xi_list", &xi_list);
    m.push("verify.tol", tol);
    m.push("output.files", "free_identity.csv");
    m.write(&dir)?;

    let pass = worst <= tol;
    println!("eq2 max_rel_err {worst:.3e} {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 2 })
}

pub fn verify_flow(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["grid", "signal", "window", "potential", "verify"],
        &[
            GRID_KEYS,
            SIGNAL_KEYS,
            WINDOW_KEYS,
            POTENTIAL_KEYS,
            ("verify", &["t0", "lambda_list", "x_list", "xi_list", "mode", "tol"]),
            OUTPUT_KEYS,
        ],
    )?;
    let grid = build_grid(cfg)?;
    let desc = build_signal(cfg)?;
    let v = build_potential(cfg)?;
    let family = build_window(cfg, v.growth().rho)?;
    let t0 = cfg.f64("verify", "t0")?;
    let lambda_list = cfg.f64_list("verify", "lambda_list")?;
    let x_list = cfg.f64_list("verify", "x_list")?;
    let xi_list = cfg.f64_list("verify", "xi_list")?;
    let mode = match cfg.str_or("verify", "mode", "exact") {
        "exact" => FlowIdentityMode::Exact,
        "bound" => FlowIdentityMode::Bound,
        other => return Err(format!("unknown verify.mode `{other}`; expected exact or bound")),
    };
    let tol = cfg.f64_or("verify", "tol", 1e-5)?;
    let dir = out_dir(cfg)?;

    let u0 = sample_signal(&desc, &grid).map_err(lib_err)?;
    let probes = cross_probes(&x_list, &xi_list);
    let mut worst = 0.0f64;
    let mut files = Vec::new();
    for &lambda in &lambda_list {
        let rep = verify_flow_identity(&u0, &v, &family, lambda, t0, &probes, mode)
            .map_err(lib_err)?;
        warn_decay(&rep.warning);
        print!("lambda {lambda}: {}", rep.summary());
        let name = format!("flow_identity_lambda{lambda}.csv");
        write_text(&dir.join(&name), &rep.to_csv())?;
        files.push(name);
        worst = worst.max(rep.max_rel);
    }

    let mut m = Manifest::new("verify-flow");
    grid_manifest(&mut m, &grid);
    signal_manifest(&mut m, &desc);
    window_manifest(&mut m, &family);
    m.push("potential.model", v.label());
    m.push("verify.t0", t0);
    m.push_list("verify.lambda_list", &lambda_list);
    m.push_list("verify.x_list", &x_list);
    m.push_list("verify.xi_list", &xi_list);
    m.push("verify.mode", format!("{mode:?}"));
    m.push("verify.tol", tol);
    m.push("output.files", files.join(", "));
    m.write(&dir)?;

    match mode {
        FlowIdentityMode::Exact => {
            let pass = worst <= tol;
            println!("flow_identity max_rel_err {worst:.3e} {}", if pass { "PASS" } else { "FAIL" });
            Ok(if pass { 0 } else { 2 })
        }
        FlowIdentityMode::Bound => {
            println!("flow_identity bound mode: discrepancies reported against the remainder scale");
            Ok(0)
        }
    }
}

pub fn residual(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["grid", "signal", "window", "potential", "residual"],
        &[
            GRID_KEYS,
            SIGNAL_KEYS,
            WINDOW_KEYS,
            POTENTIAL_KEYS,
            (
                "residual",
                &["lambda", "t", "x_list", "xi_list", "step_x", "step_xi", "step_t", "levels", "min_ratio"],
            ),
            OUTPUT_KEYS,
        ],
    )?;
    let grid = build_grid(cfg)?;
    let desc = build_signal(cfg)?;
    let v = build_potential(cfg)?;
    let family = build_window(cfg, v.growth().rho)?;
    let lambda = cfg.f64("residual", "lambda")?;
    let t = cfg.f64("residual", "t")?;
    let x_list = cfg.f64_list("residual", "x_list")?;
    let xi_list = cfg.f64_list("residual", "xi_list")?;
    let step0 = (
        cfg.f64("residual", "step_x")?,
        cfg.f64("residual", "step_xi")?,
        cfg.f64("residual", "step_t")?,
    );
    let levels = cfg.usize_or("residual", "levels", 3)?;
    let min_ratio = cfg.f64_or("residual", "min_ratio", 4.0)?;
    let dir = out_dir(cfg)?;

    let u0 = sample_signal(&desc, &grid).map_err(lib_err)?;
    let rep = pde_residual(&u0, &v, &family, lambda, t, &x_list, &xi_list, step0, levels)
        .map_err(lib_err)?;
    write_text(&dir.join("residual.csv"), &rep.to_csv())?;
    print!("{}", rep.summary());

    let mut m = Manifest::new("residual");
    grid_manifest(&mut m, &grid);
    signal_manifest(&mut m, &desc);
    window_manifest(&mut m, &family);
    m.push("potential.model", v.label());
    m.push("residual.lambda", lambda);
    m.push("residual.t", t);
    m.push_list("residual.x_list", &x_list);
    m.push_list("residual.xi_list", &xi_list);
    m.push("residual.step_x", step0.0);
    m.push("residual.step_xi", step0.1);
    m.push("residual.step_t", step0.2);
    m.push("residual.levels", levels);
    m.push("residual.min_ratio", min_ratio);
    m.push("output.files", "residual.csv");
    m.write(&dir)?;

    let pass = rep.passes(min_ratio);
    println!("residual refinement_ratio_min {min_ratio} {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 2 })
}

pub fn roundtrip(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["grid", "signal", "window", "potential", "roundtrip"],
        &[
            GRID_KEYS,
            SIGNAL_KEYS,
            WINDOW_KEYS,
            POTENTIAL_KEYS,
            (
                "roundtrip",
                &["t", "x0_list", "a", "lambda_list", "theta_regular", "theta_wavefront", "split_dt"],
            ),
            OUTPUT_KEYS,
        ],
    )?;
    let grid = build_grid(cfg)?;
    let desc = build_signal(cfg)?;
    let v = build_potential(cfg)?;
    let family = build_window(cfg, v.growth().rho)?;
    let t = cfg.f64("roundtrip", "t")?;
    let x0s = cfg.f64_list("roundtrip", "x0_list")?;
    let a = cfg.f64_or("roundtrip", "a", 2.0)?;
    let lams = cfg.f64_list("roundtrip", "lambda_list")?;
    let theta_regular = cfg.f64_or("roundtrip", "theta_regular", THETA_REGULAR_DEFAULT)?;
    let theta_wavefront = cfg.f64_or("roundtrip", "theta_wavefront", THETA_WAVEFRONT_DEFAULT)?;
    let split_dt = cfg.f64_or("roundtrip", "split_dt", 2e-3)?;
    let dir = out_dir(cfg)?;

    let table = transport_roundtrip(
        &desc,
        &v,
        &family,
        t,
        &x0s,
        a,
        &lams,
        (theta_regular, theta_wavefront),
        &grid,
        split_dt,
    )
    .map_err(lib_err)?;
    write_text(&dir.join("roundtrip.csv"), &table.to_csv())?;
    print!("{}", table.summary());

    let mut m = Manifest::new("roundtrip");
    grid_manifest(&mut m, &grid);
    signal_manifest(&mut m, &desc);
    window_manifest(&mut m, &family);
    m.push("potential.model", v.label());
    m.push("roundtrip.t", t);
    m.push_list("roundtrip.x0_list", &x0s);
    m.push("roundtrip.a", a);
    m.push_list("roundtrip.lambda_list", &lams);
    m.push("roundtrip.theta_regular", theta_regular);
    m.push("roundtrip.theta_wavefront", theta_wavefront);
    m.push("roundtrip.split_dt", split_dt);
    m.push("output.files", "roundtrip.csv");
    m.write(&dir)?;

    let n = table.disagreements();
    println!("roundtrip disagreements {n} {}", if n == 0 { "PASS" } else { "FAIL" });
    Ok(if n == 0 { 0 } else { 2 })
}

pub fn bounds(cfg: &Config) -> Result<u8, String> {
    cfg.check_schema(
        &["potential", "bounds"],
        &[
            POTENTIAL_KEYS,
            ("bounds", &["k_min", "k_max", "a", "t0", "lambda_list", "p"]),
            OUTPUT_KEYS,
        ],
    )?;
    let v = build_potential(cfg)?;
    let k = (cfg.f64("bounds", "k_min")?, cfg.f64("bounds", "k_max")?);
    let a = cfg.f64_or("bounds", "a", 2.0)?;
    let t0 = cfg.f64("bounds", "t0")?;
    let lams = cfg.f64_list("bounds", "lambda_list")?;
    // Default exponent p = 2b with the covered scale exponent for this
    // growth rate.
    let p = cfg.f64_or("bounds", "p", 2.0 * default_scale_exponent(v.growth().rho))?;
    let dir = out_dir(cfg)?;

    let rep = check_flow_bounds(&v, k, a, t0, &lams, p).map_err(lib_err)?;
    write_text(&dir.join("flow_bounds.csv"), &rep.to_csv())?;
    if rep.outside_proved_regime {
        eprintln!(
            "warning: growth exponent {} is outside the regime the corridor bound covers; result is informational",
            v.growth().rho
        );
    }

    let mut m = Manifest::new("bounds");
    m.push("potential.model", v.label());
    m.push("bounds.k_min", k.0);
    m.push("bounds.k_max", k.1);
    m.push("bounds.a", a);
    m.push("bounds.t0", t0);
    m.push_list("bounds.lambda_list", &lams);
    m.push("bounds.p", p);
    m.push("output.files", "flow_bounds.csv");
    m.write(&dir)?;

    match rep.lambda0 {
        Some(l0) => {
            println!("bounds lambda0 {l0} PASS");
            Ok(0)
        }
        None => {
            println!("bounds lambda0 none FAIL");
            Ok(2)
        }
    }
}
