//! Numeric flow of `H = |p|^2/2 + F(psi)/r^2` in Cartesian coordinates.
//!
//! The Hamiltonian is separable there, so leapfrog and its compositions are
//! explicit. Polar data are rebuilt only to evaluate the integrals.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffring::FloatCoords;
use crate::error::{Error, Result};
use crate::integrals::{
    build_h, build_h0, build_h1, build_h2, build_h3, build_h4, build_i, build_l, ModelParams,
};
use crate::phasepoly::PhasePoly;

/// Force evaluation gives up below this `|sin(theta)|`.
pub const SINGULAR_SIN: f64 = 1e-12;
/// Floor for the denominator of a relative drift.
pub const DRIFT_EPS: f64 = 1e-12;
pub const MIN_START_SIN: f64 = 0.1;
pub const MIN_START_R: f64 = 0.1;

/// Step size and count for the fourth-order scaling check.
pub const ORDER_DT: f64 = 2e-2;
pub const ORDER_STEPS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceParams {
    pub lambda: u32,
    pub psi0: f64,
    pub k: f64,
}

impl ForceParams {
    pub fn theta(&self, x: f64, y: f64) -> f64 {
        self.lambda as f64 * y.atan2(x) + self.psi0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl State {
    pub fn planar(x: f64, y: f64, px: f64, py: f64) -> Self {
        State {
            x,
            y,
            px,
            py,
            ..State::default()
        }
    }

    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn polar(&self, k: f64) -> FloatCoords {
        let r = self.r();
        FloatCoords {
            r,
            psi: self.y.atan2(self.x),
            z: self.z,
            p_r: (self.x * self.px + self.y * self.py) / r,
            p_psi: self.x * self.py - self.y * self.px,
            p_z: self.pz,
            k,
        }
    }

    fn max_abs_diff(&self, o: &State) -> f64 {
        [
            self.x - o.x,
            self.y - o.y,
            self.z - o.z,
            self.px - o.px,
            self.py - o.py,
            self.pz - o.pz,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }

    fn max_abs(&self) -> f64 {
        self.max_abs_diff(&State::default())
    }
}

/// `V = k / (r^2 sin^2(lambda psi + psi0))`.
pub fn potential(x: f64, y: f64, p: &ForceParams) -> f64 {
    let s = p.theta(x, y).sin();
    p.k / ((x * x + y * y) * s * s)
}

/// `-grad V`, via the polar partials `dV/dr = -2F/r^3` and `dV/dpsi = F'/r^2`.
pub fn force(x: f64, y: f64, p: &ForceParams) -> Result<(f64, f64)> {
    force_at(x, y, p, 0)
}

fn force_at(x: f64, y: f64, p: &ForceParams, step: usize) -> Result<(f64, f64)> {
    let r = x.hypot(y);
    if r == 0.0 {
        return Err(Error::Origin { step });
    }
    if p.k == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (s, c) = p.theta(x, y).sin_cos();
    if s.abs() < SINGULAR_SIN {
        return Err(Error::Singularity { step, sin: s.abs() });
    }
    let f = p.k / (s * s);
    let f_dot = -2.0 * p.k * p.lambda as f64 * c / (s * s * s);
    let dv_dr = -2.0 * f / (r * r * r);
    let dv_dpsi = f_dot / (r * r);
    let (cos_psi, sin_psi) = (x / r, y / r);
    let dv_dx = cos_psi * dv_dr - sin_psi / r * dv_dpsi;
    let dv_dy = sin_psi * dv_dr + cos_psi / r * dv_dpsi;
    Ok((-dv_dx, -dv_dy))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Leapfrog,
    Composition4,
    Rk4Reference,
}

impl std::str::FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leapfrog" => Ok(Integrator::Leapfrog),
            "composition4" => Ok(Integrator::Composition4),
            "rk4-reference" => Ok(Integrator::Rk4Reference),
            _ => Err(Error::InvalidConfig(format!("unknown integrator `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub lambda: u32,
    pub psi0: f64,
    pub k: f64,
    pub initial: State,
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub seed: u64,
    pub sample_every: usize,
    pub three_d: bool,
}

impl SimConfig {
    pub fn new(lambda: u32, psi0: f64, k: f64, initial: State) -> Self {
        SimConfig {
            lambda,
            psi0,
            k,
            initial,
            dt: 1e-4,
            steps: 100_000,
            integrator: Integrator::Composition4,
            seed: 0,
            sample_every: 100,
            three_d: false,
        }
    }

    pub fn params(&self) -> ForceParams {
        ForceParams {
            lambda: self.lambda,
            psi0: self.psi0,
            k: self.k,
        }
    }

    /// `k = 0` is accepted as the free-particle limit.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.lambda == 0 {
            return Err(Error::InvalidLambda(0));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return bad("k must be non-negative");
        }
        if !self.psi0.is_finite() {
            return bad("psi0 must be finite");
        }
        if !(self.dt.is_finite() && self.dt != 0.0)
            || !(self.dt.abs() * self.steps as f64).is_finite()
        {
            return bad("dt must be finite and nonzero");
        }
        if self.sample_every == 0 {
            return bad("sample interval must be positive");
        }
        let s = &self.initial;
        let all = [s.x, s.y, s.z, s.px, s.py, s.pz];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("initial state must be finite");
        }
        if !self.three_d && (s.z != 0.0 || s.pz != 0.0) {
            return bad("planar run needs z = p_z = 0");
        }
        if s.r() < MIN_START_R {
            return bad("initial r below 0.1");
        }
        if self.params().theta(s.x, s.y).sin().abs() < MIN_START_SIN {
            return bad("initial |sin(theta)| below 0.1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub state: State,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub min_abs_sin: f64,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        &self
            .samples
            .last()
            .expect("trajectory holds the initial sample")
            .state
    }
}

fn kick(s: &mut State, p: &ForceParams, h: f64, step: usize) -> Result<()> {
    let (fx, fy) = force_at(s.x, s.y, p, step)?;
    s.px += h * fx;
    s.py += h * fy;
    Ok(())
}

fn drift(s: &mut State, h: f64) {
    s.x += h * s.px;
    s.y += h * s.py;
    s.z += h * s.pz;
}

// position Verlet: drift, kick, drift
fn leapfrog(s: &mut State, p: &ForceParams, h: f64, step: usize) -> Result<()> {
    drift(s, h / 2.0);
    kick(s, p, h, step)?;
    drift(s, h / 2.0);
    Ok(())
}

/// Triple-jump weights `(w1, w0, w1)`.
pub fn triple_jump() -> (f64, f64) {
    let cbrt2 = 2f64.cbrt();
    (1.0 / (2.0 - cbrt2), -cbrt2 / (2.0 - cbrt2))
}

fn composition4(s: &mut State, p: &ForceParams, h: f64, step: usize) -> Result<()> {
    let (w1, w0) = triple_jump();
    leapfrog(s, p, w1 * h, step)?;
    leapfrog(s, p, w0 * h, step)?;
    leapfrog(s, p, w1 * h, step)
}

fn derivative(s: &State, p: &ForceParams, step: usize) -> Result<State> {
    let (fx, fy) = force_at(s.x, s.y, p, step)?;
    Ok(State {
        x: s.px,
        y: s.py,
        z: s.pz,
        px: fx,
        py: fy,
        pz: 0.0,
    })
}

fn axpy(s: &State, h: f64, d: &State) -> State {
    State {
        x: s.x + h * d.x,
        y: s.y + h * d.y,
        z: s.z + h * d.z,
        px: s.px + h * d.px,
        py: s.py + h * d.py,
        pz: s.pz + h * d.pz,
    }
}

fn rk4(s: &mut State, p: &ForceParams, h: f64, step: usize) -> Result<()> {
    let k1 = derivative(s, p, step)?;
    let k2 = derivative(&axpy(s, h / 2.0, &k1), p, step)?;
    let k3 = derivative(&axpy(s, h / 2.0, &k2), p, step)?;
    let k4 = derivative(&axpy(s, h, &k3), p, step)?;
    let mut d = k1;
    for (w, k) in [(2.0, k2), (2.0, k3), (1.0, k4)] {
        d = axpy(&d, w, &k);
    }
    *s = axpy(s, h / 6.0, &d);
    Ok(())
}

pub fn step_once(
    s: &mut State,
    p: &ForceParams,
    scheme: Integrator,
    h: f64,
    step: usize,
) -> Result<()> {
    match scheme {
        Integrator::Leapfrog => leapfrog(s, p, h, step),
        Integrator::Composition4 => composition4(s, p, h, step),
        Integrator::Rk4Reference => rk4(s, p, h, step),
    }
}

/// Samples at step 0, every `sample_every` steps, and at the final step.
pub fn integrate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let p = cfg.params();
    let mut s = cfg.initial;
    let sin_of = |s: &State| p.theta(s.x, s.y).sin().abs();
    let mut min_abs_sin = sin_of(&s);
    let mut samples = vec![Sample {
        step: 0,
        t: 0.0,
        state: s,
    }];
    for n in 1..=cfg.steps {
        step_once(&mut s, &p, cfg.integrator, cfg.dt, n)?;
        min_abs_sin = min_abs_sin.min(sin_of(&s));
        if n % cfg.sample_every == 0 || n == cfg.steps {
            samples.push(Sample {
                step: n,
                t: n as f64 * cfg.dt,
                state: s,
            });
        }
    }
    Ok(Trajectory {
        samples,
        min_abs_sin,
    })
}

/// Runs `n` steps forward then `n` with `-dt`; returns the largest coordinate
/// error relative to the size of the initial state.
pub fn reversibility_error(cfg: &SimConfig) -> Result<f64> {
    let fwd = integrate(cfg)?;
    let mut back = cfg.clone();
    back.initial = *fwd.last();
    back.dt = -cfg.dt;
    back.sample_every = cfg.steps.max(1);
    let end = integrate(&back)?;
    Ok(end.last().max_abs_diff(&cfg.initial) / cfg.initial.max_abs().max(DRIFT_EPS))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftSeries {
    pub name: String,
    pub initial: f64,
    pub values: Vec<f64>,
    pub drift: Vec<f64>,
    pub max_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub steps: usize,
    pub series: Vec<DriftSeries>,
    /// Max drift of the first series, by convention the energy.
    pub energy_drift: f64,
    pub min_abs_sin: f64,
}

impl DriftReport {
    pub fn get(&self, name: &str) -> Option<&DriftSeries> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn max_drift(&self) -> f64 {
        self.series.iter().fold(0.0, |m, s| m.max(s.max_drift))
    }
}

pub fn relative_drift(q: f64, q0: f64) -> f64 {
    (q - q0).abs() / q0.abs().max(DRIFT_EPS)
}

pub fn conserve_report(
    traj: &Trajectory,
    integrals: &[(String, PhasePoly)],
    params: &ForceParams,
) -> Result<DriftReport> {
    let mut series = Vec::with_capacity(integrals.len());
    for (name, q) in integrals {
        let values = traj
            .samples
            .iter()
            .map(|smp| q.eval_float(&smp.state.polar(params.k), params.lambda, params.psi0))
            .collect::<Result<Vec<f64>>>()?;
        let initial = values[0];
        let drift: Vec<f64> = values.iter().map(|&v| relative_drift(v, initial)).collect();
        let max_drift = drift.iter().fold(0.0f64, |m, &d| m.max(d));
        series.push(DriftSeries {
            name: name.clone(),
            initial,
            values,
            drift,
            max_drift,
        });
    }
    Ok(DriftReport {
        steps: traj.samples.last().map_or(0, |s| s.step),
        energy_drift: series.first().map_or(0.0, |s| s.max_drift),
        series,
        min_abs_sin: traj.min_abs_sin,
    })
}

/// Random starts with `|sin(theta)| >= 0.3`, `r` in `[0.5, 2)`, and every
/// listed integral at least `0.05` in magnitude.
pub fn safe_initial_states(
    seed: u64,
    count: usize,
    params: &ForceParams,
    three_d: bool,
    integrals: &[PhasePoly],
) -> Result<Vec<State>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lam = params.lambda as f64;
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 10_000 * count.max(1) {
            return Err(Error::InvalidConfig(
                "no safe initial condition found".into(),
            ));
        }
        // pick a sector, then an angle well inside it
        let sector = rng.gen_range(0..2 * params.lambda) as f64;
        let theta = sector * PI + rng.gen_range(0.3..PI - 0.3);
        let psi = (theta - params.psi0) / lam;
        let r = rng.gen_range(0.5..2.0);
        let mut s = State::planar(
            r * psi.cos(),
            r * psi.sin(),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if three_d {
            s.z = rng.gen_range(-1.0..1.0);
            s.pz = rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
        let theta_now = params.theta(s.x, s.y);
        if theta_now.sin().abs() < MIN_START_SIN || s.r() < MIN_START_R {
            continue;
        }
        let at = s.polar(params.k);
        let mut ok = true;
        for q in integrals {
            if q.eval_float(&at, params.lambda, params.psi0)?.abs() < 0.05 {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(s);
        }
    }
    Ok(out)
}

/// `H, L, I` in the plane; `H0..H4, I` for the lift.
pub fn tracked_integrals(lambda: u32, three_d: bool) -> Result<Vec<(String, PhasePoly)>> {
    let p = ModelParams::new(lambda as i64)?;
    let named = |n: &str, q: PhasePoly| (n.to_string(), q);
    Ok(if three_d {
        vec![
            named("H0", build_h0(&p)),
            named("H1", build_h1()),
            named("H2", build_h2(&p)),
            named("H3", build_h3(&p)),
            named("H4", build_h4(&p)),
            named("I", build_i(&p)),
        ]
    } else {
        vec![
            named("H", build_h(&p)),
            named("L", build_l(&p)),
            named("I", build_i(&p)),
        ]
    })
}

pub const CSV_HEADER: &str = "step,t,x,y,z,px,py,pz,H,L,I,driftH,driftL,driftI";

/// One row per sample. The `H` and `L` columns fall back to `H0` and `H2` for
/// the lift; anything still missing is written as zero.
pub fn to_csv(traj: &Trajectory, report: &DriftReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let pick = |a: &str, b: &str| report.get(a).or_else(|| report.get(b));
    let cols = [pick("H", "H0"), pick("L", "H2"), pick("I", "I")];
    for (i, smp) in traj.samples.iter().enumerate() {
        let s = &smp.state;
        let _ = write!(out, "{},{:.16e}", smp.step, smp.t);
        for v in [s.x, s.y, s.z, s.px, s.py, s.pz] {
            let _ = write!(out, ",{v:.16e}");
        }
        for c in &cols {
            let _ = write!(out, ",{:.16e}", c.map_or(0.0, |c| c.values[i]));
        }
        for c in &cols {
            let _ = write!(out, ",{:.16e}", c.map_or(0.0, |c| c.drift[i]));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub config: SimConfig,
    pub samples: usize,
    pub max_drift: BTreeMap<String, f64>,
    pub energy_drift: f64,
    pub min_abs_sin: f64,
}

impl SimSummary {
    pub fn new(config: &SimConfig, traj: &Trajectory, report: &DriftReport) -> Self {
        SimSummary {
            config: config.clone(),
            samples: traj.samples.len(),
            max_drift: report
                .series
                .iter()
                .map(|s| (s.name.clone(), s.max_drift))
                .collect(),
            energy_drift: report.energy_drift,
            min_abs_sin: report.min_abs_sin,
        }
    }
}
