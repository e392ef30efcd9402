//! JSON configuration ingestion and validation.
//!
//! A configuration document names one experiment, carries that experiment's
//! parameter section plus shared plumbing (grid, seed, units, output paths),
//! and is kept alongside its parsed JSON value so sweeps can patch fields by
//! dotted path and reports can echo the exact input. Unknown keys are
//! rejected everywhere, and every structural rule is checked at load time so
//! runners only see buildable inputs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use realclock::chamber::ChamberConfig;
use realclock::clock::ClockModel;
use realclock::conditional::{ConditionalQuery, RingGrid, TwoParticleModel};
use realclock::hilbert::{C64, CMatrix, CVector, DensityMatrix, HermitianOperator, StateVector};
use realclock::undecidability::UndecidabilityInput;
use realclock::zurek::{CouplingSpec, SpinBathConfig};
use realclock::{Error, Result};
use serde::{Deserialize, Serialize};

pub fn config_err(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Evolve,
    Zurek,
    Chamber,
    Undecide,
    Conditional,
    Sweep,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Evolve => "evolve",
            Self::Zurek => "zurek",
            Self::Chamber => "chamber",
            Self::Undecide => "undecide",
            Self::Conditional => "conditional",
            Self::Sweep => "sweep",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
pub enum Units {
    #[default]
    #[serde(rename = "natural")]
    Natural,
    #[serde(rename = "SI")]
    Si,
}

/// Physical constants used to convert SI inputs at the boundary. All core
/// computations run with hbar = 1; energies divide by hbar on the way in,
/// and the declared values are echoed into the report.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_planck_length")]
    pub planck_length: f64,
    #[serde(default = "default_planck_time")]
    pub planck_time: f64,
}

fn default_hbar() -> f64 {
    1.054571817e-34
}

fn default_planck_length() -> f64 {
    1.616255e-35
}

fn default_planck_time() -> f64 {
    5.391247e-44
}

impl Default for ConstantsSpec {
    fn default() -> Self {
        Self {
            hbar: default_hbar(),
            planck_length: default_planck_length(),
            planck_time: default_planck_time(),
        }
    }
}

impl ConstantsSpec {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("planck_length", self.planck_length),
            ("planck_time", self.planck_time),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(config_err(format!(
                    "constants.{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// The unit context handed to section builders: natural units leave inputs
/// untouched, SI divides energies by hbar.
#[derive(Debug, Clone, Copy)]
pub struct UnitContext {
    pub units: Units,
    pub constants: ConstantsSpec,
}

impl UnitContext {
    /// An energy-like input (Hamiltonian entries, couplings) to the core's
    /// hbar = 1 frequency convention.
    pub fn energy(&self, v: f64) -> f64 {
        match self.units {
            Units::Natural => v,
            Units::Si => v / self.constants.hbar,
        }
    }

    /// A mass-like input; the free-particle and collimation combinations
    /// use m / hbar.
    pub fn mass(&self, v: f64) -> f64 {
        match self.units {
            Units::Natural => v,
            Units::Si => v / self.constants.hbar,
        }
    }

    /// A magnetic-moment-like input; the dipole-phase combination uses
    /// mu * hbar.
    pub fn moment(&self, v: f64) -> f64 {
        match self.units {
            Units::Natural => v,
            Units::Si => v * self.constants.hbar,
        }
    }

    fn require(&self, field: Option<f64>, name: &str, si_default: f64) -> Result<f64> {
        match (field, self.units) {
            (Some(v), _) => Ok(v),
            (None, Units::Si) => Ok(si_default),
            (None, Units::Natural) => Err(config_err(format!(
                "{name} is required in natural units (SI configs default it from the declared constants)"
            ))),
        }
    }

    pub fn planck_time(&self, field: Option<f64>, name: &str) -> Result<f64> {
        self.require(field, name, self.constants.planck_time)
    }

    pub fn planck_length(&self, field: Option<f64>, name: &str) -> Result<f64> {
        self.require(field, name, self.constants.planck_length)
    }
}

/// A complex number in JSON: a bare real or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
}

impl Cx {
    pub fn to_c64(self) -> C64 {
        match self {
            Self::Real(re) => C64::new(re, 0.0),
            Self::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    Linear,
    Log,
}

/// Either explicit `points` or a `from`/`to`/`count` range with a scale.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub points: Option<Vec<f64>>,
    #[serde(default)]
    pub from: Option<f64>,
    #[serde(default)]
    pub to: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub scale: Option<ScaleKind>,
}

fn check_strictly_increasing(points: &[f64], what: &str) -> Result<()> {
    if points.is_empty() {
        return Err(config_err(format!("{what} must not be empty")));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(config_err(format!("{what} must be finite")));
    }
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// Evenly spaced values with exact endpoints, on a linear or log scale.
pub fn spaced_values(from: f64, to: f64, count: usize, scale: ScaleKind) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(config_err(format!("count must be at least 2, got {count}")));
    }
    if !from.is_finite() || !to.is_finite() || from >= to {
        return Err(config_err(format!(
            "range must be finite with from < to, got [{from}, {to}]"
        )));
    }
    if scale == ScaleKind::Log && from <= 0.0 {
        return Err(config_err(format!(
            "log scale requires positive endpoints, got from = {from}"
        )));
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = i as f64 / (count - 1) as f64;
        out.push(match scale {
            ScaleKind::Linear => from + (to - from) * s,
            ScaleKind::Log => (from.ln() + (to.ln() - from.ln()) * s).exp(),
        });
    }
    out[0] = from;
    out[count - 1] = to;
    Ok(out)
}

impl GridSpec {
    pub fn materialize(&self) -> Result<Vec<f64>> {
        match (&self.points, self.from, self.to, self.count) {
            (Some(points), None, None, None) => {
                if self.scale.is_some() {
                    return Err(config_err("grid scale only applies to a from/to/count range"));
                }
                check_strictly_increasing(points, "grid points")?;
                Ok(points.clone())
            }
            (None, Some(from), Some(to), Some(count)) => {
                let values =
                    spaced_values(from, to, count, self.scale.unwrap_or(ScaleKind::Linear))?;
                check_strictly_increasing(&values, "grid points")?;
                Ok(values)
            }
            _ => Err(config_err(
                "grid needs either explicit points or the full from/to/count range",
            )),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
    #[serde(default)]
    pub json_path: Option<PathBuf>,
    #[serde(default)]
    pub svg_path: Option<PathBuf>,
}

/// The clock attached to evolution-style experiments.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClockSpecJson {
    Ideal,
    Gaussian {
        width: f64,
    },
    NgVanDam {
        #[serde(default)]
        planck_time: Option<f64>,
        #[serde(default = "one")]
        prefactor: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ClockSpecJson {
    pub fn build(&self, units: &UnitContext) -> Result<ClockModel> {
        match *self {
            Self::Ideal => Ok(ClockModel::ideal()),
            Self::Gaussian { width } => ClockModel::gaussian(width),
            Self::NgVanDam { planck_time, prefactor } => {
                let t_p = units.planck_time(planck_time, "clock.planck_time")?;
                ClockModel::ng_van_dam(t_p, prefactor)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    ClosedForm,
    Master,
    Quadrature,
    #[default]
    Compare,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub pure: Option<Vec<Cx>>,
    #[serde(default)]
    pub density: Option<Vec<Vec<Cx>>>,
}

impl InitialSpec {
    pub fn build(&self, dim: usize) -> Result<DensityMatrix> {
        match (&self.pure, &self.density) {
            (Some(amps), None) => {
                if amps.len() != dim {
                    return Err(config_err(format!(
                        "initial.pure has {} amplitudes for a dimension-{dim} Hamiltonian",
                        amps.len()
                    )));
                }
                let v = CVector::from_iterator(dim, amps.iter().map(|c| c.to_c64()));
                Ok(DensityMatrix::from_pure(&StateVector::new(v)?))
            }
            (None, Some(rows)) => {
                let mat = complex_matrix(rows, "initial.density")?;
                if mat.nrows() != dim {
                    return Err(config_err(format!(
                        "initial.density is {}x{} for a dimension-{dim} Hamiltonian",
                        mat.nrows(),
                        mat.ncols()
                    )));
                }
                DensityMatrix::new(mat)
            }
            _ => Err(config_err("initial needs exactly one of pure or density")),
        }
    }
}

fn complex_matrix(rows: &[Vec<Cx>], what: &str) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(config_err(format!("{what} must be a non-empty square matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| rows[r][c].to_c64()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub hamiltonian: Vec<Vec<Cx>>,
    pub initial: InitialSpec,
    pub clock: ClockSpecJson,
    #[serde(default)]
    pub method: MethodSpec,
}

impl EvolveSection {
    pub fn build(&self, units: &UnitContext) -> Result<(HermitianOperator, DensityMatrix, ClockModel)> {
        let mut mat = complex_matrix(&self.hamiltonian, "evolve.hamiltonian")?;
        if mat.nrows() < 2 {
            return Err(config_err("evolve.hamiltonian must be at least 2x2"));
        }
        mat.iter_mut().for_each(|z| *z = C64::new(units.energy(z.re), units.energy(z.im)));
        let h = HermitianOperator::new(mat)?;
        let rho = self.initial.build(h.dim())?;
        let clock = self.clock.build(units)?;
        Ok((h, rho, clock))
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpecJson {
    Constant { g: f64 },
    Linear { g0: f64 },
    Uniform { g_min: f64, g_max: f64 },
}

impl CouplingSpecJson {
    fn to_core(self, units: &UnitContext) -> CouplingSpec {
        match self {
            Self::Constant { g } => CouplingSpec::Constant { g: units.energy(g) },
            Self::Linear { g0 } => CouplingSpec::Linear { g0: units.energy(g0) },
            Self::Uniform { g_min, g_max } => CouplingSpec::Uniform {
                g_min: units.energy(g_min),
                g_max: units.energy(g_max),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZurekAmplitudes {
    pub a: Cx,
    pub b: Cx,
    pub alpha: Vec<Cx>,
    pub beta: Vec<Cx>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevivalSpecJson {
    pub t_max: f64,
    pub step: f64,
    #[serde(default)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZurekSection {
    pub n: usize,
    pub coupling: CouplingSpecJson,
    #[serde(default)]
    pub amplitudes: Option<ZurekAmplitudes>,
    #[serde(default)]
    pub seeded: bool,
    pub clock: ClockSpecJson,
    #[serde(default)]
    pub revival_search: Option<RevivalSpecJson>,
}

impl ZurekSection {
    pub fn build(&self, units: &UnitContext, seed: Option<u64>) -> Result<(SpinBathConfig, ClockModel)> {
        let clock = self.clock.build(units)?;
        let spec = self.coupling.to_core(units);
        let bath = match (&self.amplitudes, self.seeded) {
            (Some(amps), false) => {
                let couplings = match spec {
                    CouplingSpec::Constant { g } => vec![g; self.n],
                    CouplingSpec::Linear { g0 } => {
                        (1..=self.n).map(|k| k as f64 * g0).collect()
                    }
                    CouplingSpec::Uniform { .. } => {
                        return Err(config_err(
                            "uniform couplings are sampled; use seeded: true",
                        ))
                    }
                };
                if amps.alpha.len() != self.n || amps.beta.len() != self.n {
                    return Err(config_err(format!(
                        "zurek.amplitudes lists must have n = {} entries",
                        self.n
                    )));
                }
                SpinBathConfig::new(
                    couplings,
                    amps.a.to_c64(),
                    amps.b.to_c64(),
                    amps.alpha.iter().map(|c| c.to_c64()).collect(),
                    amps.beta.iter().map(|c| c.to_c64()).collect(),
                )?
            }
            (None, true) => {
                let seed = seed.ok_or_else(|| {
                    config_err("seeded zurek generation requires a seed (config or --seed)")
                })?;
                SpinBathConfig::seeded(self.n, &spec, seed)?
            }
            _ => {
                return Err(config_err(
                    "zurek needs exactly one of amplitudes or seeded: true",
                ))
            }
        };
        Ok((bath, clock))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChamberSection {
    pub n: usize,
    pub b_field: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub f_k: Vec<f64>,
    pub tau: f64,
    pub t_total: f64,
    pub m_env: f64,
    pub d: f64,
    pub mu: f64,
    #[serde(default)]
    pub planck_time: Option<f64>,
    pub a: Cx,
    pub b: Cx,
    pub alpha: Vec<Cx>,
    pub beta: Vec<Cx>,
    #[serde(default)]
    pub aperture: Option<f64>,
    #[serde(default)]
    pub ratio_threshold: Option<f64>,
}

impl ChamberSection {
    pub fn build(&self, units: &UnitContext) -> Result<ChamberConfig> {
        let cfg = ChamberConfig {
            n: self.n,
            b_field: self.b_field,
            gamma1: units.energy(self.gamma1),
            gamma2: units.energy(self.gamma2),
            f_k: self.f_k.iter().map(|&f| units.energy(f)).collect(),
            tau: self.tau,
            t_total: self.t_total,
            m_env: units.mass(self.m_env),
            d: self.d,
            mu: units.moment(self.mu),
            planck_time: units.planck_time(self.planck_time, "chamber.planck_time")?,
            a: self.a.to_c64(),
            b: self.b.to_c64(),
            alpha: self.alpha.iter().map(|c| c.to_c64()).collect(),
            beta: self.beta.iter().map(|c| c.to_c64()).collect(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UndecideSection {
    pub chamber: ChamberSection,
    #[serde(default)]
    pub l_p: Option<f64>,
    pub radius: f64,
    #[serde(default)]
    pub extra_noise_log10: Option<f64>,
}

impl UndecideSection {
    pub fn build(&self, units: &UnitContext) -> Result<UndecidabilityInput> {
        let input = UndecidabilityInput {
            chamber: self.chamber.build(units)?,
            l_p: units.planck_length(self.l_p, "undecide.l_p")?,
            radius: self.radius,
            extra_noise_log10: self.extra_noise_log10,
        };
        input.validate()?;
        Ok(input)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub center: f64,
    pub sigma: f64,
    pub momentum: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default)]
    pub packet: Option<PacketSpec>,
    #[serde(default)]
    pub site: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    pub sites: usize,
    pub length: f64,
    pub mass: f64,
    pub state: StateSpec,
}

impl ParticleSpec {
    fn grid(&self) -> Result<RingGrid> {
        RingGrid::new(self.sites, self.length)
    }

    fn state(&self, grid: &RingGrid) -> Result<StateVector> {
        match (self.state.packet, self.state.site) {
            (Some(p), None) => grid.gaussian_packet(p.center, p.sigma, p.momentum),
            (None, Some(i)) => StateVector::basis(grid.n(), i),
            _ => Err(config_err("state needs exactly one of packet or site")),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub center: f64,
    pub halfwidth: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalSection {
    pub system: ParticleSpec,
    pub clock: ParticleSpec,
    pub reading: BandSpec,
    pub bands: Vec<[f64; 2]>,
    pub window: [f64; 2],
    #[serde(default)]
    pub time_step: Option<f64>,
    #[serde(default = "one_doubling")]
    pub doublings: u32,
    #[serde(default)]
    pub born_time: Option<f64>,
}

fn one_doubling() -> u32 {
    1
}

pub struct ConditionalSetup {
    pub model: TwoParticleModel,
    pub system_state: StateVector,
    pub joint: StateVector,
    pub queries: Vec<ConditionalQuery>,
    pub bands: Vec<[f64; 2]>,
}

impl ConditionalSection {
    pub fn build(&self, units: &UnitContext) -> Result<ConditionalSetup> {
        if self.bands.is_empty() {
            return Err(config_err("conditional.bands must list at least one interval"));
        }
        for (i, [lo, hi]) in self.bands.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(config_err(format!(
                    "conditional.bands[{i}] must be a finite interval with lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        let centers: Vec<f64> = self.bands.iter().map(|[lo, hi]| 0.5 * (lo + hi)).collect();
        check_strictly_increasing(&centers, "conditional band centers")?;
        let grid_s = self.system.grid()?;
        let grid_c = self.clock.grid()?;
        let model = TwoParticleModel::new(
            grid_s,
            grid_c,
            units.mass(self.system.mass),
            units.mass(self.clock.mass),
        )?;
        let system_state = self.system.state(model.grid_system())?;
        let clock_state = self.clock.state(model.grid_clock())?;
        let joint = model.product_state(&system_state, &clock_state)?;
        let queries = self
            .bands
            .iter()
            .map(|[lo, hi]| {
                let mut q = ConditionalQuery::new(
                    0.5 * (lo + hi),
                    0.5 * (hi - lo),
                    self.reading.center,
                    self.reading.halfwidth,
                    (self.window[0], self.window[1]),
                )?;
                q.time_step = self.time_step;
                q.doublings = self.doublings;
                q.validate()?;
                Ok(q)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConditionalSetup {
            model,
            system_state,
            joint,
            queries,
            bands: self.bands.clone(),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub target: ExperimentKind,
    pub parameter: String,
    #[serde(default)]
    pub values: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    pub from: Option<f64>,
    #[serde(default)]
    pub to: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub scale: Option<ScaleKind>,
}

impl SweepSection {
    /// The values to sweep, as JSON numbers. Integral range values become
    /// JSON integers so integer-typed fields accept them.
    pub fn materialize_values(&self) -> Result<Vec<serde_json::Value>> {
        match (&self.values, self.from, self.to, self.count) {
            (Some(values), None, None, None) => {
                if self.scale.is_some() {
                    return Err(config_err("sweep scale only applies to a from/to/count range"));
                }
                if values.is_empty() {
                    return Err(config_err("sweep.values must not be empty"));
                }
                for (i, v) in values.iter().enumerate() {
                    if value_as_f64(v).is_none() {
                        return Err(config_err(format!(
                            "sweep.values[{i}] must be a finite number, got {v}"
                        )));
                    }
                }
                Ok(values.clone())
            }
            (None, Some(from), Some(to), Some(count)) => {
                let raw = spaced_values(from, to, count, self.scale.unwrap_or(ScaleKind::Linear))?;
                Ok(raw.into_iter().map(number_value).collect())
            }
            _ => Err(config_err(
                "sweep needs either explicit values or the full from/to/count range",
            )),
        }
    }
}

/// A JSON number for `v`, preferring the integer representation when exact
/// so integer config fields can be swept.
pub fn number_value(v: f64) -> serde_json::Value {
    if v.fract() == 0.0 && v.abs() < 9e15 {
        serde_json::Value::from(v as i64)
    } else {
        serde_json::Value::from(v)
    }
}

pub fn value_as_f64(v: &serde_json::Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

/// The whole configuration document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub constants: Option<ConstantsSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub evolve: Option<EvolveSection>,
    #[serde(default)]
    pub zurek: Option<ZurekSection>,
    #[serde(default)]
    pub chamber: Option<ChamberSection>,
    #[serde(default)]
    pub undecide: Option<UndecideSection>,
    #[serde(default)]
    pub conditional: Option<ConditionalSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl RawConfig {
    pub fn unit_context(&self) -> Result<UnitContext> {
        if self.units == Units::Natural && self.constants.is_some() {
            return Err(config_err(
                "constants only apply to SI units; natural-unit configs must omit them",
            ));
        }
        if let Some(c) = &self.constants {
            c.validate()?;
        }
        Ok(UnitContext {
            units: self.units,
            constants: self.constants.unwrap_or_default(),
        })
    }

    fn has_section(&self, kind: ExperimentKind) -> bool {
        match kind {
            ExperimentKind::Evolve => self.evolve.is_some(),
            ExperimentKind::Zurek => self.zurek.is_some(),
            ExperimentKind::Chamber => self.chamber.is_some(),
            ExperimentKind::Undecide => self.undecide.is_some(),
            ExperimentKind::Conditional => self.conditional.is_some(),
            ExperimentKind::Sweep => self.sweep.is_some(),
        }
    }

    fn grid_required(kind: ExperimentKind) -> bool {
        matches!(
            kind,
            ExperimentKind::Evolve
                | ExperimentKind::Zurek
                | ExperimentKind::Chamber
                | ExperimentKind::Undecide
        )
    }

    /// Structural validation: the right sections are present, no stray
    /// sections, grid presence matches the experiment, units are coherent.
    pub fn validate(&self) -> Result<()> {
        self.unit_context()?;
        let mut allowed = vec![self.experiment];
        if self.experiment == ExperimentKind::Sweep {
            let sweep = self
                .sweep
                .as_ref()
                .ok_or_else(|| config_err("experiment sweep requires a sweep section"))?;
            if sweep.target == ExperimentKind::Sweep {
                return Err(config_err("sweep cannot target another sweep"));
            }
            sweep.materialize_values()?;
            allowed.push(sweep.target);
        }
        for kind in [
            ExperimentKind::Evolve,
            ExperimentKind::Zurek,
            ExperimentKind::Chamber,
            ExperimentKind::Undecide,
            ExperimentKind::Conditional,
            ExperimentKind::Sweep,
        ] {
            let present = self.has_section(kind);
            if allowed.contains(&kind) {
                if !present {
                    return Err(config_err(format!(
                        "experiment {} requires a {kind} section",
                        self.experiment
                    )));
                }
            } else if present {
                return Err(config_err(format!(
                    "section {kind} does not belong to experiment {}",
                    self.experiment
                )));
            }
        }
        let effective = if self.experiment == ExperimentKind::Sweep {
            self.sweep.as_ref().unwrap().target
        } else {
            self.experiment
        };
        if Self::grid_required(effective) {
            let grid = self
                .grid
                .as_ref()
                .ok_or_else(|| config_err(format!("experiment {effective} requires a grid")))?;
            grid.materialize()?;
        } else if self.grid.is_some() {
            return Err(config_err(format!(
                "experiment {effective} takes no grid; its evaluation points come from its own section"
            )));
        }
        Ok(())
    }
}

/// A parsed configuration plus its raw JSON document (for sweep patching
/// and the report echo).
#[derive(Debug, Clone)]
pub struct Loaded {
    pub raw: RawConfig,
    pub document: serde_json::Value,
}

impl Loaded {
    /// Applies a command-line seed override, keeping the echoed document in
    /// step with what actually ran.
    pub fn override_seed(&mut self, seed: Option<u64>) {
        if let Some(seed) = seed {
            self.raw.seed = Some(seed);
            if let Some(map) = self.document.as_object_mut() {
                map.insert("seed".into(), serde_json::Value::from(seed));
            }
        }
    }
}

pub fn parse_config(text: &str) -> Result<Loaded> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        config_err(format!(
            "config error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let document = serde_json::from_str(text)
        .expect("the document parses: the typed form was built from the same text");
    let loaded = Loaded { raw, document };
    loaded.raw.validate()?;
    Ok(loaded)
}

pub fn load_config(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
