//! Scenario configuration: a flat TOML table of scalar keys.
//!
//! A config either lists every required key or names an embedded preset
//! with `preset = "..."` and overrides individual keys.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use super::presets;
use crate::dissipation::{Channel, NoiseSpec, Topology};
use crate::error::{Error, Result};
use crate::evolver::{EvolutionConfig, Integrator, EXPM_MAX_SITES, MAX_SAMPLES};
use crate::model::{battery_hamiltonian, ground_state, product_minus_state, BatteryModel, EffectiveCoupling};
use crate::spin::OperatorMatrix;
use crate::state::DensityMatrix;

/// Largest register a scenario may request.
pub const MAX_SITES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `(|-><-|)^{(x)N}`
    ProductMinus,
    /// Ground state of the battery Hamiltonian including `j_prime`.
    GroundInteracting,
}

impl InitialState {
    pub fn name(&self) -> &'static str {
        match self {
            InitialState::ProductMinus => "product_minus",
            InitialState::GroundInteracting => "ground_interacting",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub channel: Vec<Channel>,
    pub topology: Vec<Topology>,
    pub n_sites: Vec<usize>,
    pub initial_state: InitialState,
    pub h: f64,
    pub j_prime: f64,
    pub gamma: f64,
    pub gamma_offdiag_modulus: f64,
    /// Radians.
    pub gamma_offdiag_phase: f64,
    pub j_z: f64,
    pub j_xx: f64,
    pub d_dm: f64,
    pub t_max: f64,
    pub dt_sample: f64,
    pub integrator: Integrator,
    /// RK4 step; derived from the largest rate when absent.
    pub dt_internal: Option<f64>,
    pub periodic: bool,
    /// Trailing window used for the steady-state check.
    pub steady_window: f64,
}

const KEYS: &[&str] = &[
    "preset",
    "name",
    "description",
    "channel",
    "topology",
    "n_sites",
    "initial_state",
    "h",
    "j_prime",
    "gamma",
    "gamma_offdiag_modulus",
    "gamma_offdiag_phase",
    "j_z",
    "j_xx",
    "d_dm",
    "t_max",
    "dt_sample",
    "integrator",
    "dt_internal",
    "periodic",
    "steady_window",
];

/// Collects every problem before failing.
struct Reader<'a> {
    table: &'a toml::Table,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn fail(&mut self, key: &str, msg: impl AsRef<str>) {
        self.errors.push(format!("{key}: {}", msg.as_ref()));
    }

    fn get(&mut self, key: &str, required: bool) -> Option<&'a toml::Value> {
        let v = self.table.get(key);
        if v.is_none() && required {
            self.fail(key, "missing required key");
        }
        v
    }

    fn string(&mut self, key: &str, required: bool) -> Option<String> {
        match self.get(key, required)? {
            toml::Value::String(s) => Some(s.clone()),
            other => {
                self.fail(key, format!("expected a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn float(&mut self, key: &str, default: Option<f64>) -> f64 {
        match self.get(key, default.is_none()) {
            None => default.unwrap_or(f64::NAN),
            Some(toml::Value::Float(x)) if x.is_finite() => *x,
            Some(toml::Value::Integer(i)) => *i as f64,
            Some(other) => {
                self.fail(key, format!("expected a finite number, got {other}"));
                f64::NAN
            }
        }
    }

    fn non_negative(&mut self, key: &str, default: Option<f64>) -> f64 {
        let x = self.float(key, default);
        if x < 0.0 {
            self.fail(key, format!("must be >= 0, got {x}"));
        }
        x
    }

    fn positive(&mut self, key: &str, default: Option<f64>) -> f64 {
        let x = self.float(key, default);
        if x <= 0.0 {
            self.fail(key, format!("must be > 0, got {x}"));
        }
        x
    }

    fn choice<T: Copy>(&mut self, key: &str, options: &[(&str, T)], default: Option<T>) -> Option<T> {
        let s = match self.get(key, default.is_none()) {
            None => return default,
            Some(toml::Value::String(s)) => s.clone(),
            Some(other) => {
                self.fail(key, format!("expected a string, got {}", other.type_str()));
                return None;
            }
        };
        let found = options.iter().find(|(name, _)| *name == s).map(|(_, v)| *v);
        if found.is_none() {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            self.fail(key, format!("unknown value {s:?}, expected one of {}", names.join(", ")));
        }
        found
    }
}

const CHANNELS: &[(&str, Channel)] = &[
    ("dephasing", Channel::Dephasing),
    ("amplitude_damping", Channel::AmplitudeDamping),
];
const TOPOLOGIES: &[(&str, Topology)] = &[
    ("local", Topology::Local),
    ("nearest_neighbor", Topology::NearestNeighbor),
    ("all_to_all", Topology::AllToAll),
];
const INITIAL_STATES: &[(&str, InitialState)] = &[
    ("product_minus", InitialState::ProductMinus),
    ("ground_interacting", InitialState::GroundInteracting),
];
const INTEGRATORS: &[(&str, Integrator)] = &[
    ("fixed_step_rk4", Integrator::FixedStepRk4),
    ("liouvillian_expm", Integrator::LiouvillianExpm),
];

impl ScenarioConfig {
    /// Parses config text, resolving a `preset` key if present.
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(vec![format!("syntax: {}", e.message())]))?;
        Self::from_table(&resolve_preset(table)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
        Self::parse(&text)
    }

    /// Preset name or path to a config file.
    pub fn load(target: &str) -> Result<Self> {
        match presets::find(target) {
            Some(p) => Self::parse(p.source),
            None => {
                let path = Path::new(target);
                if path.exists() {
                    Self::from_file(path)
                } else {
                    Err(Error::Config(vec![format!(
                        "{target}: neither a preset name nor an existing file"
                    )]))
                }
            }
        }
    }

    pub fn from_table(table: &toml::Table) -> Result<Self> {
        let mut r = Reader {
            table,
            errors: Vec::new(),
        };
        for key in table.keys() {
            if !KEYS.contains(&key.as_str()) {
                r.fail(key, "unknown key");
            }
        }

        let name = r.string("name", true).unwrap_or_default();
        if table.contains_key("name") && !valid_name(&name) {
            r.fail("name", "use only letters, digits, '_' and '-'");
        }
        let description = r.string("description", false).unwrap_or_default();
        let channel = choices(&mut r, "channel", CHANNELS);
        let topology = choices(&mut r, "topology", TOPOLOGIES);
        let n_sites = sizes(&mut r);
        let initial_state = r.choice("initial_state", INITIAL_STATES, None);
        let h = r.float("h", None);
        let j_prime = r.float("j_prime", Some(0.0));
        let gamma = r.non_negative("gamma", None);
        let gamma_offdiag_modulus = r.non_negative("gamma_offdiag_modulus", Some(0.0));
        let gamma_offdiag_phase = r.float("gamma_offdiag_phase", Some(0.0));
        let j_z = r.float("j_z", Some(0.0));
        let j_xx = r.float("j_xx", Some(0.0));
        let d_dm = r.float("d_dm", Some(0.0));
        let t_max = r.positive("t_max", None);
        let dt_sample = r.positive("dt_sample", None);
        let integrator = r.choice("integrator", INTEGRATORS, Some(Integrator::FixedStepRk4));
        let dt_internal = table
            .contains_key("dt_internal")
            .then(|| r.positive("dt_internal", None));
        let periodic = match r.get("periodic", false) {
            None => true,
            Some(toml::Value::Boolean(b)) => *b,
            Some(other) => {
                r.fail("periodic", format!("expected a boolean, got {}", other.type_str()));
                true
            }
        };
        let steady_window = r.positive("steady_window", Some(1.0));

        if dt_sample > t_max {
            r.fail("dt_sample", format!("exceeds t_max ({dt_sample} > {t_max})"));
        }
        if t_max / dt_sample > MAX_SAMPLES {
            r.fail("dt_sample", "more than 1e6 samples requested");
        }
        if let Some(dt) = dt_internal {
            if dt > dt_sample {
                r.fail("dt_internal", format!("exceeds dt_sample ({dt} > {dt_sample})"));
            }
        }
        if integrator == Some(Integrator::LiouvillianExpm) && n_sites.iter().any(|&n| n > EXPM_MAX_SITES) {
            r.fail(
                "n_sites",
                format!("liouvillian_expm supports at most {EXPM_MAX_SITES} sites"),
            );
        }

        if !r.errors.is_empty() {
            return Err(Error::Config(r.errors));
        }
        Ok(Self {
            name,
            description,
            channel,
            topology,
            n_sites,
            initial_state: initial_state.expect("checked"),
            h,
            j_prime,
            gamma,
            gamma_offdiag_modulus,
            gamma_offdiag_phase,
            j_z,
            j_xx,
            d_dm,
            t_max,
            dt_sample,
            integrator: integrator.expect("checked"),
            dt_internal,
            periodic,
            steady_window,
        })
    }

    /// Re-runs the schema checks after programmatic edits.
    pub fn validate(&self) -> Result<()> {
        Self::from_table(&self.to_table()).map(|_| ())
    }

    pub fn to_table(&self) -> toml::Table {
        let mut t = toml::Table::new();
        let mut put = |k: &str, v: toml::Value| {
            t.insert(k.to_string(), v);
        };
        put("name", self.name.clone().into());
        put("description", self.description.clone().into());
        put(
            "channel",
            toml::Value::Array(self.channel.iter().map(|c| c.name().into()).collect()),
        );
        put(
            "topology",
            toml::Value::Array(self.topology.iter().map(|t| t.name().into()).collect()),
        );
        put(
            "n_sites",
            toml::Value::Array(self.n_sites.iter().map(|&n| (n as i64).into()).collect()),
        );
        put("initial_state", self.initial_state.name().into());
        for (k, v) in [
            ("h", self.h),
            ("j_prime", self.j_prime),
            ("gamma", self.gamma),
            ("gamma_offdiag_modulus", self.gamma_offdiag_modulus),
            ("gamma_offdiag_phase", self.gamma_offdiag_phase),
            ("j_z", self.j_z),
            ("j_xx", self.j_xx),
            ("d_dm", self.d_dm),
            ("t_max", self.t_max),
            ("dt_sample", self.dt_sample),
            ("steady_window", self.steady_window),
        ] {
            put(k, v.into());
        }
        let integrator = INTEGRATORS.iter().find(|(_, i)| *i == self.integrator).unwrap().0;
        put("integrator", integrator.into());
        if let Some(dt) = self.dt_internal {
            put("dt_internal", dt.into());
        }
        put("periodic", self.periodic.into());
        t
    }

    /// Flat TOML rendering, keys in schema order.
    pub fn to_toml_string(&self) -> String {
        let table = self.to_table();
        let mut out = String::new();
        for key in KEYS {
            if let Some(v) = table.get(*key) {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }

    pub fn gamma_offdiag(&self) -> Complex64 {
        Complex64::from_polar(self.gamma_offdiag_modulus, self.gamma_offdiag_phase)
    }

    /// Reservoir description for one topology variant. The local variant
    /// drops the cross-site rate and the induced coupling.
    pub fn noise_spec(&self, channel: Channel, topology: Topology) -> NoiseSpec {
        let spec = match topology.coupling_range() {
            None => NoiseSpec::local(channel, self.gamma),
            Some(range) => {
                let coupling = match channel {
                    Channel::Dephasing => EffectiveCoupling::ising(self.j_z, range),
                    Channel::AmplitudeDamping => EffectiveCoupling::xx_dm(self.j_xx, self.d_dm, range),
                };
                NoiseSpec::correlated(channel, topology, self.gamma, self.gamma_offdiag(), coupling)
            }
        };
        NoiseSpec {
            periodic: self.periodic,
            ..spec
        }
    }

    pub fn battery_model(&self, n_sites: usize) -> Result<BatteryModel> {
        let model = BatteryModel::new(n_sites, self.h, self.j_prime)?;
        Ok(if self.periodic { model } else { model.open() })
    }

    pub fn battery_hamiltonian(&self, n_sites: usize) -> Result<OperatorMatrix> {
        Ok(battery_hamiltonian(&self.battery_model(n_sites)?))
    }

    pub fn initial_state(&self, n_sites: usize) -> Result<DensityMatrix> {
        match self.initial_state {
            InitialState::ProductMinus => product_minus_state(n_sites),
            InitialState::GroundInteracting => ground_state(&self.battery_hamiltonian(n_sites)?),
        }
    }

    /// Largest frequency scale: `max(h, |J|, gamma, |gamma_ij|)`.
    pub fn rate_scale(&self, spec: &NoiseSpec) -> f64 {
        self.h.abs().max(spec.rate_scale())
    }

    pub fn evolution_config(&self, spec: &NoiseSpec) -> EvolutionConfig {
        match self.integrator {
            Integrator::LiouvillianExpm => EvolutionConfig::expm(self.t_max, self.dt_sample),
            Integrator::FixedStepRk4 => match self.dt_internal {
                Some(dt) => EvolutionConfig::rk4(self.t_max, self.dt_sample, dt),
                None => EvolutionConfig::with_default_step(self.t_max, self.dt_sample, self.rate_scale(spec)),
            },
        }
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// A single value or a list of distinct values from `options`.
fn choices<T: Copy + PartialEq>(r: &mut Reader, key: &str, options: &[(&str, T)]) -> Vec<T> {
    let values: Vec<toml::Value> = match r.get(key, true) {
        None => return Vec::new(),
        Some(toml::Value::Array(items)) => items.clone(),
        Some(single) => vec![single.clone()],
    };
    if values.is_empty() {
        r.fail(key, "empty list");
    }
    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
    let mut out = Vec::new();
    for v in values {
        match v.as_str().and_then(|s| options.iter().find(|(n, _)| *n == s)) {
            Some((_, t)) if !out.contains(t) => out.push(*t),
            Some((name, _)) => r.fail(key, format!("{name} listed twice")),
            None => r.fail(key, format!("unknown value {v}, expected one of {}", names.join(", "))),
        }
    }
    out
}

fn sizes(r: &mut Reader) -> Vec<usize> {
    let values: Vec<toml::Value> = match r.get("n_sites", true) {
        None => return Vec::new(),
        Some(toml::Value::Array(items)) => items.clone(),
        Some(single) => vec![single.clone()],
    };
    if values.is_empty() {
        r.fail("n_sites", "empty list");
    }
    let mut out = Vec::new();
    for v in values {
        match v.as_integer() {
            Some(n) if (1..=MAX_SITES as i64).contains(&n) && !out.contains(&(n as usize)) => out.push(n as usize),
            _ => r.fail(
                "n_sites",
                format!("{v} is not a distinct integer in 1..={MAX_SITES}"),
            ),
        }
    }
    out
}

fn resolve_preset(mut table: toml::Table) -> Result<toml::Table> {
    let Some(value) = table.remove("preset") else {
        return Ok(table);
    };
    let name = value
        .as_str()
        .ok_or_else(|| Error::Config(vec!["preset: expected a string".into()]))?;
    let preset = presets::find(name)
        .ok_or_else(|| Error::Config(vec![format!("preset: unknown preset {name:?}")]))?;
    let mut base: toml::Table = preset.source.parse().expect("embedded presets parse");
    base.extend(table);
    Ok(base)
}
