//! Sweep configuration: a TOML document read as flat dotted keys.
//!
//! ```toml
//! system = "qubit_qubit"
//! qubit.EJ_over_EC = 50
//! qubit.alpha = 0.65
//!
//! [sweep.gamma]
//! start = 0.01
//! stop = 10
//! points = 40
//! spacing = "log"
//! ```

use std::collections::BTreeMap;

use crate::circuit_model::{FluxQubitSpec, ResonatorSpec};
use crate::engine::{Settings, System};
use crate::error::{Error, Result};
use crate::operators::Reference;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Gamma,
    Alpha,
    EjOverEc,
    RR,
    RQr,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Gamma => "gamma",
            Axis::Alpha => "alpha",
            Axis::EjOverEc => "EJ_over_EC",
            Axis::RR => "r_r",
            Axis::RQr => "r_qr",
        }
    }

    fn parse(s: &str) -> Option<Axis> {
        Some(match s {
            "gamma" => Axis::Gamma,
            "alpha" => Axis::Alpha,
            "EJ_over_EC" | "r_q" => Axis::EjOverEc,
            "r_r" => Axis::RR,
            "r_qr" => Axis::RQr,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown output format '{s}' (csv or json)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepAxis {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    return self.stop;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Qubit parameters in units of its large-junction charging energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitParams {
    pub ej_over_ec: f64,
    pub alpha: f64,
    pub beta: f64,
    pub frustration: f64,
}

impl QubitParams {
    pub fn spec(&self) -> Result<FluxQubitSpec<f64>> {
        FluxQubitSpec::new(self.ej_over_ec, 1.0, self.alpha, self.beta, self.frustration)
    }

    fn with(&self, axis: Axis, v: f64) -> QubitParams {
        let mut q = *self;
        match axis {
            Axis::Alpha => q.alpha = v,
            Axis::EjOverEc => q.ej_over_ec = v,
            _ => {}
        }
        q
    }
}

/// Resonator given through `r_r = EJr/ECr` and `r_qr = EJ/EJr`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonatorParams {
    pub r_r: f64,
    pub r_qr: f64,
}

/// Parameters of one sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub qubit: QubitParams,
    pub qubit2: QubitParams,
    pub resonator: Option<ResonatorParams>,
    pub gamma: f64,
}

impl Point {
    pub fn resonator_spec(&self) -> Result<Option<ResonatorSpec<f64>>> {
        self.resonator.map(|r| ResonatorSpec::from_ratios(self.qubit.ej_over_ec, r.r_qr, r.r_r)).transpose()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub system: System,
    pub qubit: QubitParams,
    /// Second qubit when it differs from the first.
    pub qubit2: Option<QubitParams>,
    pub resonator: Option<ResonatorParams>,
    pub gamma: Option<f64>,
    pub sweep: SweepAxis,
    pub settings: Settings,
    pub format: Format,
    pub analytics: bool,
    /// Zero means one worker per available core.
    pub workers: usize,
    /// Every key as read, sorted, for the output echo.
    pub echo: BTreeMap<String, toml::Value>,
}

const KNOWN: &[&str] = &[
    "system",
    "analytics",
    "workers",
    "reference",
    "qubit.EJ_over_EC",
    "qubit.r_q",
    "qubit.alpha",
    "qubit.beta",
    "qubit.frustration",
    "qubit2.EJ_over_EC",
    "qubit2.r_q",
    "qubit2.alpha",
    "qubit2.beta",
    "resonator.r_r",
    "resonator.r_qr",
    "coupling.gamma",
    "truncation.n_max",
    "truncation.n_ph",
    "truncation.scale",
    "truncation.dim_cap",
    "tolerances.convergence",
    "tolerances.overlap",
    "tolerances.gap",
    "tolerances.parity",
    "tolerances.residual",
    "check.convergence",
    "check.factor",
    "alpha_r.level",
    "fit.max_excitation",
    "output.format",
];

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

struct Keys {
    map: BTreeMap<String, toml::Value>,
}

impl Keys {
    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(*x)),
            Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(Error::Config(format!("{key}: expected a number, got {v}"))),
        }
    }

    fn finite(&self, key: &str) -> Result<Option<f64>> {
        match self.float(key)? {
            Some(x) if !x.is_finite() => Err(Error::Config(format!("{key}: value must be finite"))),
            other => Ok(other),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.finite(key)? {
            Some(x) if x <= 0.0 => Err(Error::Config(format!("{key}: must be positive, got {x}"))),
            other => Ok(other),
        }
    }

    fn uint(&self, key: &str) -> Result<Option<usize>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(v) => Err(Error::Config(format!("{key}: expected a non-negative integer, got {v}"))),
        }
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(Error::Config(format!("{key}: expected true or false, got {v}"))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(Error::Config(format!("{key}: expected a string, got {v}"))),
        }
    }

    fn either(&self, a: &str, b: &str) -> Result<Option<f64>> {
        match (self.map.contains_key(a), self.map.contains_key(b)) {
            (true, true) => Err(Error::Config(format!("{a} and {b} name the same parameter; give one"))),
            (true, false) => self.positive(a),
            _ => self.positive(b),
        }
    }
}

fn qubit_params(k: &Keys, prefix: &str, base: Option<&QubitParams>) -> Result<QubitParams> {
    let key = |s: &str| format!("{prefix}.{s}");
    let missing = |s: &str| Error::Config(format!("missing required key {prefix}.{s}"));
    let ej = k.either(&key("EJ_over_EC"), &key("r_q"))?.or(base.map(|b| b.ej_over_ec));
    let alpha = k.finite(&key("alpha"))?.or(base.map(|b| b.alpha));
    let beta = k.finite(&key("beta"))?.or(base.map(|b| b.beta)).unwrap_or(0.0);
    let frustration = k.finite(&key("frustration"))?.or(base.map(|b| b.frustration)).unwrap_or(0.5);
    Ok(QubitParams {
        ej_over_ec: ej.ok_or_else(|| missing("EJ_over_EC"))?,
        alpha: alpha.ok_or_else(|| missing("alpha"))?,
        beta,
        frustration,
    })
}

fn sweep_axis(k: &Keys) -> Result<SweepAxis> {
    let mut axes: Vec<String> = Vec::new();
    for key in k.map.keys() {
        if let Some(rest) = key.strip_prefix("sweep.") {
            let name = rest.split('.').next().unwrap_or(rest).to_string();
            if !axes.contains(&name) {
                axes.push(name);
            }
        }
    }
    let name = match axes.as_slice() {
        [] => return Err(Error::Config("missing sweep axis (a [sweep.<parameter>] table)".into())),
        [one] => one.clone(),
        many => return Err(Error::Config(format!("exactly one sweep axis allowed, found {}", many.join(", ")))),
    };
    let axis = Axis::parse(&name).ok_or_else(|| Error::Config(format!("unknown sweep axis '{name}'")))?;
    for key in k.map.keys().filter(|key| key.starts_with("sweep.")) {
        let field = &key[format!("sweep.{name}.").len().min(key.len())..];
        if !["start", "stop", "points", "spacing"].contains(&field) {
            return Err(Error::Config(format!("unknown key {key}")));
        }
    }
    let f = |s: &str| format!("sweep.{name}.{s}");
    let start = k.finite(&f("start"))?.ok_or_else(|| Error::Config(format!("missing required key {}", f("start"))))?;
    let stop = k.finite(&f("stop"))?.ok_or_else(|| Error::Config(format!("missing required key {}", f("stop"))))?;
    let points = k.uint(&f("points"))?.ok_or_else(|| Error::Config(format!("missing required key {}", f("points"))))?;
    let spacing = match k.string(&f("spacing"))?.unwrap_or("linear") {
        "linear" => Spacing::Linear,
        "log" => Spacing::Log,
        other => return Err(Error::Config(format!("{}: unknown spacing '{other}' (linear or log)", f("spacing")))),
    };
    if points < 2 {
        return Err(Error::Config(format!("{}: need at least 2 points", f("points"))));
    }
    if start >= stop {
        return Err(Error::Config(format!("sweep.{name}: start must be below stop")));
    }
    if spacing == Spacing::Log && start <= 0.0 {
        return Err(Error::Config(format!("sweep.{name}: log spacing needs a positive start")));
    }
    Ok(SweepAxis { axis, start, stop, points, spacing })
}

pub fn parse_config(text: &str) -> Result<SweepConfig> {
    parse_document(text, true)
}

/// Like [`parse_config`], but a missing sweep table yields the single point
/// at `coupling.gamma`.
pub fn parse_point_config(text: &str) -> Result<SweepConfig> {
    parse_document(text, false)
}

fn parse_document(text: &str, need_sweep: bool) -> Result<SweepConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    let mut map = BTreeMap::new();
    flatten("", &table, &mut map);
    if let Some(bad) = map.keys().find(|key| !key.starts_with("sweep.") && !KNOWN.contains(&key.as_str())) {
        return Err(Error::Config(format!("unknown key {bad}")));
    }
    let k = Keys { map };

    let system = match k.string("system")? {
        Some("qubit_qubit") => System::QubitQubit,
        Some("qubit_resonator") => System::QubitResonator,
        Some(other) => return Err(Error::Config(format!("system: unknown value '{other}'"))),
        None => return Err(Error::Config("missing required key system".into())),
    };
    let has_sweep = k.map.keys().any(|key| key.starts_with("sweep."));
    let sweep = if has_sweep || need_sweep {
        sweep_axis(&k)?
    } else {
        let g = k.finite("coupling.gamma")?.ok_or_else(|| Error::Config("missing required key coupling.gamma".into()))?;
        SweepAxis { axis: Axis::Gamma, start: g, stop: g, points: 1, spacing: Spacing::Linear }
    };
    let qubit = qubit_params(&k, "qubit", None)?;
    let has_q2 = k.map.keys().any(|key| key.starts_with("qubit2."));
    let has_res = k.map.keys().any(|key| key.starts_with("resonator."));
    let qubit2 = match (system, has_q2) {
        (System::QubitQubit, true) => Some(qubit_params(&k, "qubit2", Some(&qubit))?),
        (System::QubitResonator, true) => return Err(Error::Config("qubit2.* is only valid for system = qubit_qubit".into())),
        _ => None,
    };
    let resonator = match (system, has_res) {
        (System::QubitResonator, _) => Some(ResonatorParams {
            r_r: k.positive("resonator.r_r")?.map_or_else(
                || if sweep.axis == Axis::RR { Ok(sweep.start) } else { Err(Error::Config("missing required key resonator.r_r".into())) },
                Ok,
            )?,
            r_qr: k.positive("resonator.r_qr")?.map_or_else(
                || if sweep.axis == Axis::RQr { Ok(sweep.start) } else { Err(Error::Config("missing required key resonator.r_qr".into())) },
                Ok,
            )?,
        }),
        (System::QubitQubit, true) => return Err(Error::Config("resonator.* is only valid for system = qubit_resonator".into())),
        _ => None,
    };
    if system == System::QubitQubit && matches!(sweep.axis, Axis::RR | Axis::RQr) {
        return Err(Error::Config(format!("sweep axis {} needs system = qubit_resonator", sweep.axis.name())));
    }
    let gamma = k.finite("coupling.gamma")?;
    if let Some(g) = gamma {
        if g < 0.0 {
            return Err(Error::Config(format!("coupling.gamma must be >= 0, got {g}")));
        }
    }
    if gamma.is_none() && sweep.axis != Axis::Gamma {
        return Err(Error::Config("missing required key coupling.gamma".into()));
    }
    if sweep.axis == Axis::Gamma && sweep.start < 0.0 {
        return Err(Error::Config("sweep.gamma: gamma must be >= 0".into()));
    }

    let mut s = Settings::default();
    if let Some(v) = k.uint("truncation.n_max")? {
        s.n_max = v;
    }
    if let Some(v) = k.uint("truncation.n_ph")? {
        s.n_ph = v;
    }
    if let Some(v) = k.positive("truncation.scale")? {
        s.truncation_scale = v;
    }
    if let Some(v) = k.uint("truncation.dim_cap")? {
        s.dim_cap = v;
    }
    if let Some(v) = k.positive("tolerances.convergence")? {
        s.convergence_tol = v;
    }
    if let Some(v) = k.finite("tolerances.overlap")? {
        s.overlap_tol = v;
    }
    if let Some(v) = k.finite("tolerances.gap")? {
        s.gap_tol = v;
    }
    if let Some(v) = k.positive("tolerances.parity")? {
        s.parity_tol = v;
    }
    if let Some(v) = k.positive("tolerances.residual")? {
        s.residual_tol = v;
    }
    if let Some(v) = k.boolean("check.convergence")? {
        s.convergence = v;
    }
    if let Some(v) = k.positive("check.factor")? {
        if v <= 1.0 {
            return Err(Error::Config("check.factor must exceed 1".into()));
        }
        s.convergence_factor = v;
    }
    if let Some(v) = k.uint("alpha_r.level")? {
        if v < 2 {
            return Err(Error::Config("alpha_r.level must be at least 2".into()));
        }
        s.alpha_r_level = v;
    }
    if let Some(v) = k.uint("fit.max_excitation")? {
        if v < 1 {
            return Err(Error::Config("fit.max_excitation must be at least 1".into()));
        }
        s.max_excitation = v;
    }
    s.reference = match k.string("reference")?.unwrap_or("renormalized") {
        "renormalized" => Reference::Renormalized,
        "bare" => Reference::Bare,
        other => return Err(Error::Config(format!("reference: unknown value '{other}' (renormalized or bare)"))),
    };
    s.charge_basis().validate()?;
    s.fock_basis().validate()?;

    let format = Format::parse(k.string("output.format")?.unwrap_or("csv"))?;
    let analytics = k.boolean("analytics")?.unwrap_or(true);
    let workers = k.uint("workers")?.unwrap_or(0);

    let cfg = SweepConfig { system, qubit, qubit2, resonator, gamma, sweep, settings: s, format, analytics, workers, echo: k.map };
    cfg.validate_points()?;
    Ok(cfg)
}

impl SweepConfig {
    pub fn points(&self) -> Vec<(f64, Point)> {
        self.sweep.values().into_iter().map(|v| (v, self.point(v))).collect()
    }

    pub fn point(&self, v: f64) -> Point {
        let a = self.sweep.axis;
        let qubit = self.qubit.with(a, v);
        let qubit2 = self.qubit2.map_or(qubit, |q| q.with(a, v));
        let resonator = self.resonator.map(|mut r| {
            match a {
                Axis::RR => r.r_r = v,
                Axis::RQr => r.r_qr = v,
                _ => {}
            }
            r
        });
        let gamma = if a == Axis::Gamma { v } else { self.gamma.unwrap_or(0.0) };
        Point { qubit, qubit2, resonator, gamma }
    }

    fn validate_points(&self) -> Result<()> {
        for (_, p) in self.points() {
            for q in [p.qubit, p.qubit2] {
                q.spec().map_err(|e| Error::Config(e.to_string()))?;
                if self.analytics && q.alpha <= 0.5 {
                    return Err(Error::Config(format!(
                        "alpha = {} has a single-well potential; analytics need alpha > 0.5 (set analytics = false)",
                        q.alpha
                    )));
                }
            }
            p.resonator_spec().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}
