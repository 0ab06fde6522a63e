//! Run configuration: TOML parsing with key-path diagnostics, defaults,
//! validation and canonical serialization.

use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::analysis::NormDecl;
use crate::constitutive::QSpec;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::{validate_case, Case, InitialDataSpec, ModelParams, Target};

pub const COMMANDS: [&str; 5] = ["check", "simulate", "dispersion", "decay", "besov"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitConfig {
    /// Explicit envelope amplitude; when absent the data are rescaled to `e0`.
    pub amplitude: Option<f64>,
    pub e0: f64,
    pub low_slope: f64,
    pub high_slope: f64,
    pub seed: u64,
    pub tau_factor: f64,
}

impl InitConfig {
    pub fn spec(&self) -> InitialDataSpec {
        InitialDataSpec {
            amplitude: self.amplitude.unwrap_or(1.0),
            low_slope: self.low_slope,
            high_slope: self.high_slope,
            seed: self.seed,
            tau_factor: self.tau_factor,
            target_norms: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    pub cfl: f64,
    pub sample_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: String,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayConfig {
    pub s0: Vec<f64>,
    pub tolerance: f64,
    pub t_lo: f64,
    /// Defaults to half the final time.
    pub t_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionConfig {
    pub xi_min: f64,
    pub xi_max: f64,
    pub count: usize,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub grid: Grid,
    pub model: ModelParams,
    pub nonlinear: bool,
    pub q: QSpec,
    pub init: InitConfig,
    pub time: TimeConfig,
    pub norms: Vec<NormDecl>,
    pub output: OutputConfig,
    pub decay: DecayConfig,
    pub dispersion: DispersionConfig,
    /// Warning raised by case gating, if any.
    pub warning: Option<String>,
}

impl RunConfig {
    /// Defaults for a case on the desk grid.
    pub fn for_case(case: Case) -> Self {
        let grid = Grid::desk();
        Self {
            command: None,
            grid,
            model: ModelParams::for_case(case, grid.d),
            nonlinear: true,
            q: QSpec::None,
            init: InitConfig {
                amplitude: None,
                e0: 1e-3,
                low_slope: -1.0,
                high_slope: -4.0,
                seed: 1,
                tau_factor: 1.0,
            },
            time: TimeConfig { dt: 5e-3, t_final: 200.0, cfl: 0.4, sample_every: 20 },
            norms: Vec::new(),
            output: OutputConfig { dir: "out".into(), snapshot_times: Vec::new() },
            decay: DecayConfig { s0: vec![1.0, 2.0], tolerance: 0.25, t_lo: 5.0, t_hi: None },
            dispersion: DispersionConfig { xi_min: 1e-3, xi_max: 1e2, count: 200 },
            warning: None,
        }
    }

    pub fn decay_window(&self) -> [f64; 2] {
        [self.decay.t_lo, self.decay.t_hi.unwrap_or(0.5 * self.time.t_final)]
    }

    /// Canonical TOML text; parsing it yields an identical configuration.
    pub fn to_toml(&self) -> Result<String> {
        let ser = |e: toml::ser::Error| Error::Serialize(e.to_string());
        let mut root = Table::new();
        if let Some(c) = &self.command {
            root.insert("command".into(), Value::String(c.clone()));
        }
        let mut grid = Table::new();
        grid.insert("d".into(), Value::Integer(self.grid.d as i64));
        grid.insert("n".into(), Value::Integer(self.grid.n as i64));
        grid.insert("box_length".into(), Value::Float(self.grid.box_length));
        root.insert("grid".into(), Value::Table(grid));

        let mut model = Table::new();
        model.insert("case".into(), Value::String(self.model.case.as_str().into()));
        model.insert("nu1".into(), Value::Float(self.model.nu1));
        model.insert("nu2".into(), Value::Float(self.model.nu2));
        model.insert("alpha".into(), Value::Float(self.model.alpha));
        model.insert("mu".into(), Value::Float(self.model.mu));
        model.insert("nonlinear".into(), Value::Boolean(self.nonlinear));
        root.insert("model".into(), Value::Table(model));

        root.insert("q".into(), Value::try_from(&self.q).map_err(ser)?);

        let mut init = Table::new();
        if let Some(a) = self.init.amplitude {
            init.insert("amplitude".into(), Value::Float(a));
        }
        init.insert("e0".into(), Value::Float(self.init.e0));
        init.insert("low_slope".into(), Value::Float(self.init.low_slope));
        init.insert("high_slope".into(), Value::Float(self.init.high_slope));
        init.insert("seed".into(), Value::Integer(self.init.seed as i64));
        init.insert("tau_factor".into(), Value::Float(self.init.tau_factor));
        root.insert("init".into(), Value::Table(init));

        let mut time = Table::new();
        time.insert("dt".into(), Value::Float(self.time.dt));
        time.insert("t_final".into(), Value::Float(self.time.t_final));
        time.insert("cfl".into(), Value::Float(self.time.cfl));
        time.insert("sample_every".into(), Value::Integer(self.time.sample_every as i64));
        root.insert("time".into(), Value::Table(time));

        let norms = self
            .norms
            .iter()
            .map(|n| {
                let mut t = Table::new();
                t.insert("label".into(), Value::String(n.label.clone()));
                t.insert("s".into(), Value::Float(n.s));
                t.insert("t".into(), Value::Float(n.t));
                t.insert("j0".into(), Value::Integer(n.j0 as i64));
                t.insert("target".into(), Value::String(n.target.as_str().into()));
                Value::Table(t)
            })
            .collect();
        root.insert("norms".into(), Value::Array(norms));

        let mut output = Table::new();
        output.insert("dir".into(), Value::String(self.output.dir.clone()));
        output.insert(
            "snapshot_times".into(),
            Value::Array(self.output.snapshot_times.iter().map(|t| Value::Float(*t)).collect()),
        );
        root.insert("output".into(), Value::Table(output));

        let mut decay = Table::new();
        decay.insert("s0".into(), Value::Array(self.decay.s0.iter().map(|s| Value::Float(*s)).collect()));
        decay.insert("tolerance".into(), Value::Float(self.decay.tolerance));
        decay.insert("t_lo".into(), Value::Float(self.decay.t_lo));
        if let Some(t) = self.decay.t_hi {
            decay.insert("t_hi".into(), Value::Float(t));
        }
        root.insert("decay".into(), Value::Table(decay));

        let mut disp = Table::new();
        disp.insert("xi_min".into(), Value::Float(self.dispersion.xi_min));
        disp.insert("xi_max".into(), Value::Float(self.dispersion.xi_max));
        disp.insert("count".into(), Value::Integer(self.dispersion.count as i64));
        root.insert("dispersion".into(), Value::Table(disp));

        toml::to_string(&root).map_err(ser)
    }

    /// SHA-256 of the canonical TOML text.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Typed access to one table with key-path diagnostics.
struct Section<'a> {
    path: String,
    table: Option<&'a Table>,
}

fn type_name(v: &Value) -> &'static str {
    v.type_str()
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &str) -> Result<Self> {
        let table = match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(v) => return Err(Error::config(name, format!("expected a table, found {}", type_name(v)))),
        };
        Ok(Self { path: name.to_string(), table })
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn raw(&self, k: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(k))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(Error::config(self.key(k), "unknown key"));
            }
        }
        Ok(())
    }

    fn f64_opt(&self, k: &str) -> Result<Option<f64>> {
        match self.raw(k) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(Error::config(self.key(k), format!("expected a number, found {}", type_name(v)))),
        }
    }

    fn f64_or(&self, k: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(k)?.unwrap_or(default))
    }

    fn int_opt(&self, k: &str) -> Result<Option<i64>> {
        match self.raw(k) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(v) => Err(Error::config(self.key(k), format!("expected an integer, found {}", type_name(v)))),
        }
    }

    fn usize_or(&self, k: &str, default: usize) -> Result<usize> {
        match self.int_opt(k)? {
            None => Ok(default),
            Some(i) if i >= 0 => Ok(i as usize),
            Some(i) => Err(Error::config(self.key(k), format!("expected a non-negative integer, found {i}"))),
        }
    }

    fn str_opt(&self, k: &str) -> Result<Option<&'a str>> {
        match self.raw(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(v) => Err(Error::config(self.key(k), format!("expected a string, found {}", type_name(v)))),
        }
    }

    fn bool_or(&self, k: &str, default: bool) -> Result<bool> {
        match self.raw(k) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(v) => Err(Error::config(self.key(k), format!("expected a boolean, found {}", type_name(v)))),
        }
    }

    fn f64_list_or(&self, k: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        match self.raw(k) {
            None => Ok(default),
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Value::Float(x) => Ok(*x),
                    Value::Integer(x) => Ok(*x as f64),
                    v => Err(Error::config(
                        format!("{}[{i}]", self.key(k)),
                        format!("expected a number, found {}", type_name(v)),
                    )),
                })
                .collect(),
            Some(v) => Err(Error::config(self.key(k), format!("expected an array, found {}", type_name(v)))),
        }
    }
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(path, format!("must be positive, found {v}")))
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let root: Table = text.parse::<Table>().map_err(|e| Error::config("<document>", e.to_string()))?;
    const SECTIONS: [&str; 10] =
        ["command", "grid", "model", "q", "init", "time", "norms", "output", "decay", "dispersion"];
    if let Some(k) = root.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(Error::config(k.as_str(), "unknown key"));
    }

    let command = match root.get("command") {
        None => None,
        Some(Value::String(s)) if COMMANDS.contains(&s.as_str()) => Some(s.clone()),
        Some(Value::String(s)) => {
            return Err(Error::config("command", format!("unknown command {s}, expected one of {COMMANDS:?}")))
        }
        Some(v) => return Err(Error::config("command", format!("expected a string, found {}", type_name(v)))),
    };

    let g = Section::new(&root, "grid")?;
    g.check_keys(&["d", "n", "box_length"])?;
    let desk = Grid::desk();
    let d = g.usize_or("d", desk.d)?;
    let n = g.usize_or("n", desk.n)?;
    let box_length = g.f64_or("box_length", desk.box_length)?;
    let grid = Grid::new(d, n, box_length).map_err(|e| Error::config("grid", e.to_string()))?;

    let m = Section::new(&root, "model")?;
    m.check_keys(&["case", "nu1", "nu2", "alpha", "mu", "nonlinear"])?;
    let case_name = m.str_opt("case")?.ok_or_else(|| Error::config("model.case", "missing key"))?;
    let case = Case::parse(case_name)
        .ok_or_else(|| Error::config("model.case", format!("unknown case {case_name}, expected I..V or custom")))?;
    let defaults = ModelParams::for_case(case, d);
    let model = ModelParams {
        nu1: m.f64_or("nu1", defaults.nu1)?,
        nu2: m.f64_or("nu2", defaults.nu2)?,
        alpha: m.f64_or("alpha", defaults.alpha)?,
        mu: m.f64_or("mu", defaults.mu)?,
        d,
        case,
    };
    let nonlinear = m.bool_or("nonlinear", true)?;

    let q = match root.get("q") {
        None => QSpec::None,
        Some(v @ Value::Table(_)) => v.clone().try_into::<QSpec>().map_err(|e| Error::config("q", e.to_string()))?,
        Some(v) => return Err(Error::config("q", format!("expected a table, found {}", type_name(v)))),
    };
    let verdict = validate_case(&model, &q).map_err(|e| Error::config("q", e.to_string()))?;

    let base = RunConfig::for_case(case);
    let i = Section::new(&root, "init")?;
    i.check_keys(&["amplitude", "e0", "low_slope", "high_slope", "seed", "tau_factor"])?;
    let seed = match i.int_opt("seed")? {
        None => base.init.seed,
        Some(s) if s >= 0 => s as u64,
        Some(s) => return Err(Error::config("init.seed", format!("must be non-negative, found {s}"))),
    };
    let init = InitConfig {
        amplitude: i.f64_opt("amplitude")?,
        e0: i.f64_or("e0", base.init.e0)?,
        low_slope: i.f64_or("low_slope", base.init.low_slope)?,
        high_slope: i.f64_or("high_slope", base.init.high_slope)?,
        seed,
        tau_factor: i.f64_or("tau_factor", base.init.tau_factor)?,
    };
    if let Some(a) = init.amplitude {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::config("init.amplitude", format!("must be non-negative, found {a}")));
        }
    }
    if !(init.e0.is_finite() && init.e0 >= 0.0) {
        return Err(Error::config("init.e0", format!("must be non-negative, found {}", init.e0)));
    }

    let t = Section::new(&root, "time")?;
    t.check_keys(&["dt", "t_final", "cfl", "sample_every"])?;
    let time = TimeConfig {
        dt: positive("time.dt", t.f64_or("dt", base.time.dt)?)?,
        t_final: positive("time.t_final", t.f64_or("t_final", base.time.t_final)?)?,
        cfl: positive("time.cfl", t.f64_or("cfl", base.time.cfl)?)?,
        sample_every: t.usize_or("sample_every", base.time.sample_every)?,
    };
    if time.sample_every == 0 {
        return Err(Error::config("time.sample_every", "must be at least 1"));
    }

    let norms = match root.get("norms") {
        None => Vec::new(),
        Some(Value::Array(items)) => {
            let mut out = Vec::with_capacity(items.len());
            for (k, item) in items.iter().enumerate() {
                let path = format!("norms[{k}]");
                let table = match item {
                    Value::Table(t) => t,
                    v => return Err(Error::config(path, format!("expected a table, found {}", type_name(v)))),
                };
                let s = Section { path: path.clone(), table: Some(table) };
                s.check_keys(&["label", "s", "t", "j0", "target"])?;
                let label = s.str_opt("label")?.ok_or_else(|| Error::config(s.key("label"), "missing key"))?;
                let sv = s.f64_opt("s")?.ok_or_else(|| Error::config(s.key("s"), "missing key"))?;
                let tv = s.f64_opt("t")?.ok_or_else(|| Error::config(s.key("t"), "missing key"))?;
                let j0 = s.int_opt("j0")?.unwrap_or(0) as i32;
                let target_name = s.str_opt("target")?.ok_or_else(|| Error::config(s.key("target"), "missing key"))?;
                let target = Target::parse(target_name).ok_or_else(|| {
                    Error::config(s.key("target"), format!("unknown target {target_name}, expected u, tau or pdiv"))
                })?;
                out.push(NormDecl::new(label, target, sv, tv, j0));
            }
            out
        }
        Some(v) => return Err(Error::config("norms", format!("expected an array, found {}", type_name(v)))),
    };

    let o = Section::new(&root, "output")?;
    o.check_keys(&["dir", "snapshot_times"])?;
    let output = OutputConfig {
        dir: o.str_opt("dir")?.unwrap_or(&base.output.dir).to_string(),
        snapshot_times: o.f64_list_or("snapshot_times", Vec::new())?,
    };

    let dc = Section::new(&root, "decay")?;
    dc.check_keys(&["s0", "tolerance", "t_lo", "t_hi"])?;
    let decay = DecayConfig {
        s0: dc.f64_list_or("s0", base.decay.s0.clone())?,
        tolerance: positive("decay.tolerance", dc.f64_or("tolerance", base.decay.tolerance)?)?,
        t_lo: dc.f64_or("t_lo", base.decay.t_lo)?,
        t_hi: dc.f64_opt("t_hi")?,
    };

    let ds = Section::new(&root, "dispersion")?;
    ds.check_keys(&["xi_min", "xi_max", "count"])?;
    let dispersion = DispersionConfig {
        xi_min: positive("dispersion.xi_min", ds.f64_or("xi_min", base.dispersion.xi_min)?)?,
        xi_max: positive("dispersion.xi_max", ds.f64_or("xi_max", base.dispersion.xi_max)?)?,
        count: ds.usize_or("count", base.dispersion.count)?,
    };

    Ok(RunConfig {
        command,
        grid,
        model,
        nonlinear,
        q,
        init,
        time,
        norms,
        output,
        decay,
        dispersion,
        warning: verdict.warning,
    })
}
