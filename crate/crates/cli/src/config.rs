use crate::error::{CliError, Result};
use floqdyn_core::scenarios::{preset, ScenarioConfig, PRESETS};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    /// Defaults to the natural horizon of the named preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// One run: a scenario (inline or expanded from a preset), its integration
/// window and where results go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Name of the preset the scenario was expanded from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub scenario: ScenarioConfig,
    #[serde(default = "no_integration")]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn no_integration() -> IntegrationConfig {
    IntegrationConfig {
        t_final: None,
        dt: None,
        stride: None,
    }
}

impl RunConfig {
    pub fn t_final(&self) -> Result<f64> {
        let t = self
            .integration
            .t_final
            .or_else(|| self.preset.as_deref().and_then(natural_horizon))
            .ok_or_else(|| CliError::Config("integration.t_final is required".into()))?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!(
                "integration.t_final must be positive, got {t}"
            )));
        }
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.t_final()?;
        if let Some(dt) = self.integration.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Config(format!(
                    "integration.dt must be positive, got {dt}"
                )));
            }
        }
        if self.integration.stride == Some(0) {
            return Err(CliError::Config(
                "integration.stride must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// t ≈ 6000 for the 3-level presets and t ≈ 2800 for the 4-level ones.
pub fn natural_horizon(name: &str) -> Option<f64> {
    if name.starts_with("three_level") {
        Some(6000.0)
    } else if name.starts_with("four_level") {
        Some(2800.0)
    } else {
        None
    }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_owned(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Replace a `preset` key by the preset's scenario, keeping the name.
pub fn expand_preset(value: &mut Value) -> Result<()> {
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::Config("a run config must be a JSON object".into()))?;
    let Some(name) = obj.get("preset") else {
        return Ok(());
    };
    let name = name
        .as_str()
        .ok_or_else(|| CliError::Config("preset must be a string".into()))?
        .to_owned();
    let scenario = preset(&name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown preset '{name}' (known: {})",
            PRESETS.join(", ")
        ))
    })?;
    obj.insert(
        "scenario".into(),
        serde_json::to_value(scenario).expect("scenarios serialize"),
    );
    Ok(())
}

/// Parse `key.path=value`; the value is read as JSON and falls back to a
/// plain string.
pub fn parse_assignment(s: &str) -> Result<(String, Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{s}'")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(CliError::Config(format!("--set has an empty key in '{s}'")));
    }
    let v = serde_json::from_str(v.trim()).unwrap_or_else(|_| Value::String(v.trim().to_owned()));
    Ok((k.to_owned(), v))
}

/// Set a dotted path; numeric segments index arrays, missing object keys
/// are created.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let segments: Vec<&str> = path.split('.').collect();
    let mut cur = root;
    for (n, seg) in segments.iter().enumerate() {
        let last = n + 1 == segments.len();
        cur = match cur {
            Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| {
                    CliError::Config(format!("'{path}': '{seg}' is not an array index"))
                })?;
                let len = items.len();
                items.get_mut(idx).ok_or_else(|| {
                    CliError::Config(format!("'{path}': index {idx} out of range ({len} items)"))
                })?
            }
            Value::Object(map) => map
                .entry(seg.to_string())
                .or_insert_with(|| Value::Object(Map::new())),
            Value::Null => {
                *cur = Value::Object(Map::new());
                cur.as_object_mut()
                    .expect("just created")
                    .entry(seg.to_string())
                    .or_insert_with(|| Value::Object(Map::new()))
            }
            _ => {
                return Err(CliError::Config(format!(
                    "'{path}': '{seg}' does not lead into an object or array"
                )))
            }
        };
        if last {
            *cur = value;
            return Ok(());
        }
    }
    unreachable!("split always yields one segment")
}

/// Whether a dotted path names an existing value.
pub fn path_exists(root: &Value, path: &str) -> bool {
    let mut cur = root;
    for seg in path.split('.') {
        cur = match cur {
            Value::Object(m) => match m.get(seg) {
                Some(v) => v,
                None => return false,
            },
            Value::Array(a) => match seg.parse::<usize>().ok().and_then(|i| a.get(i)) {
                Some(v) => v,
                None => return false,
            },
            _ => return false,
        };
    }
    true
}

/// Sources of a run config: an optional file, an optional preset that
/// replaces the file's scenario, and overrides applied last.
#[derive(Debug, Clone, Default)]
pub struct RunSource {
    pub file: Option<PathBuf>,
    pub preset: Option<String>,
    pub sets: Vec<String>,
}

impl RunSource {
    pub fn to_value(&self) -> Result<Value> {
        let mut v = match &self.file {
            Some(p) => read_json(p)?,
            None if self.preset.is_some() => Value::Object(Map::new()),
            None => {
                return Err(CliError::Config(
                    "either --config or --preset is required".into(),
                ))
            }
        };
        if let Some(name) = &self.preset {
            let obj = v
                .as_object_mut()
                .ok_or_else(|| CliError::Config("a run config must be a JSON object".into()))?;
            obj.remove("scenario");
            obj.insert("preset".into(), Value::String(name.clone()));
        }
        expand_preset(&mut v)?;
        for s in &self.sets {
            let (k, val) = parse_assignment(s)?;
            set_path(&mut v, &k, val)?;
        }
        Ok(v)
    }

    pub fn load(&self) -> Result<RunConfig> {
        run_config_from_value(self.to_value()?)
    }
}

pub fn run_config_from_value(v: Value) -> Result<RunConfig> {
    let rc: RunConfig =
        serde_json::from_value(v).map_err(|e| CliError::Config(format!("run config: {e}")))?;
    rc.validate()?;
    Ok(rc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// A dotted path into the run config (paths not starting with
    /// `scenario.`, `integration.` or `outputs.` are taken relative to the
    /// scenario), or one of the pseudo-axes `preset`, `variant` and
    /// `beta_ratio`.
    pub name: String,
    pub values: Vec<Value>,
}

/// Grid of runs over the Cartesian product of the axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: Value,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(CliError::Config("a sweep needs at least one axis".into()));
        }
        let mut base = self.base.clone();
        expand_preset(&mut base)?;
        for a in &self.axes {
            if a.values.is_empty() {
                return Err(CliError::Config(format!("axis '{}' has no values", a.name)));
            }
            if PSEUDO_AXES.contains(&a.name.as_str()) {
                continue;
            }
            // presets set on another axis may supply missing paths
            let preset_axis = self
                .axes
                .iter()
                .any(|b| b.name == "preset" || b.name == "variant");
            if !preset_axis && !path_exists(&base, &axis_path(&a.name)) {
                return Err(CliError::Config(format!(
                    "axis '{}' does not resolve to a config path",
                    a.name
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Grid points in lexicographic order, the first axis varying slowest.
    pub fn points(&self) -> Vec<Vec<Value>> {
        let mut out: Vec<Vec<Value>> = vec![vec![]];
        for a in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    a.values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// The run config of one grid point. Preset axes are applied before the
    /// others; a static method kind drops the drive.
    pub fn point_config(&self, values: &[Value]) -> Result<RunConfig> {
        let mut v = self.base.clone();
        let pairs: Vec<(&Axis, &Value)> = self.axes.iter().zip(values).collect();
        for (a, val) in &pairs {
            let name = match a.name.as_str() {
                "preset" => val.as_str().map(str::to_owned),
                "variant" => val.as_str().map(|s| format!("three_level_{s}")),
                _ => continue,
            }
            .ok_or_else(|| CliError::Config(format!("axis '{}' takes strings", a.name)))?;
            let obj = v
                .as_object_mut()
                .ok_or_else(|| CliError::Config("sweep base must be a JSON object".into()))?;
            obj.remove("scenario");
            obj.insert("preset".into(), Value::String(name));
        }
        expand_preset(&mut v)?;
        for (a, val) in &pairs {
            match a.name.as_str() {
                "preset" | "variant" => {}
                "beta_ratio" => set_beta_ratio(&mut v, val)?,
                other => set_path(&mut v, &axis_path(other), (*val).clone())?,
            }
        }
        let kind_is_static = v
            .pointer("/scenario/method/kind")
            .and_then(Value::as_str)
            .map_or(false, |k| k == "lindblad" || k == "redfield");
        if kind_is_static {
            if let Some(s) = v.get_mut("scenario").and_then(Value::as_object_mut) {
                s.remove("drive");
            }
        }
        run_config_from_value(v)
    }
}

const PSEUDO_AXES: &[&str] = &["preset", "variant", "beta_ratio"];

fn axis_path(name: &str) -> String {
    if ["scenario.", "integration.", "outputs."]
        .iter()
        .any(|p| name.starts_with(p))
    {
        name.to_owned()
    } else {
        format!("scenario.{name}")
    }
}

/// β_cold = ratio·β_hot on the baths named "hot" and "cold".
fn set_beta_ratio(v: &mut Value, ratio: &Value) -> Result<()> {
    let ratio = ratio
        .as_f64()
        .ok_or_else(|| CliError::Config("beta_ratio takes numbers".into()))?;
    let baths = v
        .pointer_mut("/scenario/baths")
        .and_then(Value::as_array_mut)
        .ok_or_else(|| CliError::Config("beta_ratio needs scenario.baths".into()))?;
    let find = |name: &str, baths: &[Value]| {
        baths
            .iter()
            .position(|b| b.get("name").and_then(Value::as_str) == Some(name))
            .ok_or_else(|| CliError::Config(format!("beta_ratio needs a bath named '{name}'")))
    };
    let hot = find("hot", baths)?;
    let cold = find("cold", baths)?;
    let beta_h = baths[hot]
        .get("beta")
        .and_then(Value::as_f64)
        .ok_or_else(|| CliError::Config("hot bath has no numeric beta".into()))?;
    baths[cold]["beta"] = Value::from(ratio * beta_h);
    Ok(())
}
