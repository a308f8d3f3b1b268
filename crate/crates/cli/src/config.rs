//! Scenario files.
//!
//! A scenario is a sectioned key-value file (TOML syntax):
//!
//! ```text
//! schema_version = 1
//!
//! [field]
//! profile = "step"        # none | step | constant | gaussian_poly | ab
//! strength = 1.0
//! radius = 0.25
//!
//! [potential]
//! shape = "zero"          # zero | constant | step | gaussian | inverse_square | harmonic
//!
//! [grid]
//! n_r = 96
//! n_theta = 64
//! r_max = 10.0
//!
//! [solver]
//! tol = 1e-8
//!
//! [certify]
//! theorem = "Thm1"
//! sweep_radii = [5.0, 10.0]
//!
//! [output]
//! dir = "absentia-out"
//! ```
//!
//! Every key is optional except `schema_version`; defaults are filled in and
//! echoed in the report.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use toml::{Table, Value};

pub const SCHEMA_VERSION: i64 = 1;

/// Keys accepted in each section.
const SCHEMA: &[(&str, &[&str])] = &[
    ("", &["schema_version"]),
    (
        "field",
        &["profile", "strength", "radius", "width", "cutoff", "alpha_mean", "alpha_cos", "alpha_sin"],
    ),
    (
        "potential",
        &[
            "shape",
            "value",
            "radius",
            "width",
            "offset",
            "imag_shape",
            "imag_value",
            "imag_radius",
            "imag_width",
            "imag_offset",
        ],
    ),
    ("grid", &["n_r", "n_theta", "r_max", "r_min", "grading"]),
    ("solver", &["tol", "max_iter", "seed", "k"]),
    ("certify", &["theorem", "decomposition", "epsilon", "sweep_radii", "d"]),
    ("output", &["dir", "report", "eigenvalues_csv", "hardy_csv", "matrix"]),
];

#[derive(Debug)]
pub enum ConfigError {
    Io { path: String, message: String },
    Syntax { line: Option<usize>, message: String },
    UnknownKey { key: String, line: Option<usize>, suggestion: Option<String> },
    Invalid { key: String, line: Option<usize>, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = |line: &Option<usize>| line.map(|l| format!(" (line {l})")).unwrap_or_default();
        match self {
            ConfigError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            ConfigError::Syntax { line, message } => match line {
                Some(l) => write!(f, "syntax error at line {l}: {message}"),
                None => write!(f, "syntax error: {message}"),
            },
            ConfigError::UnknownKey { key, line, suggestion } => {
                write!(f, "unknown key '{key}'{}", at(line))?;
                if let Some(s) = suggestion {
                    write!(f, "; did you mean '{s}'?")?;
                }
                Ok(())
            }
            ConfigError::Invalid { key, line, message } => write!(f, "invalid '{key}'{}: {message}", at(line)),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum FieldSpec {
    None,
    Step { strength: f64, radius: f64 },
    Constant { strength: f64 },
    GaussianPoly { strength: f64, width: f64, cutoff: f64 },
    Ab { alpha_mean: f64, alpha_cos: Vec<f64>, alpha_sin: Vec<f64> },
}

/// Scalar potential shape; `value` is the amplitude or coefficient.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ShapeSpec {
    Zero,
    Constant { value: f64 },
    Step { value: f64, radius: f64 },
    Gaussian { value: f64, width: f64 },
    InverseSquare { value: f64 },
    Harmonic { value: f64, offset: f64 },
}

impl ShapeSpec {
    pub fn is_zero(&self) -> bool {
        match self {
            ShapeSpec::Zero => true,
            ShapeSpec::Constant { value }
            | ShapeSpec::Step { value, .. }
            | ShapeSpec::Gaussian { value, .. }
            | ShapeSpec::InverseSquare { value } => *value == 0.0,
            ShapeSpec::Harmonic { value, offset } => *value == 0.0 && *offset == 0.0,
        }
    }

    pub fn has_jump(&self) -> bool {
        matches!(self, ShapeSpec::Step { value, .. } if *value != 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub real: ShapeSpec,
    pub imag: ShapeSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_max: f64,
    pub r_min: f64,
    pub grading: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TheoremChoice {
    Thm1,
    #[serde(rename = "Thm2_budget")]
    Thm2Budget,
    #[serde(rename = "Thm3_nsa")]
    Thm3Nsa,
    #[serde(rename = "Thm4_robust")]
    Thm4Robust,
    #[serde(rename = "Thm5_AB")]
    Thm5Ab,
}

const THEOREMS: &[(&str, TheoremChoice)] = &[
    ("Thm1", TheoremChoice::Thm1),
    ("Thm2_budget", TheoremChoice::Thm2Budget),
    ("Thm3_nsa", TheoremChoice::Thm3Nsa),
    ("Thm4_robust", TheoremChoice::Thm4Robust),
    ("Thm5_AB", TheoremChoice::Thm5Ab),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionChoice {
    AllV1,
    AllV2,
    /// Jumps go to `V⁽²⁾`, smooth shapes to `V⁽¹⁾`; the outcome is recorded.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyConfig {
    pub theorems: Vec<TheoremChoice>,
    pub decomposition: Option<DecompositionChoice>,
    pub epsilon: Option<f64>,
    pub sweep_radii: Vec<f64>,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: String,
    pub report: String,
    pub eigenvalues_csv: String,
    pub hardy_csv: String,
    pub matrix: String,
}

/// Fully resolved scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub schema_version: i64,
    pub field: FieldSpec,
    pub potential: PotentialSpec,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub certify: CertifyConfig,
    pub output: OutputConfig,
}

/// Reads and validates a scenario file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text)
}

/// Line of every `section.key` assignment, for error messages.
fn key_lines(text: &str) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            section = rest.trim_end_matches(']').trim().to_string();
            out.entry(section.clone()).or_insert(i + 1);
        } else if let Some((k, _)) = line.split_once('=') {
            let k = k.trim().trim_matches('"');
            let full = if section.is_empty() {
                k.to_string()
            } else {
                format!("{section}.{k}")
            };
            out.entry(full).or_insert(i + 1);
        }
    }
    out
}

fn nearest<'a>(key: &str, candidates: impl Iterator<Item = &'a str>) -> Option<String> {
    candidates
        .map(|c| (strsim::levenshtein(key, c), c))
        .filter(|(d, c)| *d <= 3.max(c.len() / 2))
        .min()
        .map(|(_, c)| c.to_string())
}

fn all_keys() -> impl Iterator<Item = String> {
    SCHEMA.iter().flat_map(|(s, keys)| {
        keys.iter().map(move |k| {
            if s.is_empty() {
                (*k).to_string()
            } else {
                format!("{s}.{k}")
            }
        })
    })
}

/// Typed access to one section with line-aware errors.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    lines: &'a BTreeMap<String, usize>,
}

impl<'a> Section<'a> {
    fn path(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let path = self.path(key);
        ConfigError::Invalid {
            line: self.lines.get(&path).copied(),
            key: path,
            message: message.into(),
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) if x.is_finite() => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(self.invalid(key, "expected a finite number")),
        }
    }

    fn float_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    fn int(&self, key: &str) -> Result<Option<i64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(_) => Err(self.invalid(key, "expected an integer")),
        }
    }

    fn count(&self, key: &str, default: usize, lo: usize, hi: usize) -> Result<usize, ConfigError> {
        match self.int(key)? {
            None => Ok(default),
            Some(i) if i >= lo as i64 && i <= hi as i64 => Ok(i as usize),
            Some(i) => Err(self.invalid(key, format!("{i} is outside [{lo}, {hi}]"))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(self.invalid(key, "expected a string")),
        }
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Float(x) if x.is_finite() => Ok(*x),
                    Value::Integer(i) => Ok(*i as f64),
                    _ => Err(self.invalid(key, "expected an array of finite numbers")),
                })
                .collect(),
            Some(_) => Err(self.invalid(key, "expected an array of numbers")),
        }
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let x = self.float_or(key, default)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(self.invalid(key, format!("{x} must be positive")))
        }
    }

    /// Rejects keys that are valid in the section but meaningless for the
    /// chosen variant.
    fn only(&self, allowed: &[&str], variant: &str) -> Result<(), ConfigError> {
        if let Some(t) = self.table {
            for k in t.keys() {
                if !allowed.contains(&k.as_str()) {
                    return Err(self.invalid(k, format!("does not apply to '{variant}'")));
                }
            }
        }
        Ok(())
    }
}

/// Parses scenario text (see the module documentation for the format).
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        ConfigError::Syntax {
            line,
            message: e.message().to_string(),
        }
    })?;
    let lines = key_lines(text);
    check_keys(&root, &lines)?;
    let section = |name: &'static str| Section {
        name,
        table: root.get(name).and_then(Value::as_table),
        lines: &lines,
    };
    let top = Section {
        name: "",
        table: Some(&root),
        lines: &lines,
    };
    let schema_version = top
        .int("schema_version")?
        .ok_or_else(|| top.invalid("schema_version", "is required"))?;
    if schema_version != SCHEMA_VERSION {
        return Err(top.invalid(
            "schema_version",
            format!("version {schema_version} is not supported (expected {SCHEMA_VERSION})"),
        ));
    }
    let field = parse_field(&section("field"))?;
    let potential = parse_potential(&section("potential"))?;
    let grid = parse_grid(&section("grid"), &field)?;
    let solver = parse_solver(&section("solver"))?;
    let certify = parse_certify(&section("certify"), &field, &potential, &grid)?;
    let output = parse_output(&section("output"))?;
    Ok(ScenarioConfig {
        schema_version,
        field,
        potential,
        grid,
        solver,
        certify,
        output,
    })
}

fn check_keys(root: &Table, lines: &BTreeMap<String, usize>) -> Result<(), ConfigError> {
    let known: Vec<String> = all_keys().collect();
    for (k, v) in root {
        let section_keys = SCHEMA.iter().find(|(s, _)| *s == k.as_str()).map(|(_, keys)| *keys);
        match (section_keys, v) {
            (Some(keys), Value::Table(t)) if !k.is_empty() => {
                for key in t.keys() {
                    if !keys.contains(&key.as_str()) {
                        let full = format!("{k}.{key}");
                        return Err(ConfigError::UnknownKey {
                            suggestion: nearest(&full, known.iter().map(String::as_str)),
                            line: lines.get(&full).copied(),
                            key: full,
                        });
                    }
                }
            }
            (Some(_), _) => {
                return Err(ConfigError::Invalid {
                    key: k.clone(),
                    line: lines.get(k).copied(),
                    message: "expected a section".into(),
                })
            }
            (None, _) if k == "schema_version" => {}
            (None, _) => {
                let sections = SCHEMA.iter().map(|(s, _)| *s).filter(|s| !s.is_empty());
                let suggestion = if v.is_table() {
                    nearest(k, sections)
                } else {
                    nearest(k, known.iter().map(String::as_str))
                };
                return Err(ConfigError::UnknownKey {
                    key: k.clone(),
                    line: lines.get(k).copied(),
                    suggestion,
                });
            }
        }
    }
    Ok(())
}

fn parse_field(s: &Section) -> Result<FieldSpec, ConfigError> {
    let profile = s.string("profile")?.unwrap_or("none");
    Ok(match profile {
        "none" => {
            s.only(&["profile"], profile)?;
            FieldSpec::None
        }
        "step" => {
            s.only(&["profile", "strength", "radius"], profile)?;
            FieldSpec::Step {
                strength: s.float_or("strength", 1.0)?,
                radius: s.positive("radius", 0.25)?,
            }
        }
        "constant" => {
            s.only(&["profile", "strength"], profile)?;
            FieldSpec::Constant {
                strength: s.float_or("strength", 1.0)?,
            }
        }
        "gaussian_poly" => {
            s.only(&["profile", "strength", "width", "cutoff"], profile)?;
            let width = s.positive("width", 1.0)?;
            FieldSpec::GaussianPoly {
                strength: s.float_or("strength", 1.0)?,
                width,
                cutoff: s.positive("cutoff", 3.0 * width)?,
            }
        }
        "ab" => {
            s.only(&["profile", "alpha_mean", "alpha_cos", "alpha_sin"], profile)?;
            FieldSpec::Ab {
                alpha_mean: s.float_or("alpha_mean", 0.5)?,
                alpha_cos: s.floats("alpha_cos")?,
                alpha_sin: s.floats("alpha_sin")?,
            }
        }
        other => {
            return Err(s.invalid(
                "profile",
                format!("'{other}' is not one of none, step, constant, gaussian_poly, ab"),
            ))
        }
    })
}

fn parse_shape(s: &Section, prefix: &str) -> Result<ShapeSpec, ConfigError> {
    let key = |k: &str| format!("{prefix}{k}");
    let shape = s.string(&key("shape"))?.unwrap_or("zero");
    let allowed: &[&str] = match shape {
        "zero" => &[],
        "constant" | "inverse_square" => &["value"],
        "step" => &["value", "radius"],
        "gaussian" => &["value", "width"],
        "harmonic" => &["value", "offset"],
        other => {
            return Err(s.invalid(
                &key("shape"),
                format!("'{other}' is not one of zero, constant, step, gaussian, inverse_square, harmonic"),
            ))
        }
    };
    for k in ["value", "radius", "width", "offset"] {
        if s.has(&key(k)) && !allowed.contains(&k) {
            return Err(s.invalid(&key(k), format!("does not apply to shape '{shape}'")));
        }
    }
    let value = s.float_or(&key("value"), 0.0)?;
    Ok(match shape {
        "zero" => ShapeSpec::Zero,
        "constant" => ShapeSpec::Constant { value },
        "inverse_square" => ShapeSpec::InverseSquare { value },
        "step" => ShapeSpec::Step {
            value,
            radius: s.positive(&key("radius"), 1.0)?,
        },
        "gaussian" => ShapeSpec::Gaussian {
            value,
            width: s.positive(&key("width"), 1.0)?,
        },
        _ => ShapeSpec::Harmonic {
            value,
            offset: s.float_or(&key("offset"), 0.0)?,
        },
    })
}

fn parse_potential(s: &Section) -> Result<PotentialSpec, ConfigError> {
    Ok(PotentialSpec {
        real: parse_shape(s, "")?,
        imag: parse_shape(s, "imag_")?,
    })
}

fn parse_grid(s: &Section, field: &FieldSpec) -> Result<GridConfig, ConfigError> {
    let n_r = s.count("n_r", 96, 4, 4096)?;
    let n_theta = s.count("n_theta", 64, 8, 4096)?;
    if n_theta % 2 != 0 {
        return Err(s.invalid("n_theta", format!("{n_theta} must be even")));
    }
    let r_max = s.positive("r_max", 10.0)?;
    if r_max > 1e4 {
        return Err(s.invalid("r_max", format!("{r_max} exceeds 1e4")));
    }
    let default_min = if matches!(field, FieldSpec::Ab { .. }) {
        1e-3 * r_max
    } else {
        0.0
    };
    let r_min = s.float_or("r_min", default_min)?;
    if !(0.0..r_max).contains(&r_min) {
        return Err(s.invalid("r_min", format!("{r_min} must satisfy 0 <= r_min < r_max = {r_max}")));
    }
    let grading = s.float_or("grading", 1.0)?;
    if !(1.0..=4.0).contains(&grading) {
        return Err(s.invalid("grading", format!("{grading} is outside [1, 4]")));
    }
    Ok(GridConfig {
        n_r,
        n_theta,
        r_max,
        r_min,
        grading,
    })
}

fn parse_solver(s: &Section) -> Result<SolverConfig, ConfigError> {
    let tol = s.float_or("tol", 1e-8)?;
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(s.invalid("tol", format!("{tol} is outside (0, 1e-2]")));
    }
    let seed = match s.int("seed")? {
        None => 42,
        Some(i) if i >= 0 => i as u64,
        Some(i) => return Err(s.invalid("seed", format!("{i} must be nonnegative"))),
    };
    Ok(SolverConfig {
        tol,
        max_iter: s.count("max_iter", 5000, 10, 10_000_000)?,
        seed,
        k: s.count("k", 4, 1, 64)?,
    })
}

fn parse_certify(
    s: &Section,
    field: &FieldSpec,
    potential: &PotentialSpec,
    grid: &GridConfig,
) -> Result<CertifyConfig, ConfigError> {
    let names: Vec<&str> = match s.get("theorem") {
        None => Vec::new(),
        Some(Value::String(t)) => vec![t.as_str()],
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| v.as_str().ok_or_else(|| s.invalid("theorem", "expected theorem names")))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(s.invalid("theorem", "expected a theorem name or a list of names")),
    };
    let mut theorems = Vec::new();
    for n in names {
        let t = THEOREMS.iter().find(|(k, _)| *k == n).map(|(_, t)| *t).ok_or_else(|| {
            let hint = nearest(n, THEOREMS.iter().map(|(k, _)| *k))
                .map(|h| format!("; did you mean '{h}'?"))
                .unwrap_or_default();
            s.invalid("theorem", format!("unknown theorem '{n}'{hint}"))
        })?;
        if !theorems.contains(&t) {
            theorems.push(t);
        }
    }
    if theorems.is_empty() {
        theorems.push(if matches!(field, FieldSpec::Ab { .. }) {
            TheoremChoice::Thm5Ab
        } else if !potential.imag.is_zero() {
            TheoremChoice::Thm3Nsa
        } else {
            TheoremChoice::Thm1
        });
    }
    let decomposition = match s.string("decomposition")? {
        None => None,
        Some("all_v1") => Some(DecompositionChoice::AllV1),
        Some("all_v2") => Some(DecompositionChoice::AllV2),
        Some("auto") => Some(DecompositionChoice::Auto),
        Some(other) => {
            return Err(s.invalid(
                "decomposition",
                format!("'{other}' is not one of all_v1, all_v2, auto"),
            ))
        }
    };
    if decomposition == Some(DecompositionChoice::AllV1) && potential.real.has_jump() {
        return Err(s.invalid(
            "decomposition",
            "all_v1 needs a weakly differentiable potential; a step belongs in V2",
        ));
    }
    let epsilon = s.float("epsilon")?;
    if let Some(e) = epsilon {
        if !(e > 0.0 && e <= 1.0) {
            return Err(s.invalid("epsilon", format!("{e} is outside (0, 1]")));
        }
    }
    let mut sweep_radii = s.floats("sweep_radii")?;
    if sweep_radii.is_empty() {
        sweep_radii = vec![grid.r_max / 2.0, grid.r_max];
    }
    if sweep_radii.iter().any(|&r| !(r > grid.r_min && r <= 1e4)) {
        return Err(s.invalid("sweep_radii", "radii must lie in (r_min, 1e4]"));
    }
    if sweep_radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(s.invalid("sweep_radii", "radii must be strictly increasing"));
    }
    Ok(CertifyConfig {
        theorems,
        decomposition,
        epsilon,
        sweep_radii,
        d: s.count("d", 2, 1, 64)?,
    })
}

fn parse_output(s: &Section) -> Result<OutputConfig, ConfigError> {
    let name = |key: &str, default: &str| -> Result<String, ConfigError> {
        match s.string(key)? {
            None => Ok(default.to_string()),
            Some("") => Err(s.invalid(key, "must not be empty")),
            Some(v) => Ok(v.to_string()),
        }
    };
    Ok(OutputConfig {
        dir: name("dir", "absentia-out")?,
        report: name("report", "report.json")?,
        eigenvalues_csv: name("eigenvalues_csv", "eigenvalues.csv")?,
        hardy_csv: name("hardy_csv", "hardy.csv")?,
        matrix: name("matrix", "hamiltonian.mtx")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "schema_version = 1\n[field]\nprofile = \"step\"\nstrength = 1.0\nradius = 0.25\n[certify]\ntheorem = \"Thm1\"\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.field, FieldSpec::Step { strength: 1.0, radius: 0.25 });
        assert_eq!(c.solver, SolverConfig { tol: 1e-8, max_iter: 5000, seed: 42, k: 4 });
        assert_eq!(c.certify.theorems, vec![TheoremChoice::Thm1]);
        assert_eq!(c.certify.sweep_radii, vec![5.0, 10.0]);
        assert_eq!(c.grid.r_min, 0.0);
    }

    #[test]
    fn misspelled_key_suggests_the_nearest() {
        let e = parse_config_str("schema_version = 1\n[grid]\nnr = 10\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("grid.nr") && msg.contains("grid.n_r") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let e = parse_config_str("schema_version = 1\n[grid]\nn_r = = 3\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: Some(3), .. }), "{e}");
    }

    #[test]
    fn range_errors() {
        let e = parse_config_str("schema_version = 1\n[grid]\nr_max = 2.0\nr_min = 3.0\n").unwrap_err();
        assert!(e.to_string().contains("grid.r_min") && e.to_string().contains("line 4"), "{e}");
        assert!(parse_config_str("schema_version = 1\n[grid]\nn_theta = 9\n").is_err());
        assert!(parse_config_str("schema_version = 1\n[solver]\ntol = 0.5\n").is_err());
        assert!(parse_config_str("schema_version = 2\n").is_err());
        assert!(parse_config_str("[grid]\nn_r = 8\n").is_err());
    }

    #[test]
    fn variant_specific_keys() {
        let e = parse_config_str("schema_version = 1\n[field]\nprofile = \"constant\"\nradius = 1.0\n").unwrap_err();
        assert!(e.to_string().contains("field.radius"), "{e}");
        let e = parse_config_str("schema_version = 1\n[potential]\nshape = \"step\"\nvalue = -1\n[certify]\ndecomposition = \"all_v1\"\n")
            .unwrap_err();
        assert!(e.to_string().contains("decomposition"), "{e}");
    }

    #[test]
    fn unknown_section_and_theorem() {
        let e = parse_config_str("schema_version = 1\n[grd]\nn_r = 8\n").unwrap_err();
        assert!(e.to_string().contains("'grid'"), "{e}");
        let e = parse_config_str("schema_version = 1\n[certify]\ntheorem = \"Thm6\"\n").unwrap_err();
        assert!(e.to_string().contains("Thm6"), "{e}");
    }

    #[test]
    fn ab_defaults_to_an_annulus() {
        let c = parse_config_str("schema_version = 1\n[field]\nprofile = \"ab\"\nalpha_mean = 0.5\n[grid]\nr_max = 10\n").unwrap();
        assert!((c.grid.r_min - 0.01).abs() < 1e-15);
        assert_eq!(c.certify.theorems, vec![TheoremChoice::Thm5Ab]);
    }
}
