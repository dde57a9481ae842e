//! Line-oriented run configuration: `section.key = value`, lists in square
//! brackets, `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Error;
use crate::fundsol::FundamentalSolution;
use crate::geometry::{Domain, Profile};
use crate::operators::OperatorCoefficients;
use crate::schauder::Component;

/// Gradient of a scalar density.
pub type GradientField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A parsed right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    List(Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Text(s) => write!(f, "{s}"),
            Value::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Configuration error with the offending line, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    fn general(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError::general(e.to_string())
    }
}

/// Raw `key -> (line, value)` entries of a config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, (usize, Value)>,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn value(&mut self) -> std::result::Result<Value, String> {
        self.skip_ws();
        if self.chars.peek() == Some(&'[') {
            self.chars.next();
            let mut items = vec![];
            self.skip_ws();
            if self.chars.peek() == Some(&']') {
                self.chars.next();
                return Ok(Value::List(items));
            }
            loop {
                items.push(self.value()?);
                self.skip_ws();
                match self.chars.next() {
                    Some(',') => continue,
                    Some(']') => return Ok(Value::List(items)),
                    Some(c) => return Err(format!("unexpected {c:?} in list")),
                    None => return Err("unterminated list".into()),
                }
            }
        }
        let mut token = String::new();
        while let Some(&c) = self.chars.peek() {
            if c == ',' || c == ']' || c == '[' {
                break;
            }
            token.push(c);
            self.chars.next();
        }
        let token = token.trim();
        if token.is_empty() {
            return Err("empty value".into());
        }
        Ok(match token.parse::<f64>() {
            Ok(v) => Value::Number(v),
            Err(_) => Value::Text(token.to_string()),
        })
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> std::result::Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected `section.key = value`, got {content:?}")))?;
            let key = key.trim();
            let valid = key.contains('.')
                && !key.starts_with('.')
                && !key.ends_with('.')
                && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
            if !valid {
                return Err(ConfigError::at(line, format!("invalid key {key:?}; keys are `section.key`")));
            }
            let mut cur = Cursor { chars: value.chars().peekable() };
            let v = cur.value().map_err(|m| ConfigError::at(line, m))?;
            cur.skip_ws();
            if cur.chars.next().is_some() {
                return Err(ConfigError::at(line, "trailing characters after value"));
            }
            if entries.insert(key.to_string(), (line, v)).is_some() {
                return Err(ConfigError::at(line, format!("duplicate key {key:?}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&(usize, Value)> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = (&String, usize)> {
        self.entries.iter().map(|(k, (l, _))| (k, *l))
    }

    fn number(&self, key: &str) -> std::result::Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((_, Value::Number(v))) => Ok(Some(*v)),
            Some((l, v)) => Err(ConfigError::at(*l, format!("{key} must be a number, got {v}"))),
        }
    }

    fn text(&self, key: &str) -> std::result::Result<Option<String>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((_, Value::Text(s))) => Ok(Some(s.clone())),
            Some((_, Value::Number(v))) => Ok(Some(v.to_string())),
            Some((l, v)) => Err(ConfigError::at(*l, format!("{key} must be a word, got {v}"))),
        }
    }

    fn numbers(&self, key: &str) -> std::result::Result<Option<Vec<f64>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((_, Value::Number(v))) => Ok(Some(vec![*v])),
            Some((l, Value::List(items))) => items
                .iter()
                .map(|v| match v {
                    Value::Number(x) => Ok(*x),
                    other => Err(ConfigError::at(*l, format!("{key} must list numbers, got {other}"))),
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some),
            Some((l, v)) => Err(ConfigError::at(*l, format!("{key} must be a list of numbers, got {v}"))),
        }
    }

    fn points(&self, key: &str) -> std::result::Result<Option<Vec<Vec<f64>>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((l, Value::List(items))) => {
                if items.iter().all(|v| matches!(v, Value::Number(_))) {
                    return Ok(Some(vec![self.numbers(key)?.unwrap_or_default()]));
                }
                items
                    .iter()
                    .map(|v| match v {
                        Value::List(p) => p
                            .iter()
                            .map(|x| match x {
                                Value::Number(x) => Ok(*x),
                                other => Err(ConfigError::at(*l, format!("{key}: bad coordinate {other}"))),
                            })
                            .collect(),
                        other => Err(ConfigError::at(*l, format!("{key}: expected a point, got {other}"))),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map(Some)
            }
            Some((l, v)) => Err(ConfigError::at(*l, format!("{key} must be a list of points, got {v}"))),
        }
    }

    fn words(&self, key: &str) -> std::result::Result<Option<Vec<String>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((_, Value::Text(s))) => Ok(Some(vec![s.clone()])),
            Some((l, Value::List(items))) => items
                .iter()
                .map(|v| match v {
                    Value::Text(s) => Ok(s.clone()),
                    other => Err(ConfigError::at(*l, format!("{key} must list words, got {other}"))),
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some),
            Some((l, v)) => Err(ConfigError::at(*l, format!("{key} must be a list of words, got {v}"))),
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.get(key).map(|(l, _)| *l)
    }
}

/// A scalar density with its gradient (when known) and derivative-jump lines.
#[derive(Clone)]
pub struct DensitySpec {
    pub name: String,
    pub value: Component,
    pub gradient: Option<GradientField>,
    pub kinks: Vec<([f64; 2], [f64; 2])>,
}

impl fmt::Debug for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensitySpec({})", self.name)
    }
}

/// Preset names accepted by `density.preset`.
pub const PRESETS: [&str; 5] = ["one", "x1", "x1sq", "abs_x1", "cos_k"];

impl DensitySpec {
    /// `one`, `x1`, `x1sq`, `abs_x1` or `cos_k` (`cos(k y1)`), in coordinates
    /// relative to `center`.
    pub fn preset(name: &str, k: f64, center: &[f64]) -> Option<Self> {
        let c0 = center.first().copied().unwrap_or(0.0);
        let n = center.len();
        let grad = move |d1: f64| {
            let mut g = vec![0.0; n];
            g[0] = d1;
            g
        };
        let real = |v: f64| Complex64::new(v, 0.0);
        let (value, gradient): (Component, GradientField) =
            match name {
                "one" => (Arc::new(move |_| real(1.0)), Arc::new(move |_| grad(0.0))),
                "x1" => (Arc::new(move |y| real(y[0] - c0)), Arc::new(move |_| grad(1.0))),
                "x1sq" => (
                    Arc::new(move |y| real((y[0] - c0) * (y[0] - c0))),
                    Arc::new(move |y| grad(2.0 * (y[0] - c0))),
                ),
                "abs_x1" => (
                    Arc::new(move |y| real((y[0] - c0).abs())),
                    Arc::new(move |y| grad((y[0] - c0).signum())),
                ),
                "cos_k" => (
                    Arc::new(move |y| real((k * (y[0] - c0)).cos())),
                    Arc::new(move |y| grad(-k * (k * (y[0] - c0)).sin())),
                ),
                _ => return None,
            };
        let kinks = if name == "abs_x1" && n == 2 { vec![([c0, center[1]], [1.0, 0.0])] } else { vec![] };
        Some(Self { name: name.to_string(), value, gradient: Some(gradient), kinks })
    }

    /// Values tabulated as CSV rows `y1,y2[,y3],value`; other points take the
    /// value of the nearest row.
    pub fn table(path: &Path, dim: usize) -> std::result::Result<Self, ConfigError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| ConfigError::general(format!("cannot read density table {}: {e}", path.display())))?;
        let mut rows: Vec<(Vec<f64>, f64)> = vec![];
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| ConfigError::general(format!("density table row {}: {e}", i + 1)))?;
            let nums: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.trim().parse::<f64>()).collect();
            let Ok(nums) = nums else {
                if i == 0 {
                    continue;
                }
                return Err(ConfigError::general(format!("density table row {}: not numeric", i + 1)));
            };
            if nums.len() != dim + 1 {
                return Err(ConfigError::general(format!(
                    "density table row {}: expected {} columns, got {}",
                    i + 1,
                    dim + 1,
                    nums.len()
                )));
            }
            rows.push((nums[..dim].to_vec(), nums[dim]));
        }
        if rows.is_empty() {
            return Err(ConfigError::general("density table is empty"));
        }
        let rows = Arc::new(rows);
        let value = move |y: &[f64]| {
            let mut best = (f64::INFINITY, 0.0);
            for (p, v) in rows.iter() {
                let d: f64 = p.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.0 {
                    best = (d, *v);
                }
            }
            Complex64::new(best.1, 0.0)
        };
        Ok(Self { name: format!("table:{}", path.display()), value: Arc::new(value), gradient: None, kinks: vec![] })
    }

    pub fn at(&self, y: &[f64]) -> Complex64 {
        (self.value)(y)
    }
}

/// Fundamental-solution selection.
#[derive(Debug, Clone, PartialEq)]
pub enum FundsolChoice {
    Laplace,
    ModifiedHelmholtz(f64),
    Principal,
    /// from the operator coefficients
    Auto,
}

#[derive(Debug, Clone)]
pub struct EvalSection {
    pub points: Vec<Vec<f64>>,
    pub quantities: Vec<String>,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct VerifySection {
    pub checks: Vec<String>,
    pub n: usize,
    /// per-check overrides of `n`
    pub resolutions: BTreeMap<String, usize>,
    pub h: f64,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergeSection {
    pub targets: Vec<String>,
    pub ns: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ModulusSection {
    pub alpha: f64,
    pub scales: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub n: usize,
    pub tol: f64,
}

/// Everything a run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub operator: Option<OperatorCoefficients>,
    pub fundsol: FundsolChoice,
    pub domain: Domain,
    pub density: DensitySpec,
    pub eval: EvalSection,
    pub verify: VerifySection,
    pub converge: ConvergeSection,
    pub modulus: ModulusSection,
    pub output: Option<PathBuf>,
}

/// Checks understood by `verify.checks`.
pub const CHECKS: [&str; 10] = [
    "pde_identity",
    "transmission",
    "single_layer_transmission",
    "derivative_recursion",
    "integration_by_parts",
    "maximal_bound",
    "hessian",
    "subtraction",
    "negative_exponent",
    "pairings",
];

/// Targets understood by `converge.targets`.
pub const CONVERGENCE_TARGETS: [&str; 3] = ["volume_potential", "single_layer_on_surface", "boundary_kernel"];

/// Quantities understood by `eval.quantities`.
pub const QUANTITIES: [&str; 4] = ["potential", "gradient", "hessian", "single_layer"];

const KNOWN_KEYS: [&str; 28] = [
    "operator.a2",
    "operator.a1",
    "operator.a0",
    "fundsol.kind",
    "fundsol.kappa",
    "domain.kind",
    "domain.center",
    "domain.radius",
    "domain.a",
    "domain.b",
    "domain.coefficients",
    "density.preset",
    "density.k",
    "density.table",
    "eval.points",
    "eval.quantities",
    "eval.n",
    "verify.checks",
    "verify.n",
    "verify.h",
    "converge.targets",
    "converge.n",
    "modulus.alpha",
    "modulus.scales",
    "modulus.points",
    "modulus.n",
    "modulus.tol",
    "output.dir",
];

fn to_usize(v: f64, key: &str, line: Option<usize>) -> std::result::Result<usize, ConfigError> {
    if v.fract() != 0.0 || v < 4.0 {
        return Err(ConfigError { line, message: format!("{key} must be an integer >= 4, got {v}") });
    }
    Ok(v as usize)
}

impl RunConfig {
    pub fn from_text(text: &str, base: &Path) -> std::result::Result<Self, ConfigError> {
        Self::from_file(&ConfigFile::parse(text)?, base)
    }

    pub fn from_file(cf: &ConfigFile, base: &Path) -> std::result::Result<Self, ConfigError> {
        for (key, line) in cf.keys() {
            let free = key.starts_with("tolerance.") || key.starts_with("resolution.");
            if !free && !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError::at(line, format!("unknown key {key:?}")));
            }
        }
        let wrap = |key: &str, e: Error| ConfigError { line: cf.line_of(key), message: e.to_string() };

        // domain
        let kind = cf.text("domain.kind")?.unwrap_or_else(|| "ball".into());
        let center = cf.numbers("domain.center")?.unwrap_or_else(|| vec![0.0, 0.0]);
        let domain = match kind.as_str() {
            "ball" => Domain::ball(&center, cf.number("domain.radius")?.unwrap_or(1.0)),
            "ellipse" => Domain::ellipse(&center, cf.number("domain.a")?.unwrap_or(1.0), cf.number("domain.b")?.unwrap_or(1.0)),
            "star" => {
                let c = cf
                    .numbers("domain.coefficients")?
                    .ok_or_else(|| ConfigError { line: cf.line_of("domain.kind"), message: "star domains need domain.coefficients".into() })?;
                Domain::star2d(&center, Profile::CosineSeries(c))
            }
            other => {
                return Err(ConfigError {
                    line: cf.line_of("domain.kind"),
                    message: format!("unknown domain kind {other:?} (ball, ellipse, star)"),
                })
            }
        }
        .map_err(|e| wrap("domain.kind", e))?;
        let n = domain.dim();

        // operator
        let operator = match cf.numbers("operator.a2")? {
            None => None,
            Some(flat) => {
                if flat.len() != n * n {
                    return Err(ConfigError::at(
                        cf.line_of("operator.a2").unwrap_or(0),
                        format!("operator.a2 needs {} entries (row-major), got {}", n * n, flat.len()),
                    ));
                }
                let a2: Vec<Vec<f64>> = flat.chunks(n).map(|r| r.to_vec()).collect();
                let a1: Vec<Complex64> = cf
                    .numbers("operator.a1")?
                    .unwrap_or_else(|| vec![0.0; n])
                    .into_iter()
                    .map(|v| Complex64::new(v, 0.0))
                    .collect();
                let a0 = Complex64::new(cf.number("operator.a0")?.unwrap_or(0.0), 0.0);
                Some(OperatorCoefficients::new(&a2, &a1, a0).map_err(|e| wrap("operator.a2", e))?)
            }
        };
        let fundsol = match cf.text("fundsol.kind")?.as_deref() {
            None => {
                if operator.is_some() {
                    FundsolChoice::Auto
                } else {
                    FundsolChoice::Laplace
                }
            }
            Some("laplace") => FundsolChoice::Laplace,
            Some("modified_helmholtz") => FundsolChoice::ModifiedHelmholtz(cf.number("fundsol.kappa")?.unwrap_or(1.0)),
            Some("principal") => FundsolChoice::Principal,
            Some("auto") => FundsolChoice::Auto,
            Some(other) => {
                return Err(ConfigError {
                    line: cf.line_of("fundsol.kind"),
                    message: format!("unknown fundamental solution {other:?} (laplace, modified_helmholtz, principal, auto)"),
                })
            }
        };
        if matches!(fundsol, FundsolChoice::Principal | FundsolChoice::Auto) && operator.is_none() {
            return Err(ConfigError { line: cf.line_of("fundsol.kind"), message: "this fundamental solution needs operator.a2".into() });
        }

        // density
        let density = match (cf.text("density.preset")?, cf.text("density.table")?) {
            (Some(_), Some(_)) => {
                return Err(ConfigError { line: cf.line_of("density.table"), message: "give density.preset or density.table, not both".into() })
            }
            (None, Some(path)) => DensitySpec::table(&base.join(path), n)?,
            (p, None) => {
                let p = p.unwrap_or_else(|| "one".into());
                let k = cf.number("density.k")?.unwrap_or(1.0);
                DensitySpec::preset(&p, k, domain.center()).ok_or_else(|| ConfigError {
                    line: cf.line_of("density.preset"),
                    message: format!("unknown density preset {p:?} (one of {})", PRESETS.join(", ")),
                })?
            }
        };

        let usize_or = |key: &str, default: usize| -> std::result::Result<usize, ConfigError> {
            match cf.number(key)? {
                None => Ok(default),
                Some(v) => to_usize(v, key, cf.line_of(key)),
            }
        };
        let check_words = |key: &str, allowed: &[&str], default: &[&str]| -> std::result::Result<Vec<String>, ConfigError> {
            let words = cf.words(key)?.unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect());
            for w in &words {
                if !allowed.contains(&w.as_str()) {
                    return Err(ConfigError {
                        line: cf.line_of(key),
                        message: format!("unknown entry {w:?} in {key} (one of {})", allowed.join(", ")),
                    });
                }
            }
            Ok(words)
        };

        let default_point = domain.center().to_vec();
        let eval = EvalSection {
            points: cf.points("eval.points")?.unwrap_or_else(|| vec![default_point.clone()]),
            quantities: check_words("eval.quantities", &QUANTITIES, &["potential"])?,
            n: usize_or("eval.n", 64)?,
        };
        for p in &eval.points {
            if p.len() != n {
                return Err(ConfigError { line: cf.line_of("eval.points"), message: format!("point {p:?} has dimension {}, expected {n}", p.len()) });
            }
        }

        let mut tolerances = BTreeMap::new();
        for (key, line) in cf.keys() {
            if let Some(name) = key.strip_prefix("tolerance.") {
                if !crate::verify::DEFAULT_TOLERANCES.iter().any(|(k, _)| *k == name) {
                    return Err(ConfigError::at(line, format!("unknown tolerance {name:?}")));
                }
                let v = cf.number(key)?.unwrap_or(0.0);
                if !(v > 0.0) {
                    return Err(ConfigError::at(line, format!("tolerance {name} must be > 0")));
                }
                tolerances.insert(name.to_string(), v);
            }
        }
        let mut resolutions = BTreeMap::new();
        for (key, line) in cf.keys() {
            if let Some(name) = key.strip_prefix("resolution.") {
                if !CHECKS.contains(&name) {
                    return Err(ConfigError::at(line, format!("unknown check {name:?} in resolution section")));
                }
                let v = cf.number(key)?.unwrap_or(0.0);
                resolutions.insert(name.to_string(), to_usize(v, key, Some(line))?);
            }
        }
        let h = cf.number("verify.h")?.unwrap_or(2e-3);
        if !(h > 0.0) {
            return Err(ConfigError { line: cf.line_of("verify.h"), message: "verify.h must be > 0".into() });
        }
        let verify = VerifySection {
            checks: check_words("verify.checks", &CHECKS, &CHECKS)?,
            n: usize_or("verify.n", 48)?,
            resolutions,
            h,
            tolerances,
        };
        let converge = ConvergeSection {
            targets: check_words("converge.targets", &CONVERGENCE_TARGETS, &CONVERGENCE_TARGETS)?,
            ns: match cf.numbers("converge.n")? {
                None => vec![8, 16, 32, 64],
                Some(v) => v.iter().map(|x| to_usize(*x, "converge.n", cf.line_of("converge.n"))).collect::<std::result::Result<_, _>>()?,
            },
        };
        let scales = cf.numbers("modulus.scales")?.unwrap_or_else(|| vec![1e-4, 1e-3, 1e-2, 1e-1]);
        if scales.iter().any(|s| !(*s > 0.0)) {
            return Err(ConfigError { line: cf.line_of("modulus.scales"), message: "scales must be > 0".into() });
        }
        let modulus = ModulusSection {
            alpha: cf.number("modulus.alpha")?.unwrap_or(1.0),
            scales,
            points: cf.points("modulus.points")?.unwrap_or_else(|| {
                let mut a = default_point.clone();
                let mut b = default_point.clone();
                a[1] += 0.1;
                b[1] -= 0.4;
                vec![a, b]
            }),
            n: usize_or("modulus.n", 32)?,
            tol: cf.number("modulus.tol")?.unwrap_or(1e-11),
        };
        Ok(Self {
            operator,
            fundsol,
            domain,
            density,
            eval,
            verify,
            converge,
            modulus,
            output: cf.text("output.dir")?.map(|p| base.join(p)),
        })
    }

    pub fn fundamental_solution(&self) -> crate::Result<FundamentalSolution> {
        let n = self.domain.dim();
        match &self.fundsol {
            FundsolChoice::Laplace => FundamentalSolution::laplace(n),
            FundsolChoice::ModifiedHelmholtz(k) => FundamentalSolution::modified_helmholtz(n, *k),
            FundsolChoice::Principal => FundamentalSolution::principal(self.operator.clone().expect("checked at parse time")),
            FundsolChoice::Auto => FundamentalSolution::from_operator(self.operator.clone().expect("checked at parse time")),
        }
    }

    /// Quadrature resolution of a named check.
    pub fn resolution(&self, check: &str) -> usize {
        self.verify.resolutions.get(check).copied().unwrap_or(self.verify.n)
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.verify.tolerances.get(name).copied().unwrap_or_else(|| crate::verify::default_tolerance(name))
    }
}

/// The built-in configuration: Laplace operator on the unit disk, `f = 1`.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/laplace_disk.conf");
