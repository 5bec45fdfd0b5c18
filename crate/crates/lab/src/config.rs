//! JSON configuration reading.
//!
//! A configuration is one flat JSON object. The harness reads `kind`,
//! `master_seed`, `out_dir` and the nested `constants` record; every other
//! key belongs to the selected experiment. Readers record every problem
//! instead of stopping at the first, and keys nobody asked for are reported
//! as unknown.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use deloc_core::ensembles::{DistributionSpec, Symmetry};
use deloc_core::graphs::{parse_edge_list, GraphSample};
use deloc_core::tolerances::robust_ceil;
use deloc_core::Tolerances;
use serde_json::{Map, Value};

use crate::error::ConfigError;
use crate::registry::{Plan, Registry};

/// Key reader over one JSON object.
pub struct Params {
    prefix: String,
    map: Map<String, Value>,
    used: BTreeSet<String>,
    errors: Vec<ConfigError>,
    warnings: Vec<String>,
}

impl Params {
    pub fn new(map: Map<String, Value>) -> Self {
        Self::with_prefix(String::new(), map)
    }

    fn with_prefix(prefix: String, map: Map<String, Value>) -> Self {
        Self {
            prefix,
            map,
            used: BTreeSet::new(),
            errors: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Full dotted path of `key`.
    pub fn path(&self, key: &str) -> String {
        format!("{}{}", self.prefix, key)
    }

    pub fn error(&mut self, key: &str, message: impl Into<String>) {
        let k = self.path(key);
        self.errors.push(ConfigError::new(k, message));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn missing(&mut self, key: &str) {
        self.error(key, "required key is missing");
    }

    fn typed<T>(&mut self, key: &str, what: &str, f: impl Fn(&Value) -> Option<T>) -> Option<T> {
        let v = self.take(key)?;
        match f(&v) {
            Some(x) => Some(x),
            None => {
                self.error(key, format!("expected {what}, got {v}"));
                None
            }
        }
    }

    pub fn opt_f64(&mut self, key: &str) -> Option<f64> {
        self.typed(key, "a number", |v| v.as_f64())
    }

    pub fn f64(&mut self, key: &str) -> Option<f64> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        self.opt_f64(key)
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> f64 {
        self.opt_f64(key).unwrap_or(default)
    }

    pub fn opt_u64(&mut self, key: &str) -> Option<u64> {
        self.typed(key, "a nonnegative integer", |v| v.as_u64())
    }

    pub fn opt_usize(&mut self, key: &str) -> Option<usize> {
        self.opt_u64(key).map(|x| x as usize)
    }

    pub fn usize(&mut self, key: &str) -> Option<usize> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        self.opt_usize(key)
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> usize {
        self.opt_usize(key).unwrap_or(default)
    }

    pub fn bool_or(&mut self, key: &str, default: bool) -> bool {
        self.typed(key, "a boolean", |v| v.as_bool())
            .unwrap_or(default)
    }

    pub fn opt_string(&mut self, key: &str) -> Option<String> {
        self.typed(key, "a string", |v| v.as_str().map(str::to_string))
    }

    pub fn string(&mut self, key: &str) -> Option<String> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        self.opt_string(key)
    }

    pub fn opt_f64_list(&mut self, key: &str) -> Option<Vec<f64>> {
        self.typed(key, "a list of numbers", |v| {
            v.as_array()?
                .iter()
                .map(Value::as_f64)
                .collect::<Option<Vec<_>>>()
        })
    }

    pub fn f64_list(&mut self, key: &str) -> Option<Vec<f64>> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        let list = self.opt_f64_list(key)?;
        if list.is_empty() {
            self.error(key, "list must not be empty");
            return None;
        }
        Some(list)
    }

    /// A required list of number lists, e.g. `[[1, 1], [0, 1]]`.
    pub fn f64_rows(&mut self, key: &str) -> Option<Vec<Vec<f64>>> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        self.typed(key, "a list of number lists", |v| {
            v.as_array()?
                .iter()
                .map(|r| {
                    r.as_array()?
                        .iter()
                        .map(Value::as_f64)
                        .collect::<Option<Vec<_>>>()
                })
                .collect::<Option<Vec<_>>>()
        })
    }

    /// Reads a nested object with `f`; its errors are reported under `key.`.
    pub fn opt_object<T>(
        &mut self,
        key: &str,
        f: impl FnOnce(&mut Params) -> Option<T>,
    ) -> Option<T> {
        let v = self.take(key)?;
        let Value::Object(map) = v else {
            self.error(key, format!("expected an object, got {v}"));
            return None;
        };
        let mut child = Params::with_prefix(self.path(key) + ".", map);
        let out = f(&mut child);
        self.absorb(child);
        out
    }

    pub fn object<T>(&mut self, key: &str, f: impl FnOnce(&mut Params) -> Option<T>) -> Option<T> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        self.opt_object(key, f)
    }

    /// Reads a list of objects, each with `f`.
    pub fn objects<T>(
        &mut self,
        key: &str,
        f: impl Fn(&mut Params) -> Option<T>,
    ) -> Option<Vec<T>> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        let v = self.take(key)?;
        let Value::Array(items) = v else {
            self.error(key, format!("expected a list of objects, got {v}"));
            return None;
        };
        if items.is_empty() {
            self.error(key, "list must not be empty");
            return None;
        }
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, item) in items.into_iter().enumerate() {
            let Value::Object(map) = item else {
                self.error(&format!("{key}[{i}]"), "expected an object");
                ok = false;
                continue;
            };
            let mut child = Params::with_prefix(format!("{}[{i}].", self.path(key)), map);
            match f(&mut child) {
                Some(x) => out.push(x),
                None => ok = false,
            }
            self.absorb(child);
        }
        ok.then_some(out)
    }

    fn absorb(&mut self, child: Params) {
        let (errors, warnings) = child.finish();
        self.errors.extend(errors);
        self.warnings.extend(warnings);
    }

    /// Marks a key as consumed without reading it.
    pub fn skip(&mut self, key: &str) {
        self.used.insert(key.to_string());
    }

    /// Closes the reader, adding one error per unknown key.
    pub fn finish(mut self) -> (Vec<ConfigError>, Vec<String>) {
        let unknown: Vec<String> = self
            .map
            .keys()
            .filter(|k| !self.used.contains(*k))
            .cloned()
            .collect();
        for k in unknown {
            self.error(&k, "unknown key");
        }
        (self.errors, self.warnings)
    }
}

// ---------------------------------------------------------------------------
// Shared readers
// ---------------------------------------------------------------------------

/// Entry law, e.g. `{"kind": "uniform", "a": -0.5, "b": 0.5}`.
pub fn distribution(p: &mut Params) -> Option<DistributionSpec> {
    let kind = p.string("kind")?;
    let d = match kind.as_str() {
        "uniform" => {
            let (a, b) = (p.f64("a"), p.f64("b"));
            DistributionSpec::Uniform { a: a?, b: b? }
        }
        "gaussian" => DistributionSpec::Gaussian {
            mean: p.f64_or("mean", 0.0),
            sigma: p.f64_or("sigma", 1.0),
        },
        "bernoulli_sym" => DistributionSpec::BernoulliSym,
        "bernoulli" => DistributionSpec::Bernoulli { p: p.f64("p")? },
        "point_mass" => DistributionSpec::PointMass { c: p.f64("c")? },
        other => {
            p.error(
                "kind",
                format!("unknown law `{other}`; expected uniform, gaussian, bernoulli_sym, bernoulli or point_mass"),
            );
            return None;
        }
    };
    if let Err(deloc_core::Error::Spec { field, message }) = d.validate() {
        let leaf = field.rsplit('.').next().unwrap_or(&field).to_string();
        p.error(&leaf, message);
        return None;
    }
    Some(d)
}

pub fn symmetry(p: &mut Params, key: &str, default: Symmetry) -> Option<Symmetry> {
    let Some(s) = p.opt_string(key) else {
        return (!p.has(key)).then_some(default);
    };
    match s.as_str() {
        "iid" => Some(Symmetry::Iid),
        "symmetric" => Some(Symmetry::Symmetric),
        "skew_symmetric" => Some(Symmetry::SkewSymmetric),
        other => {
            p.error(
                key,
                format!("unknown symmetry `{other}`; expected iid, symmetric or skew_symmetric"),
            );
            None
        }
    }
}

/// Checks one `ε` against the no-gaps range for side `n`. Values below `1/n`
/// select no coordinates and are rejected; values in `[1/n, 8/n)` only warn.
pub fn check_eps(p: &mut Params, key: &str, eps: f64, n: usize) -> bool {
    let nf = n as f64;
    if !(eps > 0.0 && eps <= 1.0) {
        p.error(key, format!("eps = {eps} must lie in (0, 1]"));
        return false;
    }
    if robust_ceil(eps * nf) < 1 || eps * nf < 1.0 - Tolerances::DEFAULT.ceil_slack {
        p.error(
            key,
            format!(
                "eps = {eps} is below 1/n = {}; the no-gaps guarantee is stated for eps in [8/n, 1) = [{}, 1)",
                1.0 / nf,
                8.0 / nf
            ),
        );
        return false;
    }
    if eps < 8.0 / nf {
        let path = p.path(key);
        p.warn(format!(
            "{path}: eps = {eps} lies below 8/n = {}, outside the guaranteed range",
            8.0 / nf
        ));
    }
    true
}

/// Nonnegative, finite grid values.
pub fn nonnegative_grid(p: &mut Params, key: &str) -> Option<Vec<f64>> {
    let g = p.f64_list(key)?;
    if g.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        p.error(key, "grid values must be finite and nonnegative");
        return None;
    }
    Some(g)
}

/// Absolute constants of the audited inequalities, with their defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    /// Small-ball constant `C₀` in `(C₀θ)^l`.
    pub c0: f64,
    /// Constant in the `G(n, p)` property bounds.
    pub c_audit: f64,
    pub c1: f64,
    pub c2: f64,
    /// Boundedness level `‖A‖ ≤ M√n`.
    pub m: f64,
    /// Threshold parameter in the default `δ = (εs)^6`.
    pub s: f64,
    pub halasz_c: f64,
    /// Smallest admissible `M` in the tensorization audit.
    pub m_guard: f64,
    pub tie_tol: f64,
    pub zero_tol: f64,
    pub fourier_tail: f64,
}

impl Default for Constants {
    fn default() -> Self {
        let t = Tolerances::DEFAULT;
        Self {
            c0: 3.0,
            c_audit: 3.0,
            c1: 1.0,
            c2: 0.5,
            m: 3.0,
            s: 1.0,
            halasz_c: 10.0,
            m_guard: deloc_core::smallball::DEFAULT_M_GUARD,
            tie_tol: t.tie_tol,
            zero_tol: t.zero_tol,
            fourier_tail: t.fourier_tail,
        }
    }
}

impl Constants {
    fn read(p: &mut Params) -> Option<Constants> {
        let d = Constants::default();
        let pos = |p: &mut Params, key: &str, default: f64, allow_zero: bool| {
            let v = p.f64_or(key, default);
            if !(v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0))) {
                p.error(
                    key,
                    format!(
                        "must be {}, got {v}",
                        if allow_zero {
                            "nonnegative"
                        } else {
                            "positive"
                        }
                    ),
                );
            }
            v
        };
        let c = Constants {
            c0: pos(p, "C0", d.c0, false),
            c_audit: pos(p, "C_audit", d.c_audit, false),
            c1: pos(p, "c1", d.c1, true),
            c2: pos(p, "c2", d.c2, true),
            m: pos(p, "M", d.m, false),
            s: pos(p, "s", d.s, false),
            halasz_c: pos(p, "halasz_c", d.halasz_c, false),
            m_guard: pos(p, "m_guard", d.m_guard, false),
            tie_tol: pos(p, "tie_tol", d.tie_tol, true),
            zero_tol: pos(p, "zero_tol", d.zero_tol, true),
            fourier_tail: pos(p, "fourier_tail", d.fourier_tail, false),
        };
        Some(c)
    }
}

/// Where the graphs of a graph experiment come from.
#[derive(Debug, Clone)]
pub enum GraphSource {
    /// `trials` independent `G(n, p)` samples, sample `t` seeded by `(master, t)`.
    Gnp { n: usize, p: f64, trials: usize },
    /// One graph read from an edge-list file.
    EdgeList { path: PathBuf, graph: GraphSample },
}

impl GraphSource {
    pub fn trials(&self) -> usize {
        match self {
            GraphSource::Gnp { trials, .. } => *trials,
            GraphSource::EdgeList { .. } => 1,
        }
    }

    /// Largest vertex count among the graphs.
    pub fn n(&self) -> usize {
        match self {
            GraphSource::Gnp { n, .. } => *n,
            GraphSource::EdgeList { graph, .. } => graph.n(),
        }
    }
}

/// Reads either `edge_list` (a path, relative to the configuration file) or
/// the `G(n, p)` parameters `n`, `p`, `trials`.
pub fn graph_source(p: &mut Params, base_dir: &Path) -> Option<GraphSource> {
    if p.has("edge_list") {
        for k in ["n", "p", "trials"] {
            if p.has(k) {
                p.skip(k);
                p.error(k, "cannot be combined with `edge_list`");
            }
        }
        let rel = p.string("edge_list")?;
        let path = base_dir.join(&rel);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                p.error("edge_list", format!("cannot read {}: {e}", path.display()));
                return None;
            }
        };
        return match parse_edge_list(&text) {
            Ok(graph) => Some(GraphSource::EdgeList { path, graph }),
            Err(e) => {
                p.error("edge_list", format!("{}: {e}", path.display()));
                None
            }
        };
    }
    let n = p.usize("n");
    let prob = p.f64("p");
    let trials = p.usize_or("trials", 1);
    if let Some(n) = n {
        if n < 2 {
            p.error("n", "a graph needs at least 2 vertices");
        }
    }
    if let Some(x) = prob {
        if !(x > 0.0 && x < 1.0) {
            p.error("p", format!("edge probability must lie in (0, 1), got {x}"));
        }
    }
    if trials == 0 {
        p.error("trials", "must be at least 1");
    }
    if p.has_errors() {
        return None;
    }
    Some(GraphSource::Gnp {
        n: n?,
        p: prob?,
        trials,
    })
}

// ---------------------------------------------------------------------------
// Top-level configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Config,
    CommandLine,
    /// `master_seed` absent; 0 was used.
    Default,
}

impl SeedSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeedSource::Config => "config",
            SeedSource::CommandLine => "command_line",
            SeedSource::Default => "default",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Directory against which relative paths in the configuration resolve.
    pub base_dir: PathBuf,
    /// Replaces `master_seed` when set.
    pub seed_override: Option<u64>,
}

/// Read-only inputs available to an experiment while it validates.
pub struct Setup<'a> {
    pub base_dir: &'a Path,
    pub constants: &'a Constants,
}

/// A validated configuration, ready to run.
pub struct ExperimentConfig {
    pub kind: String,
    pub master_seed: u64,
    pub seed_source: SeedSource,
    pub constants: Constants,
    pub out_dir: Option<PathBuf>,
    /// The input document with the effective `master_seed` filled in.
    pub echo: Value,
    pub warnings: Vec<String>,
    pub(crate) plan: Box<dyn Plan>,
}

impl std::fmt::Debug for ExperimentConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExperimentConfig")
            .field("kind", &self.kind)
            .field("master_seed", &self.master_seed)
            .field("seed_source", &self.seed_source)
            .field("constants", &self.constants)
            .field("warnings", &self.warnings)
            .finish_non_exhaustive()
    }
}

/// Parses and fully validates a configuration against the built-in registry.
pub fn validate_config(
    text: &str,
    opts: &LoadOptions,
) -> Result<ExperimentConfig, Vec<ConfigError>> {
    Registry::builtin().validate(text, opts)
}

impl Registry {
    /// Parses and validates `text`, collecting every error.
    pub fn validate(
        &self,
        text: &str,
        opts: &LoadOptions,
    ) -> Result<ExperimentConfig, Vec<ConfigError>> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| vec![ConfigError::new("<document>", format!("invalid JSON: {e}"))])?;
        let Value::Object(map) = doc.clone() else {
            return Err(vec![ConfigError::new(
                "<document>",
                "expected a JSON object",
            )]);
        };
        let mut p = Params::new(map);

        let kind = p.string("kind");
        let seed = p.opt_u64("master_seed");
        let (master_seed, seed_source) = match (opts.seed_override, seed) {
            (Some(s), _) => (s, SeedSource::CommandLine),
            (None, Some(s)) => (s, SeedSource::Config),
            (None, None) => {
                if !p.has("master_seed") {
                    p.warn("master_seed missing; defaulting to 0");
                }
                (0, SeedSource::Default)
            }
        };
        let out_dir = p.opt_string("out_dir").map(|d| opts.base_dir.join(d));
        let constants = if p.has("constants") {
            p.opt_object("constants", Constants::read)
        } else {
            Some(Constants::default())
        };

        let mut plan = None;
        if let (Some(kind), Some(constants)) = (&kind, &constants) {
            match self.get(kind) {
                Some(exp) => {
                    let setup = Setup {
                        base_dir: &opts.base_dir,
                        constants,
                    };
                    plan = exp.prepare(&mut p, &setup);
                }
                None => p.error(
                    "kind",
                    format!(
                        "unknown experiment `{kind}`; registered: {}",
                        self.names().join(", ")
                    ),
                ),
            }
        }
        let (errors, warnings) = p.finish();
        if !errors.is_empty() {
            return Err(errors);
        }
        let (Some(kind), Some(constants), Some(plan)) = (kind, constants, plan) else {
            // A reader declined without recording why.
            return Err(vec![ConfigError::new(
                "<document>",
                "configuration rejected",
            )]);
        };
        let mut echo = doc;
        echo["master_seed"] = Value::from(master_seed);
        Ok(ExperimentConfig {
            kind,
            master_seed,
            seed_source,
            constants,
            out_dir,
            echo,
            warnings,
            plan,
        })
    }
}
