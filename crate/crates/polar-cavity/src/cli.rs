//! File-driven runs: TOML configuration, named presets, and deterministic
//! table or JSON output.
//!
//! Every run is described by a [`RunConfig`], built either from a TOML file
//! or from a named preset, and executed by one of five operations:
//! `spectrum`, `rates`, `sweep`, `crossings`, `validate`. Output is a
//! metadata header plus a column table, rendered as whitespace-delimited
//! text or JSON; identical configurations produce byte-identical output.

use crate::emission::{
    self, degenerate_channel_pairs, emission_spectrum, group_rate, total_rate,
    transition_channels, ChannelGroup, FormFactor,
};
use crate::model::{jc_crossing_scan, labels_of_manifold, Branch, ModelParams, StateLabel};
use crate::oracle::{self, log_log_slope};
use crate::perturbation::{energy_through_second_order, state_norm};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Process exit codes: success, configuration error, numerical failure,
/// validity breach under `--strict`.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDITY: i32 = 3;

/// Couplings above this fraction of the cavity frequency are flagged by the
/// validity monitor.
pub const COUPLING_VALIDITY_LIMIT: f64 = 0.1;
/// State-norm deviations above this are flagged by the validity monitor.
pub const NORM_VALIDITY_LIMIT: f64 = 0.01;

/// The five operations a run can perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    Spectrum,
    Rates,
    Sweep,
    Crossings,
    Validate,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Spectrum => "spectrum",
            Verb::Rates => "rates",
            Verb::Sweep => "sweep",
            Verb::Crossings => "crossings",
            Verb::Validate => "validate",
        }
    }
}

/// Complete description of a run. Sections not used by the requested
/// operation may be omitted.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ModelParams,
    pub initial: Option<InitialSpec>,
    pub form_factor: Option<FormFactorSpec>,
    /// Overall rate prefactor (the bare cavity loss rate), in units of
    /// `omega_c`.
    #[serde(default = "default_base_rate")]
    pub base_rate: f64,
    pub grid: Option<GridSpec>,
    pub sweep: Option<SweepSpec>,
    pub crossings: Option<CrossingsSpec>,
    pub validate: Option<ValidateSpec>,
}

fn default_base_rate() -> f64 {
    1.0
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            initial: None,
            form_factor: None,
            base_rate: default_base_rate(),
            grid: None,
            sweep: None,
            crossings: None,
            validate: None,
        }
    }
}

/// Which dressed state decays. `s` is `"+"`, `"-"`, or `"both"` (spectrum
/// and rates only).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub n: u32,
    pub s: String,
}

impl InitialSpec {
    /// The branches this spec expands to, upper first for `"both"`.
    fn branches(&self, allow_both: bool) -> Result<Vec<Branch>> {
        match self.s.as_str() {
            "+" => Ok(vec![Branch::Plus]),
            "-" => Ok(vec![Branch::Minus]),
            "both" if allow_both => Ok(vec![Branch::Plus, Branch::Minus]),
            "both" => Err(Error::InvalidConfig(
                "initial.s = \"both\" is only supported by spectrum and rates".into(),
            )),
            other => Err(Error::InvalidConfig(format!(
                "initial.s must be \"+\", \"-\", or \"both\", got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Constant,
    PowerLaw,
    Lorentzian,
}

/// External spectral response declaration.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFactorSpec {
    pub kind: FormKind,
    /// Power-law exponent (power_law only).
    pub exponent: Option<f64>,
    /// Lorentzian center frequency (lorentzian only).
    pub center: Option<f64>,
    /// Lorentzian full width (lorentzian only).
    pub fwhm: Option<f64>,
    /// Lorentzian only: recenter onto the intramanifold line of the initial
    /// manifold at the current couplings instead of giving `center`.
    #[serde(default)]
    pub track_intramanifold: bool,
    /// Upper frequency cutoff for the Lamb-shift integral.
    pub cutoff: Option<f64>,
}

impl FormFactorSpec {
    fn reject(&self, field: &str, present: bool) -> Result<()> {
        if present {
            return Err(Error::InvalidConfig(format!(
                "form_factor.{field} does not apply to kind {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    /// Concrete response for the given parameters. `initial_n` anchors the
    /// tracked Lorentzian center.
    pub fn build(&self, params: &ModelParams, initial_n: u32) -> Result<FormFactor> {
        let ff = match self.kind {
            FormKind::Constant => {
                self.reject("exponent", self.exponent.is_some())?;
                self.reject("center", self.center.is_some())?;
                self.reject("fwhm", self.fwhm.is_some())?;
                self.reject("track_intramanifold", self.track_intramanifold)?;
                FormFactor::Constant
            }
            FormKind::PowerLaw => {
                self.reject("center", self.center.is_some())?;
                self.reject("fwhm", self.fwhm.is_some())?;
                self.reject("track_intramanifold", self.track_intramanifold)?;
                let exponent = self.exponent.ok_or_else(|| {
                    Error::InvalidConfig("form_factor.exponent is required for power_law".into())
                })?;
                FormFactor::PowerLaw { exponent }
            }
            FormKind::Lorentzian => {
                self.reject("exponent", self.exponent.is_some())?;
                let fwhm = self.fwhm.ok_or_else(|| {
                    Error::InvalidConfig("form_factor.fwhm is required for lorentzian".into())
                })?;
                let center = match (self.center, self.track_intramanifold) {
                    (Some(_), true) => {
                        return Err(Error::InvalidConfig(
                            "give form_factor.center or track_intramanifold, not both".into(),
                        ))
                    }
                    (Some(c), false) => c,
                    (None, true) => intramanifold_frequency(initial_n, params)?,
                    (None, false) => {
                        return Err(Error::InvalidConfig(
                            "lorentzian needs form_factor.center or track_intramanifold".into(),
                        ))
                    }
                };
                FormFactor::Lorentzian { center, fwhm }
            }
        };
        ff.validate()?;
        Ok(ff)
    }
}

/// Doublet splitting of manifold `n` including second-order shifts; the
/// frequency of the intramanifold emission line.
pub fn intramanifold_frequency(n: u32, params: &ModelParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "manifold 0 has no intramanifold line".into(),
        ));
    }
    let plus = energy_through_second_order(StateLabel::new(n, Branch::Plus), params)?;
    let minus = energy_through_second_order(StateLabel::new(n, Branch::Minus), params)?;
    Ok(plus - minus)
}

/// Uniform frequency grid for spectra.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    fn build(&self) -> Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::InvalidConfig(format!(
                "grid needs min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidConfig("grid needs at least 2 points".into()));
        }
        Ok(linspace(self.min, self.max, self.points))
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    Linear,
    Log,
}

fn default_scale() -> ScaleKind {
    ScaleKind::Log
}

/// Coupling sweep: `g_r` runs over the grid, `g_s = ratio * g_r` for each
/// ratio block.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Only `"g_r"` is supported.
    pub variable: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "default_ratios")]
    pub ratios: Vec<f64>,
    #[serde(default = "default_scale")]
    pub scale: ScaleKind,
}

fn default_ratios() -> Vec<f64> {
    vec![1.0]
}

/// Ladder-crossing report: one row per scan window.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingsSpec {
    /// Manifold windows `n <= n_max` to scan, one row each.
    pub windows: Vec<u32>,
    pub g_min: f64,
    pub g_max: f64,
    #[serde(default = "default_crossing_grid")]
    pub grid_points: usize,
    #[serde(default = "default_crossing_tol")]
    pub tol: f64,
}

fn default_crossing_grid() -> usize {
    2000
}

fn default_crossing_tol() -> f64 {
    1e-4
}

/// Oracle validation sweep: `g_r` over the grid, `g_s = ratio * g_r`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSpec {
    pub g_min: f64,
    pub g_max: f64,
    pub points: usize,
    #[serde(default = "default_ratio_one")]
    pub ratio: f64,
    #[serde(default = "default_fock_cutoff")]
    pub fock_cutoff: u32,
    #[serde(default = "default_scale")]
    pub scale: ScaleKind,
}

fn default_ratio_one() -> f64 {
    1.0
}

fn default_fock_cutoff() -> u32 {
    40
}

/// Parse a TOML configuration, rejecting unknown keys.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))
}

/// Load a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

// ---- output tables ----

/// One table cell: float, integer, or string.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => format_float(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::F(v) if v.is_finite() => serde_json::json!(v),
            Cell::F(v) => serde_json::Value::String(format_float(*v)),
            Cell::I(v) => serde_json::json!(v),
            Cell::S(s) => serde_json::Value::String(s.clone()),
        }
    }
}

/// Floats are rendered with 12 fractional digits of scientific notation;
/// enough to round-trip ladder energies, stable across runs.
fn format_float(v: f64) -> String {
    format!("{v:.12e}")
}

/// Ordered metadata plus a column table; the unit all operations produce.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn meta_f(&mut self, key: &str, value: f64) {
        self.metadata.push((key.to_string(), format_float(value)));
    }

    /// Whitespace-delimited text: `# key = value` header lines, a column
    /// name line, then one line per row.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(" "));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// JSON mirror of the text table: metadata object (string values),
    /// column list, row arrays. Non-finite floats are encoded as strings.
    pub fn render_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = serde_json::json!({
            "metadata": meta,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
}

impl OutputFormat {
    pub fn render(self, table: &Table) -> String {
        match self {
            OutputFormat::Table => table.render_text(),
            OutputFormat::Json => table.render_json(),
        }
    }
}

/// Result of one run: one or more named tables (the name becomes a file
/// suffix) plus validity-monitor findings.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub outputs: Vec<(String, Table)>,
    pub validity_warnings: Vec<String>,
}

// ---- shared helpers ----

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

/// Log-spaced grid with exact endpoints.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let lln = lo.ln();
    let step = (hi.ln() - lln) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (lln + i as f64 * step).exp()
            }
        })
        .collect()
}

fn coupling_grid(min: f64, max: f64, points: usize, scale: ScaleKind) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && max > min) {
        return Err(Error::InvalidConfig(format!(
            "coupling range needs min < max, got [{min}, {max}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidConfig(
            "coupling grid needs at least 2 points".into(),
        ));
    }
    match scale {
        ScaleKind::Linear => Ok(linspace(min, max, points)),
        ScaleKind::Log => {
            if min <= 0.0 {
                return Err(Error::InvalidConfig(
                    "log-scaled coupling grid needs min > 0".into(),
                ));
            }
            Ok(logspace(min, max, points))
        }
    }
}

fn require<'a, T>(opt: &'a Option<T>, section: &str, verb: Verb) -> Result<&'a T> {
    opt.as_ref().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "[{section}] section is required for {}",
            verb.name()
        ))
    })
}

fn params_metadata(t: &mut Table, params: &ModelParams) {
    t.meta_f("omega_c", params.omega_c);
    t.meta_f("omega_a", params.omega_a);
    t.meta_f("g_r", params.g_r);
    t.meta_f("g_s", params.g_s);
}

fn form_factor_metadata(t: &mut Table, ff: &FormFactor, cutoff: Option<f64>) {
    t.meta("form_factor", ff.kind_name());
    match *ff {
        FormFactor::Constant => {}
        FormFactor::PowerLaw { exponent } => t.meta_f("exponent", exponent),
        FormFactor::Lorentzian { center, fwhm } => {
            t.meta_f("center", center);
            t.meta_f("fwhm", fwhm);
        }
    }
    if let Some(l) = cutoff {
        t.meta_f("cutoff", l);
    }
}

/// Validity-monitor findings for one parameter point.
fn point_validity(params: &ModelParams, norm: Option<f64>) -> Vec<String> {
    let mut out = Vec::new();
    let limit = COUPLING_VALIDITY_LIMIT * params.omega_c;
    if params.g_r > limit || params.g_s > limit {
        out.push(format!(
            "couplings (g_r = {}, g_s = {}) exceed {} of the cavity frequency",
            params.g_r, params.g_s, COUPLING_VALIDITY_LIMIT
        ));
    }
    if let Some(n) = norm {
        if (n - 1.0).abs() > NORM_VALIDITY_LIMIT {
            out.push(format!(
                "second-order state norm {n:.6} deviates from 1 beyond {NORM_VALIDITY_LIMIT}"
            ));
        }
    }
    out
}

// ---- operations ----

/// Execute one operation on a configuration.
pub fn run(verb: Verb, cfg: &RunConfig) -> Result<RunResult> {
    cfg.params.validate()?;
    if !(cfg.base_rate.is_finite() && cfg.base_rate >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "base_rate must be finite and non-negative, got {}",
            cfg.base_rate
        )));
    }
    match verb {
        Verb::Spectrum => run_spectrum(cfg),
        Verb::Rates => run_rates(cfg),
        Verb::Sweep => run_sweep(cfg),
        Verb::Crossings => run_crossings(cfg),
        Verb::Validate => run_validate(cfg),
    }
}

fn run_spectrum(cfg: &RunConfig) -> Result<RunResult> {
    let initial = require(&cfg.initial, "initial", Verb::Spectrum)?;
    let ff_spec = require(&cfg.form_factor, "form_factor", Verb::Spectrum)?;
    let grid_spec = require(&cfg.grid, "grid", Verb::Spectrum)?;
    let grid = grid_spec.build()?;
    let branches = initial.branches(true)?;
    let both = branches.len() > 1;
    let ff = ff_spec.build(&cfg.params, initial.n)?;
    let mut outputs = Vec::new();
    let mut validity = Vec::new();
    for branch in branches {
        let label = StateLabel::new(initial.n, branch);
        let spec = emission_spectrum(
            label,
            &cfg.params,
            &ff,
            cfg.base_rate,
            ff_spec.cutoff,
            &grid,
        )?;
        let norm = state_norm(label, &cfg.params)?;
        let flags = point_validity(&cfg.params, Some(norm));
        let mut t = Table::default();
        t.meta("operation", "spectrum");
        params_metadata(&mut t, &cfg.params);
        t.meta("initial", label);
        form_factor_metadata(&mut t, &ff, ff_spec.cutoff);
        t.meta_f("base_rate", cfg.base_rate);
        t.meta("channels", spec.channels.len());
        t.meta_f("gamma_total", spec.gamma_total);
        t.meta_f("lamb_shift", spec.lamb_shift);
        t.meta_f("state_norm", norm);
        for w in &spec.warnings {
            t.meta("warning", w);
        }
        for f in &flags {
            t.meta("validity_warning", f);
        }
        t.columns = vec!["omega".into(), "density".into()];
        for (w, d) in spec.omega.iter().zip(&spec.density) {
            t.rows.push(vec![Cell::F(*w), Cell::F(*d)]);
        }
        let suffix = if both {
            match branch {
                Branch::Plus => "_plus".to_string(),
                Branch::Minus => "_minus".to_string(),
            }
        } else {
            String::new()
        };
        validity.extend(flags.into_iter().map(|f| format!("{label}: {f}")));
        outputs.push((suffix, t));
    }
    Ok(RunResult {
        outputs,
        validity_warnings: validity,
    })
}

fn run_rates(cfg: &RunConfig) -> Result<RunResult> {
    let initial = require(&cfg.initial, "initial", Verb::Rates)?;
    let ff_spec = require(&cfg.form_factor, "form_factor", Verb::Rates)?;
    let branches = initial.branches(true)?;
    let ff = ff_spec.build(&cfg.params, initial.n)?;
    let mut t = Table::default();
    t.meta("operation", "rates");
    params_metadata(&mut t, &cfg.params);
    form_factor_metadata(&mut t, &ff, ff_spec.cutoff);
    t.meta_f("base_rate", cfg.base_rate);
    t.columns = vec![
        "from".into(),
        "to".into(),
        "group".into(),
        "frequency".into(),
        "a_sq".into(),
        "form_factor".into(),
        "rate".into(),
        "branching".into(),
    ];
    let mut validity = Vec::new();
    for branch in branches {
        let label = StateLabel::new(initial.n, branch);
        let channels = transition_channels(label, &cfg.params, &ff, cfg.base_rate)?;
        let tot = total_rate(&channels);
        t.meta_f(&format!("total_rate[{label}]"), tot);
        for g in [ChannelGroup::Jc, ChannelGroup::As, ChannelGroup::Cr] {
            t.meta_f(
                &format!("rate_{}[{label}]", g.to_string().to_lowercase()),
                group_rate(&channels, g),
            );
        }
        match emission::lamb_shift(&channels, &ff, cfg.base_rate, ff_spec.cutoff, &cfg.params) {
            Ok(d) => t.meta_f(&format!("lamb_shift[{label}]"), d),
            Err(Error::DivergentShift) => t.meta(
                "warning",
                format!("lamb shift for {label} diverges without a frequency cutoff"),
            ),
            Err(e) => return Err(e),
        }
        for (i, j) in degenerate_channel_pairs(&channels) {
            t.meta(
                "warning",
                format!(
                    "channels to {} and {} overlap within the total linewidth",
                    channels[i].to, channels[j].to
                ),
            );
        }
        let norm = state_norm(label, &cfg.params)?;
        t.meta_f(&format!("state_norm[{label}]"), norm);
        let flags = point_validity(&cfg.params, Some(norm));
        for f in &flags {
            t.meta("validity_warning", f);
        }
        validity.extend(flags.into_iter().map(|f| format!("{label}: {f}")));
        for c in &channels {
            t.rows.push(vec![
                Cell::S(c.from.to_string()),
                Cell::S(c.to.to_string()),
                Cell::S(c.group.to_string()),
                Cell::F(c.frequency),
                Cell::F(c.a_sq),
                Cell::F(c.form_factor),
                Cell::F(c.rate),
                Cell::F(if tot > 0.0 { c.rate / tot } else { 0.0 }),
            ]);
        }
    }
    Ok(RunResult {
        outputs: vec![(String::new(), t)],
        validity_warnings: validity,
    })
}

/// Fixed target list for sweep columns: final states of all possible
/// channels out of `initial`, in channel-listing order.
fn sweep_targets(initial: StateLabel, params: &ModelParams) -> Vec<StateLabel> {
    let mut out = Vec::new();
    for nf in initial.n.saturating_sub(3)..=initial.n {
        for l in labels_of_manifold(nf, params) {
            if l != initial {
                out.push(l);
            }
        }
    }
    out
}

struct SweepRow {
    g_r: f64,
    g_s: f64,
    rates: Vec<f64>,
    groups: [f64; 3],
    total: f64,
    norm: f64,
    breakdown: bool,
    flags: Vec<String>,
}

fn sweep_point(
    initial: StateLabel,
    base: &ModelParams,
    g_r: f64,
    ratio: f64,
    ff_spec: &FormFactorSpec,
    base_rate: f64,
    targets: &[StateLabel],
) -> Result<SweepRow> {
    let params = ModelParams {
        g_r,
        g_s: ratio * g_r,
        ..*base
    };
    let attempt = (|| -> Result<(Vec<f64>, [f64; 3], f64, f64)> {
        let ff = ff_spec.build(&params, initial.n)?;
        let channels = transition_channels(initial, &params, &ff, base_rate)?;
        let mut rates = vec![0.0; targets.len()];
        for c in &channels {
            if let Some(i) = targets.iter().position(|t| *t == c.to) {
                rates[i] = c.rate;
            }
        }
        let groups = [
            group_rate(&channels, ChannelGroup::Jc),
            group_rate(&channels, ChannelGroup::As),
            group_rate(&channels, ChannelGroup::Cr),
        ];
        let total = total_rate(&channels);
        let norm = state_norm(initial, &params)?;
        Ok((rates, groups, total, norm))
    })();
    match attempt {
        Ok((rates, groups, total, norm)) => Ok(SweepRow {
            g_r,
            g_s: params.g_s,
            rates,
            groups,
            total,
            norm,
            breakdown: false,
            flags: point_validity(&params, Some(norm)),
        }),
        // A degenerate denominator marks the row as broken down instead of
        // aborting the sweep.
        Err(Error::NearDegeneracy { .. }) => Ok(SweepRow {
            g_r,
            g_s: params.g_s,
            rates: vec![f64::NAN; targets.len()],
            groups: [f64::NAN; 3],
            total: f64::NAN,
            norm: f64::NAN,
            breakdown: true,
            flags: point_validity(&params, None),
        }),
        Err(e) => Err(e),
    }
}

fn run_sweep(cfg: &RunConfig) -> Result<RunResult> {
    let initial = require(&cfg.initial, "initial", Verb::Sweep)?;
    let ff_spec = require(&cfg.form_factor, "form_factor", Verb::Sweep)?;
    let sweep = require(&cfg.sweep, "sweep", Verb::Sweep)?;
    if sweep.variable != "g_r" {
        return Err(Error::InvalidConfig(format!(
            "sweep.variable must be \"g_r\", got {:?}",
            sweep.variable
        )));
    }
    if sweep.ratios.is_empty() {
        return Err(Error::InvalidConfig("sweep.ratios must not be empty".into()));
    }
    for &r in &sweep.ratios {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sweep ratios must be finite and non-negative, got {r}"
            )));
        }
    }
    let branch = initial.branches(false)?[0];
    let label = StateLabel::new(initial.n, branch);
    let grid = coupling_grid(sweep.min, sweep.max, sweep.points, sweep.scale)?;
    let targets = sweep_targets(label, &cfg.params);
    let mut jobs = Vec::new();
    for &ratio in &sweep.ratios {
        for &g in &grid {
            jobs.push((ratio, g));
        }
    }
    let rows: Vec<Result<SweepRow>> = jobs
        .par_iter()
        .map(|&(ratio, g)| {
            sweep_point(
                label,
                &cfg.params,
                g,
                ratio,
                ff_spec,
                cfg.base_rate,
                &targets,
            )
        })
        .collect();
    let mut t = Table::default();
    t.meta("operation", "sweep");
    params_metadata(&mut t, &cfg.params);
    t.meta("initial", label);
    t.meta(
        "form_factor_kind",
        match ff_spec.kind {
            FormKind::Constant => "constant",
            FormKind::PowerLaw => "power_law",
            FormKind::Lorentzian => "lorentzian",
        },
    );
    if ff_spec.track_intramanifold {
        t.meta("lorentzian_center", "tracks intramanifold line");
    }
    t.meta_f("base_rate", cfg.base_rate);
    t.meta(
        "ratios",
        sweep
            .ratios
            .iter()
            .map(|r| format_float(*r))
            .collect::<Vec<_>>()
            .join(","),
    );
    t.meta("points_per_ratio", grid.len());
    if sweep.max > COUPLING_VALIDITY_LIMIT * cfg.params.omega_c {
        t.meta(
            "warning",
            format!(
                "sweep extends beyond {COUPLING_VALIDITY_LIMIT} of the cavity frequency; \
                 expect perturbative breakdown"
            ),
        );
    }
    t.columns = vec!["g_r".into(), "g_s".into()];
    for target in &targets {
        t.columns.push(format!("rate_{target}"));
    }
    t.columns.extend(
        ["rate_jc", "rate_as", "rate_cr", "rate_total", "state_norm", "breakdown"]
            .map(String::from),
    );
    let mut validity = Vec::new();
    let mut breakdown_count = 0usize;
    for row in rows {
        let row = row?;
        if row.breakdown {
            breakdown_count += 1;
        }
        for f in &row.flags {
            let tag = format!("g_r = {}: {f}", row.g_r);
            if !validity.contains(&tag) {
                validity.push(tag);
            }
        }
        let mut cells = vec![Cell::F(row.g_r), Cell::F(row.g_s)];
        cells.extend(row.rates.iter().map(|&r| Cell::F(r)));
        cells.extend(row.groups.iter().map(|&r| Cell::F(r)));
        cells.push(Cell::F(row.total));
        cells.push(Cell::F(row.norm));
        cells.push(Cell::I(row.breakdown as i64));
        t.rows.push(cells);
    }
    if breakdown_count > 0 {
        t.meta("warning", format!("{breakdown_count} rows hit near-degenerate denominators"));
    }
    // Validity warnings are summarized after the rows are known; prepend
    // them to the metadata so they sit with the other header lines.
    for f in &validity {
        t.meta("validity_warning", f);
    }
    Ok(RunResult {
        outputs: vec![(String::new(), t)],
        validity_warnings: validity,
    })
}

fn run_crossings(cfg: &RunConfig) -> Result<RunResult> {
    let spec = require(&cfg.crossings, "crossings", Verb::Crossings)?;
    if spec.windows.is_empty() {
        return Err(Error::InvalidConfig(
            "crossings.windows must list at least one manifold window".into(),
        ));
    }
    let mut t = Table::default();
    t.meta("operation", "crossings");
    params_metadata(&mut t, &cfg.params);
    t.meta_f("detuning", cfg.params.detuning());
    t.meta_f("g_min", spec.g_min);
    t.meta_f("g_max", spec.g_max);
    t.meta("grid_points", spec.grid_points);
    t.meta_f("tol", spec.tol);
    t.columns = vec![
        "n_max".into(),
        "g_cross".into(),
        "state_a".into(),
        "state_b".into(),
    ];
    let mut seen = Vec::new();
    for &w in &spec.windows {
        if seen.contains(&w) {
            continue;
        }
        seen.push(w);
        let c = jc_crossing_scan(
            &cfg.params,
            w,
            spec.g_min,
            spec.g_max,
            spec.grid_points,
            spec.tol,
        )?;
        t.rows.push(vec![
            Cell::I(w as i64),
            Cell::F(c.g),
            Cell::S(c.a.to_string()),
            Cell::S(c.b.to_string()),
        ]);
    }
    Ok(RunResult {
        outputs: vec![(String::new(), t)],
        validity_warnings: Vec::new(),
    })
}

struct ValidateRow {
    g_r: f64,
    cells: Vec<Cell>,
    energy_error: Option<f64>,
    breakdown: bool,
    flags: Vec<String>,
}

fn validate_point(
    label: StateLabel,
    base: &ModelParams,
    g_r: f64,
    ratio: f64,
    n_cutoff: u32,
) -> Result<ValidateRow> {
    let params = ModelParams {
        g_r,
        g_s: ratio * g_r,
        ..*base
    };
    // The three representative channels: ladder, population satellite,
    // counter-rotating.
    let chans = [
        StateLabel::new(label.n - 1, label.branch),
        label.partner(),
        StateLabel::new(label.n - 3, label.branch.flip()),
    ];
    let attempt = (|| -> Result<(oracle::OracleComparison, Vec<(f64, f64)>)> {
        let cmp = oracle::match_and_compare(&params, label, n_cutoff)?;
        let spectrum = oracle::diagonalize(&params, n_cutoff)?;
        let mut pairs = Vec::new();
        for &f in &chans {
            let pert = emission::a_sq(f, label, &params)?;
            let exact = oracle::exact_a_sq(&spectrum, f, label, &params)?;
            pairs.push((pert, exact));
        }
        Ok((cmp, pairs))
    })();
    match attempt {
        Ok((cmp, pairs)) => {
            let mut cells = vec![
                Cell::F(g_r),
                Cell::F(params.g_s),
                Cell::F(cmp.state_norm),
                Cell::F((cmp.state_norm - 1.0).abs()),
                Cell::F(cmp.energy_exact),
                Cell::F(cmp.energy_perturbative),
                Cell::F(cmp.energy_error),
                Cell::F(cmp.overlap_sq),
            ];
            for (pert, exact) in &pairs {
                cells.push(Cell::F(*pert));
                cells.push(Cell::F(*exact));
            }
            cells.push(Cell::I(0));
            Ok(ValidateRow {
                g_r,
                cells,
                energy_error: Some(cmp.energy_error),
                breakdown: false,
                flags: point_validity(&params, Some(cmp.state_norm)),
            })
        }
        // Breakdown of the expansion or of the matching is data here, not
        // failure: emit the row with a marker.
        Err(Error::NearDegeneracy { .. }) | Err(Error::AmbiguousMatch { .. }) => {
            let mut cells = vec![Cell::F(g_r), Cell::F(params.g_s)];
            cells.extend(std::iter::repeat_n(Cell::F(f64::NAN), 12));
            cells.push(Cell::I(1));
            Ok(ValidateRow {
                g_r,
                cells,
                energy_error: None,
                breakdown: true,
                flags: point_validity(&params, None),
            })
        }
        Err(e) => Err(e),
    }
}

fn run_validate(cfg: &RunConfig) -> Result<RunResult> {
    let initial = require(&cfg.initial, "initial", Verb::Validate)?;
    let spec = require(&cfg.validate, "validate", Verb::Validate)?;
    let branch = initial.branches(false)?[0];
    let label = StateLabel::new(initial.n, branch);
    if label.n < 3 {
        return Err(Error::InvalidConfig(
            "validate needs an initial manifold of at least 3".into(),
        ));
    }
    if !(spec.ratio.is_finite() && spec.ratio >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "validate.ratio must be finite and non-negative, got {}",
            spec.ratio
        )));
    }
    let grid = coupling_grid(spec.g_min, spec.g_max, spec.points, spec.scale)?;
    let rows: Vec<Result<ValidateRow>> = grid
        .par_iter()
        .map(|&g| validate_point(label, &cfg.params, g, spec.ratio, spec.fock_cutoff))
        .collect();
    let mut t = Table::default();
    t.meta("operation", "validate");
    params_metadata(&mut t, &cfg.params);
    t.meta("initial", label);
    t.meta("fock_cutoff", spec.fock_cutoff);
    t.meta_f("ratio", spec.ratio);
    t.columns = vec![
        "g_r".into(),
        "g_s".into(),
        "state_norm".into(),
        "norm_dev".into(),
        "energy_exact".into(),
        "energy_pert".into(),
        "energy_error".into(),
        "overlap_sq".into(),
        "asq_jc_pert".into(),
        "asq_jc_exact".into(),
        "asq_as_pert".into(),
        "asq_as_exact".into(),
        "asq_cr_pert".into(),
        "asq_cr_exact".into(),
        "breakdown".into(),
    ];
    let mut validity = Vec::new();
    let mut fit_g = Vec::new();
    let mut fit_err = Vec::new();
    let mut max_valid_g = None;
    let mut breakdown_count = 0usize;
    let mut done = Vec::new();
    for row in rows {
        let row = row?;
        if row.breakdown {
            breakdown_count += 1;
        } else {
            max_valid_g = Some(row.g_r);
        }
        if let Some(e) = row.energy_error {
            if e > 0.0 {
                fit_g.push(row.g_r);
                fit_err.push(e);
            }
        }
        for f in &row.flags {
            let tag = format!("g_r = {}: {f}", row.g_r);
            if !validity.contains(&tag) {
                validity.push(tag);
            }
        }
        done.push(row);
    }
    // Error-scaling exponent from the smallest couplings, where the
    // power law is clean.
    if fit_g.len() >= 2 {
        let take = fit_g.len().min(4);
        let slope = log_log_slope(&fit_g[..take], &fit_err[..take]);
        t.meta_f("energy_error_exponent", slope);
    }
    // Truncation control: the exact energy at the largest non-broken point
    // must be stable under doubling the Fock cutoff.
    if let Some(g) = max_valid_g {
        let params = ModelParams {
            g_r: g,
            g_s: spec.ratio * g,
            ..cfg.params
        };
        let e1 = oracle::match_and_compare(&params, label, spec.fock_cutoff)?.energy_exact;
        let e2 = oracle::match_and_compare(&params, label, 2 * spec.fock_cutoff)?.energy_exact;
        t.meta_f("cutoff_doubling_delta", (e1 - e2).abs());
    }
    if breakdown_count > 0 {
        t.meta(
            "warning",
            format!("{breakdown_count} rows hit degeneracy or matching ambiguity"),
        );
    }
    for f in &validity {
        t.meta("validity_warning", f);
    }
    for row in done {
        t.rows.push(row.cells);
    }
    Ok(RunResult {
        outputs: vec![(String::new(), t)],
        validity_warnings: validity,
    })
}

// ---- presets ----

/// Names accepted by `--preset`.
pub fn preset_names() -> &'static [&'static str] {
    &[
        "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig4e", "fig4f",
        "fig5a", "fig5b", "fig5c", "fig5d", "appendixA",
    ]
}

fn ff_constant() -> FormFactorSpec {
    FormFactorSpec {
        kind: FormKind::Constant,
        exponent: None,
        center: None,
        fwhm: None,
        track_intramanifold: false,
        cutoff: None,
    }
}

fn ff_quadratic() -> FormFactorSpec {
    FormFactorSpec {
        kind: FormKind::PowerLaw,
        exponent: Some(2.0),
        center: None,
        fwhm: None,
        track_intramanifold: false,
        cutoff: None,
    }
}

fn ff_tracking_lorentzian() -> FormFactorSpec {
    FormFactorSpec {
        kind: FormKind::Lorentzian,
        exponent: None,
        center: None,
        fwhm: Some(1e-4),
        track_intramanifold: true,
        cutoff: None,
    }
}

fn initial_10(s: &str) -> Option<InitialSpec> {
    Some(InitialSpec {
        n: 10,
        s: s.to_string(),
    })
}

fn sweep_standard(ratios: Vec<f64>) -> Option<SweepSpec> {
    Some(SweepSpec {
        variable: "g_r".into(),
        min: 1e-3,
        max: 5e-2,
        points: 60,
        ratios,
        scale: ScaleKind::Log,
    })
}

/// Built-in survey configurations covering the crossing scans, the doublet
/// spectra, the channel-rate sweeps, and the oracle validation sweep.
pub fn preset(name: &str) -> Result<RunConfig> {
    let resonant = ModelParams::resonant(0.0, 0.0);
    let detuned = ModelParams::detuned(0.8, 0.0, 0.0);
    let crossing_windows = CrossingsSpec {
        windows: vec![7, 10, 14],
        g_min: 1e-4,
        g_max: 0.3,
        grid_points: default_crossing_grid(),
        tol: default_crossing_tol(),
    };
    let cfg = match name {
        // Ladder crossings of the lowest manifold windows, on and off
        // resonance.
        "fig2a" => RunConfig {
            params: resonant,
            crossings: Some(crossing_windows),
            ..RunConfig::default()
        },
        "fig2b" => RunConfig {
            params: detuned,
            crossings: Some(crossing_windows),
            ..RunConfig::default()
        },
        // Emission spectra of the n = 10 doublet through a quadratic and a
        // flat external response.
        "fig3a" | "fig3b" => RunConfig {
            params: ModelParams::resonant(0.01, 0.01),
            initial: initial_10("both"),
            form_factor: Some(if name == "fig3a" {
                ff_quadratic()
            } else {
                ff_constant()
            }),
            base_rate: 1e-3,
            grid: Some(GridSpec {
                min: 0.0,
                max: 3.5,
                points: 7001,
            }),
            ..RunConfig::default()
        },
        // Channel-rate sweeps against the coupling, three spectral
        // responses, resonant row then detuned row.
        "fig4a" | "fig4b" | "fig4c" | "fig4d" | "fig4e" | "fig4f" => RunConfig {
            params: if matches!(name, "fig4a" | "fig4b" | "fig4c") {
                resonant
            } else {
                detuned
            },
            initial: initial_10("+"),
            form_factor: Some(match name {
                "fig4a" | "fig4d" => ff_constant(),
                "fig4b" | "fig4e" => ff_quadratic(),
                _ => ff_tracking_lorentzian(),
            }),
            sweep: sweep_standard(vec![1.0, 0.1, 0.01]),
            ..RunConfig::default()
        },
        // Group-resolved sweeps at equal couplings; the c/d variants carry
        // the same table with the population satellites broken out.
        "fig5a" | "fig5c" => RunConfig {
            params: resonant,
            initial: initial_10("+"),
            form_factor: Some(ff_constant()),
            sweep: sweep_standard(vec![1.0]),
            ..RunConfig::default()
        },
        "fig5b" | "fig5d" => RunConfig {
            params: detuned,
            initial: initial_10("+"),
            form_factor: Some(ff_constant()),
            sweep: sweep_standard(vec![1.0]),
            ..RunConfig::default()
        },
        // Oracle validation sweep up to the breakdown region.
        "appendixA" => RunConfig {
            params: resonant,
            initial: initial_10("+"),
            validate: Some(ValidateSpec {
                g_min: 1e-3,
                g_max: 0.15,
                points: 25,
                ratio: 1.0,
                fock_cutoff: 40,
                scale: ScaleKind::Log,
            }),
            ..RunConfig::default()
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset {other:?}; known presets: {}",
                preset_names().join(", ")
            )))
        }
    };
    Ok(cfg)
}

/// Natural operation for each preset, used when dispatching by name in
/// examples and tests.
pub fn preset_verb(name: &str) -> Result<Verb> {
    match name {
        "fig2a" | "fig2b" => Ok(Verb::Crossings),
        "fig3a" | "fig3b" => Ok(Verb::Spectrum),
        "fig4a" | "fig4b" | "fig4c" | "fig4d" | "fig4e" | "fig4f" | "fig5a" | "fig5b"
        | "fig5c" | "fig5d" => Ok(Verb::Sweep),
        "appendixA" => Ok(Verb::Validate),
        other => Err(Error::InvalidConfig(format!("unknown preset {other:?}"))),
    }
}

// ---- output writing ----

/// Insert a suffix before the file extension: `spec.txt` + `_plus` gives
/// `spec_plus.txt`.
pub fn suffixed_path(path: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let mut name = format!("{stem}{suffix}");
    if let Some(ext) = path.extension().and_then(|e| e.to_str()) {
        name.push('.');
        name.push_str(ext);
    }
    path.with_file_name(name)
}

/// Render every table of a run; returns `(path, content)` pairs when an
/// output stem is given, or the concatenated content for stdout.
pub fn render_outputs(
    result: &RunResult,
    out: Option<&Path>,
    format: OutputFormat,
) -> Vec<(Option<PathBuf>, String)> {
    result
        .outputs
        .iter()
        .map(|(suffix, table)| {
            let content = format.render(table);
            (out.map(|p| suffixed_path(p, suffix)), content)
        })
        .collect()
}

// ---- microscopic couplings ----

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054571817e-34;
/// Vacuum permittivity, F / m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;

/// Dipole matrix elements (already projected onto the mode polarization)
/// and cavity geometry, SI units.
#[derive(Clone, Copy, Debug)]
pub struct DipoleCavity {
    /// Cavity angular frequency, rad / s.
    pub omega_c: f64,
    /// Effective mode volume, m^3.
    pub mode_volume: f64,
    /// Transition dipole projection, C m.
    pub d_transition: f64,
    /// Excited-state permanent dipole projection, C m.
    pub d_excited: f64,
    /// Ground-state permanent dipole projection, C m.
    pub d_ground: f64,
}

/// Couplings in units of `omega_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedCouplings {
    pub g_r: f64,
    pub g_s: f64,
    pub g_s_prime: f64,
}

/// Microscopic couplings from dipole projections and the mode volume:
/// the zero-point field couples to the transition dipole with the full
/// vacuum amplitude and to each permanent dipole with half of it (the
/// population operators carry the factor 2 explicitly in the Hamiltonian).
pub fn coupling_from_dipole(input: &DipoleCavity) -> Result<DerivedCouplings> {
    if !(input.omega_c > 0.0 && input.mode_volume > 0.0) {
        return Err(Error::InvalidConfig(
            "dipole conversion needs positive frequency and mode volume".into(),
        ));
    }
    let quantum = HBAR * input.omega_c;
    let offdiag = (quantum / (2.0 * VACUUM_PERMITTIVITY * input.mode_volume)).sqrt();
    let diag = (quantum / (8.0 * VACUUM_PERMITTIVITY * input.mode_volume)).sqrt();
    Ok(DerivedCouplings {
        g_r: input.d_transition.abs() * offdiag / quantum,
        g_s: input.d_excited.abs() * diag / quantum,
        g_s_prime: input.d_ground.abs() * diag / quantum,
    })
}
