//! Sectioned `KEY=VALUE` experiment configuration.
//!
//! Every key has a default, so an empty file is a valid configuration.
//! [`ExperimentConfig::render`] prints the fully resolved form, which parses
//! back to the same value.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write;

use eustat_core::ensemble::{ClassTag, FamilyKind, Profile};
use eustat_core::solver::{Scheme, DEFAULT_GUARD_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Parse { .. } => "ParseError",
            ConfigError::Validation(_) => "ValidationError",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SaveTimes {
    Uniform(usize),
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Uniform,
    List(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retention {
    All,
    Final,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Energy,
    Vorticity,
    FoiasLiouville,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    FirstMoment,
    SecondMoment,
}

/// Gaussian streamfunction `exp(-|x-c|²/(2s²))` generating a test field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussTest {
    pub center: (f64, f64),
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridBlock {
    pub n: usize,
    pub box_half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaBlock {
    pub support_radius: f64,
    pub horizon_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverBlock {
    pub nu: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub save_times: SaveTimes,
    pub boundary_guard_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureBlock {
    pub family: FamilyKind,
    pub class: ClassTag,
    pub n_atoms: usize,
    pub master_seed: u64,
    pub weights: Weights,
    /// One entry per atom for `fixed_atoms`, a single base atom otherwise.
    pub profiles: Vec<Vec<Profile>>,
    pub amplitude_range: (f64, f64),
    pub placement_range: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyBlock {
    pub laws: Vec<Law>,
    pub q: Vec<f64>,
    pub test_fields: Vec<GaussTest>,
    pub phi: Vec<PhiKind>,
    pub cutoff_radius: f64,
    pub fl_tolerance: f64,
    pub fl_strides: Vec<usize>,
    pub fl_order_factor: f64,
    pub nu_schedule: Vec<f64>,
    pub epsilon_schedule: Vec<f64>,
    pub checkpoints: Vec<f64>,
    pub n_slices: usize,
    pub slice_seed: u64,
    pub inviscid_ratio_max: f64,
    pub cauchy_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IoBlock {
    pub output_dir: String,
    pub snapshot_retention: Retention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridBlock,
    pub sigma: SigmaBlock,
    pub solver: SolverBlock,
    pub measure: MeasureBlock,
    pub verify: VerifyBlock,
    pub io: IoBlock,
}

impl SaveTimes {
    pub fn resolve(&self, horizon_t: f64) -> Vec<f64> {
        match self {
            SaveTimes::Uniform(k) => {
                let mut t: Vec<f64> = (0..=*k).map(|i| horizon_t * i as f64 / *k as f64).collect();
                t[*k] = horizon_t;
                t
            }
            SaveTimes::List(t) => t.clone(),
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("grid", &["n", "box_half_width"]),
    ("sigma", &["support_radius", "horizon_T"]),
    ("solver", &["nu", "dt", "scheme", "save_times", "boundary_guard_tol"]),
    (
        "measure",
        &[
            "family",
            "class",
            "n_atoms",
            "master_seed",
            "weights",
            "profiles",
            "amplitude_range",
            "placement_range",
        ],
    ),
    (
        "verify",
        &[
            "laws",
            "q",
            "test_fields",
            "phi",
            "cutoff_radius",
            "fl_tolerance",
            "fl_strides",
            "fl_order_factor",
            "nu_schedule",
            "epsilon_schedule",
            "checkpoints",
            "n_slices",
            "slice_seed",
            "inviscid_ratio_max",
            "cauchy_factor",
        ],
    ),
    ("io", &["output_dir", "snapshot_retention"]),
];

fn dipole() -> Vec<Profile> {
    vec![
        Profile::Gaussian { amplitude: 1.0, center: (0.0, 0.85), width: 0.2 },
        Profile::Gaussian { amplitude: -1.0, center: (0.0, -0.85), width: 0.2 },
    ]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: GridBlock { n: 128, box_half_width: PI },
            sigma: SigmaBlock { support_radius: 0.5, horizon_t: 1.0 },
            solver: SolverBlock {
                nu: 0.0,
                dt: 0.02,
                scheme: Scheme::IntegratingFactorRk4,
                save_times: SaveTimes::Uniform(10),
                boundary_guard_tol: Some(DEFAULT_GUARD_TOL),
            },
            measure: MeasureBlock {
                family: FamilyKind::RandomAmplitudeBlobs,
                class: ClassTag::YudovichA,
                n_atoms: 8,
                master_seed: 0,
                weights: Weights::Uniform,
                profiles: vec![dipole()],
                amplitude_range: (0.5, 1.5),
                placement_range: 0.25,
            },
            verify: VerifyBlock {
                laws: vec![Law::Energy, Law::Vorticity],
                q: vec![1.0, 2.0, f64::INFINITY],
                test_fields: vec![GaussTest { center: (0.0, 0.85), width: 0.5 }],
                phi: vec![PhiKind::FirstMoment, PhiKind::SecondMoment],
                cutoff_radius: 100.0,
                fl_tolerance: 1e-6,
                fl_strides: vec![4, 2, 1],
                fl_order_factor: 3.5,
                nu_schedule: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
                epsilon_schedule: vec![0.8, 0.4, 0.2, 0.1],
                checkpoints: Vec::new(),
                n_slices: 64,
                slice_seed: 0,
                inviscid_ratio_max: 0.25,
                cauchy_factor: 3.0,
            },
            io: IoBlock {
                output_dir: "eustat-out".into(),
                snapshot_retention: Retention::All,
            },
        }
    }
}

type Entries = HashMap<(String, String), (String, usize)>;

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut section: Option<&str> = None;
    let mut entries = Entries::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError::Parse { line, message };
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(format!("malformed section header `{content}`")))?
                .trim();
            let known = SECTIONS
                .iter()
                .find(|(s, _)| *s == name)
                .ok_or_else(|| err(format!("unknown section [{name}]")))?;
            section = Some(known.0);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected KEY=VALUE, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| err(format!("key `{key}` outside any section")))?;
        let keys = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !keys.contains(&key) {
            return Err(err(format!("unknown key `{key}` in [{sec}]")));
        }
        let slot = (sec.to_string(), key.to_string());
        if let Some((_, first)) = entries.get(&slot) {
            return Err(err(format!("duplicate key `{key}` in [{sec}] (first set on line {first})")));
        }
        entries.insert(slot, (value.to_string(), line));
    }
    Ok(entries)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")),
    }
}

fn parse_list<T>(s: &str, sep: char, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(sep).map(|p| item(p.trim())).collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    parse_list(s, ',', parse_f64)
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_floats(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two numbers, got `{s}`")),
    }
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    let (kind, args) = s.split_once(':').ok_or_else(|| format!("profile `{s}` lacks `kind:`"))?;
    let v = parse_floats(args)?;
    let want = |n: usize| {
        if v.len() == n {
            Ok(())
        } else {
            Err(format!("{kind} profile takes {n} numbers, got {}", v.len()))
        }
    };
    match kind.trim() {
        "gaussian" => {
            want(4)?;
            Ok(Profile::Gaussian { amplitude: v[0], center: (v[1], v[2]), width: v[3] })
        }
        "patch" => {
            want(4)?;
            Ok(Profile::Patch { amplitude: v[0], center: (v[1], v[2]), radius: v[3] })
        }
        "sheet" => {
            want(5)?;
            Ok(Profile::Sheet {
                strength: v[0],
                center: (v[1], v[2]),
                half_length: v[3],
                angle: v[4],
            })
        }
        "sine" => {
            want(3)?;
            Ok(Profile::Mode { amplitude: v[0], wavevector: (v[1], v[2]), phase: 0.0 })
        }
        other => Err(format!("unknown profile kind `{other}`")),
    }
}

fn parse_atoms(s: &str) -> Result<Vec<Vec<Profile>>, String> {
    s.split('|')
        .map(|atom| parse_list(atom, ';', parse_profile))
        .collect()
}

fn parse_gauss_test(s: &str) -> Result<GaussTest, String> {
    let args = s
        .strip_prefix("gauss:")
        .ok_or_else(|| format!("test field `{s}` must be `gauss:cx,cy,s`"))?;
    match parse_floats(args)?.as_slice() {
        [cx, cy, w] => Ok(GaussTest { center: (*cx, *cy), width: *w }),
        _ => Err(format!("test field `{s}` must be `gauss:cx,cy,s`")),
    }
}

impl std::str::FromStr for ExperimentConfig {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_config(s)
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let entries = tokenize(text)?;
    let mut c = ExperimentConfig::default();
    let mut checkpoints_set = false;
    let mut keys: Vec<_> = entries.iter().collect();
    keys.sort_by_key(|(_, (_, line))| *line);
    for ((sec, key), (value, line)) in keys {
        let v = value.as_str();
        let res: Result<(), String> = (|| {
            match (sec.as_str(), key.as_str()) {
                ("grid", "n") => c.grid.n = parse_usize(v)?,
                ("grid", "box_half_width") => c.grid.box_half_width = parse_f64(v)?,
                ("sigma", "support_radius") => c.sigma.support_radius = parse_f64(v)?,
                ("sigma", "horizon_T") => c.sigma.horizon_t = parse_f64(v)?,
                ("solver", "nu") => c.solver.nu = parse_f64(v)?,
                ("solver", "dt") => c.solver.dt = parse_f64(v)?,
                ("solver", "scheme") => {
                    c.solver.scheme = Scheme::parse(v).ok_or_else(|| format!("unknown scheme `{v}`"))?
                }
                ("solver", "save_times") => {
                    c.solver.save_times = match v.strip_prefix("uniform:") {
                        Some(k) => SaveTimes::Uniform(parse_usize(k.trim())?),
                        None => SaveTimes::List(parse_floats(v)?),
                    }
                }
                ("solver", "boundary_guard_tol") => {
                    c.solver.boundary_guard_tol = if v == "none" { None } else { Some(parse_f64(v)?) }
                }
                ("measure", "family") => {
                    c.measure.family = FamilyKind::parse(v).ok_or_else(|| format!("unknown family `{v}`"))?
                }
                ("measure", "class") => {
                    c.measure.class = ClassTag::parse(v).ok_or_else(|| format!("unknown class `{v}`"))?
                }
                ("measure", "n_atoms") => c.measure.n_atoms = parse_usize(v)?,
                ("measure", "master_seed") => {
                    c.measure.master_seed = v.parse().map_err(|_| format!("`{v}` is not a u64 seed"))?
                }
                ("measure", "weights") => {
                    c.measure.weights = if v == "uniform" {
                        Weights::Uniform
                    } else {
                        Weights::List(parse_floats(v)?)
                    }
                }
                ("measure", "profiles") => c.measure.profiles = parse_atoms(v)?,
                ("measure", "amplitude_range") => c.measure.amplitude_range = parse_pair(v)?,
                ("measure", "placement_range") => c.measure.placement_range = parse_f64(v)?,
                ("verify", "laws") => {
                    c.verify.laws = parse_list(v, ',', |s| match s {
                        "energy" => Ok(Law::Energy),
                        "vorticity" => Ok(Law::Vorticity),
                        "foias_liouville" => Ok(Law::FoiasLiouville),
                        o => Err(format!("unknown law `{o}`")),
                    })?
                }
                ("verify", "q") => c.verify.q = parse_floats(v)?,
                ("verify", "test_fields") => c.verify.test_fields = parse_list(v, ';', parse_gauss_test)?,
                ("verify", "phi") => {
                    c.verify.phi = parse_list(v, ',', |s| match s {
                        "first_moment" => Ok(PhiKind::FirstMoment),
                        "second_moment" => Ok(PhiKind::SecondMoment),
                        o => Err(format!("unknown functional `{o}`")),
                    })?
                }
                ("verify", "cutoff_radius") => c.verify.cutoff_radius = parse_f64(v)?,
                ("verify", "fl_tolerance") => c.verify.fl_tolerance = parse_f64(v)?,
                ("verify", "fl_strides") => c.verify.fl_strides = parse_list(v, ',', parse_usize)?,
                ("verify", "fl_order_factor") => c.verify.fl_order_factor = parse_f64(v)?,
                ("verify", "nu_schedule") => c.verify.nu_schedule = parse_floats(v)?,
                ("verify", "epsilon_schedule") => c.verify.epsilon_schedule = parse_floats(v)?,
                ("verify", "checkpoints") => {
                    c.verify.checkpoints = parse_floats(v)?;
                    checkpoints_set = true;
                }
                ("verify", "n_slices") => c.verify.n_slices = parse_usize(v)?,
                ("verify", "slice_seed") => {
                    c.verify.slice_seed = v.parse().map_err(|_| format!("`{v}` is not a u64 seed"))?
                }
                ("verify", "inviscid_ratio_max") => c.verify.inviscid_ratio_max = parse_f64(v)?,
                ("verify", "cauchy_factor") => c.verify.cauchy_factor = parse_f64(v)?,
                ("io", "output_dir") => c.io.output_dir = v.to_string(),
                ("io", "snapshot_retention") => {
                    c.io.snapshot_retention = match v {
                        "all" => Retention::All,
                        "final" => Retention::Final,
                        "none" => Retention::None,
                        o => return Err(format!("unknown retention `{o}`")),
                    }
                }
                _ => unreachable!("key table and match arms disagree"),
            }
            Ok(())
        })();
        res.map_err(|message| ConfigError::Parse { line: *line, message })?;
    }
    if !checkpoints_set {
        c.verify.checkpoints = vec![c.sigma.horizon_t];
    }
    c.validate()?;
    Ok(c)
}

fn check(ok: bool, invariant: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Validation(invariant.to_string()))
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

impl ExperimentConfig {
    /// Re-checks the numeric constraints the core modules enforce, so a bad
    /// configuration fails before any work starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        check(g.n >= 16 && g.n.is_power_of_two(), "n is a power of two ≥ 16")?;
        check(g.box_half_width > 0.0 && g.box_half_width.is_finite(), "box_half_width > 0")?;
        let s = &self.sigma;
        check(s.support_radius > 0.0, "support_radius > 0")?;
        check(
            s.support_radius <= g.box_half_width / 4.0,
            "support_radius ≤ box_half_width / 4",
        )?;
        check(s.horizon_t > 0.0 && s.horizon_t.is_finite(), "horizon_T > 0")?;
        let v = &self.solver;
        check(v.nu >= 0.0 && v.nu.is_finite(), "nu ≥ 0")?;
        check(v.dt > 0.0 && v.dt.is_finite(), "dt > 0")?;
        let times = v.save_times.resolve(s.horizon_t);
        check(!matches!(v.save_times, SaveTimes::Uniform(0)), "save_times has at least one interval")?;
        check(
            times.first() == Some(&0.0) && times.last() == Some(&s.horizon_t),
            "save_times start at 0 and end at horizon_T",
        )?;
        check(times.windows(2).all(|w| w[1] > w[0]), "save_times strictly increasing")?;
        check(
            v.boundary_guard_tol.map_or(true, |t| t > 0.0),
            "boundary_guard_tol > 0 or none",
        )?;
        let m = &self.measure;
        check(m.n_atoms >= 1, "n_atoms ≥ 1")?;
        check(!m.profiles.is_empty() && m.profiles.iter().all(|a| !a.is_empty()), "every atom has a profile")?;
        check(
            m.family == FamilyKind::FixedAtoms || m.profiles.len() == 1,
            "blob families take a single base atom",
        )?;
        if let Weights::List(w) = &m.weights {
            check(w.len() == m.n_atoms, "weights has n_atoms entries")?;
            check(w.iter().all(|x| *x > 0.0), "weights > 0")?;
            check((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12, "weights sum to 1")?;
        }
        check(
            m.amplitude_range.0 <= m.amplitude_range.1 && m.amplitude_range.0.is_finite(),
            "amplitude_range lo ≤ hi",
        )?;
        check(m.placement_range >= 0.0, "placement_range ≥ 0")?;
        if let Some(eps) = m.class.mollification() {
            check(eps >= 2.0 * 2.0 * g.box_half_width / g.n as f64, "class mollification radius ≥ 2h")?;
        }
        let f = &self.verify;
        check(f.q.iter().all(|q| *q >= 1.0), "q ≥ 1")?;
        check(!f.test_fields.is_empty(), "at least one test field")?;
        check(f.test_fields.iter().all(|t| t.width > 0.0), "test field width > 0")?;
        check(f.cutoff_radius > 0.0, "cutoff_radius > 0")?;
        check(f.fl_tolerance >= 0.0, "fl_tolerance ≥ 0")?;
        check(!f.fl_strides.is_empty() && f.fl_strides.iter().all(|k| *k >= 1), "fl_strides ≥ 1")?;
        check(
            f.nu_schedule.iter().all(|n| *n >= 0.0) && strictly_decreasing(&f.nu_schedule),
            "nu_schedule non-negative and strictly decreasing",
        )?;
        check(
            f.epsilon_schedule.iter().all(|e| *e > 0.0) && strictly_decreasing(&f.epsilon_schedule),
            "epsilon_schedule positive and strictly decreasing",
        )?;
        check(
            f.checkpoints.iter().all(|t| times.contains(t)),
            "checkpoints are save times",
        )?;
        check(
            f.n_slices >= 1 || f.test_fields.len() == 1,
            "n_slices ≥ 1 with several test fields",
        )?;
        Ok(())
    }

    pub fn save_times(&self) -> Vec<f64> {
        self.solver.save_times.resolve(self.sigma.horizon_t)
    }

    /// The resolved configuration in the input format.
    pub fn render(&self) -> String {
        let mut o = String::new();
        let fl = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",");
        let _ = writeln!(o, "[grid]\nn = {}\nbox_half_width = {}", self.grid.n, fmt_f64(self.grid.box_half_width));
        let _ = writeln!(
            o,
            "\n[sigma]\nsupport_radius = {}\nhorizon_T = {}",
            fmt_f64(self.sigma.support_radius),
            fmt_f64(self.sigma.horizon_t)
        );
        let s = &self.solver;
        let save = match &s.save_times {
            SaveTimes::Uniform(k) => format!("uniform:{k}"),
            SaveTimes::List(t) => fl(t),
        };
        let guard = s.boundary_guard_tol.map_or("none".to_string(), fmt_f64);
        let _ = writeln!(
            o,
            "\n[solver]\nnu = {}\ndt = {}\nscheme = {}\nsave_times = {save}\nboundary_guard_tol = {guard}",
            fmt_f64(s.nu),
            fmt_f64(s.dt),
            s.scheme.as_str()
        );
        let m = &self.measure;
        let weights = match &m.weights {
            Weights::Uniform => "uniform".to_string(),
            Weights::List(w) => fl(w),
        };
        let profiles = m
            .profiles
            .iter()
            .map(|a| a.iter().map(render_profile).collect::<Vec<_>>().join(";"))
            .collect::<Vec<_>>()
            .join("|");
        let _ = writeln!(
            o,
            "\n[measure]\nfamily = {}\nclass = {}\nn_atoms = {}\nmaster_seed = {}\nweights = {weights}\n\
profiles = {profiles}\namplitude_range = {},{}\nplacement_range = {}",
            m.family.as_str(),
            m.class,
            m.n_atoms,
            m.master_seed,
            fmt_f64(m.amplitude_range.0),
            fmt_f64(m.amplitude_range.1),
            fmt_f64(m.placement_range)
        );
        let f = &self.verify;
        let laws = f
            .laws
            .iter()
            .map(|l| match l {
                Law::Energy => "energy",
                Law::Vorticity => "vorticity",
                Law::FoiasLiouville => "foias_liouville",
            })
            .collect::<Vec<_>>()
            .join(",");
        let tests = f
            .test_fields
            .iter()
            .map(|t| format!("gauss:{},{},{}", fmt_f64(t.center.0), fmt_f64(t.center.1), fmt_f64(t.width)))
            .collect::<Vec<_>>()
            .join(";");
        let phi = f
            .phi
            .iter()
            .map(|p| match p {
                PhiKind::FirstMoment => "first_moment",
                PhiKind::SecondMoment => "second_moment",
            })
            .collect::<Vec<_>>()
            .join(",");
        let strides = f.fl_strides.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(
            o,
            "\n[verify]\nlaws = {laws}\nq = {}\ntest_fields = {tests}\nphi = {phi}\ncutoff_radius = {}\n\
fl_tolerance = {}\nfl_strides = {strides}\nfl_order_factor = {}\nnu_schedule = {}\nepsilon_schedule = {}\n\
checkpoints = {}\nn_slices = {}\nslice_seed = {}\ninviscid_ratio_max = {}\ncauchy_factor = {}",
            fl(&f.q),
            fmt_f64(f.cutoff_radius),
            fmt_f64(f.fl_tolerance),
            fmt_f64(f.fl_order_factor),
            fl(&f.nu_schedule),
            fl(&f.epsilon_schedule),
            fl(&f.checkpoints),
            f.n_slices,
            f.slice_seed,
            fmt_f64(f.inviscid_ratio_max),
            fmt_f64(f.cauchy_factor)
        );
        let retention = match self.io.snapshot_retention {
            Retention::All => "all",
            Retention::Final => "final",
            Retention::None => "none",
        };
        let _ = writeln!(
            o,
            "\n[io]\noutput_dir = {}\nsnapshot_retention = {retention}",
            self.io.output_dir
        );
        o
    }
}

/// Shortest representation that parses back to the same double.
fn fmt_f64(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".into()
    } else {
        format!("{x:?}")
    }
}

fn render_profile(p: &Profile) -> String {
    match *p {
        Profile::Gaussian { amplitude, center, width } => format!(
            "gaussian:{},{},{},{}",
            fmt_f64(amplitude),
            fmt_f64(center.0),
            fmt_f64(center.1),
            fmt_f64(width)
        ),
        Profile::Patch { amplitude, center, radius } => format!(
            "patch:{},{},{},{}",
            fmt_f64(amplitude),
            fmt_f64(center.0),
            fmt_f64(center.1),
            fmt_f64(radius)
        ),
        Profile::Sheet { strength, center, half_length, angle } => format!(
            "sheet:{},{},{},{},{}",
            fmt_f64(strength),
            fmt_f64(center.0),
            fmt_f64(center.1),
            fmt_f64(half_length),
            fmt_f64(angle)
        ),
        Profile::Mode { amplitude, wavevector, .. } => format!(
            "sine:{},{},{}",
            fmt_f64(amplitude),
            fmt_f64(wavevector.0),
            fmt_f64(wavevector.1)
        ),
    }
}
