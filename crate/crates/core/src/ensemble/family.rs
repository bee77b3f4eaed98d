use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radial::{decompose, StationaryField, VorticityState};
use crate::solver::{DEFAULT_GUARD_TOL, GUARD_FRACTION};
use crate::spectral::{lp_norm, mollify, Grid, ScalarField};

use super::measure::DiscreteMeasure;

/// Relative size of `|ω|` on the guard annulus below which a field counts as
/// supported inside the guard.
pub const SUPPORT_TOL: f64 = DEFAULT_GUARD_TOL;

const SIGN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    FixedAtoms,
    RandomAmplitudeBlobs,
    RandomPlacementBlobs,
}

impl FamilyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::FixedAtoms => "fixed_atoms",
            FamilyKind::RandomAmplitudeBlobs => "random_amplitude_blobs",
            FamilyKind::RandomPlacementBlobs => "random_placement_blobs",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fixed_atoms" => Some(FamilyKind::FixedAtoms),
            "random_amplitude_blobs" => Some(FamilyKind::RandomAmplitudeBlobs),
            "random_placement_blobs" => Some(FamilyKind::RandomPlacementBlobs),
            _ => None,
        }
    }
}

/// Initial-data classes. Measure-valued classes carry the mollification radius
/// at which they are represented on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassTag {
    /// `L¹ ∩ L^∞`.
    YudovichA,
    /// `L¹ ∩ L^p`, `p > 1`.
    LpB(f64),
    /// Non-negative compactly supported measure, mollified at `ε`.
    VortexSheetC(f64),
    /// Compactly supported `L¹`, mollified at `ε`.
    L1D(f64),
}

impl ClassTag {
    pub fn mollification(&self) -> Option<f64> {
        match *self {
            ClassTag::VortexSheetC(eps) | ClassTag::L1D(eps) => Some(eps),
            _ => None,
        }
    }

    /// Parses `yudovich_A`, `lp_B(p)`, `vortex_sheet_C_mollified(eps)` and
    /// `l1_D_mollified(eps)`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "yudovich_A" {
            return Some(ClassTag::YudovichA);
        }
        let (name, rest) = s.split_once('(')?;
        let value: f64 = rest.strip_suffix(')')?.trim().parse().ok()?;
        match name {
            "lp_B" if value > 1.0 => Some(ClassTag::LpB(value)),
            "vortex_sheet_C_mollified" if value > 0.0 => Some(ClassTag::VortexSheetC(value)),
            "l1_D_mollified" if value > 0.0 => Some(ClassTag::L1D(value)),
            _ => None,
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::YudovichA => write!(f, "yudovich_A"),
            ClassTag::LpB(p) => write!(f, "lp_B({p})"),
            ClassTag::VortexSheetC(e) => write!(f, "vortex_sheet_C_mollified({e})"),
            ClassTag::L1D(e) => write!(f, "l1_D_mollified({e})"),
        }
    }
}

/// Building blocks of initial vorticities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `a exp(-|x-c|²/(2w²))`.
    Gaussian { amplitude: f64, center: (f64, f64), width: f64 },
    /// `a 1_{|x-c| < r}`.
    Patch { amplitude: f64, center: (f64, f64), radius: f64 },
    /// Uniform line density `strength` along a segment, deposited onto the
    /// nearest nodes. Only meaningful after mollification.
    Sheet {
        strength: f64,
        center: (f64, f64),
        half_length: f64,
        angle: f64,
    },
    /// Periodic mode `a sin(k·x + phase)`; fills the box, so it never passes
    /// the compact-support class checks.
    Mode { amplitude: f64, wavevector: (f64, f64), phase: f64 },
}

impl Profile {
    fn scaled(&self, s: f64) -> Profile {
        match *self {
            Profile::Gaussian { amplitude, center, width } => Profile::Gaussian {
                amplitude: amplitude * s,
                center,
                width,
            },
            Profile::Patch { amplitude, center, radius } => Profile::Patch {
                amplitude: amplitude * s,
                center,
                radius,
            },
            Profile::Sheet {
                strength,
                center,
                half_length,
                angle,
            } => Profile::Sheet {
                strength: strength * s,
                center,
                half_length,
                angle,
            },
            Profile::Mode { amplitude, wavevector, phase } => Profile::Mode {
                amplitude: amplitude * s,
                wavevector,
                phase,
            },
        }
    }

    fn shifted(&self, (dx, dy): (f64, f64)) -> Profile {
        let mut p = *self;
        match &mut p {
            Profile::Gaussian { center, .. } | Profile::Patch { center, .. } | Profile::Sheet { center, .. } => {
                center.0 += dx;
                center.1 += dy;
            }
            Profile::Mode { wavevector, phase, .. } => {
                *phase -= wavevector.0 * dx + wavevector.1 * dy;
            }
        }
        p
    }
}

/// Samples a sum of profiles on the grid.
pub fn render_profiles(grid: Grid, profiles: &[Profile]) -> ScalarField {
    let mut values = ScalarField::zeros(grid).into_values();
    let n = grid.n();
    let h = grid.spacing();
    let l = grid.box_half_width();
    for p in profiles {
        match *p {
            Profile::Gaussian { amplitude, center, width } => {
                let s2 = 2.0 * width * width;
                for (idx, v) in values.iter_mut().enumerate() {
                    let (x, y) = grid.point(idx);
                    let r2 = (x - center.0).powi(2) + (y - center.1).powi(2);
                    *v += amplitude * (-r2 / s2).exp();
                }
            }
            Profile::Patch { amplitude, center, radius } => {
                for (idx, v) in values.iter_mut().enumerate() {
                    let (x, y) = grid.point(idx);
                    if (x - center.0).powi(2) + (y - center.1).powi(2) < radius * radius {
                        *v += amplitude;
                    }
                }
            }
            Profile::Sheet {
                strength,
                center,
                half_length,
                angle,
            } => {
                let samples = ((8.0 * half_length / h).ceil() as usize).max(1);
                let ds = 2.0 * half_length / samples as f64;
                let (c, s) = (angle.cos(), angle.sin());
                for k in 0..samples {
                    let t = -half_length + (k as f64 + 0.5) * ds;
                    let (x, y) = (center.0 + t * c, center.1 + t * s);
                    let i = (((x + l) / h).round() as i64).rem_euclid(n as i64) as usize;
                    let j = (((y + l) / h).round() as i64).rem_euclid(n as i64) as usize;
                    values[i * n + j] += strength * ds / (h * h);
                }
            }
            Profile::Mode { amplitude, wavevector, phase } => {
                for (idx, v) in values.iter_mut().enumerate() {
                    let (x, y) = grid.point(idx);
                    *v += amplitude * (wavevector.0 * x + wavevector.1 * y + phase).sin();
                }
            }
        }
    }
    ScalarField::new(grid, values).expect("finite profile values")
}

/// A parametrised law on initial states.
#[derive(Debug, Clone)]
pub struct InitialFamily {
    pub kind: FamilyKind,
    pub class: ClassTag,
    /// Profiles of one atom before randomisation.
    pub base: Vec<Profile>,
    /// Amplitude factor range for `random_amplitude_blobs`.
    pub amplitude_range: (f64, f64),
    /// Half-width of the uniform centre shift for `random_placement_blobs`.
    pub placement_range: f64,
    /// Candidate atoms for `fixed_atoms`, as total vorticities.
    pub fixed: Vec<ScalarField>,
}

impl InitialFamily {
    pub fn random_amplitude(class: ClassTag, base: Vec<Profile>, range: (f64, f64)) -> Self {
        Self {
            kind: FamilyKind::RandomAmplitudeBlobs,
            class,
            base,
            amplitude_range: range,
            placement_range: 0.0,
            fixed: Vec::new(),
        }
    }

    pub fn random_placement(class: ClassTag, base: Vec<Profile>, range: f64) -> Self {
        Self {
            kind: FamilyKind::RandomPlacementBlobs,
            class,
            base,
            amplitude_range: (1.0, 1.0),
            placement_range: range,
            fixed: Vec::new(),
        }
    }

    pub fn fixed_atoms(class: ClassTag, atoms: Vec<ScalarField>) -> Self {
        Self {
            kind: FamilyKind::FixedAtoms,
            class,
            base: Vec::new(),
            amplitude_range: (1.0, 1.0),
            placement_range: 0.0,
            fixed: atoms,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            FamilyKind::FixedAtoms if self.fixed.is_empty() => {
                Err(Error::InvalidArgument("fixed_atoms family has no atoms".into()))
            }
            FamilyKind::RandomAmplitudeBlobs | FamilyKind::RandomPlacementBlobs if self.base.is_empty() => {
                Err(Error::InvalidArgument("blob family has no base profiles".into()))
            }
            FamilyKind::RandomAmplitudeBlobs
                if !(self.amplitude_range.0 <= self.amplitude_range.1 && self.amplitude_range.0.is_finite()) =>
            {
                Err(Error::InvalidArgument(format!(
                    "amplitude range {:?}",
                    self.amplitude_range
                )))
            }
            FamilyKind::RandomPlacementBlobs if !(self.placement_range >= 0.0) => Err(
                Error::InvalidArgument(format!("placement range {}", self.placement_range)),
            ),
            _ => Ok(()),
        }
    }
}

/// Per-atom random draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    pub index: usize,
    pub seed: u64,
    pub amplitude: f64,
    pub offset: (f64, f64),
    pub choice: usize,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of atom `j`, independent of how atoms are scheduled.
pub fn atom_seed(master_seed: u64, j: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(j as u64))
}

fn draw(family: &InitialFamily, index: usize, seed: u64) -> AtomParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = AtomParams {
        index,
        seed,
        amplitude: 1.0,
        offset: (0.0, 0.0),
        choice: 0,
    };
    match family.kind {
        FamilyKind::FixedAtoms => p.choice = rng.gen_range(0..family.fixed.len()),
        FamilyKind::RandomAmplitudeBlobs => {
            let (lo, hi) = family.amplitude_range;
            p.amplitude = if lo < hi { rng.gen_range(lo..hi) } else { lo };
        }
        FamilyKind::RandomPlacementBlobs => {
            let r = family.placement_range;
            if r > 0.0 {
                p.offset = (rng.gen_range(-r..r), rng.gen_range(-r..r));
            }
        }
    }
    p
}

/// The random draws behind [`sample_family`], without building fields.
pub fn sample_parameters(family: &InitialFamily, n: usize, master_seed: u64) -> Result<Vec<AtomParams>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    family.validate()?;
    Ok((0..n).map(|j| draw(family, j, atom_seed(master_seed, j))).collect())
}

fn build_atom(family: &InitialFamily, p: &AtomParams, sigma: &StationaryField) -> Result<VorticityState> {
    let grid = *sigma.grid();
    let raw = match family.kind {
        FamilyKind::FixedAtoms => {
            let f = &family.fixed[p.choice];
            grid.same_as(f.grid())?;
            f.clone()
        }
        _ => {
            let profiles: Vec<Profile> = family
                .base
                .iter()
                .map(|b| b.scaled(p.amplitude).shifted(p.offset))
                .collect();
            render_profiles(grid, &profiles)
        }
    };
    let omega = match family.class.mollification() {
        Some(eps) => mollify(&raw, eps)?,
        None => raw,
    };
    let state = decompose(&omega, sigma)?;
    let report = class_membership(&state, sigma, family.class)?;
    if let Some(reason) = report.failure {
        return Err(Error::ClassViolation {
            index: p.index,
            class: family.class.to_string(),
            reason,
        });
    }
    Ok(state)
}

/// Empirical measure `(1/n) Σ δ_{u_j}` of `n` i.i.d. draws from `family`.
pub fn sample_family(
    family: &InitialFamily,
    sigma: &StationaryField,
    n: usize,
    master_seed: u64,
) -> Result<DiscreteMeasure<VorticityState>> {
    let params = sample_parameters(family, n, master_seed)?;
    let atoms = params
        .par_iter()
        .map(|p| build_atom(family, p, sigma))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::uniform(atoms)
}

/// Grid-level class checks on the total vorticity `m ω_Σ + ω_kin`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub l1: f64,
    pub linf: f64,
    /// `(p, ‖ω‖_{L^p})` when the class names an exponent.
    pub lp: Option<(f64, f64)>,
    pub min: f64,
    /// `max_{guard}|ω| / max|ω|`.
    pub guard_ratio: f64,
    pub support_ok: bool,
    pub nonnegative: bool,
    pub resolved: bool,
    pub class_a: bool,
    pub class_b: bool,
    pub class_c: bool,
    pub class_d: bool,
    /// Why the requested class fails, if it does.
    pub failure: Option<String>,
}

pub fn class_membership(state: &VorticityState, sigma: &StationaryField, tag: ClassTag) -> Result<ClassReport> {
    let omega = state.reconstruct(sigma)?;
    let grid = *omega.grid();
    let l1 = lp_norm(&omega, 1.0)?;
    let linf = omega.max_abs();
    let lp = match tag {
        ClassTag::LpB(p) => Some((p, lp_norm(&omega, p)?)),
        _ => None,
    };
    let min = omega.min();
    let guard_max = omega
        .values()
        .iter()
        .enumerate()
        .filter(|(idx, _)| grid.sup_radius_fraction(*idx) >= GUARD_FRACTION)
        .fold(0.0_f64, |m, (_, v)| m.max(v.abs()));
    let guard_ratio = if linf > 0.0 { guard_max / linf } else { 0.0 };
    let support_ok = guard_ratio <= SUPPORT_TOL;
    let nonnegative = min >= -SIGN_TOL * linf.max(1.0);
    let finite = l1.is_finite() && linf.is_finite() && lp.map_or(true, |(_, v)| v.is_finite());
    let resolved = tag
        .mollification()
        .map_or(true, |eps| eps >= 2.0 * grid.spacing());

    let class_a = finite && support_ok;
    let class_b = class_a;
    let class_c = support_ok && nonnegative && resolved;
    let class_d = support_ok && resolved;

    let failure = if !finite {
        Some("non-finite norm".to_string())
    } else if !support_ok {
        Some(format!("guard ratio {guard_ratio:.3e} exceeds {SUPPORT_TOL:e}"))
    } else if !resolved {
        Some(format!(
            "mollification radius below 2·spacing = {}",
            2.0 * grid.spacing()
        ))
    } else if matches!(tag, ClassTag::VortexSheetC(_)) && !nonnegative {
        Some(format!("negative vorticity, min = {min:e}"))
    } else {
        None
    };

    Ok(ClassReport {
        l1,
        linf,
        lp,
        min,
        guard_ratio,
        support_ok,
        nonnegative,
        resolved,
        class_a,
        class_b,
        class_c,
        class_d,
        failure,
    })
}
