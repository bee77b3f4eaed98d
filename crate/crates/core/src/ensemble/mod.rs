//! Dirac-mixture measures, push-forward ensembles, cylindrical functionals
//! and projected distances between measures.

mod cylindrical;
mod distance;
mod family;
mod manifest;
mod measure;

pub use cylindrical::{
    cylindrical_pairing, eval_cylindrical, test_field_from_streamfunction, CylindricalFunctional,
    Monomial,
};
pub use distance::{
    bl_distance_projected, project_measure, sliced_w1, support_liminf_check, w1_1d, SupportReport,
};
pub use family::{
    atom_seed, class_membership, render_profiles, sample_family, sample_parameters, AtomParams,
    ClassReport, ClassTag, FamilyKind, InitialFamily, Profile, SUPPORT_TOL,
};
pub use manifest::{write_manifest, ManifestMember};
pub use measure::{dirac_mixture, push_forward, DiscreteMeasure, EnsembleTrajectory, WEIGHT_TOL};
