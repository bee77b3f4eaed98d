use std::fmt::Write;

use super::family::{ClassTag, FamilyKind};

/// One ensemble member as recorded in the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestMember {
    pub weight: f64,
    pub seed: u64,
    /// `(time, path)` of every stored snapshot.
    pub snapshots: Vec<(f64, String)>,
}

/// Renders the plain-text manifest: `[section]` headers and `KEY=VALUE` lines.
pub fn write_manifest(
    kind: FamilyKind,
    class: ClassTag,
    master_seed: u64,
    members: &[ManifestMember],
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[family]");
    let _ = writeln!(out, "kind={}", kind.as_str());
    let _ = writeln!(out, "class={class}");
    if let Some(eps) = class.mollification() {
        let _ = writeln!(out, "epsilon={eps:.16e}");
    }
    let _ = writeln!(out, "\n[measure]");
    let _ = writeln!(out, "master_seed={master_seed}");
    let _ = writeln!(out, "n_atoms={}", members.len());
    for (j, m) in members.iter().enumerate() {
        let _ = writeln!(out, "\n[member.{j}]");
        let _ = writeln!(out, "weight={:.16e}", m.weight);
        let _ = writeln!(out, "seed={}", m.seed);
        for (k, (t, path)) in m.snapshots.iter().enumerate() {
            let _ = writeln!(out, "snapshot.{k}.time={t:.16e}");
            let _ = writeln!(out, "snapshot.{k}.path={path}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let text = write_manifest(
            FamilyKind::RandomAmplitudeBlobs,
            ClassTag::L1D(0.25),
            42,
            &[ManifestMember {
                weight: 1.0,
                seed: 7,
                snapshots: vec![(0.0, "m0_t0.eust".into())],
            }],
        );
        let expected = "[family]\nkind=random_amplitude_blobs\nclass=l1_D_mollified(0.25)\n\
epsilon=2.5000000000000000e-1\n\n[measure]\nmaster_seed=42\nn_atoms=1\n\n[member.0]\n\
weight=1.0000000000000000e0\nseed=7\nsnapshot.0.time=0.0000000000000000e0\nsnapshot.0.path=m0_t0.eust\n";
        assert_eq!(text, expected);
    }
}
