use std::f64::consts::PI;

use eustat_core::radial::VorticityState;
use eustat_core::snapshot::{decode, encode, read_snapshot, write_snapshot};
use eustat_core::spectral::{Grid, ScalarField};
use eustat_core::Error;

const GOLDEN: &[u8] = include_bytes!("data/golden_n16.eust");

/// The state stored in the golden file, rebuilt from exact binary fractions.
fn golden_state() -> VorticityState {
    let n = 16;
    let grid = Grid::new(n, PI).unwrap();
    let values = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + ((i * 5) % 7) as f64 / 8.0)
        })
        .collect();
    VorticityState::new(0.75, ScalarField::new(grid, values).unwrap()).unwrap()
}

#[test]
fn golden_file_decodes_bitwise() {
    let snap = decode(GOLDEN).unwrap();
    assert_eq!(snap.time.to_bits(), 0.5f64.to_bits());
    assert_eq!(snap.nu.to_bits(), 0.001f64.to_bits());
    assert_eq!(snap.state, golden_state());
    assert_eq!(snap.state.grid().box_half_width().to_bits(), PI.to_bits());
}

#[test]
fn golden_file_encodes_bitwise() {
    assert_eq!(encode(&golden_state(), 0.5, 0.001), GOLDEN);
}

#[test]
fn file_roundtrip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.eust");
    write_snapshot(&path, &golden_state(), 0.5, 0.001).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), GOLDEN);
    assert_eq!(read_snapshot(&path).unwrap().state, golden_state());

    let truncated = &GOLDEN[..GOLDEN.len() - 3];
    assert!(matches!(decode(truncated), Err(Error::Format(_))));
    let mut v2 = GOLDEN.to_vec();
    v2[4] = 2;
    match decode(&v2) {
        Err(Error::Format(msg)) => assert_eq!(msg, "unsupported version 2"),
        other => panic!("{other:?}"),
    }
    let mut inf = GOLDEN.to_vec();
    let at = 44 + 8 * 5;
    inf[at..at + 8].copy_from_slice(&f64::INFINITY.to_le_bytes());
    assert!(matches!(decode(&inf), Err(Error::CorruptField(5))));
    assert!(matches!(read_snapshot(&dir.path().join("missing.eust")), Err(Error::Io(_))));
}
