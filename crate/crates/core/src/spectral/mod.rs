//! Periodic fields, spectral transforms, Biot-Savart inversion and norms.

mod fft;
mod field;
mod grid;
mod ops;

pub use fft::{with_fft, Fft2};
pub use field::{ScalarField, VectorField};
pub use grid::Grid;
pub use ops::{
    biot_savart, curl, dealias, divergence, from_spectrum, gradient, laplacian, laplacian_invert,
    local_l2_norm, lp_norm, mollify, neg_sobolev_proxy_norm, scaled_mollifier, spectral_energy,
    spectral_norm_2x2, spectral_sup_norm, spectrum, standard_mollifier, velocity_gradient,
};
