//! Seeded samplers for states, unitaries, channels and effects.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::layout::SystemLayout;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::state::{DensityMatrix, PureState};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, layout: SystemLayout) -> PureState {
    let g = gaussian_matrix(rng, layout.dim(), 1);
    let v = CVector::from_iterator(g.nrows(), g.iter().copied());
    PureState::normalized(v, layout).expect("gaussian vector is nonzero")
}

/// `G G^dag / tr(G G^dag)` with a square Gaussian `G` (full rank).
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, layout: SystemLayout) -> DensityMatrix {
    let d = layout.dim();
    density_matrix_with_rank(rng, layout, d)
}

pub fn density_matrix_with_rank<R: Rng + ?Sized>(rng: &mut R, layout: SystemLayout, rank: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, layout.dim(), rank.max(1));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityMatrix::from_trusted(m * c(1.0 / tr, 0.0), layout)
}

/// Haar-distributed unitary via QR of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    linalg::qr_isometry(&gaussian_matrix(rng, d, d))
}

/// Isometry `rows × cols` (`rows >= cols`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    linalg::qr_isometry(&gaussian_matrix(rng, rows, cols))
}

/// Channel with `n_kraus` Kraus operators cut from a random isometry.
pub fn channel<R: Rng + ?Sized>(
    rng: &mut R,
    input: SystemLayout,
    output: SystemLayout,
    n_kraus: usize,
) -> KrausChannel {
    let (din, dout) = (input.dim(), output.dim());
    let v = isometry(rng, dout * n_kraus, din);
    let kraus = (0..n_kraus).map(|k| v.view((k * dout, 0), (dout, din)).into_owned()).collect();
    KrausChannel::new(kraus, input, output).expect("blocks of an isometry form a Kraus set")
}

/// Effect `0 <= Λ <= 1` with Haar eigenbasis and uniform eigenvalues.
pub fn effect<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let u = unitary(rng, d);
    let vals: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    linalg::hermitize(&(&u * linalg::real_diagonal(&vals) * u.adjoint()))
}

/// Point on the probability simplex (flat Dirichlet).
pub fn distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}
