#![allow(dead_code)]

use pilotcap::{ChannelStats, Matrix, SimRng, SymMatrix};

/// `B·Bᵀ + shift·I` with `B` filled from `entries` (row-major, `n×n`).
pub fn spd_from_entries(n: usize, entries: &[f64], shift: f64) -> SymMatrix {
    let b = Matrix::from_rows(&entries[..n * n].chunks(n).collect::<Vec<_>>()).unwrap();
    let g = b.matmul(&b.transpose()).unwrap();
    let mut sym = g.clone();
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = 0.5 * (g[(i, j)] + g[(j, i)]);
        }
        sym[(i, i)] += shift;
    }
    SymMatrix::new(sym).unwrap()
}

pub fn random_spd(n: usize, rng: &mut SimRng) -> SymMatrix {
    let entries: Vec<f64> = (0..n * n).map(|_| rng.standard_normal()).collect();
    spd_from_entries(n, &entries, 0.1)
}

pub fn random_channel(n: usize, rng: &mut SimRng) -> ChannelStats {
    ChannelStats::new(random_spd(n, rng)).unwrap()
}

pub fn rel_frobenius(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm()
}
