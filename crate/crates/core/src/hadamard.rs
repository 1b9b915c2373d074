//! Complex Hadamard matrices and flat-image witnesses.
//!
//! A complex Hadamard matrix has unimodular entries and pairwise orthogonal
//! columns, so `H / sqrt(n)` is unitary. A flat-image witness for `H` is a
//! unimodular `x` whose image `Hx / sqrt(n)` is again unimodular.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::certify::coordinate_ascent;
use crate::complex::{adjoint, ComplexMatrix, ComplexVector, PhaseVector, C64, MAX_ORDER};
use crate::config::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    Dft,
    F4Param,
    User,
}

#[derive(Debug, Clone)]
pub struct HadamardMatrix {
    matrix: ComplexMatrix,
    family: FamilyTag,
}

impl HadamardMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn user(matrix: ComplexMatrix) -> Self {
        HadamardMatrix {
            matrix,
            family: FamilyTag::User,
        }
    }
}

/// The DFT matrix with entries `exp(2 pi i jk / n)` for 1-based `j`, `k`.
/// Orders 1 through 9.
pub fn dft(n: usize) -> Result<HadamardMatrix> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::domain(format!(
            "dft order must lie in 1..={MAX_ORDER}, got {n}"
        )));
    }
    // Angles come from a mod-n reduced table so each entry is the best
    // floating representation of exp(2 pi i m / n).
    let unit = 2.0 * PI / n as f64;
    let matrix = ComplexMatrix::from_fn(n, |i, j| {
        let m = ((i + 1) * (j + 1)) % n;
        C64::from_polar(1.0, unit * m as f64)
    });
    Ok(HadamardMatrix {
        matrix,
        family: FamilyTag::Dft,
    })
}

/// One-parameter family of order-4 Hadamard matrices; `t = 0` is equivalent
/// to `dft(4)` up to row and column phases.
pub fn f4_family(t: f64) -> Result<HadamardMatrix> {
    if !t.is_finite() {
        return Err(Error::domain("family parameter must be finite"));
    }
    let one = C64::new(1.0, 0.0);
    let neg = C64::new(-1.0, 0.0);
    let ie = C64::from_polar(1.0, t + PI / 2.0);
    let nie = C64::from_polar(1.0, t - PI / 2.0);
    let matrix = ComplexMatrix::new(vec![
        vec![one, one, one, one],
        vec![one, ie, neg, nie],
        vec![one, neg, one, neg],
        vec![one, nie, neg, ie],
    ])?;
    Ok(HadamardMatrix {
        matrix,
        family: FamilyTag::F4Param,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct HadamardReport {
    pub is_hadamard: bool,
    /// Largest deviation of an entry modulus from 1.
    pub entry_defect: f64,
    /// Largest off-diagonal column Gram modulus, relative to the diagonal
    /// value `n`.
    pub gram_defect: f64,
}

/// Checks unimodularity of entries and orthogonality of columns.
pub fn is_hadamard(a: &ComplexMatrix, tol: f64) -> Result<HadamardReport> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let n = a.n();
    let mut entry_defect: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            entry_defect = entry_defect.max((a.entry(i, j).norm() - 1.0).abs());
        }
    }
    let gram = adjoint(a).compose(a)?;
    let mut gram_defect: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                gram_defect = gram_defect.max(gram.entry(i, j).norm());
            }
        }
    }
    gram_defect /= n as f64;
    Ok(HadamardReport {
        is_hadamard: entry_defect <= tol && gram_defect <= tol,
        entry_defect,
        gram_defect,
    })
}

/// Relative flatness defect of `x` under `h`:
/// `max_j | |(Hx)_j| / sqrt(n) - 1 |`.
pub fn flatness_defect(h: &ComplexMatrix, x: &ComplexVector) -> Result<f64> {
    let y = h.apply(x)?;
    let root = (h.n() as f64).sqrt();
    Ok(y
        .iter()
        .map(|z| (z.norm() / root - 1.0).abs())
        .fold(0.0, f64::max))
}

pub(crate) fn quadratic_phase(n: usize, half_step: bool) -> ComplexVector {
    // 0-based coordinates k with phase step tied to k^2; the full step is
    // flat for odd orders, the half step for even orders.
    let factor = if half_step { PI / n as f64 } else { 2.0 * PI / n as f64 };
    ComplexVector::from_fn(n, |k| {
        let m = k * k;
        C64::from_polar(1.0, factor * ((m % (2 * n)) as f64))
    })
}

pub(crate) fn to_phase_vector(x: &ComplexVector) -> PhaseVector {
    let base = x[0].arg();
    let angles = (1..x.dim()).map(|k| x[k].arg() - base).collect();
    PhaseVector::new(angles).expect("angles from finite data")
}

/// Finds a unimodular `x` with `Hx / sqrt(n)` unimodular to defect 1e-6.
///
/// Closed-form quadratic-phase candidates are tried first; otherwise a
/// seeded multi-start descent runs, restarts scored in parallel with ties
/// broken by the lowest restart index. Failure returns the best defect.
pub fn flat_image_witness(h: &HadamardMatrix) -> Result<PhaseVector> {
    flat_image_witness_with(h, 64)
}

pub fn flat_image_witness_with(h: &HadamardMatrix, restarts: usize) -> Result<PhaseVector> {
    let m = h.matrix();
    let n = m.n();

    let mut best: (f64, ComplexVector) = (f64::INFINITY, quadratic_phase(n, false));
    for cand in [quadratic_phase(n, false), quadratic_phase(n, true)] {
        let defect = flatness_defect(m, &cand)?;
        if defect < best.0 {
            best = (defect, cand);
        }
    }

    if best.0 > DEFAULT_TOL && n > 1 {
        // Minimize the smooth residual sum_j (|(Hx)_j|^2 - n)^2 over the
        // free angles, then judge by the exact defect.
        let residual = |angles: &[f64]| -> f64 {
            let x = ComplexVector::from_fn(n, |k| {
                if k == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::from_polar(1.0, angles[k - 1])
                }
            });
            let y = m.apply(&x).expect("matching dimensions");
            -y.iter()
                .map(|z| (z.norm_sqr() - n as f64).powi(2))
                .sum::<f64>()
        };
        let domain: Vec<(f64, f64)> = vec![(-PI, PI); n - 1];
        let seeds: Vec<Vec<f64>> = (0..restarts)
            .map(|r| {
                if r == 0 {
                    to_phase_vector(&best.1).free_angles().to_vec()
                } else {
                    let mut rng = sample::rng(0xF1A7 ^ r as u64);
                    (0..n - 1).map(|_| sample::angle(&mut rng)).collect()
                }
            })
            .collect();
        let polished: Vec<(f64, Vec<f64>)> = seeds
            .par_iter()
            .map(|start| {
                let (angles, _) = coordinate_ascent(&residual, start, &domain, 5);
                let x = PhaseVector::new(angles.clone()).expect("finite angles").realize();
                let defect = flatness_defect(m, &x).expect("matching dimensions");
                (defect, angles)
            })
            .collect();
        for (defect, angles) in polished {
            if defect < best.0 {
                best = (
                    defect,
                    PhaseVector::new(angles).expect("finite angles").realize(),
                );
            }
        }
    }

    if best.0 <= DEFAULT_TOL {
        let witness = to_phase_vector(&best.1);
        // Independent re-evaluation of the realized witness.
        let check = flatness_defect(m, &witness.realize())?;
        if check <= DEFAULT_TOL {
            return Ok(witness);
        }
        return Err(Error::SearchFailed {
            context: format!("flat image witness for order {n} failed re-evaluation"),
            best_defect: check,
        });
    }
    Err(Error::SearchFailed {
        context: format!("no flat image witness found for order {n}"),
        best_defect: best.0,
    })
}
