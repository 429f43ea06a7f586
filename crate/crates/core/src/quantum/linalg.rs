//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type Ket = DVector<Complex64>;

/// Absolute tolerance for equalities.
pub const EQ_TOL: f64 = 1e-12;
/// Floor for eigenvalues of a positive semidefinite matrix.
pub const PSD_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Row-major square matrix from real entries.
pub fn real_matrix(n: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(n, n, entries.iter().map(|&x| r(x)))
}

pub fn ket(entries: &[Complex64]) -> Ket {
    Ket::from_column_slice(entries)
}

/// `|i⟩` in dimension `dim`.
pub fn basis_ket(dim: usize, i: usize) -> Ket {
    let mut k = Ket::zeros(dim);
    k[i] = r(1.0);
    k
}

pub fn outer(a: &Ket, b: &Ket) -> CMatrix {
    a * b.adjoint()
}

pub fn projector(k: &Ket) -> CMatrix {
    outer(k, k)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_ket(a: &Ket, b: &Ket) -> Ket {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs_diff(a, b) <= tol
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && approx_eq(&(u.adjoint() * u), &identity(u.nrows()), tol)
}

/// Real eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()) * r(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        CMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let d = CMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| r(f(v)))));
    &vectors * d * vectors.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// Largest `|Im|` over all entries.
pub fn max_imag(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Partial trace keeping the factors listed in `keep` (in ascending order).
/// Factor 0 is the most significant in the Kronecker ordering.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "matrix does not match factor dims");
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kept: usize = kept_dims.iter().product();
    let mut out = CMatrix::zeros(kept, kept);

    let digits = |mut idx: usize| {
        let mut d = vec![0; dims.len()];
        for f in (0..dims.len()).rev() {
            d[f] = idx % dims[f];
            idx /= dims[f];
        }
        d
    };
    let kept_index = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);

    for i in 0..total {
        let di = digits(i);
        for j in 0..total {
            let dj = digits(j);
            let traced_equal = (0..dims.len()).filter(|f| !keep.contains(f)).all(|f| di[f] == dj[f]);
            if traced_equal {
                out[(kept_index(&di), kept_index(&dj))] += m[(i, j)];
            }
        }
    }
    out
}

/// Embeds `op`, acting on the factors listed in `targets`, into the space
/// with factor dimensions `dims`. Factor 0 is the most significant;
/// `targets[0]` is the most significant factor of `op`.
pub fn embed(op: &CMatrix, dims: &[usize], targets: &[usize]) -> CMatrix {
    let sub_dim: usize = targets.iter().map(|&t| dims[t]).product();
    assert_eq!(op.nrows(), sub_dim, "operator size does not match targets");
    let total: usize = dims.iter().product();
    let digits = |mut idx: usize| {
        let mut d = vec![0; dims.len()];
        for f in (0..dims.len()).rev() {
            d[f] = idx % dims[f];
            idx /= dims[f];
        }
        d
    };
    let all: Vec<Vec<usize>> = (0..total).map(digits).collect();
    let sub = |d: &[usize]| targets.iter().fold(0, |acc, &t| acc * dims[t] + d[t]);
    let rest: Vec<usize> = (0..dims.len()).filter(|f| !targets.contains(f)).collect();
    let mut out = CMatrix::zeros(total, total);
    for (i, di) in all.iter().enumerate() {
        for (j, dj) in all.iter().enumerate() {
            if rest.iter().all(|&f| di[f] == dj[f]) {
                out[(i, j)] = op[(sub(di), sub(dj))];
            }
        }
    }
    out
}

/// [`embed`] specialised to qubits.
pub fn embed_qubits(op: &CMatrix, targets: &[usize], n: usize) -> CMatrix {
    embed(op, &vec![2; n], targets)
}

/// Whether the kets are pairwise orthogonal unit vectors.
pub fn is_orthonormal(kets: &[Ket], tol: f64) -> bool {
    kets.iter().enumerate().all(|(i, a)| {
        kets.iter().enumerate().all(|(j, b)| {
            let ip = a.dotc(b);
            let expected = if i == j { 1.0 } else { 0.0 };
            (ip - r(expected)).norm() <= tol
        })
    })
}

/// Extends an orthonormal list to a basis of its space with Gram-Schmidt
/// over the computational basis. Real inputs give a real completion.
pub fn complete_basis(kets: &[Ket]) -> Vec<Ket> {
    let dim = kets.first().map(|k| k.len()).unwrap_or(0);
    let mut basis = kets.to_vec();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = basis_ket(dim, i);
        for b in &basis {
            let ip = b.dotc(&v);
            v -= b * ip;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / r(norm));
        }
    }
    basis
}

/// Multiplies by the phase that makes the first non-negligible entry real
/// and positive, so that matrices equal up to global phase coincide.
pub fn fix_phase(m: &CMatrix) -> CMatrix {
    match m.iter().find(|z| z.norm() > 1e-6) {
        Some(z) => m * (z.conj() / z.norm()),
        None => m.clone(),
    }
}

/// Hashable fingerprint of a matrix up to global phase.
pub fn phase_key(m: &CMatrix) -> Vec<i64> {
    fix_phase(m).iter().flat_map(|z| [(z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64]).collect()
}

/// Permutation matrix that moves qubit `i` to position `j` and vice versa.
pub fn swap_positions(i: usize, j: usize, n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    let (bi, bj) = (n - 1 - i, n - 1 - j);
    for idx in 0..dim {
        let (a, b) = ((idx >> bi) & 1, (idx >> bj) & 1);
        let swapped = (idx & !(1 << bi) & !(1 << bj)) | (b << bi) | (a << bj);
        out[(swapped, idx)] = r(1.0);
    }
    out
}

/// Haar-random pure state from normalized complex Gaussians.
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
    let v = Ket::from_iterator(
        dim,
        (0..dim).map(|_| c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))),
    );
    let norm = v.norm();
    v / r(norm)
}

/// Full-rank random density matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let m = &g * g.adjoint();
    let t = trace(&m);
    m / t
}

pub mod gates {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn x() -> CMatrix {
        real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn z() -> CMatrix {
        real_matrix(2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[r(0.0), c(0.0, -1.0), c(0.0, 1.0), r(0.0)])
    }

    /// `iY = [[0, 1], [-1, 0]]`, a real rotation.
    pub fn iy() -> CMatrix {
        real_matrix(2, &[0.0, 1.0, -1.0, 0.0])
    }

    pub fn h() -> CMatrix {
        real_matrix(2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
    }

    pub fn s() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), c(0.0, 1.0)])
    }

    /// Control on the first qubit, target on the second.
    pub fn cnot() -> CMatrix {
        real_matrix(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
    }

    pub fn swap() -> CMatrix {
        real_matrix(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        )
    }

    pub fn plus() -> Ket {
        ket(&[r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)])
    }

    pub fn minus() -> Ket {
        ket(&[r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)])
    }

    pub fn plus_i() -> Ket {
        ket(&[r(FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)])
    }

    pub fn minus_i() -> Ket {
        ket(&[r(FRAC_1_SQRT_2), c(0.0, -FRAC_1_SQRT_2)])
    }

    /// The four Bell states in the order Φ+, Ψ+, Φ−, Ψ−.
    pub fn bell_states() -> [Ket; 4] {
        let s = FRAC_1_SQRT_2;
        [
            ket(&[r(s), r(0.0), r(0.0), r(s)]),
            ket(&[r(0.0), r(s), r(s), r(0.0)]),
            ket(&[r(s), r(0.0), r(0.0), r(-s)]),
            ket(&[r(0.0), r(s), r(-s), r(0.0)]),
        ]
    }
}
