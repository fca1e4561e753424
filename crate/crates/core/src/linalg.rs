//! Dense complex linear algebra helpers shared by the quantum modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    frobenius(&(m - dagger(m)))
}

/// Force exact Hermiticity: `(m + m^dagger)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + dagger(m)) * Complex64::new(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Returns `(values, vectors)` with eigenvectors in the columns.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let se = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vectors.set_column(col, &se.eigenvectors.column(i));
    }
    (values, vectors)
}

/// `exp(-i H t)` for Hermitian `H`, exactly unitary up to eigensolver precision.
pub fn expm_i_hermitian(h: &CMat, t: f64) -> CMat {
    let (vals, vecs) = eigh(h);
    let n = h.nrows();
    let mut d = CMat::zeros(n, n);
    for (i, &e) in vals.iter().enumerate() {
        d[(i, i)] = Complex64::from_polar(1.0, -e * t);
    }
    &vecs * d * dagger(&vecs)
}

/// Eigenphases (in `(-pi, pi]`) and eigenvectors of a unitary matrix.
///
/// A unitary is normal: diagonalize the Hermitian part, then split any
/// degenerate cos-eigenspaces with the anti-Hermitian part.
pub fn unitary_eigenphases(u: &CMat) -> (Vec<f64>, CMat) {
    let n = u.nrows();
    let re = hermitize(&((u + dagger(u)) * Complex64::new(0.5, 0.0)));
    let im = hermitize(&((u - dagger(u)) * Complex64::new(0.0, -0.5)));
    let (revals, revecs) = eigh(&re);
    let mut phases = vec![0.0; n];
    let mut vectors = CMat::zeros(n, n);
    let mut i = 0;
    while i < n {
        // group numerically equal cos-eigenvalues
        let mut j = i + 1;
        while j < n && (revals[j] - revals[i]).abs() < 1e-9 {
            j += 1;
        }
        let block: Vec<usize> = (i..j).collect();
        if block.len() == 1 {
            let v = revecs.column(i).into_owned();
            let s = (dagger(&CMat::from_columns(&[v.clone()])) * &im
                * CMat::from_columns(&[v.clone()]))[(0, 0)]
                .re;
            phases[i] = s.atan2(revals[i]);
            vectors.set_column(i, &v);
        } else {
            // diagonalize sin within the block
            let vb = CMat::from_columns(&block.iter().map(|&k| revecs.column(k).into_owned()).collect::<Vec<_>>());
            let sub = dagger(&vb) * &im * &vb;
            let (svals, svecs) = eigh(&sub);
            let rotated = &vb * svecs;
            for (off, &k) in block.iter().enumerate() {
                phases[k] = svals[off].atan2(revals[k]);
                vectors.set_column(k, &rotated.column(off));
            }
        }
        i = j;
    }
    (phases, vectors)
}

/// Seeded random Hermitian matrix (GOE/GUE-like, complex off-diagonals).
pub fn random_hermitian(n: usize, stream: &mut crate::numerics::RandomStream) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(stream.gaussian(), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(stream.gaussian(), stream.gaussian()) / 2.0_f64.sqrt();
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m / Complex64::new((n as f64).sqrt(), 0.0)
}

/// Seeded Haar-ish random unitary by QR of a complex Gaussian matrix.
pub fn random_unitary(n: usize, stream: &mut crate::numerics::RandomStream) -> CMat {
    let mut g = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = Complex64::new(stream.gaussian(), stream.gaussian());
        }
    }
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix the phase convention so the distribution is Haar
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = d / Complex64::new(d.norm(), 0.0);
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Roots of the polynomial `c_0 + c_1 z + ... + c_d z^d` (Durand-Kerner).
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return vec![];
    }
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs
        .iter()
        .map(|&c| Complex64::new(c / lead, 0.0))
        .collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut p = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            p = p * z + c;
        }
        p
    };
    // initial guesses on a non-symmetric circle
    let radius = 1.0
        + monic[..d]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
    let mut roots: Vec<Complex64> = (0..d)
        .map(|k| {
            Complex64::from_polar(
                radius.min(2.0),
                2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    roots
}
