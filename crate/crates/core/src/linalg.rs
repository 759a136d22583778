//! Dense complex kernels: multiplication, matrix exponential, matrix sign,
//! matrix square root, and spectral helpers.
//!
//! Everything operates on column-major `DMatrix<Complex64>` at dimensions up
//! to ~1024, where dense direct methods beat anything iterative.  The
//! multiply routes the four real block products through `matrixmultiply`'s
//! SIMD dgemm, which is where essentially all the flops of the sign/expm
//! iterations are spent.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::{CMat, CVec, C64};

/// Complex matrix product via four real dgemm calls.
///
/// Splits operands into real and imaginary planes and computes
/// `Cr = Ar·Br − Ai·Bi`, `Ci = Ar·Bi + Ai·Br`.  This keeps the classical
/// error bound of the naive product (no 3M cancellation) while running on
/// the blocked SIMD kernel.
pub fn mul(a: &CMat, b: &CMat) -> CMat {
    let (m, k) = a.shape();
    let (k2, n) = b.shape();
    assert_eq!(k, k2, "inner dimensions must agree: {k} vs {k2}");
    if m == 0 || n == 0 || k == 0 {
        return CMat::zeros(m, n);
    }
    // Small products: the packing overhead is not worth it.
    if m * k * n < 32_768 {
        return a * b;
    }

    let split = |x: &CMat| -> (Vec<f64>, Vec<f64>) {
        let s = x.as_slice();
        let mut re = Vec::with_capacity(s.len());
        let mut im = Vec::with_capacity(s.len());
        for z in s {
            re.push(z.re);
            im.push(z.im);
        }
        (re, im)
    };
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let mut cr = vec![0.0f64; m * n];
    let mut ci = vec![0.0f64; m * n];

    // Column-major strides: row stride 1, column stride = number of rows.
    let gemm = |alpha: f64, x: &[f64], y: &[f64], beta: f64, z: &mut [f64]| unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            x.as_ptr(),
            1,
            m as isize,
            y.as_ptr(),
            1,
            k as isize,
            beta,
            z.as_mut_ptr(),
            1,
            m as isize,
        );
    };
    gemm(1.0, &ar, &br, 0.0, &mut cr);
    gemm(-1.0, &ai, &bi, 1.0, &mut cr);
    gemm(1.0, &ar, &bi, 0.0, &mut ci);
    gemm(1.0, &ai, &br, 1.0, &mut ci);

    let data: Vec<C64> = cr
        .iter()
        .zip(ci.iter())
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    CMat::from_vec(m, n, data)
}

/// `a.adjoint() * b` through the fast multiply.
pub fn adjoint_mul(a: &CMat, b: &CMat) -> CMat {
    mul(&a.adjoint(), b)
}

/// Relative Frobenius distance `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`.
pub fn rel_frobenius(a: &CMat, b: &CMat) -> f64 {
    let denom = a.norm().max(b.norm());
    if denom == 0.0 {
        0.0
    } else {
        (a - b).norm() / denom
    }
}

fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

fn one_norm(a: &CMat) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Matrix exponential by scaling-and-squaring with the Padé(13,13)
/// approximant (Higham 2005).  Valid for any square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    let d = a.nrows();
    assert_eq!(d, a.ncols(), "expm requires a square matrix");
    if d == 0 {
        return CMat::zeros(0, 0);
    }

    const THETA_13: f64 = 5.371_920_351_148_152;
    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(s as i32), 0.0);
    let x = a * scale;

    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let c = |i: usize| Complex64::new(B[i], 0.0);

    let x2 = mul(&x, &x);
    let x4 = mul(&x2, &x2);
    let x6 = mul(&x2, &x4);
    let eye = identity(d);

    let w1 = &x6 * c(13) + &x4 * c(11) + &x2 * c(9);
    let w2 = &x6 * c(7) + &x4 * c(5) + &x2 * c(3) + &eye * c(1);
    let u = mul(&x, &(mul(&x6, &w1) + w2));

    let z1 = &x6 * c(12) + &x4 * c(10) + &x2 * c(8);
    let v = mul(&x6, &z1) + &x6 * c(6) + &x4 * c(4) + &x2 * c(2) + &eye * c(0);

    let denom = &v - &u;
    let numer = &v + &u;
    let lu = denom.lu();
    let mut r = lu
        .solve(&numer)
        .expect("Padé denominator is singular; input norm out of range");

    for _ in 0..s {
        r = mul(&r, &r);
    }
    r
}

/// `expm(a) * f` without forming intermediate squarings on vectors when the
/// matrix exponential is already needed densely; convenience wrapper.
pub fn expm_apply(a: &CMat, f: &CVec) -> CVec {
    &expm(a) * f
}

/// Sum of `ln |u_ii|` from an LU factorization: `ln |det|` without overflow.
fn log_abs_det(lu: &nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let u = lu.u();
    let mut acc = 0.0f64;
    for i in 0..u.nrows().min(u.ncols()) {
        acc += u[(i, i)].norm().ln();
    }
    acc
}

/// Outcome of the Newton sign iteration.
pub struct SignOutcome {
    /// The computed sign matrix.
    pub sign: CMat,
    /// Number of Newton steps taken.
    pub iterations: usize,
    /// Final relative step size `‖S_{k+1} − S_k‖_F / ‖S_{k+1}‖_F`.
    pub residual: f64,
}

/// Matrix sign function by the globally convergent Newton iteration
/// `S ← (μS + (μS)⁻¹)/2` with determinantal scaling `μ = |det S|^{−1/d}`.
///
/// The input must have no eigenvalues on the imaginary axis; spectrum
/// touching iℝ manifests as a singular or exploding iterate and is
/// reported as [`LabError::NoGap`].
pub fn sign_newton(a: &CMat) -> Result<SignOutcome> {
    let d = a.nrows();
    assert_eq!(d, a.ncols(), "sign_newton requires a square matrix");
    if d == 0 {
        return Ok(SignOutcome {
            sign: CMat::zeros(0, 0),
            iterations: 0,
            residual: 0.0,
        });
    }

    let initial_norm = a.norm();
    if initial_norm == 0.0 {
        return Err(LabError::NoGap("zero matrix has no sign".into()));
    }

    let mut s = a.clone();
    let mut residual = f64::INFINITY;
    const MAX_ITER: usize = 60;
    for k in 0..MAX_ITER {
        let lu = s.clone().lu();
        let logdet = log_abs_det(&lu);
        if !logdet.is_finite() {
            return Err(LabError::NoGap(format!(
                "singular iterate at step {k}: |det| underflow"
            )));
        }
        // Scaling accelerates the initial phase but perturbs the quadratic
        // tail; switch it off once the iteration is nearly stationary.
        let mu = if residual > 1e-2 {
            (-logdet / d as f64).exp().clamp(1e-8, 1e8)
        } else {
            1.0
        };
        let inv = match lu.try_inverse() {
            Some(inv) => inv,
            None => {
                return Err(LabError::NoGap(format!(
                    "iterate became singular at step {k}"
                )))
            }
        };
        let mu_c = Complex64::new(mu, 0.0);
        let next = (&s * mu_c + inv / mu_c) * Complex64::new(0.5, 0.0);
        let step = (&next - &s).norm();
        let scale = next.norm();
        if !scale.is_finite() || scale > 1e12 * initial_norm.max(1.0) {
            return Err(LabError::NoGap(format!(
                "iteration diverged at step {k}: spectrum too close to the imaginary axis"
            )));
        }
        residual = step / scale;
        s = next;
        if residual <= 1e-12 {
            // Sanity: S² must be the identity, otherwise the fixed point is spurious.
            let defect = (&mul(&s, &s) - identity(d)).norm() / (d as f64).sqrt();
            if defect > 1e-6 {
                return Err(LabError::NoGap(format!(
                    "converged to a non-involution: ‖S²−I‖ = {defect:.3e}"
                )));
            }
            return Ok(SignOutcome {
                sign: s,
                iterations: k + 1,
                residual,
            });
        }
    }
    Err(LabError::NotConverged {
        iterations: MAX_ITER,
        residual,
    })
}

/// Principal matrix square root by the Denman–Beavers iteration with
/// determinantal scaling.  Requires the spectrum to avoid `(−∞, 0]`.
pub fn sqrtm(a: &CMat) -> Result<CMat> {
    let d = a.nrows();
    assert_eq!(d, a.ncols(), "sqrtm requires a square matrix");
    let mut y = a.clone();
    let mut z = identity(d);
    const MAX_ITER: usize = 60;
    let mut residual = f64::INFINITY;
    for k in 0..MAX_ITER {
        let lu_y = y.clone().lu();
        let lu_z = z.clone().lu();
        let logdet = log_abs_det(&lu_y) + log_abs_det(&lu_z);
        let mu = if residual > 1e-2 {
            (-logdet / (2.0 * d as f64)).exp().clamp(1e-8, 1e8)
        } else {
            1.0
        };
        let inv_y = lu_y
            .try_inverse()
            .ok_or_else(|| LabError::Singular {
                context: format!("sqrt iteration Y at step {k}"),
                sigma_min: 0.0,
            })?;
        let inv_z = lu_z
            .try_inverse()
            .ok_or_else(|| LabError::Singular {
                context: format!("sqrt iteration Z at step {k}"),
                sigma_min: 0.0,
            })?;
        let mu_c = Complex64::new(mu, 0.0);
        let half = Complex64::new(0.5, 0.0);
        let y_next = (&y * mu_c + inv_z / mu_c) * half;
        let z_next = (&z * mu_c + inv_y / mu_c) * half;
        let step = (&y_next - &y).norm();
        residual = step / y_next.norm().max(1e-300);
        y = y_next;
        z = z_next;
        if residual <= 1e-13 {
            break;
        }
    }
    let defect = rel_frobenius(&mul(&y, &y), a);
    if defect > 1e-8 {
        return Err(LabError::NotConverged {
            iterations: MAX_ITER,
            residual: defect,
        });
    }
    Ok(y)
}

/// Eigenvalues of a complex matrix together with their conjugates.
///
/// The complex d×d matrix `M = X + iY` is embedded as the real 2d×2d matrix
/// `[[X, −Y], [Y, X]]`, whose spectrum is `spec(M) ∪ conj(spec(M))`; the
/// real Schur form then delivers that mirrored multiset.  Quantities that
/// are conjugation-invariant (min/max of real parts, |imaginary| parts,
/// symmetry about zero) read off directly.
pub fn eigenvalues_mirrored(a: &CMat) -> Vec<C64> {
    let d = a.nrows();
    assert_eq!(d, a.ncols());
    if d == 0 {
        return Vec::new();
    }
    let mut emb = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for j in 0..d {
        for i in 0..d {
            let z = a[(i, j)];
            emb[(i, j)] = z.re;
            emb[(i + d, j + d)] = z.re;
            emb[(i, j + d)] = -z.im;
            emb[(i + d, j)] = z.im;
        }
    }
    let eig = emb.complex_eigenvalues();
    eig.iter().map(|z| Complex64::new(z.re, z.im)).collect()
}

/// Smallest real part over the mirrored spectrum (conjugation-invariant,
/// hence equal to `min Re spec(M)`).
pub fn min_re_eigenvalue(a: &CMat) -> f64 {
    eigenvalues_mirrored(a)
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of a Hermitian matrix (ascending order not guaranteed).
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let sym = nalgebra::SymmetricEigen::new(a.clone());
    sym.eigenvalues.iter().copied().collect()
}

/// Smallest eigenvalue of the Hermitian part `(A + A*)/2`.
pub fn min_eig_hermitian_part(a: &CMat) -> f64 {
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    hermitian_eigenvalues(&herm)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Singular values via the Hermitian eigendecomposition of `A*A`
/// (robust for complex input; `A` may be rectangular).
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let gram = adjoint_mul(a, a);
    let mut vals: Vec<f64> = hermitian_eigenvalues(&gram)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Smallest singular value.
pub fn sigma_min(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Largest singular value (the operator 2-norm).
pub fn sigma_max(a: &CMat) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Orthonormal basis for the column space of `p`, truncated to `rank`
/// columns, via the column-pivoted QR factorization.
pub fn orthonormal_range(p: &CMat, rank: usize) -> CMat {
    let qr = p.clone().col_piv_qr();
    let q = qr.q();
    q.columns(0, rank).into_owned()
}

/// Thin QR: orthonormalize the columns of a full-column-rank matrix.
pub fn orthonormal_columns(a: &CMat) -> CMat {
    let qr = a.clone().qr();
    let q = qr.q();
    q.columns(0, a.ncols().min(q.ncols())).into_owned()
}

/// Solve `A x = b` for a square A by LU with partial pivoting.
pub fn lu_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    a.clone().lu().solve(b).ok_or_else(|| LabError::Singular {
        context: "lu_solve".into(),
        sigma_min: 0.0,
    })
}

/// Inverse by LU; errors on singular input.
pub fn lu_inverse(a: &CMat) -> Result<CMat> {
    a.clone().lu().try_inverse().ok_or_else(|| LabError::Singular {
        context: "lu_inverse".into(),
        sigma_min: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn random_cmat(rng: &mut ChaCha20Rng, m: usize, n: usize) -> CMat {
        CMat::from_fn(m, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn fast_mul_matches_naive() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for (m, k, n) in [(3, 4, 5), (40, 40, 40), (65, 33, 47), (120, 120, 120)] {
            let a = random_cmat(&mut rng, m, k);
            let b = random_cmat(&mut rng, k, n);
            let naive = &a * &b;
            let fast = mul(&a, &b);
            assert!(rel_frobenius(&naive, &fast) < 1e-13);
        }
    }

    #[test]
    fn expm_of_diagonal() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(0.3, 0.0),
            Complex64::new(-1.2, 0.5),
            Complex64::new(2.0, -3.0),
        ]));
        let e = expm(&d);
        for i in 0..3 {
            let expected = d[(i, i)].exp();
            assert!((e[(i, i)] - expected).norm() < 1e-13 * expected.norm());
        }
    }

    #[test]
    fn expm_exponential_law() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let a = random_cmat(&mut rng, 12, 12);
        let once = expm(&a);
        let twice = expm(&(&a * Complex64::new(2.0, 0.0)));
        assert!(rel_frobenius(&mul(&once, &once), &twice) < 1e-11);
    }

    #[test]
    fn expm_rotation_block() {
        // exp of [[0, −θ],[θ, 0]] is the rotation by θ.
        let theta = 0.7f64;
        let a = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-theta, 0.0),
                Complex64::new(theta, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)].re, theta.cos(), epsilon = 1e-14);
        assert_relative_eq!(e[(1, 0)].re, theta.sin(), epsilon = 1e-14);
    }

    #[test]
    fn sign_of_diagonal() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ]));
        let out = sign_newton(&d).unwrap();
        let expected = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]));
        assert!(rel_frobenius(&out.sign, &expected) < 1e-10);
    }

    #[test]
    fn sign_matches_constructed_spectral_projector() {
        // T = V Λ V⁻¹ with known half-plane membership; the sign must agree
        // with the projector difference assembled from the construction.
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let d = 14;
        let lambdas: Vec<C64> = (0..d)
            .map(|_| {
                let re = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                Complex64::new(re, rng.gen_range(-1.0..1.0))
            })
            .collect();
        let v = random_cmat(&mut rng, d, d) + identity(d) * Complex64::new(3.0, 0.0);
        let v_inv = lu_inverse(&v).unwrap();
        let lam = CMat::from_diagonal(&CVec::from_vec(lambdas.clone()));
        let t = mul(&mul(&v, &lam), &v_inv);
        let sgn = CMat::from_diagonal(&CVec::from_vec(
            lambdas
                .iter()
                .map(|l| Complex64::new(l.re.signum(), 0.0))
                .collect(),
        ));
        let oracle = mul(&mul(&v, &sgn), &v_inv);
        let out = sign_newton(&t).unwrap();
        assert!(rel_frobenius(&out.sign, &oracle) < 1e-8);
        // sign(−T) = −sign(T)
        let neg = sign_newton(&(-&t)).unwrap();
        assert!(rel_frobenius(&neg.sign, &(-&out.sign)) < 1e-8);
        // commutation with T
        assert!(rel_frobenius(&mul(&out.sign, &t), &mul(&t, &out.sign)) < 1e-8);
    }

    #[test]
    fn sign_rejects_imaginary_spectrum() {
        // Purely imaginary eigenvalues: no sign exists.
        let t = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(sign_newton(&t).is_err());
    }

    #[test]
    fn sqrtm_squares_back() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let b = random_cmat(&mut rng, 10, 10);
        // Accretive shift keeps the spectrum away from (−∞, 0].
        let a = mul(&b, &b.adjoint()) + identity(10) * Complex64::new(0.5, 0.0);
        let r = sqrtm(&a).unwrap();
        assert!(rel_frobenius(&mul(&r, &r), &a) < 1e-11);
    }

    #[test]
    fn mirrored_eigenvalues_of_diagonal() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.25),
        ]));
        let mut eig = eigenvalues_mirrored(&d);
        eig.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        assert_eq!(eig.len(), 4);
        // spec ∪ conj(spec)
        assert!((eig[0] - Complex64::new(-0.5, -0.25)).norm() < 1e-10);
        assert!((eig[1] - Complex64::new(-0.5, 0.25)).norm() < 1e-10);
        assert!((eig[2] - Complex64::new(1.0, -2.0)).norm() < 1e-10);
        assert!((eig[3] - Complex64::new(1.0, 2.0)).norm() < 1e-10);
        assert_relative_eq!(min_re_eigenvalue(&d), -0.5, epsilon = 1e-10);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(0.0, 3.0),
            Complex64::new(-0.5, 0.0),
        ]));
        let sv = singular_values(&d);
        assert_relative_eq!(sv[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(sv[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn orthonormal_range_of_projector() {
        // Rank-2 orthogonal projector in C^4.
        let mut p = CMat::zeros(4, 4);
        p[(0, 0)] = Complex64::new(1.0, 0.0);
        p[(2, 2)] = Complex64::new(1.0, 0.0);
        let q = orthonormal_range(&p, 2);
        assert_eq!(q.ncols(), 2);
        let gram = adjoint_mul(&q, &q);
        assert!(rel_frobenius(&gram, &identity(2)) < 1e-12);
        // Columns stay inside the range of p.
        assert!(rel_frobenius(&mul(&p, &q), &q) < 1e-12);
    }
}
