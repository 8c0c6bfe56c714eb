//! Spectral decomposition of the non-normal update matrix `T(ε)` and
//! everything built on it: closed-form states via geometric sums, the
//! unperturbed limit data, eigenvalue-series fitting, and the asymptotic
//! state expression.
//!
//! `T(ε)` is real but not normal, so eigenprojections are oblique: they are
//! built from right and left eigenvectors as `P = r lᵀ / (lᵀ r)` and are not
//! Hermitian. Branches are identified by continuity from the `ε = 0`
//! spectrum `{−1, 1, 1}` (targets `−1` and `1 ± iε`), never by magnitude
//! sorting, so sweeps in `ε` cannot swap branches.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::reduced::{b_vector, t_matrix, ReducedState, EPS_MAX};

/// Eigenvalue branch of `T(ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The real branch near `−1`.
    Minus1,
    /// The branch near `1` with positive imaginary part, `≈ 1 + iε`.
    Plus1Pos,
    /// The conjugate branch, `≈ 1 − iε`.
    Plus1Neg,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Minus1, Branch::Plus1Pos, Branch::Plus1Neg];

    fn index(self) -> usize {
        match self {
            Branch::Minus1 => 0,
            Branch::Plus1Pos => 1,
            Branch::Plus1Neg => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Minus1 => "minus1",
            Branch::Plus1Pos => "plus1_pos",
            Branch::Plus1Neg => "plus1_neg",
        }
    }
}

/// Eigenvalues and oblique eigenprojections of `T(ε)`, ordered
/// `[minus1, plus1_pos, plus1_neg]`.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eps: f64,
    pub eigenvalues: [Complex64; 3],
    pub projections: [Matrix3<Complex64>; 3],
}

fn complex_mat(m: &Matrix3<f64>) -> Matrix3<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

fn complex_vec(v: &Vector3<f64>) -> Vector3<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Unconjugated cross product; its result is annihilated (in the bilinear
/// sense) by both arguments, which is exactly the null-space relation needed
/// for rows of a singular matrix.
fn cross(a: &Vector3<Complex64>, b: &Vector3<Complex64>) -> Vector3<Complex64> {
    Vector3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

/// Best-conditioned null vector of a (numerically) singular 3×3 matrix: the
/// largest of the three pairwise row cross products, normalized.
fn null_vector(m: &Matrix3<Complex64>) -> Result<Vector3<Complex64>> {
    let rows: [Vector3<Complex64>; 3] = [
        m.row(0).transpose(),
        m.row(1).transpose(),
        m.row(2).transpose(),
    ];
    let mut best = cross(&rows[0], &rows[1]);
    for (i, j) in [(0usize, 2usize), (1, 2)] {
        let candidate = cross(&rows[i], &rows[j]);
        if candidate.norm() > best.norm() {
            best = candidate;
        }
    }
    let norm = best.norm();
    if norm < 1e-14 {
        return Err(Error::Numeric(
            "null-space extraction failed: all row cross products vanish".into(),
        ));
    }
    Ok(best / Complex64::new(norm, 0.0))
}

/// Spectral decomposition of `T(ε)` with branch identification by
/// continuity from the unperturbed spectrum.
pub fn decompose(eps: f64) -> Result<SpectralDecomp> {
    if !(eps > 0.0 && eps <= EPS_MAX) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0, {EPS_MAX}], got {eps}"
        )));
    }
    let t = t_matrix(eps);
    let raw = t.complex_eigenvalues();
    let targets = [
        Complex64::new(-1.0 + 0.5 * eps * eps, 0.0),
        Complex64::new(1.0, eps),
        Complex64::new(1.0, -eps),
    ];

    // Assign computed eigenvalues to target branches by the best of the six
    // permutations.
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let assignment = perms
        .iter()
        .min_by(|p, q| {
            let cost = |perm: &[usize; 3]| -> f64 {
                (0..3).map(|i| (raw[perm[i]] - targets[i]).norm()).sum()
            };
            cost(p).total_cmp(&cost(q))
        })
        .unwrap();
    let mut eigenvalues = [Complex64::ZERO; 3];
    for i in 0..3 {
        eigenvalues[i] = raw[assignment[i]];
    }
    if eigenvalues[1].im < 0.0 {
        eigenvalues.swap(1, 2);
    }

    for i in 0..3 {
        for j in (i + 1)..3 {
            if (eigenvalues[i] - eigenvalues[j]).norm() < 1e-12 {
                return Err(Error::DegenerateSpectrum(format!(
                    "eigenvalues {} and {} collide at eps = {eps}",
                    eigenvalues[i], eigenvalues[j]
                )));
            }
        }
    }

    let tc = complex_mat(&t);
    let mut projections = [Matrix3::<Complex64>::zeros(); 3];
    for i in 0..3 {
        let shifted = tc - Matrix3::identity() * eigenvalues[i];
        let right = null_vector(&shifted)?;
        let left = null_vector(&shifted.transpose())?;
        let denom = left.dot(&right); // unconjugated l^T r
        if denom.norm() < 1e-8 {
            return Err(Error::Numeric(format!(
                "eigenprojection ill-conditioned: |l^T r| = {:.3e} at eps = {eps}",
                denom.norm()
            )));
        }
        projections[i] = right * left.transpose() / denom;
    }

    Ok(SpectralDecomp {
        eps,
        eigenvalues,
        projections,
    })
}

impl SpectralDecomp {
    pub fn eigenvalue(&self, branch: Branch) -> Complex64 {
        self.eigenvalues[branch.index()]
    }

    pub fn projection(&self, branch: Branch) -> &Matrix3<Complex64> {
        &self.projections[branch.index()]
    }

    /// Largest eigenvalue modulus; `< 1` for every admissible `ε > 0`.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    /// `‖Σ P_i − I‖`.
    pub fn completeness_defect(&self) -> f64 {
        let sum: Matrix3<Complex64> =
            self.projections[0] + self.projections[1] + self.projections[2];
        (sum - Matrix3::identity()).norm()
    }

    /// `max_{i,j} ‖P_i P_j − δ_ij P_i‖`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let product = self.projections[i] * self.projections[j];
                let expected = if i == j {
                    self.projections[i]
                } else {
                    Matrix3::zeros()
                };
                worst = worst.max((product - expected).norm());
            }
        }
        worst
    }

    /// `‖Σ λ_i P_i − T(ε)‖`.
    pub fn reconstruction_defect(&self) -> f64 {
        let mut sum = Matrix3::<Complex64>::zeros();
        for i in 0..3 {
            sum += self.projections[i] * self.eigenvalues[i];
        }
        (sum - complex_mat(&t_matrix(self.eps))).norm()
    }

    /// `α_t` from the geometric-sum closed form
    /// `α_t = Σ_i (1 − λ_i^t)/(1 − λ_i) P_i b_ε`, returned as a real vector.
    pub fn alpha_at(&self, t: usize) -> Result<Vector3<f64>> {
        let b = complex_vec(&b_vector(self.eps));
        let mut acc = Vector3::<Complex64>::zeros();
        for i in 0..3 {
            let lam = self.eigenvalues[i];
            let coeff = (Complex64::ONE - lam.powf(t as f64)) / (Complex64::ONE - lam);
            acc += (self.projections[i] * b) * coeff;
        }
        realize(acc, "closed-form state")
    }

    /// `P_j(ε) b_ε` for one branch.
    pub fn projected_inflow(&self, branch: Branch) -> Vector3<Complex64> {
        self.projections[branch.index()] * complex_vec(&b_vector(self.eps))
    }
}

/// Checks a should-be-real vector and strips the imaginary part.
fn realize(v: Vector3<Complex64>, what: &str) -> Result<Vector3<f64>> {
    let imag = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let scale = 1.0 + v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if imag > 1e-8 * scale {
        return Err(Error::Numeric(format!(
            "{what} has residual imaginary part {imag:.3e}"
        )));
    }
    Ok(Vector3::new(v[0].re, v[1].re, v[2].re))
}

/// Closed-form `α_t` at a raw `ε` (decomposes on each call; use
/// [`SpectralDecomp::alpha_at`] in loops).
pub fn closed_form_alpha(t: usize, eps: f64) -> Result<ReducedState> {
    let alpha = decompose(eps)?.alpha_at(t)?;
    Ok(ReducedState { alpha, time: t })
}

/// The unperturbed (`ε = 0`) spectral data.
#[derive(Debug, Clone)]
pub struct UnperturbedData {
    /// `T = T(0)`.
    pub t: Matrix3<f64>,
    /// Eigenprojection of the simple eigenvalue `−1`, `vvᵀ` with
    /// `v = (1/√2)(1, 1, 0)`.
    pub p_minus1: Matrix3<f64>,
    /// The complementary projection onto the `+1` group.
    pub p_plus1: Matrix3<f64>,
    /// Reduced resolvent at `−1`, `S_{−1} = (1/2)(I − P_{−1})`.
    pub s_minus1: Matrix3<f64>,
    /// Conjugate eigenvector pair spanning `Ran(P_1)`,
    /// `v_± = (1/2)(∓i, ±i, √2)`.
    pub v_plus: Vector3<Complex64>,
    pub v_minus: Vector3<Complex64>,
    /// First-order reduction matrix on the `+1` group,
    /// `(1/√2) [0 0 −1; 0 0 1; 1 −1 0]`.
    pub t_tilde1: Matrix3<f64>,
}

/// Returns the unperturbed limit data used by the eigenvalue-series
/// analysis.
pub fn unperturbed_data() -> UnperturbedData {
    let p_minus1 = Matrix3::new(
        0.5, 0.5, 0.0,
        0.5, 0.5, 0.0,
        0.0, 0.0, 0.0,
    );
    let p_plus1 = Matrix3::identity() - p_minus1;
    let h = 0.5;
    let r = 0.5 * 2f64.sqrt();
    let i = Complex64::i();
    UnperturbedData {
        t: t_matrix(0.0),
        p_minus1,
        p_plus1,
        s_minus1: p_plus1 * 0.5,
        v_plus: Vector3::new(-i * h, i * h, Complex64::new(r, 0.0)),
        v_minus: Vector3::new(i * h, -i * h, Complex64::new(r, 0.0)),
        t_tilde1: Matrix3::new(
            0.0, 0.0, -1.0,
            0.0, 0.0, 1.0,
            1.0, -1.0, 0.0,
        ) / 2f64.sqrt(),
    }
}

/// Fitted eigenvalue-series coefficients for one branch:
/// `λ(ε) − λ(0) ≈ coeff1·ε + coeff2·ε²`.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationFit {
    pub branch: Branch,
    pub coeff1: Complex64,
    pub coeff2: Complex64,
    /// `ℓ²` residual of the fit.
    pub residual: f64,
}

/// Least-squares fit of the eigenvalue series over a list of perturbation
/// strengths. Requires at least 4 values, all in `(0, 0.1]`, spanning at
/// least one decade.
pub fn fit_perturbation(branch: Branch, eps_list: &[f64]) -> Result<PerturbationFit> {
    if eps_list.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 eps values, got {}",
            eps_list.len()
        )));
    }
    let max = eps_list.iter().cloned().fold(f64::MIN, f64::max);
    let min = eps_list.iter().cloned().fold(f64::MAX, f64::min);
    if !(min > 0.0 && max <= 0.1) {
        return Err(Error::Fit(format!(
            "eps values must lie in (0, 0.1], got range [{min}, {max}]"
        )));
    }
    if max / min < 9.99 {
        return Err(Error::Fit(format!(
            "eps values must span at least a decade, got ratio {:.3}",
            max / min
        )));
    }

    let lam0 = match branch {
        Branch::Minus1 => Complex64::new(-1.0, 0.0),
        Branch::Plus1Pos | Branch::Plus1Neg => Complex64::ONE,
    };

    // Scale by max(eps) so the 2×2 normal equations stay well conditioned.
    let mut s11 = 0.0;
    let mut s12 = 0.0;
    let mut s22 = 0.0;
    let mut r1 = Complex64::ZERO;
    let mut r2 = Complex64::ZERO;
    let mut ys = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let y = decompose(eps)?.eigenvalue(branch) - lam0;
        let u = eps / max;
        s11 += u * u;
        s12 += u * u * u;
        s22 += u * u * u * u;
        r1 += y * u;
        r2 += y * u * u;
        ys.push((u, y));
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-12 {
        return Err(Error::Fit("degenerate eps list: singular normal equations".into()));
    }
    let c1 = (r1 * s22 - r2 * s12) / det;
    let c2 = (r2 * s11 - r1 * s12) / det;
    let residual = ys
        .iter()
        .map(|&(u, y)| (y - c1 * u - c2 * u * u).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(PerturbationFit {
        branch,
        coeff1: c1 / max,
        coeff2: c2 / (max * max),
        residual,
    })
}

/// The asymptotic state expression: geometric sums replaced by their
/// eigenvalue-series forms (corrections inside the exponents dropped), with
/// the exact projected inflows `b^{(j)} = P_j(ε) b_ε`.
///
/// This is an error-study object, not ground truth; the unit tests below
/// measure how far it drifts from the exact state.
pub fn approx_alpha(t: usize, eps: f64) -> Result<ReducedState> {
    let decomp = decompose(eps)?;
    let b_m = decomp.projected_inflow(Branch::Minus1);
    let b_p = decomp.projected_inflow(Branch::Plus1Pos);
    let b_n = decomp.projected_inflow(Branch::Plus1Neg);
    let e2 = eps * eps;
    let tf = t as f64;
    let parity = if t % 2 == 0 { 1.0 } else { -1.0 };
    let i = Complex64::i();

    let f_m = 0.5 * (1.0 - parity * (-e2 * tf / 2.0).exp()) * (e2 / 4.0).exp();
    let damp = (-1.25 * e2 * tf).exp();
    let f_p = (i / eps) * (Complex64::ONE - (i * eps * tf).exp() * damp) * (i * 1.25 * eps).exp();
    let f_n =
        (-i / eps) * (Complex64::ONE - (-i * eps * tf).exp() * damp) * (-i * 1.25 * eps).exp();

    let v = b_m * Complex64::new(f_m, 0.0) + b_p * f_p + b_n * f_n;
    let alpha = realize(v, "asymptotic state")?;
    Ok(ReducedState { alpha, time: t })
}
