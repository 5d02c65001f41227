//! Conversion between Itô (HP) parameters and Stratonovich coefficients,
//! and the k-scaled Stratonovich limits.
//!
//! The forward map is
//!
//! ```text
//! S = (1 - (i/2)E_ℓℓ)(1 + (i/2)E_ℓℓ)⁻¹
//! L = i(1 + (i/2)E_ℓℓ)⁻¹E_ℓ0
//! H = E_00 + ½ Im{E_0ℓ(1 + (i/2)E_ℓℓ)⁻¹E_ℓ0}
//! ```
//!
//! and the inverse is derived from it so that round trips are exact:
//! `E_ℓℓ = 2i(S - 1)(S + 1)⁻¹`, `E_ℓ0 = -2i(S + 1)⁻¹L`,
//! `E_00 = H + ¼L*E_ℓℓL`.

use crate::adiabatic::ScaledSlhFamily;
use crate::error::{Result, SlhError};
use crate::matrix::{CMatrix, C64, I};
use crate::model::{k_from, SlhModel, DEFAULT_TOL};
use crate::reduction::{partition_operator, BlockPartition};

/// The Hermitian coefficient matrix `[[E_00, E_0ℓ], [E_ℓ0, E_ℓℓ]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StratonovichCoefficients {
    e00: CMatrix,
    e0l: CMatrix,
    el0: CMatrix,
    ell: CMatrix,
}

impl StratonovichCoefficients {
    /// Validates shapes, Hermiticity of `E_00` and `E_ℓℓ`, and
    /// `E_0ℓ = E_ℓ0*`, all at [`DEFAULT_TOL`].
    pub fn new(e00: CMatrix, e0l: CMatrix, el0: CMatrix, ell: CMatrix) -> Result<Self> {
        Self::with_tol(e00, e0l, el0, ell, DEFAULT_TOL)
    }

    pub fn with_tol(e00: CMatrix, e0l: CMatrix, el0: CMatrix, ell: CMatrix, tol: f64) -> Result<Self> {
        let m = e00.rows();
        let bad = |msg: String| Err(SlhError::InvalidCoefficients(msg));
        if !e00.is_square() || m == 0 {
            return bad("E00 must be square and non-empty".into());
        }
        if el0.cols() != m || el0.rows() == 0 || !el0.rows().is_multiple_of(m) {
            return bad(format!("El0 is {}x{}, expected (n·{m})x{m}", el0.rows(), el0.cols()));
        }
        if e0l.shape() != (m, el0.rows()) {
            return bad(format!("E0l is {}x{}, expected {m}x{}", e0l.rows(), e0l.cols(), el0.rows()));
        }
        if ell.shape() != (el0.rows(), el0.rows()) {
            return bad(format!("Ell is {}x{}, expected {n}x{n}", ell.rows(), ell.cols(), n = el0.rows()));
        }
        let r00 = e00.check_hermitian(tol).residual;
        if !(r00 <= tol) {
            return bad(format!("E00 is not Hermitian (residual {r00:.3e})"));
        }
        let rll = ell.check_hermitian(tol).residual;
        if !(rll <= tol) {
            return bad(format!("Ell is not Hermitian (residual {rll:.3e})"));
        }
        let r0l = e0l.max_abs_diff(&el0.dagger());
        if !(r0l <= tol) {
            return bad(format!("E0l differs from El0* (residual {r0l:.3e})"));
        }
        Ok(StratonovichCoefficients { e00, e0l, el0, ell })
    }

    /// Builds from `E_00`, `E_ℓ0`, `E_ℓℓ` with `E_0ℓ = E_ℓ0*`.
    pub fn from_lower(e00: CMatrix, el0: CMatrix, ell: CMatrix) -> Result<Self> {
        let e0l = el0.dagger();
        Self::new(e00, e0l, el0, ell)
    }

    pub fn zeros(n_inputs: usize, dim: usize) -> Self {
        StratonovichCoefficients {
            e00: CMatrix::zeros(dim, dim),
            e0l: CMatrix::zeros(dim, n_inputs * dim),
            el0: CMatrix::zeros(n_inputs * dim, dim),
            ell: CMatrix::zeros(n_inputs * dim, n_inputs * dim),
        }
    }

    pub fn e00(&self) -> &CMatrix {
        &self.e00
    }

    pub fn e0l(&self) -> &CMatrix {
        &self.e0l
    }

    pub fn el0(&self) -> &CMatrix {
        &self.el0
    }

    pub fn ell(&self) -> &CMatrix {
        &self.ell
    }

    pub fn dim(&self) -> usize {
        self.e00.rows()
    }

    pub fn n_inputs(&self) -> usize {
        self.el0.rows() / self.dim()
    }

    /// `(1 + (i/2)E_ℓℓ)⁻¹`, always defined for Hermitian `E_ℓℓ`.
    fn half_cayley_inverse(&self) -> Result<CMatrix> {
        cayley_denominator(&self.ell).inverse()
    }

    /// `K = -iE_00 - ½E_0ℓ(1 + (i/2)E_ℓℓ)⁻¹E_ℓ0`.
    pub fn k_operator(&self) -> Result<CMatrix> {
        let minv = self.half_cayley_inverse()?;
        Ok(&self.e00.scale(-I) - &(&(&self.e0l * &minv) * &self.el0).scale_real(0.5))
    }
}

fn cayley_denominator(e: &CMatrix) -> CMatrix {
    e.scale(I * 0.5).shifted(C64::new(1.0, 0.0))
}

/// `(1 - (i/2)E)(1 + (i/2)E)⁻¹`.
pub fn cayley(e: &CMatrix) -> Result<CMatrix> {
    let num = e.scale(-I * 0.5).shifted(C64::new(1.0, 0.0));
    Ok(&num * &cayley_denominator(e).inverse()?)
}

pub fn stratonovich_to_ito(e: &StratonovichCoefficients) -> Result<SlhModel> {
    let minv = e.half_cayley_inverse()?;
    let s = cayley(&e.ell)?;
    let l = (&minv * &e.el0).scale(I);
    let h = &e.e00 + &(&(&e.e0l * &minv) * &e.el0).im_part().scale_real(0.5);
    let model = SlhModel::with_tol(s, l, h, DEFAULT_TOL)?;
    debug_assert!(model.k_operator().max_abs_diff(&k_from(model.l(), model.h())) == 0.0);
    Ok(model)
}

/// Inverse of [`stratonovich_to_ito`]. Fails with `CayleySingular` when `S`
/// has an eigenvalue at `-1`.
pub fn ito_to_stratonovich(model: &SlhModel) -> Result<StratonovichCoefficients> {
    let s = model.s();
    let id = CMatrix::identity(s.rows());
    let inv = (s + &id).inverse().map_err(|_| SlhError::CayleySingular)?;
    let ell = hermitian_part(&(&(s - &id) * &inv).scale(2.0 * I));
    let el0 = (&inv * model.l()).scale(-2.0 * I);
    let e00 = hermitian_part(&(model.h() + &(&(&model.l().dagger() * &ell) * model.l()).scale_real(0.25)));
    let e0l = el0.dagger();
    StratonovichCoefficients::with_tol(e00, e0l, el0, ell, f64::INFINITY)
}

fn hermitian_part(x: &CMatrix) -> CMatrix {
    (x + &x.dagger()).scale_real(0.5)
}

/// Stratonovich family `E_00 = kF_00`, `E_ℓ0 = √k F_ℓ0`, `E_ℓℓ = F_ℓℓ`.
///
/// The coupling scales as `√k` so that `E_ℓ0(s + iE_00)⁻¹E_0ℓ` stays finite
/// and the transfer operator converges to the Cayley transform of the
/// Schur complement `F_ℓℓ - F_ℓ0F_00⁻¹F_0ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StratScaledFamily {
    pub f00: CMatrix,
    pub fl0: CMatrix,
    pub fll: CMatrix,
}

impl StratScaledFamily {
    pub fn new(f00: CMatrix, fl0: CMatrix, fll: CMatrix) -> Result<Self> {
        StratonovichCoefficients::from_lower(f00.clone(), fl0.clone(), fll.clone())?;
        Ok(StratScaledFamily { f00, fl0, fll })
    }

    pub fn at(&self, k: f64) -> Result<StratonovichCoefficients> {
        StratonovichCoefficients::from_lower(self.f00.scale_real(k), self.fl0.scale_real(k.sqrt()), self.fll.clone())
    }
}

/// `Ŝ = Cayley(F_ℓℓ - F_ℓ0F_00⁻¹F_0ℓ)`.
pub fn strat_scaling_limit(family: &StratScaledFamily) -> Result<CMatrix> {
    let f00inv = family.f00.inverse()?;
    let ehat = &family.fll - &(&(&family.fl0 * &f00inv) * &family.fl0.dagger());
    cayley(&ehat)
}

/// Stratonovich coefficients of an adiabatic family:
/// `E_ℓ0(k) = E_ℓ0⁽⁰⁾ + kE_ℓ0⁽¹⁾`, `E_00(k) = E_00⁽⁰⁾ + kE_00⁽¹⁾ + k²E_00⁽²⁾`,
/// `E_ℓℓ` fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledStratonovich {
    pub e00: [CMatrix; 3],
    pub el0: [CMatrix; 2],
    pub ell: CMatrix,
    pub partition: BlockPartition,
}

impl ScaledStratonovich {
    pub fn from_family(family: &ScaledSlhFamily) -> Result<Self> {
        let s = family.s();
        let id = CMatrix::identity(s.rows());
        let inv = (s + &id).inverse().map_err(|_| SlhError::CayleySingular)?;
        let ell = hermitian_part(&(&(s - &id) * &inv).scale(2.0 * I));
        let conv = inv.scale(-2.0 * I);
        let e0 = &conv * family.l0();
        let e1 = &conv * family.l1();
        let quarter = |a: &CMatrix, b: &CMatrix| (&(&a.dagger() * &ell) * b).scale_real(0.25);
        let e00_0 = family.h0() + &quarter(family.l0(), family.l0());
        let e00_1 = &(family.h1() + &quarter(family.l1(), family.l0())) + &quarter(family.l0(), family.l1());
        let e00_2 = family.h2() + &quarter(family.l1(), family.l1());
        Ok(ScaledStratonovich {
            e00: [hermitian_part(&e00_0), hermitian_part(&e00_1), hermitian_part(&e00_2)],
            el0: [e0, e1],
            ell,
            partition: family.partition().clone(),
        })
    }

    pub fn at(&self, k: f64) -> Result<StratonovichCoefficients> {
        let e00 = &(&self.e00[0] + &self.e00[1].scale_real(k)) + &self.e00[2].scale_real(k * k);
        let el0 = &self.el0[0] + &self.el0[1].scale_real(k);
        StratonovichCoefficients::from_lower(e00, el0, self.ell.clone())
    }
}

/// k → ∞ limit of a [`ScaledStratonovich`] family, returned as coefficients
/// on the full plant space whose `E_ℓ0` has only slow columns and whose
/// `E_00` has only a slow-slow block:
///
/// ```text
/// Ê_ℓℓ = E_ℓℓ - E⁽¹⁾_ℓf W E⁽¹⁾_ℓf*
/// Ê_ℓs = E⁽⁰⁾_ℓs - E⁽¹⁾_ℓf W E⁽¹⁾_00,fs
/// Ê_ss = E⁽⁰⁾_00,ss - E⁽¹⁾_00,sf W E⁽¹⁾_00,fs
/// ```
///
/// with `W = (E⁽²⁾_00,ff)⁻¹`. Requires every plant block of `E_ℓℓ` to be
/// block diagonal with respect to the partition, `E⁽¹⁾_00` and `E⁽²⁾_00` to
/// vanish on the slow-slow block, `E⁽²⁾_00` to be confined to the fast-fast
/// block, `E⁽¹⁾_ℓ0` to have no slow columns, and `E⁽²⁾_00,ff` invertible.
pub fn strat_adiabatic_limit(family: &ScaledStratonovich, tol: f64) -> Result<StratonovichCoefficients> {
    let p = &family.partition;
    let m = p.dim();
    let n = family.ell.rows() / m;
    let violated = |msg: String| Err(SlhError::AssumptionViolated(msg));

    for i in 0..n {
        for j in 0..n {
            let b = partition_operator(&family.ell.sub_block(i * m, j * m, m, m), p)?;
            if b.sf.max_abs() > tol || b.fs.max_abs() > tol {
                return violated(format!("Ell block ({i},{j}) couples slow and fast subspaces"));
            }
        }
    }
    let e1 = partition_operator(&family.e00[1], p)?;
    let e2 = partition_operator(&family.e00[2], p)?;
    if e1.ss.max_abs() > tol {
        return violated("first-order E00 has a slow-slow block".into());
    }
    if e2.ss.max_abs().max(e2.sf.max_abs()).max(e2.fs.max_abs()) > tol {
        return violated("second-order E00 extends outside the fast-fast block".into());
    }
    let l1_slow = family.el0[1].select(&(0..n * m).collect::<Vec<_>>(), p.slow());
    if l1_slow.max_abs() > tol {
        return violated("first-order El0 has slow columns".into());
    }
    let w = e2
        .ff
        .inverse()
        .map_err(|_| SlhError::AssumptionViolated("fast-fast block of second-order E00 is not invertible".into()))?;
    let wfull = p.embed_ff(&w);
    let ps = p.slow_projector();

    let e1l = &family.el0[1];
    let ell = &family.ell - &(&(e1l * &wfull) * &e1l.dagger());
    let el0 = &(&family.el0[0] - &(&(e1l * &wfull) * &family.e00[1])) * &ps;
    let e00 = &(&ps * &(&family.e00[0] - &(&(&family.e00[1] * &wfull) * &family.e00[1]))) * &ps;
    StratonovichCoefficients::from_lower(hermitian_part(&e00), el0, hermitian_part(&ell))
}
