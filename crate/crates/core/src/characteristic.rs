//! Evaluation of the characteristic operator
//! `T(s) = S - L(s + ½L*L + iH)⁻¹L*S` and related quantities.
//!
//! Three independent routes are provided: the direct resolvent formula
//! ([`char_op`]), the all-pass form ([`char_op_allpass`]) and the
//! Stratonovich form ([`char_op_stratonovich`]). Sweeps evaluate any of them
//! over a [`FrequencyGrid`] in parallel.

use rayon::prelude::*;

use crate::block::{BlockKind, BlockOperatorMatrix};
use crate::error::{Result, SlhError};
use crate::matrix::{Check, CMatrix, C64, I};
use crate::model::{Abcd, SlhModel};
use crate::operators::TruncatedMode;
use crate::stratonovich::{ito_to_stratonovich, StratonovichCoefficients};

fn char_block(data: CMatrix, dim: usize) -> BlockOperatorMatrix {
    BlockOperatorMatrix::new(data, dim, BlockKind::CharOp)
}

/// Resolvent `(s - K)⁻¹` of the model's generator.
pub fn resolvent(model: &SlhModel, s: C64) -> Result<CMatrix> {
    model.k_operator().shifted_neg(s).inverse().map_err(|e| e.at_resolvent(s, "s - K"))
}

/// Direct evaluation of `T(s)`.
pub fn char_op(model: &SlhModel, s: C64) -> Result<BlockOperatorMatrix> {
    let r = resolvent(model, s)?;
    let ls = &model.l().dagger() * model.s();
    let t = model.s() - &(&(model.l() * &r) * &ls);
    Ok(char_block(t, model.dim()))
}

/// `Σ(s) = L(s + iH)⁻¹L*`.
pub fn sigma(model: &SlhModel, s: C64) -> Result<BlockOperatorMatrix> {
    let r = model
        .h()
        .scale(I)
        .shifted(s)
        .inverse()
        .map_err(|e| e.at_resolvent(s, "s + iH"))?;
    let sig = &(model.l() * &r) * &model.l().dagger();
    Ok(BlockOperatorMatrix::new(sig, model.dim(), BlockKind::Sigma))
}

/// All-pass route `T(s) = (1 - ½Σ)(1 + ½Σ)⁻¹S`.
pub fn char_op_allpass(model: &SlhModel, s: C64) -> Result<BlockOperatorMatrix> {
    let half = sigma(model, s)?.into_data().scale_real(0.5);
    let id = CMatrix::identity(half.rows());
    let den = (&id + &half).inverse().map_err(|e| e.at_resolvent(s, "1 + Σ/2"))?;
    let t = &(&(&id - &half) * &den) * model.s();
    Ok(char_block(t, model.dim()))
}

/// Stratonovich route `T(s) = (1 - X)(1 + X)⁻¹` with
/// `X = (i/2)E_ℓℓ + ½E_ℓ0(s + iE_00)⁻¹E_0ℓ`.
pub fn char_op_stratonovich(e: &StratonovichCoefficients, s: C64) -> Result<BlockOperatorMatrix> {
    let g = e.e00().scale(I).shifted(s).inverse().map_err(|err| err.at_resolvent(s, "s + iE00"))?;
    let x = &e.ell().scale(I * 0.5) + &(&(e.el0() * &g) * e.e0l()).scale_real(0.5);
    let id = CMatrix::identity(x.rows());
    let den = (&id + &x).inverse().map_err(|err| err.at_resolvent(s, "1 + X"))?;
    Ok(char_block(&(&id - &x) * &den, e.dim()))
}

/// `D + C(sI - A)⁻¹B`.
pub fn transfer_function(abcd: &Abcd, s: C64) -> Result<CMatrix> {
    let r = abcd.a.shifted_neg(s).inverse().map_err(|e| e.at_resolvent(s, "sI - A"))?;
    Ok(&abcd.d + &(&(&abcd.c * &r) * &abcd.b))
}

/// Unitarity of `T(iω)`; the residual is the larger of `‖T*T - I‖` and
/// `‖TT* - I‖`.
pub fn unitarity_check(model: &SlhModel, omega: f64, tol: f64) -> Result<Check> {
    Ok(char_op(model, C64::new(0.0, omega))?.data().check_unitary(tol))
}

/// Vacuum matrix elements `⟨0|T_jk(s)|0⟩` for a plant made of truncated
/// modes (first mode outermost).
pub fn vacuum_expectation_char(model: &SlhModel, s: C64, layout: &[TruncatedMode]) -> Result<CMatrix> {
    let dims: Vec<usize> = layout.iter().map(TruncatedMode::dim).collect();
    let slots: Vec<usize> = (0..dims.len()).collect();
    let t = partial_vacuum_char(model, s, &dims, &slots)?;
    Ok(t.into_data())
}

/// Projects the listed tensor factors of the plant onto their ground state
/// `|0⟩`, leaving `T(s)` as an `n × n` array of operators on the remaining
/// factors. `dims` lists every factor, first outermost.
pub fn partial_vacuum_char(model: &SlhModel, s: C64, dims: &[usize], vacuum_slots: &[usize]) -> Result<BlockOperatorMatrix> {
    let total: usize = dims.iter().product();
    if total != model.dim() {
        return Err(SlhError::DimensionMismatch(format!(
            "layout dimension {total} does not match plant dimension {}",
            model.dim()
        )));
    }
    if let Some(&bad) = vacuum_slots.iter().find(|&&k| k >= dims.len()) {
        return Err(SlhError::BadParam(format!("vacuum slot {bad} out of range")));
    }
    let keep: Vec<usize> = plant_indices_with_vacuum(dims, vacuum_slots);
    let rest = keep.len();
    let t = char_op(model, s)?;
    let n = model.n_inputs();
    let m = model.dim();
    let rows: Vec<usize> = (0..n).flat_map(|j| keep.iter().map(move |&i| j * m + i)).collect();
    Ok(BlockOperatorMatrix::new(t.data().select(&rows, &rows), rest, BlockKind::CharOp))
}

/// Flat plant indices whose digits in the `vacuum_slots` factors are zero,
/// in increasing order.
fn plant_indices_with_vacuum(dims: &[usize], vacuum_slots: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    (0..total)
        .filter(|&idx| {
            let mut rem = idx;
            let mut ok = true;
            for (k, &d) in dims.iter().enumerate().rev() {
                if rem % d != 0 && vacuum_slots.contains(&k) {
                    ok = false;
                }
                rem /= d;
            }
            ok
        })
        .collect()
}

/// Neumann series for `T(s)` of `(S, L, H₀ + λV)` truncated after `order`
/// terms: `T₀ - Σ_{n=1}^{order} (-iλ)ⁿ L R₀ (V R₀)ⁿ L*S`.
pub fn perturbation_series(model0: &SlhModel, v: &CMatrix, lambda: f64, order: usize, s: C64) -> Result<BlockOperatorMatrix> {
    if v.shape() != (model0.dim(), model0.dim()) {
        return Err(SlhError::DimensionMismatch("perturbation must be dim x dim".into()));
    }
    if !v.is_hermitian(crate::model::DEFAULT_TOL) {
        return Err(SlhError::BadParam("perturbation V is not Hermitian".into()));
    }
    let r0 = resolvent(model0, s)?;
    let ls = &model0.l().dagger() * model0.s();
    let vr = v * &r0;
    let mut t = char_op(model0, s)?.into_data();
    let mut chain = r0.clone();
    let mut coeff = C64::new(1.0, 0.0);
    for _ in 0..order {
        chain = &chain * &vr;
        coeff *= C64::new(0.0, -lambda);
        t -= &(&(model0.l() * &chain) * &ls).scale(coeff);
    }
    Ok(char_block(t, model0.dim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Points are `ω` and `s = iω`.
    Imaginary,
    /// Points are real `s`.
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    axis: Axis,
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(axis: Axis, points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(SlhError::BadParam("frequency grid is empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(SlhError::BadParam("frequency grid has non-finite points".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SlhError::BadParam("frequency grid must be strictly increasing".into()));
        }
        Ok(FrequencyGrid { axis, points })
    }

    /// `count` evenly spaced points from `min` to `max` inclusive.
    pub fn linear(axis: Axis, min: f64, max: f64, count: usize) -> Result<Self> {
        match count {
            0 => Err(SlhError::BadParam("grid needs at least one point".into())),
            1 => Self::new(axis, vec![min]),
            _ => {
                let step = (max - min) / (count - 1) as f64;
                Self::new(axis, (0..count).map(|i| min + step * i as f64).collect())
            }
        }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn s_at(&self, i: usize) -> C64 {
        match self.axis {
            Axis::Imaginary => C64::new(0.0, self.points[i]),
            Axis::Real => C64::new(self.points[i], 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Allpass,
    Stratonovich,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub grid: FrequencyGrid,
    /// `None` where evaluation failed; see `failures`.
    pub values: Vec<Option<BlockOperatorMatrix>>,
    /// Unitarity residual per point, NaN where evaluation failed.
    pub unitarity_residuals: Vec<f64>,
    pub failures: Vec<(usize, SlhError)>,
}

impl SweepResult {
    pub fn all_failed(&self) -> bool {
        self.failures.len() == self.values.len()
    }
}

/// Evaluates `T(s)` at every grid point. Singular points are recorded in
/// `failures` rather than aborting the sweep.
pub fn sweep(model: &SlhModel, grid: &FrequencyGrid, method: Method) -> SweepResult {
    let strat: Option<std::result::Result<StratonovichCoefficients, SlhError>> =
        (method == Method::Stratonovich).then(|| ito_to_stratonovich(model));
    let outcomes: Vec<Result<BlockOperatorMatrix>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let s = grid.s_at(i);
            match method {
                Method::Direct => char_op(model, s),
                Method::Allpass => char_op_allpass(model, s),
                Method::Stratonovich => match strat.as_ref().expect("coefficients computed") {
                    Ok(e) => char_op_stratonovich(e, s),
                    Err(err) => Err(err.clone()),
                },
            }
        })
        .collect();

    let mut values = Vec::with_capacity(grid.len());
    let mut unitarity_residuals = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(t) => {
                unitarity_residuals.push(t.data().check_unitary(0.0).residual);
                values.push(Some(t));
            }
            Err(e) => {
                unitarity_residuals.push(f64::NAN);
                values.push(None);
                failures.push((i, e));
            }
        }
    }
    SweepResult { grid: grid.clone(), values, unitarity_residuals, failures }
}
