//! Adiabatic elimination for families
//! `L(k) = kL⁽¹⁾ + L⁽⁰⁾`, `H(k) = H⁽⁰⁾ + kH⁽¹⁾ + k²H⁽²⁾` with fixed `S`,
//! scaled so that the fast subspace decouples as `k → ∞`.
//!
//! The generator splits as `K(k) = k²A + kZ + R` and every limit object is a
//! closed-form Schur complement in `A_ff`. Finite-`k` evaluation is provided
//! only as an independent witness ([`finite_k_char_op`],
//! [`convergence_study`]).

use nalgebra::DMatrix;

use crate::block::{BlockKind, BlockOperatorMatrix};
use crate::error::{Result, SlhError};
use crate::matrix::{CMatrix, C64, I};
use crate::model::{SlhModel, DEFAULT_TOL};
use crate::reduction::{partition_operator, partition_rect, BlockPartition, BlockedOperator};

/// Condition-number ceiling for `A_ff`.
pub const A_FF_COND_LIMIT: f64 = 1e10;
/// Condition numbers above this produce a warning.
pub const A_FF_COND_WARN: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSlhFamily {
    s: CMatrix,
    l0: CMatrix,
    l1: CMatrix,
    h0: CMatrix,
    h1: CMatrix,
    h2: CMatrix,
    partition: BlockPartition,
}

impl ScaledSlhFamily {
    /// Validated construction: shapes, unitarity of `S`, Hermiticity of the
    /// `H⁽ʲ⁾`, `L⁽¹⁾P_s = 0`, `P_sH⁽¹⁾P_s = 0` and `H⁽²⁾ = P_fH⁽²⁾P_f`.
    pub fn new(
        s: CMatrix,
        l0: CMatrix,
        l1: CMatrix,
        h0: CMatrix,
        h1: CMatrix,
        h2: CMatrix,
        partition: BlockPartition,
    ) -> Result<Self> {
        let fam = Self::from_parts(s, l0, l1, h0, h1, h2, partition)?;
        let st = fam.structure();
        let failures = st.failures(DEFAULT_TOL);
        if !failures.is_empty() {
            return Err(SlhError::InvalidFamily(failures.join("; ")));
        }
        Ok(fam)
    }

    /// Shape checks only; [`check_assumptions`] reports the rest.
    pub fn from_parts(
        s: CMatrix,
        l0: CMatrix,
        l1: CMatrix,
        h0: CMatrix,
        h1: CMatrix,
        h2: CMatrix,
        partition: BlockPartition,
    ) -> Result<Self> {
        let m = partition.dim();
        let bad = |msg: String| Err(SlhError::InvalidFamily(msg));
        for (name, h) in [("H0", &h0), ("H1", &h1), ("H2", &h2)] {
            if h.shape() != (m, m) {
                return bad(format!("{name} is {}x{}, expected {m}x{m}", h.rows(), h.cols()));
            }
        }
        if l0.cols() != m || l0.rows() == 0 || !l0.rows().is_multiple_of(m) {
            return bad(format!("L0 is {}x{}, expected (n·{m})x{m}", l0.rows(), l0.cols()));
        }
        if l1.shape() != l0.shape() {
            return bad("L1 and L0 differ in shape".into());
        }
        if s.shape() != (l0.rows(), l0.rows()) {
            return bad(format!("S is {}x{}, expected {n}x{n}", s.rows(), s.cols(), n = l0.rows()));
        }
        for (name, x) in [("S", &s), ("L0", &l0), ("L1", &l1), ("H0", &h0), ("H1", &h1), ("H2", &h2)] {
            if !x.is_finite() {
                return bad(format!("{name} has non-finite entries"));
            }
        }
        Ok(ScaledSlhFamily { s, l0, l1, h0, h1, h2, partition })
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }
    pub fn l0(&self) -> &CMatrix {
        &self.l0
    }
    pub fn l1(&self) -> &CMatrix {
        &self.l1
    }
    pub fn h0(&self) -> &CMatrix {
        &self.h0
    }
    pub fn h1(&self) -> &CMatrix {
        &self.h1
    }
    pub fn h2(&self) -> &CMatrix {
        &self.h2
    }
    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }
    pub fn dim(&self) -> usize {
        self.partition.dim()
    }
    pub fn n_inputs(&self) -> usize {
        self.l0.rows() / self.dim()
    }

    /// Replaces the partition, e.g. by one discovered from the kernel of `A`.
    pub fn with_partition(&self, partition: BlockPartition) -> Result<Self> {
        Self::new(
            self.s.clone(),
            self.l0.clone(),
            self.l1.clone(),
            self.h0.clone(),
            self.h1.clone(),
            self.h2.clone(),
            partition,
        )
    }

    fn structure(&self) -> Structure {
        let p = &self.partition;
        let all_rows: Vec<usize> = (0..self.l1.rows()).collect();
        let h1 = partition_operator(&self.h1, p).expect("shape checked");
        let h2 = partition_operator(&self.h2, p).expect("shape checked");
        Structure {
            s_unitarity: self.s.check_unitary(0.0).residual,
            hermiticity: [&self.h0, &self.h1, &self.h2]
                .iter()
                .map(|h| h.check_hermitian(0.0).residual)
                .fold(0.0, f64::max),
            l1_slow: self.l1.select(&all_rows, p.slow()).max_abs(),
            h1_ss: h1.ss.max_abs(),
            h2_outside_ff: h2.ss.max_abs().max(h2.sf.max_abs()).max(h2.fs.max_abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Structure {
    s_unitarity: f64,
    hermiticity: f64,
    l1_slow: f64,
    h1_ss: f64,
    h2_outside_ff: f64,
}

impl Structure {
    fn failures(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |v: f64, msg: &str| {
            if !(v <= tol) {
                out.push(format!("{msg} (residual {v:.3e})"));
            }
        };
        check(self.s_unitarity, "S is not unitary");
        check(self.hermiticity, "H0, H1, H2 are not all Hermitian");
        check(self.l1_slow, "L1 acts on the slow subspace (L1·P_s ≠ 0)");
        check(self.h1_ss, "H1 has a slow-slow block");
        check(self.h2_outside_ff, "H2 extends outside the fast-fast block");
        out
    }
}

/// `(S, kL⁽¹⁾ + L⁽⁰⁾, H⁽⁰⁾ + kH⁽¹⁾ + k²H⁽²⁾)`.
pub fn assemble_k(family: &ScaledSlhFamily, k: f64) -> Result<SlhModel> {
    let l = &family.l1.scale_real(k) + &family.l0;
    let h = &(&family.h0 + &family.h1.scale_real(k)) + &family.h2.scale_real(k * k);
    SlhModel::new(family.s.clone(), l, h).map_err(|e| SlhError::InvalidFamily(e.to_string()))
}

/// `K(k) = k²A + kZ + R`.
#[derive(Debug, Clone, PartialEq)]
pub struct KzrDecomposition {
    pub a: CMatrix,
    pub z: CMatrix,
    pub r: CMatrix,
    pub a_blocks: BlockedOperator,
    pub z_blocks: BlockedOperator,
    pub r_blocks: BlockedOperator,
}

impl KzrDecomposition {
    pub fn a_ff(&self) -> &CMatrix {
        &self.a_blocks.ff
    }

    pub fn k_at(&self, k: f64) -> CMatrix {
        &(&self.a.scale_real(k * k) + &self.z.scale_real(k)) + &self.r
    }
}

pub fn kzr_decompose(family: &ScaledSlhFamily) -> Result<KzrDecomposition> {
    let f = family;
    let a = &(&f.l1.dagger() * &f.l1).scale_real(-0.5) - &f.h2.scale(I);
    let z = &(&(&f.l1.dagger() * &f.l0) + &(&f.l0.dagger() * &f.l1)).scale_real(-0.5) - &f.h1.scale(I);
    let r = &(&f.l0.dagger() * &f.l0).scale_real(-0.5) - &f.h0.scale(I);
    let p = &f.partition;
    Ok(KzrDecomposition {
        a_blocks: partition_operator(&a, p)?,
        z_blocks: partition_operator(&z, p)?,
        r_blocks: partition_operator(&r, p)?,
        a,
        z,
        r,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub tol: f64,
    pub s_unitarity: f64,
    pub hermiticity: f64,
    /// `‖L⁽¹⁾P_s‖`.
    pub l1_slow: f64,
    /// `‖P_sH⁽¹⁾P_s‖`.
    pub h1_ss: f64,
    /// Largest entry of `H⁽²⁾` outside the fast-fast block.
    pub h2_outside_ff: f64,
    /// Norm-1 condition estimate of `A_ff` (infinite when singular).
    pub a_ff_cond: f64,
    /// Residuals of `R_ss + R_ss* = -L⁽⁰⁾_s*L⁽⁰⁾_s`,
    /// `Z_sf + Z_fs* = -L⁽⁰⁾_s*L⁽¹⁾_f`, `A_ff + A_ff* = -L⁽¹⁾_f*L⁽¹⁾_f`.
    pub k_identities: [f64; 3],
    pub warnings: Vec<String>,
}

impl AssumptionReport {
    pub fn structural_ok(&self) -> bool {
        self.structure().failures(self.tol).is_empty()
    }

    pub fn passed(&self) -> bool {
        self.structural_ok() && self.a_ff_cond <= A_FF_COND_LIMIT
    }

    fn structure(&self) -> Structure {
        Structure {
            s_unitarity: self.s_unitarity,
            hermiticity: self.hermiticity,
            l1_slow: self.l1_slow,
            h1_ss: self.h1_ss,
            h2_outside_ff: self.h2_outside_ff,
        }
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = self.structure().failures(self.tol);
        if !(self.a_ff_cond <= A_FF_COND_LIMIT) {
            out.push(format!(
                "A_ff is not invertible on the fast subspace (condition {:.3e} > {:.0e})",
                self.a_ff_cond, A_FF_COND_LIMIT
            ));
        }
        out
    }
}

pub fn check_assumptions(family: &ScaledSlhFamily, tol: f64) -> AssumptionReport {
    let st = family.structure();
    let kzr = kzr_decompose(family).expect("shapes validated at construction");
    let a_ff_cond = kzr.a_ff().cond_estimate();
    let p = &family.partition;
    let rows: Vec<usize> = (0..family.l0.rows()).collect();
    let l0s = family.l0.select(&rows, p.slow());
    let l1f = family.l1.select(&rows, p.fast());
    let (a, z, r) = (&kzr.a_blocks, &kzr.z_blocks, &kzr.r_blocks);
    let k_identities = [
        (&r.ss + &r.ss.dagger()).max_abs_diff(&-(&l0s.dagger() * &l0s)),
        (&z.sf + &z.fs.dagger()).max_abs_diff(&-(&l0s.dagger() * &l1f)),
        (&a.ff + &a.ff.dagger()).max_abs_diff(&-(&l1f.dagger() * &l1f)),
    ];
    let mut warnings = Vec::new();
    if a_ff_cond > A_FF_COND_WARN && a_ff_cond <= A_FF_COND_LIMIT {
        warnings.push(format!("A_ff is close to singular (condition {a_ff_cond:.3e})"));
    }
    AssumptionReport {
        tol,
        s_unitarity: st.s_unitarity,
        hermiticity: st.hermiticity,
        l1_slow: st.l1_slow,
        h1_ss: st.h1_ss,
        h2_outside_ff: st.h2_outside_ff,
        a_ff_cond,
        k_identities,
        warnings,
    }
}

fn require_assumptions(family: &ScaledSlhFamily) -> Result<()> {
    let rep = check_assumptions(family, DEFAULT_TOL);
    if rep.passed() {
        Ok(())
    } else {
        Err(SlhError::AssumptionViolated(rep.failures().join("; ")))
    }
}

/// Limit of `diag(1, k)(s + M(k))⁻¹diag(1, k)` for
/// `M(k) = [[M₁₁, kM₁₂], [kM₂₁, k²M₂₂]]`, returned as blocks.
pub fn scaled_resolvent_limit(
    m11: &CMatrix,
    m12: &CMatrix,
    m21: &CMatrix,
    m22: &CMatrix,
    s: C64,
) -> Result<BlockedOperator> {
    let m22inv = m22.inverse()?;
    let mhat = m11 - &(&(m12 * &m22inv) * m21);
    let g = mhat.shifted(s).inverse()?;
    let top_right = -(&(&g * m12) * &m22inv);
    let bottom_left = -(&(&m22inv * m21) * &g);
    let ff = &m22inv + &(&(&(&m22inv * m21) * &g) * &(m12 * &m22inv));
    Ok(BlockedOperator { ss: g, sf: top_right, fs: bottom_left, ff })
}

/// Pieces shared by the limit formulas.
struct LimitParts {
    kzr: KzrDecomposition,
    /// `A_ff⁻¹`.
    a_inv: CMatrix,
    /// `A_ff⁻¹` embedded in the fast-fast block of an `m × m` zero matrix.
    a_tilde: CMatrix,
    /// `L⁽⁰⁾` restricted to slow columns, `nm × |s|`.
    l0s: CMatrix,
    /// `L⁽¹⁾` restricted to fast columns, `nm × |f|`.
    l1f: CMatrix,
    /// `K̂_ss = R_ss - Z_sf A_ff⁻¹ Z_fs`.
    khat_ss: CMatrix,
}

fn limit_parts(family: &ScaledSlhFamily) -> Result<LimitParts> {
    require_assumptions(family)?;
    let kzr = kzr_decompose(family)?;
    let a_inv = kzr
        .a_ff()
        .inverse_with(A_FF_COND_LIMIT)
        .map_err(|e| SlhError::AssumptionViolated(format!("A_ff not invertible: {e}")))?;
    let p = &family.partition;
    let rows: Vec<usize> = (0..family.l0.rows()).collect();
    let khat_ss = &kzr.r_blocks.ss - &(&(&kzr.z_blocks.sf * &a_inv) * &kzr.z_blocks.fs);
    Ok(LimitParts {
        a_tilde: p.embed_ff(&a_inv),
        l0s: family.l0.select(&rows, p.slow()),
        l1f: family.l1.select(&rows, p.fast()),
        a_inv,
        kzr,
        khat_ss,
    })
}

/// `T̂(s) = lim_k T_k(s)`, assembled from
/// `T̂ = {1 + L_f⁽¹⁾A_ff⁻¹L_f⁽¹⁾* - [L_s⁽⁰⁾ - L_f⁽¹⁾A_ff⁻¹Z_fs](s - K̂_ss)⁻¹[L_s⁽⁰⁾* - Z_sfA_ff⁻¹L_f⁽¹⁾*]} S`.
pub fn limit_char_op(family: &ScaledSlhFamily, s: C64) -> Result<BlockOperatorMatrix> {
    let lp = limit_parts(family)?;
    let z = &lp.kzr.z_blocks;
    let nm = family.s.rows();
    let g = lp.khat_ss.shifted_neg(s).inverse().map_err(|e| e.at_resolvent(s, "s - K̂_ss"))?;
    let left = &lp.l0s - &(&(&lp.l1f * &lp.a_inv) * &z.fs);
    let right = &lp.l0s.dagger() - &(&(&z.sf * &lp.a_inv) * &lp.l1f.dagger());
    let scatter = &CMatrix::identity(nm) + &(&(&lp.l1f * &lp.a_inv) * &lp.l1f.dagger());
    let t = &(&scatter - &(&(&left * &g) * &right)) * &family.s;
    Ok(BlockOperatorMatrix::new(t, family.dim(), BlockKind::CharOp))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitModel {
    pub shat: CMatrix,
    /// `nm × m`; the fast columns are zero.
    pub lhat: CMatrix,
    /// `m × m`; only the slow-slow block is non-zero.
    pub hhat: CMatrix,
    /// Slow-slow block of `Ĥ` from the alternative expression
    /// `H⁽⁰⁾_ss - Z_fs*A_ff⁻*H⁽¹⁾_fs - H⁽¹⁾_sfA_ff⁻¹Z_fs + Z_fs*A_ff⁻*H⁽²⁾_ffA_ff⁻¹Z_fs`.
    pub hhat_ss_alt: CMatrix,
    pub partition: BlockPartition,
    pub n_inputs: usize,
    pub decoupled: bool,
    /// `(Ŝ_ss, L̂_s, Ĥ_ss)` when the limit decouples.
    pub slow_model: Option<SlhModel>,
}

impl LimitModel {
    /// The limit triple on the full plant space.
    pub fn full_model(&self) -> Result<SlhModel> {
        SlhModel::new(self.shat.clone(), self.lhat.clone(), self.hhat.clone())
    }

    pub fn hhat_ss(&self) -> CMatrix {
        let p = &self.partition;
        self.hhat.select(p.slow(), p.slow())
    }

    /// `max |Ĥ_ss - Ĥ_ss(alt)|`.
    pub fn hamiltonian_forms_residual(&self) -> f64 {
        self.hhat_ss().max_abs_diff(&self.hhat_ss_alt)
    }
}

/// Limit parameters `(Ŝ, L̂, Ĥ)`:
/// `Ŝ = (1 + L⁽¹⁾Ã L⁽¹⁾*)S`, `L̂ = L⁽⁰⁾P_s - L⁽¹⁾ÃZP_s`,
/// `Ĥ_ss = H⁽⁰⁾_ss + Im{Z_sf A_ff⁻¹ Z_fs}` with `Ã` the embedded `A_ff⁻¹`.
pub fn limit_slh(family: &ScaledSlhFamily) -> Result<LimitModel> {
    let lp = limit_parts(family)?;
    let p = &family.partition;
    let nm = family.s.rows();
    let m = family.dim();
    let ps = p.slow_projector();
    let z = &lp.kzr.z_blocks;

    let shat = &(&CMatrix::identity(nm) + &(&(&family.l1 * &lp.a_tilde) * &family.l1.dagger())) * &family.s;
    let lhat = &(&family.l0 - &(&(&family.l1 * &lp.a_tilde) * &lp.kzr.z)) * &ps;
    let h0 = partition_operator(&family.h0, p)?;
    let hss = &h0.ss + &(&(&z.sf * &lp.a_inv) * &z.fs).im_part();
    let hhat = hermitian(&p.embed_ss(&hss));

    let h1 = partition_operator(&family.h1, p)?;
    let h2 = partition_operator(&family.h2, p)?;
    let a_inv_dag = lp.a_inv.dagger();
    let zfs_d = z.fs.dagger();
    let hhat_ss_alt = &(&(&h0.ss - &(&(&zfs_d * &a_inv_dag) * &h1.fs)) - &(&(&h1.sf * &lp.a_inv) * &z.fs))
        + &(&(&(&(&zfs_d * &a_inv_dag) * &h2.ff) * &lp.a_inv) * &z.fs);

    let mut limit = LimitModel {
        shat,
        lhat,
        hhat,
        hhat_ss_alt,
        partition: p.clone(),
        n_inputs: family.n_inputs(),
        decoupled: false,
        slow_model: None,
    };
    debug_assert_eq!(limit.lhat.shape(), (nm, m));
    let verdict = check_decoupling(&limit, DEFAULT_TOL);
    limit.decoupled = verdict.decoupled;
    limit.slow_model = verdict.slow_model;
    Ok(limit)
}

fn hermitian(x: &CMatrix) -> CMatrix {
    (x + &x.dagger()).scale_real(0.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingVerdict {
    pub decoupled: bool,
    /// `‖L̂_f‖`, `‖Ŝ_sf‖`, `‖Ŝ_fs‖`.
    pub residuals: [f64; 3],
    pub slow_model: Option<SlhModel>,
}

/// Tests `L̂_f = Ŝ_sf = Ŝ_fs = 0` and, when they hold, emits the slow model
/// `(Ŝ_ss, L̂_s, Ĥ_ss)`.
pub fn check_decoupling(limit: &LimitModel, tol: f64) -> DecouplingVerdict {
    let p = &limit.partition;
    let lifted = p.lift(limit.n_inputs);
    let lb = partition_rect(&limit.lhat, &lifted, p).expect("limit shapes");
    let sb = partition_operator(&limit.shat, &lifted).expect("limit shapes");
    let residuals = [lb.fs.max_abs(), sb.sf.max_abs(), sb.fs.max_abs()];
    let decoupled = residuals.iter().all(|&r| r <= tol);
    let slow_model = if decoupled {
        SlhModel::with_tol(sb.ss, lb.ss, limit.hhat_ss(), tol.max(DEFAULT_TOL)).ok()
    } else {
        None
    };
    DecouplingVerdict { decoupled, residuals, slow_model }
}

/// `lim_k Σ_k(s)` with `Σ_k(s) = L(k)(s + iH(k))⁻¹L(k)*`.
///
/// Writing `L̃ = [L⁽⁰⁾_s, L⁽¹⁾_f]` (slow columns from `L⁽⁰⁾`, fast columns from
/// `L⁽¹⁾`) the limit is `L̃ Λ L̃*`, where `Λ` is the scaled resolvent limit of
/// `M = iH(k)`. Its slow-slow block is `(s + iH̃_ss)⁻¹` with
/// `H̃_ss = H⁽⁰⁾_ss - H⁽¹⁾_sf(H⁽²⁾_ff)⁻¹H⁽¹⁾_fs`. Requires `H⁽²⁾_ff` invertible.
pub fn sigma_allpass_limit(family: &ScaledSlhFamily, s: C64) -> Result<CMatrix> {
    let st = family.structure();
    let fails = st.failures(DEFAULT_TOL);
    if !fails.is_empty() {
        return Err(SlhError::AssumptionViolated(fails.join("; ")));
    }
    let p = &family.partition;
    let h0 = partition_operator(&family.h0, p)?;
    let h1 = partition_operator(&family.h1, p)?;
    let h2 = partition_operator(&family.h2, p)?;
    let lam = scaled_resolvent_limit(&h0.ss.scale(I), &h1.sf.scale(I), &h1.fs.scale(I), &h2.ff.scale(I), s)?;
    let rows: Vec<usize> = (0..family.l0.rows()).collect();
    let ltilde = CMatrix::hstack(&[&family.l0.select(&rows, p.slow()), &family.l1.select(&rows, p.fast())]);
    let ordered = BlockPartition::new(p.dim(), (0..p.n_slow()).collect())?;
    let lam_full = lam.reassemble(&ordered);
    Ok(&(&ltilde * &lam_full) * &ltilde.dagger())
}

/// `T_k(s)` evaluated through the rescaled resolvent
/// `D⁻¹(s - K(k))D⁻¹` with `D = diag(1 on slow, k on fast)`, which keeps
/// every block of order one for large `k`.
pub fn finite_k_char_op(family: &ScaledSlhFamily, k: f64, s: C64) -> Result<BlockOperatorMatrix> {
    if !(k > 0.0) {
        return Err(SlhError::BadParam("k must be positive".into()));
    }
    let p = &family.partition;
    let m = family.dim();
    let mut dinv = vec![1.0; m];
    for &f in p.fast() {
        dinv[f] = 1.0 / k;
    }
    let dinv = CMatrix::diag_real(&dinv);
    let kk = kzr_decompose(family)?.k_at(k);
    let scaled = &(&dinv * &kk.shifted_neg(s)) * &dinv;
    let g = scaled.inverse().map_err(|e| e.at_resolvent(s, "scaled s - K(k)"))?;
    let ld = &(&family.l1.scale_real(k) + &family.l0) * &dinv;
    let t = &family.s - &(&(&(&ld * &g) * &ld.dagger()) * &family.s);
    Ok(BlockOperatorMatrix::new(t, m, BlockKind::CharOp))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    /// `(k, ‖T_k(s) - T̂(s)‖)` in the order given.
    pub rows: Vec<(f64, f64)>,
    /// Least-squares slope of `log err` against `log k` over rows with
    /// `k ≥ 100`; `None` when fewer than three such rows exist.
    pub slope: Option<f64>,
}

pub fn convergence_study(family: &ScaledSlhFamily, s: C64, k_values: &[f64]) -> Result<ConvergenceStudy> {
    let limit = limit_char_op(family, s)?;
    let mut rows = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let tk = finite_k_char_op(family, k, s)?;
        rows.push((k, tk.data().max_abs_diff(limit.data())));
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|(k, e)| *k >= 100.0 && *e > 0.0).map(|(k, e)| (k.ln(), e.ln())).collect();
    Ok(ConvergenceStudy { slope: fit_slope(&pts), rows })
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slow indices read off the null space of `A`, which must be spanned by
/// basis vectors. Singular values below `1e-10·‖A‖` count as zero.
pub fn slow_indices_from_kernel(a: &CMatrix) -> Result<Vec<usize>> {
    let n = a.rows();
    if !a.is_square() || n == 0 {
        return Err(SlhError::BadParam("kernel search needs a square non-empty matrix".into()));
    }
    let dm = DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
    let svd = dm.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thresh = 1e-10 * smax.max(f64::MIN_POSITIVE);
    let null_rows: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] <= thresh).collect();
    if null_rows.is_empty() {
        return Err(SlhError::BadParam("A has a trivial kernel".into()));
    }
    // projector onto the kernel; its diagonal marks the basis vectors spanned
    let proj = CMatrix::from_fn(n, n, |i, j| {
        null_rows.iter().map(|&r| v_t[(r, i)].conj() * v_t[(r, j)]).sum()
    });
    let slow: Vec<usize> = (0..n).filter(|&i| proj[(i, i)].re > 0.5).collect();
    let mut expected = CMatrix::zeros(n, n);
    for &i in &slow {
        expected[(i, i)] = C64::new(1.0, 0.0);
    }
    if slow.len() != null_rows.len() || proj.max_abs_diff(&expected) > 1e-8 {
        return Err(SlhError::BadParam("kernel of A is not aligned with the basis".into()));
    }
    Ok(slow)
}
