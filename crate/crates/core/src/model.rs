//! SLH triples `(S, L, H)` on an `m`-dimensional plant with `n` inputs.
//!
//! `S` is stored as one `nm × nm` matrix whose `(i, j)` block of size `m × m`
//! is the operator entry `S_ij`; `L` is the stacked column `[L_1; …; L_n]` of
//! shape `nm × m`; `H` is `m × m`.

use crate::block::{BlockKind, BlockOperatorMatrix};
use crate::error::{Result, SlhError};
use crate::matrix::{CMatrix, C64};
use crate::operators::{embed, TruncatedMode};

/// Default tolerance for unitarity and Hermiticity validation.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SlhModel {
    n_inputs: usize,
    dim: usize,
    s: CMatrix,
    l: CMatrix,
    h: CMatrix,
    basis_labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tol: f64,
    pub dims_ok: bool,
    pub dim_errors: Vec<String>,
    pub s_unitarity: f64,
    pub h_hermiticity: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.dims_ok && self.s_unitarity <= self.tol && self.h_hermiticity <= self.tol
    }

    /// One line per failed condition, naming the offending matrix.
    pub fn failures(&self) -> Vec<String> {
        let mut out = self.dim_errors.clone();
        if self.dims_ok {
            if !(self.s_unitarity <= self.tol) {
                out.push(format!("S is not unitary (residual {:.3e} > tol {:.1e})", self.s_unitarity, self.tol));
            }
            if !(self.h_hermiticity <= self.tol) {
                out.push(format!("H is not Hermitian (residual {:.3e} > tol {:.1e})", self.h_hermiticity, self.tol));
            }
        }
        out
    }
}

/// Coefficients of the plant Heisenberg equation for an observable `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergCoefficients {
    /// Lindbladian `𝓛X`.
    pub lx: CMatrix,
    /// `𝓜_i X`, coefficient of `dB_i*`.
    pub mx: Vec<CMatrix>,
    /// `𝓝_i X`, coefficient of `dB_i`.
    pub nx: Vec<CMatrix>,
    /// `𝓢_jk X` in row-major `(j, k)` order.
    pub sx: Vec<CMatrix>,
}

impl HeisenbergCoefficients {
    pub fn sx(&self, j: usize, k: usize) -> &CMatrix {
        &self.sx[j * self.mx.len() + k]
    }
}

/// State-space matrices of the equivalent passive realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Abcd {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

/// Validates the triple without constructing a model.
pub fn validate_parts(s: &CMatrix, l: &CMatrix, h: &CMatrix, tol: f64) -> ValidationReport {
    let mut dim_errors = Vec::new();
    let m = h.rows();
    if !h.is_square() || m == 0 {
        dim_errors.push(format!("H must be square and non-empty, got {}x{}", h.rows(), h.cols()));
    }
    if !s.is_square() {
        dim_errors.push(format!("S must be square, got {}x{}", s.rows(), s.cols()));
    }
    if m > 0 {
        if l.cols() != m {
            dim_errors.push(format!("L has {} columns, expected dim = {m}", l.cols()));
        }
        if !l.rows().is_multiple_of(m) || l.rows() == 0 {
            dim_errors.push(format!("L has {} rows, not a positive multiple of dim = {m}", l.rows()));
        }
        if s.rows() != l.rows() {
            dim_errors.push(format!("S is {}x{}, expected {}x{} to match L", s.rows(), s.cols(), l.rows(), l.rows()));
        }
    }
    for (name, mat) in [("S", s), ("L", l), ("H", h)] {
        if !mat.is_finite() {
            dim_errors.push(format!("{name} has non-finite entries"));
        }
    }
    let dims_ok = dim_errors.is_empty();
    let (s_unitarity, h_hermiticity) = if dims_ok {
        (s.check_unitary(tol).residual, h.check_hermitian(tol).residual)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    ValidationReport { tol, dims_ok, dim_errors, s_unitarity, h_hermiticity }
}

impl SlhModel {
    /// Validated construction at [`DEFAULT_TOL`].
    pub fn new(s: CMatrix, l: CMatrix, h: CMatrix) -> Result<Self> {
        Self::with_tol(s, l, h, DEFAULT_TOL)
    }

    pub fn with_tol(s: CMatrix, l: CMatrix, h: CMatrix, tol: f64) -> Result<Self> {
        let report = validate_parts(&s, &l, &h, tol);
        if !report.passed() {
            return Err(SlhError::InvalidModel(report.failures().join("; ")));
        }
        Ok(Self::assemble(s, l, h))
    }

    /// Checks shapes only; use [`SlhModel::validate`] for the physical checks.
    pub fn from_parts(s: CMatrix, l: CMatrix, h: CMatrix) -> Result<Self> {
        let report = validate_parts(&s, &l, &h, f64::INFINITY);
        if !report.dims_ok {
            return Err(SlhError::DimensionMismatch(report.dim_errors.join("; ")));
        }
        Ok(Self::assemble(s, l, h))
    }

    fn assemble(s: CMatrix, l: CMatrix, h: CMatrix) -> Self {
        let dim = h.rows();
        SlhModel { n_inputs: l.rows() / dim, dim, s, l, h, basis_labels: None }
    }

    /// `(I, 0, 0)` with `n` inputs on a `dim`-dimensional plant.
    pub fn trivial(n_inputs: usize, dim: usize) -> Self {
        Self::assemble(
            CMatrix::identity(n_inputs * dim),
            CMatrix::zeros(n_inputs * dim, dim),
            CMatrix::zeros(dim, dim),
        )
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(SlhError::DimensionMismatch(format!(
                "{} basis labels for dim {}",
                labels.len(),
                self.dim
            )));
        }
        self.basis_labels = Some(labels);
        Ok(self)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn l(&self) -> &CMatrix {
        &self.l
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn basis_labels(&self) -> Option<&[String]> {
        self.basis_labels.as_deref()
    }

    /// Operator entry `S_ij`.
    pub fn s_block(&self, i: usize, j: usize) -> CMatrix {
        let m = self.dim;
        self.s.sub_block(i * m, j * m, m, m)
    }

    /// Operator entry `L_i`.
    pub fn l_block(&self, i: usize) -> CMatrix {
        let m = self.dim;
        self.l.sub_block(i * m, 0, m, m)
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_parts(&self.s, &self.l, &self.h, tol)
    }

    /// `K = -½ Σ L_i* L_i - iH`.
    pub fn k_operator(&self) -> CMatrix {
        k_from(&self.l, &self.h)
    }

    /// `[[K, -L*S], [L, S]]` as an `(n+1) × (n+1)` array of `m × m` blocks.
    pub fn model_matrix(&self) -> BlockOperatorMatrix {
        let top = CMatrix::hstack(&[&self.k_operator(), &-(&self.l.dagger() * &self.s)]);
        let bottom = CMatrix::hstack(&[&self.l, &self.s]);
        BlockOperatorMatrix::new(CMatrix::vstack(&[&top, &bottom]), self.dim, BlockKind::ModelMatrix)
    }

    pub fn heisenberg_coeffs(&self, x: &CMatrix) -> Result<HeisenbergCoefficients> {
        if x.shape() != (self.dim, self.dim) {
            return Err(SlhError::DimensionMismatch(format!(
                "observable is {}x{}, plant dim is {}",
                x.rows(),
                x.cols(),
                self.dim
            )));
        }
        let n = self.n_inputs;
        let ls: Vec<CMatrix> = (0..n).map(|i| self.l_block(i)).collect();
        let lds: Vec<CMatrix> = ls.iter().map(CMatrix::dagger).collect();

        let mut lx = x.commutator(&self.h).scale(C64::new(0.0, -1.0));
        for (li, ldi) in ls.iter().zip(&lds) {
            lx += &(ldi * &x.commutator(li)).scale_real(0.5);
            lx += &(&ldi.commutator(x) * li).scale_real(0.5);
        }

        let mut mx = Vec::with_capacity(n);
        let mut nx = Vec::with_capacity(n);
        for i in 0..n {
            let mut m_i = CMatrix::zeros(self.dim, self.dim);
            let mut n_i = CMatrix::zeros(self.dim, self.dim);
            for j in 0..n {
                m_i += &(&self.s_block(j, i).dagger() * &x.commutator(&ls[j]));
                n_i += &(&lds[j].commutator(x) * &self.s_block(j, i));
            }
            mx.push(m_i);
            nx.push(n_i);
        }

        let mut sx = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                let mut acc = if i == k { -x } else { CMatrix::zeros(self.dim, self.dim) };
                for j in 0..n {
                    acc += &(&(&self.s_block(j, i).dagger() * x) * &self.s_block(j, k));
                }
                sx.push(acc);
            }
        }
        Ok(HeisenbergCoefficients { lx, mx, nx, sx })
    }

    /// `(V*SV, V*LV, V*HV)` with `V` acting blockwise.
    pub fn rotate(&self, v: &CMatrix) -> Result<SlhModel> {
        self.check_rotation(v)?;
        let big = lift_inputs(v, self.n_inputs);
        let bigd = big.dagger();
        let vd = v.dagger();
        Ok(SlhModel {
            s: &(&bigd * &self.s) * &big,
            l: &(&bigd * &self.l) * v,
            h: &(&vd * &self.h) * v,
            ..self.clone()
        })
    }

    /// `(S, LV, V*HV)`, which leaves the characteristic operator unchanged.
    pub fn gauge(&self, v: &CMatrix) -> Result<SlhModel> {
        self.check_rotation(v)?;
        Ok(SlhModel {
            l: &self.l * v,
            h: &(&v.dagger() * &self.h) * v,
            ..self.clone()
        })
    }

    fn check_rotation(&self, v: &CMatrix) -> Result<()> {
        if v.shape() != (self.dim, self.dim) {
            return Err(SlhError::DimensionMismatch(format!(
                "rotation is {}x{}, plant dim is {}",
                v.rows(),
                v.cols(),
                self.dim
            )));
        }
        let chk = v.check_unitary(DEFAULT_TOL);
        if !chk.ok {
            return Err(SlhError::BadParam(format!("rotation is not unitary (residual {:.3e})", chk.residual)));
        }
        Ok(())
    }

    /// `A = K`, `B = -L*S`, `C = L`, `D = S`.
    pub fn abcd(&self) -> Abcd {
        Abcd {
            a: self.k_operator(),
            b: -(&self.l.dagger() * &self.s),
            c: self.l.clone(),
            d: self.s.clone(),
        }
    }
}

pub(crate) fn k_from(l: &CMatrix, h: &CMatrix) -> CMatrix {
    &(&l.dagger() * l).scale_real(-0.5) - &h.scale(C64::new(0.0, 1.0))
}

/// `I_n ⊗ op`: the same plant operator on every input channel.
pub fn lift_inputs(op: &CMatrix, n: usize) -> CMatrix {
    CMatrix::identity(n).kron(op)
}

/// Applies `f` to every `bd × bd` block of `x`.
pub(crate) fn map_blocks(x: &CMatrix, bd: usize, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let (p, q) = (x.rows() / bd, x.cols() / bd);
    let mut parts: Vec<Vec<CMatrix>> = Vec::with_capacity(p);
    for i in 0..p {
        parts.push((0..q).map(|j| f(&x.sub_block(i * bd, j * bd, bd, bd))).collect());
    }
    let (br, bc) = parts.first().and_then(|r| r.first()).map_or((0, 0), CMatrix::shape);
    let mut out = CMatrix::zeros(p * br, q * bc);
    for (i, row) in parts.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            out.set_block(i * br, j * bc, b);
        }
    }
    out
}

/// Cascade `B ◁ A`: the output of `A` feeds `B`. The plant space is
/// `h_B ⊗ h_A` (B outermost).
pub fn series_product(b: &SlhModel, a: &SlhModel) -> Result<SlhModel> {
    if b.n_inputs != a.n_inputs {
        return Err(SlhError::DimensionMismatch(format!(
            "series product needs equal input counts, got {} and {}",
            b.n_inputs, a.n_inputs
        )));
    }
    let (mb, ma) = (b.dim, a.dim);
    let id_a = CMatrix::identity(ma);
    let id_b = CMatrix::identity(mb);
    let outer = |x: &CMatrix| map_blocks(x, mb, |blk| blk.kron(&id_a));
    let inner = |x: &CMatrix| map_blocks(x, ma, |blk| id_b.kron(blk));

    let sb = outer(&b.s);
    let s = &sb * &inner(&a.s);
    let l = &outer(&b.l) + &(&sb * &inner(&a.l));
    let cross = &outer(&(&b.l.dagger() * &b.s)) * &inner(&a.l);
    let h = &(&b.h.kron(&id_a) + &id_b.kron(&a.h)) + &cross.im_part();

    let labels = match (&b.basis_labels, &a.basis_labels) {
        (Some(lb), Some(la)) => Some(
            lb.iter()
                .flat_map(|x| la.iter().map(move |y| format!("{x}⊗{y}")))
                .collect(),
        ),
        _ => None,
    };
    Ok(SlhModel { n_inputs: b.n_inputs, dim: mb * ma, s, l, h, basis_labels: labels })
}

/// Linear passive model data: `S_ij = D_ij`, `L_i = Σ C_iα a_α`,
/// `H = Σ a_α* Ω_αβ a_β`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPassiveSpec {
    pub d: CMatrix,
    pub c: CMatrix,
    pub omega: CMatrix,
    pub cutoffs: Vec<TruncatedMode>,
}

impl LinearPassiveSpec {
    /// Modal state-space matrices `A = -½C*C - iΩ`, `B = -C*D`, `C`, `D`,
    /// whose transfer function is the vacuum block of the characteristic
    /// operator.
    pub fn abcd(&self) -> Abcd {
        Abcd {
            a: k_from(&self.c, &self.omega),
            b: -(&self.c.dagger() * &self.d),
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }
}

pub fn realize_passive(spec: &LinearPassiveSpec) -> Result<SlhModel> {
    let n = spec.d.rows();
    let modes = spec.cutoffs.len();
    if !spec.d.is_square() || n == 0 {
        return Err(SlhError::BadParam("D must be square and non-empty".into()));
    }
    if spec.c.shape() != (n, modes) {
        return Err(SlhError::BadParam(format!(
            "C is {}x{}, expected {n}x{modes}",
            spec.c.rows(),
            spec.c.cols()
        )));
    }
    if spec.omega.shape() != (modes, modes) {
        return Err(SlhError::BadParam(format!("Omega must be {modes}x{modes}")));
    }
    if !spec.d.is_unitary(DEFAULT_TOL) {
        return Err(SlhError::BadParam("D is not unitary".into()));
    }
    if !spec.omega.is_hermitian(DEFAULT_TOL) {
        return Err(SlhError::BadParam("Omega is not Hermitian".into()));
    }
    let dims: Vec<usize> = spec.cutoffs.iter().map(TruncatedMode::dim).collect();
    let m: usize = dims.iter().product();
    let ladder: Vec<CMatrix> =
        spec.cutoffs.iter().enumerate().map(|(k, mode)| embed(&mode.annihilator(), k, &dims)).collect();

    let s = spec.d.kron(&CMatrix::identity(m));
    let mut l = CMatrix::zeros(n * m, m);
    for i in 0..n {
        let mut li = CMatrix::zeros(m, m);
        for (alpha, a) in ladder.iter().enumerate() {
            li += &a.scale(spec.c[(i, alpha)]);
        }
        l.set_block(i * m, 0, &li);
    }
    let mut h = CMatrix::zeros(m, m);
    for (alpha, aa) in ladder.iter().enumerate() {
        let ad = aa.dagger();
        for (beta, ab) in ladder.iter().enumerate() {
            h += &(&ad * ab).scale(spec.omega[(alpha, beta)]);
        }
    }
    SlhModel::new(s, l, h)
}
