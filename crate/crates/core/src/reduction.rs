//! Block decomposition of the plant space into slow and fast subspaces,
//! Schur–Feshbach resolvent blocks and decoupling tests.
//!
//! Partitions are index sets, so moving to block form is a pure permutation
//! and reassembly is bit-exact.

use crate::characteristic::char_op;
use crate::error::{Result, SlhError};
use crate::matrix::{CMatrix, C64};
use crate::model::SlhModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    dim: usize,
    slow: Vec<usize>,
    fast: Vec<usize>,
}

impl BlockPartition {
    /// The fast indices are the complement of `slow`, in increasing order.
    /// `slow` keeps the caller's order.
    pub fn new(dim: usize, slow: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; dim];
        for &i in &slow {
            if i >= dim {
                return Err(SlhError::BadParam(format!("slow index {i} out of range for dim {dim}")));
            }
            if seen[i] {
                return Err(SlhError::BadParam(format!("slow index {i} repeated")));
            }
            seen[i] = true;
        }
        let fast: Vec<usize> = (0..dim).filter(|&i| !seen[i]).collect();
        if slow.is_empty() || fast.is_empty() {
            return Err(SlhError::BadParam("slow and fast subspaces must both be non-empty".into()));
        }
        Ok(BlockPartition { dim, slow, fast })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slow(&self) -> &[usize] {
        &self.slow
    }

    pub fn fast(&self) -> &[usize] {
        &self.fast
    }

    pub fn n_slow(&self) -> usize {
        self.slow.len()
    }

    pub fn n_fast(&self) -> usize {
        self.fast.len()
    }

    /// The same split applied to every input channel of an `n`-input model,
    /// i.e. on `ℂⁿ ⊗ h`.
    pub fn lift(&self, n: usize) -> BlockPartition {
        let lift = |idx: &[usize]| -> Vec<usize> {
            (0..n).flat_map(|j| idx.iter().map(move |&i| j * self.dim + i)).collect()
        };
        BlockPartition { dim: n * self.dim, slow: lift(&self.slow), fast: lift(&self.fast) }
    }

    /// `P_s` as a `dim × dim` matrix.
    pub fn slow_projector(&self) -> CMatrix {
        projector_on(&self.slow, self.dim)
    }

    /// `P_f` as a `dim × dim` matrix.
    pub fn fast_projector(&self) -> CMatrix {
        projector_on(&self.fast, self.dim)
    }

    /// Embeds a `|f| × |f|` matrix into the fast-fast block of a
    /// `dim × dim` zero matrix.
    pub fn embed_ff(&self, x: &CMatrix) -> CMatrix {
        embed(x, &self.fast, &self.fast, self.dim, self.dim)
    }

    pub fn embed_ss(&self, x: &CMatrix) -> CMatrix {
        embed(x, &self.slow, &self.slow, self.dim, self.dim)
    }
}

fn projector_on(idx: &[usize], dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for &i in idx {
        p[(i, i)] = C64::new(1.0, 0.0);
    }
    p
}

pub(crate) fn embed(x: &CMatrix, rows: &[usize], cols: &[usize], nr: usize, nc: usize) -> CMatrix {
    let mut out = CMatrix::zeros(nr, nc);
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            out[(i, j)] = x[(a, b)];
        }
    }
    out
}

/// `X` split as `[[X_ss, X_sf], [X_fs, X_ff]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockedOperator {
    pub ss: CMatrix,
    pub sf: CMatrix,
    pub fs: CMatrix,
    pub ff: CMatrix,
}

/// Slow-slow part of an `nm × nm` operator matrix, with each input block
/// restricted to the slow subspace.
pub fn slow_restriction(x: &CMatrix, p: &BlockPartition, n_inputs: usize) -> CMatrix {
    let lifted = p.lift(n_inputs);
    x.select(lifted.slow(), lifted.slow())
}

pub fn partition_operator(x: &CMatrix, p: &BlockPartition) -> Result<BlockedOperator> {
    partition_rect(x, p, p)
}

/// Splits a rectangular operator with separate row and column partitions.
pub fn partition_rect(x: &CMatrix, rows: &BlockPartition, cols: &BlockPartition) -> Result<BlockedOperator> {
    if x.shape() != (rows.dim, cols.dim) {
        return Err(SlhError::DimensionMismatch(format!(
            "operator is {}x{}, partition expects {}x{}",
            x.rows(),
            x.cols(),
            rows.dim,
            cols.dim
        )));
    }
    Ok(BlockedOperator {
        ss: x.select(&rows.slow, &cols.slow),
        sf: x.select(&rows.slow, &cols.fast),
        fs: x.select(&rows.fast, &cols.slow),
        ff: x.select(&rows.fast, &cols.fast),
    })
}

impl BlockedOperator {
    pub fn reassemble(&self, p: &BlockPartition) -> CMatrix {
        self.reassemble_rect(p, p)
    }

    pub fn reassemble_rect(&self, rows: &BlockPartition, cols: &BlockPartition) -> CMatrix {
        let mut out = embed(&self.ss, &rows.slow, &cols.slow, rows.dim, cols.dim);
        for (blk, r, c) in [
            (&self.sf, &rows.slow, &cols.fast),
            (&self.fs, &rows.fast, &cols.slow),
            (&self.ff, &rows.fast, &cols.fast),
        ] {
            for (a, &i) in r.iter().enumerate() {
                for (b, &j) in c.iter().enumerate() {
                    out[(i, j)] = blk[(a, b)];
                }
            }
        }
        out
    }
}

/// Blocks of `(s - K)⁻¹` in Schur–Feshbach form, with index 1 the slow and
/// index 2 the fast subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurFeshbachBlocks {
    pub d11: CMatrix,
    pub d12: CMatrix,
    pub d21: CMatrix,
    pub d22: CMatrix,
    /// `K̂₁₁(s) = K₁₁ + K₁₂(s - K₂₂)⁻¹K₂₁`.
    pub khat11: CMatrix,
}

impl SchurFeshbachBlocks {
    pub fn reassemble(&self, p: &BlockPartition) -> CMatrix {
        BlockedOperator { ss: self.d11.clone(), sf: self.d12.clone(), fs: self.d21.clone(), ff: self.d22.clone() }
            .reassemble(p)
    }
}

pub fn schur_feshbach(k: &BlockedOperator, s: C64) -> Result<SchurFeshbachBlocks> {
    let delta22 = k.ff.shifted_neg(s).inverse().map_err(|e| e.at_resolvent(s, "s - K22"))?;
    let khat11 = &k.ss + &(&(&k.sf * &delta22) * &k.fs);
    let d11 = khat11.shifted_neg(s).inverse().map_err(|e| e.at_resolvent(s, "s - K̂11(s)"))?;
    let d12 = &(&d11 * &k.sf) * &delta22;
    let d21 = &(&delta22 * &k.fs) * &d11;
    let d22 = &delta22 + &(&(&(&delta22 * &k.fs) * &d11) * &(&k.sf * &delta22));
    Ok(SchurFeshbachBlocks { d11, d12, d21, d22, khat11 })
}

/// The four blocks `T_ab(s)` of the characteristic operator with respect to
/// the partition lifted to all input channels.
#[derive(Debug, Clone, PartialEq)]
pub struct CharBlocks {
    pub t11: CMatrix,
    pub t12: CMatrix,
    pub t21: CMatrix,
    pub t22: CMatrix,
}

impl CharBlocks {
    /// Reassembles the `nm × nm` characteristic operator.
    pub fn reassemble(&self, p: &BlockPartition, n_inputs: usize) -> CMatrix {
        BlockedOperator { ss: self.t11.clone(), sf: self.t12.clone(), fs: self.t21.clone(), ff: self.t22.clone() }
            .reassemble(&p.lift(n_inputs))
    }
}

/// `T_ab = (δ_ac - L_ad Δ̂_de L_ce*) S_cb` evaluated block by block.
pub fn char_blocks(model: &SlhModel, p: &BlockPartition, s: C64) -> Result<CharBlocks> {
    if p.dim != model.dim() {
        return Err(SlhError::DimensionMismatch(format!(
            "partition dim {} vs plant dim {}",
            p.dim,
            model.dim()
        )));
    }
    let lifted = p.lift(model.n_inputs());
    let kb = partition_operator(&model.k_operator(), p)?;
    let sf = schur_feshbach(&kb, s)?;
    let delta = [[&sf.d11, &sf.d12], [&sf.d21, &sf.d22]];
    let lb = partition_rect(model.l(), &lifted, p)?;
    let lblk = [[&lb.ss, &lb.sf], [&lb.fs, &lb.ff]];
    let sb = partition_operator(model.s(), &lifted)?;
    let sblk = [[&sb.ss, &sb.sf], [&sb.fs, &sb.ff]];
    let sizes = [lifted.slow.len(), lifted.fast.len()];

    let mut out: Vec<CMatrix> = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = CMatrix::zeros(sizes[a], sizes[b]);
            for c in 0..2 {
                let mut factor = if a == c { CMatrix::identity(sizes[a]) } else { CMatrix::zeros(sizes[a], sizes[c]) };
                for d in 0..2 {
                    for e in 0..2 {
                        factor -= &(&(lblk[a][d] * delta[d][e]) * &lblk[c][e].dagger());
                    }
                }
                acc += &(&factor * sblk[c][b]);
            }
            out.push(acc);
        }
    }
    let mut it = out.into_iter();
    Ok(CharBlocks {
        t11: it.next().unwrap(),
        t12: it.next().unwrap(),
        t21: it.next().unwrap(),
        t22: it.next().unwrap(),
    })
}

/// Outcome of a check that is certified only at finitely many sample
/// points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledReport {
    pub holds: bool,
    pub max_residual: f64,
    /// Points where the comparison was carried out.
    pub samples_used: Vec<C64>,
    /// Points skipped because a resolvent was singular there.
    pub skipped: Vec<C64>,
}

impl SampledReport {
    fn finish(samples_used: Vec<C64>, skipped: Vec<C64>, max_residual: f64, tol: f64) -> Self {
        SampledReport { holds: !samples_used.is_empty() && max_residual <= tol, max_residual, samples_used, skipped }
    }
}

/// Whether the off-diagonal blocks `T₁₂`, `T₂₁` vanish at every sample.
pub fn is_decoupled(model: &SlhModel, p: &BlockPartition, samples: &[C64], tol: f64) -> SampledReport {
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    let mut worst: f64 = 0.0;
    for &s in samples {
        match char_blocks(model, p, s) {
            Ok(tb) => {
                worst = worst.max(tb.t12.max_abs()).max(tb.t21.max_abs());
                used.push(s);
            }
            Err(_) => skipped.push(s),
        }
    }
    SampledReport::finish(used, skipped, worst, tol)
}

/// Whether `T_full = [[T_candidate, 0], [0, I]]` at every sample, where the
/// candidate lives on the slow subspace.
pub fn is_reduced_model(
    full: &SlhModel,
    candidate: &SlhModel,
    p: &BlockPartition,
    samples: &[C64],
    tol: f64,
) -> SampledReport {
    let shape_ok = candidate.dim() == p.n_slow() && candidate.n_inputs() == full.n_inputs() && p.dim == full.dim();
    if !shape_ok {
        return SampledReport::finish(Vec::new(), samples.to_vec(), f64::INFINITY, tol);
    }
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    let mut worst: f64 = 0.0;
    for &s in samples {
        match (char_blocks(full, p, s), char_op(candidate, s)) {
            (Ok(tb), Ok(tc)) => {
                let id = CMatrix::identity(tb.t22.rows());
                worst = worst
                    .max(tb.t11.max_abs_diff(tc.data()))
                    .max(tb.t12.max_abs())
                    .max(tb.t21.max_abs())
                    .max(tb.t22.max_abs_diff(&id));
                used.push(s);
            }
            _ => skipped.push(s),
        }
    }
    SampledReport::finish(used, skipped, worst, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, re};
    use crate::operators::{pauli, Pauli};

    #[test]
    fn partition_rejects_bad_indices() {
        assert!(BlockPartition::new(3, vec![3]).is_err());
        assert!(BlockPartition::new(3, vec![0, 0]).is_err());
        assert!(BlockPartition::new(2, vec![]).is_err());
        assert!(BlockPartition::new(2, vec![0, 1]).is_err());
        let p = BlockPartition::new(4, vec![2, 0]).unwrap();
        assert_eq!(p.fast(), &[1, 3]);
        assert_eq!(p.lift(2).slow(), &[2, 0, 6, 4]);
    }

    #[test]
    fn identity_and_sigma_x_blocks() {
        let p = BlockPartition::new(3, vec![0]).unwrap();
        let b = partition_operator(&CMatrix::identity(3), &p).unwrap();
        assert_eq!(b.ss, CMatrix::identity(1));
        assert_eq!(b.ff, CMatrix::identity(2));
        assert_eq!(b.sf.max_abs() + b.fs.max_abs(), 0.0);

        let p2 = BlockPartition::new(2, vec![0]).unwrap();
        let bx = partition_operator(&pauli(Pauli::X), &p2).unwrap();
        assert_eq!(bx.sf, CMatrix::identity(1));
        assert_eq!(bx.fs, CMatrix::identity(1));
        assert_eq!(bx.reassemble(&p2), pauli(Pauli::X));
    }

    #[test]
    fn scalar_schur_feshbach() {
        let p = BlockPartition::new(2, vec![0]).unwrap();
        let k = partition_operator(&pauli(Pauli::X), &p).unwrap();
        let sf = schur_feshbach(&k, re(2.0)).unwrap();
        assert!((sf.khat11[(0, 0)] - 0.5).norm() < 1e-15);
        assert!((sf.d11[(0, 0)] - 1.0 / 1.5).norm() < 1e-15);
    }

    #[test]
    fn decoupled_resolvent_is_block_diagonal() {
        let k = CMatrix::diag(&[c(-1.0, 0.5), c(-2.0, -1.0)]);
        let p = BlockPartition::new(2, vec![0]).unwrap();
        let s = c(1.0, 0.3);
        let sf = schur_feshbach(&partition_operator(&k, &p).unwrap(), s).unwrap();
        assert!((sf.d11[(0, 0)] - 1.0 / (s - k[(0, 0)])).norm() < 1e-15);
        assert!((sf.d22[(0, 0)] - 1.0 / (s - k[(1, 1)])).norm() < 1e-15);
        assert_eq!(sf.d12.max_abs() + sf.d21.max_abs(), 0.0);
    }

    #[test]
    fn swap_scattering_is_not_decoupled() {
        let p = BlockPartition::new(2, vec![1]).unwrap();
        let swap = SlhModel::new(pauli(Pauli::X), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)).unwrap();
        assert!(!is_decoupled(&swap, &p, &[re(1.0)], 1e-9).holds);
        let diag = SlhModel::new(CMatrix::diag(&[c(0.0, 1.0), re(1.0)]), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2))
            .unwrap();
        assert!(is_decoupled(&diag, &p, &[re(1.0), c(0.5, 2.0)], 1e-12).holds);
    }

    #[test]
    fn reduced_model_of_diagonal_embedding() {
        let g = 0.8f64;
        let cand = SlhModel::new(
            CMatrix::identity(1),
            CMatrix::from_real_rows(&[&[g.sqrt()]]),
            CMatrix::from_real_rows(&[&[0.3]]),
        )
        .unwrap();
        let full = SlhModel::new(
            CMatrix::identity(2),
            CMatrix::diag_real(&[g.sqrt(), 0.0]),
            CMatrix::diag_real(&[0.3, 5.0]),
        )
        .unwrap();
        let p = BlockPartition::new(2, vec![0]).unwrap();
        let rep = is_reduced_model(&full, &cand, &p, &[re(1.0), c(0.2, 3.0)], 1e-12);
        assert!(rep.holds, "{rep:?}");
        assert_eq!(rep.samples_used.len(), 2);
    }
}
