//! Standard operators: Pauli matrices, truncated Fock-space ladder operators,
//! projectors and tensor embeddings.
//!
//! Qubit basis order is `e₀ = |↑⟩`, `e₁ = |↓⟩`, so `σ₋ = |↓⟩⟨↑|`.
//! Fock basis order is `|0⟩, |1⟩, …, |n_max⟩`.

use crate::error::{Result, SlhError};
use crate::matrix::{re, CMatrix, C64, I, ONE, ZERO};

/// A bosonic mode truncated to number states `|0⟩..|n_max⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedMode {
    n_max: usize,
}

impl TruncatedMode {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(SlhError::BadParam("Fock cutoff n_max must be at least 1".into()));
        }
        Ok(TruncatedMode { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn annihilator(&self) -> CMatrix {
        annihilator(self.n_max)
    }

    pub fn creator(&self) -> CMatrix {
        annihilator(self.n_max).dagger()
    }

    pub fn number(&self) -> CMatrix {
        number(self.n_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// `σ₊ = |↑⟩⟨↓|`
    Plus,
    /// `σ₋ = |↓⟩⟨↑|`
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Pauli(Pauli),
    Annihilator { n_max: usize },
    Number { n_max: usize },
    Projector { indices: Vec<usize>, dim: usize },
    Identity { dim: usize },
}

pub fn make_operator(kind: &OperatorKind) -> Result<CMatrix> {
    match kind {
        OperatorKind::Pauli(p) => Ok(pauli(*p)),
        OperatorKind::Annihilator { n_max } => Ok(TruncatedMode::new(*n_max)?.annihilator()),
        OperatorKind::Number { n_max } => Ok(TruncatedMode::new(*n_max)?.number()),
        OperatorKind::Projector { indices, dim } => projector(indices, *dim),
        OperatorKind::Identity { dim } => {
            if *dim == 0 {
                return Err(SlhError::BadParam("identity of dimension 0".into()));
            }
            Ok(CMatrix::identity(*dim))
        }
    }
}

pub fn pauli(p: Pauli) -> CMatrix {
    match p {
        Pauli::X => CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        Pauli::Y => CMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
        Pauli::Z => CMatrix::diag_real(&[1.0, -1.0]),
        Pauli::Plus => CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
        Pauli::Minus => CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
    }
}

/// Truncated annihilator, `a|n⟩ = √n |n-1⟩`.
pub fn annihilator(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    CMatrix::from_fn(d, d, |i, j| if j == i + 1 { re((j as f64).sqrt()) } else { ZERO })
}

pub fn number(n_max: usize) -> CMatrix {
    CMatrix::diag_real(&(0..=n_max).map(|n| n as f64).collect::<Vec<_>>())
}

/// Orthogonal projector onto the span of the listed basis vectors.
pub fn projector(indices: &[usize], dim: usize) -> Result<CMatrix> {
    let mut p = CMatrix::zeros(dim, dim);
    for &i in indices {
        if i >= dim {
            return Err(SlhError::BadParam(format!("projector index {i} out of range for dim {dim}")));
        }
        p[(i, i)] = ONE;
    }
    Ok(p)
}

/// `|i⟩⟨j|` in dimension `dim`.
pub fn ket_bra(i: usize, j: usize, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

/// Places `op` on tensor factor `slot` of a product space with factor
/// dimensions `dims` (identity elsewhere). Factor 0 is outermost.
pub fn embed(op: &CMatrix, slot: usize, dims: &[usize]) -> CMatrix {
    assert_eq!(op.rows(), dims[slot], "operator does not match factor dimension");
    dims.iter().enumerate().fold(CMatrix::identity(1), |acc, (k, &d)| {
        if k == slot {
            acc.kron(op)
        } else {
            acc.kron(&CMatrix::identity(d))
        }
    })
}

/// Kronecker product of a list of factors, first factor outermost.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1), |acc, f| acc.kron(f))
}

/// Applies `f` to each eigenvalue of a Hermitian matrix.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let n = h.rows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| h[(i, j)]);
    let eig = nalgebra::SymmetricEigen::new(m);
    let u = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)]);
    let d = CMatrix::diag(&eig.eigenvalues.iter().map(|&x| f(x)).collect::<Vec<_>>());
    &(&u * &d) * &u.dagger()
}
