use crate::matrix::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    CharOp,
    Sigma,
    ModelMatrix,
    Generic,
}

/// An array of `block_dim × block_dim` operator blocks stored as one dense
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperatorMatrix {
    n_block_rows: usize,
    n_block_cols: usize,
    block_dim: usize,
    data: CMatrix,
    kind: BlockKind,
}

impl BlockOperatorMatrix {
    pub fn new(data: CMatrix, block_dim: usize, kind: BlockKind) -> Self {
        assert!(block_dim > 0, "block_dim must be positive");
        assert!(
            data.rows().is_multiple_of(block_dim) && data.cols().is_multiple_of(block_dim),
            "{}x{} data is not tiled by {block_dim}x{block_dim} blocks",
            data.rows(),
            data.cols()
        );
        BlockOperatorMatrix {
            n_block_rows: data.rows() / block_dim,
            n_block_cols: data.cols() / block_dim,
            block_dim,
            data,
            kind,
        }
    }

    pub fn n_block_rows(&self) -> usize {
        self.n_block_rows
    }

    pub fn n_block_cols(&self) -> usize {
        self.n_block_cols
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let d = self.block_dim;
        self.data.sub_block(i * d, j * d, d, d)
    }
}
