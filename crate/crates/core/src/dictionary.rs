//! Transform blocks and overcomplete dictionaries.
//!
//! A [`TransformBlock`] is one synthesis operator Φ with orthonormal (or, for
//! learned blocks, column-orthonormal) columns. A [`Dictionary`] is an ordered
//! horizontal concatenation `B = [Φ Ψ …]` of blocks sharing a row count; its
//! column count is the sum of the block column counts. Blocks expose
//! matrix-free `apply`/`adjoint` so the solver never has to materialize `B`;
//! [`Dictionary::to_dense`] exists as an escape hatch for test oracles.
//!
//! Conventions fixed here (any orthonormal variant would do, so one is chosen
//! and documented):
//! * DFT entry `(j, k)` is `p^(-1/2) exp(+2πi jk/p)`, exactly unitary.
//! * DCT is the orthonormal DCT-II basis; the synthesis matrix holds the
//!   basis vectors as columns.
//! * Haar is the orthonormal two-channel filter bank applied `levels` times
//!   to the approximation band, with coefficients ordered
//!   `[scaling, detail L, detail L-1, …, detail 1]`.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kernels;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Descriptor of a block's transform family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Identity,
    Dft,
    Dct,
    Haar { levels: u32 },
    Learned,
}

enum BlockOp {
    Identity,
    Dft {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Dct {
        synthesis: DMatrix<f64>,
    },
    Haar {
        levels: u32,
    },
    Learned {
        basis: DMatrix<f64>,
    },
}

/// One synthesis operator with `rows` output samples and `cols` coefficients.
pub struct TransformBlock {
    rows: usize,
    cols: usize,
    op: BlockOp,
}

impl std::fmt::Debug for TransformBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformBlock")
            .field("kind", &self.kind())
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl TransformBlock {
    /// The p x p identity block.
    pub fn identity(p: usize) -> Self {
        assert!(p >= 1, "block size must be positive");
        TransformBlock {
            rows: p,
            cols: p,
            op: BlockOp::Identity,
        }
    }

    /// Unitary DFT synthesis block, entry `(j, k) = p^(-1/2) exp(+2πi jk/p)`.
    pub fn dft(p: usize) -> Self {
        assert!(p >= 1, "block size must be positive");
        let mut planner = FftPlanner::new();
        TransformBlock {
            rows: p,
            cols: p,
            op: BlockOp::Dft {
                forward: planner.plan_fft_forward(p),
                inverse: planner.plan_fft_inverse(p),
            },
        }
    }

    /// Orthonormal DCT-II synthesis block.
    pub fn dct(p: usize) -> Self {
        assert!(p >= 1, "block size must be positive");
        let n = p as f64;
        let s0 = (1.0 / n).sqrt();
        let sk = (2.0 / n).sqrt();
        let synthesis = DMatrix::from_fn(p, p, |row, k| {
            let scale = if k == 0 { s0 } else { sk };
            scale * (PI * (2.0 * row as f64 + 1.0) * k as f64 / (2.0 * n)).cos()
        });
        TransformBlock {
            rows: p,
            cols: p,
            op: BlockOp::Dct { synthesis },
        }
    }

    /// Orthonormal Haar synthesis block with `levels` decomposition levels.
    pub fn haar(p: usize, levels: u32) -> Result<Self> {
        assert!(p >= 1 && levels >= 1, "block size and levels must be positive");
        if p % (1usize << levels) != 0 {
            return Err(Error::dim(format!(
                "Haar level {levels} needs p divisible by {}, got p = {p}",
                1usize << levels
            )));
        }
        Ok(TransformBlock {
            rows: p,
            cols: p,
            op: BlockOp::Haar { levels },
        })
    }

    /// Learned block holding an explicit column-orthonormal basis.
    pub fn learned(basis: DMatrix<f64>) -> Result<Self> {
        let (p, k) = (basis.nrows(), basis.ncols());
        if k > p || k == 0 {
            return Err(Error::dim(format!(
                "learned block must be tall, got {p} x {k}"
            )));
        }
        let gram = basis.tr_mul(&basis);
        let mut max_dev: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((gram[(i, j)] - target).abs());
            }
        }
        if max_dev > 1e-8 {
            return Err(Error::NotOrthonormal { max_dev });
        }
        Ok(TransformBlock {
            rows: p,
            cols: k,
            op: BlockOp::Learned { basis },
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> BlockKind {
        match &self.op {
            BlockOp::Identity => BlockKind::Identity,
            BlockOp::Dft { .. } => BlockKind::Dft,
            BlockOp::Dct { .. } => BlockKind::Dct,
            BlockOp::Haar { levels } => BlockKind::Haar { levels: *levels },
            BlockOp::Learned { .. } => BlockKind::Learned,
        }
    }

    /// Short label used in manifests and dictionary specs.
    pub fn label(&self) -> String {
        match self.kind() {
            BlockKind::Identity => "identity".into(),
            BlockKind::Dft => "dft".into(),
            BlockKind::Dct => "dct".into(),
            BlockKind::Haar { levels } => format!("haar:{levels}"),
            BlockKind::Learned => format!("learned:{}x{}", self.rows, self.cols),
        }
    }

    /// out += Φ c. Lengths must already match.
    pub(crate) fn apply_acc(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(coeffs.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        match &self.op {
            BlockOp::Identity => {
                for (o, c) in out.iter_mut().zip(coeffs.iter()) {
                    *o += *c;
                }
            }
            BlockOp::Dft { inverse, .. } => {
                let mut buf = coeffs.to_vec();
                inverse.process(&mut buf);
                let scale = 1.0 / (self.rows as f64).sqrt();
                for (o, b) in out.iter_mut().zip(buf.iter()) {
                    *o += *b * scale;
                }
            }
            BlockOp::Dct { synthesis } => kernels::gemv_real_acc(synthesis, coeffs, out),
            BlockOp::Haar { levels } => {
                let mut buf = coeffs.to_vec();
                haar_synthesis(&mut buf, *levels);
                for (o, b) in out.iter_mut().zip(buf.iter()) {
                    *o += *b;
                }
            }
            BlockOp::Learned { basis } => kernels::gemv_real_acc(basis, coeffs, out),
        }
    }

    /// out = Φ* v. Lengths must already match.
    pub(crate) fn adjoint_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        match &self.op {
            BlockOp::Identity => out.copy_from_slice(v),
            BlockOp::Dft { forward, .. } => {
                out.copy_from_slice(v);
                forward.process(out);
                let scale = 1.0 / (self.rows as f64).sqrt();
                for o in out.iter_mut() {
                    *o *= scale;
                }
            }
            BlockOp::Dct { synthesis } => kernels::gemv_real_adjoint(synthesis, v, out),
            BlockOp::Haar { levels } => {
                out.copy_from_slice(v);
                haar_analysis(out, *levels);
            }
            BlockOp::Learned { basis } => kernels::gemv_real_adjoint(basis, v, out),
        }
    }

    /// Φ c as a fresh vector.
    pub fn apply(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.cols {
            return Err(Error::dim(format!(
                "block expects {} coefficients, got {}",
                self.cols,
                coeffs.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        self.apply_acc(coeffs, &mut out);
        Ok(out)
    }

    /// Φ* v as a fresh vector.
    pub fn adjoint(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.rows {
            return Err(Error::dim(format!(
                "block expects {} samples, got {}",
                self.rows,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        self.adjoint_into(v, &mut out);
        Ok(out)
    }

    /// Column `j` of the synthesis matrix.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        assert!(j < self.cols);
        match &self.op {
            BlockOp::Identity => {
                let mut col = vec![Complex64::new(0.0, 0.0); self.rows];
                col[j] = Complex64::new(1.0, 0.0);
                col
            }
            BlockOp::Dft { .. } => {
                let p = self.rows as f64;
                let scale = 1.0 / p.sqrt();
                (0..self.rows)
                    .map(|row| {
                        let angle = 2.0 * PI * (row as f64) * (j as f64) / p;
                        Complex64::new(scale * angle.cos(), scale * angle.sin())
                    })
                    .collect()
            }
            BlockOp::Dct { synthesis } => synthesis
                .column(j)
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
            BlockOp::Haar { levels } => {
                let mut buf = vec![Complex64::new(0.0, 0.0); self.rows];
                buf[j] = Complex64::new(1.0, 0.0);
                haar_synthesis(&mut buf, *levels);
                buf
            }
            BlockOp::Learned { basis } => basis
                .column(j)
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }

    /// Dense synthesis matrix (tests and oracles only).
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut dense = DMatrix::from_element(self.rows, self.cols, Complex64::new(0.0, 0.0));
        for j in 0..self.cols {
            let col = self.column(j);
            for (i, v) in col.into_iter().enumerate() {
                dense[(i, j)] = v;
            }
        }
        dense
    }

    /// Writes the dense matrix: a header of `rows` then `cols` as 32-bit
    /// little-endian integers, followed by column-major (re, im) f64 pairs.
    pub fn write_dense<W: Write>(&self, w: &mut W) -> Result<()> {
        write_dense_matrix(&self.to_dense(), w)
    }
}

/// In-place Haar analysis (adjoint of the synthesis block).
fn haar_analysis(data: &mut [Complex64], levels: u32) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
    let mut band = data.len();
    for _ in 0..levels {
        let half = band / 2;
        for i in 0..half {
            let a = data[2 * i];
            let b = data[2 * i + 1];
            scratch[i] = (a + b) * SQRT_HALF;
            scratch[half + i] = (a - b) * SQRT_HALF;
        }
        data[..band].copy_from_slice(&scratch[..band]);
        band = half;
    }
}

/// In-place Haar synthesis from `[scaling, detail L, …, detail 1]` layout.
fn haar_synthesis(data: &mut [Complex64], levels: u32) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
    let mut band = data.len() >> levels;
    for _ in 0..levels {
        let doubled = band * 2;
        for i in 0..band {
            let s = data[i];
            let d = data[band + i];
            scratch[2 * i] = (s + d) * SQRT_HALF;
            scratch[2 * i + 1] = (s - d) * SQRT_HALF;
        }
        data[..doubled].copy_from_slice(&scratch[..doubled]);
        band = doubled;
    }
}

/// Ordered concatenation of transform blocks sharing a row count.
pub struct Dictionary {
    blocks: Vec<TransformBlock>,
    p: usize,
    q: usize,
}

impl std::fmt::Debug for Dictionary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dictionary")
            .field("p", &self.p)
            .field("q", &self.q)
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl Dictionary {
    /// Concatenates blocks into a dictionary; all blocks must share rows.
    pub fn concat(blocks: Vec<TransformBlock>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::dim("dictionary needs at least one block".to_string()))?;
        let p = first.rows();
        for (i, b) in blocks.iter().enumerate() {
            if b.rows() != p {
                return Err(Error::dim(format!(
                    "block {i} has {} rows, expected {p}",
                    b.rows()
                )));
            }
        }
        let q = blocks.iter().map(|b| b.cols()).sum();
        Ok(Dictionary { blocks, p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn blocks(&self) -> &[TransformBlock] {
        &self.blocks
    }

    /// Coefficient index range occupied by each block, in order.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::with_capacity(self.blocks.len());
        let mut start = 0;
        for b in &self.blocks {
            ranges.push(start..start + b.cols());
            start += b.cols();
        }
        ranges
    }

    /// B c: sums the blocks' synthesis outputs.
    pub fn apply(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.q {
            return Err(Error::dim(format!(
                "dictionary expects {} coefficients, got {}",
                self.q,
                coeffs.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.p];
        let mut offset = 0;
        for b in &self.blocks {
            b.apply_acc(&coeffs[offset..offset + b.cols()], &mut out);
            offset += b.cols();
        }
        Ok(out)
    }

    /// B* v: stacks the blocks' analysis outputs.
    pub fn adjoint(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.p {
            return Err(Error::dim(format!(
                "dictionary expects {} samples, got {}",
                self.p,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.q];
        let mut offset = 0;
        for b in &self.blocks {
            b.adjoint_into(v, &mut out[offset..offset + b.cols()]);
            offset += b.cols();
        }
        Ok(out)
    }

    pub(crate) fn apply_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let mut offset = 0;
        for b in &self.blocks {
            b.apply_acc(&coeffs[offset..offset + b.cols()], out);
            offset += b.cols();
        }
    }

    pub(crate) fn adjoint_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let mut offset = 0;
        for b in &self.blocks {
            b.adjoint_into(v, &mut out[offset..offset + b.cols()]);
            offset += b.cols();
        }
    }

    /// Column `j` of the dense dictionary.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        assert!(j < self.q);
        let mut offset = 0;
        for b in &self.blocks {
            if j < offset + b.cols() {
                return b.column(j - offset);
            }
            offset += b.cols();
        }
        unreachable!()
    }

    /// Dense `p x q` matrix (tests and oracles only).
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut dense = DMatrix::from_element(self.p, self.q, Complex64::new(0.0, 0.0));
        for j in 0..self.q {
            for (i, v) in self.column(j).into_iter().enumerate() {
                dense[(i, j)] = v;
            }
        }
        dense
    }

    /// Same binary layout as [`TransformBlock::write_dense`].
    pub fn write_dense<W: Write>(&self, w: &mut W) -> Result<()> {
        write_dense_matrix(&self.to_dense(), w)
    }

    pub fn labels(&self) -> String {
        self.blocks
            .iter()
            .map(|b| b.label())
            .collect::<Vec<_>>()
            .join("+")
    }
}

fn write_dense_matrix<W: Write>(m: &DMatrix<Complex64>, w: &mut W) -> Result<()> {
    w.write_all(&(m.nrows() as u32).to_le_bytes())?;
    w.write_all(&(m.ncols() as u32).to_le_bytes())?;
    for v in m.as_slice() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads the binary layout produced by `write_dense` (test oracle use).
pub fn read_dense_matrix<R: Read>(r: &mut R) -> Result<DMatrix<Complex64>> {
    let mut header = [0u8; 8];
    r.read_exact(&mut header)?;
    let rows = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let mut entries = Vec::with_capacity(rows * cols);
    let mut buf = [0u8; 16];
    for _ in 0..rows * cols {
        r.read_exact(&mut buf)?;
        entries.push(Complex64::new(
            f64::from_le_bytes(buf[0..8].try_into().unwrap()),
            f64::from_le_bytes(buf[8..16].try_into().unwrap()),
        ));
    }
    Ok(DMatrix::from_column_slice(rows, cols, &entries))
}
