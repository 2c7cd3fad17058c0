//! Dense matrices over a small prime field, with exact elimination.
//!
//! Two elimination engines coexist: a generic byte-per-entry engine for
//! any supported modulus, and a bit-packed engine over F2 that stores one
//! machine word per row. Ranks of 3x3 (and smaller) F2 matrices are
//! additionally served by a precomputed lookup table keyed on the 9-bit
//! row-major encoding; this table dominates the big enumeration sweeps.
//!
//! Pivot choice is always "first nonzero entry in column-major scan", so
//! reduced forms and kernels are deterministic.

use std::fmt;
use std::sync::OnceLock;

use crate::budget::Budget;
use crate::error::{Error, Result};

/// A small prime field F_p, p in {2, 3, 5}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldP {
    p: u8,
}

impl FieldP {
    pub const F2: FieldP = FieldP { p: 2 };
    pub const F3: FieldP = FieldP { p: 3 };
    pub const F5: FieldP = FieldP { p: 5 };

    pub fn new(p: u8) -> Result<Self> {
        match p {
            2 | 3 | 5 => Ok(FieldP { p }),
            _ => Err(Error::UnsupportedField(p)),
        }
    }

    #[inline]
    pub fn modulus(self) -> u8 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a + b;
        if s >= self.p { s - self.p } else { s }
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        if a >= b { a - b } else { a + self.p - b }
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 { 0 } else { self.p - a }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        (a as u16 * b as u16 % self.p as u16) as u8
    }

    /// Multiplicative inverse of a nonzero residue. Panics on zero.
    #[inline]
    pub fn inv(self, a: u8) -> u8 {
        debug_assert!(a != 0 && a < self.p);
        // p <= 5, a linear scan beats anything fancier
        (1..self.p).find(|&b| self.mul(a, b) == 1).unwrap()
    }

    pub fn elements(self) -> impl Iterator<Item = u8> + Clone {
        0..self.p
    }
}

/// Dense matrix over F_p, row-major, immutable value semantics.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    rows: usize,
    cols: usize,
    field: FieldP,
    entries: Vec<u8>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat({})", self.to_text())
    }
}

impl Mat {
    pub fn new(rows: usize, cols: usize, field: FieldP, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e >= field.modulus()) {
            return Err(Error::ShapeMismatch(format!(
                "entry out of range for modulus {}",
                field.modulus()
            )));
        }
        Ok(Mat { rows, cols, field, entries })
    }

    pub fn zeros(rows: usize, cols: usize, field: FieldP) -> Self {
        Mat { rows, cols, field, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, field: FieldP) -> Self {
        let mut m = Mat::zeros(n, n, field);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Elementary matrix with a single 1 at (i, j).
    pub fn elementary(rows: usize, cols: usize, field: FieldP, i: usize, j: usize) -> Self {
        let mut m = Mat::zeros(rows, cols, field);
        m.entries[i * cols + j] = 1;
        m
    }

    pub fn from_rows(field: FieldP, rows: &[Vec<u8>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            entries.extend_from_slice(row);
        }
        Mat::new(r, c, field, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldP {
        self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn with_entry(&self, i: usize, j: usize, v: u8) -> Self {
        let mut m = self.clone();
        m.entries[i * self.cols + j] = v % self.field.modulus();
        m
    }

    pub fn transpose(&self) -> Self {
        let mut entries = vec![0u8; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries[j * self.rows + i] = self.get(i, j);
            }
        }
        Mat { rows: self.cols, cols: self.rows, field: self.field, entries }
    }

    pub fn add(&self, other: &Mat) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Mat { rows: self.rows, cols: self.cols, field: f, entries })
    }

    pub fn sub(&self, other: &Mat) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Mat { rows: self.rows, cols: self.cols, field: f, entries })
    }

    pub fn scale(&self, c: u8) -> Self {
        let f = self.field;
        let c = c % f.modulus();
        let entries = self.entries.iter().map(|&a| f.mul(a, c)).collect();
        Mat { rows: self.rows, cols: self.cols, field: f, entries }
    }

    pub fn mul(&self, other: &Mat) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut entries = vec![0u8; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    entries[idx] = f.add(entries[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(Mat { rows: self.rows, cols: other.cols, field: f, entries })
    }

    /// Matrix-vector product M v.
    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u8;
                for j in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Row-major vectorization, the bridge to the subspace layer.
    pub fn to_vec(&self) -> Vec<u8> {
        self.entries.clone()
    }

    pub fn from_vec(rows: usize, cols: usize, field: FieldP, v: Vec<u8>) -> Result<Self> {
        Mat::new(rows, cols, field, v)
    }

    /// Row-major bitmask encoding, bit i*cols+j = entry (i, j). F2 only,
    /// at most 32 entries.
    pub fn to_mask(&self) -> Option<u32> {
        if self.field != FieldP::F2 || self.entries.len() > 32 {
            return None;
        }
        let mut mask = 0u32;
        for (idx, &e) in self.entries.iter().enumerate() {
            if e != 0 {
                mask |= 1 << idx;
            }
        }
        Some(mask)
    }

    pub fn from_mask(rows: usize, cols: usize, mask: u32) -> Self {
        let entries = (0..rows * cols).map(|i| ((mask >> i) & 1) as u8).collect();
        Mat { rows, cols, field: FieldP::F2, entries }
    }

    pub fn rank(&self) -> usize {
        if self.field == FieldP::F2 {
            if self.rows <= 3 && self.cols <= 3 {
                // embed into the 3x3 table encoding
                let mut mask = 0u16;
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        if self.get(i, j) != 0 {
                            mask |= 1 << (i * 3 + j);
                        }
                    }
                }
                return rank3_table()[mask as usize] as usize;
            }
            let mut words = self.pack_rows();
            return gf2::rank_words(&mut words, self.cols);
        }
        let mut rows = self.row_vecs();
        rref_in_place(self.field, self.cols, &mut rows).len()
    }

    pub fn det(&self) -> Result<u8> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if self.field == FieldP::F2 {
            return Ok(if self.rank() == self.rows { 1 } else { 0 });
        }
        let f = self.field;
        let n = self.rows;
        let mut rows = self.row_vecs();
        let mut det = 1u8;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&i| rows[i][col] != 0) else {
                return Ok(0);
            };
            if pivot != col {
                rows.swap(pivot, col);
                det = f.neg(det);
            }
            let pv = rows[col][col];
            det = f.mul(det, pv);
            let pv_inv = f.inv(pv);
            for i in col + 1..n {
                let factor = f.mul(rows[i][col], pv_inv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let t = f.mul(factor, rows[col][j]);
                    rows[i][j] = f.sub(rows[i][j], t);
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let f = self.field;
        let n = self.rows;
        // eliminate on [M | I]
        let mut rows: Vec<Vec<u8>> = (0..n)
            .map(|i| {
                let mut row = self.entries[i * n..(i + 1) * n].to_vec();
                row.extend((0..n).map(|j| u8::from(i == j)));
                row
            })
            .collect();
        let pivots = rref_in_place(f, 2 * n, &mut rows);
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) {
            return Err(Error::Singular);
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows.iter().take(n) {
            entries.extend_from_slice(&row[n..]);
        }
        Ok(Mat { rows: n, cols: n, field: f, entries })
    }

    /// Basis of the right null space, as column vectors of length `cols`.
    /// Deterministic: one vector per free column of the RREF, in
    /// ascending column order.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        let f = self.field;
        let mut rows = self.row_vecs();
        let pivots = rref_in_place(f, self.cols, &mut rows);
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![0u8; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rows[i][free]);
            }
            basis.push(v);
        }
        basis
    }

    fn row_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    fn pack_rows(&self) -> Vec<u64> {
        debug_assert!(self.cols <= 64);
        (0..self.rows)
            .map(|i| {
                let mut w = 0u64;
                for j in 0..self.cols {
                    if self.get(i, j) != 0 {
                        w |= 1 << j;
                    }
                }
                w
            })
            .collect()
    }

    /// Fixture text format: `p:rows:cols:e11,e12,...` row-major decimal
    /// residues.
    pub fn to_text(&self) -> String {
        let body: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        format!(
            "{}:{}:{}:{}",
            self.field.modulus(),
            self.rows,
            self.cols,
            body.join(",")
        )
    }

    pub fn parse_text(s: &str) -> Result<Mat> {
        let parts: Vec<&str> = s.splitn(4, ':').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected p:rows:cols:entries, got {s:?}")));
        }
        let p: u8 = parts[0].parse().map_err(|_| Error::Parse("bad modulus".into()))?;
        let rows: usize = parts[1].parse().map_err(|_| Error::Parse("bad row count".into()))?;
        let cols: usize = parts[2].parse().map_err(|_| Error::Parse("bad col count".into()))?;
        let field = FieldP::new(p)?;
        let entries = if parts[3].is_empty() {
            Vec::new()
        } else {
            parts[3]
                .split(',')
                .map(|t| t.trim().parse::<u8>().map_err(|_| Error::Parse(format!("bad entry {t:?}"))))
                .collect::<Result<Vec<u8>>>()?
        };
        Mat::new(rows, cols, field, entries)
    }

    /// Compact per-row hex encoding for F2 matrices in JSON reports;
    /// bit j of row word = column j.
    pub fn to_hex_rows(&self) -> Option<Vec<String>> {
        if self.field != FieldP::F2 {
            return None;
        }
        Some(self.pack_rows().iter().map(|w| format!("{w:x}")).collect())
    }
}

/// In-place reduced row echelon form. Returns pivot columns; zero rows
/// are truncated away.
pub(crate) fn rref_in_place(field: FieldP, width: usize, rows: &mut Vec<Vec<u8>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(i) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, i);
        let pv_inv = field.inv(rows[r][col]);
        if pv_inv != 1 {
            for j in col..width {
                rows[r][j] = field.mul(rows[r][j], pv_inv);
            }
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col] == 0 {
                continue;
            }
            let factor = rows[i][col];
            for j in col..width {
                let t = field.mul(factor, rows[r][j]);
                rows[i][j] = field.sub(rows[i][j], t);
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Bit-packed elimination over F2: one u64 word per row, bit j = column j.
pub mod gf2 {
    /// Rank by word-parallel Gaussian elimination; `words` is clobbered.
    pub fn rank_words(words: &mut [u64], cols: usize) -> usize {
        let n = words.len();
        let mut r = 0;
        for col in 0..cols {
            let bit = 1u64 << col;
            let Some(i) = (r..n).find(|&i| words[i] & bit != 0) else {
                continue;
            };
            words.swap(r, i);
            for j in 0..n {
                if j != r && words[j] & bit != 0 {
                    words[j] ^= words[r];
                }
            }
            r += 1;
            if r == n {
                break;
            }
        }
        r
    }

    pub fn rank(rows: &[u64], cols: usize) -> usize {
        let mut words = rows.to_vec();
        rank_words(&mut words, cols)
    }

    /// Determinant of a square F2 matrix given as row words.
    pub fn det(rows: &[u64], n: usize) -> u8 {
        u8::from(rank(rows, n) == n)
    }

    /// Right null space basis, vectors as bitmasks over the columns.
    pub fn kernel(rows: &[u64], cols: usize) -> Vec<u64> {
        let mut words = rows.to_vec();
        let n = words.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..cols {
            let bit = 1u64 << col;
            let Some(i) = (r..n).find(|&i| words[i] & bit != 0) else {
                continue;
            };
            words.swap(r, i);
            for j in 0..n {
                if j != r && words[j] & bit != 0 {
                    words[j] ^= words[r];
                }
            }
            pivots.push(col);
            r += 1;
            if r == n {
                break;
            }
        }
        let pivot_mask: u64 = pivots.iter().map(|&c| 1u64 << c).sum();
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_mask & (1 << free) != 0 {
                continue;
            }
            let mut v = 1u64 << free;
            for (i, &pc) in pivots.iter().enumerate() {
                if words[i] & (1 << free) != 0 {
                    v |= 1 << pc;
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank lookup table for F2 matrices with rows*cols <= 16, keyed on the
/// row-major bitmask. The sweeps build one per ambient shape.
pub struct Gf2RankTable {
    rows: usize,
    cols: usize,
    table: Vec<u8>,
}

impl Gf2RankTable {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows * cols <= 16, "rank table limited to 16 entries");
        let size = 1usize << (rows * cols);
        let mut table = vec![0u8; size];
        let mut words = vec![0u64; rows];
        for (mask, slot) in table.iter_mut().enumerate() {
            for (i, w) in words.iter_mut().enumerate() {
                *w = ((mask >> (i * cols)) as u64) & ((1 << cols) - 1);
            }
            *slot = gf2::rank_words(&mut words, cols) as u8;
        }
        Gf2RankTable { rows, cols, table }
    }

    #[inline]
    pub fn rank(&self, mask: u32) -> usize {
        self.table[mask as usize] as usize
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

fn rank3_table() -> &'static [u8] {
    static TABLE: OnceLock<Gf2RankTable> = OnceLock::new();
    &TABLE.get_or_init(|| Gf2RankTable::new(3, 3)).table
}

/// |GL_n(F_p)| = prod_{k=0}^{n-1} (p^n - p^k).
pub fn gl_order(n: usize, p: u8) -> u128 {
    let pn = (p as u128).pow(n as u32);
    (0..n as u32).map(|k| pn - (p as u128).pow(k)).product()
}

/// Stream of all invertible n x n matrices over F_p, each exactly once.
///
/// Matrices are visited in ascending order of their base-p row-major
/// code, so the stream is restartable and cloneable; workers can own
/// disjoint code ranges.
#[derive(Clone)]
pub struct GlIter {
    n: usize,
    field: FieldP,
    code: u128,
    end: u128,
}

impl Iterator for GlIter {
    type Item = Mat;

    fn next(&mut self) -> Option<Mat> {
        while self.code < self.end {
            let m = decode_matrix(self.n, self.n, self.field, self.code);
            self.code += 1;
            if m.is_invertible() {
                return Some(m);
            }
        }
        None
    }
}

pub(crate) fn decode_matrix(rows: usize, cols: usize, field: FieldP, mut code: u128) -> Mat {
    let p = field.modulus() as u128;
    let entries = (0..rows * cols)
        .map(|_| {
            let e = (code % p) as u8;
            code /= p;
            e
        })
        .collect();
    Mat { rows, cols, field, entries }
}

pub fn enumerate_gl(n: usize, field: FieldP, budget: &Budget) -> Result<GlIter> {
    let total = (field.modulus() as u128).checked_pow((n * n) as u32).ok_or(
        Error::BudgetExceeded { needed: u128::MAX, cap: budget.cap() },
    )?;
    budget.check(total)?;
    Ok(GlIter { n, field, code: 0, end: total })
}

/// All matrices of a given shape, invertible or not.
pub fn enumerate_all(rows: usize, cols: usize, field: FieldP, budget: &Budget) -> Result<impl Iterator<Item = Mat> + Clone> {
    let total = (field.modulus() as u128)
        .checked_pow((rows * cols) as u32)
        .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: budget.cap() })?;
    budget.check(total)?;
    Ok((0..total).map(move |code| decode_matrix(rows, cols, field, code)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> Mat {
        Mat::parse_text(text).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(m("2:3:3:0,0,0,0,0,0,0,0,0").rank(), 0);
        assert_eq!(m("2:2:2:1,1,0,1").rank(), 2);
        // a point of the singular plane [x y; 0 x+1] at x=1, y=1
        assert_eq!(m("2:2:2:1,1,0,0").rank(), 1);
    }

    #[test]
    fn det_examples() {
        for text in [
            "2:2:2:1,0,0,1",
            "2:2:2:0,1,1,0",
            "2:2:2:1,1,0,1",
            "2:2:2:1,0,1,1",
            "2:2:2:0,1,1,1",
            "2:2:2:1,1,1,0",
        ] {
            assert_eq!(m(text).det().unwrap(), 1, "{text}");
        }
        assert_eq!(m("2:2:2:1,0,0,0").det().unwrap(), 0);
        assert_eq!(m("3:2:2:1,1,1,2").det().unwrap(), 1);
        assert!(m("2:2:3:0,0,0,0,0,0").det().is_err());
    }

    #[test]
    fn inverse_examples() {
        let id = Mat::identity(2, FieldP::F2);
        assert_eq!(id.inverse().unwrap(), id);
        let swap = m("2:2:2:0,1,1,0");
        assert_eq!(swap.inverse().unwrap(), swap);
        assert_eq!(m("3:2:2:1,1,0,1").inverse().unwrap(), m("3:2:2:1,2,0,1"));
        assert!(matches!(m("2:2:2:1,0,0,0").inverse(), Err(Error::Singular)));
    }

    #[test]
    fn kernel_examples() {
        assert!(Mat::identity(3, FieldP::F3).kernel_basis().is_empty());
        assert_eq!(Mat::zeros(2, 2, FieldP::F2).kernel_basis().len(), 2);
        assert_eq!(m("2:2:2:1,1,0,0").kernel_basis(), vec![vec![1, 1]]);
    }

    #[test]
    fn inverse_times_self_is_identity() {
        let budget = Budget::default();
        for field in [FieldP::F2, FieldP::F3] {
            for g in enumerate_gl(2, field, &budget).unwrap() {
                let inv = g.inverse().unwrap();
                assert_eq!(g.mul(&inv).unwrap(), Mat::identity(2, field));
            }
        }
    }

    #[test]
    fn gl_counts_match_order_formula() {
        let budget = Budget::default();
        assert_eq!(enumerate_gl(2, FieldP::F2, &budget).unwrap().count(), 6);
        assert_eq!(enumerate_gl(2, FieldP::F3, &budget).unwrap().count() as u128, gl_order(2, 3));
        assert_eq!(gl_order(2, 3), 48);
        assert_eq!(gl_order(4, 2), 20160);
    }

    #[test]
    fn gl_stream_has_no_duplicates_and_nonzero_det() {
        let budget = Budget::default();
        let all: Vec<Mat> = enumerate_gl(2, FieldP::F3, &budget).unwrap().collect();
        let mut seen = std::collections::HashSet::new();
        for g in &all {
            assert!(g.det().unwrap() != 0);
            assert!(seen.insert(g.clone()));
        }
    }

    #[test]
    fn gl_budget_guard() {
        let budget = Budget::new(1000);
        assert!(matches!(
            enumerate_gl(4, FieldP::F2, &budget),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn packed_and_generic_paths_agree_exhaustively() {
        // all 512 3x3 and all 16 2x2 matrices over F2
        for (rows, cols) in [(3usize, 3usize), (2, 2)] {
            for mask in 0..1u32 << (rows * cols) {
                let m = Mat::from_mask(rows, cols, mask);
                let mut generic_rows = m.row_vecs();
                let generic_rank = rref_in_place(FieldP::F2, cols, &mut generic_rows).len();
                assert_eq!(m.rank(), generic_rank, "rank mismatch at mask {mask}");
                let words = m.pack_rows();
                assert_eq!(gf2::rank(&words, cols), generic_rank);
                assert_eq!(gf2::det(&words, cols), u8::from(generic_rank == rows));
                let packed_kernel = gf2::kernel(&words, cols);
                let generic_kernel = m.kernel_basis();
                assert_eq!(packed_kernel.len(), generic_kernel.len());
                for (w, v) in packed_kernel.iter().zip(&generic_kernel) {
                    let as_vec: Vec<u8> = (0..cols).map(|j| ((w >> j) & 1) as u8).collect();
                    assert_eq!(&as_vec, v);
                }
            }
        }
    }

    #[test]
    fn rank_table_matches_elimination() {
        let table = Gf2RankTable::new(3, 3);
        for mask in 0..512u32 {
            let m = Mat::from_mask(3, 3, mask);
            let words = m.pack_rows();
            assert_eq!(table.rank(mask), gf2::rank(&words, 3));
        }
    }

    #[test]
    fn text_format_round_trip() {
        let a = m("5:2:3:0,4,2,1,3,0");
        assert_eq!(Mat::parse_text(&a.to_text()).unwrap(), a);
        assert!(Mat::parse_text("7:1:1:0").is_err());
        assert!(Mat::parse_text("2:2:2:0,1").is_err());
    }

    #[test]
    fn hex_rows_for_f2() {
        let a = m("2:2:2:1,1,0,1");
        assert_eq!(a.to_hex_rows().unwrap(), vec!["3", "2"]);
        assert!(m("3:1:1:2").to_hex_rows().is_none());
    }
}
