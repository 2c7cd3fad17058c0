//! Linear and affine subspaces of matrix spaces.
//!
//! Subspaces are stored vectorized: the matrix space Mat_{n,p}(F_q) is
//! flattened row-major to F_q^{np} and all subspace algebra (echelon
//! forms, membership, enumeration) happens on vectors, with the matrix
//! shape kept as metadata. One echelon engine serves every shape.
//!
//! Enumeration of k-dimensional subspaces iterates over pivot-column
//! patterns and then over the free entries of the reduced row echelon
//! form, generating each subspace exactly once with no dedup hashing.
//! Affine cosets are generated by canonical coset representatives:
//! vectors vanishing on the pivot coordinates.

use serde_json::json;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::mat::{rref_in_place, FieldP, Gf2RankTable, Mat};

/// Base point plus independent direction matrices. The canonical form
/// has the directions in reduced row echelon order (as vectorized
/// elements) and the base reduced modulo the direction span by zeroing
/// its pivot coordinates; two subspaces are equal as point sets iff
/// their canonical forms are identical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineSubspace {
    base: Mat,
    directions: Vec<Mat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubspaceClass {
    ColumnType,
    RowType,
    Exceptional,
    Unclassified,
}

impl SubspaceClass {
    pub fn key(self) -> &'static str {
        match self {
            SubspaceClass::ColumnType => "column_type",
            SubspaceClass::RowType => "row_type",
            SubspaceClass::Exceptional => "exceptional",
            SubspaceClass::Unclassified => "unclassified",
        }
    }
}

impl AffineSubspace {
    pub fn new(base: Mat, directions: Vec<Mat>) -> Result<Self> {
        for d in &directions {
            if d.rows() != base.rows() || d.cols() != base.cols() {
                return Err(Error::ShapeMismatch("direction shape differs from base".into()));
            }
            if d.field() != base.field() {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(AffineSubspace { base, directions })
    }

    /// The canonical column-annihilator space C_r inside Mat_{n,p}: all
    /// matrices whose last p-r columns vanish.
    pub fn column_space(n: usize, p: usize, field: FieldP, r: usize) -> Self {
        let mut dirs = Vec::with_capacity(n * r);
        for i in 0..n {
            for j in 0..r {
                dirs.push(Mat::elementary(n, p, field, i, j));
            }
        }
        AffineSubspace { base: Mat::zeros(n, p, field), directions: dirs }
    }

    /// The transpose of C_r: matrices whose last n-r rows vanish.
    pub fn row_space(n: usize, p: usize, field: FieldP, r: usize) -> Self {
        let mut dirs = Vec::with_capacity(r * p);
        for i in 0..r {
            for j in 0..p {
                dirs.push(Mat::elementary(n, p, field, i, j));
            }
        }
        AffineSubspace { base: Mat::zeros(n, p, field), directions: dirs }
    }

    /// I_n plus the strictly upper triangular matrices.
    pub fn unitriangular_space(n: usize, field: FieldP) -> Self {
        let mut dirs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                dirs.push(Mat::elementary(n, n, field, i, j));
            }
        }
        AffineSubspace { base: Mat::identity(n, field), directions: dirs }
    }

    /// The singular plane {[x y; 0 x+1]} over F2 from the n = 2
    /// exceptional case.
    pub fn exceptional_plane() -> Self {
        let f = FieldP::F2;
        let base = Mat::new(2, 2, f, vec![0, 0, 0, 1]).unwrap();
        let dirs = vec![Mat::identity(2, f), Mat::elementary(2, 2, f, 0, 1)];
        AffineSubspace { base, directions: dirs }
    }

    pub fn base(&self) -> &Mat {
        &self.base
    }

    pub fn directions(&self) -> &[Mat] {
        &self.directions
    }

    pub fn ambient_rows(&self) -> usize {
        self.base.rows()
    }

    pub fn ambient_cols(&self) -> usize {
        self.base.cols()
    }

    pub fn field(&self) -> FieldP {
        self.base.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.rows() * self.base.cols()
    }

    /// Dimension of the translation space (after canonicalization this
    /// is the number of stored directions).
    pub fn dim(&self) -> usize {
        let mut rows: Vec<Vec<u8>> = self.directions.iter().map(|d| d.to_vec()).collect();
        rref_in_place(self.field(), self.ambient_dim(), &mut rows).len()
    }

    pub fn transpose(&self) -> Self {
        AffineSubspace {
            base: self.base.transpose(),
            directions: self.directions.iter().map(|d| d.transpose()).collect(),
        }
    }

    pub fn canonicalize(&self) -> Self {
        let field = self.field();
        let d = self.ambient_dim();
        let mut rows: Vec<Vec<u8>> = self.directions.iter().map(|m| m.to_vec()).collect();
        let pivots = rref_in_place(field, d, &mut rows);
        let mut base = self.base.to_vec();
        for (i, &pc) in pivots.iter().enumerate() {
            let coef = base[pc];
            if coef == 0 {
                continue;
            }
            for j in 0..d {
                let t = field.mul(coef, rows[i][j]);
                base[j] = field.sub(base[j], t);
            }
        }
        let shape = (self.ambient_rows(), self.ambient_cols());
        AffineSubspace {
            base: Mat::from_vec(shape.0, shape.1, field, base).unwrap(),
            directions: rows
                .into_iter()
                .map(|r| Mat::from_vec(shape.0, shape.1, field, r).unwrap())
                .collect(),
        }
    }

    /// A subspace is linear iff the base lies in the span of the
    /// directions, i.e. the canonicalized base is zero.
    pub fn is_linear(&self) -> bool {
        self.canonicalize().base.is_zero()
    }

    /// All q^dim points, base first, direction coefficients counted in
    /// base-q odometer order.
    pub fn elements(&self, budget: &Budget) -> Result<ElementIter> {
        let q = self.field().modulus() as u128;
        let total = q
            .checked_pow(self.directions.len() as u32)
            .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: budget.cap() })?;
        budget.check(total)?;
        Ok(ElementIter { space: self.clone(), code: 0, end: total })
    }

    /// Maximum rank over all elements, with early exit once `stop_at`
    /// is reached.
    pub fn max_rank_bounded(&self, stop_at: usize, budget: &Budget) -> Result<usize> {
        let mut best = 0;
        for m in self.elements(budget)? {
            best = best.max(m.rank());
            if best >= stop_at {
                break;
            }
        }
        Ok(best)
    }

    pub fn max_rank(&self, budget: &Budget) -> Result<usize> {
        self.max_rank_bounded(usize::MAX, budget)
    }

    /// The two-sided equivalence action (P, Q).S = { P M Q^{-1} }.
    pub fn act(&self, p: &Mat, q: &Mat) -> Result<Self> {
        let q_inv = q.inverse()?;
        if !p.is_invertible() {
            return Err(Error::Singular);
        }
        let base = p.mul(&self.base)?.mul(&q_inv)?;
        let directions = self
            .directions
            .iter()
            .map(|d| p.mul(d)?.mul(&q_inv))
            .collect::<Result<Vec<Mat>>>()?;
        Ok(AffineSubspace { base, directions }.canonicalize())
    }

    /// Basis of the intersection of kernels of all elements. For an
    /// affine space this equals the common kernel of the base and the
    /// directions, so we stack them and take the null space.
    pub fn common_kernel(&self) -> Vec<Vec<u8>> {
        let field = self.field();
        let cols = self.ambient_cols();
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity((1 + self.directions.len()) * self.ambient_rows());
        for m in std::iter::once(&self.base).chain(&self.directions) {
            for i in 0..m.rows() {
                rows.push((0..cols).map(|j| m.get(i, j)).collect());
            }
        }
        let stacked = Mat::from_rows(field, &rows).unwrap();
        stacked.kernel_basis()
    }

    /// Basis of the smallest subspace of F_q^n containing the images of
    /// all elements: the column span of the base and the directions.
    pub fn common_image(&self) -> Vec<Vec<u8>> {
        let field = self.field();
        let n = self.ambient_rows();
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for m in std::iter::once(&self.base).chain(&self.directions) {
            for j in 0..m.cols() {
                rows.push((0..n).map(|i| m.get(i, j)).collect());
            }
        }
        rref_in_place(field, n, &mut rows);
        rows
    }

    /// Decide the Flanders class of a maximal bounded-rank subspace.
    ///
    /// Caller contract: dim(S) = rows * r and max_rank(S) = r. The
    /// decision is semantic: a common kernel of dimension >= cols - r
    /// forces equivalence to the column-annihilator space by a dimension
    /// count, and dually for the row type via the common image.
    pub fn classify(&self, r: usize) -> Result<SubspaceClass> {
        let canon = self.canonicalize();
        if canon.directions.len() != canon.ambient_rows() * r {
            return Err(Error::Precondition(format!(
                "classify expects dim = {} * {}, got {}",
                canon.ambient_rows(),
                r,
                canon.directions.len()
            )));
        }
        let kernel_dim = canon.common_kernel().len();
        if kernel_dim + r >= canon.ambient_cols() {
            return Ok(SubspaceClass::ColumnType);
        }
        let image_dim = canon.common_image().len();
        if image_dim <= r {
            return Ok(SubspaceClass::RowType);
        }
        let exceptional_shape = canon.ambient_rows() == 2
            && canon.ambient_cols() == 2
            && canon.field() == FieldP::F2
            && r == 1;
        if exceptional_shape && !canon.base.is_zero() {
            return Ok(SubspaceClass::Exceptional);
        }
        Ok(SubspaceClass::Unclassified)
    }

    /// Fixture JSON: {field, rows, cols, base, directions[]} with
    /// matrices in the text format.
    pub fn to_fixture_json(&self) -> serde_json::Value {
        json!({
            "field": self.field().modulus(),
            "rows": self.ambient_rows(),
            "cols": self.ambient_cols(),
            "base": self.base.to_text(),
            "directions": self.directions.iter().map(|d| d.to_text()).collect::<Vec<_>>(),
        })
    }

    pub fn from_fixture_json(v: &serde_json::Value) -> Result<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("missing key {k}")));
        let base = Mat::parse_text(get("base")?.as_str().ok_or_else(|| Error::Parse("base must be a string".into()))?)?;
        let dirs = get("directions")?
            .as_array()
            .ok_or_else(|| Error::Parse("directions must be an array".into()))?
            .iter()
            .map(|d| Mat::parse_text(d.as_str().unwrap_or_default()))
            .collect::<Result<Vec<Mat>>>()?;
        AffineSubspace::new(base, dirs)
    }
}

#[derive(Clone)]
pub struct ElementIter {
    space: AffineSubspace,
    code: u128,
    end: u128,
}

impl Iterator for ElementIter {
    type Item = Mat;

    fn next(&mut self) -> Option<Mat> {
        if self.code >= self.end {
            return None;
        }
        let field = self.space.field();
        let q = field.modulus() as u128;
        let mut acc = self.space.base.clone();
        let mut code = self.code;
        for d in &self.space.directions {
            let c = (code % q) as u8;
            code /= q;
            if c != 0 {
                acc = acc.add(&d.scale(c)).unwrap();
            }
        }
        self.code += 1;
        Some(acc)
    }
}

/// Number of k-dimensional linear subspaces of F_q^d.
pub fn gaussian_binomial(d: usize, k: usize, q: u8) -> u128 {
    if k > d {
        return 0;
    }
    // product formula, evaluated as an exact integer by pairing
    // numerator and denominator factors: prod (q^{d-i} - 1) / (q^{k-i} - 1);
    // saturates at u128::MAX, which any budget check rejects anyway
    let q = q as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        let (Some(qd), Some(qk)) = (q.checked_pow((d - i) as u32), q.checked_pow((k - i) as u32))
        else {
            return u128::MAX;
        };
        let (Some(n2), Some(d2)) = (num.checked_mul(qd - 1), den.checked_mul(qk - 1)) else {
            return u128::MAX;
        };
        num = n2;
        den = d2;
    }
    num / den
}

/// Number of k-dimensional affine (or linear) subspaces of F_q^d.
pub fn subspace_count(d: usize, k: usize, q: u8, linear_only: bool) -> u128 {
    let linear = gaussian_binomial(d, k, q);
    if linear_only {
        linear
    } else {
        (q as u128)
            .checked_pow((d - k) as u32)
            .and_then(|c| linear.checked_mul(c))
            .unwrap_or(u128::MAX)
    }
}

/// A choice of pivot columns for a k-dimensional RREF basis in F_q^d,
/// together with the coordinates of its free entries.
#[derive(Debug, Clone)]
pub struct PivotPattern {
    pub d: usize,
    pub pivots: Vec<usize>,
    /// (basis row, ambient coordinate) of each free entry, lexicographic.
    pub free: Vec<(usize, usize)>,
    /// Ambient coordinates that are not pivots, ascending; coset
    /// representatives live on these.
    pub non_pivots: Vec<usize>,
}

impl PivotPattern {
    fn new(d: usize, pivots: Vec<usize>) -> Self {
        let is_pivot: Vec<bool> = {
            let mut s = vec![false; d];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut free = Vec::new();
        for (row, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..d {
                if !is_pivot[c] {
                    free.push((row, c));
                }
            }
        }
        let non_pivots = (0..d).filter(|&c| !is_pivot[c]).collect();
        PivotPattern { d, pivots, free, non_pivots }
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }
}

/// All k-subsets of {0..d}, lexicographic. Small d only.
fn combinations(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..d {
            if d - c < k - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

pub fn pivot_patterns(d: usize, k: usize) -> Vec<PivotPattern> {
    combinations(d, k)
        .into_iter()
        .map(|p| PivotPattern::new(d, p))
        .collect()
}

/// Stream every k-dimensional subspace of Mat_{rows,cols}(F_q) exactly
/// once, in canonical form, ordered lexicographically on (pivot pattern,
/// free entries, coset representative).
pub fn enumerate_affine_subspaces(
    rows: usize,
    cols: usize,
    field: FieldP,
    k: usize,
    linear_only: bool,
    budget: &Budget,
) -> Result<impl Iterator<Item = AffineSubspace>> {
    let d = rows * cols;
    if k > d {
        return Err(Error::Precondition(format!("k = {k} exceeds ambient dimension {d}")));
    }
    budget.check(subspace_count(d, k, field.modulus(), linear_only))?;
    let patterns = pivot_patterns(d, k);
    Ok(patterns
        .into_iter()
        .flat_map(move |pat| PatternIter::new(rows, cols, field, pat, linear_only)))
}

struct PatternIter {
    rows: usize,
    cols: usize,
    field: FieldP,
    pattern: PivotPattern,
    linear_only: bool,
    assign: u128,
    assign_end: u128,
    coset: u128,
    coset_end: u128,
    dirs: Vec<Vec<u8>>,
}

impl PatternIter {
    fn new(rows: usize, cols: usize, field: FieldP, pattern: PivotPattern, linear_only: bool) -> Self {
        let q = field.modulus() as u128;
        let assign_end = q.pow(pattern.free_count() as u32);
        let coset_end = if linear_only { 1 } else { q.pow(pattern.non_pivots.len() as u32) };
        let mut it = PatternIter {
            rows,
            cols,
            field,
            pattern,
            linear_only,
            assign: 0,
            assign_end,
            coset: 0,
            coset_end,
            dirs: Vec::new(),
        };
        it.build_dirs();
        it
    }

    fn build_dirs(&mut self) {
        let q = self.field.modulus() as u128;
        let d = self.pattern.d;
        let mut dirs: Vec<Vec<u8>> = self
            .pattern
            .pivots
            .iter()
            .map(|&pc| {
                let mut v = vec![0u8; d];
                v[pc] = 1;
                v
            })
            .collect();
        let mut code = self.assign;
        for &(row, coord) in &self.pattern.free {
            dirs[row][coord] = (code % q) as u8;
            code /= q;
        }
        self.dirs = dirs;
    }
}

impl Iterator for PatternIter {
    type Item = AffineSubspace;

    fn next(&mut self) -> Option<AffineSubspace> {
        if self.assign >= self.assign_end {
            return None;
        }
        let q = self.field.modulus() as u128;
        let d = self.pattern.d;
        let mut base = vec![0u8; d];
        if !self.linear_only {
            let mut code = self.coset;
            for &coord in &self.pattern.non_pivots {
                base[coord] = (code % q) as u8;
                code /= q;
            }
        }
        let space = AffineSubspace {
            base: Mat::from_vec(self.rows, self.cols, self.field, base).unwrap(),
            directions: self
                .dirs
                .iter()
                .map(|v| Mat::from_vec(self.rows, self.cols, self.field, v.clone()).unwrap())
                .collect(),
        };
        self.coset += 1;
        if self.coset >= self.coset_end {
            self.coset = 0;
            self.assign += 1;
            if self.assign < self.assign_end {
                self.build_dirs();
            }
        }
        Some(space)
    }
}

/// Bit-packed sweep over all k-dimensional subspaces of F2^d, d <= 16.
///
/// Subspaces are delivered as direction bitmasks plus a coset base mask
/// (row-major encoding, matching [`Mat::to_mask`]). Work splits into
/// units of bounded size so sweeps parallelize with no shared state and
/// merge deterministically.
pub struct Gf2Sweep {
    d: usize,
    k: usize,
    linear_only: bool,
    patterns: Vec<PivotPattern>,
}

/// One parallelizable slice of a [`Gf2Sweep`]: a pivot pattern plus a
/// half-open range of free-entry assignments.
#[derive(Debug, Clone)]
pub struct Gf2Unit {
    pub pattern_idx: usize,
    pub assign_lo: u64,
    pub assign_hi: u64,
}

impl Gf2Sweep {
    pub fn new(d: usize, k: usize, linear_only: bool) -> Self {
        assert!(d <= 16 && k <= d);
        Gf2Sweep { d, k, linear_only, patterns: pivot_patterns(d, k) }
    }

    pub fn total(&self) -> u128 {
        subspace_count(self.d, self.k, 2, self.linear_only)
    }

    /// Split into units of at most 2^chunk_bits assignments each.
    pub fn units(&self, chunk_bits: u32) -> Vec<Gf2Unit> {
        let mut units = Vec::new();
        for (idx, pat) in self.patterns.iter().enumerate() {
            let total = 1u64 << pat.free_count();
            let chunk = 1u64 << chunk_bits.min(pat.free_count() as u32);
            let mut lo = 0;
            while lo < total {
                units.push(Gf2Unit { pattern_idx: idx, assign_lo: lo, assign_hi: (lo + chunk).min(total) });
                lo += chunk;
            }
        }
        units
    }

    /// Visit every (directions, coset base) in the unit, in canonical
    /// order. Direction masks are ordered by pivot row.
    pub fn for_each_in_unit<F: FnMut(&[u32], u32)>(&self, unit: &Gf2Unit, mut f: F) {
        let pat = &self.patterns[unit.pattern_idx];
        let coset_end: u64 = if self.linear_only { 1 } else { 1 << pat.non_pivots.len() };
        let mut dirs = vec![0u32; self.k];
        for assign in unit.assign_lo..unit.assign_hi {
            for (row, &pc) in pat.pivots.iter().enumerate() {
                dirs[row] = 1 << pc;
            }
            for (bit, &(row, coord)) in pat.free.iter().enumerate() {
                if assign & (1 << bit) != 0 {
                    dirs[row] |= 1 << coord;
                }
            }
            for coset in 0..coset_end {
                let mut base = 0u32;
                for (bit, &coord) in pat.non_pivots.iter().enumerate() {
                    if coset & (1 << bit) != 0 {
                        base |= 1 << coord;
                    }
                }
                f(&dirs, base);
            }
        }
    }

    pub fn subspace_from_masks(&self, rows: usize, cols: usize, dirs: &[u32], base: u32) -> AffineSubspace {
        debug_assert_eq!(rows * cols, self.d);
        AffineSubspace {
            base: Mat::from_mask(rows, cols, base),
            directions: dirs.iter().map(|&m| Mat::from_mask(rows, cols, m)).collect(),
        }
    }
}

/// Maximum rank over a packed affine subspace, early exit at `stop_at`.
/// Elements are walked by Gray code so each step XORs one direction.
pub fn gf2_max_rank_bounded(table: &Gf2RankTable, dirs: &[u32], base: u32, stop_at: usize) -> usize {
    let mut cur = base;
    let mut best = table.rank(cur);
    if best >= stop_at {
        return best;
    }
    for g in 1u64..1 << dirs.len() {
        cur ^= dirs[g.trailing_zeros() as usize];
        let r = table.rank(cur);
        if r > best {
            best = r;
            if best >= stop_at {
                return best;
            }
        }
    }
    best
}
