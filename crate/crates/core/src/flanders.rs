//! Exhaustive theorem verifiers.
//!
//! Each verifier sweeps a full population of subspaces (or matrix pairs)
//! at desk scale and emits a [`VerificationReport`]. Sweeps over F2 use
//! the bit-packed subspace engine with a per-shape rank lookup table and
//! parallelize over enumeration units; merging is associative so reports
//! are deterministic regardless of worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::mat::{enumerate_all, enumerate_gl, rref_in_place, FieldP, Gf2RankTable, Mat};
use crate::report::VerificationReport;
use crate::subspace::{
    enumerate_affine_subspaces, gf2_max_rank_bounded, subspace_count, AffineSubspace, Gf2Sweep,
    SubspaceClass,
};

/// Whether a sweep ranges over linear subspaces only or over all affine
/// subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Linear,
    Affine,
}

impl Mode {
    pub fn linear_only(self) -> bool {
        matches!(self, Mode::Linear)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Linear => "linear",
            Mode::Affine => "affine",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Mode::Linear),
            "affine" => Ok(Mode::Affine),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

const CHUNK_BITS: u32 = 12;

#[derive(Default)]
struct SweepAcc {
    population: u64,
    census: BTreeMap<String, u64>,
    violations: Vec<String>,
}

impl SweepAcc {
    fn bump(&mut self, key: &str) {
        *self.census.entry(key.to_string()).or_insert(0) += 1;
        self.population += 1;
    }

    fn violation(&mut self, key: &str, fixture: String) {
        self.bump(key);
        self.violations.push(fixture);
    }

    fn merge(mut self, other: SweepAcc) -> SweepAcc {
        self.population += other.population;
        for (k, v) in other.census {
            *self.census.entry(k).or_insert(0) += v;
        }
        self.violations.extend(other.violations);
        self
    }
}

fn fixture(space: &AffineSubspace) -> String {
    space.to_fixture_json().to_string()
}

/// Sweep all k-dimensional subspaces of Mat_{rows,cols}(F_q), applying
/// `visit` to each. F2 ambient spaces of at most 16 coordinates go
/// through the packed engine in parallel.
fn sweep<V>(
    rows: usize,
    cols: usize,
    field: FieldP,
    k: usize,
    mode: Mode,
    budget: &Budget,
    visit: V,
) -> Result<SweepAcc>
where
    V: Fn(&mut SweepAcc, SpaceRef<'_>) + Sync,
{
    let d = rows * cols;
    budget.check(subspace_count(d, k, field.modulus(), mode.linear_only()))?;
    if field == FieldP::F2 && d <= 16 {
        let table = Gf2RankTable::new(rows, cols);
        let sweep = Gf2Sweep::new(d, k, mode.linear_only());
        let units = sweep.units(CHUNK_BITS);
        let acc = units
            .par_iter()
            .map(|unit| {
                let mut acc = SweepAcc::default();
                sweep.for_each_in_unit(unit, |dirs, base| {
                    visit(
                        &mut acc,
                        SpaceRef::Packed { sweep: &sweep, table: &table, rows, cols, dirs, base },
                    );
                });
                acc
            })
            .reduce(SweepAcc::default, SweepAcc::merge);
        Ok(acc)
    } else {
        let mut acc = SweepAcc::default();
        for space in enumerate_affine_subspaces(rows, cols, field, k, mode.linear_only(), budget)? {
            visit(&mut acc, SpaceRef::Generic { space: &space, budget });
        }
        Ok(acc)
    }
}

/// A subspace as seen by a sweep visitor: either packed masks or a
/// generic value. Rank queries dispatch to the right engine.
enum SpaceRef<'a> {
    Packed {
        sweep: &'a Gf2Sweep,
        table: &'a Gf2RankTable,
        rows: usize,
        cols: usize,
        dirs: &'a [u32],
        base: u32,
    },
    Generic {
        space: &'a AffineSubspace,
        budget: &'a Budget,
    },
}

impl SpaceRef<'_> {
    fn max_rank_bounded(&self, stop_at: usize) -> usize {
        match self {
            SpaceRef::Packed { table, dirs, base, .. } => {
                gf2_max_rank_bounded(table, dirs, *base, stop_at)
            }
            SpaceRef::Generic { space, budget } => {
                space.max_rank_bounded(stop_at, budget).expect("budget checked by sweep")
            }
        }
    }

    fn materialize(&self) -> AffineSubspace {
        match self {
            SpaceRef::Packed { sweep, rows, cols, dirs, base, .. } => {
                sweep.subspace_from_masks(*rows, *cols, dirs, *base)
            }
            SpaceRef::Generic { space, .. } => (*space).clone(),
        }
    }
}

fn finish(
    theorem_id: &str,
    params: &[(&str, String)],
    acc: SweepAcc,
    start: Instant,
) -> VerificationReport {
    VerificationReport::new(
        theorem_id,
        params,
        acc.population,
        acc.census,
        acc.violations,
        start.elapsed().as_millis() as u64,
    )
}

/// Flanders bound: every subspace of Mat_n(F_q) of dimension nr + 1
/// contains an element of rank above r.
pub fn verify_rank_bound(n: usize, field: FieldP, r: usize, mode: Mode, budget: &Budget) -> Result<VerificationReport> {
    rank_bound_rect(n, n, field, r, mode, budget, "flanders.bound")
}

fn rank_bound_rect(
    rows: usize,
    cols: usize,
    field: FieldP,
    r: usize,
    mode: Mode,
    budget: &Budget,
    theorem_id: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let params = params_for(rows, cols, field, Some(r), Some(mode));
    let k = rows * r + 1;
    let d = rows * cols;
    if k > d {
        // nothing to sweep: the bound holds vacuously at this dimension
        let mut census = BTreeMap::new();
        census.insert("bound_vacuous".to_string(), 0);
        return Ok(VerificationReport::new(theorem_id, &params, 0, census, vec![], 0));
    }
    let acc = sweep(rows, cols, field, k, mode, budget, |acc, space| {
        if space.max_rank_bounded(r + 1) > r {
            acc.bump("contains_higher_rank");
        } else {
            acc.violation("bounded_rank_counterexample", fixture(&space.materialize()));
        }
    })?;
    Ok(finish(theorem_id, &params, acc, start))
}

/// Flanders classification: every nr-dimensional subspace of max rank r
/// is column type, row type, or the (n=2, q=2, r=1, non-linear)
/// exception; anything unclassified is a violation.
pub fn classify_maximal(n: usize, field: FieldP, r: usize, mode: Mode, budget: &Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let params = params_for(n, n, field, Some(r), Some(mode));
    let acc = classification_sweep(n, n, field, r, mode, budget, |_| false)?;
    Ok(finish("flanders.classification", &params, acc, start))
}

fn classification_sweep<X>(
    rows: usize,
    cols: usize,
    field: FieldP,
    r: usize,
    mode: Mode,
    budget: &Budget,
    extra_violation: X,
) -> Result<SweepAcc>
where
    X: Fn(SubspaceClass) -> bool + Sync,
{
    let k = rows * r;
    sweep(rows, cols, field, k, mode, budget, |acc, space| {
        if space.max_rank_bounded(r + 1) > r {
            acc.bump("out_of_scope");
            return;
        }
        let s = space.materialize();
        let class = s.classify(r).expect("sweep emits spaces of dimension rows*r");
        if class == SubspaceClass::Unclassified || extra_violation(class) {
            acc.violation(class.key(), fixture(&s));
        } else {
            acc.bump(class.key());
        }
    })
}

/// Census of the exceptional case: all 2-dimensional affine subspaces of
/// Mat_2(F2) of max rank 1, split by linearity and class, with the
/// explicit singular plane (and its transpose) located in the output.
pub fn exceptional_census(budget: &Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let field = FieldP::F2;
    let plane = AffineSubspace::exceptional_plane().canonicalize();
    let plane_t = AffineSubspace::exceptional_plane().transpose().canonicalize();
    let mut acc = sweep(2, 2, field, 2, Mode::Affine, budget, |acc, space| {
        if space.max_rank_bounded(2) > 1 {
            acc.bump("out_of_scope");
            return;
        }
        let s = space.materialize();
        let class = s.classify(1).expect("dimension 2 = n*r");
        let prefix = if s.is_linear() { "linear" } else { "affine" };
        if class == SubspaceClass::Unclassified {
            acc.violation(&format!("{prefix}_{}", class.key()), fixture(&s));
            return;
        }
        acc.bump(&format!("{prefix}_{}", class.key()));
        if s == plane {
            acc.census.insert("paper_plane_found".to_string(), 1);
        }
        if s == plane_t {
            acc.census.insert("paper_plane_transpose_found".to_string(), 1);
        }
    })?;
    // the marker keys are not population buckets; account for them here
    for marker in ["paper_plane_found", "paper_plane_transpose_found"] {
        if acc.census.get(marker).copied().unwrap_or(0) == 0 {
            acc.violations.push(format!("missing expected census member: {marker}"));
            acc.census.insert(marker.to_string(), 0);
        }
    }
    let params = params_for(2, 2, field, Some(1), Some(Mode::Affine));
    Ok(finish("flanders.exceptional_census", &params, acc, start))
}

/// Split lemma: every pq-dimensional linear subspace of
/// Mat_{p,q} x Mat_{q,p} satisfying the orthogonality hypotheses is one
/// of the two factors, except the diagonal line when p = q = 1 over F2.
pub fn split_lemma_check(p: usize, q: usize, field: FieldP, budget: &Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let d = 2 * p * q;
    let k = p * q;
    budget.check(subspace_count(d, k, field.modulus(), true))?;
    let gl_q: Vec<Mat> = enumerate_gl(q, field, budget)?.collect();
    let mut acc = SweepAcc::default();
    for h in enumerate_affine_subspaces(1, d, field, k, true, budget)? {
        let elements: Vec<(Mat, Mat)> = h
            .elements(budget)?
            .map(|v| split_pair(&v, p, q, field))
            .collect();
        let hyp_i = elements.iter().all(|(l1, c1)| {
            elements.iter().all(|(l2, c2)| {
                gl_q.iter().all(|g| {
                    let t1 = l1.mul(g).unwrap().mul(c2).unwrap();
                    let t2 = l2.mul(g).unwrap().mul(c1).unwrap();
                    t1.add(&t2).unwrap().is_zero()
                })
            })
        });
        let hyp_ii = if field.modulus() > 2 && p == 1 && q == 1 {
            elements.iter().all(|(l, c)| {
                gl_q.iter().all(|g| l.mul(g).unwrap().mul(c).unwrap().is_zero())
            })
        } else {
            true
        };
        if !(hyp_i && hyp_ii) {
            acc.bump("hypothesis_failed");
            continue;
        }
        let all_c_zero = elements.iter().all(|(_, c)| c.is_zero());
        let all_l_zero = elements.iter().all(|(l, _)| l.is_zero());
        if all_c_zero && !all_l_zero {
            acc.bump("factor_left");
        } else if all_l_zero && !all_c_zero {
            acc.bump("factor_right");
        } else if p == 1 && q == 1 && field == FieldP::F2 {
            acc.bump("exceptional_diagonal");
        } else {
            acc.violation("conclusion_violated", fixture(&h));
        }
    }
    let params = vec![
        ("p", p.to_string()),
        ("q_dim", q.to_string()),
        ("field", field.modulus().to_string()),
    ];
    Ok(finish("flanders.split_lemma", &params, acc, start))
}

fn split_pair(v: &Mat, p: usize, q: usize, field: FieldP) -> (Mat, Mat) {
    let flat = v.to_vec();
    let l = Mat::from_vec(p, q, field, flat[..p * q].to_vec()).unwrap();
    let c = Mat::from_vec(q, p, field, flat[p * q..].to_vec()).unwrap();
    (l, c)
}

/// Rank-one sum lemma: for rank-1 matrices M, N with M + N of rank 1,
/// the kernels or the images coincide.
pub fn rank_one_sum_check(n: usize, field: FieldP, budget: &Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let rank_one: Vec<Mat> = enumerate_all(n, n, field, budget)?
        .filter(|m| m.rank() == 1)
        .collect();
    budget.check((rank_one.len() as u128).pow(2))?;
    let mut acc = SweepAcc::default();
    for m in &rank_one {
        for nn in &rank_one {
            let sum = m.add(nn).unwrap();
            if sum.rank() != 1 {
                acc.bump("sum_rank_differs");
                continue;
            }
            let kernels_match = m.kernel_basis() == nn.kernel_basis();
            let images_match = column_space(m) == column_space(nn);
            if kernels_match || images_match {
                acc.bump("consistent");
            } else {
                acc.violation(
                    "lemma_violated",
                    format!("{{\"m\":\"{}\",\"n\":\"{}\"}}", m.to_text(), nn.to_text()),
                );
            }
        }
    }
    acc.census.insert("rank_one_matrices".to_string(), rank_one.len() as u64);
    acc.population += rank_one.len() as u64;
    let params = params_for(n, n, field, None, None);
    Ok(finish("flanders.rank_one_sum", &params, acc, start))
}

fn column_space(m: &Mat) -> Vec<Vec<u8>> {
    let mut rows: Vec<Vec<u8>> = (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m.get(i, j)).collect())
        .collect();
    rref_in_place(m.field(), m.rows(), &mut rows);
    rows
}

/// Rectangular corollary: for n > p, the bound at dimension nr + 1 and
/// the classification at dimension nr, where every maximal space must be
/// column type.
pub fn rectangular_check(n: usize, p: usize, field: FieldP, r: usize, budget: &Budget) -> Result<VerificationReport> {
    if n <= p {
        return Err(Error::Precondition(format!("rectangular check needs n > p, got {n} <= {p}")));
    }
    let start = Instant::now();
    let bound = rank_bound_rect(n, p, field, r, Mode::Affine, budget, "flanders.rectangular")?;
    let class_acc = classification_sweep(n, p, field, r, Mode::Affine, budget, |class| {
        class != SubspaceClass::ColumnType
    })?;
    let mut census = class_acc.census;
    for (k, v) in bound.census {
        *census.entry(format!("bound_{k}")).or_insert(0) += v;
    }
    let mut violations = class_acc.violations;
    violations.extend(bound.violations);
    let params = params_for(n, p, field, Some(r), Some(Mode::Affine));
    Ok(VerificationReport::new(
        "flanders.rectangular",
        &params,
        bound.population + class_acc.population,
        census,
        violations,
        start.elapsed().as_millis() as u64,
    ))
}

/// Affine span of GL_n(F_q): the full matrix space, except the single
/// point {1} at n = 1 over F2.
pub fn affine_span_gl(n: usize, field: FieldP, budget: &Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut gl = enumerate_gl(n, field, budget)?;
    let first = gl.next().expect("GL_n is never empty");
    let d = n * n;
    let mut diffs: Vec<Vec<u8>> = Vec::new();
    let mut count = 1u64;
    for g in gl {
        diffs.push(g.sub(&first).unwrap().to_vec());
        count += 1;
    }
    let span_dim = rref_in_place(field, d, &mut diffs).len();
    let expected = if n == 1 && field == FieldP::F2 { 0 } else { d };
    let mut census = BTreeMap::new();
    census.insert("gl_count".to_string(), count);
    census.insert("span_dim".to_string(), span_dim as u64);
    let violations = if span_dim == expected {
        vec![]
    } else {
        vec![format!("affine span has dimension {span_dim}, expected {expected}")]
    };
    let params = params_for(n, n, field, None, None);
    Ok(VerificationReport::new(
        "flanders.affine_span_gl",
        &params,
        count,
        census,
        violations,
        start.elapsed().as_millis() as u64,
    ))
}

fn params_for(
    rows: usize,
    cols: usize,
    field: FieldP,
    r: Option<usize>,
    mode: Option<Mode>,
) -> Vec<(&'static str, String)> {
    let mut params = vec![
        ("n", rows.to_string()),
        ("p", cols.to_string()),
        ("field", field.modulus().to_string()),
    ];
    if let Some(r) = r {
        params.push(("r", r.to_string()));
    }
    if let Some(mode) = mode {
        params.push(("mode", mode.as_str().to_string()));
    }
    params
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn bound_small_cases() {
        let r = verify_rank_bound(2, FieldP::F2, 1, Mode::Affine, &budget()).unwrap();
        assert!(r.pass);
        assert_eq!(r.population, 30);
        let r3 = verify_rank_bound(2, FieldP::F3, 1, Mode::Affine, &budget()).unwrap();
        assert!(r3.pass);
        assert_eq!(r3.population, 120);
    }

    #[test]
    fn bound_monotone_above_maximal_dimension_at_n2_q2() {
        // any subspace of dimension above nr also contains rank > r:
        // sweep every dimension from nr+1 up to the full space
        for k in 3..=4 {
            let acc = sweep(2, 2, FieldP::F2, k, Mode::Affine, &budget(), |acc, space| {
                if space.max_rank_bounded(2) > 1 {
                    acc.bump("ok");
                } else {
                    acc.violation("bad", fixture(&space.materialize()));
                }
            })
            .unwrap();
            assert!(acc.violations.is_empty(), "dimension {k}");
        }
    }

    #[test]
    fn classification_exceptional_only_when_affine_over_f2() {
        let affine = classify_maximal(2, FieldP::F2, 1, Mode::Affine, &budget()).unwrap();
        assert!(affine.pass);
        assert!(affine.census_count("exceptional") > 0);
        assert_eq!(affine.census_count("unclassified"), 0);
        assert_eq!(affine.census_count("column_type"), 3);
        assert_eq!(affine.census_count("row_type"), 3);

        let linear = classify_maximal(2, FieldP::F2, 1, Mode::Linear, &budget()).unwrap();
        assert!(linear.pass);
        assert_eq!(linear.census_count("exceptional"), 0);

        let f3 = classify_maximal(2, FieldP::F3, 1, Mode::Affine, &budget()).unwrap();
        assert!(f3.pass);
        assert_eq!(f3.census_count("exceptional"), 0);
    }

    #[test]
    fn classification_census_sums_to_population() {
        let r = classify_maximal(2, FieldP::F2, 1, Mode::Affine, &budget()).unwrap();
        let total: u64 = r.census.values().sum();
        assert_eq!(total, r.population);
    }

    #[test]
    fn transposition_symmetry_of_maximal_census() {
        // transposing every subspace swaps the column/row counts and
        // fixes the exceptional count; verified by reclassifying the
        // transposed survivors
        let mut column = 0u64;
        let mut row = 0u64;
        let mut exceptional = 0u64;
        let acc = sweep(2, 2, FieldP::F2, 2, Mode::Affine, &budget(), |acc, space| {
            if space.max_rank_bounded(2) > 1 {
                acc.bump("out_of_scope");
                return;
            }
            let t = space.materialize().transpose();
            acc.bump(t.classify(1).unwrap().key());
        })
        .unwrap();
        let direct = classify_maximal(2, FieldP::F2, 1, Mode::Affine, &budget()).unwrap();
        column += acc.census.get("column_type").copied().unwrap_or(0);
        row += acc.census.get("row_type").copied().unwrap_or(0);
        exceptional += acc.census.get("exceptional").copied().unwrap_or(0);
        assert_eq!(column, direct.census_count("row_type"));
        assert_eq!(row, direct.census_count("column_type"));
        assert_eq!(exceptional, direct.census_count("exceptional"));
    }

    #[test]
    fn exceptional_census_contains_paper_plane() {
        let r = exceptional_census(&budget()).unwrap();
        assert!(r.pass);
        assert_eq!(r.census_count("paper_plane_found"), 1);
        assert_eq!(r.census_count("paper_plane_transpose_found"), 1);
        assert!(r.census_count("affine_exceptional") > 0);
    }

    #[test]
    fn split_lemma_small_instances() {
        let f2 = split_lemma_check(1, 1, FieldP::F2, &budget()).unwrap();
        assert!(f2.pass);
        assert_eq!(f2.census_count("exceptional_diagonal"), 1);
        assert_eq!(f2.census_count("factor_left"), 1);
        assert_eq!(f2.census_count("factor_right"), 1);

        let f3 = split_lemma_check(1, 1, FieldP::F3, &budget()).unwrap();
        assert!(f3.pass);
        assert_eq!(f3.census_count("exceptional_diagonal"), 0);
        assert_eq!(f3.census_count("factor_left") + f3.census_count("factor_right"), 2);

        let rect = split_lemma_check(1, 2, FieldP::F2, &budget()).unwrap();
        assert!(rect.pass);
        assert_eq!(rect.census_count("exceptional_diagonal"), 0);
        assert_eq!(rect.census_count("factor_left"), 1);
        assert_eq!(rect.census_count("factor_right"), 1);
        assert_eq!(rect.population, 35);
    }

    #[test]
    fn diagonal_line_satisfies_hypothesis_directly() {
        // membership of the diagonal verified by direct evaluation:
        // L P C' + L' P C = 1 + 1 = 0 over F2
        let f = FieldP::F2;
        let one = Mat::identity(1, f);
        let t = one.mul(&one).unwrap().mul(&one).unwrap();
        assert!(t.add(&t).unwrap().is_zero());
    }

    #[test]
    fn rank_one_sum_examples() {
        let f = FieldP::F2;
        let e11 = Mat::elementary(2, 2, f, 0, 0);
        let e12 = Mat::elementary(2, 2, f, 0, 1);
        let e22 = Mat::elementary(2, 2, f, 1, 1);
        let s = e11.add(&e12).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(column_space(&e11), column_space(&e12));
        assert_eq!(e11.add(&e22).unwrap().rank(), 2);

        let report = rank_one_sum_check(2, f, &budget()).unwrap();
        assert!(report.pass);
        assert_eq!(report.census_count("rank_one_matrices"), 9);
        let pairs = report.census_count("consistent") + report.census_count("sum_rank_differs");
        assert_eq!(pairs, 81);
    }

    #[test]
    fn rectangular_corollary_small() {
        let r = rectangular_check(3, 2, FieldP::F2, 1, &budget()).unwrap();
        assert!(r.pass);
        assert!(r.census_count("column_type") > 0);
        assert_eq!(r.census_count("row_type"), 0);
        assert_eq!(r.census_count("exceptional"), 0);
        // n=2, p=1, r=1: the whole column space is the only maximal space
        let t = rectangular_check(2, 1, FieldP::F2, 1, &budget()).unwrap();
        assert!(t.pass);
        // r = p: the bound dimension exceeds the ambient space
        let v = rectangular_check(3, 2, FieldP::F2, 2, &budget()).unwrap();
        assert!(v.pass);
        assert!(v.census.contains_key("bound_bound_vacuous"));
    }

    #[test]
    fn affine_span_examples() {
        let r = affine_span_gl(2, FieldP::F2, &budget()).unwrap();
        assert!(r.pass);
        assert_eq!(r.census_count("span_dim"), 4);
        let r3 = affine_span_gl(2, FieldP::F3, &budget()).unwrap();
        assert!(r3.pass);
        assert_eq!(r3.census_count("span_dim"), 4);
        let single = affine_span_gl(1, FieldP::F2, &budget()).unwrap();
        assert!(single.pass);
        assert_eq!(single.census_count("span_dim"), 0);
    }

    #[test]
    fn budget_guard_propagates() {
        let tiny = Budget::new(10);
        assert!(matches!(
            verify_rank_bound(2, FieldP::F2, 1, Mode::Affine, &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
