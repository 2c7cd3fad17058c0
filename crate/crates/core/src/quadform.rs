//! Quadratic forms over F2 in even dimension.
//!
//! A form is keyed by its unique upper-triangular representing matrix T,
//! so equality of forms is equality of T. The polar form is the
//! alternating Gram matrix T + T^t; a form is regular when its polar
//! form is nonsingular. The Arf invariant is computed straight from the
//! definition: extract a symplectic basis by hyperbolic-pair splitting
//! and sum q(e_i) q(f_i).
//!
//! The sixteen-element space of forms with the canonical symplectic
//! polar form on F2^4 is materialized eagerly, indexed by reading the
//! T-diagonal (a, b, c, d) as the 4-bit integer a + 2b + 4c + 8d. The
//! diagonal also encodes the 2x2 matrix [a d; b c], whose determinant
//! equals the Arf invariant.

use crate::error::{Error, Result};
use crate::mat::{FieldP, Mat};

/// Quadratic form over F2, stored as its upper-triangular representing
/// matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    t: Mat,
}

impl QuadForm {
    pub fn new(t: Mat) -> Result<Self> {
        if t.field() != FieldP::F2 {
            return Err(Error::UnsupportedField(t.field().modulus()));
        }
        if !t.is_square() {
            return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
        }
        for i in 0..t.rows() {
            for j in 0..i {
                if t.get(i, j) != 0 {
                    return Err(Error::NotUpperTriangular);
                }
            }
        }
        Ok(QuadForm { t })
    }

    /// Build from an arbitrary representing matrix by folding the lower
    /// triangle onto the upper one.
    pub fn from_representing(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let mut t = Mat::zeros(n, n, FieldP::F2);
        for i in 0..n {
            t = t.with_entry(i, i, a.get(i, i));
            for j in i + 1..n {
                t = t.with_entry(i, j, a.get(i, j) ^ a.get(j, i));
            }
        }
        QuadForm::new(t)
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    pub fn representing(&self) -> &Mat {
        &self.t
    }

    pub fn diagonal(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| self.t.get(i, i)).collect()
    }

    /// q(x) = x^t T x.
    pub fn eval(&self, x: &[u8]) -> u8 {
        debug_assert_eq!(x.len(), self.dim());
        let mut acc = 0u8;
        for i in 0..self.dim() {
            if x[i] == 0 {
                continue;
            }
            for j in i..self.dim() {
                acc ^= self.t.get(i, j) & x[j];
            }
        }
        acc
    }

    /// Gram matrix of the polar form: T + T^t.
    pub fn polar(&self) -> Mat {
        self.t.add(&self.t.transpose()).unwrap()
    }

    pub fn is_regular(&self) -> bool {
        self.polar().det().unwrap() != 0
    }

    /// The form q ∘ u for a linear substitution u, i.e. x -> q(u x):
    /// the upper-triangular fold of u^t T u.
    pub fn compose(&self, u: &Mat) -> Result<QuadForm> {
        let a = u.transpose().mul(&self.t)?.mul(u)?;
        QuadForm::from_representing(&a)
    }

    /// Add a linear functional (char 2: squares are additive, so a
    /// functional is a diagonal adjustment of T). Stays in the same
    /// polar class.
    pub fn add_functional(&self, l: &[u8]) -> QuadForm {
        let mut t = self.t.clone();
        for (i, &li) in l.iter().enumerate() {
            t = t.with_entry(i, i, t.get(i, i) ^ (li & 1));
        }
        QuadForm { t }
    }

    /// Arf invariant of a regular form, computed over a symplectic basis
    /// of the polar form as sum of q(e_i) q(f_i).
    pub fn arf(&self) -> Result<u8> {
        let basis = symplectic_basis(&self.polar())?;
        let mut acc = 0u8;
        for (e, f) in &basis.pairs {
            acc ^= self.eval(e) & self.eval(f);
        }
        Ok(acc)
    }
}

/// Hyperbolic pairs (e_i, f_i) with b(e_i, f_j) = delta_ij and all other
/// pairings zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SympBasis {
    pub pairs: Vec<(Vec<u8>, Vec<u8>)>,
}

impl SympBasis {
    /// Recompute all pairings against a Gram matrix; the oracle for any
    /// claimed symplectic basis.
    pub fn is_valid_for(&self, gram: &Mat) -> bool {
        let b = |x: &[u8], y: &[u8]| -> u8 {
            let mut acc = 0u8;
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0 {
                    continue;
                }
                for (j, &yj) in y.iter().enumerate() {
                    acc = gram.field().add(acc, gram.field().mul(gram.get(i, j), yj & xi));
                }
            }
            acc
        };
        let k = self.pairs.len();
        for i in 0..k {
            for j in 0..k {
                let (ei, fi) = &self.pairs[i];
                let (ej, fj) = &self.pairs[j];
                if b(ei, fj) != u8::from(i == j) {
                    return false;
                }
                if b(ei, ej) != 0 || b(fi, fj) != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Extract a symplectic basis from a nonsingular alternating Gram matrix
/// over F2 by hyperbolic-pair splitting: take the first unprocessed
/// vector e, find f with b(e, f) = 1, then project the rest onto the
/// orthogonal complement of the pair.
pub fn symplectic_basis(gram: &Mat) -> Result<SympBasis> {
    let n = gram.rows();
    if gram.field() != FieldP::F2 {
        return Err(Error::UnsupportedField(gram.field().modulus()));
    }
    if !gram.is_square() || n % 2 != 0 {
        return Err(Error::DegenerateForm);
    }
    for i in 0..n {
        if gram.get(i, i) != 0 {
            return Err(Error::DegenerateForm);
        }
        for j in 0..n {
            if gram.get(i, j) != gram.get(j, i) {
                return Err(Error::DegenerateForm);
            }
        }
    }
    if gram.det()? == 0 {
        return Err(Error::DegenerateForm);
    }
    let b = |x: &[u8], y: &[u8]| -> u8 {
        let mut acc = 0u8;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc ^= gram.get(i, j) & y[j];
            }
        }
        acc
    };
    let mut remaining: Vec<Vec<u8>> = (0..n)
        .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
        .collect();
    let mut pairs = Vec::with_capacity(n / 2);
    while !remaining.is_empty() {
        let e = remaining.remove(0);
        let pos = remaining
            .iter()
            .position(|v| b(&e, v) == 1)
            .ok_or(Error::DegenerateForm)?;
        let f = remaining.remove(pos);
        for v in &mut remaining {
            let ce = b(v, &f);
            let cf = b(v, &e);
            for i in 0..n {
                v[i] ^= (ce & e[i]) ^ (cf & f[i]);
            }
        }
        remaining.retain(|v| v.iter().any(|&x| x != 0));
        pairs.push((e, f));
    }
    Ok(SympBasis { pairs })
}

/// Canonical symplectic Gram on F2^4 pairing coordinates (1,3) and
/// (2,4), matching the fixed off-diagonal pattern of the form space.
pub fn canonical_gram() -> Mat {
    let mut g = Mat::zeros(4, 4, FieldP::F2);
    g = g.with_entry(0, 2, 1).with_entry(2, 0, 1);
    g = g.with_entry(1, 3, 1).with_entry(3, 1, 1);
    g
}

/// The affine space of all 16 quadratic forms on F2^4 with the canonical
/// symplectic polar form, in diagonal-index order.
#[derive(Debug, Clone)]
pub struct QSpace {
    gram: Mat,
    forms: Vec<QuadForm>,
}

impl QSpace {
    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn forms(&self) -> &[QuadForm] {
        &self.forms
    }

    /// Index of a form by its diagonal nibble a + 2b + 4c + 8d.
    pub fn index_of(&self, q: &QuadForm) -> Result<usize> {
        let idx = diag_nibble(q)?;
        if self.forms[idx] != *q {
            return Err(Error::NotInFormSpace);
        }
        Ok(idx)
    }

    /// Positions (in ascending index order) of the six forms with Arf
    /// invariant 1.
    pub fn arf_one_indices(&self) -> Vec<usize> {
        self.forms
            .iter()
            .enumerate()
            .filter(|(_, q)| q.arf().unwrap() == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

fn diag_nibble(q: &QuadForm) -> Result<usize> {
    if q.dim() != 4 {
        return Err(Error::NotInFormSpace);
    }
    // off-diagonal part must be exactly the canonical pattern
    let expected = base_form_t();
    for i in 0..4 {
        for j in i + 1..4 {
            if q.representing().get(i, j) != expected.get(i, j) {
                return Err(Error::NotInFormSpace);
            }
        }
    }
    let d = q.diagonal();
    Ok(d[0] as usize | (d[1] as usize) << 1 | (d[2] as usize) << 2 | (d[3] as usize) << 3)
}

fn base_form_t() -> Mat {
    Mat::zeros(4, 4, FieldP::F2).with_entry(0, 2, 1).with_entry(1, 3, 1)
}

pub fn q_space() -> QSpace {
    let base = base_form_t();
    let forms = (0..16usize)
        .map(|nib| {
            let mut t = base.clone();
            for (i, _) in (0..4).enumerate() {
                t = t.with_entry(i, i, ((nib >> i) & 1) as u8);
            }
            QuadForm::new(t).unwrap()
        })
        .collect();
    QSpace { gram: canonical_gram(), forms }
}

/// The six Arf-1 forms, ascending index order.
pub fn q1_space() -> Vec<QuadForm> {
    let space = q_space();
    space
        .arf_one_indices()
        .into_iter()
        .map(|i| space.forms[i].clone())
        .collect()
}

/// Read the diagonal (a, b, c, d) of a form in the fixed space as the
/// 2x2 matrix [a d; b c]. Its determinant equals the Arf invariant.
pub fn m_of_q(q: &QuadForm) -> Result<Mat> {
    diag_nibble(q)?;
    let d = q.diagonal();
    Mat::new(2, 2, FieldP::F2, vec![d[0], d[3], d[1], d[2]])
}

/// Inverse of [`m_of_q`].
pub fn q_of_m(m: &Mat) -> Result<QuadForm> {
    if m.rows() != 2 || m.cols() != 2 || m.field() != FieldP::F2 {
        return Err(Error::ShapeMismatch("expected a 2x2 matrix over F2".into()));
    }
    let mut t = base_form_t();
    t = t.with_entry(0, 0, m.get(0, 0));
    t = t.with_entry(1, 1, m.get(1, 0));
    t = t.with_entry(2, 2, m.get(1, 1));
    t = t.with_entry(3, 3, m.get(0, 1));
    QuadForm::new(t)
}

/// The determinant of Mat_2(F2) as a quadratic form on the row-major
/// vectorization (m11, m12, m21, m22): det = m11 m22 + m12 m21.
pub fn det_form() -> QuadForm {
    let t = Mat::zeros(4, 4, FieldP::F2).with_entry(0, 3, 1).with_entry(1, 2, 1);
    QuadForm::new(t).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> Mat {
        Mat::parse_text(text).unwrap()
    }

    #[test]
    fn polar_examples() {
        let q = QuadForm::new(Mat::elementary(2, 2, FieldP::F2, 0, 1)).unwrap();
        assert_eq!(q.polar(), m("2:2:2:0,1,1,0"));
        // paper pattern with diagonal (1,0,1,1)
        let form = q_of_m(&m("2:2:2:1,1,0,1")).unwrap();
        assert_eq!(form.polar(), canonical_gram());
        // a pure square in dimension 2 has zero polar form
        let sq = QuadForm::new(Mat::elementary(2, 2, FieldP::F2, 0, 0)).unwrap();
        assert!(sq.polar().is_zero());
        assert!(!sq.is_regular());
    }

    #[test]
    fn polar_identity_exhaustive() {
        // q(x+y) + q(x) + q(y) = b_q(x, y) over all 256 pairs per form
        for q in q_space().forms() {
            let gram = q.polar();
            for x_code in 0..16u8 {
                for y_code in 0..16u8 {
                    let x: Vec<u8> = (0..4).map(|i| (x_code >> i) & 1).collect();
                    let y: Vec<u8> = (0..4).map(|i| (y_code >> i) & 1).collect();
                    let xy: Vec<u8> = (0..4).map(|i| x[i] ^ y[i]).collect();
                    let lhs = q.eval(&xy) ^ q.eval(&x) ^ q.eval(&y);
                    let mut rhs = 0u8;
                    for i in 0..4 {
                        for j in 0..4 {
                            rhs ^= x[i] & gram.get(i, j) & y[j];
                        }
                    }
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn regularity_examples() {
        assert!(q_space().forms()[0].is_regular());
        assert!(det_form().is_regular());
    }

    #[test]
    fn symplectic_basis_on_canonical_gram() {
        let basis = symplectic_basis(&canonical_gram()).unwrap();
        assert_eq!(basis.pairs.len(), 2);
        assert!(basis.is_valid_for(&canonical_gram()));
    }

    #[test]
    fn symplectic_basis_pairs_det_coordinates() {
        // Gram of the det polar form in the basis (E11, E22, E12, E21):
        // pairs E11 with E22 and E12 with E21
        let g = Mat::zeros(4, 4, FieldP::F2)
            .with_entry(0, 1, 1)
            .with_entry(1, 0, 1)
            .with_entry(2, 3, 1)
            .with_entry(3, 2, 1);
        let basis = symplectic_basis(&g).unwrap();
        assert!(basis.is_valid_for(&g));
        assert_eq!(basis.pairs[0], (vec![1, 0, 0, 0], vec![0, 1, 0, 0]));
        assert_eq!(basis.pairs[1], (vec![0, 0, 1, 0], vec![0, 0, 0, 1]));
    }

    #[test]
    fn symplectic_basis_rejects_degenerate_gram() {
        assert!(symplectic_basis(&Mat::zeros(4, 4, FieldP::F2)).is_err());
        assert!(symplectic_basis(&Mat::identity(4, FieldP::F2)).is_err());
    }

    #[test]
    fn symplectic_basis_in_dimension_six() {
        // scramble the canonical three-pair gram with a basis change and
        // validate the extracted basis by recomputing all pairings
        let f = FieldP::F2;
        let mut g = Mat::zeros(6, 6, f);
        for i in 0..3 {
            g = g.with_entry(2 * i, 2 * i + 1, 1).with_entry(2 * i + 1, 2 * i, 1);
        }
        let u = m("2:6:6:1,1,0,0,1,0,0,1,0,0,0,1,0,0,1,1,0,0,0,0,0,1,0,0,0,1,0,0,1,0,1,0,0,0,0,1");
        assert!(u.is_invertible());
        let scrambled = u.transpose().mul(&g).unwrap().mul(&u).unwrap();
        let basis = symplectic_basis(&scrambled).unwrap();
        assert_eq!(basis.pairs.len(), 3);
        assert!(basis.is_valid_for(&scrambled));
    }

    #[test]
    fn arf_examples() {
        // hyperbolic form x1 y1 + x2 y2
        let hyper = q_of_m(&Mat::zeros(2, 2, FieldP::F2)).unwrap();
        assert_eq!(hyper.arf().unwrap(), 0);
        // x1^2 + x1 y1 + y1^2 + x2 y2 in pair coordinates (1,3),(2,4)
        let t = base_form_t().with_entry(0, 0, 1).with_entry(2, 2, 1);
        let q = QuadForm::new(t).unwrap();
        assert_eq!(q.arf().unwrap(), 1);
        // non-regular forms rejected
        let sq = QuadForm::new(Mat::elementary(2, 2, FieldP::F2, 0, 0)).unwrap();
        assert!(sq.arf().is_err());
    }

    #[test]
    fn q_space_counts() {
        let space = q_space();
        assert_eq!(space.forms().len(), 16);
        let q1 = q1_space();
        assert_eq!(q1.len(), 6);
        let arf0 = space.forms().iter().filter(|q| q.arf().unwrap() == 0).count();
        assert_eq!(arf0, 10);
        for q in space.forms() {
            assert_eq!(q.polar(), canonical_gram());
        }
    }

    #[test]
    fn det_of_m_equals_arf_for_all_sixteen_forms() {
        for q in q_space().forms() {
            let m = m_of_q(q).unwrap();
            assert_eq!(m.det().unwrap(), q.arf().unwrap());
        }
    }

    #[test]
    fn m_of_q_bijection() {
        let space = q_space();
        for code in 0..16u32 {
            let mm = Mat::from_mask(2, 2, code);
            let q = q_of_m(&mm).unwrap();
            assert_eq!(m_of_q(&q).unwrap(), mm);
            assert!(space.index_of(&q).is_ok());
        }
        assert_eq!(m_of_q(&q_of_m(&Mat::zeros(2, 2, FieldP::F2)).unwrap()).unwrap(), Mat::zeros(2, 2, FieldP::F2));
        // all-ones diagonal gives the all-ones matrix with det 0 = Arf
        let all_ones = Mat::new(2, 2, FieldP::F2, vec![1, 1, 1, 1]).unwrap();
        let q = q_of_m(&all_ones).unwrap();
        assert_eq!(q.arf().unwrap(), 0);
        // a form outside the fixed space is rejected
        let stray = QuadForm::new(Mat::elementary(4, 4, FieldP::F2, 0, 1)).unwrap();
        assert!(m_of_q(&stray).is_err());
    }

    #[test]
    fn m_of_q_is_affine_in_the_functional() {
        // translating q by a functional translates M(q) additively
        let space = q_space();
        let q0 = &space.forms()[0];
        let m0 = m_of_q(q0).unwrap();
        let mut images = std::collections::BTreeSet::new();
        for l_code in 0..16u8 {
            let l: Vec<u8> = (0..4).map(|i| (l_code >> i) & 1).collect();
            let shifted = q0.add_functional(&l);
            let delta = m_of_q(&shifted).unwrap().sub(&m0).unwrap();
            images.insert(delta);
        }
        assert_eq!(images.len(), 16);
    }

    #[test]
    fn add_functional_stays_in_polar_class() {
        let q = q_space().forms()[3].clone();
        let shifted = q.add_functional(&[1, 0, 1, 1]);
        assert_eq!(shifted.polar(), q.polar());
        assert_ne!(shifted, q);
    }

    #[test]
    fn compose_with_identity_is_identity() {
        for q in q_space().forms() {
            assert_eq!(&q.compose(&Mat::identity(4, FieldP::F2)).unwrap(), q);
        }
    }
}
