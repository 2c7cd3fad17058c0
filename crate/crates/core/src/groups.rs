//! The finite groups attached to Mat_2(F2) and the isomorphism
//! certificates between them.
//!
//! Everything here is certified by counting: a homomorphism into a
//! symmetric group on k points whose image has order k! is onto, and a
//! trivial kernel plus equal orders makes it an isomorphism. No abstract
//! group recognition is involved.
//!
//! Ground sets are indexed once and for all: the six invertible 2x2
//! matrices in the order they are conventionally listed (identity, the
//! transposition matrix, the four remaining), and the six Arf-1 forms by
//! the 4-bit diagonal encoding from [`crate::quadform`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::Hash;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::mat::{enumerate_gl, FieldP, Mat};
use crate::quadform::{canonical_gram, det_form, m_of_q, q_of_m, q_space, QSpace, QuadForm};
use crate::report::VerificationReport;

/// Invertible affine map x -> linear x + translation on F_q^dim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    linear: Mat,
    translation: Vec<u8>,
}

impl AffineMap {
    pub fn new(linear: Mat, translation: Vec<u8>) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::NotSquare { rows: linear.rows(), cols: linear.cols() });
        }
        if translation.len() != linear.rows() {
            return Err(Error::ShapeMismatch("translation length differs from dimension".into()));
        }
        if !linear.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn linear_map(linear: Mat) -> Result<Self> {
        let dim = linear.rows();
        AffineMap::new(linear, vec![0; dim])
    }

    pub fn identity(dim: usize, field: FieldP) -> Self {
        AffineMap { linear: Mat::identity(dim, field), translation: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.linear.rows()
    }

    pub fn field(&self) -> FieldP {
        self.linear.field()
    }

    pub fn linear(&self) -> &Mat {
        &self.linear
    }

    pub fn translation(&self) -> &[u8] {
        &self.translation
    }

    pub fn is_linear_map(&self) -> bool {
        self.translation.iter().all(|&t| t == 0)
    }

    pub fn eval(&self, x: &[u8]) -> Vec<u8> {
        let f = self.field();
        self.linear
            .apply(x)
            .iter()
            .zip(&self.translation)
            .map(|(&a, &t)| f.add(a, t))
            .collect()
    }

    /// (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let linear = self.linear.mul(&other.linear).expect("matching dimensions");
        let f = self.field();
        let translation = self
            .linear
            .apply(&other.translation)
            .iter()
            .zip(&self.translation)
            .map(|(&a, &t)| f.add(a, t))
            .collect();
        AffineMap { linear, translation }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self.linear.inverse().expect("linear part is invertible");
        let f = self.field();
        let translation = inv.apply(&self.translation).iter().map(|&a| f.neg(a)).collect();
        AffineMap { linear: inv, translation }
    }

    /// Reconstruct an affine map from a point function, verifying
    /// affinity on every point of the (small) domain.
    pub fn from_images<F>(dim: usize, field: FieldP, f: F) -> Result<AffineMap>
    where
        F: Fn(&[u8]) -> Vec<u8>,
    {
        let zero = vec![0u8; dim];
        let translation = f(&zero);
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut e = vec![0u8; dim];
            e[j] = 1;
            let img = f(&e);
            cols.push((0..dim).map(|i| field.sub(img[i], translation[i])).collect::<Vec<u8>>());
        }
        let mut entries = vec![0u8; dim * dim];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..dim {
                entries[i * dim + j] = col[i];
            }
        }
        let linear = Mat::new(dim, dim, field, entries)?;
        let map = AffineMap::new(linear, translation)?;
        // exhaustive affinity check
        let q = field.modulus() as u64;
        let total = q.pow(dim as u32);
        for code in 0..total {
            let mut x = vec![0u8; dim];
            let mut c = code;
            for xi in x.iter_mut() {
                *xi = (c % q) as u8;
                c /= q;
            }
            if map.eval(&x) != f(&x) {
                return Err(Error::Precondition("point function is not affine".into()));
            }
        }
        Ok(map)
    }
}

/// Permutation of an indexed ground set, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Precondition("image list is not a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Perm { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    /// One-line notation over the documented ground-set order.
    pub fn one_line(&self) -> &[usize] {
        &self.images
    }
}

/// Order of the permutation group generated by the given elements.
pub fn generated_perm_group_order(gens: &[Perm]) -> usize {
    if gens.is_empty() {
        return 1;
    }
    let n = gens[0].len();
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut frontier = vec![Perm::identity(n)];
    seen.insert(Perm::identity(n));
    while let Some(p) = frontier.pop() {
        for g in gens {
            let next = g.compose(&p);
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen.len()
}

/// Canonical, immutable listing of a finite group's elements with an
/// index for membership queries.
#[derive(Debug, Clone)]
pub struct GroupTable<T: Clone + Eq + Hash + Ord> {
    elements: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: Clone + Eq + Hash + Ord> GroupTable<T> {
    pub fn from_elements(mut elements: Vec<T>) -> Self {
        elements.sort();
        elements.dedup();
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        GroupTable { elements, index }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn contains(&self, t: &T) -> bool {
        self.index.contains_key(t)
    }

    pub fn position(&self, t: &T) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Closure, identity membership, and existence of inverses under the
    /// given composition.
    pub fn verify_group_laws<C>(&self, compose: C, identity: &T) -> std::result::Result<(), String>
    where
        C: Fn(&T, &T) -> T,
    {
        if !self.contains(identity) {
            return Err("identity missing".into());
        }
        for a in &self.elements {
            let mut has_inverse = false;
            for b in &self.elements {
                let ab = compose(a, b);
                if !self.contains(&ab) {
                    return Err("not closed under composition".into());
                }
                if &ab == identity {
                    has_inverse = true;
                }
            }
            if !has_inverse {
                return Err("element without inverse".into());
            }
        }
        Ok(())
    }
}

/// The symplectic group of an alternating nonsingular Gram matrix over
/// F2: the invertible U with U^t G U = G.
pub fn build_sp(gram: &Mat, budget: &Budget) -> Result<GroupTable<Mat>> {
    let n = gram.rows();
    let elements = enumerate_gl(n, gram.field(), budget)?
        .filter(|u| &u.transpose().mul(gram).unwrap().mul(u).unwrap() == gram)
        .collect();
    Ok(GroupTable::from_elements(elements))
}

/// Row-major vectorization of a 2x2 matrix and its inverse.
pub fn vec_of_mat(m: &Mat) -> Vec<u8> {
    m.to_vec()
}

pub fn mat_of_vec(v: &[u8], field: FieldP) -> Mat {
    Mat::from_vec(2, 2, field, v.to_vec()).unwrap()
}

/// The six invertible 2x2 matrices over F2 in the conventional listed
/// order: identity and the coordinate swap first.
pub fn gl2_f2_listed() -> Vec<Mat> {
    let f = FieldP::F2;
    [
        vec![1, 0, 0, 1],
        vec![0, 1, 1, 0],
        vec![1, 1, 0, 1],
        vec![1, 0, 1, 1],
        vec![0, 1, 1, 1],
        vec![1, 1, 1, 0],
    ]
    .into_iter()
    .map(|e| Mat::new(2, 2, f, e).unwrap())
    .collect()
}

/// The Frobenius group of two-sided multiplications M -> P M Q and
/// transposed multiplications M -> P M^t Q, materialized as linear maps
/// on the vectorized matrix space and deduplicated.
pub fn frobenius_group(n: usize, field: FieldP, budget: &Budget) -> Result<GroupTable<AffineMap>> {
    let gl: Vec<Mat> = enumerate_gl(n, field, budget)?.collect();
    budget.check((gl.len() as u128).pow(2) * 2)?;
    let d = n * n;
    let mut linear_parts: BTreeSet<Mat> = BTreeSet::new();
    for p in &gl {
        for q in &gl {
            for transposed in [false, true] {
                let mut entries = vec![0u8; d * d];
                for j in 0..d {
                    let e = Mat::from_vec(n, n, field, {
                        let mut v = vec![0u8; d];
                        v[j] = 1;
                        v
                    })
                    .unwrap();
                    let e = if transposed { e.transpose() } else { e };
                    let img = p.mul(&e).unwrap().mul(q).unwrap().to_vec();
                    for i in 0..d {
                        entries[i * d + j] = img[i];
                    }
                }
                linear_parts.insert(Mat::new(d, d, field, entries).unwrap());
            }
        }
    }
    let elements = linear_parts
        .into_iter()
        .map(AffineMap::linear_map)
        .collect::<Result<Vec<AffineMap>>>()?;
    Ok(GroupTable::from_elements(elements))
}

/// Exhaustive filter for the affine bijections of Mat_2(F2) stabilizing
/// GL_2(F2): a bijection stabilizes the finite set iff all six images
/// are invertible. 322,560 candidates are tested.
pub fn affine_gl_stabilizers(budget: &Budget) -> Result<GroupTable<AffineMap>> {
    let field = FieldP::F2;
    let gl2 = gl2_f2_listed();
    // det of a 2x2 F2 matrix keyed on its 4-bit row-major mask
    let det_table: Vec<u8> = (0..16u32)
        .map(|code| Mat::from_mask(2, 2, code).det().unwrap())
        .collect();
    let to_nibble = |v: &[u8]| -> usize {
        v.iter().enumerate().map(|(i, &x)| (x as usize) << i).sum()
    };
    let mut elements = Vec::new();
    for linear in enumerate_gl(4, field, budget)? {
        let images: Vec<usize> = gl2.iter().map(|m| to_nibble(&linear.apply(&m.to_vec()))).collect();
        for t in 0..16usize {
            if images.iter().all(|&img| det_table[img ^ t] != 0) {
                let translation = (0..4).map(|i| ((t >> i) & 1) as u8).collect();
                elements.push(AffineMap::new(linear.clone(), translation).unwrap());
            }
        }
    }
    Ok(GroupTable::from_elements(elements))
}

/// Shared, immutable state for the Mat_2(F2) certificates.
pub struct Context {
    pub gl2: Vec<Mat>,
    pub qspace: QSpace,
    /// Ascending diagonal indices of the six Arf-1 forms.
    pub q1_indices: Vec<usize>,
    /// Sp(b) for the canonical symplectic form on F2^4.
    pub sp_b: GroupTable<Mat>,
    /// Affine stabilizers of GL_2(F2).
    pub ag2: GroupTable<AffineMap>,
    /// Gram matrix of the polar form of det on the vectorized space.
    pub b_gram: Mat,
    /// Sp(B) for that form.
    pub sp_big_b: GroupTable<Mat>,
}

impl Context {
    pub fn build(budget: &Budget) -> Result<Context> {
        let qspace = q_space();
        let q1_indices = qspace.arf_one_indices();
        let sp_b = build_sp(&canonical_gram(), budget)?;
        let ag2 = affine_gl_stabilizers(budget)?;
        let b_gram = det_form().polar();
        let sp_big_b = build_sp(&b_gram, budget)?;
        Ok(Context { gl2: gl2_f2_listed(), qspace, q1_indices, sp_b, ag2, b_gram, sp_big_b })
    }

    fn q1_form(&self, pos: usize) -> &QuadForm {
        &self.qspace.forms()[self.q1_indices[pos]]
    }

    /// Position in the Arf-1 listing of a form, if it is one of the six.
    fn q1_position(&self, q: &QuadForm) -> Result<usize> {
        let idx = self.qspace.index_of(q)?;
        self.q1_indices
            .iter()
            .position(|&i| i == idx)
            .ok_or(Error::NotInFormSpace)
    }
}

/// The permutation of the six Arf-1 forms induced by u in Sp(b) via
/// q -> q ∘ u^{-1}.
pub fn psi_bar(ctx: &Context, u: &Mat) -> Result<Perm> {
    let u_inv = u.inverse()?;
    let images = (0..6)
        .map(|pos| ctx.q1_position(&ctx.q1_form(pos).compose(&u_inv)?))
        .collect::<Result<Vec<usize>>>()?;
    Perm::new(images)
}

/// The affine map on Mat_2(F2) obtained by conjugating the form-space
/// action of u through the correspondence q -> M(q).
pub fn phi(_ctx: &Context, u: &Mat) -> Result<AffineMap> {
    let u_inv = u.inverse()?;
    AffineMap::from_images(4, FieldP::F2, |v| {
        let q = q_of_m(&mat_of_vec(v, FieldP::F2)).unwrap();
        m_of_q(&q.compose(&u_inv).unwrap()).unwrap().to_vec()
    })
}

/// Restriction of a GL-stabilizing affine map to the six invertible
/// matrices, as a permutation in the listed order.
pub fn to_perm(ctx: &Context, u: &AffineMap) -> Result<Perm> {
    let images = ctx
        .gl2
        .iter()
        .map(|m| {
            let img = mat_of_vec(&u.eval(&m.to_vec()), FieldP::F2);
            ctx.gl2
                .iter()
                .position(|g| g == &img)
                .ok_or_else(|| Error::Precondition("image leaves GL_2(F2)".into()))
        })
        .collect::<Result<Vec<usize>>>()?;
    Perm::new(images)
}

/// The linear part of a GL-stabilizing affine map, checked to be
/// symplectic for the polar form of det.
pub fn alpha(ctx: &Context, u: &AffineMap) -> Result<Mat> {
    let lin = u.linear().clone();
    let conj = lin.transpose().mul(&ctx.b_gram)?.mul(&lin)?;
    if conj != ctx.b_gram {
        return Err(Error::Precondition("linear part does not preserve the polar form of det".into()));
    }
    Ok(lin)
}

/// The unique element of the affine stabilizer group whose action on the
/// six invertible matrices is the transposition of the first two.
pub fn exceptional_u(ctx: &Context) -> AffineMap {
    let target = Perm::transposition(6, 0, 1);
    ctx.ag2
        .elements()
        .iter()
        .find(|u| to_perm(ctx, u).map(|p| p == target).unwrap_or(false))
        .expect("the action on GL_2(F2) is onto S_6")
        .clone()
}

/// The closed-form non-linear automorphism: [a c; b d] maps to
/// [b+c+d+1, a+b+d+1; a+c+d+1, a+b+c+1].
pub fn exceptional_u_formula() -> Result<AffineMap> {
    AffineMap::from_images(4, FieldP::F2, |v| {
        let (a, c, b, d) = (v[0], v[1], v[2], v[3]);
        vec![
            b ^ c ^ d ^ 1,
            a ^ b ^ d ^ 1,
            a ^ c ^ d ^ 1,
            a ^ b ^ c ^ 1,
        ]
    })
}

/// The subgroup of Sp(b) fixing the Arf-1 form at the given position.
pub fn stabilizer_of_form(ctx: &Context, pos: usize) -> GroupTable<Mat> {
    let elements = ctx
        .sp_b
        .elements()
        .iter()
        .filter(|u| psi_bar(ctx, u).unwrap().apply(pos) == pos)
        .cloned()
        .collect();
    GroupTable::from_elements(elements)
}

// ---------------------------------------------------------------------
// certificates

fn certificate(
    theorem_id: &str,
    census: Vec<(&str, u64)>,
    violations: Vec<String>,
    start: Instant,
) -> VerificationReport {
    let population = census.iter().map(|(_, v)| *v).sum();
    VerificationReport::new(
        theorem_id,
        &[],
        population,
        census.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        violations,
        start.elapsed().as_millis() as u64,
    )
}

/// Orders and containments of the constructed groups.
pub fn certify_group_orders(ctx: &Context, budget: &Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let frobenius = frobenius_group(2, FieldP::F2, budget)?;

    if ctx.sp_b.order() != 720 {
        violations.push(format!("|Sp(b)| = {}, expected 720", ctx.sp_b.order()));
    }
    if ctx.sp_big_b.order() != 720 {
        violations.push(format!("|Sp(B)| = {}, expected 720", ctx.sp_big_b.order()));
    }
    if ctx.ag2.order() != 720 {
        violations.push(format!("affine stabilizer order = {}, expected 720", ctx.ag2.order()));
    }
    if frobenius.order() != 72 {
        violations.push(format!("Frobenius group order = {}, expected 72", frobenius.order()));
    }

    // dimension 2: every invertible matrix preserves the unique
    // alternating form
    let gram2 = Mat::zeros(2, 2, FieldP::F2).with_entry(0, 1, 1).with_entry(1, 0, 1);
    let sp2 = build_sp(&gram2, budget)?;
    if sp2.order() != 6 {
        violations.push(format!("|Sp_2(F2)| = {}, expected 6", sp2.order()));
    }

    // the Frobenius group is exactly the zero-translation part of the
    // affine stabilizers
    let zero_translation: Vec<AffineMap> = ctx
        .ag2
        .elements()
        .iter()
        .filter(|u| u.is_linear_map())
        .cloned()
        .collect();
    if zero_translation.len() != 72 {
        violations.push(format!(
            "{} zero-translation stabilizers, expected 72",
            zero_translation.len()
        ));
    }
    for u in &zero_translation {
        if !frobenius.contains(u) {
            violations.push("zero-translation stabilizer outside the Frobenius group".into());
            break;
        }
    }
    for u in frobenius.elements() {
        if !ctx.ag2.contains(u) {
            violations.push("Frobenius element does not stabilize GL_2(F2)".into());
            break;
        }
    }

    // the transpose map is Frobenius
    let transpose_map = AffineMap::from_images(4, FieldP::F2, |v| {
        mat_of_vec(v, FieldP::F2).transpose().to_vec()
    })?;
    if !frobenius.contains(&transpose_map) {
        violations.push("transpose map missing from the Frobenius group".into());
    }

    // every Frobenius element maps GL_2(F2) onto itself
    for u in frobenius.elements() {
        if to_perm(ctx, u).is_err() {
            violations.push("Frobenius element does not permute GL_2(F2)".into());
            break;
        }
    }

    // the stabilizer group contains a non-linear element
    if !ctx.ag2.elements().iter().any(|u| !u.is_linear_map()) {
        violations.push("no non-linear stabilizer found".into());
    }

    // the permutations induced by the Frobenius group form a proper
    // subgroup of S_6 of order 72
    let frob_perms: Vec<Perm> = frobenius
        .elements()
        .iter()
        .map(|u| to_perm(ctx, u))
        .collect::<Result<Vec<Perm>>>()?;
    let generated = generated_perm_group_order(&frob_perms);
    if generated != 72 {
        violations.push(format!("Frobenius permutation group has order {generated}, expected 72"));
    }

    // group laws
    for (name, ok) in [
        ("Sp(b)", ctx
            .sp_b
            .verify_group_laws(|a, b| a.mul(b).unwrap(), &Mat::identity(4, FieldP::F2))
            .is_ok()),
        ("affine stabilizers", ctx
            .ag2
            .verify_group_laws(|a, b| a.compose(b), &AffineMap::identity(4, FieldP::F2))
            .is_ok()),
        ("Frobenius group", frobenius
            .verify_group_laws(|a, b| a.compose(b), &AffineMap::identity(4, FieldP::F2))
            .is_ok()),
    ] {
        if !ok {
            violations.push(format!("{name} fails the group laws"));
        }
    }

    let census = vec![
        ("sp_b_order", ctx.sp_b.order() as u64),
        ("sp_big_b_order", ctx.sp_big_b.order() as u64),
        ("affine_stabilizer_order", ctx.ag2.order() as u64),
        ("frobenius_order", frobenius.order() as u64),
        ("sp2_order", sp2.order() as u64),
        ("zero_translation_count", zero_translation.len() as u64),
        ("frobenius_perm_group_order", generated as u64),
    ];
    Ok(certificate("groups.orders", census, violations, start))
}

/// The action on the six Arf-1 forms is an isomorphism onto S_6.
pub fn certify_psi_bar(ctx: &Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let perms: Vec<Perm> = ctx
        .sp_b
        .elements()
        .iter()
        .map(|u| psi_bar(ctx, u))
        .collect::<Result<Vec<Perm>>>()?;

    let identity_pos = ctx.sp_b.position(&Mat::identity(4, FieldP::F2)).unwrap();
    if !perms[identity_pos].is_identity() {
        violations.push("identity does not act trivially".into());
    }
    let kernel = perms.iter().filter(|p| p.is_identity()).count();
    if kernel != 1 {
        violations.push(format!("kernel has {kernel} elements, expected 1"));
    }
    let distinct: HashSet<&Perm> = perms.iter().collect();
    if distinct.len() != 720 {
        violations.push(format!("{} distinct images, expected 720", distinct.len()));
    }
    // full homomorphism check
    let mut hom_pairs = 0u64;
    'outer: for (i, u) in ctx.sp_b.elements().iter().enumerate() {
        for (j, v) in ctx.sp_b.elements().iter().enumerate() {
            let uv = u.mul(v).unwrap();
            let k = ctx.sp_b.position(&uv).unwrap();
            if perms[k] != perms[i].compose(&perms[j]) {
                violations.push("action is not a homomorphism".into());
                break 'outer;
            }
            hom_pairs += 1;
        }
    }
    let census = vec![
        ("elements", 720),
        ("distinct_images", distinct.len() as u64),
        ("homomorphism_pairs", hom_pairs),
    ];
    Ok(certificate("iso.psi_bar", census, violations, start))
}

/// Conjugating the form-space action through M(q) is an isomorphism
/// from Sp(b) onto the affine stabilizers of GL_2(F2).
pub fn certify_phi(ctx: &Context, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let images: Vec<AffineMap> = ctx
        .sp_b
        .elements()
        .iter()
        .map(|u| phi(ctx, u))
        .collect::<Result<Vec<AffineMap>>>()?;

    let in_group = images.iter().filter(|m| ctx.ag2.contains(m)).count();
    if in_group != 720 {
        violations.push(format!("{in_group} images stabilize GL_2(F2), expected 720"));
    }
    let distinct: HashSet<&AffineMap> = images.iter().collect();
    if distinct.len() != 720 {
        violations.push(format!("{} distinct images, expected 720 (bijectivity)", distinct.len()));
    }

    // homomorphism on a seeded sample of pairs plus every pair with a
    // symplectic transvection on the left (the transvections generate)
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = 0u64;
    for _ in 0..10_000 {
        let i = rng.gen_range(0..720);
        let j = rng.gen_range(0..720);
        let (u, v) = (&ctx.sp_b.elements()[i], &ctx.sp_b.elements()[j]);
        let uv = ctx.sp_b.position(&u.mul(v).unwrap()).unwrap();
        if images[uv] != images[i].compose(&images[j]) {
            violations.push("not a homomorphism on a sampled pair".into());
            break;
        }
        sampled += 1;
    }
    let mut generator_pairs = 0u64;
    'outer: for t in symplectic_transvections() {
        let ti = ctx.sp_b.position(&t).expect("transvections are symplectic");
        for (j, v) in ctx.sp_b.elements().iter().enumerate() {
            let tv = ctx.sp_b.position(&t.mul(v).unwrap()).unwrap();
            if images[tv] != images[ti].compose(&images[j]) {
                violations.push("not a homomorphism on a generator pair".into());
                break 'outer;
            }
            generator_pairs += 1;
        }
    }
    let census = vec![
        ("elements", 720),
        ("images_in_stabilizer_group", in_group as u64),
        ("distinct_images", distinct.len() as u64),
        ("sampled_pairs", sampled),
        ("generator_pairs", generator_pairs),
    ];
    Ok(certificate("iso.phi", census, violations, start))
}

/// Symplectic transvections x -> x + b(x, v) v for the 15 nonzero v;
/// they generate Sp(b).
fn symplectic_transvections() -> Vec<Mat> {
    let gram = canonical_gram();
    let mut out = Vec::with_capacity(15);
    for code in 1..16u32 {
        let v: Vec<u8> = (0..4).map(|i| ((code >> i) & 1) as u8).collect();
        let mut entries = vec![0u8; 16];
        for j in 0..4 {
            let mut e = vec![0u8; 4];
            e[j] = 1;
            // b(e_j, v)
            let mut pairing = 0u8;
            for (i, &ei) in e.iter().enumerate() {
                for (k, &vk) in v.iter().enumerate() {
                    pairing ^= ei & gram.get(i, k) & vk;
                }
            }
            for i in 0..4 {
                entries[i * 4 + j] = e[i] ^ (pairing & v[i]);
            }
        }
        out.push(Mat::new(4, 4, FieldP::F2, entries).unwrap());
    }
    out
}

/// The natural action on the six invertible matrices is an isomorphism
/// from the affine stabilizers onto S_6.
pub fn certify_to_perm(ctx: &Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let perms: Vec<Perm> = ctx
        .ag2
        .elements()
        .iter()
        .map(|u| to_perm(ctx, u))
        .collect::<Result<Vec<Perm>>>()?;

    let identity_pos = ctx.ag2.position(&AffineMap::identity(4, FieldP::F2)).unwrap();
    if !perms[identity_pos].is_identity() {
        violations.push("identity does not act trivially".into());
    }
    let kernel = perms.iter().filter(|p| p.is_identity()).count();
    if kernel != 1 {
        violations.push(format!("kernel has {kernel} elements, expected 1"));
    }
    let distinct: HashSet<&Perm> = perms.iter().collect();
    if distinct.len() != 720 {
        violations.push(format!("{} distinct permutations, expected 720 = |S_6|", distinct.len()));
    }
    let mut hom_pairs = 0u64;
    'outer: for (i, u) in ctx.ag2.elements().iter().enumerate() {
        for (j, v) in ctx.ag2.elements().iter().enumerate() {
            let uv = ctx.ag2.position(&u.compose(v)).unwrap();
            if perms[uv] != perms[i].compose(&perms[j]) {
                violations.push("action is not a homomorphism".into());
                break 'outer;
            }
            hom_pairs += 1;
        }
    }
    let census = vec![
        ("elements", 720),
        ("distinct_images", distinct.len() as u64),
        ("homomorphism_pairs", hom_pairs),
    ];
    Ok(certificate("iso.to_perm", census, violations, start))
}

/// Taking linear parts is an isomorphism from the affine stabilizers
/// onto the symplectic group of the polar form of det; every stabilizer
/// preserves det pointwise.
pub fn certify_alpha(ctx: &Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let det = det_form();
    let mut det_preserving = 0u64;
    let mut linear_parts = Vec::with_capacity(720);
    for u in ctx.ag2.elements() {
        match alpha(ctx, u) {
            Ok(lin) => linear_parts.push(lin),
            Err(_) => violations.push(format!(
                "stabilizer with non-symplectic linear part: {:?}",
                u.linear().to_text()
            )),
        }
        let preserves = (0..16u32).all(|code| {
            let v: Vec<u8> = (0..4).map(|i| ((code >> i) & 1) as u8).collect();
            det.eval(&u.eval(&v)) == det.eval(&v)
        });
        if preserves {
            det_preserving += 1;
        } else {
            violations.push("stabilizer does not preserve det pointwise".into());
        }
    }
    let distinct: HashSet<&Mat> = linear_parts.iter().collect();
    if distinct.len() != 720 {
        violations.push(format!("{} distinct linear parts, expected 720", distinct.len()));
    }
    for lin in &linear_parts {
        if !ctx.sp_big_b.contains(lin) {
            violations.push("linear part outside Sp(B)".into());
            break;
        }
    }
    // kernel: a non-identity translation never stabilizes GL_2(F2)
    let identity_linear = ctx
        .ag2
        .elements()
        .iter()
        .filter(|u| u.linear() == &Mat::identity(4, FieldP::F2))
        .count();
    if identity_linear != 1 {
        violations.push(format!(
            "{identity_linear} stabilizers with identity linear part, expected only the identity"
        ));
    }
    let census = vec![
        ("elements", 720),
        ("symplectic_linear_parts", linear_parts.len() as u64),
        ("distinct_linear_parts", distinct.len() as u64),
        ("det_preserving", det_preserving),
        ("sp_big_b_order", ctx.sp_big_b.order() as u64),
    ];
    Ok(certificate("iso.alpha", census, violations, start))
}

/// The composite identity: acting on the six forms and acting on the six
/// invertible matrices agree under the correspondence q -> M(q).
pub fn certify_composite(ctx: &Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    // position i of the Arf-1 listing corresponds to the invertible
    // matrix M(q_i)
    let correspondence: Vec<usize> = (0..6)
        .map(|pos| {
            let m = m_of_q(ctx.q1_form(pos)).unwrap();
            ctx.gl2.iter().position(|g| g == &m).expect("Arf-1 forms map onto GL_2(F2)")
        })
        .collect();
    let mut checked = 0u64;
    for u in ctx.sp_b.elements() {
        let through_forms = psi_bar(ctx, u)?;
        let through_matrices = to_perm(ctx, &phi(ctx, u)?)?;
        for i in 0..6 {
            if through_matrices.apply(correspondence[i]) != correspondence[through_forms.apply(i)] {
                violations.push(format!("composite identity fails at {}", u.to_text()));
                break;
            }
        }
        checked += 1;
    }
    let census = vec![("elements_checked", checked)];
    Ok(certificate("iso.composite", census, violations, start))
}

/// The explicit non-linear automorphism: transposition of the first two
/// invertible matrices, closed form, involution.
pub fn certify_exceptional_u(ctx: &Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let u = exceptional_u(ctx);
    let formula = exceptional_u_formula()?;
    if u != formula {
        violations.push("closed form differs from the transposition element".into());
    }
    // u(0) is the all-ones matrix, so u is not linear
    let at_zero = u.eval(&[0, 0, 0, 0]);
    if at_zero != vec![1, 1, 1, 1] {
        violations.push(format!("u(0) = {at_zero:?}, expected the all-ones matrix"));
    }
    if u.is_linear_map() {
        violations.push("exceptional element is linear".into());
    }
    if u.compose(&u) != AffineMap::identity(4, FieldP::F2) {
        violations.push("exceptional element is not an involution".into());
    }
    let perm = to_perm(ctx, &u)?;
    if perm != Perm::transposition(6, 0, 1) {
        violations.push("exceptional element does not swap the first two matrices".into());
    }
    // sanity on the swap itself
    let swapped = mat_of_vec(&u.eval(&ctx.gl2[0].to_vec()), FieldP::F2);
    if swapped != ctx.gl2[1] {
        violations.push("u(identity) is not the coordinate swap".into());
    }
    let census = vec![("points_checked", 16)];
    Ok(certificate("groups.exceptional_u", census, violations, start))
}

/// Stabilizers of the Arf-1 forms: order 120 each, acting faithfully on
/// the other five forms, all conjugate.
pub fn certify_stabilizers(ctx: &Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut orders = Vec::new();
    for pos in 0..6 {
        let stab = stabilizer_of_form(ctx, pos);
        orders.push(stab.order());
        if stab.order() != 120 {
            violations.push(format!("stabilizer of form {pos} has order {}", stab.order()));
            continue;
        }
        // faithful action on the remaining five points
        let others: Vec<usize> = (0..6).filter(|&i| i != pos).collect();
        let restricted: HashSet<Vec<usize>> = stab
            .elements()
            .iter()
            .map(|u| {
                let p = psi_bar(ctx, u).unwrap();
                others.iter().map(|&i| p.apply(i)).collect()
            })
            .collect();
        if restricted.len() != 120 {
            violations.push(format!(
                "stabilizer of form {pos} acts with only {} distinct restrictions",
                restricted.len()
            ));
        }
    }
    // transitivity of the action makes all six stabilizers conjugate
    let orbit: HashSet<usize> = ctx
        .sp_b
        .elements()
        .iter()
        .map(|u| psi_bar(ctx, u).unwrap().apply(0))
        .collect();
    if orbit.len() != 6 {
        violations.push(format!("orbit of the first form has size {}", orbit.len()));
    }
    let census = vec![
        ("stabilizers", 6),
        ("order_each", 120),
        ("orbit_size", orbit.len() as u64),
    ];
    Ok(certificate("groups.stabilizers", census, violations, start))
}

/// Arf invariance under every symplectic substitution, plus the counts
/// of the form space and the det correspondence.
pub fn certify_arf_invariance(ctx: &Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut violations = Vec::new();
    if ctx.qspace.forms().len() != 16 {
        violations.push("form space does not have 16 elements".into());
    }
    if ctx.q1_indices.len() != 6 {
        violations.push(format!("{} Arf-1 forms, expected 6", ctx.q1_indices.len()));
    }
    let mut det_matches = 0u64;
    for q in ctx.qspace.forms() {
        if m_of_q(q)?.det()? == q.arf()? {
            det_matches += 1;
        } else {
            violations.push("det M(q) differs from the Arf invariant".into());
        }
    }
    let mut invariance_checks = 0u64;
    'outer: for u in ctx.sp_b.elements() {
        for q in ctx.qspace.forms() {
            if q.compose(u)?.arf()? != q.arf()? {
                violations.push(format!("Arf changed under {}", u.to_text()));
                break 'outer;
            }
            invariance_checks += 1;
        }
    }
    let census = vec![
        ("form_space_size", 16),
        ("arf_one_forms", ctx.q1_indices.len() as u64),
        ("det_matches_arf", det_matches),
        ("invariance_checks", invariance_checks),
    ];
    Ok(certificate("quadchar2.arf", census, violations, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn ctx() -> &'static Context {
        static CTX: OnceLock<Context> = OnceLock::new();
        CTX.get_or_init(|| Context::build(&Budget::default()).unwrap())
    }

    #[test]
    fn affine_map_basics() {
        let f = FieldP::F2;
        let id = AffineMap::identity(4, f);
        assert!(id.is_linear_map());
        let u = exceptional_u_formula().unwrap();
        assert_eq!(u.compose(&u.inverse()), id);
        assert_eq!(u.inverse().compose(&u), id);
        // composition convention (f o g)(x) = f(g(x))
        let g = AffineMap::new(Mat::identity(4, f), vec![1, 0, 0, 0]).unwrap();
        let x = vec![0, 0, 0, 0];
        assert_eq!(u.compose(&g).eval(&x), u.eval(&g.eval(&x)));
    }

    #[test]
    fn affine_from_images_rejects_non_affine_functions() {
        let f = FieldP::F2;
        let r = AffineMap::from_images(2, f, |v| vec![v[0] & v[1], v[1]]);
        assert!(r.is_err());
    }

    #[test]
    fn perm_basics() {
        assert!(Perm::new(vec![0, 0, 1]).is_err());
        let t = Perm::transposition(3, 0, 2);
        assert_eq!(t.compose(&t), Perm::identity(3));
        assert_eq!(t.one_line(), &[2, 1, 0]);
    }

    #[test]
    fn generated_order_of_simple_groups() {
        let s3 = vec![Perm::transposition(3, 0, 1), Perm::transposition(3, 1, 2)];
        assert_eq!(generated_perm_group_order(&s3), 6);
    }

    #[test]
    fn sp_b_has_order_720_and_contains_identity() {
        let c = ctx();
        assert_eq!(c.sp_b.order(), 720);
        assert!(c.sp_b.contains(&Mat::identity(4, FieldP::F2)));
    }

    #[test]
    fn sp_dim2_is_all_of_gl2() {
        let gram = Mat::zeros(2, 2, FieldP::F2).with_entry(0, 1, 1).with_entry(1, 0, 1);
        let sp2 = build_sp(&gram, &Budget::default()).unwrap();
        assert_eq!(sp2.order(), 6);
    }

    #[test]
    fn transvections_are_symplectic_and_generate() {
        let c = ctx();
        for t in symplectic_transvections() {
            assert!(c.sp_b.contains(&t));
        }
    }

    #[test]
    fn frobenius_group_order_and_transpose() {
        let frob = frobenius_group(2, FieldP::F2, &Budget::default()).unwrap();
        assert_eq!(frob.order(), 72);
        let transpose_map = AffineMap::from_images(4, FieldP::F2, |v| {
            mat_of_vec(v, FieldP::F2).transpose().to_vec()
        })
        .unwrap();
        assert!(frob.contains(&transpose_map));
    }

    #[test]
    fn psi_bar_identity_and_composition() {
        let c = ctx();
        let id = Mat::identity(4, FieldP::F2);
        assert!(psi_bar(c, &id).unwrap().is_identity());
        let u = &c.sp_b.elements()[3];
        let v = &c.sp_b.elements()[77];
        let left = psi_bar(c, &u.mul(v).unwrap()).unwrap();
        let right = psi_bar(c, u).unwrap().compose(&psi_bar(c, v).unwrap());
        assert_eq!(left, right);
    }

    #[test]
    fn phi_identity_and_membership() {
        let c = ctx();
        let id = Mat::identity(4, FieldP::F2);
        assert_eq!(phi(c, &id).unwrap(), AffineMap::identity(4, FieldP::F2));
        let u = &c.sp_b.elements()[123];
        assert!(c.ag2.contains(&phi(c, u).unwrap()));
    }

    #[test]
    fn to_perm_rejects_maps_leaving_gl() {
        let c = ctx();
        // a translation by the identity matrix maps the identity to zero
        let shift = AffineMap::new(Mat::identity(4, FieldP::F2), vec![1, 0, 0, 1]).unwrap();
        assert!(to_perm(c, &shift).is_err());
    }

    #[test]
    fn exceptional_u_matches_formula() {
        let c = ctx();
        let u = exceptional_u(c);
        assert_eq!(u, exceptional_u_formula().unwrap());
        assert!(!u.is_linear_map());
        assert_eq!(u.eval(&[0, 0, 0, 0]), vec![1, 1, 1, 1]);
    }

    #[test]
    fn stabilizer_orders() {
        let c = ctx();
        let stab = stabilizer_of_form(c, 0);
        assert_eq!(stab.order(), 120);
    }

    #[test]
    fn group_table_law_checker_catches_non_groups() {
        let broken = GroupTable::from_elements(vec![
            Mat::identity(2, FieldP::F2),
            Mat::parse_text("2:2:2:0,1,1,0").unwrap(),
            Mat::parse_text("2:2:2:1,1,0,1").unwrap(),
        ]);
        assert!(broken
            .verify_group_laws(|a, b| a.mul(b).unwrap(), &Mat::identity(2, FieldP::F2))
            .is_err());
    }
}
