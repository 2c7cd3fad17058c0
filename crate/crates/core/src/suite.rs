//! The full verification suite in its documented order, shared by the
//! CLI `all` verb and the acceptance tests so the two cannot drift.

use crate::budget::Budget;
use crate::error::Result;
use crate::flanders::{
    affine_span_gl, classify_maximal, exceptional_census, rank_one_sum_check, rectangular_check,
    split_lemma_check, verify_rank_bound, Mode,
};
use crate::groups::{
    certify_alpha, certify_arf_invariance, certify_composite, certify_exceptional_u,
    certify_group_orders, certify_phi, certify_psi_bar, certify_stabilizers, certify_to_perm,
    Context,
};
use crate::mat::FieldP;
use crate::report::VerificationReport;

/// Runs every check of the suite, in order:
/// rank bounds, classifications, the exceptional census, the split
/// lemma, the rank-one lemma, the rectangular corollary, affine spans,
/// Arf invariance, group orders, the five isomorphism certificates, the
/// exceptional automorphism, and the form stabilizers.
pub fn run_all(budget: &Budget, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();

    for (n, f, r) in [(2, FieldP::F2, 1), (2, FieldP::F3, 1), (3, FieldP::F2, 2)] {
        reports.push(verify_rank_bound(n, f, r, Mode::Affine, budget)?);
    }
    reports.push(classify_maximal(2, FieldP::F2, 1, Mode::Affine, budget)?);
    reports.push(classify_maximal(2, FieldP::F2, 1, Mode::Linear, budget)?);
    reports.push(classify_maximal(2, FieldP::F3, 1, Mode::Affine, budget)?);
    reports.push(classify_maximal(3, FieldP::F2, 2, Mode::Affine, budget)?);
    reports.push(exceptional_census(budget)?);
    for (p, q, f) in [(1, 1, FieldP::F2), (1, 1, FieldP::F3), (1, 2, FieldP::F2)] {
        reports.push(split_lemma_check(p, q, f, budget)?);
    }
    reports.push(rank_one_sum_check(2, FieldP::F2, budget)?);
    reports.push(rank_one_sum_check(2, FieldP::F3, budget)?);
    reports.push(rectangular_check(3, 2, FieldP::F2, 1, budget)?);
    for (n, f) in [(1, FieldP::F2), (2, FieldP::F2), (2, FieldP::F3), (3, FieldP::F2)] {
        reports.push(affine_span_gl(n, f, budget)?);
    }

    let ctx = Context::build(budget)?;
    reports.push(certify_arf_invariance(&ctx)?);
    reports.push(certify_group_orders(&ctx, budget)?);
    reports.push(certify_psi_bar(&ctx)?);
    reports.push(certify_phi(&ctx, seed)?);
    reports.push(certify_to_perm(&ctx)?);
    reports.push(certify_alpha(&ctx)?);
    reports.push(certify_composite(&ctx)?);
    reports.push(certify_exceptional_u(&ctx)?);
    reports.push(certify_stabilizers(&ctx)?);
    Ok(reports)
}
