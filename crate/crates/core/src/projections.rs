//! Exact projection machinery built on a base pair `(d_0, delta_0)`: the
//! base box and its kernel projection, the partial inverse of `d_0`, Neumann
//! inversion of unipotent families, the two constructions of the projection
//! `P`, and the conjugator `L` with its inverse.

use crate::calculus::{
    adjoint, ce_differential_on, gram_family, identity_gram, nilpotency_bound, CalculusError,
    GramFamily, OperatorFamily, WeightWitness,
};
use crate::lie::{LieAlgebraSpec, LieError};
use crate::linalg::QMat;
use num::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("family does not strictly increase weights: {0}")]
    NotWeightIncreasing(WeightWitness),
    #[error("difference of the two differentials does not strictly increase weights: {0}")]
    TopDifferentialNotAdmissible(WeightWitness),
    #[error("kernel/image split of the boxed power failed at degree {degree}")]
    KernelImageSplit { degree: usize },
    #[error("conjugator has nonidentity gr part: {0}")]
    ConjugatorNotUnipotent(WeightWitness),
    #[error("Gram couples basis weights {0} and {1}; the pipeline needs a weight-orthogonal Gram")]
    GramMixesWeights(u32, u32),
    #[error("{0}")]
    Calculus(#[from] CalculusError),
    #[error("{0}")]
    Lie(#[from] LieError),
}

/// Base box `box0 = d0 delta0 + delta0 d0` together with the Gram-orthogonal
/// projection onto its kernel (computed as `K (K^t G K)^{-1} K^t G` from an
/// exact kernel basis `K`, never via eigendecompositions).
pub fn base_box_and_projection(
    d0: &OperatorFamily,
    delta0: &OperatorFamily,
    gram: &GramFamily,
) -> (OperatorFamily, OperatorFamily) {
    assert_eq!(d0.shift(), 1, "base differential must shift degree by +1");
    assert_eq!(delta0.shift(), -1, "base codifferential must shift degree by -1");
    let box0 = d0.compose(delta0).add(&delta0.compose(d0));
    let mut pi0 = OperatorFamily::zero(d0.table().clone(), 0);
    for k in 0..=d0.n() {
        let kernel = box0.mat(k).kernel_basis();
        pi0.set_mat(k, QMat::g_orth_projector(&kernel, gram.mat(k)));
    }
    (box0, pi0)
}

/// Partial inverse of `d0`: inverts `d0` on its image, vanishes on the
/// Gram-orthogonal complement of the image, and has image `Im(delta_0)`.
/// Together with `d0` it reconstructs the base kernel projection through
/// `Pi0 = I - d0inv d0 - d0 d0inv`.
pub fn partial_inverse(d0: &OperatorFamily, gram: &GramFamily) -> OperatorFamily {
    assert_eq!(d0.shift(), 1);
    assert!(d0.squares_to_zero(), "partial inverse needs d0^2 = 0");
    let table = d0.table().clone();
    let n = d0.n();
    let mut inv = OperatorFamily::zero(table.clone(), -1);
    for j in 1..=n {
        let a = d0.mat(j - 1);
        let image = a.image_basis();
        if image.cols() == 0 {
            continue;
        }
        // Any preimage of the image basis, then pushed into Im(delta_0) by
        // removing the kernel component.
        let z = a.solve(&image).expect("image basis columns are solvable");
        let kernel = a.kernel_basis();
        let onto_kernel = QMat::g_orth_projector(&kernel, gram.mat(j - 1));
        let z = (QMat::identity(table.dim(j - 1)) - onto_kernel) * z;
        // Coordinates of the G-orthogonal projection onto Im(d0).
        let utg = image.transpose() * gram.mat(j).clone();
        let coords = (utg.clone() * image.clone())
            .inverse()
            .expect("image basis is G-independent")
            * utg;
        inv.set_mat(j, z * coords);
    }
    assert!(inv.compose(&inv).is_zero(), "partial inverse squares to zero");
    inv
}

/// Exact inverse of `I - N` for a strictly weight-increasing `N`, summing the
/// finite Neumann series with the per-degree nilpotency bound.
pub fn neumann_inverse(n_op: &OperatorFamily) -> Result<OperatorFamily, ProjectionError> {
    assert_eq!(n_op.shift(), 0, "Neumann inversion needs a degree-preserving family");
    n_op.increases_weight().map_err(ProjectionError::NotWeightIncreasing)?;
    let table = n_op.table().clone();
    let bounds = nilpotency_bound(&table);
    let mut out = OperatorFamily::zero(table.clone(), 0);
    for k in 0..=n_op.n() {
        let dim = table.dim(k);
        let mut sum = QMat::identity(dim);
        let mut power = QMat::identity(dim);
        for _ in 1..bounds[k] {
            power = n_op.mat(k).clone() * power;
            sum = sum + power.clone();
        }
        out.set_mat(k, sum);
    }
    let identity = OperatorFamily::identity(table);
    debug_assert!(identity.sub(n_op).compose(&out).is_identity());
    Ok(out)
}

/// Nilpotent correction maps and the projection onto `F` along `E` built from
/// the partial inverse:
/// `b = -d0inv (d - d0)`, `b1 = -(d - d0) d0inv`, and
/// `PiF = (I-b)^{-1} d0inv d + d (I-b)^{-1} d0inv`.
pub fn rumin_projection(
    d: &OperatorFamily,
    d0: &OperatorFamily,
    d0inv: &OperatorFamily,
) -> Result<(OperatorFamily, OperatorFamily, OperatorFamily), ProjectionError> {
    let diff = d.sub(d0);
    diff.increases_weight().map_err(ProjectionError::TopDifferentialNotAdmissible)?;
    let b = d0inv.compose(&diff).neg();
    let b1 = diff.compose(d0inv).neg();
    let inv_b = neumann_inverse(&b)?;
    let inv_b1 = neumann_inverse(&b1)?;
    let pi_f = inv_b.compose(d0inv).compose(d).add(&d.compose(&inv_b).compose(d0inv));
    assert_eq!(b.compose(d0inv), d0inv.compose(&b1), "b d0inv = d0inv b1");
    assert_eq!(
        inv_b.compose(d0inv),
        d0inv.compose(&inv_b1),
        "(I-b)^-1 d0inv = d0inv (I-b1)^-1"
    );
    assert_eq!(pi_f.compose(&pi_f), pi_f, "PiF is idempotent");
    Ok((b, b1, pi_f))
}

/// Projection onto `ker(box^{N0})` along `Im(box^{N0})`, degree by degree,
/// with the per-degree nilpotency bound `N0`.
pub fn generalized_kernel_projection(
    box_op: &OperatorFamily,
    bounds: &[usize],
) -> Result<OperatorFamily, ProjectionError> {
    assert_eq!(box_op.shift(), 0);
    let table = box_op.table().clone();
    let mut p = OperatorFamily::zero(table.clone(), 0);
    for k in 0..=box_op.n() {
        let mut power = QMat::identity(table.dim(k));
        for _ in 0..bounds[k] {
            power = box_op.mat(k).clone() * power;
        }
        let kernel = power.kernel_basis();
        let image = power.image_basis();
        let proj = QMat::projector_onto_along(&kernel, &image)
            .ok_or(ProjectionError::KernelImageSplit { degree: k })?;
        p.set_mat(k, proj);
    }
    Ok(p)
}

/// Conjugator `L = P Pi0 + (I-P)(I-Pi0)` and its Neumann inverse. `L` has
/// identity gr part, so `L - I` strictly increases weights and the series is
/// finite. Also verifies `P L = P Pi0 = L Pi0` and `P = L Pi0 L^{-1}`.
pub fn build_l(
    p: &OperatorFamily,
    pi0: &OperatorFamily,
) -> Result<(OperatorFamily, OperatorFamily), ProjectionError> {
    let identity = OperatorFamily::identity(p.table().clone());
    let l = p
        .compose(pi0)
        .add(&identity.sub(p).compose(&identity.sub(pi0)));
    identity
        .sub(&l)
        .increases_weight()
        .map_err(ProjectionError::ConjugatorNotUnipotent)?;
    let l_inv = neumann_inverse(&identity.sub(&l))?;
    assert!(l.compose(&l_inv).is_identity() && l_inv.compose(&l).is_identity());
    let pl = p.compose(&l);
    assert_eq!(pl, p.compose(pi0), "P L = P Pi0");
    assert_eq!(pl, l.compose(pi0), "P L = L Pi0");
    assert_eq!(&l.compose(pi0).compose(&l_inv), p, "P = L Pi0 L^(-1)");
    Ok((l, l_inv))
}

/// Everything the subcomplex assembly needs, computed once per spec and Gram.
///
/// `p` is the canonical generalized-kernel projection; `pi_f` is the same
/// splitting built by the explicit partial-inverse formula, and the builder
/// cross-checks `p + pi_f = I` so the two constructions verify each other.
#[derive(Debug, Clone)]
pub struct ProjectionBundle {
    pub d: OperatorFamily,
    pub d0: OperatorFamily,
    pub delta0: OperatorFamily,
    pub box0: OperatorFamily,
    pub pi0: OperatorFamily,
    pub d0inv: OperatorFamily,
    pub box_full: OperatorFamily,
    pub p: OperatorFamily,
    pub b: OperatorFamily,
    pub b1: OperatorFamily,
    pub pi_f: OperatorFamily,
    pub l: OperatorFamily,
    pub l_inv: OperatorFamily,
}

/// Rejects Grams that couple different basis weights; the construction needs
/// the weight decomposition to be orthogonal.
pub fn check_gram_weights(gram: &GramFamily) -> Result<(), ProjectionError> {
    let table = gram.table();
    let g1 = gram.degree_one();
    for i in 1..=table.n() {
        for j in 1..=table.n() {
            let (wi, wj) = (table.weighting().of(i), table.weighting().of(j));
            if wi != wj && !g1.get(i - 1, j - 1).is_zero() {
                return Err(ProjectionError::GramMixesWeights(wi, wj));
            }
        }
    }
    Ok(())
}

/// Runs the whole projection pipeline for a validated spec and a degree-1
/// Gram family, cross-checking the two constructions of `P`.
pub fn build_bundle(
    spec: &LieAlgebraSpec,
    gram: &GramFamily,
) -> Result<ProjectionBundle, ProjectionError> {
    check_gram_weights(gram)?;
    let table = gram.table().clone();
    let d = ce_differential_on(spec, table.clone())?;
    let d0 = ce_differential_on(&spec.associated_graded()?, table.clone())?;
    let delta0 = adjoint(&d0, gram);
    let (box0, pi0) = base_box_and_projection(&d0, &delta0, gram);
    let d0inv = partial_inverse(&d0, gram);
    let box_full = d.compose(&delta0).add(&delta0.compose(&d));
    let bounds = nilpotency_bound(&table);
    let p = generalized_kernel_projection(&box_full, &bounds)?;
    let (b, b1, pi_f) = rumin_projection(&d, &d0, &d0inv)?;
    let identity = OperatorFamily::identity(table);
    assert_eq!(p.add(&pi_f), identity, "the two projection constructions are complementary");
    let (l, l_inv) = build_l(&p, &pi0)?;
    Ok(ProjectionBundle {
        d,
        d0,
        delta0,
        box0,
        pi0,
        d0inv,
        box_full,
        p,
        b,
        b1,
        pi_f,
        l,
        l_inv,
    })
}

/// Convenience builder with the identity Gram.
pub fn build_bundle_identity(spec: &LieAlgebraSpec) -> Result<ProjectionBundle, ProjectionError> {
    let table = crate::calculus::basis_table(spec);
    build_bundle(spec, &identity_gram(table))
}

/// Builds a Gram family for a spec from a degree-1 Gram matrix.
pub fn gram_for_spec(spec: &LieAlgebraSpec, g1: &QMat) -> Result<GramFamily, CalculusError> {
    let table = crate::calculus::basis_table(spec);
    gram_family(table, g1)
}
