//! Filtered and graded nilpotent Lie algebra specifications: validation,
//! associated graded truncation, a small builtin catalog, frame changes, and
//! the layer metric induced by a scalar product on the first layer.

use crate::exterior::Weighting;
use crate::linalg::{rat_to_string, QMat, Rat};
use num::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("{0}")]
    Weights(#[from] crate::exterior::ExteriorError),
    #[error("bracket ({i},{j}) requires i < j")]
    BracketOrder { i: usize, j: usize },
    #[error("bracket index {0} outside 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("unknown builtin algebra {0:?}")]
    UnknownBuiltin(String),
    #[error("spec {0:?} fails validation: {1}")]
    InvalidSpec(String, String),
    #[error("frame change matrix must be {n}x{n}")]
    FrameShape { n: usize },
    #[error("frame change matrix is singular")]
    SingularFrame,
    #[error("frame change breaks the filtration: new vector {k} uses generator {i} of higher weight")]
    FrameNotAdapted { k: usize, i: usize },
    #[error("spec is not graded")]
    NotGraded,
    #[error("layer of weight {weight} is not generated by brackets of lower layers")]
    NotStratified { weight: u32 },
    #[error("Gram matrix is not symmetric positive-definite")]
    NotSpd,
    #[error("Gram matrix must be {0}x{0}")]
    GramShape(usize),
    #[error("Gram couples layers of weights {0} and {1}; an orthogonal gradation is required")]
    GramNotBlockDiagonal(u32, u32),
}

/// A filtered nilpotent Lie algebra in a fixed adapted basis: dimension,
/// generator weights, and sparse rational structure constants stored for
/// `i < j` only (antisymmetry is synthesized).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraSpec {
    name: String,
    n: usize,
    weights: Weighting,
    brackets: BTreeMap<(usize, usize), BTreeMap<usize, Rat>>,
}

/// One failed Jacobi triple with its nonzero residual vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    pub residual: Vec<Rat>,
}

/// A structure constant landing above the allowed filtration weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationViolation {
    pub pair: (usize, usize),
    pub target: usize,
    pub coefficient: Rat,
}

/// Outcome of [`LieAlgebraSpec::validate`]; violations are data, not faults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub jacobi: Vec<JacobiViolation>,
    pub filtration: Vec<FiltrationViolation>,
    pub graded: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.jacobi.is_empty() && self.filtration.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.is_ok() {
            return format!("ok ({})", if self.graded { "graded" } else { "filtered" });
        }
        let mut parts = Vec::new();
        for v in &self.jacobi {
            let res: Vec<String> = v.residual.iter().map(rat_to_string).collect();
            parts.push(format!(
                "jacobi violation at (e{},e{},e{}) residual [{}]",
                v.triple.0,
                v.triple.1,
                v.triple.2,
                res.join(",")
            ));
        }
        for v in &self.filtration {
            parts.push(format!(
                "filtration violation: [e{},e{}] has component {} on e{}",
                v.pair.0,
                v.pair.1,
                rat_to_string(&v.coefficient),
                v.target
            ));
        }
        parts.join("; ")
    }
}

impl LieAlgebraSpec {
    /// Builds a structurally well-formed spec. Zero coefficients are dropped;
    /// bracket keys must satisfy `i < j` with indices in `1..=n`.
    pub fn new(
        name: impl Into<String>,
        weights: Weighting,
        brackets: Vec<((usize, usize), Vec<(usize, Rat)>)>,
    ) -> Result<Self, LieError> {
        let n = weights.dim();
        let mut map: BTreeMap<(usize, usize), BTreeMap<usize, Rat>> = BTreeMap::new();
        for ((i, j), coeffs) in brackets {
            if i >= j {
                return Err(LieError::BracketOrder { i, j });
            }
            if j > n || i == 0 {
                return Err(LieError::IndexOutOfRange(j.max(i), n));
            }
            let entry = map.entry((i, j)).or_default();
            for (k, c) in coeffs {
                if k == 0 || k > n {
                    return Err(LieError::IndexOutOfRange(k, n));
                }
                if !c.is_zero() {
                    let slot = entry.entry(k).or_insert_with(Rat::zero);
                    *slot += c;
                    if slot.is_zero() {
                        entry.remove(&k);
                    }
                }
            }
        }
        map.retain(|_, v| !v.is_empty());
        Ok(LieAlgebraSpec { name: name.into(), n, weights, brackets: map })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &Weighting {
        &self.weights
    }

    pub fn bracket_entries(&self) -> &BTreeMap<(usize, usize), BTreeMap<usize, Rat>> {
        &self.brackets
    }

    /// Structure constant `c_{ij}^k` for arbitrary `i, j` (antisymmetry
    /// synthesized; zero on the diagonal).
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rat {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self
                .brackets
                .get(&(i, j))
                .and_then(|m| m.get(&k))
                .cloned()
                .unwrap_or_else(Rat::zero),
            std::cmp::Ordering::Greater => -self.structure_constant(j, i, k),
            std::cmp::Ordering::Equal => Rat::zero(),
        }
    }

    /// `[e_i, e_j]` as a dense coordinate vector.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Rat> {
        (1..=self.n).map(|k| self.structure_constant(i, j, k)).collect()
    }

    /// `[e_i, v]` for a dense vector `v`.
    pub fn bracket_with(&self, i: usize, v: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.n];
        for (j0, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for k in 1..=self.n {
                let c = self.structure_constant(i, j0 + 1, k);
                if !c.is_zero() {
                    out[k - 1] += coeff * &c;
                }
            }
        }
        out
    }

    /// Checks the Jacobi identity over all triples, filtration compatibility
    /// of every structure constant, and whether the spec is graded.
    pub fn validate(&self) -> ValidationReport {
        let mut jacobi = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                for k in j + 1..=self.n {
                    // [e_i,[e_j,e_k]] - [e_j,[e_i,e_k]] + [e_k,[e_i,e_j]].
                    let mut residual = self.bracket_with(i, &self.bracket(j, k));
                    let t2 = self.bracket_with(j, &self.bracket(i, k));
                    let t3 = self.bracket_with(k, &self.bracket(i, j));
                    for idx in 0..self.n {
                        residual[idx] = &residual[idx] - &t2[idx] + &t3[idx];
                    }
                    if residual.iter().any(|x| !x.is_zero()) {
                        jacobi.push(JacobiViolation { triple: (i, j, k), residual });
                    }
                }
            }
        }
        let mut filtration = Vec::new();
        let mut graded = true;
        for (&(i, j), coeffs) in &self.brackets {
            for (&k, c) in coeffs {
                let (wi, wj, wk) = (self.weights.of(i), self.weights.of(j), self.weights.of(k));
                if wk > wi + wj {
                    filtration.push(FiltrationViolation {
                        pair: (i, j),
                        target: k,
                        coefficient: c.clone(),
                    });
                }
                if wk != wi + wj {
                    graded = false;
                }
            }
        }
        ValidationReport { jacobi, filtration, graded }
    }

    pub fn ensure_valid(&self) -> Result<(), LieError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(LieError::InvalidSpec(self.name.clone(), report.summary()))
        }
    }

    /// Keeps exactly the weight-additive structure constants. The result is
    /// graded, shares basis and weights with the input, and passes validation.
    pub fn associated_graded(&self) -> Result<LieAlgebraSpec, LieError> {
        self.ensure_valid()?;
        let mut brackets = Vec::new();
        for (&(i, j), coeffs) in &self.brackets {
            let kept: Vec<(usize, Rat)> = coeffs
                .iter()
                .filter(|(&k, _)| self.weights.of(k) == self.weights.of(i) + self.weights.of(j))
                .map(|(&k, c)| (k, c.clone()))
                .collect();
            if !kept.is_empty() {
                brackets.push(((i, j), kept));
            }
        }
        let graded = LieAlgebraSpec::new(self.name.clone(), self.weights.clone(), brackets)?;
        graded.ensure_valid()?;
        Ok(graded)
    }

    /// Rewrites the structure constants for the frame `e_hat = A . e` (rows of
    /// `A` are the new frame vectors in the old basis).
    pub fn change_frame(&self, frame: &FrameChange) -> Result<LieAlgebraSpec, LieError> {
        frame.check(&self.weights)?;
        let a = &frame.matrix;
        let n = self.n;
        let a_inv = a.inverse().ok_or(LieError::SingularFrame)?;
        let mut brackets = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                // [e_hat_i, e_hat_j] in old coordinates.
                let mut v = vec![Rat::zero(); n];
                for p in 1..=n {
                    let ai = a.get(i - 1, p - 1);
                    if ai.is_zero() {
                        continue;
                    }
                    let mut inner = vec![Rat::zero(); n];
                    for q in 1..=n {
                        let aj = a.get(j - 1, q - 1);
                        if aj.is_zero() {
                            continue;
                        }
                        for (idx, c) in self.bracket(p, q).into_iter().enumerate() {
                            if !c.is_zero() {
                                inner[idx] += aj * &c;
                            }
                        }
                    }
                    for idx in 0..n {
                        if !inner[idx].is_zero() {
                            v[idx] += ai * &inner[idx];
                        }
                    }
                }
                // Old coordinates to hat coordinates: e_c = sum_k A^{-1}[c][k] e_hat_k.
                let mut coeffs = Vec::new();
                for k in 1..=n {
                    let mut c = Rat::zero();
                    for (idx, vc) in v.iter().enumerate() {
                        if !vc.is_zero() {
                            c += vc * a_inv.get(idx, k - 1);
                        }
                    }
                    if !c.is_zero() {
                        coeffs.push((k, c));
                    }
                }
                if !coeffs.is_empty() {
                    brackets.push(((i, j), coeffs));
                }
            }
        }
        let out = LieAlgebraSpec::new(self.name.clone(), self.weights.clone(), brackets)?;
        out.ensure_valid()?;
        Ok(out)
    }

    /// Generator indices per layer weight, for `w = 1..=max`. Nondecreasing
    /// weights make each layer a contiguous index range.
    pub fn layers(&self) -> Vec<(u32, Vec<usize>)> {
        let max = *self.weights.as_slice().iter().max().unwrap();
        (1..=max)
            .map(|w| (w, (1..=self.n).filter(|&i| self.weights.of(i) == w).collect::<Vec<_>>()))
            .collect()
    }
}

/// Invertible change of adapted frame, rows expressing the new frame vectors
/// in the old basis. Adapted means a new vector of weight `w` only uses old
/// generators of weight `<= w`.
#[derive(Debug, Clone)]
pub struct FrameChange {
    pub matrix: QMat,
}

impl FrameChange {
    pub fn new(matrix: QMat) -> Self {
        FrameChange { matrix }
    }

    fn check(&self, weights: &Weighting) -> Result<(), LieError> {
        let n = weights.dim();
        if self.matrix.rows() != n || self.matrix.cols() != n {
            return Err(LieError::FrameShape { n });
        }
        for k in 1..=n {
            for i in 1..=n {
                if weights.of(i) > weights.of(k) && !self.matrix.get(k - 1, i - 1).is_zero() {
                    return Err(LieError::FrameNotAdapted { k, i });
                }
            }
        }
        if self.matrix.rank() != n {
            return Err(LieError::SingularFrame);
        }
        Ok(())
    }
}

/// Catalog of builtin algebras used by the tests and the CLI.
pub fn builtin(name: &str) -> Result<LieAlgebraSpec, LieError> {
    let one = Rat::one;
    match name {
        "heisenberg3" => LieAlgebraSpec::new(
            "heisenberg3",
            Weighting::new(vec![1, 1, 2])?,
            vec![((1, 2), vec![(3, one())])],
        ),
        "heisenberg5" => LieAlgebraSpec::new(
            "heisenberg5",
            Weighting::new(vec![1, 1, 1, 1, 2])?,
            vec![((1, 2), vec![(5, one())]), ((3, 4), vec![(5, one())])],
        ),
        "engel4" => LieAlgebraSpec::new(
            "engel4",
            Weighting::new(vec![1, 1, 2, 2])?,
            vec![((1, 2), vec![(3, one())]), ((1, 3), vec![(4, one())])],
        ),
        "free_n633" => LieAlgebraSpec::new(
            "free_n633",
            Weighting::new(vec![1, 1, 1, 2, 2, 2])?,
            vec![
                ((1, 2), vec![(4, one())]),
                ((1, 3), vec![(5, one())]),
                ((2, 3), vec![(6, one())]),
            ],
        ),
        other => Err(LieError::UnknownBuiltin(other.to_string())),
    }
}

pub const BUILTIN_NAMES: &[&str] = &["heisenberg3", "heisenberg5", "engel4", "free_n633"];

/// Kronecker product, used for the tensor-power scalar product on the first
/// layer.
fn kron(a: &QMat, b: &QMat) -> QMat {
    let mut m = QMat::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            for p in 0..b.rows() {
                for q in 0..b.cols() {
                    m.set(i * b.rows() + p, j * b.cols() + q, v * b.get(p, q));
                }
            }
        }
    }
    m
}

/// Nested-bracket map `(g_1)^{x j} -> g_j` as a matrix: columns indexed by
/// tuples of first-layer generators in row-major order, rows by the layer-`j`
/// generators.
fn layer_bracket_map(spec: &LieAlgebraSpec, layer1: &[usize], layer: &[usize], j: u32) -> QMat {
    let m = layer1.len();
    let cols = m.pow(j);
    let mut mat = QMat::zeros(layer.len(), cols);
    for col in 0..cols {
        // Decode the tuple (t_1, ..., t_j) from the column index.
        let mut tuple = Vec::with_capacity(j as usize);
        let mut rest = col;
        for _ in 0..j {
            tuple.push(layer1[rest % m]);
            rest /= m;
        }
        tuple.reverse();
        // [t_1, [t_2, [..., t_j]]].
        let mut v = vec![Rat::zero(); spec.dim()];
        v[tuple[j as usize - 1] - 1] = Rat::one();
        for &t in tuple[..j as usize - 1].iter().rev() {
            v = spec.bracket_with(t, &v);
        }
        for (row, &gen) in layer.iter().enumerate() {
            mat.set(row, col, v[gen - 1].clone());
        }
    }
    mat
}

/// Pushes a scalar product on the first layer to every layer of a graded
/// stratified spec: layer `j` inherits the metric through the `j`-linear
/// surjection from the `j`-th tensor power of the first layer, restricted to
/// the orthogonal complement of its kernel.
///
/// Returns one SPD Gram block per layer weight `1..=max`.
pub fn induced_layer_gram(
    spec: &LieAlgebraSpec,
    layer1_gram: &QMat,
) -> Result<Vec<QMat>, LieError> {
    spec.ensure_valid()?;
    let report = spec.validate();
    if !report.graded {
        return Err(LieError::NotGraded);
    }
    let layers = spec.layers();
    let layer1 = &layers[0].1;
    if layer1_gram.rows() != layer1.len() || layer1_gram.cols() != layer1.len() {
        return Err(LieError::GramShape(layer1.len()));
    }
    if !layer1_gram.is_spd() {
        return Err(LieError::NotSpd);
    }
    let g1_inv = layer1_gram.inverse().expect("SPD Gram is invertible");
    let mut out = vec![layer1_gram.clone()];
    let mut tensor_inv = g1_inv.clone();
    for (w, layer) in layers.iter().skip(1) {
        tensor_inv = kron(&tensor_inv, &g1_inv);
        if layer.is_empty() {
            if layers.iter().any(|(w2, l2)| w2 > w && !l2.is_empty()) {
                return Err(LieError::NotStratified { weight: *w });
            }
            out.push(QMat::zeros(0, 0));
            continue;
        }
        let b = layer_bracket_map(spec, layer1, layer, *w);
        if b.rank() != layer.len() {
            return Err(LieError::NotStratified { weight: *w });
        }
        // Pushforward metric via minimal-norm preimages:
        // G_j = (B G_tensor^{-1} B^t)^{-1}.
        let gram = (b.clone() * tensor_inv.clone() * b.transpose())
            .inverse()
            .expect("pushforward Gram is invertible for surjective B");
        out.push(gram);
    }
    Ok(out)
}

/// Mismatch evidence from [`is_compatible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityMismatch {
    pub layer_weight: u32,
    pub entry: (usize, usize),
    pub found: Rat,
    pub expected: Rat,
}

/// Compares the layer blocks of a full Gram on the algebra against the metric
/// induced from its first-layer block. The Gram must be block-diagonal across
/// layers (orthogonal gradation); coupling entries are a distinct failure.
pub fn is_compatible(
    spec: &LieAlgebraSpec,
    gram: &QMat,
) -> Result<Result<(), CompatibilityMismatch>, LieError> {
    spec.ensure_valid()?;
    let n = spec.dim();
    if gram.rows() != n || gram.cols() != n {
        return Err(LieError::GramShape(n));
    }
    if !gram.is_spd() {
        return Err(LieError::NotSpd);
    }
    for i in 1..=n {
        for j in 1..=n {
            if spec.weights().of(i) != spec.weights().of(j) && !gram.get(i - 1, j - 1).is_zero() {
                return Err(LieError::GramNotBlockDiagonal(
                    spec.weights().of(i),
                    spec.weights().of(j),
                ));
            }
        }
    }
    let layers = spec.layers();
    let layer1 = &layers[0].1;
    let mut g1 = QMat::zeros(layer1.len(), layer1.len());
    for (r, &i) in layer1.iter().enumerate() {
        for (c, &j) in layer1.iter().enumerate() {
            g1.set(r, c, gram.get(i - 1, j - 1).clone());
        }
    }
    let induced = induced_layer_gram(spec, &g1)?;
    for ((w, layer), expected) in layers.iter().zip(&induced) {
        for (r, &i) in layer.iter().enumerate() {
            for (c, &j) in layer.iter().enumerate() {
                let found = gram.get(i - 1, j - 1);
                if found != expected.get(r, c) {
                    return Ok(Err(CompatibilityMismatch {
                        layer_weight: *w,
                        entry: (i, j),
                        found: found.clone(),
                        expected: expected.get(r, c).clone(),
                    }));
                }
            }
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    #[test]
    fn catalog_specs_all_validate() {
        for name in BUILTIN_NAMES {
            let spec = builtin(name).unwrap();
            let report = spec.validate();
            assert!(report.is_ok(), "{name}: {}", report.summary());
        }
        assert!(builtin("nosuch").is_err());
    }

    #[test]
    fn heisenberg_is_graded_engel_is_not() {
        assert!(builtin("heisenberg3").unwrap().validate().graded);
        assert!(!builtin("engel4").unwrap().validate().graded);
    }

    #[test]
    fn jacobi_violation_reports_residual() {
        // [e1,e2]=e3, [e1,e3]=e1: the Jacobi sum at (1,2,3) leaves e3.
        let spec = LieAlgebraSpec::new(
            "bad",
            Weighting::new(vec![1, 1, 2]).unwrap(),
            vec![((1, 2), vec![(3, rat(1))]), ((1, 3), vec![(1, rat(1))])],
        )
        .unwrap();
        let report = spec.validate();
        assert!(!report.graded);
        assert!(report.filtration.is_empty());
        assert_eq!(report.jacobi.len(), 1);
        assert_eq!(report.jacobi[0].triple, (1, 2, 3));
        assert_eq!(report.jacobi[0].residual, vec![rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn associated_graded_truncates_engel() {
        let engel = builtin("engel4").unwrap();
        let graded = engel.associated_graded().unwrap();
        assert!(graded.validate().graded);
        assert_eq!(graded.bracket(1, 2), vec![rat(0), rat(0), rat(1), rat(0)]);
        assert_eq!(graded.bracket(1, 3), vec![rat(0); 4]);
        // Idempotent.
        assert_eq!(graded.associated_graded().unwrap(), graded);
        // Graded input is untouched.
        let h = builtin("heisenberg3").unwrap();
        assert_eq!(h.associated_graded().unwrap(), h);
    }

    #[test]
    fn associated_graded_drops_lower_weight_part() {
        let spec = LieAlgebraSpec::new(
            "filtered",
            Weighting::new(vec![1, 1, 2]).unwrap(),
            vec![((1, 2), vec![(3, rat(1)), (1, rat(1))])],
        )
        .unwrap();
        assert!(spec.validate().is_ok());
        let graded = spec.associated_graded().unwrap();
        assert_eq!(graded.bracket(1, 2), vec![rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn change_frame_rescales_structure_constants() {
        let h = builtin("heisenberg3").unwrap();
        let identity = FrameChange::new(QMat::identity(3));
        assert_eq!(h.change_frame(&identity).unwrap(), h);

        let scale = FrameChange::new(QMat::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]));
        let scaled = h.change_frame(&scale).unwrap();
        assert_eq!(scaled.bracket(1, 2), vec![rat(0), rat(0), ratio(1, 2)]);

        // Round trip through the inverse frame.
        let inv = FrameChange::new(scale.matrix.inverse().unwrap());
        assert_eq!(scaled.change_frame(&inv).unwrap(), h);
    }

    #[test]
    fn change_frame_rejects_bad_matrices() {
        let h = builtin("heisenberg3").unwrap();
        let singular = FrameChange::new(QMat::zeros(3, 3));
        assert!(h.change_frame(&singular).is_err());
        // e1 (weight 1) picking up e3 (weight 2) is not adapted.
        let bad = FrameChange::new(QMat::from_i64(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]));
        assert!(matches!(
            h.change_frame(&bad),
            Err(LieError::FrameNotAdapted { k: 1, i: 3 })
        ));
    }

    #[test]
    fn induced_gram_on_heisenberg_center_is_one_half() {
        let h = builtin("heisenberg3").unwrap();
        let grams = induced_layer_gram(&h, &QMat::identity(2)).unwrap();
        assert_eq!(grams.len(), 2);
        assert_eq!(grams[1], QMat::from_rows(vec![vec![ratio(1, 2)]]));
    }

    #[test]
    fn induced_gram_on_free_step_two() {
        let spec = builtin("free_n633").unwrap();
        let grams = induced_layer_gram(&spec, &QMat::identity(3)).unwrap();
        let expect = QMat::diag(vec![ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        assert_eq!(grams[1], expect);
        assert!(grams[1].is_spd());
    }

    #[test]
    fn induced_gram_on_abelian_is_input() {
        let spec =
            LieAlgebraSpec::new("abelian2", Weighting::new(vec![1, 1]).unwrap(), vec![]).unwrap();
        let g = QMat::from_rows(vec![vec![rat(2), rat(1)], vec![rat(1), rat(2)]]);
        let grams = induced_layer_gram(&spec, &g).unwrap();
        assert_eq!(grams, vec![g]);
    }

    #[test]
    fn induced_gram_requires_stratified_generation() {
        // Graded engel4 has e4 in the weight-2 layer but no bracket reaching it.
        let graded_engel = builtin("engel4").unwrap().associated_graded().unwrap();
        assert!(matches!(
            induced_layer_gram(&graded_engel, &QMat::identity(2)),
            Err(LieError::NotStratified { weight: 2 })
        ));
        assert!(induced_layer_gram(
            &builtin("heisenberg3").unwrap(),
            &QMat::from_i64(&[&[1, 2], &[2, 1]])
        )
        .is_err());
    }

    #[test]
    fn compatibility_detects_the_half() {
        let h = builtin("heisenberg3").unwrap();
        let good = QMat::diag(vec![rat(1), rat(1), ratio(1, 2)]);
        assert!(is_compatible(&h, &good).unwrap().is_ok());

        let bad = QMat::identity(3);
        let mismatch = is_compatible(&h, &bad).unwrap().unwrap_err();
        assert_eq!(mismatch.layer_weight, 2);
        assert_eq!(mismatch.found, rat(1));
        assert_eq!(mismatch.expected, ratio(1, 2));
    }

    #[test]
    fn compatibility_rejects_layer_coupling() {
        let h = builtin("heisenberg3").unwrap();
        let mut coupled = QMat::identity(3);
        coupled.set(0, 2, ratio(1, 4));
        coupled.set(2, 0, ratio(1, 4));
        assert!(matches!(
            is_compatible(&h, &coupled),
            Err(LieError::GramNotBlockDiagonal(_, _))
        ));
    }

    #[test]
    fn abelian_compatibility_is_vacuous() {
        let spec =
            LieAlgebraSpec::new("abelian2", Weighting::new(vec![1, 1]).unwrap(), vec![]).unwrap();
        let g = QMat::from_rows(vec![vec![rat(3), rat(1)], vec![rat(1), rat(3)]]);
        assert!(is_compatible(&spec, &g).unwrap().is_ok());
    }
}
