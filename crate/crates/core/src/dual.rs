//! Dual fusion frames: canonical, Gavruta and Q-duals, their certificates,
//! and the excess formulas and bounds that relate a frame to its duals.
//!
//! Operators between direct sums live in the coordinates of
//! [`crate::frame`]: block `i` of `⊕W` holds coordinates against the stored
//! basis `U_i`, block `i` of `⊕V` against `Y_i`. With those conventions
//! `T_V Q T_W^*` is the plain matrix product `T_V · Q · T_Wᵀ`.

use crate::check::{snap, Check};
use crate::error::{Error, Result};
use crate::excess::excess_nullspace;
use crate::frame::{DirectSumIndex, FusionFrame, IDENTITY_TOL};
use crate::linalg::{
    apply_invertible, hstack, max_abs, null_space, numerical_rank, orthogonal_complement, orthonormalize, range,
    subspace_intersection, subspace_sum, Matrix, Subspace,
};

/// Codomain of a [`BlockOperator`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorTarget {
    DirectSum(DirectSumIndex),
    Ambient(usize),
}

impl OperatorTarget {
    pub fn total(&self) -> usize {
        match self {
            OperatorTarget::DirectSum(idx) => idx.total(),
            OperatorTarget::Ambient(n) => *n,
        }
    }
}

/// A linear map out of a direct sum, stored densely in block coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    source: DirectSumIndex,
    target: OperatorTarget,
    matrix: Matrix,
}

impl BlockOperator {
    pub fn new(source: DirectSumIndex, target: OperatorTarget, matrix: Matrix) -> Result<Self> {
        let expected = (target.total(), source.total());
        if matrix.shape() != expected {
            return Err(Error::ShapeMismatch { expected, got: matrix.shape() });
        }
        crate::linalg::check_finite(&matrix)?;
        Ok(BlockOperator { source, target, matrix })
    }

    /// Assembles a block-diagonal operator `⊕W → ⊕V` from its diagonal blocks.
    pub fn block_diagonal(source: DirectSumIndex, target: DirectSumIndex, blocks: &[Matrix]) -> Result<Self> {
        if blocks.len() != source.len() || target.len() != source.len() {
            return Err(Error::IndexMismatch { left: source.len(), right: blocks.len().min(target.len()) });
        }
        let mut m = Matrix::zeros(target.total(), source.total());
        for (i, b) in blocks.iter().enumerate() {
            let expected = (target.block_dims()[i], source.block_dims()[i]);
            if b.shape() != expected {
                return Err(Error::ShapeMismatch { expected, got: b.shape() });
            }
            m.view_mut((target.offset(i), source.offset(i)), expected).copy_from(b);
        }
        BlockOperator::new(source, OperatorTarget::DirectSum(target), m)
    }

    pub fn source(&self) -> &DirectSumIndex {
        &self.source
    }

    pub fn target(&self) -> &OperatorTarget {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Columns of source block `j`, i.e. the operator composed with `p_j^*`.
    pub fn block_column(&self, j: usize) -> Matrix {
        let r = self.source.range(j);
        self.matrix.columns(r.start, r.len()).into_owned()
    }

    /// Block `(i, j)`; only meaningful for direct-sum targets.
    pub fn block(&self, i: usize, j: usize) -> Option<Matrix> {
        match &self.target {
            OperatorTarget::DirectSum(t) => {
                let (rr, cr) = (t.range(i), self.source.range(j));
                Some(self.matrix.view((rr.start, cr.start), (rr.len(), cr.len())).into_owned())
            }
            OperatorTarget::Ambient(_) => None,
        }
    }

    pub fn is_block_diagonal(&self, tol: f64) -> bool {
        let OperatorTarget::DirectSum(t) = &self.target else {
            return false;
        };
        if t.len() != self.source.len() {
            return false;
        }
        (0..t.len()).all(|i| {
            (0..t.len()).all(|j| i == j || max_abs(&self.block(i, j).expect("direct-sum target")) <= tol)
        })
    }

    /// Block-diagonal with every diagonal block onto its target block.
    pub fn is_component_preserving(&self, tol: f64) -> Result<bool> {
        if !self.is_block_diagonal(tol) {
            return Ok(false);
        }
        let OperatorTarget::DirectSum(t) = &self.target else {
            return Ok(false);
        };
        for i in 0..t.len() {
            let b = self.block(i, i).expect("direct-sum target");
            if numerical_rank(&b)? != t.block_dims()[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    Canonical,
    Gavruta,
    QDual,
    QBlockDiagonal,
    QComponentPreserving,
}

impl DualKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DualKind::Canonical => "canonical",
            DualKind::Gavruta => "gavruta",
            DualKind::QDual => "q_dual",
            DualKind::QBlockDiagonal => "q_block_diagonal",
            DualKind::QComponentPreserving => "q_component_preserving",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReasonCode {
    IdentityHolds,
    IdentityResidual,
    /// The reconstruction identity holds but the candidate is only a Bessel family.
    DualNotAFrame,
}

impl ReasonCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReasonCode::IdentityHolds => "identity_holds",
            ReasonCode::IdentityResidual => "identity_residual",
            ReasonCode::DualNotAFrame => "dual_not_a_frame",
        }
    }
}

/// Verdict on a candidate dual together with every identity checked for it.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub kind: DualKind,
    pub identity_residual: f64,
    pub verdict: bool,
    pub reason: ReasonCode,
    pub excess_of_dual: Option<i64>,
    pub bound_checks: Vec<Check>,
    /// Checks reported for reference only; they do not enter the verdict.
    pub informational: Vec<Check>,
}

impl DualCertificate {
    fn new(kind: DualKind, residual: f64, v: &FusionFrame) -> Result<Self> {
        let holds = residual <= IDENTITY_TOL;
        let reason = match (holds, v.is_frame()) {
            (false, _) => ReasonCode::IdentityResidual,
            (true, false) => ReasonCode::DualNotAFrame,
            (true, true) => ReasonCode::IdentityHolds,
        };
        let verdict = reason == ReasonCode::IdentityHolds;
        let excess_of_dual = if v.is_frame() { Some(excess_nullspace(v)?) } else { None };
        Ok(DualCertificate {
            kind,
            identity_residual: residual,
            verdict,
            reason,
            excess_of_dual,
            bound_checks: Vec::new(),
            informational: Vec::new(),
        })
    }

    pub fn all_pass(&self) -> bool {
        self.verdict && self.bound_checks.iter().all(|c| c.pass)
    }
}

/// A Q-dual with the left inverse `A` of `T_W^*` it comes from.
#[derive(Debug, Clone)]
pub struct QDual {
    pub v: FusionFrame,
    pub q: BlockOperator,
    pub a: BlockOperator,
}

fn check_pair(w: &FusionFrame, v: &FusionFrame) -> Result<()> {
    if w.len() != v.len() {
        return Err(Error::IndexMismatch { left: w.len(), right: v.len() });
    }
    if w.ambient_dim() != v.ambient_dim() {
        return Err(Error::AmbientMismatch { expected: w.ambient_dim(), found: v.ambient_dim() });
    }
    Ok(())
}

fn identity_residual(m: &Matrix) -> f64 {
    max_abs(&(m - Matrix::identity(m.nrows(), m.ncols())))
}

/// `{(S_W⁻¹ W_i, ω_i)}`, with `e(W̃) = e(W)` asserted.
pub fn canonical_dual(w: &FusionFrame) -> Result<FusionFrame> {
    let s_inv = w.frame_operator_solver()?.inverse();
    let dual = equivalent_frame(w, &s_inv)?;
    Check::exact("e(canonical dual) = e(W)", excess_nullspace(&dual)?, excess_nullspace(w)?).require()?;
    Ok(dual)
}

/// `{(U W_i, ω_i)}` for invertible `U`.
pub fn equivalent_frame(w: &FusionFrame, u: &Matrix) -> Result<FusionFrame> {
    let members = w
        .members()
        .iter()
        .map(|m| Ok((apply_invertible(u, &m.subspace)?, m.weight)))
        .collect::<Result<Vec<_>>>()?;
    FusionFrame::new(w.ambient_dim(), members)
}

/// `φ_VW = ⊕ π_{V_i} S_W⁻¹ |_{W_i}`, block `i` equal to `Y_iᵀ S_W⁻¹ U_i`.
pub fn phi_vw(w: &FusionFrame, v: &FusionFrame) -> Result<BlockOperator> {
    check_pair(w, v)?;
    let solver = w.frame_operator_solver()?;
    let blocks: Vec<Matrix> = (0..w.len())
        .map(|i| v.subspace(i).basis().transpose() * solver.solve(w.subspace(i).basis()))
        .collect();
    BlockOperator::block_diagonal(w.index().clone(), v.index().clone(), &blocks)
}

/// `‖T_V Q T_W^* − I‖_max`.
pub fn q_dual_residual(w: &FusionFrame, v: &FusionFrame, q: &BlockOperator) -> Result<f64> {
    check_pair(w, v)?;
    if q.source() != w.index() {
        return Err(Error::ShapeMismatch { expected: (w.total_dim(), 0), got: (q.source().total(), 0) });
    }
    match q.target() {
        OperatorTarget::DirectSum(t) if t == v.index() => {}
        other => {
            return Err(Error::ShapeMismatch { expected: (v.total_dim(), w.total_dim()), got: (other.total(), w.total_dim()) })
        }
    }
    Ok(identity_residual(&(v.synthesis_matrix() * q.matrix() * w.synthesis_matrix().transpose())))
}

/// Is `v` a Gavruta dual of `w`, i.e. `T_V φ_VW T_W^* = I`?
pub fn is_gavruta_dual(w: &FusionFrame, v: &FusionFrame) -> Result<DualCertificate> {
    let phi = phi_vw(w, v)?;
    let residual = q_dual_residual(w, v, &phi)?;
    let mut cert = DualCertificate::new(DualKind::Gavruta, residual, v)?;
    let solver = w.frame_operator_solver()?;
    let mut sum = Matrix::zeros(w.ambient_dim(), w.ambient_dim());
    for i in 0..w.len() {
        sum += v.subspace(i).projection() * solver.solve(&w.subspace(i).projection()) * (w.weight(i) * v.weight(i));
    }
    cert.informational.push(Check::approx(
        "max |sum w_i v_i pi_V S^-1 pi_W - I|",
        identity_residual(&sum),
        0.0,
        IDENTITY_TOL,
    ));
    Ok(cert)
}

/// The canonical dual, certified as a Gavruta dual.
pub fn certify_canonical(w: &FusionFrame) -> Result<(FusionFrame, DualCertificate)> {
    let dual = canonical_dual(w)?;
    let mut cert = is_gavruta_dual(w, &dual)?;
    cert.kind = DualKind::Canonical;
    Ok((dual, cert))
}

/// For a fusion Riesz basis, Gavruta duals are exactly the families with
/// `V_i ⊇ S_W⁻¹ W_i` and `υ_i = ω_i`.
pub fn riesz_gavruta_superset_check(w: &FusionFrame, v: &FusionFrame) -> Result<bool> {
    check_pair(w, v)?;
    if !w.is_riesz_basis()? {
        return Err(Error::NotRieszBasis);
    }
    superset_of_canonical(w, v)
}

/// `V_i ⊇ S_W⁻¹ W_i` and `υ_i = ω_i` for every `i`.
pub fn superset_of_canonical(w: &FusionFrame, v: &FusionFrame) -> Result<bool> {
    check_pair(w, v)?;
    let s_inv = w.frame_operator_solver()?.inverse();
    for i in 0..w.len() {
        let weight_match = (w.weight(i) - v.weight(i)).abs() <= IDENTITY_TOL * w.weight(i).max(1.0);
        let tilde = apply_invertible(&s_inv, w.subspace(i))?;
        if !weight_match || !v.subspace(i).contains(&tilde)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The canonical projection `P = I_D − T_W^* S_W⁻¹ T_W` onto `N(T_W)` and
/// the left inverse `A = S_W⁻¹ T_W + R P`.
#[derive(Debug, Clone)]
pub struct LeftInverse {
    pub a: BlockOperator,
    pub p: Matrix,
    pub r: Matrix,
}

/// `A = S_W⁻¹ T_W + R P`; `r = None` is `R = 0`.
///
/// Asserts `A T_W^* = I`, `P² = P` and that `P` is the orthogonal
/// projection onto `N(T_W)`.
pub fn left_inverse(w: &FusionFrame, r: Option<&Matrix>) -> Result<LeftInverse> {
    let (n, d) = (w.ambient_dim(), w.total_dim());
    let r = match r {
        Some(r) if r.shape() != (n, d) => return Err(Error::ShapeMismatch { expected: (n, d), got: r.shape() }),
        Some(r) => {
            crate::linalg::check_finite(r)?;
            r.clone()
        }
        None => Matrix::zeros(n, d),
    };
    let t = w.synthesis_matrix();
    let s_inv_t = w.frame_operator_solver()?.solve(t);
    let p = Matrix::identity(d, d) - t.transpose() * &s_inv_t;
    let a = s_inv_t + &r * &p;

    Check::approx("max |A T_W^* - I|", identity_residual(&(&a * t.transpose())), 0.0, IDENTITY_TOL).require()?;
    Check::approx("max |P^2 - P|", max_abs(&(&p * &p - &p)), 0.0, IDENTITY_TOL).require()?;
    let kernel = null_space(t)?.projection();
    Check::approx("max |P - pi_N(T_W)|", max_abs(&(&p - kernel)), 0.0, IDENTITY_TOL).require()?;

    let a = BlockOperator::new(w.index().clone(), OperatorTarget::Ambient(n), a)?;
    Ok(LeftInverse { a, p, r })
}

/// `V_i = R(A p_i^*)` with weights `υ` (default `ω`), and the component
/// preserving `Q_A = ⊕ υ_i⁻¹ A p_i^*`.
pub fn q_dual_from_left_inverse(w: &FusionFrame, a: &BlockOperator, weights: Option<&[f64]>) -> Result<QDual> {
    let n = w.ambient_dim();
    if a.source() != w.index() || a.target() != &OperatorTarget::Ambient(n) {
        return Err(Error::ShapeMismatch { expected: (n, w.total_dim()), got: a.matrix().shape() });
    }
    let residual = identity_residual(&(a.matrix() * w.synthesis_matrix().transpose()));
    if residual > IDENTITY_TOL {
        return Err(Error::NotADual { residual });
    }
    let upsilon = match weights {
        Some(u) if u.len() != w.len() => return Err(Error::IndexMismatch { left: w.len(), right: u.len() }),
        Some(u) => u.to_vec(),
        None => w.weights(),
    };
    let mut members = Vec::with_capacity(w.len());
    let mut blocks = Vec::with_capacity(w.len());
    for (i, &u) in upsilon.iter().enumerate() {
        let ai = a.block_column(i);
        let vi = range(&ai)?;
        if vi.is_zero() {
            return Err(Error::DegenerateMember { index: i });
        }
        blocks.push(vi.basis().transpose() * &ai / u);
        members.push((vi, u));
    }
    let v = FusionFrame::new(n, members)?;
    let q = BlockOperator::block_diagonal(w.index().clone(), v.index().clone(), &blocks)?;
    let residual = q_dual_residual(w, &v, &q)?;
    if residual > IDENTITY_TOL {
        return Err(Error::NotADual { residual });
    }
    if !q.is_component_preserving(IDENTITY_TOL)? {
        return Err(Error::NotComponentPreserving);
    }
    Ok(QDual { v, q, a: a.clone() })
}

/// `A = T_V Q` for a block-diagonal `Q`, the left inverse behind a Q-dual.
pub fn left_inverse_of_q_dual(w: &FusionFrame, v: &FusionFrame, q: &BlockOperator) -> Result<BlockOperator> {
    q_dual_residual(w, v, q)?;
    BlockOperator::new(w.index().clone(), OperatorTarget::Ambient(w.ambient_dim()), v.synthesis_matrix() * q.matrix())
}

/// A Gavruta dual viewed as the Q-dual with `Q = φ_VW`, `A = T_V φ_VW`.
pub fn gavruta_q_dual(w: &FusionFrame, v: &FusionFrame) -> Result<QDual> {
    let q = phi_vw(w, v)?;
    let a = left_inverse_of_q_dual(w, v, &q)?;
    Ok(QDual { v: v.clone(), q, a })
}

/// The Q-dual with the same excess built from local Riesz bases:
/// `V_i = span{ω_i S_F⁻¹ f_{i,j}}` and `Q{h_i} = {Σ_j ⟨h_i, f_{i,j}⟩ S_F⁻¹ f_{i,j}}`.
pub fn noncanonical_q_dual(w: &FusionFrame, riesz_bases: Option<&[Matrix]>) -> Result<QDual> {
    let n = w.ambient_dim();
    let f = w.local_frame_riesz(riesz_bases)?;
    let s_f = &f * f.transpose();
    let solver = crate::linalg::SpdSolver::new(&s_f)?;
    let bases: Vec<Matrix> = match riesz_bases {
        Some(b) => b.to_vec(),
        None => w.members().iter().map(|m| m.subspace.basis().clone()).collect(),
    };
    let mut members = Vec::with_capacity(w.len());
    let mut images = Vec::with_capacity(w.len());
    for (i, fi) in bases.iter().enumerate() {
        let image = solver.solve(fi);
        let vi = orthonormalize(&image)?;
        if vi.dim() != w.subspace(i).dim() {
            return Err(Error::RankDeficientLocalBasis { member: i, rank: vi.dim(), expected: w.subspace(i).dim() });
        }
        images.push((image, fi));
        members.push((vi, w.weight(i)));
    }
    let v = FusionFrame::new(n, members)?;
    let blocks: Vec<Matrix> = images
        .iter()
        .enumerate()
        .map(|(i, (image, fi))| v.subspace(i).basis().transpose() * image * fi.transpose() * w.subspace(i).basis())
        .collect();
    let q = BlockOperator::block_diagonal(w.index().clone(), v.index().clone(), &blocks)?;
    let residual = q_dual_residual(w, &v, &q)?;
    if residual > IDENTITY_TOL {
        return Err(Error::NotADual { residual });
    }
    Check::exact("e(V) = e(W)", excess_nullspace(&v)?, excess_nullspace(w)?).require()?;
    let a = left_inverse_of_q_dual(w, &v, &q)?;
    Ok(QDual { v, q, a })
}

fn require_q_dual(w: &FusionFrame, qd: &QDual) -> Result<()> {
    let residual = q_dual_residual(w, &qd.v, &qd.q)?;
    if residual > IDENTITY_TOL {
        return Err(Error::NotADual { residual });
    }
    qd.v.require_frame()
}

/// `Σ_i (dim V_i − ω_i tr(A p_i^* π_{W_i}))` for a component preserving Q_A-dual.
pub fn excess_q_dual_trace(w: &FusionFrame, qd: &QDual) -> Result<f64> {
    require_q_dual(w, qd)?;
    if !qd.q.is_component_preserving(IDENTITY_TOL)? {
        return Err(Error::NotComponentPreserving);
    }
    let mut total = 0.0;
    for i in 0..w.len() {
        let trace = (w.subspace(i).basis().transpose() * qd.a.block_column(i)).trace();
        total += qd.v.subspace(i).dim() as f64 - w.weight(i) * trace;
    }
    Ok(total)
}

/// `Σ_i (dim V_i − ω_i υ_i tr(π_{V_i} S_W⁻¹ π_{W_i}))` for a Gavruta dual.
pub fn excess_gavruta_trace(w: &FusionFrame, v: &FusionFrame) -> Result<f64> {
    let cert = is_gavruta_dual(w, v)?;
    if cert.identity_residual > IDENTITY_TOL {
        return Err(Error::NotADual { residual: cert.identity_residual });
    }
    v.require_frame()?;
    let solver = w.frame_operator_solver()?;
    let mut total = 0.0;
    for i in 0..w.len() {
        let (u, y) = (w.subspace(i).basis(), v.subspace(i).basis());
        let trace = (y.transpose() * solver.solve(u) * u.transpose() * y).trace();
        total += y.ncols() as f64 - w.weight(i) * v.weight(i) * trace;
    }
    Ok(total)
}

fn nullity(m: &Matrix) -> Result<i64> {
    Ok(m.ncols() as i64 - numerical_rank(m)? as i64)
}

/// Both sides of `|e(V) − e(W)| = |Σ dim(V_i ∩ N(p_i A^*)) − Σ dim N(A p_i^*)|`,
/// plus the signed form, and the `|dim N(Q^*) − dim N(Q)|` form when `Q` is
/// component preserving.
pub fn excess_bound_theorem(w: &FusionFrame, qd: &QDual) -> Result<Vec<Check>> {
    require_q_dual(w, qd)?;
    let diff = excess_nullspace(&qd.v)? - excess_nullspace(w)?;
    let mut gained = 0;
    let mut lost = 0;
    for i in 0..w.len() {
        let ai = qd.a.block_column(i);
        let kernel_of_adjoint = null_space(&ai.transpose())?;
        gained += subspace_intersection(qd.v.subspace(i), &kernel_of_adjoint)?.dim() as i64;
        lost += nullity(&ai)?;
    }
    let mut checks = vec![
        Check::exact("|e(V) - e(W)| = |sum dim(V_i cap N(p_i A*)) - sum dim N(A p_i*)|", diff.abs(), (gained - lost).abs()),
        Check::exact("e(V) - e(W) = sum dim(V_i cap N(p_i A*)) - sum dim N(A p_i*)", diff, gained - lost),
    ];
    if qd.q.is_component_preserving(IDENTITY_TOL)? {
        let q = qd.q.matrix();
        let form = nullity(&q.transpose())? - nullity(q)?;
        checks.push(Check::exact("|e(V) - e(W)| = |dim N(Q*) - dim N(Q)|", diff.abs(), form.abs()));
    }
    Ok(checks)
}

/// `(Σ dim(V_i ∩ S_W W_i^⊥), Σ dim(V_i + S_W W_i^⊥)^⊥)`.
pub fn gavruta_bound_terms(w: &FusionFrame, v: &FusionFrame) -> Result<(i64, i64)> {
    check_pair(w, v)?;
    let s = w.frame_operator();
    let mut meet = 0;
    let mut missed = 0;
    for i in 0..w.len() {
        let s_wperp = apply_invertible(s, &orthogonal_complement(w.subspace(i)))?;
        meet += subspace_intersection(v.subspace(i), &s_wperp)?.dim() as i64;
        missed += orthogonal_complement(&subspace_sum(v.subspace(i), &s_wperp)?).dim() as i64;
    }
    Ok((meet, missed))
}

/// Gavruta form of the bound, with the superset and Riesz-basis refinements.
pub fn excess_bound_gavruta(w: &FusionFrame, v: &FusionFrame) -> Result<Vec<Check>> {
    let cert = is_gavruta_dual(w, v)?;
    if !cert.verdict {
        return Err(Error::NotADual { residual: cert.identity_residual });
    }
    let (e_v, e_w) = (excess_nullspace(v)?, excess_nullspace(w)?);
    let (meet, missed) = gavruta_bound_terms(w, v)?;
    let mut checks = vec![Check::exact(
        "|e(V) - e(W)| = |sum dim(V_i cap S W_i^perp) - sum dim (V_i + S W_i^perp)^perp|",
        (e_v - e_w).abs(),
        (meet - missed).abs(),
    )];
    if superset_of_canonical(w, v)? {
        checks.push(Check::exact("e(V) - e(W) = sum dim(V_i cap S W_i^perp)", e_v - e_w, meet));
        if w.is_riesz_basis()? {
            let room: i64 = w.members().iter().map(|m| (w.ambient_dim() - m.subspace.dim()) as i64).sum();
            checks.push(Check::at_most("0 <= e(V)", 0, e_v));
            checks.push(Check::at_most("e(V) <= sum dim W_i^perp", e_v, room));
        }
    }
    Ok(checks)
}

/// Null-space balance for a Q-dual, with `P' = Q T_W^* T_V`, `K = N(T_W Q^*)`.
///
/// `e(V) + dim(R(P') ∩ K) = dim(N(Q^*) ∩ K) + dim(R(Q^*) ∩ N(T_W))` holds for
/// every Q-dual; it is the first returned check. The variant with
/// `dim R(P')` in place of `dim(R(P') ∩ K)` is returned second: it fails in
/// general (for `Q = I` on an orthonormal partition it reads `n = 0`) and is
/// kept for reference.
pub fn nullspace_identity(w: &FusionFrame, qd: &QDual) -> Result<(Check, Check)> {
    require_q_dual(w, qd)?;
    let (tw, tv, q) = (w.synthesis_matrix(), qd.v.synthesis_matrix(), qd.q.matrix());
    let q_adj = q.transpose();
    let p_prime = q * tw.transpose() * tv;
    let k = null_space(&(tw * &q_adj))?;
    let e_v = excess_nullspace(&qd.v)?;
    let range_p = range(&p_prime)?;
    let rhs = subspace_intersection(&null_space(&q_adj)?, &k)?.dim() as i64
        + subspace_intersection(&range(&q_adj)?, &null_space(tw)?)?.dim() as i64;
    let lhs = e_v + subspace_intersection(&range_p, &k)?.dim() as i64;
    let lhs_full = e_v + range_p.dim() as i64;
    Ok((
        Check::exact("e(V) + dim(R(QT_W*T_V) cap N(T_W Q*)) = dim(N(Q*) cap N(T_W Q*)) + dim(R(Q*) cap N(T_W))", lhs, rhs),
        Check::exact("e(V) + dim R(QT_W*T_V) = dim(N(Q*) cap N(T_W Q*)) + dim(R(Q*) cap N(T_W))", lhs_full, rhs),
    ))
}

/// `e(V) = Σ(dim V_i − dim W_i) + e(W) − Σ ω_i tr(R P p_i^* π_{W_i})`.
///
/// `r = None` uses `R = A`, which is valid because `A = S_W⁻¹T_W + A P` for
/// every left inverse.
pub fn left_inverse_expansion_check(w: &FusionFrame, qd: &QDual, r: Option<&Matrix>, tol: f64) -> Result<Check> {
    require_q_dual(w, qd)?;
    let rebuilt = left_inverse(w, r.or(Some(qd.a.matrix())))?;
    let diff = max_abs(&(rebuilt.a.matrix() - qd.a.matrix()));
    if diff > IDENTITY_TOL {
        return Err(Error::IdentityViolated { name: "A = S^-1 T_W + R P".into(), lhs: diff, rhs: 0.0 });
    }
    let rp = &rebuilt.r * &rebuilt.p;
    let mut correction = 0.0;
    let mut growth = 0;
    for i in 0..w.len() {
        let block = rp.columns(w.index().offset(i), w.subspace(i).dim()).into_owned();
        correction += w.weight(i) * (w.subspace(i).basis().transpose() * block).trace();
        growth += qd.v.subspace(i).dim() as i64 - w.subspace(i).dim() as i64;
    }
    let rhs = snap(growth as f64 + excess_nullspace(w)? as f64 - correction, tol)?;
    Ok(Check::exact(
        "e(V) = sum(dim V_i - dim W_i) + e(W) - sum w_i tr(R P p_i* pi_W_i)",
        excess_nullspace(&qd.v)?,
        rhs,
    ))
}

/// Certifies an explicit `Q` for the pair and runs every applicable formula.
pub fn certify_q_dual(w: &FusionFrame, v: &FusionFrame, q: &BlockOperator, tol: f64) -> Result<DualCertificate> {
    let residual = q_dual_residual(w, v, q)?;
    let kind = if q.is_component_preserving(IDENTITY_TOL)? {
        DualKind::QComponentPreserving
    } else if q.is_block_diagonal(IDENTITY_TOL) {
        DualKind::QBlockDiagonal
    } else {
        DualKind::QDual
    };
    let mut cert = DualCertificate::new(kind, residual, v)?;
    if !cert.verdict || kind == DualKind::QDual {
        return Ok(cert);
    }
    let qd = QDual { v: v.clone(), q: q.clone(), a: left_inverse_of_q_dual(w, v, q)? };
    cert.bound_checks = q_dual_checks(w, &qd, tol)?;
    let (_, printed) = nullspace_identity(w, &qd)?;
    cert.informational.push(printed);
    Ok(cert)
}

/// Certifies a Gavruta candidate and runs every applicable formula.
pub fn certify_gavruta(w: &FusionFrame, v: &FusionFrame, tol: f64) -> Result<DualCertificate> {
    let mut cert = is_gavruta_dual(w, v)?;
    if !cert.verdict {
        return Ok(cert);
    }
    let qd = gavruta_q_dual(w, v)?;
    let e_v = excess_nullspace(v)?;
    let trace = excess_gavruta_trace(w, v)?;
    cert.bound_checks.push(Check::exact("e(V) = round(gavruta trace formula)", e_v, snap(trace, tol)?));
    cert.bound_checks.extend(excess_bound_gavruta(w, v)?);
    cert.bound_checks.extend(q_dual_checks(w, &qd, tol)?);
    if w.is_riesz_basis()? {
        let superset = riesz_gavruta_superset_check(w, v)?;
        cert.bound_checks.push(Check::exact("V_i contains S^-1 W_i with matching weights", superset as i64, 1));
    }
    let (_, printed) = nullspace_identity(w, &qd)?;
    cert.informational.push(printed);
    Ok(cert)
}

/// Bound, balance and trace checks shared by every block-diagonal Q-dual.
pub fn q_dual_checks(w: &FusionFrame, qd: &QDual, tol: f64) -> Result<Vec<Check>> {
    let mut checks = excess_bound_theorem(w, qd)?;
    checks.push(nullspace_identity(w, qd)?.0);
    if qd.q.is_component_preserving(IDENTITY_TOL)? {
        let e_v = excess_nullspace(&qd.v)?;
        checks.push(Check::exact("e(V) = round(Q_A trace formula)", e_v, snap(excess_q_dual_trace(w, qd)?, tol)?));
    }
    checks.push(left_inverse_expansion_check(w, qd, None, tol)?);
    Ok(checks)
}

/// Shorthand for stacking the orthonormal bases of several subspaces.
pub fn stacked_bases(n: usize, subspaces: &[&Subspace]) -> Matrix {
    let bases: Vec<&Matrix> = subspaces.iter().map(|s| s.basis()).collect();
    hstack(n, &bases)
}
