//! Randomized verification of the operator-theoretic identities, one suite per id.
//!
//! Every suite has a stable id, draws its own sub-seed from the master seed
//! and reports the number of trials, the largest residual and whether any
//! trial violated its tolerance. Suites are independent and run in parallel;
//! the report is identical for identical configurations.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{
    basis_compatible, cayley, cayley_invariance, gen_remark, inverse_cayley, operator_distance,
    same_span, self_adjoint_iff_unitary, LambdaParam,
};
use crate::embed::{
    chi, chi_inv, qinv, rank_h, rank_threshold, right_eigen_spheres_detailed, singular_values, RANK_TOL,
};
use crate::error::{QError, Result};
use crate::hspace::{expand, inner, left_mul, left_mul_matrix, polarization, reconstruct, HilbertBasis, QVector};
use crate::matrix::QMatrix;
use crate::qop::{
    classify, frame_and_coefficients, i_minus_u_rank, is_extension, is_isometric, is_self_adjoint, is_symmetric,
    isometry_defect, op_scalar_left, op_scalar_right, Operator, PartialOperator,
};
use crate::quat::Quaternion;
use crate::random;
use crate::spectral::{
    defect_number, deficiency_index, in_s_resolvent, iso_indices, pseudo_resolvent, regular_point, s_spectrum,
    SpectralSphere,
};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    /// Predicate tolerance for class membership and sphere matching.
    pub tol: f64,
    pub lambda: LambdaParam,
    /// Largest dimension sampled by the generic suites.
    pub max_dim: usize,
    /// Extra operators supplied by the user; class-Y members join the Cayley
    /// suites, dense ones the spectrum suite.
    pub corpus: Vec<Operator>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            trials: 50,
            tol: DEFAULT_TOL,
            lambda: LambdaParam::default(),
            max_dim: 6,
            corpus: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionResult {
    pub trials: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub violations: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A measured quantity that is reported but not asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub samples: usize,
    pub count: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub lambda: Quaternion,
    pub all_pass: bool,
    pub propositions: BTreeMap<String, PropositionResult>,
    pub observations: BTreeMap<String, Observation>,
}

struct Tally {
    tol: f64,
    trials: usize,
    max_residual: f64,
    violations: usize,
    detail: Option<String>,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Tally { tol, trials: 0, max_residual: 0.0, violations: 0, detail: None }
    }

    fn trial(&mut self) {
        self.trials += 1;
    }

    /// Records a residual; NaN counts as a violation.
    fn residual(&mut self, what: &str, r: f64) {
        if r.is_nan() || r > self.max_residual {
            self.max_residual = r;
        }
        if r.is_nan() || r > self.tol {
            self.violations += 1;
            self.detail.get_or_insert_with(|| format!("{what}: residual {r:e}"));
        }
    }

    fn expect(&mut self, what: &str, ok: bool) {
        if !ok {
            self.violations += 1;
            self.detail.get_or_insert_with(|| what.to_string());
        }
    }

    fn finish(self) -> PropositionResult {
        let pass = self.violations == 0 && self.trials > 0;
        PropositionResult {
            trials: self.trials,
            max_residual: self.max_residual,
            tol: self.tol,
            violations: self.violations,
            pass,
            detail: self.detail,
        }
    }
}

struct Ctx<'a> {
    rng: ChaCha8Rng,
    cfg: &'a VerifyConfig,
    observations: BTreeMap<String, Observation>,
}

impl Ctx<'_> {
    fn dim(&mut self, lo: usize) -> usize {
        let hi = self.cfg.max_dim.max(lo);
        self.rng.random_range(lo..=hi)
    }

    fn basis(&mut self, n: usize) -> HilbertBasis {
        if self.rng.random_bool(0.25) {
            HilbertBasis::standard(n)
        } else {
            random::basis(&mut self.rng, n)
        }
    }

    fn q(&mut self) -> Quaternion {
        random::quaternion(&mut self.rng)
    }

    fn vector(&mut self, n: usize) -> QVector {
        random::vector(&mut self.rng, n)
    }

    /// Random vector in the domain of `op`.
    fn domain_vector(&mut self, op: &Operator) -> QVector {
        let f = op.domain_frame();
        let c = random::vector(&mut self.rng, f.cols());
        f.apply(&c).expect("frame shape")
    }

    /// Class-Y operator relative to `basis`: a dense conjugated real
    /// symmetric matrix, a block-rotation matrix or a partial stand-in.
    fn class_y(&mut self, basis: &HilbertBasis) -> Operator {
        let n = basis.dim();
        match self.rng.random_range(0..3) {
            0 => random::class_y_dense(&mut self.rng, basis).into(),
            1 => random::remark_in_basis(&mut self.rng, basis).into(),
            _ if n >= 2 => {
                let d = self.rng.random_range(1..n);
                random::class_y_partial(&mut self.rng, basis, d).into()
            }
            _ => random::class_y_dense(&mut self.rng, basis).into(),
        }
    }

    /// Isometry: a dense unitary or a partial isometry.
    fn isometry(&mut self, n: usize) -> Operator {
        if n >= 2 && self.rng.random_bool(0.6) {
            let d = self.rng.random_range(1..n);
            random::partial_isometry(&mut self.rng, n, d).into()
        } else {
            random::unitary(&mut self.rng, n).into()
        }
    }

    /// Arbitrary operator: random dense, random partial, class Y or isometry.
    fn any_operator(&mut self, n: usize) -> Operator {
        match self.rng.random_range(0..4) {
            0 => random::matrix(&mut self.rng, n, n).into(),
            1 if n >= 2 => {
                let d = self.rng.random_range(1..n);
                let f = random::unitary(&mut self.rng, n).column_range(0, d);
                let a = random::matrix(&mut self.rng, n, d);
                PartialOperator::new(f, a).expect("orthonormal frame").into()
            }
            2 => {
                let b = self.basis(n);
                self.class_y(&b)
            }
            _ => self.isometry(n),
        }
    }

    fn observe(&mut self, key: &str, samples: usize, count: usize, note: &str) {
        self.observations
            .insert(key.to_string(), Observation { samples, count, note: note.to_string() });
    }

    fn corpus_class_y(&self) -> Vec<(Operator, HilbertBasis)> {
        self.cfg
            .corpus
            .iter()
            .filter_map(|op| {
                let b = HilbertBasis::standard(op.dim());
                classify(op, &b, self.cfg.tol).ok().filter(|f| f.in_y).map(|_| (op.clone(), b))
            })
            .collect()
    }
}

type Suite = fn(&mut Ctx) -> Result<Tally>;

/// Suite ids in report order, with their implementations.
const SUITES: &[(&str, Suite)] = &[
    ("quat_algebra", quat_algebra),
    ("inner_axioms", inner_axioms),
    ("P1", p1),
    ("P2", p2),
    ("polar", polar),
    ("right_linear", right_linear),
    ("Ad1", ad1),
    ("LPro", lpro),
    ("lft_mul", lft_mul),
    ("lft_mul_op", lft_mul_op),
    ("rgt_mul_op", rgt_mul_op),
    ("sc_mul_aj_op", sc_mul_aj_op),
    ("N_S_sym", n_s_sym),
    ("Y_real_symmetric", y_real_symmetric),
    ("preqn_a", preqn_a),
    ("preqn_b", preqn_b),
    ("preqn_c", preqn_c),
    ("csadj_gen", csadj_gen),
    ("reg_pt", reg_pt),
    ("pre_set_a", pre_set_a),
    ("pre_set_c", pre_set_c),
    ("def_con", def_con),
    ("pr01", pr01),
    ("pr01_rho", pr01_rho),
    ("S_spectrum", s_spectrum_suite),
    ("Pr2", pr2),
    ("pr00_resol", pr00_resol),
    ("pr00_neq1", pr00_neq1),
    ("Gen_Von_neq", gen_von_neq),
    ("def_minus", def_minus),
    ("iso_a", iso_a),
    ("iso_b", iso_b),
    ("iso_d", iso_d),
    ("def_int_ext", def_int_ext),
    ("d_i_e", d_i_e),
    ("I_U", i_u),
    ("Cay_Prn_a", cay_prn_a),
    ("Cay_Prn_b", cay_prn_b),
    ("Cay_Prn_d", cay_prn_d),
    ("Cay_Prn_e", cay_prn_e),
    ("Cay_inv", cay_inv),
    ("Cay_Prn1", cay_prn1),
    ("ess_Cay", ess_cay),
    ("cor_self_adjoint_unitary", cor_self_adjoint_unitary),
    ("cor1", cor1),
    ("remark", remark),
    ("Pro_lft", pro_lft),
    ("basis_invariance", basis_invariance),
    ("chi_embedding", chi_embedding),
];

pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|(id, _)| *id).collect()
}

fn sub_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a over the id, keyed by the master seed.
    id.bytes().fold(0xcbf2_9ce4_8422_2325 ^ seed, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

fn run_one(id: &str, suite: Suite, cfg: &VerifyConfig) -> (PropositionResult, BTreeMap<String, Observation>) {
    let mut ctx = Ctx { rng: ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, id)), cfg, observations: BTreeMap::new() };
    let result = match suite(&mut ctx) {
        Ok(t) => t.finish(),
        Err(e) => PropositionResult {
            trials: 0,
            max_residual: f64::INFINITY,
            tol: 0.0,
            violations: 1,
            pass: false,
            detail: Some(format!("{}: {e}", e.name())),
        },
    };
    (result, ctx.observations)
}

/// Runs a single suite by id.
pub fn run_suite(id: &str, cfg: &VerifyConfig) -> Result<PropositionResult> {
    let (_, suite) = SUITES
        .iter()
        .find(|(s, _)| *s == id)
        .ok_or_else(|| QError::InvalidArgument(format!("unknown proposition id {id}")))?;
    Ok(run_one(id, *suite, cfg).0)
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.trials == 0 {
        return Err(QError::InvalidArgument("trials must be at least 1".into()));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(QError::InvalidArgument("tol must be positive".into()));
    }
    let results: Vec<_> = SUITES.par_iter().map(|(id, suite)| (*id, run_one(id, *suite, cfg))).collect();
    let mut propositions = BTreeMap::new();
    let mut observations = BTreeMap::new();
    for (id, (res, obs)) in results {
        propositions.insert(id.to_string(), res);
        observations.extend(obs);
    }
    Ok(VerifyReport {
        seed: cfg.seed,
        trials: cfg.trials,
        tol: cfg.tol,
        lambda: cfg.lambda.value(),
        all_pass: propositions.values().all(|r| r.pass),
        propositions,
        observations,
    })
}

// ---- helpers -------------------------------------------------------------

/// `(A - q I) phi` with `q I` the left multiplication of `basis`.
fn shift_apply(op: &Operator, q: Quaternion, basis: &HilbertBasis, phi: &QVector) -> Result<QVector> {
    op.apply(phi)?.sub(&left_mul(q, phi, basis)?)
}

fn rel(err: f64, scale: f64) -> f64 {
    err / (1.0 + scale)
}

fn qdiff(a: Quaternion, b: Quaternion) -> f64 {
    (a - b).norm()
}

/// Unitary with a prescribed fixed vector: `V diag(1, u_2, ..) V^dagger`
/// with non-real unit `u_k`.
fn unitary_with_fixed_vector(rng: &mut ChaCha8Rng, n: usize) -> (QMatrix, QVector) {
    let v = random::unitary(rng, n);
    let mut diag = vec![Quaternion::ONE];
    for _ in 1..n {
        let t: f64 = rng.random_range(0.3..3.0);
        let u = random::imaginary_unit(rng);
        diag.push(Quaternion::real(t.cos()) + u.scale(t.sin()));
    }
    let u = v.mul(&QMatrix::from_diagonal(&diag)).unwrap().mul(&v.adjoint()).unwrap();
    (u, v.column(0))
}

/// Partial isometry in class Y relative to `basis` with `ran(I - U)` of
/// full rank on its domain: a symmetric orthogonal involution restricted
/// to a real subspace, carried into `basis`.
fn class_yz_partial(rng: &mut ChaCha8Rng, basis: &HilbertBasis) -> Option<Operator> {
    let n = basis.dim();
    if n < 2 {
        return None;
    }
    let bm = basis.matrix();
    for _ in 0..20 {
        let o = random::real_orthogonal(rng, n);
        let r = o.mul(&random::remark_matrix(rng, n)).unwrap().mul(&o.transpose()).unwrap();
        let d = rng.random_range(1..=n / 2);
        let dom = random::real_orthogonal(rng, n).column_range(0, d);
        let op: Operator = PartialOperator::new(bm.mul(&dom).unwrap(), bm.mul(&r).unwrap().mul(&dom).unwrap())
            .ok()?
            .with_dense_stand_in(true)
            .into();
        if i_minus_u_rank(&op).ok()? == d {
            return Some(op);
        }
    }
    None
}

fn twisted_basis(rng: &mut ChaCha8Rng, basis: &HilbertBasis) -> HilbertBasis {
    let mut cols = basis.columns().to_vec();
    let k = rng.random_range(0..cols.len());
    let t: f64 = rng.random_range(0.3..2.8);
    let u = Quaternion::real(t.cos()) + random::imaginary_unit(rng).scale(t.sin());
    cols[k] = cols[k].right_mul(u);
    HilbertBasis::new(cols).expect("unit right multiple keeps orthonormality")
}

fn compatible_basis(rng: &mut ChaCha8Rng, basis: &HilbertBasis) -> HilbertBasis {
    let o = random::real_orthogonal(rng, basis.dim());
    HilbertBasis::from_unitary(&basis.matrix().mul(&o).unwrap()).expect("orthonormal")
}

fn sphere_contains(spheres: &[SpectralSphere], s: SpectralSphere, tol: f64) -> bool {
    spheres.iter().any(|t| t.distance(&s) <= tol)
}

// ---- quaternions and the Hilbert space -----------------------------------

fn quat_algebra(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-12);
    let units = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    // table[a][b] = (sign, index) of units[a] * units[b]
    let table: [[(f64, usize); 4]; 4] = [
        [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
        [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
        [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
        [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
    ];
    for a in 0..4 {
        for b in 0..4 {
            let (s, k) = table[a][b];
            t.expect("unit table", units[a] * units[b] == units[k].scale(s));
        }
    }
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (a, b, c) = (ctx.q(), ctx.q(), ctx.q());
        let scale = a.norm() * b.norm() * c.norm();
        t.residual("associativity", qdiff((a * b) * c, a * (b * c)) / scale);
        t.residual("distributivity", qdiff(a * (b + c), a * b + a * c) / (a.norm() * (b.norm() + c.norm())));
        t.residual("norm multiplicative", ((a * b).norm() - a.norm() * b.norm()).abs() / (a.norm() * b.norm()));
        t.residual("conj of product", qdiff((a * b).conj(), b.conj() * a.conj()) / (a.norm() * b.norm()));
        t.expect("conj involution", a.conj().conj() == a);
        let inv = a.inv()?;
        t.residual("right inverse", qdiff(a * inv, Quaternion::ONE));
        t.residual("left inverse", qdiff(inv * a, Quaternion::ONE));
        let u = random::imaginary_unit(&mut ctx.rng);
        t.residual("unit square", qdiff(u * u, Quaternion::real(-1.0)));
        t.expect("unit in S", u.in_sphere_s(1e-12));
    }
    Ok(t)
}

fn inner_axioms(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let (phi, psi, omega) = (ctx.vector(n), ctx.vector(n), ctx.vector(n));
        let q = ctx.q();
        let s = phi.norm() * psi.norm();
        t.residual("conjugate symmetry", qdiff(inner(&phi, &psi)?, inner(&psi, &phi)?.conj()));
        let pp = inner(&phi, &phi)?;
        t.residual("positivity", pp.imag_norm() + (pp.re() - phi.norm_sqr()).abs());
        t.expect("definiteness", pp.re() > 0.0 && inner(&QVector::zeros(n), &QVector::zeros(n))? == Quaternion::ZERO);
        t.residual(
            "additivity",
            rel(qdiff(inner(&phi, &psi.add(&omega)?)?, inner(&phi, &psi)? + inner(&phi, &omega)?), s),
        );
        t.residual("right homogeneity", rel(qdiff(inner(&phi, &psi.right_mul(q))?, inner(&phi, &psi)? * q), s));
        t.residual("left conjugation", rel(qdiff(inner(&phi.right_mul(q), &psi)?, q.conj() * inner(&phi, &psi)?), s));
    }
    Ok(t)
}

fn p1(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = random::basis(&mut ctx.rng, n);
        let phi = ctx.vector(n);
        let c = expand(&phi, &b)?;
        let total: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        t.residual("Parseval", rel((total - phi.norm_sqr()).abs(), phi.norm_sqr()));
        let partial: f64 = c.iter().take(n / 2).map(|x| x.norm_sqr()).sum();
        t.expect("Bessel", partial <= phi.norm_sqr() * (1.0 + 1e-12));
    }
    Ok(t)
}

fn p2(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = random::basis(&mut ctx.rng, n);
        let phi = ctx.vector(n);
        let back = reconstruct(&expand(&phi, &b)?, &b)?;
        t.residual("reconstruction", back.max_abs_diff(&phi));
        let c: Vec<Quaternion> = (0..n).map(|_| ctx.q()).collect();
        let again = expand(&reconstruct(&c, &b)?, &b)?;
        t.residual("uniqueness", c.iter().zip(&again).map(|(x, y)| qdiff(*x, *y)).fold(0.0, f64::max));
    }
    Ok(t)
}

fn polar(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let (phi, psi) = (ctx.vector(n), ctx.vector(n));
        t.residual("polarization", qdiff(polarization(&phi, &psi)?, inner(&phi, &psi)?));
        t.residual("diagonal", qdiff(polarization(&phi, &phi)?, Quaternion::real(phi.norm_sqr())));
    }
    Ok(t)
}

fn right_linear(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let a = random::matrix(&mut ctx.rng, n, n);
        let (phi, psi, p, q) = (ctx.vector(n), ctx.vector(n), ctx.q(), ctx.q());
        let lhs = a.apply(&phi.right_mul(p).add(&psi.right_mul(q))?)?;
        let rhs = a.apply(&phi)?.right_mul(p).add(&a.apply(&psi)?.right_mul(q))?;
        t.residual("A(phi p + psi q)", lhs.max_abs_diff(&rhs));
    }
    Ok(t)
}

fn ad1(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let a = random::matrix(&mut ctx.rng, n, n);
        let (phi, psi) = (ctx.vector(n), ctx.vector(n));
        let lhs = inner(&psi, &a.apply(&phi)?)?;
        let rhs = inner(&a.adjoint().apply(&psi)?, &phi)?;
        t.residual("adjoint identity", qdiff(lhs, rhs));
    }
    Ok(t)
}

fn lpro(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let (q, phi) = (ctx.q(), ctx.vector(n));
        let mut direct = QVector::zeros(n);
        for col in b.columns() {
            let c = q * inner(col, &phi)?;
            direct = direct.add(&col.right_mul(c))?;
        }
        let lm = left_mul(q, &phi, &b)?;
        t.residual("sum formula", lm.max_abs_diff(&direct));
        t.residual("matrix form", left_mul_matrix(q, &b).apply(&phi)?.max_abs_diff(&lm));
        let std = left_mul(q, &phi, &HilbertBasis::standard(n))?;
        let componentwise = QVector::new(phi.components().iter().map(|x| q * *x).collect());
        t.residual("standard basis", std.max_abs_diff(&componentwise));
    }
    Ok(t)
}

fn lft_mul(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let (p, q) = (ctx.q(), ctx.q());
        let (phi, psi) = (ctx.vector(n), ctx.vector(n));
        let lm = |q: Quaternion, v: &QVector| left_mul(q, v, &b);
        t.residual("(a) additive", lm(q, &phi.add(&psi)?)?.max_abs_diff(&lm(q, &phi)?.add(&lm(q, &psi)?)?));
        t.residual("(a) right scalar", lm(q, &phi.right_mul(p))?.max_abs_diff(&lm(q, &phi)?.right_mul(p)));
        t.residual("(b) norm", (lm(q, &phi)?.norm() - q.norm() * phi.norm()).abs());
        t.residual("(c) composition", lm(q, &lm(p, &phi)?)?.max_abs_diff(&lm(q * p, &phi)?));
        t.residual("(d) adjoint", qdiff(inner(&lm(q.conj(), &phi)?, &psi)?, inner(&phi, &lm(q, &psi)?)?));
        let r = crate::random::normal(&mut ctx.rng);
        t.residual("(e) real scalars", lm(Quaternion::real(r), &phi)?.max_abs_diff(&phi.scale(r)));
        for col in b.columns() {
            t.residual("(f) basis vectors", lm(q, col)?.max_abs_diff(&col.right_mul(q)));
        }
        t.residual("sum of scalars", lm(p + q, &phi)?.max_abs_diff(&lm(p, &phi)?.add(&lm(q, &phi)?)?));
    }
    Ok(t)
}

fn lft_mul_op(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let a = random::matrix(&mut ctx.rng, n, n);
        let (q, phi) = (ctx.q(), ctx.vector(n));
        let qa = op_scalar_left(q, &a, &b)?;
        t.residual("(qA) phi = q (A phi)", qa.apply(&phi)?.max_abs_diff(&left_mul(q, &a.apply(&phi)?, &b)?));
        let std = op_scalar_left(q, &a, &HilbertBasis::standard(n))?;
        t.residual("standard entries", std.max_abs_diff(&a.left_scale_entries(q)));
        let r = crate::random::normal(&mut ctx.rng);
        t.residual("real scalar", op_scalar_left(Quaternion::real(r), &a, &b)?.max_abs_diff(&a.scale(r)));
    }
    Ok(t)
}

fn rgt_mul_op(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let a = random::matrix(&mut ctx.rng, n, n);
        let (q, phi) = (ctx.q(), ctx.vector(n));
        let aq = op_scalar_right(&a, q, &b)?;
        t.residual("(Aq) phi = A (q phi)", aq.apply(&phi)?.max_abs_diff(&a.apply(&left_mul(q, &phi, &b)?)?));
        let r = crate::random::normal(&mut ctx.rng);
        t.residual("real scalar", op_scalar_right(&a, Quaternion::real(r), &b)?.max_abs_diff(&a.scale(r)));
    }
    Ok(t)
}

fn sc_mul_aj_op(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let a = random::matrix(&mut ctx.rng, n, n);
        let q = ctx.q();
        let lhs = op_scalar_left(q, &a, &b)?.adjoint();
        t.residual("(qA)^dagger = A^dagger conj(q)", lhs.max_abs_diff(&op_scalar_right(&a.adjoint(), q.conj(), &b)?));
        let lhs = op_scalar_right(&a, q, &b)?.adjoint();
        t.residual("(Aq)^dagger = conj(q) A^dagger", lhs.max_abs_diff(&op_scalar_left(q.conj(), &a.adjoint(), &b)?));
    }
    Ok(t)
}

// ---- symmetry and classes ------------------------------------------------

fn n_s_sym(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let g = random::matrix(&mut ctx.rng, n, n);
        let h = g.add(&g.adjoint())?.scale(0.5);
        let symmetric_expected = ctx.rng.random_bool(0.5);
        let m = if symmetric_expected { h } else { g };
        let op: Operator = if n >= 2 && ctx.rng.random_bool(0.5) {
            let d = ctx.rng.random_range(1..n);
            let vs: Vec<QVector> = (0..d).map(|_| ctx.vector(n)).collect();
            PartialOperator::restrict(&m, &vs)?.into()
        } else {
            m.into()
        };
        let flag = is_symmetric(&op, ctx.cfg.tol);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let phi = ctx.domain_vector(&op);
            let a_phi = op.apply(&phi)?;
            worst = worst.max(inner(&a_phi, &phi)?.imag_norm() / (1.0 + a_phi.norm() * phi.norm()));
        }
        let form_real = worst <= 1e-10;
        if flag {
            t.residual("quadratic form of a symmetric operator", worst);
        }
        t.expect("symmetric iff quadratic form is real", flag == form_real);
    }
    Ok(t)
}

fn y_real_symmetric(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(ctx.cfg.tol);
    let std_n = |n| HilbertBasis::standard(n);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.rng.random_range(1..=8);
        let a = match ctx.rng.random_range(0..4) {
            0 => random::real_symmetric(&mut ctx.rng, n),
            1 => random::real_matrix(&mut ctx.rng, n, n),
            2 => {
                let g = random::matrix(&mut ctx.rng, n, n);
                g.add(&g.adjoint())?.scale(0.5)
            }
            _ => random::matrix(&mut ctx.rng, n, n),
        };
        let expected = a.max_imag() <= ctx.cfg.tol && a.hermitian_defect() <= ctx.cfg.tol;
        let flags = classify(&a.clone().into(), &std_n(n), ctx.cfg.tol)?;
        t.expect("class Y iff real symmetric", flags.in_y == expected);
    }
    Ok(t)
}

fn class_y_with_basis(ctx: &mut Ctx, lo: usize) -> (Operator, HilbertBasis) {
    let n = ctx.dim(lo);
    let b = ctx.basis(n);
    let op = ctx.class_y(&b);
    (op, b)
}

fn preqn_a(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (op, b) = class_y_with_basis(ctx, 1);
        t.expect("sample is in class Y", classify(&op, &b, ctx.cfg.tol)?.in_y);
        let q = random::non_real(&mut ctx.rng);
        let phi = ctx.domain_vector(&op);
        let lhs = shift_apply(&op, q, &b, &phi)?.norm_sqr();
        let rhs = shift_apply(&op, Quaternion::real(q.re()), &b, &phi)?.norm_sqr()
            + q.imag_norm().powi(2) * phi.norm_sqr();
        t.residual("norm identity", (lhs - rhs).abs());
        // q A = A q on the domain and (qA)^dagger = conj(q) A.
        let lq = left_mul_matrix(q, &b);
        let qa = lq.mul(&op.action())?;
        let aq = crate::cayley::apply_to_columns(&op, &lq.mul(&op.domain_frame())?)?;
        t.residual("qA = Aq", qa.max_abs_diff(&aq));
        if let Some(a) = op.as_dense() {
            let lhs = op_scalar_left(q, a, &b)?.adjoint();
            t.residual("(qA)^dagger = conj(q) A", lhs.max_abs_diff(&op_scalar_left(q.conj(), a, &b)?));
        }
    }
    Ok(t)
}

fn preqn_bc(ctx: &mut Ctx, conjugate: bool) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (op, b) = class_y_with_basis(ctx, 1);
        // Pure imaginary q makes both qA and conj(q)A anti-symmetric.
        let q = random::imaginary_unit(&mut ctx.rng).scale(ctx.rng.random_range(0.1..3.0));
        let hyp = if conjugate { q.conj() } else { q };
        let frame = op.domain_frame();
        let qa = left_mul_matrix(hyp, &b).mul(&op.action())?;
        let anti = qa.adjoint().mul(&frame)?.add(&frame.adjoint().mul(&qa)?)?.max_abs();
        t.residual("hypothesis: anti-symmetric scalar multiple", anti);
        let phi = ctx.domain_vector(&op);
        let shift = if conjugate { q } else { q.conj() };
        let lhs = shift_apply(&op, shift, &b, &phi)?.norm_sqr();
        let rhs = op.apply(&phi)?.norm_sqr() + q.norm_sqr() * phi.norm_sqr();
        t.residual("norm identity", (lhs - rhs).abs());
    }
    Ok(t)
}

fn preqn_b(ctx: &mut Ctx) -> Result<Tally> {
    preqn_bc(ctx, false)
}

fn preqn_c(ctx: &mut Ctx) -> Result<Tally> {
    preqn_bc(ctx, true)
}

fn csadj_gen(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (op, b) = class_y_with_basis(ctx, 1);
        let q = random::non_real(&mut ctx.rng);
        let sa = is_self_adjoint(&op, ctx.cfg.tol);
        let full = |q: Quaternion| -> Result<bool> { Ok(defect_number(&op, q, &b)?.d == 0) };
        let ranges_full = full(q)? && full(q.conj())?;
        t.expect("(a) iff (c)", sa == ranges_full);
        if let Some(a) = op.as_dense() {
            let adj: Operator = a.adjoint().into();
            let trivial_kernels = defect_number(&adj, q, &b)?.d == 0 && defect_number(&adj, q.conj(), &b)?.d == 0;
            t.expect("(a) iff (b)", sa == trivial_kernels);
        }
    }
    Ok(t)
}

// ---- regular points and defect numbers -----------------------------------

fn reg_pt(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let op = ctx.any_operator(n);
        let b = ctx.basis(n);
        let q = ctx.q();
        let cert = regular_point(&op, q, &b)?;
        for _ in 0..10 {
            let phi = ctx.domain_vector(&op);
            let lhs = shift_apply(&op, q, &b, &phi)?.norm();
            t.residual("lower bound", ((cert.c_q * phi.norm() - lhs).max(0.0)) / (1.0 + lhs));
        }
    }
    Ok(t)
}

fn ball_point(rng: &mut ChaCha8Rng, center: Quaternion, radius: f64) -> Quaternion {
    let dir = loop {
        let v = random::quaternion(rng);
        if v.norm() > 1e-6 {
            break v / v.norm();
        }
    };
    let s: f64 = rng.random_range(0.0..1.0f64).powf(0.25);
    center + dir.scale(radius * s)
}

fn pre_set_a(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let op = ctx.any_operator(n);
        let b = ctx.basis(n);
        let q0 = ctx.q();
        let c0 = regular_point(&op, q0, &b)?;
        if !c0.is_regular {
            continue;
        }
        for _ in 0..5 {
            let q = ball_point(&mut ctx.rng, q0, c0.c_q);
            let c = regular_point(&op, q, &b)?;
            t.residual("ball bound", (c0.c_q - (q - q0).norm() - c.c_q).max(0.0));
        }
    }
    Ok(t)
}

fn pre_set_c(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let op = ctx.any_operator(n);
        let b = ctx.basis(n);
        let q = ctx.q();
        if !regular_point(&op, q, &b)?.is_regular {
            continue;
        }
        // ran(A - q) is spanned by an orthonormal frame; its projector fixes the range.
        let m = op.shifted(q, &b)?;
        let (frame, _) = frame_and_coefficients(&m)?;
        let phi = ctx.domain_vector(&op);
        let y = shift_apply(&op, q, &b, &phi)?;
        let proj = frame.apply(&frame.adjoint().apply(&y)?)?;
        t.residual("range is closed under projection", rel(proj.max_abs_diff(&y), y.norm()));
    }
    Ok(t)
}

fn def_con(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    let balls = ctx.cfg.trials.clamp(1, 20);
    let points = ctx.cfg.trials.min(100);
    for _ in 0..balls {
        let n = ctx.dim(2);
        let op = ctx.any_operator(n);
        let b = ctx.basis(n);
        let (q0, c0) = loop {
            let q0 = ctx.q().scale(1.5);
            let c = regular_point(&op, q0, &b)?;
            if c.is_regular && c.c_q > 1e-3 {
                break (q0, c.c_q);
            }
        };
        let d0 = defect_number(&op, q0, &b)?.d;
        for _ in 0..points {
            t.trial();
            let q = ball_point(&mut ctx.rng, q0, 0.9 * c0);
            let r = defect_number(&op, q, &b)?;
            t.expect("points of the ball are regular", r.regular);
            t.expect("defect number constant on the ball", r.d == d0);
        }
    }
    Ok(t)
}

fn pr01(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (op, b) = class_y_with_basis(ctx, 1);
        let q = random::non_real(&mut ctx.rng);
        let zero = defect_number(&op, q, &b)?.d == 0 && defect_number(&op, q.conj(), &b)?.d == 0;
        t.expect("zero defects iff self-adjoint", zero == is_self_adjoint(&op, ctx.cfg.tol));
    }
    Ok(t)
}

fn pr01_rho(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let a = random::class_y_dense(&mut ctx.rng, &b);
        let op: Operator = a.clone().into();
        let q = if ctx.rng.random_bool(0.5) { ctx.q() } else { Quaternion::real(2.0 * random::normal(&mut ctx.rng)) };
        let dq = defect_number(&op, q, &b)?;
        let dc = defect_number(&op, q.conj(), &b)?;
        if dq.regular && dc.regular && dq.d == 0 && dc.d == 0 {
            t.expect("point lies in the S-resolvent set", in_s_resolvent(&a, q)?);
        }
    }
    Ok(t)
}

// ---- S-spectrum ----------------------------------------------------------

fn s_spectrum_suite(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    let mut mats: Vec<QMatrix> = ctx.cfg.corpus.iter().filter_map(|o| o.as_dense().cloned()).collect();
    for _ in 0..ctx.cfg.trials {
        let n = ctx.dim(1);
        mats.push(random::matrix(&mut ctx.rng, n, n));
    }
    mats.push(QMatrix::from_diagonal(&[Quaternion::I]));
    for a in mats {
        t.trial();
        let n = a.rows();
        let spheres = s_spectrum(&a, ctx.cfg.tol)?;
        for s in &spheres {
            let q = s.point(random::imaginary_unit(&mut ctx.rng));
            t.expect("points of a sphere make Q_q(A) singular", !in_s_resolvent(&a, q)?);
        }
        let scale = 1.0 + a.max_abs() * n as f64;
        for _ in 0..3 {
            let q = ctx.q().scale(scale);
            if spheres.iter().all(|s| s.distance_to(q) > 0.1 * scale) {
                t.expect("points off the spheres are resolvent points", in_s_resolvent(&a, q)?);
            }
        }
    }
    Ok(t)
}

fn real_eigenvalues(a: &QMatrix) -> Vec<f64> {
    let n = a.rows();
    let m = DMatrix::from_fn(n, n, |i, j| a[(i, j)].w);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn pr2(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let g = random::matrix(&mut ctx.rng, n, n);
        let h = g.add(&g.adjoint())?.scale(0.5);
        for s in s_spectrum(&h, ctx.cfg.tol)? {
            t.residual("self-adjoint spectrum is real", s.im_norm / (1.0 + h.max_abs()));
        }
        let a = random::real_symmetric(&mut ctx.rng, n);
        let spheres = s_spectrum(&a, ctx.cfg.tol)?;
        let ev = real_eigenvalues(&a);
        let mut uniq: Vec<f64> = Vec::new();
        for e in ev {
            if uniq.last().is_none_or(|l| (e - l).abs() > ctx.cfg.tol) {
                uniq.push(e);
            }
        }
        t.expect("sphere count matches real eigenvalues", uniq.len() == spheres.len());
        for (s, e) in spheres.iter().zip(&uniq) {
            t.residual("sphere matches eigenvalue", (s.re - e).abs().max(s.im_norm));
        }
    }
    Ok(t)
}

fn pr00_resol(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let a = random::class_y_dense(&mut ctx.rng, &b);
        let q = ctx.q();
        let m = a.sub(&left_mul_matrix(q, &b))?;
        let mc = a.sub(&left_mul_matrix(q.conj(), &b))?;
        let sym = m.mul(&mc)?.add(&mc.mul(&m)?)?.scale(0.5);
        t.residual("pseudo-resolvent factorization", pseudo_resolvent(&a, q)?.max_abs_diff(&sym));
    }
    Ok(t)
}

fn pr00_neq1(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let a = random::class_y_dense(&mut ctx.rng, &b);
        let op: Operator = a.clone().into();
        let q = ctx.q();
        let phi = ctx.vector(n);
        let lhs = pseudo_resolvent(&a, q)?.apply(&phi)?.norm() * phi.norm();
        let rhs = 0.5 * shift_apply(&op, q.conj(), &b, &phi)?.norm_sqr() + 0.5 * shift_apply(&op, q, &b, &phi)?.norm_sqr();
        t.residual("inequality", (rhs - lhs).max(0.0));
        // Regular points near the real spectrum lie in the S-resolvent set.
        let spheres = s_spectrum(&a, ctx.cfg.tol)?;
        let s = spheres[ctx.rng.random_range(0..spheres.len())];
        let delta: f64 = ctx.rng.random_range(0.05..0.5);
        let near = Quaternion::real(s.re + delta) + random::imaginary_unit(&mut ctx.rng).scale(ctx.rng.random_range(0.0..0.3));
        for q in [q, near] {
            if regular_point(&op, q, &b)?.is_regular {
                t.expect("regular points are S-resolvent points", in_s_resolvent(&a, q)?);
            }
        }
    }
    Ok(t)
}

fn gen_von_neq(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (op, b) = class_y_with_basis(ctx, 1);
        let q = random::non_real(&mut ctx.rng);
        let c = regular_point(&op, q, &b)?;
        t.residual("c_q >= |Im q|", (q.imag_norm() - c.c_q).max(0.0));
        t.expect("non-real points are regular", c.is_regular);
    }
    Ok(t)
}

fn def_minus(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (op, b) = class_y_with_basis(ctx, 1);
        let lam = random::lambda(&mut ctx.rng);
        let n_a = deficiency_index(&op, &lam, &b)?;
        t.expect("n(A) = d_lambda(A)", n_a == defect_number(&op, lam.value(), &b)?.d);
        t.expect("d_lambda = d_conj(lambda)", n_a == defect_number(&op, lam.conj(), &b)?.d);
        t.expect("n(A) = codimension of the domain", n_a == op.dim() - op.domain_dim());
    }
    Ok(t)
}

// ---- isometries ----------------------------------------------------------

fn iso_a(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let u = ctx.isometry(n);
        let (phi, psi) = (ctx.domain_vector(&u), ctx.domain_vector(&u));
        let lhs = inner(&u.apply(&phi)?, &u.apply(&psi)?)?;
        t.residual("inner product preserved", rel(qdiff(lhs, inner(&phi, &psi)?), phi.norm() * psi.norm()));
    }
    Ok(t)
}

fn iso_b(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let u = ctx.isometry(n);
        let inv: Operator = match &u {
            Operator::Dense(m) => qinv(m)?.into(),
            Operator::Partial(p) => p.inverse()?.into(),
        };
        t.residual("inverse is isometric", isometry_defect(&inv));
        let phi = ctx.domain_vector(&u);
        t.residual("inverse undoes U", inv.apply(&u.apply(&phi)?)?.max_abs_diff(&phi));
    }
    Ok(t)
}

fn random_mu(rng: &mut ChaCha8Rng, inside: bool) -> Quaternion {
    let r: f64 = if inside { rng.random_range(0.0..0.95) } else { rng.random_range(1.05..3.0) };
    let v = random::quaternion(rng);
    v.scale(r / v.norm())
}

fn iso_d(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let u = ctx.isometry(n);
        let b = ctx.basis(n);
        let inside = ctx.rng.random_bool(0.5);
        let mu = random_mu(&mut ctx.rng, inside);
        let c = regular_point(&u, mu, &b)?;
        t.residual("c_mu >= |1 - |mu||", ((1.0 - mu.norm()).abs() - c.c_q).max(0.0));
        t.expect("points off the unit sphere are regular", c.is_regular);
    }
    Ok(t)
}

fn def_int_ext(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let u = ctx.isometry(n);
        let b = ctx.basis(n);
        let d0 = defect_number(&u, Quaternion::ZERO, &b)?.d;
        let mu_in = random_mu(&mut ctx.rng, true);
        t.expect("interior defect is constant", defect_number(&u, mu_in, &b)?.d == d0);
        let mu_out = random_mu(&mut ctx.rng, false);
        let mu_out2 = random_mu(&mut ctx.rng, false);
        t.expect(
            "exterior defect is constant",
            defect_number(&u, mu_out, &b)?.d == defect_number(&u, mu_out2, &b)?.d,
        );
    }
    Ok(t)
}

fn d_i_e(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    let e = |k| QMatrix::from_real_fn(2, 1, move |i, _| if i == k { 1.0 } else { 0.0 });
    let shift: Operator = PartialOperator::new(e(0), e(1))?.into();
    t.trial();
    t.expect("e1 -> e2 has indices (1, 1)", iso_indices(&shift)? == (1, 1));
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let d = ctx.rng.random_range(1..=n);
        let u: Operator = random::partial_isometry(&mut ctx.rng, n, d).into();
        let b = ctx.basis(n);
        let (di, de) = iso_indices(&u)?;
        t.expect("d^i = dim ran(U)^perp", di == n - d);
        t.expect("d^e = dim D(U)^perp", de == n - d);
        let inside = defect_number(&u, random_mu(&mut ctx.rng, true), &b)?.d;
        let outside = defect_number(&u, random_mu(&mut ctx.rng, false), &b)?.d;
        t.expect("d^i agrees with an interior point", inside == di);
        t.expect("d^e agrees with an exterior point", outside == de);
    }
    Ok(t)
}

fn i_u(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let (u, fixed) = if ctx.rng.random_bool(0.5) {
            let (u, v) = unitary_with_fixed_vector(&mut ctx.rng, n);
            (u, Some(v))
        } else {
            (random::unitary(&mut ctx.rng, n), None)
        };
        let op: Operator = u.clone().into();
        let dense_range = i_minus_u_rank(&op)? == n;
        let one = SpectralSphere::new(1.0, 0.0);
        let has_fixed = sphere_contains(&s_spectrum(&u, ctx.cfg.tol)?, one, 1e-6);
        if dense_range {
            t.expect("dense ran(I - U) gives trivial kernel", !has_fixed);
        }
        if let Some(phi) = fixed {
            t.expect("a fixed vector makes ran(I - U) deficient", !dense_range);
            let psi = ctx.vector(n);
            let r = psi.sub(&u.apply(&psi)?)?;
            t.residual("ran(I - U) is orthogonal to ker(I - U)", rel(inner(&r, &phi)?.norm(), r.norm()));
        }
    }
    Ok(t)
}

// ---- the Cayley transform ------------------------------------------------

fn cayley_corpus(ctx: &mut Ctx, lo: usize) -> Vec<(Operator, HilbertBasis)> {
    let mut v = ctx.corpus_class_y();
    for _ in 0..ctx.cfg.trials {
        v.push(class_y_with_basis(ctx, lo));
    }
    v
}

fn cay_prn_a(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    let lam = ctx.cfg.lambda;
    for (op, b) in cayley_corpus(ctx, 1) {
        t.trial();
        let pair = cayley(&op, &lam, &b)?;
        let u = &pair.transform;
        t.residual("isometry", isometry_defect(u));
        t.expect("D(U) = ran(A - conj(lambda))", same_span(&u.domain_frame(), &op.shifted(lam.conj(), &b)?)?);
        t.expect("ran(U) = ran(A - lambda)", same_span(&u.action(), &op.shifted(lam.value(), &b)?)?);
        let phi = ctx.domain_vector(&op);
        let a = shift_apply(&op, lam.value(), &b, &phi)?.norm();
        let c = shift_apply(&op, lam.conj(), &b, &phi)?.norm();
        t.residual("|(A - lambda) phi| = |(A - conj(lambda)) phi|", rel((a - c).abs(), a));
    }
    Ok(t)
}

fn cay_prn_b(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-8);
    let lam = ctx.cfg.lambda;
    let diff = lam.value() - lam.conj();
    for (op, b) in cayley_corpus(ctx, 1) {
        t.trial();
        let pair = cayley(&op, &lam, &b)?;
        let u = &pair.transform;
        let i_minus_u = u.domain_frame().sub(&u.action())?;
        t.expect("ran(I - U) = D(A)", same_span(&i_minus_u, &op.domain_frame())?);
        let phi = ctx.domain_vector(&op);
        let psi = shift_apply(&op, lam.conj(), &b, &phi)?;
        let upsi = u.apply(&psi)?;
        let lhs = psi.sub(&upsi)?;
        t.residual("(I - U) psi = (lambda - conj(lambda)) phi", rel(lhs.max_abs_diff(&left_mul(diff, &phi, &b)?), phi.norm()));
        let lhs = left_mul(lam.value(), &psi, &b)?.sub(&left_mul(lam.conj(), &upsi, &b)?)?;
        let rhs = left_mul(diff, &op.apply(&phi)?, &b)?;
        t.residual("(lambda - conj(lambda) U) psi = (lambda - conj(lambda)) A phi", rel(lhs.max_abs_diff(&rhs), rhs.norm()));
        let back = inverse_cayley(u, &lam, &b)?;
        t.residual("A = (lambda - conj(lambda) U)(I - U)^-1", operator_distance(&back.operator, &op)?);
    }
    Ok(t)
}

/// Restriction of `op` to the span of the first `d1` columns of its domain frame.
fn sub_restriction(op: &Operator, d1: usize) -> Result<Operator> {
    let f = op.domain_frame().column_range(0, d1);
    let a = op.action().column_range(0, d1);
    Ok(PartialOperator::new(f, a)?.with_dense_stand_in(true).into())
}

/// Real-coordinate frame in `basis`, so the subspace is invariant under `L_i, L_j, L_k`.
fn invariant_frame(rng: &mut ChaCha8Rng, basis: &HilbertBasis, d: usize) -> QMatrix {
    let o = random::real_orthogonal(rng, basis.dim()).column_range(0, d);
    basis.matrix().mul(&o).unwrap()
}

fn cay_prn_d(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    let lam = ctx.cfg.lambda;
    let tol = ctx.cfg.tol;
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(2);
        let b = ctx.basis(n);
        let big: Operator = if ctx.rng.random_bool(0.5) {
            let m = random::class_y_dense(&mut ctx.rng, &b);
            let f = invariant_frame(&mut ctx.rng, &b, n);
            PartialOperator::new(f.clone(), m.mul(&f)?)?.with_dense_stand_in(true).into()
        } else {
            let d2 = ctx.rng.random_range(2..=n);
            random::class_y_partial(&mut ctx.rng, &b, d2).into()
        };
        let d1 = ctx.rng.random_range(1..big.domain_dim());
        let small = sub_restriction(&big, d1)?;
        let other = {
            let o: Operator = random::class_y_dense(&mut ctx.rng, &b).into();
            let f = small.domain_frame();
            let act = crate::cayley::apply_to_columns(&o, &f)?;
            Operator::Partial(PartialOperator::new(f, act)?.with_dense_stand_in(true))
        };
        let ub = cayley(&big, &lam, &b)?.transform;
        for a in [small, other] {
            let ua = cayley(&a, &lam, &b)?.transform;
            t.expect("A ⊆ B iff U_A ⊆ U_B", is_extension(&a, &big, tol)? == is_extension(&ua, &ub, tol)?);
        }
    }
    Ok(t)
}

fn cay_prn_e(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    for (op, b) in cayley_corpus(ctx, 1) {
        t.trial();
        let lam = random::lambda(&mut ctx.rng);
        let n_a = deficiency_index(&op, &lam, &b)?;
        let u = cayley(&op, &lam, &b)?.transform;
        let (di, de) = iso_indices(&u)?;
        t.expect("d^i(U_A) = d^e(U_A) = n(A)", di == n_a && de == n_a);
    }
    Ok(t)
}

fn cay_inv(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-8);
    let lam = ctx.cfg.lambda;
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let u = if ctx.rng.random_bool(0.5) {
            random::unitary(&mut ctx.rng, n).into()
        } else {
            let a = ctx.class_y(&b);
            cayley(&a, &lam, &b)?.transform
        };
        let a_u = inverse_cayley(&u, &lam, &b)?.operator;
        let psi = ctx.domain_vector(&u);
        let upsi = u.apply(&psi)?;
        let lhs = a_u.apply(&psi.sub(&upsi)?)?;
        let rhs = left_mul(lam.value(), &psi, &b)?.sub(&left_mul(lam.conj(), &upsi, &b)?)?;
        t.residual("A_U (I - U) psi = (lambda - conj(lambda) U) psi", rel(lhs.max_abs_diff(&rhs), rhs.norm()));
    }
    Ok(t)
}

fn cay_prn1(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-8);
    let lam = ctx.cfg.lambda;
    for _ in 0..ctx.cfg.trials {
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let u = match class_yz_partial(&mut ctx.rng, &b) {
            Some(u) if ctx.rng.random_bool(0.8) => u,
            _ => QMatrix::identity(n).scale(-1.0).into(),
        };
        t.trial();
        let flags = classify(&u, &b, ctx.cfg.tol)?;
        t.expect("sample is in Y ∩ Z", flags.in_y && flags.in_z);
        let inv = inverse_cayley(&u, &lam, &b)?;
        t.expect("hypotheses recognised", inv.symmetric_guaranteed);
        let a_u = inv.operator;
        t.expect("A_U is symmetric", is_symmetric(&a_u, ctx.cfg.tol));
        t.expect("A_U is in class Y", classify(&a_u, &b, ctx.cfg.tol)?.in_y);
        let psi = ctx.domain_vector(&u);
        let upsi = u.apply(&psi)?;
        let phi = psi.sub(&upsi)?;
        let form = inner(&a_u.apply(&phi)?, &phi)?;
        let lpsi = left_mul(lam.value(), &psi, &b)?;
        let expected = 2.0 * (inner(&lpsi, &psi)? - inner(&lpsi, &upsi)?).re();
        t.residual("<A_U phi|phi> = 2 Re[...]", rel(qdiff(form, Quaternion::real(expected)), expected.abs()));
        let back = cayley(&a_u, &lam, &b)?.transform;
        t.residual("U_{A_U} = U", operator_distance(&back, &u)?);
    }
    Ok(t)
}

fn ess_cay(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-8);
    let lam = ctx.cfg.lambda;
    let mut in_yz = 0;
    let mut samples = 0;
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let a1: Operator = random::remark_in_basis(&mut ctx.rng, &b).into();
        let a2: Operator = random::class_y_dense(&mut ctx.rng, &b).into();
        let u1 = cayley(&a1, &lam, &b)?.transform;
        let u2 = cayley(&a2, &lam, &b)?.transform;
        if operator_distance(&a1, &a2)? > 1e-3 {
            t.expect("injective", operator_distance(&u1, &u2)? > 1e-9);
        }
        t.residual("round trip", operator_distance(&inverse_cayley(&u1, &lam, &b)?.operator, &a1)?);
        let flags = classify(&u1, &b, ctx.cfg.tol)?;
        samples += 1;
        in_yz += usize::from(flags.in_y && flags.in_z);
        // A different lambda gives a different transform with the same inverse.
        let lam2 = random::lambda(&mut ctx.rng);
        let v1 = cayley(&a1, &lam2, &b)?.transform;
        t.expect("transform depends on lambda", operator_distance(&u1, &v1)? > 1e-12);
        t.residual("round trip with another lambda", operator_distance(&inverse_cayley(&v1, &lam2, &b)?.operator, &a1)?);
    }
    ctx.observe(
        "U_A_in_Y_cap_Z",
        samples,
        in_yz,
        "Cayley transforms of block-rotation matrices that are themselves in Y ∩ Z",
    );
    Ok(t)
}

fn cor_self_adjoint_unitary(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(0.5);
    let lam = ctx.cfg.lambda;
    for (op, b) in cayley_corpus(ctx, 1) {
        t.trial();
        let s = self_adjoint_iff_unitary(&op, &lam, &b)?;
        t.expect("self-adjoint iff unitary", s.is_self_adjoint == s.transform_is_unitary);
    }
    Ok(t)
}

fn cor1(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-8);
    let lam = ctx.cfg.lambda;
    t.trial();
    t.expect(
        "U = I is rejected",
        matches!(
            inverse_cayley(&QMatrix::identity(2).into(), &lam, &HilbertBasis::standard(2)),
            Err(QError::RangeNotDense { .. })
        ),
    );
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b = ctx.basis(n);
        let bm = b.matrix();
        let m = if ctx.rng.random_bool(0.3) {
            gen_remark(&[], &vec![-1; n], None)?
        } else {
            random::remark_matrix(&mut ctx.rng, n)
        };
        let u = bm.mul(&m)?.mul(&bm.adjoint())?;
        let one = SpectralSphere::new(1.0, 0.0);
        let trivial_kernel = !sphere_contains(&s_spectrum(&u, ctx.cfg.tol)?, one, 1e-6);
        let uop: Operator = u.into();
        let transform_of_self_adjoint = match inverse_cayley(&uop, &lam, &b) {
            Ok(inv) => {
                let back = cayley(&inv.operator, &lam, &b)?.transform;
                t.residual("U is recovered", operator_distance(&back, &uop)?);
                is_self_adjoint(&inv.operator, ctx.cfg.tol)
            }
            Err(QError::RangeNotDense { .. }) => false,
            Err(e) => return Err(e),
        };
        t.expect("Cayley transform of a self-adjoint operator iff ker(I - U) = 0", transform_of_self_adjoint == trivial_kernel);
    }
    Ok(t)
}

fn remark(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-12);
    let mut in_z = 0;
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(2);
        let p = random::remark_params(&mut ctx.rng, n);
        let m = gen_remark(&p.thetas, &p.signs, Some(&p.perm))?;
        t.residual("involution", m.mul(&m)?.max_abs_diff(&QMatrix::identity(n)));
        t.residual("symmetric", m.max_abs_diff(&m.transpose()));
        t.residual("real", m.max_imag());
        let op: Operator = m.clone().into();
        let flags = classify(&op, &HilbertBasis::standard(n), ctx.cfg.tol)?;
        t.expect("in class Y", flags.in_y);
        t.expect("isometric", is_isometric(&op, 1e-12));
        in_z += usize::from(flags.in_z);
        let spheres = s_spectrum(&m, ctx.cfg.tol)?;
        for s in &spheres {
            t.residual("spectrum in {-1, 1}", (s.re.abs() - 1.0).abs().max(s.im_norm));
        }
        if !p.thetas.is_empty() {
            t.expect("both signs occur", spheres.len() == 2);
        }
    }
    ctx.observe(
        "remark_in_Z",
        ctx.cfg.trials,
        in_z,
        "Block-rotation matrices with ran(I - U) of full rank; a rotation block always fixes a vector",
    );
    Ok(t)
}

// ---- two bases -----------------------------------------------------------

fn pro_lft(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let n = ctx.dim(1);
        let b1 = ctx.basis(n);
        let compatible = ctx.rng.random_bool(0.5);
        let b2 = if compatible {
            compatible_basis(&mut ctx.rng, &b1)
        } else {
            twisted_basis(&mut ctx.rng, &b1)
        };
        let q = ctx.q();
        let gap = [Quaternion::I, Quaternion::J, Quaternion::K, q]
            .iter()
            .map(|q| left_mul_matrix(*q, &b1).max_abs_diff(&left_mul_matrix(*q, &b2)))
            .fold(0.0, f64::max);
        let flag = basis_compatible(&b1, &b2, 1e-10)?;
        t.expect("generator agrees with the test", flag == compatible);
        if flag {
            t.residual("left multiplications agree", gap);
        }
        t.expect("L = L' iff cross inner products are real", flag == (gap <= 1e-10));
    }
    Ok(t)
}

fn basis_invariance(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    let lam = ctx.cfg.lambda;
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (op, b1) = class_y_with_basis(ctx, 1);
        let b2 = compatible_basis(&mut ctx.rng, &b1);
        let r = cayley_invariance(&op, &lam, &b1, &b2, 1e-10)?;
        t.expect("real change of basis is compatible", r.compatible);
        t.residual("U_A = V_A", r.deviation);
        let b3 = twisted_basis(&mut ctx.rng, &b1);
        let r = cayley_invariance(&op, &lam, &b1, &b3, 1e-10)?;
        t.expect("twisted basis is flagged", !r.compatible);
        t.expect("twisted basis changes the transform", r.deviation > t.tol);
    }
    Ok(t)
}

// ---- complex adjoint representation --------------------------------------

fn complex_rank(m: &QMatrix) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let thr = rank_threshold(m, smax, RANK_TOL);
    sv.iter().filter(|s| **s > thr).count()
}

fn chi_embedding(ctx: &mut Ctx) -> Result<Tally> {
    let mut t = Tally::new(1e-11);
    for _ in 0..ctx.cfg.trials {
        t.trial();
        let (r, k, c) = (ctx.rng.random_range(1..=12), ctx.rng.random_range(1..=12), ctx.rng.random_range(1..=12));
        let m = random::matrix(&mut ctx.rng, r, k);
        let n = random::matrix(&mut ctx.rng, k, c);
        let m2 = random::matrix(&mut ctx.rng, r, k);
        let prod = chi(&m.mul(&n)?).0 - chi(&m).0 * chi(&n).0;
        t.residual("chi(MN) = chi(M) chi(N)", prod.iter().map(|z| z.norm()).fold(0.0, f64::max));
        t.residual("chi(M + N) = chi(M) + chi(N)", (chi(&m.add(&m2)?).0 - (chi(&m).0 + chi(&m2).0)).iter().map(|z| z.norm()).fold(0.0, f64::max));
        t.residual("chi(M^dagger) = chi(M)^H", (chi(&m.adjoint()).0 - chi(&m).0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max));
        t.residual("round trip", chi_inv(&chi(&m).0)?.max_abs_diff(&m));
        // Low-rank products and unitary equivalence.
        let rank = ctx.rng.random_range(0..=r.min(c));
        let low = random::matrix(&mut ctx.rng, r, rank).mul(&random::matrix(&mut ctx.rng, rank, c))?;
        let cr = complex_rank(&low);
        t.expect("complex rank is even", cr.is_multiple_of(2));
        let rh = rank_h(&low, RANK_TOL)?;
        t.expect("rank of a product of rank-r factors", rh == rank);
        t.expect("rank_h(M) = rank_h(M^dagger)", rh == rank_h(&low.adjoint(), RANK_TOL)?);
        let (u, v) = (random::unitary(&mut ctx.rng, r), random::unitary(&mut ctx.rng, c));
        t.expect("rank is unitarily invariant", rh == rank_h(&u.mul(&low)?.mul(&v)?, RANK_TOL)?);
        let sq = random::matrix(&mut ctx.rng, r, r);
        t.expect("eigenvalues pair up", right_eigen_spheres_detailed(&sq, ctx.cfg.tol).all_pairs_within_tol);
    }
    Ok(t)
}
