//! The verification engine: runs every identity in the chain over a seeded
//! point sample and assembles a deterministic report.
//!
//! Checks that only make sense on a flat framing (invariance, constants,
//! curvature constancy, development) are included exactly when the flatness
//! certificate passes; the certificate rows themselves always run, so a
//! non-flat framing fails through them.

use crate::canonical::{self, ConstantsMode, DomegaMode, Pairing};
use crate::error::Result;
use crate::expr;
use crate::fd;
use crate::frame::{jacobi_defect, Framing};
use crate::jet::Jet2;
use crate::report::{
    CheckRow, ConstantsSection, NestedTensor, ScalarConstants, TwoPathConstants,
    VerificationReport,
};
use crate::sample::{sample_pairs, sample_points};
use crate::tensor::Tensor;

/// Pinned tolerances. The generic 1e-9 baseline is configurable; the rest
/// are fixed by the accuracy class of the computation they gate.
pub mod tolerances {
    /// Frame matrix against its inverse, value parts: pure roundoff.
    pub const FRAME_PRODUCTS: f64 = 1e-12;
    /// Agreement of the two connection formulas: one jet product apart.
    pub const CONNECTION_FORMS: f64 = 1e-10;
    /// Parallelism of frame and coframe under the covariant derivative.
    pub const PARALLELISM: f64 = 1e-10;
    /// Push of a transported structure back to its model tensor.
    pub const PUSH_PULL: f64 = 1e-10;
    /// Jacobi identity of the structure constants.
    pub const JACOBI: f64 = 1e-10;
    /// Bracket constants against torsion constants (opposite signs).
    pub const BRACKET_SUM: f64 = 1e-10;
    /// Baseline for two-path identities, invariance, and constants spreads.
    pub const BASELINE: f64 = 1e-9;
    /// Scalar-curvature constancy and the constants route: second
    /// derivatives of the inverse frame are in play.
    pub const SCALAR: f64 = 1e-8;
    /// Development loop closure (RK4 truncation dominated).
    pub const DEVELOP: f64 = 1e-6;
    /// Relative agreement of jet gradients with central differences.
    pub const FD_GRAD: f64 = 1e-5;
    /// Relative agreement of jet Hessians with central differences.
    pub const FD_HESS: f64 = 1e-4;
}

/// Configuration of a verification or constants run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Label echoed into the report (e.g. `example:affine2`).
    pub source_label: String,
    pub points: usize,
    pub seed: u64,
    /// Baseline tolerance for the 1e-9 family of checks.
    pub tol: f64,
    pub fd_check: bool,
    /// When set, both model pairings are forced to this value; otherwise the
    /// defaults apply (complex interleaved, symplectic split).
    pub pairing: Option<Pairing>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            source_label: String::new(),
            points: 64,
            seed: 42,
            tol: tolerances::BASELINE,
            fd_check: false,
            pairing: None,
        }
    }
}

impl RunConfig {
    pub fn pairings(&self) -> (Pairing, Pairing) {
        match self.pairing {
            Some(p) => (p, p),
            None => (
                canonical::DEFAULT_COMPLEX_PAIRING,
                canonical::DEFAULT_SYMPLECTIC_PAIRING,
            ),
        }
    }
}

fn max_over<T>(items: &[T], mut f: impl FnMut(&T) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for item in items {
        worst = worst.max(f(item)?);
    }
    Ok(worst)
}

/// Per-component spread (max - min) of a tensor-valued map over the samples.
fn spread_over(points: &[Vec<f64>], mut f: impl FnMut(&[f64]) -> Result<Tensor>) -> Result<f64> {
    let first = f(&points[0])?;
    let mut lo = first.data().to_vec();
    let mut hi = first.data().to_vec();
    for x in &points[1..] {
        for (slot, v) in f(x)?.data().iter().enumerate() {
            lo[slot] = lo[slot].min(*v);
            hi[slot] = hi[slot].max(*v);
        }
    }
    Ok(lo.iter().zip(&hi).fold(0.0f64, |m, (l, h)| m.max(h - l)))
}

fn identity_defect(products: &crate::jet::JetMatrix) -> f64 {
    let n = products.size();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = products.get(i, j);
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((e.value() - expect).abs());
            for k in 0..e.dim() {
                worst = worst.max(e.grad(k).abs());
                for l in 0..e.dim() {
                    worst = worst.max(e.hess(k, l).abs());
                }
            }
        }
    }
    worst
}

/// Max relative defect of jet first and second derivatives against central
/// finite differences, over every framing entry expression and the given
/// sample points. Returns (gradient defect, Hessian defect).
pub fn jet_fd_defect(f: &Framing, points: &[Vec<f64>]) -> Result<(f64, f64)> {
    let n = f.dim();
    let mut grad_defect: f64 = 0.0;
    let mut hess_defect: f64 = 0.0;
    for x in points {
        let coords: Vec<Jet2> = x
            .iter()
            .enumerate()
            .map(|(k, v)| Jet2::coordinate(*v, k, n))
            .collect::<Result<_>>()?;
        for i in 0..n {
            for j in 0..n {
                let e = f.entry(i, j);
                let jet = expr::evaluate(e, &coords)?;
                let scalar_field = |pt: &[f64]| expr::evaluate(e, pt);
                for k in 0..n {
                    let hk = fd::default_step(x[k]);
                    let fd1 = fd::first(scalar_field, x, k, hk)?;
                    let rel = (jet.grad(k) - fd1).abs() / (1.0 + jet.grad(k).abs());
                    grad_defect = grad_defect.max(rel);
                    for l in k..n {
                        let hl = fd::default_step(x[l]);
                        let fd2 = fd::second(scalar_field, x, k, l, hk, hl)?;
                        let rel = (jet.hess(k, l) - fd2).abs() / (1.0 + jet.hess(k, l).abs());
                        hess_defect = hess_defect.max(rel);
                    }
                }
            }
        }
    }
    Ok((grad_defect, hess_defect))
}

/// A rectangular loop in the first two coordinates around the domain center.
fn rectangle_loop(f: &Framing) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    if f.dim() < 2 {
        return None;
    }
    let c = f.domain().center();
    let d0 = 0.15 * (f.domain().interval(0)[1] - f.domain().interval(0)[0]);
    let d1 = 0.15 * (f.domain().interval(1)[1] - f.domain().interval(1)[0]);
    let mut p1 = c.clone();
    p1[0] += d0;
    let mut p2 = p1.clone();
    p2[1] += d1;
    let mut p3 = c.clone();
    p3[1] += d1;
    Some((c.clone(), vec![p1, p2, p3, c]))
}

/// Run the full verification suite.
pub fn run_verify(f: &Framing, cfg: &RunConfig) -> Result<VerificationReport> {
    let points = sample_points(f.domain(), cfg.points, cfg.seed);
    let pairs = sample_pairs(&points);
    let (pairing_j, pairing_w) = cfg.pairings();
    let even = f.dim() % 2 == 0;
    let mut checks = Vec::new();

    // Frame matrix times inverse, both orders, full jet algebra.
    let products = max_over(&points, |x| {
        let (w, z) = f.eval_frames(x)?;
        Ok(identity_defect(&w.mul(&z)).max(identity_defect(&z.mul(&w))))
    })?;
    checks.push(CheckRow::new("frame_products", products, tolerances::FRAME_PRODUCTS));

    // The two component formulas of the connection.
    let forms = max_over(&points, |x| {
        let (f1, f2) = f.gamma_forms(x)?;
        Ok(f1.sub(&f2)?.max_abs())
    })?;
    checks.push(CheckRow::new("connection_two_forms", forms, tolerances::CONNECTION_FORMS));

    // Frame fields and coframe rows are parallel.
    let parallel = max_over(&points, |x| {
        let mut worst: f64 = 0.0;
        for j in 0..f.dim() {
            worst = worst.max(f.covariant_derivative(&f.frame_column_jet(x, j)?, x)?.max_abs());
            worst = worst.max(f.covariant_derivative(&f.coframe_row_jet(x, j)?, x)?.max_abs());
        }
        Ok(worst)
    })?;
    checks.push(CheckRow::new("frame_parallelism", parallel, tolerances::PARALLELISM));

    // Pushing each transported structure recovers its model tensor.
    let push_pull = max_over(&points, |x| {
        let mut worst = f
            .push_to_origin(&canonical::canonical_metric(f, x)?, x)?
            .sub(&canonical::ghat(f.dim()))?
            .max_abs();
        if even {
            let j = canonical::canonical_j(f, x, pairing_j)?;
            worst = worst.max(
                f.push_to_origin(&j, x)?
                    .sub(&canonical::jhat(f.dim(), pairing_j)?)?
                    .max_abs(),
            );
            let om = canonical::canonical_omega(f, x, pairing_w)?;
            worst = worst.max(
                f.push_to_origin(&om, x)?
                    .sub(&canonical::omega_hat(f.dim(), pairing_w)?)?
                    .max_abs(),
            );
        }
        Ok(worst)
    })?;
    checks.push(CheckRow::new("push_pull_inverses", push_pull, tolerances::PUSH_PULL));

    // Flatness certificate.
    let cert = f.certify_flat(&points, cfg.tol)?;
    checks.push(CheckRow::new("flatness_curvature", cert.max_curvature, cfg.tol));
    checks.push(CheckRow::new("flatness_constants_spread", cert.constants_spread, cfg.tol));
    let flat = cert.pass;

    if flat {
        let jac = max_over(&points, |x| Ok(jacobi_defect(&f.structure_constants(x)?)))?;
        checks.push(CheckRow::new("jacobi_identity", jac, tolerances::JACOBI));
    }

    // Bracket constants are the negatives of the torsion constants.
    let bracket = max_over(&points, |x| {
        let a = f.frame_bracket(x)?;
        let c = f.structure_constants(x)?;
        Ok(a.add(c.tensor())?.max_abs())
    })?;
    checks.push(CheckRow::new("bracket_constants_sum", bracket, tolerances::BRACKET_SUM));

    if flat {
        let inv_t = max_over(&pairs, |(x, y)| f.invariance_defect(|f, p| f.torsion(p), x, y))?;
        checks.push(CheckRow::new("invariance_torsion", inv_t, cfg.tol));
        if even {
            let inv_j = max_over(&pairs, |(x, y)| {
                f.invariance_defect(|f, p| canonical::canonical_j(f, p, pairing_j), x, y)
            })?;
            checks.push(CheckRow::new("invariance_complex", inv_j, cfg.tol));
            let inv_w = max_over(&pairs, |(x, y)| {
                f.invariance_defect(|f, p| canonical::canonical_omega(f, p, pairing_w), x, y)
            })?;
            checks.push(CheckRow::new("invariance_symplectic", inv_w, cfg.tol));
        }
        let inv_g = max_over(&pairs, |(x, y)| {
            f.invariance_defect(canonical::canonical_metric, x, y)
        })?;
        checks.push(CheckRow::new("invariance_metric", inv_g, cfg.tol));
    }

    if even {
        let two_path = max_over(&points, |x| {
            let direct = canonical::nijenhuis_direct(f, x, pairing_j)?;
            let torsion = canonical::nijenhuis_via_torsion(f, x, pairing_j)?;
            Ok(direct.sub(&torsion)?.max_abs())
        })?;
        checks.push(CheckRow::new("nijenhuis_two_path", two_path, cfg.tol));

        let trace = max_over(&points, |x| canonical::nijenhuis_trace_defect(f, x, pairing_j))?;
        checks.push(CheckRow::new("nijenhuis_trace", trace, cfg.tol));

        let ext = max_over(&points, |x| {
            let direct = canonical::domega(f, x, pairing_w, DomegaMode::Direct)?;
            let torsion = canonical::domega(f, x, pairing_w, DomegaMode::Torsion)?;
            Ok(direct.sub(&torsion)?.max_abs())
        })?;
        checks.push(CheckRow::new("exterior_two_path", ext, cfg.tol));
    }

    let mut constants = None;
    if flat {
        let p0 = &points[0];
        let c0 = f.structure_constants(p0)?;

        let mut nijenhuis = None;
        let mut domega_block = None;
        if even {
            let agreement = max_over(&points, |x| {
                let def = canonical::nijenhuis_constants(f, x, pairing_j, ConstantsMode::Definition)?;
                let formula = canonical::nijenhuis_constants(f, x, pairing_j, ConstantsMode::Formula)?;
                Ok(def.sub(&formula)?.max_abs())
            })?;
            checks.push(CheckRow::new("nijenhuis_constants_two_path", agreement, cfg.tol));
            let spread = spread_over(&points, |x| {
                canonical::nijenhuis_constants(f, x, pairing_j, ConstantsMode::Definition)
            })?;
            checks.push(CheckRow::new("nijenhuis_constants_spread", spread, cfg.tol));
            nijenhuis = Some(TwoPathConstants {
                definition: NestedTensor(canonical::nijenhuis_constants(
                    f,
                    p0,
                    pairing_j,
                    ConstantsMode::Definition,
                )?),
                formula: NestedTensor(canonical::nijenhuis_constants(
                    f,
                    p0,
                    pairing_j,
                    ConstantsMode::Formula,
                )?),
                agreement_defect: agreement,
                spread,
            });

            let agreement = max_over(&points, |x| {
                let def = canonical::domega_constants(f, x, pairing_w, ConstantsMode::Definition)?;
                let formula = canonical::domega_constants(f, x, pairing_w, ConstantsMode::Formula)?;
                Ok(def.sub(&formula)?.max_abs())
            })?;
            checks.push(CheckRow::new("domega_constants_two_path", agreement, cfg.tol));
            let spread = spread_over(&points, |x| {
                canonical::domega_constants(f, x, pairing_w, ConstantsMode::Definition)
            })?;
            checks.push(CheckRow::new("domega_constants_spread", spread, cfg.tol));
            domega_block = Some(TwoPathConstants {
                definition: NestedTensor(canonical::domega_constants(
                    f,
                    p0,
                    pairing_w,
                    ConstantsMode::Definition,
                )?),
                formula: NestedTensor(canonical::domega_constants(
                    f,
                    p0,
                    pairing_w,
                    ConstantsMode::Formula,
                )?),
                agreement_defect: agreement,
                spread,
            });
        }

        let scalar0 = canonical::metric_curvature(f, p0)?.scalar;
        let mut lo = scalar0;
        let mut hi = scalar0;
        for x in &points[1..] {
            let s = canonical::metric_curvature(f, x)?.scalar;
            lo = lo.min(s);
            hi = hi.max(s);
        }
        checks.push(CheckRow::new("scalar_curvature_spread", hi - lo, tolerances::SCALAR));

        let from_c = canonical::scalar_curvature_from_constants(&c0);
        let scalar_match = max_over(&points, |x| {
            Ok((canonical::metric_curvature(f, x)?.scalar - from_c).abs())
        })?;
        checks.push(CheckRow::new("scalar_from_constants", scalar_match, tolerances::SCALAR));

        constants = Some(ConstantsSection {
            c: NestedTensor(c0.tensor().clone()),
            c_spread: cert.constants_spread,
            nijenhuis,
            domega: domega_block,
            scalar_curvature: ScalarConstants {
                pointwise: scalar0,
                from_constants: from_c,
                spread: hi - lo,
            },
        });
    }

    if cfg.fd_check {
        let fd_points: Vec<Vec<f64>> = points.iter().take(50).cloned().collect();
        let (grad, hess) = jet_fd_defect(f, &fd_points)?;
        checks.push(CheckRow::new("fd_gradient", grad, tolerances::FD_GRAD));
        checks.push(CheckRow::new("fd_hessian", hess, tolerances::FD_HESS));
    }

    if flat {
        if let Some((start, path)) = rectangle_loop(f) {
            let end = f.develop(&start, &start, &path, 0)?;
            let defect = start
                .iter()
                .zip(&end)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            checks.push(CheckRow::new("develop_loop_closure", defect, tolerances::DEVELOP));
        }
    }

    Ok(VerificationReport {
        framing: cfg.source_label.clone(),
        seed: cfg.seed,
        points: cfg.points,
        checks,
        constants,
        flat,
    })
}

/// Run only the flatness certificate and, when it passes, extract the
/// constants; the constants block is the report's purpose here and check
/// failures are informational.
pub fn run_constants(f: &Framing, cfg: &RunConfig) -> Result<VerificationReport> {
    let points = sample_points(f.domain(), cfg.points, cfg.seed);
    let (pairing_j, pairing_w) = cfg.pairings();
    let even = f.dim() % 2 == 0;

    let cert = f.certify_flat(&points, cfg.tol)?;
    let mut checks = vec![
        CheckRow::new("flatness_curvature", cert.max_curvature, cfg.tol),
        CheckRow::new("flatness_constants_spread", cert.constants_spread, cfg.tol),
    ];

    let mut constants = None;
    if cert.pass {
        let p0 = &points[0];
        let c0 = f.structure_constants(p0)?;

        let mut nijenhuis = None;
        let mut domega_block = None;
        if even {
            let nj_def = canonical::nijenhuis_constants(f, p0, pairing_j, ConstantsMode::Definition)?;
            let nj_formula = canonical::nijenhuis_constants(f, p0, pairing_j, ConstantsMode::Formula)?;
            let nj_agreement = max_over(&points, |x| {
                let d = canonical::nijenhuis_constants(f, x, pairing_j, ConstantsMode::Definition)?;
                let fm = canonical::nijenhuis_constants(f, x, pairing_j, ConstantsMode::Formula)?;
                Ok(d.sub(&fm)?.max_abs())
            })?;
            let nj_spread = spread_over(&points, |x| {
                canonical::nijenhuis_constants(f, x, pairing_j, ConstantsMode::Definition)
            })?;
            nijenhuis = Some(TwoPathConstants {
                definition: NestedTensor(nj_def),
                formula: NestedTensor(nj_formula),
                agreement_defect: nj_agreement,
                spread: nj_spread,
            });

            let dw_def = canonical::domega_constants(f, p0, pairing_w, ConstantsMode::Definition)?;
            let dw_formula = canonical::domega_constants(f, p0, pairing_w, ConstantsMode::Formula)?;
            let dw_agreement = max_over(&points, |x| {
                let d = canonical::domega_constants(f, x, pairing_w, ConstantsMode::Definition)?;
                let fm = canonical::domega_constants(f, x, pairing_w, ConstantsMode::Formula)?;
                Ok(d.sub(&fm)?.max_abs())
            })?;
            let dw_spread = spread_over(&points, |x| {
                canonical::domega_constants(f, x, pairing_w, ConstantsMode::Definition)
            })?;
            domega_block = Some(TwoPathConstants {
                definition: NestedTensor(dw_def),
                formula: NestedTensor(dw_formula),
                agreement_defect: dw_agreement,
                spread: dw_spread,
            });
        }

        let scalar0 = canonical::metric_curvature(f, p0)?.scalar;
        let mut lo = scalar0;
        let mut hi = scalar0;
        for x in &points[1..] {
            let s = canonical::metric_curvature(f, x)?.scalar;
            lo = lo.min(s);
            hi = hi.max(s);
        }
        let from_c = canonical::scalar_curvature_from_constants(&c0);
        checks.push(CheckRow::new("scalar_curvature_spread", hi - lo, tolerances::SCALAR));

        constants = Some(ConstantsSection {
            c: NestedTensor(c0.tensor().clone()),
            c_spread: cert.constants_spread,
            nijenhuis,
            domega: domega_block,
            scalar_curvature: ScalarConstants {
                pointwise: scalar0,
                from_constants: from_c,
                spread: hi - lo,
            },
        });
    }

    Ok(VerificationReport {
        framing: cfg.source_label.clone(),
        seed: cfg.seed,
        points: cfg.points,
        checks,
        constants,
        flat: cert.pass,
    })
}
