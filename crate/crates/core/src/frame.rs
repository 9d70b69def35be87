//! From a framing (absolute parallelism) on a chart to its differential
//! invariants: the groupoid of 1-arrows, the connection and its torsion,
//! the linear curvature, structure constants, invariance defects, and the
//! development of paths into the pseudogroup the framing integrates to.

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::jet::{Jet2, JetMatrix, Scalar};
use crate::tensor::{for_each_index, transport, Matrix, Tensor};

/// A closed coordinate box.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    intervals: Vec<[f64; 2]>,
}

impl Domain {
    pub fn new(intervals: Vec<[f64; 2]>) -> Result<Domain> {
        for iv in &intervals {
            if !(iv[0] < iv[1]) {
                return Err(Error::InvalidInput(format!(
                    "domain interval [{}, {}] is empty or inverted",
                    iv[0], iv[1]
                )));
            }
        }
        Ok(Domain { intervals })
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, k: usize) -> [f64; 2] {
        self.intervals[k]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.intervals).all(|(v, iv)| *v >= iv[0] && *v <= iv[1])
    }

    /// Center of the box.
    pub fn center(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| 0.5 * (iv[0] + iv[1])).collect()
    }
}

/// Source form of a framing: expression strings for the matrix of frame
/// components, row = chart component, column = frame index.
#[derive(Debug, Clone, PartialEq)]
pub struct FramingSpec {
    pub dim: usize,
    pub domain: Vec<[f64; 2]>,
    pub w: Vec<Vec<String>>,
}

impl FramingSpec {
    pub fn compile(&self) -> Result<Framing> {
        Framing::new(self)
    }
}

/// A compiled framing: the chart dimension, domain box, and parsed entries
/// of the frame matrix. Immutable after construction; all operations are
/// pure functions of the evaluation point.
#[derive(Debug, Clone)]
pub struct Framing {
    dim: usize,
    domain: Domain,
    /// Row-major: exprs[i * dim + j] is the i-th chart component of the j-th
    /// frame field.
    exprs: Vec<Expr>,
}

/// A tensor whose entries are order-2 jets, used whenever an operation needs
/// entry derivatives. Entries built from demoted derivative jets carry a
/// zeroed Hessian; consumers of such tensors only read values and gradients.
#[derive(Debug, Clone)]
pub struct JetTensor {
    dim: usize,
    up: usize,
    down: usize,
    entries: Vec<Jet2>,
}

impl JetTensor {
    pub fn from_fn(dim: usize, up: usize, down: usize, mut f: impl FnMut(&[usize]) -> Jet2) -> JetTensor {
        let mut entries = Vec::with_capacity(dim.pow((up + down) as u32));
        for_each_index(dim, up + down, |idx| entries.push(f(idx)));
        JetTensor { dim, up, down, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn up(&self) -> usize {
        self.up
    }

    pub fn down(&self) -> usize {
        self.down
    }

    pub fn rank(&self) -> usize {
        self.up + self.down
    }

    fn offset(&self, idx: &[usize]) -> usize {
        let mut off = 0;
        for &i in idx {
            off = off * self.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &Jet2 {
        &self.entries[self.offset(idx)]
    }

    pub fn value(&self) -> Tensor {
        let mut flat = 0usize;
        let entries = &self.entries;
        Tensor::from_fn(self.dim, self.up, self.down, |_| {
            let v = entries[flat].value();
            flat += 1;
            v
        })
    }

    /// The tensor of r-th partial derivatives of the entries.
    pub fn partial(&self, r: usize) -> Tensor {
        let mut flat = 0usize;
        let entries = &self.entries;
        Tensor::from_fn(self.dim, self.up, self.down, |_| {
            let v = entries[flat].grad(r);
            flat += 1;
            v
        })
    }
}

/// Structure constants: the frame components of the torsion, constant on a
/// flat framing. Antisymmetric in the lower pair by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    tensor: Tensor,
}

impl StructureConstants {
    pub fn new(tensor: Tensor) -> Result<StructureConstants> {
        if tensor.up() != 1 || tensor.down() != 2 {
            return Err(Error::ShapeMismatch("structure constants must be a (1,2) tensor".into()));
        }
        Ok(StructureConstants { tensor })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.tensor.get(&[i, j, k])
    }
}

/// Max defect of the Jacobi identity over all index tuples:
/// sum_m (C^m_{jk} C^i_{ml} + C^m_{kl} C^i_{mj} + C^m_{lj} C^i_{mk}).
pub fn jacobi_defect(c: &StructureConstants) -> f64 {
    let n = c.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        acc += c.get(m, j, k) * c.get(i, m, l)
                            + c.get(m, k, l) * c.get(i, m, j)
                            + c.get(m, l, j) * c.get(i, m, k);
                    }
                    worst = worst.max(acc.abs());
                }
            }
        }
    }
    worst
}

/// Verdict of sampling-based flatness certification: the framing is treated
/// as flat when the linear curvature vanishes and the structure constants do
/// not move across the samples, both within `tol`.
#[derive(Debug, Clone)]
pub struct FlatnessCertificate {
    pub points: Vec<Vec<f64>>,
    pub max_curvature: f64,
    pub constants_spread: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Framing {
    pub fn new(spec: &FramingSpec) -> Result<Framing> {
        let n = spec.dim;
        if n == 0 {
            return Err(Error::InvalidInput("framing dimension must be at least 1".into()));
        }
        if n > crate::tensor::MAX_DIM {
            return Err(Error::InvalidFraming(format!(
                "dimension {n} exceeds the supported maximum {}",
                crate::tensor::MAX_DIM
            )));
        }
        if spec.domain.len() != n {
            return Err(Error::InvalidFraming(format!(
                "domain lists {} intervals for dimension {n}",
                spec.domain.len()
            )));
        }
        if spec.w.len() != n || spec.w.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidFraming(format!("w must be a {n}x{n} matrix of expressions")));
        }
        let domain = Domain::new(spec.domain.clone())?;
        let mut exprs = Vec::with_capacity(n * n);
        for row in &spec.w {
            for src in row {
                exprs.push(expr::parse(src, n)?);
            }
        }
        Ok(Framing { dim: n, domain, exprs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.exprs[i * self.dim + j]
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::DomainBoundary { point: x.to_vec() });
        }
        Ok(())
    }

    /// Evaluate the frame matrix and its inverse as jets, with first and
    /// second derivatives seeded on all chart coordinates.
    pub fn eval_frames(&self, x: &[f64]) -> Result<(JetMatrix, JetMatrix)> {
        self.check_point(x)?;
        let n = self.dim;
        let coords: Vec<Jet2> = x
            .iter()
            .enumerate()
            .map(|(k, v)| Jet2::coordinate(*v, k, n))
            .collect::<Result<_>>()?;
        let entries: Vec<Jet2> = self
            .exprs
            .iter()
            .map(|e| expr::evaluate(e, &coords))
            .collect::<Result<_>>()?;
        let w = JetMatrix::from_fn(n, |i, j| entries[i * n + j].clone());
        let z = w.inverse().map_err(|e| match e {
            Error::SingularMatrix => Error::SingularFraming { point: x.to_vec() },
            other => other,
        })?;
        Ok((w, z))
    }

    /// Value-only evaluation of W(x); cheap path for ODE stepping.
    pub fn w_values(&self, x: &[f64]) -> Result<Matrix> {
        self.check_point(x)?;
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for e in &self.exprs {
            data.push(expr::evaluate(e, x)?);
        }
        Ok(Matrix { n, data })
    }

    fn invert_values(&self, m: &Matrix, x: &[f64]) -> Result<Matrix> {
        let n = m.n;
        let jm = JetMatrix::from_fn(n, |i, j| Jet2::constant(m.get(i, j), 0));
        let inv = jm.inverse().map_err(|e| match e {
            Error::SingularMatrix => Error::SingularFraming { point: x.to_vec() },
            other => other,
        })?;
        Ok(Matrix { n, data: inv.values() })
    }

    /// Value-only Z(x) = W(x)^{-1}.
    pub fn z_values(&self, x: &[f64]) -> Result<Matrix> {
        let w = self.w_values(x)?;
        self.invert_values(&w, x)
    }

    /// The unique framing-compatible 1-arrow from x to y:
    /// `eps^i_j(x,y) = W(y)[i][a] Z(x)[a][j]`, as a (1,1) tensor.
    pub fn epsilon(&self, x: &[f64], y: &[f64]) -> Result<Tensor> {
        let wy = self.w_values(y)?;
        let zx = self.z_values(x)?;
        let n = self.dim;
        Ok(Tensor::from_fn(n, 1, 1, |idx| {
            (0..n).map(|a| wy.get(idx[0], a) * zx.get(a, idx[1])).sum()
        }))
    }

    /// Both component formulas of the connection:
    /// form 1: `Gamma^i_{jk} = sum_a Z[a][j] dW[i][a]/dx^k`
    /// form 2: `Gamma^i_{jk} = -sum_a (dZ[a][j]/dx^k) W[i][a]`
    pub fn gamma_forms(&self, x: &[f64]) -> Result<(Tensor, Tensor)> {
        let (w, z) = self.eval_frames(x)?;
        let n = self.dim;
        let f1 = Tensor::from_fn(n, 1, 2, |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            (0..n).map(|a| z.get(a, j).value() * w.get(i, a).grad(k)).sum()
        });
        let f2 = Tensor::from_fn(n, 1, 2, |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            -(0..n).map(|a| z.get(a, j).grad(k) * w.get(i, a).value()).sum::<f64>()
        });
        Ok((f1, f2))
    }

    /// The connection Gamma^i_{jk} (first form).
    pub fn gamma(&self, x: &[f64]) -> Result<Tensor> {
        Ok(self.gamma_forms(x)?.0)
    }

    /// Connection entries as jets carrying first derivatives (the Hessian of
    /// the result is not meaningful, see `Jet2::derivative_jet`).
    pub fn gamma_jet(&self, x: &[f64]) -> Result<JetTensor> {
        let (w, z) = self.eval_frames(x)?;
        let n = self.dim;
        Ok(JetTensor::from_fn(n, 1, 2, |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            let mut acc = Jet2::constant(0.0, n);
            for a in 0..n {
                acc = acc.add(&z.get(a, j).mul(&w.get(i, a).derivative_jet(k)));
            }
            acc
        }))
    }

    /// Torsion T^i_{jk} = Gamma^i_{jk} - Gamma^i_{kj}; exactly antisymmetric
    /// in the lower pair.
    pub fn torsion(&self, x: &[f64]) -> Result<Tensor> {
        self.gamma(x)?.antisymmetrize_pair(1, 2)
    }

    /// Torsion entries as jets (value and first derivatives).
    pub fn torsion_jet(&self, x: &[f64]) -> Result<JetTensor> {
        let g = self.gamma_jet(x)?;
        let n = self.dim;
        Ok(JetTensor::from_fn(n, 1, 2, |idx| {
            g.get(&[idx[0], idx[1], idx[2]]).sub(g.get(&[idx[0], idx[2], idx[1]]))
        }))
    }

    /// Covariant derivative of a jet tensor field, with the extra covariant
    /// slot appended last. The sign convention is fixed by requiring the
    /// frame fields and coframe rows to be parallel (tested directly):
    ///
    /// (D_r S)^{i..}_{j..} = d_r S^{i..}_{j..}
    ///                       - sum_a Gamma^i_{ar} S^{a..}_{j..}   (per upper slot)
    ///                       + sum_a Gamma^a_{jr} S^{i..}_{a..}   (per lower slot)
    pub fn covariant_derivative(&self, s: &JetTensor, x: &[f64]) -> Result<Tensor> {
        if s.rank() + 1 > crate::tensor::MAX_RANK {
            return Err(Error::ShapeMismatch("covariant derivative would exceed max rank".into()));
        }
        let gamma = self.gamma(x)?;
        let n = self.dim;
        let rank = s.rank();
        let mut out = Tensor::zeros(n, s.up(), s.down() + 1);
        let mut inner = vec![0usize; rank];
        for_each_index(n, rank + 1, |idx| {
            let (head, r) = (&idx[..rank], idx[rank]);
            let mut acc = s.get(head).grad(r);
            for slot in 0..rank {
                inner.copy_from_slice(head);
                let free = head[slot];
                let mut term = 0.0;
                for a in 0..n {
                    inner[slot] = a;
                    let sv = s.get(&inner).value();
                    if slot < s.up() {
                        term -= gamma.get(&[free, a, r]) * sv;
                    } else {
                        term += gamma.get(&[a, free, r]) * sv;
                    }
                }
                acc += term;
            }
            out.set(idx, acc);
        });
        Ok(out)
    }

    /// Linear curvature: the covariant derivative of the torsion, a (1,3)
    /// tensor. Vanishing identifies flat framings (local Lie groups).
    pub fn linear_curvature(&self, x: &[f64]) -> Result<Tensor> {
        let t = self.torsion_jet(x)?;
        self.covariant_derivative(&t, x)
    }

    /// Push a chart tensor at x to the model space: upper slots contract
    /// with Z(x), lower slots with W(x).
    pub fn push_to_origin(&self, s: &Tensor, x: &[f64]) -> Result<Tensor> {
        let w = self.w_values(x)?;
        let z = self.invert_values(&w, x)?;
        Ok(transport(s, &|i, j| z.get(i, j), &|i, j| w.get(i, j)))
    }

    /// Frame components of the torsion. On a flat framing these are
    /// independent of x and form the structure constants of a Lie algebra.
    pub fn structure_constants(&self, x: &[f64]) -> Result<StructureConstants> {
        let t = self.torsion(x)?;
        StructureConstants::new(self.push_to_origin(&t, x)?)
    }

    /// Frame components of the pairwise Lie brackets of the frame fields:
    /// a^(i)_(j)(k) = z^(i)_m [w_(j), w_(k)]^m. Satisfies a = -C, which the
    /// verification suite checks numerically instead of silently folding in.
    pub fn frame_bracket(&self, x: &[f64]) -> Result<Tensor> {
        let (w, z) = self.eval_frames(x)?;
        let n = self.dim;
        // bracket[m][j][k] = w^a_(j) d_a w^m_(k) - w^a_(k) d_a w^m_(j)
        let bracket = Tensor::from_fn(n, 1, 2, |idx| {
            let (m, j, k) = (idx[0], idx[1], idx[2]);
            (0..n)
                .map(|a| {
                    w.get(a, j).value() * w.get(m, k).grad(a)
                        - w.get(a, k).value() * w.get(m, j).grad(a)
                })
                .sum()
        });
        Ok(Tensor::from_fn(n, 1, 2, |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            (0..n).map(|m| z.get(i, m).value() * bracket.get(&[m, j, k])).sum()
        }))
    }

    /// Transport a tensor field's value at x to y through the 1-arrows and
    /// compare with its value at y; zero defect is invariance.
    pub fn invariance_defect<F>(&self, field: F, x: &[f64], y: &[f64]) -> Result<f64>
    where
        F: Fn(&Framing, &[f64]) -> Result<Tensor>,
    {
        let s_x = field(self, x)?;
        let s_y = field(self, y)?;
        let fwd = self.epsilon(x, y)?;
        let back = self.epsilon(y, x)?;
        let moved = transport(&s_x, &|i, j| fwd.get(&[i, j]), &|i, j| back.get(&[i, j]));
        Ok(moved.sub(&s_y)?.max_abs())
    }

    /// Sample-based flatness certificate: max |curvature| over the samples
    /// and the per-component spread of the structure constants.
    pub fn certify_flat(&self, points: &[Vec<f64>], tol: f64) -> Result<FlatnessCertificate> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("flatness certification needs at least 2 points".into()));
        }
        let n = self.dim;
        let mut max_curvature: f64 = 0.0;
        let len = n * n * n;
        let mut lo = vec![f64::INFINITY; len];
        let mut hi = vec![f64::NEG_INFINITY; len];
        for x in points {
            max_curvature = max_curvature.max(self.linear_curvature(x)?.max_abs());
            let c = self.structure_constants(x)?;
            for (slot, v) in c.tensor().data().iter().enumerate() {
                lo[slot] = lo[slot].min(*v);
                hi[slot] = hi[slot].max(*v);
            }
        }
        let constants_spread = lo
            .iter()
            .zip(&hi)
            .fold(0.0f64, |m, (l, h)| m.max(h - l));
        let pass = max_curvature <= tol && constants_spread <= tol;
        Ok(FlatnessCertificate {
            points: points.to_vec(),
            max_curvature,
            constants_spread,
            tol,
            pass,
        })
    }

    /// Integrate dy/dt = eps(x(t), y) dx/dt along the polyline
    /// `x0 -> path[0] -> ... -> path[last]` with classical 4th-order steps,
    /// starting from y(0) = y0. Returns the endpoint y; for a flat framing
    /// this is the value at the path end of the pseudogroup element f with
    /// f(x0) = y0.
    ///
    /// `steps` is the RK4 step count per segment; 0 selects the default of
    /// 512 steps per unit of segment length (at least 8).
    pub fn develop(&self, x0: &[f64], y0: &[f64], path: &[Vec<f64>], steps: usize) -> Result<Vec<f64>> {
        self.check_point(x0)?;
        self.check_point(y0)?;
        for p in path {
            self.check_point(p)?;
        }
        if path.is_empty() {
            return Ok(y0.to_vec());
        }

        // Spot-check flatness on the path vertices; integrability of the
        // governing equation needs vanishing curvature.
        let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(path.len() + 2);
        vertices.push(x0.to_vec());
        vertices.extend(path.iter().cloned());
        vertices.push(y0.to_vec());
        let cert = self.certify_flat(&vertices, 1e-8)?;
        if !cert.pass {
            return Err(Error::NotFlat(format!(
                "max curvature {:.3e}, constants spread {:.3e} on the path vertices",
                cert.max_curvature, cert.constants_spread
            )));
        }

        let n = self.dim;
        let mut y = y0.to_vec();
        let mut start = x0.to_vec();
        for end in path {
            let delta: Vec<f64> = end.iter().zip(&start).map(|(e, s)| e - s).collect();
            let length = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
            let m = if steps > 0 {
                steps
            } else {
                ((512.0 * length).ceil() as usize).max(8)
            };
            let h = 1.0 / m as f64;

            let velocity = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
                if !self.domain.contains(y) {
                    return Err(Error::DomainEscape { point: y.to_vec() });
                }
                let x_t: Vec<f64> = start.iter().zip(&delta).map(|(s, d)| s + t * d).collect();
                let zx = self.z_values(&x_t)?;
                let wy = self.w_values(y)?;
                let mut v = vec![0.0; n];
                for i in 0..n {
                    for j in 0..n {
                        let mut eps_ij = 0.0;
                        for a in 0..n {
                            eps_ij += wy.get(i, a) * zx.get(a, j);
                        }
                        v[i] += eps_ij * delta[j];
                    }
                }
                Ok(v)
            };

            for step in 0..m {
                let t = step as f64 * h;
                let k1 = velocity(t, &y)?;
                let y2: Vec<f64> = y.iter().zip(&k1).map(|(y, k)| y + 0.5 * h * k).collect();
                let k2 = velocity(t + 0.5 * h, &y2)?;
                let y3: Vec<f64> = y.iter().zip(&k2).map(|(y, k)| y + 0.5 * h * k).collect();
                let k3 = velocity(t + 0.5 * h, &y3)?;
                let y4: Vec<f64> = y.iter().zip(&k3).map(|(y, k)| y + h * k).collect();
                let k4 = velocity(t + h, &y4)?;
                for i in 0..n {
                    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
                if !self.domain.contains(&y) {
                    return Err(Error::DomainEscape { point: y.clone() });
                }
            }
            start = end.clone();
        }
        Ok(y)
    }

    /// The frame matrix column j as a jet vector field (1,0).
    pub fn frame_column_jet(&self, x: &[f64], j: usize) -> Result<JetTensor> {
        let (w, _) = self.eval_frames(x)?;
        Ok(JetTensor::from_fn(self.dim, 1, 0, |idx| w.get(idx[0], j).clone()))
    }

    /// The coframe row i as a jet covector field (0,1).
    pub fn coframe_row_jet(&self, x: &[f64], i: usize) -> Result<JetTensor> {
        let (_, z) = self.eval_frames(x)?;
        Ok(JetTensor::from_fn(self.dim, 0, 1, |idx| z.get(i, idx[0]).clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn framing(name: &str) -> Framing {
        catalog::get_example(name).unwrap().spec.compile().unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn abelian_frames_are_identity() {
        let f = framing("abelian2");
        let (w, z) = f.eval_frames(&[1.0, -3.0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(w.get(i, j).value(), expect);
                assert_eq!(z.get(i, j).value(), expect);
            }
        }
    }

    #[test]
    fn affine_frames_at_two() {
        let f = framing("affine2");
        let (w, z) = f.eval_frames(&[2.0, 5.0]).unwrap();
        for i in 0..2 {
            assert_eq!(w.get(i, i).value(), 2.0);
            assert_eq!(z.get(i, i).value(), 0.5);
        }
    }

    #[test]
    fn heisenberg_frames_hand_inverse() {
        let f = framing("heisenberg3");
        let (w, z) = f.eval_frames(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(w.get(2, 1).value(), 1.0);
        assert_eq!(z.get(2, 1).value(), -1.0);
        for i in 0..3 {
            assert_eq!(w.get(i, i).value(), 1.0);
            assert_eq!(z.get(i, i).value(), 1.0);
        }
    }

    #[test]
    fn frame_products_are_identity_to_roundoff() {
        for name in catalog::names() {
            let f = framing(name);
            let x = f.domain().center();
            let (w, z) = f.eval_frames(&x).unwrap();
            let wz = w.mul(&z);
            let zw = z.mul(&w);
            for i in 0..f.dim() {
                for j in 0..f.dim() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_close(wz.get(i, j).value(), expect, 1e-12);
                    assert_close(zw.get(i, j).value(), expect, 1e-12);
                }
            }
        }
    }

    #[test]
    fn epsilon_at_same_point_is_identity() {
        for name in catalog::names() {
            let f = framing(name);
            let x = f.domain().center();
            let eps = f.epsilon(&x, &x).unwrap();
            assert!(eps.sub(&Tensor::identity(f.dim())).unwrap().max_abs() <= 1e-13, "{name}");
        }
    }

    #[test]
    fn epsilon_affine_hand_value() {
        let f = framing("affine2");
        let eps = f.epsilon(&[2.0, 5.0], &[4.0, 0.0]).unwrap();
        let expect = Tensor::identity(2).scale(2.0);
        assert!(eps.sub(&expect).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn epsilon_cocycle() {
        let f = framing("affine2");
        let (x, y, z) = ([1.0, 0.0], [2.0, 3.0], [4.0, -1.0]);
        let xy = f.epsilon(&x, &y).unwrap();
        let yz = f.epsilon(&y, &z).unwrap();
        let xz = f.epsilon(&x, &z).unwrap();
        // eps(y,z) . eps(x,y): contract yz lower slot with xy upper slot.
        let composed = yz.contract(&xy, &[(1, 0)]).unwrap();
        assert!(composed.sub(&xz).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn gamma_hand_values() {
        let abelian = framing("abelian2");
        assert_eq!(abelian.gamma(&[0.3, -0.9]).unwrap().max_abs(), 0.0);

        let affine = framing("affine2");
        let g = affine.gamma(&[2.0, 5.0]).unwrap();
        assert_close(g.get(&[0, 0, 0]), 0.5, 1e-14);
        assert_close(g.get(&[1, 1, 0]), 0.5, 1e-14);
        let mut named = 0;
        for_each_index(2, 3, |idx| {
            if (idx[0] == 0 && idx[1] == 0 && idx[2] == 0) || (idx[0] == 1 && idx[1] == 1 && idx[2] == 0) {
                named += 1;
            } else {
                assert_eq!(g.get(idx), 0.0, "unexpected nonzero at {idx:?}");
            }
        });
        assert_eq!(named, 2);

        let heis = framing("heisenberg3");
        let g = heis.gamma(&[1.0, 2.0, 3.0]).unwrap();
        assert_close(g.get(&[2, 1, 0]), 1.0, 1e-14);
        for_each_index(3, 3, |idx| {
            if idx != [2, 1, 0] {
                assert_eq!(g.get(idx), 0.0);
            }
        });
    }

    #[test]
    fn gamma_two_forms_agree() {
        for name in catalog::names() {
            let f = framing(name);
            let x = f.domain().center();
            let (f1, f2) = f.gamma_forms(&x).unwrap();
            assert!(f1.sub(&f2).unwrap().max_abs() <= 1e-10, "{name}");
        }
    }

    #[test]
    fn torsion_hand_values() {
        let affine = framing("affine2");
        let t = affine.torsion(&[2.0, 5.0]).unwrap();
        assert_close(t.get(&[1, 1, 0]), 0.5, 1e-14);
        assert_close(t.get(&[1, 0, 1]), -0.5, 1e-14);
        assert_close(t.max_abs(), 0.5, 1e-14);

        let nonflat = framing("nonflat_demo");
        let t = nonflat.torsion(&[1.0, 0.0]).unwrap();
        assert_close(t.get(&[1, 1, 0]), 1.0, 1e-14);
    }

    #[test]
    fn frame_fields_are_parallel() {
        for name in catalog::names() {
            let f = framing(name);
            let x = f.domain().center();
            for j in 0..f.dim() {
                let col = f.frame_column_jet(&x, j).unwrap();
                let d = f.covariant_derivative(&col, &x).unwrap();
                assert!(d.max_abs() <= 1e-10, "frame column {j} of {name}: {}", d.max_abs());
                let row = f.coframe_row_jet(&x, j).unwrap();
                let d = f.covariant_derivative(&row, &x).unwrap();
                assert!(d.max_abs() <= 1e-10, "coframe row {j} of {name}: {}", d.max_abs());
            }
        }
    }

    #[test]
    fn linear_curvature_flat_and_nonflat() {
        assert_eq!(framing("abelian4").linear_curvature(&[0.5, 1.0, -2.0, 3.0]).unwrap().max_abs(), 0.0);
        let affine = framing("affine2");
        for x1 in [0.3, 1.0, 4.2] {
            assert!(affine.linear_curvature(&[x1, 0.7]).unwrap().max_abs() <= 1e-10);
        }
        let nonflat = framing("nonflat_demo");
        assert!(nonflat.linear_curvature(&[0.0, 0.0]).unwrap().max_abs() > 0.1);
    }

    #[test]
    fn structure_constants_hand_values() {
        let affine = framing("affine2");
        for x in [[0.5, -2.0], [2.0, 5.0], [7.0, 7.0]] {
            let c = affine.structure_constants(&x).unwrap();
            assert_close(c.get(1, 0, 1), -1.0, 1e-12);
            assert_close(c.get(1, 1, 0), 1.0, 1e-12);
            assert_close(c.get(0, 0, 1), 0.0, 1e-12);
        }

        let heis = framing("heisenberg3");
        let c = heis.structure_constants(&[1.0, 2.0, 3.0]).unwrap();
        assert_close(c.get(2, 0, 1), -1.0, 1e-12);
        assert_close(c.get(2, 1, 0), 1.0, 1e-12);
    }

    #[test]
    fn bracket_is_minus_constants() {
        for name in catalog::names() {
            let f = framing(name);
            let x = f.domain().center();
            let a = f.frame_bracket(&x).unwrap();
            let c = f.structure_constants(&x).unwrap();
            let sum = a.add(c.tensor()).unwrap();
            assert!(sum.max_abs() <= 1e-10, "{name}: {}", sum.max_abs());
        }
    }

    #[test]
    fn bracket_hand_values() {
        let affine = framing("affine2");
        let a = affine.frame_bracket(&[2.0, 5.0]).unwrap();
        assert_close(a.get(&[1, 0, 1]), 1.0, 1e-13);

        let heis = framing("heisenberg3");
        let a = heis.frame_bracket(&[1.0, 2.0, 3.0]).unwrap();
        assert_close(a.get(&[2, 0, 1]), 1.0, 1e-13);
    }

    #[test]
    fn jacobi_defect_vanishes_on_catalog_algebras() {
        for name in ["abelian2", "affine2", "heisenberg3", "heis3xR", "affine_product"] {
            let f = framing(name);
            let c = f.structure_constants(&f.domain().center()).unwrap();
            assert!(jacobi_defect(&c) <= 1e-10, "{name}");
        }
    }

    #[test]
    fn invariance_defect_zero_at_same_point() {
        let f = framing("affine2");
        let x = [2.0, 5.0];
        let d = f.invariance_defect(|f, x| f.torsion(x), &x, &x).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn torsion_invariance_on_flat_framing() {
        let f = framing("affine2");
        let d = f
            .invariance_defect(|f, x| f.torsion(x), &[1.7, -3.0], &[0.4, 8.0])
            .unwrap();
        assert!(d <= 1e-10, "{d}");
    }

    #[test]
    fn torsion_invariance_fails_without_flatness() {
        let f = framing("nonflat_demo");
        let d = f
            .invariance_defect(|f, x| f.torsion(x), &[0.0, 0.0], &[1.0, 0.0])
            .unwrap();
        assert!(d > 0.1, "{d}");
    }

    #[test]
    fn push_to_origin_agrees_with_structure_constants() {
        for name in catalog::names() {
            let f = framing(name);
            let x = f.domain().center();
            let t = f.torsion(&x).unwrap();
            let pushed = f.push_to_origin(&t, &x).unwrap();
            assert!(pushed.sub(f.structure_constants(&x).unwrap().tensor()).unwrap().max_abs() == 0.0);
        }
    }

    #[test]
    fn certify_flat_verdicts() {
        let abelian = framing("abelian2");
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 - 5.0, 0.5 * i as f64]).collect();
        let cert = abelian.certify_flat(&pts, 1e-9).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.max_curvature, 0.0);

        let nonflat = framing("nonflat_demo");
        let cert = nonflat
            .certify_flat(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1e-9)
            .unwrap();
        assert!(!cert.pass);
        assert!(cert.constants_spread >= 0.4, "{}", cert.constants_spread);
    }

    #[test]
    fn develop_identity_solution() {
        let f = framing("affine2");
        let x0 = vec![1.0, 0.0];
        let end = vec![2.0, 3.0];
        let y = f.develop(&x0, &x0, &[end.clone()], 0).unwrap();
        assert_close(y[0], end[0], 1e-9);
        assert_close(y[1], end[1], 1e-9);
    }

    #[test]
    fn develop_affine_scaling_solution() {
        let f = framing("affine2");
        let y = f.develop(&[1.0, 0.0], &[3.0, 0.0], &[vec![2.0, 0.0]], 0).unwrap();
        assert_close(y[0], 6.0, 1e-6);
        assert_close(y[1], 0.0, 1e-6);
    }

    #[test]
    fn develop_loop_closure_on_flat_framing() {
        let f = framing("affine2");
        let x0 = vec![2.0, 1.0];
        let loop_path = vec![
            vec![4.0, 1.0],
            vec![4.0, 3.0],
            vec![2.0, 3.0],
            vec![2.0, 1.0],
        ];
        let y0 = vec![1.0, -1.0];
        let y = f.develop(&x0, &y0, &loop_path, 0).unwrap();
        assert_close(y[0], y0[0], 1e-6);
        assert_close(y[1], y0[1], 1e-6);
    }

    #[test]
    fn develop_concatenation_composes() {
        let f = framing("heisenberg3");
        let x0 = vec![0.0, 0.0, 0.0];
        let mid = vec![1.0, 1.0, 0.5];
        let end = vec![-1.0, 2.0, 1.0];
        let y0 = vec![0.5, -0.5, 0.25];
        let all = f.develop(&x0, &y0, &[mid.clone(), end.clone()], 0).unwrap();
        let first = f.develop(&x0, &y0, &[mid.clone()], 0).unwrap();
        let second = f.develop(&mid, &first, &[end.clone()], 0).unwrap();
        for i in 0..3 {
            assert_close(all[i], second[i], 1e-6);
        }
    }

    #[test]
    fn develop_rejects_nonflat_framings() {
        let f = framing("nonflat_demo");
        let err = f
            .develop(&[0.0, 0.0], &[0.0, 0.0], &[vec![1.0, 0.0]], 0)
            .unwrap_err();
        assert!(matches!(err, Error::NotFlat(_)));
    }

    #[test]
    fn develop_rejects_out_of_domain_points() {
        let f = framing("affine2");
        let err = f.develop(&[1.0, 0.0], &[1.0, 0.0], &[vec![100.0, 0.0]], 0).unwrap_err();
        assert!(matches!(err, Error::DomainBoundary { .. }));
    }

    #[test]
    fn develop_detects_domain_escape() {
        // The scaling solution y1 = 9.5 x1 leaves the box before the path
        // ends at x1 = 2.
        let f = framing("affine2");
        let err = f
            .develop(&[1.0, 0.0], &[9.5, 0.0], &[vec![2.0, 0.0]], 0)
            .unwrap_err();
        assert!(matches!(err, Error::DomainEscape { .. }), "{err:?}");
    }

    #[test]
    fn singular_framing_is_reported() {
        let spec = FramingSpec {
            dim: 2,
            domain: vec![[-1.0, 1.0], [-1.0, 1.0]],
            w: vec![
                vec!["x1".into(), "0".into()],
                vec!["0".into(), "x1".into()],
            ],
        };
        let f = spec.compile().unwrap();
        assert!(matches!(
            f.eval_frames(&[0.0, 0.0]),
            Err(Error::SingularFraming { .. })
        ));
    }

    #[test]
    fn out_of_domain_point_is_rejected() {
        let f = framing("affine2");
        assert!(matches!(
            f.eval_frames(&[-5.0, 0.0]),
            Err(Error::DomainBoundary { .. })
        ));
    }

    #[test]
    fn shared_types_are_send_and_sync() {
        fn pin<T: Send + Sync>() {}
        pin::<Framing>();
        pin::<Tensor>();
        pin::<Jet2>();
        pin::<StructureConstants>();
        pin::<FlatnessCertificate>();
    }

    #[test]
    fn concurrent_point_sweeps_agree_with_serial_evaluation() {
        let f = framing("heis3xR");
        let points: Vec<Vec<f64>> =
            crate::sample::sample_points(f.domain(), 16, 5);
        let serial: Vec<Tensor> = points.iter().map(|x| f.torsion(x).unwrap()).collect();
        let parallel: Vec<Tensor> = std::thread::scope(|s| {
            let handles: Vec<_> = points
                .iter()
                .map(|x| s.spawn(|| f.torsion(x).unwrap()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(serial, parallel);
    }

    #[test]
    fn oversized_dimension_is_rejected() {
        let n = 17;
        let spec = FramingSpec {
            dim: n,
            domain: vec![[-1.0, 1.0]; n],
            w: (0..n)
                .map(|i| (0..n).map(|j| if i == j { "1".into() } else { "0".into() }).collect())
                .collect(),
        };
        assert!(matches!(spec.compile(), Err(Error::InvalidFraming(_))));
    }

    #[test]
    fn structure_constants_are_antisymmetric_to_roundoff() {
        for name in catalog::names() {
            let f = framing(name);
            let x = f.domain().center();
            let c = f.structure_constants(&x).unwrap();
            let sum = c.tensor().add(&c.tensor().antisymmetrize_pair(1, 2).unwrap().scale(-0.5));
            // C + (-(C - C_swapped)/2) = (C + C_swapped)/2: the symmetric part.
            let symmetric_part = sum.unwrap();
            assert!(symmetric_part.max_abs() <= 1e-12, "{name}");
        }
    }
}
