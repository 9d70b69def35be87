//! Dense small-dimension tensors at a point.
//!
//! Storage is row-major with contravariant (upper) slots first, so a tensor
//! like T^i_{jk} lives at `data[(i*n + j)*n + k]`. Slots are numbered over
//! the concatenated index list: slot 0..up are contravariant, the rest
//! covariant.

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 4;
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dim: usize,
    up: usize,
    down: usize,
    data: Vec<f64>,
}

fn size(dim: usize, rank: usize) -> usize {
    dim.pow(rank as u32)
}

/// Call `f` for every multi-index of the given rank (odometer order).
pub fn for_each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    loop {
        f(&idx);
        let mut k = rank;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl Tensor {
    pub fn zeros(dim: usize, up: usize, down: usize) -> Tensor {
        assert!(up + down <= MAX_RANK, "tensor rank above {MAX_RANK}");
        assert!((1..=MAX_DIM).contains(&dim), "tensor dimension out of range");
        Tensor { dim, up, down, data: vec![0.0; size(dim, up + down)] }
    }

    /// The identity map delta^i_j as a (1,1) tensor.
    pub fn identity(dim: usize) -> Tensor {
        let mut t = Tensor::zeros(dim, 1, 1);
        for i in 0..dim {
            t.data[i * dim + i] = 1.0;
        }
        t
    }

    /// Build from a function of the multi-index.
    pub fn from_fn(dim: usize, up: usize, down: usize, mut f: impl FnMut(&[usize]) -> f64) -> Tensor {
        let mut t = Tensor::zeros(dim, up, down);
        let mut flat = 0usize;
        for_each_index(dim, up + down, |idx| {
            t.data[flat] = f(idx);
            flat += 1;
        });
        t
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    pub fn add_at(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.data[off] += v;
    }

    fn same_shape(&self, other: &Tensor) -> Result<()> {
        if self.dim != other.dim || self.up != other.up || self.down != other.down {
            return Err(Error::ShapeMismatch(format!(
                "({},{}) dim {} vs ({},{}) dim {}",
                self.up, self.down, self.dim, other.up, other.down, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Tensor {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn slot_is_up(&self, slot: usize) -> bool {
        slot < self.up
    }

    /// Einstein contraction of paired slots, one contravariant against one
    /// covariant. Remaining slots keep their relative order, with all of
    /// self's surviving slots before other's (within each variance class,
    /// since storage keeps upper indices first).
    pub fn contract(&self, other: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch("contracted tensors have different dimensions".into()));
        }
        let mut used_a = vec![false; self.rank()];
        let mut used_b = vec![false; other.rank()];
        for &(sa, sb) in pairs {
            if sa >= self.rank() || sb >= other.rank() {
                return Err(Error::ShapeMismatch("contraction slot out of range".into()));
            }
            if used_a[sa] || used_b[sb] {
                return Err(Error::ShapeMismatch("slot used in more than one pair".into()));
            }
            if self.slot_is_up(sa) == other.slot_is_up(sb) {
                return Err(Error::ShapeMismatch(
                    "contraction must pair a contravariant slot with a covariant one".into(),
                ));
            }
            used_a[sa] = true;
            used_b[sb] = true;
        }

        let a_free: Vec<usize> = (0..self.rank()).filter(|s| !used_a[*s]).collect();
        let b_free: Vec<usize> = (0..other.rank()).filter(|s| !used_b[*s]).collect();
        let out_up = a_free.iter().filter(|s| self.slot_is_up(**s)).count()
            + b_free.iter().filter(|s| other.slot_is_up(**s)).count();
        let out_down = a_free.len() + b_free.len() - out_up;
        if out_up + out_down > MAX_RANK {
            return Err(Error::ShapeMismatch("contraction result rank above maximum".into()));
        }

        // Output slot order: self's free ups, other's free ups, self's free
        // downs, other's free downs.
        let mut out_slots: Vec<(bool, usize)> = Vec::new(); // (is_self, slot)
        for &s in a_free.iter().filter(|s| self.slot_is_up(**s)) {
            out_slots.push((true, s));
        }
        for &s in b_free.iter().filter(|s| other.slot_is_up(**s)) {
            out_slots.push((false, s));
        }
        for &s in a_free.iter().filter(|s| !self.slot_is_up(**s)) {
            out_slots.push((true, s));
        }
        for &s in b_free.iter().filter(|s| !other.slot_is_up(**s)) {
            out_slots.push((false, s));
        }

        let n = self.dim;
        let mut out = Tensor::zeros(n, out_up, out_down);
        let mut ia = vec![0usize; self.rank()];
        let mut ib = vec![0usize; other.rank()];
        let mut flat = 0usize;
        for_each_index(n, out_slots.len(), |free_idx| {
            for (pos, &(is_a, slot)) in out_slots.iter().enumerate() {
                if is_a {
                    ia[slot] = free_idx[pos];
                } else {
                    ib[slot] = free_idx[pos];
                }
            }
            let mut acc = 0.0;
            for_each_index(n, pairs.len(), |summed| {
                for (p, &(sa, sb)) in pairs.iter().enumerate() {
                    ia[sa] = summed[p];
                    ib[sb] = summed[p];
                }
                acc += self.get(&ia) * other.get(&ib);
            });
            out.data[flat] = acc;
            flat += 1;
        });
        Ok(out)
    }

    /// out[..j..k..] = self[..j..k..] - self[..k..j..] over two slots of the
    /// same variance.
    pub fn antisymmetrize_pair(&self, s1: usize, s2: usize) -> Result<Tensor> {
        if s1 >= self.rank() || s2 >= self.rank() || s1 == s2 {
            return Err(Error::ShapeMismatch("bad antisymmetrization slots".into()));
        }
        if self.slot_is_up(s1) != self.slot_is_up(s2) {
            return Err(Error::ShapeMismatch("antisymmetrization slots must share variance".into()));
        }
        let mut out = Tensor::zeros(self.dim, self.up, self.down);
        let mut swapped = vec![0usize; self.rank()];
        let mut flat = 0usize;
        for_each_index(self.dim, self.rank(), |idx| {
            swapped.copy_from_slice(idx);
            swapped.swap(s1, s2);
            out.data[flat] = self.get(idx) - self.get(&swapped);
            flat += 1;
        });
        Ok(out)
    }

    /// Nested-array representation in index order, for JSON rendering.
    pub fn to_nested(&self) -> serde_json::Value {
        fn build(dim: usize, rank: usize, data: &[f64]) -> serde_json::Value {
            if rank == 0 {
                return serde_json::Value::from(data[0]);
            }
            let chunk = data.len() / dim;
            serde_json::Value::Array(
                (0..dim).map(|i| build(dim, rank - 1, &data[i * chunk..(i + 1) * chunk])).collect(),
            )
        }
        build(self.dim, self.rank(), &self.data)
    }
}

/// Transport every slot by matrices: upper slots through `up_m`, lower slots
/// through `low_m`:
///
/// `out^{a...}_{b...} = up_m[a][p] ... s^{p...}_{q...} ... low_m[q][b]`
///
/// With `up_m = Z(x)` and `low_m = W(x)` this is the push of a chart tensor
/// to the model space at the origin; with the connecting maps of two points
/// it is the groupoid transport used by the invariance checks.
pub fn transport(s: &Tensor, up_m: &dyn Fn(usize, usize) -> f64, low_m: &dyn Fn(usize, usize) -> f64) -> Tensor {
    let n = s.dim();
    let rank = s.rank();
    let up = s.up();
    let mut out = Tensor::zeros(n, up, s.down());
    let mut flat = 0usize;
    for_each_index(n, rank, |out_idx| {
        let mut acc = 0.0;
        for_each_index(n, rank, |in_idx| {
            let mut factor = 1.0;
            for slot in 0..rank {
                factor *= if slot < up {
                    up_m(out_idx[slot], in_idx[slot])
                } else {
                    low_m(in_idx[slot], out_idx[slot])
                };
                if factor == 0.0 {
                    break;
                }
            }
            if factor != 0.0 {
                acc += factor * s.get(in_idx);
            }
        });
        out.data[flat] = acc;
        flat += 1;
    });
    out
}

/// A matrix view over a row-major value buffer.
#[derive(Debug, Clone)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_tensor_up_down(&self) -> Tensor {
        Tensor::from_fn(self.n, 1, 1, |idx| self.get(idx[0], idx[1]))
    }
}
