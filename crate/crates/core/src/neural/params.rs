//! Flat parameter storage with a named layout.
//!
//! Every architecture describes its parameters as a sequence of named
//! matrices/vectors over one flat `Vec<f64>`. The flat form keeps Adam,
//! finite-difference checks, checkpoints and exact parameter counting
//! trivial; compute kernels view segments as `ndarray` matrices without
//! copying.

use ndarray::{Array2, ArrayView1, ArrayView2, ArrayViewMut2};
use rand::Rng;

/// How a layout entry is initialized before training.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum InitKind {
    /// Uniform on `[-sqrt(6)/sqrt(fan_in+fan_out), +...]`.
    Glorot { fan_in: usize, fan_out: usize },
    /// Intercepts start at zero.
    Zero,
}

#[derive(Clone, Debug)]
pub struct ParamEntry {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
    pub init: InitKind,
}

impl ParamEntry {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParamLayout {
    entries: Vec<ParamEntry>,
    total: usize,
}

impl ParamLayout {
    pub fn new() -> Self {
        ParamLayout::default()
    }

    /// Registers a matrix entry; returns its handle for later views.
    pub fn push(&mut self, name: impl Into<String>, rows: usize, cols: usize, init: InitKind) -> usize {
        let entry = ParamEntry {
            name: name.into(),
            rows,
            cols,
            offset: self.total,
            init,
        };
        self.total += entry.len();
        self.entries.push(entry);
        self.entries.len() - 1
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn entries(&self) -> &[ParamEntry] {
        &self.entries
    }

    pub fn entry(&self, handle: usize) -> &ParamEntry {
        &self.entries[handle]
    }

    pub fn handle(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn view<'a>(&self, handle: usize, params: &'a [f64]) -> ArrayView2<'a, f64> {
        let e = &self.entries[handle];
        ArrayView2::from_shape((e.rows, e.cols), &params[e.offset..e.offset + e.len()])
            .expect("layout entry shape")
    }

    /// Vector view of an entry (biases are stored as `len x 1`).
    pub fn view1<'a>(&self, handle: usize, params: &'a [f64]) -> ArrayView1<'a, f64> {
        let e = &self.entries[handle];
        ArrayView1::from_shape(e.len(), &params[e.offset..e.offset + e.len()])
            .expect("layout entry shape")
    }

    pub fn view_mut<'a>(&self, handle: usize, params: &'a mut [f64]) -> ArrayViewMut2<'a, f64> {
        let e = &self.entries[handle];
        ArrayViewMut2::from_shape((e.rows, e.cols), &mut params[e.offset..e.offset + e.len()])
            .expect("layout entry shape")
    }

    pub fn slice_mut<'a>(&self, handle: usize, params: &'a mut [f64]) -> &'a mut [f64] {
        let e = &self.entries[handle];
        &mut params[e.offset..e.offset + e.len()]
    }

    /// Draws initial parameters: Glorot-uniform weights in entry order,
    /// zero intercepts. Entry order is fixed by construction, so a given
    /// seed always yields the same vector.
    pub fn init<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut params = vec![0.0; self.total];
        for e in &self.entries {
            match e.init {
                InitKind::Zero => {}
                InitKind::Glorot { fan_in, fan_out } => {
                    fill_glorot(
                        &mut params[e.offset..e.offset + e.len()],
                        fan_in,
                        fan_out,
                        rng,
                    );
                }
            }
        }
        params
    }
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0f64).sqrt() / ((fan_in + fan_out) as f64).sqrt()
}

pub fn fill_glorot<R: Rng>(slice: &mut [f64], fan_in: usize, fan_out: usize, rng: &mut R) {
    assert!(fan_in >= 1 && fan_out >= 1, "fan sizes must be positive");
    let bound = glorot_bound(fan_in, fan_out);
    for v in slice {
        *v = rng.random_range(-bound..=bound);
    }
}

/// Draws a `fan_out x fan_in` Glorot-initialized matrix.
pub fn glorot_init<R: Rng>(fan_in: usize, fan_out: usize, rng: &mut R) -> Array2<f64> {
    let mut m = Array2::zeros((fan_out, fan_in));
    let bound = glorot_bound(fan_in, fan_out);
    for v in m.iter_mut() {
        *v = rng.random_range(-bound..=bound);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bound_for_equal_fans_of_three_is_one() {
        assert!((glorot_bound(3, 3) - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = glorot_init(3, 3, &mut rng);
        for v in m.iter() {
            assert!(v.abs() <= 1.0);
        }
    }

    #[test]
    fn large_sample_fills_the_interval() {
        // 1e5 draws: empirical min/max within 1% of the bound.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bound = glorot_bound(40, 10);
        let mut slice = vec![0.0; 100_000];
        fill_glorot(&mut slice, 40, 10, &mut rng);
        let lo = slice.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = slice.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo >= -bound && hi <= bound);
        assert!((lo + bound).abs() < 0.01 * bound, "min {lo} vs -{bound}");
        assert!((hi - bound).abs() < 0.01 * bound, "max {hi} vs {bound}");
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = glorot_init(5, 4, &mut ChaCha8Rng::seed_from_u64(3));
        let b = glorot_init(5, 4, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn layout_offsets_and_init() {
        let mut layout = ParamLayout::new();
        let w = layout.push("w", 2, 3, InitKind::Glorot { fan_in: 3, fan_out: 2 });
        let b = layout.push("b", 2, 1, InitKind::Zero);
        assert_eq!(layout.total(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = layout.init(&mut rng);
        assert!(layout.view(w, &params).iter().all(|v| *v != 0.0));
        assert!(layout.view1(b, &params).iter().all(|v| *v == 0.0));
        assert_eq!(layout.handle("b"), Some(b));
    }
}
