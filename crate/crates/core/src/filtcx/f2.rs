//! Column reduction over F₂.
//!
//! Columns are dense bitsets when the matrix has at most [`DENSE_LIMIT`] rows
//! and sorted index lists otherwise.

/// Largest row count handled with dense bitset columns.
pub const DENSE_LIMIT: usize = 1 << 14;

pub trait Column: Clone + Send + Sync {
    fn from_sorted(rows: &[u32], dim: usize) -> Self;
    fn low(&self) -> Option<u32>;
    fn xor_assign(&mut self, other: &Self);
    fn ones(&self) -> Vec<u32>;
    fn is_empty(&self) -> bool {
        self.low().is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseColumn {
    words: Vec<u64>,
}

impl Column for DenseColumn {
    fn from_sorted(rows: &[u32], dim: usize) -> Self {
        let mut words = vec![0u64; dim.div_ceil(64)];
        for &r in rows {
            words[r as usize / 64] ^= 1 << (r % 64);
        }
        Self { words }
    }

    fn low(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| (k * 64 + 63 - w.leading_zeros() as usize) as u32)
    }

    fn xor_assign(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn ones(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (k, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let bit = w.trailing_zeros();
                out.push((k * 64) as u32 + bit);
                w &= w - 1;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseColumn {
    rows: Vec<u32>,
}

impl Column for SparseColumn {
    fn from_sorted(rows: &[u32], _dim: usize) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        Self { rows: rows.to_vec() }
    }

    fn low(&self) -> Option<u32> {
        self.rows.last().copied()
    }

    fn xor_assign(&mut self, other: &Self) {
        let (a, b) = (&self.rows, &other.rows);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.rows = out;
    }

    fn ones(&self) -> Vec<u32> {
        self.rows.clone()
    }
}

/// Result of reducing a square boundary matrix `D` to `R = D V`, with `R`
/// reduced (distinct lows) and `V` upper unitriangular.
#[derive(Clone, Debug)]
pub struct Reduction<C: Column> {
    dim: usize,
    reduced: Vec<C>,
    v: Option<Vec<C>>,
    pivot_col: Vec<Option<u32>>,
}

impl<C: Column> Reduction<C> {
    /// `columns[j]` lists the rows of column `j`, sorted. Rows must be
    /// smaller than `j` (upper triangular input).
    pub fn new(columns: &[Vec<u32>], track_v: bool) -> Self {
        let dim = columns.len();
        let mut reduced: Vec<C> = columns.iter().map(|c| C::from_sorted(c, dim)).collect();
        let mut v: Option<Vec<C>> = track_v.then(|| (0..dim).map(|j| C::from_sorted(&[j as u32], dim)).collect());
        let mut pivot_col: Vec<Option<u32>> = vec![None; dim];
        for j in 0..dim {
            while let Some(low) = reduced[j].low() {
                let Some(p) = pivot_col[low as usize] else {
                    pivot_col[low as usize] = Some(j as u32);
                    break;
                };
                let p = p as usize;
                let (head, tail) = reduced.split_at_mut(j);
                tail[0].xor_assign(&head[p]);
                if let Some(v) = v.as_mut() {
                    let (head, tail) = v.split_at_mut(j);
                    tail[0].xor_assign(&head[p]);
                }
            }
        }
        Self {
            dim,
            reduced,
            v,
            pivot_col,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivot_col.iter().filter(|p| p.is_some()).count()
    }

    pub fn betti(&self) -> usize {
        self.dim - 2 * self.rank()
    }

    /// True iff the chain `rows` is a boundary.
    pub fn is_boundary(&self, rows: &[u32]) -> bool {
        let mut c = C::from_sorted(rows, self.dim);
        while let Some(low) = c.low() {
            match self.pivot_col[low as usize] {
                Some(p) => c.xor_assign(&self.reduced[p as usize]),
                None => return false,
            }
        }
        true
    }

    /// Cycles spanning homology: `V_j` for every zero column `j` of `R` that
    /// is not the low of another column.
    pub fn homology_representatives(&self) -> Vec<Vec<u32>> {
        let v = self
            .v
            .as_ref()
            .expect("homology representatives need a reduction with V tracked");
        (0..self.dim)
            .filter(|&j| self.reduced[j].is_empty() && self.pivot_col[j].is_none())
            .map(|j| v[j].ones())
            .collect()
    }
}

/// Dense-or-sparse dispatch by matrix size.
#[derive(Clone, Debug)]
pub enum F2Reduction {
    Dense(Reduction<DenseColumn>),
    Sparse(Reduction<SparseColumn>),
}

impl F2Reduction {
    pub fn new(columns: &[Vec<u32>], track_v: bool) -> Self {
        if columns.len() <= DENSE_LIMIT {
            Self::Dense(Reduction::new(columns, track_v))
        } else {
            Self::Sparse(Reduction::new(columns, track_v))
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::Dense(r) => r.rank(),
            Self::Sparse(r) => r.rank(),
        }
    }

    pub fn betti(&self) -> usize {
        match self {
            Self::Dense(r) => r.betti(),
            Self::Sparse(r) => r.betti(),
        }
    }

    pub fn is_boundary(&self, rows: &[u32]) -> bool {
        match self {
            Self::Dense(r) => r.is_boundary(rows),
            Self::Sparse(r) => r.is_boundary(rows),
        }
    }

    pub fn homology_representatives(&self) -> Vec<Vec<u32>> {
        match self {
            Self::Dense(r) => r.homology_representatives(),
            Self::Sparse(r) => r.homology_representatives(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_both<C: Column + std::fmt::Debug>(a: &[u32], b: &[u32], dim: usize) -> Vec<u32> {
        let mut x = C::from_sorted(a, dim);
        x.xor_assign(&C::from_sorted(b, dim));
        x.ones()
    }

    #[test]
    fn dense_and_sparse_agree() {
        let a = [0, 3, 64, 65, 130];
        let b = [3, 64, 129, 200];
        let d = xor_both::<DenseColumn>(&a, &b, 256);
        let s = xor_both::<SparseColumn>(&a, &b, 256);
        assert_eq!(d, vec![0, 65, 129, 130, 200]);
        assert_eq!(d, s);
        assert_eq!(DenseColumn::from_sorted(&a, 256).low(), Some(130));
        assert_eq!(DenseColumn::from_sorted(&[], 256).low(), None);
    }

    /// Boundary of a filled triangle: vertices 0..3, edges 3..6, face 6.
    fn triangle() -> Vec<Vec<u32>> {
        vec![
            vec![],
            vec![],
            vec![],
            vec![0, 1],
            vec![1, 2],
            vec![0, 2],
            vec![3, 4, 5],
        ]
    }

    #[test]
    fn triangle_homology() {
        for red in [
            F2Reduction::Dense(Reduction::new(&triangle(), true)),
            F2Reduction::Sparse(Reduction::new(&triangle(), true)),
        ] {
            assert_eq!(red.rank(), 3);
            assert_eq!(red.betti(), 1);
            let reps = red.homology_representatives();
            assert_eq!(reps.len(), 1);
            assert!(!red.is_boundary(&reps[0]));
            assert!(red.is_boundary(&[0, 2]));
            assert!(red.is_boundary(&[3, 4, 5]));
        }
    }

    #[test]
    fn hollow_triangle_has_a_loop() {
        let mut cols = triangle();
        cols.pop();
        let red = F2Reduction::new(&cols, true);
        assert_eq!(red.betti(), 2);
        assert!(!red.is_boundary(&[3, 4, 5]));
    }
}
