use alloc::vec;
use alloc::vec::Vec;

use super::VolterraError;
use crate::matrix::Matrix;

fn valid_grid(origin: f64, grid: &[f64]) -> bool {
    let mut prev = origin;
    grid.iter().all(|&t| {
        let ok = t.is_finite() && t > prev;
        prev = t;
        ok
    })
}

/// Product grid `{origin} ∪ t1` x `{origin} ∪ t2`.
///
/// Nodes are addressed by `(a, b)` with `a` in `0..=n1`, node 0 being the
/// origin. Cell `(a, b)` with `a, b >= 1` is the half-open box
/// `(t1[a-1], t1[a]] x (t2[b-1], t2[b]]`, and an atomic measure on the grid
/// places its mass for that cell at the upper-right node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    origin: f64,
    t1: Vec<f64>,
    t2: Vec<f64>,
}

impl Grid2D {
    pub fn new(origin: f64, t1: Vec<f64>, t2: Vec<f64>) -> Result<Self, VolterraError> {
        if !origin.is_finite() || !valid_grid(origin, &t1) || !valid_grid(origin, &t2) {
            return Err(VolterraError::InvalidGrid);
        }
        Ok(Self { origin, t1, t2 })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn t1(&self) -> &[f64] {
        &self.t1
    }

    pub fn t2(&self) -> &[f64] {
        &self.t2
    }

    pub fn n1(&self) -> usize {
        self.t1.len()
    }

    pub fn n2(&self) -> usize {
        self.t2.len()
    }

    pub fn node_count(&self) -> usize {
        (self.n1() + 1) * (self.n2() + 1)
    }

    pub fn time1(&self, a: usize) -> f64 {
        if a == 0 {
            self.origin
        } else {
            self.t1[a - 1]
        }
    }

    pub fn time2(&self, b: usize) -> f64 {
        if b == 0 {
            self.origin
        } else {
            self.t2[b - 1]
        }
    }

    /// Node index of an exact grid time on the first axis.
    pub fn index1(&self, t: f64) -> Option<usize> {
        exact_index(self.origin, &self.t1, t)
    }

    pub fn index2(&self, t: f64) -> Option<usize> {
        exact_index(self.origin, &self.t2, t)
    }

    pub(crate) fn node(&self, a: usize, b: usize) -> usize {
        a * (self.n2() + 1) + b
    }

    pub fn full(&self) -> CellRange {
        CellRange {
            a0: 0,
            a1: self.n1(),
            b0: 0,
            b1: self.n2(),
        }
    }
}

fn exact_index(origin: f64, grid: &[f64], t: f64) -> Option<usize> {
    if t == origin {
        return Some(0);
    }
    let k = grid.partition_point(|&g| g < t);
    (k < grid.len() && grid[k] == t).then_some(k + 1)
}

/// Rectangle `(lo1, hi1] x (lo2, hi2]` in time coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub lo1: f64,
    pub hi1: f64,
    pub lo2: f64,
    pub hi2: f64,
}

impl Rect {
    pub fn new(lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> Self {
        Self { lo1, hi1, lo2, hi2 }
    }

    /// Cells covered by the rectangle; every corner must be a grid node.
    pub fn resolve(&self, grid: &Grid2D) -> Result<CellRange, VolterraError> {
        let find = |idx: Option<usize>, time: f64| idx.ok_or(VolterraError::NotGridAligned { time });
        let a0 = find(grid.index1(self.lo1), self.lo1)?;
        let a1 = find(grid.index1(self.hi1), self.hi1)?;
        let b0 = find(grid.index2(self.lo2), self.lo2)?;
        let b1 = find(grid.index2(self.hi2), self.hi2)?;
        if a0 > a1 {
            return Err(VolterraError::InvertedRect {
                lo: self.lo1,
                hi: self.hi1,
            });
        }
        if b0 > b1 {
            return Err(VolterraError::InvertedRect {
                lo: self.lo2,
                hi: self.hi2,
            });
        }
        Ok(CellRange { a0, a1, b0, b1 })
    }
}

/// Cells `(a, b)` with `a0 < a <= a1` and `b0 < b <= b1`, in node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRange {
    pub a0: usize,
    pub a1: usize,
    pub b0: usize,
    pub b1: usize,
}

impl CellRange {
    pub fn is_empty(&self) -> bool {
        self.a1 <= self.a0 || self.b1 <= self.b0
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a > self.a0 && a <= self.a1 && b > self.b0 && b <= self.b1
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.a0 + 1..=self.a1).flat_map(move |a| (self.b0 + 1..=self.b1).map(move |b| (a, b)))
    }
}

/// Atomic measure on a product grid with `dim x dim` matrix masses per cell.
/// Cells without mass are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeasure2D {
    grid: Grid2D,
    dim: usize,
    cells: Vec<Option<Matrix>>,
}

impl MatrixMeasure2D {
    pub fn zero(grid: Grid2D, dim: usize) -> Self {
        let cells = vec![None; grid.n1() * grid.n2()];
        Self { grid, dim, cells }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn slot(&self, a: usize, b: usize) -> usize {
        assert!(
            a >= 1 && b >= 1 && a <= self.grid.n1() && b <= self.grid.n2(),
            "cell out of range"
        );
        (a - 1) * self.grid.n2() + (b - 1)
    }

    /// Mass of cell `(a, b)`, `a, b >= 1`.
    pub fn get(&self, a: usize, b: usize) -> Option<&Matrix> {
        self.cells[self.slot(a, b)].as_ref()
    }

    pub fn set(&mut self, a: usize, b: usize, mass: Matrix) -> Result<(), VolterraError> {
        if mass.rows() != self.dim || mass.cols() != self.dim {
            return Err(VolterraError::DimensionMismatch {
                expected: self.dim,
                actual: mass.rows().max(mass.cols()),
            });
        }
        let slot = self.slot(a, b);
        self.cells[slot] = if mass.is_zero() { None } else { Some(mass) };
        Ok(())
    }

    pub(crate) fn entry_mut(&mut self, a: usize, b: usize) -> &mut Matrix {
        let slot = self.slot(a, b);
        let dim = self.dim;
        self.cells[slot].get_or_insert_with(|| Matrix::zeros(dim, dim))
    }

    pub(crate) fn atoms_mut(&mut self) -> impl Iterator<Item = (usize, usize, &mut Matrix)> + '_ {
        let n2 = self.grid.n2();
        self.cells
            .iter_mut()
            .enumerate()
            .filter_map(move |(k, m)| m.as_mut().map(|m| (k / n2 + 1, k % n2 + 1, m)))
    }

    /// Cells carrying mass, in lexicographic order.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, usize, &Matrix)> + '_ {
        let n2 = self.grid.n2();
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(k, m)| m.as_ref().map(|m| (k / n2 + 1, k % n2 + 1, m)))
    }

    pub fn sub(&self, other: &MatrixMeasure2D) -> Result<MatrixMeasure2D, VolterraError> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(VolterraError::GridMismatch);
        }
        let mut out = self.clone();
        for (a, b, m) in other.atoms() {
            let slot = out.slot(a, b);
            let diff = match &out.cells[slot] {
                Some(x) => x.sub(m),
                None => m.scale(-1.0),
            };
            out.cells[slot] = Some(diff);
        }
        Ok(out)
    }

    /// Cumulative mass over `(origin, t1[a]] x (origin, t2[b]]` at every node.
    pub fn cumulative(&self) -> Vec<Matrix> {
        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        let zero = Matrix::zeros(self.dim, self.dim);
        let mut out = vec![zero; (n1 + 1) * (n2 + 1)];
        for a in 1..=n1 {
            for b in 1..=n2 {
                let mut m = out[self.grid.node(a - 1, b)].add(&out[self.grid.node(a, b - 1)]);
                m = m.sub(&out[self.grid.node(a - 1, b - 1)]);
                if let Some(x) = self.get(a, b) {
                    m.add_assign(x);
                }
                out[self.grid.node(a, b)] = m;
            }
        }
        out
    }
}

/// Vector-valued surface, one `dim`-vector per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSurface {
    grid: Grid2D,
    dim: usize,
    data: Vec<f64>,
}

impl VectorSurface {
    pub fn zero(grid: Grid2D, dim: usize) -> Self {
        let data = vec![0.0; grid.node_count() * dim];
        Self { grid, dim, data }
    }

    pub fn from_fn(grid: Grid2D, dim: usize, mut f: impl FnMut(usize, usize, &mut [f64])) -> Self {
        let mut out = Self::zero(grid, dim);
        for a in 0..=out.grid.n1() {
            for b in 0..=out.grid.n2() {
                f(a, b, out.at_mut(a, b));
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, a: usize, b: usize) -> &[f64] {
        let k = self.grid.node(a, b) * self.dim;
        &self.data[k..k + self.dim]
    }

    pub fn at_mut(&mut self, a: usize, b: usize) -> &mut [f64] {
        let k = self.grid.node(a, b) * self.dim;
        &mut self.data[k..k + self.dim]
    }

    pub fn max_abs_diff(&self, other: &VectorSurface) -> Result<f64, VolterraError> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(VolterraError::GridMismatch);
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    }
}

/// Matrix-valued surface, one matrix per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSurface {
    grid: Grid2D,
    nodes: Vec<Matrix>,
}

impl MatrixSurface {
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(usize, usize) -> Matrix) -> Self {
        let mut nodes = Vec::with_capacity(grid.node_count());
        for a in 0..=grid.n1() {
            for b in 0..=grid.n2() {
                nodes.push(f(a, b));
            }
        }
        Self { grid, nodes }
    }

    pub fn constant(grid: Grid2D, value: Matrix) -> Self {
        Self::from_fn(grid, |_, _| value.clone())
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn at(&self, a: usize, b: usize) -> &Matrix {
        &self.nodes[self.grid.node(a, b)]
    }
}

/// Purely atomic matrix-valued measure on the line.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure1D {
    origin: f64,
    dim: usize,
    times: Vec<f64>,
    atoms: Vec<Matrix>,
}

impl AtomicMeasure1D {
    pub fn new(origin: f64, dim: usize, times: Vec<f64>, atoms: Vec<Matrix>) -> Result<Self, VolterraError> {
        if !valid_grid(origin, &times) {
            return Err(VolterraError::UnsortedAtoms);
        }
        if atoms.len() != times.len() {
            return Err(VolterraError::DimensionMismatch {
                expected: times.len(),
                actual: atoms.len(),
            });
        }
        if let Some(bad) = atoms.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(VolterraError::DimensionMismatch {
                expected: dim,
                actual: bad.rows().max(bad.cols()),
            });
        }
        Ok(Self {
            origin,
            dim,
            times,
            atoms,
        })
    }

    pub fn zero(origin: f64, dim: usize) -> Self {
        Self {
            origin,
            dim,
            times: Vec::new(),
            atoms: Vec::new(),
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn atoms(&self) -> &[Matrix] {
        &self.atoms
    }

    /// Atom at time `t`, if `t` is an atom time.
    pub fn atom_at(&self, t: f64) -> Option<&Matrix> {
        let k = self.times.partition_point(|&x| x < t);
        (k < self.times.len() && self.times[k] == t).then(|| &self.atoms[k])
    }

    /// Cumulative mass over `(origin, t]`.
    pub fn cumulative(&self, t: f64) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (time, atom) in self.times.iter().zip(&self.atoms) {
            if *time > t {
                break;
            }
            out.add_assign(atom);
        }
        out
    }
}
