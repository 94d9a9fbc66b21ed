use alloc::vec::Vec;

use super::ModelError;

fn check_grid(origin: f64, grid: &[f64]) -> Result<(), ModelError> {
    let mut prev = origin;
    for &t in grid {
        if !t.is_finite() || t <= prev {
            return Err(ModelError::InvalidGrid { origin });
        }
        prev = t;
    }
    Ok(())
}

/// Number of grid points at or below `t`. This is the node index of the
/// value in force at `t` (node 0 is the origin).
pub(crate) fn node_at(grid: &[f64], t: f64) -> usize {
    grid.partition_point(|&g| g <= t)
}

/// Number of grid points strictly below `t`: the node index of the left limit.
pub(crate) fn node_before(grid: &[f64], t: f64) -> usize {
    grid.partition_point(|&g| g < t)
}

/// Càdlàg step function on `[origin, ∞)` that can only change at grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction1D {
    origin: f64,
    grid: Vec<f64>,
    // nodes[0] is the value on [origin, grid[0]); nodes[k] is the value at grid[k-1].
    nodes: Vec<f64>,
}

impl StepFunction1D {
    pub fn new(origin: f64, base: f64, grid: Vec<f64>, values: Vec<f64>) -> Result<Self, ModelError> {
        check_grid(origin, &grid)?;
        if values.len() != grid.len() {
            return Err(ModelError::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        let mut nodes = Vec::with_capacity(values.len() + 1);
        nodes.push(base);
        nodes.extend(values);
        Ok(Self { origin, grid, nodes })
    }

    /// Node values including the origin value at index 0.
    pub fn from_nodes(origin: f64, grid: Vec<f64>, nodes: Vec<f64>) -> Result<Self, ModelError> {
        check_grid(origin, &grid)?;
        if nodes.len() != grid.len() + 1 {
            return Err(ModelError::LengthMismatch {
                expected: grid.len() + 1,
                actual: nodes.len(),
            });
        }
        Ok(Self { origin, grid, nodes })
    }

    pub fn constant(origin: f64, value: f64) -> Self {
        Self {
            origin,
            grid: Vec::new(),
            nodes: alloc::vec![value],
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn base(&self) -> f64 {
        self.nodes[0]
    }

    /// Values at the grid points.
    pub fn values(&self) -> &[f64] {
        &self.nodes[1..]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.nodes[node_at(&self.grid, t)]
    }

    pub fn left_limit(&self, t: f64) -> f64 {
        self.nodes[node_before(&self.grid, t)]
    }

    /// f(t) - f(t-); zero away from the grid.
    pub fn jump_at(&self, t: f64) -> f64 {
        self.eval(t) - self.left_limit(t)
    }

    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid
            .iter()
            .enumerate()
            .map(move |(k, &t)| (t, self.nodes[k + 1] - self.nodes[k]))
    }

    pub fn last(&self) -> f64 {
        *self.nodes.last().expect("nodes are never empty")
    }

    pub fn sup_norm(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.nodes.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.nodes.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Surface on `[origin, ∞)^2`, càdlàg in each coordinate, that can only
/// change across grid lines.
///
/// Node `(a, b)` holds the value on the half-open box starting at
/// `(t1[a], t2[b])`, where node index 0 stands for the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSurface2D {
    origin: f64,
    grid1: Vec<f64>,
    grid2: Vec<f64>,
    nodes: Vec<f64>,
}

impl StepSurface2D {
    pub fn new(origin: f64, grid1: Vec<f64>, grid2: Vec<f64>, nodes: Vec<f64>) -> Result<Self, ModelError> {
        check_grid(origin, &grid1)?;
        check_grid(origin, &grid2)?;
        let expected = (grid1.len() + 1) * (grid2.len() + 1);
        if nodes.len() != expected {
            return Err(ModelError::LengthMismatch {
                expected,
                actual: nodes.len(),
            });
        }
        Ok(Self {
            origin,
            grid1,
            grid2,
            nodes,
        })
    }

    /// Surface with node values produced by `f(a, b)`.
    pub fn from_fn(
        origin: f64,
        grid1: Vec<f64>,
        grid2: Vec<f64>,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ModelError> {
        let (n1, n2) = (grid1.len(), grid2.len());
        let mut nodes = Vec::with_capacity((n1 + 1) * (n2 + 1));
        for a in 0..=n1 {
            for b in 0..=n2 {
                nodes.push(f(a, b));
            }
        }
        Self::new(origin, grid1, grid2, nodes)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn grid1(&self) -> &[f64] {
        &self.grid1
    }

    pub fn grid2(&self) -> &[f64] {
        &self.grid2
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid1.len(), self.grid2.len())
    }

    /// Time of node `a` along the first axis.
    pub fn time1(&self, a: usize) -> f64 {
        if a == 0 {
            self.origin
        } else {
            self.grid1[a - 1]
        }
    }

    pub fn time2(&self, b: usize) -> f64 {
        if b == 0 {
            self.origin
        } else {
            self.grid2[b - 1]
        }
    }

    pub fn node(&self, a: usize, b: usize) -> f64 {
        self.nodes[a * (self.grid2.len() + 1) + b]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, t1: f64, t2: f64) -> f64 {
        self.node(node_at(&self.grid1, t1), node_at(&self.grid2, t2))
    }

    /// f(t1-, t2-).
    pub fn left_limit(&self, t1: f64, t2: f64) -> f64 {
        self.node(node_before(&self.grid1, t1), node_before(&self.grid2, t2))
    }

    /// Rectangle increment over nodes `(a0, a1] x (b0, b1]`.
    pub fn rect_increment(&self, a0: usize, a1: usize, b0: usize, b1: usize) -> f64 {
        self.node(a1, b1) - self.node(a1, b0) - self.node(a0, b1) + self.node(a0, b0)
    }

    /// Increment over cell `(a, b)`, i.e. nodes `(a-1, a] x (b-1, b]`, with `a, b >= 1`.
    pub fn cell_mass(&self, a: usize, b: usize) -> f64 {
        self.rect_increment(a - 1, a, b - 1, b)
    }

    /// Increment over the rectangle `(u1, t1] x (u2, t2]` at arbitrary times.
    pub fn increment(&self, u1: f64, t1: f64, u2: f64, t2: f64) -> f64 {
        self.eval(t1, t2) - self.eval(t1, u2) - self.eval(u1, t2) + self.eval(u1, u2)
    }

    pub fn sup_norm(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The section `t1 = origin` as a function of `t2`.
    pub fn lower_row(&self) -> StepFunction1D {
        let nodes = (0..=self.grid2.len()).map(|b| self.node(0, b)).collect();
        StepFunction1D {
            origin: self.origin,
            grid: self.grid2.clone(),
            nodes,
        }
    }

    /// The section `t2 = origin` as a function of `t1`.
    pub fn lower_column(&self) -> StepFunction1D {
        let nodes = (0..=self.grid1.len()).map(|a| self.node(a, 0)).collect();
        StepFunction1D {
            origin: self.origin,
            grid: self.grid1.clone(),
            nodes,
        }
    }
}
