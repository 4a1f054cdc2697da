//! Discretization of a chain: nodes, cells, quadrature, and grid fields.
//!
//! Cells are uniform within each segment with a step as close as possible to
//! the requested Δx while landing every segment breakpoint exactly on a node
//! (the step is `len/round(len/Δx)` per segment, so chains with
//! incommensurate segment lengths still get aligned breakpoints). Integrals
//! use the trapezoid rule with the chain weight sampled at nodes; the
//! Dirichlet energy uses cell-midpoint weights, which makes the discrete
//! functional an exact quadratic-plus-local form whose analytic gradient the
//! functional module returns.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, DomainChain};

/// One grid cell between consecutive nodes.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub len: f64,
    /// Chain weight at the cell midpoint.
    pub w_mid: f64,
}

/// Grid over a chain's global coordinate.
#[derive(Debug)]
pub struct Grid {
    chain_hash: u64,
    periodic: bool,
    pub left_bc: BoundaryCondition,
    pub right_bc: BoundaryCondition,
    nodes: Vec<f64>,
    node_weight: Vec<f64>,
    node_curvature: Vec<f64>,
    /// Trapezoid measure per node: half the lengths of the adjacent cells.
    node_measure: Vec<f64>,
    cells: Vec<Cell>,
    total_length: f64,
}

impl Grid {
    /// Discretize `chain` with target step `dx`.
    pub fn new(chain: &DomainChain, dx: f64) -> Result<Arc<Grid>> {
        if !(dx > 0.0) {
            return Err(Error::InvalidParameter(format!("grid step {dx} must be positive")));
        }
        if chain.total_length() <= dx {
            return Err(Error::InvalidParameter(format!(
                "degenerate domain: length {} not greater than step {dx}",
                chain.total_length()
            )));
        }
        let periodic = chain.is_periodic();
        let mut nodes = Vec::new();
        let mut cells = Vec::new();
        for (i, seg) in chain.segments().iter().enumerate() {
            let start = chain.segment_start(i);
            let n = ((seg.length() / dx).round() as usize).max(1);
            let step = seg.length() / n as f64;
            for k in 0..n {
                let a = start + step * k as f64;
                nodes.push(a);
                cells.push(Cell { len: step, w_mid: seg.weight(step * (k as f64 + 0.5)) });
            }
        }
        if !periodic {
            nodes.push(chain.total_length());
        }
        let n_nodes = nodes.len();
        let mut node_weight = Vec::with_capacity(n_nodes);
        let mut node_curvature = Vec::with_capacity(n_nodes);
        let mut node_measure = Vec::with_capacity(n_nodes);
        // junction nodes take the mean of the one-sided limits
        let starts: Vec<f64> =
            (0..chain.segments().len()).map(|i| chain.segment_start(i)).collect();
        let sample = |x: f64| -> (f64, f64) {
            let eps = 1e-9 * chain.total_length().max(1.0);
            let interior = x > eps && x < chain.total_length() - eps;
            let at_junction = interior
                && starts.iter().any(|&s| (s - x).abs() < eps);
            if at_junction || (periodic && x <= eps) {
                let lo = if x <= eps { chain.total_length() - eps } else { x - eps };
                let w = 0.5 * (chain.weight_at(lo) + chain.weight_at(x + eps));
                let r = 0.5 * (chain.curvature_at(lo) + chain.curvature_at(x + eps));
                (w, r)
            } else {
                (chain.weight_at(x), chain.curvature_at(x))
            }
        };
        for (idx, &x) in nodes.iter().enumerate() {
            let (w, r) = sample(x);
            node_weight.push(w);
            node_curvature.push(r);
            let left = if idx == 0 {
                if periodic {
                    cells.last().unwrap().len
                } else {
                    0.0
                }
            } else {
                cells[idx - 1].len
            };
            let right = if idx < cells.len() { cells[idx].len } else { 0.0 };
            node_measure.push(0.5 * (left + right));
        }
        Ok(Arc::new(Grid {
            chain_hash: chain.domain_hash(),
            periodic,
            left_bc: chain.left_bc,
            right_bc: chain.right_bc,
            nodes,
            node_weight,
            node_curvature,
            node_measure,
            cells,
            total_length: chain.total_length(),
        }))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn node_weight(&self) -> &[f64] {
        &self.node_weight
    }

    pub fn node_curvature(&self) -> &[f64] {
        &self.node_curvature
    }

    pub fn node_measure(&self) -> &[f64] {
        &self.node_measure
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn chain_hash(&self) -> u64 {
        self.chain_hash
    }

    pub fn matches(&self, chain: &DomainChain) -> bool {
        self.chain_hash == chain.domain_hash()
    }

    /// Index of the node closest to the global coordinate `x`.
    pub fn nearest_node(&self, x: f64) -> usize {
        match self.nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= self.nodes.len() {
                    self.nodes.len() - 1
                } else if (self.nodes[i] - x).abs() < (x - self.nodes[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        }
    }

    /// Node pairs of each cell: `(i, j)` with the cell running from node `i`
    /// to node `j` (wrapping for periodic grids).
    pub fn cell_nodes(&self, cell: usize) -> (usize, usize) {
        let j = cell + 1;
        if self.periodic && j == self.nodes.len() {
            (cell, 0)
        } else {
            (cell, j)
        }
    }
}

/// A grid-sampled candidate function together with its quadrature rule.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub grid: Arc<Grid>,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    /// Sample `f` at the nodes. Boundary conditions are not enforced; see
    /// [`DiscreteField::with_dirichlet_ends`].
    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeError(format!(
                "{} values on a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Copy with the values at Dirichlet ends set to zero.
    pub fn with_dirichlet_ends(mut self) -> Self {
        if !self.grid.is_periodic() {
            if self.grid.left_bc == BoundaryCondition::Dirichlet {
                self.values[0] = 0.0;
            }
            if self.grid.right_bc == BoundaryCondition::Dirichlet {
                *self.values.last_mut().unwrap() = 0.0;
            }
        }
        self
    }

    /// Weighted L² norm squared, `∫ v² w dx`, by the grid's trapezoid rule.
    pub fn weighted_norm_sq(&self) -> f64 {
        let w = self.grid.node_weight();
        let q = self.grid.node_measure();
        self.values
            .iter()
            .zip(w.iter().zip(q.iter()))
            .map(|(&v, (&w, &q))| v * v * w * q)
            .sum()
    }

    /// Weighted L² inner product with another field on the same grid.
    pub fn weighted_dot(&self, other: &DiscreteField) -> f64 {
        let w = self.grid.node_weight();
        let q = self.grid.node_measure();
        self.values
            .iter()
            .zip(other.values.iter())
            .zip(w.iter().zip(q.iter()))
            .map(|((&a, &b), (&w, &q))| a * b * w * q)
            .sum()
    }

    /// Rescale to unit weighted L² norm.
    pub fn normalized(&self) -> Result<DiscreteField> {
        let n2 = self.weighted_norm_sq();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::InvalidField(format!("norm² = {n2}, cannot normalize")));
        }
        let s = 1.0 / n2.sqrt();
        let values = self.values.iter().map(|&v| v * s).collect();
        Ok(DiscreteField { grid: Arc::clone(&self.grid), values })
    }

    /// Linear interpolation of the field at a global coordinate.
    pub fn value_at(&self, x: f64) -> f64 {
        let nodes = self.grid.nodes();
        let x = x.clamp(nodes[0], self.grid.total_length());
        match nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(i) => self.values[i],
            Err(i) => {
                if i == 0 {
                    self.values[0]
                } else if i >= nodes.len() {
                    // periodic wrap cell
                    let (a, b) = (nodes[nodes.len() - 1], self.grid.total_length());
                    let t = if b > a { (x - a) / (b - a) } else { 0.0 };
                    let v_end = if self.grid.is_periodic() {
                        self.values[0]
                    } else {
                        *self.values.last().unwrap()
                    };
                    self.values[nodes.len() - 1] * (1.0 - t) + v_end * t
                } else {
                    let t = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
                    self.values[i - 1] * (1.0 - t) + self.values[i] * t
                }
            }
        }
    }

    /// `∫ v² w dx` restricted to the coordinate window `[a, b]` (cellwise
    /// trapezoid with partial end cells).
    pub fn mass_on(&self, a: f64, b: f64) -> f64 {
        let nodes = self.grid.nodes();
        let mut total = 0.0;
        for (c, cell) in self.grid.cells().iter().enumerate() {
            let (i, j) = self.grid.cell_nodes(c);
            let x0 = nodes[i];
            let x1 = x0 + cell.len;
            let lo = a.max(x0);
            let hi = b.min(x1);
            if hi <= lo {
                continue;
            }
            let wl = self.grid.node_weight()[i];
            let wr = self.grid.node_weight()[j];
            let f0 = self.values[i] * self.values[i] * wl;
            let f1 = self.values[j] * self.values[j] * wr;
            // linear-in-cell trapezoid of f = v²w over the overlap
            let t0 = (lo - x0) / cell.len;
            let t1 = (hi - x0) / cell.len;
            let g0 = f0 * (1.0 - t0) + f1 * t0;
            let g1 = f0 * (1.0 - t1) + f1 * t1;
            total += 0.5 * (g0 + g1) * (hi - lo);
        }
        total
    }

    /// Maximum of the field over nodes in the window `[a, b]`.
    pub fn sup_on(&self, a: f64, b: f64) -> f64 {
        self.grid
            .nodes()
            .iter()
            .zip(self.values.iter())
            .filter(|(&x, _)| x >= a - 1e-12 && x <= b + 1e-12)
            .map(|(_, &v)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Write the field as CSV `(x, v)` rows; the header's second column name
    /// carries the domain hash.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.values.len() * 48 + 32);
        out.push_str(&format!("x,v_{:016x}\n", self.grid.chain_hash()));
        for (&x, &v) in self.grid.nodes().iter().zip(self.values.iter()) {
            out.push_str(&format!("{x:.17e},{v:.17e}\n"));
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Read a field written by [`DiscreteField::write_csv`] back onto `grid`,
    /// checking the domain hash and the node count.
    pub fn read_csv(grid: Arc<Grid>, path: &Path) -> Result<DiscreteField> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty field CSV".into()))?;
        let hash_part = header
            .strip_prefix("x,v_")
            .ok_or_else(|| Error::Parse(format!("bad field CSV header '{header}'")))?;
        let hash = u64::from_str_radix(hash_part.trim(), 16)
            .map_err(|e| Error::Parse(format!("bad domain hash in header: {e}")))?;
        if hash != grid.chain_hash() {
            return Err(Error::ShapeError(format!(
                "field belongs to domain {hash:016x}, grid is {:016x}",
                grid.chain_hash()
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        for (ln, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (_, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'x,v'", ln + 2)))?;
            values.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 2)))?,
            );
        }
        DiscreteField::from_values(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        chain, make_core_surrogate, make_flat_tube, make_line, make_round_neck, BoundaryCondition,
        JunctionPolicy,
    };
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn dirichlet(segs: Vec<crate::geometry::Segment>) -> DomainChain {
        chain(segs, BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet, JunctionPolicy::Continuous)
            .unwrap()
    }

    #[test]
    fn breakpoints_land_on_nodes() {
        let h = 0.15;
        let c = dirichlet(vec![
            make_round_neck(h, 0.0, 2.937).unwrap(),
            make_core_surrogate(h).unwrap(),
            make_round_neck(h, 0.0, 4.11).unwrap(),
        ]);
        let g = Grid::new(&c, 0.01).unwrap();
        for i in 0..3 {
            let s = c.segment_start(i);
            let k = g.nearest_node(s);
            assert!((g.nodes()[k] - s).abs() < 1e-12);
        }
        assert_relative_eq!(g.total_length(), 2.937 + 2.0 + 4.11, max_relative = 1e-12);
    }

    #[test]
    fn trapezoid_measures_sum_to_volume() {
        let c = dirichlet(vec![make_flat_tube(0.5, 0.0, 1.0).unwrap()]);
        let g = Grid::new(&c, 1e-3).unwrap();
        let vol: f64 = g
            .node_weight()
            .iter()
            .zip(g.node_measure().iter())
            .map(|(&w, &q)| w * q)
            .sum();
        assert_relative_eq!(vol, PI * PI, max_relative = 1e-10);
    }

    #[test]
    fn periodic_grid_wraps() {
        let c = chain(
            vec![make_flat_tube(1.0, 0.0, 1.0).unwrap()],
            BoundaryCondition::Periodic,
            BoundaryCondition::Periodic,
            JunctionPolicy::Continuous,
        )
        .unwrap();
        let g = Grid::new(&c, 0.1).unwrap();
        assert_eq!(g.len(), g.cells().len());
        let v = DiscreteField::from_fn(Arc::clone(&g), |_| 1.0);
        assert_relative_eq!(v.weighted_norm_sq(), 4.0 * PI * PI, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_domain_is_rejected() {
        let c = dirichlet(vec![make_line(0.0, 0.5).unwrap()]);
        assert!(Grid::new(&c, 0.6).is_err());
        assert!(Grid::new(&c, 0.0).is_err());
    }

    #[test]
    fn mass_and_sup_on_windows() {
        let c = dirichlet(vec![make_line(0.0, 2.0).unwrap()]);
        let g = Grid::new(&c, 1e-3).unwrap();
        let v = DiscreteField::from_fn(Arc::clone(&g), |x| x);
        // ∫_0^1 x² dx = 1/3
        assert_relative_eq!(v.mass_on(0.0, 1.0), 1.0 / 3.0, max_relative = 1e-5);
        assert_relative_eq!(v.sup_on(0.0, 1.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(v.sup(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn csv_round_trip_binds_to_domain() {
        let c = dirichlet(vec![make_line(0.0, 1.0).unwrap()]);
        let g = Grid::new(&c, 0.05).unwrap();
        let v = DiscreteField::from_fn(Arc::clone(&g), |x| (1.0 - x) * x);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.csv");
        v.write_csv(&path).unwrap();
        let back = DiscreteField::read_csv(Arc::clone(&g), &path).unwrap();
        assert_eq!(v.values(), back.values());

        let other = dirichlet(vec![make_line(0.0, 2.0).unwrap()]);
        let og = Grid::new(&other, 0.05).unwrap();
        assert!(DiscreteField::read_csv(og, &path).is_err());
    }
}
