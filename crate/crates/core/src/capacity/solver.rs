//! Grid search with coordinate ascent over factor simplices.
//!
//! Every factor row lives on a probability simplex. The search discretizes
//! each simplex at resolution `k` (coordinates are multiples of `1/k`),
//! enumerates the full product grid when it is small and otherwise runs
//! block-coordinate ascent over the grid from a uniform start plus seeded
//! random restarts. The best point is then polished by pairwise mass moves
//! with a halving step. When every resolution is even, the search at `k/2`
//! is run first and its result seeds the search at `k`, so refining the grid
//! never lowers the reported value.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{eval_objective, MacPolytope, Objective};
use super::param::{cardinality_cap, map_shape, PmfParameterization};
use super::region::{Generator, RateRegion};
use crate::channels::{ChannelKind, ChannelModel, ChannelSpec};
use crate::probability::MAX_CELLS;
use crate::rng::{hash_labels, substream, Purpose};
use crate::{Error, Result};

const IMPROVEMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMode {
    /// Exhaustive when the map count is within the limit, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Weighted-sum sweep; exact for convex regions.
    WeightedSum,
    /// Maximize R2 separately at every boundary r1 point.
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Simplex grid spacing for all factors. `None` uses 0.1 for rows with
    /// more than 4 cells and 0.05 otherwise.
    pub grid_step: Option<f64>,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub polish_iterations: usize,
    /// Largest product grid enumerated exhaustively.
    pub exhaustive_limit: usize,
    /// Largest single-row grid.
    pub row_grid_limit: usize,
    pub seed: u64,
    pub u_size: Option<usize>,
    pub map_mode: MapMode,
    pub map_limit: usize,
    /// Largest joint table the evaluator may build.
    pub cell_cap: usize,
    pub weight_step: f64,
    pub boundary_step: f64,
    pub boundary_mode: BoundaryMode,
    /// Causal-cribbing MAC only: force p(x2|u,s2,z1) to ignore z1.
    pub tie_x2_across_z1: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            grid_step: None,
            restarts: 4,
            max_sweeps: 30,
            polish_iterations: 20,
            exhaustive_limit: 20_000,
            row_grid_limit: 200_000,
            seed: 0,
            u_size: None,
            map_mode: MapMode::Auto,
            map_limit: 4096,
            cell_cap: MAX_CELLS,
            weight_step: 0.05,
            boundary_step: 0.01,
            boundary_mode: BoundaryMode::WeightedSum,
            tie_x2_across_z1: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimum {
    Capacity(f64),
    Region(RateRegion),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    /// Grid spacing used for each factor, in factor order.
    pub grid_steps: Vec<f64>,
    pub exhaustive_grid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps_searched: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps_exhaustive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub kind: ChannelKind,
    pub optimum: Optimum,
    /// Relay kinds: the maximizer. MAC kinds: the sum-rate maximizer.
    pub argmax: PmfParameterization,
    pub info: SolveInfo,
}

impl Solution {
    pub fn capacity(&self) -> Option<f64> {
        match self.optimum {
            Optimum::Capacity(v) => Some(v),
            Optimum::Region(_) => None,
        }
    }

    pub fn region(&self) -> Option<&RateRegion> {
        match &self.optimum {
            Optimum::Region(r) => Some(r),
            Optimum::Capacity(_) => None,
        }
    }
}

/// Rows that move together: one row normally, several tied rows otherwise.
#[derive(Debug, Clone)]
struct Block {
    factor: usize,
    rows: Vec<usize>,
    dim: usize,
}

fn blocks_for(spec: &ChannelSpec, param: &PmfParameterization, tie: bool) -> Vec<Block> {
    let mut blocks = Vec::new();
    for (f, table) in param.factors.iter().enumerate() {
        let group = match (&spec.model, spec.kind) {
            (ChannelModel::Mac(m), ChannelKind::StateMacCausal) if tie && f == 2 => m.z1.size,
            _ => 1,
        };
        for g in 0..table.rows() / group {
            blocks.push(Block { factor: f, rows: (g * group..(g + 1) * group).collect(), dim: table.row_len });
        }
    }
    blocks
}

fn set_block(p: &mut PmfParameterization, b: &Block, values: &[f64]) {
    for &r in &b.rows {
        p.factors[b.factor].row_mut(r).copy_from_slice(values);
    }
}

fn get_block(p: &PmfParameterization, b: &Block) -> Vec<f64> {
    p.factors[b.factor].row(b.rows[0]).to_vec()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All points of the simplex in `dim` coordinates with denominators `k`.
fn simplex_grid(k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; dim];
    fn rec(pos: usize, left: usize, k: usize, counts: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if pos + 1 == counts.len() {
            counts[pos] = left;
            out.push(counts.iter().map(|&c| c as f64 / k as f64).collect());
            return;
        }
        for c in (0..=left).rev() {
            counts[pos] = c;
            rec(pos + 1, left - c, k, counts, out);
        }
    }
    rec(0, k, k, &mut counts, &mut out);
    out
}

fn random_grid_point(k: usize, dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut counts = vec![0usize; dim];
    for _ in 0..k {
        counts[rng.gen_range(0..dim)] += 1;
    }
    counts.into_iter().map(|c| c as f64 / k as f64).collect()
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    param: PmfParameterization,
    exhaustive: bool,
}

struct Search<'a, F> {
    blocks: Vec<Block>,
    f: &'a F,
    settings: &'a SolverSettings,
    salt: u64,
}

impl<'a, F: Fn(&PmfParameterization) -> f64 + Sync> Search<'a, F> {
    fn run(&self, base: &PmfParameterization, ks: &[usize]) -> Result<Candidate> {
        let prior = if ks.iter().all(|&k| k >= 2 && k % 2 == 0) {
            let half: Vec<usize> = ks.iter().map(|k| k / 2).collect();
            Some(self.run(base, &half)?)
        } else {
            None
        };
        let mut cache: HashMap<(usize, usize), std::sync::Arc<Vec<Vec<f64>>>> = HashMap::new();
        let mut grids = Vec::with_capacity(self.blocks.len());
        for (b, &k) in self.blocks.iter().zip(ks) {
            let count = binomial(k + b.dim - 1, b.dim - 1);
            if count > self.settings.row_grid_limit as f64 {
                return Err(Error::Budget(format!(
                    "simplex grid of {count} points for a {}-cell row exceeds {}",
                    b.dim, self.settings.row_grid_limit
                )));
            }
            grids.push(cache.entry((k, b.dim)).or_insert_with(|| simplex_grid(k, b.dim).into()).clone());
        }
        let product: f64 = grids.iter().map(|g| g.len() as f64).product();
        let mut best = if product <= self.settings.exhaustive_limit as f64 {
            self.exhaustive(base, &grids)
        } else {
            let mut starts = vec![base.clone()];
            if let Some(p) = &prior {
                starts.push(p.param.clone());
            }
            let level = hash_labels(&ks.iter().map(|&k| k as u64).collect::<Vec<_>>());
            for r in 0..self.settings.restarts {
                let mut rng = substream(self.settings.seed, Purpose::Solver, &[self.salt, level, r as u64]);
                let mut p = base.clone();
                for (b, &k) in self.blocks.iter().zip(ks) {
                    set_block(&mut p, b, &random_grid_point(k, b.dim, &mut rng));
                }
                starts.push(p);
            }
            let results: Vec<Candidate> = starts.into_par_iter().map(|s| self.ascend(s, &grids)).collect();
            first_best(results)
        };
        if let Some(p) = prior {
            if p.value > best.value {
                best = Candidate { exhaustive: best.exhaustive, ..p };
            }
        }
        Ok(self.polish(best, ks))
    }

    fn exhaustive(&self, base: &PmfParameterization, grids: &[std::sync::Arc<Vec<Vec<f64>>>]) -> Candidate {
        let total: usize = grids.iter().map(|g| g.len()).product();
        let decode = |mut i: usize, p: &mut PmfParameterization| {
            for (b, g) in self.blocks.iter().zip(grids).rev() {
                set_block(p, b, &g[i % g.len()]);
                i /= g.len();
            }
        };
        let values: Vec<f64> = (0..total)
            .into_par_iter()
            .map_init(
                || base.clone(),
                |p, i| {
                    decode(i, p);
                    (self.f)(p)
                },
            )
            .collect();
        let (mut arg, mut value) = (0, f64::NEG_INFINITY);
        for (i, &v) in values.iter().enumerate() {
            if v > value {
                arg = i;
                value = v;
            }
        }
        let mut param = base.clone();
        decode(arg, &mut param);
        Candidate { value, param, exhaustive: true }
    }

    fn ascend(&self, start: PmfParameterization, grids: &[std::sync::Arc<Vec<Vec<f64>>>]) -> Candidate {
        let mut p = start;
        let mut value = (self.f)(&p);
        for _ in 0..self.settings.max_sweeps {
            let mut changed = false;
            for (b, grid) in self.blocks.iter().zip(grids) {
                let keep = get_block(&p, b);
                let mut best: Option<(f64, usize)> = None;
                for (i, point) in grid.iter().enumerate() {
                    set_block(&mut p, b, point);
                    let v = (self.f)(&p);
                    if best.is_none_or(|(bv, _)| v > bv) {
                        best = Some((v, i));
                    }
                }
                match best {
                    Some((v, i)) if v > value + IMPROVEMENT => {
                        set_block(&mut p, b, &grid[i]);
                        value = v;
                        changed = true;
                    }
                    _ => set_block(&mut p, b, &keep),
                }
            }
            if !changed {
                break;
            }
        }
        Candidate { value, param: p, exhaustive: false }
    }

    fn polish(&self, start: Candidate, ks: &[usize]) -> Candidate {
        let Candidate { mut value, param: mut p, exhaustive } = start;
        let mut deltas: Vec<f64> = ks.iter().map(|&k| 0.5 / k as f64).collect();
        for _ in 0..self.settings.polish_iterations {
            for (b, delta) in self.blocks.iter().zip(&deltas) {
                for i in 0..b.dim {
                    for j in 0..b.dim {
                        if i == j {
                            continue;
                        }
                        let keep = get_block(&p, b);
                        let amount = delta.min(keep[j]);
                        if amount <= 0.0 {
                            continue;
                        }
                        let mut moved = keep.clone();
                        moved[i] += amount;
                        moved[j] -= amount;
                        set_block(&mut p, b, &moved);
                        let v = (self.f)(&p);
                        if v > value + IMPROVEMENT {
                            value = v;
                        } else {
                            set_block(&mut p, b, &keep);
                        }
                    }
                }
            }
            for d in &mut deltas {
                *d *= 0.5;
            }
        }
        Candidate { value, param: p, exhaustive }
    }
}

fn first_best(results: Vec<Candidate>) -> Candidate {
    let mut it = results.into_iter();
    let mut best = it.next().expect("at least one start");
    for c in it {
        if c.value > best.value {
            best = c;
        }
    }
    best
}

fn resolutions(blocks: &[Block], settings: &SolverSettings) -> Result<Vec<usize>> {
    blocks
        .iter()
        .map(|b| match settings.grid_step {
            None => Ok(if b.dim > 4 { 10 } else { 20 }),
            Some(step) => {
                let k = (1.0 / step).round();
                if !(step > 0.0) || k < 1.0 || (k * step - 1.0).abs() > 1e-9 {
                    return Err(Error::OutOfRange(format!("grid step {step} must be 1/k for a positive integer k")));
                }
                Ok(k as usize)
            }
        })
        .collect()
}

fn check_cells(spec: &ChannelSpec, u: Option<usize>, cap: usize) -> Result<()> {
    let cells: f64 = match &spec.model {
        ChannelModel::Relay(r) => {
            (r.s.size * r.x.size * r.xr.size * r.y.size * r.z.size) as f64 * u.unwrap_or(1) as f64
        }
        ChannelModel::Mac(m) => {
            [m.s1.size, m.s2.size, m.x1.size, m.x2.size, m.y.size, m.z1.size, m.z2.size]
                .iter()
                .map(|&s| s as f64)
                .product::<f64>()
                * u.unwrap_or(1) as f64
        }
    };
    if cells > cap as f64 {
        return Err(Error::Budget(format!("joint table of {cells} cells exceeds the cap of {cap}")));
    }
    Ok(())
}

fn rate_of(spec: &ChannelSpec, p: &PmfParameterization) -> f64 {
    match eval_objective(spec, p) {
        Ok(Objective::Rate(v)) => v,
        _ => f64::NEG_INFINITY,
    }
}

fn polytope_of(spec: &ChannelSpec, p: &PmfParameterization) -> Option<MacPolytope> {
    match eval_objective(spec, p) {
        Ok(Objective::Region(poly)) => Some(poly),
        _ => None,
    }
}

/// Relay maps to search: all of them, or a seeded sample.
fn relay_maps(len: usize, codomain: usize, settings: &SolverSettings) -> Result<(Vec<Vec<usize>>, bool)> {
    let count = (codomain as f64).powi(len as i32);
    let exhaustive = match settings.map_mode {
        MapMode::Exhaustive => {
            if count > settings.map_limit as f64 {
                return Err(Error::Budget(format!(
                    "{count} relay maps exceed the exhaustive limit of {}",
                    settings.map_limit
                )));
            }
            true
        }
        MapMode::Auto => count <= settings.map_limit as f64,
        MapMode::Sampled => false,
    };
    if exhaustive {
        let mut maps = Vec::with_capacity(count as usize);
        let mut m = vec![0usize; len];
        loop {
            maps.push(m.clone());
            if !crate::probability::next_index(&vec![codomain; len], &mut m) {
                break;
            }
        }
        Ok((maps, true))
    } else {
        let mut rng = substream(settings.seed, Purpose::Solver, &[u64::MAX]);
        let n = settings.map_limit.min(count.min(usize::MAX as f64) as usize).max(1);
        let maps = (0..n).map(|_| (0..len).map(|_| rng.gen_range(0..codomain)).collect()).collect();
        Ok((maps, false))
    }
}

/// Maximizes the capacity expression (relay kinds) or traces the rate
/// region (MAC kinds) over the grid described by `settings`.
pub fn solve(spec: &ChannelSpec, settings: &SolverSettings) -> Result<Solution> {
    if settings.tie_x2_across_z1 && spec.kind != ChannelKind::StateMacCausal {
        return Err(Error::KindMismatch {
            expected: ChannelKind::StateMacCausal.to_string(),
            found: spec.kind.to_string(),
        });
    }
    let base = PmfParameterization::uniform(spec, settings.u_size)?;
    check_cells(spec, base.u_size, settings.cell_cap)?;
    let blocks = blocks_for(spec, &base, settings.tie_x2_across_z1);
    let ks = resolutions(&blocks, settings)?;
    let mut info = SolveInfo {
        grid_steps: base
            .factors
            .iter()
            .enumerate()
            .map(|(f, _)| blocks.iter().zip(&ks).find(|(b, _)| b.factor == f).map_or(0.0, |(_, &k)| 1.0 / k as f64))
            .collect(),
        exhaustive_grid: false,
        u_size: base.u_size,
        u_cap: cardinality_cap(spec),
        maps_searched: None,
        maps_exhaustive: None,
    };

    if spec.kind.is_relay() {
        let f = |p: &PmfParameterization| rate_of(spec, p);
        let best = if let Some((len, codomain)) = map_shape(spec, base.u_size.unwrap_or(1)) {
            let (maps, exhaustive) = relay_maps(len, codomain, settings)?;
            info.maps_searched = Some(maps.len());
            info.maps_exhaustive = Some(exhaustive);
            let results: Vec<Candidate> = maps
                .into_par_iter()
                .enumerate()
                .map(|(i, map)| {
                    let mut start = base.clone();
                    start.relay_map = Some(map);
                    let search = Search { blocks: blocks.clone(), f: &f, settings, salt: i as u64 };
                    search.run(&start, &ks)
                })
                .collect::<Result<_>>()?;
            first_best(results)
        } else {
            Search { blocks: blocks.clone(), f: &f, settings, salt: 0 }.run(&base, &ks)?
        };
        info.exhaustive_grid = best.exhaustive;
        return Ok(Solution { kind: spec.kind, optimum: Optimum::Capacity(best.value), argmax: best.param, info });
    }

    let mut generators = Vec::new();
    let mut argmax = base.clone();
    match settings.boundary_mode {
        BoundaryMode::WeightedSum => {
            let count = (1.0 / settings.weight_step).round() as usize;
            if !(settings.weight_step > 0.0) || count == 0 {
                return Err(Error::OutOfRange("weight step must be positive".into()));
            }
            let weights: Vec<f64> = (0..=count).map(|i| i as f64 / count as f64).collect();
            let results: Vec<(f64, Candidate)> = weights
                .par_iter()
                .enumerate()
                .map(|(i, &w)| {
                    let f = |p: &PmfParameterization| polytope_of(spec, p).map_or(f64::NEG_INFINITY, |q| q.support(w));
                    let search = Search { blocks: blocks.clone(), f: &f, settings, salt: i as u64 };
                    search.run(&base, &ks).map(|c| (w, c))
                })
                .collect::<Result<_>>()?;
            let mut best_sum = f64::NEG_INFINITY;
            for (w, c) in results {
                let poly = polytope_of(spec, &c.param).expect("valid parameterization");
                info.exhaustive_grid |= c.exhaustive;
                if poly.support(0.5) > best_sum {
                    best_sum = poly.support(0.5);
                    argmax = c.param.clone();
                }
                generators.push(Generator { weight: Some(w), polytope: poly, param: c.param });
            }
        }
        BoundaryMode::Dense => {
            // Anchor the r1 range with the R1-maximizing polytope.
            let f1 = |p: &PmfParameterization| polytope_of(spec, p).map_or(f64::NEG_INFINITY, |q| q.r1_extent());
            let anchor = Search { blocks: blocks.clone(), f: &f1, settings, salt: 0 }.run(&base, &ks)?;
            let extent = polytope_of(spec, &anchor.param).expect("valid").r1_extent();
            let steps = (extent / settings.boundary_step).floor() as usize;
            let results: Vec<Candidate> = (0..=steps)
                .into_par_iter()
                .map(|i| {
                    let r1 = i as f64 * settings.boundary_step;
                    let f = |p: &PmfParameterization| {
                        polytope_of(spec, p).map_or(f64::NEG_INFINITY, |q| match q.r2_at(r1) {
                            Some((r2, _)) => r2,
                            None => q.r1_extent() - r1 - 1.0,
                        })
                    };
                    Search { blocks: blocks.clone(), f: &f, settings, salt: i as u64 + 1 }.run(&base, &ks)
                })
                .collect::<Result<_>>()?;
            let mut best_sum = f64::NEG_INFINITY;
            for c in std::iter::once(anchor).chain(results) {
                let poly = polytope_of(spec, &c.param).expect("valid");
                if poly.support(0.5) > best_sum {
                    best_sum = poly.support(0.5);
                    argmax = c.param.clone();
                }
                generators.push(Generator { weight: None, polytope: poly, param: c.param });
            }
        }
    }
    let region = RateRegion::new(generators, settings.boundary_step);
    Ok(Solution { kind: spec.kind, optimum: Optimum::Region(region), argmax, info })
}
