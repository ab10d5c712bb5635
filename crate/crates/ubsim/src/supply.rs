//! Supply-side estimation: disaggregating national tower counts to
//! areas, allocating technologies and backhaul to sites, building the
//! settlement layer and designing least-cost core/regional fiber.

use std::collections::{BTreeMap, HashMap};

use crate::country::LocalArea;
use crate::error::{ModelError, Result};

/// Newest radio generation present on an area's existing sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteGeneration {
    None,
    TwoG,
    ThreeG,
    FourG,
}

/// Backhaul technology carried by an existing site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackhaulTech {
    Fiber,
    Copper,
    Microwave,
    Satellite,
}

/// Existing infrastructure in one area. Site counts are integers;
/// regional sums match the national records exactly. Per-class counts
/// are kept alongside the headline fields because the class boundary of
/// a sequential allocation can fall inside a multi-site area.
#[derive(Debug, Clone)]
pub struct SitePortfolio {
    pub area_id: String,
    pub existing_sites: u32,
    /// Newest generation present (sites are upgraded newest-first in the
    /// densest areas).
    pub existing_generation: SiteGeneration,
    /// Backhaul class of the area's first (densest-ranked) site.
    pub backhaul_type: BackhaulTech,
    /// Counts by generation: [4G, 3G, 2G].
    pub sites_by_generation: [u32; 3],
    /// Counts by backhaul: [fiber, copper, microwave, satellite].
    pub sites_by_backhaul: [u32; 4],
}

/// Indices into `areas` ordered densest first. Ties break on area id so
/// the order is reproducible.
fn density_order(areas: &[LocalArea]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..areas.len()).collect();
    order.sort_by(|&a, &b| {
        areas[b]
            .pop_density
            .partial_cmp(&areas[a].pop_density)
            .unwrap()
            .then_with(|| areas[a].area_id.cmp(&areas[b].area_id))
    });
    order
}

/// Largest-remainder rounding of non-negative quotas to integers that
/// sum exactly to `total`. Ties on the fractional part break on index.
fn largest_remainder(quotas: &[f64], total: u32) -> Vec<u32> {
    let mut counts: Vec<u32> = quotas.iter().map(|&q| q.max(0.0) as u32).collect();
    let mut assigned: i64 = counts.iter().map(|&c| c as i64).sum();
    let mut frac: Vec<(usize, f64)> = quotas
        .iter()
        .enumerate()
        .map(|(i, &q)| (i, q.max(0.0) - q.max(0.0).floor()))
        .collect();
    frac.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));

    let target = total as i64;
    let mut k = 0;
    while assigned < target && k < frac.len() {
        counts[frac[k].0] += 1;
        assigned += 1;
        k += 1;
    }
    // Quotas can overshoot the target when the coverage boundary splits
    // an area; trim from the smallest remainders, cycling until the
    // target is met (zero-count entries are never driven negative).
    while assigned > target {
        let mut trimmed = false;
        for &(idx, _) in frac.iter().rev() {
            if assigned == target {
                break;
            }
            if counts[idx] > 0 {
                counts[idx] -= 1;
                assigned -= 1;
                trimmed = true;
            }
        }
        if !trimmed {
            break;
        }
    }
    counts
}

/// Disaggregate a national tower count to areas: densest areas first
/// until the covered population share is reached, each covered area
/// receiving towers in proportion to its population; everything beyond
/// the coverage cutoff has no towers. Returns counts aligned with the
/// input order.
pub fn disaggregate_towers(
    areas: &[LocalArea],
    national_towers: u32,
    national_pop: f64,
    coverage_pct: f64,
) -> Result<Vec<u32>> {
    if areas.is_empty() {
        return Err(ModelError::EmptyInput("area list".into()));
    }
    if !(coverage_pct > 0.0 && coverage_pct <= 100.0) {
        return Err(ModelError::Invariant("coverage_pct in (0, 100]".into()));
    }
    let covered_target = national_pop * coverage_pct / 100.0;
    let order = density_order(areas);

    let mut quotas = vec![0.0; areas.len()];
    let mut cum_pop = 0.0;
    for &i in &order {
        if cum_pop >= covered_target {
            break;
        }
        quotas[i] = areas[i].population * national_towers as f64 / covered_target;
        cum_pop += areas[i].population;
    }
    Ok(largest_remainder(&quotas, national_towers))
}

/// Assign radio generations to existing sites: sites ranked by their
/// area's density, the densest receiving the newest generation first.
/// `shares` are national fractions [4G, 3G, 2G] summing to 1. Returns
/// per-area counts [4G, 3G, 2G] aligned with the input order.
pub fn allocate_generations(
    areas: &[LocalArea],
    site_counts: &[u32],
    shares: [f64; 3],
) -> Vec<[u32; 3]> {
    allocate_classes(areas, site_counts, &shares)
        .into_iter()
        .map(|v| [v[0], v[1], v[2]])
        .collect()
}

/// Assign backhaul technologies to existing sites by the sequential
/// rule: fiber to the densest sites, then copper, then microwave, with
/// satellite last. `mix` is [fiber, copper, microwave, satellite].
/// Returns per-area counts aligned with the input order; per-class
/// national counts match the mix within one site.
pub fn allocate_backhaul(
    areas: &[LocalArea],
    site_counts: &[u32],
    mix: [f64; 4],
) -> Vec<[u32; 4]> {
    allocate_classes(areas, site_counts, &mix)
        .into_iter()
        .map(|v| [v[0], v[1], v[2], v[3]])
        .collect()
}

fn allocate_classes(areas: &[LocalArea], site_counts: &[u32], fractions: &[f64]) -> Vec<Vec<u32>> {
    assert_eq!(areas.len(), site_counts.len());
    let n_sites: u32 = site_counts.iter().sum();
    let quotas: Vec<f64> = fractions.iter().map(|&f| f * n_sites as f64).collect();
    let class_totals = largest_remainder(&quotas, n_sites);

    // Cumulative class boundaries over the site ranking.
    let mut boundaries = Vec::with_capacity(class_totals.len());
    let mut acc = 0u32;
    for &c in &class_totals {
        acc += c;
        boundaries.push(acc);
    }

    let mut result = vec![vec![0u32; fractions.len()]; areas.len()];
    let mut rank = 0u32;
    for &i in &density_order(areas) {
        for _ in 0..site_counts[i] {
            let class = boundaries.iter().position(|&b| rank < b).unwrap_or(fractions.len() - 1);
            result[i][class] += 1;
            rank += 1;
        }
    }
    result
}

/// Build the full site portfolio for one region's areas.
pub fn build_portfolios(
    areas: &[LocalArea],
    national_towers: u32,
    coverage_pct: f64,
    gen_shares: [f64; 3],
    backhaul_mix: [f64; 4],
) -> Result<Vec<SitePortfolio>> {
    let national_pop: f64 = areas.iter().map(|a| a.population).sum();
    let counts = disaggregate_towers(areas, national_towers, national_pop, coverage_pct)?;
    let generations = allocate_generations(areas, &counts, gen_shares);
    let backhauls = allocate_backhaul(areas, &counts, backhaul_mix);

    Ok(areas
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let g = generations[i];
            let existing_generation = if g[0] > 0 {
                SiteGeneration::FourG
            } else if g[1] > 0 {
                SiteGeneration::ThreeG
            } else if g[2] > 0 {
                SiteGeneration::TwoG
            } else {
                SiteGeneration::None
            };
            let b = backhauls[i];
            let backhaul_type = if b[0] > 0 {
                BackhaulTech::Fiber
            } else if b[1] > 0 {
                BackhaulTech::Copper
            } else if b[3] > 0 && b[2] == 0 {
                BackhaulTech::Satellite
            } else {
                BackhaulTech::Microwave
            };
            SitePortfolio {
                area_id: a.area_id.clone(),
                existing_sites: counts[i],
                existing_generation,
                backhaul_type,
                sites_by_generation: g,
                sites_by_backhaul: b,
            }
        })
        .collect())
}

/// A contiguous agglomeration of above-threshold cells.
#[derive(Debug, Clone)]
pub struct Settlement {
    pub settlement_id: String,
    pub region_id: String,
    pub population: f64,
    pub member_area_ids: Vec<String>,
    /// Population-weighted centroid, km.
    pub x_km: f64,
    pub y_km: f64,
    pub has_core_node: bool,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Extract settlements: connected components of cells whose density
/// exceeds `cell_threshold`, kept when the summed population reaches
/// `settlement_threshold`. Adjacency comes from explicit pairs when
/// given, otherwise 4-neighborhood inferred from grid coordinates.
/// Components never span regions.
pub fn build_settlements(
    areas: &[LocalArea],
    cell_threshold: f64,
    settlement_threshold: f64,
    adjacency: Option<&[(String, String)]>,
) -> Vec<Settlement> {
    let above: Vec<usize> = (0..areas.len())
        .filter(|&i| areas[i].pop_density > cell_threshold)
        .collect();
    let index_of: HashMap<&str, usize> = above
        .iter()
        .enumerate()
        .map(|(k, &i)| (areas[i].area_id.as_str(), k))
        .collect();

    let mut dsu = Dsu::new(above.len());
    match adjacency {
        Some(pairs) => {
            for (a, b) in pairs {
                if let (Some(&ka), Some(&kb)) = (index_of.get(a.as_str()), index_of.get(b.as_str()))
                {
                    if areas[above[ka]].region_id == areas[above[kb]].region_id {
                        dsu.union(ka, kb);
                    }
                }
            }
        }
        None => {
            // Grid cells keyed by rounded km coordinates.
            let mut by_cell: HashMap<(i64, i64), usize> = HashMap::new();
            for (k, &i) in above.iter().enumerate() {
                if let (Some(x), Some(y)) = (areas[i].x_km, areas[i].y_km) {
                    by_cell.insert((x.round() as i64, y.round() as i64), k);
                }
            }
            for (&(x, y), &k) in &by_cell {
                for (dx, dy) in [(1i64, 0i64), (0, 1)] {
                    if let Some(&k2) = by_cell.get(&(x + dx, y + dy)) {
                        if areas[above[k]].region_id == areas[above[k2]].region_id {
                            dsu.union(k, k2);
                        }
                    }
                }
            }
        }
    }

    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..above.len() {
        let root = dsu.find(k);
        components.entry(root).or_default().push(above[k]);
    }

    let mut settlements = Vec::new();
    for (_, mut members) in components {
        members.sort_by(|&a, &b| areas[a].area_id.cmp(&areas[b].area_id));
        let population: f64 = members.iter().map(|&i| areas[i].population).sum();
        if population < settlement_threshold {
            continue;
        }
        let mut wx = 0.0;
        let mut wy = 0.0;
        let mut w = 0.0;
        for &i in &members {
            if let (Some(x), Some(y)) = (areas[i].x_km, areas[i].y_km) {
                let weight = areas[i].population.max(1.0);
                wx += x * weight;
                wy += y * weight;
                w += weight;
            }
        }
        let (x_km, y_km) = if w > 0.0 { (wx / w, wy / w) } else { (0.0, 0.0) };
        settlements.push(Settlement {
            settlement_id: format!("s_{}", areas[members[0]].area_id),
            region_id: areas[members[0]].region_id.clone(),
            population,
            member_area_ids: members.iter().map(|&i| areas[i].area_id.clone()).collect(),
            x_km,
            y_km,
            has_core_node: false,
        });
    }
    settlements.sort_by(|a, b| a.settlement_id.cmp(&b.settlement_id));
    settlements
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Core,
    Regional,
}

/// A newly built fiber edge between two points.
#[derive(Debug, Clone)]
pub struct FiberEdge {
    pub from_id: String,
    pub to_id: String,
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub length_km: f64,
    pub kind: EdgeKind,
}

/// Result of the least-cost fiber design.
#[derive(Debug, Clone)]
pub struct FiberNetwork {
    /// Input settlements with `has_core_node` resolved.
    pub settlements: Vec<Settlement>,
    pub new_edges: Vec<FiberEdge>,
    pub total_new_km: f64,
    /// Regions with no reachable core node anywhere; served by the
    /// fallback backhaul class in costing.
    pub isolated_regions: Vec<String>,
}

impl FiberNetwork {
    /// Settlements connected to the fiber network, per region. These are
    /// the fiber points of presence used for backhaul distances.
    pub fn fiber_nodes_by_region(&self) -> BTreeMap<String, u32> {
        let mut nodes: BTreeMap<String, u32> = BTreeMap::new();
        for s in &self.settlements {
            if s.has_core_node {
                *nodes.entry(s.region_id.clone()).or_insert(0) += 1;
            }
        }
        for e in &self.new_edges {
            if e.kind == EdgeKind::Regional {
                if let Some(s) = self.settlements.iter().find(|s| s.settlement_id == e.from_id) {
                    *nodes.entry(s.region_id.clone()).or_insert(0) += 1;
                }
            }
        }
        nodes
    }

    pub fn new_km_by_region(&self) -> BTreeMap<String, (f64, f64)> {
        // (core_km, regional_km), keyed by the region of the source node.
        let mut km: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for e in &self.new_edges {
            let region = self
                .settlements
                .iter()
                .find(|s| s.settlement_id == e.from_id)
                .map(|s| s.region_id.clone())
                .unwrap_or_default();
            let entry = km.entry(region).or_insert((0.0, 0.0));
            match e.kind {
                EdgeKind::Core => entry.0 += e.length_km,
                EdgeKind::Regional => entry.1 += e.length_km,
            }
        }
        km
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Distance from a point to a polyline, together with the closest point.
fn point_polyline(p: (f64, f64), line: &[(f64, f64)]) -> Option<(f64, (f64, f64))> {
    if line.is_empty() {
        return None;
    }
    if line.len() == 1 {
        return Some((dist(p, line[0]), line[0]));
    }
    let mut best: Option<(f64, (f64, f64))> = None;
    for seg in line.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let (abx, aby) = (b.0 - a.0, b.1 - a.1);
        let len2 = abx * abx + aby * aby;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0)
        };
        let q = (a.0 + t * abx, a.1 + t * aby);
        let d = dist(p, q);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, q));
        }
    }
    best
}

/// Design the least-cost fiber build-out.
///
/// Settlements above `core_pop_threshold` within `buffer_km` of an
/// existing core edge already have a core node. A region with no core
/// node links its largest settlement to the nearest core node with a new
/// core edge. Remaining qualifying settlements join region by region via
/// a Euclidean minimum spanning tree rooted at the region's core nodes.
pub fn design_fiber(
    settlements: &[Settlement],
    existing_core_edges: &[Vec<(f64, f64)>],
    core_pop_threshold: f64,
    buffer_km: f64,
) -> FiberNetwork {
    let mut settlements: Vec<Settlement> = settlements.to_vec();
    let mut new_edges: Vec<FiberEdge> = Vec::new();
    let mut isolated_regions: Vec<String> = Vec::new();

    for s in settlements.iter_mut() {
        if s.population >= core_pop_threshold {
            let near_edge = existing_core_edges
                .iter()
                .filter_map(|line| point_polyline((s.x_km, s.y_km), line))
                .any(|(d, _)| d <= buffer_km);
            s.has_core_node = near_edge;
        }
    }

    let mut regions: Vec<String> = settlements.iter().map(|s| s.region_id.clone()).collect();
    regions.sort();
    regions.dedup();

    for region in &regions {
        let member_idx: Vec<usize> = (0..settlements.len())
            .filter(|&i| &settlements[i].region_id == region)
            .collect();
        let mut root_idx: Vec<usize> = member_idx
            .iter()
            .copied()
            .filter(|&i| settlements[i].has_core_node)
            .collect();

        if root_idx.is_empty() {
            // Link the largest settlement to the nearest core node
            // anywhere, or failing that the nearest point of an existing
            // core edge.
            let Some(&largest) = member_idx.iter().max_by(|&&a, &&b| {
                settlements[a]
                    .population
                    .partial_cmp(&settlements[b].population)
                    .unwrap()
                    .then_with(|| settlements[b].settlement_id.cmp(&settlements[a].settlement_id))
            }) else {
                continue;
            };
            let p = (settlements[largest].x_km, settlements[largest].y_km);

            let mut best: Option<(f64, (f64, f64), String)> = None;
            for (i, s) in settlements.iter().enumerate() {
                if i != largest && s.has_core_node {
                    let d = dist(p, (s.x_km, s.y_km));
                    if best.as_ref().map_or(true, |(bd, _, _)| d < *bd) {
                        best = Some((d, (s.x_km, s.y_km), s.settlement_id.clone()));
                    }
                }
            }
            for (k, line) in existing_core_edges.iter().enumerate() {
                if let Some((d, q)) = point_polyline(p, line) {
                    if best.as_ref().map_or(true, |(bd, _, _)| d < *bd) {
                        best = Some((d, q, format!("core_edge_{k}")));
                    }
                }
            }
            match best {
                Some((d, q, target)) => {
                    new_edges.push(FiberEdge {
                        from_id: settlements[largest].settlement_id.clone(),
                        to_id: target,
                        from: p,
                        to: q,
                        length_km: d,
                        kind: EdgeKind::Core,
                    });
                    settlements[largest].has_core_node = true;
                    root_idx.push(largest);
                }
                None => {
                    isolated_regions.push(region.clone());
                    continue;
                }
            }
        }

        // Prim's algorithm over {supernode of roots} + qualifying
        // settlements; the supernode distance is the minimum to any root.
        let pending: Vec<usize> = member_idx
            .iter()
            .copied()
            .filter(|&i| {
                settlements[i].population >= core_pop_threshold && !settlements[i].has_core_node
            })
            .collect();
        if pending.is_empty() {
            continue;
        }

        let pos = |i: usize| (settlements[i].x_km, settlements[i].y_km);
        // best_link[k] = (distance, attachment node index) for pending k.
        let mut best_link: Vec<(f64, usize)> = pending
            .iter()
            .map(|&i| {
                root_idx
                    .iter()
                    .map(|&r| (dist(pos(i), pos(r)), r))
                    .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                    .unwrap()
            })
            .collect();
        let mut in_tree = vec![false; pending.len()];
        for _ in 0..pending.len() {
            let next = (0..pending.len())
                .filter(|&k| !in_tree[k])
                .min_by(|&a, &b| {
                    best_link[a]
                        .0
                        .partial_cmp(&best_link[b].0)
                        .unwrap()
                        .then_with(|| pending[a].cmp(&pending[b]))
                })
                .unwrap();
            in_tree[next] = true;
            let i = pending[next];
            let (d, attach) = best_link[next];
            new_edges.push(FiberEdge {
                from_id: settlements[i].settlement_id.clone(),
                to_id: settlements[attach].settlement_id.clone(),
                from: pos(i),
                to: pos(attach),
                length_km: d,
                kind: EdgeKind::Regional,
            });
            for k in 0..pending.len() {
                if !in_tree[k] {
                    let d2 = dist(pos(pending[k]), pos(i));
                    if d2 < best_link[k].0 {
                        best_link[k] = (d2, i);
                    }
                }
            }
        }
    }

    let total_new_km = new_edges.iter().map(|e| e.length_km).sum();
    FiberNetwork {
        settlements,
        new_edges,
        total_new_km,
        isolated_regions,
    }
}

/// Mean distance from a site to its nearest fiber point of presence on
/// a uniform grid with `density` PoPs per km²: sqrt(1/density)/2.
pub fn mean_backhaul_distance(density: f64) -> Result<f64> {
    if density <= 0.0 {
        return Err(ModelError::Invariant(format!(
            "fiber node density > 0 (got {density})"
        )));
    }
    Ok((1.0 / density).sqrt() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelConfig;
    use approx::assert_relative_eq;

    fn area(id: &str, region: &str, pop: f64, x: f64, y: f64) -> LocalArea {
        let config = ModelConfig::default();
        let mut a = LocalArea::new(id, region, pop, 1.0, 0.0, &config).unwrap();
        a.x_km = Some(x);
        a.y_km = Some(y);
        a
    }

    #[test]
    fn towers_proportional_to_population_inside_coverage() {
        let areas: Vec<LocalArea> = (0..100)
            .map(|i| area(&format!("a{i:03}"), "R", 1000.0 - 5.0 * i as f64, i as f64, 0.0))
            .collect();
        let national_pop: f64 = areas.iter().map(|a| a.population).sum();
        // Pick coverage so the covered mass is exactly the densest 50 areas.
        let covered: f64 = areas[..50].iter().map(|a| a.population).sum();
        let coverage_pct = covered / national_pop * 100.0;
        let counts = disaggregate_towers(&areas, 100, national_pop, coverage_pct).unwrap();
        assert_eq!(counts.iter().sum::<u32>(), 100);
        // The first area's quota is 1000 * 100 / covered.
        let quota = areas[0].population * 100.0 / covered;
        assert!((counts[0] as f64 - quota).abs() <= 1.0);
        // Areas beyond the covered mass have no towers.
        assert!(counts[50..].iter().all(|&c| c == 0));
    }

    #[test]
    fn eq4_hand_evaluated_inside_coverage() {
        // Uniform density so every covered area gets the same quota:
        // pop_i=1000, towers=100, pop=100000, coverage=50 -> 2 each.
        let areas: Vec<LocalArea> = (0..100)
            .map(|i| area(&format!("a{i:03}"), "R", 1000.0, i as f64, 0.0))
            .collect();
        let counts = disaggregate_towers(&areas, 100, 100_000.0, 50.0).unwrap();
        assert_eq!(counts.iter().sum::<u32>(), 100);
        // Ties in density are broken by id; the covered prefix is the
        // first 50 ids, each with quota exactly 2.
        assert!(counts[..50].iter().all(|&c| c == 2));
        assert!(counts[50..].iter().all(|&c| c == 0));
    }

    #[test]
    fn full_coverage_uniform_symmetry() {
        let areas: Vec<LocalArea> = (0..10)
            .map(|i| area(&format!("a{i}"), "R", 500.0, i as f64, 0.0))
            .collect();
        let counts = disaggregate_towers(&areas, 10, 5000.0, 100.0).unwrap();
        assert_eq!(counts, vec![1; 10]);
    }

    #[test]
    fn towers_form_a_density_prefix() {
        let areas: Vec<LocalArea> = (0..40)
            .map(|i| area(&format!("a{i:02}"), "R", 100.0 + 37.0 * ((i * 13) % 40) as f64, i as f64, 0.0))
            .collect();
        let pop: f64 = areas.iter().map(|a| a.population).sum();
        let counts = disaggregate_towers(&areas, 60, pop, 55.0).unwrap();
        let order = density_order(&areas);
        // Once an area in density order has zero towers, no later area
        // in that order may have any (it is a prefix).
        let mut seen_zero = false;
        for &i in &order {
            if counts[i] == 0 {
                seen_zero = true;
            } else {
                assert!(!seen_zero, "tower allocation must be a density prefix");
            }
        }
    }

    #[test]
    fn backhaul_mix_matches_exact_counts() {
        let areas: Vec<LocalArea> = (0..100)
            .map(|i| area(&format!("a{i:03}"), "R", 1000.0 - i as f64, i as f64, 0.0))
            .collect();
        let counts = vec![1u32; 100];
        let alloc = allocate_backhaul(&areas, &counts, [0.01, 0.03, 0.94, 0.02]);
        let by_class: [u32; 4] = alloc.iter().fold([0; 4], |mut acc, a| {
            for k in 0..4 {
                acc[k] += a[k];
            }
            acc
        });
        assert_eq!(by_class, [1, 3, 94, 2]);
        // The densest site is fiber.
        assert_eq!(alloc[0], [1, 0, 0, 0]);
        // The sparsest sites are satellite.
        assert_eq!(alloc[99], [0, 0, 0, 1]);
        assert_eq!(alloc[98], [0, 0, 0, 1]);
    }

    #[test]
    fn all_fiber_mix() {
        let areas: Vec<LocalArea> = (0..5)
            .map(|i| area(&format!("a{i}"), "R", 100.0 * (i + 1) as f64, i as f64, 0.0))
            .collect();
        let counts = vec![3u32; 5];
        let alloc = allocate_backhaul(&areas, &counts, [1.0, 0.0, 0.0, 0.0]);
        assert!(alloc.iter().all(|a| a[0] > 0 && a[1] + a[2] + a[3] == 0));
    }

    #[test]
    fn generation_newest_goes_densest() {
        let areas: Vec<LocalArea> = (0..10)
            .map(|i| area(&format!("a{i}"), "R", 1000.0 - 10.0 * i as f64, i as f64, 0.0))
            .collect();
        let counts = vec![1u32; 10];
        let alloc = allocate_generations(&areas, &counts, [0.4, 0.3, 0.3]);
        // First four sites 4G, next three 3G, last three 2G.
        for i in 0..4 {
            assert_eq!(alloc[i], [1, 0, 0]);
        }
        for i in 4..7 {
            assert_eq!(alloc[i], [0, 1, 0]);
        }
        for i in 7..10 {
            assert_eq!(alloc[i], [0, 0, 1]);
        }
    }

    #[test]
    fn single_dense_cell_becomes_settlement() {
        let areas = vec![area("a1", "R", 1200.0, 0.0, 0.0)];
        let s = build_settlements(&areas, 500.0, 1000.0, None);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].population, 1200.0);
    }

    #[test]
    fn adjacent_cells_merge() {
        let areas = vec![
            area("a1", "R", 600.0, 0.0, 0.0),
            area("a2", "R", 600.0, 1.0, 0.0),
        ];
        let s = build_settlements(&areas, 500.0, 1000.0, None);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].population, 1200.0);
        assert_eq!(s[0].member_area_ids.len(), 2);
    }

    #[test]
    fn diagonal_cells_do_not_merge() {
        let areas = vec![
            area("a1", "R", 600.0, 0.0, 0.0),
            area("a2", "R", 600.0, 1.0, 1.0),
        ];
        let s = build_settlements(&areas, 500.0, 1000.0, None);
        // Each 600-person component is below the 1000 threshold.
        assert!(s.is_empty());
    }

    #[test]
    fn below_cell_threshold_yields_nothing() {
        let areas = vec![
            area("a1", "R", 100.0, 0.0, 0.0),
            area("a2", "R", 450.0, 1.0, 0.0),
        ];
        assert!(build_settlements(&areas, 500.0, 100.0, None).is_empty());
    }

    #[test]
    fn explicit_adjacency_is_honored() {
        let pairs = vec![("a1".to_string(), "a2".to_string())];
        let areas = vec![
            area("a1", "R", 600.0, 0.0, 0.0),
            area("a2", "R", 600.0, 5.0, 5.0),
        ];
        let s = build_settlements(&areas, 500.0, 1000.0, Some(&pairs));
        assert_eq!(s.len(), 1);
    }

    fn settlement(id: &str, region: &str, pop: f64, x: f64, y: f64) -> Settlement {
        Settlement {
            settlement_id: id.into(),
            region_id: region.into(),
            population: pop,
            member_area_ids: vec![],
            x_km: x,
            y_km: y,
            has_core_node: false,
        }
    }

    #[test]
    fn mst_on_three_settlements_with_core_at_origin() {
        // Core node at (0,0); settlements at (3,0) and (3,4). The three
        // spanning trees cost 3+4=7, 3+5=8 and 4+5=9.
        let settlements = vec![
            settlement("s0", "R", 20_000.0, 0.0, 0.0),
            settlement("s1", "R", 15_000.0, 3.0, 0.0),
            settlement("s2", "R", 12_000.0, 3.0, 4.0),
        ];
        let core = vec![vec![(0.0, 0.0), (0.0, 0.1)]];
        let net = design_fiber(&settlements, &core, 10_000.0, 2.0);
        assert_relative_eq!(net.total_new_km, 7.0, max_relative = 1e-12);
        assert_eq!(net.new_edges.len(), 2);
        assert!(net
            .new_edges
            .iter()
            .all(|e| e.kind == EdgeKind::Regional));
    }

    #[test]
    fn settlement_near_edge_needs_no_build() {
        let settlements = vec![settlement("s0", "R", 20_000.0, 0.0, 1.0)];
        let core = vec![vec![(-10.0, 0.0), (10.0, 0.0)]];
        let net = design_fiber(&settlements, &core, 10_000.0, 2.0);
        assert!(net.settlements[0].has_core_node);
        assert_eq!(net.total_new_km, 0.0);
        assert!(net.new_edges.is_empty());
    }

    #[test]
    fn single_core_settlement_has_empty_edge_set() {
        let settlements = vec![settlement("s0", "R", 50_000.0, 0.0, 0.0)];
        let core = vec![vec![(0.0, -1.0), (0.0, 1.0)]];
        let net = design_fiber(&settlements, &core, 10_000.0, 2.0);
        assert!(net.new_edges.is_empty());
        assert_eq!(net.total_new_km, 0.0);
    }

    #[test]
    fn region_without_core_links_largest_settlement() {
        let settlements = vec![
            settlement("s0", "A", 30_000.0, 0.0, 0.0),
            settlement("s1", "B", 40_000.0, 10.0, 0.0),
            settlement("s2", "B", 12_000.0, 13.0, 0.0),
        ];
        // Core edge only near region A.
        let core = vec![vec![(0.0, -1.0), (0.0, 1.0)]];
        let net = design_fiber(&settlements, &core, 10_000.0, 2.0);
        let core_edges: Vec<_> = net
            .new_edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Core)
            .collect();
        assert_eq!(core_edges.len(), 1);
        assert_eq!(core_edges[0].from_id, "s1");
        // s2 then joins via a 3 km regional edge.
        let regional: Vec<_> = net
            .new_edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Regional)
            .collect();
        assert_eq!(regional.len(), 1);
        assert_relative_eq!(regional[0].length_km, 3.0, max_relative = 1e-12);
        assert!(net.isolated_regions.is_empty());
    }

    #[test]
    fn isolated_region_is_reported() {
        let settlements = vec![settlement("s0", "A", 30_000.0, 0.0, 0.0)];
        let net = design_fiber(&settlements, &[], 10_000.0, 2.0);
        assert_eq!(net.isolated_regions, vec!["A".to_string()]);
        assert!(net.new_edges.is_empty());
    }

    #[test]
    fn mean_backhaul_distance_hand_evaluated() {
        assert_relative_eq!(mean_backhaul_distance(0.01).unwrap(), 5.0);
        assert_relative_eq!(mean_backhaul_distance(1.0).unwrap(), 0.5);
        assert_relative_eq!(mean_backhaul_distance(0.25).unwrap(), 1.0);
        assert!(mean_backhaul_distance(0.0).is_err());
        assert!(mean_backhaul_distance(-1.0).is_err());
    }
}
