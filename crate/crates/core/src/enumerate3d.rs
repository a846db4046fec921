//! The classification pipeline for smooth 3-polytopes: strict Cayley
//! polytopes, blow-up closure, deduplication and catalog verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    blow_downs, blow_up_face, blowup_faces, cayley_pair, cayley_segments, is_minimal, k_delta,
    pair_smooth, segments_smooth, CayleyRecipe,
};
use crate::enumerate2d::{enumerate_smooth_polygons, PolygonEntry};
use crate::error::{Error, Result};
use crate::fans::{is_smooth, normal_fan, SurfaceClass};
use crate::geometry::{hull, Face, LatticePolytope};
use crate::iso::{canonical_form, corner_frames, CanonicalForm};
use crate::labels::{
    edge_blowup_labels, facet_point_lower_bound, is_realizable, label, vertex_blowup_labels,
    TriangulationLabel,
};
use crate::lattice::{LatticeVector, UnimodularAffineMap};

/// The four kinds of entries, in the order used to attribute overlaps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Simplex,
    CayleySegments,
    CayleyPair,
    Blowup,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Simplex => "simplex",
            Category::CayleySegments => "cayley_segments",
            Category::CayleyPair => "cayley_pair",
            Category::Blowup => "blowup",
        })
    }
}

/// One truncation step; `face` lists the vertices of the face in the
/// coordinates of the polytope being blown up.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlowUpStep {
    pub face: Vec<LatticeVector>,
    pub level: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Cayley {
        construction: CayleyRecipe,
    },
    BlowUp {
        base: CayleyRecipe,
        steps: Vec<BlowUpStep>,
    },
}

impl Recipe {
    pub fn build(&self) -> Result<LatticePolytope> {
        match self {
            Recipe::Cayley { construction } => construction.build(),
            Recipe::BlowUp { base, steps } => {
                let mut p = base.build()?;
                for step in steps {
                    let idx: Option<Vec<usize>> =
                        step.face.iter().map(|v| p.vertex_index(v)).collect();
                    let face = match idx.as_deref() {
                        Some([v]) => Face::Vertex(*v),
                        Some([a, b]) => Face::edge(*a, *b),
                        _ => return Err(Error::NotAFace(format!("{:?}", step.face))),
                    };
                    p = blow_up_face(&p, &face, step.level)?;
                }
                Ok(p)
            }
        }
    }

    fn base(&self) -> &CayleyRecipe {
        match self {
            Recipe::Cayley { construction } => construction,
            Recipe::BlowUp { base, .. } => base,
        }
    }

    fn steps(&self) -> &[BlowUpStep] {
        match self {
            Recipe::Cayley { .. } => &[],
            Recipe::BlowUp { steps, .. } => steps,
        }
    }

    /// Description of the toric variety, derived from the construction.
    pub fn fiber_description(&self) -> String {
        let base = match self.base() {
            CayleyRecipe::Simplex { .. } => "P^3".to_string(),
            CayleyRecipe::Segments { .. } => "P^2-bundle over P^1".to_string(),
            CayleyRecipe::Pair { base, .. } => format!("P^1-bundle over {}", surface_name(base)),
        };
        let steps = self.steps();
        if steps.is_empty() {
            return base;
        }
        let vertices = steps.iter().filter(|s| s.face.len() == 1).count();
        let edges = steps.len() - vertices;
        let mut parts = Vec::new();
        let plural =
            |n: usize, one: &str, many: &str| format!("{n} {}", if n == 1 { one } else { many });
        if vertices > 0 {
            parts.push(format!("at {}", plural(vertices, "vertex", "vertices")));
        }
        if edges > 0 {
            parts.push(format!("along {}", plural(edges, "edge", "edges")));
        }
        format!("blow-up of {base} {}", parts.join(" and "))
    }

    fn with_step(&self, step: BlowUpStep) -> Recipe {
        let mut steps = self.steps().to_vec();
        steps.push(step);
        Recipe::BlowUp {
            base: self.base().clone(),
            steps,
        }
    }

    fn without_last_step(&self) -> Option<Recipe> {
        match self {
            Recipe::Cayley { .. } => None,
            Recipe::BlowUp { base, steps } if steps.len() == 1 => Some(Recipe::Cayley {
                construction: base.clone(),
            }),
            Recipe::BlowUp { base, steps } => Some(Recipe::BlowUp {
                base: base.clone(),
                steps: steps[..steps.len() - 1].to_vec(),
            }),
        }
    }
}

/// "F1" -> "F_1", "Bl2(P2)" -> "Bl_2(P^2)", "P2" -> "P^2".
pub fn surface_name(group: &str) -> String {
    if let Some(r) = group.strip_prefix('F') {
        return format!("F_{r}");
    }
    if let Some(n) = group
        .strip_prefix("Bl")
        .and_then(|g| g.strip_suffix("(P2)"))
    {
        return format!("Bl_{n}(P^2)");
    }
    group.replace("P2", "P^2")
}

/// A polytope produced by some construction, before deduplication.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub polytope: LatticePolytope,
    pub canonical: CanonicalForm,
    pub category: Category,
    pub recipe: Recipe,
    /// Base fan class for Cayley pairs.
    pub group: Option<String>,
}

impl Candidate {
    fn new(
        polytope: LatticePolytope,
        category: Category,
        recipe: Recipe,
        group: Option<String>,
    ) -> Self {
        let canonical = canonical_form(&polytope).expect("constructions are smooth");
        Self {
            polytope,
            canonical,
            category,
            recipe,
            group,
        }
    }
}

/// Keeps the first candidate per canonical form, in input order.
fn dedup(cands: Vec<Candidate>) -> Vec<Candidate> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<Candidate> = cands
        .into_iter()
        .filter(|c| seen.insert(c.canonical.clone()))
        .collect();
    out.sort_by(|a, b| a.canonical.cmp(&b.canonical));
    out
}

fn binom3(k: i64) -> i64 {
    (k + 1) * (k + 2) * (k + 3) / 6
}

/// Smooth dilated simplices `k D_3` with at most `budget` points.
pub fn enumerate_category_i(budget: usize) -> Vec<Candidate> {
    (1..)
        .take_while(|&k| binom3(k) <= budget as i64)
        .map(|k| {
            Candidate::new(
                k_delta(3, k).unwrap(),
                Category::Simplex,
                Recipe::Cayley {
                    construction: CayleyRecipe::Simplex { k },
                },
                None,
            )
        })
        .collect()
}

/// Lattice points of the segments polytope, counted slice by slice.
pub fn segments_point_count(s: i64, i: i64, j: i64, k: i64) -> i64 {
    let mut n = 0;
    for a in 0..=s {
        for b in 0..=(s - a) {
            let c = s - a - b;
            n += (c * i + a * j + b * k).div_euclid(s) + 1;
        }
    }
    n
}

/// Parameters `(s, i, j, k)` with `i >= j >= k >= 1` of smooth segment
/// Cayley polytopes with at most `budget` points.
pub fn segment_parameters(budget: usize) -> Vec<(i64, i64, i64, i64)> {
    let budget = budget as i64;
    let mut out = Vec::new();
    for s in 1.. {
        if segments_point_count(s, 1, 1, 1) > budget {
            break;
        }
        for i in 1..=budget {
            for j in 1..=i {
                for k in 1..=j {
                    if segments_smooth(s, i, j, k) && segments_point_count(s, i, j, k) <= budget {
                        out.push((s, i, j, k));
                    }
                }
            }
        }
    }
    out
}

/// Smooth Cayley polytopes of three parallel segments, up to isomorphism.
pub fn enumerate_category_ii(budget: usize) -> Vec<Candidate> {
    let cands = segment_parameters(budget)
        .into_par_iter()
        .map(|(s, i, j, k)| {
            Candidate::new(
                cayley_segments(s, i, j, k).unwrap(),
                Category::CayleySegments,
                Recipe::Cayley {
                    construction: CayleyRecipe::Segments { s, i, j, k },
                },
                None,
            )
        })
        .collect();
    dedup(cands)
}

/// Name of a smooth surface fan class as used in the category-iii groups.
pub fn group_name(class: &SurfaceClass) -> String {
    class.to_string()
}

/// Translates a polygon so its lexicographically least vertex is the origin.
fn anchored(p: &LatticePolytope) -> LatticePolytope {
    p.translate(-p.vertex(0))
}

/// All placements of `p` (up to translation) whose normal fan is `fan_of`'s.
fn placements(p: &LatticePolytope, reference: &LatticePolytope) -> Vec<LatticePolytope> {
    let target = normal_fan(reference);
    let ref_frames = corner_frames(reference, 0).expect("smooth");
    let mut out = BTreeSet::new();
    for v in 0..p.vertices().len() {
        for f in corner_frames(p, v).expect("smooth") {
            for g in &ref_frames {
                // p -> corner -> reference frame, linear parts only
                let m = f.then(&g.inverse());
                let lin =
                    UnimodularAffineMap::new(&m.matrix_rows(), LatticeVector::zero(2)).unwrap();
                let q = anchored(&p.image(&lin));
                if normal_fan(&q) == target {
                    out.insert(q.vertices().to_vec());
                }
            }
        }
    }
    out.into_iter().map(|vs| hull(&vs).unwrap()).collect()
}

/// Smooth Cayley polytopes of two strictly isomorphic polygons, up to
/// isomorphism, with the base fan class of each.
pub fn enumerate_category_iii(budget: usize) -> Vec<Candidate> {
    claim(&enumerate_category_iii_groups(budget))
}

/// Merges the groups. A polytope produced over several bases is attributed
/// to the Hirzebruch surface with the largest r, matching the usual listing.
fn claim(groups: &BTreeMap<String, Vec<Candidate>>) -> Vec<Candidate> {
    let mut names: Vec<&String> = groups.keys().collect();
    names.sort_by_key(
        |g| match g.strip_prefix('F').and_then(|r| r.parse::<i64>().ok()) {
            Some(r) => (0, -r, String::new()),
            None => (1, 0, g.to_string()),
        },
    );
    dedup(
        names
            .into_iter()
            .flat_map(|g| groups[g].iter().cloned())
            .collect(),
    )
}

/// Category-iii candidates deduplicated within each base fan class.
pub fn enumerate_category_iii_groups(budget: usize) -> BTreeMap<String, Vec<Candidate>> {
    let polys = enumerate_smooth_polygons(budget.saturating_sub(3).max(3));
    let mut classes: BTreeMap<SurfaceClass, Vec<&PolygonEntry>> = BTreeMap::new();
    for p in &polys {
        classes.entry(p.fan_class.clone()).or_default().push(p);
    }
    let budget = budget as i64;
    let mut groups: BTreeMap<String, Vec<Candidate>> = BTreeMap::new();
    for (class, members) in &classes {
        let name = group_name(class);
        let reference = &members[0].polygon;
        let placed: Vec<Vec<LatticePolytope>> = members
            .par_iter()
            .map(|m| placements(&m.polygon, reference))
            .collect();
        let mut jobs = Vec::new();
        for (a, pa) in placed.iter().enumerate() {
            let p0 = &pa[0];
            for pb in &placed {
                for p1 in pb {
                    let n0 = members[a].num_points() as i64;
                    let n1 = p1.num_points() as i64;
                    let nv = p0.vertices().len() as i64;
                    for s in 1.. {
                        if n0 + n1 + (s - 1) * nv > budget {
                            break;
                        }
                        for tx in 0..s {
                            for ty in 0..s {
                                jobs.push((p0.clone(), p1.clone(), s, LatticeVector::new2(tx, ty)));
                            }
                        }
                    }
                }
            }
        }
        let found: Vec<Candidate> = jobs
            .into_par_iter()
            .filter_map(|(p0, p1, s, t)| {
                if !pair_smooth(&p0, &p1, s, t).ok()? {
                    return None;
                }
                let p = cayley_pair(&p0, &p1, s, t).ok()?;
                if p.num_points() as i64 > budget {
                    return None;
                }
                let recipe = Recipe::Cayley {
                    construction: CayleyRecipe::Pair {
                        s,
                        base: name.clone(),
                        p0: p0.vertices().to_vec(),
                        p1: p1.vertices().to_vec(),
                        t,
                    },
                };
                Some(Candidate::new(
                    p,
                    Category::CayleyPair,
                    recipe,
                    Some(name.clone()),
                ))
            })
            .collect();
        groups.entry(name).or_default().extend(found);
    }
    groups
        .into_iter()
        .map(|(k, v)| (k, dedup(v)))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

/// Settings for the blow-up closure.
#[derive(Clone, Copy, Debug)]
pub struct ClosureConfig {
    pub max_points: usize,
    /// Strict Cayley seeds are taken up to this many points.
    pub seed_budget: usize,
    /// Skip expanding polytopes whose blow-ups cannot fit the budget by the
    /// facet count and label bounds.
    pub prune: bool,
}

impl ClosureConfig {
    pub fn new(max_points: usize) -> Self {
        Self {
            max_points,
            seed_budget: max_points + 8,
            prune: true,
        }
    }
}

/// Whether some blow-up of a polytope with this label and facet count can
/// still end up within `max_points`.
fn worth_expanding(p: &LatticePolytope, max_points: usize) -> bool {
    let facets = p.facets().len();
    if facets >= 8 {
        // every blow-up has at least 9 facets and hence more than 16 points
        return false;
    }
    if facets == 7 {
        let Ok(l) = label(p) else { return false };
        let children: BTreeSet<TriangulationLabel> = vertex_blowup_labels(&l)
            .into_iter()
            .chain(edge_blowup_labels(&l))
            .collect();
        return children.iter().any(|c| {
            is_realizable(c) && facet_point_lower_bound(c).is_ok_and(|b| b <= max_points as i64)
        });
    }
    true
}

/// Preference among recipes for the same polytope: fewest edge steps, then a
/// minimal base, then fewest steps, then the base kind.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct RecipeCost {
    edge_steps: usize,
    base_not_minimal: bool,
    steps: usize,
    base_rank: u8,
    recipe: Recipe,
}

fn base_rank(c: Category) -> u8 {
    match c {
        Category::Simplex => 0,
        Category::CayleyPair => 1,
        Category::CayleySegments => 2,
        Category::Blowup => 3,
    }
}

impl RecipeCost {
    fn step(&self, step: BlowUpStep) -> Self {
        Self {
            edge_steps: self.edge_steps + usize::from(step.face.len() == 2),
            base_not_minimal: self.base_not_minimal,
            steps: self.steps + 1,
            base_rank: self.base_rank,
            recipe: self.recipe.with_step(step),
        }
    }
}

fn children(c: &Candidate) -> Vec<(LatticePolytope, BlowUpStep)> {
    let p = &c.polytope;
    let mut out = Vec::new();
    for face in blowup_faces(p) {
        for k in 1.. {
            let Ok(q) = blow_up_face(p, &face, k) else {
                break;
            };
            let step = BlowUpStep {
                face: face.vertices().iter().map(|&v| p.vertex(v)).collect(),
                level: k,
            };
            out.push((q, step));
        }
    }
    out
}

/// Every polytope reachable from the seeds by blow-ups that keeps within
/// `max_points`, by canonical form, each with its preferred recipe. The
/// preference is monotone under adding steps, so a best-first search
/// settles every polytope with its best recipe.
pub fn blowup_closure(
    seeds: &[Candidate],
    cfg: ClosureConfig,
) -> BTreeMap<CanonicalForm, Candidate> {
    let prune_applies = cfg.prune && cfg.max_points <= 16;
    let mut queue: BTreeSet<(RecipeCost, CanonicalForm)> = BTreeSet::new();
    let mut pending: BTreeMap<(RecipeCost, CanonicalForm), Candidate> = BTreeMap::new();
    let costs: Vec<RecipeCost> = seeds
        .par_iter()
        .map(|s| RecipeCost {
            edge_steps: 0,
            base_not_minimal: !is_minimal(&s.polytope),
            steps: 0,
            base_rank: base_rank(s.category),
            recipe: s.recipe.clone(),
        })
        .collect();
    for (s, cost) in seeds.iter().zip(costs) {
        let key = (cost, s.canonical.clone());
        queue.insert(key.clone());
        pending.insert(key, s.clone());
    }
    let mut settled: BTreeMap<CanonicalForm, Candidate> = BTreeMap::new();
    let mut found: BTreeMap<CanonicalForm, Candidate> = BTreeMap::new();
    while let Some(key) = queue.pop_first() {
        let c = pending.remove(&key).expect("queued candidates are pending");
        if settled.contains_key(&c.canonical) {
            continue;
        }
        settled.insert(c.canonical.clone(), c.clone());
        if c.category == Category::Blowup && c.polytope.num_points() <= cfg.max_points {
            found.insert(c.canonical.clone(), c.clone());
        }
        if prune_applies && !worth_expanding(&c.polytope, cfg.max_points) {
            continue;
        }
        let next: Vec<Candidate> = children(&c)
            .into_par_iter()
            .map(|(q, step)| Candidate::new(q, Category::Blowup, c.recipe.with_step(step), None))
            .collect();
        for child in next {
            if settled.contains_key(&child.canonical) {
                continue;
            }
            let step = child
                .recipe
                .steps()
                .last()
                .cloned()
                .expect("children have a step");
            let cost = key.0.step(step);
            let k = (cost, child.canonical.clone());
            queue.insert(k.clone());
            pending.insert(k, child);
        }
    }
    found
}

/// Seeds for the closure: all strict Cayley polytopes up to the seed budget.
pub fn cayley_seeds(seed_budget: usize) -> Vec<Candidate> {
    let mut seeds = enumerate_category_i(seed_budget);
    seeds.extend(enumerate_category_ii(seed_budget));
    seeds.extend(enumerate_category_iii(seed_budget));
    seeds
}

/// Blow-ups within budget that are not strict Cayley polytopes.
pub fn enumerate_category_iv(cayley: &[Candidate], cfg: ClosureConfig) -> Vec<Candidate> {
    let known: BTreeSet<&CanonicalForm> = cayley.iter().map(|c| &c.canonical).collect();
    let seeds = cayley_seeds(cfg.seed_budget);
    blowup_closure(&seeds, cfg)
        .into_values()
        .filter(|c| !known.contains(&c.canonical))
        .collect()
}

/// A classified smooth polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    pub polytope: LatticePolytope,
    pub canonical: CanonicalForm,
    pub category: Category,
    pub recipe: Recipe,
    pub f_vector: (usize, usize, usize),
    pub label: TriangulationLabel,
    pub minimal: bool,
    pub parent: Option<String>,
    pub fiber_description: String,
}

impl CatalogEntry {
    pub fn num_points(&self) -> usize {
        self.canonical.num_points()
    }

    pub fn embedding_dim(&self) -> usize {
        self.num_points() - 1
    }
}

pub fn entry_id(dim: usize, num_points: usize, index: usize) -> String {
    format!("smooth{dim}-{num_points:02}-{index:02}")
}

/// Counts reported alongside the catalog.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tallies {
    pub total: usize,
    /// Entries produced by each category (overlaps counted in both).
    pub simplex: usize,
    pub cayley_segments: usize,
    pub cayley_pair: usize,
    pub blowup: usize,
    /// Raw first-order segment parameter triples.
    pub segment_triples_s1: usize,
    /// Cayley-pair entries isomorphic to a segments entry.
    pub pair_segment_overlap: usize,
    /// Distinct Cayley-pair polytopes per base fan class.
    pub pair_groups: BTreeMap<String, usize>,
    /// For each class, how many of its polytopes also occur in another class.
    pub pair_group_shared: BTreeMap<String, usize>,
}

pub struct Classification {
    pub entries: Vec<CatalogEntry>,
    pub tallies: Tallies,
    /// Pairs of base fan classes producing the same Cayley-pair polytope.
    pub duplicate_graph: BTreeMap<(String, String), usize>,
}

/// Runs the full pipeline.
pub fn classify(cfg: ClosureConfig) -> Classification {
    let budget = cfg.max_points;
    let cat_i = enumerate_category_i(budget);
    let cat_ii = enumerate_category_ii(budget);
    let groups = enumerate_category_iii_groups(budget);
    let cat_iii = claim(&groups);
    let mut cayley: Vec<Candidate> = cat_i
        .iter()
        .chain(&cat_ii)
        .chain(&cat_iii)
        .cloned()
        .collect();
    let cat_iv = enumerate_category_iv(&cayley, cfg);

    let mut tallies = Tallies {
        simplex: cat_i.len(),
        cayley_segments: cat_ii.len(),
        cayley_pair: cat_iii.len(),
        blowup: cat_iv.len(),
        segment_triples_s1: segment_parameters(budget)
            .iter()
            .filter(|p| p.0 == 1)
            .count(),
        ..Default::default()
    };
    let seg: BTreeSet<&CanonicalForm> = cat_ii.iter().map(|c| &c.canonical).collect();
    tallies.pair_segment_overlap = cat_iii
        .iter()
        .filter(|c| seg.contains(&c.canonical))
        .count();
    let mut owners: BTreeMap<&CanonicalForm, Vec<&String>> = BTreeMap::new();
    for (g, cs) in &groups {
        tallies.pair_groups.insert(g.clone(), cs.len());
        for c in cs {
            owners.entry(&c.canonical).or_default().push(g);
        }
    }
    let mut duplicate_graph = BTreeMap::new();
    for (g, cs) in &groups {
        let shared = cs.iter().filter(|c| owners[&c.canonical].len() > 1).count();
        tallies.pair_group_shared.insert(g.clone(), shared);
    }
    for gs in owners.values() {
        for (a, x) in gs.iter().enumerate() {
            for y in &gs[a + 1..] {
                *duplicate_graph
                    .entry(((*x).clone(), (*y).clone()))
                    .or_insert(0) += 1;
            }
        }
    }

    cayley.extend(cat_iv);
    let entries = assemble(3, cayley);
    tallies.total = entries.len();
    Classification {
        entries,
        tallies,
        duplicate_graph,
    }
}

/// Deduplicates by canonical form (earliest category wins), assigns ids and
/// fills in the derived fields.
fn assemble(dim: usize, cands: Vec<Candidate>) -> Vec<CatalogEntry> {
    let mut best: BTreeMap<CanonicalForm, Candidate> = BTreeMap::new();
    for c in cands {
        match best.get(&c.canonical) {
            Some(old) if old.category <= c.category => {}
            _ => {
                best.insert(c.canonical.clone(), c);
            }
        }
    }
    let mut by_points: BTreeMap<usize, Vec<Candidate>> = BTreeMap::new();
    for (_, c) in best {
        by_points
            .entry(c.canonical.num_points())
            .or_default()
            .push(c);
    }
    let mut ids: BTreeMap<CanonicalForm, String> = BTreeMap::new();
    let mut staged = Vec::new();
    for (n, cs) in by_points {
        for (i, c) in cs.into_iter().enumerate() {
            let id = entry_id(dim, n, i + 1);
            ids.insert(c.canonical.clone(), id.clone());
            staged.push((id, c));
        }
    }
    staged
        .into_par_iter()
        .map(|(id, c)| {
            let polytope = c.canonical.polytope();
            let parent = c
                .recipe
                .without_last_step()
                .and_then(|r| r.build().ok())
                .and_then(|p| canonical_form(&p).ok())
                .and_then(|pc| ids.get(&pc).cloned());
            CatalogEntry {
                id,
                f_vector: polytope.f_vector(),
                label: label(&polytope).expect("smooth polytopes are simple"),
                minimal: is_minimal(&polytope),
                parent,
                fiber_description: format!(
                    "{} embedded in P^{}",
                    c.recipe.fiber_description(),
                    c.canonical.num_points() - 1
                ),
                category: c.category,
                recipe: c.recipe,
                canonical: c.canonical,
                polytope,
            }
        })
        .collect()
}

pub fn classify_all() -> Classification {
    classify(ClosureConfig::new(16))
}

/// Labels allowed for minimal entries.
pub fn minimal_labels() -> BTreeSet<TriangulationLabel> {
    ["3^4", "3^2 4^3", "4^6", "4^5 5^2", "4^6 6^2"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

/// One class of assertions with the entries violating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.violations.is_empty())
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations.len()).sum()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.violations.is_empty() {
                "ok"
            } else {
                "FAIL"
            };
            writeln!(
                f,
                "{status:4} {} ({} violations)",
                c.name,
                c.violations.len()
            )?;
            for v in &c.violations {
                writeln!(f, "     {v}")?;
            }
        }
        Ok(())
    }
}

/// Polytopes and ids to verify; the catalog file stores only vertices.
pub struct VerifyInput<'a> {
    pub id: &'a str,
    pub vertices: &'a [LatticeVector],
    pub minimal: Option<bool>,
}

/// Checks the structural facts every entry of a catalog with at most
/// `max_points` points must satisfy, and closure under blow-ups and
/// blow-downs within the budget.
pub fn verify_catalog(items: &[VerifyInput<'_>], max_points: usize) -> VerifyReport {
    let mut checks: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
    let names = [
        "full-dimensional 3-polytope",
        "smooth",
        "point budget",
        "at most 8 facets and 12 vertices",
        "E = 3V/2 and F = 2 + V/2",
        "facets are smooth polygons",
        "minimal entries have minimal labels",
        "minimal flag matches",
        "distinct canonical forms",
        "closed under blow-ups",
        "closed under blow-downs",
    ];
    for n in names {
        checks.insert(n, Vec::new());
    }
    let allowed = minimal_labels();
    let mut polys: Vec<(&str, LatticePolytope, CanonicalForm)> = Vec::new();
    for it in items {
        let p = match hull(it.vertices) {
            Ok(p) if p.dim() == 3 && p.vertices().len() == it.vertices.len() => p,
            _ => {
                checks
                    .get_mut("full-dimensional 3-polytope")
                    .unwrap()
                    .push(it.id.to_string());
                continue;
            }
        };
        if !is_smooth(&p) {
            checks.get_mut("smooth").unwrap().push(it.id.to_string());
            continue;
        }
        if p.num_points() > max_points {
            checks.get_mut("point budget").unwrap().push(format!(
                "{} has {} points",
                it.id,
                p.num_points()
            ));
        }
        let (v, e, f) = p.f_vector();
        if f > 8 || v > 12 {
            checks
                .get_mut("at most 8 facets and 12 vertices")
                .unwrap()
                .push(format!("{} has f-vector ({v},{e},{f})", it.id));
        }
        if 2 * e != 3 * v || 2 * f != 4 + v {
            checks
                .get_mut("E = 3V/2 and F = 2 + V/2")
                .unwrap()
                .push(it.id.to_string());
        }
        if !(0..f).all(|i| p.facet_is_smooth(i)) {
            checks
                .get_mut("facets are smooth polygons")
                .unwrap()
                .push(it.id.to_string());
        }
        let minimal = is_minimal(&p);
        if minimal {
            let l = label(&p).unwrap();
            if !allowed.contains(&l) {
                checks
                    .get_mut("minimal entries have minimal labels")
                    .unwrap()
                    .push(format!("{} is minimal with label {l}", it.id));
            }
        }
        if it.minimal.is_some_and(|m| m != minimal) {
            checks
                .get_mut("minimal flag matches")
                .unwrap()
                .push(it.id.to_string());
        }
        let c = canonical_form(&p).unwrap();
        polys.push((it.id, p, c));
    }
    let mut by_form: BTreeMap<&CanonicalForm, &str> = BTreeMap::new();
    for (id, _, c) in &polys {
        if let Some(other) = by_form.insert(c, id) {
            checks
                .get_mut("distinct canonical forms")
                .unwrap()
                .push(format!("{id} is isomorphic to {other}"));
        }
    }
    let closure: Vec<(Vec<String>, Vec<String>)> = polys
        .par_iter()
        .map(|(id, p, _)| {
            let mut up = Vec::new();
            for face in blowup_faces(p) {
                for k in 1.. {
                    let Ok(q) = blow_up_face(p, &face, k) else {
                        break;
                    };
                    if q.num_points() <= max_points
                        && !by_form.contains_key(&canonical_form(&q).unwrap())
                    {
                        up.push(format!("{id}: blow-up of {face:?} at level {k} is missing"));
                    }
                }
            }
            let mut down = Vec::new();
            for (f, q) in blow_downs(p) {
                if q.num_points() <= max_points
                    && !by_form.contains_key(&canonical_form(&q).unwrap())
                {
                    down.push(format!("{id}: blow-down of facet {f} is missing"));
                }
            }
            (up, down)
        })
        .collect();
    for (up, down) in closure {
        checks.get_mut("closed under blow-ups").unwrap().extend(up);
        checks
            .get_mut("closed under blow-downs")
            .unwrap()
            .extend(down);
    }
    VerifyReport {
        checks: names
            .iter()
            .map(|n| CheckResult {
                name: n,
                violations: checks.remove(n).unwrap(),
            })
            .collect(),
    }
}

/// Verification of an in-memory catalog.
pub fn verify_entries(entries: &[CatalogEntry], max_points: usize) -> VerifyReport {
    let items: Vec<VerifyInput<'_>> = entries
        .iter()
        .map(|e| VerifyInput {
            id: &e.id,
            vertices: e.polytope.vertices(),
            minimal: Some(e.minimal),
        })
        .collect();
    verify_catalog(&items, max_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_point_count_matches_hull() {
        for (s, i, j, k) in [
            (1, 1, 1, 1),
            (1, 5, 3, 2),
            (2, 3, 1, 1),
            (2, 4, 2, 2),
            (3, 4, 1, 1),
        ] {
            let p = cayley_segments(s, i, j, k).unwrap();
            assert_eq!(
                segments_point_count(s, i, j, k),
                p.num_points() as i64,
                "{s} {i} {j} {k}"
            );
        }
    }

    #[test]
    fn first_order_triples() {
        let params = segment_parameters(16);
        let s1: Vec<_> = params.iter().filter(|p| p.0 == 1).collect();
        assert_eq!(s1.len(), 67);
        assert!(s1.iter().all(|&&(_, i, j, k)| i + j + k <= 13 && k <= 4));
        assert!(params.iter().all(|p| p.0 <= 2));
    }

    #[test]
    fn simplices() {
        let c = enumerate_category_i(16);
        assert_eq!(c.len(), 2);
        assert_eq!(enumerate_category_i(20).len(), 3);
    }

    #[test]
    fn recipes_rebuild_their_polytopes() {
        let cands = enumerate_category_iii(12);
        assert!(!cands.is_empty());
        for c in cands {
            let p = c.recipe.build().unwrap();
            assert_eq!(canonical_form(&p).unwrap(), c.canonical);
        }
    }

    #[test]
    fn blowup_recipe_round_trip() {
        let base = CayleyRecipe::Simplex { k: 3 };
        let p = base.build().unwrap();
        let v = p.vertex(0);
        let r = Recipe::Cayley { construction: base }.with_step(BlowUpStep {
            face: vec![v],
            level: 1,
        });
        let q = r.build().unwrap();
        assert_eq!(q.num_points(), 19);
        assert_eq!(r.fiber_description(), "blow-up of P^3 at 1 vertex");
        assert_eq!(r.without_last_step().unwrap().build().unwrap(), p);
        let bad = Recipe::BlowUp {
            base: CayleyRecipe::Simplex { k: 3 },
            steps: vec![BlowUpStep {
                face: vec![LatticeVector::new3(1, 1, 1)],
                level: 1,
            }],
        };
        assert!(bad.build().is_err());
    }

    #[test]
    fn ids_sort_numerically() {
        assert_eq!(entry_id(3, 4, 1), "smooth3-04-01");
        assert!(entry_id(3, 9, 12) < entry_id(3, 10, 1));
    }

    #[test]
    fn verify_flags_broken_catalogs() {
        let c = classify(ClosureConfig::new(10));
        assert!(verify_entries(&c.entries, 10).ok());
        let chopped = blow_up_face(&k_delta(3, 2).unwrap(), &Face::Vertex(0), 1).unwrap();
        let gone = canonical_form(&chopped).unwrap();
        let mut missing = c.entries.clone();
        missing.retain(|e| e.canonical != gone);
        assert_eq!(missing.len() + 1, c.entries.len());
        let report = verify_entries(&missing, 10);
        assert!(!report.ok());
        let ups = report
            .checks
            .iter()
            .find(|c| c.name == "closed under blow-ups")
            .unwrap();
        assert!(!ups.violations.is_empty());
        let mut dup = c.entries.clone();
        dup.push(c.entries[0].clone());
        assert!(!verify_entries(&dup, 10).ok());
    }
}
