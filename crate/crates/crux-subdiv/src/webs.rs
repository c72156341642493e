//! Stars, units and webs: the intermediate structures that are grown inside
//! an expander and finally joined into a clique subdivision.
//!
//! A unit is a center joined by short internally disjoint paths to the
//! centers of disjoint stars; its interior is the center, the paths and the
//! star centers, and its exterior is the set of star leaves. A web is a center
//! joined by short internally disjoint paths to the centers of disjoint
//! units; its core is the center plus those paths.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Path, VertexSet};
use crate::search::{Bfs, Marks};
use crate::subdivision::{verify_subdivision, SubdivisionCertificate};

/// A center vertex together with some of its neighbours as leaves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub leaves: VertexSet,
}

impl Star {
    /// Center followed by the leaves.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.center).chain(self.leaves.iter())
    }
}

/// Unit shape: at least `h1` branches, `h2` leaves per star, paths of length
/// at most `h3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitParams {
    pub h1: usize,
    pub h2: usize,
    pub h3: usize,
}

/// A path from the unit center to a star center, and that star.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitBranch {
    pub path: Path,
    pub star: Star,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub center: usize,
    pub branches: Vec<UnitBranch>,
    pub params: UnitParams,
}

impl Unit {
    /// Center, branch paths and star centers.
    pub fn interior(&self) -> VertexSet {
        std::iter::once(self.center).chain(self.branches.iter().flat_map(|b| b.path.vertices().iter().copied())).collect()
    }

    /// All star leaves.
    pub fn exterior(&self) -> VertexSet {
        self.branches.iter().flat_map(|b| b.star.leaves.iter()).collect()
    }

    pub fn vertices(&self) -> VertexSet {
        self.interior().union(&self.exterior())
    }
}

/// Web shape: at least `h4` branches with paths of length at most `h5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WebParams {
    pub h4: usize,
    pub h5: usize,
}

/// A path from the web center to a unit center, and that unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WebBranch {
    pub path: Path,
    pub unit: Unit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Web {
    pub center: usize,
    pub branches: Vec<WebBranch>,
    pub params: WebParams,
}

impl Web {
    /// Center and connecting-path vertices other than unit centers.
    pub fn core(&self) -> VertexSet {
        std::iter::once(self.center)
            .chain(self.branches.iter().flat_map(|b| {
                let vs = b.path.vertices();
                vs[..vs.len().saturating_sub(1)].iter().copied()
            }))
            .collect()
    }

    /// Core plus unit interiors.
    pub fn interior(&self) -> VertexSet {
        self.branches.iter().fold(self.core(), |acc, b| acc.union(&b.unit.interior()))
    }

    /// Union of unit exteriors.
    pub fn exterior(&self) -> VertexSet {
        self.branches.iter().flat_map(|b| b.unit.exterior().into_vec()).collect()
    }

    pub fn vertices(&self) -> VertexSet {
        self.interior().union(&self.exterior())
    }
}

/// One broken structural invariant of a [`Unit`] or [`Web`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureViolation {
    VertexOutOfRange { vertex: usize },
    TooFewBranches { have: usize, need: usize },
    TooFewLeaves { star: usize, have: usize, need: usize },
    MissingEdge { u: usize, v: usize },
    CenterIsLeaf { star: usize },
    PathTooLong { end: usize, len: usize, max: usize },
    PathEndpoints { end: usize },
    RepeatedVertex { vertex: usize },
    PathsOverlap { vertex: usize },
    PathMeetsStar { vertex: usize },
    StarsOverlap { vertex: usize },
    UnitsOverlap { vertex: usize },
    PathMeetsUnit { vertex: usize },
    InUnit { center: usize, violation: Box<StructureViolation> },
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use StructureViolation::*;
        match self {
            VertexOutOfRange { vertex } => write!(f, "vertex {vertex} out of range"),
            TooFewBranches { have, need } => write!(f, "{have} branches, need {need}"),
            TooFewLeaves { star, have, need } => write!(f, "star at {star} has {have} leaves, need {need}"),
            MissingEdge { u, v } => write!(f, "non-edge {u}-{v}"),
            CenterIsLeaf { star } => write!(f, "star center {star} listed as its own leaf"),
            PathTooLong { end, len, max } => write!(f, "path to {end} has length {len} > {max}"),
            PathEndpoints { end } => write!(f, "path to {end} has wrong endpoints"),
            RepeatedVertex { vertex } => write!(f, "path repeats vertex {vertex}"),
            PathsOverlap { vertex } => write!(f, "branch paths overlap at {vertex}"),
            PathMeetsStar { vertex } => write!(f, "path meets a star away from its center at {vertex}"),
            StarsOverlap { vertex } => write!(f, "stars overlap at {vertex}"),
            UnitsOverlap { vertex } => write!(f, "units overlap at {vertex}"),
            PathMeetsUnit { vertex } => write!(f, "path meets a unit away from its center at {vertex}"),
            InUnit { center, violation } => write!(f, "unit at {center}: {violation}"),
        }
    }
}

/// Checks adjacency, distinctness, endpoints and length of a branch path.
fn check_path(g: &Graph, path: &Path, from: usize, to: usize, max: usize, out: &mut Vec<StructureViolation>) -> bool {
    let vs = path.vertices();
    let n = g.n();
    if let Some(&v) = vs.iter().find(|&&v| v >= n) {
        out.push(StructureViolation::VertexOutOfRange { vertex: v });
        return false;
    }
    let mut ok = true;
    if vs.len() < 2 || vs[0] != from || vs[vs.len() - 1] != to {
        out.push(StructureViolation::PathEndpoints { end: to });
        ok = false;
    }
    if path.len() > max {
        out.push(StructureViolation::PathTooLong { end: to, len: path.len(), max });
    }
    for w in vs.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            out.push(StructureViolation::MissingEdge { u: w[0], v: w[1] });
            ok = false;
        }
    }
    let mut seen = BTreeSet::new();
    for &v in vs {
        if !seen.insert(v) {
            out.push(StructureViolation::RepeatedVertex { vertex: v });
            ok = false;
        }
    }
    ok
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum UnitRole {
    Center,
    Path(usize),
    Leaf,
}

/// Every broken invariant of `u` in `g` (empty means valid).
pub fn validate_unit(g: &Graph, u: &Unit) -> Vec<StructureViolation> {
    use StructureViolation::*;
    let mut out = Vec::new();
    if u.center >= g.n() {
        out.push(VertexOutOfRange { vertex: u.center });
        return out;
    }
    if u.branches.len() < u.params.h1 {
        out.push(TooFewBranches { have: u.branches.len(), need: u.params.h1 });
    }
    let mut role: HashMap<usize, UnitRole> = HashMap::new();
    role.insert(u.center, UnitRole::Center);
    for (b, branch) in u.branches.iter().enumerate() {
        let star = &branch.star;
        check_path(g, &branch.path, u.center, star.center, u.params.h3, &mut out);
        let mut local = BTreeSet::new();
        for &v in branch.path.vertices().iter().skip(1) {
            if !local.insert(v) {
                continue;
            }
            match role.get(&v) {
                None => {
                    role.insert(v, UnitRole::Path(b));
                }
                Some(UnitRole::Leaf) => out.push(PathMeetsStar { vertex: v }),
                Some(_) => out.push(PathsOverlap { vertex: v }),
            }
        }
        if star.leaves.len() < u.params.h2 {
            out.push(TooFewLeaves { star: star.center, have: star.leaves.len(), need: u.params.h2 });
        }
        for leaf in star.leaves.iter() {
            if leaf >= g.n() {
                out.push(VertexOutOfRange { vertex: leaf });
                continue;
            }
            if leaf == star.center {
                out.push(CenterIsLeaf { star: star.center });
                continue;
            }
            if star.center < g.n() && !g.has_edge(star.center, leaf) {
                out.push(MissingEdge { u: star.center, v: leaf });
            }
            match role.get(&leaf) {
                None => {
                    role.insert(leaf, UnitRole::Leaf);
                }
                Some(UnitRole::Leaf) => out.push(StarsOverlap { vertex: leaf }),
                Some(UnitRole::Path(_)) | Some(UnitRole::Center) => out.push(PathMeetsStar { vertex: leaf }),
            }
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum WebRole {
    Center,
    Core,
    Unit(usize),
}

/// Every broken invariant of `w` in `g`, including those of its units.
pub fn validate_web(g: &Graph, w: &Web) -> Vec<StructureViolation> {
    use StructureViolation::*;
    let mut out = Vec::new();
    if w.center >= g.n() {
        out.push(VertexOutOfRange { vertex: w.center });
        return out;
    }
    if w.branches.len() < w.params.h4 {
        out.push(TooFewBranches { have: w.branches.len(), need: w.params.h4 });
    }
    let mut role: HashMap<usize, WebRole> = HashMap::new();
    role.insert(w.center, WebRole::Center);
    for (b, branch) in w.branches.iter().enumerate() {
        check_path(g, &branch.path, w.center, branch.unit.center, w.params.h5, &mut out);
        let vs = branch.path.vertices();
        for &v in vs.iter().skip(1).take(vs.len().saturating_sub(2)) {
            match role.get(&v) {
                None => {
                    role.insert(v, WebRole::Core);
                }
                Some(WebRole::Unit(_)) => out.push(PathMeetsUnit { vertex: v }),
                Some(_) => out.push(PathsOverlap { vertex: v }),
            }
        }
        for violation in validate_unit(g, &branch.unit) {
            out.push(InUnit { center: branch.unit.center, violation: Box::new(violation) });
        }
        for v in branch.unit.vertices().iter() {
            match role.get(&v) {
                None => {
                    role.insert(v, WebRole::Unit(b));
                }
                Some(WebRole::Unit(_)) => out.push(UnitsOverlap { vertex: v }),
                Some(_) => out.push(PathMeetsUnit { vertex: v }),
            }
        }
    }
    out
}

/// Greedy vertex-disjoint stars with `leaf_count` leaves avoiding `w`: the
/// center is always a vertex of highest remaining degree (lowest id on ties)
/// and takes its lowest-id available neighbours as leaves. Stops after
/// `target` stars or when no vertex has enough available neighbours.
pub fn find_disjoint_stars(g: &Graph, w: &VertexSet, leaf_count: usize, target: usize) -> Vec<Star> {
    harvest_stars(g, w, leaf_count, target, |_| true, |_| true)
}

/// As [`find_disjoint_stars`], with centers restricted to `q` and leaves to
/// vertices outside `q`.
pub fn find_split_stars(g: &Graph, w: &VertexSet, q: &VertexSet, leaf_count: usize, target: usize) -> Vec<Star> {
    let mask = q.mask(g.n());
    harvest_stars(g, w, leaf_count, target, |v| mask[v], |v| !mask[v])
}

fn harvest_stars(
    g: &Graph,
    w: &VertexSet,
    leaf_count: usize,
    target: usize,
    center_ok: impl Fn(usize) -> bool,
    leaf_ok: impl Fn(usize) -> bool,
) -> Vec<Star> {
    let n = g.n();
    let mut stars = Vec::new();
    if leaf_count == 0 || target == 0 {
        return stars;
    }
    let mut free = vec![true; n];
    for v in w.iter().filter(|&v| v < n) {
        free[v] = false;
    }
    let mut deg = vec![0usize; n];
    let mut queue = BTreeSet::new();
    for v in 0..n {
        if free[v] && center_ok(v) {
            deg[v] = g.neighbors(v).iter().filter(|&&u| free[u] && leaf_ok(u)).count();
            if deg[v] >= leaf_count {
                queue.insert((Reverse(deg[v]), v));
            }
        }
    }
    let take = |v: usize, free: &mut Vec<bool>, deg: &mut Vec<usize>, queue: &mut BTreeSet<(Reverse<usize>, usize)>| {
        free[v] = false;
        queue.remove(&(Reverse(deg[v]), v));
        if leaf_ok(v) {
            for &u in g.neighbors(v) {
                if free[u] && center_ok(u) {
                    queue.remove(&(Reverse(deg[u]), u));
                    deg[u] -= 1;
                    if deg[u] >= leaf_count {
                        queue.insert((Reverse(deg[u]), u));
                    }
                }
            }
        }
    };
    while stars.len() < target {
        let Some(&(_, c)) = queue.iter().next() else { break };
        let leaves: Vec<usize> =
            g.neighbors(c).iter().copied().filter(|&u| free[u] && leaf_ok(u)).take(leaf_count).collect();
        take(c, &mut free, &mut deg, &mut queue);
        for &l in &leaves {
            take(l, &mut free, &mut deg, &mut queue);
        }
        stars.push(Star { center: c, leaves: VertexSet::from_vec(leaves) });
    }
    stars
}

/// Builds a unit from two families of stars. Maintains pair paths `P(i,j)`
/// from a leaf of `s_stars[i]` to a leaf of `r_stars[j]` of length at most
/// `h3 − 2`, avoiding `w` and every star center, with paths sharing an
/// index pairwise vertex-disjoint. The family is grown (most-connected star
/// first) until some star has `h1` partners, which yields a unit centered
/// there whose exterior stars are the partners minus all path vertices.
/// Returns `None` once the family is maximal.
pub fn build_unit(g: &Graph, w: &VertexSet, s_stars: &[Star], r_stars: &[Star], params: UnitParams) -> Option<Unit> {
    let n = g.n();
    if params.h1 == 0 || params.h3 < 2 {
        return None;
    }
    let max_len = params.h3 - 2;
    let mut base = vec![false; n];
    for v in w.iter().filter(|&v| v < n) {
        base[v] = true;
    }
    for s in s_stars.iter().chain(r_stars) {
        base[s.center] = true;
    }
    let sides = [s_stars, r_stars];
    // incident[side][i]: vertices of paths using star i of that side.
    let mut incident: [Vec<Vec<usize>>; 2] = [vec![Vec::new(); s_stars.len()], vec![Vec::new(); r_stars.len()]];
    let mut partners: [Vec<Vec<(usize, usize)>>; 2] = [vec![Vec::new(); s_stars.len()], vec![Vec::new(); r_stars.len()]];
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut bfs = Bfs::new(n);
    let mut blocked = Marks::new(n);
    let mut owner: Vec<Option<usize>> = vec![None; n];
    loop {
        let mut order: Vec<(usize, usize)> =
            (0..2).flat_map(|side| (0..sides[side].len()).map(move |i| (side, i))).collect();
        order.sort_by_key(|&(side, i)| (Reverse(partners[side][i].len()), side, i));
        let mut progress = false;
        for (side, i) in order {
            let other = 1 - side;
            let mut excluded: Vec<bool> = vec![false; sides[other].len()];
            for &(j, _) in &partners[side][i] {
                excluded[j] = true;
            }
            let found = loop {
                owner.iter_mut().for_each(|o| *o = None);
                let mut any = false;
                for (j, star) in sides[other].iter().enumerate() {
                    if !excluded[j] {
                        for l in star.leaves.iter() {
                            owner[l] = Some(j);
                            any = true;
                        }
                    }
                }
                if !any {
                    break None;
                }
                blocked.clear();
                for &v in &incident[side][i] {
                    blocked.insert(v);
                }
                let sources: Vec<usize> =
                    sides[side][i].leaves.iter().filter(|&l| !base[l] && !blocked.contains(l)).collect();
                if sources.is_empty() {
                    break None;
                }
                let is_blocked = |v: usize| base[v] || blocked.contains(v);
                let Some(p) = bfs.path(g, &sources, |v| owner[v].is_some() && !is_blocked(v), is_blocked, max_len)
                else {
                    break None;
                };
                let j = owner[*p.last().unwrap()].unwrap();
                if p.iter().all(|v| !incident[other][j].contains(v)) {
                    break Some((j, p));
                }
                // The shortest route collides with paths already at star j:
                // retry towards j alone with those paths blocked.
                for &v in &incident[other][j] {
                    blocked.insert(v);
                }
                let targets: Vec<bool> = {
                    let mut t = vec![false; n];
                    for l in sides[other][j].leaves.iter() {
                        t[l] = true;
                    }
                    t
                };
                let is_blocked = |v: usize| base[v] || blocked.contains(v);
                let sources: Vec<usize> = sources.into_iter().filter(|&s| !blocked.contains(s)).collect();
                if let Some(p) = bfs.path(g, &sources, |v| targets[v] && !is_blocked(v), is_blocked, max_len) {
                    break Some((j, p));
                }
                excluded[j] = true;
            };
            let Some((j, p)) = found else { continue };
            progress = true;
            incident[side][i].extend(p.iter().copied());
            incident[other][j].extend(p.iter().copied());
            let id = paths.len();
            // Stored oriented from the `s_stars` leaf to the `r_stars` leaf.
            let oriented = if side == 0 { p } else { p.into_iter().rev().collect() };
            paths.push(oriented);
            partners[side][i].push((j, id));
            partners[other][j].push((i, id));
            for (sd, idx) in [(side, i), (other, j)] {
                if partners[sd][idx].len() >= params.h1 {
                    if let Some(unit) = assemble_unit(g, sides, sd, idx, &partners[sd][idx], &paths, params) {
                        return Some(unit);
                    }
                }
            }
            break;
        }
        if !progress {
            return None;
        }
    }
}

fn assemble_unit(
    g: &Graph,
    sides: [&[Star]; 2],
    side: usize,
    idx: usize,
    partners: &[(usize, usize)],
    paths: &[Vec<usize>],
    params: UnitParams,
) -> Option<Unit> {
    let center = sides[side][idx].center;
    let used: BTreeSet<usize> = partners.iter().flat_map(|&(_, id)| paths[id].iter().copied()).collect();
    let mut branches = Vec::new();
    for &(j, id) in partners {
        let star = &sides[1 - side][j];
        let mut middle = paths[id].clone();
        if side == 1 {
            middle.reverse();
        }
        let mut route = Vec::with_capacity(middle.len() + 2);
        route.push(center);
        route.extend(middle);
        route.push(star.center);
        let leaves: Vec<usize> = star.leaves.iter().filter(|l| !used.contains(l)).collect();
        if leaves.len() >= params.h2 {
            branches.push(UnitBranch {
                path: Path::new(route),
                star: Star { center: star.center, leaves: VertexSet::from_vec(leaves) },
            });
        }
        if branches.len() == params.h1 {
            break;
        }
    }
    if branches.len() < params.h1 {
        return None;
    }
    let unit = Unit { center, branches, params };
    debug_assert!(validate_unit(g, &unit).is_empty(), "{:?}", validate_unit(g, &unit));
    Some(unit)
}

/// Builds a web centered at one of the `s_stars` centers. For each star in
/// turn, grows a family of shortest paths (length at most `h5`) from its
/// center to distinct unused unit centers, avoiding `w`, all star centers
/// and the family's earlier paths. Once a family reaches `2·h4` paths, units
/// holding at least `h1/2` path vertices are dropped, branches of the others
/// touching the paths are deleted, and the first `h4` survivors (now
/// `⌈h1/2⌉`-branch units) form the web.
pub fn build_web(g: &Graph, w: &VertexSet, s_stars: &[Star], units: &[Unit], params: WebParams) -> Option<Web> {
    let n = g.n();
    if params.h4 == 0 {
        return None;
    }
    let mut base = vec![false; n];
    for v in w.iter().filter(|&v| v < n) {
        base[v] = true;
    }
    for s in s_stars {
        base[s.center] = true;
    }
    let mut unit_of: Vec<Option<usize>> = vec![None; n];
    for (k, u) in units.iter().enumerate() {
        unit_of[u.center] = Some(k);
    }
    let mut bfs = Bfs::new(n);
    let mut used = Marks::new(n);
    for star in s_stars {
        let c = star.center;
        used.clear();
        let mut family: Vec<(usize, Vec<usize>)> = Vec::new();
        while family.len() < 2 * params.h4 {
            let blocked = |v: usize| (base[v] && v != c) || used.contains(v);
            let Some(p) = bfs.path(g, &[c], |v| unit_of[v].is_some() && !blocked(v), blocked, params.h5) else {
                break;
            };
            for &v in &p[1..] {
                used.insert(v);
            }
            family.push((unit_of[*p.last().unwrap()].unwrap(), p));
        }
        if family.len() < 2 * params.h4 {
            continue;
        }
        if let Some(web) = assemble_web(g, c, &family, units, params) {
            return Some(web);
        }
    }
    None
}

fn assemble_web(g: &Graph, center: usize, family: &[(usize, Vec<usize>)], units: &[Unit], params: WebParams) -> Option<Web> {
    let touched: BTreeSet<usize> = family.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let mut branches = Vec::new();
    for (k, p) in family {
        let unit = &units[*k];
        let hits = unit.vertices().iter().filter(|&v| v != unit.center && touched.contains(&v)).count();
        if 2 * hits >= unit.params.h1 && hits > 0 {
            continue;
        }
        let kept: Vec<UnitBranch> = unit
            .branches
            .iter()
            .filter(|b| {
                b.path.vertices()[1..].iter().all(|v| !touched.contains(v)) && b.star.leaves.iter().all(|v| !touched.contains(&v))
            })
            .cloned()
            .collect();
        let half = UnitParams { h1: unit.params.h1.div_ceil(2), ..unit.params };
        if kept.len() < half.h1 {
            continue;
        }
        branches.push(WebBranch { path: Path::new(p.clone()), unit: Unit { center: unit.center, branches: kept, params: half } });
        if branches.len() == params.h4 {
            break;
        }
    }
    if branches.len() < params.h4 {
        return None;
    }
    let web = Web { center, branches, params };
    debug_assert!(validate_web(g, &web).is_empty(), "{:?}", validate_web(g, &web));
    Some(web)
}

/// Bookkeeping from [`connect_units`] / [`connect_webs_traced`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionStats {
    pub paths_built: usize,
    pub branches_deleted: usize,
    pub units_deleted: usize,
    pub webs_deleted: usize,
}

/// Joins the centers of pairwise vertex-disjoint units into a clique
/// subdivision: for each pair in double-loop order, a shortest path between
/// the live exteriors avoiding all unit interiors and earlier paths is
/// extended through one branch of each unit to the centers. Stars used by a
/// connection are retired, as is any star with at least half of its leaves
/// on earlier paths. Returns `None` when some pair cannot be joined.
pub fn connect_units(g: &Graph, units: &[Unit]) -> (Option<SubdivisionCertificate>, ConnectionStats) {
    let n = g.n();
    let mut stats = ConnectionStats::default();
    let mut interior = vec![false; n];
    for u in units {
        for v in u.interior().iter() {
            interior[v] = true;
        }
    }
    let mut on_path = vec![false; n];
    let mut alive: Vec<Vec<bool>> = units.iter().map(|u| vec![true; u.branches.len()]).collect();
    let mut bfs = Bfs::new(n);
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut paths = Vec::new();
    let t = units.len();
    for i in 0..t {
        for j in i + 1..t {
            let live_leaves = |k: usize, on_path: &[bool], alive: &[Vec<bool>]| -> Vec<(usize, usize)> {
                units[k]
                    .branches
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| alive[k][*b])
                    .flat_map(|(b, br)| br.star.leaves.iter().map(move |l| (l, b)))
                    .filter(|&(l, _)| !on_path[l] && !interior[l])
                    .collect()
            };
            let src = live_leaves(i, &on_path, &alive);
            let dst = live_leaves(j, &on_path, &alive);
            owner.iter_mut().for_each(|o| *o = None);
            for &(l, b) in &dst {
                owner[l] = Some(b);
            }
            let src_branch: HashMap<usize, usize> = src.iter().copied().collect();
            let sources: Vec<usize> = src.iter().map(|&(l, _)| l).collect();
            let blocked = |v: usize| interior[v] || on_path[v];
            let Some(middle) = bfs.path(g, &sources, |v| owner[v].is_some(), blocked, usize::MAX) else {
                return (None, stats);
            };
            let (bi, bj) = (src_branch[&middle[0]], owner[*middle.last().unwrap()].unwrap());
            let mut full: Vec<usize> = units[i].branches[bi].path.vertices().to_vec();
            full.extend(&middle);
            full.extend(units[j].branches[bj].path.vertices().iter().rev());
            for &v in &full {
                on_path[v] = true;
            }
            alive[i][bi] = false;
            alive[j][bj] = false;
            stats.paths_built += 1;
            for (k, u) in units.iter().enumerate() {
                for (b, br) in u.branches.iter().enumerate() {
                    if alive[k][b] && 2 * br.star.leaves.iter().filter(|&l| on_path[l]).count() >= br.star.leaves.len() {
                        alive[k][b] = false;
                        stats.branches_deleted += 1;
                    }
                }
            }
            paths.push(Path::new(full));
        }
    }
    let cert = SubdivisionCertificate::from_paths(units.iter().map(|u| u.center).collect(), paths);
    debug_assert!(verify_subdivision(g, &cert).is_empty());
    (Some(cert), stats)
}

/// [`connect_webs_traced`] without the bookkeeping.
pub fn connect_webs(g: &Graph, webs: &[Web], s: usize) -> Option<SubdivisionCertificate> {
    connect_webs_traced(g, webs, s).0
}

/// Joins `s` of the given internally disjoint webs into a `K_s`-subdivision.
/// Repeatedly picks the first unconnected pair among the first `s` live
/// webs and joins live exterior leaves by a shortest path avoiding every
/// web interior and all earlier paths, then extends it through one live
/// unit and branch of each web to the two centers. Afterwards a branch dies
/// when its path meets an earlier path or half its leaves are used, a unit
/// dies when it was used or half its branches died, and a web dies when
/// half its units died other than by its own connections. A web that cannot
/// be joined is also retired.
pub fn connect_webs_traced(g: &Graph, webs: &[Web], s: usize) -> (Option<SubdivisionCertificate>, ConnectionStats) {
    let n = g.n();
    let mut stats = ConnectionStats::default();
    if s < 2 || webs.len() < s {
        return (None, stats);
    }
    let mut interior = vec![false; n];
    for w in webs {
        for v in w.interior().iter() {
            interior[v] = true;
        }
    }
    let mut on_path = vec![false; n];
    let mut web_alive = vec![true; webs.len()];
    let mut unit_alive: Vec<Vec<bool>> = webs.iter().map(|w| vec![true; w.branches.len()]).collect();
    let mut spent: Vec<Vec<bool>> = webs.iter().map(|w| vec![false; w.branches.len()]).collect();
    let mut branch_alive: Vec<Vec<Vec<bool>>> =
        webs.iter().map(|w| w.branches.iter().map(|b| vec![true; b.unit.branches.len()]).collect()).collect();
    let mut joined: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut bfs = Bfs::new(n);
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; n];
    loop {
        let front: Vec<usize> = (0..webs.len()).filter(|&i| web_alive[i]).take(s).collect();
        if front.len() < s {
            return (None, stats);
        }
        let Some((i, j)) = front
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| front[a + 1..].iter().map(move |&j| (i, j)))
            .find(|p| !joined.contains_key(p))
        else {
            let core: Vec<usize> = front.iter().map(|&i| webs[i].center).collect();
            let paths = front
                .iter()
                .enumerate()
                .flat_map(|(a, &i)| front[a + 1..].iter().map(move |&j| (i, j)))
                .map(|p| Path::new(joined[&p].clone()));
            let cert = SubdivisionCertificate::from_paths(core, paths);
            debug_assert!(verify_subdivision(g, &cert).is_empty());
            return (Some(cert), stats);
        };
        let live = |w: usize, on_path: &[bool], unit_alive: &[Vec<bool>], branch_alive: &[Vec<Vec<bool>>]| {
            let mut out = Vec::new();
            for (u, wb) in webs[w].branches.iter().enumerate() {
                if !unit_alive[w][u] {
                    continue;
                }
                for (b, ub) in wb.unit.branches.iter().enumerate() {
                    if branch_alive[w][u][b] {
                        out.extend(ub.star.leaves.iter().filter(|&l| !on_path[l] && !interior[l]).map(|l| (l, (u, b))));
                    }
                }
            }
            out
        };
        let src = live(i, &on_path, &unit_alive, &branch_alive);
        let dst = live(j, &on_path, &unit_alive, &branch_alive);
        owner.iter_mut().for_each(|o| *o = None);
        for &(l, ub) in &dst {
            owner[l] = Some(ub);
        }
        let src_of: HashMap<usize, (usize, usize)> = src.iter().copied().collect();
        let sources: Vec<usize> = src.iter().map(|&(l, _)| l).collect();
        let blocked = |v: usize| interior[v] || on_path[v];
        let middle = if sources.is_empty() {
            None
        } else {
            bfs.path(g, &sources, |v| owner[v].is_some(), blocked, usize::MAX)
        };
        let Some(middle) = middle else {
            web_alive[j] = false;
            stats.webs_deleted += 1;
            continue;
        };
        let (ui, bi) = src_of[&middle[0]];
        let (uj, bj) = owner[*middle.last().unwrap()].unwrap();
        let route = |w: usize, u: usize, b: usize| -> Vec<usize> {
            let wb = &webs[w].branches[u];
            let mut r = wb.path.vertices().to_vec();
            r.extend(&wb.unit.branches[b].path.vertices()[1..]);
            r
        };
        let mut full = route(i, ui, bi);
        full.extend(&middle);
        full.extend(route(j, uj, bj).into_iter().rev());
        for &v in &full {
            on_path[v] = true;
        }
        // Center endpoints stay usable by later paths.
        on_path[webs[i].center] = false;
        on_path[webs[j].center] = false;
        joined.insert((i, j), full);
        stats.paths_built += 1;
        unit_alive[i][ui] = false;
        unit_alive[j][uj] = false;
        spent[i][ui] = true;
        spent[j][uj] = true;
        stats.units_deleted += 2;
        for (w, web) in webs.iter().enumerate() {
            if !web_alive[w] {
                continue;
            }
            for (u, wb) in web.branches.iter().enumerate() {
                if !unit_alive[w][u] {
                    continue;
                }
                if wb.path.vertices()[1..].iter().any(|&v| on_path[v]) {
                    unit_alive[w][u] = false;
                    stats.units_deleted += 1;
                    continue;
                }
                let mut dead = 0;
                for (b, ub) in wb.unit.branches.iter().enumerate() {
                    if branch_alive[w][u][b] {
                        let used = ub.star.leaves.iter().filter(|&l| on_path[l]).count();
                        if ub.path.vertices().iter().any(|&v| on_path[v]) || 2 * used > ub.star.leaves.len() {
                            branch_alive[w][u][b] = false;
                            stats.branches_deleted += 1;
                        }
                    }
                    if !branch_alive[w][u][b] {
                        dead += 1;
                    }
                }
                if 2 * dead > wb.unit.branches.len() {
                    unit_alive[w][u] = false;
                    stats.units_deleted += 1;
                }
            }
            // Units spent on the web's own connections do not count.
            let lost = (0..web.branches.len()).filter(|&u| !unit_alive[w][u] && !spent[w][u]).count();
            if 2 * lost > web.branches.len() {
                web_alive[w] = false;
                stats.webs_deleted += 1;
            }
        }
    }
}
