//! Quality triangulation of the inscribed polygon.
//!
//! Boundary vertices are placed on the curve at equal arclength spacing.
//! The interior is seeded with a hexagonal lattice, relaxed by a few
//! Laplacian passes, and then refined Ruppert-style: bad or oversized
//! triangles receive their circumcenter (or an edge midpoint), and any
//! boundary chord that would be encroached is split at the curve point with
//! the arclength midpoint of its interval, so every boundary vertex stays on
//! the curve.

use spade::handles::FixedFaceHandle;
use spade::{ConstrainedDelaunayTriangulation, Point2, PositionInTriangulation, Triangulation};

use super::{triangle_angles, triangle_diameter, Mesh};
use crate::geometry::{ArclengthTable, SmoothDomain};
use crate::{Error, Result, Vec2};

type Cdt = ConstrainedDelaunayTriangulation<Point2<f64>>;

/// Mesher tuning knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Smallest admissible interior angle (degrees).
    pub angle_floor_deg: f64,
    /// Largest admissible `h_max / h_min`.
    pub qu_cap: f64,
    /// Largest admissible turning of the tangent over one boundary interval.
    pub max_turning_deg: f64,
    /// Triangles with diameter above `size_factor * h` are split.
    pub size_factor: f64,
    /// Lattice points closer than `boundary_gap * h` to the polygon are dropped.
    pub boundary_gap: f64,
    pub smoothing_passes: usize,
    pub max_rounds: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            angle_floor_deg: 25.0,
            qu_cap: 4.0,
            max_turning_deg: 30.0,
            size_factor: 1.5,
            boundary_gap: 0.5,
            smoothing_passes: 6,
            max_rounds: 80,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct BoundaryNode {
    s: f64,
    theta: f64,
    p: Vec2,
}

/// Build a mesh of the inscribed polygon with target size `h_target`.
pub fn build_mesh(domain: &SmoothDomain, h_target: f64) -> Result<Mesh> {
    build_mesh_with(domain, h_target, &MeshOptions::default())
}

/// Meshes with `h_target = h0 2^-l` for `l = 0..levels`.
pub fn refine_family(domain: &SmoothDomain, h0: f64, levels: usize) -> Result<Vec<Mesh>> {
    refine_family_with(domain, h0, levels, &MeshOptions::default())
}

pub fn refine_family_with(
    domain: &SmoothDomain,
    h0: f64,
    levels: usize,
    opts: &MeshOptions,
) -> Result<Vec<Mesh>> {
    if levels < 2 {
        return Err(Error::InvalidInput(format!("a family needs >= 2 levels, got {levels}")));
    }
    (0..levels)
        .map(|l| build_mesh_with(domain, h0 * 0.5f64.powi(l as i32), opts))
        .collect()
}

fn domain_diameter(domain: &SmoothDomain) -> f64 {
    let pts: Vec<Vec2> = (0..256)
        .map(|i| domain.boundary_point(i as f64 * domain.param_period / 256.0))
        .collect();
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

pub fn build_mesh_with(domain: &SmoothDomain, h: f64, opts: &MeshOptions) -> Result<Mesh> {
    let diam = domain_diameter(domain);
    if !(h > 0.0 && h < 0.5 * diam) {
        return Err(Error::InvalidInput(format!(
            "h_target must lie in (0, {:.4}), got {h}",
            0.5 * diam
        )));
    }
    let table = domain.arclength_table(512)?;
    let length = table.total_length();
    let mut n = (length / h - 1e-9).ceil() as usize;
    if domain.is_polygonal() {
        n = n.div_ceil(8) * 8;
    }
    if n < 8 {
        return Err(Error::TooCoarse { requested: n });
    }
    if !domain.is_polygonal() {
        check_turning(domain, &table, n, opts.max_turning_deg)?;
    }
    let mut boundary: Vec<BoundaryNode> = (0..n)
        .map(|i| {
            let s = length * i as f64 / n as f64;
            let theta = table.theta_at(s);
            BoundaryNode {
                s,
                theta,
                p: domain.boundary_point(theta),
            }
        })
        .collect();

    let mut interior = seed_lattice(&boundary, h, opts)?;
    for _ in 0..opts.smoothing_passes {
        interior = smooth(&boundary, &interior, h, opts)?;
    }

    let mut converged = false;
    for _ in 0..opts.max_rounds {
        let tri = Triangulated::new(&boundary, &interior)?;
        let (splits, additions, kept) = refinement_actions(&tri, &boundary, &interior, h, opts);
        let dropped = kept.len() != interior.len();
        if splits.is_empty() && additions.is_empty() && !dropped {
            converged = true;
            break;
        }
        interior = kept;
        interior.extend(additions);
        boundary = split_chords(domain, &table, length, &boundary, &splits);
    }
    if !converged {
        return Err(Error::MeshQualityFailure(format!(
            "refinement did not settle within {} rounds",
            opts.max_rounds
        )));
    }

    let tri = Triangulated::new(&boundary, &interior)?;
    let mesh = tri.into_mesh(&boundary)?;
    let metrics = mesh.metrics();
    if metrics.min_angle < opts.angle_floor_deg - 1e-9 {
        return Err(Error::MeshQualityFailure(format!(
            "min angle {:.2} below floor {:.2}",
            metrics.min_angle, opts.angle_floor_deg
        )));
    }
    if mesh.h_max / mesh.h_min > opts.qu_cap {
        return Err(Error::MeshQualityFailure(format!(
            "h_max/h_min = {:.3} exceeds {}",
            mesh.h_max / mesh.h_min,
            opts.qu_cap
        )));
    }
    Ok(mesh)
}

fn check_turning(domain: &SmoothDomain, table: &ArclengthTable, n: usize, limit_deg: f64) -> Result<()> {
    let length = table.total_length();
    let sub = 16;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let s0 = length * i as f64 / n as f64;
        let ds = length / n as f64;
        let mut turning = 0.0;
        let mut prev = domain.tangent(table.theta_at(s0));
        for j in 1..=sub {
            let t = domain.tangent(table.theta_at(s0 + ds * j as f64 / sub as f64));
            let cross = prev.x * t.y - prev.y * t.x;
            turning += cross.atan2(prev.dot(&t)).abs();
            prev = t;
        }
        worst = worst.max(turning);
    }
    let worst_deg = worst.to_degrees();
    if worst_deg > limit_deg {
        return Err(Error::CurvatureTooHigh {
            turning_deg: worst_deg,
            limit_deg,
        });
    }
    Ok(())
}

/// Spatial index over the boundary chords.
struct ChordIndex {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
    chords: Vec<(Vec2, Vec2)>,
}

impl ChordIndex {
    fn new(boundary: &[BoundaryNode], cell: f64) -> Self {
        let nb = boundary.len();
        let chords: Vec<(Vec2, Vec2)> = (0..nb)
            .map(|i| (boundary[i].p, boundary[(i + 1) % nb].p))
            .collect();
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for b in boundary {
            lo = lo.inf(&b.p);
            hi = hi.sup(&b.p);
        }
        let nx = (((hi.x - lo.x) / cell).ceil() as usize).clamp(1, 2048);
        let ny = (((hi.y - lo.y) / cell).ceil() as usize).clamp(1, 2048);
        let cell = cell.max((hi.x - lo.x) / nx as f64).max((hi.y - lo.y) / ny as f64);
        let mut idx = Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
            chords,
        };
        for (c, &(a, b)) in idx.chords.clone().iter().enumerate() {
            let (x0, y0) = idx.cell_of(a.inf(&b));
            let (x1, y1) = idx.cell_of(a.sup(&b));
            for cy in y0..=y1 {
                for cx in x0..=x1 {
                    idx.buckets[cy * idx.nx + cx].push(c);
                }
            }
        }
        idx
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let cx = ((p.x - self.origin.x) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let cy = ((p.y - self.origin.y) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (cx, cy)
    }

    /// Chords whose bucket range overlaps the disk of radius `r` around `p`.
    fn candidates(&self, p: Vec2, r: f64) -> Vec<usize> {
        let (x0, y0) = self.cell_of(p - Vec2::new(r, r));
        let (x1, y1) = self.cell_of(p + Vec2::new(r, r));
        let mut out = Vec::new();
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                out.extend_from_slice(&self.buckets[cy * self.nx + cx]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn distance_within(&self, p: Vec2, r: f64) -> f64 {
        self.candidates(p, r)
            .into_iter()
            .map(|c| point_segment_distance(p, self.chords[c].0, self.chords[c].1))
            .fold(f64::INFINITY, f64::min)
    }

    /// Chords whose closed diametral disk contains `p`.
    fn encroached_by(&self, p: Vec2, r: f64) -> Vec<usize> {
        self.candidates(p, r)
            .into_iter()
            .filter(|&c| {
                let (a, b) = self.chords[c];
                (p - a).dot(&(p - b)) <= 0.0
            })
            .collect()
    }
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let s = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p - (a + s * d)).norm()
}

struct Triangulated {
    cdt: Cdt,
    inside: Vec<bool>,
    n_boundary: usize,
}

impl Triangulated {
    fn new(boundary: &[BoundaryNode], interior: &[Vec2]) -> Result<Self> {
        let nb = boundary.len();
        let points: Vec<Point2<f64>> = boundary
            .iter()
            .map(|b| b.p)
            .chain(interior.iter().copied())
            .map(|p| Point2::new(p.x, p.y))
            .collect();
        let n = points.len();
        let edges: Vec<[usize; 2]> = (0..nb).map(|i| [i, (i + 1) % nb]).collect();
        let mut conflict = false;
        let cdt = Cdt::try_bulk_load_cdt(points, edges, |_| conflict = true)
            .map_err(|e| Error::MeshQualityFailure(format!("triangulation failed: {e:?}")))?;
        if conflict {
            return Err(Error::MeshQualityFailure("boundary polygon self-intersects".into()));
        }
        if cdt.num_vertices() != n {
            return Err(Error::MeshQualityFailure("duplicate mesh vertices".into()));
        }
        let inside = classify_faces(&cdt);
        Ok(Self {
            cdt,
            inside,
            n_boundary: nb,
        })
    }

    fn inside_triangles(&self) -> Vec<[usize; 3]> {
        self.cdt
            .inner_faces()
            .filter(|f| self.inside[f.fix().index()])
            .map(|f| {
                let v = f.vertices();
                [v[0].fix().index(), v[1].fix().index(), v[2].fix().index()]
            })
            .collect()
    }

    fn contains(&self, p: Vec2) -> bool {
        match self.cdt.locate(Point2::new(p.x, p.y)) {
            PositionInTriangulation::OnFace(f) => self.inside[f.index()],
            _ => false,
        }
    }

    fn into_mesh(self, boundary: &[BoundaryNode]) -> Result<Mesh> {
        let triangles = self.inside_triangles();
        let positions: Vec<Vec2> = self
            .cdt
            .vertices()
            .map(|v| Vec2::new(v.position().x, v.position().y))
            .collect();
        let mut used = vec![false; positions.len()];
        for t in &triangles {
            for &v in t {
                used[v] = true;
            }
        }
        let mut remap = vec![usize::MAX; positions.len()];
        let mut vertices = Vec::new();
        let mut params = Vec::new();
        for (i, p) in positions.iter().enumerate() {
            if used[i] {
                remap[i] = vertices.len();
                vertices.push(*p);
                params.push(if i < self.n_boundary {
                    // boundary vertices keep the exact curve point
                    vertices[remap[i]] = boundary[i].p;
                    Some(boundary[i].theta)
                } else {
                    None
                });
            }
        }
        let triangles = triangles
            .into_iter()
            .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
            .collect();
        Mesh::from_parts(vertices, params, triangles)
    }
}

fn classify_faces(cdt: &Cdt) -> Vec<bool> {
    let nf = cdt.all_faces().count();
    let mut state: Vec<Option<bool>> = vec![None; nf];
    let mut stack: Vec<FixedFaceHandle<spade::handles::InnerTag>> = Vec::new();
    for f in cdt.inner_faces() {
        for e in f.adjacent_edges() {
            if e.rev().face().is_outer() {
                let inside = e.is_constraint_edge();
                let idx = f.fix().index();
                if state[idx].is_none() {
                    state[idx] = Some(inside);
                    stack.push(f.fix());
                }
            }
        }
    }
    while let Some(fh) = stack.pop() {
        let f = cdt.face(fh);
        let here = state[fh.index()].unwrap();
        for e in f.adjacent_edges() {
            let nb = e.rev().face();
            if let Some(inner) = nb.as_inner() {
                let idx = inner.fix().index();
                if state[idx].is_none() {
                    let flip = e.is_constraint_edge();
                    state[idx] = Some(here ^ flip);
                    stack.push(inner.fix());
                }
            }
        }
    }
    state.into_iter().map(|s| s.unwrap_or(false)).collect()
}

fn seed_lattice(boundary: &[BoundaryNode], h: f64, opts: &MeshOptions) -> Result<Vec<Vec2>> {
    let tri = Triangulated::new(boundary, &[])?;
    let chords = ChordIndex::new(boundary, h);
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for b in boundary {
        lo = lo.inf(&b.p);
        hi = hi.sup(&b.p);
    }
    let dy = 0.5 * 3f64.sqrt() * h;
    let rows = ((hi.y - lo.y) / dy).ceil() as i64 + 1;
    let cols = ((hi.x - lo.x) / h).ceil() as i64 + 2;
    let gap = opts.boundary_gap * h;
    let mut out = Vec::new();
    // Center the lattice on the origin so families stay aligned across levels.
    let j0 = (lo.y / dy).floor() as i64;
    let i0 = (lo.x / h).floor() as i64 - 1;
    for j in j0..=j0 + rows {
        let y = j as f64 * dy;
        let shift = if j.rem_euclid(2) == 1 { 0.5 * h } else { 0.0 };
        for i in i0..=i0 + cols {
            let p = Vec2::new(i as f64 * h + shift, y);
            if tri.contains(p) && chords.distance_within(p, gap) >= gap && chords.encroached_by(p, h).is_empty() {
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn smooth(boundary: &[BoundaryNode], interior: &[Vec2], h: f64, opts: &MeshOptions) -> Result<Vec<Vec2>> {
    let tri = Triangulated::new(boundary, interior)?;
    let chords = ChordIndex::new(boundary, h);
    let nb = boundary.len();
    let gap = 0.9 * opts.boundary_gap * h;
    let mut out = interior.to_vec();
    for v in tri.cdt.vertices().skip(nb) {
        let i = v.fix().index() - nb;
        let mut sum = Vec2::zeros();
        let mut count = 0.0;
        for e in v.out_edges() {
            let q = e.to().position();
            sum += Vec2::new(q.x, q.y);
            count += 1.0;
        }
        if count == 0.0 {
            continue;
        }
        let target = sum / count;
        if tri.contains(target)
            && chords.distance_within(target, gap) >= gap
            && chords.encroached_by(target, h).is_empty()
        {
            out[i] = target;
        }
    }
    Ok(out)
}

fn circumcenter(p: [Vec2; 3]) -> Vec2 {
    let a = p[0];
    let b = p[1] - a;
    let c = p[2] - a;
    let d = 2.0 * (b.x * c.y - b.y * c.x);
    let b2 = b.norm_squared();
    let c2 = c.norm_squared();
    a + Vec2::new((c.y * b2 - b.y * c2) / d, (b.x * c2 - c.x * b2) / d)
}

/// One refinement round: chords to split, interior points to add, and the
/// interior points that are still inside the polygon.
fn refinement_actions(
    tri: &Triangulated,
    boundary: &[BoundaryNode],
    interior: &[Vec2],
    h: f64,
    opts: &MeshOptions,
) -> (Vec<usize>, Vec<Vec2>, Vec<Vec2>) {
    let nb = boundary.len();
    let chords = ChordIndex::new(boundary, h);
    let triangles = tri.inside_triangles();
    let pos = |i: usize| {
        if i < nb {
            boundary[i].p
        } else {
            interior[i - nb]
        }
    };
    let chord_of = |a: usize, b: usize| -> Option<usize> {
        if a < nb && b < nb {
            if (a + 1) % nb == b {
                return Some(a);
            }
            if (b + 1) % nb == a {
                return Some(b);
            }
        }
        None
    };

    let mut used = vec![false; nb + interior.len()];
    let mut split = vec![false; nb];
    let mut bad: Vec<(f64, usize)> = Vec::new();
    for (t, tr) in triangles.iter().enumerate() {
        for &v in tr {
            used[v] = true;
        }
        let p = [pos(tr[0]), pos(tr[1]), pos(tr[2])];
        for i in 0..3 {
            let (a, b, c) = (tr[i], tr[(i + 1) % 3], tr[(i + 2) % 3]);
            if let Some(ch) = chord_of(a, b) {
                let (pa, pb, pc) = (pos(a), pos(b), pos(c));
                if (pa - pc).dot(&(pb - pc)) <= 0.0 {
                    split[ch] = true;
                }
            }
        }
        let min_angle = triangle_angles(p).into_iter().fold(f64::INFINITY, f64::min);
        let diam = triangle_diameter(p);
        if min_angle < opts.angle_floor_deg || diam > opts.size_factor * h {
            bad.push((min_angle - if diam > opts.size_factor * h { 90.0 } else { 0.0 }, t));
        }
    }
    bad.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut additions: Vec<Vec2> = Vec::new();
    for &(_, t) in &bad {
        let tr = triangles[t];
        let p = [pos(tr[0]), pos(tr[1]), pos(tr[2])];
        if tr.iter().any(|&v| v < nb && (split[v] || split[(v + nb - 1) % nb])) {
            // a neighbouring chord is already being split this round
            continue;
        }
        let diam = triangle_diameter(p);
        let candidate = if diam > opts.size_factor * h {
            // longest edge midpoint
            let mut best = (0.0, 0);
            for i in 0..3 {
                let l = (p[(i + 1) % 3] - p[i]).norm();
                if l > best.0 {
                    best = (l, i);
                }
            }
            let (a, b) = (tr[best.1], tr[(best.1 + 1) % 3]);
            if let Some(ch) = chord_of(a, b) {
                split[ch] = true;
                continue;
            }
            0.5 * (p[best.1] + p[(best.1 + 1) % 3])
        } else {
            circumcenter(p)
        };
        let radius = (candidate - p[0]).norm();
        let enc = chords.encroached_by(candidate, 2.0 * h.max(radius));
        if !enc.is_empty() {
            for c in enc {
                split[c] = true;
            }
            continue;
        }
        if !tri.contains(candidate) {
            // split the chord nearest to the candidate
            let near = chords
                .candidates(candidate, 2.0 * h.max(radius))
                .into_iter()
                .min_by(|&a, &b| {
                    let da = point_segment_distance(candidate, chords.chords[a].0, chords.chords[a].1);
                    let db = point_segment_distance(candidate, chords.chords[b].0, chords.chords[b].1);
                    da.total_cmp(&db)
                });
            if let Some(c) = near {
                split[c] = true;
            }
            continue;
        }
        let spacing = 0.5 * radius.min(h);
        if additions.iter().any(|q| (q - candidate).norm() < spacing) {
            continue;
        }
        if p.iter().any(|q| (q - candidate).norm() < 1e-6 * h) {
            continue;
        }
        additions.push(candidate);
    }

    let kept: Vec<Vec2> = interior
        .iter()
        .enumerate()
        .filter(|(i, _)| used[nb + i])
        .map(|(_, p)| *p)
        .collect();
    let splits = (0..nb).filter(|&c| split[c]).collect();
    (splits, additions, kept)
}

fn split_chords(
    domain: &SmoothDomain,
    table: &ArclengthTable,
    length: f64,
    boundary: &[BoundaryNode],
    splits: &[usize],
) -> Vec<BoundaryNode> {
    let nb = boundary.len();
    let mut out = Vec::with_capacity(nb + splits.len());
    let mut k = 0;
    for i in 0..nb {
        out.push(boundary[i]);
        if k < splits.len() && splits[k] == i {
            let s_end = if i + 1 == nb { length } else { boundary[i + 1].s };
            let s = 0.5 * (boundary[i].s + s_end);
            let theta = table.theta_at(s);
            out.push(BoundaryNode {
                s,
                theta,
                p: domain.boundary_point(theta),
            });
            k += 1;
        }
    }
    out
}
