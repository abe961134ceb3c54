//! Nodal sets, their shape classification, and reflection to the disk.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::SectorSpec;
use crate::scalar::{sign_of, Real};

use super::field::ScalarField;
use super::mesh::Mesh;

/// A chain of points along the zero set.
pub type Polyline<T> = Vec<[T; 2]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Vertex(usize),
    Edge(usize, usize),
}

fn edge(a: usize, b: usize) -> Node {
    Node::Edge(a.min(b), a.max(b))
}

/// Values below this fraction of `max |u|` count as zero when extracting
/// the nodal set, which keeps round-off near the flat apex out of it.
pub const NODAL_SIGN_FLOOR: f64 = 1e-6;

/// Zero level set of a P1 field, chained into polylines.
///
/// A crossing is placed on every edge whose end values have strictly
/// opposite signs; a vertex where the field vanishes joins the set through
/// triangles whose two other values have opposite signs, and an edge that
/// vanishes joins it when the triangles on its two sides differ in sign.
pub fn nodal_curve<T: Real>(u: &ScalarField<T>) -> Result<Vec<Polyline<T>>> {
    let mesh = &u.mesh;
    let val = &u.values;
    let floor = T::lit(NODAL_SIGN_FLOOR) * u.max_abs();
    let sign = |v: T| if v.abs() <= floor { 0 } else { sign_of(v) };
    let mut adj: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    let mut flat: BTreeMap<(usize, usize), u8> = BTreeMap::new();
    let mut link = |a: Node, b: Node| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for t in &mesh.triangles {
        let s = t.map(|i| sign(val[i]));
        let mut ends = Vec::with_capacity(2);
        for e in 0..3 {
            let (i, j, o) = (e, (e + 1) % 3, (e + 2) % 3);
            if s[i] * s[j] < 0 {
                ends.push(edge(t[i], t[j]));
            }
            if s[o] == 0 && s[i] * s[j] < 0 {
                ends.push(Node::Vertex(t[o]));
            }
        }
        if ends.len() == 2 {
            link(ends[0], ends[1]);
        }
        let zeros: Vec<usize> = (0..3).filter(|&i| s[i] == 0).collect();
        if zeros.len() == 2 {
            let third = 3 - zeros[0] - zeros[1];
            let e = (t[zeros[0]].min(t[zeros[1]]), t[zeros[0]].max(t[zeros[1]]));
            *flat.entry(e).or_insert(0) |= if s[third] > 0 { 1u8 } else { 2 };
        }
    }
    // A mesh edge that vanishes identically and separates the two signs.
    for ((a, b), seen) in flat {
        if seen == 3 {
            link(Node::Vertex(a), Node::Vertex(b));
        }
    }
    if adj.is_empty() {
        return invalid("field has an empty nodal set");
    }

    let point = |n: Node| match n {
        Node::Vertex(v) => mesh.vertices[v],
        Node::Edge(a, b) => {
            let t = val[a] / (val[a] - val[b]);
            let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
            [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
        }
    };

    let mut used: HashMap<(Node, Node), bool> = HashMap::new();
    let key = |a: Node, b: Node| if a < b { (a, b) } else { (b, a) };
    let walk = |start: Node, used: &mut HashMap<(Node, Node), bool>| {
        let mut line = vec![point(start)];
        let mut cur = start;
        loop {
            let next = adj[&cur]
                .iter()
                .copied()
                .find(|&n| !used.contains_key(&key(cur, n)));
            match next {
                Some(n) => {
                    used.insert(key(cur, n), true);
                    line.push(point(n));
                    cur = n;
                }
                None => return line,
            }
        }
    };
    let mut lines = Vec::new();
    // Open chains first, starting from their ends, then closed loops.
    let starts: Vec<Node> = adj
        .iter()
        .filter(|(_, v)| v.len() % 2 == 1)
        .map(|(n, _)| *n)
        .chain(adj.keys().copied())
        .collect();
    for s in starts {
        while adj[&s].iter().any(|&n| !used.contains_key(&key(s, n))) {
            let l = walk(s, &mut used);
            if l.len() > 1 {
                lines.push(l);
            }
        }
    }
    Ok(lines)
}

/// Shape family of a nodal curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodalTag {
    RadialLine,
    ConcentricArc,
    Other,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodalClassification<T> {
    pub tag: NodalTag,
    /// Residual of the chosen family, or the smaller one for `Other`.
    pub fit_residual: T,
    /// Largest distance to the best line through the origin.
    pub radial_residual: T,
    /// Half the spread of distances to the origin.
    pub arc_residual: T,
    /// Angle of the fitted line and radius of the fitted arc.
    pub line_angle: T,
    pub arc_radius: T,
    pub tol: T,
}

/// Fits a line through the origin and an arc centred at the origin to all
/// points of `curve` and compares the worst deviations with `tol`.
pub fn classify_nodal<T: Real>(
    curve: &[Polyline<T>],
    spec: SectorSpec<T>,
    tol: T,
) -> Result<NodalClassification<T>> {
    let pts: Vec<[T; 2]> = curve.iter().flatten().copied().collect();
    if pts.is_empty() {
        return invalid("empty nodal curve");
    }
    if !(tol >= T::zero()) {
        return invalid(format!("tolerance must be non-negative, got {tol}"));
    }
    // Principal direction of the uncentred scatter matrix.
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for p in &pts {
        sxx += p[0] * p[0];
        sxy += p[0] * p[1];
        syy += p[1] * p[1];
    }
    let phi = (T::lit(2.0) * sxy).atan2(sxx - syy) / T::lit(2.0);
    let (c, s) = (phi.cos(), phi.sin());
    let radial = pts
        .iter()
        .fold(T::zero(), |m, p| m.max((p[1] * c - p[0] * s).abs()));
    let (rmin, rmax) = pts.iter().fold((T::infinity(), T::zero()), |(a, b), p| {
        let r = p[0].hypot(p[1]);
        (a.min(r), b.max(r))
    });
    let arc = (rmax - rmin) / T::lit(2.0);
    let _ = spec;
    let best = radial.min(arc);
    let tag = if best > tol {
        NodalTag::Other
    } else if radial <= arc {
        NodalTag::RadialLine
    } else {
        NodalTag::ConcentricArc
    };
    Ok(NodalClassification {
        tag,
        fit_residual: best,
        radial_residual: radial,
        arc_residual: arc,
        line_angle: phi,
        arc_radius: (rmax + rmin) / T::lit(2.0),
        tol,
    })
}

/// Default classification tolerance: two edge lengths.
pub fn default_nodal_tol<T: Real>(h: T) -> T {
    T::lit(2.0) * h
}

/// Glues `2k` alternately reflected, sign-flipped copies of a sector field
/// into a field on the unit disk. Needs an integer `k`.
pub fn assemble_disk_eigenfunction<T: Real>(u: &ScalarField<T>) -> Result<ScalarField<T>> {
    let mesh = &u.mesh;
    if mesh.copies != 1 {
        return invalid("field is already assembled");
    }
    let k = mesh.spec.k;
    let kn = k.round();
    if (k - kn).abs() > T::lit(1e-12) {
        return invalid(format!(
            "reflection needs an integer sector parameter, got {k}"
        ));
    }
    let copies = 2 * kn.to_usize().unwrap_or(0);
    let half = mesh.spec.aperture() / T::lit(2.0);
    let scale = u.max_abs();
    let trace_tol = T::lit(1e-9) * scale.max(T::min_positive_value());
    for (v, x) in mesh.vertices.iter().enumerate() {
        let r = x[0].hypot(x[1]);
        let ang = x[1].atan2(x[0]).abs();
        let on_edge = r < T::lit(1e-12) || (ang - half).abs() < T::lit(1e-9);
        if on_edge && u.values[v].abs() > trace_tol {
            return invalid("field does not vanish on the straight edges");
        }
    }

    let quant = T::lit(1e9);
    let key = |p: [T; 2]| {
        let q = |t: T| (t * quant).round().to_i64().unwrap_or(i64::MAX);
        (q(p[0]), q(p[1]))
    };
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut values = Vec::new();
    let mut boundary = Vec::new();
    let mut triangles = Vec::new();
    let ap = mesh.spec.aperture();
    for j in 0..copies {
        let flip = j % 2 == 1;
        let base = ap * T::from_usize_lossy(j);
        let sign = if flip { -T::one() } else { T::one() };
        let mut local = Vec::with_capacity(mesh.n_vertices());
        for (v, x) in mesh.vertices.iter().enumerate() {
            let r = x[0].hypot(x[1]);
            let th = x[1].atan2(x[0]);
            let a = base + if flip { -th } else { th };
            let p = if r == T::zero() {
                [T::zero(), T::zero()]
            } else {
                [r * a.cos(), r * a.sin()]
            };
            let id = *index.entry(key(p)).or_insert_with(|| {
                vertices.push(p);
                values.push(sign * u.values[v]);
                boundary.push((r - T::one()).abs() < T::lit(1e-9));
                vertices.len() - 1
            });
            local.push(id);
        }
        for t in &mesh.triangles {
            let m = t.map(|i| local[i]);
            triangles.push(if flip { [m[0], m[2], m[1]] } else { m });
        }
    }
    let disk = Mesh {
        vertices,
        triangles,
        boundary_mask: boundary,
        spec: mesh.spec,
        h: mesh.h,
        copies,
    };
    ScalarField::new(Arc::new(disk), values)
}

/// Number of connected components of `{u > 0}` and `{u < 0}`, with vertices
/// linked along mesh edges whose ends share a strict sign. Values under the
/// nodal sign floor count as zero.
pub fn count_nodal_domains<T: Real>(u: &ScalarField<T>) -> usize {
    let n = u.mesh.n_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let floor = T::lit(NODAL_SIGN_FLOOR) * u.max_abs();
    let s: Vec<i8> = u
        .values
        .iter()
        .map(|v| if v.abs() <= floor { 0 } else { sign_of(*v) })
        .collect();
    for t in &u.mesh.triangles {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            if s[a] != 0 && s[a] == s[b] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    (0..n)
        .filter(|&i| s[i] != 0 && find(&mut parent, i) == i)
        .count()
}
