//! The Bolza surface: side pairings of the regular octagon with angles π/4.
//!
//! Words in a surface group cannot be canonicalized by rotation alone (the
//! relator makes distinct reduced words equal), so classes are counted
//! geometrically instead. Each hyperbolic element `g` has an axis; the
//! conjugates of a primitive class tile the closed geodesic, so summing
//! `|axis(g) ∩ F| / ℓ(g)` over the elements of length `ℓ` whose axis crosses
//! the fundamental octagon `F` yields the number of classes of that length.
//! Elements are found by breadth-first search over the group, deduplicated
//! by their (double-double) matrices, inside a hyperbolic ball that is
//! guaranteed to contain every element whose axis meets `F`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;
use twofloat::TwoFloat;

use super::{EnumerationOptions, GeneratorSet, LengthSpectrum, Matrix2, Model, PrimitiveClass};
use crate::error::{Error, Result};
use crate::numeric::{dd_div, NeumaierSum};

type Dd = TwoFloat;

/// The four side pairings `a, b, c, d` of the regular octagon, then `A, B, C, D`
/// (inverses). In the disk model `a_k = [[1+√2, e^{ikπ/4}√(2+2√2)], [conj, 1+√2]]`;
/// conjugated to the upper half-plane this is the real symmetric matrix below.
/// The group relation reads `aBcDAbCd = ±I`.
pub fn bolza_generators() -> GeneratorSet {
    let one = Dd::from(1.0);
    let two = Dd::from(2.0);
    let s2 = two.sqrt();
    let alpha = one + s2;
    let s = (two + two * s2).sqrt();
    let h = s2 * Dd::from(0.5);
    let zero = Dd::from(0.0);
    let angles = [(one, zero), (h, h), (zero, one), (-h, h)];
    let mut generators: Vec<Matrix2> = angles
        .iter()
        .map(|&(c, sn)| Matrix2::from_entries(alpha + s * c, -(s * sn), -(s * sn), alpha - s * c))
        .collect();
    let inverses: Vec<Matrix2> = generators.iter().map(Matrix2::inverse).collect();
    generators.extend(inverses);
    GeneratorSet {
        model: Model::Bolza,
        generators,
        labels: "abcdABCD".chars().collect(),
        genus: 2,
        area: 4.0 * PI,
    }
}

/// The fundamental octagon in the Klein model, centred at the origin.
#[derive(Clone, Debug)]
pub struct Octagon {
    /// Hyperbolic distance from the centre to a vertex: `cosh r = 3 + 2√2`.
    pub circumradius: f64,
    /// Klein-model vertices, counter-clockwise.
    pub vertices: [[f64; 2]; 8],
    /// Hyperbolic side length, `2·arccosh(1+√2)`.
    pub side_length: f64,
}

pub fn bolza_octagon() -> Octagon {
    let cosh_r = 3.0 + 2.0 * std::f64::consts::SQRT_2;
    let circumradius = cosh_r.acosh();
    let rho = circumradius.tanh();
    let mut vertices = [[0.0; 2]; 8];
    for (k, v) in vertices.iter_mut().enumerate() {
        let t = k as f64 * FRAC_PI_4 + FRAC_PI_8;
        *v = [rho * t.cos(), rho * t.sin()];
    }
    let side_length = klein_distance(vertices[0], vertices[1]);
    Octagon { circumradius, vertices, side_length }
}

fn dot(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[0] + p[1] * q[1]
}

/// Hyperbolic distance between two points of the Klein disk.
fn klein_distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    let num = 1.0 - dot(p, q);
    let den = ((1.0 - dot(p, p)) * (1.0 - dot(q, q))).sqrt();
    (num / den).max(1.0).acosh()
}

/// What a chord between two ideal points leaves inside the octagon.
enum Chord {
    Outside,
    /// Runs along a side; the neighbouring octagon sees the same segment.
    OnSide,
    Inside(f64),
}

const COLLINEAR_TOL: f64 = 1e-9;

impl Octagon {
    fn clip(&self, p: [f64; 2], q: [f64; 2]) -> Chord {
        let d = [q[0] - p[0], q[1] - p[1]];
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for k in 0..8 {
            let a = self.vertices[k];
            let b = self.vertices[(k + 1) % 8];
            let e = [b[0] - a[0], b[1] - a[1]];
            let elen = dot(e, e).sqrt();
            // left normal of a counter-clockwise edge points inward
            let n = [-e[1] / elen, e[0] / elen];
            let sp = dot(n, [p[0] - a[0], p[1] - a[1]]);
            let sq = dot(n, [q[0] - a[0], q[1] - a[1]]);
            if sp.abs() < COLLINEAR_TOL && sq.abs() < COLLINEAR_TOL {
                return Chord::OnSide;
            }
            let den = sq - sp;
            if den == 0.0 {
                if sp < 0.0 {
                    return Chord::Outside;
                }
                continue;
            }
            let t = -sp / den;
            if den > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        if t0 >= t1 {
            return Chord::Outside;
        }
        let at = |t: f64| [p[0] + t * d[0], p[1] + t * d[1]];
        Chord::Inside(klein_distance(at(t0), at(t1)))
    }
}

/// Ideal endpoints (unit circle) of the axis of a hyperbolic element.
fn axis_endpoints(m: &Matrix2) -> ([f64; 2], [f64; 2]) {
    let half = Dd::from(0.5);
    let re_alpha = (m.a + m.d) * half;
    let im_alpha = ((m.b - m.c) * half).hi();
    let beta = Complex64::new(((m.a - m.d) * half).hi(), -((m.b + m.c) * half).hi());
    let root = (re_alpha * re_alpha - Dd::from(1.0)).sqrt().hi();
    let bc = beta.conj();
    let w1 = Complex64::new(root, im_alpha) / bc;
    let w2 = Complex64::new(-root, im_alpha) / bc;
    ([w1.re, w1.im], [w2.re, w2.im])
}

/// Hash index over projective matrices, tolerant to rounding noise near cell edges.
struct ElementIndex {
    map: HashMap<[i64; 4], u32>,
}

const KEY_SCALE: f64 = 1048576.0;
const KEY_SLACK: f64 = 1e-9;
const MATCH_TOL: f64 = 1e-7;

fn entries(m: &Matrix2) -> [f64; 4] {
    [m.a.hi(), m.b.hi(), m.c.hi(), m.d.hi()]
}

impl ElementIndex {
    fn new() -> Self {
        Self { map: HashMap::new() }
    }

    fn insert(&mut self, m: &Matrix2, id: u32) {
        let key = entries(m).map(|v| (v * KEY_SCALE).round() as i64);
        self.map.insert(key, id);
    }

    fn find(&self, m: &Matrix2, nodes: &[Node]) -> Option<u32> {
        let e = entries(m);
        let cand: [[i64; 2]; 4] = e.map(|v| {
            [((v - KEY_SLACK) * KEY_SCALE).round() as i64, ((v + KEY_SLACK) * KEY_SCALE).round() as i64]
        });
        for mask in 0..16u32 {
            let mut key = [0i64; 4];
            let mut dup = false;
            for i in 0..4 {
                let bit = ((mask >> i) & 1) as usize;
                if bit == 1 && cand[i][0] == cand[i][1] {
                    dup = true;
                    break;
                }
                key[i] = cand[i][bit];
            }
            if dup {
                continue;
            }
            if let Some(&id) = self.map.get(&key) {
                if nodes[id as usize].m.max_abs_diff(m) < MATCH_TOL {
                    return Some(id);
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy)]
struct Node {
    m: Matrix2,
    parent: u32,
    letter: u8,
    depth: u16,
}

fn word_of(nodes: &[Node], mut id: u32, labels: &[char]) -> String {
    let mut w = Vec::new();
    while id != 0 {
        let n = &nodes[id as usize];
        w.push(labels[n.letter as usize]);
        id = n.parent;
    }
    w.iter().rev().collect()
}

/// `M^{1/k}` for hyperbolic `M` (positive trace), via `p·M + q·I`.
fn kth_root(m: &Matrix2, k: u32) -> Matrix2 {
    let one = Dd::from(1.0);
    let t = m.trace();
    let disc = (t * t - Dd::from(4.0)).sqrt();
    let lam = (t + disc) * Dd::from(0.5);
    // λ^{1/k}: f64 seed, then Newton steps in double-double
    let mut mu = Dd::from(lam.hi().powf(1.0 / f64::from(k)));
    for _ in 0..2 {
        let mut pk1 = one;
        for _ in 1..k {
            pk1 *= mu;
        }
        let f = pk1 * mu - lam;
        mu -= dd_div(f, pk1 * Dd::from(f64::from(k)));
    }
    let lam_i = dd_div(one, lam);
    let mu_i = dd_div(one, mu);
    let p = dd_div(mu - mu_i, disc);
    let q = dd_div(lam * mu_i - lam_i * mu, disc);
    m.affine(p, q).normalized()
}

pub(crate) fn enumerate(
    gens: &GeneratorSet,
    norm_bound: f64,
    opts: &EnumerationOptions,
) -> Result<LengthSpectrum> {
    let oct = bolza_octagon();
    let r = oct.circumradius;
    let max_len = norm_bound.ln();
    let ball = max_len + 3.0 * r;
    let cap = opts.word_cap_for(Model::Bolza);

    // Breadth-first search; any element at displacement ≤ ball − r is reached
    // through elements of displacement ≤ ball (adjacent tiles along a geodesic).
    let mut nodes = vec![Node { m: Matrix2::identity(), parent: 0, letter: 0, depth: 0 }];
    let mut index = ElementIndex::new();
    index.insert(&nodes[0].m, 0);
    let mut frontier_min = f64::INFINITY;
    let mut head = 0usize;
    while head < nodes.len() {
        let node = nodes[head];
        if usize::from(node.depth) >= cap || nodes.len() + gens.generators.len() > opts.max_elements {
            frontier_min = frontier_min.min(node.m.displacement());
            head += 1;
            continue;
        }
        for (letter, g) in gens.generators.iter().enumerate() {
            let m = (node.m * *g).normalized();
            if m.displacement() > ball || index.find(&m, &nodes).is_some() {
                continue;
            }
            let t = m.trace().hi();
            if t <= 2.0 + 1e-9 {
                return Err(Error::NonDiscrete { trace: t, depth: usize::from(node.depth) + 1 });
            }
            let id = nodes.len() as u32;
            index.insert(&m, id);
            nodes.push(Node { m, parent: head as u32, letter: letter as u8, depth: node.depth + 1 });
        }
        head += 1;
    }

    let complete = frontier_min.is_infinite();
    let cert_len = if complete { max_len } else { max_len.min(frontier_min - 3.0 * r) };
    let certified_bound = if complete { norm_bound } else { cert_len.exp().max(1.0) };

    let min_len = nodes[1..]
        .iter()
        .map(|n| 2.0 * (n.m.trace().hi() / 2.0).acosh())
        .fold(f64::INFINITY, f64::min);

    // (length, weight, node id) of every primitive element whose axis meets F.
    let mut hits: Vec<(f64, f64, u32)> = Vec::new();
    for (id, node) in nodes.iter().enumerate().skip(1) {
        let ell = 2.0 * (node.m.trace().hi() / 2.0).acosh();
        if ell > cert_len + opts.length_tol {
            continue;
        }
        let (p, q) = axis_endpoints(&node.m);
        let inside = match oct.clip(p, q) {
            Chord::Outside => continue,
            Chord::OnSide => 0.5 * oct.side_length,
            Chord::Inside(len) => len,
        };
        if inside <= 0.0 {
            continue;
        }
        let kmax = (ell / min_len * (1.0 + 1e-9)).floor() as u32;
        let is_power = (2..=kmax).any(|k| index.find(&kth_root(&node.m, k), &nodes).is_some());
        if !is_power {
            hits.push((ell, inside / ell, id as u32));
        }
    }
    hits.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(&y.2)));

    let mut classes = Vec::new();
    let mut i = 0;
    while i < hits.len() {
        let mut j = i + 1;
        while j < hits.len() && hits[j].0 - hits[j - 1].0 <= opts.length_tol {
            j += 1;
        }
        let weight: NeumaierSum = hits[i..j].iter().map(|h| h.1).collect();
        let w = weight.value();
        let mult = w.round();
        if (w - mult).abs() > 1e-6 {
            return Err(Error::Numerical(format!(
                "class weight {w} at length {} is not an integer",
                hits[i].0
            )));
        }
        if mult >= 1.0 {
            let rep = hits[i..j]
                .iter()
                .min_by_key(|h| (nodes[h.2 as usize].depth, h.2))
                .expect("nonempty cluster")
                .2;
            let trace = nodes[rep as usize].m.trace().hi();
            let word = word_of(&nodes, rep, &gens.labels);
            classes.push(PrimitiveClass::from_trace(trace, mult as u32, Some(word))?);
        }
        i = j;
    }
    Ok(LengthSpectrum::new(Model::Bolza, classes, norm_bound, certified_bound, complete, opts.clone()))
}
