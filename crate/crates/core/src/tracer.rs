//! Continuation of the level curves `g = ε₁` and `h = ε₂` through the disc
//! `|z| <= R`, from boundary node to boundary node.
//!
//! The values `ε₁`, `ε₂` are chosen by [`perturb_regular`] so that no
//! critical point of `f` lies on either curve; both curves are then smooth,
//! every component entering the disc at a node leaves it at a different
//! node, and the pairing of nodes is a fixed-point-free involution.
//!
//! Tracing is arclength predictor–corrector: step along the unit tangent
//! (the gradient rotated by 90°), then Newton back onto the curve along the
//! gradient. Steps are accepted only when the corrector converges quickly,
//! the correction is small compared with the step and the tangent turns by
//! less than `max_turn`; otherwise the step is halved.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::annulus::{BoundaryNode, NodeKind, NodeSet};
use crate::error::{Error, Result};
use crate::poly::{Field, Poly};

/// `f - (ε₁ + iε₂)`, with `ε` kept off the critical values.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedProblem {
    pub base: Poly,
    pub eps1: f64,
    pub eps2: f64,
    pub critical_points: Vec<Complex64>,
    /// `max(1, |g(c)|, |h(c)|)` over the critical points.
    pub scale: f64,
    /// Minimum distance kept between each `ε` and the critical values.
    pub margin: f64,
}

impl PerturbedProblem {
    /// Problem with explicit offsets and no critical-point bookkeeping.
    pub fn with_offsets(base: Poly, eps1: f64, eps2: f64) -> Self {
        PerturbedProblem { base, eps1, eps2, critical_points: Vec::new(), scale: 1.0, margin: 0.0 }
    }

    /// The polynomial whose `g`, `h` are `g - ε₁`, `h - ε₂`.
    pub fn shifted(&self) -> Poly {
        self.base.sub_constant(Complex64::new(self.eps1, self.eps2))
    }

    pub fn eps(&self) -> Complex64 {
        Complex64::new(self.eps1, self.eps2)
    }

    /// Whether every critical value stays `margin` away from `(ε₁, ε₂)`
    /// in each component.
    pub fn is_regular(&self) -> bool {
        self.critical_points.iter().all(|&c| {
            let v = self.base.eval(c);
            (v.re - self.eps1).abs() > self.margin && (v.im - self.eps2).abs() > self.margin
        })
    }
}

/// Offsets `ε` from `{0, δ₀, -δ₀, 2δ₀, …}`, `δ₀ = 1e-6 · scale`, each more
/// than `δ₀/2` from every critical value of its component.
pub fn perturb_regular(p: &Poly, tol: f64) -> Result<PerturbedProblem> {
    perturb_regular_with(p, tol, 1e-6)
}

/// [`perturb_regular`] with `δ₀ = relative · scale`.
pub fn perturb_regular_with(p: &Poly, tol: f64, relative: f64) -> Result<PerturbedProblem> {
    let critical_points = p.critical_points(tol)?;
    let values: Vec<Complex64> = critical_points.iter().map(|&c| p.eval(c)).collect();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.re.abs()).max(v.im.abs()));
    let delta = relative * scale;
    let margin = delta / 2.0;
    let pick = |component: &dyn Fn(&Complex64) -> f64| -> f64 {
        (0..)
            .map(|k: i64| {
                let m = (k + 1) / 2;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * m as f64 * delta
            })
            .find(|&eps| values.iter().all(|v| (component(v) - eps).abs() > margin))
            .expect("finitely many critical values")
    };
    let eps1 = pick(&|v| v.re);
    let eps2 = pick(&|v| v.im);
    Ok(PerturbedProblem { base: p.clone(), eps1, eps2, critical_points, scale, margin })
}

/// Step and tolerance parameters for [`trace_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    pub max_step: f64,
    pub min_step: f64,
    /// Largest tangent rotation allowed per step, radians.
    pub max_turn: f64,
    /// Base tolerance on `|F|`; raised pointwise to the rounding bound of
    /// evaluating `F`, see [`on_curve_tolerance`].
    pub on_curve_tol: f64,
    pub node_tol: f64,
    pub merge_tol: f64,
    pub max_steps: usize,
    /// Tracing threads; `> 1` traces every node and cross-checks both ends.
    pub jobs: usize,
    /// Picks the arc used for the reverse-trace audit.
    pub seed: u64,
}

impl StepControl {
    pub fn for_problem(prob: &PerturbedProblem, radius: f64) -> Self {
        StepControl {
            max_step: 0.05 * radius,
            min_step: 1e-12 * radius,
            max_turn: 0.05,
            on_curve_tol: 1e-8 * prob.scale,
            node_tol: 1e-6 * radius,
            merge_tol: 1e-6 * radius,
            max_steps: 200_000,
            jobs: 1,
            seed: 0,
        }
    }

    /// Halves the step and turn limits.
    pub fn tightened(&self) -> Self {
        StepControl { max_step: self.max_step / 2.0, max_turn: self.max_turn / 2.0, ..self.clone() }
    }
}

/// A traced component of `g = ε₁` or `h = ε₂` inside the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub field: Field,
    pub samples: Vec<(f64, f64)>,
    pub start_node: BoundaryNode,
    pub end_node: BoundaryNode,
    pub length: f64,
}

/// Fixed-point-free involution on `[0, 2n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<usize>,
}

impl Matching {
    pub fn new(pairs: Vec<usize>) -> Result<Self> {
        let m = pairs.len();
        for (i, &j) in pairs.iter().enumerate() {
            if j >= m || j == i || pairs[j] != i {
                return Err(Error::InvalidMatching(format!("{i} -> {j} in {pairs:?}")));
            }
        }
        Ok(Matching { pairs })
    }

    /// Builds from unordered pairs.
    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![usize::MAX; size];
        for &(a, b) in pairs {
            if a >= size || b >= size {
                return Err(Error::InvalidMatching(format!("pair ({a}, {b}) out of range")));
            }
            out[a] = b;
            out[b] = a;
        }
        if out.contains(&usize::MAX) {
            return Err(Error::InvalidMatching("unpaired node".into()));
        }
        Self::new(out)
    }

    pub fn partner(&self, i: usize) -> usize {
        self.pairs[i]
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[usize] {
        &self.pairs
    }
}

fn field_of(kind: NodeKind) -> Field {
    kind.field()
}

fn eval_field(p: &Poly, field: Field, z: (f64, f64)) -> (f64, (f64, f64)) {
    let he = p.harmonic_eval(z.0, z.1);
    (he.value(field), he.gradient(field))
}

/// Rounding bound `4 (n+1) ε Σ |a_k| |z|^k` of Horner evaluation at `z`.
fn rounding_floor(p: &Poly, z: (f64, f64)) -> f64 {
    let r = z.0.hypot(z.1);
    let magnitude = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    4.0 * (p.degree() + 1) as f64 * f64::EPSILON * magnitude
}

/// Accepted `|F|` at `z`: the base tolerance, or four times the rounding
/// bound where that is larger.
pub fn on_curve_tolerance(p: &Poly, base: f64, z: (f64, f64)) -> f64 {
    base.max(4.0 * rounding_floor(p, z))
}

/// Newton along the gradient; `None` unless `|F|` is within tolerance after
/// at most 5 steps.
fn correct(p: &Poly, field: Field, mut z: (f64, f64), base: f64) -> Option<((f64, f64), usize)> {
    for it in 0..=5 {
        let (v, (gx, gy)) = eval_field(p, field, z);
        let floor = rounding_floor(p, z);
        if v.abs() <= (0.01 * base).max(floor) {
            return Some((z, it));
        }
        let tol = base.max(4.0 * floor);
        if it == 5 {
            return (v.abs() <= tol).then_some((z, it));
        }
        let g2 = gx * gx + gy * gy;
        if !(g2 > 0.0) {
            return None;
        }
        let next = (z.0 - v * gx / g2, z.1 - v * gy / g2);
        if next == z {
            return (v.abs() <= tol).then_some((z, it));
        }
        z = next;
    }
    None
}

fn unit_tangent(p: &Poly, field: Field, z: (f64, f64)) -> Option<(f64, f64)> {
    let (_, (gx, gy)) = eval_field(p, field, z);
    let norm = gx.hypot(gy);
    (norm > 0.0).then(|| (-gy / norm, gx / norm))
}

/// `0.05 / γ`, `γ = max_k |f^(k) / (k! f')|^(1/(k-1))`: the corrector cannot
/// reach a critical point or another branch from within this radius.
fn safe_step(p: &Poly, z: (f64, f64)) -> f64 {
    let b = p.taylor_shift(Complex64::new(z.0, z.1));
    let b = b.coeffs();
    let slope = b.get(1).map_or(0.0, |c| c.norm());
    if slope == 0.0 {
        return 0.0;
    }
    let gamma = (2..b.len()).map(|k| (b[k].norm() / slope).powf(1.0 / (k - 1) as f64)).fold(0.0, f64::max);
    if gamma == 0.0 {
        f64::INFINITY
    } else {
        0.05 / gamma
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Traces from `start` into the disc until the curve leaves through
/// another node of the same kind.
pub fn trace_curve(
    prob: &PerturbedProblem,
    field: Field,
    start: &BoundaryNode,
    ns: &NodeSet,
    ctrl: &StepControl,
) -> Result<Arc> {
    if field_of(start.kind) != field {
        return Err(Error::MatchingInconsistency(format!("{:?}-node traced on {field:?}", start.kind)));
    }
    let shifted = prob.shifted();
    let p = &shifted;
    let radius = ns.radius;
    let node_pos = |node: &BoundaryNode| {
        let z = node.position(radius);
        (z.re, z.im)
    };
    let snap_to_curve = |z: (f64, f64)| correct(p, field, z, ctrl.on_curve_tol).map(|c| c.0).unwrap_or(z);

    let mut z = snap_to_curve(node_pos(start));
    let mut t = unit_tangent(p, field, z).ok_or(Error::StepUnderflow { x: z.0, y: z.1 })?;
    if t.0 * z.0 + t.1 * z.1 > 0.0 {
        t = (-t.0, -t.1);
    }

    let mut samples = vec![z];
    let step_cap = 0.8 * ctrl.max_step;
    let mut h = 0.25 * ctrl.max_step;
    let mut inside = false;
    let same_kind: Vec<&BoundaryNode> = ns.of_kind(start.kind).collect();
    let spacing = PI / ns.degree as f64;

    for _ in 0..ctrl.max_steps {
        h = h.min(safe_step(p, z));
        if h < ctrl.min_step {
            return Err(Error::StepUnderflow { x: z.0, y: z.1 });
        }
        let predicted = (z.0 + h * t.0, z.1 + h * t.1);
        let accepted = correct(p, field, predicted, ctrl.on_curve_tol).and_then(|(zc, its)| {
            let mut tn = unit_tangent(p, field, zc)?;
            if tn.0 * t.0 + tn.1 * t.1 < 0.0 {
                tn = (-tn.0, -tn.1);
            }
            let turn = (tn.0 * t.0 + tn.1 * t.1).clamp(-1.0, 1.0).acos();
            let ok = dist(zc, predicted) <= 0.25 * h && turn <= ctrl.max_turn && dist(zc, z) <= ctrl.max_step;
            ok.then_some((zc, tn, its, turn))
        });
        let Some((zc, tn, its, turn)) = accepted else {
            h *= 0.5;
            if h < ctrl.min_step {
                return Err(Error::StepUnderflow { x: z.0, y: z.1 });
            }
            continue;
        };

        let modulus = zc.0.hypot(zc.1);
        if inside && modulus >= radius - ctrl.node_tol {
            let angle = zc.1.atan2(zc.0);
            let end = same_kind
                .iter()
                .min_by(|a, b| angular_distance(a.angle, angle).total_cmp(&angular_distance(b.angle, angle)))
                .copied()
                .filter(|node| angular_distance(node.angle, angle) < spacing / 2.0)
                .ok_or(Error::NodeSnapAmbiguity)?;
            if end.index == start.index {
                return Err(Error::MatchingInconsistency(format!(
                    "{:?}-arc from node {} returned to its start",
                    start.kind, start.index
                )));
            }
            samples.push(snap_to_curve(node_pos(end)));
            let length = samples.windows(2).map(|w| dist(w[0], w[1])).sum();
            return Ok(Arc { field, samples, start_node: *start, end_node: *end, length });
        }
        if modulus < radius - ctrl.node_tol {
            inside = true;
        }
        samples.push(zc);
        z = zc;
        t = tn;
        if its <= 2 && turn < 0.5 * ctrl.max_turn {
            h = (1.5 * h).min(step_cap);
        }
    }
    Err(Error::TraceBudgetExceeded)
}

/// Both matchings with their arcs, indexed by the start node of each arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Matchings {
    pub p: Matching,
    pub q: Matching,
    pub p_arcs: Vec<Arc>,
    pub q_arcs: Vec<Arc>,
}

impl Matchings {
    /// Arc joining `node` to its partner.
    pub fn arc_through(&self, kind: NodeKind, node: usize) -> Option<&Arc> {
        let arcs = match kind {
            NodeKind::P => &self.p_arcs,
            NodeKind::Q => &self.q_arcs,
        };
        arcs.iter().find(|a| a.start_node.index == node || a.end_node.index == node)
    }
}

fn trace_all(
    prob: &PerturbedProblem,
    ns: &NodeSet,
    kind: NodeKind,
    ctrl: &StepControl,
) -> Result<Vec<Arc>> {
    let starts: Vec<&BoundaryNode> = ns.of_kind(kind).collect();
    let jobs = ctrl.jobs.max(1).min(starts.len());
    let chunk = starts.len().div_ceil(jobs);
    let results: Vec<Result<Arc>> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .chunks(chunk)
            .map(|nodes| {
                scope.spawn(move || {
                    nodes.iter().map(|node| trace_curve(prob, kind.field(), node, ns, ctrl)).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("tracer thread panicked")).collect()
    });
    results.into_iter().collect()
}

fn match_kind(
    prob: &PerturbedProblem,
    ns: &NodeSet,
    kind: NodeKind,
    ctrl: &StepControl,
) -> Result<(Matching, Vec<Arc>)> {
    let size = 2 * ns.degree;
    let mut partner = vec![usize::MAX; size];
    let mut arcs = Vec::with_capacity(ns.degree);

    if ctrl.jobs > 1 {
        let all = trace_all(prob, ns, kind, ctrl)?;
        for (i, arc) in all.iter().enumerate() {
            let j = arc.end_node.index;
            if all[j].end_node.index != i {
                return Err(Error::MatchingInconsistency(format!(
                    "{kind:?}: {i} -> {j} but {j} -> {}",
                    all[j].end_node.index
                )));
            }
            partner[i] = j;
        }
        arcs.extend(all.into_iter().filter(|a| a.start_node.index < a.end_node.index));
    } else {
        for i in 0..size {
            if partner[i] != usize::MAX {
                continue;
            }
            let arc = trace_curve(prob, kind.field(), ns.node(kind, i), ns, ctrl)?;
            let j = arc.end_node.index;
            if partner[j] != usize::MAX {
                return Err(Error::MatchingInconsistency(format!("{kind:?}-node {j} claimed twice")));
            }
            partner[i] = j;
            partner[j] = i;
            arcs.push(arc);
        }
        let audit = &arcs[(ctrl.seed % arcs.len() as u64) as usize];
        let back = trace_curve(prob, kind.field(), &audit.end_node, ns, ctrl)?;
        if back.end_node.index != audit.start_node.index {
            return Err(Error::MatchingInconsistency(format!(
                "{kind:?}: reverse trace from {} ended at {}, expected {}",
                audit.end_node.index, back.end_node.index, audit.start_node.index
            )));
        }
    }

    for a in 0..arcs.len() {
        for b in a + 1..arcs.len() {
            let d = polyline_distance(&arcs[a].samples, &arcs[b].samples);
            if d < ctrl.merge_tol {
                return Err(Error::ArcMerge { first: a, second: b, distance: d });
            }
        }
    }
    Ok((Matching::new(partner)?, arcs))
}

/// Traces every P- and Q-component and records the induced matchings.
pub fn compute_matchings(prob: &PerturbedProblem, ns: &NodeSet, ctrl: &StepControl) -> Result<Matchings> {
    let (p, p_arcs) = match_kind(prob, ns, NodeKind::P, ctrl)?;
    let (q, q_arcs) = match_kind(prob, ns, NodeKind::Q, ctrl)?;
    Ok(Matchings { p, q, p_arcs, q_arcs })
}

fn point_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    dist(p, (a.0 + t * dx, a.1 + t * dy))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Intersection parameter `(s, t)` of segments `a0a1` and `b0b1`, if any.
pub(crate) fn segment_intersection(
    a0: (f64, f64),
    a1: (f64, f64),
    b0: (f64, f64),
    b1: (f64, f64),
) -> Option<(f64, f64)> {
    let d1 = cross(b0, b1, a0);
    let d2 = cross(b0, b1, a1);
    let d3 = cross(a0, a1, b0);
    let d4 = cross(a0, a1, b1);
    if (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != d2 && d3 != d4 {
        Some((d1 / (d1 - d2), d3 / (d3 - d4)))
    } else {
        None
    }
}

pub(crate) fn segment_distance(a0: (f64, f64), a1: (f64, f64), b0: (f64, f64), b1: (f64, f64)) -> f64 {
    if segment_intersection(a0, a1, b0, b1).is_some() {
        return 0.0;
    }
    point_segment(a0, b0, b1)
        .min(point_segment(a1, b0, b1))
        .min(point_segment(b0, a0, a1))
        .min(point_segment(b1, a0, a1))
}

/// Minimum distance between two polylines.
pub fn polyline_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for sa in a.windows(2) {
        let (ax0, ax1) = (sa[0].0.min(sa[1].0), sa[0].0.max(sa[1].0));
        let (ay0, ay1) = (sa[0].1.min(sa[1].1), sa[0].1.max(sa[1].1));
        for sb in b.windows(2) {
            let gap_x = (sb[0].0.min(sb[1].0) - ax1).max(ax0 - sb[0].0.max(sb[1].0));
            let gap_y = (sb[0].1.min(sb[1].1) - ay1).max(ay0 - sb[0].1.max(sb[1].1));
            if gap_x.max(gap_y) >= best {
                continue;
            }
            best = best.min(segment_distance(sa[0], sa[1], sb[0], sb[1]));
        }
    }
    best
}

/// Largest `|field - ε|` over the samples of an arc.
pub fn arc_residual(prob: &PerturbedProblem, arc: &Arc) -> f64 {
    let p = prob.shifted();
    arc.samples.iter().map(|&z| eval_field(&p, arc.field, z).0.abs()).fold(0.0, f64::max)
}

/// Largest `|field - ε|` over the samples relative to the pointwise
/// tolerance; at most 1 for a correctly traced arc.
pub fn arc_residual_ratio(prob: &PerturbedProblem, arc: &Arc, ctrl: &StepControl) -> f64 {
    let p = prob.shifted();
    arc.samples
        .iter()
        .map(|&z| eval_field(&p, arc.field, z).0.abs() / on_curve_tolerance(&p, ctrl.on_curve_tol, z))
        .fold(0.0, f64::max)
}

/// Sign changes of `dx` plus sign changes of `dy` along the samples.
pub fn extrema_count(arc: &Arc) -> usize {
    let changes = |coord: fn(&(f64, f64)) -> f64| {
        let mut last = 0.0f64;
        let mut count = 0;
        for w in arc.samples.windows(2) {
            let d = coord(&w[1]) - coord(&w[0]);
            if d.abs() <= 1e-9 * dist(w[0], w[1]) {
                continue;
            }
            if last != 0.0 && d.signum() != last.signum() {
                count += 1;
            }
            last = d;
        }
        count
    };
    changes(|z| z.0) + changes(|z| z.1)
}

/// Largest disagreement between chord slopes and the implicit slope
/// `dy/dx = -F_x/F_y` (or `dx/dy = -F_y/F_x` where `|F_y| < |F_x|`) at the
/// chord midpoints of `count` evenly spread chords.
pub fn slope_deviation(prob: &PerturbedProblem, arc: &Arc, count: usize) -> f64 {
    let p = prob.shifted();
    let chords = arc.samples.len() - 1;
    (0..count.min(chords))
        .map(|k| {
            let i = k * chords / count.min(chords);
            let (a, b) = (arc.samples[i], arc.samples[i + 1]);
            let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
            let (_, (fx, fy)) = eval_field(&p, arc.field, mid);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            if fy.abs() >= fx.abs() {
                (dy / dx - (-fx / fy)).abs()
            } else {
                (dx / dy - (-fy / fx)).abs()
            }
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::resolve_annulus;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(p: &Poly) -> (PerturbedProblem, NodeSet, StepControl) {
        let prob = perturb_regular(p, 1e-12).unwrap();
        let ns = resolve_annulus(&prob.shifted()).unwrap();
        let ctrl = StepControl::for_problem(&prob, ns.radius);
        (prob, ns, ctrl)
    }

    #[test]
    fn perturb_examples() {
        let prob = perturb_regular(&Poly::from_real(&[-1.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(prob.eps1, 0.0);
        assert_eq!(prob.eps2, 1e-6);
        assert!(prob.is_regular());

        let prob = perturb_regular(&Poly::monomial(2), 1e-12).unwrap();
        assert!(prob.eps1 != 0.0 && prob.eps2 != 0.0);
        assert!(prob.is_regular());

        let prob = perturb_regular(&Poly::from_real(&[0.0, -3.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(prob.eps1, 0.0);
        assert_eq!(prob.scale, 2.0);
        assert!(prob.is_regular());
    }

    #[test]
    fn perturb_skips_blocked_offsets() {
        // critical values g = 0 and g = 1e-6 rule out both 0 and +δ₀
        let p = Poly::from_roots(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let mut prob = perturb_regular(&p, 1e-12).unwrap();
        prob.eps1 = 1e-6;
        prob.margin = 0.5e-6;
        assert!(prob.is_regular());
        prob.eps1 = 0.0;
        assert!(!prob.is_regular());
    }

    #[test]
    fn linear_arc_is_a_diameter() {
        let p = Poly::monomial(1);
        let prob = PerturbedProblem::with_offsets(p.clone(), 0.0, 0.0);
        let ns = crate::annulus::boundary_nodes(&p, 2.0).unwrap();
        let ctrl = StepControl::for_problem(&prob, 2.0);
        let start = ns.node(NodeKind::P, 0);
        let arc = trace_curve(&prob, Field::G, start, &ns, &ctrl).unwrap();
        assert_eq!(arc.end_node.index, 1);
        assert!(arc.samples.iter().all(|s| s.0.abs() < 1e-12));
        assert!((arc.length - 4.0).abs() < 1e-9);
        assert!(arc.samples.windows(2).all(|w| dist(w[0], w[1]) <= ctrl.max_step));
    }

    #[test]
    fn wrong_field_rejected() {
        let p = Poly::monomial(1);
        let prob = PerturbedProblem::with_offsets(p.clone(), 0.0, 0.0);
        let ns = crate::annulus::boundary_nodes(&p, 2.0).unwrap();
        let ctrl = StepControl::for_problem(&prob, 2.0);
        assert!(trace_curve(&prob, Field::H, ns.node(NodeKind::P, 0), &ns, &ctrl).is_err());
    }

    #[test]
    fn unperturbed_square_has_straight_arcs() {
        // g = x² - y² vanishes on y = ±x; trace from the π/4 node
        let p = Poly::monomial(2);
        let prob = PerturbedProblem::with_offsets(p.clone(), 0.0, 0.0);
        let ns = crate::annulus::boundary_nodes(&p, 2.0).unwrap();
        let ctrl = StepControl::for_problem(&prob, 2.0);
        let start = ns.node(NodeKind::P, 0);
        // the zero level passes through the saddle, where the continuation
        // is undefined; whatever is traced must stay on the two diagonals
        let result = trace_curve(&prob, Field::G, start, &ns, &ctrl);
        if let Ok(arc) = result {
            assert!(arc.samples.iter().all(|s| (s.0.abs() - s.1.abs()).abs() < 1e-6));
        }
    }

    #[test]
    fn perturbed_square_matchings() {
        let (prob, ns, ctrl) = setup(&Poly::monomial(2));
        let m = compute_matchings(&prob, &ns, &ctrl).unwrap();
        assert_eq!(m.p_arcs.len(), 2);
        assert_eq!(m.q_arcs.len(), 2);
        for i in 0..4 {
            assert_ne!(m.p.partner(i), i);
            assert_eq!(m.p.partner(m.p.partner(i)), i);
        }
    }

    #[test]
    fn linear_matchings() {
        let (prob, ns, ctrl) = setup(&Poly::monomial(1));
        let m = compute_matchings(&prob, &ns, &ctrl).unwrap();
        assert_eq!(m.p.pairs(), &[1, 0]);
        assert_eq!(m.q.pairs(), &[1, 0]);
    }

    #[test]
    fn cube_root_arcs_audit() {
        let (prob, ns, ctrl) = setup(&Poly::from_real(&[-1.0, 0.0, 0.0, 1.0]));
        let m = compute_matchings(&prob, &ns, &ctrl).unwrap();
        assert_eq!(m.q_arcs.len(), 3);
        for arc in m.p_arcs.iter().chain(&m.q_arcs) {
            assert!(arc_residual(&prob, arc) <= 1e-8);
            assert!(arc_residual_ratio(&prob, arc, &ctrl) <= 1.0);
            assert!(extrema_count(arc) <= 2 * 3 * 2);
            assert!(slope_deviation(&prob, arc, 10) <= 1e-2);
            assert_ne!(arc.start_node.index, arc.end_node.index);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let (prob, ns, ctrl) = setup(&Poly::from_real(&[-1.0, 0.0, 1.0]));
        let seq = compute_matchings(&prob, &ns, &ctrl).unwrap();
        let par = compute_matchings(&prob, &ns, &StepControl { jobs: 4, ..ctrl }).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn matching_validation() {
        assert!(Matching::new(vec![1, 0, 3, 2]).is_ok());
        assert!(Matching::new(vec![0, 1]).is_err());
        assert!(Matching::new(vec![1, 2, 0]).is_err());
        assert!(Matching::from_pairs(4, &[(0, 1)]).is_err());
        assert_eq!(Matching::from_pairs(4, &[(0, 3), (1, 2)]).unwrap().partner(3), 0);
    }

    #[test]
    fn segment_geometry() {
        assert_eq!(segment_distance((0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)), 0.0);
        assert!((segment_distance((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)) - 1.0).abs() < 1e-15);
        let a = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        let b = [(0.0, 0.5), (2.0, 0.25)];
        assert!((polyline_distance(&a, &b) - 0.25).abs() < 1e-15);
    }
}
