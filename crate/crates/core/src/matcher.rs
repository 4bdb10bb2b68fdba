//! From matchings to a root: a separated pair of arcs, a Miranda box around
//! their crossing, bisection, and a final descent polish.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::annulus::{resolve_annulus, NodeKind, NodeSet};
use crate::descent::{solve_root, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::tracer::{
    compute_matchings, perturb_regular_with, segment_intersection, Arc, Matching, Matchings, PerturbedProblem,
    StepControl,
};

/// A P-arc and a Q-arc whose endpoints alternate around the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparatedPair {
    /// P-node indices.
    pub sigma: (usize, usize),
    /// Q-node indices.
    pub tau: (usize, usize),
}

fn label(kind: NodeKind, index: usize) -> usize {
    match kind {
        NodeKind::Q => 2 * index,
        NodeKind::P => 2 * index + 1,
    }
}

fn offset(x: usize, from: usize, total: usize) -> usize {
    (x + total - from) % total
}

/// Whether label `x` lies strictly inside the counter-clockwise arc `a → b`.
fn in_open(x: usize, a: usize, b: usize, total: usize) -> bool {
    let d = offset(x, a, total);
    d > 0 && d < offset(b, a, total)
}

/// Whether chord `c–d` crosses chord `a–b`; labels are positions on a
/// circle of `total` and all four are distinct.
pub fn separates(a: usize, b: usize, c: usize, d: usize, total: usize) -> bool {
    in_open(c, a, b, total) != in_open(d, a, b, total)
}

/// Sector induction: start from the P-chord at `P_0`; if every chord of the
/// other kind starting inside its sector also ends inside, descend into the
/// sector cut off by one of them and swap roles.
pub fn find_separated_pair(match_p: &Matching, match_q: &Matching) -> Result<SeparatedPair> {
    let size = match_p.len();
    if size == 0 || !size.is_multiple_of(2) || match_q.len() != size {
        return Err(Error::InvalidMatching(format!("sizes {} and {}", match_p.len(), match_q.len())));
    }
    let total = 2 * size;
    let of = |kind: NodeKind| match kind {
        NodeKind::P => match_p,
        NodeKind::Q => match_q,
    };

    let mut kind = NodeKind::P;
    let mut chord = (0, match_p.partner(0));
    for _ in 0..total {
        let (la, lb) = (label(kind, chord.0), label(kind, chord.1));
        let other = kind.other();
        let inside: Vec<usize> = (0..size).filter(|&i| in_open(label(other, i), la, lb, total)).collect();
        for &i in &inside {
            let j = of(other).partner(i);
            if !in_open(label(other, j), la, lb, total) {
                return Ok(match kind {
                    NodeKind::P => SeparatedPair { sigma: chord, tau: (i, j) },
                    NodeKind::Q => SeparatedPair { sigma: (i, j), tau: chord },
                });
            }
        }
        let &i = inside
            .first()
            .ok_or_else(|| Error::MatchingInconsistency("empty sector between same-kind nodes".into()))?;
        let j = of(other).partner(i);
        chord = if offset(label(other, i), la, total) < offset(label(other, j), la, total) { (i, j) } else { (j, i) };
        kind = other;
    }
    Err(Error::MatchingInconsistency("sector induction did not terminate".into()))
}

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxND {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxND {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds differ in dimension");
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "box bounds out of order");
        BoxND { lo, hi }
    }

    /// Square of half-width `half` centred at `(x, y)`.
    pub fn square(x: f64, y: f64, half: f64) -> Self {
        BoxND::new(vec![x - half, y - half], vec![x + half, y + half])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.widths().iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| a <= v && v <= b)
    }

    /// Low, high and middle halves along `axis`.
    pub fn split(&self, axis: usize) -> [BoxND; 3] {
        let (a, b) = (self.lo[axis], self.hi[axis]);
        let (m, q) = (0.5 * (a + b), 0.25 * (b - a));
        let with = |lo: f64, hi: f64| {
            let mut bx = self.clone();
            bx.lo[axis] = lo;
            bx.hi[axis] = hi;
            bx
        };
        [with(a, m), with(m, b), with(a + q, b - q)]
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Neg,
    Pos,
}

fn face_sign(values: impl Iterator<Item = f64> + Clone, strict: bool) -> Option<Side> {
    let neg = |v: f64| if strict { v < 0.0 } else { v <= 0.0 };
    let pos = |v: f64| if strict { v > 0.0 } else { v >= 0.0 };
    if values.clone().all(neg) {
        Some(Side::Neg)
    } else if values.clone().all(pos) {
        Some(Side::Pos)
    } else {
        None
    }
}

/// Grid of `m` points per free axis on the face `x_axis = value`.
fn face_points(bx: &BoxND, axis: usize, value: f64, m: usize) -> Vec<Vec<f64>> {
    let n = bx.dim();
    let free: Vec<usize> = (0..n).filter(|&k| k != axis).collect();
    let count = m.pow(free.len() as u32);
    (0..count)
        .map(|mut code| {
            let mut x = vec![0.0; n];
            x[axis] = value;
            for &k in &free {
                let j = code % m;
                code /= m;
                let t = if m > 1 { j as f64 / (m - 1) as f64 } else { 0.5 };
                x[k] = bx.lo[k] + t * (bx.hi[k] - bx.lo[k]);
            }
            x
        })
        .collect()
}

fn assign(ok: &[Vec<bool>], row: usize, used: &mut [bool]) -> bool {
    if row == ok.len() {
        return true;
    }
    for col in 0..ok.len() {
        if ok[row][col] && !used[col] {
            used[col] = true;
            if assign(ok, row + 1, used) {
                return true;
            }
            used[col] = false;
        }
    }
    false
}

/// Miranda's condition on face samples: some permutation pairs each
/// component `F_i` with an axis `k` on whose two faces it has opposite
/// constant signs.
fn miranda_core<F: Fn(&[f64]) -> Vec<f64>>(f: &F, bx: &BoxND, m: usize, strict: bool) -> bool {
    let n = bx.dim();
    let mut ok = vec![vec![false; n]; n];
    for k in 0..n {
        let lo: Vec<Vec<f64>> = face_points(bx, k, bx.lo[k], m).iter().map(|x| f(x)).collect();
        let hi: Vec<Vec<f64>> = face_points(bx, k, bx.hi[k], m).iter().map(|x| f(x)).collect();
        for (i, row) in ok.iter_mut().enumerate() {
            let s_lo = face_sign(lo.iter().map(|v| v[i]), strict);
            let s_hi = face_sign(hi.iter().map(|v| v[i]), strict);
            row[k] = matches!((s_lo, s_hi), (Some(Side::Neg), Some(Side::Pos)) | (Some(Side::Pos), Some(Side::Neg)));
        }
    }
    assign(&ok, 0, &mut vec![false; n])
}

/// Samples per edge in the planar test: 64 interior points and both corners.
const EDGE_SAMPLES: usize = 66;

fn miranda_poly(p: &Poly, rotation: Complex64, bx: &BoxND) -> bool {
    let f = |x: &[f64]| {
        let v = rotation * p.eval(Complex64::new(x[0], x[1]));
        vec![v.re, v.im]
    };
    miranda_core(&f, bx, EDGE_SAMPLES, true)
}

/// Planar Miranda test for `(g - ε₁, h - ε₂)` with strict signs.
pub fn miranda_test(prob: &PerturbedProblem, bx: &BoxND) -> bool {
    assert_eq!(bx.dim(), 2, "planar test needs a 2-D box");
    miranda_poly(&prob.shifted(), Complex64::new(1.0, 0.0), bx)
}

/// Miranda test for `F: R^n → R^n` on an `m^(n-1)` grid per face, `m = 9`,
/// with weak inequalities.
pub fn miranda_test_nd<F: Fn(&[f64]) -> Vec<f64>>(f: F, bx: &BoxND) -> bool {
    miranda_core(&f, bx, 9, false)
}

/// A certified crossing: the final box passes the Miranda test and has
/// diameter at most the requested tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub x: f64,
    pub y: f64,
    pub bx: BoxND,
    pub bisections: usize,
}

impl Crossing {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// Closest approach of two polylines: an estimate of the crossing point and
/// the local sample spacing there.
fn closest_approach(a: &[(f64, f64)], b: &[(f64, f64)]) -> ((f64, f64), f64) {
    let mut best = (f64::INFINITY, (0.0, 0.0), 0.0);
    let seg_len = |s: &[(f64, f64)]| (s[1].0 - s[0].0).hypot(s[1].1 - s[0].1);
    for sa in a.windows(2) {
        for sb in b.windows(2) {
            let spacing = seg_len(sa).max(seg_len(sb));
            if let Some((s, _)) = segment_intersection(sa[0], sa[1], sb[0], sb[1]) {
                let p = (sa[0].0 + s * (sa[1].0 - sa[0].0), sa[0].1 + s * (sa[1].1 - sa[0].1));
                return (p, spacing);
            }
            let candidates = [
                (sa[0], sb[0], sb[1]),
                (sa[1], sb[0], sb[1]),
                (sb[0], sa[0], sa[1]),
                (sb[1], sa[0], sa[1]),
            ];
            for (p, s0, s1) in candidates {
                let (dx, dy) = (s1.0 - s0.0, s1.1 - s0.1);
                let len2 = dx * dx + dy * dy;
                let t = if len2 > 0.0 { (((p.0 - s0.0) * dx + (p.1 - s0.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
                let q = (s0.0 + t * dx, s0.1 + t * dy);
                let d = (p.0 - q.0).hypot(p.1 - q.1);
                if d < best.0 {
                    best = (d, (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1)), spacing);
                }
            }
        }
    }
    (best.1, best.2)
}

/// Passes unrotated, or after rotating `f - ε` by `-arg f'(centre)`, which
/// makes the Jacobian near the zero close to a positive multiple of the
/// identity.
fn passes(p: &Poly, bx: &BoxND) -> bool {
    if miranda_poly(p, Complex64::new(1.0, 0.0), bx) {
        return true;
    }
    let c = bx.center();
    let (_, d) = p.eval_with_derivative(Complex64::new(c[0], c[1]));
    d.norm() > 0.0 && miranda_poly(p, (d / d.norm()).conj(), bx)
}

fn center_residual(p: &Poly, bx: &BoxND) -> f64 {
    let c = bx.center();
    p.eval(Complex64::new(c[0], c[1])).norm()
}

/// Miranda box around the crossing of a P-arc and a Q-arc, bisected until
/// its diameter is at most `tol`.
pub fn locate_crossing(prob: &PerturbedProblem, arc_g: &Arc, arc_h: &Arc, tol: f64) -> Result<Crossing> {
    let p = prob.shifted();
    let (guess, spacing) = closest_approach(&arc_g.samples, &arc_h.samples);
    let radius = arc_g.samples.iter().chain(&arc_h.samples).map(|z| z.0.hypot(z.1)).fold(0.0, f64::max);
    let base = 4.0 * spacing.max(tol);
    let shrinking = (0..5).map(|k| base / (1 << k) as f64);
    let growing = (1..64).map(|k| base * (1u64 << k) as f64).take_while(|&h| h <= 2.0 * radius.max(base));
    let mut current = shrinking
        .chain(growing)
        .map(|half| BoxND::square(guess.0, guess.1, half))
        .find(|bx| passes(&p, bx))
        .ok_or(Error::LocalizationFailure)?;

    let mut bisections = 0;
    while current.diameter() > tol {
        if bisections >= 200 {
            return Err(Error::LocalizationFailure);
        }
        let w = current.widths();
        let axis = if w[0] >= w[1] { 0 } else { 1 };
        current = current
            .split(axis)
            .into_iter()
            .filter(|bx| passes(&p, bx))
            .min_by(|a, b| center_residual(&p, a).total_cmp(&center_residual(&p, b)))
            .ok_or(Error::LocalizationFailure)?;
        bisections += 1;
    }
    let c = current.center();
    Ok(Crossing { x: c[0], y: c[1], bx: current, bisections })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussOptions {
    /// Target `|f(z)|` for the polished root.
    pub tol: f64,
    pub jobs: usize,
    pub seed: u64,
    /// Extra attempts, each with a stronger perturbation and tighter steps.
    pub retries: usize,
}

impl Default for GaussOptions {
    fn default() -> Self {
        GaussOptions { tol: 1e-9, jobs: 1, seed: 0, retries: 3 }
    }
}

/// Every intermediate of one root-finding run.
#[derive(Debug, Clone)]
pub struct GaussRun {
    pub root: Complex64,
    pub residual: f64,
    /// Perturbation of the monic polynomial.
    pub problem: PerturbedProblem,
    pub nodes: NodeSet,
    pub matchings: Matchings,
    pub pair: SeparatedPair,
    pub crossing: Crossing,
    pub stages: Vec<(&'static str, Duration)>,
}

impl GaussRun {
    pub fn sigma_arc(&self) -> &Arc {
        self.matchings.arc_through(NodeKind::P, self.pair.sigma.0).expect("sigma arc traced")
    }

    pub fn tau_arc(&self) -> &Arc {
        self.matchings.arc_through(NodeKind::Q, self.pair.tau.0).expect("tau arc traced")
    }
}

fn retryable(e: &Error) -> bool {
    matches!(
        e.root_cause(),
        Error::StepUnderflow { .. }
            | Error::TraceBudgetExceeded
            | Error::NodeSnapAmbiguity
            | Error::MatchingInconsistency(_)
            | Error::ArcMerge { .. }
            | Error::LocalizationFailure
    )
}

/// Full pipeline: perturb, resolve the annulus, trace, pick a separated
/// pair, localise its crossing and polish with descent on `p`.
pub fn gauss_run(p: &Poly, opts: &GaussOptions) -> Result<GaussRun> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let mut last = Error::LocalizationFailure;
    for attempt in 0..=opts.retries {
        match attempt_run(p, opts, attempt) {
            Ok(run) => return Ok(run),
            Err(e) if retryable(&e) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn attempt_run(p: &Poly, opts: &GaussOptions, attempt: usize) -> Result<GaussRun> {
    let mut stages = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, stages: &mut Vec<(&'static str, Duration)>| {
        stages.push((name, clock.elapsed()));
        clock = Instant::now();
    };

    let monic = p.monic();
    let relative = 1e-6 * 10f64.powi(attempt as i32);
    let problem = perturb_regular_with(&monic, 1e-13, relative).map_err(|e| e.at("perturb"))?;
    lap("perturb", &mut stages);

    let nodes = resolve_annulus(&problem.shifted()).map_err(|e| e.at("annulus"))?;
    lap("annulus", &mut stages);

    let mut ctrl = StepControl::for_problem(&problem, nodes.radius);
    for _ in 0..attempt {
        ctrl = ctrl.tightened();
    }
    ctrl.jobs = opts.jobs;
    ctrl.seed = opts.seed;
    let matchings = compute_matchings(&problem, &nodes, &ctrl).map_err(|e| e.at("trace"))?;
    lap("trace", &mut stages);

    let pair = find_separated_pair(&matchings.p, &matchings.q).map_err(|e| e.at("match"))?;
    lap("match", &mut stages);

    let sigma = matchings.arc_through(NodeKind::P, pair.sigma.0).expect("sigma arc traced");
    let tau = matchings.arc_through(NodeKind::Q, pair.tau.0).expect("tau arc traced");
    let tol = crossing_tolerance(&problem, sigma, tau, nodes.radius);
    let crossing = locate_crossing(&problem, sigma, tau, tol).map_err(|e| e.at("locate"))?;
    lap("locate", &mut stages);

    let root = solve_root(p, crossing.point(), Complex64::new(0.0, 0.0), opts.tol, DEFAULT_MAX_ITER)
        .map_err(|e| e.at("polish"))?;
    let residual = p.eval(root).norm();
    lap("polish", &mut stages);

    Ok(GaussRun { root, residual, problem, nodes, matchings, pair, crossing, stages })
}

/// `1e-8 R`, raised where rounding in `f` would swamp the face signs.
fn crossing_tolerance(prob: &PerturbedProblem, sigma: &Arc, tau: &Arc, radius: f64) -> f64 {
    let (guess, _) = closest_approach(&sigma.samples, &tau.samples);
    let z = Complex64::new(guess.0, guess.1);
    let p = prob.shifted();
    let magnitude: f64 = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm());
    let slope = p.eval_with_derivative(z).1.norm().max(f64::MIN_POSITIVE);
    (1e-8 * radius).max(1e4 * f64::EPSILON * magnitude / slope)
}

/// A root of `p` with `|p(z)| <= tol`.
pub fn gauss_root(p: &Poly, tol: f64) -> Result<Complex64> {
    gauss_run(p, &GaussOptions { tol, ..GaussOptions::default() }).map(|run| run.root)
}
