//! Exterior structure of the level sets `g = 0` and `h = 0`.
//!
//! Far out, `f(z) ≈ z^n`, so on a large circle `|z| = R` the curve `g = 0`
//! crosses near the 2n zeros `(2i+1)π/2n` of `cos nθ` (the P-nodes) and
//! `h = 0` near the 2n zeros `iπ/n` of `sin nθ` (the Q-nodes). Counter-clockwise
//! from angle 0 the nodes read `Q_0 P_0 Q_1 P_1 …`, i.e. `Q_k ~ [2k]` and
//! `P_k ~ [2k+1]`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::bounds::reich_radius;
use crate::error::{Error, Result};
use crate::poly::{Field, Poly};

/// One degree, the bound on node deviation from its asymptote.
pub const MAX_DEVIATION: f64 = PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Zero of `g` on the circle.
    P,
    /// Zero of `h` on the circle.
    Q,
}

impl NodeKind {
    pub fn field(self) -> Field {
        match self {
            NodeKind::P => Field::G,
            NodeKind::Q => Field::H,
        }
    }

    pub fn other(self) -> NodeKind {
        match self {
            NodeKind::P => NodeKind::Q,
            NodeKind::Q => NodeKind::P,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub kind: NodeKind,
    pub index: usize,
    /// In `[0, 2π)`.
    pub angle: f64,
    pub asymptote: f64,
    /// `angle - asymptote`, wrapped to `(-π, π]`.
    pub deviation: f64,
}

impl BoundaryNode {
    /// Position `[2k]` (Q) or `[2k+1]` (P) in the cyclic order.
    pub fn label(&self) -> usize {
        match self.kind {
            NodeKind::Q => 2 * self.index,
            NodeKind::P => 2 * self.index + 1,
        }
    }

    pub fn position(&self, radius: f64) -> Complex64 {
        Complex64::from_polar(radius, self.angle)
    }
}

/// The `4n` nodes on `|z| = R`, stored in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub radius: f64,
    pub degree: usize,
    pub nodes: Vec<BoundaryNode>,
}

impl NodeSet {
    pub fn node(&self, kind: NodeKind, index: usize) -> &BoundaryNode {
        match kind {
            NodeKind::Q => &self.nodes[2 * index],
            NodeKind::P => &self.nodes[2 * index + 1],
        }
    }

    pub fn of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &BoundaryNode> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn max_deviation(&self) -> f64 {
        self.nodes.iter().map(|n| n.deviation.abs()).fold(0.0, f64::max)
    }
}

pub fn asymptote(kind: NodeKind, index: usize, n: usize) -> f64 {
    match kind {
        NodeKind::P => (2 * index + 1) as f64 * PI / (2 * n) as f64,
        NodeKind::Q => index as f64 * PI / n as f64,
    }
}

fn wrap_pi(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

fn component(p: &Poly, kind: NodeKind, radius: f64, theta: f64) -> f64 {
    let v = p.eval(Complex64::from_polar(radius, theta));
    match kind {
        NodeKind::P => v.re,
        NodeKind::Q => v.im,
    }
}

/// Whether `g`, `h` on the circle agree in sign with `R^n cos nθ`,
/// `R^n sin nθ` at the 4n midpoints between consecutive asymptotes.
fn signs_match_leading_term(monic: &Poly, radius: f64) -> bool {
    let n = monic.degree();
    (0..4 * n).all(|k| {
        let theta = k as f64 * PI / (2 * n) as f64 + PI / (4 * n) as f64;
        let v = monic.eval(Complex64::from_polar(radius, theta));
        let (c, s) = ((n as f64 * theta).cos(), (n as f64 * theta).sin());
        v.re * c > 0.0 && v.im * s > 0.0
    })
}

/// Smallest `R = reich_radius · 2^m` whose circles `R` and `R+1` pass the
/// leading-term sign test.
pub fn annulus_radius(p: &Poly) -> Result<f64> {
    let monic = p.monic();
    let mut radius = reich_radius(&monic)?;
    loop {
        if signs_match_leading_term(&monic, radius) && signs_match_leading_term(&monic, radius + 1.0) {
            return Ok(radius);
        }
        radius *= 2.0;
    }
}

/// Bisects `g` (P-nodes) and `h` (Q-nodes) on `|z| = R` inside
/// `asymptote ± π/4n`, to about 1e-12 radians.
pub fn boundary_nodes(p: &Poly, radius: f64) -> Result<NodeSet> {
    let monic = p.monic();
    let n = monic.degree();
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let half = PI / (4 * n) as f64;
    let mut nodes = Vec::with_capacity(4 * n);
    for index in 0..2 * n {
        for kind in [NodeKind::Q, NodeKind::P] {
            let asym = asymptote(kind, index, n);
            let angle = bisect_angle(&monic, kind, radius, asym - half, asym + half)
                .ok_or(Error::BracketFailure { kind, index })?;
            let angle = angle.rem_euclid(TAU);
            nodes.push(BoundaryNode { kind, index, angle, asymptote: asym, deviation: wrap_pi(angle - asym) });
        }
    }
    Ok(NodeSet { radius, degree: n, nodes })
}

fn bisect_angle(p: &Poly, kind: NodeKind, radius: f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = component(p, kind, radius, lo);
    let fhi = component(p, kind, radius, hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let fm = component(p, kind, radius, mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Labels in counter-clockwise order starting from `Q_0`; must read
/// `0, 1, …, 4n-1`.
pub fn interleaving_check(ns: &NodeSet) -> Result<Vec<usize>> {
    let mut order: Vec<&BoundaryNode> = ns.nodes.iter().collect();
    order.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let start = order
        .iter()
        .position(|n| n.kind == NodeKind::Q && n.index == 0)
        .ok_or(Error::InterleavingViolation)?;
    order.rotate_left(start);
    let labels: Vec<usize> = order.iter().map(|n| n.label()).collect();
    if labels.len() != 4 * ns.degree || labels.iter().enumerate().any(|(k, &l)| k != l) {
        return Err(Error::InterleavingViolation);
    }
    Ok(labels)
}

/// Radius and nodes satisfying the sign test, the interleaving and the 1°
/// deviation bound; doubles `R` until all three hold.
pub fn resolve_annulus(p: &Poly) -> Result<NodeSet> {
    let monic = p.monic();
    let mut radius = annulus_radius(&monic)?;
    for _ in 0..64 {
        let ok = boundary_nodes(&monic, radius)
            .ok()
            .filter(|ns| interleaving_check(ns).is_ok() && ns.max_deviation() <= MAX_DEVIATION);
        if let Some(ns) = ok {
            return Ok(ns);
        }
        radius *= 2.0;
    }
    Err(Error::InterleavingViolation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_examples() {
        assert_eq!(annulus_radius(&Poly::monomial(1)).unwrap(), 1.0);
        assert_eq!(annulus_radius(&Poly::monomial(3)).unwrap(), 1.0);
        let p = Poly::from_real(&[0.0, 0.0, 10.0, 1.0]);
        let r = annulus_radius(&p).unwrap();
        assert!(r >= reich_radius(&p).unwrap());
        // the lower term loses to the leading term's midpoint magnitude
        for radius in [r, r + 1.0] {
            assert!(10.0 * radius * radius < radius.powi(3) * (PI / 4.0).sin());
        }
    }

    #[test]
    fn linear_nodes() {
        let ns = boundary_nodes(&Poly::monomial(1), 2.0).unwrap();
        let p: Vec<f64> = ns.of_kind(NodeKind::P).map(|n| n.angle).collect();
        let q: Vec<f64> = ns.of_kind(NodeKind::Q).map(|n| n.angle).collect();
        assert!((p[0] - PI / 2.0).abs() < 1e-11 && (p[1] - 3.0 * PI / 2.0).abs() < 1e-11);
        assert!(q[0].min(TAU - q[0]) < 1e-11 && (q[1] - PI).abs() < 1e-11);
        assert_eq!(interleaving_check(&ns).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn cubic_monomial_nodes() {
        let ns = boundary_nodes(&Poly::monomial(3), 1.0).unwrap();
        for (i, node) in ns.of_kind(NodeKind::P).enumerate() {
            assert!((node.angle - (2 * i + 1) as f64 * PI / 6.0).abs() < 1e-11);
        }
        assert_eq!(interleaving_check(&ns).unwrap(), (0..12).collect::<Vec<_>>());
        assert!(ns.max_deviation() < 1e-11);
    }

    #[test]
    fn quadratic_nodes_against_dense_sampling() {
        let p = Poly::from_real(&[1.0, 1.0, 1.0]);
        let ns = resolve_annulus(&p).unwrap();
        let r = ns.radius;
        // oracle: sign changes of g on a fine grid
        let m = 200_000;
        let mut zeros = Vec::new();
        let g = |t: f64| p.eval(Complex64::from_polar(r, t)).re;
        for k in 0..m {
            let (a, b) = (TAU * k as f64 / m as f64, TAU * (k + 1) as f64 / m as f64);
            if g(a).signum() != g(b).signum() {
                zeros.push(0.5 * (a + b));
            }
        }
        assert_eq!(zeros.len(), 4);
        for (node, z) in ns.of_kind(NodeKind::P).zip(&zeros) {
            assert!((node.angle - z).abs() < TAU / m as f64);
            assert!(node.deviation.abs() <= MAX_DEVIATION);
        }
    }

    #[test]
    fn interleaving_violation_detected() {
        let mut ns = boundary_nodes(&Poly::monomial(2), 1.0).unwrap();
        ns.nodes[1].angle = ns.nodes[3].angle + 0.01;
        assert_eq!(interleaving_check(&ns), Err(Error::InterleavingViolation));
    }

    #[test]
    fn bracket_failure_when_radius_too_small() {
        // z - 5 on |z| = 1: g = x - 5 < 0 everywhere
        let p = Poly::from_real(&[-5.0, 1.0]);
        assert!(matches!(boundary_nodes(&p, 1.0), Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn resolve_meets_deviation_bound() {
        let p = Poly::from_real(&[-5.0, 1.0]);
        let ns = resolve_annulus(&p).unwrap();
        assert!(ns.max_deviation() <= MAX_DEVIATION);
        assert!(ns.radius >= 5.0 / MAX_DEVIATION.sin());
    }
}
