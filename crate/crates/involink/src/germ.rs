//! Equivariant multigerms of plane curves and their jet-level invariants.
//!
//! A multigerm is a finite set of local polynomial branches
//! `t ↦ (x(t), y(t))` with a Z₂ structure coming from the symmetry
//! `τ(x, y) = (−x, y)` of the plane about the vertical axis
//! `𝓛 = {x = 0}`:
//!
//! * a **paired** branch represents a symmetric pair — its mirror
//!   `(−x(t), y(t))` is implied and never stored;
//! * a **fixed-point** branch is its own mirror, which forces `x` to be
//!   odd and `y` to be even in `t` (domain involution `t ↦ −t`).
//!
//! Invariants (multiplicity, `(p,q)`-cusp type, tangency order, axis
//! relation) are computed from jets through degree [`JET_CAP`]; when a
//! truncated jet cannot decide, the operations fail with
//! [`GermError::JetExhausted`] rather than guess.

use crate::realalg::{Interval, Polynomial};
use thiserror::Error;

/// All invariants are computed from coefficients through this degree.
pub const JET_CAP: usize = 9;

/// Relative coefficient tolerance for "this jet coefficient is zero".
pub const COEFF_REL_TOL: f64 = 1e-9;

/// Errors from germ-level computations and parsing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GermError {
    #[error("operation requires a paired branch")]
    RoleError,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("jet through degree {JET_CAP} is insufficient to decide: {0}")]
    JetExhausted(String),
    #[error("base-point orbits intersect: {0}")]
    OverlapError(String),
    #[error("strikethrough line is not ordinary: tangent direction ({0}, {1}) is obstructed")]
    NotOrdinary(f64, f64),
    #[error("branches are not tangent at the given parameters")]
    NotTangent,
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
}

impl From<crate::realalg::RealAlgError> for GermError {
    fn from(e: crate::realalg::RealAlgError) -> Self {
        match e {
            crate::realalg::RealAlgError::DegenerateInput(msg) => GermError::DegenerateInput(msg),
        }
    }
}

/// Whether a branch is one of a symmetric pair or fixed by the involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRole {
    Paired,
    FixedPoint,
}

/// Relation of a branch's base point and generalized tangent line to the
/// symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisRelation {
    OffAxis,
    OnAxisOblique,
    OnAxisLineTangent,
    OnAxisPerpendicular,
    Fixed,
}

/// One local branch `t ↦ (x(t), y(t))` over a symmetric parameter window.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub role: BranchRole,
    pub x: Polynomial,
    pub y: Polynomial,
    pub window: Interval,
}

impl Branch {
    /// Build a branch, enforcing the equivariance shape: a fixed-point
    /// branch must have odd `x`, even `y`, and a symmetric window.
    pub fn new(
        role: BranchRole,
        x: Polynomial,
        y: Polynomial,
        window: Interval,
    ) -> Result<Self, GermError> {
        if (window.lo + window.hi).abs() > 1e-12 {
            return Err(GermError::DegenerateInput(
                "branch window must be symmetric about 0".into(),
            ));
        }
        if role == BranchRole::FixedPoint {
            let scale = x.scale().max(y.scale()).max(1e-30);
            for (k, &c) in x.coeffs().iter().enumerate() {
                if k % 2 == 0 && c.abs() > COEFF_REL_TOL * scale {
                    return Err(GermError::DegenerateInput(format!(
                        "fixed branch x must be odd in t (found x[{k}] = {c})"
                    )));
                }
            }
            for (k, &c) in y.coeffs().iter().enumerate() {
                if k % 2 == 1 && c.abs() > COEFF_REL_TOL * scale {
                    return Err(GermError::DegenerateInput(format!(
                        "fixed branch y must be even in t (found y[{k}] = {c})"
                    )));
                }
            }
        }
        Ok(Branch { role, x, y, window })
    }

    /// Convenience constructor for paired branches.
    pub fn paired(x: Polynomial, y: Polynomial, window: Interval) -> Self {
        Branch::new(BranchRole::Paired, x, y, window).expect("paired branch is unconstrained")
    }

    /// Convenience constructor for fixed-point branches; panics on parity
    /// violation (use [`Branch::new`] for fallible construction).
    pub fn fixed(x: Polynomial, y: Polynomial, window: Interval) -> Self {
        Branch::new(BranchRole::FixedPoint, x, y, window).expect("fixed branch parity violated")
    }

    /// Image of the branch base point.
    pub fn base_point(&self) -> (f64, f64) {
        (self.x.eval(0.0), self.y.eval(0.0))
    }

    /// Coefficient scale used for relative zero tests.
    pub fn scale(&self) -> f64 {
        self.x.scale().max(self.y.scale()).max(1e-30)
    }
}

/// The mirror branch `(−x(t), y(t))` of a paired branch.
pub fn mirror(b: &Branch) -> Result<Branch, GermError> {
    if b.role != BranchRole::Paired {
        return Err(GermError::RoleError);
    }
    Ok(Branch {
        role: BranchRole::Paired,
        x: b.x.scaled(-1.0),
        y: b.y.clone(),
        window: b.window,
    })
}

/// A finite set of equivariant branches. Paired branches implicitly
/// generate their mirrors; the mirror is never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Multigerm {
    pub branches: Vec<Branch>,
}

impl Multigerm {
    /// Build a multigerm, enforcing at most one fixed-point branch per
    /// distinct axis base point.
    pub fn new(branches: Vec<Branch>) -> Result<Self, GermError> {
        let fixed_bases: Vec<f64> = branches
            .iter()
            .filter(|b| b.role == BranchRole::FixedPoint)
            .map(|b| b.base_point().1)
            .collect();
        for (i, a) in fixed_bases.iter().enumerate() {
            for b in &fixed_bases[i + 1..] {
                if (a - b).abs() <= 1e-9 {
                    return Err(GermError::DegenerateInput(
                        "two fixed-point branches share an axis base point".into(),
                    ));
                }
            }
        }
        Ok(Multigerm { branches })
    }

    /// Single-branch multigerm.
    pub fn single(b: Branch) -> Self {
        Multigerm { branches: vec![b] }
    }
}

/// Least `m ≥ 1` such that the `m`-th jet coefficient of `(x, y)` is
/// nonzero (relative tolerance), i.e. the vanishing order of `φ − φ(0)`.
pub fn multiplicity(b: &Branch) -> Result<usize, GermError> {
    let scale = b.scale();
    let cap = JET_CAP.min(b.x.coeffs().len().max(b.y.coeffs().len()).saturating_sub(1));
    for m in 1..=cap {
        let cx = b.x.coeffs().get(m).copied().unwrap_or(0.0);
        let cy = b.y.coeffs().get(m).copied().unwrap_or(0.0);
        if cx.abs() > COEFF_REL_TOL * scale || cy.abs() > COEFF_REL_TOL * scale {
            return Ok(m);
        }
    }
    Err(GermError::DegenerateInput(
        "branch is constant through the jet cap".into(),
    ))
}

/// Truncate a polynomial's jet to degree [`JET_CAP`].
fn jet(p: &Polynomial) -> Vec<f64> {
    let mut v = vec![0.0; JET_CAP + 1];
    for (k, &c) in p.coeffs().iter().enumerate().take(JET_CAP + 1) {
        v[k] = c;
    }
    v
}

fn jet_valuation(v: &[f64], scale: f64) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|&(_, c)| c.abs() > COEFF_REL_TOL * scale)
        .map(|(k, _)| k)
}

fn jet_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; JET_CAP + 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if i + j <= JET_CAP {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn jet_pow(a: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; JET_CAP + 1];
    out[0] = 1.0;
    for _ in 0..k {
        out = jet_mul(&out, a);
    }
    out
}

/// The `(p, q)`-cusp type of a singular branch, via the standard-form
/// reduction: while `p` divides the valuation `q` of the higher
/// coordinate, cancel its leading term against a power of the lower
/// coordinate. Returns `None` for degenerate cusps (the reduction kills
/// the higher coordinate, or ends with a non-coprime pair).
pub fn cusp_type(b: &Branch) -> Result<Option<(usize, usize)>, GermError> {
    let m = multiplicity(b)?;
    if m < 2 {
        return Err(GermError::DegenerateInput(
            "cusp type requires multiplicity ≥ 2".into(),
        ));
    }
    let scale = b.scale();
    let mut xj = jet(&b.x);
    let mut yj = jet(&b.y);
    // Valuations are of φ − φ(0): drop the base point.
    xj[0] = 0.0;
    yj[0] = 0.0;
    let vx = jet_valuation(&xj, scale);
    let vy = jet_valuation(&yj, scale);
    // `a` is the lower-valuation coordinate (defines p), `bb` the other.
    let (mut a, mut bb, p) = match (vx, vy) {
        (Some(px), Some(py)) if px <= py => (xj, yj, px),
        (Some(_), Some(py)) => (yj, xj, py),
        _ => {
            return Err(GermError::DegenerateInput(
                "a coordinate vanishes identically through the jet cap".into(),
            ))
        }
    };
    // Normalize the p-coordinate to monic for stable cancellation.
    let lead = a[p];
    for c in &mut a {
        *c /= lead;
    }
    for c in &mut bb {
        *c /= lead.abs();
    }
    let bscale = bb.iter().fold(0.0f64, |mx, c| mx.max(c.abs())).max(1.0);
    loop {
        let q = match jet_valuation(&bb, bscale) {
            Some(q) => q,
            // Higher coordinate reduced to zero through the cap: if the
            // original data had content beyond the cap we cannot decide.
            None => {
                let orig_deg = b.x.degree().max(b.y.degree()).unwrap_or(0);
                if orig_deg > JET_CAP {
                    return Err(GermError::JetExhausted(
                        "reduction exhausted the degree-capped jet".into(),
                    ));
                }
                return Ok(None);
            }
        };
        if q % p != 0 {
            return Ok(if gcd(p, q) == 1 { Some((p, q)) } else { None });
        }
        if q == 0 || q / p == 0 {
            return Err(GermError::DegenerateInput("higher coordinate is a unit".into()));
        }
        // Cancel the leading term of bb against a^(q/p).
        let k = q / p;
        let coeff = bb[q];
        let ak = jet_pow(&a, k);
        for (i, &c) in ak.iter().enumerate() {
            bb[i] -= coeff * c;
        }
        // Flush cancellation dust so valuation strictly increases.
        for c in &mut bb {
            if c.abs() <= COEFF_REL_TOL * bscale {
                *c = 0.0;
            }
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Invert a jet `u(t) = c₁t + c₂t² + …` with `c₁ ≠ 0`, returning the jet
/// of `t(u)` through [`JET_CAP`].
fn jet_invert(u: &[f64]) -> Vec<f64> {
    let c1 = u[1];
    // Fixed-point iteration t = (u − Σ_{k≥2} c_k t^k)/c1, once per degree.
    let mut t = vec![0.0; JET_CAP + 1];
    t[1] = 1.0 / c1;
    for _ in 0..JET_CAP {
        let mut tail = vec![0.0; JET_CAP + 1];
        let mut tk = jet_mul(&t, &t); // t²
        for k in 2..=JET_CAP {
            if u[k] != 0.0 {
                for (i, &c) in tk.iter().enumerate() {
                    tail[i] += u[k] * c;
                }
            }
            tk = jet_mul(&tk, &t);
        }
        let mut next = vec![0.0; JET_CAP + 1];
        next[1] = 1.0 / c1;
        for k in 2..=JET_CAP {
            next[k] = -tail[k] / c1;
        }
        t = next;
    }
    t
}

/// Compose jets: `f(g(t))` where `g` has no constant term.
fn jet_compose(f: &[f64], g: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; JET_CAP + 1];
    out[0] = f[0];
    let mut gk = vec![0.0; JET_CAP + 1];
    gk[0] = 1.0;
    for k in 1..=JET_CAP {
        gk = jet_mul(&gk, g);
        for (i, &c) in gk.iter().enumerate() {
            out[i] += f[k] * c;
        }
    }
    out
}

/// Express an immersed branch near parameter `t0` as a graph over its
/// tangent direction: returns the jet of `v(u)` where `u` is arclength
/// along the unit tangent `(cx, cy)` and `v` the normal offset.
fn graph_jet(b: &Branch, t0: f64, cx: f64, cy: f64) -> Result<Vec<f64>, GermError> {
    let x = b.x.shift(t0);
    let y = b.y.shift(t0);
    let x0 = x.eval(0.0);
    let y0 = y.eval(0.0);
    let mut u = vec![0.0; JET_CAP + 1];
    let mut v = vec![0.0; JET_CAP + 1];
    let xj = jet(&x);
    let yj = jet(&y);
    for k in 1..=JET_CAP {
        let dx = if k == 0 { xj[0] - x0 } else { xj[k] };
        let dy = if k == 0 { yj[0] - y0 } else { yj[k] };
        u[k] = cx * dx + cy * dy;
        v[k] = -cy * dx + cx * dy;
    }
    if u[1].abs() <= COEFF_REL_TOL * b.scale() {
        return Err(GermError::NotTangent);
    }
    let t_of_u = jet_invert(&u);
    Ok(jet_compose(&v, &t_of_u))
}

/// Tangency order `k ≥ 1` of two branches meeting at the given parameters
/// with parallel nonzero derivatives: after straightening the first
/// branch, the difference function has leading degree `k + 1`.
pub fn tangency_order(b1: &Branch, b2: &Branch, at: (f64, f64)) -> Result<usize, GermError> {
    let (t0, s0) = at;
    let d1 = (b1.x.derivative().eval(t0), b1.y.derivative().eval(t0));
    let d2 = (b2.x.derivative().eval(s0), b2.y.derivative().eval(s0));
    let n1 = (d1.0 * d1.0 + d1.1 * d1.1).sqrt();
    let n2 = (d2.0 * d2.0 + d2.1 * d2.1).sqrt();
    if n1 <= COEFF_REL_TOL * b1.scale() || n2 <= COEFF_REL_TOL * b2.scale() {
        return Err(GermError::NotTangent);
    }
    let cross = d1.0 * d2.1 - d1.1 * d2.0;
    if cross.abs() > 1e-5 * n1 * n2 {
        return Err(GermError::NotTangent);
    }
    let p1 = (b1.x.shift(t0).eval(0.0), b1.y.shift(t0).eval(0.0));
    let p2 = (b2.x.shift(s0).eval(0.0), b2.y.shift(s0).eval(0.0));
    let gap = ((p1.0 - p2.0).powi(2) + (p1.1 - p2.1).powi(2)).sqrt();
    if gap > 1e-6 * b1.scale().max(1.0) {
        return Err(GermError::NotTangent);
    }
    let (cx, cy) = (d1.0 / n1, d1.1 / n1);
    let g1 = graph_jet(b1, t0, cx, cy)?;
    let g2 = graph_jet(b2, s0, cx, cy)?;
    let mut h: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
    // The meeting point itself contributes only offsets below tolerance.
    h[0] = 0.0;
    h[1] = 0.0;
    let hscale = b1.scale().max(b2.scale());
    match jet_valuation(&h, hscale) {
        Some(d) if d >= 2 => Ok(d - 1),
        Some(_) => Err(GermError::NotTangent),
        None => Err(GermError::JetExhausted(
            "difference function vanishes through the jet cap".into(),
        )),
    }
}

/// Position of the branch relative to the axis, classified by base point
/// and generalized tangent line (first nonvanishing jet).
pub fn axis_relation(b: &Branch) -> AxisRelation {
    if b.role == BranchRole::FixedPoint {
        return AxisRelation::Fixed;
    }
    let scale = b.scale();
    if b.x.eval(0.0).abs() > COEFF_REL_TOL * scale.max(1.0) {
        return AxisRelation::OffAxis;
    }
    let m = match multiplicity(b) {
        Ok(m) => m,
        Err(_) => return AxisRelation::OffAxis,
    };
    let cx = b.x.coeffs().get(m).copied().unwrap_or(0.0);
    let cy = b.y.coeffs().get(m).copied().unwrap_or(0.0);
    if cx.abs() <= COEFF_REL_TOL * scale {
        AxisRelation::OnAxisLineTangent
    } else if cy.abs() <= COEFF_REL_TOL * scale {
        AxisRelation::OnAxisPerpendicular
    } else {
        AxisRelation::OnAxisOblique
    }
}

/// The base-point orbit of a branch: the base point and (for paired
/// branches) its mirror.
fn base_orbit(b: &Branch) -> Vec<(f64, f64)> {
    let p = b.base_point();
    if b.role == BranchRole::Paired && p.0.abs() > 1e-12 {
        vec![p, (-p.0, p.1)]
    } else {
        vec![p]
    }
}

/// Union of two multigerms with disjoint image base-point orbits.
pub fn coincidence(m1: &Multigerm, m2: &Multigerm, tol: f64) -> Result<Multigerm, GermError> {
    for b1 in &m1.branches {
        for b2 in &m2.branches {
            for p in base_orbit(b1) {
                for q in base_orbit(b2) {
                    if (p.0 - q.0).abs() <= 10.0 * tol && (p.1 - q.1).abs() <= 10.0 * tol {
                        return Err(GermError::OverlapError(format!(
                            "orbit points ({}, {}) and ({}, {}) collide",
                            p.0, p.1, q.0, q.1
                        )));
                    }
                }
            }
        }
    }
    let mut branches = m1.branches.clone();
    branches.extend(m2.branches.iter().cloned());
    Multigerm::new(branches)
}

/// Generalized tangent direction of a branch at its base point.
pub fn generalized_tangent(b: &Branch) -> Result<(f64, f64), GermError> {
    let m = multiplicity(b)?;
    Ok((
        b.x.coeffs().get(m).copied().unwrap_or(0.0),
        b.y.coeffs().get(m).copied().unwrap_or(0.0),
    ))
}

/// Adjoin an ordinary strikethrough line through the multigerm's singular
/// image point: a new paired linear branch in the given direction.
///
/// Ordinarity: the direction is transverse to every generalized tangent
/// of `m` and its mirrors, and if the point lies on the axis, neither
/// parallel nor perpendicular to it.
pub fn strikethrough(
    m: &Multigerm,
    point: (f64, f64),
    direction: (f64, f64),
) -> Result<Multigerm, GermError> {
    let norm = (direction.0 * direction.0 + direction.1 * direction.1).sqrt();
    if norm == 0.0 {
        return Err(GermError::DegenerateInput("zero direction".into()));
    }
    let on_axis = point.0.abs() <= 1e-9;
    if on_axis {
        if direction.0.abs() <= 1e-6 * norm || direction.1.abs() <= 1e-6 * norm {
            return Err(GermError::NotOrdinary(direction.0, direction.1));
        }
    }
    for b in &m.branches {
        let t = generalized_tangent(b)?;
        for tangent in [t, (-t.0, t.1)] {
            let tn = (tangent.0 * tangent.0 + tangent.1 * tangent.1).sqrt();
            let cross = direction.0 * tangent.1 - direction.1 * tangent.0;
            if cross.abs() <= 1e-6 * norm * tn {
                return Err(GermError::NotOrdinary(tangent.0, tangent.1));
            }
        }
    }
    let window = m
        .branches
        .first()
        .map(|b| b.window)
        .unwrap_or(Interval::symmetric(0.5));
    let line = Branch::paired(
        Polynomial::new(vec![point.0, direction.0]),
        Polynomial::new(vec![point.1, direction.1]),
        window,
    );
    let mut branches = m.branches.clone();
    branches.push(line);
    Multigerm::new(branches)
}

/// Parse the germ text format: per-branch blocks
/// `branch paired|fixed window <w>` followed by `x:`/`y:` lines of
/// ascending-degree coefficients; `#` starts a comment.
pub fn parse_multigerm(text: &str) -> Result<Multigerm, GermError> {
    struct Pending {
        role: BranchRole,
        window: f64,
        x: Option<Polynomial>,
        y: Option<Polynomial>,
        line: usize,
    }
    let mut branches = Vec::new();
    let mut pending: Option<Pending> = None;

    let finish = |p: Pending, branches: &mut Vec<Branch>| -> Result<(), GermError> {
        let x = p.x.ok_or(GermError::ParseError {
            line: p.line,
            message: "branch block is missing its x: line".into(),
        })?;
        let y = p.y.ok_or(GermError::ParseError {
            line: p.line,
            message: "branch block is missing its y: line".into(),
        })?;
        let b = Branch::new(p.role, x, y, Interval::symmetric(p.window)).map_err(|e| {
            GermError::ParseError {
                line: p.line,
                message: e.to_string(),
            }
        })?;
        branches.push(b);
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("branch") => {
                if let Some(p) = pending.take() {
                    finish(p, &mut branches)?;
                }
                let role = match words.next() {
                    Some("paired") => BranchRole::Paired,
                    Some("fixed") => BranchRole::FixedPoint,
                    other => {
                        return Err(GermError::ParseError {
                            line: lineno,
                            message: format!("expected paired|fixed, found {other:?}"),
                        })
                    }
                };
                match (words.next(), words.next()) {
                    (Some("window"), Some(w)) => {
                        let window: f64 = w.parse().map_err(|_| GermError::ParseError {
                            line: lineno,
                            message: format!("bad window value {w:?}"),
                        })?;
                        pending = Some(Pending {
                            role,
                            window,
                            x: None,
                            y: None,
                            line: lineno,
                        });
                    }
                    _ => {
                        return Err(GermError::ParseError {
                            line: lineno,
                            message: "expected `window <value>`".into(),
                        })
                    }
                }
            }
            Some(tag @ ("x:" | "y:")) => {
                let p = pending.as_mut().ok_or(GermError::ParseError {
                    line: lineno,
                    message: "coefficient line outside a branch block".into(),
                })?;
                let coeffs: Result<Vec<f64>, _> = words.map(|w| w.parse::<f64>()).collect();
                let coeffs = coeffs.map_err(|e| GermError::ParseError {
                    line: lineno,
                    message: format!("bad coefficient: {e}"),
                })?;
                let poly = Polynomial::new(coeffs);
                if tag == "x:" {
                    p.x = Some(poly);
                } else {
                    p.y = Some(poly);
                }
            }
            Some(other) => {
                return Err(GermError::ParseError {
                    line: lineno,
                    message: format!("unrecognized directive {other:?}"),
                })
            }
            None => {}
        }
    }
    if let Some(p) = pending.take() {
        finish(p, &mut branches)?;
    }
    Multigerm::new(branches)
}

/// Emit the canonical germ text for round-tripping.
pub fn emit_multigerm(m: &Multigerm) -> String {
    let mut out = String::new();
    for b in &m.branches {
        let role = match b.role {
            BranchRole::Paired => "paired",
            BranchRole::FixedPoint => "fixed",
        };
        out.push_str(&format!("branch {role} window {}\n", b.window.hi));
        let fmt = |p: &Polynomial| {
            if p.is_zero() {
                "0".to_string()
            } else {
                p.coeffs()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        out.push_str(&format!("x: {}\n", fmt(&b.x)));
        out.push_str(&format!("y: {}\n", fmt(&b.y)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[f64]) -> Polynomial {
        Polynomial::new(cs.to_vec())
    }

    fn w() -> Interval {
        Interval::symmetric(0.5)
    }

    #[test]
    fn mirror_negates_x() {
        let b = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w());
        let m = mirror(&b).unwrap();
        assert_eq!(m.x, poly(&[0.0, -1.0]));
        assert_eq!(m.y, b.y);
        assert_eq!(mirror(&m).unwrap(), b);
    }

    #[test]
    fn mirror_of_fixed_branch_is_role_error() {
        let b = Branch::fixed(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        assert_eq!(mirror(&b), Err(GermError::RoleError));
    }

    #[test]
    fn fixed_branch_parity_is_enforced() {
        let bad = Branch::new(
            BranchRole::FixedPoint,
            poly(&[0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
            w(),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn multiplicities() {
        assert_eq!(
            multiplicity(&Branch::paired(poly(&[1.0, 0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w()))
                .unwrap(),
            2
        );
        assert_eq!(
            multiplicity(&Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w())).unwrap(),
            1
        );
        assert_eq!(
            multiplicity(&Branch::fixed(
                poly(&[0.0, 0.0, 0.0, 1.0]),
                poly(&[0.0, 0.0, 0.0, 0.0, 1.0]),
                w()
            ))
            .unwrap(),
            3
        );
    }

    #[test]
    fn cusp_types() {
        let c23 = Branch::paired(poly(&[1.0, 0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w());
        assert_eq!(cusp_type(&c23).unwrap(), Some((2, 3)));
        // (t², t⁵ + t⁴): the t⁴ term cancels against (t²)².
        let c25 = Branch::paired(
            poly(&[1.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0]),
            w(),
        );
        assert_eq!(cusp_type(&c25).unwrap(), Some((2, 5)));
        // (t², t⁴) is degenerate: y is a function of x.
        let deg = Branch::paired(poly(&[1.0, 0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 0.0, 1.0]), w());
        assert_eq!(cusp_type(&deg).unwrap(), None);
        // Fixed (3,4)-cusp.
        let c34 = Branch::fixed(
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 0.0, 1.0]),
            w(),
        );
        assert_eq!(cusp_type(&c34).unwrap(), Some((3, 4)));
    }

    #[test]
    fn tangency_orders() {
        let line = Branch::paired(poly(&[0.0, 1.0]), Polynomial::zero(), w());
        let par = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        let cub = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w());
        assert_eq!(tangency_order(&line, &par, (0.0, 0.0)).unwrap(), 1);
        assert_eq!(tangency_order(&line, &cub, (0.0, 0.0)).unwrap(), 2);
        // Perpendicular tangency between (t, t³) and its mirror (−s, s³):
        // tangent directions are parallel at the origin.
        let b = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w());
        let bm = mirror(&b).unwrap();
        assert_eq!(tangency_order(&b, &bm, (0.0, 0.0)).unwrap(), 2);
        // Transverse branches refuse.
        let diag = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 1.0]), w());
        assert_eq!(tangency_order(&line, &diag, (0.0, 0.0)), Err(GermError::NotTangent));
    }

    #[test]
    fn axis_relations() {
        assert_eq!(
            axis_relation(&Branch::paired(poly(&[1.0, 0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w())),
            AxisRelation::OffAxis
        );
        assert_eq!(
            axis_relation(&Branch::paired(poly(&[0.0, 0.0, 0.0, 1.0]), poly(&[0.0, 1.0]), w())),
            AxisRelation::OnAxisLineTangent
        );
        assert_eq!(
            axis_relation(&Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]), w())),
            AxisRelation::OnAxisPerpendicular
        );
        assert_eq!(
            axis_relation(&Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 1.0, 1.0]), w())),
            AxisRelation::OnAxisOblique
        );
        assert_eq!(
            axis_relation(&Branch::fixed(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w())),
            AxisRelation::Fixed
        );
    }

    #[test]
    fn fixed_branch_axis_relation_is_never_oblique() {
        // Parity forces the generalized tangent horizontal or vertical.
        for (x, y) in [
            (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0])),
            (poly(&[0.0, 0.0, 0.0, 1.0]), poly(&[0.0, 0.0, 1.0])),
            (poly(&[0.0, 0.0, 0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 0.0, 1.0])),
        ] {
            let b = Branch::fixed(x, y, w());
            assert_eq!(axis_relation(&b), AxisRelation::Fixed);
        }
    }

    #[test]
    fn coincidence_rejects_orbit_collision() {
        let at = |x0: f64| {
            Multigerm::single(Branch::paired(
                poly(&[x0, 0.0, 1.0]),
                poly(&[0.0, 0.0, 0.0, 1.0]),
                w(),
            ))
        };
        // Disjoint base orbits unite.
        let far = Multigerm::single(Branch::paired(poly(&[0.0, 1.0]), poly(&[2.0, 0.0, 1.0]), w()));
        assert_eq!(coincidence(&at(1.0), &far, 1e-9).unwrap().branches.len(), 2);
        // Same base point collides; so does the mirror orbit.
        assert!(matches!(coincidence(&at(1.0), &at(1.0), 1e-9), Err(GermError::OverlapError(_))));
        assert!(matches!(coincidence(&at(1.0), &at(-1.0), 1e-9), Err(GermError::OverlapError(_))));
    }

    #[test]
    fn strikethrough_ordinarity() {
        let cusp = Multigerm::single(Branch::paired(
            poly(&[1.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
            w(),
        ));
        // Generic line through (1, 0) is fine.
        let st = strikethrough(&cusp, (1.0, 0.0), (1.0, 1.0)).unwrap();
        assert_eq!(st.branches.len(), 2);
        // Parallel to the cusp's generalized tangent (0, 1): rejected.
        assert!(matches!(
            strikethrough(&cusp, (1.0, 0.0), (0.0, 1.0)),
            Err(GermError::NotOrdinary(..))
        ));
        // On-axis point with axis-parallel line: rejected.
        let axis_cusp = Multigerm::single(Branch::paired(
            poly(&[0.0, 0.0, 1.0]),
            poly(&[0.0, 1.0, 1.0]),
            w(),
        ));
        assert!(matches!(
            strikethrough(&axis_cusp, (0.0, 0.0), (0.0, 1.0)),
            Err(GermError::NotOrdinary(..))
        ));
    }

    #[test]
    fn parse_and_emit_round_trip() {
        let text = "\
# an off-axis cusp and a fixed branch
branch paired window 0.5
x: 1 0 1
y: 0 0 0 1
branch fixed window 0.5
x: 0 1
y: 0 0 1
";
        let m = parse_multigerm(text).unwrap();
        assert_eq!(m.branches.len(), 2);
        let emitted = emit_multigerm(&m);
        let reparsed = parse_multigerm(&emitted).unwrap();
        assert_eq!(m, reparsed);
        assert_eq!(emit_multigerm(&reparsed), emitted);
    }

    #[test]
    fn parser_rejects_fixed_parity_violation() {
        let text = "branch fixed window 0.5\nx: 0 0 1\ny: 0 0 1\n";
        assert!(matches!(
            parse_multigerm(text),
            Err(GermError::ParseError { .. })
        ));
    }

    #[test]
    fn invariance_under_linear_reparametrization() {
        let b = Branch::paired(
            poly(&[1.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0]),
            w(),
        );
        for c in [0.5, -1.0, 2.0, -0.3] {
            let rb = Branch::paired(b.x.rescale(c), b.y.rescale(c), w());
            assert_eq!(multiplicity(&rb).unwrap(), multiplicity(&b).unwrap());
            assert_eq!(cusp_type(&rb).unwrap(), cusp_type(&b).unwrap());
            assert_eq!(axis_relation(&rb), axis_relation(&b));
        }
    }
}
