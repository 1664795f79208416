//! Real-algebraic kernel: univariate polynomials over `f64`, real-root
//! isolation by Sturm chains with bisection refinement, and two-branch
//! intersection/tangency solving by resultant elimination.
//!
//! Exactness is traded for explicit tolerances: the default residual
//! tolerance is `1e-9` and roots are refined by bisection to `1e-12`.
//! Near-double roots are *flagged* as clustered rather than split or
//! merged, because double roots are precisely the discriminant events the
//! bifurcation engine must detect.

use thiserror::Error;

/// Relative coefficient threshold below which a coefficient is treated as
/// zero during normalization and gcd computation.
const COEFF_EPS: f64 = 1e-11;

/// Width to which isolated roots are refined by bisection.
pub const REFINE_WIDTH: f64 = 1e-12;

/// Errors produced by the kernel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealAlgError {
    /// The input is identically zero (or two branches coincide on an open
    /// set), so the requested root/intersection set is not finite.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// A univariate real polynomial with ascending coefficients:
/// `coeffs[k]` multiplies `t^k`. The zero polynomial has an empty
/// coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Build a polynomial from ascending coefficients, trimming trailing
    /// (near-)zero terms relative to the largest coefficient magnitude.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.normalize();
        p
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// The constant polynomial `c`.
    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial `c · t^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Polynomial::new(coeffs)
    }

    /// Ascending coefficient slice.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// `true` if this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn normalize(&mut self) {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 || !scale.is_finite() {
            self.coeffs.clear();
            return;
        }
        while let Some(&c) = self.coeffs.last() {
            if c.abs() <= COEFF_EPS * scale {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        // Flush interior dust relative to the overall scale so that exact
        // cancellations do not linger as 1e-17-sized coefficients.
        for c in &mut self.coeffs {
            if c.abs() <= COEFF_EPS * scale {
                *c = 0.0;
            }
        }
    }

    /// Horner evaluation at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Sum of two polynomials.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Polynomial::new(out)
    }

    /// Difference `self − other`.
    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scaled(-1.0))
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Scalar multiple.
    pub fn scaled(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Taylor shift: the polynomial `q` with `q(t) = p(t + a)`.
    pub fn shift(&self, a: f64) -> Polynomial {
        let mut r = Polynomial::zero();
        let x_plus_a = Polynomial::new(vec![a, 1.0]);
        for &c in self.coeffs.iter().rev() {
            r = r.mul(&x_plus_a).add(&Polynomial::constant(c));
        }
        r
    }

    /// Parameter rescaling: the polynomial `q` with `q(t) = p(c·t)`.
    pub fn rescale(&self, c: f64) -> Polynomial {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut pw = 1.0;
        for &a in &self.coeffs {
            out.push(a * pw);
            pw *= c;
        }
        Polynomial::new(out)
    }

    /// Euclidean division: `(quotient, remainder)` with
    /// `self = q·div + r` and `deg r < deg div`.
    pub fn div_rem(&self, div: &Polynomial) -> (Polynomial, Polynomial) {
        let d = div.degree().expect("division by zero polynomial");
        let lead = div.coeffs[d];
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![0.0; rem.len() - d];
        for k in (d..rem.len()).rev() {
            let q = rem[k] / lead;
            quot[k - d] = q;
            for j in 0..=d {
                rem[k - d + j] -= q * div.coeffs[j];
            }
            rem[k] = 0.0;
        }
        (Polynomial::new(quot), Polynomial::new(rem))
    }
}

/// A closed analysis window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Build an interval; panics if `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval { lo, hi }
    }

    /// The symmetric window `[−r, r]`.
    pub fn symmetric(r: f64) -> Self {
        Interval::new(-r, r)
    }

    /// `true` if `t` lies inside, up to `slack`.
    pub fn contains(&self, t: f64, slack: f64) -> bool {
        t >= self.lo - slack && t <= self.hi + slack
    }
}

/// Whether an isolated root looked simple or near-multiple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplicityHint {
    Simple,
    Clustered,
}

/// One isolated real root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub hint: MultiplicityHint,
}

/// Strictly increasing list of isolated roots.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    /// Root values only.
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }
}

/// Number of sign changes in the Sturm chain evaluated at `t`.
fn sturm_variations(chain: &[Polynomial], t: f64) -> usize {
    let mut count = 0;
    let mut last: Option<f64> = None;
    for p in chain {
        let v = p.eval(t);
        if v == 0.0 {
            continue;
        }
        if let Some(prev) = last {
            if prev * v < 0.0 {
                count += 1;
            }
        }
        last = Some(v);
    }
    count
}

/// Build the Sturm chain of `p` (which should be squarefree for exact
/// counting; near-multiple roots degrade gracefully to clustered flags).
fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() || chain[n - 1].degree() == Some(0) {
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        // Rescale to unit size to keep the f64 remainder sequence tame.
        let s = r.scale();
        chain.push(r.scaled(-1.0 / s));
    }
    chain
}

/// Approximate greatest common divisor of `p` and `q` by the Euclidean
/// remainder sequence with a relative zero cutoff. Returns a monic-ish
/// representative; constant if the inputs look coprime.
fn poly_gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let mut a = p.clone();
    let mut b = q.clone();
    if a.scale() > 0.0 {
        a = a.scaled(1.0 / a.scale());
    }
    if b.scale() > 0.0 {
        b = b.scaled(1.0 / b.scale());
    }
    while !b.is_zero() && b.degree() > Some(0) {
        let (_, mut r) = a.div_rem(&b);
        // Chop relative dust so the sequence terminates.
        if r.scale() <= 1e-9 {
            r = Polynomial::zero();
        } else {
            r = r.scaled(1.0 / r.scale());
        }
        a = std::mem::replace(&mut b, r);
    }
    if b.is_zero() {
        a
    } else {
        Polynomial::constant(1.0)
    }
}

/// Numerically squarefree part of `p`: `p / gcd(p, p')`, falling back to
/// `p` itself if the division leaves a large residual.
fn squarefree_part(p: &Polynomial) -> Polynomial {
    let g = poly_gcd(p, &p.derivative());
    if g.degree() <= Some(0) {
        return p.clone();
    }
    let (q, r) = p.div_rem(&g);
    if r.scale() <= 1e-6 * p.scale().max(1.0) && !q.is_zero() {
        q
    } else {
        p.clone()
    }
}

/// Refine a sign change of `q` in `[lo, hi]` by bisection down to
/// [`REFINE_WIDTH`].
fn bisect_root(q: &Polynomial, mut lo: f64, mut hi: f64) -> f64 {
    // Sturm counting uses half-open intervals (lo, hi]; a root exactly at
    // `lo` belongs to the neighbouring interval, so step off it.
    let mut flo = q.eval(lo);
    let mut nudge = (hi - lo) * 1e-12;
    while flo == 0.0 && lo + nudge < hi {
        lo += nudge;
        nudge *= 2.0;
        flo = q.eval(lo);
    }
    if flo == 0.0 {
        return 0.5 * (lo + hi);
    }
    let fhi = q.eval(hi);
    if fhi == 0.0 {
        return hi;
    }
    if flo * fhi > 0.0 {
        // No sign change (should not happen for simple roots); report the
        // midpoint of the isolating interval.
        return 0.5 * (lo + hi);
    }
    while hi - lo > REFINE_WIDTH {
        let mid = 0.5 * (lo + hi);
        let fm = q.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Isolate all real roots of `p` inside `window`.
///
/// Sturm counting is performed on the numerically squarefree part, so
/// even-multiplicity roots are found; roots at which `p'` nearly vanishes
/// are flagged [`MultiplicityHint::Clustered`].
pub fn isolate_roots(
    p: &Polynomial,
    window: Interval,
    tol: f64,
) -> Result<RootSet, RealAlgError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if p.is_zero() {
        return Err(RealAlgError::DegenerateInput(
            "zero polynomial has no isolated roots".into(),
        ));
    }
    if p.degree() == Some(0) {
        return Ok(RootSet::default());
    }
    let q = squarefree_part(p);
    let chain = sturm_chain(&q);
    // Push window ends off any root so endpoint counting is unambiguous;
    // roots within tol of the boundary are still captured and clamped.
    let pad = tol.max(1e-12);
    let lo = window.lo - pad;
    let hi = window.hi + pad;

    let mut found: Vec<(f64, bool)> = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let count = sturm_variations(&chain, a).saturating_sub(sturm_variations(&chain, b));
        if count == 0 {
            continue;
        }
        if count == 1 {
            let fa = q.eval(a);
            let fb = q.eval(b);
            if fa * fb <= 0.0 {
                found.push((bisect_root(&q, a, b), false));
                continue;
            }
            // Fall through: split until a sign change shows up.
        }
        if b - a <= REFINE_WIDTH.max(tol * 1e-3) {
            // Unresolvable knot of roots: report the midpoint, clustered.
            found.push((0.5 * (a + b), true));
            continue;
        }
        let mid = 0.5 * (a + b);
        stack.push((a, mid));
        stack.push((mid, b));
    }

    let dscale = p.derivative().scale().max(1.0);
    let mut roots: Vec<Root> = found
        .into_iter()
        .filter(|&(v, _)| window.contains(v, pad))
        .map(|(v, forced)| {
            let v = v.clamp(window.lo, window.hi);
            let clustered = forced || p.derivative().eval(v).abs() <= tol.sqrt() * dscale;
            Root {
                value: v,
                hint: if clustered {
                    MultiplicityHint::Clustered
                } else {
                    MultiplicityHint::Simple
                },
            }
        })
        .collect();
    roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    roots.dedup_by(|a, b| {
        if (a.value - b.value).abs() <= 10.0 * tol {
            if a.hint == MultiplicityHint::Clustered {
                b.hint = MultiplicityHint::Clustered;
            }
            true
        } else {
            false
        }
    });
    Ok(RootSet { roots })
}

/// A bivariate polynomial `f(t, s)` stored as ascending powers of `t` with
/// coefficients that are polynomials in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivariate {
    /// `tcoeffs[k]` is the coefficient of `t^k`, a polynomial in `s`.
    pub tcoeffs: Vec<Polynomial>,
}

impl Bivariate {
    /// Build and normalize (trim trailing zero `t`-coefficients).
    pub fn new(mut tcoeffs: Vec<Polynomial>) -> Self {
        while matches!(tcoeffs.last(), Some(c) if c.is_zero()) {
            tcoeffs.pop();
        }
        Bivariate { tcoeffs }
    }

    /// Degree in `t`, or `None` if identically zero.
    pub fn t_degree(&self) -> Option<usize> {
        if self.tcoeffs.is_empty() {
            None
        } else {
            Some(self.tcoeffs.len() - 1)
        }
    }

    /// Largest degree in `s` among the `t`-coefficients.
    pub fn s_degree(&self) -> usize {
        self.tcoeffs
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .unwrap_or(0)
    }

    /// Specialize `s`, producing a univariate polynomial in `t`.
    pub fn at_s(&self, s: f64) -> Polynomial {
        Polynomial::new(self.tcoeffs.iter().map(|c| c.eval(s)).collect())
    }
}

/// Dense determinant with partial pivoting; returns 0 for singular input.
fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut sign = 1.0;
    let mut prod = 1.0;
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pivot_val == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            sign = -sign;
        }
        let piv = m[col][col];
        prod *= piv;
        for r in col + 1..n {
            let f = m[r][col] / piv;
            if f != 0.0 {
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    sign * prod
}

/// Evaluate the Sylvester resultant of `f` and `g` (eliminating `t`) at a
/// concrete value of `s`.
fn sylvester_det_at(f: &Bivariate, g: &Bivariate, s: f64) -> f64 {
    let pf = f.at_s(s);
    let pg = g.at_s(s);
    let n = pf.degree().unwrap_or(0);
    let m = pg.degree().unwrap_or(0);
    if n == 0 && m == 0 {
        return 1.0;
    }
    let dim = n + m;
    let mut mat = vec![vec![0.0; dim]; dim];
    // m rows of f-coefficients (descending), then n rows of g-coefficients.
    for row in 0..m {
        for (k, &c) in pf.coeffs().iter().enumerate() {
            mat[row][row + (n - k)] = c;
        }
    }
    for row in 0..n {
        for (k, &c) in pg.coeffs().iter().enumerate() {
            mat[m + row][row + (m - k)] = c;
        }
    }
    det(mat)
}

/// Resultant of `f` and `g` with respect to `t`, as a polynomial in `s`.
///
/// Computed by evaluation at Chebyshev nodes and Newton interpolation —
/// exact in shape for the catalog's small degrees, and free of the
/// numerical hazards of fraction-free elimination over `f64`.
pub fn resultant_t(f: &Bivariate, g: &Bivariate, s_window: Interval) -> Polynomial {
    let n = f.t_degree().unwrap_or(0);
    let m = g.t_degree().unwrap_or(0);
    let deg_bound = m * f.s_degree() + n * g.s_degree();
    let num_nodes = deg_bound + 1;
    // Sample on an interval at least as wide as the window of interest so
    // interpolation is well-conditioned where the roots live.
    let half = (s_window.hi - s_window.lo).abs().max(1.0) * 0.75;
    let mid = 0.5 * (s_window.lo + s_window.hi);
    let nodes: Vec<f64> = (0..num_nodes)
        .map(|k| {
            let theta = std::f64::consts::PI * (2.0 * k as f64 + 1.0) / (2.0 * num_nodes as f64);
            mid + half * theta.cos()
        })
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&s| sylvester_det_at(f, g, s)).collect();

    // Newton divided differences, then expansion to monomial form.
    let mut dd = values.clone();
    for level in 1..num_nodes {
        for k in (level..num_nodes).rev() {
            dd[k] = (dd[k] - dd[k - 1]) / (nodes[k] - nodes[k - level]);
        }
    }
    let mut poly = Polynomial::zero();
    let mut basis = Polynomial::constant(1.0);
    for (k, &c) in dd.iter().enumerate() {
        poly = poly.add(&basis.scaled(c));
        if k + 1 < num_nodes {
            basis = basis.mul(&Polynomial::new(vec![-nodes[k], 1.0]));
        }
    }
    poly
}

/// A parametrized branch `t ↦ (x(t), y(t))`.
pub type BranchCurve = (Polynomial, Polynomial);

/// One solution of the two-branch intersection system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionPoint {
    pub t: f64,
    pub s: f64,
    /// `true` when the derivative vectors at the meeting point are
    /// (numerically) linearly dependent.
    pub tangential: bool,
}

/// Angular tolerance (radians, roughly) below which derivative vectors are
/// considered parallel.
const TANGENT_TOL: f64 = 1e-6;

fn tangential_at(b1: &BranchCurve, b2: &BranchCurve, t: f64, s: f64) -> bool {
    let d1 = (b1.0.derivative().eval(t), b1.1.derivative().eval(t));
    let d2 = (b2.0.derivative().eval(s), b2.1.derivative().eval(s));
    let n1 = (d1.0 * d1.0 + d1.1 * d1.1).sqrt();
    let n2 = (d2.0 * d2.0 + d2.1 * d2.1).sqrt();
    let cross = d1.0 * d2.1 - d1.1 * d2.0;
    cross.abs() <= TANGENT_TOL * n1.max(1e-30) * n2.max(1e-30)
}

/// Solve `x1(t) = x2(s), y1(t) = y2(s)` over the window box.
///
/// Elimination is by the `t`-resultant followed by [`isolate_roots`] in
/// `s` and back-substitution; degenerate shapes (a coordinate equation
/// independent of `t`) are dispatched directly.
pub fn branch_intersections(
    b1: &BranchCurve,
    b2: &BranchCurve,
    windows: (Interval, Interval),
    tol: f64,
) -> Result<Vec<IntersectionPoint>, RealAlgError> {
    let f = difference_bivariate(&b1.0, &b2.0);
    let g = difference_bivariate(&b1.1, &b2.1);
    solve_bivariate_system(&f, &g, windows, tol).map(|sols| {
        sols.into_iter()
            .map(|(t, s)| IntersectionPoint {
                t,
                s,
                tangential: tangential_at(b1, b2, t, s),
            })
            .collect()
    })
}

/// The bivariate `p(t) − q(s)`.
fn difference_bivariate(p: &Polynomial, q: &Polynomial) -> Bivariate {
    let mut tcoeffs = vec![Polynomial::zero(); p.coeffs().len().max(1)];
    tcoeffs[0] = Polynomial::constant(p.coeffs().first().copied().unwrap_or(0.0)).sub(q);
    for (k, &c) in p.coeffs().iter().enumerate().skip(1) {
        tcoeffs[k] = Polynomial::constant(c);
    }
    Bivariate::new(tcoeffs)
}

/// All isolated solutions of `f(t,s) = g(t,s) = 0` in the window box.
pub fn solve_bivariate_system(
    f: &Bivariate,
    g: &Bivariate,
    windows: (Interval, Interval),
    tol: f64,
) -> Result<Vec<(f64, f64)>, RealAlgError> {
    let (tw, sw) = windows;
    let scale = |b: &Bivariate| {
        b.tcoeffs
            .iter()
            .fold(0.0f64, |m, c| m.max(c.scale()))
            .max(1e-30)
    };

    let f_tfree = matches!(f.t_degree(), None | Some(0));
    let g_tfree = matches!(g.t_degree(), None | Some(0));
    if f_tfree && g_tfree {
        // Neither equation constrains t. The system is inconsistent (no
        // solutions) unless the s-equations share a root, in which case a
        // whole t-line solves it.
        return solve_both_t_free(f, g, sw, tol);
    }
    if f_tfree {
        return solve_with_t_free(f, g, tw, sw, tol);
    }
    if g_tfree {
        return solve_with_t_free(g, f, tw, sw, tol);
    }
    let res = resultant_t(f, g, sw);
    if res.is_zero() || res.scale() <= 1e-10 * scale(f) * scale(g) {
        return Err(RealAlgError::DegenerateInput(
            "vanishing resultant: the branches share a component".into(),
        ));
    }
    let mut sols = Vec::new();
    if res.degree() >= Some(1) {
        for s_root in isolate_roots(&res, sw, tol)?.values() {
            collect_t_for_s(f, g, s_root, tw, tol, &mut sols);
        }
    }
    dedupe_pairs(&mut sols, 10.0 * tol);
    Ok(sols)
}

/// Case where neither equation involves `t`: both reduce to equations in
/// `s` alone. No solutions unless the `s`-equations have a common root in
/// the window — then the whole `t`-line over it solves the system, which
/// is degenerate.
fn solve_both_t_free(
    f: &Bivariate,
    g: &Bivariate,
    sw: Interval,
    tol: f64,
) -> Result<Vec<(f64, f64)>, RealAlgError> {
    let fs = f.tcoeffs.first().cloned().unwrap_or_else(Polynomial::zero);
    let gs = g.tcoeffs.first().cloned().unwrap_or_else(Polynomial::zero);
    // A nonzero constant equation is never satisfied.
    if (fs.degree() == Some(0) && !fs.is_zero()) || (gs.degree() == Some(0) && !gs.is_zero()) {
        return Ok(Vec::new());
    }
    if fs.is_zero() && gs.is_zero() {
        return Err(RealAlgError::DegenerateInput(
            "both equations vanish identically".into(),
        ));
    }
    let (primary, check) = if !fs.is_zero() { (&fs, &gs) } else { (&gs, &fs) };
    let residual_tol = tol.sqrt() * check.scale().max(1.0);
    for s in isolate_roots(primary, sw, tol)?.values() {
        if check.is_zero() || check.eval(s).abs() <= residual_tol {
            return Err(RealAlgError::DegenerateInput(
                "a whole t-line solves the system".into(),
            ));
        }
    }
    Ok(Vec::new())
}

/// Zero set of a bivariate meets the window box? Sampled check used when
/// the companion equation vanishes identically.
fn zero_curve_meets_box(
    b: &Bivariate,
    tw: Interval,
    sw: Interval,
    tol: f64,
) -> Result<bool, RealAlgError> {
    const SAMPLES: usize = 65;
    for k in 0..SAMPLES {
        let t = tw.lo + (tw.hi - tw.lo) * (k as f64) / ((SAMPLES - 1) as f64);
        // Evaluate the t-coefficients at this t: a polynomial in s.
        let mut p = Polynomial::zero();
        let mut tk = 1.0;
        for c in &b.tcoeffs {
            p = p.add(&c.scaled(tk));
            tk *= t;
        }
        if p.is_zero() {
            return Ok(true);
        }
        if p.degree() == Some(0) {
            continue;
        }
        if !isolate_roots(&p, sw, tol)?.values().is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Case where `free` does not involve `t`: its `t^0` coefficient gives an
/// equation in `s` alone.
fn solve_with_t_free(
    free: &Bivariate,
    other: &Bivariate,
    tw: Interval,
    sw: Interval,
    tol: f64,
) -> Result<Vec<(f64, f64)>, RealAlgError> {
    let eq_s = free
        .tcoeffs
        .first()
        .cloned()
        .unwrap_or_else(Polynomial::zero);
    if eq_s.is_zero() {
        // One equation is vacuous: the solution set is the other's zero
        // curve. Degenerate only if that curve actually enters the box.
        return if zero_curve_meets_box(other, tw, sw, tol)? {
            Err(RealAlgError::DegenerateInput(
                "an equation vanishes identically: solution set is a curve".into(),
            ))
        } else {
            Ok(Vec::new())
        };
    }
    let mut sols = Vec::new();
    if eq_s.degree() == Some(0) {
        // Nonzero constant: no solutions.
        return Ok(sols);
    }
    for s_root in isolate_roots(&eq_s, sw, tol)?.values() {
        let pt = other.at_s(s_root);
        if pt.is_zero() {
            return Err(RealAlgError::DegenerateInput(
                "second equation vanishes along a root line".into(),
            ));
        }
        if pt.degree() == Some(0) {
            continue;
        }
        for t_root in isolate_roots(&pt, tw, tol)?.values() {
            sols.push((t_root, s_root));
        }
    }
    dedupe_pairs(&mut sols, 10.0 * tol);
    Ok(sols)
}

/// Back-substitute one `s` root: find `t` with both residuals small.
fn collect_t_for_s(
    f: &Bivariate,
    g: &Bivariate,
    s: f64,
    tw: Interval,
    tol: f64,
    out: &mut Vec<(f64, f64)>,
) {
    let pf = f.at_s(s);
    let pg = g.at_s(s);
    let (primary, check) = if pf.degree() >= Some(1) {
        (pf.clone(), pg.clone())
    } else {
        (pg.clone(), pf.clone())
    };
    if primary.degree() < Some(1) {
        return;
    }
    let residual_tol = tol.sqrt() * check.scale().max(1.0);
    if let Ok(roots) = isolate_roots(&primary, tw, tol) {
        for t in roots.values() {
            if check.eval(t).abs() <= residual_tol {
                out.push((t, s));
            }
        }
    }
}

fn dedupe_pairs(sols: &mut Vec<(f64, f64)>, eps: f64) {
    sols.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    sols.dedup_by(|a, b| (a.0 - b.0).abs() <= eps && (a.1 - b.1).abs() <= eps);
}

/// Self-intersections of one branch: pairs `t ≠ s` with `φ(t) = φ(s)`,
/// found after dividing the diagonal out of the difference system.
///
/// Returns each unordered pair once, with `t < s`.
pub fn self_intersections(
    b: &BranchCurve,
    window: Interval,
    tol: f64,
) -> Result<Vec<IntersectionPoint>, RealAlgError> {
    let f = divided_difference(&b.0);
    let g = divided_difference(&b.1);
    let sols = solve_bivariate_system(&f, &g, (window, window), tol)?;
    let mut out: Vec<IntersectionPoint> = sols
        .into_iter()
        .filter(|&(t, s)| t < s - 10.0 * tol)
        .map(|(t, s)| IntersectionPoint {
            t,
            s,
            tangential: tangential_at(b, b, t, s),
        })
        .collect();
    out.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    Ok(out)
}

/// The bivariate `(p(t) − p(s)) / (t − s)`, i.e. `Σ_k c_k Σ_{i+j=k−1} t^i s^j`.
fn divided_difference(p: &Polynomial) -> Bivariate {
    let n = p.coeffs().len();
    if n <= 1 {
        return Bivariate::new(Vec::new());
    }
    let mut tcoeffs = vec![vec![0.0; n - 1]; n - 1];
    for (k, &c) in p.coeffs().iter().enumerate().skip(1) {
        for i in 0..k {
            let j = k - 1 - i;
            tcoeffs[i][j] += c;
        }
    }
    Bivariate::new(tcoeffs.into_iter().map(Polynomial::new).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[f64]) -> Polynomial {
        Polynomial::new(cs.to_vec())
    }

    #[test]
    fn eval_matches_closed_forms() {
        assert_eq!(poly(&[0.0, 0.0, 1.0]).eval(3.0), 9.0);
        assert_eq!(Polynomial::zero().eval(7.0), 0.0);
        // t³ − 0.01t at t = 0.1 is exactly 0.001 − 0.001 = 0.
        let p = poly(&[0.0, -0.01, 0.0, 1.0]);
        assert!(p.eval(0.1).abs() < 1e-15);
    }

    #[test]
    fn derivative_is_term_by_term() {
        assert_eq!(poly(&[0.0, 0.0, 1.0]).derivative(), poly(&[0.0, 2.0]));
        assert_eq!(Polynomial::zero().derivative(), Polynomial::zero());
        let p = poly(&[0.0, 0.5, 0.0, 0.5, 0.0, 1.0]);
        assert_eq!(p.derivative(), poly(&[0.5, 0.0, 1.5, 0.0, 5.0]));
    }

    #[test]
    fn shift_and_rescale() {
        // p(t) = t², shifted by 1: (t+1)² = t² + 2t + 1.
        let p = poly(&[0.0, 0.0, 1.0]);
        assert_eq!(p.shift(1.0), poly(&[1.0, 2.0, 1.0]));
        assert_eq!(p.rescale(2.0), poly(&[0.0, 0.0, 4.0]));
    }

    #[test]
    fn isolates_simple_roots() {
        let p = poly(&[-1.0, 0.0, 1.0]); // t² − 1
        let roots = isolate_roots(&p, Interval::new(-2.0, 2.0), 1e-9).unwrap();
        let vals = roots.values();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] + 1.0).abs() < 1e-9);
        assert!((vals[1] - 1.0).abs() < 1e-9);
        assert!(roots.roots.iter().all(|r| r.hint == MultiplicityHint::Simple));
    }

    #[test]
    fn isolates_three_close_roots() {
        // t³ − 0.01t has roots −0.1, 0, 0.1.
        let p = poly(&[0.0, -0.01, 0.0, 1.0]);
        let vals = isolate_roots(&p, Interval::new(-1.0, 1.0), 1e-9)
            .unwrap()
            .values();
        assert_eq!(vals.len(), 3);
        for (v, expect) in vals.iter().zip([-0.1, 0.0, 0.1]) {
            assert!((v - expect).abs() < 1e-9, "{v} vs {expect}");
        }
    }

    #[test]
    fn quartic_on_double_root_boundary() {
        // t⁴ + λ₁t² + λ₂ with λ₁² = 4λ₂ has double roots at ±√(−λ₁/2).
        let l1 = -0.2;
        let l2 = l1 * l1 / 4.0;
        let p = poly(&[l2, 0.0, l1, 0.0, 1.0]);
        let roots = isolate_roots(&p, Interval::new(-1.0, 1.0), 1e-9).unwrap();
        assert_eq!(roots.roots.len(), 2);
        for r in &roots.roots {
            assert_eq!(r.hint, MultiplicityHint::Clustered);
            assert!((r.value.abs() - (0.1f64).sqrt()).abs() < 1e-6);
        }
    }

    #[test]
    fn quartic_off_boundary_has_four_simple_roots() {
        let p = poly(&[0.0096, 0.0, -0.2, 0.0, 1.0]);
        let roots = isolate_roots(&p, Interval::new(-1.0, 1.0), 1e-9).unwrap();
        assert_eq!(roots.roots.len(), 4);
        // Roots are symmetric about zero.
        let vals = roots.values();
        assert!((vals[0] + vals[3]).abs() < 1e-9);
        assert!((vals[1] + vals[2]).abs() < 1e-9);
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        let err = isolate_roots(&Polynomial::zero(), Interval::new(-1.0, 1.0), 1e-9);
        assert!(matches!(err, Err(RealAlgError::DegenerateInput(_))));
    }

    #[test]
    fn line_meets_shifted_parabola_twice() {
        // (t, 0) vs (s, s² + λ), λ = −0.04: meets at t = s = ±0.2.
        let b1 = (poly(&[0.0, 1.0]), Polynomial::zero());
        let b2 = (poly(&[0.0, 1.0]), poly(&[-0.04, 0.0, 1.0]));
        let w = Interval::new(-1.0, 1.0);
        let sols = branch_intersections(&b1, &b2, (w, w), 1e-9).unwrap();
        assert_eq!(sols.len(), 2);
        for p in &sols {
            assert!((p.t - p.s).abs() < 1e-7);
            assert!((p.t.abs() - 0.2).abs() < 1e-7);
            assert!(!p.tangential);
        }
    }

    #[test]
    fn line_tangent_to_parabola() {
        let b1 = (poly(&[0.0, 1.0]), Polynomial::zero());
        let b2 = (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]));
        let w = Interval::new(-1.0, 1.0);
        let sols = branch_intersections(&b1, &b2, (w, w), 1e-9).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].t.abs() < 1e-6);
        assert!(sols[0].tangential);
    }

    #[test]
    fn transverse_lines_meet_once() {
        let b1 = (poly(&[0.0, 1.0]), poly(&[0.0, 1.0]));
        let b2 = (poly(&[0.0, 1.0]), poly(&[0.0, -1.0]));
        let w = Interval::new(-1.0, 1.0);
        let sols = branch_intersections(&b1, &b2, (w, w), 1e-9).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].t.abs() < 1e-9 && sols[0].s.abs() < 1e-9);
        assert!(!sols[0].tangential);
    }

    #[test]
    fn swapping_branches_transposes_solutions() {
        let b1 = (poly(&[0.0, 1.0]), poly(&[0.1, 0.5]));
        let b2 = (poly(&[0.0, 1.0]), poly(&[-0.04, 0.0, 1.0]));
        let w = Interval::new(-1.0, 1.0);
        let ab = branch_intersections(&b1, &b2, (w, w), 1e-9).unwrap();
        let ba = branch_intersections(&b2, &b1, (w, w), 1e-9).unwrap();
        assert_eq!(ab.len(), ba.len());
        for p in &ab {
            assert!(ba
                .iter()
                .any(|q| (q.t - p.s).abs() < 1e-7 && (q.s - p.t).abs() < 1e-7));
        }
    }

    #[test]
    fn coincident_branches_are_degenerate() {
        let b = (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]));
        let w = Interval::new(-1.0, 1.0);
        let err = branch_intersections(&b, &b.clone(), (w, w), 1e-9);
        assert!(matches!(err, Err(RealAlgError::DegenerateInput(_))));
    }

    #[test]
    fn vertical_line_branch_intersections() {
        // x = 0 line parametrized as (0, t) against the parabola (s, s²+0.5):
        // meets where s = 0, t = 0.5.
        let b1 = (Polynomial::zero(), poly(&[0.0, 1.0]));
        let b2 = (poly(&[0.0, 1.0]), poly(&[0.5, 0.0, 1.0]));
        let w = Interval::new(-1.0, 1.0);
        let sols = branch_intersections(&b1, &b2, (w, w), 1e-9).unwrap();
        assert_eq!(sols.len(), 1);
        assert!((sols[0].t - 0.5).abs() < 1e-7);
        assert!(sols[0].s.abs() < 1e-7);
    }

    #[test]
    fn self_intersection_of_nodal_cubic() {
        // (t³ − 0.01t, t²): node where t = ±0.1 meet, at (0, 0.01).
        let b = (poly(&[0.0, -0.01, 0.0, 1.0]), poly(&[0.0, 0.0, 1.0]));
        let sols = self_intersections(&b, Interval::new(-0.5, 0.5), 1e-9).unwrap();
        assert_eq!(sols.len(), 1);
        assert!((sols[0].t + 0.1).abs() < 1e-7);
        assert!((sols[0].s - 0.1).abs() < 1e-7);
        assert!(!sols[0].tangential);
    }

    #[test]
    fn immersed_curve_has_no_self_intersections() {
        let b = (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]));
        let sols = self_intersections(&b, Interval::new(-0.5, 0.5), 1e-9).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn resultant_of_classic_pair() {
        // Res_t(t² − s, t − s) = s² − s (up to sign): common root iff s² = s.
        let f = Bivariate::new(vec![
            Polynomial::new(vec![0.0, -1.0]),
            Polynomial::zero(),
            Polynomial::constant(1.0),
        ]);
        let g = Bivariate::new(vec![Polynomial::new(vec![0.0, -1.0]), Polynomial::constant(1.0)]);
        let r = resultant_t(&f, &g, Interval::new(-2.0, 2.0));
        let vals = isolate_roots(&r, Interval::new(-3.0, 3.0), 1e-9)
            .unwrap()
            .values();
        assert_eq!(vals.len(), 2);
        assert!(vals[0].abs() < 1e-8);
        assert!((vals[1] - 1.0).abs() < 1e-8);
    }
}
