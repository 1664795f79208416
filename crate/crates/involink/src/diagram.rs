//! Combinatorial transvergent link diagrams with a mirror involution.
//!
//! A [`SymmetricDiagram`] is a closed 4-valent/2-valent plane graph together
//! with a mirror involution (reflection across a vertical axis) and a total
//! order on the vertices that lie on the axis.  Crossings record over/under
//! data; the axis order carries a distinguished marker for the point at
//! infinity so that the axis is treated as a circle on the sphere.
//!
//! The module also implements the full catalog of symmetric moves — the
//! eight symmetric Reidemeister families, the two nonlocal moves through
//! infinity, and the six Morse families — as local pattern rewrites
//! ([`SymmetricDiagram::find_matches`] / [`SymmetricDiagram::apply_move`]),
//! plus combinatorial isomorphism, a strict text format, and SVG rendering.
//!
//! # Encoding conventions
//!
//! * Crossings have four ports in counterclockwise rotation order
//!   `0, 1, 2, 3`; the two strands through a crossing occupy opposite port
//!   pairs `{0,2}` and `{1,3}`.  For a crossing on the axis the geometric
//!   reading is `0 = NE`, `1 = NW`, `2 = SW`, `3 = SE`.
//! * Degree-2 vertices ([`VertexKind::FixedPoint`],
//!   [`VertexKind::AxisPassthrough`]) have ports `0 = left`, `1 = right`.
//! * The mirror fixes on-axis vertices and swaps off-axis mirror pairs.
//!   On ports it acts by `0↔1, 2↔3` on an on-axis crossing of pairing
//!   type A, by `0↔3, 1↔2` on type B, by `0↔1` on degree-2 vertices, and
//!   identically on off-axis pairs.  Over/under data is *preserved* by the
//!   mirror (the spatial symmetry is a rotation about an in-plane axis).
//! * The `over` tag of an off-axis crossing is `0` (strand `{0,2}` over) or
//!   `1` (strand `{1,3}` over).  For an on-axis crossing the tag also
//!   encodes the pairing type: `0`/`1` mean strand `{0,2}`/`{1,3}` over
//!   with type A, `2`/`3` the same strands over with type B.
//! * Mirror pairs of crossing-free circles cannot carry vertices, so they
//!   are tracked by the counter
//!   [`SymmetricDiagram::off_axis_circle_pairs`]; Morse and tangency moves
//!   materialise and absorb them as needed.
//!
//! The axis order is deliberately *not* cross-checked against the planar
//! embedding: it is an independent combinatorial layer, which is what makes
//! the swap-style moves (axis-crossing transpositions and the moves through
//! infinity) sound as local rewrites.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The kind of a diagram vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    /// A crossing strictly on one side of the axis (member of a mirror pair).
    OffAxisCrossing,
    /// A crossing sitting on the axis, fixed by the mirror.
    OnAxisCrossing,
    /// A point where an invariant strand meets the axis.
    FixedPoint,
    /// A transverse axis intersection of a free strand that is not a crossing.
    AxisPassthrough,
}

impl VertexKind {
    /// Number of ports of a vertex of this kind.
    pub fn ports(self) -> u8 {
        match self {
            VertexKind::OffAxisCrossing | VertexKind::OnAxisCrossing => 4,
            VertexKind::FixedPoint | VertexKind::AxisPassthrough => 2,
        }
    }

    /// True for the kinds fixed by the mirror involution.
    pub fn on_axis(self) -> bool {
        !matches!(self, VertexKind::OffAxisCrossing)
    }

    fn token(self) -> &'static str {
        match self {
            VertexKind::OffAxisCrossing => "offcross",
            VertexKind::OnAxisCrossing => "oncross",
            VertexKind::FixedPoint => "fixed",
            VertexKind::AxisPassthrough => "pass",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        Some(match s {
            "offcross" => VertexKind::OffAxisCrossing,
            "oncross" => VertexKind::OnAxisCrossing,
            "fixed" => VertexKind::FixedPoint,
            "pass" => VertexKind::AxisPassthrough,
            _ => return None,
        })
    }
}

/// A diagram vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    /// Stable identifier.
    pub id: u32,
    /// Vertex kind.
    pub kind: VertexKind,
    /// Mirror partner (self for on-axis kinds).
    pub mirror: u32,
    /// Over/under tag for crossings (see the module docs), `None` otherwise.
    pub over: Option<u8>,
}

impl Vertex {
    /// Which strand (`0` = ports `{0,2}`, `1` = ports `{1,3}`) is the
    /// over-strand.  Panics on non-crossings.
    pub fn over_strand(&self) -> u8 {
        self.over.expect("crossing carries over data") % 2
    }

    /// Pairing type of an on-axis crossing: `false` = type A, `true` = B.
    pub fn pairing_b(&self) -> bool {
        self.over.unwrap_or(0) >= 2
    }
}

/// One endpoint of an edge: a vertex/port pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct End {
    /// Vertex id.
    pub v: u32,
    /// Port index at that vertex.
    pub port: u8,
}

impl End {
    /// Convenience constructor.
    pub fn new(v: u32, port: u8) -> Self {
        End { v, port }
    }
}

/// An edge joining two vertex/port pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Stable identifier.
    pub id: u32,
    /// First endpoint.
    pub a: End,
    /// Second endpoint.
    pub b: End,
}

impl Edge {
    /// The endpoint of this edge that is not `e` (which must be an endpoint).
    pub fn other(&self, e: End) -> End {
        if self.a == e {
            self.b
        } else {
            self.a
        }
    }

    fn touches(&self, v: u32) -> bool {
        self.a.v == v || self.b.v == v
    }
}

/// An entry of the axis order: an on-axis vertex or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisEntry {
    /// An on-axis vertex id.
    V(u32),
    /// The distinguished point at infinity closing the axis into a circle.
    Infinity,
}

/// A transvergent link diagram with mirror involution.
#[derive(Debug, Clone, Default)]
pub struct SymmetricDiagram {
    /// Display name (used by the text format header).
    pub name: String,
    vertices: BTreeMap<u32, Vertex>,
    edges: BTreeMap<u32, Edge>,
    /// Total order of the on-axis vertices along the axis (bottom to top),
    /// with exactly one [`AxisEntry::Infinity`] marker; the list is read
    /// cyclically.
    pub axis_order: Vec<AxisEntry>,
    /// Number of mirror pairs of crossing-free off-axis circles.
    pub off_axis_circle_pairs: u32,
    next_vertex: u32,
    next_edge: u32,
}

/// Families of symmetric diagram moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(missing_docs)]
pub enum MoveFamily {
    IR1,
    IR2,
    IR3,
    R1,
    R2,
    M1,
    M2,
    M3,
    IMove,
    SMove,
    BirthOff,
    SaddleOff,
    DeathOff,
    BirthOn,
    SaddleOn,
    DeathOn,
}

impl MoveFamily {
    /// All sixteen families in a fixed order.
    pub const ALL: [MoveFamily; 16] = [
        MoveFamily::IR1,
        MoveFamily::IR2,
        MoveFamily::IR3,
        MoveFamily::R1,
        MoveFamily::R2,
        MoveFamily::M1,
        MoveFamily::M2,
        MoveFamily::M3,
        MoveFamily::IMove,
        MoveFamily::SMove,
        MoveFamily::BirthOff,
        MoveFamily::SaddleOff,
        MoveFamily::DeathOff,
        MoveFamily::BirthOn,
        MoveFamily::SaddleOn,
        MoveFamily::DeathOn,
    ];

    /// Text token for the family.
    pub fn token(self) -> &'static str {
        match self {
            MoveFamily::IR1 => "IR1",
            MoveFamily::IR2 => "IR2",
            MoveFamily::IR3 => "IR3",
            MoveFamily::R1 => "R1",
            MoveFamily::R2 => "R2",
            MoveFamily::M1 => "M1",
            MoveFamily::M2 => "M2",
            MoveFamily::M3 => "M3",
            MoveFamily::IMove => "I",
            MoveFamily::SMove => "S",
            MoveFamily::BirthOff => "birth-off",
            MoveFamily::SaddleOff => "saddle-off",
            MoveFamily::DeathOff => "death-off",
            MoveFamily::BirthOn => "birth-on",
            MoveFamily::SaddleOn => "saddle-on",
            MoveFamily::DeathOn => "death-on",
        }
    }

    /// Parse a family token.
    pub fn from_token(s: &str) -> Option<Self> {
        MoveFamily::ALL.iter().copied().find(|f| f.token() == s)
    }
}

impl fmt::Display for MoveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Direction in which a move is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// The complicating direction (crossings/components created).
    Forward,
    /// The simplifying direction.
    Reverse,
}

impl Direction {
    /// The opposite direction.
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }

    /// Text token (`fwd`/`rev`).
    pub fn token(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Reverse => "rev",
        }
    }

    /// Parse a direction token.
    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "fwd" => Some(Direction::Forward),
            "rev" => Some(Direction::Reverse),
            _ => None,
        }
    }
}

/// A fully specified move: family, signed/oriented variant, direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoveLabel {
    /// Move family.
    pub family: MoveFamily,
    /// Sign/orientation tag; the meaning is per-family (see
    /// [`SymmetricDiagram::apply_move`]).  Empty for the default variant.
    pub variant: String,
    /// Application direction; reversing twice yields the original.
    pub direction: Direction,
}

impl MoveLabel {
    /// Label with the default variant.
    pub fn new(family: MoveFamily, direction: Direction) -> Self {
        MoveLabel {
            family,
            variant: String::new(),
            direction,
        }
    }

    /// Label with an explicit variant tag.
    pub fn with_variant(family: MoveFamily, variant: &str, direction: Direction) -> Self {
        MoveLabel {
            family,
            variant: variant.to_string(),
            direction,
        }
    }

    /// The same move in the opposite direction.
    pub fn reversed(&self) -> Self {
        MoveLabel {
            family: self.family,
            variant: self.variant.clone(),
            direction: self.direction.flip(),
        }
    }
}

impl fmt::Display for MoveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let variant = if self.variant.is_empty() {
            "-"
        } else {
            &self.variant
        };
        write!(
            f,
            "{} {} {}",
            self.family.token(),
            variant,
            self.direction.token()
        )
    }
}

/// A location at which a move applies.
///
/// Sites are flat records; each move family documents which fields it
/// reads.  Vertex and edge ids refer to the diagram the site was found in;
/// `gap` is an insertion index into [`SymmetricDiagram::axis_order`]
/// (`0..=len`, interpreted cyclically); `circles` says how many counted
/// off-axis circle pairs the move consumes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Site {
    /// Vertices the move touches, in a family-specific order.
    pub vertices: Vec<u32>,
    /// Edges the move touches, in a family-specific order.
    pub edges: Vec<u32>,
    /// Axis-order insertion position, when the move inserts axis vertices.
    pub gap: Option<usize>,
    /// Number of counted circle pairs consumed by the move.
    pub circles: u8,
}

impl Site {
    /// The ambient site (no anchors), used by the off-axis Morse moves.
    pub fn ambient() -> Self {
        Site::default()
    }

    /// A site anchored at vertices only.
    pub fn at_vertices(vs: &[u32]) -> Self {
        Site {
            vertices: vs.to_vec(),
            ..Site::default()
        }
    }

    /// A site anchored at edges only.
    pub fn at_edges(es: &[u32]) -> Self {
        Site {
            edges: es.to_vec(),
            ..Site::default()
        }
    }

    /// A pure axis-gap site.
    pub fn at_gap(gap: usize) -> Self {
        Site {
            gap: Some(gap),
            ..Site::default()
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for v in &self.vertices {
            parts.push(format!("v{v}"));
        }
        for e in &self.edges {
            parts.push(format!("e{e}"));
        }
        if let Some(g) = self.gap {
            parts.push(format!("gap{g}"));
        }
        if self.circles > 0 {
            parts.push(format!("circles{}", self.circles));
        }
        if parts.is_empty() {
            parts.push("ambient".to_string());
        }
        f.write_str(&parts.join(" "))
    }
}

impl Site {
    /// Parse the textual site form emitted by [`Site`]'s `Display`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut site = Site::default();
        for tok in s.split_whitespace() {
            if tok == "ambient" {
                continue;
            } else if let Some(rest) = tok.strip_prefix("gap") {
                site.gap =
                    Some(rest.parse().map_err(|_| format!("bad gap token {tok:?}"))?);
            } else if let Some(rest) = tok.strip_prefix("circles") {
                site.circles = rest
                    .parse()
                    .map_err(|_| format!("bad circles token {tok:?}"))?;
            } else if let Some(rest) = tok.strip_prefix('v') {
                site.vertices
                    .push(rest.parse().map_err(|_| format!("bad vertex token {tok:?}"))?);
            } else if let Some(rest) = tok.strip_prefix('e') {
                site.edges
                    .push(rest.parse().map_err(|_| format!("bad edge token {tok:?}"))?);
            } else {
                return Err(format!("unrecognised site token {tok:?}"));
            }
        }
        Ok(site)
    }
}

/// Errors from move application and isomorphism testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagramError {
    /// The site does not match the move's pattern in this diagram.
    InvalidSite(String),
    /// Isomorphism testing is limited to diagrams with at most 16 vertices.
    SizeLimit,
    /// A text-format problem.
    Parse(String),
}

impl fmt::Display for DiagramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramError::InvalidSite(m) => write!(f, "invalid site: {m}"),
            DiagramError::SizeLimit => {
                write!(f, "isomorphism testing is limited to 16 vertices")
            }
            DiagramError::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl std::error::Error for DiagramError {}

/// A structural violation reported by [`SymmetricDiagram::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Human-readable description of the violation.
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn violation(message: impl Into<String>) -> Violation {
    Violation {
        message: message.into(),
    }
}

/// Counting summary of a diagram, used by movie-level invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantSummary {
    /// Mirror pairs of off-axis crossings.
    pub off_axis_crossing_pairs: u32,
    /// Crossings on the axis.
    pub on_axis_crossings: u32,
    /// Connected curve components (counted circles included).
    pub components: u32,
    /// Total transverse intersections of the curve with the axis
    /// (each on-axis crossing contributes two).
    pub axis_intersections: u32,
    /// Vertices of kind [`VertexKind::FixedPoint`].
    pub fixed_points: u32,
}

impl SymmetricDiagram {
    /// Empty diagram (axis order holds only the infinity marker).
    pub fn new(name: &str) -> Self {
        SymmetricDiagram {
            name: name.to_string(),
            axis_order: vec![AxisEntry::Infinity],
            ..SymmetricDiagram::default()
        }
    }

    /// Iterate over the vertices in id order.
    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.values()
    }

    /// Iterate over the edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    /// Look up a vertex.
    pub fn vertex(&self, id: u32) -> Option<&Vertex> {
        self.vertices.get(&id)
    }

    /// Look up an edge.
    pub fn edge(&self, id: u32) -> Option<&Edge> {
        self.edges.get(&id)
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    // ----- construction -------------------------------------------------

    fn alloc_vertex(&mut self, kind: VertexKind, over: Option<u8>) -> u32 {
        let id = self.next_vertex;
        self.next_vertex += 1;
        self.vertices.insert(
            id,
            Vertex {
                id,
                kind,
                mirror: id,
                over,
            },
        );
        id
    }

    /// Add an on-axis vertex *without* placing it in the axis order.
    pub fn add_on_axis(&mut self, kind: VertexKind, over: Option<u8>) -> u32 {
        assert!(kind.on_axis(), "kind must live on the axis");
        self.alloc_vertex(kind, over)
    }

    /// Add an on-axis vertex and append it at the end of the axis order
    /// (just below infinity when the marker is last).
    pub fn push_on_axis(&mut self, kind: VertexKind, over: Option<u8>) -> u32 {
        let id = self.add_on_axis(kind, over);
        let at = self
            .axis_order
            .iter()
            .position(|e| matches!(e, AxisEntry::Infinity))
            .unwrap_or(self.axis_order.len());
        self.axis_order.insert(at, AxisEntry::V(id));
        id
    }

    /// Add a mirror pair of off-axis crossings; returns `(right, left)` ids
    /// (the naming is conventional — the two are symmetric).
    pub fn add_off_axis_pair(&mut self, over: u8) -> (u32, u32) {
        let a = self.alloc_vertex(VertexKind::OffAxisCrossing, Some(over % 2));
        let b = self.alloc_vertex(VertexKind::OffAxisCrossing, Some(over % 2));
        self.vertices.get_mut(&a).unwrap().mirror = b;
        self.vertices.get_mut(&b).unwrap().mirror = a;
        (a, b)
    }

    /// Add an edge between two vertex/port pairs.
    pub fn add_edge(&mut self, a: End, b: End) -> u32 {
        let id = self.next_edge;
        self.next_edge += 1;
        self.edges.insert(id, Edge { id, a, b });
        id
    }

    /// Remove an edge by id.
    pub fn remove_edge(&mut self, id: u32) -> Option<Edge> {
        self.edges.remove(&id)
    }

    // ----- mirror -------------------------------------------------------

    /// Mirror image of a vertex id.
    pub fn mirror_vertex(&self, v: u32) -> u32 {
        self.vertices.get(&v).map(|x| x.mirror).unwrap_or(v)
    }

    /// Mirror image of an edge end.
    pub fn mirror_end(&self, e: End) -> End {
        let Some(v) = self.vertices.get(&e.v) else {
            return e;
        };
        let port = match v.kind {
            VertexKind::OffAxisCrossing => e.port,
            VertexKind::FixedPoint | VertexKind::AxisPassthrough => 1 - e.port,
            VertexKind::OnAxisCrossing => {
                if v.pairing_b() {
                    // 0↔3, 1↔2
                    3 - e.port
                } else {
                    // 0↔1, 2↔3
                    e.port ^ 1
                }
            }
        };
        End::new(v.mirror, port)
    }

    /// The edge id carrying the mirror image of edge `e`, if present.
    pub fn mirror_edge(&self, e: u32) -> Option<u32> {
        let edge = self.edges.get(&e)?;
        let (ma, mb) = (self.mirror_end(edge.a), self.mirror_end(edge.b));
        self.edges
            .values()
            .find(|f| (f.a == ma && f.b == mb) || (f.a == mb && f.b == ma))
            .map(|f| f.id)
    }

    // ----- adjacency ----------------------------------------------------

    /// Map from occupied (vertex, port) to edge id.
    pub fn port_map(&self) -> BTreeMap<End, u32> {
        let mut m = BTreeMap::new();
        for e in self.edges.values() {
            m.insert(e.a, e.id);
            m.insert(e.b, e.id);
        }
        m
    }

    /// The edge attached at a given port, if any.
    pub fn edge_at(&self, end: End) -> Option<u32> {
        self.edges
            .values()
            .find(|e| e.a == end || e.b == end)
            .map(|e| e.id)
    }

    /// Port on the same strand through the vertex (opposite port at a
    /// crossing, the other port at a degree-2 vertex).
    pub fn strand_through(&self, end: End) -> End {
        let kind = self.vertices[&end.v].kind;
        let port = match kind.ports() {
            4 => (end.port + 2) % 4,
            _ => 1 - end.port,
        };
        End::new(end.v, port)
    }

    // ----- axis order helpers -------------------------------------------

    /// Position of an on-axis vertex in the axis order.
    pub fn axis_pos(&self, v: u32) -> Option<usize> {
        self.axis_order
            .iter()
            .position(|e| matches!(e, AxisEntry::V(x) if *x == v))
    }

    /// Position of the infinity marker.
    pub fn infinity_pos(&self) -> usize {
        self.axis_order
            .iter()
            .position(|e| matches!(e, AxisEntry::Infinity))
            .expect("axis order carries an infinity marker")
    }

    /// Whether two axis entries are cyclically adjacent.
    pub fn axis_adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.axis_order.len();
        n >= 2 && ((i + 1) % n == j || (j + 1) % n == i)
    }

    fn axis_remove(&mut self, v: u32) {
        self.axis_order
            .retain(|e| !matches!(e, AxisEntry::V(x) if *x == v));
    }

    // ----- validation ---------------------------------------------------

    /// Check every structural invariant; returns the list of violations
    /// (empty when the diagram is valid).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        // Ports: every port of every vertex used by exactly one edge end.
        let mut seen: BTreeMap<End, u32> = BTreeMap::new();
        for e in self.edges.values() {
            for end in [e.a, e.b] {
                if !self.vertices.contains_key(&end.v) {
                    out.push(violation(format!(
                        "edge e{} references missing vertex v{}",
                        e.id, end.v
                    )));
                    continue;
                }
                if end.port >= self.vertices[&end.v].kind.ports() {
                    out.push(violation(format!(
                        "edge e{} uses port {} out of range at v{}",
                        e.id, end.port, end.v
                    )));
                }
                if let Some(prev) = seen.insert(end, e.id) {
                    out.push(violation(format!(
                        "port v{}.{} used by both e{} and e{}",
                        end.v, end.port, prev, e.id
                    )));
                }
            }
        }
        for v in self.vertices.values() {
            for p in 0..v.kind.ports() {
                if !seen.contains_key(&End::new(v.id, p)) {
                    out.push(violation(format!("port v{}.{} is unused", v.id, p)));
                }
            }
        }

        // Mirror structure.
        for v in self.vertices.values() {
            match self.vertices.get(&v.mirror) {
                None => out.push(violation(format!(
                    "v{} has missing mirror partner v{}",
                    v.id, v.mirror
                ))),
                Some(m) => {
                    if m.mirror != v.id {
                        out.push(violation(format!(
                            "mirror map not involutive at v{}",
                            v.id
                        )));
                    }
                    if v.kind.on_axis() != (v.mirror == v.id) {
                        out.push(violation(format!(
                            "v{} mirror-fixedness inconsistent with its kind",
                            v.id
                        )));
                    }
                    if m.kind != v.kind {
                        out.push(violation(format!(
                            "mirror pair v{}/v{} mixes vertex kinds",
                            v.id, v.mirror
                        )));
                    }
                    if m.over != v.over {
                        out.push(violation(format!(
                            "mirror pair v{}/v{} has mismatched over/under data",
                            v.id, v.mirror
                        )));
                    }
                }
            }
            match v.kind {
                VertexKind::OffAxisCrossing => {
                    if !matches!(v.over, Some(0) | Some(1)) {
                        out.push(violation(format!(
                            "off-axis crossing v{} needs over tag 0 or 1",
                            v.id
                        )));
                    }
                }
                VertexKind::OnAxisCrossing => {
                    if !matches!(v.over, Some(0..=3)) {
                        out.push(violation(format!(
                            "on-axis crossing v{} needs over tag 0..=3",
                            v.id
                        )));
                    }
                }
                _ => {
                    if v.over.is_some() {
                        out.push(violation(format!(
                            "non-crossing v{} carries over data",
                            v.id
                        )));
                    }
                }
            }
        }

        // Mirror closure of the edge set.
        if out.is_empty() {
            for e in self.edges.values() {
                if self.mirror_edge(e.id).is_none() {
                    out.push(violation(format!(
                        "edge e{} has no mirror-image edge",
                        e.id
                    )));
                }
            }
        }

        // Axis order contents.
        let inf = self
            .axis_order
            .iter()
            .filter(|e| matches!(e, AxisEntry::Infinity))
            .count();
        if inf != 1 {
            out.push(violation(format!(
                "axis order carries {inf} infinity markers (need exactly 1)"
            )));
        }
        let mut listed = BTreeSet::new();
        for e in &self.axis_order {
            if let AxisEntry::V(v) = e {
                if !listed.insert(*v) {
                    out.push(violation(format!("v{v} listed twice in the axis order")));
                }
                match self.vertices.get(v) {
                    None => out.push(violation(format!(
                        "axis order references missing vertex v{v}"
                    ))),
                    Some(x) if !x.kind.on_axis() => out.push(violation(format!(
                        "off-axis vertex v{v} appears in the axis order"
                    ))),
                    _ => {}
                }
            }
        }
        for v in self.vertices.values() {
            if v.kind.on_axis() && !listed.contains(&v.id) {
                out.push(violation(format!(
                    "on-axis vertex v{} missing from the axis order",
                    v.id
                )));
            }
        }

        if !out.is_empty() {
            return out;
        }

        // Per-component counts.
        for comp in self.strand_components() {
            let mut fixed = 0u32;
            let mut passages = 0u32;
            let mut on_axis_passages: BTreeMap<u32, u32> = BTreeMap::new();
            for end in &comp {
                let v = &self.vertices[&end.v];
                match v.kind {
                    VertexKind::FixedPoint => fixed += 1,
                    VertexKind::AxisPassthrough => passages += 1,
                    VertexKind::OnAxisCrossing => {
                        *on_axis_passages.entry(end.v).or_default() += 1
                    }
                    VertexKind::OffAxisCrossing => {}
                }
            }
            // Each end-visit counts a vertex twice (in and out).
            let fixed = fixed / 2;
            let mut axis = fixed + passages / 2;
            for (_, c) in on_axis_passages {
                axis += c / 2;
            }
            if fixed != 0 && fixed != 2 {
                out.push(violation(format!(
                    "a component carries {fixed} fixed points (must be 0 or 2)"
                )));
            }
            if axis % 2 != 0 {
                out.push(violation(format!(
                    "a component meets the axis {axis} times (must be even)"
                )));
            }
        }

        // Planarity of the rotation system, per graph component.
        if let Some(v) = self.genus_violation() {
            out.push(v);
        }

        out
    }

    /// Orbits of the strand-following traversal; each orbit is the list of
    /// edge-end visits of one closed curve component (counted circles
    /// excluded).
    fn strand_components(&self) -> Vec<Vec<End>> {
        // Darts: (edge id, towards end).  Following a strand: traverse the
        // edge, pass through the vertex to the strand-opposite port, take
        // the edge there.
        let port_map = self.port_map();
        let mut visited: BTreeSet<(u32, bool)> = BTreeSet::new();
        let mut comps = Vec::new();
        for e in self.edges.values() {
            for dir in [false, true] {
                if visited.contains(&(e.id, dir)) {
                    continue;
                }
                let mut comp = Vec::new();
                let (mut cur, mut d) = (e.id, dir);
                loop {
                    if !visited.insert((cur, d)) {
                        break;
                    }
                    let edge = &self.edges[&cur];
                    let head = if d { edge.b } else { edge.a };
                    comp.push(head);
                    let out = self.strand_through(head);
                    comp.push(out);
                    let next = port_map[&out];
                    let nedge = &self.edges[&next];
                    d = nedge.a == out;
                    cur = next;
                }
                // Mark the opposite direction as visited too: one curve,
                // one component.
                let ends: Vec<(u32, bool)> = comp
                    .iter()
                    .filter_map(|end| port_map.get(end).map(|id| *id))
                    .flat_map(|id| [(id, false), (id, true)])
                    .collect();
                visited.extend(ends);
                comps.push(comp);
            }
        }
        comps
    }

    /// Euler-characteristic check of the rotation system: every graph
    /// component must embed in the sphere with the given cyclic port order.
    ///
    /// Reflection reverses orientation, so of each off-axis mirror pair one
    /// vertex carries the counterclockwise port rotation and its partner
    /// the clockwise one; which member is which is embedding data the
    /// combinatorial structure does not fix, so all assignments are tried.
    fn genus_violation(&self) -> Option<Violation> {
        if self.edges.is_empty() {
            return None;
        }
        let reps: Vec<u32> = self
            .vertices
            .values()
            .filter(|v| v.kind == VertexKind::OffAxisCrossing && v.id < v.mirror)
            .map(|v| v.id)
            .collect();
        if reps.len() > 14 {
            return None; // assignment search too large; skip the check
        }
        let mut last = None;
        for mask in 0u32..(1 << reps.len()) {
            let mut orient: BTreeMap<u32, u8> = BTreeMap::new();
            for (i, &r) in reps.iter().enumerate() {
                let bit = (mask >> i) & 1 == 1;
                orient.insert(r, if bit { 3 } else { 1 });
                orient.insert(self.mirror_vertex(r), if bit { 1 } else { 3 });
            }
            match self.genus_violation_oriented(&orient) {
                None => return None,
                some => last = some,
            }
        }
        last
    }

    fn genus_violation_oriented(&self, orient: &BTreeMap<u32, u8>) -> Option<Violation> {
        // Graph components via union-find on vertices.
        let ids: Vec<u32> = self.vertices.keys().copied().collect();
        let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut Vec<usize>, mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for e in self.edges.values() {
            let (a, b) = (find(&mut parent, index[&e.a.v]), find(&mut parent, index[&e.b.v]));
            parent[a] = b;
        }
        // Face tracing: dart = (edge, towards-end). Next dart: at the head
        // end, rotate to the next port and leave along that edge.
        let port_map = self.port_map();
        let mut face_of: BTreeMap<(u32, bool), usize> = BTreeMap::new();
        let mut faces_per_comp: BTreeMap<usize, u32> = BTreeMap::new();
        let mut nfaces = 0usize;
        for e in self.edges.values() {
            for dir in [false, true] {
                if face_of.contains_key(&(e.id, dir)) {
                    continue;
                }
                let comp = find(&mut parent, index[&e.a.v]);
                *faces_per_comp.entry(comp).or_default() += 1;
                let (mut cur, mut d) = (e.id, dir);
                loop {
                    if face_of.insert((cur, d), nfaces).is_some() {
                        break;
                    }
                    let edge = &self.edges[&cur];
                    let head = if d { edge.b } else { edge.a };
                    let ports = self.vertices[&head.v].kind.ports();
                    let step = *orient.get(&head.v).unwrap_or(&1) % ports;
                    let out = End::new(head.v, (head.port + step) % ports);
                    let next = port_map[&out];
                    d = self.edges[&next].a == out;
                    cur = next;
                }
                nfaces += 1;
            }
        }
        // V - E + F per graph component must equal 2.
        let mut ve: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
        for v in self.vertices.values() {
            let comp = find(&mut parent, index[&v.id]);
            ve.entry(comp).or_default().0 += 1;
        }
        for e in self.edges.values() {
            let comp = find(&mut parent, index[&e.a.v]);
            ve.entry(comp).or_default().1 += 1;
        }
        for (comp, (v, e)) in ve {
            if e == 0 {
                continue; // isolated vertices cannot occur (ports unused)
            }
            let f = i64::from(*faces_per_comp.get(&comp).unwrap_or(&0));
            if v - e + f != 2 {
                return Some(violation(format!(
                    "rotation system is not planar (V-E+F = {} on a component)",
                    v - e + f
                )));
            }
        }
        None
    }

    // ----- counting -----------------------------------------------------

    /// Number of closed curve components, counted circles included.
    pub fn components(&self) -> u32 {
        self.strand_components().len() as u32 + 2 * self.off_axis_circle_pairs
    }

    /// Counting summary of the diagram.
    pub fn invariant_summary(&self) -> InvariantSummary {
        let mut off = 0u32;
        let mut on = 0u32;
        let mut fixed = 0u32;
        let mut passes = 0u32;
        for v in self.vertices.values() {
            match v.kind {
                VertexKind::OffAxisCrossing => off += 1,
                VertexKind::OnAxisCrossing => on += 1,
                VertexKind::FixedPoint => fixed += 1,
                VertexKind::AxisPassthrough => passes += 1,
            }
        }
        InvariantSummary {
            off_axis_crossing_pairs: off / 2,
            on_axis_crossings: on,
            components: self.components(),
            axis_intersections: 2 * on + fixed + passes,
            fixed_points: fixed,
        }
    }

    // ----- splicing machinery -------------------------------------------

    /// Remove a vertex, reconnecting each strand through it; returns the
    /// number of crossing-free circles this produces (these are removed
    /// from the edge set; the caller books them as counted circles).
    fn splice_out(&mut self, v: u32) -> u32 {
        let kind = self.vertices[&v].kind;
        let pairs: Vec<(u8, u8)> = match kind.ports() {
            4 => vec![(0, 2), (1, 3)],
            _ => vec![(0, 1)],
        };
        let mut circles = 0;
        for (pa, pb) in pairs {
            let ea = self
                .edge_at(End::new(v, pa))
                .expect("splice requires a closed diagram");
            let eb = self
                .edge_at(End::new(v, pb))
                .expect("splice requires a closed diagram");
            if ea == eb {
                self.edges.remove(&ea);
                circles += 1;
                continue;
            }
            let fa = self.edges[&ea].other(End::new(v, pa));
            let fb = self.edges[&eb].other(End::new(v, pb));
            self.edges.remove(&ea);
            self.edges.remove(&eb);
            if fa == fb {
                // The two edges formed a closed loop through this strand.
                circles += 1;
            } else {
                self.add_edge(fa, fb);
            }
        }
        self.vertices.remove(&v);
        self.axis_remove(v);
        circles
    }

    /// Rewrite every edge end at vertex `v` through the port permutation
    /// `perm`.
    fn relabel_ports(&mut self, v: u32, perm: impl Fn(u8) -> u8) {
        let ids: Vec<u32> = self
            .edges
            .values()
            .filter(|e| e.a.v == v || e.b.v == v)
            .map(|e| e.id)
            .collect();
        for id in ids {
            let e = self.edges.get_mut(&id).unwrap();
            if e.a.v == v {
                e.a.port = perm(e.a.port);
            }
            if e.b.v == v {
                e.b.port = perm(e.b.port);
            }
        }
    }

    /// Join the port pairs in `joins` by merging the edges attached there
    /// (saddle-style reconnection); returns the number of closed
    /// crossing-free circles this produces, or `None` if a port is bare.
    fn splice_join(&mut self, joins: &[(End, End)]) -> Option<u32> {
        let mut circles = 0;
        for &(p, q) in joins {
            let ep = self.edge_at(p)?;
            let eq = self.edge_at(q)?;
            if ep == eq {
                // One edge directly connecting the joined ports.
                self.edges.remove(&ep);
                circles += 1;
                continue;
            }
            let fp = self.edges[&ep].other(p);
            let fq = self.edges[&eq].other(q);
            self.edges.remove(&ep);
            self.edges.remove(&eq);
            if fp == fq {
                circles += 1;
            } else {
                self.add_edge(fp, fq);
            }
        }
        Some(circles)
    }

    /// Book spliced-out free circles as counted mirror pairs.
    fn book_circles(&mut self, circles: u32) -> Result<(), DiagramError> {
        if circles % 2 != 0 {
            return Err(DiagramError::InvalidSite(format!(
                "splice freed {circles} circles; expected a mirror-even number"
            )));
        }
        self.off_axis_circle_pairs += circles / 2;
        Ok(())
    }
}

// ----- move application -----------------------------------------------

fn bad(msg: impl Into<String>) -> DiagramError {
    DiagramError::InvalidSite(msg.into())
}

/// Over tag selected by a `+`/`-` variant suffix (`+`/empty = strand
/// `{0,2}` over).  A trailing `s` (swap the second strand's orientation)
/// is ignored for the over tag.
fn variant_over(variant: &str) -> u8 {
    u8::from(variant.trim_end_matches('s').ends_with('-'))
}

impl SymmetricDiagram {
    fn need_vertex(&self, site: &Site, i: usize, kind: VertexKind) -> Result<u32, DiagramError> {
        let id = *site
            .vertices
            .get(i)
            .ok_or_else(|| bad(format!("site needs at least {} vertices", i + 1)))?;
        let v = self
            .vertex(id)
            .ok_or_else(|| bad(format!("no vertex v{id}")))?;
        if v.kind != kind {
            return Err(bad(format!(
                "v{id} is a {:?}, move needs a {kind:?}",
                v.kind
            )));
        }
        Ok(id)
    }

    fn need_edge(&self, site: &Site, i: usize) -> Result<u32, DiagramError> {
        let id = *site
            .edges
            .get(i)
            .ok_or_else(|| bad(format!("site needs at least {} edges", i + 1)))?;
        if !self.edges.contains_key(&id) {
            return Err(bad(format!("no edge e{id}")));
        }
        Ok(id)
    }

    fn need_gap(&self, site: &Site) -> Result<usize, DiagramError> {
        let g = site.gap.ok_or_else(|| bad("site needs an axis gap"))?;
        if g > self.axis_order.len() {
            return Err(bad(format!("gap {g} out of range")));
        }
        Ok(g)
    }

    fn need_pairs(&self, n: u32) -> Result<(), DiagramError> {
        if self.off_axis_circle_pairs < n {
            return Err(bad(format!(
                "move consumes {n} counted circle pairs, diagram has {}",
                self.off_axis_circle_pairs
            )));
        }
        Ok(())
    }

    /// Mirror partner of an edge, required distinct from the edge itself
    /// and from `exclude`.
    fn need_mirror_edge(&self, e: u32, exclude: &[u32]) -> Result<u32, DiagramError> {
        let m = self
            .mirror_edge(e)
            .ok_or_else(|| bad(format!("e{e} has no mirror edge")))?;
        if m == e || exclude.contains(&m) {
            return Err(bad(format!(
                "e{e} must be disjoint from its mirror image for this move"
            )));
        }
        Ok(m)
    }

    /// Whether axis entries at positions `i`, `j` are cyclically adjacent
    /// with the infinity marker *not* between them (i.e. directly adjacent
    /// in the linear list, or wrapping without passing infinity — the
    /// latter cannot happen since infinity is in the list).
    fn adjacent_avoiding_infinity(&self, a: u32, b: u32) -> Result<(usize, usize), DiagramError> {
        let i = self.axis_pos(a).ok_or_else(|| bad(format!("v{a} not on the axis")))?;
        let j = self.axis_pos(b).ok_or_else(|| bad(format!("v{b} not on the axis")))?;
        if i.abs_diff(j) == 1 {
            Ok((i, j))
        } else if self.axis_adjacent(i, j) {
            Err(bad(format!(
                "v{a} and v{b} are adjacent only through infinity"
            )))
        } else {
            Err(bad(format!("v{a} and v{b} are not adjacent on the axis")))
        }
    }

    /// Whether two on-axis vertices are cyclically adjacent through the
    /// infinity marker.
    fn adjacent_through_infinity(&self, a: u32, b: u32) -> bool {
        let (Some(i), Some(j)) = (self.axis_pos(a), self.axis_pos(b)) else {
            return false;
        };
        let n = self.axis_order.len();
        let k = self.infinity_pos();
        ((i + 1) % n == k && (k + 1) % n == j) || ((j + 1) % n == k && (k + 1) % n == i)
    }

    /// Direct edges between two vertices.
    fn direct_edges(&self, a: u32, b: u32) -> Vec<u32> {
        self.edges
            .values()
            .filter(|e| {
                (e.a.v == a && e.b.v == b) || (e.a.v == b && e.b.v == a)
            })
            .map(|e| e.id)
            .collect()
    }

    /// Apply a move at a site, returning the rewritten diagram.
    ///
    /// The result is re-validated; a move that would produce a structurally
    /// broken diagram (non-planar rotation system, mirror asymmetry, odd
    /// axis counts, …) is rejected with
    /// [`DiagramError::InvalidSite`].
    ///
    /// Variant tags per family: `+`/`-` pick the over-strand for the
    /// crossing-creating moves; `R1` prefixes the sign with `above`/`below`
    /// (side of the fixed point); `IR2`/`R2` accept `circle` variants that
    /// consume a counted circle pair; `I` accepts `iso` (a no-op isotopy
    /// step); `saddle-off` accepts `circles`, `circle-edge`, and `x`;
    /// `saddle-on` accepts `circle` and `circle-inf` in the splitting
    /// direction.
    pub fn apply_move(
        &self,
        label: &MoveLabel,
        site: &Site,
    ) -> Result<SymmetricDiagram, DiagramError> {
        let mut d = self.clone();
        d.apply_in_place(label, site)?;
        let violations = d.validate();
        if let Some(v) = violations.first() {
            return Err(bad(format!("move result is invalid: {v}")));
        }
        Ok(d)
    }

    fn apply_in_place(&mut self, label: &MoveLabel, site: &Site) -> Result<(), DiagramError> {
        use Direction::*;
        use MoveFamily::*;
        let variant = label.variant.as_str();
        match (label.family, label.direction) {
            (IR1, Forward) => self.ir1_forward(site, variant),
            (IR1, Reverse) => self.ir1_reverse(site),
            (IR2, Forward) => self.ir2_forward(site, variant),
            (IR2, Reverse) => self.ir2_reverse(site),
            (IR3, _) => self.ir3_flip(site),
            (R1, Forward) => self.r1_forward(site, variant),
            (R1, Reverse) => self.r1_reverse(site),
            (R2, Forward) => self.r2_forward(site, variant),
            (R2, Reverse) => self.r2_reverse(site),
            (M1, dir) if variant == "pair" => self.m1_pair(site, dir),
            (M1, _) => self.axis_transpose(site, true),
            (M3, _) => self.axis_transpose(site, false),
            (M2, Forward) => self.m2_forward(site, variant_over(variant)),
            (M2, Reverse) => self.m2_reverse(site),
            (IMove, _) => self.i_move(site, variant),
            (SMove, _) => self.s_move(site),
            (BirthOff, Forward) | (DeathOff, Reverse) => {
                self.off_axis_circle_pairs += 1;
                Ok(())
            }
            (BirthOff, Reverse) | (DeathOff, Forward) => {
                self.need_pairs(1)?;
                self.off_axis_circle_pairs -= 1;
                Ok(())
            }
            (SaddleOff, dir) => self.saddle_off(site, variant, dir),
            (BirthOn, Forward) | (DeathOn, Reverse) => self.birth_on(site),
            (BirthOn, Reverse) | (DeathOn, Forward) => self.death_on(site),
            (SaddleOn, Forward) => self.saddle_on_forward(site, variant),
            (SaddleOn, Reverse) => self.saddle_on_reverse(site, variant),
        }
    }

    // --- kink creation/removal (off-axis and at a fixed point) ----------

    fn ir1_forward(&mut self, site: &Site, variant: &str) -> Result<(), DiagramError> {
        let over = variant_over(variant);
        if variant.starts_with("circle") {
            // Materialise a counted circle pair as a kinked circle pair.
            self.need_pairs(1)?;
            self.off_axis_circle_pairs -= 1;
            let (k, mk) = self.add_off_axis_pair(over);
            for kink in [k, mk] {
                self.add_edge(End::new(kink, 2), End::new(kink, 1));
                self.add_edge(End::new(kink, 3), End::new(kink, 0));
            }
            return Ok(());
        }
        let e = self.need_edge(site, 0)?;
        let me = self.need_mirror_edge(e, &[])?;
        let (k, mk) = self.add_off_axis_pair(over);
        for (edge, kink) in [(e, k), (me, mk)] {
            let Edge { a, b, .. } = self.edges[&edge].clone();
            self.edges.remove(&edge);
            self.add_edge(a, End::new(kink, 0));
            self.add_edge(End::new(kink, 2), End::new(kink, 1));
            self.add_edge(End::new(kink, 3), b);
        }
        Ok(())
    }

    fn ir1_reverse(&mut self, site: &Site) -> Result<(), DiagramError> {
        let k = self.need_vertex(site, 0, VertexKind::OffAxisCrossing)?;
        let has_loop = self.edges.values().any(|e| {
            e.a.v == k && e.b.v == k && (e.a.port + 1) % 4 == e.b.port
                || e.a.v == k && e.b.v == k && (e.b.port + 1) % 4 == e.a.port
        });
        if !has_loop {
            return Err(bad(format!("v{k} carries no kink loop")));
        }
        let mk = self.mirror_vertex(k);
        let circles = self.splice_out(k) + self.splice_out(mk);
        self.book_circles(circles)
    }

    // --- bigon creation/removal (off-axis) ------------------------------

    fn ir2_forward(&mut self, site: &Site, variant: &str) -> Result<(), DiagramError> {
        let over = variant_over(variant);
        if variant.starts_with("circles") {
            // Two counted circle pairs materialise crossing each other
            // twice: a closed bigon configuration off the axis.
            self.need_pairs(2)?;
            self.off_axis_circle_pairs -= 2;
            let (c1, m1) = self.add_off_axis_pair(over);
            let (c2, m2) = self.add_off_axis_pair(over ^ 1);
            for (c1, c2) in [(c1, c2), (m1, m2)] {
                self.add_edge(End::new(c1, 0), End::new(c2, 3));
                self.add_edge(End::new(c2, 1), End::new(c1, 2));
                self.add_edge(End::new(c1, 1), End::new(c2, 2));
                self.add_edge(End::new(c2, 0), End::new(c1, 3));
            }
            return Ok(());
        }
        let e1 = self.need_edge(site, 0)?;
        let (e2, from_circle) = if variant.starts_with("circle") {
            (None, true)
        } else {
            (Some(self.need_edge(site, 1)?), false)
        };
        let me1 = self.need_mirror_edge(e1, &[e2.unwrap_or(e1)])?;
        if let Some(e2) = e2 {
            if e2 == e1 {
                return Err(bad("bigon needs two distinct edges"));
            }
            self.need_mirror_edge(e2, &[e1])?;
        }
        if from_circle {
            self.need_pairs(1)?;
            self.off_axis_circle_pairs -= 1;
        }
        // The pushed strand uses strand {0,2} at the first crossing and
        // strand {1,3} at the second, so "over at both" needs opposite tags.
        let (c1, m1) = self.add_off_axis_pair(over);
        let (c2, m2) = self.add_off_axis_pair(over ^ 1);
        let Edge { a: a1, b: b1, .. } = self.edges[&e1].clone();
        let (ma1, mb1) = (self.mirror_end(a1), self.mirror_end(b1));
        let second = e2.map(|f2| {
            let Edge { a, b, .. } = self.edges[&f2].clone();
            // An `s` suffix threads the second strand in the opposite
            // orientation (which end meets the first crossing).
            if variant.contains('s') {
                (f2, b, a)
            } else {
                (f2, a, b)
            }
        });
        self.edges.remove(&e1);
        self.edges.remove(&me1);
        if let Some((f2, _, _)) = second {
            let mf2 = self.mirror_edge(f2).unwrap();
            self.edges.remove(&f2);
            self.edges.remove(&mf2);
        }
        self.add_edge(a1, End::new(c1, 2));
        self.add_edge(End::new(c1, 0), End::new(c2, 3));
        self.add_edge(End::new(c2, 1), b1);
        self.add_edge(ma1, End::new(m1, 2));
        self.add_edge(End::new(m1, 0), End::new(m2, 3));
        self.add_edge(End::new(m2, 1), mb1);
        match second {
            Some((_, a2, b2)) => {
                let (ma2, mb2) = (self.mirror_end(a2), self.mirror_end(b2));
                self.add_edge(a2, End::new(c1, 3));
                self.add_edge(End::new(c1, 1), End::new(c2, 2));
                self.add_edge(End::new(c2, 0), b2);
                self.add_edge(ma2, End::new(m1, 3));
                self.add_edge(End::new(m1, 1), End::new(m2, 2));
                self.add_edge(End::new(m2, 0), mb2);
            }
            None => {
                // Second strand is a freshly materialised circle.
                for (c1, c2) in [(c1, c2), (m1, m2)] {
                    self.add_edge(End::new(c1, 1), End::new(c2, 2));
                    self.add_edge(End::new(c2, 0), End::new(c1, 3));
                }
            }
        }
        Ok(())
    }


    fn ir2_reverse(&mut self, site: &Site) -> Result<(), DiagramError> {
        let c1 = self.need_vertex(site, 0, VertexKind::OffAxisCrossing)?;
        let c2 = self.need_vertex(site, 1, VertexKind::OffAxisCrossing)?;
        if c1 == c2 || c2 == self.mirror_vertex(c1) {
            return Err(bad("bigon needs two distinct same-side crossings"));
        }
        let bridges = self.direct_edges(c1, c2);
        if bridges.len() < 2 {
            return Err(bad(format!("v{c1} and v{c2} do not bound a bigon")));
        }
        // One bigon strand must be over at both crossings (and the other
        // under at both); an alternating pair is a clasp, not removable.
        let profile: Vec<(bool, bool)> = bridges
            .iter()
            .map(|&e| {
                let edge = &self.edges[&e];
                let (p1, p2) = if edge.a.v == c1 {
                    (edge.a.port, edge.b.port)
                } else {
                    (edge.b.port, edge.a.port)
                };
                (
                    self.vertices[&c1].over_strand() == p1 % 2,
                    self.vertices[&c2].over_strand() == p2 % 2,
                )
            })
            .collect();
        if !profile.iter().any(|&(x, y)| x && y) || !profile.iter().any(|&(x, y)| !x && !y) {
            return Err(bad(
                "bigon crossings alternate over/under (clasp), not removable",
            ));
        }
        let (m1, m2) = (self.mirror_vertex(c1), self.mirror_vertex(c2));
        let mut circles = 0;
        for v in [c1, c2, m1, m2] {
            circles += self.splice_out(v);
        }
        self.book_circles(circles)
    }

    // --- triangle flip (off-axis) ---------------------------------------

    fn ir3_flip(&mut self, site: &Site) -> Result<(), DiagramError> {
        let a = self.need_vertex(site, 0, VertexKind::OffAxisCrossing)?;
        let b = self.need_vertex(site, 1, VertexKind::OffAxisCrossing)?;
        let c = self.need_vertex(site, 2, VertexKind::OffAxisCrossing)?;
        let tri = [a, b, c];
        let mirrors = [a, b, c].map(|v| self.mirror_vertex(v));
        if a == b || b == c || a == c {
            return Err(bad("triangle needs three distinct crossings"));
        }
        if mirrors.iter().any(|m| tri.contains(m)) {
            return Err(bad("triangle meets its own mirror image"));
        }
        // The three sides; each is a strand segment whose over/under state
        // at both endpoints decides applicability: some side must be over
        // at both ends and some side under at both ends.
        let mut over_profile = Vec::new();
        for (u, v) in [(a, b), (b, c), (c, a)] {
            let sides = self.direct_edges(u, v);
            let e = *sides
                .first()
                .ok_or_else(|| bad(format!("v{u} and v{v} are not adjacent")))?;
            let edge = &self.edges[&e];
            let (pu, pv) = if edge.a.v == u {
                (edge.a.port, edge.b.port)
            } else {
                (edge.b.port, edge.a.port)
            };
            let over_u = self.vertices[&u].over_strand() == pu % 2;
            let over_v = self.vertices[&v].over_strand() == pv % 2;
            over_profile.push((over_u, over_v));
        }
        let has_top = over_profile.iter().any(|&(x, y)| x && y);
        let has_bottom = over_profile.iter().any(|&(x, y)| !x && !y);
        if !has_top || !has_bottom {
            return Err(bad(
                "triangle over-pattern is cyclic; the slide does not apply",
            ));
        }
        for v in tri.into_iter().chain(mirrors) {
            self.relabel_ports(v, |p| (p + 2) % 4);
        }
        Ok(())
    }

    // --- curl at a fixed point ------------------------------------------

    fn r1_forward(&mut self, site: &Site, variant: &str) -> Result<(), DiagramError> {
        let f = self.need_vertex(site, 0, VertexKind::FixedPoint)?;
        let above = match variant {
            v if v.starts_with("above") => true,
            v if v.starts_with("below") => false,
            _ => return Err(bad("curl variant must start with above/below")),
        };
        let over = variant_over(variant);
        let pos = self.axis_pos(f).unwrap();
        let e0 = self
            .edge_at(End::new(f, 0))
            .ok_or_else(|| bad("fixed point has a bare port"))?;
        let e1 = self
            .edge_at(End::new(f, 1))
            .ok_or_else(|| bad("fixed point has a bare port"))?;
        if e0 == e1 {
            return Err(bad("fixed point sits on a one-edge loop"));
        }
        let x = self.edges[&e0].other(End::new(f, 0));
        let y = self.edges[&e1].other(End::new(f, 1));
        self.edges.remove(&e0);
        self.edges.remove(&e1);
        let k = self.add_on_axis(VertexKind::OnAxisCrossing, Some(over));
        if above {
            self.axis_order.insert(pos + 1, AxisEntry::V(k));
            self.add_edge(End::new(k, 2), End::new(f, 1));
            self.add_edge(End::new(k, 3), End::new(f, 0));
            self.add_edge(End::new(k, 1), x);
            self.add_edge(End::new(k, 0), y);
        } else {
            self.axis_order.insert(pos, AxisEntry::V(k));
            self.add_edge(End::new(k, 0), End::new(f, 1));
            self.add_edge(End::new(k, 1), End::new(f, 0));
            self.add_edge(End::new(k, 2), y);
            self.add_edge(End::new(k, 3), x);
        }
        Ok(())
    }

    fn r1_reverse(&mut self, site: &Site) -> Result<(), DiagramError> {
        let f = self.need_vertex(site, 0, VertexKind::FixedPoint)?;
        let k = self.need_vertex(site, 1, VertexKind::OnAxisCrossing)?;
        self.adjacent_avoiding_infinity(f, k)?;
        // The curl runs from one adjacent port pair of the crossing
        // directly through the fixed point.  Which pair faces the fixed
        // point depends on the pairing type and on the history of moves
        // through infinity, so any cyclically adjacent pair is accepted.
        let curled = [[0u8, 1u8], [2, 3], [1, 2], [3, 0]].iter().any(|pair| {
            pair.iter().all(|&p| {
                self.edge_at(End::new(k, p))
                    .map(|e| self.edges[&e].other(End::new(k, p)).v == f)
                    .unwrap_or(false)
            })
        });
        if !curled {
            return Err(bad(format!("v{k} is not curled directly through v{f}")));
        }
        let circles = self.splice_out(k);
        self.book_circles(circles)
    }

    // --- finger move across the axis ------------------------------------

    fn r2_forward(&mut self, site: &Site, variant: &str) -> Result<(), DiagramError> {
        let gap = self.need_gap(site)?;
        // `+`: the pushed strand passes over its mirror image at both new
        // crossings; `-`: under.
        let (o1, o2) = if variant.ends_with('-') { (0, 1) } else { (1, 0) };
        let c1 = self.add_on_axis(VertexKind::OnAxisCrossing, Some(o1));
        let c2 = self.add_on_axis(VertexKind::OnAxisCrossing, Some(o2));
        self.axis_order.insert(gap, AxisEntry::V(c1));
        self.axis_order.insert(gap + 1, AxisEntry::V(c2));
        if variant.starts_with("circle") {
            self.need_pairs(1)?;
            self.off_axis_circle_pairs -= 1;
            self.add_edge(End::new(c1, 1), End::new(c2, 2));
            self.add_edge(End::new(c2, 0), End::new(c1, 3));
            self.add_edge(End::new(c1, 0), End::new(c2, 3));
            self.add_edge(End::new(c2, 1), End::new(c1, 2));
        } else {
            let e = self.need_edge(site, 0)?;
            let me = self.need_mirror_edge(e, &[])?;
            let Edge { a, b, .. } = self.edges[&e].clone();
            let (ma, mb) = (self.mirror_end(a), self.mirror_end(b));
            self.edges.remove(&e);
            self.edges.remove(&me);
            self.add_edge(a, End::new(c1, 3));
            self.add_edge(End::new(c1, 1), End::new(c2, 2));
            self.add_edge(End::new(c2, 0), b);
            self.add_edge(ma, End::new(c1, 2));
            self.add_edge(End::new(c1, 0), End::new(c2, 3));
            self.add_edge(End::new(c2, 1), mb);
        }
        Ok(())
    }

    fn r2_reverse(&mut self, site: &Site) -> Result<(), DiagramError> {
        let c1 = self.need_vertex(site, 0, VertexKind::OnAxisCrossing)?;
        let c2 = self.need_vertex(site, 1, VertexKind::OnAxisCrossing)?;
        self.adjacent_avoiding_infinity(c1, c2)?;
        if self.vertices[&c1].over_strand() == self.vertices[&c2].over_strand() {
            return Err(bad(
                "axis bigon alternates over/under (clasp), not removable",
            ));
        }
        if self.direct_edges(c1, c2).len() < 2 {
            return Err(bad(format!("v{c1} and v{c2} do not bound an axis bigon")));
        }
        let circles = self.splice_out(c1) + self.splice_out(c2);
        self.book_circles(circles)
    }

    // --- axis transpositions --------------------------------------------

    /// The two axis-crossing exchange moves: transpose adjacent axis
    /// entries (crossing past a fixed point, or crossing past crossing).
    /// The planar embedding is an independent layer, so the transposition
    /// is a pure axis-order rewrite.
    fn axis_transpose(&mut self, site: &Site, past_fixed: bool) -> Result<(), DiagramError> {
        let a = self.need_vertex(site, 0, VertexKind::OnAxisCrossing)?;
        let b = if past_fixed {
            self.need_vertex(site, 1, VertexKind::FixedPoint)?
        } else {
            self.need_vertex(site, 1, VertexKind::OnAxisCrossing)?
        };
        if a == b {
            return Err(bad("transposition needs two distinct axis vertices"));
        }
        let (i, j) = self.adjacent_avoiding_infinity(a, b)?;
        self.axis_order.swap(i, j);
        Ok(())
    }

    // --- crossing pair budding off an axis crossing ---------------------

    fn m2_forward(&mut self, site: &Site, over: u8) -> Result<(), DiagramError> {
        let c = self.need_vertex(site, 0, VertexKind::OnAxisCrossing)?;
        let (q, mq) = self.add_off_axis_pair(over);
        for (pa, pb, k) in [(0u8, 3u8, q), (1, 2, mq)] {
            let ea = self
                .edge_at(End::new(c, pa))
                .ok_or_else(|| bad("axis crossing has a bare port"))?;
            let eb = self
                .edge_at(End::new(c, pb))
                .ok_or_else(|| bad("axis crossing has a bare port"))?;
            if ea == eb {
                // Single edge from port pa around to pb: the new crossing
                // is a self-crossing of that arc.
                self.edges.remove(&ea);
                self.add_edge(End::new(c, pa), End::new(k, 0));
                self.add_edge(End::new(k, 2), End::new(k, 1));
                self.add_edge(End::new(k, 3), End::new(c, pb));
            } else {
                let x = self.edges[&ea].other(End::new(c, pa));
                let y = self.edges[&eb].other(End::new(c, pb));
                self.edges.remove(&ea);
                self.edges.remove(&eb);
                self.add_edge(End::new(c, pa), End::new(k, 0));
                self.add_edge(End::new(k, 2), x);
                self.add_edge(End::new(c, pb), End::new(k, 1));
                self.add_edge(End::new(k, 3), y);
            }
        }
        // The strand direction through the axis crossing sweeps past the
        // axis: rotate its chart one step and flip pairing type and
        // over-strand together.
        self.relabel_ports(c, |p| (p + 1) % 4);
        let v = self.vertices.get_mut(&c).unwrap();
        v.over = Some((v.over.unwrap() ^ 1).wrapping_add(2) % 4);
        Ok(())
    }

    fn m2_reverse(&mut self, site: &Site) -> Result<(), DiagramError> {
        let c = self.need_vertex(site, 0, VertexKind::OnAxisCrossing)?;
        let q = self.need_vertex(site, 1, VertexKind::OffAxisCrossing)?;
        if self.direct_edges(c, q).len() < 2 {
            return Err(bad(format!(
                "v{q} is not budded directly off axis crossing v{c}"
            )));
        }
        self.relabel_ports(c, |p| (p + 3) % 4);
        let v = self.vertices.get_mut(&c).unwrap();
        v.over = Some((v.over.unwrap() ^ 1).wrapping_add(2) % 4);
        let mq = self.mirror_vertex(q);
        let circles = self.splice_out(q) + self.splice_out(mq);
        self.book_circles(circles)
    }

    // --- moves through infinity -----------------------------------------

    fn swap_with_infinity(&mut self, v: u32) -> Result<(), DiagramError> {
        let i = self
            .axis_pos(v)
            .ok_or_else(|| bad(format!("v{v} not on the axis")))?;
        let j = self.infinity_pos();
        if !self.axis_adjacent(i, j) {
            return Err(bad(format!("v{v} is not adjacent to infinity")));
        }
        self.axis_order.swap(i, j);
        Ok(())
    }

    fn i_move(&mut self, site: &Site, variant: &str) -> Result<(), DiagramError> {
        if variant == "iso" {
            return Ok(()); // pure isotopy step
        }
        let id = *site
            .vertices
            .first()
            .ok_or_else(|| bad("move through infinity needs a vertex"))?;
        let v = self.vertex(id).ok_or_else(|| bad(format!("no vertex v{id}")))?;
        if !matches!(
            v.kind,
            VertexKind::FixedPoint | VertexKind::AxisPassthrough
        ) {
            return Err(bad(format!(
                "v{id} must be a fixed point or axis passthrough"
            )));
        }
        self.swap_with_infinity(id)?;
        // Left and right swap on the far side of infinity.
        self.relabel_ports(id, |p| 1 - p);
        Ok(())
    }

    fn s_move(&mut self, site: &Site) -> Result<(), DiagramError> {
        let k = self.need_vertex(site, 0, VertexKind::OnAxisCrossing)?;
        self.swap_with_infinity(k)?;
        // The crossing is turned upside down on the far side of infinity;
        // strands and over-data are preserved.
        self.relabel_ports(k, |p| (p + 2) % 4);
        Ok(())
    }

    // --- Morse moves ----------------------------------------------------

    fn saddle_off(
        &mut self,
        site: &Site,
        variant: &str,
        dir: Direction,
    ) -> Result<(), DiagramError> {
        match (variant, dir) {
            ("circles", Direction::Forward) => {
                self.need_pairs(2)?;
                self.off_axis_circle_pairs -= 1;
                Ok(())
            }
            ("circles", Direction::Reverse) => {
                self.need_pairs(1)?;
                self.off_axis_circle_pairs += 1;
                Ok(())
            }
            ("circle-edge", Direction::Forward) => {
                // A counted circle is absorbed into a strand; the strand's
                // combinatorics are unchanged.
                self.need_edge(site, 0)?;
                self.need_pairs(1)?;
                self.off_axis_circle_pairs -= 1;
                Ok(())
            }
            ("circle-edge", Direction::Reverse) => {
                // Pinch a circle pair off a strand.
                self.need_edge(site, 0)?;
                self.off_axis_circle_pairs += 1;
                Ok(())
            }
            ("" | "x", _) => {
                let e1 = self.need_edge(site, 0)?;
                let e2 = self.need_edge(site, 1)?;
                if e1 == e2 {
                    return Err(bad("saddle needs two distinct strands"));
                }
                let m1 = self.need_mirror_edge(e1, &[e2])?;
                let m2 = self.need_mirror_edge(e2, &[e1])?;
                if m1 == e2 || m2 == e1 {
                    return Err(bad("saddle strands must lie on one side"));
                }
                let Edge { a: a1, b: b1, .. } = self.edges[&e1].clone();
                let Edge { a: a2, b: b2, .. } = self.edges[&e2].clone();
                let (ma1, mb1) = (self.mirror_end(a1), self.mirror_end(b1));
                let (ma2, mb2) = (self.mirror_end(a2), self.mirror_end(b2));
                for e in [e1, e2, m1, m2] {
                    self.edges.remove(&e);
                }
                if variant == "x" {
                    self.add_edge(a1, a2);
                    self.add_edge(b1, b2);
                    self.add_edge(ma1, ma2);
                    self.add_edge(mb1, mb2);
                } else {
                    self.add_edge(a1, b2);
                    self.add_edge(a2, b1);
                    self.add_edge(ma1, mb2);
                    self.add_edge(ma2, mb1);
                }
                Ok(())
            }
            _ => Err(bad(format!("unknown saddle variant {variant:?}"))),
        }
    }

    fn birth_on(&mut self, site: &Site) -> Result<(), DiagramError> {
        let gap = self.need_gap(site)?;
        let u = self.add_on_axis(VertexKind::FixedPoint, None);
        let v = self.add_on_axis(VertexKind::FixedPoint, None);
        self.axis_order.insert(gap, AxisEntry::V(u));
        self.axis_order.insert(gap + 1, AxisEntry::V(v));
        self.add_edge(End::new(u, 0), End::new(v, 0));
        self.add_edge(End::new(u, 1), End::new(v, 1));
        Ok(())
    }

    fn death_on(&mut self, site: &Site) -> Result<(), DiagramError> {
        let u = self.need_vertex(site, 0, VertexKind::FixedPoint)?;
        let v = self.need_vertex(site, 1, VertexKind::FixedPoint)?;
        if u == v {
            return Err(bad("death needs two distinct fixed points"));
        }
        let (i, j) = (self.axis_pos(u).unwrap(), self.axis_pos(v).unwrap());
        if !self.axis_adjacent(i, j) {
            return Err(bad(format!("v{u} and v{v} are not adjacent on the axis")));
        }
        let direct = self.direct_edges(u, v);
        if direct.len() != 2
            || self
                .edges
                .values()
                .any(|e| (e.touches(u) || e.touches(v)) && !direct.contains(&e.id))
        {
            return Err(bad(format!(
                "v{u} and v{v} do not bound a minimal invariant circle"
            )));
        }
        for e in direct {
            self.edges.remove(&e);
        }
        self.vertices.remove(&u);
        self.vertices.remove(&v);
        self.axis_remove(u);
        self.axis_remove(v);
        Ok(())
    }

    fn saddle_on_forward(&mut self, site: &Site, variant: &str) -> Result<(), DiagramError> {
        let u = self.need_vertex(site, 0, VertexKind::FixedPoint)?;
        let v = self.need_vertex(site, 1, VertexKind::FixedPoint)?;
        if u == v {
            return Err(bad("saddle needs two distinct fixed points"));
        }
        let (i, j) = (self.axis_pos(u).unwrap(), self.axis_pos(v).unwrap());
        if !self.axis_adjacent(i, j) {
            return Err(bad(format!("v{u} and v{v} are not adjacent on the axis")));
        }
        // Joining across infinity swaps left and right on the far side.
        // When the two fixed points are adjacent both ways (three-entry
        // axis), the direct gap is preferred; `s`/`x` variants force the
        // straight or crossed wiring when the history of moves through
        // infinity has left the strands on swapped sides.
        let direct = self
            .axis_pos(u)
            .zip(self.axis_pos(v))
            .is_some_and(|(i, j)| i.abs_diff(j) == 1);
        let crossed = match variant {
            "x" => true,
            "s" => false,
            "" => !direct && self.adjacent_through_infinity(u, v),
            _ => return Err(bad(format!("unknown saddle variant {variant:?}"))),
        };
        let joins: [(End, End); 2] = if crossed {
            [
                (End::new(u, 0), End::new(v, 1)),
                (End::new(u, 1), End::new(v, 0)),
            ]
        } else {
            [
                (End::new(u, 0), End::new(v, 0)),
                (End::new(u, 1), End::new(v, 1)),
            ]
        };
        let circles = self
            .splice_join(&joins)
            .ok_or_else(|| bad("fixed point has a bare port"))?;
        self.vertices.remove(&u);
        self.vertices.remove(&v);
        self.axis_remove(u);
        self.axis_remove(v);
        self.book_circles(circles)
    }

    fn saddle_on_reverse(&mut self, site: &Site, variant: &str) -> Result<(), DiagramError> {
        match variant {
            "circle" => {
                let gap = self.need_gap(site)?;
                self.need_pairs(1)?;
                self.off_axis_circle_pairs -= 1;
                let u = self.add_on_axis(VertexKind::FixedPoint, None);
                let v = self.add_on_axis(VertexKind::FixedPoint, None);
                self.axis_order.insert(gap, AxisEntry::V(u));
                self.axis_order.insert(gap + 1, AxisEntry::V(v));
                self.add_edge(End::new(u, 0), End::new(v, 0));
                self.add_edge(End::new(u, 1), End::new(v, 1));
                Ok(())
            }
            "circle-inf" => {
                self.need_pairs(1)?;
                self.off_axis_circle_pairs -= 1;
                let u = self.add_on_axis(VertexKind::FixedPoint, None);
                let v = self.add_on_axis(VertexKind::FixedPoint, None);
                let i = self.infinity_pos();
                self.axis_order.insert(i, AxisEntry::V(u));
                let i = self.infinity_pos();
                self.axis_order.insert(i + 1, AxisEntry::V(v));
                self.add_edge(End::new(u, 0), End::new(v, 1));
                self.add_edge(End::new(u, 1), End::new(v, 0));
                Ok(())
            }
            "" => {
                let gap = self.need_gap(site)?;
                let e = self.need_edge(site, 0)?;
                let me = self.need_mirror_edge(e, &[])?;
                let Edge { a, b, .. } = self.edges[&e].clone();
                let (ma, mb) = (self.mirror_end(a), self.mirror_end(b));
                self.edges.remove(&e);
                self.edges.remove(&me);
                let u = self.add_on_axis(VertexKind::FixedPoint, None);
                let v = self.add_on_axis(VertexKind::FixedPoint, None);
                self.axis_order.insert(gap, AxisEntry::V(u));
                self.axis_order.insert(gap + 1, AxisEntry::V(v));
                self.add_edge(a, End::new(u, 0));
                self.add_edge(ma, End::new(u, 1));
                self.add_edge(b, End::new(v, 0));
                self.add_edge(mb, End::new(v, 1));
                Ok(())
            }
            _ => Err(bad(format!("unknown saddle variant {variant:?}"))),
        }
    }
}

// ----- site enumeration -----------------------------------------------

impl SymmetricDiagram {
    /// Enumerate the sites at which the given move applies.
    ///
    /// Candidates are generated family by family and kept only when
    /// [`SymmetricDiagram::apply_move`] accepts them, so every returned
    /// site is guaranteed applicable.
    pub fn find_matches(&self, label: &MoveLabel) -> Vec<Site> {
        use Direction::*;
        use MoveFamily::*;
        let edges: Vec<u32> = self.edges.keys().copied().collect();
        let verts: Vec<u32> = self.vertices.keys().copied().collect();
        let gaps: Vec<usize> = (0..=self.axis_order.len()).collect();
        let mut cands: Vec<Site> = Vec::new();
        match (label.family, label.direction) {
            (IR1, Forward) => cands.extend(edges.iter().map(|&e| Site::at_edges(&[e]))),
            (IR1, Reverse) => cands.extend(
                verts
                    .iter()
                    .filter(|&&v| v < self.mirror_vertex(v))
                    .map(|&v| Site::at_vertices(&[v])),
            ),
            (IR2, Forward) => {
                if label.variant.starts_with("circle") {
                    cands.extend(edges.iter().map(|&e| Site {
                        edges: vec![e],
                        circles: 1,
                        ..Site::default()
                    }));
                } else {
                    for (i, &e1) in edges.iter().enumerate() {
                        for &e2 in &edges[i + 1..] {
                            cands.push(Site::at_edges(&[e1, e2]));
                        }
                    }
                }
            }
            (IR2, Reverse) => {
                for (i, &a) in verts.iter().enumerate() {
                    for &b in &verts[i + 1..] {
                        cands.push(Site::at_vertices(&[a, b]));
                    }
                }
            }
            (IR3, _) => {
                for (i, &a) in verts.iter().enumerate() {
                    for (j, &b) in verts.iter().enumerate().skip(i + 1) {
                        for &c in &verts[j + 1..] {
                            cands.push(Site::at_vertices(&[a, b, c]));
                        }
                    }
                }
            }
            (R1, Forward) => cands.extend(verts.iter().map(|&v| Site::at_vertices(&[v]))),
            (R1, Reverse) | (M1 | M3 | M2, _) | (R2 | SaddleOn | DeathOn | BirthOn, Reverse)
            | (SaddleOn | DeathOn, Forward) => {
                for &a in &verts {
                    for &b in &verts {
                        if a != b {
                            cands.push(Site::at_vertices(&[a, b]));
                        }
                    }
                }
                // Moves whose reverse direction inserts rather than removes.
                for &e in &edges {
                    for &g in &gaps {
                        cands.push(Site {
                            edges: vec![e],
                            gap: Some(g),
                            ..Site::default()
                        });
                    }
                }
                for &g in &gaps {
                    cands.push(Site {
                        gap: Some(g),
                        circles: 1,
                        ..Site::default()
                    });
                }
                cands.push(Site {
                    circles: 1,
                    ..Site::default()
                });
                for &g in &gaps {
                    cands.push(Site::at_gap(g));
                }
                // Pair-budding in the complicating direction anchors at one
                // crossing only.
                cands.extend(verts.iter().map(|&v| Site::at_vertices(&[v])));
            }
            (R2, Forward) => {
                if label.variant.starts_with("circle") {
                    for &g in &gaps {
                        cands.push(Site {
                            gap: Some(g),
                            circles: 1,
                            ..Site::default()
                        });
                    }
                } else {
                    for &e in &edges {
                        for &g in &gaps {
                            cands.push(Site {
                                edges: vec![e],
                                gap: Some(g),
                                ..Site::default()
                            });
                        }
                    }
                }
            }
            (IMove, _) | (SMove, _) => {
                cands.push(Site::ambient());
                cands.extend(verts.iter().map(|&v| Site::at_vertices(&[v])));
            }
            (BirthOff | DeathOff, _) => cands.push(Site::ambient()),
            (SaddleOff, _) => {
                cands.push(Site::ambient());
                cands.extend(edges.iter().map(|&e| Site::at_edges(&[e])));
                for (i, &e1) in edges.iter().enumerate() {
                    for &e2 in &edges[i + 1..] {
                        cands.push(Site::at_edges(&[e1, e2]));
                    }
                }
            }
            (BirthOn, Forward) => {
                for &g in &gaps {
                    cands.push(Site::at_gap(g));
                }
            }
        }
        cands.retain(|s| self.apply_move(label, s).is_ok());
        cands
    }
}

// ----- isomorphism -----------------------------------------------------

/// Maximum diagram size (vertices) accepted by the isomorphism test.
pub const ISO_SIZE_LIMIT: usize = 16;

struct IsoSearch<'a> {
    a: &'a SymmetricDiagram,
    b: &'a SymmetricDiagram,
    vmap: BTreeMap<u32, u32>,
    gauge: BTreeMap<u32, u8>,
    b_edges: BTreeSet<(End, End)>,
    b_used: BTreeSet<u32>,
}

impl<'a> IsoSearch<'a> {
    fn map_end(&self, e: End) -> Option<End> {
        let w = *self.vmap.get(&e.v)?;
        let g = *self.gauge.get(&e.v).unwrap_or(&0);
        let ports = self.a.vertex(e.v).unwrap().kind.ports();
        Some(End::new(w, (e.port + g) % ports.max(1)))
    }

    /// Check every edge of `a` whose endpoints are both assigned.
    fn edges_consistent(&self) -> bool {
        for e in self.a.edges() {
            let (Some(x), Some(y)) = (self.map_end(e.a), self.map_end(e.b)) else {
                continue;
            };
            let key = if x <= y { (x, y) } else { (y, x) };
            if !self.b_edges.contains(&key) {
                return false;
            }
        }
        true
    }

    fn assign_pairs(&mut self, reps_a: &[u32], reps_b: &[u32]) -> bool {
        let Some((&ra, rest)) = reps_a.split_first() else {
            return self.edges_consistent();
        };
        let ma = self.a.mirror_vertex(ra);
        for &rb in reps_b {
            if self.b_used.contains(&rb) {
                continue;
            }
            let mb = self.b.mirror_vertex(rb);
            for flip in [false, true] {
                let (tb, tmb) = if flip { (mb, rb) } else { (rb, mb) };
                if self.a.vertex(ra).unwrap().over != self.b.vertex(tb).unwrap().over {
                    continue;
                }
                for g in [0u8, 2] {
                    self.vmap.insert(ra, tb);
                    self.vmap.insert(ma, tmb);
                    self.gauge.insert(ra, g);
                    self.gauge.insert(ma, g);
                    self.b_used.insert(rb);
                    if self.edges_consistent() && self.assign_pairs(rest, reps_b) {
                        return true;
                    }
                    self.vmap.remove(&ra);
                    self.vmap.remove(&ma);
                    self.gauge.remove(&ra);
                    self.gauge.remove(&ma);
                    self.b_used.remove(&rb);
                }
            }
        }
        false
    }

    fn assign_on_axis_gauges(&mut self, crossings: &[u32], reps_a: &[u32], reps_b: &[u32]) -> bool {
        let Some((&c, rest)) = crossings.split_first() else {
            return self.assign_pairs(reps_a, reps_b);
        };
        for g in [0u8, 2] {
            self.gauge.insert(c, g);
            if self.edges_consistent() && self.assign_on_axis_gauges(rest, reps_a, reps_b) {
                return true;
            }
            self.gauge.remove(&c);
        }
        false
    }
}

impl SymmetricDiagram {
    /// Decide combinatorial isomorphism with another diagram.
    ///
    /// Two diagrams are isomorphic when a kind-, mirror-, and over-
    /// preserving bijection of vertices carries edges to edges and the
    /// cyclic axis orders (with infinity) to each other.  Each crossing
    /// may be rotated by half a turn (ports `p ↦ p+2`), which preserves
    /// its strands and over-data.  Diagrams larger than
    /// [`ISO_SIZE_LIMIT`] vertices are rejected with
    /// [`DiagramError::SizeLimit`].
    pub fn isomorphic(&self, other: &SymmetricDiagram) -> Result<bool, DiagramError> {
        if self.vertex_count() > ISO_SIZE_LIMIT || other.vertex_count() > ISO_SIZE_LIMIT {
            return Err(DiagramError::SizeLimit);
        }
        if self.vertex_count() != other.vertex_count()
            || self.edges.len() != other.edges.len()
            || self.off_axis_circle_pairs != other.off_axis_circle_pairs
            || self.axis_order.len() != other.axis_order.len()
        {
            return Ok(false);
        }
        // Align the cyclic axis orders at the infinity marker; the on-axis
        // part of the bijection is then forced.
        let seq = |d: &SymmetricDiagram| -> Vec<u32> {
            let n = d.axis_order.len();
            let i = d.infinity_pos();
            (1..n)
                .map(|k| match d.axis_order[(i + k) % n] {
                    AxisEntry::V(v) => v,
                    AxisEntry::Infinity => unreachable!("single infinity marker"),
                })
                .collect()
        };
        let (sa, sb) = (seq(self), seq(other));
        let mut vmap = BTreeMap::new();
        let mut on_crossings = Vec::new();
        for (&x, &y) in sa.iter().zip(&sb) {
            let (vx, vy) = (self.vertex(x).unwrap(), other.vertex(y).unwrap());
            if vx.kind != vy.kind || vx.over != vy.over {
                return Ok(false);
            }
            vmap.insert(x, y);
            if vx.kind == VertexKind::OnAxisCrossing {
                on_crossings.push(x);
            }
        }
        let reps_a: Vec<u32> = self
            .vertices
            .values()
            .filter(|v| v.kind == VertexKind::OffAxisCrossing && v.id < v.mirror)
            .map(|v| v.id)
            .collect();
        let reps_b: Vec<u32> = other
            .vertices
            .values()
            .filter(|v| v.kind == VertexKind::OffAxisCrossing && v.id < v.mirror)
            .map(|v| v.id)
            .collect();
        if reps_a.len() != reps_b.len() {
            return Ok(false);
        }
        let b_edges = other
            .edges()
            .map(|e| if e.a <= e.b { (e.a, e.b) } else { (e.b, e.a) })
            .collect();
        let mut search = IsoSearch {
            a: self,
            b: other,
            vmap,
            gauge: BTreeMap::new(),
            b_edges,
            b_used: BTreeSet::new(),
        };
        Ok(search.assign_on_axis_gauges(&on_crossings, &reps_a, &reps_b))
    }
}

// ----- text format ------------------------------------------------------

impl SymmetricDiagram {
    /// Serialise to the diagram text format.
    ///
    /// ```text
    /// diagram <name>
    /// circles <n>                       # only when nonzero
    /// v<id> type=<kind> mirror=v<id> [over=<tag>]
    /// e<id> v<a>.<p>-v<b>.<q>
    /// axisorder <entries, `inf` for infinity>
    /// ```
    pub fn emit(&self) -> String {
        let mut out = format!("diagram {}\n", self.name);
        if self.off_axis_circle_pairs > 0 {
            out.push_str(&format!("circles {}\n", self.off_axis_circle_pairs));
        }
        for v in self.vertices.values() {
            out.push_str(&format!(
                "v{} type={} mirror=v{}",
                v.id,
                v.kind.token(),
                v.mirror
            ));
            if let Some(o) = v.over {
                out.push_str(&format!(" over={o}"));
            }
            out.push('\n');
        }
        for e in self.edges.values() {
            out.push_str(&format!(
                "e{} v{}.{}-v{}.{}\n",
                e.id, e.a.v, e.a.port, e.b.v, e.b.port
            ));
        }
        let entries: Vec<String> = self
            .axis_order
            .iter()
            .map(|e| match e {
                AxisEntry::V(v) => format!("v{v}"),
                AxisEntry::Infinity => "inf".to_string(),
            })
            .collect();
        out.push_str(&format!("axisorder {}\n", entries.join(" ")));
        out
    }

    /// Parse the diagram text format (see [`SymmetricDiagram::emit`]).
    /// Blank lines and `#` comments are skipped; if the axis order omits
    /// the infinity marker it is appended at the end.
    pub fn parse(text: &str) -> Result<SymmetricDiagram, DiagramError> {
        let perr = |m: String| DiagramError::Parse(m);
        let mut d = SymmetricDiagram::default();
        let mut have_header = false;
        let mut have_axis = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ctx = |m: &str| perr(format!("line {}: {m}: {raw:?}", ln + 1));
            if let Some(rest) = line.strip_prefix("diagram ") {
                if have_header {
                    return Err(ctx("duplicate diagram header"));
                }
                have_header = true;
                d.name = rest.trim().to_string();
            } else if let Some(rest) = line.strip_prefix("circles ") {
                d.off_axis_circle_pairs =
                    rest.trim().parse().map_err(|_| ctx("bad circle count"))?;
            } else if let Some(rest) = line.strip_prefix("axisorder") {
                have_axis = true;
                for tok in rest.split_whitespace() {
                    if tok == "inf" {
                        d.axis_order.push(AxisEntry::Infinity);
                    } else {
                        let id = tok
                            .strip_prefix('v')
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| ctx("bad axis entry"))?;
                        d.axis_order.push(AxisEntry::V(id));
                    }
                }
            } else if line.starts_with('v') {
                let mut toks = line.split_whitespace();
                let id: u32 = toks
                    .next()
                    .and_then(|t| t.strip_prefix('v'))
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| ctx("bad vertex id"))?;
                let mut kind = None;
                let mut mirror = None;
                let mut over = None;
                for t in toks {
                    if let Some(k) = t.strip_prefix("type=") {
                        kind = VertexKind::from_token(k);
                        if kind.is_none() {
                            return Err(ctx("unknown vertex type"));
                        }
                    } else if let Some(m) = t.strip_prefix("mirror=v") {
                        mirror = m.parse().ok();
                    } else if let Some(o) = t.strip_prefix("over=") {
                        over = Some(o.parse().map_err(|_| ctx("bad over tag"))?);
                    } else {
                        return Err(ctx("unknown vertex attribute"));
                    }
                }
                let kind = kind.ok_or_else(|| ctx("vertex needs type="))?;
                let mirror = mirror.ok_or_else(|| ctx("vertex needs mirror="))?;
                if d.vertices.insert(id, Vertex { id, kind, mirror, over }).is_some() {
                    return Err(ctx("duplicate vertex id"));
                }
                d.next_vertex = d.next_vertex.max(id + 1);
            } else if line.starts_with('e') {
                let (idtok, rest) = line
                    .split_once(' ')
                    .ok_or_else(|| ctx("edge needs endpoints"))?;
                let id: u32 = idtok
                    .strip_prefix('e')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| ctx("bad edge id"))?;
                let (sa, sb) = rest
                    .trim()
                    .split_once('-')
                    .ok_or_else(|| ctx("edge endpoints need a dash"))?;
                let parse_end = |s: &str| -> Option<End> {
                    let (v, p) = s.trim().strip_prefix('v')?.split_once('.')?;
                    Some(End::new(v.parse().ok()?, p.parse().ok()?))
                };
                let a = parse_end(sa).ok_or_else(|| ctx("bad edge endpoint"))?;
                let b = parse_end(sb).ok_or_else(|| ctx("bad edge endpoint"))?;
                if d.edges.insert(id, Edge { id, a, b }).is_some() {
                    return Err(ctx("duplicate edge id"));
                }
                d.next_edge = d.next_edge.max(id + 1);
            } else {
                return Err(ctx("unrecognised directive"));
            }
        }
        if !have_header {
            return Err(perr("missing `diagram <name>` header".to_string()));
        }
        if !have_axis || !d.axis_order.iter().any(|e| matches!(e, AxisEntry::Infinity)) {
            d.axis_order.push(AxisEntry::Infinity);
        }
        Ok(d)
    }
}

// ----- rendering --------------------------------------------------------

impl SymmetricDiagram {
    fn layout(&self) -> BTreeMap<u32, (f64, f64)> {
        let mut pos = BTreeMap::new();
        // On-axis vertices: spread along the vertical axis in order
        // (bottom of the list at the bottom of the picture).
        let axis: Vec<u32> = self
            .axis_order
            .iter()
            .filter_map(|e| match e {
                AxisEntry::V(v) => Some(*v),
                AxisEntry::Infinity => None,
            })
            .collect();
        let n = axis.len().max(1) as f64;
        for (i, v) in axis.iter().enumerate() {
            let y = 720.0 - 640.0 * (i as f64 + 1.0) / (n + 1.0);
            pos.insert(*v, (400.0, y));
        }
        // Off-axis pairs: columns at x = 400±150, stacked.
        let reps: Vec<u32> = self
            .vertices
            .values()
            .filter(|v| v.kind == VertexKind::OffAxisCrossing && v.id < v.mirror)
            .map(|v| v.id)
            .collect();
        let m = reps.len().max(1) as f64;
        for (i, r) in reps.iter().enumerate() {
            let y = 720.0 - 640.0 * (i as f64 + 1.0) / (m + 1.0);
            pos.insert(*r, (550.0, y));
            pos.insert(self.mirror_vertex(*r), (250.0, y));
        }
        pos
    }

    fn port_point(&self, pos: &BTreeMap<u32, (f64, f64)>, e: End) -> (f64, f64) {
        let (x, y) = pos[&e.v];
        let r = 14.0;
        match self.vertices[&e.v].kind.ports() {
            4 => match e.port {
                0 => (x + r, y - r),
                1 => (x - r, y - r),
                2 => (x - r, y + r),
                _ => (x + r, y + r),
            },
            _ => match e.port {
                0 => (x - r, y),
                _ => (x + r, y),
            },
        }
    }

    /// Render the diagram as a self-contained 800×800 SVG document: the
    /// symmetry axis is the vertical centre line, on-axis vertices follow
    /// the axis order bottom-to-top, and crossings are labelled with their
    /// over tag.
    pub fn to_svg(&self) -> String {
        let pos = self.layout();
        let mut s = String::from(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" \
             viewBox=\"0 0 800 800\">\n\
             <rect width=\"800\" height=\"800\" fill=\"white\"/>\n\
             <line x1=\"400\" y1=\"20\" x2=\"400\" y2=\"780\" stroke=\"#888\" \
             stroke-dasharray=\"6 4\"/>\n\
             <text x=\"406\" y=\"34\" font-size=\"14\" fill=\"#888\">inf</text>\n",
        );
        for e in self.edges.values() {
            let (x1, y1) = self.port_point(&pos, e.a);
            let (x2, y2) = self.port_point(&pos, e.b);
            // Bow the edge slightly so parallel edges stay distinguishable.
            let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            let (dx, dy) = (x2 - x1, y2 - y1);
            let len = (dx * dx + dy * dy).sqrt().max(1.0);
            let bend = 12.0 + (e.id % 3) as f64 * 8.0;
            let (cx, cy) = (mx - dy / len * bend, my + dx / len * bend);
            s.push_str(&format!(
                "<path d=\"M {x1:.1} {y1:.1} Q {cx:.1} {cy:.1} {x2:.1} {y2:.1}\" \
                 fill=\"none\" stroke=\"black\"/>\n"
            ));
        }
        for v in self.vertices.values() {
            let (x, y) = pos[&v.id];
            let (fill, rr) = match v.kind {
                VertexKind::OffAxisCrossing => ("#d33", 6.0),
                VertexKind::OnAxisCrossing => ("#33d", 6.0),
                VertexKind::FixedPoint => ("#383", 5.0),
                VertexKind::AxisPassthrough => ("#aaa", 4.0),
            };
            s.push_str(&format!(
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"{rr}\" fill=\"{fill}\"/>\n"
            ));
            let tag = match v.over {
                Some(o) => format!("v{} o{o}", v.id),
                None => format!("v{}", v.id),
            };
            s.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{tag}</text>\n",
                x + 8.0,
                y - 8.0
            ));
        }
        if self.off_axis_circle_pairs > 0 {
            s.push_str(&format!(
                "<text x=\"20\" y=\"770\" font-size=\"14\">free circle pairs: {}</text>\n",
                self.off_axis_circle_pairs
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}

// ----- pattern catalog ---------------------------------------------------

/// A small diagram fragment used to describe one side of a move pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tangle {
    /// Vertices inside the fragment (kind and over tag).
    pub vertices: Vec<(VertexKind, Option<u8>)>,
    /// Number of strand ends on the fragment boundary.
    pub boundary_strands: u8,
    /// Human-readable description of the fragment.
    pub description: String,
}

impl Tangle {
    fn new(vertices: &[(VertexKind, Option<u8>)], boundary: u8, description: &str) -> Self {
        Tangle {
            vertices: vertices.to_vec(),
            boundary_strands: boundary,
            description: description.to_string(),
        }
    }
}

/// One move family's local before/after pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovePattern {
    /// Which move, in the forward direction.
    pub label: MoveLabel,
    /// The fragment replaced by the move.
    pub before: Tangle,
    /// The fragment the move installs.
    pub after: Tangle,
}

/// Before/after patterns for the forward direction of every move family.
/// The patterns are descriptive; site matching is procedural and lives in
/// [`SymmetricDiagram::find_matches`].
pub fn pattern_catalog() -> Vec<MovePattern> {
    use VertexKind::*;
    let off = |o| (OffAxisCrossing, Some(o));
    let on = |o| (OnAxisCrossing, Some(o));
    let fixed = (FixedPoint, None);
    let fwd = |f| MoveLabel::new(f, Direction::Forward);
    vec![
        MovePattern {
            label: fwd(MoveFamily::IR1),
            before: Tangle::new(&[], 2, "plain strand and its mirror image"),
            after: Tangle::new(&[off(0), off(0)], 2, "mirror pair of kinks"),
        },
        MovePattern {
            label: fwd(MoveFamily::IR2),
            before: Tangle::new(&[], 4, "two parallel strands and mirrors"),
            after: Tangle::new(
                &[off(0), off(0), off(0), off(0)],
                4,
                "two mirror pairs of crossings bounding bigons",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::IR3),
            before: Tangle::new(
                &[off(0), off(0), off(1), off(0), off(0), off(1)],
                6,
                "triangle with a full over-strand and a full under-strand, plus mirror",
            ),
            after: Tangle::new(
                &[off(0), off(0), off(1), off(0), off(0), off(1)],
                6,
                "the strand slid to the other side of the triangle, plus mirror",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::R1),
            before: Tangle::new(&[fixed], 2, "invariant strand through a fixed point"),
            after: Tangle::new(
                &[fixed, on(0)],
                2,
                "symmetric curl: axis crossing adjacent to the fixed point",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::R2),
            before: Tangle::new(&[], 2, "strand and mirror strand flanking the axis"),
            after: Tangle::new(
                &[on(1), on(0)],
                2,
                "finger pushed across the axis: two adjacent axis crossings",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::M1),
            before: Tangle::new(
                &[on(0), fixed],
                6,
                "axis crossing directly below an adjacent fixed point",
            ),
            after: Tangle::new(&[fixed, on(0)], 6, "the two exchanged along the axis"),
        },
        MovePattern {
            label: fwd(MoveFamily::M2),
            before: Tangle::new(&[on(0)], 4, "axis crossing of pairing type A"),
            after: Tangle::new(
                &[on(3), off(0), off(0)],
                4,
                "pairing type flipped; a mirror pair of crossings budded off",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::M3),
            before: Tangle::new(&[on(0), on(1)], 8, "two adjacent axis crossings"),
            after: Tangle::new(&[on(1), on(0)], 8, "the two exchanged along the axis"),
        },
        MovePattern {
            label: fwd(MoveFamily::IMove),
            before: Tangle::new(&[fixed], 2, "fixed point adjacent to infinity"),
            after: Tangle::new(
                &[fixed],
                2,
                "fixed point moved through infinity; left and right swapped",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::SMove),
            before: Tangle::new(&[on(0)], 4, "axis crossing adjacent to infinity"),
            after: Tangle::new(
                &[on(0)],
                4,
                "crossing moved through infinity; chart rotated half a turn",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::BirthOff),
            before: Tangle::new(&[], 0, "empty"),
            after: Tangle::new(&[], 0, "a counted mirror pair of circles"),
        },
        MovePattern {
            label: fwd(MoveFamily::SaddleOff),
            before: Tangle::new(&[], 4, "two strands on one side, plus mirrors"),
            after: Tangle::new(&[], 4, "strand ends resmoothed, plus mirrors"),
        },
        MovePattern {
            label: fwd(MoveFamily::DeathOff),
            before: Tangle::new(&[], 0, "a counted mirror pair of circles"),
            after: Tangle::new(&[], 0, "empty"),
        },
        MovePattern {
            label: fwd(MoveFamily::BirthOn),
            before: Tangle::new(&[], 0, "empty stretch of axis"),
            after: Tangle::new(
                &[fixed, fixed],
                0,
                "minimal invariant circle through two fixed points",
            ),
        },
        MovePattern {
            label: fwd(MoveFamily::SaddleOn),
            before: Tangle::new(
                &[fixed, fixed],
                4,
                "two adjacent fixed points on invariant strands",
            ),
            after: Tangle::new(&[], 4, "strands resmoothed across the axis"),
        },
        MovePattern {
            label: fwd(MoveFamily::DeathOn),
            before: Tangle::new(
                &[fixed, fixed],
                0,
                "minimal invariant circle through two fixed points",
            ),
            after: Tangle::new(&[], 0, "empty stretch of axis"),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fwd(f: MoveFamily) -> MoveLabel {
        MoveLabel::new(f, Direction::Forward)
    }
    fn rev(f: MoveFamily) -> MoveLabel {
        MoveLabel::new(f, Direction::Reverse)
    }
    fn vfwd(f: MoveFamily, v: &str) -> MoveLabel {
        MoveLabel::with_variant(f, v, Direction::Forward)
    }
    fn vrev(f: MoveFamily, v: &str) -> MoveLabel {
        MoveLabel::with_variant(f, v, Direction::Reverse)
    }

    /// Invariant circle through two fixed points: v0 at the bottom, v1 at
    /// the top, left arc on ports 0, right arc on ports 1.
    fn circle() -> SymmetricDiagram {
        let mut d = SymmetricDiagram::new("circle");
        let u = d.push_on_axis(VertexKind::FixedPoint, None);
        let v = d.push_on_axis(VertexKind::FixedPoint, None);
        d.add_edge(End::new(u, 0), End::new(v, 0));
        d.add_edge(End::new(u, 1), End::new(v, 1));
        d
    }

    fn assert_valid(d: &SymmetricDiagram) {
        let v = d.validate();
        assert!(v.is_empty(), "violations: {v:?}");
    }

    #[test]
    fn circle_is_valid_and_counted() {
        let d = circle();
        assert_valid(&d);
        let s = d.invariant_summary();
        assert_eq!(s.components, 1);
        assert_eq!(s.fixed_points, 2);
        assert_eq!(s.axis_intersections, 2);
        assert_eq!(s.off_axis_crossing_pairs, 0);
    }

    #[test]
    fn counted_circle_pairs_enter_components() {
        let mut d = SymmetricDiagram::new("pairs");
        d.off_axis_circle_pairs = 2;
        assert_valid(&d);
        assert_eq!(d.invariant_summary().components, 4);
    }

    #[test]
    fn validate_rejects_mirror_breakage() {
        let mut d = circle();
        let u = 0;
        // Replace the left arc by a self-loop-ish asymmetric edge set.
        let e = d.edge_at(End::new(u, 0)).unwrap();
        let edge = d.edges[&e].clone();
        d.remove_edge(e);
        d.add_edge(edge.b, edge.a); // same edge back: still fine
        assert_valid(&d);
        let k = d.push_on_axis(VertexKind::FixedPoint, None);
        // Dangling ports and odd axis structure must be reported.
        assert!(!d.validate().is_empty());
        d.axis_remove(k);
        d.vertices.remove(&k);
        assert_valid(&d);
    }

    #[test]
    fn text_format_round_trips() {
        let mut d = circle();
        d.off_axis_circle_pairs = 1;
        let text = d.emit();
        let d2 = SymmetricDiagram::parse(&text).expect("parse back");
        assert_eq!(text, d2.emit());
        assert!(d.isomorphic(&d2).unwrap());
        assert!(SymmetricDiagram::parse("nonsense here").is_err());
        assert!(SymmetricDiagram::parse("diagram x\nv0 type=wat mirror=v0").is_err());
    }

    #[test]
    fn parse_appends_missing_infinity_marker() {
        let d = SymmetricDiagram::parse("diagram x\naxisorder\n").unwrap();
        assert_eq!(d.axis_order, vec![AxisEntry::Infinity]);
    }

    #[test]
    fn birth_and_death_on_axis_are_inverse() {
        let empty = SymmetricDiagram::new("empty");
        let d = empty
            .apply_move(&fwd(MoveFamily::BirthOn), &Site::at_gap(0))
            .unwrap();
        assert!(d.isomorphic(&circle()).unwrap());
        let back = d
            .apply_move(&fwd(MoveFamily::DeathOn), &Site::at_vertices(&[0, 1]))
            .unwrap();
        assert!(back.isomorphic(&empty).unwrap());
    }

    #[test]
    fn off_axis_morse_moves_track_the_counter() {
        let empty = SymmetricDiagram::new("empty");
        let one = empty
            .apply_move(&fwd(MoveFamily::BirthOff), &Site::ambient())
            .unwrap();
        assert_eq!(one.off_axis_circle_pairs, 1);
        assert!(empty
            .apply_move(&fwd(MoveFamily::DeathOff), &Site::ambient())
            .is_err());
        let two = one
            .apply_move(&fwd(MoveFamily::BirthOff), &Site::ambient())
            .unwrap();
        let merged = two
            .apply_move(&vfwd(MoveFamily::SaddleOff, "circles"), &Site::ambient())
            .unwrap();
        assert_eq!(merged.off_axis_circle_pairs, 1);
        let gone = merged
            .apply_move(&fwd(MoveFamily::DeathOff), &Site::ambient())
            .unwrap();
        assert!(gone.isomorphic(&empty).unwrap());
    }

    #[test]
    fn curl_at_fixed_point_round_trips() {
        let d = circle();
        for variant in ["above+", "above-", "below+", "below-"] {
            let sites = d.find_matches(&vfwd(MoveFamily::R1, variant));
            assert_eq!(sites.len(), 2, "one site per fixed point");
            for site in sites {
                let cur = d.apply_move(&vfwd(MoveFamily::R1, variant), &site).unwrap();
                let s = cur.invariant_summary();
                assert_eq!(s.on_axis_crossings, 1);
                assert_eq!(s.axis_intersections, 4);
                let f = site.vertices[0];
                let k = 2; // freshly allocated crossing
                let back = cur
                    .apply_move(&rev(MoveFamily::R1), &Site::at_vertices(&[f, k]))
                    .unwrap();
                assert!(back.isomorphic(&d).unwrap(), "variant {variant}");
            }
        }
    }

    #[test]
    fn finger_move_round_trips() {
        let d = circle();
        // Push the right arc across the axis between the two fixed points.
        let e = d.edge_at(End::new(0, 1)).unwrap();
        let site = Site {
            edges: vec![e],
            gap: Some(1),
            ..Site::default()
        };
        let cur = d.apply_move(&vfwd(MoveFamily::R2, "+"), &site).unwrap();
        let s = cur.invariant_summary();
        assert_eq!(s.on_axis_crossings, 2);
        assert_eq!(s.axis_intersections, 6);
        let back = cur
            .apply_move(&rev(MoveFamily::R2), &Site::at_vertices(&[2, 3]))
            .unwrap();
        assert!(back.isomorphic(&d).unwrap());
    }

    #[test]
    fn finger_move_from_circle_pair_round_trips() {
        let mut start = SymmetricDiagram::new("one-pair");
        start.off_axis_circle_pairs = 1;
        let cfg = start
            .apply_move(
                &vfwd(MoveFamily::R2, "circle+"),
                &Site {
                    gap: Some(0),
                    circles: 1,
                    ..Site::default()
                },
            )
            .unwrap();
        assert_eq!(cfg.invariant_summary().on_axis_crossings, 2);
        assert_eq!(cfg.invariant_summary().components, 2);
        assert_eq!(cfg.off_axis_circle_pairs, 0);
        let back = cfg
            .apply_move(&rev(MoveFamily::R2), &Site::at_vertices(&[0, 1]))
            .unwrap();
        assert!(back.isomorphic(&start).unwrap());
    }

    #[test]
    fn kink_pair_round_trips() {
        let d = circle();
        let e = d.edge_at(End::new(0, 1)).unwrap();
        for variant in ["+", "-"] {
            let cur = d
                .apply_move(&vfwd(MoveFamily::IR1, variant), &Site::at_edges(&[e]))
                .unwrap();
            let s = cur.invariant_summary();
            assert_eq!(s.off_axis_crossing_pairs, 1);
            assert_eq!(s.axis_intersections, 2);
            let k = cur
                .vertices()
                .find(|v| v.kind == VertexKind::OffAxisCrossing)
                .unwrap()
                .id;
            let back = cur
                .apply_move(&rev(MoveFamily::IR1), &Site::at_vertices(&[k]))
                .unwrap();
            assert!(back.isomorphic(&d).unwrap(), "variant {variant}");
        }
    }

    #[test]
    fn bigon_from_circle_pair_round_trips() {
        let mut d = circle();
        d.off_axis_circle_pairs = 1;
        let e = d.edge_at(End::new(0, 1)).unwrap();
        let cur = d
            .apply_move(
                &vfwd(MoveFamily::IR2, "circle+"),
                &Site {
                    edges: vec![e],
                    circles: 1,
                    ..Site::default()
                },
            )
            .unwrap();
        assert_eq!(cur.invariant_summary().off_axis_crossing_pairs, 2);
        assert_eq!(cur.off_axis_circle_pairs, 0);
        assert_eq!(cur.invariant_summary().components, 3);
        let cs: Vec<u32> = cur
            .vertices()
            .filter(|v| v.kind == VertexKind::OffAxisCrossing)
            .map(|v| v.id)
            .collect();
        let sites = cur.find_matches(&rev(MoveFamily::IR2));
        assert!(!sites.is_empty(), "crossings {cs:?} should admit a bigon removal");
        let back = cur.apply_move(&rev(MoveFamily::IR2), &sites[0]).unwrap();
        assert!(back.isomorphic(&d).unwrap());
    }

    #[test]
    fn pair_budding_toggles_pairing_type() {
        let d = circle();
        let sites = d.find_matches(&vfwd(MoveFamily::R1, "below+"));
        let cur = d.apply_move(&vfwd(MoveFamily::R1, "below+"), &sites[0]).unwrap();
        let k = 2;
        assert!(!cur.vertex(k).unwrap().pairing_b());
        let bud = cur
            .apply_move(&vfwd(MoveFamily::M2, "+"), &Site::at_vertices(&[k]))
            .unwrap();
        assert!(bud.vertex(k).unwrap().pairing_b(), "budding flips the pairing type");
        let s = bud.invariant_summary();
        assert_eq!(s.off_axis_crossing_pairs, 1);
        assert_eq!(s.on_axis_crossings, 1);
        let q = bud
            .vertices()
            .find(|v| v.kind == VertexKind::OffAxisCrossing)
            .unwrap()
            .id;
        let back = bud
            .apply_move(&rev(MoveFamily::M2), &Site::at_vertices(&[k, q]))
            .unwrap();
        assert!(!back.vertex(k).unwrap().pairing_b());
        assert!(back.isomorphic(&cur).unwrap());
    }

    #[test]
    fn saddle_on_axis_splits_and_merges() {
        let d = circle();
        let split = d
            .apply_move(&fwd(MoveFamily::SaddleOn), &Site::at_vertices(&[0, 1]))
            .unwrap();
        assert_eq!(split.off_axis_circle_pairs, 1);
        assert_eq!(split.vertex_count(), 0);
        let back = split
            .apply_move(
                &vrev(MoveFamily::SaddleOn, "circle"),
                &Site {
                    gap: Some(0),
                    circles: 1,
                    ..Site::default()
                },
            )
            .unwrap();
        assert!(back.isomorphic(&d).unwrap());
    }

    #[test]
    fn saddle_through_infinity_uses_crossed_wiring() {
        let mut d = SymmetricDiagram::new("pair");
        d.off_axis_circle_pairs = 1;
        let inv = d
            .apply_move(&vrev(MoveFamily::SaddleOn, "circle-inf"), &Site::ambient())
            .unwrap();
        assert_eq!(inv.invariant_summary().components, 1);
        assert_eq!(inv.invariant_summary().fixed_points, 2);
        // The circle runs through infinity: the direct edges are crossed.
        let e = inv.edge_at(End::new(0, 0)).unwrap();
        assert_eq!(inv.edges[&e].other(End::new(0, 0)).port, 1);
        // Saddling it back through infinity recovers the counted pair.
        let back = inv
            .apply_move(&fwd(MoveFamily::SaddleOn), &Site::at_vertices(&[0, 1]))
            .unwrap();
        assert!(back.isomorphic(&d).unwrap());
    }

    #[test]
    fn curl_travels_through_infinity_and_cancels() {
        // Curl at the top fixed point, carry the crossing and the fixed
        // point through infinity, cancel the curl, and come home.
        let d = circle();
        let lab_r1 = vfwd(MoveFamily::R1, "above+");
        let s1 = d.apply_move(&lab_r1, &Site::at_vertices(&[1])).unwrap();
        let s2 = s1
            .apply_move(&fwd(MoveFamily::SMove), &Site::at_vertices(&[2]))
            .unwrap();
        let s3 = s2
            .apply_move(&fwd(MoveFamily::IMove), &Site::at_vertices(&[1]))
            .unwrap();
        let s4 = s3
            .apply_move(&rev(MoveFamily::R1), &Site::at_vertices(&[1, 2]))
            .unwrap();
        let s5 = s4
            .apply_move(&fwd(MoveFamily::IMove), &Site::at_vertices(&[1]))
            .unwrap();
        assert!(s5.isomorphic(&d).unwrap());
        assert!(!s4.isomorphic(&d).unwrap(), "one step early the wiring is crossed");
    }

    #[test]
    fn axis_transpositions_exchange_neighbours() {
        // Finger move, slide both crossings below the bottom fixed point,
        // cancel the finger elsewhere.
        let d = circle();
        let e = d.edge_at(End::new(0, 1)).unwrap();
        let s1 = d
            .apply_move(
                &vfwd(MoveFamily::R2, "+"),
                &Site {
                    edges: vec![e],
                    gap: Some(1),
                    ..Site::default()
                },
            )
            .unwrap();
        // Axis order: v0 c2 c3 v1.
        let s2 = s1
            .apply_move(&fwd(MoveFamily::M1), &Site::at_vertices(&[2, 0]))
            .unwrap();
        let s3 = s2
            .apply_move(&fwd(MoveFamily::M1), &Site::at_vertices(&[3, 0]))
            .unwrap();
        // Now c2 c3 v0 v1, with the crossing pair still adjacent.
        let s4 = s3
            .apply_move(&rev(MoveFamily::R2), &Site::at_vertices(&[2, 3]))
            .unwrap();
        assert!(s4.isomorphic(&d).unwrap());
        // Crossing-past-crossing exchanges need two crossings.
        assert!(s1
            .apply_move(&fwd(MoveFamily::M3), &Site::at_vertices(&[2, 0]))
            .is_err());
        let m3 = s1
            .apply_move(&fwd(MoveFamily::M3), &Site::at_vertices(&[2, 3]))
            .unwrap();
        assert_eq!(m3.axis_pos(3).unwrap() + 1, m3.axis_pos(2).unwrap());
    }

    #[test]
    fn triangle_slide_needs_noncyclic_over_pattern() {
        // Build a triangle: kink a circle, then push a strand across the
        // kink loop with a bigon — gives three mutually adjacent
        // crossings on each side.
        let d = circle();
        let e = d.edge_at(End::new(0, 1)).unwrap();
        let k1 = d
            .apply_move(&vfwd(MoveFamily::IR1, "+"), &Site::at_edges(&[e]))
            .unwrap();
        // Loop edge at the kink and another edge to bigon across it.
        let kink = k1
            .vertices()
            .find(|v| v.kind == VertexKind::OffAxisCrossing)
            .unwrap()
            .id;
        let loop_edge = k1
            .edges()
            .find(|e| e.a.v == kink && e.b.v == kink)
            .unwrap()
            .id;
        let lead_edge = k1.edge_at(End::new(kink, 0)).unwrap();
        let k2 = k1
            .apply_move(
                &vfwd(MoveFamily::IR2, "+"),
                &Site::at_edges(&[loop_edge, lead_edge]),
            )
            .unwrap();
        assert_valid(&k2);
        let tri = k2.find_matches(&fwd(MoveFamily::IR3));
        if let Some(site) = tri.first() {
            let flipped = k2.apply_move(&fwd(MoveFamily::IR3), site).unwrap();
            let back = flipped.apply_move(&rev(MoveFamily::IR3), site).unwrap();
            assert!(back.isomorphic(&k2).unwrap());
            assert!(!flipped.isomorphic(&k2).unwrap());
        }
    }

    #[test]
    fn saddle_off_axis_resmooths_and_reverses() {
        let d = circle();
        let e = d.edge_at(End::new(0, 1)).unwrap();
        let kinked = d
            .apply_move(&vfwd(MoveFamily::IR1, "+"), &Site::at_edges(&[e]))
            .unwrap();
        let kink = kinked
            .vertices()
            .find(|v| v.kind == VertexKind::OffAxisCrossing)
            .unwrap()
            .id;
        let e1 = kinked.edge_at(End::new(kink, 0)).unwrap();
        let e2 = kinked.edge_at(End::new(kink, 3)).unwrap();
        for variant in ["", "x"] {
            let lab = MoveLabel::with_variant(
                MoveFamily::SaddleOff,
                variant,
                Direction::Forward,
            );
            if let Ok(sad) = kinked.apply_move(&lab, &Site::at_edges(&[e1, e2])) {
                assert_valid(&sad);
                let back_sites = sad.find_matches(&lab.reversed());
                assert!(back_sites
                    .iter()
                    .any(|s| sad.apply_move(&lab.reversed(), s).is_ok()));
            }
        }
    }

    #[test]
    fn isomorphism_respects_over_data_and_size() {
        let d = circle();
        let e = d.edge_at(End::new(0, 1)).unwrap();
        let plus = d
            .apply_move(&vfwd(MoveFamily::IR1, "+"), &Site::at_edges(&[e]))
            .unwrap();
        let minus = d
            .apply_move(&vfwd(MoveFamily::IR1, "-"), &Site::at_edges(&[e]))
            .unwrap();
        assert!(!plus.isomorphic(&minus).unwrap());
        assert!(plus.isomorphic(&plus.clone()).unwrap());
        let mut big = SymmetricDiagram::new("big");
        for _ in 0..9 {
            big.add_off_axis_pair(0);
        }
        assert_eq!(big.isomorphic(&big.clone()), Err(DiagramError::SizeLimit));
    }

    #[test]
    fn found_sites_are_always_applicable() {
        let d = circle();
        for family in MoveFamily::ALL {
            for dir in [Direction::Forward, Direction::Reverse] {
                for variant in ["", "+", "above+", "circle", "circles"] {
                    let lab = MoveLabel::with_variant(family, variant, dir);
                    for site in d.find_matches(&lab) {
                        assert!(
                            d.apply_move(&lab, &site).is_ok(),
                            "{lab} at {site} must apply"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn site_text_round_trips() {
        let site = Site {
            vertices: vec![3, 1],
            edges: vec![7],
            gap: Some(2),
            circles: 1,
        };
        let text = site.to_string();
        assert_eq!(Site::parse(&text).unwrap(), site);
        assert_eq!(Site::parse("ambient").unwrap(), Site::ambient());
        assert!(Site::parse("bogus!").is_err());
    }

    #[test]
    fn svg_rendering_is_self_contained() {
        let d = circle();
        let svg = d.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
        assert!(svg.contains("line")); // the symmetry axis
    }

    #[test]
    fn pattern_catalog_covers_every_family() {
        let cat = pattern_catalog();
        assert_eq!(cat.len(), MoveFamily::ALL.len());
        for f in MoveFamily::ALL {
            assert!(cat.iter().any(|p| p.label.family == f));
        }
    }
}
