//! Two-parameter deformation catalog for the 18 codimension-2 strata and
//! the circle-traversal engine reading off loops of symmetric Reidemeister
//! moves.
//!
//! Each [`CatalogEntry`] carries a deformation `λ = (λ₁, λ₂)` of the
//! stratum's normal form together with the analytic equations of the
//! codimension-1 walls passing through the origin of the λ-plane.
//! Traversing the circle `|λ| = r` counterclockwise from angle `0` and
//! recording which wall is crossed at which angle yields a cyclic word of
//! planar move labels — the loop of local moves induced by the stratum.
//! Words are compared up to cyclic rotation and reversal, so the starting
//! angle and traversal orientation are immaterial.
//!
//! Two independent engines produce the word:
//!
//! * [`analytic_crossings`] intersects the stored wall equations with the
//!   circle symbolically (implicit walls via rational charts, parametrized
//!   walls via a distance polynomial);
//! * [`numeric_crossings`] samples the signed regularity margins of
//!   [`crate::strata::margins`] around the circle, bisects every sign
//!   change, and identifies the degenerating geometric feature at each
//!   root.
//!
//! Agreement of the two engines, and of the numeric word at radius `r` and
//! `r/2`, is the main correctness check; [`check_against_table`] compares
//! the numeric word against the expected word stored with each entry.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::germ::{Branch, BranchRole, GermError, Multigerm};
use crate::realalg::{
    self, branch_intersections, isolate_roots, BranchCurve, Interval, MultiplicityHint, Polynomial,
};
use crate::strata::{self, margin_kinds, margins, MarginKind};

/// Default sample count for the numeric engine when a caller does not
/// choose one.
pub const DEFAULT_SAMPLES: usize = 720;

/// Angular agreement required between the two engines.
pub const ANGLE_AGREEMENT: f64 = 1e-6;

/// Errors from circle traversal.
#[derive(Debug, Error)]
pub enum BifurcationError {
    /// A wall meets the traversal circle tangentially; the crossing count
    /// is not stable and a different radius must be chosen.
    #[error("wall tangent to the traversal circle near angle {angle}")]
    TangentialCrossing { angle: f64 },
    /// Two distinct degenerations could not be separated in angle.
    #[error("unresolved pair of crossings near angles {angle1} and {angle2}")]
    UnresolvedCrossing { angle1: f64, angle2: f64 },
    /// The words read at radius `r` and `r/2` disagree.
    #[error("crossing word unstable under radius halving ({full} vs {half} moves)")]
    UnstableRadius { full: usize, half: usize },
    /// A germ-level operation failed.
    #[error("germ error: {0}")]
    Germ(#[from] GermError),
    /// A numeric failure with a diagnostic message.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl From<realalg::RealAlgError> for BifurcationError {
    fn from(e: realalg::RealAlgError) -> Self {
        BifurcationError::Numeric(e.to_string())
    }
}

/// The eight local move labels read off when a wall is crossed.
///
/// `IR1`–`IR3` are the moves away from the axis (performed simultaneously
/// with their mirror copy), `R1`/`R2` happen across the fixed axis, and
/// `M1`–`M3` are the mixed moves involving the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlanarMoveLabel {
    /// Paired kink birth/death (off-axis cusp wall).
    IR1,
    /// Paired strand tangency (off-axis tangency wall).
    IR2,
    /// Paired triple-point move (off-axis triple wall).
    IR3,
    /// Symmetric kink on the axis (fixed-point cusp wall).
    R1,
    /// Symmetric tangency across the axis (line tangency wall).
    R2,
    /// Strand through a fixed-point image (fixed double wall).
    M1,
    /// Perpendicular axis crossing (perpendicular tangency wall).
    M2,
    /// On-axis double point between unrelated orbits.
    M3,
}

impl PlanarMoveLabel {
    /// All eight labels.
    pub const ALL: [PlanarMoveLabel; 8] = [
        PlanarMoveLabel::IR1,
        PlanarMoveLabel::IR2,
        PlanarMoveLabel::IR3,
        PlanarMoveLabel::R1,
        PlanarMoveLabel::R2,
        PlanarMoveLabel::M1,
        PlanarMoveLabel::M2,
        PlanarMoveLabel::M3,
    ];

    /// The codimension-1 stratum whose wall emits this move.
    pub fn stratum(self) -> strata::StratumLabel {
        use strata::StratumLabel as S;
        match self {
            PlanarMoveLabel::IR1 => S::OffAxisCusp,
            PlanarMoveLabel::IR2 => S::OffAxisTangency,
            PlanarMoveLabel::IR3 => S::OffAxisTriple,
            PlanarMoveLabel::R1 => S::FixedCusp,
            PlanarMoveLabel::R2 => S::OnAxisLineTangency,
            PlanarMoveLabel::M1 => S::FixedDouble,
            PlanarMoveLabel::M2 => S::OnAxisPerpTangency,
            PlanarMoveLabel::M3 => S::OnAxisDouble,
        }
    }
}

impl fmt::Display for PlanarMoveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PlanarMoveLabel::IR1 => "IR1",
            PlanarMoveLabel::IR2 => "IR2",
            PlanarMoveLabel::IR3 => "IR3",
            PlanarMoveLabel::R1 => "R1",
            PlanarMoveLabel::R2 => "R2",
            PlanarMoveLabel::M1 => "M1",
            PlanarMoveLabel::M2 => "M2",
            PlanarMoveLabel::M3 => "M3",
        };
        f.write_str(s)
    }
}

impl FromStr for PlanarMoveLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "IR1" => Ok(PlanarMoveLabel::IR1),
            "IR2" => Ok(PlanarMoveLabel::IR2),
            "IR3" => Ok(PlanarMoveLabel::IR3),
            "R1" => Ok(PlanarMoveLabel::R1),
            "R2" => Ok(PlanarMoveLabel::R2),
            "M1" => Ok(PlanarMoveLabel::M1),
            "M2" => Ok(PlanarMoveLabel::M2),
            "M3" => Ok(PlanarMoveLabel::M3),
            other => Err(format!("unknown move label `{other}`")),
        }
    }
}

/// One analytic wall in the λ-plane.
#[derive(Debug, Clone)]
pub enum Locus {
    /// Zero set of `Σ c · λ₁^i λ₂^j`, restricted to the closed half-planes
    /// `a·λ₁ + b·λ₂ ≥ 0` listed in `conditions`.
    Implicit {
        move_label: PlanarMoveLabel,
        /// Terms `(i, j, c)` of the defining polynomial.
        terms: Vec<(usize, usize, f64)>,
        /// Half-plane restrictions `(a, b)` meaning `a·λ₁ + b·λ₂ ≥ 0`.
        conditions: Vec<(f64, f64)>,
    },
    /// The curve `s ↦ (l1(s), l2(s))` over an `s`-window; used for wall
    /// branches with no convenient polynomial implicitization.
    Parametrized {
        move_label: PlanarMoveLabel,
        l1: Polynomial,
        l2: Polynomial,
        window: Interval,
    },
}

impl Locus {
    /// The move emitted when this wall is crossed.
    pub fn move_label(&self) -> PlanarMoveLabel {
        match self {
            Locus::Implicit { move_label, .. } => *move_label,
            Locus::Parametrized { move_label, .. } => *move_label,
        }
    }
}

/// Whether the deformation enters or leaves the positive side of the wall
/// at a crossing (a bookkeeping convention; word comparison ignores it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Entering,
    Leaving,
}

/// One wall crossing on the traversal circle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Crossing {
    /// Angle in `[0, 2π)`.
    pub angle: f64,
    pub move_label: PlanarMoveLabel,
    pub direction: Direction,
}

/// The cyclic word of moves read along one counterclockwise traversal,
/// crossings sorted by strictly increasing angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopWord {
    pub crossings: Vec<Crossing>,
}

impl LoopWord {
    /// The label sequence, in traversal order.
    pub fn labels(&self) -> Vec<PlanarMoveLabel> {
        self.crossings.iter().map(|c| c.move_label).collect()
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.crossings.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.move_label)?;
        }
        write!(f, ")")
    }
}

/// One codimension-2 stratum with its two-parameter deformation.
#[derive(Clone)]
pub struct CatalogEntry {
    /// Index `1..=18` into the loop table.
    pub index: u8,
    /// Human-readable description of the degeneration.
    pub name: &'static str,
    /// Frozen auxiliary constants (slopes and offsets fixed at generic
    /// values; the loop word does not depend on them within their chamber).
    pub frozen: Vec<(&'static str, f64)>,
    /// The codimension-1 walls through the origin of the λ-plane.
    pub analytic_loci: Vec<Locus>,
    /// Default traversal radius (small enough that only the listed walls
    /// meet the circle).
    pub default_radius: f64,
    /// The expected cyclic word, up to rotation and reversal.
    pub table_word: Vec<PlanarMoveLabel>,
    deform: fn(f64, f64) -> Multigerm,
}

impl CatalogEntry {
    /// The stratum classified for the undeformed germ.
    pub fn label(&self) -> strata::StratumLabel {
        strata::StratumLabel::L(self.index)
    }

    /// The normal form at `λ = 0`.
    pub fn normal_form(&self) -> Multigerm {
        (self.deform)(0.0, 0.0)
    }

    /// The deformed multigerm at `λ = (l1, l2)`.
    pub fn deform(&self, l1: f64, l2: f64) -> Multigerm {
        (self.deform)(l1, l2)
    }

    /// The deformed multigerm at polar coordinates `(radius, theta)`.
    pub fn deform_at(&self, radius: f64, theta: f64) -> Multigerm {
        self.deform(radius * theta.cos(), radius * theta.sin())
    }
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("index", &self.index)
            .field("name", &self.name)
            .field("default_radius", &self.default_radius)
            .finish()
    }
}

// ---------------------------------------------------------------------------
// Catalog data
// ---------------------------------------------------------------------------

fn p(cs: &[f64]) -> Polynomial {
    Polynomial::new(cs.to_vec())
}

fn w05() -> Interval {
    Interval::symmetric(0.5)
}

fn d1(l1: f64, l2: f64) -> Multigerm {
    Multigerm::single(Branch::paired(
        p(&[1.0, l2, 0.0, l1, 0.0, 1.0]),
        p(&[0.0, 0.0, 1.0]),
        w05(),
    ))
}

fn d2(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[1.0, 1.0]), p(&[0.0]), w05()),
        Branch::paired(p(&[1.0, 1.0]), p(&[l2, l1, 0.0, 1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d3(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[1.0, -l2, 0.0, 1.0]), p(&[0.0, 0.0, 1.0]), w05()),
        Branch::paired(p(&[1.0, 1.0]), p(&[l1, 1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d4(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[1.0, 1.0]), p(&[0.0]), w05()),
        Branch::paired(p(&[1.0, 1.0]), p(&[l1, 0.0, 1.0]), w05()),
        Branch::paired(p(&[1.0, 1.0]), p(&[l2, 1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d5(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[1.0]), p(&[0.0, 1.0]), w05()),
        Branch::paired(p(&[1.0, 1.0]), p(&[0.0]), w05()),
        Branch::paired(p(&[1.0, 1.0]), p(&[l1, 1.0]), w05()),
        Branch::paired(p(&[1.0, 1.0]), p(&[l2, -1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d6(l1: f64, l2: f64) -> Multigerm {
    Multigerm::single(Branch::paired(
        p(&[l1, 0.0, 1.0]),
        p(&[l1, l2, 1.0, 1.0]),
        w05(),
    ))
}

fn d7(l1: f64, l2: f64) -> Multigerm {
    Multigerm::single(Branch::fixed(
        p(&[0.0, l2, 0.0, l1, 0.0, 1.0]),
        p(&[0.0, 0.0, 1.0]),
        w05(),
    ))
}

fn d8(l1: f64, l2: f64) -> Multigerm {
    Multigerm::single(Branch::fixed(
        p(&[0.0, l1, 0.0, 1.0]),
        p(&[0.0, 0.0, l2, 0.0, 1.0]),
        w05(),
    ))
}

fn d9(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[l1, 0.0, 1.0]), p(&[0.0, 1.0]), w05()),
        Branch::paired(p(&[0.0, 1.0]), p(&[-l2, 1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d10(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[0.0, 1.0]), p(&[0.0, l1, 0.0, 1.0]), w05()),
        Branch::paired(p(&[0.0, 1.0]), p(&[l2, 1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d11(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[0.0, 1.0]), p(&[l1, 2.5]), w05()),
        Branch::paired(p(&[0.0, 1.0]), p(&[0.0, 1.0]), w05()),
        Branch::paired(p(&[0.0, 1.0]), p(&[l2, 0.4]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d12(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::fixed(p(&[0.0, -l2, 0.0, 1.0]), p(&[0.0, 0.0, 1.0]), w05()),
        Branch::paired(p(&[0.0, 1.0]), p(&[l1, 1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d13(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::fixed(p(&[0.0, 1.0]), p(&[0.0]), w05()),
        Branch::paired(p(&[0.0, 1.0]), p(&[l2, 0.5]), w05()),
        Branch::paired(p(&[0.0, 1.0]), p(&[l1, 2.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d14(l1: f64, l2: f64) -> Multigerm {
    Multigerm::single(Branch::paired(
        p(&[l2, l1, 0.0, 1.0]),
        p(&[0.0, 1.0]),
        Interval::symmetric(0.7),
    ))
}

fn d15(l1: f64, l2: f64) -> Multigerm {
    Multigerm::single(Branch::paired(
        p(&[0.0, 1.0]),
        p(&[0.0, l2, 0.0, l1, 0.0, 1.0]),
        w05(),
    ))
}

fn d16(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[l1 / 2.0, 0.5]), p(&[-l1 / 2.0, 0.5]), w05()),
        Branch::paired(p(&[l2 / 2.0, 0.5, 0.5]), p(&[-l2 / 2.0, 0.5, -0.5]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d17(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[0.0, 1.0]), p(&[l2, l1, 0.0, 1.0]), w05()),
        Branch::fixed(p(&[0.0, 1.0]), p(&[0.0, 0.0, 1.0]), w05()),
    ])
    .expect("well-formed deformation")
}

fn d18(l1: f64, l2: f64) -> Multigerm {
    Multigerm::new(vec![
        Branch::paired(p(&[l1, 0.0, 1.0]), p(&[0.0, 1.0]), w05()),
        Branch::fixed(p(&[0.0, 1.0]), p(&[l2]), w05()),
    ])
    .expect("well-formed deformation")
}

fn implicit(
    move_label: PlanarMoveLabel,
    terms: &[(usize, usize, f64)],
    conditions: &[(f64, f64)],
) -> Locus {
    Locus::Implicit {
        move_label,
        terms: terms.to_vec(),
        conditions: conditions.to_vec(),
    }
}

fn parametrized(move_label: PlanarMoveLabel, l1: &[f64], l2: &[f64], half_width: f64) -> Locus {
    Locus::Parametrized {
        move_label,
        l1: p(l1),
        l2: p(l2),
        window: Interval::symmetric(half_width),
    }
}

/// The full 18-entry catalog.
pub fn catalog() -> Vec<CatalogEntry> {
    use PlanarMoveLabel::*;
    // Tangency curve of a line `y = x + λ₁` (up to translation) against the
    // deformed cuspidal branch `(t³ − λ₂t, t²)`: eliminating the contact
    // point leaves λ₁ = 2s³ − s², λ₂ = 3s² − 2s.
    let cusp_line_l1 = [0.0, 0.0, -1.0, 2.0];
    let cusp_line_l2 = [0.0, -2.0, 3.0];
    // Tangency curve of `(t, t³ + λ₁t + λ₂)` against the parabola
    // `(t, t²)`: λ₁ = 2s − 3s², λ₂ = −s² + 2s³.
    let flex_parab_l1 = [0.0, 2.0, -3.0];
    let flex_parab_l2 = [0.0, 0.0, -1.0, 2.0];

    vec![
        CatalogEntry {
            index: 1,
            name: "off-axis (2,5)-cusp",
            frozen: vec![],
            analytic_loci: vec![
                implicit(IR1, &[(0, 1, 1.0)], &[]),
                implicit(IR2, &[(2, 0, 1.0), (0, 1, -4.0)], &[(-1.0, 0.0)]),
            ],
            default_radius: 0.1,
            table_word: vec![IR1, IR2, IR1],
            deform: d1,
        },
        CatalogEntry {
            index: 2,
            name: "off-axis flex tangency",
            frozen: vec![],
            analytic_loci: vec![implicit(
                IR2,
                &[(3, 0, 4.0), (0, 2, 27.0)],
                &[(-1.0, 0.0)],
            )],
            default_radius: 0.1,
            table_word: vec![IR2, IR2],
            deform: d2,
        },
        CatalogEntry {
            index: 3,
            name: "off-axis cusp meeting a transversal strand",
            frozen: vec![],
            analytic_loci: vec![
                implicit(IR1, &[(0, 1, 1.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 1, -1.0)], &[(0.0, 1.0)]),
                parametrized(IR2, &cusp_line_l1, &cusp_line_l2, 0.35),
            ],
            default_radius: 0.1,
            table_word: vec![IR3, IR2, IR1, IR2, IR1],
            deform: d3,
        },
        CatalogEntry {
            index: 4,
            name: "off-axis tangency with a transversal strand",
            frozen: vec![],
            analytic_loci: vec![
                implicit(IR2, &[(1, 0, 1.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 2, 1.0)], &[]),
            ],
            default_radius: 0.1,
            table_word: vec![IR2, IR3, IR3, IR2],
            deform: d4,
        },
        CatalogEntry {
            index: 5,
            name: "off-axis quadruple point",
            frozen: vec![("slope3", 1.0), ("slope4", -1.0)],
            analytic_loci: vec![
                implicit(IR3, &[(1, 0, 1.0)], &[]),
                implicit(IR3, &[(0, 1, 1.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 1, -1.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 1, 1.0)], &[]),
            ],
            default_radius: 0.1,
            table_word: vec![IR3; 8],
            deform: d5,
        },
        CatalogEntry {
            index: 6,
            name: "oblique on-axis cusp",
            frozen: vec![],
            analytic_loci: vec![
                implicit(IR1, &[(0, 1, 1.0)], &[]),
                implicit(R2, &[(1, 0, 1.0)], &[]),
                implicit(M3, &[(1, 0, 1.0), (0, 1, -1.0)], &[(0.0, -1.0)]),
                implicit(
                    M2,
                    &[(2, 0, 9.0), (1, 1, -6.0), (0, 2, 1.0), (1, 0, 4.0)],
                    &[(-1.0, 0.0)],
                ),
            ],
            default_radius: 1e-3,
            table_word: vec![IR1, R2, M2, IR1, M3, M2, R2],
            deform: d6,
        },
        CatalogEntry {
            index: 7,
            name: "fixed-point (2,5)-cusp",
            frozen: vec![],
            analytic_loci: vec![
                implicit(R1, &[(0, 1, 1.0)], &[]),
                implicit(R2, &[(2, 0, 1.0), (0, 1, -4.0)], &[(-1.0, 0.0)]),
            ],
            default_radius: 0.1,
            table_word: vec![R1, R2, R1],
            deform: d7,
        },
        CatalogEntry {
            index: 8,
            name: "fixed-point (3,4)-cusp",
            frozen: vec![],
            analytic_loci: vec![
                implicit(R1, &[(1, 0, 1.0)], &[]),
                implicit(IR1, &[(1, 0, 2.0), (0, 1, -3.0)], &[(-1.0, 0.0)]),
                implicit(M1, &[(1, 0, 1.0), (0, 1, -1.0)], &[(0.0, -1.0)]),
                implicit(M2, &[(1, 0, 2.0), (0, 1, -1.0)], &[(-1.0, 0.0)]),
            ],
            default_radius: 1e-3,
            table_word: vec![R1, R1, IR1, M1, M2],
            deform: d8,
        },
        CatalogEntry {
            index: 9,
            name: "line tangency struck through by a strand",
            frozen: vec![],
            analytic_loci: vec![
                implicit(R2, &[(1, 0, 1.0)], &[]),
                implicit(M3, &[(1, 0, 1.0), (0, 2, 1.0)], &[]),
            ],
            default_radius: 0.1,
            table_word: vec![R2, M3, M3, R2],
            deform: d9,
        },
        CatalogEntry {
            index: 10,
            name: "perpendicular tangency struck through by a strand",
            frozen: vec![],
            analytic_loci: vec![
                implicit(M2, &[(1, 0, 1.0)], &[]),
                implicit(M3, &[(0, 1, 1.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 2, 1.0)], &[]),
            ],
            default_radius: 0.1,
            table_word: vec![M3, M2, IR3, M3, IR3, M2],
            deform: d10,
        },
        CatalogEntry {
            index: 11,
            name: "on-axis triple point",
            frozen: vec![("slope1", 2.5), ("slope2", 1.0), ("slope3", 0.4)],
            analytic_loci: vec![
                implicit(M3, &[(1, 0, 1.0)], &[]),
                implicit(M3, &[(0, 1, 1.0)], &[]),
                implicit(M3, &[(1, 0, 1.0), (0, 1, -1.0)], &[]),
                implicit(IR3, &[(1, 0, 0.4), (0, 1, 1.0)], &[]),
                implicit(IR3, &[(1, 0, 14.0 / 15.0), (0, 1, 1.0)], &[]),
                implicit(IR3, &[(1, 0, -0.4), (0, 1, 1.0)], &[]),
                implicit(IR3, &[(1, 0, -6.0 / 35.0), (0, 1, 1.0)], &[]),
            ],
            default_radius: 0.1,
            table_word: vec![
                IR3, IR3, M3, M3, IR3, IR3, M3, IR3, IR3, M3, M3, IR3, IR3, M3,
            ],
            deform: d11,
        },
        CatalogEntry {
            index: 12,
            name: "fixed-point cusp struck through by a strand",
            frozen: vec![],
            analytic_loci: vec![
                implicit(R1, &[(0, 1, 1.0)], &[]),
                implicit(M1, &[(1, 0, 1.0)], &[]),
                implicit(M3, &[(1, 0, 1.0), (0, 1, -1.0)], &[(0.0, 1.0)]),
                parametrized(IR2, &cusp_line_l1, &cusp_line_l2, 0.1),
            ],
            default_radius: 1e-3,
            table_word: vec![R1, M3, M1, IR2, R1, IR2, M1],
            deform: d12,
        },
        CatalogEntry {
            index: 13,
            name: "fixed point struck through by two strands",
            frozen: vec![("slope2", 0.5), ("slope3", 2.0)],
            analytic_loci: vec![
                implicit(M1, &[(1, 0, 1.0)], &[]),
                implicit(M1, &[(0, 1, 1.0)], &[]),
                implicit(M3, &[(1, 0, 1.0), (0, 1, -1.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 1, -4.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 1, 4.0)], &[]),
            ],
            default_radius: 1e-3,
            table_word: vec![IR3, M3, M1, IR3, M1, IR3, M3, M1, IR3, M1],
            deform: d13,
        },
        CatalogEntry {
            index: 14,
            name: "flex tangent to the axis",
            frozen: vec![],
            analytic_loci: vec![implicit(
                R2,
                &[(3, 0, 4.0), (0, 2, 27.0)],
                &[(-1.0, 0.0)],
            )],
            default_radius: 0.1,
            table_word: vec![R2, R2],
            deform: d14,
        },
        CatalogEntry {
            index: 15,
            name: "degenerate perpendicular crossing",
            frozen: vec![],
            analytic_loci: vec![
                implicit(M2, &[(0, 1, 1.0)], &[]),
                implicit(IR2, &[(2, 0, 1.0), (0, 1, -4.0)], &[(-1.0, 0.0)]),
            ],
            default_radius: 0.1,
            table_word: vec![M2, IR2, M2],
            deform: d15,
        },
        CatalogEntry {
            index: 16,
            name: "oblique tangency at the axis",
            frozen: vec![],
            analytic_loci: vec![
                implicit(IR2, &[(1, 0, 1.0), (0, 1, -1.0)], &[]),
                implicit(M3, &[(0, 1, 1.0), (1, 0, -1.0), (2, 0, 1.0)], &[]),
            ],
            default_radius: 0.1,
            table_word: vec![M3, IR2, IR2, M3],
            deform: d16,
        },
        CatalogEntry {
            index: 17,
            name: "fixed point struck through tangentially",
            frozen: vec![],
            analytic_loci: vec![
                implicit(M2, &[(1, 0, 1.0)], &[]),
                implicit(M1, &[(0, 1, 1.0)], &[]),
                implicit(IR3, &[(1, 0, 1.0), (0, 1, 1.0)], &[(-1.0, 0.0)]),
                parametrized(IR2, &flex_parab_l1, &flex_parab_l2, 0.1),
            ],
            default_radius: 1e-3,
            table_word: vec![M1, M2, IR3, M1, IR2, M2, IR2],
            deform: d17,
        },
        CatalogEntry {
            index: 18,
            name: "line tangency through a fixed point",
            frozen: vec![],
            analytic_loci: vec![
                implicit(R2, &[(1, 0, 1.0)], &[]),
                implicit(M1, &[(1, 0, 1.0), (0, 2, 1.0)], &[]),
            ],
            default_radius: 0.1,
            table_word: vec![R2, M1, M1, R2],
            deform: d18,
        },
    ]
}

// ---------------------------------------------------------------------------
// Analytic engine
// ---------------------------------------------------------------------------

fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t < 0.0 {
        t += TAU;
    }
    if t >= TAU {
        t -= TAU;
    }
    t
}

fn eval_terms(terms: &[(usize, usize, f64)], l1: f64, l2: f64) -> f64 {
    terms
        .iter()
        .map(|&(i, j, c)| c * l1.powi(i as i32) * l2.powi(j as i32))
        .sum()
}

/// The wall polynomial pulled back to the circle in the rational chart
/// `u = tan(θ/2)` (or, for the opposite half, `u = tan((θ−π)/2)`), cleared
/// of denominators.
fn chart_poly(terms: &[(usize, usize, f64)], radius: f64, negated: bool) -> Polynomial {
    let total = terms.iter().map(|&(i, j, _)| i + j).max().unwrap_or(0);
    let cos_num = p(&[1.0, 0.0, -1.0]); // 1 − u²
    let sin_num = p(&[0.0, 2.0]); // 2u
    let denom = p(&[1.0, 0.0, 1.0]); // 1 + u²
    let sign = if negated { -1.0 } else { 1.0 };
    let mut acc = Polynomial::zero();
    for &(i, j, c) in terms {
        let mut term = Polynomial::constant(c * (sign * radius).powi((i + j) as i32));
        for _ in 0..i {
            term = term.mul(&cos_num);
        }
        for _ in 0..j {
            term = term.mul(&sin_num);
        }
        for _ in 0..(total - i - j) {
            term = term.mul(&denom);
        }
        acc = acc.add(&term);
    }
    acc
}

/// Polish an isolated zero of `f` near `theta0` by bisection on a small
/// bracket; returns `theta0` unchanged when no sign change brackets it.
fn polish_root(f: impl Fn(f64) -> f64, theta0: f64, half_width: f64) -> f64 {
    let mut lo = theta0 - half_width;
    let mut hi = theta0 + half_width;
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 || flo.signum() == fhi.signum() {
        return theta0;
    }
    let mut flo = flo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn implicit_circle_crossings(
    terms: &[(usize, usize, f64)],
    conditions: &[(f64, f64)],
    radius: f64,
    tol: f64,
) -> Result<Vec<(f64, Direction)>, BifurcationError> {
    let g = |theta: f64| {
        eval_terms(
            terms,
            radius * theta.cos(),
            radius * theta.sin(),
        )
    };
    let mut angles: Vec<f64> = Vec::new();
    for (negated, offset) in [(false, 0.0), (true, PI)] {
        let poly = chart_poly(terms, radius, negated);
        if poly.is_zero() {
            return Err(BifurcationError::Numeric(
                "wall polynomial vanishes identically on the circle".into(),
            ));
        }
        if poly.degree() == Some(0) {
            continue;
        }
        // The chart window extends slightly past u = ±1 so that crossings
        // at the chart seam are found by at least one chart.
        let roots = isolate_roots(&poly, Interval::new(-1.02, 1.02), tol)?;
        for root in &roots.roots {
            let theta = normalize_angle(2.0 * root.value.atan() + offset);
            if matches!(root.hint, MultiplicityHint::Clustered) {
                return Err(BifurcationError::TangentialCrossing { angle: theta });
            }
            angles.push(theta);
        }
    }
    angles = angles
        .into_iter()
        .map(|theta| normalize_angle(polish_root(&g, theta, 1e-4)))
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 || (TAU - (*a - *b).abs()) <= 1e-7);
    let cond_slack = |a: f64, b: f64| -> f64 { 1e-7 * radius * (a.abs() + b.abs()) };
    let mut out = Vec::new();
    for theta in angles {
        let (l1, l2) = (radius * theta.cos(), radius * theta.sin());
        if conditions
            .iter()
            .any(|&(a, b)| a * l1 + b * l2 < -cond_slack(a, b))
        {
            continue;
        }
        let h = 1e-6;
        let dir = if g(theta - h) < g(theta + h) {
            Direction::Entering
        } else {
            Direction::Leaving
        };
        out.push((theta, dir));
    }
    Ok(out)
}

fn parametrized_circle_crossings(
    l1: &Polynomial,
    l2: &Polynomial,
    window: Interval,
    radius: f64,
    tol: f64,
) -> Result<Vec<(f64, Direction)>, BifurcationError> {
    let q = l1
        .mul(l1)
        .add(&l2.mul(l2))
        .sub(&Polynomial::constant(radius * radius));
    if q.is_zero() || q.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let roots = isolate_roots(&q, window, tol)?;
    let mut out = Vec::new();
    for root in &roots.roots {
        let s = polish_root(|s| q.eval(s), root.value, 1e-6);
        let theta = normalize_angle(l2.eval(s).atan2(l1.eval(s)));
        if matches!(root.hint, MultiplicityHint::Clustered) {
            return Err(BifurcationError::TangentialCrossing { angle: theta });
        }
        // Signed side of the wall's tangent line, as seen from the moving
        // circle point; its sign change across θ fixes the direction tag.
        let tangent = (l1.derivative().eval(s), l2.derivative().eval(s));
        let side = |theta: f64| {
            let (x, y) = (radius * theta.cos() - l1.eval(s), radius * theta.sin() - l2.eval(s));
            tangent.0 * y - tangent.1 * x
        };
        let h = 1e-6;
        let dir = if side(theta - h) < side(theta + h) {
            Direction::Entering
        } else {
            Direction::Leaving
        };
        out.push((theta, dir));
    }
    Ok(out)
}

/// Circle crossings of every stored wall, sorted by angle.
pub fn analytic_crossings(
    entry: &CatalogEntry,
    radius: f64,
) -> Result<Vec<Crossing>, BifurcationError> {
    let tol = crate::working_tol();
    let mut out: Vec<Crossing> = Vec::new();
    for locus in &entry.analytic_loci {
        let found = match locus {
            Locus::Implicit {
                terms, conditions, ..
            } => implicit_circle_crossings(terms, conditions, radius, tol)?,
            Locus::Parametrized {
                l1, l2, window, ..
            } => parametrized_circle_crossings(l1, l2, *window, radius, tol)?,
        };
        for (angle, direction) in found {
            out.push(Crossing {
                angle,
                move_label: locus.move_label(),
                direction,
            });
        }
    }
    out.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Numeric engine
// ---------------------------------------------------------------------------

/// Parameter-space threshold below which two feature parameters count as
/// merged when probing a bisected sign change.  Bisection stops at an
/// angular width of `1e-12`, so genuinely merging features sit within
/// `~1e-6` of each other in the strand parameter, while distinct features
/// stay at least a factor `radius` apart.
const PROBE_PTOL: f64 = 1e-6;
/// Parameter-space threshold below which a feature on a fixed branch
/// counts as merging into the fixed point (or into the axis).  Features
/// produced by an adjacent wall crossing approach the fixed point like the
/// square root of the deformation parameter, so at a bisected candidate
/// they sit within `~1e-4` of it, while genuine off-fixed features stay at
/// least `~1e-2` away for the catalogued radii.
const PROBE_NEAR0: f64 = 1e-4;
/// Relative derivative-residual threshold for probing cusps and
/// tangencies to the axis.
const PROBE_RES: f64 = 1e-5;
/// Absolute height-gap threshold for probing on-axis coincidences.
const PROBE_HEIGHT: f64 = 1e-8;
/// Image x-coordinate below which a double point counts as on the axis.
const PROBE_AXIS_X: f64 = 1e-4;

/// The strand list of a multigerm: each stored branch followed by its
/// mirror copy (paired branches only), matching the strand indexing of
/// [`crate::strata::MarginKind`].
fn strand_curves(m: &Multigerm) -> Result<Vec<(usize, bool, BranchCurve, Interval)>, GermError> {
    let mut out = Vec::new();
    for (bi, b) in m.branches.iter().enumerate() {
        out.push((bi, false, (b.x.clone(), b.y.clone()), b.window));
        if b.role == BranchRole::Paired {
            let mb = crate::germ::mirror(b)?;
            out.push((bi, true, (mb.x, mb.y), b.window));
        }
    }
    Ok(out)
}

struct DoubleRecord {
    strands: [(usize, f64); 2],
    image_x: f64,
}

/// All non-mate double points between (and within) strands.
fn double_records(m: &Multigerm, tol: f64) -> Result<Vec<DoubleRecord>, BifurcationError> {
    let strands = strand_curves(m)?;
    let ptol = 1e-7;
    let mut out = Vec::new();
    for (i, si) in strands.iter().enumerate() {
        if !si.1 {
            for sol in realalg::self_intersections(&si.2, si.3, tol)? {
                let fixed = m.branches[si.0].role == BranchRole::FixedPoint;
                if fixed && (sol.t + sol.s).abs() <= ptol {
                    continue;
                }
                out.push(DoubleRecord {
                    strands: [(i, sol.t), (i, sol.s)],
                    image_x: si.2 .0.eval(sol.t),
                });
            }
        }
        for (j, sj) in strands.iter().enumerate().skip(i + 1) {
            let mirror_pair = si.0 == sj.0 && si.1 != sj.1;
            for sol in branch_intersections(&si.2, &sj.2, (si.3, sj.3), tol)? {
                if mirror_pair && (sol.t - sol.s).abs() <= ptol {
                    continue;
                }
                out.push(DoubleRecord {
                    strands: [(i, sol.t), (j, sol.s)],
                    image_x: si.2 .0.eval(sol.t),
                });
            }
        }
    }
    Ok(out)
}

/// Identify which codimension-1 degeneration a bisected sign change of the
/// given margin component corresponds to; `None` means the sign change was
/// a spurious jump (a feature crossing the sampling window boundary or the
/// axis), not a wall crossing.
fn probe_component(
    m: &Multigerm,
    kind: &MarginKind,
    tol: f64,
) -> Result<Option<PlanarMoveLabel>, BifurcationError> {
    match kind {
        MarginKind::CuspX { branch } | MarginKind::CuspY { branch } => {
            let b = &m.branches[*branch];
            let fixed = b.role == BranchRole::FixedPoint;
            let dx = b.x.derivative();
            let dy = b.y.derivative();
            let dscale = dx.scale().max(dy.scale()).max(1e-30);
            let (primary, other) = if matches!(kind, MarginKind::CuspX { .. }) {
                (&dy, &dx)
            } else {
                (&dx, &dy)
            };
            if primary.degree() < Some(1) {
                return Ok(None);
            }
            for t in isolate_roots(primary, b.window, tol)?.values() {
                if fixed && t < -PROBE_NEAR0 {
                    continue;
                }
                if other.eval(t).abs() <= PROBE_RES * dscale {
                    return Ok(Some(if fixed && t.abs() <= PROBE_NEAR0 {
                        PlanarMoveLabel::R1
                    } else {
                        PlanarMoveLabel::IR1
                    }));
                }
            }
            Ok(None)
        }
        MarginKind::PairTangency { i, j } => {
            let strands = strand_curves(m)?;
            let (si, sj) = (&strands[*i], &strands[*j]);
            let ptol = 1e-7;
            // For a mirror-closed pair, double points on the axis are the
            // symmetric crossings themselves (or artifacts of the
            // positive-side restriction in the margin product); only an
            // off-axis tangency is a genuine wall.
            let mirror_closed = (i == j && m.branches[si.0].role == BranchRole::FixedPoint)
                || (i != j && si.0 == sj.0);
            let off_axis_min = if mirror_closed {
                PROBE_AXIS_X * geom_scale(m)
            } else {
                0.0
            };
            let sols: Vec<(f64, f64, bool, f64)> = if i == j {
                let fixed = m.branches[si.0].role == BranchRole::FixedPoint;
                realalg::self_intersections(&si.2, si.3, tol)?
                    .into_iter()
                    .filter(|s| !(fixed && (s.t + s.s).abs() <= ptol))
                    .map(|s| (s.t, s.s, s.tangential, si.2 .0.eval(s.t)))
                    .collect()
            } else {
                let mirror_pair = si.0 == sj.0 && si.1 != sj.1;
                branch_intersections(&si.2, &sj.2, (si.3, sj.3), tol)?
                    .into_iter()
                    .filter(|s| !(mirror_pair && (s.t - s.s).abs() <= ptol))
                    .map(|s| (s.t, s.s, s.tangential, si.2 .0.eval(s.t)))
                    .collect()
            };
            if sols
                .iter()
                .any(|&(_, _, tangential, x)| tangential && x.abs() >= off_axis_min)
            {
                return Ok(Some(PlanarMoveLabel::IR2));
            }
            for (a, &(t1, s1, _, x1)) in sols.iter().enumerate() {
                for &(t2, s2, _, x2) in sols.iter().skip(a + 1) {
                    if (t1 - t2).abs() <= PROBE_PTOL
                        && (s1 - s2).abs() <= PROBE_PTOL
                        && x1.abs() >= off_axis_min
                        && x2.abs() >= off_axis_min
                    {
                        return Ok(Some(PlanarMoveLabel::IR2));
                    }
                }
            }
            Ok(None)
        }
        MarginKind::Triple => {
            let records = double_records(m, tol)?;
            let scale = geom_scale(m);
            for (a, ea) in records.iter().enumerate() {
                for eb in records.iter().skip(a + 1) {
                    // Two records on the same strand pair merging in both
                    // slots are a tangency, not a triple point.
                    let same_pair = ea.strands[0].0 == eb.strands[0].0
                        && ea.strands[1].0 == eb.strands[1].0;
                    if same_pair
                        && (ea.strands[0].1 - eb.strands[0].1).abs() <= PROBE_PTOL
                        && (ea.strands[1].1 - eb.strands[1].1).abs() <= PROBE_PTOL
                    {
                        continue;
                    }
                    let merging = ea.strands.iter().any(|&(si, t)| {
                        eb.strands
                            .iter()
                            .any(|&(sj, s)| si == sj && (t - s).abs() <= PROBE_PTOL)
                    });
                    if merging
                        && ea.image_x.abs() > PROBE_AXIS_X * scale
                        && eb.image_x.abs() > PROBE_AXIS_X * scale
                    {
                        return Ok(Some(PlanarMoveLabel::IR3));
                    }
                }
            }
            Ok(None)
        }
        MarginKind::LineTangency { branch } => {
            let b = &m.branches[*branch];
            let fixed = b.role == BranchRole::FixedPoint;
            if b.x.degree() < Some(1) {
                return Ok(None);
            }
            let dx = b.x.derivative();
            let dscale = dx.scale().max(1e-30);
            for t in isolate_roots(&b.x, b.window, tol)?.values() {
                if fixed && t < -PROBE_NEAR0 {
                    continue;
                }
                if dx.eval(t).abs() <= PROBE_RES * dscale {
                    return Ok(Some(if fixed && t.abs() <= PROBE_NEAR0 {
                        PlanarMoveLabel::R1
                    } else {
                        PlanarMoveLabel::R2
                    }));
                }
            }
            Ok(None)
        }
        MarginKind::PerpTangency { branch } => {
            let b = &m.branches[*branch];
            let fixed = b.role == BranchRole::FixedPoint;
            if b.x.degree() < Some(1) {
                return Ok(None);
            }
            let dy = b.y.derivative();
            let dscale = b.x.derivative().scale().max(dy.scale()).max(1e-30);
            for t in isolate_roots(&b.x, b.window, tol)?.values() {
                if fixed && t <= PROBE_NEAR0 {
                    continue;
                }
                if dy.eval(t).abs() <= PROBE_RES * dscale {
                    return Ok(Some(PlanarMoveLabel::M2));
                }
            }
            Ok(None)
        }
        MarginKind::AxisHeights => {
            // Axis objects: (height, came from a fixed base, branch, t).
            let mut objects: Vec<(f64, bool, usize, f64)> = Vec::new();
            for (bi, b) in m.branches.iter().enumerate() {
                let fixed = b.role == BranchRole::FixedPoint;
                if b.x.degree() < Some(1) {
                    continue;
                }
                for t in isolate_roots(&b.x, b.window, tol)?.values() {
                    if fixed && t < -1e-7 {
                        continue;
                    }
                    let base = fixed && t.abs() <= 1e-7;
                    objects.push((b.y.eval(t), base, bi, t));
                }
            }
            for (a, &(ha, base_a, bi_a, t_a)) in objects.iter().enumerate() {
                for &(hb, base_b, bi_b, t_b) in objects.iter().skip(a + 1) {
                    // Two crossings of the same branch merging in the
                    // parameter are a tangency to the axis, not an on-axis
                    // double point.
                    if bi_a == bi_b && (t_a - t_b).abs() <= PROBE_NEAR0 {
                        continue;
                    }
                    if (ha - hb).abs() <= PROBE_HEIGHT * geom_scale(m) {
                        return Ok(Some(if base_a || base_b {
                            PlanarMoveLabel::M1
                        } else {
                            PlanarMoveLabel::M3
                        }));
                    }
                }
            }
            Ok(None)
        }
    }
}

fn geom_scale(m: &Multigerm) -> f64 {
    m.branches.iter().fold(1.0f64, |s, b| s.max(b.scale()))
}

/// Sample the regularity margins on an offset grid around the circle,
/// bisect every sign change, and identify the wall responsible.
///
/// `samples` must be at least 360.  Crossings closer in angle than the
/// merge tolerance with *different* labels raise
/// [`BifurcationError::UnresolvedCrossing`]; equal labels are merged (the
/// same wall crossing is routinely seen by several margin components).
pub fn numeric_crossings(
    entry: &CatalogEntry,
    radius: f64,
    samples: usize,
    tol: f64,
) -> Result<Vec<Crossing>, BifurcationError> {
    if samples < 360 {
        return Err(BifurcationError::Numeric(format!(
            "need at least 360 samples, got {samples}"
        )));
    }
    if !(radius > 0.0) {
        return Err(BifurcationError::Numeric("radius must be positive".into()));
    }
    let kinds = margin_kinds(&entry.deform_at(radius, 0.1))?;
    let n = samples;
    let step = TAU / n as f64;
    // Offset grid: wall crossings sit preferentially at round angles
    // (0, π/2, π/4, …), which an aligned grid would sample exactly.
    let theta_at = |k: usize| (k as f64 + 0.5) * step;
    let mut grid: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let v = margins(&entry.deform_at(radius, theta_at(k)), tol)?;
        if v.len() != kinds.len() {
            return Err(BifurcationError::Numeric(
                "margin vector length changed along the circle".into(),
            ));
        }
        grid.push(v);
    }
    let mut candidates: Vec<Crossing> = Vec::new();
    for c in 0..kinds.len() {
        for k in 0..n {
            let a = grid[k][c];
            let b = grid[(k + 1) % n][c];
            if a == 0.0 || b == 0.0 || a.signum() == b.signum() {
                continue;
            }
            let cell_lo = theta_at(k);
            refine_bracket(
                entry,
                radius,
                c,
                &kinds[c],
                (cell_lo, a),
                (cell_lo + step, b),
                tol,
                3,
                &mut candidates,
            )?;
        }
    }
    merge_crossings(candidates, tol)
}

/// Bisect a sign change of one margin component and probe the result.
///
/// A bracket can contain several sign changes: a genuine wall crossing
/// plus artifact flips produced by a neighbouring wall in the same
/// bracket (root isolation momentarily reports or drops a near-axis
/// feature there).  When the probe rejects the bisected angle, the
/// bracket is subsampled and each sign-change sub-bracket refined
/// recursively, so a genuine crossing hiding next to the artifacts is
/// still isolated and probed on its own.
#[allow(clippy::too_many_arguments)]
fn refine_bracket(
    entry: &CatalogEntry,
    radius: f64,
    c: usize,
    kind: &MarginKind,
    (blo, fblo): (f64, f64),
    (bhi, fbhi): (f64, f64),
    tol: f64,
    depth: usize,
    out: &mut Vec<Crossing>,
) -> Result<(), BifurcationError> {
    let mut lo = blo;
    let mut hi = bhi;
    let mut flo = fblo;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = margins(&entry.deform_at(radius, mid), tol)?[c];
        if fm == 0.0 {
            let eps = 1e-12;
            lo = mid - eps;
            hi = mid + eps;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut label = None;
    for theta in [lo, hi] {
        if let Some(l) = probe_component(&entry.deform_at(radius, theta), kind, tol)? {
            label = Some(l);
            break;
        }
    }
    if let Some(move_label) = label {
        let direction = if fblo < 0.0 {
            Direction::Entering
        } else {
            Direction::Leaving
        };
        out.push(Crossing {
            angle: normalize_angle(0.5 * (lo + hi)),
            move_label,
            direction,
        });
        return Ok(());
    }
    if depth == 0 || bhi - blo <= 1e-10 {
        return Ok(());
    }
    // The rejected sign change sits at `theta_star`; a genuine crossing
    // may hide elsewhere in the bracket at any scale separation from it,
    // so resample on a grid geometrically graded towards `theta_star`
    // (skipping points where the product underflows to zero; the
    // surrounding nonzero samples still bracket each sign change).
    let theta_star = 0.5 * (lo + hi);
    let mut points: Vec<f64> = Vec::new();
    points.push(blo);
    for j in 1..=50 {
        let d = (theta_star - blo) * 0.5f64.powi(j);
        if d <= 1e-12 {
            break;
        }
        points.push(theta_star - d);
    }
    for j in (1..=50).rev() {
        let d = (bhi - theta_star) * 0.5f64.powi(j);
        if d <= 1e-12 {
            continue;
        }
        points.push(theta_star + d);
    }
    points.push(bhi);
    let mut fringe: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    fringe.push((blo, fblo));
    for &th in &points[1..points.len() - 1] {
        let v = margins(&entry.deform_at(radius, th), tol)?[c];
        if v != 0.0 {
            fringe.push((th, v));
        }
    }
    fringe.push((bhi, fbhi));
    let mut changes = 0usize;
    let mut proper_split = false;
    for w in fringe.windows(2) {
        if w[0].1.signum() != w[1].1.signum() {
            changes += 1;
            if (w[0].0, w[1].0) != (blo, bhi) {
                proper_split = true;
            }
        }
    }
    // No separation achieved, or the bracket is pure sign chatter from
    // intermittently detected borderline features: give up on it.
    if !proper_split || changes > 4 {
        return Ok(());
    }
    for w in fringe.windows(2) {
        if w[0].1.signum() != w[1].1.signum() {
            refine_bracket(entry, radius, c, kind, w[0], w[1], tol, depth - 1, out)?;
        }
    }
    Ok(())
}

/// Merge duplicate detections of one wall crossing and reject genuinely
/// overlapping distinct crossings.
fn merge_crossings(
    mut candidates: Vec<Crossing>,
    tol: f64,
) -> Result<Vec<Crossing>, BifurcationError> {
    // One wall crossing is routinely seen by several margin components,
    // each bisecting to a slightly different angle; equal labels within
    // this window are one crossing.  Distinct catalog crossings are never
    // closer than ~1e-4 radians, so the window cannot swallow a real move.
    let same_label_tol = 1e-5;
    let distinct_tol = (100.0 * tol).max(1e-10);
    candidates.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
    let mut out: Vec<Crossing> = Vec::new();
    for c in candidates {
        match out.last() {
            Some(prev) if (c.angle - prev.angle).abs() <= same_label_tol => {
                if prev.move_label != c.move_label {
                    if (c.angle - prev.angle).abs() <= distinct_tol {
                        return Err(BifurcationError::UnresolvedCrossing {
                            angle1: prev.angle,
                            angle2: c.angle,
                        });
                    }
                    out.push(c);
                }
            }
            _ => out.push(c),
        }
    }
    // Wrap-around duplicate (a crossing at angle ≈ 0 seen as ≈ 2π).
    if out.len() > 1 {
        let first = out[0];
        let last = *out.last().unwrap();
        if TAU - (last.angle - first.angle) <= same_label_tol {
            if first.move_label == last.move_label {
                out.pop();
            } else if TAU - (last.angle - first.angle) <= distinct_tol {
                return Err(BifurcationError::UnresolvedCrossing {
                    angle1: first.angle,
                    angle2: last.angle,
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Loop words
// ---------------------------------------------------------------------------

/// Which engine produces the word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Analytic,
    Numeric,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "numeric" => Ok(Method::Numeric),
            other => Err(format!("unknown method `{other}` (analytic|numeric)")),
        }
    }
}

/// Read the loop word at the given radius.
///
/// The numeric method re-reads the word at half the radius and requires
/// the two words to agree as cyclic sequences; disagreement raises
/// [`BifurcationError::UnstableRadius`].
pub fn loop_word(
    entry: &CatalogEntry,
    method: Method,
    radius: f64,
) -> Result<LoopWord, BifurcationError> {
    let tol = crate::working_tol();
    let crossings = match method {
        Method::Analytic => analytic_crossings(entry, radius)?,
        Method::Numeric => {
            let full = numeric_crossings(entry, radius, DEFAULT_SAMPLES, tol)?;
            let half = numeric_crossings(entry, radius / 2.0, DEFAULT_SAMPLES, tol)?;
            let wf: Vec<_> = full.iter().map(|c| c.move_label).collect();
            let wh: Vec<_> = half.iter().map(|c| c.move_label).collect();
            if !cyclic_equal(&wf, &wh) {
                return Err(BifurcationError::UnstableRadius {
                    full: wf.len(),
                    half: wh.len(),
                });
            }
            full
        }
    };
    Ok(LoopWord { crossings })
}

/// `true` when `a` equals some rotation of `b`.
pub fn cyclic_equal(a: &[PlanarMoveLabel], b: &[PlanarMoveLabel]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| a.iter().cycle().skip(r).take(a.len()).eq(b.iter()))
}

/// `true` when `a` equals some rotation of `b` or of `b` reversed.
pub fn word_matches_cyclic(a: &[PlanarMoveLabel], b: &[PlanarMoveLabel]) -> bool {
    let rev: Vec<PlanarMoveLabel> = b.iter().rev().copied().collect();
    cyclic_equal(a, b) || cyclic_equal(a, &rev)
}

/// Read the numeric word at the entry's default radius and compare it with
/// the stored expected word, up to rotation and reversal.
pub fn check_against_table(entry: &CatalogEntry) -> Result<bool, BifurcationError> {
    let word = loop_word(entry, Method::Numeric, entry.default_radius)?;
    Ok(word_matches_cyclic(&word.labels(), &entry.table_word))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(index: u8) -> CatalogEntry {
        catalog()
            .into_iter()
            .find(|e| e.index == index)
            .expect("catalog index")
    }

    #[test]
    fn catalog_has_18_entries_with_distinct_indices() {
        let cat = catalog();
        assert_eq!(cat.len(), 18);
        for (k, e) in cat.iter().enumerate() {
            assert_eq!(e.index as usize, k + 1);
            assert!(!e.table_word.is_empty());
            assert!(e.default_radius > 0.0);
        }
    }

    #[test]
    fn normal_forms_classify_to_their_stratum() {
        let tol = crate::DEFAULT_TOL;
        for e in catalog() {
            let (label, _) = strata::classify(&e.normal_form(), tol).unwrap();
            assert_eq!(label, e.label(), "entry {} ({})", e.index, e.name);
        }
    }

    #[test]
    fn analytic_word_lengths_match_table() {
        for e in catalog() {
            let crossings = analytic_crossings(&e, e.default_radius).unwrap();
            assert_eq!(
                crossings.len(),
                e.table_word.len(),
                "entry {} ({}): analytic word {:?}",
                e.index,
                e.name,
                crossings.iter().map(|c| c.move_label).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn analytic_words_match_table() {
        for e in catalog() {
            let crossings = analytic_crossings(&e, e.default_radius).unwrap();
            let labels: Vec<_> = crossings.iter().map(|c| c.move_label).collect();
            assert!(
                word_matches_cyclic(&labels, &e.table_word),
                "entry {} ({}): analytic {:?} vs table {:?}",
                e.index,
                e.name,
                labels,
                e.table_word
            );
        }
    }

    #[test]
    fn cyclic_matching_handles_rotation_and_reversal() {
        use PlanarMoveLabel::*;
        let w = vec![IR1, IR2, IR3];
        assert!(word_matches_cyclic(&w, &[IR2, IR3, IR1]));
        assert!(word_matches_cyclic(&w, &[IR3, IR2, IR1]));
        assert!(word_matches_cyclic(&w, &[IR1, IR3, IR2]));
        assert!(!word_matches_cyclic(&w, &[IR1, IR2, IR2]));
        assert!(!word_matches_cyclic(&w, &[IR1, IR2]));
    }

    #[test]
    fn numeric_matches_analytic_for_cusp_entry() {
        let e = entry(1);
        let tol = crate::DEFAULT_TOL;
        let numeric = numeric_crossings(&e, e.default_radius, 720, tol).unwrap();
        let analytic = analytic_crossings(&e, e.default_radius).unwrap();
        assert_eq!(numeric.len(), analytic.len());
        for (nc, ac) in numeric.iter().zip(&analytic) {
            assert_eq!(nc.move_label, ac.move_label);
            assert!(
                (nc.angle - ac.angle).abs() <= ANGLE_AGREEMENT,
                "{} vs {}",
                nc.angle,
                ac.angle
            );
        }
    }

    #[test]
    fn sample_count_is_validated() {
        let e = entry(1);
        assert!(matches!(
            numeric_crossings(&e, e.default_radius, 100, crate::DEFAULT_TOL),
            Err(BifurcationError::Numeric(_))
        ));
    }

    #[test]
    fn corrupted_word_fails_table_check() {
        let mut e = entry(1);
        e.table_word = vec![PlanarMoveLabel::IR1; 3];
        let word = loop_word(&e, Method::Numeric, e.default_radius).unwrap();
        assert!(!word_matches_cyclic(&word.labels(), &e.table_word));
    }

    #[test]
    fn numeric_words_match_table_for_all_entries() {
        for e in catalog() {
            assert!(
                check_against_table(&e).unwrap(),
                "entry {} ({})",
                e.index,
                e.name
            );
        }
    }

    #[test]
    fn numeric_and_analytic_crossings_agree_for_all_entries() {
        let tol = crate::DEFAULT_TOL;
        for e in catalog() {
            let numeric = numeric_crossings(&e, e.default_radius, 720, tol).unwrap();
            let analytic = analytic_crossings(&e, e.default_radius).unwrap();
            assert_eq!(
                numeric.len(),
                analytic.len(),
                "entry {} ({}): crossing counts differ",
                e.index,
                e.name
            );
            for ac in &analytic {
                assert!(
                    numeric.iter().any(|nc| nc.move_label == ac.move_label
                        && angle_distance(nc.angle, ac.angle) <= ANGLE_AGREEMENT),
                    "entry {} ({}): analytic {} @ {} has no numeric partner",
                    e.index,
                    e.name,
                    ac.move_label,
                    ac.angle
                );
            }
        }
    }

    #[test]
    fn wall_points_classify_to_the_move_stratum() {
        let tol = crate::DEFAULT_TOL;
        for e in catalog() {
            for c in analytic_crossings(&e, e.default_radius).unwrap() {
                let m = e.deform_at(e.default_radius, c.angle);
                let (label, _) = strata::classify_with_radius(&m, tol, 1e-7).unwrap();
                assert_eq!(
                    label,
                    c.move_label.stratum(),
                    "entry {} ({}): {} @ {}",
                    e.index,
                    e.name,
                    c.move_label,
                    c.angle
                );
            }
        }
    }

    fn angle_distance(a: f64, b: f64) -> f64 {
        let d = (a - b).abs() % TAU;
        d.min(TAU - d)
    }
}
