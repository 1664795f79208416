//! Classification of equivariant multigerms into regularity strata.
//!
//! A multigerm is **regular** when it satisfies the eight conditions of a
//! regular half-knot projection: no off-axis cusps (ER-1), no off-axis
//! tangencies (ER-2), at most double points off the axis (ER-3), axis
//! crossings neither tangent (ER-4) nor perpendicular (ER-5) to the axis,
//! no on-axis double points between unrelated orbits (ER-6), nonvanishing
//! derivative at domain-fixed points (ER-7), and no strand through the
//! image of a domain-fixed point (ER-8).
//!
//! [`classify`] sorts a multigerm into `Regular`, one of the 8
//! codimension-1 strata, one of the 18 codimension-2 strata, a
//! coincidence of events at distinct image orbits, or `HigherCodim`.
//!
//! The module also exposes the signed **margin functions** used by the
//! bifurcation engine: continuous functions of a deformation parameter
//! whose isolated zeros are exactly the discriminant crossings.

use crate::germ::{
    axis_relation, cusp_type, mirror, multiplicity, tangency_order, AxisRelation, Branch,
    BranchRole, GermError, Multigerm,
};
use crate::realalg::{self, BranchCurve, Interval, Polynomial};

/// Angular tolerance (radians) for tangent-direction genericity tests.
pub const ANGULAR_TOL: f64 = 1e-6;

/// The stratum of a multigerm.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StratumLabel {
    Regular,
    /// Codimension 1: off-axis (2,3)-cusp.
    OffAxisCusp,
    /// Codimension 1: off-axis 1-fold tangency.
    OffAxisTangency,
    /// Codimension 1: off-axis ordinary triple point.
    OffAxisTriple,
    /// Codimension 1: on-axis 1-fold line tangency.
    OnAxisLineTangency,
    /// Codimension 1: on-axis 2-fold perpendicular tangency.
    OnAxisPerpTangency,
    /// Codimension 1: on-axis double point between unrelated orbits.
    OnAxisDouble,
    /// Codimension 1: fixed-point (2,3)-cusp.
    FixedCusp,
    /// Codimension 1: fixed double point (a strand through a fixed-point
    /// image).
    FixedDouble,
    /// Codimension 2, `L1..=L18` as in the loop table.
    L(u8),
    /// Independent singular events at distinct image orbits.
    Coincidence(Vec<StratumLabel>),
    /// Anything deeper, with a diagnostic reason.
    HigherCodim(String),
}

impl StratumLabel {
    /// Short identifier, e.g. `F1_7` or `L12`.
    pub fn id(&self) -> String {
        match self {
            StratumLabel::Regular => "Regular".into(),
            StratumLabel::OffAxisCusp => "F1_1".into(),
            StratumLabel::OffAxisTangency => "F1_2".into(),
            StratumLabel::OffAxisTriple => "F1_3".into(),
            StratumLabel::OnAxisLineTangency => "F1_4".into(),
            StratumLabel::OnAxisPerpTangency => "F1_5".into(),
            StratumLabel::OnAxisDouble => "F1_6".into(),
            StratumLabel::FixedCusp => "F1_7".into(),
            StratumLabel::FixedDouble => "F1_8".into(),
            StratumLabel::L(k) => format!("L{k}"),
            StratumLabel::Coincidence(parts) => {
                let ids: Vec<String> = parts.iter().map(|p| p.id()).collect();
                format!("Coincidence({})", ids.join(", "))
            }
            StratumLabel::HigherCodim(_) => "HigherCodim".into(),
        }
    }

    /// Human-readable description.
    pub fn describe(&self) -> String {
        match self {
            StratumLabel::Regular => "regular projection".into(),
            StratumLabel::OffAxisCusp => "off-axis (2,3)-cusp".into(),
            StratumLabel::OffAxisTangency => "off-axis 1-fold tangency".into(),
            StratumLabel::OffAxisTriple => "off-axis triple point".into(),
            StratumLabel::OnAxisLineTangency => "on-axis 1-fold line tangency".into(),
            StratumLabel::OnAxisPerpTangency => "on-axis 2-fold perpendicular tangency".into(),
            StratumLabel::OnAxisDouble => "on-axis double point".into(),
            StratumLabel::FixedCusp => "fixed-point (2,3)-cusp".into(),
            StratumLabel::FixedDouble => "fixed double point".into(),
            StratumLabel::L(k) => match k {
                1 => "off-axis (2,5)-cusp".into(),
                2 => "off-axis 2-fold tangency".into(),
                3 => "strikethrough of an off-axis (2,3)-cusp".into(),
                4 => "strikethrough of an off-axis 1-fold tangency".into(),
                5 => "off-axis quadruple point".into(),
                6 => "on-axis oblique (2,3)-cusp".into(),
                7 => "fixed-point (2,5)-cusp".into(),
                8 => "fixed-point (3,4)-cusp".into(),
                9 => "strikethrough of an on-axis 1-fold line tangency".into(),
                10 => "strikethrough of an on-axis 2-fold perpendicular tangency".into(),
                11 => "strikethrough of an on-axis double point".into(),
                12 => "strikethrough of a fixed-point (2,3)-cusp".into(),
                13 => "strikethrough of a fixed double point".into(),
                14 => "on-axis 2-fold line tangency".into(),
                15 => "on-axis 4-fold perpendicular tangency".into(),
                16 => "on-axis 1-fold oblique tangency".into(),
                17 => "fixed-point (1,2)-fold tangency".into(),
                18 => "fixed-point branch through an on-axis 1-fold line tangency".into(),
                _ => format!("unknown codimension-2 stratum L{k}"),
            },
            StratumLabel::Coincidence(parts) => {
                let ids: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                format!("coincidence of [{}]", ids.join("; "))
            }
            StratumLabel::HigherCodim(reason) => format!("higher codimension ({reason})"),
        }
    }
}

impl std::fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.id(), self.describe())
    }
}

/// Which regularity condition (or deeper pattern) a witness violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionTag {
    ER1,
    ER2,
    ER3,
    ER4,
    ER5,
    ER6,
    ER7,
    ER8,
    Codim2(String),
}

/// One located singular event.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub stratum: StratumLabel,
    /// `(stored branch index, parameter)` pairs locating the event.
    pub parameters: Vec<(usize, f64)>,
    pub violated: ConditionTag,
}

// ---------------------------------------------------------------------------
// Strand enumeration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Strand {
    branch: usize,
    mirrored: bool,
    role: BranchRole,
    curve: BranchCurve,
    window: Interval,
    scale: f64,
}

impl Strand {
    fn as_branch(&self) -> Branch {
        Branch {
            role: BranchRole::Paired,
            x: self.curve.0.clone(),
            y: self.curve.1.clone(),
            window: self.window,
        }
    }

    fn point(&self, t: f64) -> (f64, f64) {
        (self.curve.0.eval(t), self.curve.1.eval(t))
    }

    fn tangent(&self, t: f64) -> (f64, f64) {
        (
            self.curve.0.derivative().eval(t),
            self.curve.1.derivative().eval(t),
        )
    }
}

fn strands_of(m: &Multigerm) -> Result<Vec<Strand>, GermError> {
    let mut out = Vec::new();
    for (i, b) in m.branches.iter().enumerate() {
        out.push(Strand {
            branch: i,
            mirrored: false,
            role: b.role,
            curve: (b.x.clone(), b.y.clone()),
            window: b.window,
            scale: b.scale(),
        });
        if b.role == BranchRole::Paired {
            let mb = mirror(b)?;
            out.push(Strand {
                branch: i,
                mirrored: true,
                role: b.role,
                curve: (mb.x, mb.y),
                window: b.window,
                scale: b.scale(),
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Event detection
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum EventKind {
    /// φ' vanishes at an isolated parameter.
    Cusp { pq: Option<(usize, usize)> },
    /// Two parameters (possibly on one strand) share an image point.
    Double { tangential: bool, mate: bool },
}

#[derive(Debug, Clone)]
struct Event {
    /// Participating `(strand index, parameter)` pairs.
    points: Vec<(usize, f64)>,
    image: (f64, f64),
    kind: EventKind,
}

struct Analyzer {
    strands: Vec<Strand>,
    tol: f64,
    cluster_radius: f64,
}

impl Analyzer {
    fn new(m: &Multigerm, tol: f64, cluster_radius: f64) -> Result<Self, GermError> {
        Ok(Analyzer {
            strands: strands_of(m)?,
            tol,
            cluster_radius,
        })
    }

    fn geom_scale(&self) -> f64 {
        self.strands.iter().fold(1.0f64, |s, st| s.max(st.scale))
    }

    fn axis_tol(&self) -> f64 {
        self.cluster_radius.max(1e-8) * self.geom_scale()
    }

    /// Parameters where a strand's derivative vanishes, with cusp types.
    fn cusp_events(&self) -> Result<Vec<Event>, GermError> {
        let mut events = Vec::new();
        for (si, st) in self.strands.iter().enumerate() {
            let dx = st.curve.0.derivative();
            let dy = st.curve.1.derivative();
            let dscale = dx.scale().max(dy.scale()).max(1e-30);
            let mut candidates: Vec<f64> = Vec::new();
            let mut gather = |primary: &Polynomial, check: &Polynomial| {
                if primary.degree() >= Some(1) {
                    if let Ok(roots) = realalg::isolate_roots(primary, st.window, self.tol) {
                        for t in roots.values() {
                            if check.is_zero() || check.eval(t).abs() <= ANGULAR_TOL * dscale {
                                candidates.push(t);
                            }
                        }
                    }
                }
            };
            gather(&dx, &dy);
            gather(&dy, &dx);
            candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
            candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-7);
            for t0 in candidates {
                let shifted = Branch {
                    role: BranchRole::Paired,
                    x: st.curve.0.shift(t0),
                    y: st.curve.1.shift(t0),
                    window: st.window,
                };
                let pq = match multiplicity(&shifted) {
                    Ok(m) if m >= 2 => cusp_type(&shifted)?,
                    _ => None,
                };
                events.push(Event {
                    points: vec![(si, t0)],
                    image: st.point(t0),
                    kind: EventKind::Cusp { pq },
                });
            }
        }
        Ok(events)
    }

    /// Double points between (and within) strands, with mate/tangency flags.
    fn double_events(&self) -> Result<Vec<Event>, GermError> {
        let mut events = Vec::new();
        let ptol = 1e-7f64;
        let n = self.strands.len();
        for i in 0..n {
            let si = &self.strands[i];
            // Self-intersections of canonical strands only (mirror copies
            // produce the mirror image of the same event orbit).
            if !si.mirrored {
                for p in realalg::self_intersections(&si.curve, si.window, self.tol)? {
                    let mate = si.role == BranchRole::FixedPoint && (p.t + p.s).abs() <= ptol;
                    events.push(Event {
                        points: vec![(i, p.t), (i, p.s)],
                        image: si.point(p.t),
                        kind: EventKind::Double {
                            tangential: p.tangential,
                            mate,
                        },
                    });
                }
            }
            for j in i + 1..n {
                let sj = &self.strands[j];
                let sols = match realalg::branch_intersections(
                    &si.curve,
                    &sj.curve,
                    (si.window, sj.window),
                    self.tol,
                ) {
                    Ok(sols) => sols,
                    Err(realalg::RealAlgError::DegenerateInput(msg)) => {
                        return Err(GermError::DegenerateInput(msg))
                    }
                };
                let mirror_pair = si.branch == sj.branch && si.mirrored != sj.mirrored;
                for p in sols {
                    let mate = mirror_pair && (p.t - p.s).abs() <= ptol;
                    events.push(Event {
                        points: vec![(i, p.t), (j, p.s)],
                        image: si.point(p.t),
                        kind: EventKind::Double {
                            tangential: p.tangential,
                            mate,
                        },
                    });
                }
            }
        }
        Ok(events)
    }

    /// Double events for classification.
    ///
    /// Intersection records of a strand with its own mirror copy (or of a
    /// fixed strand with itself) become ill-conditioned near the axis,
    /// where the two curves osculate, and scatter phantom roots there.
    /// Those records are dropped and the on-axis structure is rebuilt
    /// from the axis crossings of `x`, which stay well-conditioned: each
    /// positive-side crossing of a strand orbit yields one mate-crossing
    /// event, and a fixed strand contributes its base point.
    fn classification_doubles(&self) -> Result<Vec<Event>, GermError> {
        let ptol = 1e-7f64;
        let near_axis = self.axis_tol().max(1e-5 * self.geom_scale());
        let kept = self.double_events()?.into_iter().filter(|e| {
            let (i, _) = e.points[0];
            let (j, _) = *e.points.last().unwrap();
            let same_orbit = self.strands[i].branch == self.strands[j].branch;
            !(same_orbit && e.image.0.abs() <= near_axis)
        });
        // Re-check the tangential flag with a more liberal relative
        // threshold: at an exact tangency the intersection solver can lose
        // one of the two merging roots and leave a single record whose
        // tangent cross product is tiny but just above the solver's gate.
        let kept = kept.map(|mut e| {
            if let EventKind::Double {
                tangential: false,
                mate: false,
            } = e.kind
            {
                if e.points.len() == 2 {
                    let (si, t) = e.points[0];
                    let (sj, s) = e.points[1];
                    let d1 = self.strands[si].tangent(t);
                    let d2 = self.strands[sj].tangent(s);
                    let n1 = (d1.0 * d1.0 + d1.1 * d1.1).sqrt().max(1e-30);
                    let n2 = (d2.0 * d2.0 + d2.1 * d2.1).sqrt().max(1e-30);
                    if (d1.0 * d2.1 - d1.1 * d2.0).abs() <= 1e-5 * n1 * n2 {
                        e.kind = EventKind::Double {
                            tangential: true,
                            mate: false,
                        };
                    }
                }
            }
            e
        });
        // An exactly tangential intersection is ill-conditioned too: the
        // double root of the elimination polynomial can scatter into two
        // simple crossings a few 1e-5 apart in parameter.  Rebuild such a
        // pair as one tangential event.
        let merge_gap = 1e-4;
        let mut events: Vec<Event> = Vec::new();
        for e in kept {
            let mergeable = matches!(
                e.kind,
                EventKind::Double {
                    tangential: false,
                    mate: false,
                }
            ) && e.points.len() == 2;
            if mergeable {
                if let Some(prev) = events.iter_mut().find(|p| {
                    matches!(
                        p.kind,
                        EventKind::Double {
                            tangential: false,
                            mate: false,
                        }
                    ) && p.points.len() == 2
                        && p.points[0].0 == e.points[0].0
                        && p.points[1].0 == e.points[1].0
                        && (p.points[0].1 - e.points[0].1).abs() <= merge_gap
                        && (p.points[1].1 - e.points[1].1).abs() <= merge_gap
                }) {
                    prev.points[0].1 = 0.5 * (prev.points[0].1 + e.points[0].1);
                    prev.points[1].1 = 0.5 * (prev.points[1].1 + e.points[1].1);
                    prev.image.0 = 0.5 * (prev.image.0 + e.image.0);
                    prev.image.1 = 0.5 * (prev.image.1 + e.image.1);
                    prev.kind = EventKind::Double {
                        tangential: true,
                        mate: false,
                    };
                    continue;
                }
            }
            events.push(e);
        }
        for (i, st) in self.strands.iter().enumerate() {
            if st.mirrored || st.curve.0.degree() < Some(1) {
                continue;
            }
            for t in realalg::isolate_roots(&st.curve.0, st.window, self.tol)?.values() {
                let kind = EventKind::Double {
                    tangential: false,
                    mate: true,
                };
                let image = (0.0, st.curve.1.eval(t));
                match st.role {
                    BranchRole::Paired => {
                        let j = self
                            .strands
                            .iter()
                            .position(|s| s.branch == st.branch && s.mirrored)
                            .expect("paired strand has a mirror copy");
                        events.push(Event {
                            points: vec![(i, t), (j, t)],
                            image,
                            kind,
                        });
                    }
                    BranchRole::FixedPoint if t < -ptol => {
                        // Mirror image of the positive-side crossing.
                    }
                    BranchRole::FixedPoint if t <= ptol => {
                        // The base point of the fixed branch.
                        events.push(Event {
                            points: vec![(i, 0.0)],
                            image: (0.0, st.curve.1.eval(0.0)),
                            kind,
                        });
                    }
                    BranchRole::FixedPoint => {
                        events.push(Event {
                            points: vec![(i, t), (i, -t)],
                            image,
                            kind,
                        });
                    }
                }
            }
        }
        Ok(events)
    }

    /// Cluster events by image orbit `{(x, y), (−x, y)}`.
    fn clusters(&self, events: Vec<Event>) -> Vec<Vec<Event>> {
        let radius = self.cluster_radius.max(1e-8) * self.geom_scale();
        let mut clusters: Vec<((f64, f64), Vec<Event>)> = Vec::new();
        for e in events {
            let key = (e.image.0.abs(), e.image.1);
            match clusters.iter_mut().find(|(k, _)| {
                (k.0 - key.0).abs() <= radius && (k.1 - key.1).abs() <= radius
            }) {
                Some((_, bucket)) => bucket.push(e),
                None => clusters.push((key, vec![e])),
            }
        }
        // An off-axis orbit holds two mirror-image points; keep the
        // positive-x side as the representative so mirror copies of the
        // same event are not double-counted.
        let axis_tol = self.axis_tol();
        clusters
            .into_iter()
            .map(|(key, v)| {
                if key.0 <= axis_tol {
                    return v;
                }
                let has_pos = v.iter().any(|e| e.image.0 > 0.0);
                v.into_iter()
                    .filter(|e| (e.image.0 > 0.0) == has_pos)
                    .collect()
            })
            .collect()
    }

    /// Participants of a cluster, deduplicated.
    fn participants(&self, cluster: &[Event]) -> Vec<(usize, f64)> {
        let mut pts: Vec<(usize, f64)> = cluster.iter().flat_map(|e| e.points.clone()).collect();
        pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
        pts.dedup_by(|a, b| a.0 == b.0 && (a.1 - b.1).abs() <= 1e-6);
        pts
    }

    fn witness_params(&self, pts: &[(usize, f64)]) -> Vec<(usize, f64)> {
        pts.iter()
            .map(|&(si, t)| (self.strands[si].branch, t))
            .collect()
    }

    /// Is the cluster pure regular structure (one ordinary crossing)?
    fn cluster_is_regular(&self, cluster: &[Event]) -> bool {
        if cluster.iter().any(|e| matches!(e.kind, EventKind::Cusp { .. })) {
            return false;
        }
        let parts = self.participants(cluster);
        // A fixed branch's base point alone is regular structure.
        if parts.len() == 1 {
            return cluster.len() == 1 && cluster[0].points.len() == 1;
        }
        if parts.len() != 2 {
            return false;
        }
        // A single transverse double point: regular off-axis crossing, or a
        // regular mate crossing on the axis (transverse, oblique).
        cluster.iter().all(|e| match e.kind {
            EventKind::Double { tangential, mate } => {
                if tangential {
                    return false;
                }
                if !mate {
                    // Ordinary crossing must be off the axis; a non-mate
                    // double on the axis violates ER-6.
                    e.image.0.abs() > self.axis_tol()
                } else {
                    // Mate crossing: tangents (x', y') and (−x', y') must be
                    // independent, i.e. neither vertical nor horizontal.
                    let (si, t) = e.points[0];
                    let (dx, dy) = self.strands[si].tangent(t);
                    let n = (dx * dx + dy * dy).sqrt().max(1e-30);
                    dx.abs() > ANGULAR_TOL * n && dy.abs() > ANGULAR_TOL * n
                }
            }
            EventKind::Cusp { .. } => false,
        })
    }

    fn analyze_cluster(&self, cluster: &[Event]) -> Result<Witness, GermError> {
        let parts = self.participants(cluster);
        let image = cluster[0].image;
        let on_axis = image.0.abs() <= self.axis_tol();
        let params = self.witness_params(&parts);
        let hc = |reason: String, tag: ConditionTag| Witness {
            stratum: StratumLabel::HigherCodim(reason),
            parameters: params.clone(),
            violated: tag,
        };

        // Collect cusp facts.
        let cusps: Vec<(usize, f64, Option<(usize, usize)>)> = cluster
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::Cusp { pq } => Some((e.points[0].0, e.points[0].1, pq)),
                _ => None,
            })
            .collect();
        // Deduplicate mirror copies of the same cusp orbit within a cluster
        // (only possible on the axis, where a cusp and its mirror coincide).
        let mut cusp_reps: Vec<(usize, f64, Option<(usize, usize)>)> = Vec::new();
        for &(si, t, pq) in &cusps {
            let dup = cusp_reps.iter().any(|&(sj, s, _)| {
                let a = &self.strands[si];
                let b = &self.strands[sj];
                a.branch == b.branch && (t - s).abs() <= 1e-6 && (si == sj || a.mirrored != b.mirrored)
            });
            if !dup {
                cusp_reps.push((si, t, pq));
            }
        }

        let distinct_strands: Vec<usize> = {
            let mut v: Vec<usize> = parts.iter().map(|&(si, _)| si).collect();
            v.sort_unstable();
            v.dedup();
            v
        };

        if !on_axis {
            return self.analyze_off_axis_cluster(cluster, &parts, &cusp_reps, &distinct_strands);
        }
        self.analyze_on_axis_cluster(cluster, &parts, &cusp_reps, &distinct_strands, &hc)
    }

    fn analyze_off_axis_cluster(
        &self,
        cluster: &[Event],
        parts: &[(usize, f64)],
        cusps: &[(usize, f64, Option<(usize, usize)>)],
        distinct_strands: &[usize],
    ) -> Result<Witness, GermError> {
        let params = self.witness_params(parts);
        let tangential_pairs = self.tangential_pair_count(cluster);
        match cusps.len() {
            0 => {
                // Count local strand passages through the point, not
                // distinct strands: one strand can pass through a triple
                // point twice (a self-crossing met by a third passage).
                let n = parts.len();
                match (n, tangential_pairs) {
                    (2, 1) => {
                        let order = self.pair_tangency_order(cluster)?;
                        let label = match order {
                            1 => StratumLabel::OffAxisTangency,
                            2 => StratumLabel::L(2),
                            k => StratumLabel::HigherCodim(format!(
                                "off-axis {k}-fold tangency"
                            )),
                        };
                        Ok(Witness {
                            stratum: label,
                            parameters: params,
                            violated: ConditionTag::ER2,
                        })
                    }
                    (3, 0) => Ok(Witness {
                        stratum: StratumLabel::OffAxisTriple,
                        parameters: params,
                        violated: ConditionTag::ER3,
                    }),
                    (3, 1) => {
                        let order = self.pair_tangency_order(cluster)?;
                        let label = if order == 1 {
                            StratumLabel::L(4)
                        } else {
                            StratumLabel::HigherCodim(
                                "higher tangency with a third strand".into(),
                            )
                        };
                        Ok(Witness {
                            stratum: label,
                            parameters: params,
                            violated: ConditionTag::Codim2("tangency + strikethrough".into()),
                        })
                    }
                    (4, 0) => Ok(Witness {
                        stratum: StratumLabel::L(5),
                        parameters: params,
                        violated: ConditionTag::Codim2("quadruple point".into()),
                    }),
                    (n, t) => Ok(Witness {
                        stratum: StratumLabel::HigherCodim(format!(
                            "off-axis cluster with {n} strands and {t} tangencies"
                        )),
                        parameters: params,
                        violated: ConditionTag::ER3,
                    }),
                }
            }
            1 => {
                let (csi, _, pq) = cusps[0];
                let extra: Vec<usize> = distinct_strands
                    .iter()
                    .copied()
                    .filter(|&s| s != csi)
                    .collect();
                let label = match (pq, extra.len()) {
                    (Some((2, 3)), 0) => StratumLabel::OffAxisCusp,
                    (Some((2, 5)), 0) => StratumLabel::L(1),
                    (Some((2, 3)), 1) => StratumLabel::L(3),
                    (Some((p, q)), 0) => {
                        StratumLabel::HigherCodim(format!("off-axis ({p},{q})-cusp"))
                    }
                    (None, _) => StratumLabel::HigherCodim("degenerate off-axis cusp".into()),
                    (Some((p, q)), k) => StratumLabel::HigherCodim(format!(
                        "off-axis ({p},{q})-cusp with {k} extra strands"
                    )),
                };
                Ok(Witness {
                    stratum: label,
                    parameters: params,
                    violated: ConditionTag::ER1,
                })
            }
            k => Ok(Witness {
                stratum: StratumLabel::HigherCodim(format!("{k} cusps at one image orbit")),
                parameters: params,
                violated: ConditionTag::ER1,
            }),
        }
    }

    #[allow(clippy::too_many_lines)]
    fn analyze_on_axis_cluster(
        &self,
        cluster: &[Event],
        parts: &[(usize, f64)],
        cusps: &[(usize, f64, Option<(usize, usize)>)],
        distinct_strands: &[usize],
        hc: &dyn Fn(String, ConditionTag) -> Witness,
    ) -> Result<Witness, GermError> {
        let params = self.witness_params(parts);
        let ptol = 1e-6f64;

        // Fixed-parameter cusp (ER-7)?
        if let Some(&(csi, _, pq)) = cusps.iter().find(|&&(si, t, _)| {
            self.strands[si].role == BranchRole::FixedPoint && t.abs() <= ptol
        }) {
            let free: Vec<usize> = self.free_branches_through(distinct_strands, csi);
            let label = match (pq, free.len()) {
                (Some((2, 3)), 0) => StratumLabel::FixedCusp,
                (Some((2, 5)), 0) => StratumLabel::L(7),
                (Some((3, 4)), 0) => StratumLabel::L(8),
                (Some((2, 3)), 1) => StratumLabel::L(12),
                (Some((p, q)), k) => StratumLabel::HigherCodim(format!(
                    "fixed-point ({p},{q})-cusp with {k} extra orbits"
                )),
                (None, _) => StratumLabel::HigherCodim("degenerate fixed-point cusp".into()),
            };
            return Ok(Witness {
                stratum: label,
                parameters: params,
                violated: ConditionTag::ER7,
            });
        }

        // Paired-strand cusp landing on the axis (oblique on-axis cusp)?
        if let Some(&(csi, t0, pq)) = cusps.first() {
            let shifted = Branch {
                role: BranchRole::Paired,
                x: self.strands[csi].curve.0.shift(t0),
                y: self.strands[csi].curve.1.shift(t0),
                window: self.strands[csi].window,
            };
            let rel = axis_relation(&shifted);
            let label = match (pq, rel) {
                (Some((2, 3)), AxisRelation::OnAxisOblique) => StratumLabel::L(6),
                (Some((p, q)), rel) => StratumLabel::HigherCodim(format!(
                    "on-axis ({p},{q})-cusp with tangent relation {rel:?}"
                )),
                (None, _) => StratumLabel::HigherCodim("degenerate on-axis cusp".into()),
            };
            return Ok(Witness {
                stratum: label,
                parameters: params,
                violated: ConditionTag::ER1,
            });
        }

        // No cusps. Gather axis tangency structure from mate doubles.
        let mut line_tang: Option<(usize, f64)> = None; // vertical tangent
        let mut perp_tang: Option<(usize, f64)> = None; // horizontal tangent
        let mut oblique_tang: Option<(usize, f64, usize, f64)> = None;
        let mut mate_objects = 0usize;
        for e in cluster {
            if let EventKind::Double { tangential, mate } = e.kind {
                let (si, t) = e.points[0];
                if mate {
                    mate_objects += 1;
                    let (dx, dy) = self.strands[si].tangent(t);
                    let n = (dx * dx + dy * dy).sqrt().max(1e-30);
                    if dx.abs() <= ANGULAR_TOL * n {
                        line_tang = Some((si, t));
                    } else if dy.abs() <= ANGULAR_TOL * n {
                        perp_tang = Some((si, t));
                    }
                } else if tangential {
                    let (sj, s) = e.points[1];
                    oblique_tang = Some((si, t, sj, s));
                }
            }
        }

        // Fixed branch present at its fixed parameter (ER-8 territory)?
        let fixed_base: Option<usize> = parts
            .iter()
            .find(|&&(si, t)| {
                self.strands[si].role == BranchRole::FixedPoint && t.abs() <= ptol
            })
            .map(|&(si, _)| si);

        if let Some(fsi) = fixed_base {
            // A free strand tangent to the fixed branch at its base point?
            let tangent_to_fixed = cluster.iter().any(|e| match e.kind {
                EventKind::Double { tangential, .. } => {
                    tangential
                        && e.points.iter().any(|&(si, t)| si == fsi && t.abs() <= ptol)
                        && e.points.iter().any(|&(si, _)| si != fsi)
                }
                _ => false,
            });
            if tangent_to_fixed {
                // Fixed-point (1, 2)-fold tangency: free pair tangent to the
                // fixed branch (order 1) at the fixed point.
                let free_si = distinct_strands
                    .iter()
                    .copied()
                    .find(|&s| s != fsi && self.strands[s].role == BranchRole::Paired);
                if let Some(si) = free_si {
                    let t_free = parts
                        .iter()
                        .find(|&&(s, _)| s == si)
                        .map(|&(_, t)| t)
                        .unwrap_or(0.0);
                    let order = tangency_order(
                        &self.strands[si].as_branch(),
                        &self.strands[fsi].as_branch(),
                        (t_free, 0.0),
                    )
                    .unwrap_or(0);
                    if order == 1 {
                        return Ok(Witness {
                            stratum: StratumLabel::L(17),
                            parameters: params,
                            violated: ConditionTag::ER8,
                        });
                    }
                }
                return Ok(hc(
                    "higher tangency at a fixed point".into(),
                    ConditionTag::ER8,
                ));
            }
            if line_tang.is_some() {
                // A free pair line-tangent to the axis at a fixed-point image.
                return Ok(Witness {
                    stratum: StratumLabel::L(18),
                    parameters: params,
                    violated: ConditionTag::ER8,
                });
            }
            // Count the mate crossings colliding with the base point; the
            // fixed strand's own positive-side crossing counts like a free
            // orbit's (both degenerate to a crossing through the base).
            let crossings = cluster
                .iter()
                .filter(|e| {
                    matches!(e.kind, EventKind::Double { mate: true, .. })
                        && e.points.len() == 2
                })
                .count();
            let label = match crossings {
                1 => StratumLabel::FixedDouble,
                2 => StratumLabel::L(13),
                k => StratumLabel::HigherCodim(format!(
                    "fixed point met by {k} crossings"
                )),
            };
            return Ok(Witness {
                stratum: label,
                parameters: params,
                violated: ConditionTag::ER8,
            });
        }

        if let Some((si, t)) = line_tang {
            let order = self.mate_tangency_order(si, t)?;
            let extra = self.free_branches_through(distinct_strands, si);
            let label = match (order, extra.len()) {
                (1, 0) => StratumLabel::OnAxisLineTangency,
                (2, 0) => StratumLabel::L(14),
                (1, 1) => StratumLabel::L(9),
                (k, e) => StratumLabel::HigherCodim(format!(
                    "{k}-fold line tangency with {e} extra orbits"
                )),
            };
            return Ok(Witness {
                stratum: label,
                parameters: params,
                violated: ConditionTag::ER4,
            });
        }

        if let Some((si, t)) = perp_tang {
            let order = self.mate_tangency_order(si, t)?;
            let extra = self.free_branches_through(distinct_strands, si);
            let label = match (order, extra.len()) {
                (2, 0) => StratumLabel::OnAxisPerpTangency,
                (4, 0) => StratumLabel::L(15),
                (2, 1) => StratumLabel::L(10),
                (k, e) => StratumLabel::HigherCodim(format!(
                    "{k}-fold perpendicular tangency with {e} extra orbits"
                )),
            };
            return Ok(Witness {
                stratum: label,
                parameters: params,
                violated: ConditionTag::ER5,
            });
        }

        if let Some((si, t, sj, s)) = oblique_tang {
            let order = tangency_order(
                &self.strands[si].as_branch(),
                &self.strands[sj].as_branch(),
                (t, s),
            )
            .unwrap_or(0);
            let label = if order == 1 {
                StratumLabel::L(16)
            } else {
                StratumLabel::HigherCodim(format!("on-axis {order}-fold oblique tangency"))
            };
            return Ok(Witness {
                stratum: label,
                parameters: params,
                violated: ConditionTag::ER6,
            });
        }

        // Transverse collision of mate crossings on the axis.
        match mate_objects {
            2 => {
                // Generic on-axis double point: four tangent directions
                // pairwise independent.
                let dirs: Vec<(f64, f64)> = parts
                    .iter()
                    .map(|&(si, t)| self.strands[si].tangent(t))
                    .collect();
                for (a, da) in dirs.iter().enumerate() {
                    let na = (da.0 * da.0 + da.1 * da.1).sqrt().max(1e-30);
                    if da.0.abs() <= ANGULAR_TOL * na || da.1.abs() <= ANGULAR_TOL * na {
                        return Ok(hc(
                            "on-axis double point with an axis-aligned tangent".into(),
                            ConditionTag::ER6,
                        ));
                    }
                    for db in dirs.iter().skip(a + 1) {
                        let nb = (db.0 * db.0 + db.1 * db.1).sqrt().max(1e-30);
                        if (da.0 * db.1 - da.1 * db.0).abs() <= ANGULAR_TOL * na * nb {
                            return Ok(hc(
                                "on-axis double point with dependent tangents".into(),
                                ConditionTag::ER6,
                            ));
                        }
                    }
                }
                Ok(Witness {
                    stratum: StratumLabel::OnAxisDouble,
                    parameters: params,
                    violated: ConditionTag::ER6,
                })
            }
            3 => Ok(Witness {
                stratum: StratumLabel::L(11),
                parameters: params,
                violated: ConditionTag::ER6,
            }),
            k => Ok(hc(
                format!("{k} axis crossings at one point"),
                ConditionTag::ER6,
            )),
        }
    }

    /// Count distinct stored paired branches passing through a cluster,
    /// other than the branch of the given strand.
    fn free_branches_through(&self, distinct_strands: &[usize], except: usize) -> Vec<usize> {
        let except_branch = self.strands[except].branch;
        let mut branches: Vec<usize> = distinct_strands
            .iter()
            .copied()
            .filter(|&s| {
                self.strands[s].branch != except_branch
                    && self.strands[s].role == BranchRole::Paired
            })
            .map(|s| self.strands[s].branch)
            .collect();
        branches.sort_unstable();
        branches.dedup();
        branches
    }

    /// Number of distinct tangential non-mate contacts in a cluster.
    fn tangential_pair_count(&self, cluster: &[Event]) -> usize {
        let mut pairs: Vec<(usize, usize)> = cluster
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::Double {
                    tangential: true,
                    mate: false,
                } => {
                    let a = e.points[0].0;
                    let b = e.points[1].0;
                    Some((a.min(b), a.max(b)))
                }
                _ => None,
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs.len()
    }

    /// Tangency order of the unique tangential non-mate contact.
    fn pair_tangency_order(&self, cluster: &[Event]) -> Result<usize, GermError> {
        for e in cluster {
            if let EventKind::Double {
                tangential: true,
                mate: false,
            } = e.kind
            {
                let (si, t) = e.points[0];
                let (sj, s) = e.points[1];
                return tangency_order(
                    &self.strands[si].as_branch(),
                    &self.strands[sj].as_branch(),
                    (t, s),
                );
            }
        }
        Err(GermError::DegenerateInput("no tangential contact".into()))
    }

    /// Tangency order of a strand with its own mirror at a mate crossing.
    fn mate_tangency_order(&self, si: usize, t: f64) -> Result<usize, GermError> {
        let st = &self.strands[si];
        let b = st.as_branch();
        if st.role == BranchRole::FixedPoint {
            // A fixed strand is its own mirror as a set; the mate local
            // branch through the crossing is the strand itself at `−t`.
            return tangency_order(&b, &b, (t, -t));
        }
        let mb = Branch {
            role: BranchRole::Paired,
            x: st.curve.0.scaled(-1.0),
            y: st.curve.1.clone(),
            window: st.window,
        };
        tangency_order(&b, &mb, (t, t))
    }
}

// ---------------------------------------------------------------------------
// Public classification API
// ---------------------------------------------------------------------------

/// Check the eight regularity conditions; an empty witness list means the
/// multigerm is regular.
pub fn check_regular(m: &Multigerm, tol: f64) -> Result<Vec<Witness>, GermError> {
    check_regular_with_radius(m, tol, 10.0 * tol)
}

/// [`check_regular`] with an explicit image-orbit clustering radius
/// (relative to the geometric scale).
pub fn check_regular_with_radius(
    m: &Multigerm,
    tol: f64,
    cluster_radius: f64,
) -> Result<Vec<Witness>, GermError> {
    let an = Analyzer::new(m, tol, cluster_radius)?;
    let mut events = an.cusp_events()?;
    events.extend(an.classification_doubles()?);
    let mut witnesses = Vec::new();
    for cluster in an.clusters(events) {
        if an.cluster_is_regular(&cluster) {
            continue;
        }
        witnesses.push(an.analyze_cluster(&cluster)?);
    }
    Ok(witnesses)
}

/// Classify a multigerm into its stratum, with the witnesses that led to
/// the decision.
pub fn classify(m: &Multigerm, tol: f64) -> Result<(StratumLabel, Vec<Witness>), GermError> {
    classify_with_radius(m, tol, 10.0 * tol)
}

/// [`classify`] with an explicit clustering radius: the bifurcation
/// engine's validator passes a radius matched to its bisection resolution.
pub fn classify_with_radius(
    m: &Multigerm,
    tol: f64,
    cluster_radius: f64,
) -> Result<(StratumLabel, Vec<Witness>), GermError> {
    let witnesses = check_regular_with_radius(m, tol, cluster_radius)?;
    let label = match witnesses.len() {
        0 => StratumLabel::Regular,
        1 => witnesses[0].stratum.clone(),
        _ => StratumLabel::Coincidence(witnesses.iter().map(|w| w.stratum.clone()).collect()),
    };
    Ok((label, witnesses))
}

// ---------------------------------------------------------------------------
// Regularity margins
// ---------------------------------------------------------------------------

/// The geometric meaning of one component of the [`margins`] vector.
///
/// Strand indices enumerate, per stored branch in order, the canonical
/// strand followed by its mirror copy (paired branches only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarginKind {
    /// Product of `x'` over the roots of `y'` on one stored branch.
    CuspX { branch: usize },
    /// Product of `y'` over the roots of `x'` on one stored branch.
    CuspY { branch: usize },
    /// Product of tangent cross products over the non-mate double points
    /// of one strand pair (`i == j` for self-intersections).
    PairTangency { i: usize, j: usize },
    /// Product of parameter gaps between double points sharing a strand.
    Triple,
    /// Product of `x'` over one stored branch's axis crossings.
    LineTangency { branch: usize },
    /// Product of `y'` over one stored branch's positive axis crossings.
    PerpTangency { branch: usize },
    /// Product of height gaps between distinct axis-crossing objects.
    AxisHeights,
}

/// The component layout of the [`margins`] vector for a given branch
/// structure; depends only on branch count, roles, and strand pairing,
/// never on coefficient values.
pub fn margin_kinds(m: &Multigerm) -> Result<Vec<MarginKind>, GermError> {
    let strands = strands_of(m)?;
    let mut out = Vec::new();
    for b in 0..m.branches.len() {
        out.push(MarginKind::CuspX { branch: b });
        out.push(MarginKind::CuspY { branch: b });
    }
    let n = strands.len();
    for i in 0..n {
        for j in i..n {
            if i == j && strands[i].mirrored {
                continue;
            }
            out.push(MarginKind::PairTangency { i, j });
        }
    }
    out.push(MarginKind::Triple);
    for b in 0..m.branches.len() {
        out.push(MarginKind::LineTangency { branch: b });
        out.push(MarginKind::PerpTangency { branch: b });
    }
    out.push(MarginKind::AxisHeights);
    Ok(out)
}

/// Signed regularity margins: a vector of continuous functions of the
/// multigerm's coefficients, with a fixed length for a fixed branch
/// structure, such that a transverse crossing of any codimension-1 stratum
/// flips the sign of at least one component.
///
/// Components, in order:
/// 1. per stored branch, the product of `x'` over the roots of `y'`
///    (vanishes at a cusp, since there `x'` and `y'` share a root);
/// 2. per stored branch, the product of `y'` over the roots of `x'`;
/// 3. per strand pair, the product of tangent cross products over the
///    pair's non-mate double points (vanishes at a tangency, with a sign
///    change because the merging pair carries opposite crossing signs);
/// 4. one global product of parameter gaps between double points sharing
///    a strand (vanishes at a triple point);
/// 5. per stored branch, the product of `x'` over the branch's axis
///    crossings (vanishes at a line tangency; for a fixed branch the
///    `t = 0` factor is the fixed-point regularity residual);
/// 6. per stored branch, the product of `y'` over the branch's positive
///    axis crossings (vanishes at a perpendicular tangency);
/// 7. one global product of height gaps between distinct axis-crossing
///    objects, fixed-point images included (vanishes at an on-axis or
///    fixed double point).
pub fn margins(m: &Multigerm, tol: f64) -> Result<Vec<f64>, GermError> {
    let an = Analyzer::new(m, tol, 10.0 * tol)?;
    let ptol = 1e-7f64;
    let mut out = Vec::new();

    // 1 & 2: cusp residuals per stored branch.  A fixed branch contains
    // its own mirror image, so only the t ≥ 0 half is sampled: mirror-image
    // cusps would otherwise contribute matching factors and the product
    // would vanish to even order, without a sign change.
    for b in &m.branches {
        let fixed = b.role == BranchRole::FixedPoint;
        let dx = b.x.derivative();
        let dy = b.y.derivative();
        let prod_over = |primary: &Polynomial, other: &Polynomial| -> Result<f64, GermError> {
            if primary.degree() < Some(1) {
                return Ok(1.0);
            }
            let mut p = 1.0;
            for t in realalg::isolate_roots(primary, b.window, tol)?.values() {
                if fixed && t < -ptol {
                    continue;
                }
                p *= other.eval(t);
            }
            Ok(p)
        };
        out.push(prod_over(&dy, &dx)?);
        out.push(prod_over(&dx, &dy)?);
    }

    // Shared double-point enumeration.
    let doubles = an.double_events()?;

    // 3: tangency residual per strand pair.  For a mirror-closed pair (a
    // strand with its own mirror copy, or a fixed strand with itself) each
    // double point appears together with its mirror image inside the same
    // product; only the positive-x representative is kept so a tangency
    // contributes an odd number of vanishing factors.
    let n = an.strands.len();
    for i in 0..n {
        for j in i..n {
            if i == j && an.strands[i].mirrored {
                continue;
            }
            let mirror_closed = (i == j && an.strands[i].role == BranchRole::FixedPoint)
                || (i != j && an.strands[i].branch == an.strands[j].branch);
            let mut p = 1.0;
            for e in &doubles {
                if let EventKind::Double { mate: false, .. } = e.kind {
                    let (a, ta) = e.points[0];
                    let (bb, tb) = e.points[1];
                    if (a.min(bb), a.max(bb)) == (i, j) {
                        if mirror_closed && e.image.0 <= 0.0 {
                            continue;
                        }
                        let d1 = an.strands[a].tangent(ta);
                        let d2 = an.strands[bb].tangent(tb);
                        p *= d1.0 * d2.1 - d1.1 * d2.0;
                    }
                }
            }
            out.push(p);
        }
    }

    // 4: triple-point residual — parameter gaps between double points that
    // share a strand.  Only positive-x double points enter, again so that a
    // triple point (three merging gaps) flips the sign while its mirror
    // image is not double-counted.
    let records: Vec<&Event> = doubles
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Double { mate: false, .. }) && e.image.0 > 0.0)
        .collect();
    let mut triple = 1.0f64;
    for (a, ea) in records.iter().enumerate() {
        for eb in records.iter().skip(a + 1) {
            for &(si, t) in &ea.points {
                for &(sj, s) in &eb.points {
                    if si == sj {
                        triple *= t - s;
                    }
                }
            }
        }
    }
    out.push(triple);

    // 5 & 6: axis tangency residuals, and 7: axis-height objects.
    let mut heights: Vec<f64> = Vec::new();
    for (bi, b) in m.branches.iter().enumerate() {
        let fixed = b.role == BranchRole::FixedPoint;
        let mut line = 1.0f64;
        let mut perp = 1.0f64;
        let dx = b.x.derivative();
        let dy = b.y.derivative();
        if b.x.degree() >= Some(1) {
            for t in realalg::isolate_roots(&b.x, b.window, tol)?.values() {
                if fixed && t < -ptol {
                    // Mirror image of the positive-side crossing.
                    continue;
                }
                line *= dx.eval(t);
                if !(fixed && t.abs() <= ptol) {
                    perp *= dy.eval(t);
                }
                heights.push(b.y.eval(t));
            }
        } else if fixed {
            // Odd x with no linear term would be the zero polynomial;
            // a degree-0 x cannot occur for a fixed branch, but guard.
            return Err(GermError::DegenerateInput(format!(
                "fixed branch {bi} has constant x"
            )));
        }
        out.push(line);
        out.push(perp);
    }
    let mut hprod = 1.0f64;
    for (a, ha) in heights.iter().enumerate() {
        for hb in heights.iter().skip(a + 1) {
            hprod *= ha - hb;
        }
    }
    out.push(hprod);

    Ok(out)
}

// ---------------------------------------------------------------------------
// Parametric codimension
// ---------------------------------------------------------------------------

/// Parametric codimension of a non-equivariant `(p, q)`-cusp:
/// `p + q − ⌊q/p⌋ − 3`.
pub fn pcodim_cusp(p: usize, q: usize) -> usize {
    p + q - q / p - 3
}

/// Parametric codimension of the fixed-point cusps appearing in the
/// classification.
pub fn pcodim_fixed_cusp(p: usize, q: usize) -> Option<usize> {
    match (p, q) {
        (2, 3) => Some(1),
        (2, 5) => Some(2),
        (3, 4) => Some(2),
        _ => None,
    }
}

/// Off-axis `k`-fold tangency.
pub fn pcodim_off_tangency(k: usize) -> usize {
    k
}

/// On-axis `k`-fold line tangency.
pub fn pcodim_line_tangency(k: usize) -> usize {
    k
}

/// On-axis `2k`-fold perpendicular tangency (argument is `k`).
pub fn pcodim_perp_tangency(k: usize) -> usize {
    k
}

/// On-axis `k`-fold oblique tangency.
pub fn pcodim_oblique_tangency(k: usize) -> usize {
    k + 1
}

/// Fixed-point `(k, 2ℓ)`-fold tangency:
/// `k + max(ℓ − ⌊(k+1)/2⌋, 0) + 1`.
pub fn pcodim_fixed_tangency(k: usize, l: usize) -> usize {
    k + l.saturating_sub((k + 1) / 2) + 1
}

/// Coincidences add codimensions.
pub fn pcodim_coincidence(a: usize, b: usize) -> usize {
    a + b
}

/// A strikethrough raises codimension by one.
pub fn pcodim_strikethrough(c: usize) -> usize {
    c + 1
}

/// Parametric codimension of a stratum label.
pub fn pcodim(label: &StratumLabel) -> Result<usize, GermError> {
    match label {
        StratumLabel::Regular => Err(GermError::DegenerateInput(
            "pcodim is undefined for the regular stratum".into(),
        )),
        StratumLabel::HigherCodim(r) => Err(GermError::DegenerateInput(format!(
            "pcodim unsupported for higher-codimension stratum ({r})"
        ))),
        StratumLabel::Coincidence(parts) => {
            let mut total = 0;
            for p in parts {
                total += pcodim(p)?;
            }
            Ok(total)
        }
        StratumLabel::L(_) => Ok(2),
        _ => Ok(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realalg::Polynomial;

    fn poly(cs: &[f64]) -> Polynomial {
        Polynomial::new(cs.to_vec())
    }

    fn w() -> Interval {
        Interval::symmetric(0.5)
    }

    const TOL: f64 = 1e-9;

    fn label_of(m: &Multigerm) -> StratumLabel {
        classify(m, TOL).unwrap().0
    }

    #[test]
    fn immersed_off_axis_branch_is_regular() {
        let m = Multigerm::single(Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, 0.5]), w()));
        assert_eq!(label_of(&m), StratumLabel::Regular);
    }

    #[test]
    fn off_axis_cusp_is_f1_1() {
        let m = Multigerm::single(Branch::paired(
            poly(&[1.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
            w(),
        ));
        let (label, ws) = classify(&m, TOL).unwrap();
        assert_eq!(label, StratumLabel::OffAxisCusp);
        assert_eq!(ws.len(), 1);
        assert_eq!(ws[0].violated, ConditionTag::ER1);
    }

    #[test]
    fn off_axis_25_cusp_is_l1() {
        // (t², t⁵) based off-axis.
        let m = Multigerm::single(Branch::paired(
            poly(&[1.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&m), StratumLabel::L(1));
    }

    #[test]
    fn off_axis_tangencies() {
        let line = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0]), w());
        let par = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        let m = Multigerm::new(vec![line.clone(), par]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::OffAxisTangency);
        let cub = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w());
        let m2 = Multigerm::new(vec![line, cub]).unwrap();
        assert_eq!(label_of(&m2), StratumLabel::L(2));
    }

    #[test]
    fn off_axis_triple_and_quadruple() {
        let l1 = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, 1.0]), w());
        let l2 = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, -1.0]), w());
        let l3 = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0]), w());
        let l4 = Branch::paired(poly(&[1.0]), poly(&[0.0, 1.0]), w());
        let m3 = Multigerm::new(vec![l1.clone(), l2.clone(), l3.clone()]).unwrap();
        assert_eq!(label_of(&m3), StratumLabel::OffAxisTriple);
        let m4 = Multigerm::new(vec![l1, l2, l3, l4]).unwrap();
        assert_eq!(label_of(&m4), StratumLabel::L(5));
    }

    #[test]
    fn strikethrough_strata() {
        // Cusp (t³, t²) at (1, 0) plus the line through it: L3.
        let cusp = Branch::paired(poly(&[1.0, 0.0, 0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        let line = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, 1.0]), w());
        let m = Multigerm::new(vec![cusp, line]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::L(3));
        // Tangency + line: L4.
        let flat = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0]), w());
        let par = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        let cut = Branch::paired(poly(&[1.0, 1.0]), poly(&[0.0, 1.0]), w());
        let m4 = Multigerm::new(vec![flat, par, cut]).unwrap();
        assert_eq!(label_of(&m4), StratumLabel::L(4));
    }

    #[test]
    fn fixed_cusps() {
        let f23 = Multigerm::single(Branch::fixed(
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&f23), StratumLabel::FixedCusp);
        let f25 = Multigerm::single(Branch::fixed(
            poly(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&f25), StratumLabel::L(7));
        let f34 = Multigerm::single(Branch::fixed(
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 0.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&f34), StratumLabel::L(8));
    }

    #[test]
    fn oblique_on_axis_cusp_is_l6() {
        // (t², t³ + t²) based on the axis.
        let m = Multigerm::single(Branch::paired(
            poly(&[0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&m), StratumLabel::L(6));
    }

    #[test]
    fn line_tangencies_on_axis() {
        let m1 = Multigerm::single(Branch::paired(poly(&[0.0, 0.0, 1.0]), poly(&[0.0, 1.0]), w()));
        assert_eq!(label_of(&m1), StratumLabel::OnAxisLineTangency);
        let m2 = Multigerm::single(Branch::paired(
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&m2), StratumLabel::L(14));
        // With a strikethrough line: L9.
        let tang = Branch::paired(poly(&[0.0, 0.0, 1.0]), poly(&[0.0, 1.0]), w());
        let cut = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 1.0]), w());
        let m9 = Multigerm::new(vec![tang, cut]).unwrap();
        assert_eq!(label_of(&m9), StratumLabel::L(9));
    }

    #[test]
    fn perpendicular_tangencies_on_axis() {
        let m1 = Multigerm::single(Branch::paired(
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&m1), StratumLabel::OnAxisPerpTangency);
        let m2 = Multigerm::single(Branch::paired(
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            w(),
        ));
        assert_eq!(label_of(&m2), StratumLabel::L(15));
        // With a strikethrough line: L10.
        let tang = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w());
        let cut = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 1.0]), w());
        let m10 = Multigerm::new(vec![tang, cut]).unwrap();
        assert_eq!(label_of(&m10), StratumLabel::L(10));
    }

    #[test]
    fn on_axis_double_points() {
        // Two oblique line pairs through distinct axis heights: regular.
        let a = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 2.0]), w());
        let b = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.3, 0.5]), w());
        let m = Multigerm::new(vec![a.clone(), b]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::Regular);
        // Same axis point: F1_6.
        let b0 = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.5]), w());
        let m6 = Multigerm::new(vec![a.clone(), b0.clone()]).unwrap();
        assert_eq!(label_of(&m6), StratumLabel::OnAxisDouble);
        // Three pairs: L11.
        let c0 = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.8]), w());
        let m11 = Multigerm::new(vec![a, b0, c0]).unwrap();
        assert_eq!(label_of(&m11), StratumLabel::L(11));
    }

    #[test]
    fn fixed_double_points() {
        let fixed = Branch::fixed(poly(&[0.0, 1.0]), poly(&[0.0]), w());
        let free = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.5]), w());
        let m = Multigerm::new(vec![fixed.clone(), free.clone()]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::FixedDouble);
        let free2 = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 2.0]), w());
        let m13 = Multigerm::new(vec![fixed, free, free2]).unwrap();
        assert_eq!(label_of(&m13), StratumLabel::L(13));
    }

    #[test]
    fn oblique_tangency_is_l16() {
        // In u = x+y, v = x−y coordinates the branches are v = 0 and
        // v = u²; in (x, y): (t, t) and ((t+t²)/2, (t−t²)/2).
        let line = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 1.0]), w());
        let curve = Branch::paired(poly(&[0.0, 0.5, 0.5]), poly(&[0.0, 0.5, -0.5]), w());
        let m = Multigerm::new(vec![line, curve]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::L(16));
    }

    #[test]
    fn fixed_point_tangency_is_l17() {
        let free = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), w());
        let fixed = Branch::fixed(poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        let m = Multigerm::new(vec![free, fixed]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::L(17));
    }

    #[test]
    fn fixed_through_line_tangency_is_l18() {
        let tang = Branch::paired(poly(&[0.0, 0.0, 1.0]), poly(&[0.0, 1.0]), w());
        let fixed = Branch::fixed(poly(&[0.0, 1.0]), poly(&[0.0]), w());
        let m = Multigerm::new(vec![tang, fixed]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::L(18));
    }

    #[test]
    fn fixed_strikethrough_cusp_is_l12() {
        let cusp = Branch::fixed(poly(&[0.0, 0.0, 0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        let line = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, 1.0]), w());
        let m = Multigerm::new(vec![cusp, line]).unwrap();
        assert_eq!(label_of(&m), StratumLabel::L(12));
    }

    #[test]
    fn coincidence_of_two_events() {
        let cusp = Branch::paired(poly(&[1.0, 0.0, 0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), w());
        let line = Branch::paired(poly(&[1.0, 1.0]), poly(&[2.0]), w());
        let par = Branch::paired(poly(&[1.0, 1.0]), poly(&[2.0, 0.0, 1.0]), w());
        let m = Multigerm::new(vec![cusp, line, par]).unwrap();
        let (label, ws) = classify(&m, TOL).unwrap();
        assert_eq!(ws.len(), 2);
        match label {
            StratumLabel::Coincidence(parts) => {
                assert!(parts.contains(&StratumLabel::OffAxisCusp));
                assert!(parts.contains(&StratumLabel::OffAxisTangency));
            }
            other => panic!("expected coincidence, got {other}"),
        }
    }

    #[test]
    fn margins_flip_sign_across_strata() {
        // Off-axis cusp family x = t³ + λt, y = t²: a cusp at λ = 0.
        let germ_at = |lam: f64| {
            Multigerm::single(Branch::paired(
                poly(&[1.0, lam, 0.0, 1.0]),
                poly(&[0.0, 0.0, 1.0]),
                w(),
            ))
        };
        let before = margins(&germ_at(-0.1), TOL).unwrap();
        let after = margins(&germ_at(0.1), TOL).unwrap();
        assert_eq!(before.len(), after.len());
        assert_eq!(before.len(), margin_kinds(&germ_at(0.1)).unwrap().len());
        assert!(before
            .iter()
            .zip(&after)
            .any(|(a, b)| a.signum() != b.signum()));

        // On-axis double family: two oblique strands whose axis heights
        // coincide at λ = 0.
        let pair_at = |lam: f64| {
            let l1 = Branch::paired(poly(&[0.0, 1.0]), poly(&[lam, 1.0]), w());
            let l2 = Branch::paired(poly(&[0.0, 1.0]), poly(&[0.0, -1.0]), w());
            Multigerm::new(vec![l1, l2]).unwrap()
        };
        let b2 = margins(&pair_at(-0.1), TOL).unwrap();
        let a2 = margins(&pair_at(0.1), TOL).unwrap();
        assert_eq!(b2.len(), a2.len());
        assert!(b2.iter().zip(&a2).any(|(a, b)| a.signum() != b.signum()));
    }

    #[test]
    fn pcodim_formulas() {
        assert_eq!(pcodim_cusp(2, 3), 1);
        assert_eq!(pcodim_cusp(2, 5), 2);
        assert_eq!(pcodim_cusp(2, 7), 3);
        assert_eq!(pcodim_fixed_cusp(2, 3), Some(1));
        assert_eq!(pcodim_fixed_cusp(2, 5), Some(2));
        assert_eq!(pcodim_fixed_cusp(3, 4), Some(2));
        assert_eq!(pcodim_fixed_tangency(1, 1), 2);
        assert_eq!(pcodim(&StratumLabel::OffAxisCusp).unwrap(), 1);
        assert_eq!(pcodim(&StratumLabel::L(8)).unwrap(), 2);
        assert_eq!(
            pcodim(&StratumLabel::Coincidence(vec![
                StratumLabel::OffAxisCusp,
                StratumLabel::FixedCusp
            ]))
            .unwrap(),
            2
        );
        assert!(pcodim(&StratumLabel::Regular).is_err());
    }
}
