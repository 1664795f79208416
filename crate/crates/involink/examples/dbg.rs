//! Scratch driver: probe planarity of candidate local wirings.

use involink::diagram::{
    Direction, End, MoveFamily, MoveLabel, Site, SymmetricDiagram, VertexKind,
};

fn circle() -> SymmetricDiagram {
    let mut d = SymmetricDiagram::new("circle");
    let u = d.push_on_axis(VertexKind::FixedPoint, None);
    let v = d.push_on_axis(VertexKind::FixedPoint, None);
    d.add_edge(End::new(u, 0), End::new(v, 0));
    d.add_edge(End::new(u, 1), End::new(v, 1));
    d
}

fn two_circles() -> SymmetricDiagram {
    let mut d = SymmetricDiagram::new("two");
    for _ in 0..2 {
        let u = d.push_on_axis(VertexKind::FixedPoint, None);
        let v = d.push_on_axis(VertexKind::FixedPoint, None);
        d.add_edge(End::new(u, 0), End::new(v, 0));
        d.add_edge(End::new(u, 1), End::new(v, 1));
    }
    d
}

fn main() {
    // Plain bigon: strand 2 wiring candidates.
    for (name, pin, bridge, pout) in [
        ("3-in 1-bridge", 3u8, (1u8, 3u8), 1u8),
        ("1-in 3-bridge", 1, (3, 3), 1),
        ("1-in 3-1-bridge", 1, (3, 1), 3),
        ("3-in 1-1-bridge", 3, (1, 1), 3),
    ] {
        let mut d = two_circles();
        let (c1, m1) = d.add_off_axis_pair(0);
        let (c2, m2) = d.add_off_axis_pair(0);
        for (b, w, x, cc1, cc2) in [(0u32, 2u32, 3u32, c1, c2), (0, 2, 3, m1, m2)] {
            let side = if cc1 == c1 { 1 } else { 0 };
            let e1 = d.edge_at(End::new(b, side)).unwrap();
            let e2 = d.edge_at(End::new(w, side)).unwrap();
            d.remove_edge(e1);
            d.remove_edge(e2);
            d.add_edge(End::new(b, side), End::new(cc1, 0));
            d.add_edge(End::new(cc1, 2), End::new(cc2, 0));
            d.add_edge(End::new(cc2, 2), End::new(b + 1, side));
            d.add_edge(End::new(w, side), End::new(cc1, pin));
            d.add_edge(End::new(cc1, bridge.0), End::new(cc2, bridge.1));
            d.add_edge(End::new(cc2, pout), End::new(x, side));
        }
        println!("plain-bigon {name}: {:?}", d.validate().first());
    }

    // Pair budding: q wiring candidates on the curl crossing.
    let base = {
        let d = circle();
        let lab = MoveLabel::with_variant(MoveFamily::R1, "below+", Direction::Forward);
        d.apply_move(&lab, &Site::at_vertices(&[0])).unwrap()
    };
    let c = 2u32;
    for (name, q_ports, rot) in [
        ("q(1,3)/(2,0) rot+1", (1u8, 3u8, 2u8, 0u8), 1u8),
        ("q(1,3)/(2,0) rot+3", (1, 3, 2, 0), 3),
        ("q(3,1)/(0,2) rot+1", (3, 1, 0, 2), 1),
        ("q(3,1)/(0,2) rot+3", (3, 1, 0, 2), 3),
        ("q(0,2)/(1,3) rot+1", (0, 2, 1, 3), 1),
        ("q(0,2)/(1,3) rot+3", (0, 2, 1, 3), 3),
        ("q(2,0)/(3,1) rot+1", (2, 0, 3, 1), 1),
        ("q(2,0)/(3,1) rot+3", (2, 0, 3, 1), 3),
    ] {
        let mut d = base.clone();
        let (q, mq) = d.add_off_axis_pair(0);
        let (qa, qb, qc, qd) = q_ports;
        for (pa, pb, k) in [(0u8, 3u8, q), (1, 2, mq)] {
            let ea = d.edge_at(End::new(c, pa)).unwrap();
            let eb = d.edge_at(End::new(c, pb)).unwrap();
            let x = d.edge(ea).unwrap().other(End::new(c, pa));
            let y = d.edge(eb).unwrap().other(End::new(c, pb));
            d.remove_edge(ea);
            d.remove_edge(eb);
            d.add_edge(End::new(c, pa), End::new(k, qa));
            d.add_edge(End::new(k, qb), x);
            d.add_edge(End::new(c, pb), End::new(k, qc));
            d.add_edge(End::new(k, qd), y);
        }
        // rotate c and flip its over/type tag
        let edge_ids: Vec<u32> = d.edges().map(|e| e.id).collect();
        let mut d2 = SymmetricDiagram::parse(&d.emit()).unwrap();
        let _ = edge_ids;
        // relabel via parse round trip is identity; emulate rotation here:
        let text = d2
            .emit()
            .lines()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join("\n");
        let _ = text;
        // simpler: rotate by editing the emitted text is messy; use the
        // public API instead: none exists, so replicate with a manual pass.
        let rotated: Vec<(u32, End, End)> = d2
            .edges()
            .map(|e| {
                let f = |end: End| {
                    if end.v == c {
                        End::new(c, (end.port + rot) % 4)
                    } else {
                        end
                    }
                };
                (e.id, f(e.a), f(e.b))
            })
            .collect();
        for (id, a, b) in rotated {
            d2.remove_edge(id);
            let _ = (a, b);
            d2.add_edge(a, b);
        }
        if let Some(v) = d2.vertices().find(|v| v.id == c) {
            let o = v.over.unwrap();
            let new_o = (o ^ 1 + 2) % 4;
            let _ = new_o;
        }
        // set over via parse: skip -- validation of over tag consistency
        // only needs the B-type port map; patch through text:
        let patched = d2
            .emit()
            .replace(&format!("v{c} type=oncross mirror=v{c} over=0"),
                     &format!("v{c} type=oncross mirror=v{c} over=3"));
        let d3 = SymmetricDiagram::parse(&patched).unwrap();
        println!("budding {name}: {:?}", d3.validate().first());
    }
}
