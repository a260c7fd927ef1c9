//! Static layout drawing.

use std::fmt::Write as _;

use cellplan::scenario::UserSet;
use cellplan::Point;

use crate::output::Layout;

const WIDTH: f64 = 800.0;

pub fn render(layout: &Layout, users: Option<&UserSet>) -> String {
    let sc = &layout.scenario;
    let b = sc.bounds();
    let scale = WIDTH / b.width();
    let height = b.height() * scale;
    // y grows upwards in the plane, downwards in SVG
    let px = |p: &Point| ((p.x - b.x_min) * scale, (b.y_max - p.y) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.1}" viewBox="0 0 {WIDTH} {height:.1}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff" stroke="#000000"/>"##);
    for sub in &sc.subareas {
        let r = &sub.region;
        let (x, y) = px(&Point::new(r.x_min, r.y_max));
        let _ = writeln!(
            s,
            r##"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#999999" stroke-dasharray="4 3"/>"##,
            r.width() * scale,
            r.height() * scale
        );
    }
    for o in &sc.obstacles {
        let (x, y) = px(&Point::new(o.x_min, o.y_max));
        let _ = writeln!(
            s,
            r##"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="#555555"/>"##,
            o.width() * scale,
            o.height() * scale
        );
    }
    if let Some(users) = users {
        for p in &users.positions {
            let (x, y) = px(p);
            let _ = writeln!(s, r##"<circle cx="{x:.1}" cy="{y:.1}" r="1.2" fill="#7a7a7a"/>"##);
        }
    }
    let bs_pos = |id: usize| layout.base_stations[id].position;
    for l in &layout.backhaul_links {
        let (x1, y1) = px(&bs_pos(l.ubs));
        let (x2, y2) = px(&bs_pos(l.wbs));
        let color = if l.covered { "#1f77b4" } else { "#d62728" };
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{color}" stroke-width="1.5"/>"#
        );
    }
    if let Some(f) = &layout.fiber {
        for link in &f.links {
            if let Some(fap) = link.fap {
                let (x1, y1) = px(&bs_pos(link.wbs));
                let (x2, y2) = px(&sc.faps[fap]);
                let _ = writeln!(
                    s,
                    r##"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="#2ca02c" stroke-dasharray="5 3"/>"##
                );
            }
        }
        let (cx, cy) = px(&f.central_office);
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="#000000"/>"##,
            cx - 5.0,
            cy - 5.0
        );
    }
    for fap in &sc.faps {
        let (x, y) = px(fap);
        let _ = writeln!(
            s,
            r##"<polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="#2ca02c"/>"##,
            x,
            y - 6.0,
            x - 5.0,
            y + 4.0,
            x + 5.0,
            y + 4.0
        );
    }
    for bs in &layout.base_stations {
        let (x, y) = px(&bs.position);
        if bs.role == "wbs" {
            let _ = writeln!(
                s,
                r##"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="#d62728"/>"##,
                x - 5.0,
                y - 5.0
            );
        } else {
            let _ = writeln!(s, r##"<circle cx="{x:.1}" cy="{y:.1}" r="5" fill="#1f77b4"/>"##);
        }
    }
    s.push_str("</svg>\n");
    s
}
