//! Static 2-D figures: unit sphere, balls, net points and an optional marked
//! point, on a fixed 800×800 canvas.

use std::fmt::Write;

use ballcover::{Ball64, Space64, Vector64};

use crate::report::CliError;

const SIZE: f64 = 800.0;
const SEGMENTS: usize = 720;

/// The unit sphere sampled at `SEGMENTS` equally spaced angles.
fn sphere(space: &Space64) -> Result<Vec<[f64; 2]>, CliError> {
    (0..SEGMENTS)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / SEGMENTS as f64;
            let u = Vector64::from_f64s(&[t.cos(), t.sin()]).map_err(CliError::from)?;
            let n = space.norm(&u).map_err(CliError::from)?;
            Ok([t.cos() / n, t.sin() / n])
        })
        .collect()
}

pub struct Figure<'a> {
    pub space: &'a Space64,
    pub balls: &'a [Ball64],
    pub net: &'a [Vector64],
    pub marked: Option<&'a Vector64>,
}

pub fn render(fig: &Figure<'_>) -> Result<String, CliError> {
    if fig.space.dim() != 2 {
        return Err(CliError::precondition("--svg needs a 2-dimensional space"));
    }
    let unit = sphere(fig.space)?;
    let reach = unit.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    let mut extent: f64 = reach;
    for b in fig.balls {
        let c = b.center.as_slice();
        extent = extent.max(c[0].abs().max(c[1].abs()) + b.radius * reach);
    }
    let scale = 0.45 * SIZE / (extent * 1.05);
    let px = |p: [f64; 2]| (SIZE / 2.0 + p[0] * scale, SIZE / 2.0 - p[1] * scale);
    let polygon = |pts: &mut dyn Iterator<Item = [f64; 2]>| {
        let mut s = String::new();
        for p in pts {
            let (x, y) = px(p);
            let _ = write!(s, "{x:.3},{y:.3} ");
        }
        s.trim_end().to_string()
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (ox, oy) = px([0.0, 0.0]);
    let _ = writeln!(out, r##"<line x1="0" y1="{oy:.3}" x2="{SIZE}" y2="{oy:.3}" stroke="#ddd"/>"##);
    let _ = writeln!(out, r##"<line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{SIZE}" stroke="#ddd"/>"##);
    for b in fig.balls {
        let c = b.center.as_slice();
        let pts = polygon(&mut unit.iter().map(|u| [c[0] + b.radius * u[0], c[1] + b.radius * u[1]]));
        let _ = writeln!(out, r##"<polygon points="{pts}" fill="#4a90d9" fill-opacity="0.15" stroke="#4a90d9"/>"##);
        let (cx, cy) = px([c[0], c[1]]);
        let _ = writeln!(out, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="3" fill="#4a90d9"/>"##);
    }
    let pts = polygon(&mut unit.iter().copied());
    let _ = writeln!(out, r#"<polygon points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>"#);
    for p in fig.net {
        let (x, y) = px([p.as_slice()[0], p.as_slice()[1]]);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="1" fill="#555"/>"##);
    }
    if let Some(p) = fig.marked {
        let (x, y) = px([p.as_slice()[0], p.as_slice()[1]]);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="6" fill="#d0021b"/>"##);
    }
    let _ = writeln!(out, r##"<circle cx="{ox:.3}" cy="{oy:.3}" r="2.5" fill="black"/>"##);
    out.push_str("</svg>\n");
    Ok(out)
}
