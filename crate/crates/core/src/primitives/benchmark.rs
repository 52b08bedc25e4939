use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::builder::SoupBuilder;
use super::GenerateError;
use crate::features::{FeatureInstance, FeatureKind, FeatureManifest, ManifestSource};
use crate::mesh_io::TriangleMesh;

/// Clearance around every feature; each tile adds half of it on both sides.
const GAP_MM: f64 = 2.0;
const WALL_LENGTH_MM: f64 = 10.0;
const SUPPORTED_WALL_HEIGHT_MM: f64 = 5.0;
const UNSUPPORTED_WALL_HEIGHT_MM: f64 = 10.0;
const FIN_BASE_MM: f64 = 2.0;
const FIN_REACH_MM: f64 = 4.0;
const FIN_THICKNESS_MM: f64 = 1.5;
const FIN_WIDTH_MM: f64 = 6.0;
const BRIDGE_SPAN_MM: f64 = 8.0;
const BRIDGE_LEG_MM: f64 = 1.5;
const BRIDGE_CLEARANCE_MM: f64 = 3.0;
const BRIDGE_DEPTH_MM: f64 = 6.0;
const PIN_HEIGHT_MM: f64 = 8.0;
const DOME_SEGMENTS: usize = 64;
const DOME_RINGS: usize = 16;
const DEFAULT_CIRCLE_SEGMENTS: u32 = 32;

/// Feature ladders for a single-plate test artifact.
///
/// Features are laid out left to right along +x on a plate resting on z = 0,
/// in field order. Every ladder must be strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkSpec {
    /// Supported walls, thickness in mm.
    pub wall_thickness_ladder: Vec<f64>,
    /// Taller free-standing walls, thickness in mm.
    pub unsupported_wall_ladder: Vec<f64>,
    pub hole_diameter_ladder: Vec<f64>,
    /// Slab thickness of horizontal bridges, mm.
    pub bridge_thickness_ladder: Vec<f64>,
    /// Underside angle of overhang fins above the horizontal, degrees.
    pub overhang_angle_ladder: Vec<f64>,
    /// Edge of embossed cubes, mm.
    pub emboss_sizes: Vec<f64>,
    /// Width and depth of engraved square pockets, mm.
    pub engrave_sizes: Vec<f64>,
    pub pin_diameter_ladder: Vec<f64>,
    /// Hemispherical bumps; they carry no manifest entry.
    pub dome_radii: Vec<f64>,
    /// Length (x), depth (y) and thickness (z), mm.
    pub plate: [f64; 3],
    /// Polygon sides used for holes and pins; a multiple of 4.
    pub circle_segments: u32,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self::bare([40.0, 20.0, 3.0])
    }
}

impl BenchmarkSpec {
    /// Plate without features.
    pub fn bare(plate: [f64; 3]) -> Self {
        Self {
            wall_thickness_ladder: Vec::new(),
            unsupported_wall_ladder: Vec::new(),
            hole_diameter_ladder: Vec::new(),
            bridge_thickness_ladder: Vec::new(),
            overhang_angle_ladder: Vec::new(),
            emboss_sizes: Vec::new(),
            engrave_sizes: Vec::new(),
            pin_diameter_ladder: Vec::new(),
            dome_radii: Vec::new(),
            plate,
            circle_segments: DEFAULT_CIRCLE_SEGMENTS,
        }
    }

    /// Thin walls, small holes, bridges and fine surface details.
    pub fn b1() -> Self {
        Self {
            wall_thickness_ladder: vec![0.3, 0.5, 0.8, 1.0, 1.5],
            unsupported_wall_ladder: vec![1.0],
            hole_diameter_ladder: vec![0.2, 0.5, 1.0, 1.5, 2.0],
            bridge_thickness_ladder: vec![0.3, 0.5, 1.0, 1.5, 2.0],
            emboss_sizes: vec![0.5, 0.75, 1.0],
            engrave_sizes: vec![0.5, 0.75, 1.0],
            ..Self::bare([0.0, 16.0, 3.0])
        }
        .fit_plate_length()
    }

    /// Free-standing walls, an overhang fan and a pin.
    pub fn b2() -> Self {
        Self {
            wall_thickness_ladder: vec![1.0],
            unsupported_wall_ladder: vec![0.3, 0.5, 1.0, 1.5, 2.0],
            overhang_angle_ladder: vec![10.0, 20.0, 30.0, 40.0, 50.0],
            engrave_sizes: vec![1.0],
            pin_diameter_ladder: vec![1.0],
            ..Self::bare([0.0, 16.0, 3.0])
        }
        .fit_plate_length()
    }

    /// A supported wall and two hemispheres of different radii.
    pub fn b3() -> Self {
        Self {
            wall_thickness_ladder: vec![1.0],
            dome_radii: vec![6.0, 15.0],
            ..Self::bare([0.0, 34.0, 3.0])
        }
        .fit_plate_length()
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "b1" => Some(Self::b1()),
            "b2" => Some(Self::b2()),
            "b3" => Some(Self::b3()),
            _ => None,
        }
    }

    /// Plate length the feature tiles need.
    pub fn required_length(&self) -> f64 {
        self.attachments().iter().map(|a| a.width()).sum()
    }

    /// Sets the plate length to exactly fit the features, with a 10 mm floor.
    pub fn fit_plate_length(mut self) -> Self {
        self.plate[0] = self.required_length().max(5.0 * GAP_MM);
        self
    }

    fn attachments(&self) -> Vec<Attachment> {
        let mut out = Vec::new();
        out.extend(self.wall_thickness_ladder.iter().map(|&t| Attachment::Block {
            kind: FeatureKind::SupportedWall,
            d: t,
            wx: t,
            wy: WALL_LENGTH_MM,
            height: SUPPORTED_WALL_HEIGHT_MM,
        }));
        out.extend(self.unsupported_wall_ladder.iter().map(|&t| Attachment::Block {
            kind: FeatureKind::UnsupportedWall,
            d: t,
            wx: t,
            wy: WALL_LENGTH_MM,
            height: UNSUPPORTED_WALL_HEIGHT_MM,
        }));
        out.extend(self.hole_diameter_ladder.iter().map(|&d| Attachment::Hole { d }));
        out.extend(self.bridge_thickness_ladder.iter().map(|&t| Attachment::Bridge { t }));
        out.extend(self.overhang_angle_ladder.iter().map(|&deg| Attachment::Fin { deg }));
        out.extend(self.emboss_sizes.iter().map(|&e| Attachment::Block {
            kind: FeatureKind::EmbossedDetail,
            d: e,
            wx: e,
            wy: e,
            height: e,
        }));
        out.extend(self.engrave_sizes.iter().map(|&e| Attachment::Pocket { e }));
        out.extend(self.pin_diameter_ladder.iter().map(|&d| Attachment::Pin { d }));
        out.extend(self.dome_radii.iter().map(|&r| Attachment::Dome { r }));
        out
    }

    fn validate(&self) -> Result<(), GenerateError> {
        for (name, value) in ["plate length", "plate depth", "plate thickness"].into_iter().zip(self.plate) {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GenerateError::NonPositiveDimension { name, value });
            }
        }
        if self.circle_segments < 8 || !self.circle_segments.is_multiple_of(4) {
            return Err(GenerateError::ResolutionTooLow {
                resolution: self.circle_segments,
                minimum: 8,
            });
        }
        let ladders: [(&'static str, &Vec<f64>, f64); 9] = [
            ("supported wall", &self.wall_thickness_ladder, f64::INFINITY),
            ("unsupported wall", &self.unsupported_wall_ladder, f64::INFINITY),
            ("hole diameter", &self.hole_diameter_ladder, f64::INFINITY),
            ("bridge thickness", &self.bridge_thickness_ladder, f64::INFINITY),
            ("overhang angle", &self.overhang_angle_ladder, 90.0),
            ("emboss", &self.emboss_sizes, f64::INFINITY),
            ("engrave", &self.engrave_sizes, self.plate[2]),
            ("pin diameter", &self.pin_diameter_ladder, f64::INFINITY),
            ("dome radius", &self.dome_radii, f64::INFINITY),
        ];
        for (ladder, values, upper) in ladders {
            if let Some(&value) = values.iter().find(|v| !(**v > 0.0 && **v < upper)) {
                return Err(GenerateError::LadderValueOutOfRange { ladder, value });
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GenerateError::LadderNotIncreasing { ladder });
            }
        }
        let attachments = self.attachments();
        for a in &attachments {
            if a.depth() > self.plate[1] {
                return Err(GenerateError::PlateTooNarrow {
                    label: a.label(),
                    required: a.depth(),
                    available: self.plate[1],
                });
            }
        }
        let required = self.required_length();
        if required > self.plate[0] {
            return Err(GenerateError::PlateTooShort {
                required,
                available: self.plate[0],
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedBenchmark {
    pub mesh: TriangleMesh,
    /// One entry per generated feature with `d` equal to its ladder value.
    pub manifest: FeatureManifest,
}

#[derive(Debug, Clone, Copy)]
enum Attachment {
    Block {
        kind: FeatureKind,
        d: f64,
        wx: f64,
        wy: f64,
        height: f64,
    },
    Pocket { e: f64 },
    Fin { deg: f64 },
    Bridge { t: f64 },
    Hole { d: f64 },
    Pin { d: f64 },
    Dome { r: f64 },
}

impl Attachment {
    /// Tile length along x, clearance included.
    fn width(&self) -> f64 {
        GAP_MM
            + match *self {
                Attachment::Block { wx, .. } => wx,
                Attachment::Pocket { e } => e,
                Attachment::Fin { .. } => FIN_BASE_MM + FIN_REACH_MM,
                Attachment::Bridge { .. } => BRIDGE_SPAN_MM,
                Attachment::Hole { d } | Attachment::Pin { d } => d,
                Attachment::Dome { r } => 2.0 * r,
            }
    }

    fn depth(&self) -> f64 {
        GAP_MM
            + match *self {
                Attachment::Block { wy, .. } => wy,
                Attachment::Pocket { e } => e,
                Attachment::Fin { .. } => FIN_WIDTH_MM,
                Attachment::Bridge { .. } => BRIDGE_DEPTH_MM,
                Attachment::Hole { d } | Attachment::Pin { d } => d,
                Attachment::Dome { r } => 2.0 * r,
            }
    }

    fn feature(&self) -> Option<FeatureInstance> {
        let (kind, d) = match *self {
            Attachment::Block { kind, d, .. } => (kind, d),
            Attachment::Pocket { e } => (FeatureKind::EngravedDetail, e),
            Attachment::Fin { deg } => (FeatureKind::Overhang, deg),
            Attachment::Bridge { t } => (FeatureKind::Bridge, t),
            Attachment::Hole { d } => (FeatureKind::ThroughHole, d),
            Attachment::Pin { d } => (FeatureKind::Pin, d),
            Attachment::Dome { .. } => return None,
        };
        Some(FeatureInstance::new(kind, d, format!("{kind}_{d}")))
    }

    fn label(&self) -> String {
        match self.feature() {
            Some(f) => f.label,
            None => match self {
                Attachment::Dome { r } => format!("dome_{r}"),
                _ => unreachable!(),
            },
        }
    }
}

/// x coordinates where tile faces meet the y = 0 and y = depth plate edges.
#[derive(Default)]
struct EdgePoints {
    front_top: Vec<f64>,
    back_top: Vec<f64>,
    front_bottom: Vec<f64>,
    back_bottom: Vec<f64>,
}

fn sorted_unique(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn circle_point(cx: f64, cy: f64, r: f64, j: usize, n: usize, z: f64) -> Point3<f64> {
    let a = TAU * (j % n) as f64 / n as f64;
    Point3::new(cx + r * a.cos(), cy + r * a.sin(), z)
}

/// Builds the plate with every ladder feature and the matching manifest.
pub fn gen_benchmark(spec: &BenchmarkSpec) -> Result<GeneratedBenchmark, GenerateError> {
    spec.validate()?;
    let [length, depth, thick] = spec.plate;
    let mut b = SoupBuilder::new();
    let mut edges = EdgePoints::default();
    let mut features = Vec::new();

    let mut x0 = 0.0;
    for a in spec.attachments() {
        let x1 = x0 + a.width();
        emit_tile(&mut b, &mut edges, &a, x0, x1, depth, thick, spec.circle_segments as usize);
        features.extend(a.feature());
        x0 = x1;
    }
    if length > x0 {
        let up = Vector3::z();
        b.quad(
            Point3::new(x0, 0.0, thick),
            Point3::new(length, 0.0, thick),
            Point3::new(length, depth, thick),
            Point3::new(x0, depth, thick),
            up,
        );
        b.quad(
            Point3::new(x0, 0.0, 0.0),
            Point3::new(length, 0.0, 0.0),
            Point3::new(length, depth, 0.0),
            Point3::new(x0, depth, 0.0),
            -up,
        );
        for list in [&mut edges.front_top, &mut edges.back_top, &mut edges.front_bottom, &mut edges.back_bottom] {
            list.extend([x0, length]);
        }
    }

    // Long sides carry every tile boundary so no edge is left hanging.
    for (y, top, bottom, out) in [
        (0.0, &edges.front_top, &edges.front_bottom, -Vector3::y()),
        (depth, &edges.back_top, &edges.back_bottom, Vector3::y()),
    ] {
        let mut ring: Vec<Point3<f64>> = sorted_unique(bottom.clone())
            .into_iter()
            .map(|x| Point3::new(x, y, 0.0))
            .collect();
        ring.extend(sorted_unique(top.clone()).into_iter().rev().map(|x| Point3::new(x, y, thick)));
        b.convex_polygon(&ring, out);
    }
    for (x, out) in [(0.0, -Vector3::x()), (length, Vector3::x())] {
        b.quad(
            Point3::new(x, 0.0, 0.0),
            Point3::new(x, depth, 0.0),
            Point3::new(x, depth, thick),
            Point3::new(x, 0.0, thick),
            out,
        );
    }

    let manifest = FeatureManifest::new(ManifestSource::Generated, features)
        .expect("ladder values are positive and labels unique");
    Ok(GeneratedBenchmark {
        mesh: b.finish().with_name("benchmark"),
        manifest,
    })
}

#[allow(clippy::too_many_arguments)]
fn emit_tile(
    b: &mut SoupBuilder,
    edges: &mut EdgePoints,
    a: &Attachment,
    x0: f64,
    x1: f64,
    depth: f64,
    thick: f64,
    segments: usize,
) {
    let xa = x0 + GAP_MM / 2.0;
    let up = Vector3::z();
    edges.front_bottom.extend([x0, x1]);
    edges.back_bottom.extend([x0, x1]);
    let centred = |extent: f64| {
        let y0 = (depth - extent) / 2.0;
        (y0, y0 + extent)
    };
    match *a {
        Attachment::Block { wx, wy, height, .. } => {
            let (y0, y1) = centred(wy);
            rect_tile(b, edges, x0, x1, depth, thick, &[(xa, xa + wx)], y0, y1);
            plain_bottom(b, x0, x1, depth);
            box_walls(b, (xa, xa + wx), (y0, y1), thick, thick + height, true);
        }
        Attachment::Pocket { e } => {
            let (y0, y1) = centred(e);
            rect_tile(b, edges, x0, x1, depth, thick, &[(xa, xa + e)], y0, y1);
            plain_bottom(b, x0, x1, depth);
            box_walls(b, (xa, xa + e), (y0, y1), thick, thick - e, false);
        }
        Attachment::Fin { deg } => {
            let (y0, y1) = centred(FIN_WIDTH_MM);
            rect_tile(b, edges, x0, x1, depth, thick, &[(xa, xa + FIN_BASE_MM)], y0, y1);
            plain_bottom(b, x0, x1, depth);
            let rise = FIN_REACH_MM * deg.to_radians().tan();
            let tip = xa + FIN_BASE_MM + FIN_REACH_MM;
            let profile = [
                (xa, thick),
                (xa + FIN_BASE_MM, thick),
                (tip, thick + rise),
                (tip, thick + rise + FIN_THICKNESS_MM),
                (xa, thick + rise + FIN_THICKNESS_MM),
            ];
            extrude_profile(b, &profile, &[vec![0, 1, 2, 3, 4]], (y0, y1), &[1, 2, 3, 4]);
        }
        Attachment::Bridge { t } => {
            let (y0, y1) = centred(BRIDGE_DEPTH_MM);
            let xe = xa + BRIDGE_SPAN_MM;
            let legs = [(xa, xa + BRIDGE_LEG_MM), (xe - BRIDGE_LEG_MM, xe)];
            rect_tile(b, edges, x0, x1, depth, thick, &legs, y0, y1);
            plain_bottom(b, x0, x1, depth);
            let under = thick + BRIDGE_CLEARANCE_MM;
            let top = under + t;
            let profile = [
                (xa, thick),
                (xa + BRIDGE_LEG_MM, thick),
                (xa + BRIDGE_LEG_MM, under),
                (xe - BRIDGE_LEG_MM, under),
                (xe - BRIDGE_LEG_MM, thick),
                (xe, thick),
                (xe, top),
                (xa, top),
            ];
            let caps = [vec![0, 1, 2, 7], vec![2, 3, 6, 7], vec![4, 5, 6, 3]];
            extrude_profile(b, &profile, &caps, (y0, y1), &[1, 2, 3, 5, 6, 7]);
        }
        Attachment::Hole { d } => {
            let (c, r) = ((xa + d / 2.0, depth / 2.0), d / 2.0);
            circle_tile(b, edges, x0, x1, depth, thick, c, r, segments, true);
            circle_tile(b, edges, x0, x1, depth, 0.0, c, r, segments, false);
            for j in 0..segments {
                let p = |k: usize, z: f64| circle_point(c.0, c.1, r, k, segments, z);
                let mid = (p(j, 0.0).coords + p(j + 1, 0.0).coords) / 2.0;
                b.quad(p(j, thick), p(j + 1, thick), p(j + 1, 0.0), p(j, 0.0), Vector3::new(c.0 - mid.x, c.1 - mid.y, 0.0));
            }
        }
        Attachment::Pin { d } => {
            let (c, r) = ((xa + d / 2.0, depth / 2.0), d / 2.0);
            circle_tile(b, edges, x0, x1, depth, thick, c, r, segments, true);
            plain_bottom(b, x0, x1, depth);
            let top = thick + PIN_HEIGHT_MM;
            let p = |k: usize, z: f64| circle_point(c.0, c.1, r, k, segments, z);
            for j in 0..segments {
                let mid = (p(j, 0.0).coords + p(j + 1, 0.0).coords) / 2.0;
                b.quad(p(j, thick), p(j + 1, thick), p(j + 1, top), p(j, top), Vector3::new(mid.x - c.0, mid.y - c.1, 0.0));
                b.triangle(Point3::new(c.0, c.1, top), p(j, top), p(j + 1, top), up);
            }
        }
        Attachment::Dome { r } => {
            let c = (xa + r, depth / 2.0);
            circle_tile(b, edges, x0, x1, depth, thick, c, r, DOME_SEGMENTS, true);
            plain_bottom(b, x0, x1, depth);
            let centre = Point3::new(c.0, c.1, thick);
            let ring = |i: usize, j: usize| {
                if i == 0 {
                    return circle_point(c.0, c.1, r, j, DOME_SEGMENTS, thick);
                }
                if i == DOME_RINGS {
                    return Point3::new(c.0, c.1, thick + r);
                }
                let a = FRAC_PI_2 * i as f64 / DOME_RINGS as f64;
                circle_point(c.0, c.1, r * a.cos(), j, DOME_SEGMENTS, thick + r * a.sin())
            };
            for i in 0..DOME_RINGS {
                for j in 0..DOME_SEGMENTS {
                    let (p00, p01, p10, p11) = (ring(i, j), ring(i, j + 1), ring(i + 1, j), ring(i + 1, j + 1));
                    let out = (p00 - centre) + (p11 - centre);
                    if i + 1 == DOME_RINGS {
                        b.triangle(p00, p01, p10, out);
                    } else {
                        b.quad(p00, p01, p11, p10, out);
                    }
                }
            }
        }
    }
}

fn plain_bottom(b: &mut SoupBuilder, x0: f64, x1: f64, depth: f64) {
    b.quad(
        Point3::new(x0, 0.0, 0.0),
        Point3::new(x1, 0.0, 0.0),
        Point3::new(x1, depth, 0.0),
        Point3::new(x0, depth, 0.0),
        -Vector3::z(),
    );
}

/// Tile top with rectangular footprints cut out. Footprints share one
/// y-range and are sorted along x.
#[allow(clippy::too_many_arguments)]
fn rect_tile(
    b: &mut SoupBuilder,
    edges: &mut EdgePoints,
    x0: f64,
    x1: f64,
    depth: f64,
    z: f64,
    feet: &[(f64, f64)],
    y0: f64,
    y1: f64,
) {
    let up = Vector3::z();
    let p = |x: f64, y: f64| Point3::new(x, y, z);
    let xa = feet[0].0;
    let xb = feet[feet.len() - 1].1;
    let cuts: Vec<f64> = feet.iter().flat_map(|&(a, b)| [a, b]).collect();

    b.convex_polygon(&[p(x0, 0.0), p(xa, 0.0), p(xa, y0), p(xa, y1), p(xa, depth), p(x0, depth)], up);
    b.convex_polygon(&[p(xb, 0.0), p(x1, 0.0), p(x1, depth), p(xb, depth), p(xb, y1), p(xb, y0)], up);
    let mut front = vec![p(xa, 0.0), p(xb, 0.0)];
    front.extend(cuts.iter().rev().map(|&x| p(x, y0)));
    b.convex_polygon(&front, up);
    let mut back: Vec<_> = cuts.iter().map(|&x| p(x, y1)).collect();
    back.extend([p(xb, depth), p(xa, depth)]);
    b.convex_polygon(&back, up);
    for w in feet.windows(2) {
        let (l, r) = (w[0].1, w[1].0);
        b.quad(p(l, y0), p(r, y0), p(r, y1), p(l, y1), up);
    }
    edges.front_top.extend([x0, xa, xb, x1]);
    edges.back_top.extend([x0, xa, xb, x1]);
}

/// Tile face at height `z` with a circular opening, fanned from each corner.
#[allow(clippy::too_many_arguments)]
fn circle_tile(
    b: &mut SoupBuilder,
    edges: &mut EdgePoints,
    x0: f64,
    x1: f64,
    depth: f64,
    z: f64,
    c: (f64, f64),
    r: f64,
    n: usize,
    top: bool,
) {
    let out = if top { Vector3::z() } else { -Vector3::z() };
    let corners = [
        Point3::new(x1, depth, z),
        Point3::new(x0, depth, z),
        Point3::new(x0, 0.0, z),
        Point3::new(x1, 0.0, z),
    ];
    let quarter = n / 4;
    for q in 0..4 {
        for j in q * quarter..(q + 1) * quarter {
            b.triangle(corners[q], circle_point(c.0, c.1, r, j, n, z), circle_point(c.0, c.1, r, j + 1, n, z), out);
        }
        b.triangle(
            corners[q],
            corners[(q + 1) % 4],
            circle_point(c.0, c.1, r, (q + 1) * quarter, n, z),
            out,
        );
    }
    if top {
        edges.front_top.extend([x0, x1]);
        edges.back_top.extend([x0, x1]);
    }
}

/// Vertical walls around a rectangular footprint plus a horizontal cap at
/// `z1`. Raised blocks face away from the footprint, pockets face into it.
fn box_walls(b: &mut SoupBuilder, xs: (f64, f64), ys: (f64, f64), z0: f64, z1: f64, raised: bool) {
    let ring = [(xs.0, ys.0), (xs.1, ys.0), (xs.1, ys.1), (xs.0, ys.1)];
    let centre = ((xs.0 + xs.1) / 2.0, (ys.0 + ys.1) / 2.0);
    let sign = if raised { 1.0 } else { -1.0 };
    for k in 0..4 {
        let (u, v) = (ring[k], ring[(k + 1) % 4]);
        let mid = ((u.0 + v.0) / 2.0, (u.1 + v.1) / 2.0);
        b.quad(
            Point3::new(u.0, u.1, z0),
            Point3::new(v.0, v.1, z0),
            Point3::new(v.0, v.1, z1),
            Point3::new(u.0, u.1, z1),
            Vector3::new(mid.0 - centre.0, mid.1 - centre.1, 0.0) * sign,
        );
    }
    let cap = ring.map(|(x, y)| Point3::new(x, y, z1));
    b.quad(cap[0], cap[1], cap[2], cap[3], Vector3::z());
}

/// Extrudes an x–z profile between `ys`. `caps` splits the profile into
/// convex pieces; `sides` lists the starting vertex of every profile edge that
/// gets a face (edges on the plate stay open).
fn extrude_profile(b: &mut SoupBuilder, profile: &[(f64, f64)], caps: &[Vec<usize>], ys: (f64, f64), sides: &[usize]) {
    for (y, out) in [(ys.0, -Vector3::y()), (ys.1, Vector3::y())] {
        for cap in caps {
            let ring: Vec<_> = cap.iter().map(|&k| Point3::new(profile[k].0, y, profile[k].1)).collect();
            b.convex_polygon(&ring, out);
        }
    }
    // Outward normal of an edge of a counter-clockwise x–z loop.
    let n = profile.len();
    for &k in sides {
        let (p, q) = (profile[k], profile[(k + 1) % n]);
        let out = Vector3::new(q.1 - p.1, 0.0, -(q.0 - p.0));
        b.quad(
            Point3::new(p.0, ys.0, p.1),
            Point3::new(q.0, ys.0, q.1),
            Point3::new(q.0, ys.1, q.1),
            Point3::new(p.0, ys.1, p.1),
            out,
        );
    }
}
