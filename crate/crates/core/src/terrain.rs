//! Analytic terrain: a flat base plane at z = 0 plus non-overlapping features.
//!
//! Height queries serve plotting and scenario geometry; contact uses
//! closest-point queries against each surface so that wheels can roll over
//! step edges and climb vertical faces.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};

/// Coulomb coefficient between wheels and regolith.
pub const SOIL_FRICTION: f64 = 0.4;
/// Coulomb coefficient between wheels and rocks, outcrops and steps.
pub const OBSTACLE_FRICTION: f64 = 1.0;

/// Wavelengths of the outcrop harmonics, m.
const OUTCROP_WAVELENGTHS: [f64; 6] = [0.15, 0.27, 0.39, 0.51, 0.63, 0.75];
/// Length of the raised-cosine taper at each outcrop end, m.
const OUTCROP_TAPER: f64 = 0.15;
/// Resolution of the scan that fixes the outcrop peak height, m.
const OUTCROP_SCAN_STEP: f64 = 0.001;

/// Deterministic bumpy profile of a partially exposed bedrock strip.
///
/// Six sinusoids with seeded phases are summed, rectified, tapered to zero at
/// both ends and scaled so the peak over a 1 mm scan equals `max_height`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcropProfile {
    length: f64,
    phases: [f64; 6],
    scale: f64,
}

impl OutcropProfile {
    pub fn new(seed: u64, length: f64, max_height: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phases = std::array::from_fn(|_| rng.random_range(0.0..2.0 * PI));
        let mut profile = OutcropProfile {
            length,
            phases,
            scale: 1.0,
        };
        let n = (length / OUTCROP_SCAN_STEP).round().max(1.0) as usize;
        let peak = (0..=n)
            .map(|i| profile.height(i as f64 * length / n as f64))
            .fold(0.0, f64::max);
        profile.scale = if peak > 0.0 { max_height / peak } else { 0.0 };
        profile
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    fn harmonics(&self, x: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut slope = 0.0;
        for (lambda, phase) in OUTCROP_WAVELENGTHS.iter().zip(self.phases.iter()) {
            let k = 2.0 * PI / lambda;
            let (s, c) = (k * x + phase).sin_cos();
            value += lambda * s;
            slope += lambda * k * c;
        }
        (value, slope)
    }

    fn taper(&self, x: f64) -> (f64, f64) {
        let band = OUTCROP_TAPER.min(0.5 * self.length);
        let (d, sign) = if x < 0.5 * self.length {
            (x, 1.0)
        } else {
            (self.length - x, -1.0)
        };
        if d >= band {
            return (1.0, 0.0);
        }
        let t = d / band;
        let w = 0.5 - 0.5 * (PI * t).cos();
        let dw = 0.5 * PI * (PI * t).sin() / band * sign;
        (w, dw)
    }

    /// Height at `x` along the strip; zero outside `[0, length]`.
    pub fn height(&self, x: f64) -> f64 {
        self.height_and_slope(x).0
    }

    pub fn height_and_slope(&self, x: f64) -> (f64, f64) {
        if !(0.0..=self.length).contains(&x) {
            return (0.0, 0.0);
        }
        let (raw, raw_slope) = self.harmonics(x);
        if raw <= 0.0 {
            return (0.0, 0.0);
        }
        let (w, dw) = self.taper(x);
        (self.scale * raw * w, self.scale * (raw_slope * w + raw * dw))
    }
}

/// Outcrop height with the default 1.5 m strip and 10 cm peak.
pub fn outcrop_profile(seed: u64, x_local: f64) -> f64 {
    OutcropProfile::new(seed, 1.5, 0.10).height(x_local)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureShape {
    /// Full-width step rising to `height` for x ≥ `face_x`.
    Step { face_x: f64, height: f64 },
    /// Hemispherical rock resting on the base plane.
    Hemisphere { center: [f64; 2], radius: f64 },
    /// Bumpy strip of width `width` centred on `center_y`.
    Outcrop {
        start_x: f64,
        center_y: f64,
        width: f64,
        profile: OutcropProfile,
    },
    /// Full-width ramp of `length` (measured along the incline) followed by
    /// a plateau.
    Slope { start_x: f64, length: f64, angle: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub shape: FeatureShape,
    pub friction: f64,
}

impl Feature {
    pub fn step(face_x: f64, height: f64) -> Self {
        Feature {
            shape: FeatureShape::Step { face_x, height },
            friction: OBSTACLE_FRICTION,
        }
    }

    pub fn hemisphere(center: [f64; 2], radius: f64) -> Self {
        Feature {
            shape: FeatureShape::Hemisphere { center, radius },
            friction: OBSTACLE_FRICTION,
        }
    }

    pub fn outcrop(start_x: f64, center_y: f64, width: f64, length: f64, max_height: f64, seed: u64) -> Self {
        Feature {
            shape: FeatureShape::Outcrop {
                start_x,
                center_y,
                width,
                profile: OutcropProfile::new(seed, length, max_height),
            },
            friction: OBSTACLE_FRICTION,
        }
    }

    /// Slopes are regolith-covered and use the soil coefficient.
    pub fn slope(start_x: f64, length: f64, angle: f64) -> Self {
        Feature {
            shape: FeatureShape::Slope { start_x, length, angle },
            friction: SOIL_FRICTION,
        }
    }

    pub fn with_friction(mut self, friction: f64) -> Self {
        self.friction = friction;
        self
    }

    /// x where the feature begins.
    pub fn leading_x(&self) -> f64 {
        match &self.shape {
            FeatureShape::Step { face_x, .. } => *face_x,
            FeatureShape::Hemisphere { center, radius } => center[0] - radius,
            FeatureShape::Outcrop { start_x, .. } => *start_x,
            FeatureShape::Slope { start_x, .. } => *start_x,
        }
    }

    /// x where the feature ends; for steps and slopes the face or crest.
    pub fn trailing_x(&self) -> f64 {
        match &self.shape {
            FeatureShape::Step { face_x, .. } => *face_x,
            FeatureShape::Hemisphere { center, radius } => center[0] + radius,
            FeatureShape::Outcrop { start_x, profile, .. } => start_x + profile.length(),
            FeatureShape::Slope { start_x, length, angle } => start_x + length * angle.cos(),
        }
    }

    /// Footprint as (x range, y range); open-ended features extend to +∞.
    fn footprint(&self) -> ([f64; 2], [f64; 2]) {
        let all_y = [f64::NEG_INFINITY, f64::INFINITY];
        match &self.shape {
            FeatureShape::Step { face_x, .. } => ([*face_x, f64::INFINITY], all_y),
            FeatureShape::Hemisphere { center, radius } => (
                [center[0] - radius, center[0] + radius],
                [center[1] - radius, center[1] + radius],
            ),
            FeatureShape::Outcrop {
                start_x,
                center_y,
                width,
                profile,
            } => (
                [*start_x, start_x + profile.length()],
                [center_y - 0.5 * width, center_y + 0.5 * width],
            ),
            FeatureShape::Slope { start_x, .. } => ([*start_x, f64::INFINITY], all_y),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(SimError::InvalidSpec(format!("{what}: {self:?}")));
        if !(self.friction.is_finite() && self.friction >= 0.0) {
            return bad("friction must be finite and >= 0");
        }
        match &self.shape {
            FeatureShape::Step { face_x, height } => {
                if !face_x.is_finite() || !(height.is_finite() && *height >= 0.0) {
                    return bad("step needs finite face and non-negative height");
                }
            }
            FeatureShape::Hemisphere { center, radius } => {
                if !center.iter().all(|c| c.is_finite()) || !(radius.is_finite() && *radius > 0.0) {
                    return bad("hemisphere needs finite centre and positive radius");
                }
            }
            FeatureShape::Outcrop {
                start_x,
                center_y,
                width,
                profile,
            } => {
                if !start_x.is_finite()
                    || !center_y.is_finite()
                    || width.is_nan()
                    || *width <= 0.0
                    || profile.length().is_nan()
                    || profile.length() <= 0.0
                    || !profile.scale.is_finite()
                {
                    return bad("outcrop needs finite position and positive size");
                }
            }
            FeatureShape::Slope { start_x, length, angle } => {
                if !start_x.is_finite()
                    || !(length.is_finite() && *length > 0.0)
                    || !(*angle > 0.0 && *angle < std::f64::consts::FRAC_PI_2)
                {
                    return bad("slope needs positive length and angle in (0, 90°)");
                }
            }
        }
        Ok(())
    }

    /// Height above the base plane and upward unit normal, if `(x, y)` lies
    /// inside the feature footprint.
    fn height_at(&self, x: f64, y: f64) -> Option<(f64, Vector3<f64>)> {
        let up = Vector3::z();
        match &self.shape {
            FeatureShape::Step { face_x, height } => (x >= *face_x).then_some((*height, up)),
            FeatureShape::Hemisphere { center, radius } => {
                let (dx, dy) = (x - center[0], y - center[1]);
                let d2 = dx * dx + dy * dy;
                if d2 > radius * radius {
                    return None;
                }
                let h = (radius * radius - d2).max(0.0).sqrt();
                Some((h, Vector3::new(dx, dy, h).normalize()))
            }
            FeatureShape::Outcrop {
                start_x,
                center_y,
                width,
                profile,
            } => {
                let local = x - start_x;
                if (y - center_y).abs() > 0.5 * width || !(0.0..=profile.length()).contains(&local) {
                    return None;
                }
                let (h, dh) = profile.height_and_slope(local);
                Some((h, Vector3::new(-dh, 0.0, 1.0).normalize()))
            }
            FeatureShape::Slope { start_x, length, angle } => {
                let run = length * angle.cos();
                let local = x - start_x;
                if local < 0.0 {
                    None
                } else if local <= run {
                    let (s, c) = angle.sin_cos();
                    Some((local * angle.tan(), Vector3::new(-s, 0.0, c)))
                } else {
                    Some((length * angle.sin(), up))
                }
            }
        }
    }

    /// Closest surface point of this feature to a wheel sphere centre.
    fn closest(&self, c: &Vector3<f64>, radius: f64) -> Option<SurfaceHit> {
        let hit = |point: Vector3<f64>, normal: Vector3<f64>, depth: f64| SurfaceHit {
            point,
            normal,
            depth,
            friction: self.friction,
        };
        match &self.shape {
            FeatureShape::Step { face_x, height } => {
                if *height <= 0.0 {
                    return None;
                }
                let (fx, h) = (*face_x, *height);
                if c.x >= fx {
                    if c.z >= h {
                        Some(hit(Vector3::new(c.x, c.y, h), Vector3::z(), radius - (c.z - h)))
                    } else if h - c.z <= c.x - fx {
                        Some(hit(Vector3::new(c.x, c.y, h), Vector3::z(), radius + (h - c.z)))
                    } else {
                        Some(hit(Vector3::new(fx, c.y, c.z), -Vector3::x(), radius + (c.x - fx)))
                    }
                } else if c.z >= h {
                    let d = Vector3::new(c.x - fx, 0.0, c.z - h);
                    let dist = d.norm();
                    let normal = if dist > 1e-12 { d / dist } else { Vector3::z() };
                    Some(hit(Vector3::new(fx, c.y, h), normal, radius - dist))
                } else {
                    Some(hit(Vector3::new(fx, c.y, c.z), -Vector3::x(), radius - (fx - c.x)))
                }
            }
            FeatureShape::Hemisphere { center, radius: rock } => {
                let base = Vector3::new(center[0], center[1], 0.0);
                let d = c - base;
                let dist = d.norm();
                let normal = if dist > 1e-12 { d / dist } else { Vector3::z() };
                Some(hit(base + normal * *rock, normal, radius - (dist - rock)))
            }
            FeatureShape::Outcrop {
                start_x,
                center_y,
                width,
                profile,
            } => {
                if (c.y - center_y).abs() > 0.5 * width {
                    return None;
                }
                let lo = (c.x - radius - start_x).max(0.0);
                let hi = (c.x + radius - start_x).min(profile.length());
                if lo > hi {
                    return None;
                }
                let local = c.x - start_x;
                let dist2 = |x: f64| {
                    let dz = c.z - profile.height(x);
                    (x - local) * (x - local) + dz * dz
                };
                const SAMPLES: usize = 48;
                let step = (hi - lo) / SAMPLES as f64;
                let (mut best_x, mut best) = (lo, dist2(lo));
                for k in 1..=SAMPLES {
                    let x = lo + k as f64 * step;
                    let d = dist2(x);
                    if d < best {
                        best = d;
                        best_x = x;
                    }
                }
                // golden-section refinement around the best sample
                let (mut a, mut b) = ((best_x - step).max(lo), (best_x + step).min(hi));
                const INV_PHI: f64 = 0.618_033_988_749_894_8;
                let mut x1 = b - INV_PHI * (b - a);
                let mut x2 = a + INV_PHI * (b - a);
                let (mut f1, mut f2) = (dist2(x1), dist2(x2));
                for _ in 0..24 {
                    if f1 < f2 {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - INV_PHI * (b - a);
                        f1 = dist2(x1);
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + INV_PHI * (b - a);
                        f2 = dist2(x2);
                    }
                }
                let xm = 0.5 * (a + b);
                if dist2(xm) < best {
                    best_x = xm;
                }
                let (h_here, dh_here) = profile.height_and_slope(local.clamp(0.0, profile.length()));
                let surface = Vector3::new(start_x + best_x, c.y, profile.height(best_x));
                if (0.0..=profile.length()).contains(&local) && c.z < h_here {
                    let normal = Vector3::new(-dh_here, 0.0, 1.0).normalize();
                    let point = Vector3::new(c.x, c.y, h_here);
                    return Some(hit(point, normal, radius + (h_here - c.z) * normal.z));
                }
                let d = c - surface;
                let dist = d.norm();
                let normal = if dist > 1e-12 { d / dist } else { Vector3::z() };
                Some(hit(surface, normal, radius - dist))
            }
            FeatureShape::Slope { start_x, length, angle } => {
                let (s, co) = angle.sin_cos();
                let a = Vector3::new(*start_x, c.y, 0.0);
                let b = Vector3::new(start_x + length * co, c.y, length * s);
                // inside the solid: push out along the local surface normal
                let local = c.x - start_x;
                if local >= 0.0 {
                    let (h, n) = self.height_at(c.x, c.y).expect("inside slope footprint");
                    if c.z < h {
                        let depth = radius + (h - c.z) * n.z;
                        return Some(hit(Vector3::new(c.x, c.y, h), n, depth));
                    }
                }
                let ab = b - a;
                let t = ((c - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                let on_ramp = a + ab * t;
                let on_plateau = Vector3::new(c.x.max(b.x), c.y, b.z);
                let (pr, pp) = ((c - on_ramp).norm(), (c - on_plateau).norm());
                let point = if pr <= pp { on_ramp } else { on_plateau };
                let d = c - point;
                let dist = d.norm();
                let normal = if dist > 1e-12 {
                    d / dist
                } else {
                    Vector3::new(-s, 0.0, co)
                };
                Some(hit(point, normal, radius - dist))
            }
        }
    }
}

/// Closest terrain point to a wheel, with signed penetration depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceHit {
    pub point: Vector3<f64>,
    /// Unit normal pointing out of the terrain towards the wheel centre.
    pub normal: Vector3<f64>,
    /// Wheel radius minus centre-to-surface distance; positive when overlapping.
    pub depth: f64,
    pub friction: f64,
}

/// Immutable terrain description.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainScene {
    pub soil_friction: f64,
    features: Vec<Feature>,
}

impl Default for TerrainScene {
    fn default() -> Self {
        TerrainScene::flat()
    }
}

impl TerrainScene {
    pub fn flat() -> Self {
        TerrainScene {
            soil_friction: SOIL_FRICTION,
            features: Vec::new(),
        }
    }

    /// Builds a scene, rejecting invalid or overlapping features.
    pub fn new(soil_friction: f64, features: Vec<Feature>) -> Result<Self> {
        if !(soil_friction.is_finite() && soil_friction >= 0.0) {
            return Err(SimError::InvalidSpec(format!(
                "soil friction must be finite and >= 0, got {soil_friction}"
            )));
        }
        for f in &features {
            f.validate()?;
        }
        for (i, a) in features.iter().enumerate() {
            for b in &features[i + 1..] {
                let (ax, ay) = a.footprint();
                let (bx, by) = b.footprint();
                let overlap = |p: [f64; 2], q: [f64; 2]| p[0] < q[1] && q[0] < p[1];
                if overlap(ax, bx) && overlap(ay, by) {
                    return Err(SimError::InvalidSpec(format!("features overlap: {a:?} and {b:?}")));
                }
            }
        }
        Ok(TerrainScene {
            soil_friction,
            features,
        })
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    /// Terrain height and upward unit normal at `(x, y)`.
    pub fn height(&self, x: f64, y: f64) -> (f64, Vector3<f64>) {
        self.features
            .iter()
            .filter_map(|f| f.height_at(x, y))
            .fold(
                (0.0, Vector3::z()),
                |best, cand| {
                    if cand.0 > best.0 {
                        cand
                    } else {
                        best
                    }
                },
            )
    }

    /// Deepest-penetrating surface for a sphere of `radius` centred at `center`.
    ///
    /// Features win ties against the base plane.
    pub fn closest_surface(&self, center: &Vector3<f64>, radius: f64) -> SurfaceHit {
        let mut best = SurfaceHit {
            point: Vector3::new(center.x, center.y, 0.0),
            normal: Vector3::z(),
            depth: radius - center.z,
            friction: self.soil_friction,
        };
        for f in &self.features {
            if let Some(h) = f.closest(center, radius) {
                if h.depth >= best.depth && h.depth.is_finite() {
                    best = h;
                }
            }
        }
        best
    }
}

/// Height and normal of the terrain at `(x, y)`.
pub fn terrain_height(scene: &TerrainScene, x: f64, y: f64) -> (f64, Vector3<f64>) {
    scene.height(x, y)
}
