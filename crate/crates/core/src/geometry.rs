//! Exact description of the smooth domain: boundary parametrization,
//! normals, inside tests and the closest-point projection onto the curve.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::fem::quadrature::gauss_legendre;
use crate::{Error, Result, Vec2};

/// Shape of the boundary curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// Polar curve `r(theta) = R (1 + a cos(m theta))`.
    Star {
        base_radius: f64,
        amplitude: f64,
        frequency: u32,
    },
    /// Axis-aligned square of half-width `half_width`. Not smooth; used only
    /// as a debug domain for which the polygon and the domain coincide.
    Square { half_width: f64 },
}

/// A bounded planar domain with a closed, simple, counter-clockwise boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothDomain {
    pub kind: DomainKind,
    pub param_period: f64,
}

/// Result of projecting a point onto the boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub theta: f64,
    pub foot: Vec2,
    /// Signed offset along the outward normal; positive outside the domain.
    pub t_star: f64,
}

const SCAN_POINTS: usize = 256;
const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

impl SmoothDomain {
    pub fn new(kind: DomainKind) -> Result<Self> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidDomain(format!("{what} must be positive, got {v}")))
            }
        };
        match kind {
            DomainKind::Disk { radius } => positive(radius, "radius")?,
            DomainKind::Ellipse { a, b } => {
                positive(a, "semi-axis a")?;
                positive(b, "semi-axis b")?;
            }
            DomainKind::Star {
                base_radius,
                amplitude,
                frequency,
            } => {
                positive(base_radius, "base radius")?;
                // r > 0 everywhere makes the polar curve simple.
                if !(0.0..1.0).contains(&amplitude) {
                    return Err(Error::InvalidDomain(format!(
                        "star amplitude must lie in [0, 1), got {amplitude}"
                    )));
                }
                if frequency == 0 {
                    return Err(Error::InvalidDomain("star frequency must be >= 1".into()));
                }
            }
            DomainKind::Square { half_width } => positive(half_width, "half width")?,
        }
        Ok(Self {
            kind,
            param_period: TAU,
        })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(DomainKind::Disk { radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(DomainKind::Ellipse { a, b })
    }

    pub fn star(base_radius: f64, amplitude: f64, frequency: u32) -> Result<Self> {
        Self::new(DomainKind::Star {
            base_radius,
            amplitude,
            frequency,
        })
    }

    pub fn square(half_width: f64) -> Result<Self> {
        Self::new(DomainKind::Square { half_width })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DomainKind::Disk { .. } => "disk",
            DomainKind::Ellipse { .. } => "ellipse",
            DomainKind::Star { .. } => "star",
            DomainKind::Square { .. } => "square",
        }
    }

    /// True for the debug square, whose boundary is already a polygon.
    pub fn is_polygonal(&self) -> bool {
        matches!(self.kind, DomainKind::Square { .. })
    }

    /// Parameter values of the corners of a polygonal domain.
    pub fn corner_params(&self) -> Vec<f64> {
        match self.kind {
            DomainKind::Square { .. } => (0..4).map(|i| (2 * i + 1) as f64 * PI / 4.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Exact area of the domain.
    pub fn area(&self) -> f64 {
        match self.kind {
            DomainKind::Disk { radius } => PI * radius * radius,
            DomainKind::Ellipse { a, b } => PI * a * b,
            DomainKind::Star {
                base_radius,
                amplitude,
                ..
            } => PI * base_radius * base_radius * (1.0 + 0.5 * amplitude * amplitude),
            DomainKind::Square { half_width } => 4.0 * half_width * half_width,
        }
    }

    /// Upper bound of `|x|` over the closed domain.
    pub fn max_radius(&self) -> f64 {
        match self.kind {
            DomainKind::Disk { radius } => radius,
            DomainKind::Ellipse { a, b } => a.max(b),
            DomainKind::Star {
                base_radius,
                amplitude,
                ..
            } => base_radius * (1.0 + amplitude),
            DomainKind::Square { half_width } => half_width * 2f64.sqrt(),
        }
    }

    /// A point in the interior from which the whole domain is visible.
    pub fn center(&self) -> Vec2 {
        Vec2::zeros()
    }

    fn wrap(&self, theta: f64) -> f64 {
        theta.rem_euclid(self.param_period)
    }

    /// Position, first and second derivative of the boundary curve.
    pub fn curve(&self, theta: f64) -> (Vec2, Vec2, Vec2) {
        match self.kind {
            DomainKind::Disk { radius } => {
                let (s, c) = theta.sin_cos();
                (
                    Vec2::new(radius * c, radius * s),
                    Vec2::new(-radius * s, radius * c),
                    Vec2::new(-radius * c, -radius * s),
                )
            }
            DomainKind::Ellipse { a, b } => {
                let (s, c) = theta.sin_cos();
                (
                    Vec2::new(a * c, b * s),
                    Vec2::new(-a * s, b * c),
                    Vec2::new(-a * c, -b * s),
                )
            }
            DomainKind::Star {
                base_radius,
                amplitude,
                frequency,
            } => {
                let m = frequency as f64;
                let (sm, cm) = (m * theta).sin_cos();
                let r = base_radius * (1.0 + amplitude * cm);
                let dr = -base_radius * amplitude * m * sm;
                let ddr = -base_radius * amplitude * m * m * cm;
                let (s, c) = theta.sin_cos();
                let e = Vec2::new(c, s);
                let ep = Vec2::new(-s, c);
                (r * e, dr * e + r * ep, (ddr - r) * e + 2.0 * dr * ep)
            }
            DomainKind::Square { half_width } => {
                let (p, d) = self.square_point(theta, half_width);
                (p, d, Vec2::zeros())
            }
        }
    }

    /// Square boundary parametrized proportionally to arclength, starting at
    /// the midpoint of the right side and running counter-clockwise.
    fn square_point(&self, theta: f64, hw: f64) -> (Vec2, Vec2) {
        let per = 8.0 * hw;
        let s = self.wrap(theta) / TAU * per;
        let speed = per / TAU;
        // Corner k sits at arclength (2k + 1) hw.
        if s < hw || s >= 7.0 * hw {
            let y = if s >= 7.0 * hw { s - 8.0 * hw } else { s };
            (Vec2::new(hw, y), Vec2::new(0.0, speed))
        } else if s < 3.0 * hw {
            (Vec2::new(hw - (s - hw), hw), Vec2::new(-speed, 0.0))
        } else if s < 5.0 * hw {
            (Vec2::new(-hw, hw - (s - 3.0 * hw)), Vec2::new(0.0, -speed))
        } else {
            (Vec2::new(-hw + (s - 5.0 * hw), -hw), Vec2::new(speed, 0.0))
        }
    }

    pub fn boundary_point(&self, theta: f64) -> Vec2 {
        self.curve(self.wrap(theta)).0
    }

    pub fn tangent(&self, theta: f64) -> Vec2 {
        self.curve(self.wrap(theta)).1
    }

    /// Unit outward normal at parameter `theta`.
    pub fn outward_normal(&self, theta: f64) -> Vec2 {
        let d = self.tangent(theta);
        Vec2::new(d.y, -d.x) / d.norm()
    }

    /// Signed curvature (positive where the domain is locally convex).
    pub fn curvature(&self, theta: f64) -> f64 {
        let (_, d1, d2) = self.curve(self.wrap(theta));
        (d1.x * d2.y - d1.y * d2.x) / d1.norm().powi(3)
    }

    /// Membership in the open domain.
    pub fn inside(&self, x: Vec2) -> bool {
        match self.kind {
            DomainKind::Disk { radius } => x.norm() < radius,
            DomainKind::Ellipse { a, b } => (x.x / a).powi(2) + (x.y / b).powi(2) < 1.0,
            DomainKind::Star {
                base_radius,
                amplitude,
                frequency,
            } => {
                let theta = x.y.atan2(x.x);
                x.norm() < base_radius * (1.0 + amplitude * (frequency as f64 * theta).cos())
            }
            DomainKind::Square { half_width } => x.x.abs() < half_width && x.y.abs() < half_width,
        }
    }

    /// Closest-point projection onto the boundary.
    ///
    /// A coarse scan seeds Newton's method on `(x - gamma) . gamma' = 0`;
    /// golden-section search on the scan bracket is the fallback.
    pub fn closest_point(&self, x: Vec2) -> Result<Projection> {
        if let DomainKind::Square { half_width } = self.kind {
            return Ok(self.square_projection(x, half_width));
        }
        let period = self.param_period;
        let step = period / SCAN_POINTS as f64;
        let dist2: Vec<f64> = (0..SCAN_POINTS)
            .map(|i| (self.boundary_point(i as f64 * step) - x).norm_squared())
            .collect();

        // Discrete local minima of the sampled distance, sorted by distance.
        let mut minima: Vec<(f64, usize)> = (0..SCAN_POINTS)
            .filter(|&i| {
                let prev = dist2[(i + SCAN_POINTS - 1) % SCAN_POINTS];
                let next = dist2[(i + 1) % SCAN_POINTS];
                dist2[i] <= prev && dist2[i] <= next
            })
            .map(|i| (dist2[i].sqrt(), i))
            .collect();
        minima.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (best_d, best_i) = minima[0];
        // Nearly equidistant from the whole curve (e.g. the center of a disk):
        // the foot point is ill-defined even when only one sample minimum exists.
        let (far_i, far_d2) = dist2
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if far_d2.sqrt() - best_d <= 0.01 * best_d {
            return Err(Error::NotUnique {
                theta_a: best_i as f64 * step,
                theta_b: far_i as f64 * step,
            });
        }
        if let Some(&(second_d, second_i)) = minima.get(1) {
            let theta_a = best_i as f64 * step;
            let theta_b = second_i as f64 * step;
            let gap = (theta_a - theta_b).abs();
            let separation = gap.min(period - gap);
            if second_d - best_d <= 0.01 * second_d.max(f64::MIN_POSITIVE) && separation > 0.1 {
                return Err(Error::NotUnique { theta_a, theta_b });
            }
        }

        let seed = best_i as f64 * step;
        let theta = match self.newton_projection(x, seed, step) {
            Some(theta) => theta,
            None => self.golden_projection(x, seed - step, seed + step)?,
        };
        let theta = self.wrap(theta);
        let foot = self.boundary_point(theta);
        let normal = self.outward_normal(theta);
        Ok(Projection {
            theta,
            foot,
            t_star: (x - foot).dot(&normal),
        })
    }

    fn newton_projection(&self, x: Vec2, seed: f64, bracket: f64) -> Option<f64> {
        let mut theta = seed;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d1, d2) = self.curve(self.wrap(theta));
            let r = p - x;
            let g = r.dot(&d1);
            let dg = d1.norm_squared() + r.dot(&d2);
            let scale = d1.norm() * (r.norm() + d1.norm());
            if g.abs() <= NEWTON_TOL * scale {
                return Some(theta);
            }
            if dg <= 0.0 {
                return None;
            }
            theta -= g / dg;
            if (theta - seed).abs() > 2.0 * bracket {
                return None;
            }
        }
        None
    }

    fn golden_projection(&self, x: Vec2, lo: f64, hi: f64) -> Result<f64> {
        let f = |t: f64| (self.boundary_point(t) - x).norm_squared();
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..200 {
            if (b - a).abs() < 1e-15 {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = f(d);
            }
        }
        let theta = 0.5 * (a + b);
        let (p, d1, _) = self.curve(self.wrap(theta));
        let residual = (p - x).dot(&d1).abs();
        if residual > 1e-8 * d1.norm() {
            return Err(Error::NonConvergent { residual });
        }
        Ok(theta)
    }

    fn square_projection(&self, x: Vec2, hw: f64) -> Projection {
        let per = 8.0 * hw;
        // (start corner arclength, start point, direction)
        let sides = [
            (-hw, Vec2::new(hw, -hw), Vec2::new(0.0, 1.0)),
            (hw, Vec2::new(hw, hw), Vec2::new(-1.0, 0.0)),
            (3.0 * hw, Vec2::new(-hw, hw), Vec2::new(0.0, -1.0)),
            (5.0 * hw, Vec2::new(-hw, -hw), Vec2::new(1.0, 0.0)),
        ];
        let mut best = (f64::INFINITY, 0.0, Vec2::zeros());
        for (s0, p0, dir) in sides {
            let along = (x - p0).dot(&dir).clamp(0.0, 2.0 * hw);
            let foot = p0 + along * dir;
            let d = (x - foot).norm();
            if d < best.0 {
                best = (d, s0 + along, foot);
            }
        }
        let theta = self.wrap(best.1 / per * TAU);
        let foot = best.2;
        let t_abs = (x - foot).norm();
        let sign = if self.inside(x) { -1.0 } else { 1.0 };
        Projection {
            theta,
            foot,
            t_star: sign * t_abs,
        }
    }

    /// Cumulative arclength table with `resolution` panels.
    pub fn arclength_table(&self, resolution: usize) -> Result<ArclengthTable> {
        ArclengthTable::new(*self, resolution)
    }
}

/// Monotone map between boundary parameter and arclength.
#[derive(Debug, Clone)]
pub struct ArclengthTable {
    domain: SmoothDomain,
    panel_width: f64,
    cumulative: Vec<f64>,
}

const PANEL_GAUSS_POINTS: usize = 10;

impl ArclengthTable {
    fn new(domain: SmoothDomain, resolution: usize) -> Result<Self> {
        if resolution < 64 {
            return Err(Error::InvalidInput(format!(
                "arclength resolution must be >= 64, got {resolution}"
            )));
        }
        let panel_width = domain.param_period / resolution as f64;
        let mut cumulative = Vec::with_capacity(resolution + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for k in 0..resolution {
            let a = k as f64 * panel_width;
            acc += speed_integral(&domain, a, a + panel_width);
            cumulative.push(acc);
        }
        Ok(Self {
            domain,
            panel_width,
            cumulative,
        })
    }

    pub fn total_length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Arclength from parameter 0 to `theta` (theta wraps).
    pub fn arclength(&self, theta: f64) -> f64 {
        let period = self.domain.param_period;
        let turns = (theta / period).floor();
        let t = theta - turns * period;
        let k = ((t / self.panel_width) as usize).min(self.cumulative.len() - 2);
        let a = k as f64 * self.panel_width;
        turns * self.total_length() + self.cumulative[k] + speed_integral(&self.domain, a, t)
    }

    /// Parameter at arclength `s` (s wraps modulo the total length).
    pub fn theta_at(&self, s: f64) -> f64 {
        let total = self.total_length();
        let turns = (s / total).floor();
        let s_loc = s - turns * total;
        let k = match self
            .cumulative
            .binary_search_by(|c| c.total_cmp(&s_loc))
        {
            Ok(i) => i.min(self.cumulative.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.cumulative.len() - 2),
        };
        let a = k as f64 * self.panel_width;
        let b = a + self.panel_width;
        let target = s_loc - self.cumulative[k];
        let mut lo = a;
        let mut hi = b;
        let mut theta = a + self.panel_width * target / (self.cumulative[k + 1] - self.cumulative[k]);
        for _ in 0..60 {
            let g = speed_integral(&self.domain, a, theta) - target;
            if g > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            if g.abs() < 1e-14 * total.max(1.0) {
                break;
            }
            let speed = self.domain.tangent(theta).norm();
            let next = theta - g / speed;
            theta = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        theta + turns * self.domain.param_period
    }
}

fn speed_integral(domain: &SmoothDomain, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(PANEL_GAUSS_POINTS);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * domain.tangent(mid + half * x).norm())
        .sum::<f64>()
        * half
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn boundary_points_of_builtins() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let p = disk.boundary_point(0.0);
        assert!(close(p.x, 1.0, 1e-15) && close(p.y, 0.0, 1e-15));

        let ell = SmoothDomain::ellipse(2.0, 1.0).unwrap();
        let p = ell.boundary_point(PI / 2.0);
        assert!(close(p.x, 0.0, 1e-15) && close(p.y, 1.0, 1e-15));

        let star = SmoothDomain::star(1.0, 0.3, 5).unwrap();
        let p = star.boundary_point(0.0);
        assert!(close(p.x, 1.3, 1e-15) && close(p.y, 0.0, 1e-15));

        let q = star.boundary_point(0.7 + TAU);
        let r = star.boundary_point(0.7);
        assert!((q - r).norm() < 1e-14);
    }

    #[test]
    fn normals_are_unit_orthogonal_and_outward() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let n = disk.outward_normal(PI / 3.0);
        assert!(close(n.x, 0.5, 1e-12) && close(n.y, 0.75f64.sqrt(), 1e-12));
        let ell = SmoothDomain::ellipse(2.0, 1.0).unwrap();
        let n = ell.outward_normal(0.0);
        assert!(close(n.x, 1.0, 1e-14) && close(n.y, 0.0, 1e-14));

        for domain in [disk, ell, SmoothDomain::star(1.0, 0.3, 5).unwrap()] {
            for i in 0..97 {
                let theta = i as f64 * 0.0647;
                let n = domain.outward_normal(theta);
                assert!(close(n.norm(), 1.0, 1e-12));
                assert!(n.dot(&domain.tangent(theta)).abs() < 1e-10);
                assert!(n.dot(&(domain.boundary_point(theta) - domain.center())) > 0.0);
            }
        }
    }

    #[test]
    fn inside_tests() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        assert!(disk.inside(Vec2::new(0.5, 0.0)));
        assert!(!disk.inside(Vec2::new(1.5, 0.0)));
        let star = SmoothDomain::star(1.0, 0.3, 5).unwrap();
        assert!(star.inside(Vec2::new(1.2, 0.0)));
    }

    #[test]
    fn rejects_invalid_domains() {
        assert!(SmoothDomain::disk(-1.0).is_err());
        assert!(SmoothDomain::star(1.0, 1.2, 5).is_err());
        assert!(SmoothDomain::star(1.0, 0.2, 0).is_err());
        assert!(SmoothDomain::ellipse(1.0, 0.0).is_err());
    }

    #[test]
    fn closest_point_on_disk() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let p = disk.closest_point(Vec2::new(2.0, 0.0)).unwrap();
        assert!(close(p.theta, 0.0, 1e-12) || close(p.theta, TAU, 1e-12));
        assert!((p.foot - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        assert!(close(p.t_star, 1.0, 1e-12));
        let p = disk.closest_point(Vec2::new(0.5, 0.0)).unwrap();
        assert!(close(p.t_star, -0.5, 1e-12));
        assert!((p.foot - Vec2::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn closest_point_refuses_the_center_of_a_disk() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        assert!(matches!(
            disk.closest_point(Vec2::new(1e-3, 0.0)),
            Err(Error::NotUnique { .. })
        ));
    }

    #[test]
    fn closest_point_matches_brute_force_on_ellipse() {
        let ell = SmoothDomain::ellipse(2.0, 1.0).unwrap();
        let x = Vec2::new(1.9, 0.3);
        // Oracle: 2048-point scan refined by bisection on the stationarity
        // condition.
        let n = 2048;
        let step = TAU / n as f64;
        let best = (0..n)
            .min_by(|&a, &b| {
                let da = (ell.boundary_point(a as f64 * step) - x).norm();
                let db = (ell.boundary_point(b as f64 * step) - x).norm();
                da.total_cmp(&db)
            })
            .unwrap();
        let g = |t: f64| (ell.boundary_point(t) - x).dot(&ell.tangent(t));
        let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = ell.boundary_point(0.5 * (lo + hi));
        let p = ell.closest_point(x).unwrap();
        assert!((p.foot - oracle).norm() < 1e-8);
        assert!(close(p.t_star.abs(), (x - oracle).norm(), 1e-10));
    }

    #[test]
    fn arclength_of_disk_and_ellipse() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let table = disk.arclength_table(64).unwrap();
        assert!(close(table.total_length(), TAU, 1e-12));
        assert!(close(table.theta_at(PI), PI, 1e-12));

        let ell = SmoothDomain::ellipse(2.0, 1.0).unwrap();
        let coarse = ell.arclength_table(64).unwrap().total_length();
        let fine = ell.arclength_table(128).unwrap().total_length();
        assert!((coarse - fine).abs() / fine < 1e-10);
        assert!(close(fine, 9.688448220547675, 1e-9));

        assert!(matches!(ell.arclength_table(10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn arclength_inverse_is_monotone_and_consistent() {
        let star = SmoothDomain::star(1.0, 0.3, 5).unwrap();
        let table = star.arclength_table(256).unwrap();
        let total = table.total_length();
        let mut last = -1.0;
        for i in 0..200 {
            let s = total * i as f64 / 200.0;
            let theta = table.theta_at(s);
            assert!(theta > last);
            last = theta;
            assert!(close(table.arclength(theta), s, 1e-10));
        }
    }

    #[test]
    fn square_projection_is_consistent() {
        let sq = SmoothDomain::square(0.5).unwrap();
        let p = sq.closest_point(Vec2::new(0.7, 0.1)).unwrap();
        assert!((p.foot - Vec2::new(0.5, 0.1)).norm() < 1e-14);
        assert!(close(p.t_star, 0.2, 1e-14));
        assert!((sq.boundary_point(p.theta) - p.foot).norm() < 1e-14);
        for c in sq.corner_params() {
            let q = sq.boundary_point(c);
            assert!(close(q.x.abs(), 0.5, 1e-14) && close(q.y.abs(), 0.5, 1e-14));
        }
    }
}
