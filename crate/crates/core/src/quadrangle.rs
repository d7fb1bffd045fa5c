//! Concyclic quadrangles, their shape ratios, and orientation-preserving
//! similarities `z -> alpha z + beta`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrangle {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// `r = (c - a) / (b - a)` and `q = (d - a) / (b - a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeRatios {
    pub r: Complex64,
    pub q: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMap {
    pub alpha: Complex64,
    pub beta: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circumdata {
    pub center: Complex64,
    pub radius: f64,
    pub r_a: Complex64,
    pub r_b: Complex64,
    pub r_c: Complex64,
    pub r_d: Complex64,
}

impl Quadrangle {
    /// Validated quadrangle: `a, b, c` pairwise distinct, not all four points
    /// collinear, and the cross-ratio real to `tol.concyclic`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64, tol: &Tolerances) -> Result<Self> {
        let q = Self { a, b, c, d };
        q.validate(tol)?;
        Ok(q)
    }

    /// Skips all validation. Useful for probing the sweep with a fourth
    /// vertex that is deliberately off the circle.
    pub fn new_unchecked(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn points(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Cyclic relabeling `(a, b, c, d) -> (b, c, d, a)`, applied `n` times.
    pub fn rotate_roles(&self, n: usize) -> Self {
        let p = self.points();
        let k = n % 4;
        Self { a: p[k], b: p[(k + 1) % 4], c: p[(k + 2) % 4], d: p[(k + 3) % 4] }
    }

    /// `|Im(x)| / |x|` for the cross-ratio `x = (a-c)(b-d) / ((a-d)(b-c))`.
    pub fn concyclic_defect(&self) -> f64 {
        let num = (self.a - self.c) * (self.b - self.d);
        let den = (self.a - self.d) * (self.b - self.c);
        let x = num / den;
        if !(x.re.is_finite() && x.im.is_finite()) {
            return f64::INFINITY;
        }
        let n = x.norm();
        if n == 0.0 {
            0.0
        } else {
            x.im.abs() / n
        }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let pts = self.points();
        if pts.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidQuadrangle("non-finite coordinate".into()));
        }
        let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let eps = tol.tangent * scale;
        for (i, j) in [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)] {
            if (pts[i] - pts[j]).norm() <= eps {
                return Err(Error::InvalidQuadrangle(format!(
                    "vertices {} and {} coincide",
                    "abcd".as_bytes()[i] as char,
                    "abcd".as_bytes()[j] as char
                )));
            }
        }
        let area = crate::polyline::orient(self.a, self.b, self.c).abs();
        if area <= 1e-12 * scale * scale {
            return Err(Error::CollinearPoints(area));
        }
        let defect = self.concyclic_defect();
        if !(defect <= tol.concyclic) {
            return Err(Error::NotConcyclic { defect, tolerance: tol.concyclic });
        }
        Ok(())
    }

    pub fn shape_ratios(&self) -> Result<ShapeRatios> {
        let base = self.b - self.a;
        if base.norm() < Tolerances::default().tangent {
            return Err(Error::DegenerateBase(base.norm()));
        }
        Ok(ShapeRatios { r: (self.c - self.a) / base, q: (self.d - self.a) / base })
    }

    /// Circumcircle of `a, b, c` with the offsets of all four vertices.
    pub fn circumdata(&self) -> Result<Circumdata> {
        let center = circumcenter(self.a, self.b, self.c)?;
        Ok(Circumdata {
            center,
            radius: (self.a - center).norm(),
            r_a: self.a - center,
            r_b: self.b - center,
            r_c: self.c - center,
            r_d: self.d - center,
        })
    }

    pub fn map(&self, sigma: &SimilarityMap) -> Self {
        Self {
            a: sigma.apply(self.a),
            b: sigma.apply(self.b),
            c: sigma.apply(self.c),
            d: sigma.apply(self.d),
        }
    }
}

/// Point equidistant from three non-collinear points.
pub fn circumcenter(p1: Complex64, p2: Complex64, p3: Complex64) -> Result<Complex64> {
    let u = p2 - p1;
    let v = p3 - p1;
    let cross = u.re * v.im - u.im * v.re;
    let scale = u.norm().max(v.norm());
    if cross.abs() <= 1e-14 * scale * scale || scale == 0.0 {
        return Err(Error::CollinearPoints(cross));
    }
    // Solve 2 Re(conj(w) u) = |u|^2, 2 Re(conj(w) v) = |v|^2 for w = o - p1.
    let (uu, vv) = (u.norm_sqr(), v.norm_sqr());
    let wx = (uu * v.im - vv * u.im) / (2.0 * cross);
    let wy = (vv * u.re - uu * v.re) / (2.0 * cross);
    Ok(p1 + Complex64::new(wx, wy))
}

impl SimilarityMap {
    pub const IDENTITY: Self = Self { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) };

    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if alpha.norm() == 0.0 {
            return Err(Error::DegenerateBase(0.0));
        }
        Ok(Self { alpha, beta })
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.alpha * z + self.beta
    }

    /// The unique similarity sending `a -> a2` and `b -> b2`.
    pub fn from_pair(a: Complex64, b: Complex64, a2: Complex64, b2: Complex64) -> Result<Self> {
        let base = b - a;
        if base.norm() < Tolerances::default().tangent {
            return Err(Error::DegenerateBase(base.norm()));
        }
        let alpha = (b2 - a2) / base;
        if alpha.norm() == 0.0 {
            return Err(Error::DegenerateBase(0.0));
        }
        Ok(Self { alpha, beta: a2 - alpha * a })
    }

    /// Determinant of the induced real-linear map.
    pub fn determinant(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn scale(&self) -> f64 {
        self.alpha.norm()
    }
}
