//! Equator quadruples `Q(a, b)` and the search over rotations for one that
//! equalizes a field on them.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::SphereField;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereQuadruple {
    pub a: f64,
    pub b: f64,
    pub points: [Vector3<f64>; 4],
}

/// `x1 = (1,0,0)`, `x2` at longitude `a`, `x3` at longitude `-b`,
/// `x4 = -x1`. Distances are accepted on `(0, pi/2]`.
pub fn quadruple(a: f64, b: f64) -> Result<SphereQuadruple> {
    for d in [a, b] {
        if !(d > 0.0 && d <= FRAC_PI_2) {
            return Err(Error::BadDistance(d));
        }
    }
    let points = [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(a.cos(), a.sin(), 0.0),
        Vector3::new(b.cos(), -b.sin(), 0.0),
        Vector3::new(-1.0, 0.0, 0.0),
    ];
    Ok(SphereQuadruple { a, b, points })
}

fn rotation_defect(r: &Matrix3<f64>) -> f64 {
    let orth = (r.transpose() * r - Matrix3::identity()).abs().max();
    orth.max((r.determinant() - 1.0).abs())
}

fn values(f: &SphereField, q: &SphereQuadruple, r: &Matrix3<f64>) -> [f64; 4] {
    q.points.map(|x| f.value(&(r * x)))
}

fn range(v: &[f64; 4]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn variance(v: &[f64; 4]) -> f64 {
    let m = v.iter().sum::<f64>() / 4.0;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 4.0
}

/// `max_i f(R x_i) - min_i f(R x_i)`.
pub fn spread(f: &SphereField, q: &SphereQuadruple, r: &Matrix3<f64>) -> Result<f64> {
    let defect = rotation_defect(r);
    if !(defect <= 1e-10) {
        return Err(Error::NotARotation(defect));
    }
    Ok(range(&values(f, q, r)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadResult {
    pub value: f64,
    pub rotation: Matrix3<f64>,
    /// Index of the start that produced the minimum.
    pub start: usize,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let (mut x, mut scale) = (0.0, inv);
    while i > 0 {
        x += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    x
}

/// Rotations from a randomly shifted Halton sequence in bases 2, 3, 5 pushed
/// through the uniform quaternion map. The first `n` starts do not depend on
/// how many are requested.
pub fn so3_starts(n: usize, seed: u64) -> Vec<Rotation3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    let tau = std::f64::consts::TAU;
    (0..n as u64)
        .map(|i| {
            let u = [2, 3, 5].map(|b| radical_inverse(i + 1, b));
            let [u1, u2, u3] = [0, 1, 2].map(|k| (u[k] + shift[k]).fract());
            let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
            let q = nalgebra::Quaternion::new(
                b * (tau * u3).cos(),
                a * (tau * u2).sin(),
                a * (tau * u2).cos(),
                b * (tau * u3).sin(),
            );
            UnitQuaternion::from_quaternion(q).to_rotation_matrix()
        })
        .collect()
}

fn at(r0: &Rotation3<f64>, w: &Vector3<f64>) -> Rotation3<f64> {
    r0 * Rotation3::new(*w)
}

/// Nelder-Mead on the variance of the four values in exponential
/// coordinates around `r0`.
fn simplex_search(f: &SphereField, q: &SphereQuadruple, r0: &Rotation3<f64>) -> Rotation3<f64> {
    let obj = |w: &Vector3<f64>| variance(&values(f, q, at(r0, w).matrix()));
    let mut pts: Vec<Vector3<f64>> = vec![Vector3::zeros()];
    for k in 0..3 {
        let mut v = Vector3::zeros();
        v[k] = 0.1;
        pts.push(v);
    }
    let mut vals: Vec<f64> = pts.iter().map(obj).collect();
    for _ in 0..600 {
        let mut idx = [0, 1, 2, 3];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = idx.iter().map(|&i| pts[i]).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let size = pts[1..].iter().map(|p| (p - pts[0]).norm()).fold(0.0, f64::max);
        if vals[0] < 1e-32 || size < 1e-12 {
            break;
        }
        let centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
        let refl = centroid + (centroid - pts[3]);
        let fr = obj(&refl);
        if fr < vals[0] {
            let exp = centroid + 2.0 * (centroid - pts[3]);
            let fe = obj(&exp);
            if fe < fr {
                (pts[3], vals[3]) = (exp, fe);
            } else {
                (pts[3], vals[3]) = (refl, fr);
            }
        } else if fr < vals[2] {
            (pts[3], vals[3]) = (refl, fr);
        } else {
            let (target, ft) = if fr < vals[3] { (refl, fr) } else { (pts[3], vals[3]) };
            let con = centroid + 0.5 * (target - centroid);
            let fc = obj(&con);
            if fc < ft {
                (pts[3], vals[3]) = (con, fc);
            } else {
                for k in 1..4 {
                    pts[k] = pts[0] + 0.5 * (pts[k] - pts[0]);
                    vals[k] = obj(&pts[k]);
                }
            }
        }
    }
    let best = (0..4).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    at(r0, &pts[best])
}

/// Levenberg-Marquardt on the centred values with the analytic Jacobian
/// `grad f(R x_i) . R (e_k x x_i)`.
fn polish(f: &SphereField, q: &SphereQuadruple, start: Rotation3<f64>) -> Rotation3<f64> {
    let mut r = start;
    let mut cur = variance(&values(f, q, r.matrix()));
    let mut mu = 1e-6;
    for _ in 0..100 {
        if cur < 1e-32 {
            break;
        }
        let mut res = [0.0; 4];
        let mut jac = nalgebra::Matrix4x3::<f64>::zeros();
        for (i, x) in q.points.iter().enumerate() {
            let y = r * x;
            let jet = f.jet(&y);
            res[i] = jet.v;
            for k in 0..3 {
                let mut e = Vector3::zeros();
                e[k] = 1.0;
                jac[(i, k)] = jet.g.dot(&(r * e.cross(x)));
            }
        }
        let m = res.iter().sum::<f64>() / 4.0;
        let rv = nalgebra::Vector4::from_iterator(res.iter().map(|v| v - m));
        let mean_row = jac.row_mean();
        for i in 0..4 {
            let row = jac.row(i) - mean_row;
            jac.set_row(i, &row);
        }
        let jtj = jac.transpose() * jac;
        let jtr = jac.transpose() * rv;
        let mut improved = false;
        for _ in 0..12 {
            let sys = jtj + Matrix3::identity() * mu * (1.0 + jtj.trace());
            let Some(step) = sys.lu().solve(&(-jtr)) else { break };
            let cand = at(&r, &step);
            let v = variance(&values(f, q, cand.matrix()));
            if v < cur {
                r = Rotation3::from_matrix_unchecked(cand.into_inner());
                r.renormalize();
                cur = v;
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    r
}

/// Local minimization from each of the first `n_starts` starts, spread over
/// threads; ties go to the lowest start index.
pub fn min_spread(f: &SphereField, q: &SphereQuadruple, n_starts: usize, seed: u64) -> SpreadResult {
    let starts = so3_starts(n_starts.max(1), seed);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(starts.len());
    let chunk = starts.len().div_ceil(workers);
    let results: Vec<(f64, Rotation3<f64>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|r0| {
                            let r = polish(f, q, simplex_search(f, q, r0));
                            let r0v = range(&values(f, q, r0.matrix()));
                            let rv = range(&values(f, q, r.matrix()));
                            if rv <= r0v {
                                (rv, r)
                            } else {
                                (r0v, *r0)
                            }
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("spread worker panicked")).collect()
    });
    let mut best = 0;
    for (i, (v, _)) in results.iter().enumerate() {
        if *v < results[best].0 {
            best = i;
        }
    }
    SpreadResult { value: results[best].0, rotation: results[best].1.into_inner(), start: best }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::field::{Expr, Parity};

    fn linear_z() -> SphereField {
        SphereField::new("z", Expr::z(), Parity::Odd)
    }

    #[test]
    fn quadruple_examples() {
        let q = quadruple(FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!((q.points[1] - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((q.points[2] - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        let q = quadruple(0.3, 0.7).unwrap();
        assert!((q.points[0].dot(&q.points[1]).acos() - 0.3).abs() < 1e-12);
        assert!((q.points[0].dot(&q.points[2]).acos() - 0.7).abs() < 1e-12);
        assert!(q.points.iter().all(|p| p[2] == 0.0 && (p.norm() - 1.0).abs() < 1e-15));
        assert!(matches!(quadruple(0.0, 0.1), Err(Error::BadDistance(_))));
        assert!(matches!(quadruple(0.1, 2.0), Err(Error::BadDistance(_))));
    }

    #[test]
    fn linear_field_has_zero_spread_on_equator() {
        let q = quadruple(0.05, 0.08).unwrap();
        assert_eq!(spread(&linear_z(), &q, &Matrix3::identity()).unwrap(), 0.0);
        let tilt = *Rotation3::from_axis_angle(&Vector3::z_axis(), 0.4).matrix();
        assert!(spread(&linear_z(), &q, &tilt).unwrap() < 1e-16);
    }

    #[test]
    fn rejects_non_rotations() {
        let q = quadruple(0.1, 0.2).unwrap();
        let reflect = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(matches!(spread(&linear_z(), &q, &reflect), Err(Error::NotARotation(_))));
        assert!(matches!(spread(&linear_z(), &q, &(Matrix3::identity() * 2.0)), Err(Error::NotARotation(_))));
    }

    #[test]
    fn min_spread_finds_level_circle() {
        let q = quadruple(0.05, 0.08).unwrap();
        let res = min_spread(&linear_z(), &q, 4, 7);
        assert!(res.value <= 1e-10, "{}", res.value);
        assert!(rotation_defect(&res.rotation) < 1e-10);
    }

    #[test]
    fn starts_are_prefix_stable() {
        let a = so3_starts(10, 3);
        let b = so3_starts(25, 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
        }
        assert!(b.iter().all(|r| rotation_defect(r.matrix()) < 1e-12));
    }

    #[test]
    fn more_starts_never_hurt() {
        let f = SphereField::new("xy", Expr::x() * Expr::y() + Expr::z().powi(3), Parity::None);
        let q = quadruple(0.3, 0.5).unwrap();
        let a = min_spread(&f, &q, 3, 1).value;
        let b = min_spread(&f, &q, 9, 1).value;
        assert!(b <= a);
    }
}
