//! Plane vectors and 2×2 matrices.

use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct V2 {
    pub x: f64,
    pub y: f64,
}

impl V2 {
    pub const ZERO: V2 = V2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        V2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        V2::new(libm::cos(theta), libm::sin(theta))
    }

    pub fn dot(self, o: V2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, o: V2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl From<[f64; 2]> for V2 {
    fn from(a: [f64; 2]) -> Self {
        V2::new(a[0], a[1])
    }
}

impl Add for V2 {
    type Output = V2;
    fn add(self, o: V2) -> V2 {
        V2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for V2 {
    fn add_assign(&mut self, o: V2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for V2 {
    type Output = V2;
    fn sub(self, o: V2) -> V2 {
        V2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for V2 {
    fn sub_assign(&mut self, o: V2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for V2 {
    type Output = V2;
    fn neg(self) -> V2 {
        V2::new(-self.x, -self.y)
    }
}

impl Mul<V2> for f64 {
    type Output = V2;
    fn mul(self, v: V2) -> V2 {
        V2::new(self * v.x, self * v.y)
    }
}

/// Row-major 2×2 matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct M2 {
    pub m: [[f64; 2]; 2],
}

impl M2 {
    pub const ZERO: M2 = M2 { m: [[0.0; 2]; 2] };
    pub const IDENTITY: M2 = M2 { m: [[1.0, 0.0], [0.0, 1.0]] };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        M2 { m: [[a, b], [c, d]] }
    }

    pub fn scalar(c: f64) -> Self {
        M2::new(c, 0.0, 0.0, c)
    }

    pub fn outer(u: V2, v: V2) -> Self {
        M2::new(u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y)
    }

    pub fn apply(&self, v: V2) -> V2 {
        V2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Option<M2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(M2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn mul(&self, o: &M2) -> M2 {
        let mut r = M2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }

    pub fn add(&self, o: &M2) -> M2 {
        M2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }

    pub fn scale(&self, c: f64) -> M2 {
        M2::new(c * self.m[0][0], c * self.m[0][1], c * self.m[1][0], c * self.m[1][1])
    }

    /// Scalar `c` if the matrix is `c·Id`.
    pub fn as_scalar(&self) -> Option<f64> {
        (self.m[0][1] == 0.0 && self.m[1][0] == 0.0 && self.m[0][0] == self.m[1][1])
            .then_some(self.m[0][0])
    }

    /// Eigenpairs of a symmetric matrix, eigenvalues ascending.
    pub fn sym_eigen(&self) -> [(f64, V2); 2] {
        let a = self.m[0][0];
        let b = 0.5 * (self.m[0][1] + self.m[1][0]);
        let d = self.m[1][1];
        let mean = 0.5 * (a + d);
        let rad = libm::hypot(0.5 * (a - d), b);
        let (l0, l1) = (mean - rad, mean + rad);
        if rad == 0.0 {
            return [(l0, V2::new(1.0, 0.0)), (l1, V2::new(0.0, 1.0))];
        }
        // Eigenvector for l1 from whichever row is better conditioned.
        let v1 = if (a - l0).abs() >= (d - l0).abs() {
            V2::new(a - l0, b)
        } else {
            V2::new(b, d - l0)
        };
        let v1 = (1.0 / v1.norm()) * v1;
        let v0 = V2::new(-v1.y, v1.x);
        [(l0, v0), (l1, v1)]
    }
}
