use super::linalg::lambda_min;

/// A `C^2` function with analytic derivatives and bounds on the unit cube.
pub trait SmoothTestFunction: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Row-major `d x d` Hessian.
    fn hessian(&self, x: &[f64]) -> Vec<f64>;
    /// Bound on the Hessian operator norm over the unit cube.
    fn hessian_bound(&self) -> f64;
    /// Bound on the gradient norm over the unit cube.
    fn lipschitz_bound(&self) -> f64;
}

/// `phi(x) = x^T A x / 2 + <b, x> + c` with symmetric `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    d: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: f64,
}

impl Quadratic {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Self {
        let d = b.len();
        assert_eq!(a.len(), d * d, "A must be {d}x{d}");
        Self { d, a, b, c }
    }

    /// `|x|^2 / 2`.
    pub fn half_squared_norm(d: usize) -> Self {
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + i] = 1.0;
        }
        Self::new(a, vec![0.0; d], 0.0)
    }

    pub fn constant(d: usize, c: f64) -> Self {
        Self::new(vec![0.0; d * d], vec![0.0; d], c)
    }

    pub fn affine(b: Vec<f64>, c: f64) -> Self {
        let d = b.len();
        Self::new(vec![0.0; d * d], b, c)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.a[i * self.d + j] * x[j]).sum::<f64>())
            .collect()
    }
}

impl SmoothTestFunction for Quadratic {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        0.5 * ax.iter().zip(x).map(|(u, v)| u * v).sum::<f64>()
            + self.b.iter().zip(x).map(|(u, v)| u * v).sum::<f64>()
            + self.c
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.apply(x).iter().zip(&self.b).map(|(u, v)| u + v).collect()
    }

    fn hessian(&self, _x: &[f64]) -> Vec<f64> {
        self.a.clone()
    }

    fn hessian_bound(&self) -> f64 {
        let neg: Vec<f64> = self.a.iter().map(|v| -v).collect();
        let lo = lambda_min(&self.a, self.d).expect("symmetric A");
        let hi = -lambda_min(&neg, self.d).expect("symmetric A");
        lo.abs().max(hi.abs())
    }

    /// The gradient norm is convex in `x`, so its max over the cube sits at a corner.
    fn lipschitz_bound(&self) -> f64 {
        (0u64..1 << self.d)
            .map(|mask| {
                let corner: Vec<f64> = (0..self.d).map(|k| ((mask >> k) & 1) as f64).collect();
                self.gradient(&corner).iter().map(|g| g * g).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}
