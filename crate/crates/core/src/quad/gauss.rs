use std::f64::consts::PI;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `m`-point rule, exact for polynomials of degree `2m - 1`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            // Newton from the Tricomi initial guess
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 1.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = (1.0 - x) / 2.0;
            nodes[m - 1 - i] = (1.0 + x) / 2.0;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Composite rule with `2^level` equal panels.
    pub fn composite(&self, level: u32) -> GaussLegendre {
        let panels = 1usize << level;
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * self.len());
        let mut weights = Vec::with_capacity(panels * self.len());
        for k in 0..panels {
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                nodes.push((k as f64 + x) * h);
                weights.push(w * h);
            }
        }
        GaussLegendre { nodes, weights }
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
