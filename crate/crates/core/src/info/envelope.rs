use crate::error::{invalid, Result};

/// Upper concave envelope of a finite point set, stored as its hull vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Smallest concave function lying on or above every point.
pub fn upper_convex_envelope(points: &[(f64, f64)]) -> Result<Envelope> {
    if points.is_empty() {
        return invalid("envelope of an empty point set");
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return invalid("non-finite point in envelope input");
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return invalid("envelope input has repeated x values");
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(Envelope { vertices: hull })
}

impl Envelope {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Envelope value at x, which must lie inside the input range.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let first = self.vertices[0];
        let last = self.vertices[self.vertices.len() - 1];
        if !(x >= first.0 - 1e-12 && x <= last.0 + 1e-12) {
            return invalid(format!("x = {x} outside [{}, {}]", first.0, last.0));
        }
        if self.vertices.len() == 1 {
            return Ok(first.1);
        }
        let i = self
            .vertices
            .windows(2)
            .position(|w| x <= w[1].0)
            .unwrap_or(self.vertices.len() - 2);
        let (a, b) = (self.vertices[i], self.vertices[i + 1]);
        let t = ((x - a.0) / (b.0 - a.0)).clamp(0.0, 1.0);
        Ok(a.1 + t * (b.1 - a.1))
    }
}

/// Sum-rate values on a cost grid together with their concave envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub method: String,
    pub taus: Vec<f64>,
    /// Values before time sharing.
    pub pre_envelope: Vec<f64>,
    pub envelope: Envelope,
}

impl RateCurve {
    pub fn new(method: impl Into<String>, taus: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if taus.len() != values.len() {
            return invalid("tau grid and values differ in length");
        }
        let pts: Vec<(f64, f64)> = taus.iter().copied().zip(values.iter().copied()).collect();
        let envelope = upper_convex_envelope(&pts)?;
        Ok(Self {
            method: method.into(),
            taus,
            pre_envelope: values,
            envelope,
        })
    }

    /// Envelope values at the grid points.
    pub fn sum_rates(&self) -> Vec<f64> {
        self.taus
            .iter()
            .map(|&t| self.envelope.eval(t).expect("grid points lie in range"))
            .collect()
    }

    pub fn value_at(&self, tau: f64) -> Result<f64> {
        self.envelope.eval(tau)
    }

    /// Rows (tau, sum_rate, method, pre_envelope).
    pub fn rows(&self) -> Vec<(f64, f64, String, f64)> {
        self.taus
            .iter()
            .zip(self.sum_rates())
            .zip(&self.pre_envelope)
            .map(|((&t, r), &p)| (t, r, self.method.clone(), p))
            .collect()
    }
}
