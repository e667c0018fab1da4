use super::FunctionError;
use std::fmt::Write as _;
use std::path::Path;

const HEADER_PREFIX: &str = "# interpolation: ";

/// Rule used between grid radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// `v_i (r/r_i)^p` per cell: exact for pure powers.
    PowerLaw,
    /// Cubic through the four nearest samples in `(ln r, ln|f|)`: exact for
    /// `exp` of cubics in `ln r`, fourth order for smooth positive profiles.
    LogCubic,
}

impl Interpolation {
    fn name(self) -> &'static str {
        match self {
            Self::PowerLaw => "power-law",
            Self::LogCubic => "log-cubic",
        }
    }
}

/// Radial function known at grid radii. Cells whose end values do not share
/// a sign are interpolated linearly in `log r`, and `LogCubic` falls back to
/// the power-law cell when its stencil does. Constant below the grid, zero
/// above it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub interpolation: Interpolation,
    exponents: Vec<Option<f64>>,
}

impl Sampled {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self, FunctionError> {
        Self::with_interpolation(radii, values, Interpolation::PowerLaw)
    }

    pub fn with_interpolation(
        radii: Vec<f64>,
        values: Vec<f64>,
        interpolation: Interpolation,
    ) -> Result<Self, FunctionError> {
        if radii.len() != values.len() {
            return Err(FunctionError::InvalidSampled(format!(
                "{} radii but {} values",
                radii.len(),
                values.len()
            )));
        }
        if radii.len() < 2 {
            return Err(FunctionError::InvalidSampled("need at least two samples".into()));
        }
        if !(radii[0] > 0.0) {
            return Err(FunctionError::InvalidSampled("radii must be positive".into()));
        }
        if let Some(w) = radii.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(FunctionError::InvalidSampled(format!("radii not strictly increasing at {}", w[1])));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(FunctionError::InvalidSampled(format!("non-finite value {v}")));
        }
        let exponents = radii
            .windows(2)
            .zip(values.windows(2))
            .map(|(r, v)| {
                (v[0] != 0.0 && v[1] != 0.0 && v[0].signum() == v[1].signum())
                    .then(|| (v[1] / v[0]).ln() / (r[1] / r[0]).ln())
            })
            .collect();
        Ok(Self { radii, values, interpolation, exponents })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let last = self.radii.len() - 1;
        if r <= self.radii[0] {
            return self.values[0];
        }
        if r >= self.radii[last] {
            return if r == self.radii[last] { self.values[last] } else { 0.0 };
        }
        let i = self.radii.partition_point(|&x| x <= r) - 1;
        if self.interpolation == Interpolation::LogCubic {
            if let Some(v) = self.log_cubic(i, r) {
                return v;
            }
        }
        let (r0, r1) = (self.radii[i], self.radii[i + 1]);
        match self.exponents[i] {
            Some(p) => self.values[i] * (r / r0).powf(p),
            None => {
                let w = (r / r0).ln() / (r1 / r0).ln();
                self.values[i] * (1.0 - w) + self.values[i + 1] * w
            }
        }
    }

    fn log_cubic(&self, i: usize, r: f64) -> Option<f64> {
        let last = self.radii.len() - 1;
        let lo = i.checked_sub(1)?;
        let hi = i + 2;
        if hi > last {
            return None;
        }
        let sign = self.values[i].signum();
        if self.values[lo..=hi].iter().any(|v| *v == 0.0 || v.signum() != sign) {
            return None;
        }
        let u = r.ln();
        let xs: [f64; 4] = std::array::from_fn(|k| self.radii[lo + k].ln());
        let ys: [f64; 4] = std::array::from_fn(|k| self.values[lo + k].abs().ln());
        let mut acc = 0.0;
        for k in 0..4 {
            let mut l = 1.0;
            for m in 0..4 {
                if m != k {
                    l *= (u - xs[m]) / (xs[k] - xs[m]);
                }
            }
            acc += l * ys[k];
        }
        Some(sign * acc.exp())
    }
}

pub fn write_sampled(s: &Sampled, path: &Path) -> Result<(), FunctionError> {
    let mut out = String::new();
    out.push_str(HEADER_PREFIX);
    out.push_str(s.interpolation.name());
    out.push('\n');
    for (r, v) in s.radii.iter().zip(&s.values) {
        writeln!(out, "{r:e} {v:e}").unwrap();
    }
    std::fs::write(path, out).map_err(|e| FunctionError::Io(e.to_string()))
}

pub fn read_sampled(path: &Path) -> Result<Sampled, FunctionError> {
    let text = std::fs::read_to_string(path).map_err(|e| FunctionError::Io(e.to_string()))?;
    let mut lines = text.lines().enumerate();
    let rule = lines.next().and_then(|(_, h)| h.trim().strip_prefix(HEADER_PREFIX)).map(str::trim);
    let interpolation = match rule {
        Some("power-law") => Interpolation::PowerLaw,
        Some("log-cubic") => Interpolation::LogCubic,
        _ => {
            return Err(FunctionError::Parse {
                line: 1,
                msg: format!("expected header `{HEADER_PREFIX}power-law` or `{HEADER_PREFIX}log-cubic`"),
            })
        }
    };
    let (mut radii, mut values) = (Vec::new(), Vec::new());
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let mut num = |what: &str| -> Result<f64, FunctionError> {
            cols.next()
                .ok_or_else(|| FunctionError::Parse { line: i + 1, msg: format!("missing {what}") })?
                .parse()
                .map_err(|e| FunctionError::Parse { line: i + 1, msg: format!("{what}: {e}") })
        };
        radii.push(num("radius")?);
        values.push(num("value")?);
        if cols.next().is_some() {
            return Err(FunctionError::Parse { line: i + 1, msg: "expected two columns".into() });
        }
    }
    Sampled::with_interpolation(radii, values, interpolation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_cells_are_exact_for_powers() {
        let radii: Vec<f64> = (0..20).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
        let values: Vec<f64> = radii.iter().map(|r| 3.0 * r.powf(-1.7)).collect();
        let s = Sampled::new(radii, values).unwrap();
        for r in [1.1, 1.9, 7.3, 20.0] {
            assert!((s.eval(r) / (3.0 * f64::powf(r, -1.7)) - 1.0).abs() < 1e-13);
        }
        assert_eq!(s.eval(0.5), 3.0);
        assert_eq!(s.eval(100.0), 0.0);
    }

    #[test]
    fn log_cubic_is_exact_for_gaussians() {
        let radii: Vec<f64> = (-32..=48).map(|k| 2f64.powf(k as f64 / 16.0)).collect();
        let g = |r: f64| (-(r.ln()).powi(2)).exp();
        let values = radii.iter().map(|&r| g(r)).collect();
        let s = Sampled::with_interpolation(radii, values, Interpolation::LogCubic).unwrap();
        for r in [0.3, 1.0, 2.2, 6.1] {
            assert!((s.eval(r) / g(r) - 1.0).abs() < 1e-12);
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.txt");
        write_sampled(&s, &p).unwrap();
        assert_eq!(read_sampled(&p).unwrap().interpolation, Interpolation::LogCubic);
    }

    #[test]
    fn sign_change_falls_back_to_log_linear() {
        let s = Sampled::new(vec![1.0, 4.0], vec![-1.0, 1.0]).unwrap();
        assert!(s.eval(2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Sampled::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Sampled::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Sampled::new(vec![1.0, 2.0], vec![f64::NAN, 0.0]).is_err());
        assert!(Sampled::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        let s = Sampled::new(vec![0.5, 1.0, 2.0], vec![1.0, 0.25, 0.0]).unwrap();
        write_sampled(&s, &p).unwrap();
        assert_eq!(read_sampled(&p).unwrap(), s);
        std::fs::write(&p, "radius value\n1 2\n").unwrap();
        assert!(matches!(read_sampled(&p), Err(FunctionError::Parse { line: 1, .. })));
        std::fs::write(&p, "# interpolation: power-law\n1 2\n2 x\n").unwrap();
        assert!(matches!(read_sampled(&p), Err(FunctionError::Parse { line: 3, .. })));
    }
}
