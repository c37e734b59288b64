//! Measurement pointer: characteristic function F(x) = ⟨Φ|e^{ixq}|Φ⟩, its
//! width C = ½∫F(x)dx and the effective strength Λ = λ/C.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};

const NORMALIZATION_TOL: f64 = 1e-9;
const MODULUS_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-6;
const TAIL_TOL: f64 = 1e-3;

/// Sampled characteristic function, linearly interpolated between nodes and
/// zero outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedF {
    x: Vec<f64>,
    f: Vec<Complex64>,
}

impl TabulatedF {
    pub fn new(x: Vec<f64>, f: Vec<Complex64>) -> Result<Self> {
        if x.len() != f.len() {
            return Err(ZenoError::InvalidModel(format!(
                "{} abscissae but {} values",
                x.len(),
                f.len()
            )));
        }
        if x.len() < 2 {
            return Err(ZenoError::InvalidModel(
                "tabulated F needs at least two samples".into(),
            ));
        }
        if x.iter().chain(f.iter().flat_map(|c| [&c.re, &c.im])).any(|v| !v.is_finite()) {
            return Err(ZenoError::InvalidModel("non-finite sample".into()));
        }
        if let Some(w) = x.windows(2).find(|w| w[1] <= w[0]) {
            return Err(ZenoError::InvalidModel(format!(
                "grid not strictly increasing at x = {} -> {}",
                w[0], w[1]
            )));
        }
        let table = Self { x, f };
        let f0 = table.eval(0.0);
        if (f0 - Complex64::new(1.0, 0.0)).norm() > NORMALIZATION_TOL {
            return Err(ZenoError::InvalidModel(format!(
                "F(0) = {f0} but must equal 1"
            )));
        }
        if let Some((x, v)) = table
            .x
            .iter()
            .zip(&table.f)
            .find(|(_, v)| v.norm() > 1.0 + MODULUS_TOL)
        {
            return Err(ZenoError::InvalidModel(format!(
                "|F({x})| = {} exceeds 1",
                v.norm()
            )));
        }
        for (&x, &v) in table.x.iter().zip(&table.f) {
            let mirrored = table.eval(-x);
            if (mirrored - v.conj()).norm() > SYMMETRY_TOL {
                return Err(ZenoError::InvalidModel(format!(
                    "F(-x) != conj F(x) at x = {x}"
                )));
            }
        }
        Ok(table)
    }

    /// Parses `x ReF [ImF]` rows; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut x = Vec::new();
        let mut f = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(ZenoError::InvalidModel(format!(
                    "line {}: expected 2 or 3 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    ZenoError::InvalidModel(format!("line {}: {e}: `{s}`", lineno + 1))
                })
            };
            x.push(parse(cols[0])?);
            let re = parse(cols[1])?;
            let im = if cols.len() == 3 { parse(cols[2])? } else { 0.0 };
            f.push(Complex64::new(re, im));
        }
        Self::new(x, f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ZenoError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[Complex64] {
        &self.f
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let j = self.x.partition_point(|&xj| xj <= x);
        if j == n {
            return self.f[n - 1];
        }
        let (x0, x1) = (self.x[j - 1], self.x[j]);
        let t = (x - x0) / (x1 - x0);
        self.f[j - 1] * (1.0 - t) + self.f[j] * t
    }

    /// Trapezoidal ∫F dx over the grid.
    fn trapezoid(&self) -> Complex64 {
        self.x
            .windows(2)
            .zip(self.f.windows(2))
            .map(|(x, f)| (f[0] + f[1]) * (0.5 * (x[1] - x[0])))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointerKind {
    /// Real Gaussian pointer whose coordinate density |Φ(q)|² has standard
    /// deviation `sigma`.
    Gaussian { sigma: f64 },
    Tabulated(TabulatedF),
}

impl fmt::Display for PointerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointerKind::Gaussian { sigma } => write!(f, "gaussian(sigma={sigma})"),
            PointerKind::Tabulated(t) => write!(f, "tabulated({} samples)", t.x.len()),
        }
    }
}

/// Pointer state together with the coupling strength λ of H_I = λ q H₀.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    kind: PointerKind,
    lambda: f64,
}

impl DetectorModel {
    pub fn gaussian(sigma: f64, lambda: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(ZenoError::InvalidModel(format!(
                "Gaussian pointer needs sigma > 0, got {sigma}"
            )));
        }
        Self::new(PointerKind::Gaussian { sigma }, lambda)
    }

    pub fn tabulated(table: TabulatedF, lambda: f64) -> Result<Self> {
        Self::new(PointerKind::Tabulated(table), lambda)
    }

    fn new(kind: PointerKind, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(ZenoError::InvalidModel(format!(
                "coupling lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self { kind, lambda })
    }

    pub fn kind(&self) -> &PointerKind {
        &self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.kind.clone(), lambda)
    }

    pub fn characteristic_function(&self, x: f64) -> Complex64 {
        match &self.kind {
            PointerKind::Gaussian { sigma } => {
                Complex64::new((-0.5 * sigma * sigma * x * x).exp(), 0.0)
            }
            PointerKind::Tabulated(t) => t.eval(x),
        }
    }

    /// C = ½∫F(x)dx.
    pub fn width_c(&self) -> Result<f64> {
        match &self.kind {
            PointerKind::Gaussian { sigma } => Ok((PI / 2.0).sqrt() / sigma),
            PointerKind::Tabulated(t) => {
                let n = t.x.len();
                for j in [0, n - 1] {
                    if t.f[j].norm() > TAIL_TOL {
                        return Err(ZenoError::NonDecayingTail {
                            x: t.x[j],
                            value: t.f[j].norm(),
                        });
                    }
                }
                let integral = t.trapezoid() * 0.5;
                if integral.im.abs() > 1e-10 * integral.re.abs() {
                    return Err(ZenoError::InvalidModel(format!(
                        "complex width C = {integral}; pointer must satisfy F(-x) = conj F(x)"
                    )));
                }
                Ok(integral.re)
            }
        }
    }

    /// Λ = λ/C.
    pub fn lambda_eff(&self) -> Result<f64> {
        let c = self.width_c()?;
        if !(c > 0.0) {
            return Err(ZenoError::DegenerateDetector(c));
        }
        Ok(self.lambda / c)
    }

    /// Points in x where F is not smooth (tabulated nodes); empty for a
    /// Gaussian pointer.
    pub fn kinks(&self) -> &[f64] {
        match &self.kind {
            PointerKind::Gaussian { .. } => &[],
            PointerKind::Tabulated(t) => &t.x,
        }
    }

    /// |x| beyond which |F(x)| is negligible (< ~1e-22 for a Gaussian).
    pub fn support_radius(&self) -> Result<f64> {
        match &self.kind {
            PointerKind::Gaussian { sigma } => Ok(10.0 / sigma),
            PointerKind::Tabulated(t) => Ok(t.x[0].abs().max(t.x[t.x.len() - 1].abs())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_table() -> TabulatedF {
        let eps = 1e-6;
        let x = vec![-1.0 - eps, -1.0, 0.0, 1.0, 1.0 + eps];
        let f = [0.0, 1.0, 1.0, 1.0, 0.0]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        TabulatedF::new(x, f).unwrap()
    }

    #[test]
    fn normalization_at_origin() {
        let g = DetectorModel::gaussian(0.7, 3.0).unwrap();
        assert_eq!(g.characteristic_function(0.0), Complex64::new(1.0, 0.0));
        let b = DetectorModel::tabulated(box_table(), 1.0).unwrap();
        assert_eq!(b.characteristic_function(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gaussian_values() {
        let g1 = DetectorModel::gaussian(1.0, 0.0).unwrap();
        assert!((g1.characteristic_function(1.0).re - (-0.5f64).exp()).abs() < 1e-15);
        let g2 = DetectorModel::gaussian(2.0, 0.0).unwrap();
        let minus = g2.characteristic_function(-1.0);
        assert_eq!(minus, g2.characteristic_function(1.0).conj());
        assert!((minus.re - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn widths() {
        let g1 = DetectorModel::gaussian(1.0, 0.0).unwrap();
        assert!((g1.width_c().unwrap() - 1.253_314_137_315_500_3).abs() < 1e-14);
        let g2 = DetectorModel::gaussian(2.0, 0.0).unwrap();
        assert!((g2.width_c().unwrap() - 0.626_657_068_657_750_1).abs() < 1e-14);
        let b = DetectorModel::tabulated(box_table(), 0.0).unwrap();
        assert!((b.width_c().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn effective_strength() {
        let g = DetectorModel::gaussian(1.0, 100.0).unwrap();
        assert!((g.lambda_eff().unwrap() - 79.788_456_080_286_54).abs() < 1e-10);
        let g0 = DetectorModel::gaussian(1.0, 0.0).unwrap();
        assert_eq!(g0.lambda_eff().unwrap(), 0.0);
        let b = DetectorModel::tabulated(box_table(), 50.0).unwrap();
        assert!((b.lambda_eff().unwrap() - 50.0).abs() < 1e-4);
    }

    #[test]
    fn interpolation_and_outside() {
        let b = box_table();
        assert_eq!(b.eval(0.5), Complex64::new(1.0, 0.0));
        assert_eq!(b.eval(2.0), Complex64::new(0.0, 0.0));
        assert!((b.eval(1.0 + 0.5e-6).re - 0.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_tables() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let err = TabulatedF::new(vec![-1.0, 0.0, 0.0, 1.0], vec![c(0.0), c(1.0), c(1.0), c(0.0)]);
        assert!(matches!(err, Err(ZenoError::InvalidModel(_))));
        let err = TabulatedF::new(vec![-1.0, 0.0, 1.0], vec![c(0.0), c(0.9), c(0.0)]);
        assert!(matches!(err, Err(ZenoError::InvalidModel(_))));
        let err = TabulatedF::new(vec![-1.0, 0.0, 1.0], vec![c(0.0), c(1.0), c(0.5)]);
        assert!(matches!(err, Err(ZenoError::InvalidModel(_))));
        let err = TabulatedF::new(vec![-1.0, 0.0, 1.0], vec![c(1.2), c(1.0), c(1.2)]);
        assert!(matches!(err, Err(ZenoError::InvalidModel(_))));
        assert!(DetectorModel::gaussian(0.0, 1.0).is_err());
        assert!(DetectorModel::gaussian(1.0, -1.0).is_err());
    }

    #[test]
    fn non_decaying_tail() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let t = TabulatedF::new(vec![-1.0, 0.0, 1.0], vec![c(0.5), c(1.0), c(0.5)]).unwrap();
        let d = DetectorModel::tabulated(t, 1.0).unwrap();
        assert!(matches!(d.width_c(), Err(ZenoError::NonDecayingTail { .. })));
        assert!(d.lambda_eff().is_err());
    }

    #[test]
    fn parses_text_table() {
        let text = "# x ReF ImF\n-2 0 0\n-1 0.5 -0.1\n\n0 1\n1 0.5 0.1\n2 0 0\n";
        let t = TabulatedF::parse(text).unwrap();
        assert_eq!(t.nodes().len(), 5);
        assert_eq!(t.values()[1], Complex64::new(0.5, -0.1));
        assert!(TabulatedF::parse("0 1 2 3\n").is_err());
        assert!(TabulatedF::parse("0 abc\n").is_err());
    }

    #[test]
    fn complex_symmetric_table_has_real_width() {
        let text = "-2 0 0\n-1 0.5 -0.1\n0 1\n1 0.5 0.1\n2 0 0\n";
        let d = DetectorModel::tabulated(TabulatedF::parse(text).unwrap(), 1.0).unwrap();
        assert!((d.width_c().unwrap() - 1.0).abs() < 1e-14);
    }
}
