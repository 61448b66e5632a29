//! Closed-form recovery and non-recovery boundaries of the metric
//! relaxation, the information-theoretic boundary in the logarithmic
//! regime, and the SDP sufficient condition, sampled into curves.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for deciding that `1/(1-ω)` is an integer.
pub const INTEGER_TOL: f64 = 1e-9;

/// Largest `q` below which the relaxation recovers in the constant-density
/// regime: `q = p - 1/2`.
pub fn lp_recovery_boundary_very_dense(p: f64) -> Result<f64> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 1/2 < p < 1, got {p}"
        )));
    }
    Ok(p - 0.5)
}

/// `Some(k)` when `x` is within relative `INTEGER_TOL` of the integer `k`.
pub fn as_integer(x: f64) -> Option<u64> {
    let r = x.round();
    ((x - r).abs() <= INTEGER_TOL * x.abs().max(1.0) && r >= 1.0).then_some(r as u64)
}

/// Smallest `β` (with `q = β n^-ω`) above which the relaxation provably fails,
/// for `p = α n^-ω`.
pub fn lp_nonrecovery_boundary(omega: f64, alpha: f64) -> Result<f64> {
    lp_nonrecovery_boundary_with(omega, alpha, None)
}

/// As [`lp_nonrecovery_boundary`], with `integer` overriding the detection
/// of `1/(1-ω) ∈ ℕ`.
pub fn lp_nonrecovery_boundary_with(omega: f64, alpha: f64, integer: Option<bool>) -> Result<f64> {
    if !(0.0..1.0).contains(&omega) || !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= ω < 1 and α > 0, got ω = {omega}, α = {alpha}"
        )));
    }
    let k = 1.0 / (1.0 - omega);
    let detected = as_integer(k);
    let whole = match integer {
        Some(true) => Some(detected.unwrap_or(k.round().max(1.0) as u64)),
        Some(false) => None,
        None => detected,
    };
    match whole {
        Some(1) => {
            if alpha >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "constant density needs α < 1, got {alpha}"
                )));
            }
            let root = ((3.0 - alpha).powi(2) - 4.0 * alpha).sqrt();
            Ok(((3.0 - alpha - root) / 2.0).max(2.0 * alpha - 1.0))
        }
        Some(2) => {
            let e = (-alpha * alpha).exp();
            Ok(alpha * ((1.0 - 2.0 * e) / (2.0 - e)).max(1.0 / (3.0 + 2.0 * e)))
        }
        Some(m) => {
            let m = m as f64;
            Ok(alpha / (2.0 * m - 1.0 + 2.0 * (-alpha.powf(m)).exp()))
        }
        None => Ok(alpha / (2.0 * k.ceil() - 1.0)),
    }
}

/// `β = (√α - √2)²`; exact recovery is impossible for every `β` when `α < 2`.
pub fn info_theoretic_log_boundary(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("need α >= 0, got {alpha}")));
    }
    if alpha < 2.0 {
        return Err(Error::Precondition(format!(
            "α = {alpha} < 2: no β allows exact recovery"
        )));
    }
    Ok((alpha.sqrt() - 2f64.sqrt()).powi(2))
}

/// Sufficient condition for the SDP relaxation:
/// `log n/(3n) < p < 1/2` and `p - q >= (12 + ε) √(p log n / n)`.
pub fn sdp_sufficient(n: usize, p: f64, q: f64, eps: f64) -> bool {
    if n < 3 {
        return false;
    }
    let nf = n as f64;
    let ln = nf.ln();
    ln / (3.0 * nf) < p && p < 0.5 && p - q >= (12.0 + eps) * (p * ln / nf).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCurve {
    pub name: String,
    /// Density exponent, when the curve is drawn at a fixed one.
    pub omega: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

/// Evenly spaced abscissae `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) {
            return Err(Error::InvalidParameter(format!("bad grid {self:?}")));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CurveFamily {
    /// Abscissa `p`, ordinate `q`.
    VeryDense,
    /// Abscissa `ω`, ordinate `β/α` at the given `α`.
    Dense { alpha: f64 },
    /// Abscissa `α`, ordinate `β`.
    Log,
}

fn sample(points: &[f64], f: impl Fn(f64) -> Result<f64>) -> Vec<(f64, f64)> {
    points
        .iter()
        .filter_map(|&x| f(x).ok().filter(|y| y.is_finite()).map(|y| (x, y)))
        .collect()
}

/// Boundary curves sampled on `grid`; abscissae outside a curve's domain
/// are skipped.
pub fn emit_curves(family: CurveFamily, grid: Grid) -> Result<Vec<ThresholdCurve>> {
    let xs = grid.points()?;
    Ok(match family {
        CurveFamily::VeryDense => vec![
            ThresholdCurve {
                name: "lp_recovery".into(),
                omega: Some(0.0),
                samples: sample(&xs, lp_recovery_boundary_very_dense),
            },
            ThresholdCurve {
                name: "lp_nonrecovery".into(),
                omega: Some(0.0),
                samples: sample(&xs, |p| lp_nonrecovery_boundary(0.0, p)),
            },
        ],
        CurveFamily::Dense { alpha } => vec![ThresholdCurve {
            name: "lp_nonrecovery_ratio".into(),
            omega: None,
            samples: sample(&xs, |w| Ok(lp_nonrecovery_boundary(w, alpha)? / alpha)),
        }],
        CurveFamily::Log => vec![ThresholdCurve {
            name: "info_theoretic".into(),
            omega: Some(1.0),
            samples: sample(&xs, info_theoretic_log_boundary),
        }],
    })
}

/// Writes `curve,abscissa,ordinate` rows.
pub fn write_curves_csv<W: Write>(curves: &[ThresholdCurve], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["curve", "abscissa", "ordinate"])?;
    for c in curves {
        for &(x, y) in &c.samples {
            out.write_record([c.name.clone(), x.to_string(), y.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn recovery_line() {
        assert_relative_eq!(
            lp_recovery_boundary_very_dense(0.8).unwrap(),
            0.3,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            lp_recovery_boundary_very_dense(0.51).unwrap(),
            0.01,
            epsilon = 1e-15
        );
        assert!(lp_recovery_boundary_very_dense(0.5).is_err());
    }

    #[test]
    fn nonrecovery_cases() {
        assert_relative_eq!(
            lp_nonrecovery_boundary(0.0, 0.8).unwrap(),
            0.6,
            epsilon = 1e-12
        );
        let e = (-1.0f64).exp();
        let half = lp_nonrecovery_boundary(0.5, 1.0).unwrap();
        assert_relative_eq!(half, 1.0 / (3.0 + 2.0 * e), epsilon = 1e-15);
        assert!((half - 0.2677).abs() < 1e-4);
        assert_relative_eq!(
            lp_nonrecovery_boundary(0.4, 1.0).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        // 1/(1 - 2/3) = 3
        let third = lp_nonrecovery_boundary(2.0 / 3.0, 1.0).unwrap();
        assert_relative_eq!(third, 1.0 / (5.0 + 2.0 * e), epsilon = 1e-12);
        // the override treats a rounded decimal as an integer exponent
        assert_relative_eq!(
            lp_nonrecovery_boundary_with(0.6667, 1.0, Some(true)).unwrap(),
            1.0 / (5.0 + 2.0 * e),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            lp_nonrecovery_boundary(0.6667, 1.0).unwrap(),
            1.0 / 7.0,
            epsilon = 1e-15
        );
        assert!(lp_nonrecovery_boundary(0.0, 1.0).is_err());
        assert!(lp_nonrecovery_boundary(1.0, 0.5).is_err());
        assert!(lp_nonrecovery_boundary(0.3, -1.0).is_err());
    }

    #[test]
    fn info_theoretic() {
        assert_eq!(info_theoretic_log_boundary(2.0).unwrap(), 0.0);
        assert_relative_eq!(
            info_theoretic_log_boundary(8.0).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        // √4.5 = (3/2)√2
        assert_relative_eq!(
            info_theoretic_log_boundary(4.5).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        assert!(matches!(
            info_theoretic_log_boundary(1.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            info_theoretic_log_boundary(-1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn sdp_condition() {
        assert!(sdp_sufficient(1_000_000, 0.4, 0.1, 0.1));
        assert!(!sdp_sufficient(100, 0.4, 0.39, 0.1));
        assert!(!sdp_sufficient(1_000_000, 0.6, 0.1, 0.1));
    }

    #[test]
    fn curves() {
        let g = Grid {
            start: 0.5,
            stop: 1.0,
            step: 0.01,
        };
        assert_eq!(g.points().unwrap().len(), 51);
        let c = emit_curves(CurveFamily::VeryDense, g).unwrap();
        assert_eq!(c.len(), 2);
        // p = 0.5 and p = 1.0 lie outside both domains
        assert_eq!(c[0].samples.len(), 49);
        assert!(c
            .iter()
            .all(|c| c.samples.windows(2).all(|w| w[0].0 < w[1].0)));
        let d = emit_curves(
            CurveFamily::Dense { alpha: 0.8 },
            Grid {
                start: 0.0,
                stop: 0.95,
                step: 0.05,
            },
        )
        .unwrap();
        assert_relative_eq!(d[0].samples[0].1, 0.6 / 0.8, epsilon = 1e-12);
        let l = emit_curves(
            CurveFamily::Log,
            Grid {
                start: 0.0,
                stop: 10.0,
                step: 0.5,
            },
        )
        .unwrap();
        assert_eq!(l[0].samples.first().unwrap().0, 2.0);
        let mut buf = Vec::new();
        write_curves_csv(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("curve,abscissa,ordinate\nlp_recovery,0.51,"));
    }

    proptest! {
        #[test]
        fn nonrecovery_lies_above_recovery(p in 0.5001f64..0.9999) {
            let up = lp_nonrecovery_boundary(0.0, p).unwrap();
            prop_assert!(up > p - 0.5);
        }

        #[test]
        fn dispatch_is_total(omega in 0.0f64..0.999, alpha in 0.01f64..0.99) {
            let b = lp_nonrecovery_boundary(omega, alpha).unwrap();
            prop_assert!(b.is_finite() && b > 0.0);
        }
    }
}
