//! AC evaluation of an operating point: bus injections, directed line
//! currents and flows, losses and limit screening. Also the diagnostics
//! comparing the linear DC flow with the sine flow it approximates.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dcopf::DispatchResult;
use crate::dense::{fmt_sig6, CMatrix, Matrix};
use crate::error::{Error, Result};
use crate::matrices::{build_b_line, build_y_bus, build_y_line, Direction};
use crate::netmodel::{BusId, Network};

/// Per-bus complex voltages in p.u.
#[derive(Clone, Debug, PartialEq)]
pub struct VoltageProfile {
    v: Vec<Complex64>,
}

impl VoltageProfile {
    pub fn new(v: Vec<Complex64>) -> Result<Self> {
        for (k, z) in v.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) || z.norm() <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "voltage at position {k} must be finite with positive magnitude"
                )));
            }
        }
        Ok(VoltageProfile { v })
    }

    /// From magnitudes (p.u.) and angles (rad).
    pub fn from_polar(mag: &[f64], angle: &[f64]) -> Result<Self> {
        if mag.len() != angle.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} magnitudes, {} angles",
                mag.len(),
                angle.len()
            )));
        }
        Self::new(mag.iter().zip(angle).map(|(&m, &a)| Complex64::from_polar(m, a)).collect())
    }

    /// Unit magnitudes at the given angles.
    pub fn from_angles(theta: &[f64]) -> Result<Self> {
        Self::new(theta.iter().map(|&a| Complex64::from_polar(1.0, a)).collect())
    }

    pub fn flat(n: usize) -> Self {
        VoltageProfile {
            v: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Current,
    Apparent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub line: usize,
    pub key: String,
    /// End at which the limit is exceeded.
    pub from_end: bool,
    pub kind: ViolationKind,
    /// p.u.
    pub magnitude: f64,
    pub limit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcEvaluation {
    pub s_bus: Vec<Complex64>,
    pub i_fwd: Vec<Complex64>,
    pub i_rev: Vec<Complex64>,
    pub s_fwd: Vec<Complex64>,
    pub s_rev: Vec<Complex64>,
    pub losses: Vec<Complex64>,
    pub violations: Vec<Violation>,
}

impl AcEvaluation {
    pub fn total_injection(&self) -> Complex64 {
        self.s_bus.iter().sum()
    }

    pub fn total_losses(&self) -> Complex64 {
        self.losses.iter().sum()
    }
}

/// The per-unit current limit implied by an apparent-power limit at nominal voltage.
pub fn rating_to_current_limit(rating_pu: f64) -> Result<f64> {
    if !(rating_pu.is_finite() && rating_pu > 0.0) {
        return Err(Error::InvalidArgument(format!("rating must be positive, got {rating_pu}")));
    }
    Ok(rating_pu)
}

/// Evaluates injections, flows and losses at a voltage profile.
pub fn evaluate_ac(net: &Network, v: &VoltageProfile) -> Result<AcEvaluation> {
    let net = net.per_unit();
    if v.len() != net.n_buses() {
        return Err(Error::DimensionMismatch(format!(
            "voltage profile has {} entries, network has {} buses",
            v.len(),
            net.n_buses()
        )));
    }
    let v = v.as_slice();
    let y_bus = build_y_bus(&net);
    let i_bus = y_bus.matvec(v)?;
    let s_bus: Vec<Complex64> = v.iter().zip(&i_bus).map(|(vi, ii)| vi * ii.conj()).collect();

    let i_fwd = build_y_line(&net, Direction::Forward).matvec(v)?;
    let i_rev = build_y_line(&net, Direction::Reverse).matvec(v)?;
    let ends = net.line_endpoints();
    let s_fwd: Vec<Complex64> = ends.iter().zip(&i_fwd).map(|(&(i, _), c)| v[i] * c.conj()).collect();
    let s_rev: Vec<Complex64> = ends.iter().zip(&i_rev).map(|(&(_, j), c)| v[j] * c.conj()).collect();
    let losses = s_fwd.iter().zip(&s_rev).map(|(a, b)| a + b).collect();

    let keys = net.line_keys();
    let mut violations = Vec::new();
    for (k, line) in net.lines.iter().enumerate() {
        let Some(rating) = line.rating else { continue };
        let i_max = rating_to_current_limit(rating)?;
        let ends = [(true, i_fwd[k], s_fwd[k]), (false, i_rev[k], s_rev[k])];
        for (from_end, i, s) in ends {
            for (kind, magnitude, limit) in [
                (ViolationKind::Current, i.norm(), i_max),
                (ViolationKind::Apparent, s.norm(), rating),
            ] {
                if magnitude > limit * (1.0 + 1e-9) {
                    violations.push(Violation {
                        line: k,
                        key: keys[k].clone(),
                        from_end,
                        kind,
                        magnitude,
                        limit,
                    });
                }
            }
        }
    }

    Ok(AcEvaluation {
        s_bus,
        i_fwd,
        i_rev,
        s_fwd,
        s_rev,
        losses,
        violations,
    })
}

/// `sin(θ_i − θ_j)/x` per line, p.u.
pub fn sine_flow(net: &Network, theta: &[f64]) -> Result<Vec<f64>> {
    let net = net.per_unit();
    if theta.len() != net.n_buses() {
        return Err(Error::DimensionMismatch(format!(
            "{} angles for {} buses",
            theta.len(),
            net.n_buses()
        )));
    }
    Ok(net
        .line_endpoints()
        .iter()
        .zip(&net.lines)
        .map(|(&(i, j), l)| (theta[i] - theta[j]).sin() / l.x)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub delta: f64,
    pub sin_delta: f64,
    pub abs_err: f64,
    /// `abs_err / |δ|`; `None` at δ = 0.
    pub rel_err: Option<f64>,
    /// `|δ| > π/6`.
    pub beyond_pi_6: bool,
}

pub fn linearization_gap(theta_diffs: &[f64]) -> Vec<GapEntry> {
    theta_diffs
        .iter()
        .map(|&d| {
            let s = d.sin();
            let abs_err = (d - s).abs();
            GapEntry {
                delta: d,
                sin_delta: s,
                abs_err,
                rel_err: (d != 0.0).then(|| abs_err / d.abs()),
                beyond_pi_6: d.abs() > FRAC_PI_6,
            }
        })
        .collect()
}

/// `delta,sin_delta` over [−π/2, π/2] in 0.01 rad steps.
pub fn sine_samples_csv() -> String {
    let mut s = String::from("delta,sin_delta\n");
    let steps = (2.0 * FRAC_PI_2 / 0.01).floor() as i64;
    for k in 0..=steps {
        let d = -FRAC_PI_2 + k as f64 * 0.01;
        let _ = writeln!(s, "{},{}", fmt_sig6(d), fmt_sig6(d.sin()));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineCheck {
    pub line: String,
    pub from: BusId,
    pub to: BusId,
    pub angle_diff_rad: f64,
    pub dc_pu: f64,
    pub sine_pu: f64,
    pub gap_pu: f64,
    /// Larger of the two end apparent flows at unit voltage magnitudes.
    pub apparent_pu: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit_pu: Option<f64>,
    /// Sine flow over the limit while the DC flow is within it.
    pub hidden_overload: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub version: String,
    pub lines: Vec<LineCheck>,
    pub max_gap_pu: f64,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

/// Compares DC and sine flows at the dispatch angles and screens the AC
/// flows at unit magnitudes against the ratings.
pub fn validate_angles(net: &Network, theta: &[f64]) -> Result<ValidationReport> {
    let pu = net.per_unit();
    let sine = sine_flow(&pu, theta)?;
    let dc = build_b_line(&pu).matvec(theta)?;
    let ac = evaluate_ac(&pu, &VoltageProfile::from_angles(theta)?)?;
    let ends = pu.line_endpoints();
    let mut lines = Vec::with_capacity(pu.n_lines());
    let mut warnings = Vec::new();
    for (k, key) in pu.line_keys().into_iter().enumerate() {
        let (i, j) = ends[k];
        let delta = theta[i] - theta[j];
        let limit = pu.lines[k].rating;
        let hidden = limit.is_some_and(|l| sine[k].abs() > l * (1.0 + 1e-9) && dc[k].abs() <= l * (1.0 + 1e-9));
        if delta.abs() > FRAC_PI_6 {
            warnings.push(format!("approx_warning: line {key} angle difference {:.4} rad exceeds pi/6", delta.abs()));
        }
        lines.push(LineCheck {
            line: key,
            from: pu.lines[k].from,
            to: pu.lines[k].to,
            angle_diff_rad: delta,
            dc_pu: dc[k],
            sine_pu: sine[k],
            gap_pu: (dc[k] - sine[k]).abs(),
            apparent_pu: ac.s_fwd[k].norm().max(ac.s_rev[k].norm()),
            limit_pu: limit,
            hidden_overload: hidden,
        });
    }
    let max_gap = lines.iter().map(|l| l.gap_pu).fold(0.0, f64::max);
    Ok(ValidationReport {
        version: crate::VERSION.to_string(),
        lines,
        max_gap_pu: max_gap,
        violations: ac.violations,
        warnings,
    })
}

/// [`validate_angles`] at the angles of an angle-formulation result.
pub fn dc_ac_gap(net: &Network, r: &DispatchResult) -> Result<ValidationReport> {
    let theta = r.theta.as_ref().ok_or(Error::MissingAngles)?;
    validate_angles(net, theta)
}

/// `[[Re, −Im], [Im, Re]]`.
pub fn complex_block(a: &CMatrix) -> Matrix {
    let (r, c) = a.shape();
    let mut out = Matrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// `[Re; Im]`.
pub fn complex_stack(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect()
}

pub fn complex_unstack(s: &[f64]) -> Result<Vec<Complex64>> {
    if !s.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch("stacked vector has odd length".into()));
    }
    let n = s.len() / 2;
    Ok((0..n).map(|k| Complex64::new(s[k], s[k + n])).collect())
}
