//! System matrices: bus and line susceptance matrices, the bus reactance
//! matrix, PTDFs, and the complex bus/line admittance matrices.
//!
//! DC matrices use `b = 1/x` and ignore resistance and shunts. They are not
//! the imaginary part of the series admittance `1/(r + jx)`.

use num_complex::Complex64;

use crate::dense::{invert, CMatrix, Matrix};
use crate::error::{Error, Result};
use crate::netmodel::{BusId, Network};

/// Reference bus used to ground the angle system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlackChoice {
    pub bus: BusId,
    /// Position of `bus` in the network's bus list.
    pub index: usize,
}

impl SlackChoice {
    pub fn new(net: &Network, bus: BusId) -> Result<Self> {
        Ok(SlackChoice {
            bus,
            index: net.bus_index(bus)?,
        })
    }

    /// The slack marked in the case file.
    pub fn from_case(net: &Network) -> Result<Self> {
        let bus = net
            .slack()
            .ok_or_else(|| Error::InvalidCase("no slack bus designated".into()))?;
        Self::new(net, bus)
    }
}

fn bus_labels(net: &Network) -> Vec<String> {
    net.buses.iter().map(|b| b.id.to_string()).collect()
}

/// Bus susceptance matrix `B` with `P = B·δ`. Parallel lines are summed.
pub fn build_b_bus(net: &Network) -> Matrix {
    let n = net.n_buses();
    let mut b = Matrix::zeros(n, n);
    for ((i, j), line) in net.line_endpoints().into_iter().zip(&net.lines) {
        let s = line.susceptance();
        b[(i, i)] += s;
        b[(j, j)] += s;
        b[(i, j)] -= s;
        b[(j, i)] -= s;
    }
    let labels = bus_labels(net);
    b.with_labels(labels.clone(), labels).expect("square labels")
}

/// Line susceptance matrix (L×N): row `(i, j)` holds `+b` at `i` and `-b` at `j`,
/// so `B_line·δ` gives the from→to flows.
pub fn build_b_line(net: &Network) -> Matrix {
    let mut b = Matrix::zeros(net.n_lines(), net.n_buses());
    for (k, ((i, j), line)) in net.line_endpoints().into_iter().zip(&net.lines).enumerate() {
        let s = line.susceptance();
        b[(k, i)] = s;
        b[(k, j)] = -s;
    }
    b.with_labels(net.line_keys(), bus_labels(net)).expect("labels fit")
}

/// Bus reactance matrix: the slack row and column are removed, the remainder
/// inverted, and zeros put back at the slack position.
pub fn build_x_bus(b_bus: &Matrix, slack: SlackChoice) -> Result<Matrix> {
    if !b_bus.is_square() || slack.index >= b_bus.rows() {
        return Err(Error::DimensionMismatch(
            "slack index outside the bus susceptance matrix".into(),
        ));
    }
    let n = b_bus.rows();
    let reduced = b_bus.without_row_col(slack.index);
    let inv = if n > 1 {
        invert(&reduced)?
    } else {
        Matrix::zeros(0, 0)
    };
    let mut x = Matrix::zeros(n, n);
    let map = |k: usize| if k < slack.index { k } else { k + 1 };
    for a in 0..n - 1 {
        for c in 0..n - 1 {
            x[(map(a), map(c))] = inv[(a, c)];
        }
    }
    x.row_labels = b_bus.row_labels.clone();
    x.col_labels = b_bus.col_labels.clone();
    Ok(x)
}

/// PTDF matrix: one row per line (network order), one column per bus.
#[derive(Clone, Debug, PartialEq)]
pub struct PtdfMatrix {
    pub matrix: Matrix,
    pub slack: SlackChoice,
    pub buses: Vec<BusId>,
}

impl PtdfMatrix {
    pub fn n_lines(&self) -> usize {
        self.matrix.rows()
    }

    pub fn get(&self, line: usize, bus: BusId) -> Result<f64> {
        if line >= self.n_lines() {
            return Err(Error::UnknownLine(line));
        }
        let m = self.bus_position(bus)?;
        Ok(self.matrix[(line, m)])
    }

    fn bus_position(&self, bus: BusId) -> Result<usize> {
        self.buses
            .iter()
            .position(|&b| b == bus)
            .ok_or(Error::UnknownBus(bus.0))
    }
}

/// `PTDF = B_line · X_bus`, using the zero-padded reactance matrix.
pub fn build_ptdf(net: &Network, slack: SlackChoice) -> Result<PtdfMatrix> {
    let x_bus = build_x_bus(&build_b_bus(net), slack)?;
    let mut m = build_b_line(net).matmul(&x_bus)?;
    // The slack column of X_bus is exactly zero; keep it so after the product.
    for l in 0..m.rows() {
        m[(l, slack.index)] = 0.0;
    }
    Ok(PtdfMatrix {
        matrix: m,
        slack,
        buses: net.bus_ids(),
    })
}

/// Sensitivity of `line`'s flow to an injection at `m` withdrawn at `n`,
/// computed directly from reactance-matrix entries:
/// `(X_im - X_jm - X_in + X_jn) / x_ij`.
pub fn ptdf_element(net: &Network, x_bus: &Matrix, line: usize, m: BusId, n: BusId) -> Result<f64> {
    let l = net.lines.get(line).ok_or(Error::UnknownLine(line))?;
    let i = net.bus_index(l.from)?;
    let j = net.bus_index(l.to)?;
    let m = net.bus_index(m)?;
    let n = net.bus_index(n)?;
    if x_bus.shape() != (net.n_buses(), net.n_buses()) {
        return Err(Error::DimensionMismatch("reactance matrix does not match network".into()));
    }
    Ok((x_bus[(i, m)] - x_bus[(j, m)] - x_bus[(i, n)] + x_bus[(j, n)]) / l.x)
}

/// Transfer from `m` to `n`: `PTDF[l, m] - PTDF[l, n]`.
pub fn ptdf_pair(p: &PtdfMatrix, line: usize, m: BusId, n: BusId) -> Result<f64> {
    Ok(p.get(line, m)? - p.get(line, n)?)
}

/// Line flows caused by a balanced vector of net bus injections.
pub fn ptdf_flows(p: &PtdfMatrix, injections: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = injections.iter().sum();
    let scale: f64 = injections.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    if total.abs() > 1e-9 * scale {
        return Err(Error::UnbalancedInjections(total));
    }
    p.matrix.matvec(injections)
}

fn series_admittance(r: f64, x: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) / Complex64::new(r, x)
}

/// Bus admittance matrix from π-model lines.
pub fn build_y_bus(net: &Network) -> CMatrix {
    let n = net.n_buses();
    let mut y = CMatrix::zeros(n, n);
    for ((i, j), line) in net.line_endpoints().into_iter().zip(&net.lines) {
        let ys = series_admittance(line.r, line.x);
        let half_shunt = Complex64::new(0.0, line.b_sh / 2.0);
        y[(i, i)] += ys + half_shunt;
        y[(j, j)] += ys + half_shunt;
        y[(i, j)] -= ys;
        y[(j, i)] -= ys;
    }
    let labels = bus_labels(net);
    y.with_labels(labels.clone(), labels).expect("square labels")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Currents leaving the `from` end towards `to`.
    Forward,
    /// Currents leaving the `to` end towards `from`.
    Reverse,
}

/// Line admittance matrix for one direction: `I_dir = Y_line·V`.
pub fn build_y_line(net: &Network, direction: Direction) -> CMatrix {
    let mut y = CMatrix::zeros(net.n_lines(), net.n_buses());
    for (k, ((i, j), line)) in net.line_endpoints().into_iter().zip(&net.lines).enumerate() {
        let ys = series_admittance(line.r, line.x);
        let half_shunt = Complex64::new(0.0, line.b_sh / 2.0);
        let (near, far) = match direction {
            Direction::Forward => (i, j),
            Direction::Reverse => (j, i),
        };
        y[(k, near)] = half_shunt + ys;
        y[(k, far)] = -ys;
    }
    y.with_labels(net.line_keys(), bus_labels(net)).expect("labels fit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Bus, Line};

    pub(crate) fn net_from(n: u32, lines: &[(u32, u32, f64)]) -> Network {
        let mut net = Network::new(
            100.0,
            (1..=n)
                .map(|id| Bus {
                    id: BusId(id),
                    is_slack: id == 1,
                })
                .collect(),
            lines
                .iter()
                .map(|&(f, t, x)| Line {
                    from: BusId(f),
                    to: BusId(t),
                    r: 0.0,
                    x,
                    b_sh: 0.0,
                    rating: None,
                })
                .collect(),
            vec![],
            vec![],
        );
        net.normalized = true;
        net
    }

    fn three_bus() -> Network {
        net_from(3, &[(1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
    }

    fn assert_rows(m: &Matrix, expect: &[&[f64]], tol: f64) {
        assert_eq!(m.rows(), expect.len());
        for (i, row) in expect.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((m[(i, j)] - e).abs() <= tol, "({i},{j}): {} vs {e}", m[(i, j)]);
            }
        }
    }

    #[test]
    fn b_bus_symbolic_pattern() {
        let (b12, b13, b23) = (1.0 / 0.2, 1.0 / 0.5, 1.0 / 0.25);
        let net = net_from(3, &[(1, 2, 0.2), (1, 3, 0.5), (2, 3, 0.25)]);
        assert_rows(
            &build_b_bus(&net),
            &[
                &[b12 + b13, -b12, -b13],
                &[-b12, b12 + b23, -b23],
                &[-b13, -b23, b13 + b23],
            ],
            1e-12,
        );
        assert_rows(
            &build_b_bus(&three_bus()),
            &[&[2.0, -1.0, -1.0], &[-1.0, 2.0, -1.0], &[-1.0, -1.0, 2.0]],
            0.0,
        );
    }

    #[test]
    fn b_bus_uses_reciprocal_reactance_not_admittance() {
        let mut net = net_from(2, &[(1, 2, 0.4)]);
        net.lines[0].r = 0.02;
        assert_rows(&build_b_bus(&net), &[&[2.5, -2.5], &[-2.5, 2.5]], 1e-15);
    }

    #[test]
    fn b_line_patterns() {
        let bl = build_b_line(&three_bus());
        assert_rows(&bl, &[&[1.0, -1.0, 0.0], &[1.0, 0.0, -1.0], &[0.0, 1.0, -1.0]], 0.0);
        let four = net_from(4, &[(1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0), (2, 4, 1.0), (3, 4, 1.0)]);
        assert_eq!(build_b_line(&four).shape(), (5, 4));
    }

    #[test]
    fn x_bus_examples() {
        let net = three_bus();
        let slack = SlackChoice::from_case(&net).unwrap();
        let x = build_x_bus(&build_b_bus(&net), slack).unwrap();
        assert_rows(
            &x,
            &[&[0.0, 0.0, 0.0], &[0.0, 2.0 / 3.0, 1.0 / 3.0], &[0.0, 1.0 / 3.0, 2.0 / 3.0]],
            1e-15,
        );

        let two = net_from(2, &[(1, 2, 0.5)]);
        let x = build_x_bus(&build_b_bus(&two), SlackChoice::from_case(&two).unwrap()).unwrap();
        assert_rows(&x, &[&[0.0, 0.0], &[0.0, 0.5]], 1e-15);

        let split = net_from(4, &[(1, 2, 1.0), (3, 4, 1.0)]);
        let err = build_x_bus(&build_b_bus(&split), SlackChoice::from_case(&split).unwrap());
        assert!(matches!(err, Err(Error::Singular { .. })));
    }

    #[test]
    fn ptdf_three_bus() {
        let net = three_bus();
        let p = build_ptdf(&net, SlackChoice::from_case(&net).unwrap()).unwrap();
        assert_rows(
            &p.matrix,
            &[
                &[0.0, -2.0 / 3.0, -1.0 / 3.0],
                &[0.0, -1.0 / 3.0, -2.0 / 3.0],
                &[0.0, 1.0 / 3.0, -1.0 / 3.0],
            ],
            1e-15,
        );
        assert!((ptdf_pair(&p, 2, BusId(2), BusId(3)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ptdf_pair(&p, 1, BusId(3), BusId(3)).unwrap(), 0.0);
        assert_eq!(ptdf_pair(&p, 1, BusId(3), BusId(1)).unwrap(), p.get(1, BusId(3)).unwrap());
        assert!(matches!(ptdf_pair(&p, 7, BusId(3), BusId(1)), Err(Error::UnknownLine(7))));
        assert!(matches!(ptdf_pair(&p, 0, BusId(9), BusId(1)), Err(Error::UnknownBus(9))));
    }

    #[test]
    fn ptdf_element_matches_and_is_slack_invariant() {
        let net = three_bus();
        let b = build_b_bus(&net);
        let x1 = build_x_bus(&b, SlackChoice::new(&net, BusId(1)).unwrap()).unwrap();
        let x2 = build_x_bus(&b, SlackChoice::new(&net, BusId(2)).unwrap()).unwrap();
        let v1 = ptdf_element(&net, &x1, 1, BusId(2), BusId(1)).unwrap();
        let v2 = ptdf_element(&net, &x2, 1, BusId(2), BusId(1)).unwrap();
        assert!((v1 + 1.0 / 3.0).abs() < 1e-15);
        assert!((v1 - v2).abs() < 1e-15);
        assert_eq!(ptdf_element(&net, &x1, 0, BusId(3), BusId(3)).unwrap(), 0.0);
    }

    #[test]
    fn flows_from_injections() {
        let net = three_bus();
        let p = build_ptdf(&net, SlackChoice::from_case(&net).unwrap()).unwrap();
        assert_eq!(ptdf_flows(&p, &[0.0; 3]).unwrap(), vec![0.0; 3]);
        let f = ptdf_flows(&p, &[1.0, 0.0, -1.0]).unwrap();
        for (a, e) in f.iter().zip([1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]) {
            assert!((a - e).abs() < 1e-15);
        }
        assert!(matches!(
            ptdf_flows(&p, &[1.0, 0.0, 0.0]),
            Err(Error::UnbalancedInjections(_))
        ));
    }

    #[test]
    fn y_bus_two_bus() {
        let mut net = net_from(2, &[(1, 2, 0.1)]);
        net.lines[0].b_sh = 0.2;
        let y = build_y_bus(&net);
        let c = |re: f64, im: f64| Complex64::new(re, im);
        for (v, e) in y.as_slice().iter().zip([c(0.0, -9.9), c(0.0, 10.0), c(0.0, 10.0), c(0.0, -9.9)]) {
            assert!((v - e).norm() < 1e-12, "{v} vs {e}");
        }
        let fwd = build_y_line(&net, Direction::Forward);
        let rev = build_y_line(&net, Direction::Reverse);
        assert!((fwd[(0, 0)] - c(0.0, -9.9)).norm() < 1e-12);
        assert!((fwd[(0, 1)] - c(0.0, 10.0)).norm() < 1e-12);
        assert!((rev[(0, 0)] - c(0.0, 10.0)).norm() < 1e-12);
        assert!((rev[(0, 1)] - c(0.0, -9.9)).norm() < 1e-12);
    }

    #[test]
    fn lossless_shuntless_y_bus_is_minus_j_b() {
        let net = net_from(4, &[(1, 2, 0.3), (2, 3, 0.7), (3, 4, 0.1), (1, 4, 0.45), (1, 2, 0.9)]);
        let y = build_y_bus(&net);
        let b = build_b_bus(&net);
        for i in 0..4 {
            for j in 0..4 {
                assert!(y[(i, j)].re.abs() < 1e-12);
                assert!((y[(i, j)].im + b[(i, j)]).abs() < 1e-12);
            }
        }
        // Buses 2 and 4 share no line.
        assert_eq!(y[(1, 3)], Complex64::new(0.0, 0.0));
        let fwd = build_y_line(&net, Direction::Forward);
        let rev = build_y_line(&net, Direction::Reverse);
        for (a, b) in fwd.as_slice().iter().zip(rev.as_slice()) {
            assert!((a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn parallel_lines_aggregate_in_bus_matrices_only() {
        let net = net_from(2, &[(1, 2, 0.5), (1, 2, 0.25)]);
        let b = build_b_bus(&net);
        assert_eq!(b[(0, 1)], -6.0);
        let bl = build_b_line(&net);
        assert_eq!(bl.shape(), (2, 2));
        assert_eq!(bl[(0, 0)], 2.0);
        assert_eq!(bl[(1, 0)], 4.0);
    }
}
