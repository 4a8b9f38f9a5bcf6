//! Small exact ReLU subnetworks.

use super::{Activation, Affine, Layer, NetBuilder, Network};
use crate::domain::AxisBox;
use crate::error::{Error, Result};

fn two_layer(input_dim: usize, hidden: Vec<(Vec<f64>, f64)>, readout: Vec<f64>, bias: f64) -> Network {
    let (a, b) = hidden.into_iter().unzip();
    Network::new(
        input_dim,
        vec![
            Layer::new(a, b, Activation::Relu),
            Layer::new(vec![readout], vec![bias], Activation::None),
        ],
    )
    .expect("well-formed gadget")
}

/// `x -> relu(x + N) - N`, the identity on `[-N, inf)`.
pub fn identity_gadget(bound: f64) -> Result<Network> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::InvalidArgument(format!("identity bound must be positive, got {bound}")));
    }
    Ok(two_layer(1, vec![(vec![1.0], bound)], vec![1.0], -bound))
}

/// `(x, y) -> relu(x - y) + relu(y) - relu(-y)`.
pub fn max_gadget() -> Network {
    two_layer(
        2,
        vec![(vec![1.0, -1.0], 0.0), (vec![0.0, 1.0], 0.0), (vec![0.0, -1.0], 0.0)],
        vec![1.0, 1.0, -1.0],
        0.0,
    )
}

/// `(x, y) -> relu(x) - relu(-x) - relu(x - y)`.
pub fn min_gadget() -> Network {
    two_layer(
        2,
        vec![(vec![1.0, 0.0], 0.0), (vec![-1.0, 0.0], 0.0), (vec![1.0, -1.0], 0.0)],
        vec![1.0, -1.0, -1.0],
        0.0,
    )
}

fn check_interval(a: f64, b: f64, delta: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!("need a <= b, got [{a}, {b}]")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// Bump units for coordinate `i` of an `n`-dimensional input:
/// `relu(x_i - a + d)`, `relu(x_i - a)`, `relu(x_i - b)`, `relu(x_i - b - d)`.
fn bump_units(n: usize, i: usize, a: f64, b: f64, delta: f64) -> [Affine; 4] {
    let x = Affine::unit(n, i);
    [
        x.clone().shift(delta - a),
        x.clone().shift(-a),
        x.clone().shift(-b),
        x.shift(-b - delta),
    ]
}

/// Plateau `1` on `[a, b]`, zero off `[a - delta, b + delta]`, linear ramps.
pub fn bump_1d(a: f64, b: f64, delta: f64) -> Result<Network> {
    check_interval(a, b, delta)?;
    let mut nb = NetBuilder::new(1);
    nb.push(bump_units(1, 0, a, b, delta).to_vec(), Activation::Relu);
    let s = 1.0 / delta;
    nb.finish(vec![Affine::from_row(&[s, -s, -s, s], 0.0)])
}

/// `V(x) = min_i V_i(x_i)` for the bumps of the box `j` with ramp width `delta`.
///
/// One layer of `4 N0` bump units, then one layer per remaining coordinate
/// folding the running minimum with `m - relu(m - V_k)`.
pub fn box_indicator(j: &AxisBox, delta: f64) -> Result<Network> {
    let n = j.dim();
    for (a, b) in j.lo().iter().zip(j.hi()) {
        check_interval(*a, *b, delta)?;
    }
    let mut nb = NetBuilder::new(n);
    let units: Vec<Affine> = (0..n)
        .flat_map(|i| bump_units(n, i, j.lo()[i], j.hi()[i], delta))
        .collect();
    nb.push(units, Activation::Relu);
    let s = 1.0 / delta;
    // V_i as forms over the bump layer
    let mut vs: Vec<Affine> = (0..n)
        .map(|i| {
            let mut coef = vec![0.0; 4 * n];
            coef[4 * i..4 * i + 4].copy_from_slice(&[s, -s, -s, s]);
            Affine { coef, c: 0.0 }
        })
        .collect();
    let mut m = vs.remove(0);
    for _ in 1..n {
        let next = vs.remove(0);
        // units: relu(m), relu(m - V_k), relu(V_l) for the V_l still pending
        let mut units = vec![m.clone(), m.clone().plus(&next.scale(-1.0))];
        units.extend(vs.iter().cloned());
        let w = units.len();
        nb.push(units, Activation::Relu);
        m = Affine::from_row(&[1.0, -1.0], 0.0);
        m.coef.resize(w, 0.0);
        vs = (2..w).map(|k| Affine::unit(w, k)).collect();
    }
    nb.finish(vec![m])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval1(net: &Network, x: f64) -> f64 {
        net.evaluate(&[x]).unwrap()[0]
    }

    #[test]
    fn identity_examples() {
        let g = identity_gadget(10.0).unwrap();
        assert_eq!(eval1(&g, -5.0), -5.0);
        assert_eq!(eval1(&g, 3.0), 3.0);
        assert_eq!(eval1(&g, -11.0), -10.0);
        assert!(identity_gadget(0.0).is_err());
    }

    #[test]
    fn max_min_examples() {
        assert_eq!(max_gadget().evaluate(&[2.0, 5.0]).unwrap(), vec![5.0]);
        assert_eq!(min_gadget().evaluate(&[-1.0, -3.0]).unwrap(), vec![-3.0]);
        assert_eq!(max_gadget().evaluate(&[4.0, 4.0]).unwrap(), vec![4.0]);
    }

    #[test]
    fn bump_examples() {
        let v = bump_1d(0.0, 1.0, 0.5).unwrap();
        assert_eq!(eval1(&v, 0.5), 1.0);
        assert_eq!(eval1(&v, -0.5), 0.0);
        assert_eq!(eval1(&v, -0.25), 0.5);
        assert_eq!(eval1(&v, 1.75), 0.0);
        assert!(bump_1d(1.0, 0.0, 0.5).is_err());
        assert!(bump_1d(0.0, 1.0, 0.0).is_err());
        for k in 0..=4000 {
            let x = -1.0 + 3.0 * k as f64 / 4000.0;
            let y = eval1(&v, x);
            assert!((-1e-15..=1.0 + 1e-15).contains(&y), "V({x}) = {y}");
        }
    }

    #[test]
    fn box_indicator_examples() {
        let j = AxisBox::cube(2, 0.0, 1.0).unwrap();
        let v = box_indicator(&j, 0.5).unwrap();
        assert_eq!(v.evaluate(&[0.5, 0.5]).unwrap(), vec![1.0]);
        assert_eq!(v.evaluate(&[0.5, 1.6]).unwrap(), vec![0.0]);
        assert_eq!(v.evaluate(&[-0.25, 0.5]).unwrap(), vec![0.5]);

        let j3 = AxisBox::new(vec![0.0, -1.0, 2.0], vec![1.0, 0.0, 2.5]).unwrap();
        let v3 = box_indicator(&j3, 0.25).unwrap();
        assert_eq!(v3.evaluate(&[0.5, -0.5, 2.2]).unwrap(), vec![1.0]);
        assert!((v3.evaluate(&[0.5, 0.1, 2.6]).unwrap()[0] - 0.6).abs() < 1e-12);
        assert_eq!(v3.evaluate(&[0.5, -0.5, 3.0]).unwrap(), vec![0.0]);
    }
}
