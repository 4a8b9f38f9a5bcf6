//! Narrow register networks: the register form of a shallow ReLU network and
//! the clip-and-localize transform.
//!
//! Every hidden layer has width `N0 + NL + 1`. Units `0..N0` are input
//! registers holding `x_i + N_i`, units `N0..N0+NL` are output registers and
//! the last unit is the compute unit.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{Activation, Affine, NetBuilder, Network};
use crate::domain::AxisBox;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub n_in: usize,
    pub n_out: usize,
}

impl RegisterLayout {
    pub fn width(&self) -> usize {
        self.n_in + self.n_out + 1
    }

    pub fn input_registers(&self) -> Range<usize> {
        0..self.n_in
    }

    pub fn output_registers(&self) -> Range<usize> {
        self.n_in..self.n_in + self.n_out
    }

    pub fn compute_index(&self) -> usize {
        self.n_in + self.n_out
    }
}

/// A ReLU network in register form together with the box on which the
/// register shifts are valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterNetwork {
    network: Network,
    layout: RegisterLayout,
    input_shift: Vec<f64>,
    domain: AxisBox,
}

impl RegisterNetwork {
    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn into_network(self) -> Network {
        self.network
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    /// `N_i` with input register `i` holding `x_i + N_i`.
    pub fn input_shift(&self) -> &[f64] {
        &self.input_shift
    }

    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.network.evaluate(x)
    }

    /// True when every hidden layer has width exactly `N0 + NL + 1`.
    pub fn has_register_width(&self) -> bool {
        self.network.hidden_widths().iter().all(|w| *w == self.layout.width())
    }
}

fn shift_for(lo: f64) -> f64 {
    (-lo).max(0.0) + 1.0
}

fn check_domain(net: &Network, domain: &AxisBox) -> Result<()> {
    if domain.dim() != net.input_dim() {
        return Err(Error::InvalidArgument("declared box dimension differs from the network input".into()));
    }
    if domain.lo().iter().chain(domain.hi()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("declared box must be bounded".into()));
    }
    Ok(())
}

/// Rewrite a one-hidden-layer ReLU network of `m` units as a register network
/// with `m` hidden layers of width `N0 + NL + 1` agreeing with it on `domain`.
///
/// Layer `k` copies the inputs through identity gadgets, computes hidden
/// feature `k` in the compute unit, and adds readout contributions of feature
/// `k - 1` to the output registers. Output register `j` carries a shift
/// `M_j` large enough to keep every partial sum positive on `domain`.
pub fn to_register_form(shallow: &Network, domain: &AxisBox) -> Result<RegisterNetwork> {
    check_domain(shallow, domain)?;
    let n0 = shallow.input_dim();
    let nl = shallow.output_dim();
    let layout = RegisterLayout { n_in: n0, n_out: nl };
    let input_shift: Vec<f64> = domain.lo().iter().map(|l| shift_for(*l)).collect();
    let hidden = shallow.hidden_layers();
    if hidden.is_empty() {
        return Ok(RegisterNetwork {
            network: shallow.clone(),
            layout,
            input_shift,
            domain: domain.clone(),
        });
    }
    if hidden.len() > 1 {
        return Err(Error::Network(format!(
            "register form needs exactly one hidden layer, found {}",
            hidden.len()
        )));
    }
    let h = &hidden[0];
    if h.act != Activation::Relu {
        return Err(Error::Network(format!("register form needs relu units, found {}", h.act)));
    }
    let out = shallow.readout();
    let m = h.out_dim();
    let bounds = shallow.interval_bounds(domain)?;
    let feature_hi: Vec<f64> = bounds[0].1.iter().map(|v| v.max(0.0)).collect();
    let out_shift: Vec<f64> = out
        .a
        .iter()
        .map(|row| {
            let worst: f64 = row.iter().zip(&feature_hi).map(|(w, hk)| (w * hk).min(0.0)).sum();
            shift_for(worst)
        })
        .collect();

    let w = layout.width();
    let comp = layout.compute_index();
    let mut nb = NetBuilder::new(n0);

    let mut units = Vec::with_capacity(w);
    for (i, shift) in input_shift.iter().enumerate() {
        units.push(Affine::unit(n0, i).shift(*shift));
    }
    for mj in &out_shift {
        units.push(Affine::constant(n0, *mj));
    }
    units.push(Affine::from_row(&h.a[0], h.b[0]));
    nb.push(units, Activation::Relu);

    let x_form = |i: usize| Affine::unit(w, i).shift(-input_shift[i]);
    for k in 1..m {
        let mut units = Vec::with_capacity(w);
        for i in 0..n0 {
            units.push(Affine::unit(w, i));
        }
        for (j, row) in out.a.iter().enumerate() {
            units.push(Affine::unit(w, n0 + j).plus(&Affine::unit(w, comp).scale(row[k - 1])));
        }
        let mut feature = Affine::constant(w, h.b[k]);
        for (i, a) in h.a[k].iter().enumerate() {
            feature = feature.plus(&x_form(i).scale(*a));
        }
        units.push(feature);
        nb.push(units, Activation::Relu);
    }

    let readout = out
        .a
        .iter()
        .zip(&out.b)
        .enumerate()
        .map(|(j, (row, b))| {
            Affine::unit(w, n0 + j)
                .shift(b - out_shift[j])
                .plus(&Affine::unit(w, comp).scale(row[m - 1]))
        })
        .collect();
    Ok(RegisterNetwork {
        network: nb.finish(readout)?,
        layout,
        input_shift,
        domain: domain.clone(),
    })
}

/// Localization box `j`, ramp width `delta` and clip levels `c < cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipParams {
    #[serde(rename = "box")]
    pub j: AxisBox,
    pub delta: f64,
    pub c: f64,
    #[serde(rename = "C")]
    pub cap: f64,
}

/// `G_j = min{max{g_j, cV}, CV}` with `V` the bump of `j` enlarged by `delta`,
/// realized as `-relu(-relu(g_j - cV) + (C - c)V) + CV` in register form.
///
/// Appends to `g`'s hidden layers: two layers per coordinate for the bumps
/// `V_i`, `N0 - 1` layers for the running minimum `V`, and two clip layers.
pub fn clip_and_localize(g: &RegisterNetwork, params: &ClipParams) -> Result<RegisterNetwork> {
    let ClipParams { j, delta, c, cap } = params;
    let (delta, c, cap) = (*delta, *c, *cap);
    if !(c.is_finite() && cap.is_finite()) || c >= cap {
        return Err(Error::InvalidArgument(format!("need c < C, got c = {c}, C = {cap}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if j.dim() != g.layout.n_in {
        return Err(Error::InvalidArgument("box dimension differs from the network input".into()));
    }
    let k_box = j.enlarge(delta)?;
    if !g.domain.contains_box(&k_box) {
        return Err(Error::InvalidArgument(
            "the declared box of g must contain the delta-enlarged box".into(),
        ));
    }
    let layout = g.layout;
    let (n0, nl, w, comp) = (layout.n_in, layout.n_out, layout.width(), layout.compute_index());
    let shift = &g.input_shift;
    let bounds = g.network.interval_bounds(&g.domain)?;
    let out_shift: Vec<f64> = bounds.last().expect("readout").0.iter().map(|l| shift_for(*l)).collect();

    let mut nb = NetBuilder::new(n0);
    for layer in g.network.hidden_layers() {
        nb.push_layer(layer.clone());
    }
    let p = nb.width();
    let has_hidden = !g.network.hidden_layers().is_empty();
    // forms over the current last layer
    let mut x: Vec<Affine> = (0..n0)
        .map(|i| {
            if has_hidden {
                Affine::unit(p, i).shift(-shift[i])
            } else {
                Affine::unit(p, i)
            }
        })
        .collect();
    let readout = g.network.readout();
    let mut q: Vec<Affine> = readout
        .a
        .iter()
        .zip(&readout.b)
        .zip(&out_shift)
        .map(|((row, b), s)| Affine::from_row(row, b + s))
        .collect();
    let mut v: Vec<Affine> = Vec::with_capacity(n0);

    for i in 0..n0 {
        let (a_i, b_i) = (j.lo()[i], j.hi()[i]);
        // layer A: relu(a_i - x_i) in register i, relu(x_i - b_i) in the compute unit
        let mut units = Vec::with_capacity(w);
        units.extend(v.iter().cloned());
        units.push(x[i].clone().scale(-1.0).shift(a_i));
        units.extend((i + 1..n0).map(|r| x[r].clone().shift(shift[r])));
        units.extend(q.iter().cloned());
        units.push(x[i].clone().shift(-b_i));
        nb.push(units, Activation::Relu);
        let dist = Affine::unit(w, i).plus(&Affine::unit(w, comp));
        // layer B: V_i = relu(1 - dist / delta) in register i
        let mut units: Vec<Affine> = (0..i).map(|r| Affine::unit(w, r)).collect();
        units.push(dist.scale(-1.0 / delta).shift(1.0));
        units.extend((i + 1..w - 1).map(|r| Affine::unit(w, r)));
        units.push(Affine::constant(w, 0.0));
        nb.push(units, Activation::Relu);
        v = (0..=i).map(|r| Affine::unit(w, r)).collect();
        x = (0..n0)
            .map(|r| Affine::unit(w, r).shift(-shift[r]))
            .collect();
        q = (0..nl).map(|o| Affine::unit(w, n0 + o)).collect();
    }

    let mut m = v[0].clone();
    for vk in v.iter().skip(1) {
        let mut units = vec![m.clone()];
        units.extend((1..w - 1).map(|r| Affine::unit(w, r)));
        units.push(m.plus(&vk.clone().scale(-1.0)));
        nb.push(units, Activation::Relu);
        m = Affine::unit(w, 0).plus(&Affine::unit(w, comp).scale(-1.0));
    }

    // layer X: relu(g_j - cV)
    let mut units = vec![m.clone()];
    units.extend((1..n0).map(|_| Affine::constant(w, 0.0)));
    units.extend((0..nl).map(|o| q[o].clone().shift(-out_shift[o]).plus(&m.clone().scale(-c))));
    units.push(Affine::constant(w, 0.0));
    nb.push(units, Activation::Relu);
    let vv = Affine::unit(w, 0);
    // layer Y: relu(-u_j + (C - c)V)
    let mut units = vec![vv.clone()];
    units.extend((1..n0).map(|_| Affine::constant(w, 0.0)));
    units.extend((0..nl).map(|o| Affine::unit(w, n0 + o).scale(-1.0).plus(&vv.clone().scale(cap - c))));
    units.push(Affine::constant(w, 0.0));
    nb.push(units, Activation::Relu);

    let readout = (0..nl)
        .map(|o| Affine::unit(w, n0 + o).scale(-1.0).plus(&vv.clone().scale(cap)))
        .collect();
    Ok(RegisterNetwork {
        network: nb.finish(readout)?,
        layout,
        input_shift: g.input_shift.clone(),
        domain: g.domain.clone(),
    })
}
