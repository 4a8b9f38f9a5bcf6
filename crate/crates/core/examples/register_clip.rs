//! Narrows a shallow ReLU net to register form (width N0 + NL + 1), then
//! clips it to [c, C] on a box and switches it off outside the enlarged box.

use orlicz_uat::net::{self, Activation, ClipParams, Layer, Network};
use orlicz_uat::AxisBox;

pub fn run() -> orlicz_uat::Result<()> {
    let shallow = Network::new(
        2,
        vec![
            Layer::new(
                vec![vec![1.0, -2.0], vec![-0.5, 1.5], vec![2.0, 0.25], vec![0.0, -1.0]],
                vec![0.1, -0.3, 0.0, 0.5],
                Activation::Relu,
            ),
            Layer::new(vec![vec![1.0, 2.0, -1.5, 0.75]], vec![-0.2], Activation::None),
        ],
    )?;
    let j = AxisBox::cube(2, -1.0, 1.0)?;
    let delta = 0.5;
    let reg = net::to_register_form(&shallow, &j.enlarge(delta)?)?;
    println!(
        "register form: {} hidden layers of width {:?} (layout width {})",
        reg.network().hidden_layers().len(),
        reg.network().hidden_widths().first(),
        reg.layout().width()
    );

    let clipped = net::clip_and_localize(
        &reg,
        &ClipParams {
            j,
            delta,
            c: -1.0,
            cap: 1.0,
        },
    )?;
    println!(
        "clipped: {} hidden layers, all of width {}: {}",
        clipped.network().hidden_layers().len(),
        clipped.layout().width(),
        clipped.has_register_width()
    );
    for x in [[0.2, -0.4], [0.9, 0.9], [-1.0, 0.3], [1.25, 0.0], [2.0, -2.0]] {
        let g = shallow.evaluate(&x)?[0];
        println!(
            "  x = {x:?}: g = {g:>8.4}, register {:>8.4}, clipped {:>8.4}",
            reg.evaluate(&x)?[0],
            clipped.evaluate(&x)?[0]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
