//! Exact ReLU building blocks: identity, max, min, 1-d bumps and box
//! indicators.

use orlicz_uat::net;
use orlicz_uat::AxisBox;

pub fn run() -> orlicz_uat::Result<()> {
    let id = net::identity_gadget(10.0)?;
    let mx = net::max_gadget();
    let mn = net::min_gadget();
    for (x, y) in [(3.0, -1.5), (-7.25, 2.0), (0.0, 0.0)] {
        println!(
            "x = {x:>5}, y = {y:>5}: id {:>5}  max {:>5}  min {:>5}",
            id.evaluate(&[x])?[0],
            mx.evaluate(&[x, y])?[0],
            mn.evaluate(&[x, y])?[0]
        );
    }

    let bump = net::bump_1d(0.0, 1.0, 0.5)?;
    print!("bump on [0, 1], ramp 0.5:");
    for x in [-0.75, -0.5, -0.25, 0.0, 0.5, 1.0, 1.25, 1.5] {
        print!(" {:.2}", bump.evaluate(&[x])?[0]);
    }
    println!();

    let j = AxisBox::new(vec![0.0, 0.0], vec![1.0, 2.0])?;
    let v = net::box_indicator(&j, 0.25)?;
    println!("box indicator: {} layers, widths {:?}", v.layers().len(), v.hidden_widths());
    for x in [[0.5, 1.0], [1.125, 1.0], [1.5, 1.0], [-0.1, 2.1]] {
        println!("  V({x:?}) = {:.3}", v.evaluate(&x)?[0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
