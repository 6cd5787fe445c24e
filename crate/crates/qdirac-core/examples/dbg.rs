use qdirac_core::qdisc::{DiscElement, Generator};
use qdirac_core::calculus::{TwistedDerivation, DerivationKind};
use qdirac_core::C64;

fn main() {
    let q = 0.5; let k = 24;
    let z = DiscElement::generator(Generator::Z, q, k).unwrap();
    let z2 = z.try_mul(&z).unwrap();
    let d = TwistedDerivation::new(DerivationKind::DZ, q, k).unwrap();
    let out = d.apply(&z2).unwrap();
    let expect = z.scaled(C64::new(1.0 + q*q, 0.0));
    let dd = out.diagonal(-1).unwrap();
    let ee = expect.diagonal(-1).unwrap();
    for i in 0..k {
        let diff = (dd.values[i] - ee.values[i]).norm();
        if diff > 1e-13 {
            println!("i={i}: got {:.15} want {:.15} diff {:.3e}", dd.values[i].re, ee.values[i].re, diff);
        }
    }
}
