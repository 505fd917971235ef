use slag_moduli::cy::{model_to_json, validate_axioms, FlatCalabiYauModel};

fn main() -> slag_moduli::Result<()> {
    for n in 1..=3 {
        let model = FlatCalabiYauModel::standard(n)?;
        let report = validate_axioms(&model, 1e-12)?;
        println!("STD({n}): kappa = {:+.4} {:+.4}i", report.kappa[0], report.kappa[1]);
        for c in &report.checks {
            println!("  {:<20} {:<5} {}", c.name, c.pass, c.note);
        }
    }

    // perturb the real part of Omega by a multiple of omega
    let m = FlatCalabiYauModel::standard(2)?;
    let bad = m.with_forms(m.omega().clone(), m.omega1().add(&m.omega().scale(0.1))?, m.omega2().clone())?;
    let r = validate_axioms(&bad, 1e-12)?;
    let c = r.check("type_compatible").unwrap();
    println!("perturbed: type_compatible pass={} residual={:?}", c.pass, c.residual);

    println!("{}", model_to_json(&FlatCalabiYauModel::standard(1)?)?);
    Ok(())
}
