use fluxsw::engine::{qubit_qubit, Settings};
use fluxsw::FluxQubitSpec;

fn main() -> fluxsw::Result<()> {
    let q = FluxQubitSpec::symmetric(50.0, 0.65, 0.0)?;
    let s = Settings::default();
    println!("{:>8} {:>10} {:>12} {:>12} {:>12}", "gamma", "Delta", "g_yy", "g_zz", "g_xx");
    for gamma in [0.01, 0.1, 1.0] {
        let r = qubit_qubit(&q, &q, gamma, &s)?;
        let p = r.pauli.as_ref().expect("two qubits");
        println!("{gamma:>8} {:>10.5} {:>12.4e} {:>12.4e} {:>12.4e}", r.delta, p.g_yy(), p.g_zz(), p.g_xx());
    }
    Ok(())
}
