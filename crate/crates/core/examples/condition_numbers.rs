//! 2-norm condition numbers of the subdomain systems against the whole-domain L-scheme matrix.

use richards_ldd::assembly::{
    assemble_ldd, assemble_monolithic, init_interface, InterfaceFormulation, MonolithicKind,
    StepContext,
};
use richards_ldd::cases::{exact_pressure, manufactured_problem};
use richards_ldd::grid::Subdomain;
use richards_ldd::linalg::condition_number_dense;

fn main() -> richards_ldd::Result<()> {
    let (tau, t) = (1e-3, 0.2);
    for dx in [0.1, 0.05, 0.025] {
        let problem = manufactured_problem(dx, dx)?;
        let old = problem
            .grid
            .sample(|sub, x, y| exact_pressure(sub, x, y, t - tau));
        let ctx = StepContext {
            problem: &problem,
            tau,
            time: t,
        };
        let lfv = assemble_monolithic(MonolithicKind::LScheme, &ctx, &old, &old, [0.25, 0.25])?;
        let lfv = condition_number_dense(&lfv.matrix.to_csr()?)?.value;
        print!("Δx = {dx}: LFV {lfv:.3}");
        for lambda in [4.0, 10.0] {
            let form = InterfaceFormulation::Lambda { lambda };
            let iface = init_interface(&problem, &form, &old)?;
            for sub in Subdomain::BOTH {
                let sys = assemble_ldd(
                    &ctx,
                    sub,
                    old.part(sub),
                    old.part(sub),
                    iface.g(sub),
                    &form.coupling(),
                    0.25,
                )?;
                let k = condition_number_dense(&sys.matrix.to_csr()?)?.value;
                print!(", λ={lambda} Ω{} {k:.3}", sub.index() + 1);
            }
        }
        println!();
    }
    Ok(())
}
