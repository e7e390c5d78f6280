//! Invariant measurements shared by the property and acceptance targets.
//!
//! Each function returns the quantity a test bounds, so randomized and
//! seeded drivers apply the same tolerance.

#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use richards_ldd::assembly::{
    init_interface, step_residual, update_g, InterfaceFormulation, InterfaceState, StepContext,
};
use richards_ldd::cases::{
    exact_pressure, manufactured_problem_with, source_term, ManufacturedBoundary,
};
use richards_ldd::constitutive::ConstitutiveModel;
use richards_ldd::grid::{DecomposedGrid, GridSpec, Subdomain};
use richards_ldd::linalg::{gmres, GmresOptions, TripletMatrix};
use richards_ldd::problem::{BoundaryKind, BoundarySpec, FlowProblem};
use richards_ldd::schemes::{
    ldd_time_step, mass_balance_defect, monolithic_time_step, InitialGuess, InterfaceStart,
    RunConfig, SchemeKind, SchemeParams, TimeState,
};

pub const SPACINGS: [f64; 5] = [0.5, 0.25, 0.2, 0.125, 0.1];

pub fn linear_problem(
    h: f64,
    coef: [f64; 3],
    storage: f64,
    mobility: f64,
    gravity: f64,
) -> FlowProblem {
    let [a, b, c] = coef;
    let field = move |x: f64, y: f64| a + b * x + c * y;
    let model = ConstitutiveModel::linear(storage, mobility).unwrap();
    FlowProblem {
        name: "linear".into(),
        grid: DecomposedGrid::new(&GridSpec::unit_pair(h)).unwrap(),
        materials: [model, model],
        gravity,
        boundary: BoundarySpec::everywhere(BoundaryKind::Dirichlet, move |x, y, _| field(x, y)),
        source: None,
        initial: Arc::new(move |_, x, y, _| field(x, y)),
        exact: Some(Arc::new(move |_, x, y, _| field(x, y))),
    }
}

fn linear_field(problem: &FlowProblem, coef: [f64; 3]) -> richards_ldd::grid::CellField {
    problem
        .grid
        .sample(|_, x, y| coef[0] + coef[1] * x + coef[2] * y)
}

/// Largest cell residual of a linear pressure field with constant mobility.
pub fn patch_residual(h: f64, coef: [f64; 3], mobility: f64, gravity: f64, tau: f64) -> f64 {
    let problem = linear_problem(h, coef, 0.5, mobility, gravity);
    let p = linear_field(&problem, coef);
    let ctx = StepContext {
        problem: &problem,
        tau,
        time: 0.3,
    };
    let r = step_residual(&ctx, &p, &p).unwrap();
    r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Largest relative gap between the eliminated interface pressure and the
/// exact trace of a linear field, over both sides.
pub fn robin_trace_error(h: f64, coef: [f64; 3], mobility: f64, form: InterfaceFormulation) -> f64 {
    let problem = linear_problem(h, coef, 0.5, mobility, 0.0);
    let p = linear_field(&problem, coef);
    let state = init_interface(&problem, &form, &p).unwrap();
    let coupling = form.coupling();
    let mut worst = 0.0f64;
    for sub in Subdomain::BOTH {
        for j in 0..problem.grid.ny {
            let cell = problem.grid.interface_cell(sub, j);
            let y = problem.grid.cell_center(sub, cell).1;
            let exact = coef[0] + coef[2] * y;
            let trace = coupling.trace(p.part(sub)[cell], state.g(sub)[j], mobility, 0.5 * h, 0.0);
            let scale = 1.0 + exact.abs();
            worst = worst
                .max((trace - exact).abs() / scale)
                .max((state.trace(sub)[j] - exact).abs() / scale);
        }
    }
    worst
}

/// Largest relative violation of `F_l(g') = -F_{3-l}(g) + b (p_l - p_{3-l})`,
/// and of `g' = g` on a consistent interface.
pub fn g_update_identity_error(
    g: [Vec<f64>; 2],
    traces: [Vec<f64>; 2],
    form: InterfaceFormulation,
) -> f64 {
    let coupling = form.coupling();
    let n = g[0].len();
    let state = InterfaceState { g, traces };
    let next = update_g(&state, &coupling);
    let mut worst = 0.0f64;
    for (l, other) in [(0usize, 1usize), (1, 0)] {
        for j in 0..n {
            let (p_l, p_o) = (state.traces[l][j], state.traces[other][j]);
            let lhs = coupling.flux(next.g[l][j], p_l);
            let rhs =
                -coupling.flux(state.g[other][j], p_o) + coupling.pressure_weight * (p_l - p_o);
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    let p = state.traces[0][0];
    let flux = state.g[0][0];
    let g_of = |f: f64| (f - coupling.pressure_weight * p) / coupling.flux_scale;
    let fixed = InterfaceState {
        g: [vec![g_of(flux); n], vec![g_of(-flux); n]],
        traces: [vec![p; n], vec![p; n]],
    };
    let again = update_g(&fixed, &coupling);
    for l in 0..2 {
        for j in 0..n {
            worst = worst.max((again.g[l][j] - fixed.g[l][j]).abs() / (1.0 + fixed.g[l][j].abs()));
        }
    }
    worst
}

/// Largest entrywise gap between restarted GMRES and a dense LU solve of a
/// diagonally dominant matrix built from `(row, col, value)` triples taken
/// modulo `n`. Infinite when GMRES does not converge.
pub fn gmres_vs_lu(n: usize, entries: &[(usize, usize, f64)], rhs: &[f64], jacobi: bool) -> f64 {
    let mut t = TripletMatrix::new(n, n);
    let mut dense = DMatrix::<f64>::zeros(n, n);
    let mut row_sum = vec![0.0; n];
    for &(i, j, v) in entries {
        let (i, j) = (i % n, j % n);
        if i != j {
            t.push(i, j, v);
            dense[(i, j)] += v;
            row_sum[i] += v.abs();
        }
    }
    for (i, s) in row_sum.iter().enumerate() {
        let d = 1.0 + 1.5 * s;
        t.push(i, i, d);
        dense[(i, i)] += d;
    }
    let a = t.to_csr().unwrap();
    let b = &rhs[..n];
    let opts = GmresOptions {
        tolerance: 1e-13,
        jacobi,
        ..Default::default()
    };
    let (x, stats) = gmres(&a, b, &vec![0.0; n], &opts).unwrap();
    if !stats.converged {
        return f64::INFINITY;
    }
    let exact = dense.lu().solve(&DVector::from_column_slice(b)).unwrap();
    x.iter()
        .zip(exact.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

/// Worst ratio `|analytic - numeric| / tolerance` over `S'`, `k'` and the
/// mobility derivative; at most 1 passes.
///
/// The numeric derivative is a fourth-order five-point stencil. The tolerance
/// is `1e-5` relative plus the stencil's own rounding floor.
pub fn derivative_mismatch(model: &ConstitutiveModel, p: f64) -> (f64, String) {
    let h = 1e-3 * p.abs();
    let stencil = |f: &dyn Fn(f64) -> f64| {
        (8.0 * (f(p + h) - f(p - h)) - (f(p + 2.0 * h) - f(p - 2.0 * h))) / (12.0 * h)
    };
    let checks = [
        (
            "S'",
            model.saturation_derivative(p),
            stencil(&|q| model.saturation(q)),
            model.saturation(p),
        ),
        (
            "k'",
            model.rel_perm_derivative(p),
            stencil(&|q| model.rel_perm(q)),
            model.rel_perm(p),
        ),
        (
            "mobility'",
            model.mobility_derivative(p),
            stencil(&|q| model.mobility(q)),
            model.mobility(p),
        ),
    ];
    let mut worst = (0.0, String::new());
    for (name, analytic, numeric, value) in checks {
        // the difference quotient cannot resolve changes below the rounding of a few flops
        let rounding = 16.0 * f64::EPSILON * value.abs() / h;
        let tol = 1e-5 * analytic.abs() + rounding;
        let ratio = (analytic - numeric).abs() / tol;
        if ratio > worst.0 {
            worst = (
                ratio,
                format!("{name} at p={p}: {analytic:e} vs {numeric:e}"),
            );
        }
    }
    worst
}

fn exact_state(problem: &FlowProblem, t: f64) -> TimeState {
    TimeState {
        time: t,
        pressure: problem
            .grid
            .sample(|sub, x, y| (problem.initial)(sub, x, y, t)),
        interface: None,
    }
}

pub fn tight(scheme: SchemeKind, params: SchemeParams) -> RunConfig {
    RunConfig {
        scheme,
        params,
        tolerance: 1e-12,
        gmres: GmresOptions {
            tolerance: 1e-14,
            ..Default::default()
        },
        ..Default::default()
    }
}

/// Global water balance defect of one tightly converged whole-domain step of
/// the manufactured case; `None` if the step does not converge.
pub fn monolithic_mass_defect(
    scheme: SchemeKind,
    h: f64,
    tau: f64,
    t0: f64,
    boundary: ManufacturedBoundary,
) -> Option<f64> {
    let problem = manufactured_problem_with(h, h, boundary).unwrap();
    let state = exact_state(&problem, t0);
    let cfg = tight(
        scheme,
        SchemeParams {
            stabilization: [0.5, 0.5],
            ..Default::default()
        },
    );
    let out = monolithic_time_step(&problem, &cfg, &state, t0 + tau, 1).unwrap();
    if !out.converged() {
        return None;
    }
    Some(
        mass_balance_defect(
            &problem,
            &out.state.pressure,
            &state.pressure,
            tau,
            t0 + tau,
        )
        .unwrap()
        .abs(),
    )
}

/// Largest gap between eight decomposed iterates run with the λ-formulation
/// and with its generalized equivalent.
pub fn formulation_gap(lambda: f64, l: f64, h: f64, tau: f64, t0: f64) -> f64 {
    let problem = manufactured_problem_with(h, h, ManufacturedBoundary::NoFlowBottom).unwrap();
    let state = exact_state(&problem, t0);
    let run = |formulation| {
        let mut cfg = tight(
            SchemeKind::Ldd,
            SchemeParams {
                stabilization: [l, l],
                formulation,
            },
        );
        cfg.tolerance = 1e-300;
        cfg.max_iterations = 8;
        ldd_time_step(&problem, &cfg, &state, t0 + tau, 1).unwrap()
    };
    let a = run(InterfaceFormulation::Lambda { lambda });
    let b = run(InterfaceFormulation::lambda_as_generalized(lambda));
    if a.iterations.len() != b.iterations.len() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for (ra, rb) in a.iterations.iter().zip(&b.iterations) {
        for (va, vb) in [
            (ra.l2_increment, rb.l2_increment),
            (ra.pressure_jump, rb.pressure_jump),
            (ra.flux_jump, rb.flux_jump),
        ] {
            worst = worst.max((va - vb).abs());
        }
    }
    worst.max(
        problem
            .grid
            .linf_norm(&a.state.pressure.difference(&b.state.pressure))
            .unwrap(),
    )
}

/// First-iteration increment and final deviation of the decomposed scheme
/// started at the exact discrete solution of a linear problem.
pub fn ldd_fixed_point_drift(
    h: f64,
    coef: [f64; 3],
    storage: f64,
    mobility: f64,
    form: InterfaceFormulation,
    carry: bool,
) -> f64 {
    let problem = linear_problem(h, coef, storage, mobility, 0.0);
    let p = linear_field(&problem, coef);
    let state = TimeState {
        time: 0.0,
        pressure: p.clone(),
        interface: None,
    };
    let mut cfg = tight(
        SchemeKind::Ldd,
        SchemeParams {
            stabilization: [storage, storage],
            formulation: form,
        },
    );
    cfg.interface_start = if carry {
        InterfaceStart::CarryForward
    } else {
        InterfaceStart::Reinitialize
    };
    cfg.initial_guess = InitialGuess::PreviousTime;
    let out = ldd_time_step(&problem, &cfg, &state, 0.1, 1).unwrap();
    if !out.converged() {
        return f64::INFINITY;
    }
    let drift = problem
        .grid
        .linf_norm(&out.state.pressure.difference(&p))
        .unwrap();
    drift.max(out.iterations[0].l2_increment)
}

/// Largest pointwise residual of `∂ₜS(p) - ∇·(k∇p) - f` for the exact
/// manufactured pressure, with all derivatives replaced by central
/// differences of step `h`, over interior points of both subdomains.
pub fn source_fd_residual(h: f64) -> f64 {
    let models = [
        ConstitutiveModel::power_law(1).unwrap(),
        ConstitutiveModel::power_law(2).unwrap(),
    ];
    let mut worst = 0.0f64;
    for sub in Subdomain::BOTH {
        let model = &models[sub.index()];
        let x0 = if sub == Subdomain::One { -0.9 } else { 0.1 };
        for i in 0..5 {
            for j in 0..5 {
                for &t in &[0.1, 0.5, 0.9] {
                    let x = x0 + 0.2 * i as f64;
                    let y = 0.1 + 0.2 * j as f64;
                    let p = |x: f64, y: f64, t: f64| exact_pressure(sub, x, y, t);
                    let s = |x: f64, y: f64, t: f64| model.saturation(p(x, y, t));
                    let k = |x: f64, y: f64| model.mobility(p(x, y, t));
                    let dsdt = (s(x, y, t + h) - s(x, y, t - h)) / (2.0 * h);
                    let flux_x =
                        |xf: f64| k(xf, y) * (p(xf + 0.5 * h, y, t) - p(xf - 0.5 * h, y, t)) / h;
                    let flux_y =
                        |yf: f64| k(x, yf) * (p(x, yf + 0.5 * h, t) - p(x, yf - 0.5 * h, t)) / h;
                    let div = (flux_x(x + 0.5 * h) - flux_x(x - 0.5 * h)) / h
                        + (flux_y(y + 0.5 * h) - flux_y(y - 0.5 * h)) / h;
                    let r = dsdt - div - source_term(sub, x, y, t);
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    worst
}
