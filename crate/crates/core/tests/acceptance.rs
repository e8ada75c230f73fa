//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use common::{dual_norm_grid_oracle, evar_oracle, specs};
use divrisk::norms::{amemiya_with, c_z_identity};
use divrisk::{
    alpha_bar, brute_force_dual, dual_norm, evaluate_primal, grid_oracle_portfolio, luxemburg_norm,
    luxemburg_with, minimize_portfolio_risk, optimal_density, orlicz_norm, phi_beta_norm,
    primal_objective, solve_characterizing_equations, solve_dual, AssetPanel, Divergence,
    DivergenceSpec, EmpiricalDistribution, YoungPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(E X, ρ(X), esssup X)` for every risk evaluated in the suite.
static RECORDED: Mutex<Vec<(f64, f64, f64)>> = Mutex::new(Vec::new());

fn rho<D: Divergence + ?Sized>(x: &EmpiricalDistribution, div: &D, beta: f64) -> f64 {
    let v = evaluate_primal(x, div, beta)
        .expect("evaluate_primal")
        .value;
    RECORDED.lock().unwrap().push((x.mean(), v, x.esssup()));
    v
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_dist(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> EmpiricalDistribution {
    let atoms = (0..n).map(|_| r.gen_range(lo..hi)).collect();
    let weights = (0..n).map(|_| r.gen_range(0.1..1.0)).collect();
    EmpiricalDistribution::from_weighted(atoms, weights).unwrap()
}

/// A second variable on the atoms of `x`.
fn companion(
    r: &mut ChaCha8Rng,
    x: &EmpiricalDistribution,
    lo: f64,
    hi: f64,
) -> EmpiricalDistribution {
    let atoms = (0..x.len()).map(|_| r.gen_range(lo..hi)).collect();
    EmpiricalDistribution::new(atoms, x.probs().to_vec()).unwrap()
}

fn zip_with(
    x: &EmpiricalDistribution,
    y: &EmpiricalDistribution,
    f: impl Fn(f64, f64) -> f64,
) -> EmpiricalDistribution {
    let atoms = x
        .atoms()
        .iter()
        .zip(y.atoms())
        .map(|(a, b)| f(*a, *b))
        .collect();
    EmpiricalDistribution::new(atoms, x.probs().to_vec()).unwrap()
}

fn pick<'a>(r: &mut ChaCha8Rng, s: &'a [DivergenceSpec]) -> &'a DivergenceSpec {
    &s[r.gen_range(0..s.len())]
}

struct Worst(f64, String);

impl Worst {
    fn new() -> Self {
        Worst(f64::NEG_INFINITY, String::new())
    }

    fn see(&mut self, v: f64, ctx: impl FnOnce() -> String) {
        if v > self.0 || v.is_nan() {
            self.0 = if v.is_nan() { f64::INFINITY } else { v };
            self.1 = ctx();
        }
    }
}

fn strong_duality() -> Outcome {
    let mut r = rng(1);
    let s = specs();
    let mut worst = Worst::new();
    for _ in 0..200 {
        let div = pick(&mut r, &s);
        let n = r.gen_range(2..=10);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        let beta = r.gen_range(0.05..3.0);
        let primal = rho(&x, div, beta);
        let dual = solve_dual(&x, div, beta).unwrap();
        let feasible = dual.mean_slack <= 1e-8
            && dual.divergence_slack >= -1e-8
            && dual.z.iter().all(|z| *z >= 0.0);
        let gap = if feasible {
            (primal - dual.objective).abs()
        } else {
            f64::INFINITY
        };
        worst.see(gap, || {
            format!(
                "{} n={n} beta={beta:.3} source={}",
                div.name(),
                dual.source.as_str()
            )
        });
    }
    outcome(
        worst.0 <= 1e-5,
        format!("max |primal - dual| = {:.2e} ({})", worst.0, worst.1),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(2);
    let s = specs();
    let mut worst = Worst::new();
    for _ in 0..50 {
        let div = pick(&mut r, &s);
        let n = r.gen_range(1..=3);
        let x = random_dist(&mut r, n, 0.0, 1.0);
        let beta = r.gen_range(0.05..3.0);
        let a = solve_dual(&x, div, beta).unwrap().objective;
        let b = brute_force_dual(&x, div, beta).unwrap();
        rho(&x, div, beta);
        worst.see((a - b).abs(), || {
            format!("{} n={n} beta={beta:.3}", div.name())
        });
    }
    outcome(
        worst.0 <= 5e-4,
        format!(
            "max |solve_dual - brute_force| = {:.2e} ({})",
            worst.0, worst.1
        ),
    )
}

fn coherence() -> Outcome {
    let mut r = rng(3);
    let s = specs();
    let mut worst = [0.0f64; 4];
    for _ in 0..500 {
        let div = pick(&mut r, &s);
        let beta = r.gen_range(0.05..3.0);
        let n = r.gen_range(1..=8);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        let rx = rho(&x, div, beta);

        let bump = companion(&mut r, &x, 0.0, 3.0);
        let y = zip_with(&x, &bump, |a, b| a + b);
        worst[0] = worst[0].max(rx - rho(&y, div, beta));

        let c = r.gen_range(-10.0..10.0);
        worst[1] = worst[1].max((rho(&x.map(|v| v + c).unwrap(), div, beta) - rx - c).abs());

        let y = companion(&mut r, &x, -5.0, 5.0);
        let sum = zip_with(&x, &y, |a, b| a + b);
        worst[2] = worst[2].max(rho(&sum, div, beta) - rx - rho(&y, div, beta));

        let l = r.gen_range(0.0..10.0);
        worst[3] = worst[3].max((rho(&x.map(|v| l * v).unwrap(), div, beta) - l * rx).abs());
    }
    outcome(
        worst.iter().all(|w| *w <= 1e-7),
        format!(
            "worst violations: monotone {:.1e}, translation {:.1e}, subadditive {:.1e}, homogeneous {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn evar_closed_form() -> Outcome {
    let mut r = rng(4);
    let kl = DivergenceSpec::kl();
    let mut worst = Worst::new();
    for _ in 0..100 {
        let n = r.gen_range(1..=10);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        for beta in [0.1, 0.5, 1.0, 2.0] {
            let d = (rho(&x, &kl, beta) - evar_oracle(&x, beta)).abs();
            worst.see(d, || format!("n={n} beta={beta}"));
        }
    }
    outcome(
        worst.0 <= 1e-7,
        format!("max |rho - EVaR| = {:.2e} ({})", worst.0, worst.1),
    )
}

fn chi2_closed_form() -> Outcome {
    let mut r = rng(5);
    let chi2 = DivergenceSpec::chi2();
    let mut worst = Worst::new();
    let mut built = 0;
    let mut interior = 0;
    while built < 50 {
        let n = r.gen_range(2..=10);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        let var = x.variance();
        if var < 1e-6 {
            continue;
        }
        built += 1;
        // z = 1 + (x − EX)·√(β/Var X) stays positive below this radius.
        let reach = x.mean() - x.essinf();
        let beta = r.gen_range(0.05..0.9) * var / (reach * reach);
        let sol = solve_dual(&x, &chi2, beta).unwrap();
        rho(&x, &chi2, beta);
        if sol.z.iter().any(|z| *z <= 0.0) {
            worst.see(f64::INFINITY, || {
                format!("n={n}: optimal z not strictly positive")
            });
            continue;
        }
        interior += 1;
        let closed = x.mean() + (beta * var).sqrt();
        worst.see((sol.objective - closed).abs(), || {
            format!("n={n} beta={beta:.4}")
        });
    }
    outcome(
        worst.0 <= 1e-6,
        format!(
            "{interior}/50 interior, max |dual - closed form| = {:.2e} ({})",
            worst.0, worst.1
        ),
    )
}

fn risk_aversion_scaling() -> Outcome {
    let mut r = rng(6);
    let s = specs();
    let mut worst = Worst::new();
    for _ in 0..100 {
        let div = pick(&mut r, &s);
        let n = r.gen_range(1..=10);
        let x = random_dist(&mut r, n, 0.0, 5.0);
        let b1 = r.gen_range(0.05..2.0);
        let b2 = b1 + r.gen_range(0.01..3.0);
        let (r1, r2) = (rho(&x, div, b1), rho(&x, div, b2));
        let v = (r1 - r2).max(r2 - (b2 / b1) * r1);
        worst.see(v, || format!("{} b1={b1:.3} b2={b2:.3}", div.name()));
    }
    outcome(
        worst.0 <= 1e-7,
        format!("worst violation {:.2e} ({})", worst.0, worst.1),
    )
}

fn avar_bound() -> Outcome {
    let mut r = rng(7);
    let s = specs();
    let mut worst = Worst::new();
    let mut kl_gap = 0.0f64;
    for _ in 0..50 {
        let div = pick(&mut r, &s);
        let n = r.gen_range(1..=10);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        let beta = r.gen_range(0.05..3.0);
        let a_bar = alpha_bar(div, beta).unwrap();
        let kl_bar = alpha_bar(&DivergenceSpec::kl(), beta).unwrap();
        kl_gap = kl_gap.max((kl_bar - (1.0 - (-beta).exp())).abs());
        let value = rho(&x, div, beta);
        for k in 0..20 {
            let a = a_bar * k as f64 / 19.0;
            let v = x.avar(a).unwrap() - value;
            worst.see(v, || format!("{} beta={beta:.3} alpha={a:.4}", div.name()));
        }
    }
    outcome(
        worst.0 <= 1e-7 && kl_gap <= 1e-9,
        format!(
            "max AVaR - rho = {:.2e} ({}); max |alpha_bar_kl - (1 - e^-beta)| = {kl_gap:.1e}",
            worst.0, worst.1
        ),
    )
}

fn characterizing_equations() -> Outcome {
    let mut r = rng(8);
    let s = specs();
    let (mut solved, mut total) = (0, 0);
    let mut residual = 0.0f64;
    let mut plug = Worst::new();
    let mut attain = Worst::new();
    let mut infeasible = 0;
    for _ in 0..200 {
        total += 1;
        let div = pick(&mut r, &s);
        let n = r.gen_range(1..=10);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        let beta = r.gen_range(0.05..3.0);
        let value = rho(&x, div, beta);
        let Some(m) = solve_characterizing_equations(&x, div, beta).unwrap() else {
            continue;
        };
        solved += 1;
        residual = residual
            .max(m.mean_residual.abs())
            .max(m.divergence_residual.abs());
        let obj = primal_objective(&x, div, beta, m.t_star, m.mu_star);
        plug.see((obj - value).abs(), || {
            format!("{} n={n} beta={beta:.3}", div.name())
        });
        let z = optimal_density(&x, div, beta, m.t_star, m.mu_star).unwrap();
        if !(z.mean_slack <= 1e-8 && z.divergence_slack >= -1e-8 && z.z.iter().all(|v| *v >= 0.0)) {
            infeasible += 1;
        }
        attain.see((z.objective - value).abs(), || {
            format!("{} n={n} beta={beta:.3}", div.name())
        });
    }
    outcome(
        residual <= 1e-8 && plug.0 <= 1e-6 && attain.0 <= 1e-6 && infeasible == 0,
        format!(
            "{solved}/{total} solved; max residual {residual:.1e}; plug-in gap {:.1e}; Z* gap {:.1e}; infeasible Z* {infeasible}",
            plug.0, attain.0
        ),
    )
}

fn norm_sandwiches() -> Outcome {
    let mut r = rng(9);
    let s = specs();
    let mut pairing = 0.0f64;
    let mut constants = 0.0f64;
    let mut gap_sandwich = 0.0f64;
    let mut mixed = 0usize;
    for _ in 0..100 {
        let div = pick(&mut r, &s);
        let pair = YoungPair::new(div);
        let n = r.gen_range(1..=10);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        let beta = r.gen_range(0.05..3.0);

        let lux_phi = luxemburg_norm(&x, &pair);
        let orl_phi = amemiya_with(&x, |v| pair.phi(v));
        let lux_psi = luxemburg_with(&x, |v| pair.psi(v));
        let orl_psi = orlicz_norm(&x, &pair);
        for (lux, orl) in [(lux_phi, orl_phi), (lux_psi, orl_psi)] {
            pairing = pairing.max(lux - orl).max(orl - 2.0 * lux);
        }
        if !(lux_phi <= orl_psi + 1e-8 && orl_psi <= 2.0 * lux_phi + 1e-8) {
            mixed += 1;
        }

        let young = phi_beta_norm(&x, &pair, beta).unwrap();
        RECORDED
            .lock()
            .unwrap()
            .push((x.abs().mean(), young, x.abs().esssup()));
        let lower = young / beta.max(1.0);
        let upper = (pair.psi(1.0) + 1.0) / beta.min(1.0) * young;
        constants = constants.max(lower - orl_psi).max(orl_psi - upper);

        let base = rho(&x.abs(), div, beta);
        let d = pair.gap();
        gap_sandwich = gap_sandwich
            .max(beta / (beta + d) * base - young)
            .max(young - (beta + d) / beta * base);
    }
    println!(
        "  diagnostic: Luxemburg(Phi) <= Amemiya(Psi) <= 2 Luxemburg(Phi) fails on {mixed}/100"
    );
    outcome(
        pairing <= 1e-7 && constants <= 1e-7 && gap_sandwich <= 1e-7,
        format!(
            "worst violations: Luxemburg/Orlicz {pairing:.1e}, equivalence constants {constants:.1e}, gap sandwich {gap_sandwich:.1e}"
        ),
    )
}

fn dual_norm_suite() -> Outcome {
    let mut r = rng(10);
    let s = specs();
    let mut identity = 0.0f64;
    let mut holder = Worst::new();
    for _ in 0..200 {
        let div = pick(&mut r, &s);
        let n = r.gen_range(1..=10);
        let x = random_dist(&mut r, n, -5.0, 5.0);
        let z = companion(&mut r, &x, -3.0, 3.0);
        let beta = r.gen_range(0.05..3.0);
        let dn = dual_norm(&z, div, beta).unwrap();
        let m = z.expectation(f64::abs);
        for k in 0..10 {
            let lam = m * (1.0 + 0.3 * k as f64) + dn.value * k as f64 / 9.0;
            identity = identity.max((c_z_identity(&z, lam).unwrap() - 1.0).abs());
        }
        let exz: f64 = x
            .atoms()
            .iter()
            .zip(z.atoms())
            .zip(x.probs())
            .map(|((a, b), p)| a * b * p)
            .sum();
        let norm_x = phi_beta_norm(&x, div, beta).unwrap();
        RECORDED
            .lock()
            .unwrap()
            .push((x.abs().mean(), norm_x, x.abs().esssup()));
        holder.see(exz.abs() - norm_x * dn.value, || {
            format!("{} beta={beta:.3}", div.name())
        });
    }

    let mut grid = Worst::new();
    for k in 0..20 {
        let div = &s[k % s.len()];
        let n = r.gen_range(2..=3);
        let z = random_dist(&mut r, n, 0.0, 2.0);
        let beta = r.gen_range(0.05..1.0);
        let a = dual_norm(&z, div, beta).unwrap().value;
        let b = dual_norm_grid_oracle(&z, div, beta, 10_001, 1e-4);
        grid.see((a - b).abs(), || {
            format!("{} n={n} beta={beta:.3}", div.name())
        });
    }
    outcome(
        identity <= 1e-9 && holder.0 <= 1e-6 && grid.0 <= 5e-4,
        format!(
            "identity gap {identity:.1e}; Hoelder excess {:.1e}; max |bisection - grid| = {:.1e} ({})",
            holder.0, grid.0, grid.1
        ),
    )
}

fn portfolio() -> Outcome {
    let mut r = rng(11);
    let s = specs();
    let mut gap = Worst::new();
    let mut joint = 0.0f64;
    for k in 0..30 {
        let div = &s[k % s.len()];
        let n = r.gen_range(2..=8);
        let rows = (0..n)
            .map(|_| vec![r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)])
            .collect();
        let panel = AssetPanel::new(vec!["a".into(), "b".into()], rows, None).unwrap();
        let beta = r.gen_range(0.05..3.0);
        let sol = minimize_portfolio_risk(&panel, div, beta).unwrap();
        let oracle = grid_oracle_portfolio(&panel, div, beta, 1001).unwrap();
        gap.see((sol.risk - oracle).abs(), || {
            format!("{} n={n} beta={beta:.3}", div.name())
        });
        let xw = panel.combine(&sol.weights).unwrap();
        let direct = rho(&xw, div, beta);
        if let (Some(t), Some(mu)) = (sol.t_star, sol.mu_star) {
            joint = joint.max((primal_objective(&xw, div, beta, t, mu) - direct).abs());
        }
        joint = joint.max((sol.risk - direct).abs());
    }
    outcome(
        gap.0 <= 1e-3 && joint <= 1e-6,
        format!(
            "max |solver - grid| = {:.1e} ({}); joint objective gap {joint:.1e}",
            gap.0, gap.1
        ),
    )
}

fn bounds() -> Outcome {
    let rec = RECORDED.lock().unwrap();
    let mut worst = 0.0f64;
    let mut bad = 0;
    for &(mean, v, top) in rec.iter() {
        let w = (mean - 1e-9 - v).max(v - top - 1e-9);
        if w > 0.0 || w.is_nan() {
            bad += 1;
        }
        worst = worst.max(w + 1e-9);
    }
    outcome(
        bad == 0,
        format!(
            "{} evaluations, {bad} outside [E X, esssup X], worst excess {worst:.1e}",
            rec.len()
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 12] = [
        (
            "strong duality",
            strong_duality,
            Some(Duration::from_secs(60)),
        ),
        (
            "oracle equivalence",
            oracle_equivalence,
            Some(Duration::from_secs(120)),
        ),
        ("coherence", coherence, None),
        ("EVaR closed form", evar_closed_form, None),
        ("chi2 closed form", chi2_closed_form, None),
        ("risk-aversion scaling", risk_aversion_scaling, None),
        ("AVaR bound", avar_bound, None),
        ("characterizing equations", characterizing_equations, None),
        ("norm sandwiches", norm_sandwiches, None),
        ("dual norm", dual_norm_suite, None),
        ("portfolio", portfolio, Some(Duration::from_secs(120))),
        ("bounds", bounds, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if let Some(b) = budget {
            if took > *b {
                out.pass = false;
                out.detail.push_str(&format!("; over budget {b:?}"));
            }
        }
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.2}s]",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
