//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sweep_core::sim::{self, Outcome};
use sweep_core::study::{self, Family};
use sweep_core::{
    circular_pincer, circular_same, lower_bound_velocity, spiral_pincer, spiral_same, RadiusMode,
    ScenarioParams, Strategy, SweepError,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn even_sizes() -> Vec<u32> {
    (1..=16).map(|k| 2 * k).collect()
}

const MARGINS: [f64; 4] = [5.0, 10.0, 20.0, 35.0];

fn random_params(rng: &mut StdRng) -> ScenarioParams {
    let r0 = rng.gen_range(1.0..1000.0);
    let r = rng.gen_range(0.001..0.99) * r0;
    let v_t = rng.gen_range(0.01..100.0);
    let n = 2 * rng.gen_range(1..=32);
    ScenarioParams::new(r0, r, v_t, n, 0.0)
}

fn criterion_1() -> Verdict {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let v_lb = PI * p.region_radius * p.evader_speed
            / (f64::from(p.swarm_size) * p.sensor_half_length);
        worst = worst.max(rel(circular_pincer::critical_velocity(&p), 2.0 * v_lb));
    }
    verdict(
        worst <= 1e-12,
        format!("worst relative error {worst:.3e} over 1000 draws (limit 1e-12)"),
    )
}

fn criterion_2() -> Verdict {
    let p = ScenarioParams::reference(2);
    match spiral_pincer::critical_velocity(&p) {
        Ok(v_c) => {
            let ratio = v_c / lower_bound_velocity(&p);
            verdict(
                (ratio - 1.05).abs() <= 0.02,
                format!("V_c = {v_c:.6}, V_c/V_LB = {ratio:.6} (target 1.05 +- 0.02)"),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn criterion_3() -> Verdict {
    let mut failures = Vec::new();
    for n in even_sizes() {
        let p = ScenarioParams::reference(n);
        let v_lb = lower_bound_velocity(&p);
        let cp = circular_pincer::critical_velocity(&p);
        let cs = circular_same::critical_velocity(&p).linearized;
        let (Ok(sp), Ok(ss)) = (
            spiral_pincer::critical_velocity(&p),
            spiral_same::critical_velocity(&p),
        ) else {
            failures.push(format!("n={n}: solver failed"));
            continue;
        };
        if !(v_lb < sp && sp < cp && cp < cs && ss > sp) {
            failures.push(format!(
                "n={n}: V_LB={v_lb} sp={sp} cp={cp} cs={cs} ss={ss}"
            ));
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            "ordering holds for n = 2..32".into()
        } else {
            failures.join("; ")
        },
    )
}

/// Phase-by-phase totals built directly from the radius recursions.
fn circular_pincer_accumulated(p: &ScenarioParams, v_s: f64) -> (f64, f64) {
    let (r0, r, v_t, n) = (
        p.region_radius,
        p.sensor_half_length,
        p.evader_speed,
        f64::from(p.swarm_size),
    );
    let mut radii = vec![r0];
    while *radii.last().unwrap() > r {
        let last = *radii.last().unwrap();
        radii.push((1.0 + 2.0 * PI * v_t / (n * (v_s + v_t))) * last - r * v_s / (v_s + v_t));
    }
    let cycles = radii.len() - 1;
    let arcs: f64 = radii[..cycles]
        .iter()
        .map(|rad| 2.0 * PI * rad / (n * v_s))
        .sum::<f64>()
        + 2.0 * PI * r / (n * v_s);
    let steps: f64 = (0..cycles - 1)
        .map(|i| (radii[i] - radii[i + 1]) / v_s)
        .sum::<f64>()
        + radii[cycles] / v_s;
    (steps, arcs)
}

fn circular_same_accumulated(p: &ScenarioParams, v_s: f64) -> (f64, f64, f64) {
    let (r0, r, v_t, n) = (
        p.region_radius,
        p.sensor_half_length,
        p.evader_speed,
        f64::from(p.swarm_size),
    );
    let mut radii = vec![r0];
    while *radii.last().unwrap() > r {
        let last = *radii.last().unwrap();
        radii.push(
            (1.0 + 2.0 * PI * v_t / (n * (v_s + v_t))) * last - r * (v_s - v_t) / (v_s + v_t),
        );
    }
    let cycles = radii.len() - 1;
    let arcs: f64 = radii[..cycles]
        .iter()
        .map(|rad| 2.0 * PI * rad / (n * v_s))
        .sum::<f64>()
        + 2.0 * PI * r / (n * v_s);
    let steps: f64 = (0..cycles - 1)
        .map(|i| (radii[i] - radii[i + 1]) / v_s)
        .sum::<f64>()
        + radii[cycles] / v_s;
    let last = 2.0 * PI * r * v_t / (n * v_s);
    let linear = last / (v_s - v_t) + 2.0 * v_s * last / ((v_s - v_t) * (v_s - v_t));
    (steps, arcs, linear)
}

fn spiral_pincer_accumulated(p: &ScenarioParams, v_s: f64) -> (f64, f64) {
    let (r0, r, v_t, n) = (
        p.region_radius,
        p.sensor_half_length,
        p.evader_speed,
        f64::from(p.swarm_size),
    );
    let e = (2.0 * PI * v_t / (n * (v_s * v_s - v_t * v_t).sqrt())).exp();
    let mut radii = vec![r0];
    while *radii.last().unwrap() > 2.0 * r {
        let last = *radii.last().unwrap();
        radii.push((v_t + v_s * e) / (v_s + v_t) * last - r * v_s * (e + 1.0) / (v_s + v_t));
    }
    let cycles = radii.len() - 1;
    let residual = radii[cycles];
    let extra = residual * (1.0 + v_t / v_s) + 2.0 * PI * r * v_t / (n * v_s) > 2.0 * r;
    let mut spirals: f64 = radii[..cycles]
        .iter()
        .map(|rad| (rad - r) * (e - 1.0) / v_t)
        .sum();
    let mut steps: f64 = (0..cycles - 1)
        .map(|i| (radii[i] - radii[i + 1]) / v_s)
        .sum::<f64>()
        + residual / v_s;
    if extra {
        spirals += r * (e - 1.0) / v_t;
        steps += r * (e - 1.0) / v_s;
    }
    spirals += 2.0 * PI * r / (n * v_s);
    (steps, spirals)
}

fn criterion_4() -> Verdict {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for n in [2, 4, 8, 16] {
        let p = ScenarioParams::reference(n);
        for dv in MARGINS {
            let v_s = circular_pincer::critical_velocity(&p) + dv;
            match circular_pincer::time_breakdown(&p, v_s) {
                Ok(rep) => {
                    let (steps, arcs) = circular_pincer_accumulated(&p, v_s);
                    worst = worst
                        .max(rel(rep.inward_time, steps))
                        .max(rel(rep.circular_time, arcs));
                }
                Err(e) => failures.push(format!("circular-pincer n={n} dV={dv}: {e}")),
            }

            let v_s = circular_same::critical_velocity(&p).linearized + dv;
            match circular_same::time_breakdown(&p, v_s) {
                Ok(rep) => {
                    let (steps, arcs, linear) = circular_same_accumulated(&p, v_s);
                    worst = worst
                        .max(rel(rep.inward_time, steps))
                        .max(rel(rep.circular_time, arcs))
                        .max(rel(rep.total_time, steps + arcs + linear));
                }
                Err(e) => failures.push(format!("circular-same n={n} dV={dv}: {e}")),
            }

            let v_s = spiral_pincer::critical_velocity(&p).unwrap() + dv;
            match spiral_pincer::time_breakdown(&p, v_s) {
                Ok(rep) => {
                    let (steps, spirals) = spiral_pincer_accumulated(&p, v_s);
                    worst = worst
                        .max(rel(rep.inward_time, steps))
                        .max(rel(rep.spiral_time, spirals));
                }
                Err(e) => failures.push(format!("spiral-pincer n={n} dV={dv}: {e}")),
            }
        }
    }
    let pass = failures.is_empty() && worst <= 1e-9;
    verdict(
        pass,
        format!(
            "worst relative gap {worst:.3e} on the 4x4 grid (limit 1e-9){}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

/// Larger root of the end-game margin quadratic, found by bisection.
fn margin_root(alpha: f64, v_t: f64, n: f64) -> f64 {
    let b = (4.0 * PI * v_t * alpha - PI * v_t) / n;
    let c = (4.0 * PI * PI * v_t * v_t * alpha * alpha
        - 2.0 * PI * PI * alpha * v_t * v_t
        - 2.0 * PI * n * v_t * v_t)
        / (n * n);
    let f = |x: f64| x * x + b * x + c;
    let (mut lo, mut hi) = (-b / 2.0, -b / 2.0 + 1.0);
    while f(hi) < 0.0 {
        hi = lo + 2.0 * (hi - lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_5() -> Verdict {
    let mut worst = 0.0f64;
    let mut monotone = true;
    for n in [2u32, 8, 32] {
        let mut previous = f64::INFINITY;
        for k in 0..=980 {
            let alpha = 2.0 + 0.1 * f64::from(k);
            let p = ScenarioParams::new(alpha * 10.0, 10.0, 1.0, n, 0.0);
            let value = circular_same::min_delta_v(&p);
            let oracle = margin_root(alpha, 1.0, f64::from(n));
            worst = worst.max((value - oracle).abs() / oracle.abs().max(1.0));
            if !(value < previous) {
                monotone = false;
            }
            previous = value;
        }
    }
    verdict(
        worst <= 1e-9 && monotone,
        format!(
            "worst root gap {worst:.3e} (limit 1e-9), strictly decreasing in alpha: {monotone}"
        ),
    )
}

fn criterion_6() -> Verdict {
    let template = ScenarioParams::reference(2);
    let mut failures = Vec::new();
    let mut min_ratio = [f64::INFINITY; 2];
    for (slot, family) in [Family::Circular, Family::Spiral].into_iter().enumerate() {
        let records = match study::study_family(
            family,
            &template,
            &even_sizes(),
            &MARGINS,
            RadiusMode::Verbatim,
        ) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{family:?}: {e}"));
                continue;
            }
        };
        for rec in records {
            if family == Family::Spiral && rec.swarm_size < 4 {
                continue;
            }
            match rec.ratio {
                Some(q) if q > 1.0 => min_ratio[slot] = min_ratio[slot].min(q),
                other => failures.push(format!(
                    "{family:?} n={} dV={}: ratio {other:?}",
                    rec.swarm_size, rec.speed_margin
                )),
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "smallest ratio circular {:.4}, spiral {:.4}{}",
            min_ratio[0],
            min_ratio[1],
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

fn simulate_critical(
    strategy: Strategy,
) -> (Strategy, Result<(f64, Outcome), SweepError>, Duration) {
    let started = Instant::now();
    let p = ScenarioParams::reference(2);
    let result = (|| {
        let v_s = 1.1 * study::critical_velocity(strategy, &p)?;
        let analytic = study::total_time(strategy, &p, v_s, RadiusMode::Verbatim)?;
        let plan = study::trajectory_plan(strategy, &p, v_s, RadiusMode::Verbatim)?;
        let cell = p.region_radius / 300.0;
        let dt = sim::stable_time_step(&plan, p.evader_speed, cell);
        let mut world = sim::init_world(&p, cell, dt)?;
        sim::check_plan_resolution(&world, &plan)?;
        Ok((analytic, sim::run(&plan, &mut world)))
    })();
    (strategy, result, started.elapsed())
}

fn criterion_7() -> Verdict {
    let runs: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = [Strategy::CircularPincer, Strategy::SpiralPincer]
            .into_iter()
            .map(|strategy| s.spawn(move || simulate_critical(strategy)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut pass = true;
    let mut parts = Vec::new();
    for (strategy, result, elapsed) in runs {
        match result {
            Ok((analytic, Outcome::Cleaned(t))) => {
                let gap = (t - analytic).abs() / analytic;
                let ok = gap < 0.10 && elapsed < Duration::from_secs(300);
                pass &= ok;
                parts.push(format!(
                    "{strategy}: Cleaned({t:.3}) vs {analytic:.3}, gap {:.3}%, {:.1}s",
                    100.0 * gap,
                    elapsed.as_secs_f64()
                ));
            }
            Ok((analytic, other)) => {
                pass = false;
                parts.push(format!("{strategy}: {other:?} vs analytic {analytic:.3}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{strategy}: {e}"));
            }
        }
    }
    verdict(pass, parts.join("; "))
}

fn criterion_8() -> Verdict {
    let p = ScenarioParams::reference(2);
    let v_s = 0.5 * lower_bound_velocity(&p);
    let cell = p.region_radius / 150.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for strategy in Strategy::ALL {
        let refused = matches!(
            study::trajectory_plan(strategy, &p, v_s, RadiusMode::Verbatim),
            Err(SweepError::SubcriticalVelocity { .. } | SweepError::SlowSweeper { .. })
        );
        let plan = sim::confinement_probe_plan(strategy, &p, v_s, 50);
        let outcome = sim::simulate(&p, &plan, cell, None);
        let escaped = matches!(outcome, Ok(Outcome::Escape(_)));
        pass &= refused && escaped;
        parts.push(format!(
            "{strategy}: planner refuses {refused}, probe {:?}",
            outcome.map(|o| o.time())
        ));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_9() -> Verdict {
    let p = ScenarioParams::reference(2);
    let (r0, r, v_t, n) = (p.region_radius, p.sensor_half_length, p.evader_speed, 2.0);
    let sol = match spiral_same::solve_phi_and_critical_velocity(&p) {
        Ok(s) => s,
        Err(e) => return verdict(false, e.to_string()),
    };
    let (v_s, phi) = (sol.velocity, sol.overshoot_angle);
    let q = (v_s * v_s - v_t * v_t).sqrt();
    let h = (r0 - r)
        * (2.0 * (2.0 * PI * v_t / (n * q)).exp()
            - (v_t * (2.0 * PI - n * phi) / (n * q)).exp()
            - 1.0)
        - 2.0 * r;
    let t_main = (r0 - r) * ((2.0 * PI * v_t / (n * q)).exp() - 1.0) / v_t;
    let t_phi = (r0 - r + v_t * t_main) * (1.0 - (-phi * v_t / q).exp()) / v_t;
    let confinement = (v_t * (t_main + t_phi) - 2.0 * r).abs();

    // wavefront check at every cycle of a supercritical run
    let mut worst_tip = 0.0f64;
    let mut cycles = 0;
    match spiral_same::radius_evolution(&p, 1.1 * v_s, RadiusMode::Verbatim) {
        Ok(its) => {
            let vs = 1.1 * v_s;
            let q = (vs * vs - v_t * v_t).sqrt();
            for it in its {
                let t_main = (it.radius - r) * ((2.0 * PI * v_t / (n * q)).exp() - 1.0) / v_t;
                let t_phi = (it.radius - r + v_t * t_main)
                    * (1.0 - (-it.overshoot_angle * v_t / q).exp())
                    / v_t;
                let x = -v_t * t_phi * it.overshoot_angle.sin();
                let y = (it.radius + v_t * t_main - v_t * t_phi) * it.overshoot_angle.cos();
                let distance = x.hypot(y - it.radius + 2.0 * r);
                worst_tip = worst_tip.max((distance - v_t * (t_main + t_phi)).abs());
                cycles += 1;
            }
        }
        Err(e) => return verdict(false, e.to_string()),
    }
    let pass =
        h.abs() < 1e-9 * (r0 - r) && confinement < 1e-9 * r && worst_tip < 1e-9 && cycles > 0;
    verdict(
        pass,
        format!("V_c = {v_s:.6}, phi = {phi:.6}, |H| = {:.2e}, confinement gap {confinement:.2e}, worst tip gap {worst_tip:.2e} over {cycles} cycles", h.abs()),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Verdict); 9] = [
        (
            1,
            "circular-pincer V_c = 2 V_LB",
            Duration::from_secs(1),
            criterion_1,
        ),
        (
            2,
            "spiral-pincer V_c / V_LB = 1.05 +- 0.02",
            Duration::from_secs(1),
            criterion_2,
        ),
        (
            3,
            "critical-velocity ordering",
            Duration::from_secs(10),
            criterion_3,
        ),
        (
            4,
            "closed forms match accumulation",
            Duration::from_secs(10),
            criterion_4,
        ),
        (
            5,
            "end-game margin root and monotonicity",
            Duration::from_secs(5),
            criterion_5,
        ),
        (
            6,
            "same-direction slower than pincer",
            Duration::from_secs(120),
            criterion_6,
        ),
        (
            7,
            "simulation agrees with analytics",
            Duration::from_secs(600),
            criterion_7,
        ),
        (
            8,
            "half the lower bound always escapes",
            Duration::from_secs(120),
            criterion_8,
        ),
        (
            9,
            "spiral-same solver residuals",
            Duration::from_secs(10),
            criterion_9,
        ),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let started = Instant::now();
        let v = check();
        let elapsed = started.elapsed();
        let pass = v.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id} [{}] {name}: {} ({:.2}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
