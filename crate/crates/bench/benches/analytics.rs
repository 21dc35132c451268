use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use sweep_bench::scenario;
use sweep_core::study::{self, Family};
use sweep_core::{RadiusMode, Strategy};

fn critical_velocities(c: &mut Criterion) {
    let params = scenario(2);
    for strategy in [
        Strategy::CircularPincer,
        Strategy::SpiralPincer,
        Strategy::CircularSame,
        Strategy::SpiralSame,
    ] {
        c.bench_function(&format!("critical_velocity/{strategy}"), |b| {
            b.iter(|| study::critical_velocity(strategy, black_box(&params)).unwrap())
        });
    }
}

fn total_times(c: &mut Criterion) {
    let params = scenario(2);
    for strategy in [
        Strategy::CircularPincer,
        Strategy::SpiralPincer,
        Strategy::CircularSame,
        Strategy::SpiralSame,
    ] {
        let v_s = study::critical_velocity(strategy, &params).unwrap() + 10.0;
        c.bench_function(&format!("total_time/{strategy}"), |b| {
            b.iter(|| {
                study::total_time(
                    strategy,
                    black_box(&params),
                    black_box(v_s),
                    RadiusMode::Verbatim,
                )
                .unwrap()
            })
        });
    }
}

fn family_study(c: &mut Criterion) {
    let params = scenario(2);
    let sizes = study::even_sizes(32);
    let margins = [5.0, 10.0, 20.0, 35.0];
    let mut group = c.benchmark_group("study_family");
    group.sample_size(10);
    for family in [Family::Circular, Family::Spiral] {
        group.bench_function(format!("{family:?}").to_lowercase(), |b| {
            b.iter(|| {
                study::study_family(
                    family,
                    black_box(&params),
                    &sizes,
                    &margins,
                    RadiusMode::Verbatim,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, critical_velocities, total_times, family_study);
criterion_main!(benches);
