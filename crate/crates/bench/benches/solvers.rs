use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pb_core::gen::{gen_instance, gen_profile, GenParams, ProfileKind};
use pb_core::model::validate_profile;
use pb_core::oracle::solve_oracle;
use pb_core::solvers::{solve_distinct_votes, solve_exact, solve_greedy};
use pb_core::{Instance, SolverConfig, Vote};

fn load(params: GenParams) -> (Instance, Vec<Vote>) {
    let inst = gen_instance(&params).expect("instance");
    let profile = gen_profile(&inst, &params);
    let (votes, _) = validate_profile(&inst, &profile.votes).expect("ballots");
    (inst, votes)
}

fn unit(projects: usize, seed: u64) -> GenParams {
    GenParams {
        projects: (projects, projects),
        voters: (20, 20),
        budget: (projects as u64 / 3, projects as u64 / 3),
        max_group_size: 4,
        ..GenParams::default()
    }
    .with_seed(seed)
    .with_kind(ProfileKind::Def3)
}

fn solvers(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("unit-cost");
    for m in [12, 24, 48] {
        let (inst, votes) = load(unit(m, 1));
        group.bench_with_input(BenchmarkId::new("greedy", m), &m, |b, _| {
            b.iter(|| solve_greedy(&inst, &votes, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("exact", m), &m, |b, _| {
            b.iter(|| solve_exact(&inst, &votes, &cfg).unwrap())
        });
        if m <= 12 {
            group.bench_with_input(BenchmarkId::new("oracle", m), &m, |b, _| {
                b.iter(|| solve_oracle(&inst, &votes, &cfg).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("weighted");
    for m in [10, 20] {
        let params = GenParams {
            projects: (m, m),
            voters: (4, 4),
            budget: (5, 5),
            max_weight: 50,
            complement_prob: 0.3,
            ..GenParams::default()
        }
        .with_seed(2);
        let (inst, votes) = load(params);
        group.bench_with_input(BenchmarkId::new("distinct", m), &m, |b, _| {
            b.iter(|| solve_distinct_votes(&inst, &votes, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("exact", m), &m, |b, _| {
            b.iter(|| solve_exact(&inst, &votes, &cfg).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("general-cost");
    for b_max in [12u64, 40] {
        let params = GenParams {
            projects: (16, 16),
            voters: (10, 10),
            budget: (b_max, b_max),
            cost: (1, 6),
            max_group_size: 4,
            complement_prob: 0.3,
            ..GenParams::default()
        }
        .with_seed(3);
        let (inst, votes) = load(params);
        group.bench_with_input(BenchmarkId::new("exact", b_max), &b_max, |b, _| {
            b.iter(|| solve_exact(&inst, &votes, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
