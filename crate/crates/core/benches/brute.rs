use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use islkit_core::par::ExecMode;
use islkit_core::parse::{parse_assertion, parse_command};
use islkit_core::semantics::{brute_wpo_over, DomainSpec};
use islkit_core::ExitCondition;

fn brute_wpo(c: &mut Criterion) {
    let p = parse_assertion("exists a . x -> a * y -/> \\/ x == y").unwrap();
    let cmd = parse_command("star { choice { y := [x] } or { [x] := z } ; x := y } ; free(x)").unwrap();
    let mut vars = p.fv();
    vars.extend(cmd.fv());
    let mut group = c.benchmark_group("brute_wpo");
    group.sample_size(10);
    for locs in [3u8, 4] {
        let dom = DomainSpec::new(locs, 3);
        for (name, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, locs), &dom, |b, dom| {
                b.iter(|| brute_wpo_over(dom, &p, &cmd, ExitCondition::Ok, 3, &vars, mode).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, brute_wpo);
criterion_main!(benches);
