use roselect::input::{generate, Distribution, GeneratorSpec};
use roselect::selection::select_general;
use roselect::workspace::WorkspaceMeter;

#[test]
fn measure() {
    let n = 1usize << 20;
    let lg = (n as f64).log2();
    let a = generate(&GeneratorSpec::new(n, 1, Distribution::UniformPermutation)).unwrap();
    for s in [ (8.0*lg.powi(3)) as u64, 4*(((n as f64)*lg).sqrt().ceil() as u64), n as u64 ] {
        let m = WorkspaceMeter::unlimited();
        let r = select_general(&a, n/2, s, &m).unwrap();
        println!("S={s} peak={} ratio={:.2} reads={} bucket_reads={} passes={}",
            r.stats.peak_workspace_bits, r.stats.peak_workspace_bits as f64 / s as f64,
            r.stats.reads, r.diag.bucket_scan_reads, r.stats.passes);
    }
    // criterion 12 numbers
    let n = 1usize << 16;
    let a = generate(&GeneratorSpec::new(n, 1, Distribution::UniformPermutation)).unwrap();
    for seed in 1..=3u64 {
        let a = if seed == 1 { a.share() } else { generate(&GeneratorSpec::new(n, seed, Distribution::UniformPermutation)).unwrap() };
        let m = WorkspaceMeter::unlimited();
        let mut trace = roselect::pruning::PruneTrace::default();
        let before = a.reads();
        let out = roselect::pruning::reduce_to_s(&a, n/2, 1<<12, 1<<12, &m, &mut trace).unwrap();
        let reads = a.reads() - before;
        let lgstar = roselect::pruning::lg_star(n / (1<<12));
        println!("reduce seed={seed} reads={reads} reads/(N·lg*)= {:.1} outcome_active={:?}",
            reads as f64 / (n as f64 * lgstar as f64),
            match out { roselect::pruning::ReduceOutcome::Reduced{active,..} => active, _ => 0 });
    }
}
