//! Random and adversarial searches: the real colorings hold up, the broken
//! controls are caught.

use monobox::harness::{
    adversarial_search, run_search, AdversarialSpec, Coloring, Mode, TrialSpec,
};

fn main() -> monobox::Result<()> {
    let runs: Vec<(Mode, usize, Coloring, u64)> = vec![
        (Mode::Rect2d, 2, Coloring::Plane25, 200_000),
        (Mode::Parallelogram2d, 2, Coloring::Plane25, 200_000),
        (Mode::BoxNd, 2, "nd:2:paper".parse()?, 20_000),
        (Mode::BoxNd, 3, "nd:3:sharp".parse()?, 5_000),
        (Mode::Skeleton, 3, Coloring::skeleton(3)?, 20_000),
        (Mode::Rect2d, 2, Coloring::Quadrant4, 10_000),
        (Mode::BoxNd, 2, Coloring::NoRotationNet { n: 2 }, 10_000),
    ];
    for (mode, n, coloring, trials) in runs {
        let r = run_search(&TrialSpec::new(mode, n, trials, 1), &coloring)?;
        println!(
            "{:<16} {:<16} {:>7} trials: {:>5} monochromatic, first {:?}, {:?}",
            coloring.name(),
            format!("{mode:?}/{n}"),
            trials,
            r.counterexamples,
            r.first_hit,
            r.outcome
        );
    }

    let adv = AdversarialSpec {
        restarts: 50,
        steps: 1000,
        patience: 200,
    };
    let spec = TrialSpec::new(Mode::BoxNd, 2, 1, 1);
    let r = adversarial_search(&spec, &adv, &Coloring::NoRotationNet { n: 2 })?;
    if let Some(w) = r.witnesses.first() {
        println!(
            "\nadversarial witness for no-rotation-net:\n{}",
            serde_json::to_string_pretty(w)?
        );
    }
    Ok(())
}
