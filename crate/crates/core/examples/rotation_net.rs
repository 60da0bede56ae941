//! Net sizes and a coverage check against Haar-random rotations.

use monobox::net::{build_net, certify_coverage, haar_random_rotation, NetSpec};

fn main() -> monobox::Result<()> {
    for spec in [
        NetSpec::paper(2),
        NetSpec::sharp(2),
        NetSpec::sharp(3),
        NetSpec::paper(3),
    ] {
        let net = build_net(spec)?;
        println!(
            "n={} {:?} eps={:.5}: {} members",
            spec.n,
            spec.mode,
            net.eps(),
            net.size()
        );
    }

    let net = build_net(NetSpec::sharp(3))?;
    let u = haar_random_rotation(3, 42)?;
    let (i, d) = net.locate(&u);
    println!("\nrandom rotation -> member {i} at distance {d:.5}");

    let stride = net.resolution().pow(3) / 20_000;
    let rep = certify_coverage(&net, 100_000, 1, stride);
    println!(
        "100000 samples: {} misses, worst {:.5}, cell corners {:.5}, eps {:.5}",
        rep.failures, rep.worst_distance, rep.worst_corner_distance, rep.eps
    );
    Ok(())
}
