//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chord_sim::cli::report::rows_to_csv;
use chord_sim::cli::sweep::{run_sweep, SweepConfig};
use chord_sim::fz::fuzzy::normalize_resources;
use chord_sim::fz::resource::{build_resource_table, detect_unique, Inventory, ResourceDescriptor};
use chord_sim::fz::{fz_lookup, partition, RingLabel};
use chord_sim::id::{Id, IdSpace};
use chord_sim::lookup::find_successor;
use chord_sim::ring::{successor_oracle, Ring};
use chord_sim::rvn::{rvn_commit, rvn_lookup, RvnOptions};
use chord_sim::sim::memory::memory_footprint;
use chord_sim::sim::synthetic::{random_ring, synthetic_resources};
use chord_sim::sim::{run_experiment, ExperimentConfig, Protocol, WorkloadKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const TEN_NODE_IDS: [u64; 10] = [1, 8, 14, 21, 32, 38, 42, 48, 51, 56];

fn ten_node(keys: impl IntoIterator<Item = u64>) -> Ring {
    let space = IdSpace::new(6).unwrap();
    Ring::build(space, TEN_NODE_IDS.map(Id), keys.into_iter().map(Id)).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let space = IdSpace::new(16).map_err(err)?;
    let mut checked = 0;
    for (i, n) in [10usize, 64, 256].into_iter().enumerate() {
        let seed = 100 + i as u64;
        let mut ring = random_ring(space, n, seed).map_err(err)?;
        let overlay = partition(&ring).map_err(err)?;
        let ids: Vec<Id> = ring.ids().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let origin = ids[rng.random_range(0..ids.len())];
            let key = Id(rng.random_range(0..space.size()));
            let expected = successor_oracle(&ring, key);
            let chord = find_successor(&ring, origin, key).map_err(err)?.owner;
            let rvn = rvn_lookup(&ring, origin, key, RvnOptions::default()).map_err(err)?.owner;
            let fz = fz_lookup(&overlay, origin, key).map_err(err)?.owner;
            ensure!(
                chord == expected && rvn == expected && fz == expected,
                "N={n} origin={origin} key={key}: oracle {expected}, chord {chord}, rvn {rvn}, fz {fz}"
            );
            rvn_commit(&mut ring, rvn).map_err(err)?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("{checked} pairs x 3 protocols match the oracle in {elapsed:.2?}"))
}

fn ten_node_facts() -> Outcome {
    let ring = ten_node(0..64);
    let facts = [(1, 1), (29, 32), (44, 48), (36, 38)];
    for (key, owner) in facts {
        ensure!(ring.successor(Id(key)) == Id(owner), "successor({key}) = {}", ring.successor(Id(key)));
        ensure!(ring.holder_of(Id(key)) == Some(Id(owner)), "key {key} stored at {:?}", ring.holder_of(Id(key)));
    }
    let mut named = ten_node([1, 29, 36, 44]);
    let transfer = named.join(Id(37)).map_err(err)?;
    ensure!(
        transfer.from == Id(38) && transfer.to == Id(37) && transfer.keys == BTreeSet::from([Id(36)]),
        "join 37 moved {:?} from {} to {}",
        transfer.keys,
        transfer.from,
        transfer.to
    );
    ensure!(named.keys_conserved(), "keys lost after join");
    Ok("successor(1)=1, successor(29)=32, successor(44)=48; join 37 takes {36} from 38".into())
}

fn hop_scaling() -> Outcome {
    let space = IdSpace::new(16).map_err(err)?;
    let config = ExperimentConfig::seeded(Protocol::Chord, WorkloadKind::Uniform, 10_000, 1);
    let row = run_experiment(&config, random_ring(space, 1024, 1).map_err(err)?).map_err(err)?.row;
    ensure!((4.0..=7.0).contains(&row.avg_hops), "avg_hops {:.3} outside [4, 7]", row.avg_hops);
    Ok(format!("avg_hops {:.3} at N=1024", row.avg_hops))
}

fn protocol_ordering() -> Outcome {
    let space = IdSpace::new(16).map_err(err)?;
    let seeds = [1u64, 2, 3];
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for n in [256usize, 1024, 4096] {
        let mut held = 0;
        for &seed in &seeds {
            let ring = random_ring(space, n, seed).map_err(err)?;
            let mut rows = BTreeMap::new();
            for protocol in Protocol::ALL {
                let config = ExperimentConfig::seeded(protocol, WorkloadKind::Sequential, 10_000, seed);
                rows.insert(protocol, run_experiment(&config, ring.clone()).map_err(err)?.row);
            }
            let (c, r, f) = (&rows[&Protocol::Chord], &rows[&Protocol::Rvn], &rows[&Protocol::Fz]);
            let rvn_ok = r.avg_hops <= c.avg_hops && r.avg_messages <= c.avg_messages;
            let fz_ok = f.avg_hops <= r.avg_hops && f.avg_messages <= r.avg_messages;
            if rvn_ok && fz_ok {
                held += 1;
            }
            if seed == seeds[0] {
                summary.push(format!(
                    "N={n} hops c/r/f {:.2}/{:.2}/{:.2} msgs {:.2}/{:.2}/{:.2}",
                    c.avg_hops, r.avg_hops, f.avg_hops, c.avg_messages, r.avg_messages, f.avg_messages
                ));
                if !rvn_ok {
                    failures.push(format!("N={n}: rvn > chord"));
                }
                if !fz_ok {
                    failures.push(format!("N={n}: fz > rvn"));
                }
            }
        }
        if held < 2 {
            failures.push(format!("N={n}: ordering held on {held}/3 seeds"));
        }
    }
    let detail = summary.join("; ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failures.join(", ")))
    }
}

fn memory_ordering() -> Outcome {
    let space = IdSpace::new(16).map_err(err)?;
    let b = (16u64).div_ceil(8);
    for n in [256usize, 512, 1024, 2048, 4096, 8192, 16384, 32768] {
        let ring = random_ring(space, n, 1).map_err(err)?;
        let overlay = partition(&ring).map_err(err)?;
        let chord = memory_footprint(Protocol::Chord, &ring, None).map_err(err)?;
        let rvn = memory_footprint(Protocol::Rvn, &ring, None).map_err(err)?;
        let fz = memory_footprint(Protocol::Fz, &ring, Some(&overlay)).map_err(err)?;
        let n = n as u64;
        ensure!(chord == n * (3 * 16 + 2) * b, "N={n}: chord {chord}");
        ensure!(fz > rvn && rvn > chord, "N={n}: fz {fz}, rvn {rvn}, chord {chord}");
        ensure!(rvn - chord == n * b, "N={n}: rvn - chord = {}", rvn - chord);
    }
    Ok("fz > rvn > chord and rvn - chord = 2N for N = 256..32768".into())
}

fn rvn_semantics() -> Outcome {
    let space = IdSpace::new(12).map_err(err)?;
    let rings = [ten_node(0..64), random_ring(space, 64, 4).map_err(err)?];
    let mut checks = 0;
    for base in rings {
        let ids: Vec<Id> = base.ids().collect();
        for &x in &ids {
            let mut ring = base.clone();
            rvn_commit(&mut ring, x).map_err(err)?;
            ensure!(ring.nodes().all(|n| n.rvn == x), "commit({x}) left a stale slot");
            for &origin in &ids {
                let hit = rvn_lookup(&ring, origin, x, RvnOptions::default()).map_err(err)?;
                ensure!(hit.hops <= 1 && hit.owner == x, "origin {origin} key {x}: {} hops", hit.hops);
                for key in (0..x.0).step_by(((x.0 / 16) as usize).max(1)).map(Id) {
                    let r = rvn_lookup(&ring, origin, key, RvnOptions::default()).map_err(err)?;
                    let c = find_successor(&ring, origin, key).map_err(err)?;
                    ensure!(r == c, "origin {origin} key {key} rvn {x}: {:?} vs {:?}", r.path, c.path);
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("commit reaches every node; key == rvn in <= 1 hop; {checks} key < rvn traces equal Chord"))
}

fn fz_structure() -> Outcome {
    let space = IdSpace::new(16).map_err(err)?;
    for seed in 1..=5u64 {
        let ring = random_ring(space, 256, seed).map_err(err)?;
        let overlay = partition(&ring).map_err(err)?;
        let mut seen = BTreeSet::new();
        let mut total = 0;
        for label in RingLabel::ALL {
            for id in overlay.members(label) {
                ensure!(seen.insert(id), "seed {seed}: {id} in two sub-rings");
                total += 1;
            }
            if let (Some(sub), Some(head)) = (overlay.subring(label), overlay.ring_head(label)) {
                let best = sub.nodes().map(|n| n.resources.len()).max().unwrap_or(0);
                let expected = sub.nodes().find(|n| n.resources.len() == best).map(|n| n.id);
                ensure!(Some(head) == expected, "seed {seed}: {label} head {head}, expected {expected:?}");
            }
        }
        ensure!(total == ring.len() && seen == ring.ids().collect(), "seed {seed}: partition covers {total}/256");
        let inventory = ring.inventory();
        for id in detect_unique(&inventory) {
            ensure!(overlay.label_of(id) == Some(RingLabel::Hottest), "seed {seed}: unique {id} not in HOTTEST");
        }
        let sigs: BTreeSet<&str> = overlay.resource_table().iter().map(|e| e.signature.as_str()).collect();
        ensure!(sigs.len() == overlay.resource_table().len(), "seed {seed}: duplicate signatures");
        normalize_resources(&inventory).map_err(err)?;
    }

    let ram = BTreeSet::from([ResourceDescriptor::new("RAM", "1GHZ")]);
    let mut inventory: Inventory = [2, 4, 9].into_iter().map(|i| (Id(i), ram.clone())).collect();
    inventory.insert(Id(5), synthetic_resources(1, Id(5)));
    let table = build_resource_table(&inventory);
    let trio = table.iter().find(|e| e.node_ids.contains(&Id(2))).ok_or("node 2 missing")?;
    ensure!(trio.node_ids == BTreeSet::from([Id(2), Id(4), Id(9)]), "trio entry {:?}", trio.node_ids);
    ensure!(table.len() == 2, "{} entries", table.len());

    let tie = Ring::build(IdSpace::new(6).map_err(err)?, [Id(9), Id(5)], []).map_err(err)?;
    let mut tie = tie;
    tie.set_resources(Id(9), ram.clone()).map_err(err)?;
    tie.set_resources(Id(5), ram.clone()).map_err(err)?;
    ensure!(chord_sim::fz::elect_ring_head(&tie) == Some(Id(5)), "tie not broken by lowest id");
    Ok("partition exact, unique nodes in HOTTEST, heads max/lowest-id, signatures distinct, RAM trio = 1 entry".into())
}

fn churn_safety() -> Outcome {
    let start = Instant::now();
    let space = IdSpace::new(16).map_err(err)?;
    let mut ring = random_ring(space, 256, 8).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut joins, mut leaves, mut lookups) = (0, 0, 0);
    for _ in 0..200 {
        ring.insert_key(Id(rng.random_range(0..space.size()))).map_err(err)?;
    }
    for step in 0..1000 {
        match rng.random_range(0..3) {
            0 => {
                let id = Id(rng.random_range(0..space.size()));
                if ring.contains(id) {
                    continue;
                }
                ring.join(id).map_err(err)?;
                joins += 1;
            }
            1 => {
                let ids: Vec<Id> = ring.ids().collect();
                ring.leave(ids[rng.random_range(0..ids.len())]).map_err(err)?;
                leaves += 1;
            }
            _ => {
                let ids: Vec<Id> = ring.ids().collect();
                let origin = ids[rng.random_range(0..ids.len())];
                let key = Id(rng.random_range(0..space.size()));
                ring.insert_key(key).map_err(err)?;
                let r = rvn_lookup(&ring, origin, key, RvnOptions::default()).map_err(err)?;
                ensure!(r.owner == successor_oracle(&ring, key), "step {step}: wrong owner for {key}");
                rvn_commit(&mut ring, r.owner).map_err(err)?;
                lookups += 1;
            }
        }
        ensure!(ring.keys_conserved(), "step {step}: keys not conserved");
        ensure!(ring.nodes().all(|n| ring.contains(n.rvn)), "step {step}: rvn slot points at a departed node");
    }
    ensure!(ring.is_consistent_with_oracle(), "routing state diverged from the oracle");
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("{joins} joins, {leaves} leaves, {lookups} lookups in {elapsed:.2?}"))
}

fn determinism() -> Outcome {
    let config = SweepConfig { node_counts: vec![256, 512], ..SweepConfig::default() };
    let csv = |c: &SweepConfig| -> Result<String, String> {
        let rows: Vec<_> = run_sweep(c).map_err(err)?.iter().map(|o| o.row(c)).collect();
        rows_to_csv(&rows).map_err(err)
    };
    let a = csv(&config)?;
    let b = csv(&config)?;
    let c = csv(&SweepConfig { parallelism: 4, ..config.clone() })?;
    ensure!(a == b, "two serial runs differ");
    ensure!(a == c, "parallel run differs from serial");
    Ok(format!("{} rows byte-identical across runs and worker counts", a.lines().count() - 1))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("ten-node ring facts", ten_node_facts),
        ("hop scaling", hop_scaling),
        ("protocol ordering", protocol_ordering),
        ("memory ordering", memory_ordering),
        ("rvn semantics", rvn_semantics),
        ("fz structure", fz_structure),
        ("churn safety", churn_safety),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
