//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use morphsynth_cli::artifacts::ParetoSnapshot;
use morphsynth_cli::campaign::{run_campaign, Campaign};
use morphsynth_cli::commands::{evaluate_model, optimize, OptimizeOverrides};
use morphsynth_cli::config::CampaignConfig;
use morphsynth_core::design_space::urdf::{export_urdf, parse_urdf};
use morphsynth_core::design_space::{decode, sample_genotype, JointGene};
use morphsynth_core::evaluation::ObjectiveVector;
use morphsynth_core::kinematics::{forward_kinematics, gravity_torque, solve_ik, GRAVITY};
use morphsynth_core::optimizer::{dominates, hypervolume, nondominated_sort, ParamSpec, SamplerConfig, Study};
use morphsynth_core::{seed, IkOptions, KinematicModel, Pose, SearchSpace, TargetSet};
use nalgebra::Vector3;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn random_model(rng: &mut impl Rng, n_joint: usize) -> KinematicModel {
    let space = if rng.random_bool(0.5) {
        SearchSpace::general(n_joint)
    } else {
        SearchSpace::actuator_module(n_joint)
    };
    decode(&space, &sample_genotype(&space, rng)).unwrap()
}

fn random_pose(rng: &mut impl Rng, model: &KinematicModel) -> Vec<f64> {
    model.joints.iter().map(|j| rng.random_range(j.lower..=j.upper)).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn potential(model: &KinematicModel, q: &[f64]) -> f64 {
    let f = forward_kinematics(model, q).unwrap();
    model
        .links
        .iter()
        .zip(f.link_coms(model))
        .map(|(l, c)| l.mass * GRAVITY * c.z)
        .sum()
}

fn statics_gradient() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(1001);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for m in 0..50 {
        let model = random_model(&mut rng, 1 + m % 5);
        for _ in 0..10 {
            let q = random_pose(&mut rng, &model);
            let tau = gravity_torque(&model, &q, 0.0).unwrap();
            let scale = tau.iter().fold(1e-3f64, |a, t| a.max(t.abs()));
            for j in 0..q.len() {
                let (mut plus, mut minus) = (q.clone(), q.clone());
                plus[j] += h;
                minus[j] -= h;
                let grad = (potential(&model, &plus) - potential(&model, &minus)) / (2.0 * h);
                worst = worst.max((tau[j] + grad).abs() / scale);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(10),
        format!("max relative error {worst:.2e} over 500 poses in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn zero_torque_yaw() -> Outcome {
    let mut rng = seed::rng(1002);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let space = SearchSpace::general(1 + i % 5);
        let mut g = sample_genotype(&space, &mut rng);
        for (k, gene) in g.joints.iter_mut().enumerate() {
            if let JointGene::General { orientation, .. } = gene {
                *orientation = if k == 0 { 8 + rng.random_range(0..4) } else { 4 };
            }
        }
        let model = decode(&space, &g).unwrap();
        let q = random_pose(&mut rng, &model);
        let tau = gravity_torque(&model, &q, 0.0).unwrap();
        worst = tau.iter().fold(worst, |a, t| a.max(t.abs()));
    }
    outcome(worst == 0.0, format!("max |tau_j| = {worst:e} over 100 chains"))
}

fn cantilever() -> Outcome {
    let space = SearchSpace::general(1);
    let g = morphsynth_core::Genotype {
        base_offset: [0.0; 3],
        joints: vec![JointGene::General { orientation: 4, direction: 0, length: 0.4 }],
    };
    let model = decode(&space, &g).unwrap();
    let tau = gravity_torque(&model, &[0.0], 0.0).unwrap()[0].abs();
    outcome((tau - 17.658).abs() <= 1e-9, format!("|tau| = {tau} N m, mass {} kg", model.links[0].mass))
}

fn ik_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(1004);
    let mut hits = 0;
    for i in 0..500 {
        let model = random_model(&mut rng, 2 + i % 3);
        let q0 = random_pose(&mut rng, &model);
        let target = Pose::position(forward_kinematics(&model, &q0).unwrap().tip);
        let opts = IkOptions { seed: i as u64, restarts: 10, ..IkOptions::default() };
        let r = solve_ik(&model, &target, &opts);
        if r.converged && r.position_error < 1e-4 {
            hits += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        hits >= 475 && elapsed < Duration::from_secs(60),
        format!("{hits}/500 converged below 1e-4 m in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn brute_ranks(points: &[[f64; 2]]) -> Vec<usize> {
    let mut ranks = vec![usize::MAX; points.len()];
    let mut rank = 0;
    while ranks.contains(&usize::MAX) {
        let layer: Vec<usize> = (0..points.len())
            .filter(|&i| ranks[i] == usize::MAX)
            .filter(|&i| !(0..points.len()).any(|j| ranks[j] == usize::MAX && dominates(&points[j], &points[i])))
            .collect();
        for i in layer {
            ranks[i] = rank;
        }
        rank += 1;
    }
    ranks
}

fn dominance_oracles() -> Outcome {
    let mut mismatches = 0;
    for s in 0..20 {
        let mut rng = seed::rng(5000 + s);
        let points: Vec<[f64; 2]> = (0..200)
            .map(|_| {
                if rng.random_bool(0.3) {
                    [rng.random_range(0..8) as f64, rng.random_range(0..8) as f64]
                } else {
                    [rng.random_range(0.0..8.0), rng.random_range(0.0..8.0)]
                }
            })
            .collect();
        if nondominated_sort(&points) != brute_ranks(&points) {
            mismatches += 1;
        }
        let mut study = Study::new(vec![ParamSpec::Continuous { lo: 0.0, hi: 1.0 }], SamplerConfig::default());
        for p in &points {
            study.tell(vec![0.0], ObjectiveVector::new(p[0], p[1])).unwrap();
        }
        let mut archive: Vec<usize> = study.pareto_front().unwrap().members.iter().map(|t| t.id).collect();
        archive.sort();
        let brute: Vec<usize> = (0..points.len())
            .filter(|&i| !points.iter().any(|q| dominates(q, &points[i])))
            .collect();
        if archive != brute {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches over 20 sets of 200 points"))
}

fn hypervolume_oracle() -> Outcome {
    let hand = hypervolume(&[[0.0, 0.0]], [1.0, 1.0]).unwrap() == 1.0
        && hypervolume(&[[0.0, 1.0], [1.0, 0.0]], [2.0, 2.0]).unwrap() == 3.0;
    let side = 1000;
    let mut worst = 0.0f64;
    for s in 0..50 {
        let mut rng = seed::rng(6000 + s);
        let size = rng.random_range(1..30);
        let front: Vec<[f64; 2]> = (0..size).map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
        let reference = [1.0 + rng.random_range(0.0..0.5), 1.0 + rng.random_range(0.0..0.5)];
        let exact = hypervolume(&front, reference).unwrap();
        // jittered grid: one uniform sample per cell, variance bounded by the binomial one
        let mut hits = 0usize;
        for i in 0..side {
            for j in 0..side {
                let p = [
                    (i as f64 + rng.random::<f64>()) / side as f64 * reference[0],
                    (j as f64 + rng.random::<f64>()) / side as f64 * reference[1],
                ];
                hits += usize::from(front.iter().any(|f| f[0] <= p[0] && f[1] <= p[1]));
            }
        }
        let n = (side * side) as f64;
        let area = reference[0] * reference[1];
        let frac = hits as f64 / n;
        let sigma = area * (frac * (1.0 - frac) / n).sqrt();
        worst = worst.max((exact - frac * area).abs() / sigma.max(1e-300));
    }
    outcome(
        hand && worst <= 3.0,
        format!("hand cases {}, worst deviation {worst:.2} sigma over 50 fronts", if hand { "exact" } else { "WRONG" }),
    )
}

fn load_config(rel: &str) -> CampaignConfig {
    CampaignConfig::load(&fixture(rel)).unwrap()
}

fn campaign(config: &CampaignConfig, n_joint: usize, sampler: SamplerConfig) -> Campaign {
    let space = config.search_space(n_joint).unwrap();
    run_campaign(space, &config.targets, config.trials, sampler, &config.ik)
}

fn optimizer_effectiveness() -> Outcome {
    let config = load_config("campaigns/general_target3.toml");
    let planar = config.targets.targets.iter().all(|t| t.position.z == 0.5);
    let mut scara = 0;
    let mut slowest = 0.0f64;
    let (mut tpe_hv, mut random_hv) = (Vec::new(), Vec::new());
    for s in 0..10 {
        let start = Instant::now();
        let tpe = campaign(&config, 4, SamplerConfig { seed: s, ..config.sampler() });
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let random = campaign(&config, 4, SamplerConfig::random(s));
        let front = tpe.study.study.pareto_front().unwrap();
        if front.members.iter().any(|m| m.objectives.e_tau < 1e-6 && m.objectives.e_x < 0.05) {
            scara += 1;
        }
        // both runs share their random phase, hence the reference point
        let reference = tpe.study.study.reference_point_within(config.sampler.n_startup).unwrap();
        tpe_hv.push(*tpe.study.study.hypervolume_curve(reference).last().unwrap());
        random_hv.push(*random.study.study.hypervolume_curve(reference).last().unwrap());
    }
    let (tpe_median, random_median) = (median(tpe_hv), median(random_hv));
    outcome(
        planar && scara >= 8 && tpe_median > random_median && slowest < 900.0,
        format!(
            "zero-torque design with e_x < 0.05 in {scara}/10 seeds; median hypervolume {tpe_median:.1} vs random {random_median:.1}; slowest seed {slowest:.1}s"
        ),
    )
}

fn joint_count_effect() -> Outcome {
    let config = load_config("campaigns/general_target1.toml");
    let points: Vec<Vector3<f64>> = config.targets.targets.iter().map(|t| t.position).collect();
    let normal = (points[1] - points[0]).cross(&(points[2] - points[0]));
    let skew = normal.dot(&(points[3] - points[0])).abs() > 1e-3;
    let mut ratios = Vec::new();
    let (mut two, mut three) = (Vec::new(), Vec::new());
    for s in 0..10 {
        let sampler = SamplerConfig { seed: s, ..config.sampler() };
        let b2 = campaign(&config, 2, sampler.clone()).best_e_x().unwrap();
        let b3 = campaign(&config, 3, sampler).best_e_x().unwrap();
        ratios.push(b2 / b3.max(1e-12));
        two.push(b2);
        three.push(b3);
    }
    let ratio = median(ratios);
    outcome(
        skew && ratio >= 5.0,
        format!(
            "median best e_x {:.4} m (2 joints) vs {:.2e} m (3 joints), median ratio {ratio:.3e}",
            median(two),
            median(three)
        ),
    )
}

fn campaign_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.file_name() == Some("trials.csv".as_ref()) || p.extension().is_some_and(|e| e == "svg")
        })
        .collect();
    files.sort();
    files
}

fn determinism(runs: &Path) -> Outcome {
    let mut compared = 0;
    let mut differing = Vec::new();
    for (config, trials) in [("campaigns/general_target3.toml", 300), ("campaigns/module_target1.toml", 200)] {
        let mut dirs = Vec::new();
        for run in ["first", "second"] {
            let out = runs.join(run).join(Path::new(config).file_stem().unwrap());
            let overrides = OptimizeOverrides { trials: Some(trials), out: Some(out), ..Default::default() };
            dirs.push(optimize(&fixture(config), &overrides).unwrap());
        }
        for (a, b) in dirs[0].iter().zip(&dirs[1]) {
            let files = campaign_files(&a.dir);
            if files.len() != campaign_files(&b.dir).len() {
                differing.push(a.dir.display().to_string());
            }
            for f in files {
                compared += 1;
                if std::fs::read(&f).unwrap() != std::fs::read(b.dir.join(f.file_name().unwrap())).unwrap() {
                    differing.push(f.display().to_string());
                }
            }
        }
    }
    outcome(
        differing.is_empty() && compared > 0,
        format!("{compared} files compared across 4 campaigns, {} differ {differing:?}", differing.len()),
    )
}

fn urdf_round_trip(runs: &Path) -> Outcome {
    let mut rng = seed::rng(1010);
    let mut worst_fk = 0.0f64;
    for m in 0..20 {
        let model = random_model(&mut rng, 1 + m % 5);
        let back = parse_urdf(&export_urdf(&model, "acceptance")).unwrap();
        for _ in 0..100 {
            let q: Vec<f64> = (0..model.n_joint()).map(|_| rng.random_range(-3.2..3.2)).collect();
            let a = forward_kinematics(&model, &q).unwrap().tip;
            let b = forward_kinematics(&back, &q).unwrap().tip;
            worst_fk = worst_fk.max((a - b).norm());
        }
    }
    let mut worst_objective = 0.0f64;
    let mut members = 0;
    for dir in walk_campaigns(&runs.join("first")) {
        let snapshot: ParetoSnapshot =
            serde_json::from_slice(&std::fs::read(dir.join("pareto.json")).unwrap()).unwrap();
        let targets = TargetSet::positions(&snapshot.targets, Default::default());
        for m in &snapshot.members {
            let report = evaluate_model(&dir.join(&m.urdf), &targets, &snapshot.ik).unwrap();
            worst_objective = worst_objective.max((report.e_x - m.e_x).abs()).max((report.e_tau - m.e_tau).abs());
            members += 1;
        }
    }
    outcome(
        worst_fk <= 1e-9 && worst_objective <= 1e-9 && members > 0,
        format!(
            "FK deviation {worst_fk:.1e} m over 2000 poses; {members} front URDFs re-evaluated, max objective deviation {worst_objective:.1e}"
        ),
    )
}

fn walk_campaigns(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.join("pareto.json").is_file() {
            out.push(path);
        } else if path.is_dir() {
            out.extend(walk_campaigns(&path));
        }
    }
    out.sort();
    out
}

fn main() {
    let runs = tempfile::TempDir::new().unwrap();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 statics gradient", Box::new(statics_gradient)),
        ("2 zero torque for yaw chains", Box::new(zero_torque_yaw)),
        ("3 cantilever torque", Box::new(cantilever)),
        ("4 IK round trip", Box::new(ik_round_trip)),
        ("5 dominance and archive oracles", Box::new(dominance_oracles)),
        ("6 hypervolume oracle", Box::new(hypervolume_oracle)),
        ("7 optimizer effectiveness", Box::new(optimizer_effectiveness)),
        ("8 joint-count effect", Box::new(joint_count_effect)),
        ("9 determinism", Box::new(|| determinism(runs.path()))),
        ("10 URDF round trip", Box::new(|| urdf_round_trip(runs.path()))),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
