//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p circlabel --test acceptance`.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circlabel::geometry::{Projection, ScreenVec, Vec3, ViewState};
use circlabel::guidance::{
    make_trajectory, normalized_alignment, select_candidates, update_speed, FlightState,
    GuidanceState, PruneDirection,
};
use circlabel::interaction::{ButtonKind, DwellState, InputEvent, Phase, Pipeline, PipelineConfig, PipelineEvent};
use circlabel::layout::{
    build_second_level, check_sorted_layout, collate, labels_for_objects, layout_for,
    max_sorted_subseq, CircleLayout, Label, LayoutParams, Method, MultiCircleLayout, RadianRange,
};
use circlabel::protocol::{replay, ClientMessage, Envelope};
use circlabel::scene::{ObjectId, Scene, SceneObject, Spawn};
use circlabel::sim::{
    compare_methods, generate_scene, write_report, CompareConfig, Preset, SceneSource, SceneSpec,
};

type Criterion = (&'static str, fn() -> Outcome);

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

fn view() -> ViewState {
    ViewState::new(Vec3::ZERO, -Vec3::Z, Vec3::Y, ScreenVec::ZERO).unwrap()
}

/// Signed angle from `a` to `b` folded into [0, pi].
fn angle_between(a: ScreenVec, b: ScreenVec) -> f64 {
    let d = (b.y.atan2(b.x) - a.y.atan2(a.x)).rem_euclid(TAU);
    d.min(TAU - d)
}

fn layout_invariants() -> Outcome {
    let start = Instant::now();
    let params = LayoutParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    for seed in 0..200u64 {
        let n = rng.random_range(10..=100);
        let preset = if seed % 2 == 0 { Preset::Grid } else { Preset::Scatter };
        let scene = generate_scene(&SceneSpec::new(seed, n, preset)).unwrap();
        let labels = labels_for_objects(&scene.objects);
        let center = ScreenVec::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let layout = build_second_level(
            &labels,
            &scene.objects,
            &view().with_gaze(center),
            &Projection::default(),
            &params,
        )
        .unwrap();
        let ids: Vec<_> = labels.iter().map(|l| l.id).collect();
        if let Err(v) = check_sorted_layout(&layout, &ids, &params) {
            failures.push(format!("seed {seed}: {:?}", v.first()));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!("200 instances, {} failing, {:.2?} (limit 30 s) {}", failures.len(), elapsed, failures.join("; ")),
    )
}

/// Largest subset whose radians, taken in collation order, wind around the
/// circle at most once.
fn brute_force_sorted(radians: &[f64]) -> usize {
    let n = radians.len();
    (0u32..(1 << n))
        .filter_map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let turn: f64 = (0..idx.len())
                .map(|w| (radians[idx[(w + 1) % idx.len()]] - radians[idx[w]]).rem_euclid(TAU))
                .sum();
            ((turn / TAU).round() <= 1.0).then_some(idx.len())
        })
        .max()
        .unwrap_or(0)
}

fn lis_oracle() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=12);
        let mut scl: Vec<Label> = (0..n)
            .map(|i| {
                let text: String = (0..4).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
                let r = rng.random_range(0.0..TAU);
                Label::oriented(i, &text, r, RadianRange::around(r, 1.0))
            })
            .collect();
        let mut sorted = scl.clone();
        sorted.sort_by(collate);
        let radians: Vec<f64> = sorted.iter().map(|l| l.rad_p).collect();
        let want = brute_force_sorted(&radians);
        let seed_set = max_sorted_subseq(&mut scl);
        let picked: Vec<f64> = seed_set.iter().map(|l| l.rad_p).collect();
        if seed_set.len() != want || brute_force_sorted(&picked) != picked.len() {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("500 seeds, n <= 12, {mismatches} mismatches, {elapsed:.2?} (limit 60 s)"),
    )
}

fn random_layout(rng: &mut ChaCha8Rng) -> MultiCircleLayout {
    let mut layout = MultiCircleLayout::empty(ScreenVec::ZERO);
    let mut id = 0;
    for k in 0..rng.random_range(1..4) {
        let mut c = CircleLayout::new(k, 1.0 + 0.22 * k as f64);
        for _ in 0..rng.random_range(1..10) {
            let r = rng.random_range(0.0..TAU);
            c.entries.push(Label::oriented(id, "x", r, RadianRange::around(r, 1.0)));
            id += 1;
        }
        layout.circles.push(c);
    }
    layout
}

fn candidate_and_pruning_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let projection = Projection::default();
    let (mut cand_bad, mut prune_bad) = (0, 0);
    for _ in 0..1000 {
        let layout = random_layout(&mut rng);
        let a = rng.random_range(0.0..TAU);
        let gaze = ScreenVec::new(a.cos(), a.sin()) * rng.random_range(0.05..2.0);
        let got: Vec<_> = select_candidates(&layout, gaze).iter().map(|l| l.id).collect();
        let want: Vec<_> = layout
            .placed()
            .filter(|(_, l)| angle_between(ScreenVec::new(l.rad.cos(), l.rad.sin()), gaze) < PI / 2.0)
            .map(|(_, l)| l.id)
            .collect();
        cand_bad += usize::from(got != want);

        let v = view();
        let mut state = GuidanceState::default();
        for (i, (_, l)) in layout.placed().enumerate() {
            let p = |rng: &mut ChaCha8Rng| {
                Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-5.0..-1.0))
            };
            let (s, e) = (p(&mut rng), p(&mut rng));
            let mut f = FlightState::new(l, make_trajectory(s, e, Vec3::ZERO).unwrap(), 0.3);
            if i % 4 == 3 {
                f.t = 1.0;
                f.arrived_at = Some(0.0);
            }
            state.flights.push(f);
        }
        let want: Vec<_> = state
            .flights
            .iter()
            .filter(|f| {
                let chord = projection.world_to_screen_clamped(f.trajectory.end(), &v)
                    - projection.world_to_screen_clamped(f.trajectory.start(), &v);
                f.arrived_at.is_none() && angle_between(chord, gaze) > PI / 2.0
            })
            .map(|f| f.label_id)
            .collect();
        let got = state.prune_invalid(Some(gaze), &v, &projection, PruneDirection::Chord);
        prune_bad += usize::from(got != want || state.flights.iter().any(|f| want.contains(&f.label_id)));
    }
    outcome(
        cand_bad == 0 && prune_bad == 0,
        format!("1000 configurations, {cand_bad} candidate and {prune_bad} pruning mismatches"),
    )
}

fn speed_checks() -> Outcome {
    let x = ScreenVec::new(1.0, 0.0);
    let endpoints = [
        normalized_alignment(x, ScreenVec::new(2.0, 0.0)).unwrap(),
        normalized_alignment(x, ScreenVec::new(-3.0, 0.0)).unwrap(),
        normalized_alignment(x, ScreenVec::new(0.0, 0.5)).unwrap(),
    ];
    let alpha_ok = (endpoints[0] - 1.0).abs() < 1e-12
        && endpoints[1].abs() < 1e-12
        && (endpoints[2] - 0.5).abs() < 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fixed_bad = 0;
    let mut mono_bad = 0;
    for _ in 0..10_000 {
        let (a, d) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        fixed_bad += usize::from(update_speed(1.0, a, d) != 1.0);
        let mut s: f64 = rng.random_range(0.0..=1.0);
        for _ in 0..50 {
            let next = update_speed(s, rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
            if next < s || next > 1.0 {
                mono_bad += 1;
            }
            s = next;
        }
    }
    outcome(
        alpha_ok && fixed_bad == 0 && mono_bad == 0,
        format!(
            "alpha = {:?}; {fixed_bad} fixed-point and {mono_bad} monotonicity violations over 10000 sequences",
            endpoints
        ),
    )
}

fn trajectory_construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst_law: f64 = 0.0;
    let mut worst_end: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let mut p = || Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let (p_v, p_s, p_e) = (p(), p(), p());
        let Ok(t) = make_trajectory(p_s, p_e, p_v) else { continue };
        n += 1;
        let [_, c1, c2, _] = t.control;
        worst_law = worst_law
            .max((c1.distance(p_v) - p_e.distance(p_s)).abs())
            .max((c2.distance(p_v) - p_v.distance(p_e)).abs());
        worst_end = worst_end
            .max(t.eval(0.0).unwrap().distance(p_s))
            .max(t.eval(1.0).unwrap().distance(p_e));
    }
    let law_ok = worst_law <= 1e-9 && worst_end <= 1e-12;

    let (p_v, p_s, p_e) = (Vec3::ZERO, Vec3::new(2., 0., 0.), Vec3::new(0., 2., 0.));
    let t = make_trajectory(p_s, p_e, p_v).unwrap();
    let floor = p_s.distance(p_v).min(p_e.distance(p_s)).min(p_v.distance(p_e)) * (1.0 - 1e-6);
    let min = (0..=1000)
        .map(|i| t.eval(i as f64 * 1e-3).unwrap().distance(p_v))
        .fold(f64::INFINITY, f64::min);
    let clear = min >= floor;
    outcome(
        law_ok && clear,
        format!(
            "control-distance error {worst_law:.1e} (tol 1e-9), endpoint error {worst_end:.1e} (tol 1e-12); \
             clearance min {min:.6} vs floor {floor:.6} {}",
            if clear { "ok" } else { "VIOLATED" }
        ),
    )
}

fn circle_count_trend() -> Outcome {
    let params = LayoutParams::default();
    let (mut e3, mut e2, mut worst) = (0.0, 0.0, i64::MIN);
    for seed in 0..100u64 {
        let preset = if seed % 2 == 0 { Preset::Grid } else { Preset::Scatter };
        let scene = generate_scene(&SceneSpec::new(seed, 30, preset)).unwrap();
        let labels = labels_for_objects(&scene.objects);
        let count = |m| {
            layout_for(m, &labels, &scene.objects, &view(), &Projection::default(), &params)
                .unwrap()
                .circle_count()
        };
        let (a, b) = (count(Method::Ec3), count(Method::Ec2));
        e3 += a as f64;
        e2 += b as f64;
        worst = worst.max(a as i64 - b as i64);
    }
    let (e3, e2) = (e3 / 100.0, e2 / 100.0);
    let margin = 1.0 - e3 / e2;
    outcome(
        e3 < e2 && margin >= 0.15 && worst <= 1,
        format!(
            "mean circles ec3 {e3:.2} vs ec2 {e2:.2} ({:.1}% {}, want >= 15% fewer); worst per-seed excess {worst} (floor 1)",
            margin.abs() * 100.0,
            if margin >= 0.0 { "fewer" } else { "more" }
        ),
    )
}

fn rotation_trend() -> Outcome {
    let start = Instant::now();
    let scene = generate_scene(&SceneSpec::new(0, 60, Preset::Scatter)).unwrap();
    let cfg = CompareConfig::new(
        SceneSource::Fixed { scene },
        vec![Method::Ec1, Method::Ec2, Method::Ec3],
        100,
        0,
    );
    let report = compare_methods(&cfg).unwrap();
    let rot = |m: Method| report.summaries.iter().find(|s| s.method == m).unwrap().rotation_mean;
    let (r1, r2, r3) = (rot(Method::Ec1), rot(Method::Ec2), rot(Method::Ec3));
    let rel = (r3 - r2) / r2;
    let elapsed = start.elapsed();
    outcome(
        r3 < r1 && rel.abs() <= 0.10 && elapsed < Duration::from_secs(300),
        format!("mean rotation ec1 {r1:.2}, ec2 {r2:.2}, ec3 {r3:.2} deg; ec3 vs ec2 {:+.1}%; {elapsed:.2?}", rel * 100.0),
    )
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("circlabel-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn determinism() -> Outcome {
    let cfg = CompareConfig::new(
        SceneSource::Generated {
            n_objects: 40,
            preset: Preset::Scatter,
            skew: 0.0,
        },
        vec![Method::Ec1, Method::Ec2, Method::Ec3],
        12,
        3,
    );
    let (a, b) = (scratch_dir("a"), scratch_dir("b"));
    write_report(&a, &compare_methods(&cfg).unwrap()).unwrap();
    write_report(&b, &compare_methods(&cfg).unwrap()).unwrap();
    let files_equal = ["trials.jsonl", "summary.csv", "summary.json"]
        .iter()
        .all(|f| std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap());
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);

    let scene = generate_scene(&SceneSpec::new(1, 25, Preset::Grid)).unwrap();
    let line = |m: ClientMessage| serde_json::to_string(&Envelope::new(m)).unwrap();
    let mut lines = vec![
        line(ClientMessage::Hello),
        line(ClientMessage::LoadScene { scene }),
        line(ClientMessage::StartTrial {
            target_id: ObjectId(0),
            condition: Method::Ec3,
        }),
        line(ClientMessage::Button { kind: ButtonKind::Start }),
        "not json".to_string(),
    ];
    for i in 1..=240 {
        let t = i as f64 / 60.0;
        lines.push(line(ClientMessage::Gaze {
            t,
            x: (t * 2.0).cos() * t.min(1.2),
            y: (t * 2.0).sin() * t.min(1.2),
        }));
    }
    let run = || replay(PipelineConfig::default(), 60.0, None, lines.iter().map(String::as_str));
    let (r1, r2) = (run(), run());
    let snapshots = r1.iter().filter(|l| l.contains(r#""type":"snapshot""#)).count();
    outcome(
        files_equal && r1 == r2 && snapshots > 0,
        format!("simulate outputs identical: {files_equal}; protocol replay identical: {} ({snapshots} snapshots)", r1 == r2),
    )
}

fn dwell_boundary() -> Outcome {
    const DT: f64 = 1.0 / 60.0;
    // 24 ticks after entry = 400 ms fires on the last one.
    let mut d = DwellState::default();
    d.update_hit(Some('c'), DT);
    let fired: Vec<usize> = (1..=30).filter(|_| d.update_hit(Some('c'), DT).is_some()).collect();
    let fires_400 = fired == vec![24];

    // 23 ticks plus 16 ms = 399 ms does not fire.
    let mut d = DwellState::default();
    d.update_hit(Some('c'), DT);
    let mut early = (0..23).any(|_| d.update_hit(Some('c'), DT).is_some());
    early |= d.update_hit(Some('c'), 0.399 - 23.0 * DT).is_some();
    let silent_399 = !early && (d.accumulated - 0.399).abs() < 1e-12;

    // Leaving the region resets; a fresh 23 ticks do not fire either.
    d.update_hit(None, DT);
    let reset = d.accumulated == 0.0;
    d.update_hit(Some('c'), DT);
    let refire = (0..23).any(|_| d.update_hit(Some('c'), DT).is_some());

    // Same boundary through the pipeline at 60 Hz.
    let scene = Scene::new(
        vec![SceneObject {
            id: ObjectId(0),
            name: "cup".into(),
            position: Vec3::new(0.0, 0.0, -3.0),
        }],
        Spawn::default(),
    )
    .unwrap();
    let mut p = Pipeline::new(&scene, PipelineConfig::default()).unwrap();
    p.step(&InputEvent::Button { kind: ButtonKind::Start }).unwrap();
    let at = p.first_level().unwrap().position('c').unwrap();
    let mut ticks_to_select = None;
    for i in 0..=30 {
        p.step(&InputEvent::Gaze { t: i as f64 * DT, point: at }).unwrap();
        let ev = p.step(&InputEvent::Tick { dt: DT }).unwrap();
        if ev.iter().any(|e| matches!(e, PipelineEvent::LetterSelected { .. })) {
            ticks_to_select = Some(i);
            break;
        }
    }
    let pipeline_ok = ticks_to_select == Some(24) && p.phase() == Phase::SecondLevel;

    outcome(
        fires_400 && silent_399 && reset && !refire && pipeline_ok,
        format!(
            "400 ms fires: {fires_400}; 399 ms silent: {silent_399}; exit resets: {}; pipeline selects on tick {:?}",
            reset && !refire,
            ticks_to_select
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("layout invariants", layout_invariants),
        ("sorted subsequence oracle", lis_oracle),
        ("candidate and pruning oracles", candidate_and_pruning_oracles),
        ("alignment and speed update", speed_checks),
        ("trajectory construction", trajectory_construction),
        ("circle-count trend", circle_count_trend),
        ("rotation trend", rotation_trend),
        ("determinism", determinism),
        ("dwell boundary", dwell_boundary),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
