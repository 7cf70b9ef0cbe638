//! Acceptance suite: ten criteria, one PASS/FAIL line each. Runs as a plain
//! binary so the lines always show up in `cargo test` output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use symspace::campaign::{
    self, CampaignConfig, CheckResult, SimonsDetails, Status, SubmersionConfig, VerificationReport,
};
use symspace::lie::{build_so, build_sp, build_su, AlgebraVector, LieAlgebra};
use symspace::product::{self, ProductSpace};
use symspace::sampling::{gaussian_matrix, rng_for, sample_seed, FrameSearch};
use symspace::submersion::{self, FibrationKind, FibrationModel};
use symspace::symmetric::{build_cpn_pair, build_hpn_pair, build_sphere_pair};
use symspace::triple;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check<'a>(checks: &'a [CheckResult], name: &str) -> &'a CheckResult {
    checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("report has no check named {name}"))
}

// 1 ---------------------------------------------------------------------

fn algebra_soundness() -> Outcome {
    let mut algebras: Vec<(String, LieAlgebra)> = Vec::new();
    for n in 3..=8 {
        algebras.push((format!("so({n})"), build_so(n).map_err(|e| e.to_string())?));
    }
    for n in 2..=4 {
        algebras.push((format!("su({n})"), build_su(n).map_err(|e| e.to_string())?));
    }
    for n in 1..=2 {
        algebras.push((format!("sp({n})"), build_sp(n).map_err(|e| e.to_string())?));
    }
    let (mut worst_jac, mut worst_inv) = (0.0f64, 0.0f64);
    for (name, g) in &algebras {
        let jac = g.jacobi_residual();
        ensure(jac <= 1e-10, || {
            format!("{name}: Jacobi residual {jac:.3e}")
        })?;
        let eig = g.killing_eigenvalues();
        ensure(eig.iter().all(|e| *e < 0.0), || {
            format!("{name}: Killing form not negative definite")
        })?;
        let mut rng = rng_for(0x51);
        for _ in 0..1000 {
            let c = gaussian_matrix(&mut rng, g.dim(), 3);
            let v = |j: usize| AlgebraVector::new(c.column(j).iter().copied().collect());
            let r = g
                .invariance_residual(&v(0), &v(1), &v(2))
                .map_err(|e| e.to_string())?;
            ensure(r <= 1e-9, || {
                format!("{name}: ad-invariance residual {r:.3e}")
            })?;
            worst_inv = worst_inv.max(r);
        }
        worst_jac = worst_jac.max(jac);
    }
    Ok(format!(
        "{} algebras, max Jacobi {worst_jac:.1e}, max ad-invariance {worst_inv:.1e}",
        algebras.len()
    ))
}

// 2 ---------------------------------------------------------------------

fn sphere_curvature() -> Outcome {
    let search = FrameSearch::default();
    let mut worst = 0.0f64;
    for p in 2..=6 {
        let s = build_sphere_pair(p).map_err(|e| e.to_string())?;
        let ric = (s.ricci() - DMatrix::identity(p, p) * 0.5).amax();
        ensure(ric <= 1e-8, || format!("S^{p}: Ricci deviation {ric:.3e}"))?;
        let scal = (s.scalar_curvature() - p as f64 / 2.0).abs();
        ensure(scal <= 1e-8, || {
            format!("S^{p}: scalar deviation {scal:.3e}")
        })?;
        let ext = s.sec_extrema(&search).map_err(|e| e.to_string())?;
        let spread = ext.max - ext.min;
        ensure(spread <= 1e-6, || {
            format!("S^{p}: sectional spread {spread:.3e}")
        })?;
        let expected = 1.0 / (2.0 * (p as f64 - 1.0));
        let dev = (ext.max - expected).abs();
        ensure(dev <= 1e-4, || {
            format!("S^{p}: max sec {} vs {expected}", ext.max)
        })?;
        worst = worst.max(dev);
    }
    Ok(format!("S^2..S^6, max |sec - 1/(2(p-1))| = {worst:.1e}"))
}

// 3 ---------------------------------------------------------------------

fn rank_one() -> Outcome {
    let search = FrameSearch::default();
    let mut pairs = Vec::new();
    for p in 2..=6 {
        pairs.push(build_sphere_pair(p).map_err(|e| e.to_string())?);
    }
    pairs.push(build_cpn_pair(1).map_err(|e| e.to_string())?);
    pairs.push(build_cpn_pair(2).map_err(|e| e.to_string())?);
    pairs.push(build_hpn_pair(1).map_err(|e| e.to_string())?);
    let mut weakest = f64::INFINITY;
    for pair in &pairs {
        let cert = pair.is_rank_one(&search).map_err(|e| e.to_string())?;
        ensure(cert.rank_one, || {
            format!(
                "{} not certified rank one (min {:.3e})",
                pair.name(),
                cert.min_bracket_sq
            )
        })?;
        weakest = weakest.min(cert.min_bracket_sq);
    }
    let s2 = build_sphere_pair(2).map_err(|e| e.to_string())?;
    let product = ProductSpace::new(s2.clone(), s2, &search).map_err(|e| e.to_string())?;
    let cert = product
        .pair()
        .is_rank_one(&search)
        .map_err(|e| e.to_string())?;
    ensure(!cert.rank_one, || {
        format!(
            "S^2xS^2 reported rank one (min {:.3e})",
            cert.min_bracket_sq
        )
    })?;
    Ok(format!(
        "{} rank-one pairs (weakest min sec {weakest:.3e}); S^2xS^2 flat plane at {:.1e}",
        pairs.len(),
        cert.min_bracket_sq
    ))
}

// 4-6 -------------------------------------------------------------------

const SPACES: [&str; 2] = ["sphere:3xsphere:3", "sphere:4xsphere:3"];

fn campaign_config(
    spec: &str,
    samples: usize,
    seed: u64,
    lambda_max: Option<f64>,
) -> CampaignConfig {
    CampaignConfig {
        samples,
        seed,
        lambda_max,
        record_samples: false,
        ..CampaignConfig::new(spec.parse().expect("valid space"))
    }
}

fn symmetry_lemma() -> Outcome {
    let mut worst = 0.0f64;
    for spec in SPACES {
        // wider λ range than the main campaign; the identity holds for any germ
        let report = campaign::run_simons(&campaign_config(spec, 1000, 4, Some(0.9)))
            .map_err(|e| e.to_string())?;
        for name in ["symmetry_term1_term2", "symmetry_term3_term4"] {
            let c = check(&report.checks, name);
            ensure(c.worst_margin >= -1e-9, || {
                format!("{spec} {name}: {:.3e}", -c.worst_margin)
            })?;
            worst = worst.max(-c.worst_margin);
        }
    }
    Ok(format!(
        "2 x 1000 germs, max |<(2)-(1),A>|, |<(4)-(3),A>| = {worst:.1e}"
    ))
}

fn main_campaigns() -> Result<Vec<VerificationReport<SimonsDetails>>, String> {
    SPACES
        .iter()
        .map(|spec| {
            campaign::run_simons(&campaign_config(spec, 10_000, 2024, None))
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn main_inequality(reports: &[VerificationReport<SimonsDetails>]) -> Outcome {
    let mut parts = Vec::new();
    for (spec, r) in SPACES.iter().zip(reports) {
        let c = check(&r.checks, "main_inequality");
        ensure(c.n_samples == 10_000, || {
            format!("{spec}: {} samples", c.n_samples)
        })?;
        ensure(c.worst_margin >= -1e-9, || {
            format!(
                "{spec}: margin {:.3e} at seed {:?}",
                c.worst_margin, c.argmin_seed
            )
        })?;
        let route = check(&r.checks, "route_agreement");
        ensure(route.passed, || format!("{spec}: route disagreement"))?;
        parts.push(format!(
            "{spec} min margin {:.2e} (lambda_tg {:.4})",
            c.worst_margin, r.details.lambda_max
        ));
    }
    Ok(parts.join("; "))
}

fn lemma_campaigns(reports: &[VerificationReport<SimonsDetails>]) -> Outcome {
    let mut parts = Vec::new();
    for (spec, r) in SPACES.iter().zip(reports) {
        for name in ["L1", "L3", "L6"] {
            let c = check(&r.checks, name);
            ensure(c.worst_margin >= -1e-9, || {
                format!("{spec} {name}: margin {:.3e}", c.worst_margin)
            })?;
        }
        for name in ["L5", "L5-printed"] {
            let c = check(&r.checks, name);
            let d = c
                .distribution
                .as_ref()
                .expect("finding checks carry a distribution");
            println!(
                "      finding {spec} {name}: min {:.3e} q05 {:.3e} median {:.3e} q95 {:.3e} max {:.3e} violations {}",
                d.min, d.q05, d.median, d.q95, d.max, d.below_tol
            );
            parts.push(format!(
                "{spec} {name} {}",
                if c.passed { "holds" } else { "violated" }
            ));
        }
    }
    Ok(format!("L1/L3/L6 hold; {}", parts.join(", ")))
}

// 7 ---------------------------------------------------------------------

fn constant_arithmetic() -> Outcome {
    let c = product::constant_c(2, 3, 0.0, 0.0).map_err(|e| e.to_string())?;
    ensure(c == 6.0, || format!("C(p=2, N=3, K=0) = {c}"))?;
    let tg = product::lambda_tg(0.5, 2, c).map_err(|e| e.to_string())?;
    ensure(tg == 0.5, || format!("lambda_tg = {tg}"))?;
    let lk = product::lambda_k(0.5, 2, c, 0.0).map_err(|e| e.to_string())?;
    ensure(lk == 0.5, || format!("lambda_K = {lk}"))?;

    let s2 = build_sphere_pair(2).map_err(|e| e.to_string())?;
    let space =
        ProductSpace::new(s2.clone(), s2, &FrameSearch::default()).map_err(|e| e.to_string())?;
    let k = space.constants();
    let formula = product::constant_c(2, 4, k.k1, k.k2).map_err(|e| e.to_string())?;
    ensure((k.c - formula).abs() <= 1e-9, || {
        format!("S^2xS^2: C {} vs formula {formula}", k.c)
    })?;
    // K² = 1/2 on both factors: (32 + 16 + 8)·1 + (6 + 8) = 70
    ensure((k.c - 70.0).abs() <= 1e-9, || {
        format!("S^2xS^2: C = {}", k.c)
    })?;
    let tg = ((0.5 + 1.0) / 70.0f64).sqrt();
    ensure((k.lambda_tg - tg).abs() <= 1e-9, || {
        format!("S^2xS^2: lambda_tg {}", k.lambda_tg)
    })?;
    let lk = ((0.5 + 1.0) / (70.0 + 2.0 * 0.5f64)).sqrt();
    ensure((k.lambda_k - lk).abs() <= 1e-9, || {
        format!("S^2xS^2: lambda_K {}", k.lambda_k)
    })?;
    Ok(format!(
        "C = 6 exact; S^2xS^2 C = {:.12}, lambda_tg = {:.12}",
        k.c, k.lambda_tg
    ))
}

// 8 ---------------------------------------------------------------------

fn triple_systems() -> Outcome {
    let mut flagged = 0;
    let mut injective = 0;
    for spec in ["sphere:2xsphere:2", "sphere:3xsphere:3", "sphere:3xcpn:2"] {
        let cfg = CampaignConfig {
            samples: 100,
            seed: 8,
            ..CampaignConfig::new(spec.parse().expect("valid space"))
        };
        let r = campaign::run_triple_suite(&cfg).map_err(|e| e.to_string())?;
        ensure(r.status == Status::Pass, || {
            format!("{spec}: {:?}", r.checks)
        })?;
        for inst in &r.details.instances {
            if inst.seed.is_none() {
                ensure(inst.report.residual <= 1e-10, || {
                    format!(
                        "{spec} {}: residual {:.3e}",
                        inst.name, inst.report.residual
                    )
                })?;
            } else if inst.report.residual <= 1e-3 {
                ensure(
                    inst.seed
                        .is_some_and(|s| r.details.flagged_random.contains(&s)),
                    || format!("{spec} {}: small residual but not flagged", inst.name),
                )?;
            }
            if let Some(inj) = inst.report.injectivity.as_ref().filter(|i| i.applicable) {
                ensure(inj.injective == Some(true), || {
                    format!("{spec} {}: pi1 not injective", inst.name)
                })?;
                injective += 1;
            }
        }
        ensure(
            spec != "sphere:2xsphere:2" || r.details.instances.iter().any(|i| i.name == "diagonal"),
            || "S^2xS^2 suite lacks the diagonal".into(),
        )?;
        flagged += r.details.flagged_random.len();
    }
    // random subspaces of CP^2 on its own
    let cp2 = build_cpn_pair(2).map_err(|e| e.to_string())?;
    let mut cp2_min = f64::INFINITY;
    for i in 0..100 {
        let sub = triple::random_subspace(&cp2, 3, sample_seed(8, i)).map_err(|e| e.to_string())?;
        cp2_min = cp2_min.min(triple::triple_residual(&cp2, &sub));
    }
    ensure(cp2_min > 1e-3, || {
        format!("a random CP^2 subspace has residual {cp2_min:.3e}")
    })?;
    Ok(format!(
        "structured instances pass; {flagged} random product subspaces flagged; {injective} injectivity certificates; CP^2 random min residual {cp2_min:.3}"
    ))
}

// 9 ---------------------------------------------------------------------

fn submersion_constants() -> Outcome {
    let search = FrameSearch::new(128, 200, 0);
    let mut lines = Vec::new();
    for (kind, ns) in [(FibrationKind::Cpn, 1..=3), (FibrationKind::Hpn, 1..=2)] {
        for n in ns {
            let model = FibrationModel::new(kind, n).map_err(|e| e.to_string())?;
            let s = submersion::summarize(&model, &search).map_err(|e| e.to_string())?;
            let nf = n as f64;
            let (r, tau, thr) = match kind {
                FibrationKind::Cpn => (0.0, 0.5, nf + 1.0),
                FibrationKind::Hpn => (
                    3.0 / (4.0 * nf + 2.0),
                    3.0 * nf / (2.0 * nf + 1.0),
                    4.0 * nf * (nf + 2.0) / (2.0 * nf + 1.0),
                ),
            };
            ensure((s.r - r).abs() <= 1e-12, || {
                format!("{kind:?} {n}: r = {}", s.r)
            })?;
            ensure((s.r_direct - r).abs() <= 1e-8, || {
                format!("{kind:?} {n}: direct r = {}", s.r_direct)
            })?;
            ensure((s.tau_bound - tau).abs() <= 1e-12, || {
                format!("{kind:?} {n}: tau = {}", s.tau_bound)
            })?;
            let k_bar = (model.total.m_dim() as f64) / 2.0;
            ensure((k_bar + tau - r - thr).abs() <= 1e-9, || {
                format!("{kind:?} {n}: K̄ + τ − r ≠ {thr}")
            })?;
            ensure((s.threshold_closed_form - thr).abs() <= 1e-9, || {
                format!("{kind:?} {n}: threshold {}", s.threshold_closed_form)
            })?;
            ensure((s.k_base_threshold - thr).abs() <= 1e-9, || {
                format!("{kind:?} {n}: derived threshold {}", s.k_base_threshold)
            })?;
            lines.push(format!("{kind:?}{n}"));
        }
    }
    let fibred = campaign::run_submersion(&SubmersionConfig {
        samples: 500,
        frame_samples: 64,
        ..SubmersionConfig::new(FibrationKind::Cpn, 2)
    })
    .map_err(|e| e.to_string())?;
    ensure(fibred.status == Status::Pass, || {
        format!("fibred germs: {:?}", fibred.checks)
    })?;
    Ok(format!(
        "{} models; 500 fibred germs over S^5xS^2, max sampled tau {:.4}",
        lines.len(),
        fibred.details.tau_sampled_max.unwrap_or(f64::NAN)
    ))
}

// 10 --------------------------------------------------------------------

fn determinism() -> Outcome {
    let cfg = CampaignConfig {
        samples: 300,
        seed: 99,
        frame_samples: 64,
        ..CampaignConfig::new("sphere:4xsphere:3".parse().expect("valid space"))
    };
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let pairs: Vec<(String, String, String)> = vec![
        {
            let a = campaign::run_simons(&cfg).and_then(|r| r.payload_json());
            let b = serial
                .install(|| campaign::run_simons(&cfg))
                .and_then(|r| r.payload_json());
            (
                "simons-verify".into(),
                a.map_err(|e| e.to_string())?,
                b.map_err(|e| e.to_string())?,
            )
        },
        {
            let a = campaign::run_triple_suite(&cfg).and_then(|r| r.payload_json());
            let b = serial
                .install(|| campaign::run_triple_suite(&cfg))
                .and_then(|r| r.payload_json());
            (
                "triple-check".into(),
                a.map_err(|e| e.to_string())?,
                b.map_err(|e| e.to_string())?,
            )
        },
        {
            let sc = SubmersionConfig {
                samples: 200,
                seed: 99,
                frame_samples: 64,
                ..SubmersionConfig::new(FibrationKind::Cpn, 1)
            };
            let a = campaign::run_submersion(&sc).and_then(|r| r.payload_json());
            let b = serial
                .install(|| campaign::run_submersion(&sc))
                .and_then(|r| r.payload_json());
            (
                "submersion".into(),
                a.map_err(|e| e.to_string())?,
                b.map_err(|e| e.to_string())?,
            )
        },
    ];
    let mut bytes = 0;
    for (name, a, b) in &pairs {
        ensure(a == b, || format!("{name}: payloads differ between runs"))?;
        bytes += a.len();
    }
    Ok(format!(
        "3 campaigns identical across thread counts ({bytes} payload bytes)"
    ))
}

// -----------------------------------------------------------------------

struct Line {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    elapsed: Duration,
    outcome: Outcome,
}

fn timed(id: usize, name: &'static str, limit_s: Option<u64>, f: impl FnOnce() -> Outcome) -> Line {
    let started = Instant::now();
    let outcome = f();
    Line {
        id,
        name,
        limit: limit_s.map(Duration::from_secs),
        elapsed: started.elapsed(),
        outcome,
    }
}

fn main() -> ExitCode {
    let mut lines = vec![
        timed(1, "algebra soundness", Some(5), algebra_soundness),
        timed(
            2,
            "sphere curvature fixed points",
            Some(30),
            sphere_curvature,
        ),
        timed(3, "rank-one certification", Some(60), rank_one),
        timed(4, "term symmetry", Some(30), symmetry_lemma),
    ];
    let started = Instant::now();
    let reports = main_campaigns();
    let campaign_time = started.elapsed();
    let (five, six) = match &reports {
        Ok(r) => (main_inequality(r), lemma_campaigns(r)),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    let limit = Some(Duration::from_secs(300));
    lines.push(Line {
        id: 5,
        name: "main inequality",
        limit,
        elapsed: campaign_time,
        outcome: five,
    });
    // criterion 6 reads the same germ population
    lines.push(Line {
        id: 6,
        name: "lemma campaigns",
        limit,
        elapsed: campaign_time,
        outcome: six,
    });
    lines.push(timed(7, "constant arithmetic", None, constant_arithmetic));
    lines.push(timed(8, "triple systems", Some(60), triple_systems));
    lines.push(timed(
        9,
        "submersion constants",
        Some(30),
        submersion_constants,
    ));
    lines.push(timed(10, "determinism", None, determinism));

    let mut failed = 0;
    for l in &lines {
        let over = l.limit.is_some_and(|lim| l.elapsed > lim);
        let verdict = if l.outcome.is_ok() && !over {
            "PASS"
        } else {
            "FAIL"
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        let limit = l
            .limit
            .map_or(String::new(), |d| format!(" / {}s", d.as_secs()));
        let msg = match &l.outcome {
            Ok(m) => m.clone(),
            Err(e) => e.clone(),
        };
        let over = if over { " [over time limit]" } else { "" };
        println!(
            "[{verdict}] {:>2}. {:<30} {:>7.2}s{limit}{over}  {msg}",
            l.id,
            l.name,
            l.elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        lines.len() - failed,
        lines.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
