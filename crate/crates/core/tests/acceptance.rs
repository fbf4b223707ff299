//! Acceptance criteria, one test per criterion. Each check prints a PASS/FAIL line with the
//! measured value and the tolerance it is held to.

mod common;

use common::{line, mat, pipeline};
use hbcs::certify::{self, Condition, Outcome};
use hbcs::linalg::{self, c, real, CMat, C64};
use hbcs::measure::DEFAULT_MERGE_TOL;
use hbcs::simulate::{self, InputSignal, SineTerm};
use hbcs::spectral;
use hbcs::system;
use hbcs::transfer;
use proptest::test_runner::TestRunner;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn finish(criterion: &str, results: &[bool]) {
    let ok = results.iter().all(|&r| r);
    println!("{} criterion {criterion}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed; see the FAIL lines above");
}

fn exp(z: C64) -> C64 {
    z.exp()
}

#[test]
fn criterion_1_transfer_closed_forms() {
    let mut r = Vec::new();
    let b = common::fixture("B");
    let g = transfer::transfer_eval(&b, real(1.0)).unwrap().g[(0, 0)];
    let err = (g - real(1.0 / (std::f64::consts::E - 1.0))).norm();
    r.push(line("fixture B |G(1) - 1/(e-1)| <= 1e-9", err <= 1e-9, format!("{err:.3e}")));

    let points = [real(1.0), c(1.0, 2.0), c(3.0, -1.0)];
    let sys_c = common::fixture("C");
    for &s in &points {
        let (e1, e2) = (exp(-s), exp(-2.0 * s));
        let exact = CMat::from_row_slice(2, 2, &[-e2 - 2.0 * e1, -e2, e2, e2 - 2.0 * e1]) * real(0.5);
        let g = transfer::transfer_eval(&sys_c, s).unwrap().g;
        let err = linalg::max_abs_diff(&g, &exact);
        r.push(line(&format!("fixture C G({s}) entrywise <= 1e-9"), err <= 1e-9, format!("{err:.3e}")));
    }
    let sys_f = common::fixture("F");
    for &s in &points {
        let (h, f) = (exp(s / 2.0), exp(s));
        let den = real(1.0) - 2.0 * f;
        let exact =
            CMat::from_row_slice(2, 2, &[(real(1.0) - 2.0 * h) / den, real(1.0) / den, real(1.0) / den, -(real(1.0) + 2.0 * h) / den]);
        let g = transfer::transfer_eval(&sys_f, s).unwrap().g;
        let err = linalg::max_abs_diff(&g, &exact) / linalg::max_abs(&exact).max(1.0);
        r.push(line(&format!("fixture F G({s}) entrywise <= 1e-9"), err <= 1e-9, format!("{err:.3e}")));
    }
    finish("1 (transfer closed forms)", &r);
}

#[test]
fn criterion_2_decomposition_round_trips() {
    let mut r = Vec::new();
    let expected: [(&str, CMat, &str); 5] = [
        ("B", mat(1, 1, &[1.0]), "derived"),
        ("C", mat(2, 2, &[0.5, 0.5, -0.5, -0.5]), "derived"),
        ("E", mat(2, 2, &[0.0, 0.5, 1.0, 0.0]), "printed, k = 3"),
        ("F", mat(2, 2, &[-0.5, -0.5, -0.5, 0.5]), "printed"),
        ("H", mat(2, 2, &[-0.5, -0.5, 0.5, 0.5]), "printed"),
    ];
    for (name, m_expected, source) in expected {
        let (sys, diag, dec_d) = pipeline(name);
        let sig = spectral::signature_projections(&sys.p1).unwrap();
        let dec = spectral::decompose_boundary(&sys.wb, &sig, &sys.p1).unwrap();
        let jl = linalg::max_abs_diff(&dec.reconstruct_from_jl(&sig), &sys.wb);
        let km = dec.reconstruct_from_km(&sig).map(|w| linalg::max_abs_diff(&w, &sys.wb));
        r.push(line(&format!("fixture {name} WB from (J, L) <= 1e-12"), jl <= 1e-12, format!("{jl:.3e}")));
        r.push(line(
            &format!("fixture {name} WB from (K, M) <= 1e-12"),
            km.is_some_and(|x| x <= 1e-12),
            format!("{:.3e}", km.unwrap_or(f64::NAN)),
        ));
        let sig_d = diag.signature();
        let jl_d = linalg::max_abs_diff(&dec_d.reconstruct_from_jl(&sig_d), &diag.wbd);
        let km_d = dec_d.reconstruct_from_km(&sig_d).map(|w| linalg::max_abs_diff(&w, &diag.wbd));
        r.push(line(
            &format!("fixture {name} diagonal WB^D round trips <= 1e-12"),
            jl_d <= 1e-12 && km_d.is_some_and(|x| x <= 1e-12),
            format!("(J, L) {jl_d:.3e}, (K, M) {:.3e}", km_d.unwrap_or(f64::NAN)),
        ));
        let m = dec_d.m().unwrap();
        let err = linalg::max_abs_diff(m, &m_expected);
        r.push(line(&format!("fixture {name} M ({source}) entrywise <= 1e-12"), err <= 1e-12, format!("{err:.3e}")));
    }
    finish("2 (decomposition round trips)", &r);
}

#[test]
fn criterion_3_contraction_identity() {
    let mut r = Vec::new();
    for name in hbcs::fixtures::NAMES {
        let sys = common::fixture(name);
        let sig = spectral::signature_projections(&sys.p1).unwrap();
        let dec = spectral::decompose_boundary(&sys.wb, &sig, &sys.p1).unwrap();
        let (Some(k), Some(m)) = (dec.k.as_ref(), dec.m.as_ref()) else {
            println!("skip fixture {name}: no (K, M) decomposition");
            continue;
        };
        let n = sys.n;
        let rhs = k * (CMat::identity(n, n) - m * m.adjoint()) * k.adjoint();
        let (form, _) = system::contraction_form(&sys).unwrap();
        let err = linalg::max_abs_diff(&form, &rhs);
        r.push(line(&format!("fixture {name} contraction form = K(I - MM*)K* <= 1e-10"), err <= 1e-10, format!("{err:.3e}")));
    }
    finish("3 (contraction identity)", &r);
}

#[test]
fn criterion_4_certificates() {
    let mut r = Vec::new();
    let e = certify::certify(&common::fixture("E"), 12).unwrap();
    let rho = e.cond2.as_ref().map(|c| c.rho_abs).unwrap_or(f64::NAN);
    let err = (rho - std::f64::consts::FRAC_1_SQRT_2).abs();
    r.push(line(
        "fixture E certified by condition 2, |rho(|M|) - 1/sqrt 2| <= 1e-12",
        e.outcome == Outcome::CertifiedBibo && e.triggered_condition == Condition::AbsSeries && err <= 1e-12,
        format!("{} via {}, rho error {err:.3e}", e.outcome.as_str(), e.triggered_condition.as_str()),
    ));

    let f = certify::certify(&common::fixture("F"), 12).unwrap();
    let c3 = f.cond3.as_ref();
    let k0 = c3.and_then(|c| c.k0);
    let tv_err = c3
        .and_then(|c| c.table.get(1))
        .map(|row| (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).fold(0.0f64, |acc, (i, j)| {
            let want = if i == j { 0.5 } else { 0.0 };
            acc.max((row.tv[(i, j)] - want).abs())
        }))
        .unwrap_or(f64::NAN);
    r.push(line(
        "fixture F certified by condition 3 with k0 = 2, TV((MU)^2) = diag(1/2) +- 1e-12",
        f.outcome == Outcome::CertifiedBibo && f.triggered_condition == Condition::K0 && k0 == Some(2) && tv_err <= 1e-12,
        format!("{} via {}, k0 = {k0:?}, TV error {tv_err:.3e}", f.outcome.as_str(), f.triggered_condition.as_str()),
    ));

    let h = certify::certify(&common::fixture("H"), 12).unwrap();
    let table = h.cond3.as_ref().map(|c| c.table.clone()).unwrap_or_default();
    let worst = table.iter().flat_map(|row| row.row_sums.iter()).fold(0.0f64, |acc, s| acc.max((s - 1.0).abs()));
    r.push(line(
        "fixture H inconclusive, row sums 1 +- 1e-12 for k <= 12",
        h.outcome == Outcome::Inconclusive && table.len() == 12 && worst <= 1e-12,
        format!("{}, {} rows, max |row sum - 1| {worst:.3e}", h.outcome.as_str(), table.len()),
    ));

    let d = certify::certify(&common::fixture("D"), 12).unwrap();
    r.push(line("fixture D inconclusive", d.outcome == Outcome::Inconclusive, d.outcome.as_str()));
    finish("4 (certificates)", &r);
}

#[test]
fn criterion_5_impulse_response() {
    let mut r = Vec::new();
    let (_, diag, dec) = pipeline("C");
    let imp = certify::impulse_response(&diag, &dec, 8).unwrap();
    let atoms = imp.measure.merged_atoms(DEFAULT_MERGE_TOL);
    let exact = [
        (1.0, mat(2, 2, &[-1.0, 0.0, 0.0, -1.0])),
        (2.0, mat(2, 2, &[-0.5, -0.5, 0.5, 0.5])),
    ];
    let same = atoms.len() == exact.len()
        && atoms.iter().zip(&exact).all(|((l, w), (le, we))| l == le && w == we);
    r.push(line("fixture C impulse measure is exactly the printed atoms at 1 and 2", same, format!("{atoms:?}")));
    let tv = imp.measure.total_variation(DEFAULT_MERGE_TOL);
    let want = hbcs::linalg::RMat::from_row_slice(2, 2, &[1.5, 0.5, 0.5, 1.5]);
    r.push(line("fixture C TV = [[3/2, 1/2], [1/2, 3/2]] exactly", tv == want, format!("{tv:?}")));

    let (_, diag, dec) = pipeline("E");
    let imp = certify::impulse_response(&diag, &dec, 40).unwrap();
    let g11: Vec<(f64, f64)> =
        imp.measure.merged_atoms(DEFAULT_MERGE_TOL).into_iter().map(|(l, w)| (l, w[(0, 0)].re)).filter(|(_, w)| *w != 0.0).collect();
    // oracle: 1/(k+1) δ0 − 2/(k²−1) Σ ((k−1)/(k+1))^n δ(2n) with k = 3
    let mut atom_err: f64 = 0.0;
    let mut unexpected = 0;
    for &(loc, w) in &g11 {
        let n = (loc / 2.0).round();
        if (loc - 2.0 * n).abs() > 1e-9 {
            unexpected += 1;
            continue;
        }
        let want = if n == 0.0 { 0.25 } else { -0.25 * 0.5f64.powi(n as i32) };
        atom_err = atom_err.max((w - want).abs());
    }
    r.push(line(
        "fixture E G11 atoms equal -(1/4)(1/2)^n at t = 2n (1/4 at 0) to 1e-12",
        unexpected == 0 && atom_err <= 1e-12 && g11.len() > 10,
        format!("{} atoms, max error {atom_err:.3e}, off-lattice {unexpected}", g11.len()),
    ));
    let tv11 = imp.measure.total_variation(DEFAULT_MERGE_TOL)[(0, 0)];
    let err = (tv11 - 0.5).abs();
    r.push(line("fixture E order-40 G11 TV = 1/2 +- 1e-9", err <= 1e-9, format!("TV {tv11:.12}, error {err:.3e}")));
    finish("5 (impulse response)", &r);
}

/// Integer-time recurrence for fixture D in boundary values `w = (Hx)(1, t)`:
/// `w(t) = −u(t) + W2 (w₁(t − 2), w₂(t − 1))`, `y = (w₁(t − 2), w₂(t − 1))`.
fn fixture_d_oracle(t_max: usize) -> Vec<f64> {
    let u2 = |t: usize| -(std::f64::consts::PI * t as f64).cos();
    let mut w1 = vec![0.0; t_max + 1];
    let mut w2 = vec![0.0; t_max + 1];
    for t in 0..=t_max {
        let a1 = if t >= 2 { w1[t - 2] } else { 0.0 };
        let a2 = if t >= 1 { w2[t - 1] } else { 0.0 };
        w1[t] = 0.5 * a1 + 0.5 * a2;
        w2[t] = -u2(t) - 0.5 * a1 - 0.5 * a2;
    }
    (0..=t_max).map(|t| if t >= 1 { w2[t - 1] } else { 0.0 }).collect()
}

#[test]
fn criterion_6_simulator_witnesses() {
    let mut r = Vec::new();
    let (_, diag, dec) = pipeline("B");
    let dt = 1e-3;
    let trace = simulate::simulate(&diag, &dec, &InputSignal::Constant(vec![1.0]), 5.0, dt).unwrap();
    let y = |i: usize| trace.y[i][0].re;
    let err = (y(2500) - 2.0).abs();
    r.push(line("fixture B y(2.5) = 2 +- 1e-9", err <= 1e-9, format!("y(2.5) = {}", y(2500))));
    let staircase = (0..50).map(|k| 50 + 100 * k).all(|i| (y(i) - trace.times[i].floor()).abs() <= 1e-9);
    r.push(line("fixture B y(t) = floor(t) at 50 non-integer t", staircase, "t = 0.05, 0.15, ..., 4.95"));

    let (_, diag, dec) = pipeline("D");
    let u = InputSignal::Sines(vec![SineTerm { channel: 1, amplitude: -1.0, frequency: 0.5, phase: 0.0 }]);
    let trace = simulate::simulate(&diag, &dec, &u, 30.0, dt).unwrap();
    let y2 = |t: usize| trace.y[t * 1000][1].re;
    let oracle = fixture_d_oracle(30);
    let oracle_err = (1..=30).map(|t| (y2(t) - oracle[t]).abs()).fold(0.0, f64::max);
    println!("info fixture D recurrence oracle y2(1) = {}, y2(2) = {}; simulator vs oracle max {oracle_err:.3e}", oracle[1], oracle[2]);
    let (e1, e2) = ((y2(1) - 2.0 / 3.0).abs(), (y2(2) + 7.0 / 6.0).abs());
    r.push(line(
        "fixture D y2(1) = 2/3 and y2(2) = -7/6 within 1e-6",
        e1 <= 1e-6 && e2 <= 1e-6,
        format!("y2(1) = {}, y2(2) = {}", y2(1), y2(2)),
    ));
    // the input is only pinned down at integers, so growth is checked on the integer grid
    let growth = (1..=30).all(|t| y2(t).abs() >= 0.3 * t as f64 - 1.0);
    r.push(line("fixture D |y2(t)| >= 0.3 t - 1 at integer t up to T = 30", growth, format!("|y2(30)| = {}", y2(30).abs())));
    finish("6 (simulator witnesses)", &r);
}

fn smooth_inputs(n: usize, count: usize, seed: u64) -> Vec<InputSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut terms = Vec::new();
            for channel in 0..n {
                for _ in 0..3 {
                    terms.push(SineTerm {
                        channel,
                        amplitude: rng.gen_range(-0.3..0.3),
                        frequency: rng.gen_range(0.05..1.0),
                        phase: rng.gen_range(0.0..std::f64::consts::TAU),
                    });
                }
            }
            InputSignal::Sines(terms)
        })
        .collect()
}

#[test]
fn criterion_7_oracle_agreement() {
    let mut r = Vec::new();
    for (name, order, t_end) in [("C", 8usize, 10.0), ("E", 40, 20.0)] {
        let (sys, diag, dec) = pipeline(name);
        let imp = certify::impulse_response(&diag, &dec, order).unwrap();
        let tail = imp.require_bound().unwrap().row_bound.iter().copied().fold(0.0, f64::max);
        for (i, u) in smooth_inputs(diag.n, 5, common::SEED).iter().enumerate() {
            let gap = simulate::cross_check_impulse(&diag, &dec, &imp, u, t_end, 1e-3).unwrap();
            r.push(line(
                &format!("fixture {name} input {i}: sup |y_sim - measure * u| <= 1e-6 + tail"),
                gap <= 1e-6 + tail,
                format!("{gap:.3e} (tail {tail:.3e})"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(common::SEED ^ 7);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let s = c(rng.gen_range(1.0..3.0), rng.gen_range(-10.0..10.0));
            let g = transfer::transfer_eval(&sys, s).unwrap().g;
            worst = worst.max(linalg::max_abs_diff(&g, &imp.measure.laplace_eval(s)));
        }
        r.push(line(
            &format!("fixture {name} laplace(truncation) vs G(s) at 10 points within tail"),
            worst <= tail + 1e-9,
            format!("{worst:.3e} (tail {tail:.3e})"),
        ));
    }
    finish("7 (oracle agreement)", &r);
}

#[test]
fn criterion_8_diagonalization() {
    let mut r = Vec::new();
    let sys = common::fixture("G");
    let diag = spectral::diagonalize(&sys, spectral::DEFAULT_GRID_SIZE).unwrap();
    r.push(line(
        "fixture G ||P0^D||_grid <= 1e-8",
        diag.p0d_is_zero && diag.p0d_residual <= 1e-8,
        format!("{:.3e}", diag.p0d_residual),
    ));
    let want = [2f64.ln(), 3f64.ln() / 2.0];
    let err = diag.tau.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.push(line("fixture G delays (ln 2, ln 3 / 2) +- 1e-9", err <= 1e-9, format!("{:?}, error {err:.3e}", diag.tau)));
    r.push(line(
        "fixture G relation residual ||P1 H - S^-1 P1^D H^D S|| <= 1e-10",
        diag.relation_residual <= 1e-10,
        format!("{:.3e}", diag.relation_residual),
    ));
    let hd_err = [0.0, 0.3, 0.71, 1.0]
        .iter()
        .map(|&x| {
            let hd = diag.hd.eval(x).unwrap();
            ((hd[(0, 0)].re - (1.0 + x)).abs()).max((hd[(1, 1)].re - (1.0 + 2.0 * x)).abs())
        })
        .fold(0.0, f64::max);
    r.push(line("fixture G H^D = diag(1 + xi, 1 + 2 xi)", hd_err <= 1e-10, format!("{hd_err:.3e}")));
    finish("8 (diagonalization)", &r);
}

#[test]
fn criterion_9_property_suites() {
    let mut r = Vec::new();
    let mut run = |label: &str, outcome: Result<(), String>| {
        r.push(line(label, outcome.is_ok(), outcome.err().unwrap_or_else(|| "100 cases".into())));
    };
    let mut runner = TestRunner::new(common::config());
    run(
        "signature projection identities",
        runner.run(&common::self_adjoint_invertible(), |p| common::signature_identities(&p)).map_err(|e| e.to_string()),
    );
    let mut runner = TestRunner::new(common::config());
    run(
        "measure algebra associativity and Laplace homomorphism",
        runner.run(&common::measure_triple(), |t| common::measure_algebra(&t)).map_err(|e| e.to_string()),
    );
    let mut runner = TestRunner::new(common::config());
    run(
        "U(it) unitary <= 1e-12",
        runner
            .run(&(common::diagonal_system(), common::sample_points()), |(d, p)| common::u_unitary_on_imaginary_axis(&d, &p))
            .map_err(|e| e.to_string()),
    );
    let mut runner = TestRunner::new(common::config());
    run(
        "||U(s)||_p monotone in Re s on 20 samples",
        runner
            .run(&(common::diagonal_system(), common::sample_points()), |(d, p)| common::u_norm_monotone(&d, &p))
            .map_err(|e| e.to_string()),
    );
    finish("9 (property suites)", &r);
}
