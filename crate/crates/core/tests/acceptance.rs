//! Acceptance criteria; prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cytube::adapted::{dbar_operators, ComplexStructureJet, OperatorFrame};
use cytube::archive::JetArchive;
use cytube::geometry::{parse_metric, parse_vector_field};
use cytube::masolver::{literal_hessian, pivot_check};
use cytube::pipeline::{solve, Solution};
use cytube::verify::{
    certificate_report, dbar_z_residual, j_squared_residual, nijenhuis_residual, psh_check,
    restriction_checks, ricci_residual, Bound, SampleSpec, VerifyOptions,
};
use cytube::{Coeff, ExactComplex as Q, Jet, JetMatrix, Mode, Space};

// Tolerances pinned by the acceptance criteria.
const FLAT_RUNTIME: Duration = Duration::from_secs(60);
const PERTURBED_RUNTIME: Duration = Duration::from_secs(300);
const PERTURBED_G_TOL: f64 = 1e-9;
const PERTURBED_RICCI_TOL: f64 = 1e-8;
const PERTURBED_RESTRICTION_TOL: f64 = 1e-9;
const PERTURBED_PSH_MIN: f64 = 0.5;
const PERTURBED_PSH_RADIUS: f64 = 0.05;
const PERTURBED_PSH_SAMPLES: usize = 100;
const PERTURBED_SLOPE_MIN: f64 = 4.5;
const NIJENHUIS_TOL_BINARY64: f64 = 1e-10;
const STRUCTURE_TOL_BINARY64: f64 = 1e-12;

const FLAT: (&str, &str) = ("g11 = 1; g22 = 1", "X2 = 1");
const CIRCLE: (&str, &str) = ("g11 = 1", "X1 = 1");
const PERTURBED: (&str, &str) = ("g11 = 1 + cos(x1)/10; g22 = 1 + cos(x1)/10", "X2 = 1");

struct Report {
    criterion: usize,
    lines: Vec<(String, bool)>,
    notes: Vec<String>,
}

impl Report {
    fn new(criterion: usize) -> Self {
        Report {
            criterion,
            lines: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, pass: bool) {
        self.lines.push((label.into(), pass));
    }

    /// Reference value printed under the criterion, not part of the verdict.
    fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    /// Print the criterion line and its checks; true if every check passed.
    fn finish(self) -> bool {
        let pass = self.lines.iter().all(|l| l.1);
        println!(
            "{} criterion {}",
            if pass { "PASS" } else { "FAIL" },
            self.criterion
        );
        for (label, ok) in &self.lines {
            println!("    {} {label}", if *ok { "ok  " } else { "FAIL" });
        }
        for n in &self.notes {
            println!("    note {n}");
        }
        pass
    }
}

fn run<C: Coeff>(scenario: (&str, &str), n: usize, order: usize) -> (Solution<C>, Duration) {
    let start = Instant::now();
    let metric = parse_metric(scenario.0, n, order).unwrap();
    let field = parse_vector_field(scenario.1, n, order).unwrap();
    let s = solve(&metric, &field).unwrap();
    (s, start.elapsed())
}

fn q(v: i64) -> Q {
    Q::from_i64(v)
}

fn criterion_1_flat_torus_exact() -> bool {
    let mut r = Report::new(1);
    let start = Instant::now();
    let (s, _) = run::<Q>(FLAT, 2, 8);
    let cert = certificate_report("flat-t2", &s, &VerifyOptions::for_mode(Mode::Exact)).unwrap();
    let elapsed = start.elapsed();

    let space = &s.chart.chart_space;
    // vars x1 x2 y1 t
    let expect =
        &Jet::monomial(space, &[0, 0, 2, 0], q(2)) + &Jet::monomial(space, &[0, 0, 0, 2], q(2));
    r.check("phi = 2 (y1)^2 + 2 t^2 exactly", s.phi.phi == expect);
    let t = s.chart.t_var();
    r.check(
        "G vanishes through t-degree 6",
        (0..=6).all(|m| s.state.g.coefficient_of_power(t, m).is_zero()),
    );
    let residuals_zero = cert
        .checks
        .iter()
        .filter(|c| c.bound == Bound::AtMost)
        .all(|c| c.value == 0.0);
    r.check("every certificate residual is exactly 0", residuals_zero);
    r.check("certificate passes", cert.passed());
    r.check(
        "psh min eigenvalue = 1",
        cert.get("psh_min_eigenvalue").unwrap().value == 1.0,
    );
    r.check(
        format!("runtime {elapsed:?} <= {FLAT_RUNTIME:?}"),
        elapsed <= FLAT_RUNTIME,
    );
    r.finish()
}

fn criterion_2_circle_exact() -> bool {
    let mut r = Report::new(2);
    let (s, _) = run::<Q>(CIRCLE, 1, 10);
    let t = s.chart.t_var();
    let expect = Jet::monomial(&s.chart.chart_space, &[0, 2], q(2));
    r.check("phi = 2 t^2 exactly", s.phi.phi == expect);
    r.check(
        "pivot constant = 1/4",
        pivot_check(&s.state, t).unwrap() == Q::from_ratio(1, 4),
    );
    let corner = s.phi.phi.diff(t).diff(t);
    r.check("phi_tt(p0) = 4", corner.constant_term() == &q(4));
    r.finish()
}

fn criterion_3_perturbed_torus_binary64() -> bool {
    let mut r = Report::new(3);
    let order = 6;
    let start = Instant::now();
    let (s, _) = run::<Complex64>(PERTURBED, 2, order);
    let mut opts = VerifyOptions::for_mode(Mode::Binary64);
    opts.samples = SampleSpec {
        radius: PERTURBED_PSH_RADIUS,
        count: PERTURBED_PSH_SAMPLES,
        ..SampleSpec::default()
    };
    let cert = certificate_report("perturbed-t2", &s, &opts).unwrap();
    let elapsed = start.elapsed();

    let t = s.chart.t_var();
    let space = s.state.g.space().clone();
    // G is determined only through total degree K - 2 (M loses two orders to
    // differentiation), so the t-degree <= K - 2 coefficients are checked there;
    // the undetermined top degrees are printed for reference.
    let g_max = |keep: &dyn Fn(usize) -> bool| {
        (0..space.len())
            .filter(|&i| space.exponent(i)[t] <= 4 && keep(space.degree(i)))
            .map(|i| s.state.g.coeffs()[i].norm())
            .fold(0.0, f64::max)
    };
    let g_low_t = g_max(&|d| d <= order - 2);
    r.check(
        format!(
            "max |G| over t-degree <= 4, total degree <= K-2: {g_low_t:.3e} <= {PERTURBED_G_TOL:e}"
        ),
        g_low_t <= PERTURBED_G_TOL,
    );
    r.note(format!(
        "max |G| over t-degree <= 4 at undetermined total degrees K-1, K: {:.3e}",
        g_max(&|d| d > order - 2)
    ));
    let ricci = ricci_residual(&s.hessian, &s.ops).unwrap();
    r.check(
        format!("ricci {ricci:.3e} <= {PERTURBED_RICCI_TOL:e}"),
        ricci <= PERTURBED_RICCI_TOL,
    );
    let res = restriction_checks(&s).unwrap();
    for (name, v) in [
        ("lagrangian", res.lagrangian),
        ("metric restriction", res.metric),
        ("special Lagrangian", res.special_lagrangian),
        ("volume match", res.volume),
    ] {
        r.check(
            format!("{name} {v:.3e} <= {PERTURBED_RESTRICTION_TOL:e}"),
            v <= PERTURBED_RESTRICTION_TOL,
        );
    }
    let psh = psh_check(&s.hessian, 2, &opts.samples).unwrap();
    r.check(
        format!("psh min eigenvalue {psh:.4} >= {PERTURBED_PSH_MIN}"),
        psh >= PERTURBED_PSH_MIN,
    );
    let slope = cert.get("finite_difference_slope").unwrap().value;
    r.check(
        format!("finite-difference slope {slope:.3} >= {PERTURBED_SLOPE_MIN}"),
        slope >= PERTURBED_SLOPE_MIN,
    );
    r.check(
        format!("runtime {elapsed:?} <= {PERTURBED_RUNTIME:?}"),
        elapsed <= PERTURBED_RUNTIME,
    );
    r.finish()
}

fn criterion_4_structure_invariants() -> bool {
    let mut r = Report::new(4);
    let (flat, _) = run::<Q>(FLAT, 2, 8);
    r.check(
        "flat: J^2 = -I exactly",
        j_squared_residual(&flat.structure).unwrap() == 0.0,
    );
    r.check(
        "flat: Nijenhuis = 0 exactly",
        nijenhuis_residual(&flat.structure.jmat).unwrap() == 0.0,
    );
    r.check(
        "flat: dbar z = 0 exactly",
        dbar_z_residual(&flat.structure, &flat.ops).unwrap() == 0.0,
    );
    r.check(
        "flat: M Hermitian exactly",
        flat.hessian.hermitian_residual == 0.0,
    );

    // A curved exact instance, where the structure is not constant.
    let (curved, _) = run::<Q>(
        (
            "g11 = (10 + cos(x1))/11; g22 = (10 + cos(x1))/11",
            "X1 = x2/5; X2 = 1",
        ),
        2,
        5,
    );
    r.check(
        "curved exact: J^2 = -I exactly",
        j_squared_residual(&curved.structure).unwrap() == 0.0,
    );
    r.check(
        "curved exact: Nijenhuis = 0 exactly",
        nijenhuis_residual(&curved.structure.jmat).unwrap() == 0.0,
    );
    r.check(
        "curved exact: dbar z = 0 exactly",
        dbar_z_residual(&curved.structure, &curved.ops).unwrap() == 0.0,
    );
    r.check(
        "curved exact: M Hermitian exactly",
        curved.hessian.hermitian_residual == 0.0,
    );

    let (pert, _) = run::<Complex64>(PERTURBED, 2, 6);
    let j2 = j_squared_residual(&pert.structure).unwrap();
    r.check(
        format!("perturbed: J^2 + I {j2:.3e} <= {STRUCTURE_TOL_BINARY64:e}"),
        j2 <= STRUCTURE_TOL_BINARY64,
    );
    let nij = nijenhuis_residual(&pert.structure.jmat).unwrap();
    r.check(
        format!("perturbed: Nijenhuis {nij:.3e} <= {NIJENHUIS_TOL_BINARY64:e}"),
        nij <= NIJENHUIS_TOL_BINARY64,
    );
    let dz = dbar_z_residual(&pert.structure, &pert.ops).unwrap();
    r.check(
        format!("perturbed: dbar z {dz:.3e} <= {STRUCTURE_TOL_BINARY64:e}"),
        dz <= STRUCTURE_TOL_BINARY64,
    );
    r.finish()
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    let re = Q::from_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4));
    let im = Q::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3)).mul(&Q::imag_unit());
    re.add(&im)
}

/// Random polynomial of total degree `<= deg`, about half the terms nonzero.
fn random_jet(rng: &mut ChaCha8Rng, space: &std::sync::Arc<Space>, deg: usize) -> Jet<Q> {
    let coeffs = (0..space.len())
        .map(|i| {
            if space.degree(i) <= deg && rng.gen_bool(0.5) {
                random_q(rng)
            } else {
                Q::zero()
            }
        })
        .collect();
    Jet::from_coeffs(space, coeffs).unwrap()
}

fn convolution(a: &Jet<Q>, b: &Jet<Q>) -> Jet<Q> {
    let s = a.space().clone();
    let mut out = vec![Q::zero(); s.len()];
    for (ea, ca) in a.terms() {
        for (eb, cb) in b.terms() {
            let e: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if let Some(i) = s.index_of(&e) {
                out[i] = out[i].add(&ca.mul(cb));
            }
        }
    }
    Jet::from_coeffs(&s, out).unwrap()
}

fn term_expansion(f: &Jet<Q>, args: &[Jet<Q>]) -> Jet<Q> {
    let target = args[0].space().clone();
    let mut out = Jet::zero(&target);
    for (e, c) in f.terms() {
        let mut m = Jet::constant(&target, c.clone());
        for (k, &p) in e.iter().enumerate() {
            for _ in 0..p {
                m = convolution(&m, &args[k]);
            }
        }
        out = &out + &m;
    }
    out
}

fn criterion_5_oracle_equivalences() -> bool {
    let mut r = Report::new(5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let mut mul_ok = 0;
    for case in 0..100 {
        let s = Space::new((0..1 + case % 4).map(|i| format!("v{i}")), 2 + case % 5);
        let a = random_jet(&mut rng, &s, s.order());
        let b = random_jet(&mut rng, &s, s.order());
        mul_ok += usize::from(&a * &b == convolution(&a, &b));
    }
    r.check(
        format!("jet mul = naive convolution on {mul_ok}/100 random pairs"),
        mul_ok == 100,
    );

    // Hessian: random φ and random (not necessarily integrable) J, n = 2, K = 4.
    // The literal formula and the operator assembly agree as identities of
    // polynomials; the comparison runs in a space with two orders of headroom
    // so that no product is cut before degree K, then compares through K.
    let (n, k) = (2, 4);
    let roomy = cytube::geometry::chart_space(n, k + 2);
    let native = cytube::geometry::chart_space(n, k);
    let mut hess_ok = 0;
    let mut native_ok = 0;
    for _ in 0..25 {
        let phi = random_jet(&mut rng, &roomy, k);
        let jmat = JetMatrix::from_fn(2 * n, 2 * n, |_, _| random_jet(&mut rng, &roomy, k));
        let structure = |jm: JetMatrix<Q>| ComplexStructureJet {
            n,
            jmat: jm.clone(),
            z: Vec::new(),
            p: jm.clone(),
            p_inv: jm,
        };
        let js = structure(jmat.clone());
        let ops = dbar_operators(&js, OperatorFrame::Chart).unwrap();
        let a = literal_hessian(&phi, &js);
        let b = ops.mixed_second(&phi).unwrap();
        hess_ok += usize::from(
            a.entries()
                .iter()
                .zip(b.entries())
                .all(|(x, y)| x.truncated(k) == y.truncated(k)),
        );

        // In the native order-K space the truncated Leibniz rule holds below
        // the top degree, so agreement is through K - 2.
        let to_native = |j: &Jet<Q>| j.embed(&native, &[0, 1, 2, 3]).unwrap();
        let jn = structure(jmat.map(to_native));
        let phin = to_native(&phi);
        let an = literal_hessian(&phin, &jn);
        let bn = dbar_operators(&jn, OperatorFrame::Chart)
            .unwrap()
            .mixed_second(&phin)
            .unwrap();
        native_ok += usize::from(
            an.entries()
                .iter()
                .zip(bn.entries())
                .all(|(x, y)| x.truncated(k - 2) == y.truncated(k - 2)),
        );
    }
    r.check(
        format!("literal Hessian = operator Hessian through K on {hess_ok}/25 random (phi, J)"),
        hess_ok == 25,
    );
    r.check(
        format!("same in the order-K space through K-2 on {native_ok}/25"),
        native_ok == 25,
    );

    let mut compose_ok = 0;
    for case in 0..25 {
        let k = 2 + case % 4;
        let src = Space::new((0..1 + case % 2).map(|i| format!("u{i}")), k);
        let dst = Space::new((0..1 + case % 3).map(|i| format!("v{i}")), k);
        let f = random_jet(&mut rng, &src, k);
        let args: Vec<Jet<Q>> = (0..src.nvars())
            .map(|_| {
                let mut a = random_jet(&mut rng, &dst, k);
                a.set_coeff(&vec![0; dst.nvars()], Q::zero()).unwrap();
                a
            })
            .collect();
        compose_ok += usize::from(f.compose(&args).unwrap() == term_expansion(&f, &args));
    }
    r.check(
        format!("jet compose = term expansion on {compose_ok}/25"),
        compose_ok == 25,
    );
    r.finish()
}

fn criterion_6_initial_data_contact() -> bool {
    let mut r = Report::new(6);
    let cases: [(&str, (&str, &str), usize, usize); 2] = [
        (
            "curved exact",
            (
                "g11 = (10 + cos(x1))/11; g22 = (10 + cos(x1))/11",
                "X1 = x2/5; X2 = 1",
            ),
            2,
            5,
        ),
        (
            "non-diagonal exact",
            (
                "g11 = 1 + x2/5; g12 = x1*x2/7; g22 = 1 + x1/3",
                "X1 = x2/3; X2 = 1 + x1/2",
            ),
            2,
            5,
        ),
    ];
    for (label, scenario, n, k) in cases {
        let (s, _) = run::<Q>(scenario, n, k);
        let (phi, rho) = (&s.phi.phi, &s.rho.phi);
        let t = s.chart.t_var();
        let low_t = |j: &Jet<Q>| j.filter(|e| e[t] <= 1);
        r.check(
            format!("{label}: phi and rho agree on every coefficient with t-exponent <= 1"),
            low_t(phi) == low_t(rho),
        );

        // The seven identities on L = {y = 0, t = 0}, as jets in x.
        let on_l: Vec<usize> = (n..=t).collect();
        let agree = |f: &dyn Fn(&Jet<Q>) -> Jet<Q>| {
            f(phi).restrict_zero(&on_l) == f(rho).restrict_zero(&on_l)
        };
        let mut all = true;
        for j in 0..n {
            for kk in 0..n {
                all &= agree(&|f| f.diff(j).diff(kk));
            }
            for kk in n..t {
                all &= agree(&|f| f.diff(j).diff(kk));
            }
            all &= agree(&|f| f.diff(j).diff(t));
            all &= agree(&|f| f.diff(j));
        }
        for y in n..t {
            all &= agree(&|f| f.diff(y).diff(t));
            all &= agree(&|f| f.diff(y));
        }
        all &= agree(&|f| f.diff(t));
        r.check(
            format!("{label}: the seven contact identities hold on L"),
            all,
        );
    }
    r.finish()
}

fn criterion_7_determinism_and_round_trip() -> bool {
    let mut r = Report::new(7);
    let texts = |s: &Solution<Complex64>| {
        let mut a = JetArchive::new(&s.chart.chart_space);
        a.push("phi", &s.phi.phi);
        a.push("h", &s.h.h);
        for (i, z) in s.structure.z.iter().enumerate() {
            a.push(&format!("z[{i}]"), z);
        }
        let cert = certificate_report("perturbed-t2", s, &VerifyOptions::for_mode(Mode::Binary64))
            .unwrap();
        (a, cert.to_string())
    };
    let (first, _) = run::<Complex64>(PERTURBED, 2, 6);
    let (second, _) = run::<Complex64>(PERTURBED, 2, 6);
    let (a1, c1) = texts(&first);
    let (a2, c2) = texts(&second);
    r.check(
        "binary64 archives byte-identical across runs",
        a1.to_text() == a2.to_text(),
    );
    r.check("binary64 certificates byte-identical across runs", c1 == c2);

    let back = JetArchive::<Complex64>::from_text(&a1.to_text()).unwrap();
    let bits = |j: &Jet<Complex64>| {
        j.coeffs()
            .iter()
            .map(|c| (c.re.to_bits(), c.im.to_bits()))
            .collect::<Vec<_>>()
    };
    let bit_exact = back.jets.len() == a1.jets.len()
        && back
            .jets
            .iter()
            .zip(&a1.jets)
            .all(|(x, y)| x.0 == y.0 && bits(&x.1) == bits(&y.1));
    r.check("binary64 archive round trip is bit-exact", bit_exact);
    r.check(
        "binary64 save(load(a)) reproduces the text",
        back.to_text() == a1.to_text(),
    );

    let (exact, _) = run::<Q>(
        ("g11 = (10 + cos(x1))/11; g22 = (10 + cos(x1))/11", "X2 = 1"),
        2,
        5,
    );
    let mut ea = JetArchive::new(&exact.chart.chart_space);
    ea.push("phi", &exact.phi.phi);
    let eb = JetArchive::<Q>::from_text(&ea.to_text()).unwrap();
    r.check("exact archive round trip is equal", eb == ea);
    let (exact2, _) = run::<Q>(
        ("g11 = (10 + cos(x1))/11; g22 = (10 + cos(x1))/11", "X2 = 1"),
        2,
        5,
    );
    let mut ea2 = JetArchive::new(&exact2.chart.chart_space);
    ea2.push("phi", &exact2.phi.phi);
    r.check(
        "exact archives byte-identical across runs",
        ea.to_text() == ea2.to_text(),
    );
    r.finish()
}

fn main() {
    let criteria: [(usize, fn() -> bool); 7] = [
        (1, criterion_1_flat_torus_exact),
        (2, criterion_2_circle_exact),
        (3, criterion_3_perturbed_torus_binary64),
        (4, criterion_4_structure_invariants),
        (5, criterion_5_oracle_equivalences),
        (6, criterion_6_initial_data_contact),
        (7, criterion_7_determinism_and_round_trip),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        match std::panic::catch_unwind(f) {
            Ok(true) => {}
            Ok(false) => failed.push(n),
            Err(_) => {
                println!("FAIL criterion {n} (panicked)");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
