mod common;

use common::*;
use nalgebra::{DMatrix, DVector, RowDVector};
use nugap_core::mtdc::{build_coefficients, path_partition, PathSet};
use nugap_core::sim::{classify, eigen_stability, step_response, StateSpace, TraceClass};
use nugap_core::{Error, Polynomial, RationalFunction};
use rand::Rng;

fn matrix(a: DMatrix<f64>) -> StateSpace {
    let n = a.nrows();
    StateSpace {
        a,
        b: DVector::from_element(n, 1.0),
        c: RowDVector::from_element(n, 1.0),
        d: 0.0,
    }
}

#[test]
fn first_order_loop() {
    let ss = StateSpace::realize_closed_loop(&RationalFunction::s(), &RationalFunction::one()).unwrap();
    assert_eq!(ss.order(), 1);
    assert_eq!(ss.a[(0, 0)], -1.0);
}

#[test]
fn degenerate_loop_rejected() {
    let s = RationalFunction::s();
    assert!(StateSpace::realize_closed_loop(&s, &-&s).is_err());
}

#[test]
fn improper_loop_rejected() {
    let g = tf(&[1.0], &[1.0, 1.0]);
    let k = RationalFunction::zero();
    assert!(matches!(StateSpace::realize_closed_loop(&g, &k), Err(Error::ImproperClosedLoop(_))));
}

#[test]
fn eigen_examples() {
    let v = eigen_stability(&matrix(DMatrix::from_element(1, 1, -1.0))).unwrap();
    assert!(v.stable && (v.abscissa + 1.0).abs() < 1e-12);
    let v = eigen_stability(&matrix(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]))).unwrap();
    assert!(!v.stable && v.marginal && v.abscissa.abs() < 1e-12);
}

#[test]
fn benchmark_eigenvalues_match_denominator_roots() {
    let cs = build_coefficients(&bench()).unwrap();
    let (g, c) = path_partition(&cs, &PathSet::new([4, 6]).unwrap());
    let ss = StateSpace::realize_closed_loop(&g, &-&c).unwrap();
    let cl = (&g - &c).inv().unwrap();
    let mut eig = ss.eigenvalues().unwrap();
    let mut roots = cl.den().roots().unwrap();
    assert_eq!(eig.len(), roots.len());
    let key = |z: &nugap_core::Complex64| (z.re, z.im);
    eig.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    roots.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    for (e, r) in eig.iter().zip(&roots) {
        assert!((e - r).norm() < 1e-8 * (1.0 + r.norm()), "{e} vs {r}");
    }
}

#[test]
fn droop_gain_moves_loop_toward_instability() {
    let j1 = PathSet::new([4, 6]).unwrap();
    let abscissa: Vec<f64> = [1.5, 5.0, 10.0, 15.0]
        .iter()
        .map(|&kd| {
            let sys = bench().with_gain(&param("vscA.kd"), kd).unwrap();
            let (g, c) = path_partition(&build_coefficients(&sys).unwrap(), &j1);
            eigen_stability(&StateSpace::realize_closed_loop(&g, &-&c).unwrap()).unwrap().abscissa
        })
        .collect();
    assert!(abscissa.windows(2).all(|w| w[1] > w[0]), "{abscissa:?}");
}

#[test]
fn first_order_step_settles() {
    let ss = StateSpace::realize(&tf(&[1.0], &[1.0, 1.0])).unwrap();
    let ts = step_response(&ss, 10.0, 1e-3, 1.0).unwrap();
    let end = *ts.y.last().unwrap();
    assert!((0.99..=1.0).contains(&end), "{end}");
    assert_eq!(classify(&ts), TraceClass::Settling);
    assert!(ts.t.windows(2).all(|w| ((w[1] - w[0]) - 1e-3).abs() < 1e-12));
}

#[test]
fn unstable_step_diverges() {
    let ss = StateSpace::realize(&tf(&[1.0], &[-0.5, 1.0])).unwrap();
    let ts = step_response(&ss, 30.0, 1e-2, 1.0).unwrap();
    assert!(ts.y.iter().any(|v| v.abs() > 10.0));
    assert_eq!(classify(&ts), TraceClass::Divergent);
}

#[test]
fn accuracy_guard_suggests_step() {
    let ss = StateSpace::realize(&tf(&[100.0], &[100.0, 1.0])).unwrap();
    match step_response(&ss, 1.0, 0.01, 1.0) {
        Err(Error::StepTooLarge { limit, .. }) => assert!((limit - 1e-3).abs() < 1e-12),
        other => panic!("expected guard, got {other:?}"),
    }
}

#[test]
fn csv_has_full_precision() {
    let ss = StateSpace::realize(&tf(&[1.0], &[1.0, 1.0])).unwrap();
    let ts = step_response(&ss, 0.01, 1e-3, 1.0).unwrap();
    let csv = ts.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,y"));
    let row = lines.nth(3).unwrap();
    let (t, y) = row.split_once(',').unwrap();
    assert_eq!(t.parse::<f64>().unwrap(), ts.t[3]);
    assert_eq!(y.parse::<f64>().unwrap(), ts.y[3]);
    assert_eq!(csv.lines().count(), ts.t.len() + 1);
}

#[test]
fn benchmark_traces_follow_eigenvalues() {
    let j1 = PathSet::new([2, 6]).unwrap();
    for kbp1 in [0.1, 0.8] {
        let sys = bench().with_gain(&param("vscB.kp1"), kbp1).unwrap();
        let (g, c) = path_partition(&build_coefficients(&sys).unwrap(), &j1);
        let ss = StateSpace::realize_closed_loop(&g, &-&c).unwrap();
        let v = eigen_stability(&ss).unwrap();
        let dt = 0.5 * ss.max_step().unwrap();
        let ts = step_response(&ss, 8.0 / v.abscissa.abs(), dt, 0.01).unwrap();
        let expect = if v.stable { TraceClass::Settling } else { TraceClass::Divergent };
        assert_eq!(classify(&ts), expect, "kbp1 = {kbp1}");
    }
}

fn random_loop(r: &mut rand::rngs::StdRng) -> (RationalFunction, RationalFunction) {
    let np = r.gen_range(1..=4);
    let poles: Vec<f64> = (0..np).map(|_| r.gen_range(-5.0..1.0)).collect();
    let den = real_poly(&poles, &[]);
    let num: Vec<f64> = (0..np).map(|_| r.gen_range(-3.0..3.0)).collect();
    let g = tf(&den, &[1.0]);
    let k = tf(&num, &[1.0]);
    (g, k)
}

#[test]
fn eigenvalues_agree_with_pole_test() {
    let mut r = rng(71);
    let mut n = 0;
    while n < 500 {
        let (g, k) = random_loop(&mut r);
        let Ok(ss) = StateSpace::realize_closed_loop(&g, &k) else { continue };
        let cl = (&g + &k).inv().unwrap();
        let v = eigen_stability(&ss).unwrap();
        let (stable, abscissa) = cl.is_stable();
        if v.marginal || abscissa.abs() < 1e-6 {
            continue;
        }
        assert_eq!(v.stable, stable, "{cl}");
        n += 1;
    }
}

#[test]
fn settled_value_is_dc_gain() {
    let mut r = rng(72);
    let mut n = 0;
    while n < 50 {
        let poles: Vec<f64> = (0..3).map(|_| -log_uniform(&mut r, 0.5, 20.0)).collect();
        let den = real_poly(&poles, &[]);
        let num: Vec<f64> = (0..2).map(|_| r.gen_range(-3.0..3.0)).collect();
        let ss = StateSpace::realize(&RationalFunction::new(Polynomial::new(num), Polynomial::new(den)).unwrap()).unwrap();
        let v = eigen_stability(&ss).unwrap();
        let dc = ss.dc_gain().unwrap();
        if dc.abs() < 0.05 {
            continue;
        }
        let ts = step_response(&ss, 8.0 / v.abscissa.abs(), 0.5 * ss.max_step().unwrap(), 1.0).unwrap();
        let end = *ts.y.last().unwrap();
        assert!((end - dc).abs() < 0.01, "within 1% of the step: {end} vs {dc}");
        let ts = step_response(&ss, 20.0 / v.abscissa.abs(), 0.5 * ss.max_step().unwrap(), 1.0).unwrap();
        let end = *ts.y.last().unwrap();
        assert!((end - dc).abs() <= 0.01 * dc.abs(), "within 1% of the gain: {end} vs {dc}");
        n += 1;
    }
}
