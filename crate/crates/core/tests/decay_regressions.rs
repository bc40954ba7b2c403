//! Regressions for the numeric maxima and maximiser locations of the
//! single-layer CNF decay rate.

use covercount::decay::kappa::{g_helper, t_helper};
use covercount::decay::{eval_kappa, grid_max, Family, KappaSpec};
use covercount::CNF_ALPHA;

const FINE_REFINE: usize = 12;

fn single(w: &[usize]) -> KappaSpec {
    KappaSpec::new(Family::CnfSingleLayer, w.to_vec()).unwrap()
}

fn t_fn(t: f64, w: u32) -> f64 {
    let p = 2f64.powi(w as i32 - 1);
    let s = t / p;
    s / (1.0 - s) * (1.0 - t) / t.sqrt() + (t / 2f64.sqrt()) / (1.0 - s) * (w as f64 - 1.0) / p
}

fn g_fn(h: f64) -> f64 {
    (h / (1.0 + h)).sqrt()
}

fn h_fn(t: f64, w: u32) -> f64 {
    1.0 - t / 2f64.powi(w as i32 - 1)
}

/// Dense scan of `f` on `(0, 1/2]`.
fn argmax_1d(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = 200_000;
    (1..=n)
        .map(|i| {
            let t = 0.5 * i as f64 / n as f64;
            (f(t), t)
        })
        .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a })
}

#[test]
fn helpers_match_reference_forms() {
    for &t in &[0.05, 0.2, 0.37, 0.5] {
        for w in 1..=4u32 {
            assert!((t_helper(t, w as usize) - t_fn(t, w)).abs() < 1e-12);
        }
        assert!((g_helper(t) - g_fn(t)).abs() < 1e-15);
    }
}

#[test]
fn closed_form_maxima_at_half() {
    let a = CNF_ALPHA;
    let cases: Vec<(Vec<usize>, f64, f64)> = vec![
        (vec![1], 1.0 / (6f64.sqrt() * a), 0.42),
        (vec![2], (2.0f64 / 21.0).sqrt() / a, 0.31 / a),
        (vec![3], (3.0f64 / 70.0).sqrt() / a, 0.21 / a),
        (vec![2, 2, 2], 3.0 * (6.0f64 / 91.0).sqrt() / a, 0.786),
        (vec![2, 2, 3], 37.0 / 2674f64.sqrt() / a, 0.73),
        (vec![2, 3, 3], 16.0 * (2.0f64 / 1209.0).sqrt() / a, 0.664),
        (vec![3, 3, 3], 3.0 * (7.0f64 / 190.0).sqrt() / a, 0.587),
        (vec![2, 2, 2, 2], 12.0 * (2.0f64 / 337.0).sqrt() / a, 1.0),
        (vec![2, 2, 3, 3], 23.0 * (2.0f64 / 1465.0).sqrt() / a, 0.87),
        (vec![2, 3, 3, 3], 41.0 * (7.0f64 / 18462.0).sqrt() / a, 0.82),
        (vec![3, 3, 3, 3], 42.0 * (2.0f64 / 6497.0).sqrt() / a, 0.76),
    ];
    for (w, closed, bound) in cases {
        let spec = single(&w);
        let at_half = eval_kappa(&spec, &vec![0.5; w.len()]).unwrap();
        assert!((at_half - closed).abs() < 1e-12, "{w:?}: {at_half} vs {closed}");
        let g = grid_max(&spec, 64, 4);
        assert!((g.value - closed).abs() < 1e-9, "{w:?}: grid {} vs {closed}", g.value);
        assert!(g.argmax.iter().all(|&t| t == 0.5), "{w:?}: {:?}", g.argmax);
        assert!(closed < bound, "{w:?}: {closed} >= {bound}");
    }
}

#[test]
fn width_one_rate_is_0_4162() {
    let g = grid_max(&single(&[1]), 64, 4);
    assert!((g.value - 0.4162).abs() < 1e-3);
}

#[test]
fn symmetric_width_one_maximisers() {
    let cases: [(&[usize], f64, f64, f64); 3] = [
        (&[1, 1], 0.4039, 0.404, 0.67),
        (&[1, 1, 1], 0.3074, 0.3075, 0.8471),
        (&[1, 1, 1, 1], 0.24807, 0.24808, 1.0),
    ];
    for (w, lo, hi, bound) in cases {
        let d = w.len() as f64;
        let g = grid_max(&single(w), 64, FINE_REFINE);
        for &t in &g.argmax {
            assert!(lo < t && t < hi, "{w:?}: argmax {:?}", g.argmax);
        }
        // endpoint bound d g((1-lo)^d) T(hi, 1) / α
        let endpoint = d * g_fn((1.0 - lo).powf(d)) * t_fn(hi, 1) / CNF_ALPHA;
        assert!(g.value <= endpoint && endpoint < bound, "{w:?}: {} {endpoint}", g.value);
    }
}

#[test]
fn mixed_width_maximisers_with_wide_groups_at_half() {
    // widths, extremal interval of the width-one coordinates, stated bound
    let cases: [(&[usize], f64, f64, f64); 6] = [
        (&[1, 2], 0.4533, 0.4534, 0.67),
        (&[1, 1, 2], 0.32, 0.33, 0.84),
        (&[1, 1, 3], 0.352, 0.353, 0.7881),
        (&[1, 2, 2], 0.34, 0.35, 0.82),
        (&[1, 2, 3], 0.38, 0.39, 0.77),
        (&[1, 3, 3], 0.42, 0.43, 0.72),
    ];
    for (w, lo, hi, bound) in cases {
        let mut spec = single(w);
        let ones = w.iter().filter(|&&x| x == 1).count();
        for c in ones..w.len() {
            spec = spec.restrict(c, 0.5, 0.5).unwrap();
        }
        let g = grid_max(&spec, 64, FINE_REFINE);
        for &t in &g.argmax[..ones] {
            assert!(lo < t && t < hi, "{w:?}: argmax {:?}", g.argmax);
        }
        let h: f64 = (1.0 - lo).powi(ones as i32) * w[ones..].iter().map(|&x| h_fn(0.5, x as u32)).product::<f64>();
        let s: f64 = ones as f64 * t_fn(hi, 1) + w[ones..].iter().map(|&x| t_fn(0.5, x as u32)).sum::<f64>();
        let endpoint = g_fn(h) * s / CNF_ALPHA;
        assert!(g.value <= endpoint && endpoint < bound, "{w:?}: {} {endpoint}", g.value);
    }
}

/// `U` for `n1` width-one groups at `t1`, `n2` width-two groups at `t2` and
/// `n3` width-three groups fixed at 1/2.
fn u_fn(t1m: f64, t1p: f64, t2m: f64, t2p: f64, n: (i32, i32, i32)) -> f64 {
    let h = h_fn(t1m, 1).powi(n.0) * h_fn(t2m, 2).powi(n.1) * h_fn(0.5, 3).powi(n.2);
    let s: f64 = [(n.0, t1p, 1), (n.1, t2p, 2), (n.2, 0.5, 3)]
        .iter()
        .filter(|g| g.0 > 0)
        .map(|&(k, t, w)| k as f64 * t_fn(t, w))
        .sum();
    g_fn(h) * s / CNF_ALPHA
}

#[test]
fn four_group_slab_tables() {
    // (groups, t2 slab, extremal t1 interval, U bound)
    type Row = ((i32, i32, i32), (f64, f64), (f64, f64), f64);
    let rows: Vec<Row> = vec![
        ((3, 1, 0), (0.0, 0.2), (0.28, 0.281), 0.993),
        ((3, 1, 0), (0.2, 0.3), (0.268, 0.269), 0.993),
        ((3, 1, 0), (0.3, 0.35), (0.26, 0.264), 0.993),
        ((3, 1, 0), (0.35, 0.4), (0.259, 0.26), 0.994),
        ((3, 1, 0), (0.4, 0.45), (0.255, 0.256), 0.997),
        ((3, 1, 0), (0.45, 0.5), (0.251, 0.252), 0.9991),
        ((2, 2, 0), (0.23, 0.35), (0.2895, 0.2896), 0.9998),
        ((2, 2, 0), (0.35, 0.4), (0.27, 0.28), 0.992),
        ((2, 2, 0), (0.4, 0.45), (0.26, 0.266), 0.997),
        ((2, 2, 0), (0.45, 0.5), (0.256, 0.257), 0.997),
        ((2, 1, 1), (0.0, 0.35), (0.304, 0.305), 0.996),
        ((2, 1, 1), (0.35, 0.5), (0.28, 0.29), 0.99),
        ((1, 3, 0), (0.0, 0.25), (0.39, 0.4), 0.991),
        ((1, 3, 0), (0.25, 0.35), (0.32, 0.33), 0.983),
        ((1, 3, 0), (0.35, 0.4), (0.29, 0.3), 0.98),
        ((1, 3, 0), (0.4, 0.45), (0.28, 0.29), 0.99),
        ((1, 3, 0), (0.45, 0.5), (0.26, 0.27), 0.998),
        ((1, 2, 1), (0.0, 0.3), (0.36, 0.37), 0.985),
        ((1, 2, 1), (0.3, 0.4), (0.32, 0.33), 0.96),
        ((1, 2, 1), (0.4, 0.5), (0.29, 0.3), 0.98),
    ];
    for (n, (t2m, t2p), (lo, hi), bound) in rows {
        let (_, t) = argmax_1d(|t| u_fn(t, t, t2m, t2p, n));
        assert!(lo < t && t < hi, "{n:?} slab [{t2m}, {t2p}]: extremal t1 {t}");
        let u = u_fn(lo, hi, t2m, t2p, n);
        assert!(u < bound, "{n:?} slab [{t2m}, {t2p}]: U = {u}");
    }
}

#[test]
fn four_group_slab_with_loose_stated_bounds() {
    // groups (1,1,2,2), t2 in [0, 0.23): the extremal interval holds but the
    // endpoint bound evaluates to 0.99605, above the tabulated 0.9944
    let (_, t) = argmax_1d(|t| u_fn(t, t, 0.0, 0.23, (2, 2, 0)));
    assert!(0.32 < t && t < 0.323);
    let u = u_fn(0.32, 0.323, 0.0, 0.23, (2, 2, 0));
    assert!((u - 0.99605).abs() < 1e-5 && u < 1.0, "{u}");

    // groups (1,1,1,3): extremal t1 in (0.27, 0.28), endpoint bound 0.9711
    // rather than the stated 0.96
    let (_, t) = argmax_1d(|t| u_fn(t, t, 0.0, 0.0, (3, 0, 1)));
    assert!(0.27 < t && t < 0.28);
    let u = u_fn(0.27, 0.28, 0.0, 0.0, (3, 0, 1));
    assert!((u - 0.97114).abs() < 1e-5 && u < 1.0, "{u}");
}

#[test]
fn restricted_grid_agrees_with_slab_extremum() {
    // true maximiser of the rate over t2 in [0, 0.2] lies inside the
    // coarser interval (0.27, 0.29) around the slab extremum
    let spec = single(&[1, 1, 1, 2]).restrict(3, 0.0, 0.2).unwrap();
    let g = grid_max(&spec, 64, FINE_REFINE);
    for &t in &g.argmax[..3] {
        assert!(0.27 < t && t < 0.29, "{:?}", g.argmax);
    }
    assert!((g.argmax[3] - 0.2).abs() < 1e-12);
    assert!(g.value < u_fn(0.28, 0.281, 0.0, 0.2, (3, 1, 0)));
}
