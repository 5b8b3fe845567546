use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use qangle::fock::DEFAULT_TAIL_TOL;
use qangle::polarization::{has_counter_rotating_peaks, prepare, snapshot_sequence};
use qangle::LinearPolSpec;

const K: usize = 1024;

#[test]
fn coherent_mid_range_slices_counter_rotate() {
    let times = [3.0 * PI / 8.0, PI / 2.0, 5.0 * PI / 8.0];
    for mean in [1.0, 4.0, 9.0] {
        let st = prepare(&LinearPolSpec::XCoherent(mean), None, DEFAULT_TAIL_TOL).unwrap();
        let sweep = snapshot_sequence(&st, &times, K).unwrap();
        assert_eq!(sweep.counter_rotating(), vec![true; 3], "N={mean}");
        assert_eq!(sweep.gaps(), 0);
    }
}

#[test]
fn coherent_end_slices_have_one_peak() {
    for mean in [1.0, 4.0, 9.0] {
        let st = prepare(&LinearPolSpec::XCoherent(mean), None, DEFAULT_TAIL_TOL).unwrap();
        let sweep = snapshot_sequence(&st, &[0.0, PI], K).unwrap();
        let zero = sweep.slices[0].as_ref().unwrap();
        let pi = sweep.slices[1].as_ref().unwrap();
        assert_eq!(zero.local_maxima(), vec![zero.grid.nearest(0.0)]);
        assert_eq!(pi.local_maxima(), vec![pi.grid.nearest(PI)]);
        assert!(!has_counter_rotating_peaks(zero));
    }
}

#[test]
fn bright_coherent_quarter_period_peaks_sit_on_the_y_axis() {
    let st = prepare(&LinearPolSpec::XCoherent(9.0), None, DEFAULT_TAIL_TOL).unwrap();
    let sweep = snapshot_sequence(&st, &[PI / 2.0], K).unwrap();
    let p = sweep.slices[0].as_ref().unwrap();
    let want = vec![p.grid.nearest(-PI / 2.0), p.grid.nearest(PI / 2.0)];
    assert_eq!(p.local_maxima(), want);
    // the x directions are dips at this time, far below the peaks
    assert!(p.at(0.0) < 1e-3 * p.max() && p.at(PI) < 1e-3 * p.max());
}

#[test]
fn one_plus_two_photon_opening_slice() {
    let spec = LinearPolSpec::XSuperposition(vec![(1, C64::new(1.0, 0.0)), (2, C64::new(1.0, 0.0))]);
    let st = prepare(&spec, None, DEFAULT_TAIL_TOL).unwrap();
    let sweep = snapshot_sequence(&st, &[0.0, PI], K).unwrap();
    let start = sweep.slices[0].as_ref().unwrap();
    assert_eq!(start.argmax(), start.grid.nearest(0.0));
    let half = sweep.slices[1].as_ref().unwrap();
    assert_eq!(half.argmax(), half.grid.nearest(PI));
}

#[test]
fn vacuum_sweep_is_flat() {
    let st = prepare(&LinearPolSpec::XCoherent(0.0), None, DEFAULT_TAIL_TOL).unwrap();
    let times: Vec<f64> = (0..8).map(|i| -PI + PI * i as f64 / 4.0).collect();
    let sweep = snapshot_sequence(&st, &times, 64).unwrap();
    for s in &sweep.slices {
        assert!(s.as_ref().unwrap().values.iter().all(|&v| (v - 1.0 / (2.0 * PI)).abs() < 1e-14));
    }
    assert!(sweep.conditioning.iter().all(|&c| (c - 1.0).abs() < 1e-14));
}
