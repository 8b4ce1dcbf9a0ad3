use mixlab_core::geometry::{sample_scene, GeometryConfig};
use mixlab_core::rir::{schroeder_curve, simulate_rir, RirConfig};
use ndarray::Axis;

fn fit(curve: &[f64], fs: f64, start_db: f64, end_db: f64) -> Option<f64> {
    let i0 = curve.iter().position(|&v| v <= start_db)?;
    let i1 = curve.iter().position(|&v| v <= end_db)?;
    if i1 <= i0 + 1 { return None; }
    let (mut sx, mut sy, mut sxy, mut sxx) = (0.0, 0.0, 0.0, 0.0);
    let n = (i1 - i0 + 1) as f64;
    for i in i0..=i1 {
        let x = i as f64 / fs;
        sx += x; sy += curve[i]; sxy += x * curve[i]; sxx += x * x;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if slope >= 0.0 { return None; }
    Some(-60.0 / slope)
}

fn main() {
    let cfg = GeometryConfig::default();
    // simulate once per (seed, len_factor), reuse curves across windows
    for len_factor in [1.25f64, 2.0] {
        let mut curves: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
        for seed in 0..50u64 {
            let scene = sample_scene(&cfg, seed).unwrap();
            let rir_cfg = RirConfig {
                rir_length: Some((len_factor * scene.t60 * 8000.0) as usize),
                ..RirConfig::default()
            };
            let rirs = simulate_rir(&scene, &rir_cfg).unwrap();
            let mut cs = Vec::new();
            for k in 0..rirs.h.dim().0 {
                for d in 0..rirs.h.dim().1 {
                    let h: Vec<f64> = rirs.h.index_axis(Axis(0), k).row(d).to_vec();
                    cs.push(schroeder_curve(&h));
                }
            }
            curves.push((scene.t60, cs));
        }
        for (s, e) in [(-5.0f64, -25.0f64), (-5.0, -20.0), (-5.0, -23.0), (-3.0, -23.0)] {
            let mut errs = Vec::new();
            for (t60, cs) in &curves {
                let mut ests: Vec<f64> = cs.iter().filter_map(|c| fit(c, 8000.0, s, e)).collect();
                ests.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let median = ests[ests.len() / 2];
                errs.push((median - t60) / t60);
            }
            let worst = errs.iter().cloned().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            let fails = errs.iter().filter(|r| r.abs() > 0.2).count();
            println!("len {len_factor} window {s}..{e}: mean {:+.1}% worst {:+.1}% fails {}/50",
                errs.iter().sum::<f64>() / 50.0 * 100.0, worst * 100.0, fails);
        }
    }
}
