//! Acceptance criteria. Run with `cargo test -p distortkit --test acceptance`;
//! prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use distortkit::evaluate::run_metrics;
use distortkit::{apply, run_generate, CorruptionParams, GenerationConfig, GroundTruth};
use distortkit_core::fields::{sample_grf, GrfParams, OctaveSpec};
use distortkit_core::format::read_uvf;
use distortkit_core::io::{load_png, save_png};
use distortkit_core::metrics::{epe, psnr};
use distortkit_core::seed::rng_from_seed;
use distortkit_core::warps::{
    brown_conrady_uv, divergence_free_uv, invert_uv, max_interior_divergence, tps_fit, tps_uv, CameraIntrinsics,
    LensParams, TpsControlSet,
};
use distortkit_core::weather::fog::{apply_koschmieder, blend, depth_map, ExtinctionField, DEFAULT_AIRLIGHT};
use distortkit_core::weather::{hetero_fog, lens_flare, uniform_fog, Extinction, FlareParams, FogParams};
use distortkit_core::{remap, BorderPolicy, ImageBuffer, ScalarField, UVField};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_image(w: usize, h: usize, seed: u64) -> ImageBuffer {
    let mut rng = rng_from_seed(seed);
    ImageBuffer::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()]).unwrap()
}

// 1. Identity suite ---------------------------------------------------------

fn identity_suite() -> Outcome {
    let (w, h) = (1920, 1080);
    let img = common::frame(w, h, 42);
    let fog = FogParams {
        extinction: Extinction::Coefficient(0.0),
        jitter: 0.0,
        ..Default::default()
    };
    let cases = [
        CorruptionParams::BrownConrady {
            intrinsics: CameraIntrinsics::centered(w, h),
            lens: LensParams::default(),
        },
        CorruptionParams::GrfTurbulence {
            correlation_length: 64.0,
            alpha: 0.0,
            inner_scale: 16.0,
        },
        CorruptionParams::DivergenceFree {
            correlation_length: 64.0,
            alpha: 0.0,
            inner_scale: 16.0,
        },
        CorruptionParams::UniformFog { fog, delta: 0.0, k: 0.0 },
        CorruptionParams::HeteroFog {
            fog,
            octaves: OctaveSpec::default(),
            delta: 0.0,
        },
        CorruptionParams::LensFlare {
            rho: 0.3,
            beta: 0.0,
            center: [960.0, 100.0],
            radius: 0.3 * 1920f64.hypot(1080.0),
        },
    ];
    let start = Instant::now();
    for p in &cases {
        let name = p.corruption();
        let out = apply(p, &img, 7).map_err(|e| format!("{name}: {e}"))?;
        ensure!(out.image == img, "{name}: output differs from input");
        match (&out.truth, name.is_refractive()) {
            (GroundTruth::Flow(f), true) => {
                ensure!(f.u().iter().chain(f.v()).all(|d| d.to_bits() == 0), "{name}: non-zero flow")
            }
            (GroundTruth::Map(k), false) if out.transmission.is_some() => {
                ensure!(k.values().iter().all(|&k| k == 0.0), "{name}: non-zero extinction")
            }
            (GroundTruth::Map(_), false) => {}
            _ => return Err(format!("{name}: wrong ground-truth kind")),
        }
        if let Some(t) = &out.transmission {
            ensure!(t.values().iter().all(|&t| t == 1.0), "{name}: transmission not unit");
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("{} identity cases on 1920x1080 in {:.2} s", cases.len(), elapsed.as_secs_f64()))
}

// 2. Brown-Conrady closed form ----------------------------------------------

fn brown_conrady_closed_form() -> Outcome {
    let lens = LensParams {
        k: [0.1, 0.0, 0.0, 0.0, 0.0, 0.0],
        ..Default::default()
    };
    let (xd, yd) = lens.distort_normalized(0.5, 0.0);
    ensure!((xd - 0.5125).abs() <= 1e-12 && yd == 0.0, "got ({xd}, {yd})");

    let mut rng = rng_from_seed(2);
    let (w, h) = (65, 49);
    let intr = CameraIntrinsics::centered(w, h);
    for _ in 0..100 {
        let mut c = || rng.random_range(-0.5..0.5);
        let lens = LensParams {
            k: [c(), c(), c(), c(), c(), c()],
            p: [c(), c()],
            s: [c(), c(), c(), c()],
        };
        let f = brown_conrady_uv(w, h, &intr, &lens).map_err(|e| e.to_string())?;
        let d = f.get(32, 24);
        ensure!(d == (0.0, 0.0), "principal point moved by {d:?}");
    }
    Ok(format!("x_d = {xd:.15}; principal point fixed for 100 coefficient sets"))
}

// 3. TPS exactness ----------------------------------------------------------

fn tps_exactness() -> Outcome {
    let mut rng = rng_from_seed(3);
    let jitter = Normal::new(0.0, 6.0).unwrap();
    let (w, h) = (256usize, 192usize);
    let (mut worst_res, mut worst_side) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(3..=25);
        let source: Vec<[f64; 2]> = loop {
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.random_range(0..w) as f64, rng.random_range(0..h) as f64])
                .collect();
            let area = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
            let distinct = (0..n).all(|i| (0..i).all(|j| pts[i] != pts[j]));
            let spread = (2..n).any(|k| area(pts[0], pts[1], pts[k]) > 1.0);
            if distinct && spread {
                break pts;
            }
        };
        let target = source
            .iter()
            .map(|s| [s[0] + jitter.sample(&mut rng), s[1] + jitter.sample(&mut rng)])
            .collect();
        let controls = TpsControlSet::new(source, target).map_err(|e| e.to_string())?;
        let model = tps_fit(&controls).map_err(|e| e.to_string())?;
        let field = tps_uv(&model, w, h).map_err(|e| e.to_string())?;
        for (s, t) in controls.source.iter().zip(&controls.target) {
            let (u, v) = field.get(s[0] as usize, s[1] as usize);
            worst_res = worst_res.max((s[0] + u - t[0]).abs()).max((s[1] + v - t[1]).abs());
        }
        for axis in model.side_constraints() {
            worst_side = axis.iter().fold(worst_side, |m, s| m.max(s.abs()));
        }
    }
    ensure!(worst_res <= 1e-6, "control residual {worst_res:e} px");
    ensure!(worst_side <= 1e-8, "side constraint {worst_side:e}");
    Ok(format!("100 sets: max residual {worst_res:.2e} px, max side sum {worst_side:.2e}"))
}

// 4. Divergence-free --------------------------------------------------------

fn divergence_free() -> Outcome {
    let alpha = 4.0;
    let mut worst = 0.0f64;
    for l in [16.0, 64.0] {
        let bound = 1e-4 * alpha / l;
        for seed in 0..20 {
            let f = divergence_free_uv(256, 256, l, alpha, seed).map_err(|e| e.to_string())?;
            let d = max_interior_divergence(&f);
            ensure!(d <= bound, "l={l} seed={seed}: divergence {d:e} > {bound:e}");
            worst = worst.max(d / bound);
        }
    }
    Ok(format!("40 fields; worst divergence {worst:.2e} of the bound"))
}

// 5. GRF statistics ---------------------------------------------------------

fn lag_correlation(f: &ScalarField, lag: usize) -> f64 {
    let (w, h) = f.dims();
    let var = f.values().iter().map(|v| v * v).sum::<f64>() / (w * h) as f64;
    let mut sum = 0.0;
    let mut n = 0usize;
    for y in 0..h {
        for x in 0..w {
            if x + lag < w {
                sum += f.get(x, y) * f.get(x + lag, y);
                n += 1;
            }
            if y + lag < h {
                sum += f.get(x, y) * f.get(x, y + lag);
                n += 1;
            }
        }
    }
    sum / n as f64 / var
}

fn grf_statistics() -> Outcome {
    let start = Instant::now();
    let l = 32.0;
    let params = GrfParams::new(l);
    let (mut lo, mut hi, mut corr, mut mean_max) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0f64);
    let seeds = 20;
    for seed in 0..seeds {
        let f = sample_grf(512, 512, &params, seed).map_err(|e| e.to_string())?;
        let mean = f.mean();
        let var = f.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / f.values().len() as f64;
        lo = lo.min(var);
        hi = hi.max(var);
        mean_max = mean_max.max(mean.abs());
        corr += lag_correlation(&f, l as usize) / seeds as f64;
    }
    let target = (-1.0f64).exp();
    let elapsed = start.elapsed();
    ensure!(lo >= 0.95 && hi <= 1.05, "variance range [{lo}, {hi}]");
    ensure!(mean_max <= 0.02, "mean {mean_max}");
    ensure!((corr - target).abs() <= 0.1, "lag-l correlation {corr:.4}");
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "20 seeds: variance in [{lo:.4}, {hi:.4}], lag-l correlation {corr:.4} (target {target:.4}), {:.1} s",
        elapsed.as_secs_f64()
    ))
}

// 6. Fog physics ------------------------------------------------------------

fn fog_physics() -> Outcome {
    let img = random_image(64, 64, 6);
    let params = FogParams::default();

    // (a) pre-rounding convexity, checked on the very transmission the
    // corruption used.
    let uniform = uniform_fog(&img, &params, 1).map_err(|e| e.to_string())?;
    let hetero = hetero_fog(&img, &params, &OctaveSpec::default(), 1).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for (t, out) in [(&uniform.transmission, &uniform.image), (&hetero.transmission, &hetero.image)] {
        for i in 0..64 * 64 {
            for c in 0..3 {
                let clean = img.as_raw()[3 * i + c] as f64;
                let a = params.airlight[c];
                let pre = blend(clean, a, t.values()[i]);
                let (lo, hi) = (clean.min(a), clean.max(a));
                ensure!(pre >= lo && pre <= hi, "pixel {i} channel {c}: {pre} outside [{lo}, {hi}]");
                let o = out.as_raw()[3 * i + c] as f64;
                ensure!((o - pre).abs() <= 0.5, "pixel {i} channel {c}: rounding {o} vs {pre}");
                checked += 1;
            }
        }
    }

    // (b) black top row at k = 0.0375, d = 160.
    let black = ImageBuffer::filled(16, 16, [0; 3]).unwrap();
    let depth = depth_map(16, 16, 160.0).map_err(|e| e.to_string())?;
    let (fogged, _) =
        apply_koschmieder(&black, ExtinctionField::Uniform(0.0375), &depth, DEFAULT_AIRLIGHT).map_err(|e| e.to_string())?;
    let mut worst_b = 0.0f64;
    for x in 0..16 {
        for (c, a) in DEFAULT_AIRLIGHT.iter().enumerate() {
            let expect = a * (1.0 - (-6.0f64).exp());
            worst_b = worst_b.max((fogged.pixel(x, 0)[c] as f64 - expect).abs());
        }
    }
    ensure!(worst_b <= 0.51, "top-row deviation {worst_b}");

    // (c) k-map mean over several seeds.
    let mut worst_c = 0.0f64;
    for seed in 0..10 {
        let f = hetero_fog(&img, &params, &OctaveSpec::default(), seed).map_err(|e| e.to_string())?;
        let target = params.k0() * (1.0 + f.delta);
        worst_c = worst_c.max((f.k_map.mean() / target - 1.0).abs());
    }
    ensure!(worst_c <= 1e-6, "k-map mean relative error {worst_c:e}");
    Ok(format!(
        "(a) {checked} channel values convex; (b) max deviation {worst_b:.3} levels; (c) k-map mean rel. error {worst_c:.1e}"
    ))
}

// 7. Flare closed form ------------------------------------------------------

fn flare_closed_form() -> Outcome {
    let img = random_image(400, 300, 7);
    for beta in [0.0, 0.3, 0.55, 0.6, 0.65, 1.0] {
        let p = FlareParams {
            rho: 0.3,
            beta,
            center: Some([200.0, 0.0]),
        };
        let out = lens_flare(&img, &p, 0).map_err(|e| e.to_string())?;
        let gain = (beta * 255.0).round() as i32;
        for c in 0..3 {
            let (i, o) = (img.pixel(200, 0)[c] as i32, out.image.pixel(200, 0)[c] as i32);
            ensure!(o - i == gain.min(255 - i), "beta={beta}: centre gained {} not {}", o - i, gain.min(255 - i));
        }
    }
    let dark = ImageBuffer::filled(400, 300, [20; 3]).unwrap();
    let beta = 0.6;
    let p = FlareParams {
        rho: 0.3,
        beta,
        center: Some([200.0, 0.0]),
    };
    let out = lens_flare(&dark, &p, 0).map_err(|e| e.to_string())?;
    ensure!(out.radius == 150.0, "radius {}", out.radius);
    let expect = beta * 255.0 * (-0.5f64).exp();
    let added = out.image.pixel(200, 150)[0] as f64 - 20.0;
    ensure!((added - expect).abs() <= 0.51, "added {added} vs {expect}");
    Ok(format!("centre gain exact for 6 betas; at r = 150 px added {added} vs {expect:.3}"))
}

// 8. Metric oracles ---------------------------------------------------------

fn metric_oracles() -> Outcome {
    let a = ImageBuffer::filled(32, 32, [128; 3]).unwrap();
    let b = ImageBuffer::filled(32, 32, [144; 3]).unwrap();
    let db = psnr(&a, &b).map_err(|e| e.to_string())?.as_f64();
    ensure!((db - 24.05).abs() <= 0.01, "offset PSNR {db}");

    let zero = UVField::zeros(17, 9).unwrap();
    let shift = UVField::constant(17, 9, 3.0, 4.0).unwrap();
    let e = epe(&shift, &zero).map_err(|e| e.to_string())?;
    ensure!(e == 5.0, "EPE {e}");

    let mut rng = rng_from_seed(8);
    for i in 0..100 {
        let imgs: Vec<_> = (0..3).map(|k| random_image(12, 10, 1000 * i + k)).collect();
        let ab = psnr(&imgs[0], &imgs[1]).unwrap();
        ensure!(ab == psnr(&imgs[1], &imgs[0]).unwrap(), "PSNR asymmetric on triple {i}");
        let flows: Vec<_> = (0..3)
            .map(|_| {
                UVField::from_fn(12, 10, |_, _| {
                    {
                    let (a, b): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                    (5.0 * a, 5.0 * b)
                }
                })
                .unwrap()
            })
            .collect();
        let d = |x: usize, y: usize| epe(&flows[x], &flows[y]).unwrap();
        ensure!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9, "triangle inequality fails on triple {i}");
        ensure!((d(0, 1) - d(1, 0)).abs() <= 1e-9 && d(0, 1) >= 0.0, "EPE not symmetric on triple {i}");
    }
    Ok(format!("PSNR(+16) = {db:.4} dB, EPE(3,4) = {e}, 100 triples consistent"))
}

// 9. Classical round-trip restoration --------------------------------------

fn fft2(data: &mut [Complex<f64>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex::default(); n];
    for x in 0..n {
        for y in 0..n {
            col[y] = data[y * n + x];
        }
        fft.process(&mut col);
        for y in 0..n {
            data[y * n + x] = col[y];
        }
    }
}

/// White noise shaped to a 1/f amplitude spectrum.
fn pink_noise(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut data: Vec<Complex<f64>> = (0..n * n)
        .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
        .collect();
    fft2(&mut data, n, false);
    let freq = |i: usize| (if i <= n / 2 { i as f64 } else { i as f64 - n as f64 }) / n as f64;
    for y in 0..n {
        for x in 0..n {
            let k = freq(x).hypot(freq(y));
            data[y * n + x] /= if k == 0.0 { 1.0 } else { k };
        }
    }
    fft2(&mut data, n, true);
    data.into_iter().map(|z| z.re).collect()
}

fn gaussian_blur(plane: &[f64], n: usize, sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-r..=r).map(|i| (-0.5 * (i as f64 / sigma).powi(2)).exp()).collect();
    let norm: f64 = kernel.iter().sum();
    let at = |i: isize| i.clamp(0, n as isize - 1) as usize;
    let mut tmp = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            tmp[y * n + x] = (-r..=r).map(|i| kernel[(i + r) as usize] * plane[y * n + at(x as isize + i)]).sum::<f64>() / norm;
        }
    }
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            out[y * n + x] = (-r..=r).map(|i| kernel[(i + r) as usize] * tmp[at(y as isize + i) * n + x]).sum::<f64>() / norm;
        }
    }
    out
}

/// Stand-in for a natural photograph: correlated 1/f colour texture with
/// hard-edged occluding rectangles, lightly blurred as by a camera lens.
fn natural_image(n: usize, seed: u64) -> ImageBuffer {
    let mut rng = rng_from_seed(seed);
    let standardise = |v: Vec<f64>| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
        v.into_iter().map(|x| (x - m) / s * 50.0 + 128.0).collect::<Vec<_>>()
    };
    let base = pink_noise(n, &mut rng);
    let mut planes: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            let own = pink_noise(n, &mut rng);
            standardise(base.iter().zip(&own).map(|(b, o)| 0.7 * b + 0.3 * o).collect())
        })
        .collect();
    for _ in 0..12 {
        let (x0, y0) = (rng.random_range(0.0..n as f64), rng.random_range(0.0..n as f64));
        let (w, h) = (rng.random_range(10.0..120.0), rng.random_range(10.0..120.0));
        let colour: [f64; 3] = [rng.random_range(0.0..255.0), rng.random_range(0.0..255.0), rng.random_range(0.0..255.0)];
        for y in 0..n {
            for x in 0..n {
                if (x as f64 - x0).abs() < w / 2.0 && (y as f64 - y0).abs() < h / 2.0 {
                    for c in 0..3 {
                        planes[c][y * n + x] = 0.5 * planes[c][y * n + x] + 0.5 * colour[c];
                    }
                }
            }
        }
    }
    let planes: Vec<Vec<f64>> = planes.iter().map(|p| gaussian_blur(p, n, 0.7)).collect();
    ImageBuffer::from_fn(n, n, |x, y| {
        let px = |c: usize| planes[c][y * n + x].round().clamp(0.0, 255.0) as u8;
        [px(0), px(1), px(2)]
    })
    .unwrap()
}

fn classical_round_trip() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (input, output, pred) = (dir.path().join("clean"), dir.path().join("gen"), dir.path().join("pred"));
    std::fs::create_dir_all(&input).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&pred).map_err(|e| e.to_string())?;
    for i in 0..20 {
        save_png(input.join(format!("nat_{i:02}.png")), &natural_image(512, 900 + i)).map_err(|e| e.to_string())?;
    }
    let body = "seed = 9\ncorruption = \"grf_turbulence\"\n[grf_turbulence]\ncorrelation_length = 64\nalpha = 4\n";
    let mut cfg = GenerationConfig::from_toml_str(body, Path::new("acceptance.toml")).map_err(|e| e.to_string())?;
    cfg.input = Some(input);
    cfg.output = Some(output.clone());
    let report = run_generate(&cfg).map_err(|e| e.to_string())?;
    ensure!(report.records.len() == 20, "generated {} records", report.records.len());

    let mut corrupted_db = Vec::new();
    for r in &report.records {
        let warped = load_png(output.join(&r.outputs.image)).map_err(|e| e.to_string())?;
        let gt = read_uvf(output.join(&r.outputs.ground_truth)).map_err(|e| e.to_string())?;
        let inverse = invert_uv(&gt, 50, 1e-6).map_err(|e| e.to_string())?;
        let restored = remap(&warped, &inverse, BorderPolicy::Clamp).map_err(|e| e.to_string())?;
        save_png(pred.join(&r.outputs.image), &restored).map_err(|e| e.to_string())?;
        corrupted_db.push(psnr(&warped, &load_png(&r.input).unwrap()).unwrap().as_f64());
    }
    let metrics = run_metrics(&pred, &report.manifest).map_err(|e| e.to_string())?;
    ensure!(metrics.missing.is_empty(), "missing predictions");
    ensure!(metrics.summary.infinite_psnr == 0, "unexpected perfect restoration");
    let mean = metrics.summary.mean_psnr.unwrap_or(0.0);
    let baseline = corrupted_db.iter().sum::<f64>() / corrupted_db.len() as f64;
    let elapsed = start.elapsed();
    ensure!(mean >= 30.0, "mean restored PSNR {mean:.2} dB (corrupted {baseline:.2} dB)");
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!(
        "20 images 512x512: restored {mean:.2} dB vs corrupted {baseline:.2} dB, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

// 10. Determinism and parallel safety ---------------------------------------

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("in");
    common::write_corpus(&input, 50, 96, 72);
    let body = "seed = 2024\nemit_viz = true\nemit_transmission = true\n[mix]\nbrown_conrady = 1\n\
                grf_turbulence = 1\ntps = 1\ndivergence_free = 1\nuniform_fog = 1\nhetero_fog = 1\nlens_flare = 1\n";
    let run = |name: &str, workers: usize| -> Result<BTreeMap<String, Vec<u8>>, String> {
        let mut cfg = GenerationConfig::from_toml_str(body, Path::new("acceptance.toml")).map_err(|e| e.to_string())?;
        cfg.input = Some(input.clone());
        cfg.output = Some(dir.path().join(name));
        cfg.workers = Some(workers);
        let report = run_generate(&cfg).map_err(|e| e.to_string())?;
        ensure!(report.records.len() == 50 && report.skipped.is_empty(), "incomplete run");
        Ok(snapshot(&dir.path().join(name)))
    };
    let a = run("a", 8)?;
    let b = run("b", 8)?;
    let c = run("c", 1)?;
    ensure!(a.len() > 150, "only {} files", a.len());
    for (label, other) in [("second run", &b), ("one worker", &c)] {
        ensure!(a.keys().eq(other.keys()), "{label}: different file sets");
        if let Some(name) = a.keys().find(|k| a[*k] != other[*k]) {
            return Err(format!("{label}: {name} differs"));
        }
    }
    let bytes: usize = a.values().map(Vec::len).sum();
    Ok(format!("50 inputs, {} files ({bytes} bytes) identical across 3 runs", a.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("identity suite", identity_suite),
        ("Brown-Conrady closed form", brown_conrady_closed_form),
        ("TPS exactness", tps_exactness),
        ("divergence-free property", divergence_free),
        ("GRF statistics", grf_statistics),
        ("fog physics", fog_physics),
        ("flare closed form", flare_closed_form),
        ("metric oracles", metric_oracles),
        ("classical round-trip restoration", classical_round_trip),
        ("determinism and parallel safety", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
