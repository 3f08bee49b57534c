//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured values; the test itself only fails on a crash, so that an
//! unmet criterion is reported rather than hidden.

use std::io::Write;

use frenet::constructions::{
    choose_hyperplane, envelope, make_willmore_form, recover_original, splitting, tangent_curve, projective_distance,
    Hyperplane, DEFAULT_CLOSED_TOL,
};
use frenet::field::{twistor_project, CurveField};
use frenet::frenet::{canonical_residuals, degree_check, perturb_structure, weierstrass_points, FrenetResiduals};
use frenet::grid::{Chart, ChartGrid};
use frenet::metrics::{classical_oracle, harmonicity, willmore_energy};
use frenet::pipeline::{run_pipeline, PipelineConfig};
use frenet::poly::Poly;
use frenet::quaternion::HVector;
use frenet::rational::RationalCurve;
use frenet::surface::{curvature_at, planar_end_check, resolve_pole, stereographic, Pole, SurfaceMap};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const COARSE: usize = 128;
const FINE: usize = 256;

/// Straight to the stderr handle, which libtest does not capture.
fn line(text: &str) {
    let _ = writeln!(std::io::stderr(), "{text}");
}

fn verdict(k: usize, pass: bool, title: &str, detail: &str) {
    line(&format!("{} {k} {title}: {detail}", if pass { "PASS" } else { "FAIL" }));
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// A random curve in `CP^{m−1}` whose twistor projection exists.
fn admissible_curve(seed: u64, m: usize, d: usize) -> RationalCurve {
    for s in seed.. {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let coords = (0..m).map(|_| Poly::new((0..=d).map(|_| Complex64::new(draw(), draw())).collect())).collect();
        let h = RationalCurve::new(coords).unwrap();
        if h.quaternionic_locus().map(|l| l.is_empty()).unwrap_or(false) {
            return h;
        }
    }
    unreachable!()
}

struct TestCurve {
    name: String,
    curve: RationalCurve,
}

fn test_curves() -> Vec<TestCurve> {
    let mut out = Vec::new();
    for i in 0..10 {
        let d = 3 + i % 2;
        out.push(TestCurve { name: format!("CP3 deg {d} #{i}"), curve: admissible_curve(100 + 50 * i as u64, 4, d) });
    }
    for i in 0..3 {
        let d = 4 + i % 2;
        out.push(TestCurve { name: format!("CP5 deg {d} #{i}"), curve: admissible_curve(900 + 50 * i as u64, 6, d) });
    }
    out
}

fn frenet_line(r: &FrenetResiduals) -> String {
    format!(
        "S²+1 {:.1e}, stability {:.1e}, δ {:.1e}, AV⊂L {:.1e}, Q|V {:.1e}",
        r.s_squared, r.flag_stability, r.delta(), r.a_into_l, r.q_on_flag
    )
}

/// Largest projective distance between two fields on the same grid.
fn field_distance(a: &CurveField, b: &CurveField) -> f64 {
    Chart::BOTH
        .iter()
        .flat_map(|&c| a.grid.owned_indices(c).into_iter().map(move |k| (c, k)))
        .map(|(c, k)| projective_distance(&a.psi(c, k), &b.psi(c, k)))
        .fold(0.0, f64::max)
}

/// `recover_original` distance and `tangent ∘ envelope` distance.
fn round_trip(f: &CurveField, hp: &Hyperplane) -> (f64, f64) {
    let rec = recover_original(f, hp).unwrap();
    let t = tangent_curve(f, hp).unwrap();
    let last = Hyperplane::new(HVector::basis(f.m(), f.m() - 1)).unwrap();
    let back = tangent_curve(&rec.envelope, &last).unwrap();
    (rec.distance, field_distance(&back, &t))
}

/// L at the sample where `‖A‖` is largest.
fn pole_at_max_a(f: &CurveField) -> Pole {
    let (c, k) = Chart::BOTH
        .iter()
        .flat_map(|&c| f.grid.owned_indices(c).into_iter().map(move |k| (c, k)))
        .max_by(|x, y| f.hopf_a(x.0, x.1).0.norm().total_cmp(&f.hopf_a(y.0, y.1).0.norm()))
        .unwrap();
    Pole::Line(f.psi(c, k).normalized().reals().collect())
}

/// Largest `|H|` outside the exclusion disks.
fn max_mean_curvature(map: &SurfaceMap) -> f64 {
    Chart::BOTH
        .iter()
        .flat_map(|&c| map.grid.owned_indices(c).into_iter().map(move |k| (c, k)))
        .filter(|&(c, k)| !map.excluded(c, k))
        .filter_map(|(c, k)| curvature_at(map, c, k))
        .map(|cv| cv.h2.max(0.0).sqrt())
        .fold(0.0, f64::max)
}

/// Minimality and planar ends of one stereographic image.
fn minimal_sphere_check(f: &CurveField, pole: &Pole) -> (bool, String) {
    let choice = match resolve_pole(f, pole) {
        Ok(c) => c,
        Err(e) => return (false, format!("pole: {e}")),
    };
    let map = match stereographic(f, &HVector::from_real(&choice.line)) {
        Ok(m) => m,
        Err(e) => return (false, format!("projection: {e}")),
    };
    let h = max_mean_curvature(&map);
    let ends = if map.punctures.is_empty() { Vec::new() } else { planar_end_check(&map) };
    let planar = !ends.is_empty() && ends.iter().all(|e| e.inner < 1e-10 || e.inner < e.outer);
    let pass = h < 1e-3 && planar;
    let residuals: Vec<String> = ends.iter().map(|e| format!("{:.1e}→{:.1e}", e.inner, e.outer)).collect();
    (pass, format!("{} ({}): max|H| {h:.2e}, {} end(s) [{}]", choice.source, if pass { "ok" } else { "no" }, ends.len(), residuals.join(", ")))
}

#[derive(Default)]
struct Tally {
    frenet: Vec<(bool, String)>,
    harmonic: Vec<(bool, String)>,
    oracle: Vec<(bool, String)>,
    round_trips: Vec<(bool, String)>,
    reverse: Vec<(bool, String)>,
    minimal: Vec<(bool, String)>,
    degree: Vec<(bool, String)>,
    split: Vec<(bool, String)>,
}

fn summarize(k: usize, title: &str, rows: &[(bool, String)]) {
    for (pass, text) in rows {
        line(&format!("    {} {text}", if *pass { "ok  " } else { "miss" }));
    }
    let passed = rows.iter().filter(|r| r.0).count();
    verdict(k, !rows.is_empty() && passed == rows.len(), title, &format!("{passed}/{} instances", rows.len()));
}

/// Residuals, harmonicity, degree and splitting of one twistor projection,
/// plus the tangent-based criteria for CP⁵ curves.
fn process(idx: usize, tc: &TestCurve, t: &mut Tally) {
    let name = &tc.name;
    let cp5 = tc.curve.dim() == 2;
    let mut res = Vec::new();
    let mut harm = Vec::new();
    let mut tangent_harm = Vec::new();
    let mut hp: Option<Hyperplane> = None;
    // hyperplanes are chosen on the coarse grid and reused on the fine one
    let mut trips: Vec<(u64, Option<(Hyperplane, f64)>, Vec<(f64, f64)>)> = vec![(42, None, Vec::new()), (7, None, Vec::new())];
    for n in [COARSE, FINE] {
        let f = twistor_project(&tc.curve, ChartGrid::new(n)).unwrap();
        res.push(canonical_residuals(&f));
        harm.push(harmonicity(&f).l2);
        if n == COARSE {
            let d = degree_check(&f).unwrap();
            let w = weierstrass_points(&f).unwrap();
            let expect = -2 * (f.n as i64 + 1) - d.ord_total as i64;
            let ok = w.exact && d.deg_kr_plus == expect && d.deg_kr_plus < 0;
            t.degree.push((ok, format!("{name}: deg K R₊ = {} = −2·{} − {} (exact {})", d.deg_kr_plus, f.n + 1, d.ord_total, w.exact)));
            let cert = splitting(&f, 11).map(|s| s.certificate).unwrap_or(0.0);
            t.split.push((cert > 1e-4, format!("{name}: σ_min {cert:.3e}")));
            if idx == 0 {
                let p = perturb_structure(&f, 0.1);
                let coarse = harmonicity(&p).l2;
                let fine = harmonicity(&perturb_structure(&twistor_project(&tc.curve, ChartGrid::new(FINE)).unwrap(), 0.1)).l2;
                let o = order(coarse, fine);
                t.harmonic.push((o < 0.5, format!("perturbed control on {name}: L² {coarse:.2e} → {fine:.2e}, order {o:.2}")));
            }
        }
        if n == FINE && !cp5 && idx < 5 {
            let w = willmore_energy(&f).energy;
            let choice = resolve_pole(&f, &Pole::Auto).unwrap();
            let map = stereographic(&f, &HVector::from_real(&choice.line)).unwrap();
            let o = classical_oracle(&map).unwrap();
            let rel = (w - o.energy).abs() / w.max(4.0 * std::f64::consts::PI);
            let ok = rel < 0.01 && o.excluded_fraction < 0.005;
            t.oracle.push((ok, format!("{name}: W {w:.3e}, classical {:.3e}, gap {rel:.2e}, excluded {:.2e}", o.energy, o.excluded_fraction)));
        }
        if cp5 {
            let h = hp.get_or_insert_with(|| choose_hyperplane(&f, 64, 42).unwrap()).clone();
            let tangent = tangent_curve(&f, &h).unwrap();
            tangent_harm.push(harmonicity(&tangent).l2);
            for (seed, chosen, out) in trips.iter_mut() {
                if idx == 12 && *seed == 7 {
                    continue;
                }
                let (h, _) = chosen.get_or_insert_with(|| {
                    let h = if *seed == 42 { h.clone() } else { choose_hyperplane(&f, 64, *seed).unwrap() };
                    let margin = h.margin(&f);
                    (h, margin)
                });
                out.push(round_trip(&f, h));
            }
            if n == FINE && idx < 12 {
                t.minimal.push(minimal_sphere_check(&tangent, &Pole::Auto));
                t.minimal.push(minimal_sphere_check(&tangent, &pole_at_max_a(&tangent)));
            }
            if n == COARSE {
                let mut rng = ChaCha8Rng::seed_from_u64(idx as u64);
                let form = make_willmore_form(&tangent, &HVector::random(&mut rng, tangent.m())).unwrap();
                let closed = form.closedness(&tangent.grid);
                let base = tangent.grid.point(Chart::A, tangent.grid.nearest(Complex64::new(0.0, 0.0)));
                let value = HVector::random(&mut rng, tangent.m());
                let row = match envelope(&tangent, &form, &base, &value, DEFAULT_CLOSED_TOL) {
                    Ok(env) => {
                        let r = canonical_residuals(&env);
                        (r.algebraic() < 1e-8 && r.canonical() < 1e-7, format!("{name}: closedness {closed:.2e}, envelope {}", frenet_line(&r)))
                    }
                    Err(e) => (false, format!("{name}: closedness of *Ãb {closed:.2e}; {e}")),
                };
                t.reverse.push(row);
            }
        }
    }
    let (c, f) = (&res[0], &res[1]);
    let ok = c.s_squared.max(f.s_squared) < 1e-8
        && c.flag_stability.max(f.flag_stability) < 1e-8
        && c.delta() < 1e-6
        && order(c.delta(), f.delta()) >= 3.0
        && c.canonical() < 1e-7;
    t.frenet.push((ok, format!("{name}: N={COARSE} {}; δ order {:.2}", frenet_line(c), order(c.delta(), f.delta()))));
    let o = order(harm[0], harm[1]);
    t.harmonic.push(((o - 2.0).abs() <= 0.5, format!("twistor {name}: L² {:.2e} → {:.2e}, order {o:.2}", harm[0], harm[1])));
    if cp5 {
        let o = order(tangent_harm[0], tangent_harm[1]);
        t.harmonic.push(((o - 2.0).abs() <= 0.5, format!("tangent of {name}: L² {:.2e} → {:.2e}, order {o:.2}", tangent_harm[0], tangent_harm[1])));
        for (seed, chosen, d) in trips.iter().filter(|t| t.2.len() == 2) {
            // an identity that already holds to rounding cannot improve further
            let improves = |a: f64, b: f64| b < a || b < 1e-12;
            let ok = d[0].0.max(d[0].1) < 1e-6 && improves(d[0].0, d[1].0) && improves(d[0].1, d[1].1);
            let margin = chosen.as_ref().map_or(0.0, |c| c.1);
            t.round_trips.push((
                ok,
                format!("{name}, hyperplane seed {seed} (margin {margin:.2e}): recover {:.2e} → {:.2e}, tangent∘envelope {:.2e} → {:.2e}", d[0].0, d[1].0, d[0].1, d[1].1),
            ));
        }
    }
}

fn determinism() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    admissible_curve(900, 6, 4).write(&dir.path().join("curve.json")).unwrap();
    let run = |out: &str| {
        let text = format!(
            r#"{{ "curve": "curve.json", "grid": 64, "seed": 9, "out": "{out}", "stages": [
                {{ "op": "twistor" }}, {{ "op": "tangent" }}, {{ "op": "energy", "refine": true }},
                {{ "op": "harmonicity", "refine": true }}, {{ "op": "stereographic" }},
                {{ "op": "mesh", "file": "surface.obj", "bake_w": true }} ] }}"#
        );
        let _ = run_pipeline(&PipelineConfig::from_json(&text).unwrap(), dir.path());
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path().join(out))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let (a, b) = (run("a"), run("b"));
    let bytes: usize = a.iter().map(|f| f.1.len()).sum();
    (a == b && !a.is_empty(), format!("{} files, {bytes} bytes, identical {}", a.len(), a == b))
}

#[test]
fn acceptance_criteria() {
    let mut t = Tally::default();
    for (idx, tc) in test_curves().iter().enumerate() {
        process(idx, tc, &mut t);
    }
    line("");
    summarize(1, "Frenet residual suite", &t.frenet);
    summarize(2, "harmonicity decays at order 2 ± 0.5", &t.harmonic);
    summarize(3, "dual energy oracle", &t.oracle);
    summarize(4, "round trips", &t.round_trips);
    summarize(5, "reverse Willmore construction", &t.reverse);
    summarize(6, "minimal sphere with planar ends", &t.minimal);
    summarize(7, "exact degree of K R₊", &t.degree);
    summarize(8, "splitting certificate", &t.split);
    let (pass, detail) = determinism();
    verdict(9, pass, "determinism", &detail);
}
