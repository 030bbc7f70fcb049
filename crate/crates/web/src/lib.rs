//! Three operations for the static page in `www/`: the MA measure of a tropical
//! function, a grid study of `|x|^2 / 2`, and the 1D solver.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use convexma::approx::{convergence_study, pa_from_grid, ConvexEvaluator};
use convexma::complex::linearity_complex;
use convexma::io::JsonArtifact;
use convexma::measure::{ma_measure, AtomicMeasure};
use convexma::pa::PAConvexFunction;
use convexma::poly::PiecewisePolynomial;
use convexma::rational::{int, parse_rational, rat, to_decimal, to_f64, Rational};
use convexma::solver1d::{solve_1d, verify_regularity, Anchor};
use convexma::verify::standard_tests;
use convexma::Polytope;

#[derive(Serialize)]
struct Atom {
    x: Vec<f64>,
    mass: String,
    mass_decimal: String,
}

fn atoms(mu: &AtomicMeasure) -> Vec<Atom> {
    mu.atoms()
        .iter()
        .map(|(p, m)| Atom { x: p.to_f64(), mass: m.to_string(), mass_decimal: to_decimal(m, 6) })
        .collect()
}

#[derive(Serialize)]
struct TropicalView {
    measure: serde_json::Value,
    atoms: Vec<Atom>,
    total: String,
    /// Maximal cells of the linearity complex, vertices in cyclic order for 2D drawing.
    cells: Vec<Vec<Vec<f64>>>,
}

/// Vertices of a convex polygon sorted by angle around their centroid.
fn cyclic(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = vs.len() as f64;
    let (cx, cy) = vs.iter().fold((0.0, 0.0), |(a, b), v| (a + v[0] / n, b + v[1] / n));
    let mut out = vs.to_vec();
    out.sort_by(|a, b| (a[1] - cy).atan2(a[0] - cx).total_cmp(&(b[1] - cy).atan2(b[0] - cx)));
    out
}

/// MA measure and linearity complex of a PA function given as JSON.
pub fn tropical_json(input: &str) -> Result<String, String> {
    let h = PAConvexFunction::from_json(input).map_err(|e| e.to_string())?;
    let mu = ma_measure(&h).map_err(|e| e.to_string())?;
    let complex = linearity_complex(&h).map_err(|e| e.to_string())?;
    let cells = complex
        .maximal_cells()
        .map(|c| {
            let vs: Vec<Vec<f64>> = c.vertices().iter().map(|v| v.to_f64()).collect();
            if h.ambient_dim() == 2 { cyclic(&vs) } else { vs }
        })
        .collect();
    let view = TropicalView {
        measure: serde_json::from_str(&mu.to_json()).expect("valid json"),
        atoms: atoms(&mu),
        total: mu.total_mass().to_string(),
        cells,
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

#[derive(Serialize)]
struct StudyView {
    report: serde_json::Value,
    /// Mass of the closed box `[-1/2, 1/2]^2` at each step.
    window_mass: Vec<String>,
    finest_atoms: Vec<Atom>,
}

/// Grid study of `|x|^2 / 2` on `[-1, 1]^2` for steps `1 / d`, `d` in `denominators`.
pub fn study_json(denominators: &[u32]) -> Result<String, String> {
    if denominators.is_empty() || denominators.iter().any(|&d| d == 0 || d > 32) {
        return Err("denominators must lie in 1..=32".into());
    }
    let steps: Vec<Rational> = denominators.iter().map(|&d| rat(1, d as i64)).collect();
    let f = ConvexEvaluator::half_square_norm(Polytope::cube(2, &int(-1), &int(1)));
    let report = convergence_study(&f, &steps, &standard_tests()).map_err(|e| e.to_string())?;
    let window_mass = report.rows.iter().map(|r| r.integrals[0].to_string()).collect();
    let finest = pa_from_grid(&f, steps.last().unwrap()).and_then(|h| ma_measure(&h)).map_err(|e| e.to_string())?;
    let view = StudyView {
        report: serde_json::from_str(&report.to_json()).expect("valid json"),
        window_mass,
        finest_atoms: atoms(&finest),
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

#[derive(Serialize)]
struct SolveView {
    phi: serde_json::Value,
    rendering: String,
    regularity_ok: bool,
    second_derivative_jumps: Vec<String>,
    /// `(x, phi(x))` samples for plotting.
    samples: Vec<[f64; 2]>,
}

/// Solves `deg_s phi'' = f`; `anchor` is `"x,v,s"`.
pub fn solve_json(density: &str, deg_s: u32, anchor: &str) -> Result<String, String> {
    let f = PiecewisePolynomial::from_json(density).map_err(|e| e.to_string())?;
    let parts: Vec<Rational> =
        anchor.split(',').map(parse_rational).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let [x, v, s] = <[Rational; 3]>::try_from(parts).map_err(|_| "anchor needs x,v,s".to_string())?;
    let sol = solve_1d(&f, deg_s as u64, &Anchor::new(x, v, s)).map_err(|e| e.to_string())?;
    let report = verify_regularity(&sol, &f);
    let (a, b) = (f.start().clone(), f.end().clone());
    let samples = (0..=100)
        .map(|k| {
            let x = &a + (&b - &a) * rat(k, 100);
            let y = sol.phi.eval(&x).expect("inside interval");
            [to_f64(&x), to_f64(&y)]
        })
        .collect();
    let view = SolveView {
        phi: serde_json::from_str(&sol.phi.to_json()).expect("valid json"),
        rendering: sol.phi.to_string(),
        regularity_ok: report.all_pass(),
        second_derivative_jumps: report.second_derivative_jumps().iter().map(|x| x.to_string()).collect(),
        samples,
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

#[wasm_bindgen]
pub fn tropical(input: &str) -> Result<String, JsValue> {
    tropical_json(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn study(denominators: &[u32]) -> Result<String, JsValue> {
    study_json(denominators).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn solve(density: &str, deg_s: u32, anchor: &str) -> Result<String, JsValue> {
    solve_json(density, deg_s, anchor).map_err(|e| JsValue::from_str(&e))
}
