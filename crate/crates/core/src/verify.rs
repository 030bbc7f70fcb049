//! The invariant suite behind `convexma verify`: every check runs over a corpus and
//! reports pass/fail with an exact witness on failure.

use std::fmt::Write as _;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::AffineFunctional;
use crate::approx::{convergence_study, default_tests, pa_from_grid, uniform_error, ConvexEvaluator, TestFunction};
use crate::complex::{linearity_complex, PolytopalComplex};
use crate::corpus::{random_affine, random_permutation, CorpusEntry};
use crate::error::Result;
use crate::io::JsonArtifact;
use crate::measure::{
    all_vertices_interior, ma_eval, ma_measure, ma_measure_by_definition, mixed_ma, subdifferential, toric_degree,
    AtomicMeasure, SubdifferentialOracle,
};
use crate::pa::PAConvexFunction;
use crate::poly::{PiecewisePolynomial, Polynomial};
use crate::polytope::{convex_hull, simplex_volume, Polytope};
use crate::rational::{factorial, int, rat, Rational, RationalPoint};
use crate::solver1d::{compare_with_ma, solve_1d, verify_regularity, Anchor};

/// A corpus entry with its linearity complex and measure precomputed.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub name: String,
    pub h: PAConvexFunction,
    pub complex: PolytopalComplex,
    pub measure: AtomicMeasure,
}

#[derive(Clone, Debug)]
pub struct Context {
    pub entries: Vec<Prepared>,
    pub seed: u64,
}

impl Context {
    pub fn new(corpus: &[CorpusEntry], seed: u64) -> Result<Self> {
        let entries = corpus.iter().map(prepare).collect::<Result<Vec<_>>>()?;
        Ok(Context { entries, seed })
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn by_dim(&self, n: usize) -> Vec<&Prepared> {
        self.entries.iter().filter(|e| e.h.ambient_dim() == n).collect()
    }
}

pub fn prepare(e: &CorpusEntry) -> Result<Prepared> {
    Ok(Prepared { name: e.name.clone(), h: e.h.clone(), complex: linearity_complex(&e.h)?, measure: ma_measure(&e.h)? })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub cases: usize,
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Counts cases and keeps the first failure.
#[derive(Default)]
struct Tally {
    cases: usize,
    witness: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn done(self) -> Result<CheckOutcome> {
        Ok(CheckOutcome { cases: self.cases, witness: self.witness })
    }
}

pub struct Check {
    pub id: &'static str,
    pub module: &'static str,
    pub statement: &'static str,
    run: fn(&Context) -> Result<CheckOutcome>,
}

impl Check {
    pub fn run(&self, ctx: &Context) -> CheckReport {
        let t = Instant::now();
        let outcome = (self.run)(ctx).unwrap_or_else(|e| CheckOutcome { cases: 0, witness: Some(format!("error: {e}")) });
        CheckReport { id: self.id, module: self.module, outcome, millis: t.elapsed().as_millis() }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub id: &'static str,
    pub module: &'static str,
    pub outcome: CheckOutcome,
    pub millis: u128,
}

pub fn run_all(ctx: &Context) -> Vec<CheckReport> {
    checks().iter().map(|c| c.run(ctx)).collect()
}

pub fn format_table(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    let w = reports.iter().map(|r| r.id.len()).max().unwrap_or(0);
    for r in reports {
        let status = if r.outcome.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{status}  {:<w$}  {:>5} cases  {:>6} ms", r.id, r.outcome.cases, r.millis);
        if let Some(wit) = &r.outcome.witness {
            let _ = writeln!(s, "      witness: {wit}");
        }
    }
    let failed = reports.iter().filter(|r| !r.outcome.passed()).count();
    let _ = writeln!(s, "{} checks, {} failed", reports.len(), failed);
    s
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "geom.hv_round_trip", module: "geom", statement: "H->V and V->H reproduce the polytope", run: hv_round_trip },
        Check { id: "geom.volume_invariance", module: "geom", statement: "volume is unimodular-invariant and degree-n homogeneous", run: volume_invariance },
        Check { id: "geom.triangulation_additivity", module: "geom", statement: "two triangulations give the same volume", run: triangulation_additivity },
        Check { id: "geom.containment", module: "geom", statement: "vertices contained, centroid strictly inside", run: containment },
        Check { id: "subdivision.pieces_agree", module: "subdivision", statement: "max of pieces equals the cell's piece at cell vertices", run: pieces_agree },
        Check { id: "subdivision.common_faces", module: "subdivision", statement: "maximal cells meet in common faces and cover the domain", run: common_faces },
        Check { id: "subdivision.refinement_algebra", module: "subdivision", statement: "common refinement is commutative and associative", run: refinement_algebra },
        Check { id: "subdivision.affine_shift", module: "subdivision", statement: "adding an affine function keeps the linearity complex", run: complex_affine_shift },
        Check { id: "pa.irredundant", module: "pa", statement: "canonical pieces are each active on a full-dimensional cell", run: irredundant },
        Check { id: "ma.measure_invariants", module: "ma", statement: "positive masses, distinct points, cached total", run: measure_invariants },
        Check { id: "ma.definition_route", module: "ma", statement: "dual-subdivision measure equals the definition", run: definition_route },
        Check { id: "ma.homogeneity", module: "ma", statement: "MA(t h) = t^n MA(h)", run: homogeneity },
        Check { id: "ma.affine_invariance", module: "ma", statement: "MA(h + a) = MA(h), subdifferentials shift by slope(a)", run: affine_invariance },
        Check { id: "ma.support", module: "ma", statement: "atoms sit at interior vertices; non-vertices carry no mass", run: support },
        Check { id: "ma.newton_tiling", module: "ma", statement: "total mass is vol(conv slopes) when all vertices are interior", run: newton_tiling },
        Check { id: "ma.overlaps", module: "ma", statement: "subdifferentials at distinct vertices overlap in measure zero", run: overlaps },
        Check { id: "ma.translation_step", module: "ma", statement: "subdifferential(h, u) = subdifferential(h(. + u) - h(u), 0)", run: translation_step },
        Check { id: "ma.degree_identity", module: "ma", statement: "toric degree = deg_s n! MA(h)(u), integral after rescaling", run: degree_identity },
        Check { id: "ma.mixed_diagonal", module: "ma", statement: "mixed MA of n copies of h is MA(h)", run: mixed_diagonal },
        Check { id: "ma.mixed_symmetry", module: "ma", statement: "mixed MA is permutation invariant", run: mixed_symmetry },
        Check { id: "ma.c2_density", module: "ma", statement: "grid MA of |x|^2/2 over the half box approaches 1", run: c2_density },
        Check { id: "approx.interpolation", module: "approx", statement: "grid approximant matches samples and dominates f", run: interpolation },
        Check { id: "approx.monotone_refinement", module: "approx", statement: "finer grids give pointwise smaller approximants", run: monotone_refinement },
        Check { id: "approx.cauchy", module: "approx", statement: "errors and test-integral differences decrease", run: cauchy },
        Check { id: "solver.exactness", module: "solver1d", statement: "deg_s phi'' = f coefficientwise", run: solver_exactness },
        Check { id: "solver.uniqueness", module: "solver1d", statement: "anchors change phi by an affine function", run: solver_uniqueness },
        Check { id: "solver.regularity", module: "solver1d", statement: "phi gains two orders of smoothness", run: solver_regularity },
        Check { id: "solver.ma_consistency", module: "solver1d", statement: "discrete MA mass of interpolants within the recorded bound", run: solver_ma_consistency },
        Check { id: "io.round_trip", module: "io", statement: "JSON artifacts re-parse to equal values", run: io_round_trip },
    ]
}

/// Unimodular integer map `x -> M x + s` with `M` a shear (or reflection when `n = 1`).
fn unimodular(n: usize) -> (Vec<Vec<Rational>>, RationalPoint) {
    let mut m: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect();
    if n == 1 {
        m[0][0] = int(-1);
    } else {
        m[0][1] = int(2);
    }
    (m, RationalPoint::new((0..n).map(|i| rat(i as i64 + 1, 3)).collect()))
}

/// Polytopes exercised by the geometry checks: domains, maximal cells, atom subdifferentials.
fn test_polytopes(ctx: &Context) -> Result<Vec<(String, Polytope)>> {
    let mut out = Vec::new();
    for e in &ctx.entries {
        out.push((format!("{} domain", e.name), e.h.domain().clone()));
        for (i, c) in e.complex.maximal_cells().enumerate() {
            out.push((format!("{} cell {i}", e.name), c.clone()));
        }
        for (u, _) in e.measure.atoms() {
            out.push((format!("{} subdifferential at {u}", e.name), subdifferential(&e.h, u)?));
        }
    }
    Ok(out)
}

fn hv_round_trip(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for (name, p) in test_polytopes(ctx)? {
        let from_h = Polytope::from_halfspaces(p.ambient_dim(), &p.inequalities())?;
        let from_v = convex_hull(p.vertices())?;
        t.check(from_h == p && from_v == p, || name.clone());
    }
    t.done()
}

fn volume_invariance(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let s = rat(3, 2);
    for (name, p) in test_polytopes(ctx)? {
        let n = p.ambient_dim();
        let (m, shift) = unimodular(n);
        let v = p.volume();
        let image = p.affine_image(&m, &shift);
        t.check(image.volume() == v, || format!("{name}: image volume {} vs {v}", image.volume()));
        let scaled = p.scale(&s).volume();
        let want = num_traits::pow(s.clone(), n) * &v;
        t.check(scaled == want, || format!("{name}: scaled volume {scaled} vs {want}"));
    }
    t.done()
}

fn triangulation_additivity(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for (name, p) in test_polytopes(ctx)? {
        let a: Rational = p.triangulate(false).iter().map(simplex_volume).sum();
        let b: Rational = p.triangulate(true).iter().map(simplex_volume).sum();
        t.check(a == b && a == p.volume(), || format!("{name}: {a} vs {b}"));
    }
    t.done()
}

fn containment(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for (name, p) in test_polytopes(ctx)? {
        for v in p.vertices() {
            t.check(p.contains(v), || format!("{name}: vertex {v}"));
        }
        if p.is_full_dimensional() {
            let c = p.vertex_centroid().expect("nonempty");
            t.check(p.contains_strict(&c), || format!("{name}: centroid {c}"));
        }
    }
    t.done()
}

fn cell_piece(h: &PAConvexFunction, cell: &Polytope) -> Option<usize> {
    let active = h.active_pieces(&cell.vertex_centroid()?);
    (active.len() == 1).then(|| active[0])
}

fn pieces_agree(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        for cell in e.complex.maximal_cells() {
            let Some(i) = cell_piece(&e.h, cell) else {
                t.check(false, || format!("{}: no unique piece on cell {:?}", e.name, cell.vertices()));
                continue;
            };
            for v in cell.vertices() {
                t.check(e.h.eval(v) == e.h.pieces()[i].eval(v), || format!("{} at {v}", e.name));
            }
        }
    }
    t.done()
}

fn common_faces(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        let r = e.complex.validate();
        t.check(r.is_ok(), || format!("{}: {}", e.name, r.unwrap_err()));
    }
    t.done()
}

fn refinement_algebra(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for n in 1..=3 {
        let es = ctx.by_dim(n);
        for w in es.windows(3).take(if n == 3 { 1 } else { 3 }) {
            let (a, b, c) = (&w[0].complex, &w[1].complex, &w[2].complex);
            let ab = a.common_refinement(b)?;
            let ba = b.common_refinement(a)?;
            t.check(ab.signature() == ba.signature(), || format!("{} x {} not commutative", w[0].name, w[1].name));
            let left = ab.common_refinement(c)?;
            let right = a.common_refinement(&b.common_refinement(c)?)?;
            t.check(left.signature() == right.signature(), || {
                format!("{} x {} x {} not associative", w[0].name, w[1].name, w[2].name)
            });
        }
    }
    t.done()
}

fn complex_affine_shift(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ctx.rng(1);
    for e in &ctx.entries {
        let a = random_affine(&mut rng, e.h.ambient_dim());
        let shifted = linearity_complex(&e.h.add_affine(&a))?;
        t.check(shifted.signature() == e.complex.signature(), || format!("{} + ({a})", e.name));
    }
    t.done()
}

fn irredundant(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        let canon = e.h.canonicalize()?;
        t.check(canon == e.h, || format!("{}: canonical form differs", e.name));
        let mut seen = vec![false; e.h.pieces().len()];
        for cell in e.complex.maximal_cells() {
            if let Some(i) = cell_piece(&e.h, cell) {
                seen[i] = true;
            }
        }
        t.check(seen.iter().all(|&s| s), || format!("{}: piece without a cell", e.name));
    }
    t.done()
}

fn measure_invariants(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        let mu = &e.measure;
        let sum: Rational = mu.atoms().iter().map(|(_, m)| m.clone()).sum();
        t.check(&sum == mu.total_mass(), || format!("{}: total {} vs {sum}", e.name, mu.total_mass()));
        t.check(mu.atoms().iter().all(|(_, m)| m.is_positive()), || format!("{}: nonpositive mass", e.name));
        t.check(mu.atoms().windows(2).all(|w| w[0].0 < w[1].0), || format!("{}: repeated atom", e.name));
    }
    t.done()
}

fn definition_route(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        let d = ma_measure_by_definition(&e.h)?;
        t.check(d == e.measure, || format!("{}: {:?} vs {:?}", e.name, d.atoms(), e.measure.atoms()));
    }
    t.done()
}

fn homogeneity(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        let n = e.h.ambient_dim();
        for s in [rat(3, 2), int(2), rat(1, 3)] {
            let scaled = ma_measure(&e.h.scale(&s)?)?;
            let want = e.measure.scale(&num_traits::pow(s.clone(), n))?;
            t.check(scaled == want, || format!("{} scaled by {s}", e.name));
        }
    }
    t.done()
}

fn affine_invariance(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ctx.rng(2);
    for e in &ctx.entries {
        let a = random_affine(&mut rng, e.h.ambient_dim());
        let g = e.h.add_affine(&a);
        t.check(ma_measure(&g)? == e.measure, || format!("{} + ({a})", e.name));
        for (u, _) in e.measure.atoms() {
            let moved = subdifferential(&e.h, u)?.translate(&a.slope_point());
            t.check(subdifferential(&g, u)? == moved, || format!("{} + ({a}) at {u}", e.name));
        }
    }
    t.done()
}

/// Random point of the open domain box with coordinates `k / 97`.
fn random_interior_point(rng: &mut impl Rng, domain: &Polytope) -> RationalPoint {
    let (lo, hi) = domain.bounding_box().expect("nonempty");
    loop {
        let p = RationalPoint::new(
            lo.iter()
                .zip(&hi)
                .map(|(l, h)| {
                    let k = rng.gen_range(1..97);
                    l + (h - l) * rat(k, 97)
                })
                .collect(),
        );
        if domain.contains_strict(&p) {
            return p;
        }
    }
}

/// Support: atoms at interior vertices, and `probes` random non-vertex interior points
/// per function with zero subdifferential volume.
pub fn support_check(entries: &[Prepared], probes: usize, seed: u64) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for e in entries {
        let interior = e.complex.interior_vertices();
        for (u, _) in e.measure.atoms() {
            t.check(interior.contains(u), || format!("{}: atom {u} is not an interior vertex", e.name));
        }
        let oracle = SubdifferentialOracle::new(&e.h)?;
        let vertices = e.complex.vertices();
        let mut done = 0;
        while done < probes {
            let x = random_interior_point(&mut rng, e.h.domain());
            if vertices.contains(&x) {
                continue;
            }
            done += 1;
            let vol = oracle.at(&x)?.volume();
            t.check(vol.is_zero(), || format!("{}: volume {vol} at {x}", e.name));
        }
    }
    t.done()
}

fn support(ctx: &Context) -> Result<CheckOutcome> {
    support_check(&ctx.entries, 10, ctx.seed ^ 3)
}

/// Entries whose dual vertices all lie in the open domain get the tiling identity.
pub fn newton_tiling_check(entries: &[Prepared]) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in entries {
        if !all_vertices_interior(&e.h)? {
            continue;
        }
        let slopes: Vec<RationalPoint> = e.h.pieces().iter().map(AffineFunctional::slope_point).collect();
        let newton = convex_hull(&slopes)?.volume();
        t.check(e.measure.total_mass() == &newton, || format!("{}: mass {} vs {newton}", e.name, e.measure.total_mass()));
    }
    t.done()
}

fn newton_tiling(ctx: &Context) -> Result<CheckOutcome> {
    newton_tiling_check(&ctx.entries)
}

pub fn overlaps_check(entries: &[Prepared]) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in entries {
        let subs: Vec<(RationalPoint, Polytope)> = e
            .measure
            .atoms()
            .iter()
            .map(|(u, _)| Ok((u.clone(), subdifferential(&e.h, u)?)))
            .collect::<Result<_>>()?;
        for (i, (u, a)) in subs.iter().enumerate() {
            for (v, b) in &subs[i + 1..] {
                let vol = a.intersection(b)?.volume();
                t.check(vol.is_zero(), || format!("{}: {u} and {v} overlap in volume {vol}", e.name));
            }
        }
    }
    t.done()
}

fn overlaps(ctx: &Context) -> Result<CheckOutcome> {
    overlaps_check(&ctx.entries)
}

pub fn translation_check(entries: &[Prepared]) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in entries {
        let n = e.h.ambient_dim();
        for u in e.complex.interior_vertices() {
            let direct = subdifferential(&e.h, &u)?;
            let centred = subdifferential(&e.h.recentered(&u), &RationalPoint::origin(n))?;
            t.check(direct == centred, || format!("{} at {u}", e.name));
        }
    }
    t.done()
}

fn translation_step(ctx: &Context) -> Result<CheckOutcome> {
    translation_check(&ctx.entries)
}

pub fn degree_check(entries: &[Prepared], deg_s: u64) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in entries {
        let n = e.h.ambient_dim();
        let oracle = SubdifferentialOracle::new(&e.h)?;
        for (u, mass) in e.measure.atoms() {
            let r = toric_degree(&e.h, u, deg_s)?;
            let sub = oracle.at(u)?;
            let want = Rational::from_integer(factorial(n) * deg_s) * sub.volume();
            t.check(r.toric_degree == want && &r.ma_mass == mass, || {
                format!("{} at {u}: degree {} vs {want}", e.name, r.toric_degree)
            });
            t.check(r.toric_degree.is_integer(), || format!("{} at {u}: degree {} not integral", e.name, r.toric_degree));
        }
    }
    t.done()
}

fn degree_identity(ctx: &Context) -> Result<CheckOutcome> {
    degree_check(&ctx.entries, 1)
}

fn mixed_diagonal(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        let copies = vec![e.h.clone(); e.h.ambient_dim()];
        t.check(mixed_ma(&copies)? == e.measure, || e.name.clone());
    }
    t.done()
}

fn mixed_symmetry(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ctx.rng(4);
    for n in 2..=3 {
        let es = ctx.by_dim(n);
        for w in es.windows(n).take(2) {
            let hs: Vec<PAConvexFunction> = w.iter().map(|e| e.h.clone()).collect();
            let base = mixed_ma(&hs)?;
            let perm = random_permutation(&mut rng, n);
            let permuted: Vec<PAConvexFunction> = perm.iter().map(|&i| hs[i].clone()).collect();
            let names: Vec<&str> = w.iter().map(|e| e.name.as_str()).collect();
            t.check(mixed_ma(&permuted)? == base, || format!("{names:?} permuted by {perm:?}"));
        }
    }
    t.done()
}

fn half_square_on_box() -> ConvexEvaluator {
    ConvexEvaluator::half_square_norm(Polytope::cube(2, &int(-1), &int(1)))
}

fn c2_density(_: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let f = half_square_on_box();
    let window = Polytope::cube(2, &rat(-1, 2), &rat(1, 2));
    let mut last: Option<Rational> = None;
    for d in [4, 8, 16] {
        let mu = ma_measure(&pa_from_grid(&f, &rat(1, d))?)?;
        let err = (ma_eval(&mu, &window) - int(1)).abs();
        t.check(last.as_ref().map_or(true, |l| &err < l), || format!("error {err} at step 1/{d} did not decrease"));
        last = Some(err);
    }
    t.done()
}

fn interpolation(_: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let f = ConvexEvaluator::quadratic(
        Polytope::cube(2, &int(-1), &int(1)),
        vec![vec![int(2), int(1)], vec![int(1), int(3)]],
        vec![int(1), int(-1)],
        int(0),
    );
    let step = rat(1, 4);
    let h = pa_from_grid(&f, &step)?;
    for k in lattice(&step, 2) {
        t.check(h.eval(&k) == f.eval(&k), || format!("sample {k}"));
    }
    for k in lattice(&rat(1, 12), 2) {
        t.check(h.eval(&k) >= f.eval(&k), || format!("probe {k}"));
    }
    t.done()
}

/// Points of `step Z^n` in `[-1, 1]^n`.
fn lattice(step: &Rational, n: usize) -> Vec<RationalPoint> {
    let m = (Rational::one() / step).to_integer();
    let m: i64 = i64::try_from(m).expect("small grid");
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Rational>| {
                (-m..=m).map(move |k| {
                    let mut q = p.clone();
                    q.push(step * int(k));
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(RationalPoint::new).collect()
}

fn monotone_refinement(_: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let f = ConvexEvaluator::new(Polytope::cube(2, &int(-1), &int(1)), |p| {
        let s = &p[0] - &p[1];
        &s * &s * &s * &s + &p[0] * &p[0] + p[1].clone().max(int(0))
    });
    let coarse = pa_from_grid(&f, &rat(1, 2))?;
    let fine = pa_from_grid(&f, &rat(1, 4))?;
    for k in lattice(&rat(1, 8), 2) {
        let (c, fi, v) = (coarse.eval(&k), fine.eval(&k), f.eval(&k));
        t.check(c >= fi && fi >= v, || format!("at {k}: coarse {c}, fine {fi}, f {v}"));
    }
    t.done()
}

/// Default test functions on `[-1, 1]^2`: indicator of `[-1/2, 1/2]^2`, `1 + x + 2y`
/// clipped to it, and `x y`.
pub fn standard_tests() -> Vec<TestFunction> {
    default_tests(&Polytope::cube(2, &int(-1), &int(1)))
}

fn cauchy(_: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let r = convergence_study(&half_square_on_box(), &[rat(1, 2), rat(1, 4), rat(1, 8)], &standard_tests())?;
    for w in r.rows.windows(2) {
        t.check(w[1].error < w[0].error, || format!("error {} at step {} did not decrease", w[1].error, w[1].step));
    }
    for (name, diffs) in r.test_names.iter().zip(r.cauchy_differences()) {
        for w in diffs.windows(2) {
            t.check(w[1] <= w[0], || format!("{name}: differences {} then {}", w[0], w[1]));
        }
    }
    // exact probe error of a pure quadratic is known: step^2 / 4 on the midpoint lattice
    let h = pa_from_grid(&half_square_on_box(), &rat(1, 4))?;
    let e = uniform_error(&half_square_on_box(), &h, &rat(1, 8))?;
    t.check(e.probe_max <= e.oscillation_bound, || format!("probe {} above oscillation {}", e.probe_max, e.oscillation_bound));
    t.done()
}

/// Random nonnegative piecewise polynomial on `[0, 1]`: squares plus nonnegative constants.
fn random_density(rng: &mut impl Rng) -> PiecewisePolynomial {
    let k = rng.gen_range(1..=3);
    let mut bps = vec![int(0)];
    for i in 1..k {
        bps.push(rat(i as i64, k as i64) + rat(rng.gen_range(-1..=1), 12 * k as i64));
    }
    bps.push(int(1));
    let pieces = (0..k)
        .map(|_| {
            let p = Polynomial::new((0..rng.gen_range(1..=3)).map(|_| int(rng.gen_range(-3..=3))).collect());
            p.clone() * p + Polynomial::constant(rat(rng.gen_range(0..=4), 2))
        })
        .collect();
    PiecewisePolynomial::new(bps, pieces).expect("increasing breakpoints")
}

fn solver_exactness(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ctx.rng(5);
    for _ in 0..20 {
        let f = random_density(&mut rng);
        let deg_s = rng.gen_range(1..=4u64);
        let s = solve_1d(&f, deg_s, &Anchor::new(rat(rng.gen_range(0..=4), 4), int(1), int(-1)))?;
        let ok = s
            .phi
            .pieces()
            .iter()
            .zip(f.pieces())
            .all(|(p, q)| p.nth_derivative(2).scale(&int(deg_s as i64)) == *q);
        t.check(ok, || format!("f = {f}"));
        t.check(s.phi.pieces().iter().enumerate().all(|(i, p)| {
            let (a, b) = s.phi.interval(i);
            p.nth_derivative(2).negative_witness(a, b).is_none()
        }), || format!("phi not convex for f = {f}"));
    }
    t.done()
}

fn solver_uniqueness(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ctx.rng(6);
    for _ in 0..20 {
        let f = random_density(&mut rng);
        let a1 = Anchor::new(rat(rng.gen_range(0..=4), 4), int(rng.gen_range(-2..=2)), int(rng.gen_range(-2..=2)));
        let a2 = Anchor::new(rat(rng.gen_range(0..=4), 4), int(rng.gen_range(-2..=2)), int(rng.gen_range(-2..=2)));
        let d = solve_1d(&f, 1, &a1)?.phi.add(&solve_1d(&f, 1, &a2)?.phi.scale(&int(-1)))?.simplified();
        t.check(d.pieces().len() == 1 && d.pieces()[0].degree().unwrap_or(0) <= 1, || format!("f = {f}, difference {d}"));
    }
    t.done()
}

fn solver_regularity(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ctx.rng(7);
    for _ in 0..20 {
        let f = random_density(&mut rng);
        let s = solve_1d(&f, rng.gen_range(1..=3), &Anchor::origin())?;
        let r = verify_regularity(&s, &f);
        t.check(r.all_pass(), || format!("f = {f}: {r:?}"));
    }
    t.done()
}

fn solver_ma_consistency(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    let mut rng = ctx.rng(8);
    for _ in 0..5 {
        let f = random_density(&mut rng);
        let s = solve_1d(&f, 1, &Anchor::origin())?;
        let mut last: Option<Rational> = None;
        for m in [8, 16, 32] {
            let c = compare_with_ma(&s, &rat(1, m))?;
            t.check(c.error() <= c.bound, || format!("f = {f}, step 1/{m}: error {} above bound {}", c.error(), c.bound));
            t.check(last.as_ref().map_or(true, |l| &c.bound <= l), || format!("f = {f}: bound grew at 1/{m}"));
            last = Some(c.bound);
        }
    }
    t.done()
}

fn rt<T: JsonArtifact + PartialEq>(x: &T) -> Result<bool> {
    let s = x.to_json();
    let back = T::from_json(&s)?;
    Ok(&back == x && back.to_json() == s)
}

fn io_round_trip(ctx: &Context) -> Result<CheckOutcome> {
    let mut t = Tally::default();
    for e in &ctx.entries {
        t.check(rt(&e.h)?, || format!("{}: function", e.name));
        t.check(rt(&e.complex)?, || format!("{}: complex", e.name));
        t.check(rt(&e.measure)?, || format!("{}: measure", e.name));
        if let Some((u, _)) = e.measure.atoms().first() {
            t.check(rt(&toric_degree(&e.h, u, 2)?)?, || format!("{}: degree report", e.name));
        }
    }
    let mut rng = ctx.rng(9);
    let f = random_density(&mut rng);
    t.check(rt(&f)?, || "density".into());
    t.check(rt(&solve_1d(&f, 2, &Anchor::origin())?)?, || "solution".into());
    let study = convergence_study(&half_square_on_box(), &[rat(1, 2), rat(1, 4)], &standard_tests())?;
    t.check(rt(&study)?, || "convergence report".into());
    t.done()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::generate;

    #[test]
    fn unimodular_map_has_unit_determinant() {
        for n in 1..=3 {
            let (m, _) = unimodular(n);
            assert_eq!(crate::linalg::det(&m).abs(), int(1));
        }
    }

    #[test]
    fn small_corpus_passes() {
        let ctx = Context::new(&generate(11, 3), 11).unwrap();
        let reports = run_all(&ctx);
        let table = format_table(&reports);
        assert!(reports.iter().all(|r| r.outcome.passed()), "{table}");
    }
}
