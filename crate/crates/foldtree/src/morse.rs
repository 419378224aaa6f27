//! Objects (κ-tuples of Morse functions on ℝ²), generators and gradient
//! fields.
//!
//! Sheet j of object i is f_{i,j} = a_i·|x|² + B_{ij}⟨θ_i, x⟩ plus an
//! optional sum of bumps supported inside D_R. Wrapped-fiber data use
//! a_i = κ − i.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Permutation;
use crate::geom::{M2, V2};
use crate::Error;

/// Smooth bump `amplitude·exp(1 − 1/(1 − ρ²))` for ρ = |x − center|/radius < 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub center: V2,
    pub radius: f64,
}

/// g(t) = exp(1 − 1/(1 − t)) on t < 1 with its first two derivatives.
fn bump_profile(t: f64) -> (f64, f64, f64) {
    if t >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let u = 1.0 - t;
    let g = libm::exp(1.0 - 1.0 / u);
    let g1 = -g / (u * u);
    let g2 = g * (2.0 * t - 1.0) / (u * u * u * u);
    (g, g1, g2)
}

impl Bump {
    fn parts(&self, x: V2) -> (f64, V2, M2) {
        let d = x - self.center;
        let r2 = self.radius * self.radius;
        let (g, g1, g2) = bump_profile(d.norm_sq() / r2);
        let a = self.amplitude;
        let grad = (a * g1 * 2.0 / r2) * d;
        let hess = M2::outer(d, d).scale(a * g2 * 4.0 / (r2 * r2)).add(&M2::scalar(a * g1 * 2.0 / r2));
        (a * g, grad, hess)
    }

    pub fn value(&self, x: V2) -> f64 {
        self.parts(x).0
    }

    /// Whether the support lies inside the open disk of radius `r`.
    pub fn inside(&self, r: f64) -> bool {
        self.center.norm() + self.radius < r
    }
}

/// One object of the chain.
#[derive(Clone, Debug, PartialEq)]
pub struct MorseTuple {
    pub index: usize,
    /// Quadratic coefficient a_i.
    pub quad: f64,
    pub theta: V2,
    /// B_{ij} for sheets j = 1..κ.
    pub b: Vec<f64>,
    /// Bumps per sheet; empty for the unperturbed object.
    pub perturbation: Vec<Vec<Bump>>,
}

impl MorseTuple {
    pub fn kappa(&self) -> usize {
        self.b.len()
    }

    fn bumps(&self, sheet: usize) -> &[Bump] {
        self.perturbation.get(sheet - 1).map_or(&[], Vec::as_slice)
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbation.iter().any(|s| !s.is_empty())
    }

    /// Linear part B_{ij}θ_i of sheet j.
    pub fn linear(&self, sheet: usize) -> V2 {
        self.b[sheet - 1] * self.theta
    }

    pub fn value(&self, sheet: usize, x: V2) -> f64 {
        self.quad * x.norm_sq()
            + self.linear(sheet).dot(x)
            + self.bumps(sheet).iter().map(|b| b.value(x)).sum::<f64>()
    }

    pub fn grad(&self, sheet: usize, x: V2) -> V2 {
        let mut g = 2.0 * self.quad * x + self.linear(sheet);
        for b in self.bumps(sheet) {
            g += b.parts(x).1;
        }
        g
    }

    pub fn hess(&self, sheet: usize, x: V2) -> M2 {
        let mut h = M2::scalar(2.0 * self.quad);
        for b in self.bumps(sheet) {
            h = h.add(&b.parts(x).2);
        }
        h
    }
}

/// Objects f₀, f₁, … with the common rank κ and outer radius R.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub kappa: usize,
    pub radius: f64,
    pub objects: Vec<MorseTuple>,
    pub seed: Option<u64>,
}

/// Outcome of the object checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjectReport {
    pub failures: Vec<alloc::string::String>,
}

impl ObjectReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Minimum gap between B coefficients within one tuple for generated data.
const MIN_B_GAP: f64 = 0.05;

impl Chain {
    /// Wrapped-fiber data: a_i = κ − i, θ_i = φ + i·Δ with a few degrees of
    /// jitter, and each B row drawn from (−0.9, 0.9) and sorted decreasingly.
    ///
    /// Rotating θ monotonically within a half-turn, with the same sheet
    /// order in every object, places the data in the chamber where the
    /// permutation labels of generators are compatible across hom spaces.
    pub fn wrapped(kappa: usize, objects: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let step = 25f64.to_radians();
        let jitter = 3f64.to_radians();
        let phi = rng.gen_range(0.0..core::f64::consts::TAU);
        let objs = (0..objects)
            .map(|i| {
                let angle = phi + i as f64 * step + rng.gen_range(-jitter..jitter);
                let b = loop {
                    let mut b: Vec<f64> = (0..kappa).map(|_| rng.gen_range(-0.9..0.9)).collect();
                    b.sort_by(|x, y| y.partial_cmp(x).unwrap());
                    if b.windows(2).all(|w| w[0] - w[1] >= MIN_B_GAP) {
                        break b;
                    }
                };
                MorseTuple {
                    index: i,
                    quad: (kappa as f64) - i as f64,
                    theta: V2::from_angle(angle),
                    b,
                    perturbation: Vec::new(),
                }
            })
            .collect();
        Chain { kappa, radius: 4.0, objects: objs, seed: Some(seed) }
    }

    pub fn object(&self, i: usize) -> Result<&MorseTuple, Error> {
        self.objects
            .get(i)
            .ok_or_else(|| Error::OutOfRange(format!("object {i} of {}", self.objects.len())))
    }

    pub fn value(&self, i: usize, sheet: usize, x: V2) -> f64 {
        self.objects[i].value(sheet, x)
    }

    pub fn is_perturbed(&self) -> bool {
        self.objects.iter().any(MorseTuple::is_perturbed)
    }

    /// Shape and within-tuple checks: ranks, unit directions, pairwise
    /// distinct B within each tuple (the nonvanishing of df_{i,j} − df_{i,k}),
    /// and perturbations supported inside D_R.
    pub fn check_objects(&self) -> ObjectReport {
        let mut r = ObjectReport::default();
        for o in &self.objects {
            if o.kappa() != self.kappa {
                r.failures.push(format!("object {}: {} sheets, expected {}", o.index, o.kappa(), self.kappa));
            }
            if (o.theta.norm() - 1.0).abs() > 1e-12 {
                r.failures.push(format!("object {}: theta is not a unit vector", o.index));
            }
            for j in 0..o.b.len() {
                for k in j + 1..o.b.len() {
                    if (o.b[j] - o.b[k]).abs() == 0.0 {
                        r.failures.push(format!(
                            "object {}: within-tuple nonvanishing fails, B[{}] = B[{}] = {}",
                            o.index,
                            j + 1,
                            k + 1,
                            o.b[j]
                        ));
                    }
                }
            }
            for (j, s) in o.perturbation.iter().enumerate() {
                if s.iter().any(|b| !b.inside(self.radius)) {
                    r.failures.push(format!("object {} sheet {}: perturbation leaves D_R", o.index, j + 1));
                }
            }
        }
        r
    }

    /// Normal form at infinity: |B| < 1, a_i = κ − i, plus the object checks.
    pub fn check_c4(&self) -> ObjectReport {
        let mut r = self.check_objects();
        for o in &self.objects {
            if o.quad != (self.kappa as f64) - o.index as f64 {
                r.failures.push(format!("object {}: quadratic coefficient {}", o.index, o.quad));
            }
            if o.b.iter().any(|b| b.abs() >= 1.0) {
                r.failures.push(format!("object {}: |B| >= 1", o.index));
            }
        }
        r
    }

    /// Angle between ∇(f_{i,j} − f_{i',k}) and ∂_r stays below π/4 on
    /// |x| = R for i < i', at `samples` points.
    pub fn check_c2(&self, samples: usize) -> ObjectReport {
        let mut r = ObjectReport::default();
        let lim = libm::cos(core::f64::consts::FRAC_PI_4);
        for (i, oi) in self.objects.iter().enumerate() {
            for oj in &self.objects[i + 1..] {
                for s in 0..samples {
                    let dir = V2::from_angle(core::f64::consts::TAU * s as f64 / samples as f64);
                    let x = self.radius * dir;
                    for j in 1..=self.kappa {
                        for k in 1..=self.kappa {
                            let g = oi.grad(j, x) - oj.grad(k, x);
                            if g.dot(dir) < lim * g.norm() {
                                r.failures.push(format!("objects {}/{} sheets {j}/{k} at {x:?}", oi.index, oj.index));
                            }
                        }
                    }
                }
            }
        }
        r
    }

    /// Cross-tuple gradient differences dominate within-tuple ones on
    /// |x| = R, by at least `factor`.
    pub fn check_c3(&self, samples: usize, factor: f64) -> ObjectReport {
        let mut r = ObjectReport::default();
        for s in 0..samples {
            let x = self.radius * V2::from_angle(core::f64::consts::TAU * s as f64 / samples as f64);
            let mut within: f64 = 0.0;
            let mut cross = f64::INFINITY;
            for (i, oi) in self.objects.iter().enumerate() {
                for j in 1..=self.kappa {
                    for k in 1..=self.kappa {
                        within = within.max((oi.grad(j, x) - oi.grad(k, x)).norm());
                        for oj in &self.objects[i + 1..] {
                            cross = cross.min((oi.grad(j, x) - oj.grad(k, x)).norm());
                        }
                    }
                }
            }
            if cross < factor * within {
                r.failures.push(format!("at {x:?}: cross {cross} vs within {within}"));
            }
        }
        r
    }
}

/// Position of sheet function f_{i,h} in a difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SheetRef {
    pub object: usize,
    pub sheet: usize,
}

/// Edge-dependent metric g = Id + ψ(x)·M_e, with ψ a bump equal to 1 at the
/// origin and vanishing outside D_R.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricConfig {
    pub edge_perturbation: BTreeMap<usize, M2>,
    pub seed: u64,
    pub epsilon: f64,
}

impl MetricConfig {
    pub fn euclidean() -> Self {
        MetricConfig::default()
    }

    /// Random symmetric perturbations of norm at most ε on the given edges.
    pub fn random(edges: impl IntoIterator<Item = usize>, epsilon: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edge_perturbation = edges
            .into_iter()
            .map(|e| {
                let (a, b, d): (f64, f64, f64) =
                    (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                // Frobenius norm bounds the operator norm
                let s = epsilon / libm::sqrt(a * a + 2.0 * b * b + d * d).max(1e-300);
                (e, M2::new(a * s, b * s, b * s, d * s))
            })
            .collect();
        MetricConfig { edge_perturbation, seed, epsilon }
    }

    pub fn on_edge(&self, e: usize) -> Option<M2> {
        self.edge_perturbation.get(&e).copied()
    }
}

/// The field ∇_g(f_plus − f_minus).
#[derive(Clone, Copy, Debug)]
pub struct GradientField<'a> {
    pub chain: &'a Chain,
    pub plus: SheetRef,
    pub minus: SheetRef,
    pub metric: Option<M2>,
}

impl<'a> GradientField<'a> {
    pub fn new(chain: &'a Chain, plus: SheetRef, minus: SheetRef, metric: Option<M2>) -> Self {
        GradientField { chain, plus, minus, metric }
    }

    fn obj(&self, s: SheetRef) -> &MorseTuple {
        &self.chain.objects[s.object]
    }

    /// (c, b) with field x ↦ c·x + b, when the field is affine.
    pub fn affine(&self) -> Option<(f64, V2)> {
        let (p, m) = (self.obj(self.plus), self.obj(self.minus));
        if self.metric.is_some() || p.is_perturbed() || m.is_perturbed() {
            return None;
        }
        Some((2.0 * (p.quad - m.quad), p.linear(self.plus.sheet) - m.linear(self.minus.sheet)))
    }

    /// Euclidean gradient of f_plus − f_minus.
    pub fn dh(&self, x: V2) -> V2 {
        self.obj(self.plus).grad(self.plus.sheet, x) - self.obj(self.minus).grad(self.minus.sheet, x)
    }

    pub fn hess_h(&self, x: V2) -> M2 {
        self.obj(self.plus)
            .hess(self.plus.sheet, x)
            .add(&self.obj(self.minus).hess(self.minus.sheet, x).scale(-1.0))
    }

    pub fn potential(&self, x: V2) -> f64 {
        self.obj(self.plus).value(self.plus.sheet, x) - self.obj(self.minus).value(self.minus.sheet, x)
    }

    fn metric_parts(&self, x: V2) -> Option<(M2, M2, [M2; 2])> {
        let mp = self.metric?;
        let r2 = self.chain.radius * self.chain.radius;
        let (psi, g1, _) = bump_profile(x.norm_sq() / r2);
        let g = M2::IDENTITY.add(&mp.scale(psi));
        let ginv = g.inverse()?;
        let dpsi = (2.0 * g1 / r2) * x;
        let d = [dpsi.x, dpsi.y].map(|c| ginv.mul(&mp.scale(-c)).mul(&ginv));
        Some((g, ginv, d))
    }

    pub fn eval(&self, x: V2) -> V2 {
        let dh = self.dh(x);
        match self.metric_parts(x) {
            Some((_, ginv, _)) => ginv.apply(dh),
            None => dh,
        }
    }

    /// Derivative of the field at x.
    pub fn jacobian(&self, x: V2) -> M2 {
        let h = self.hess_h(x);
        match self.metric_parts(x) {
            None => h,
            Some((_, ginv, d)) => {
                let dh = self.dh(x);
                let base = ginv.mul(&h);
                let c0 = d[0].apply(dh);
                let c1 = d[1].apply(dh);
                base.add(&M2::new(c0.x, c1.x, c0.y, c1.y))
            }
        }
    }
}

/// ∇(f_{i_r,h_r} − f_{i_l,h_l}) for the given region and sheet labels.
pub fn gradient_field<'a>(
    chain: &'a Chain,
    il: usize,
    hl: usize,
    ir: usize,
    hr: usize,
    metric: Option<M2>,
) -> Result<GradientField<'a>, Error> {
    for (i, h) in [(il, hl), (ir, hr)] {
        chain.object(i)?;
        if h == 0 || h > chain.kappa {
            return Err(Error::OutOfRange(format!("sheet {h} in rank {}", chain.kappa)));
        }
    }
    Ok(GradientField::new(
        chain,
        SheetRef { object: ir, sheet: hr },
        SheetRef { object: il, sheet: hl },
        metric,
    ))
}

/// A morphism basis element: one critical point per sheet.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub src: usize,
    pub dst: usize,
    /// Point j is critical for f_{dst,σ(j)} − f_{src,j}.
    pub perm: Permutation,
    pub points: Vec<V2>,
    pub grading: i64,
    pub action: f64,
}

impl Generator {
    /// Critical point on sheet j (1-based).
    pub fn point(&self, j: usize) -> V2 {
        self.points[j - 1]
    }
}

fn difference<'a>(chain: &'a Chain, src: usize, dst: usize, perm: &Permutation, j: usize) -> GradientField<'a> {
    GradientField::new(
        chain,
        SheetRef { object: dst, sheet: perm.apply(j) },
        SheetRef { object: src, sheet: j },
        None,
    )
}

/// Co-index 2 − (number of negative Hessian eigenvalues).
fn coindex(h: M2) -> Option<i64> {
    let [(l0, _), (l1, _)] = h.sym_eigen();
    let scale = l0.abs().max(l1.abs()).max(1.0);
    if l0.abs() < 1e-12 * scale || l1.abs() < 1e-12 * scale {
        return None;
    }
    Some(2 - (l0 < 0.0) as i64 - (l1 < 0.0) as i64)
}

/// Newton iteration for ∇h = 0 starting from x.
fn refine(f: &GradientField, mut x: V2, tol: f64) -> Option<V2> {
    for _ in 0..50 {
        let g = f.dh(x);
        if g.norm() <= tol {
            return Some(x);
        }
        x -= f.hess_h(x).inverse()?.apply(g);
        if !x.is_finite() {
            return None;
        }
    }
    (f.dh(x).norm() <= tol).then_some(x)
}

/// One generator per permutation σ ∈ 𝔖_κ, in lexicographic order of σ.
pub fn critical_points(chain: &Chain, src: usize, dst: usize) -> Result<Vec<Generator>, Error> {
    if src >= dst {
        return Err(Error::Malformed(format!("source {src} must precede target {dst}")));
    }
    let (so, dobj) = (chain.object(src)?, chain.object(dst)?);
    let perturbed = so.is_perturbed() || dobj.is_perturbed();
    let tol = if perturbed { 1e-10 } else { 1e-12 };
    let mut out = Vec::new();
    for perm in Permutation::all(chain.kappa) {
        let mut points = Vec::with_capacity(chain.kappa);
        let mut grading = 0;
        for j in 1..=chain.kappa {
            let f = difference(chain, src, dst, &perm, j);
            let c = 2.0 * (dobj.quad - so.quad);
            let degenerate = || Error::DegenerateHessian { src, dst, sheet: j };
            if c == 0.0 {
                return Err(degenerate());
            }
            let b = dobj.linear(perm.apply(j)) - so.linear(j);
            let mut x = (-1.0 / c) * b;
            if perturbed {
                x = refine(&f, x, tol).ok_or_else(degenerate)?;
            }
            grading += coindex(f.hess_h(x)).ok_or_else(degenerate)?;
            points.push(x);
        }
        let mut g = Generator { src, dst, perm, points, grading, action: 0.0 };
        g.action = action(chain, &g);
        out.push(g);
    }
    Ok(out)
}

/// Σ_j f_{dst,σ(j)}(q_j) − f_{src,j}(q_j).
pub fn action(chain: &Chain, g: &Generator) -> f64 {
    (1..=chain.kappa)
        .map(|j| chain.value(g.dst, g.perm.apply(j), g.point(j)) - chain.value(g.src, j, g.point(j)))
        .sum()
}

/// Σ_j co-index of q_j.
pub fn grading(chain: &Chain, g: &Generator) -> Result<i64, Error> {
    (1..=chain.kappa)
        .map(|j| {
            coindex(difference(chain, g.src, g.dst, &g.perm, j).hess_h(g.point(j)))
                .ok_or(Error::DegenerateHessian { src: g.src, dst: g.dst, sheet: j })
        })
        .sum()
}
