//! Independent checks on accepted flow trees.

use alloc::vec;
use alloc::vec::Vec;

use super::flow::exp_flow;
use super::problem::FlowTreeProblem;
use crate::geom::V2;
use crate::morse::GradientField;
use crate::trees::EdgeClass;
use crate::Error;

/// Sampled positions along one strand, in the outward direction.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub strand: usize,
    pub base: usize,
    pub points: Vec<V2>,
}

/// Gauss–Legendre nodes and weights on [−1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Parametrized piece of a strand: γ(s) = flow of `field` for time s from
/// `start`, for s between 0 and `span` (negative spans run backwards).
struct Piece<'a> {
    field: GradientField<'a>,
    start: V2,
    span: f64,
}

impl Piece<'_> {
    fn at(&self, s: f64) -> Result<V2, Error> {
        exp_flow(&self.field, s, self.start)
    }

    /// ∫ ⟨dh, V⟩ ds along the piece, composite Gauss–Legendre.
    fn integral(&self, nodes: &[(f64, f64)]) -> Result<f64, Error> {
        if self.span == 0.0 {
            return Ok(0.0);
        }
        let rate = self.field.jacobian(self.start).sym_eigen().iter().map(|(l, _)| l.abs()).fold(1.0, f64::max);
        let panels = (libm::ceil(self.span.abs() * rate * 2.0) as usize).clamp(1, 2000);
        let w = self.span / panels as f64;
        let mut total = 0.0;
        let mut a_pt = self.start;
        for k in 0..panels {
            let mut acc = 0.0;
            for &(x, wt) in nodes {
                let ds = 0.5 * w * (x + 1.0);
                let p = match self.field.affine() {
                    Some(_) => self.at(k as f64 * w + ds)?,
                    None => exp_flow(&self.field, ds, a_pt)?,
                };
                acc += wt * self.field.dh(p).dot(self.field.eval(p));
            }
            total += 0.5 * w * acc;
            a_pt = match self.field.affine() {
                Some(_) => self.at((k + 1) as f64 * w)?,
                None => exp_flow(&self.field, w, a_pt)?,
            };
        }
        // a backward span integrates over [span, 0]
        Ok(if self.span < 0.0 { -total } else { total })
    }
}

/// The parametrized piece of every strand for the unknowns `u`.
fn pieces<'a>(p: &FlowTreeProblem<'a>, u: &[f64]) -> Result<Vec<(usize, Piece<'a>)>, Error> {
    let shot = p.shoot(u)?;
    let g = &p.graph;
    let top = &g.topology;
    let single = g.base.edges.len() == 1;
    let mut out = Vec::with_capacity(g.edges.len());
    for (s, le) in g.edges.iter().enumerate() {
        let field = p.strand_field(s);
        let start = shot.strand_ends[s].0;
        let class = top.class[le.base];
        let span = if let Some(li) = p.layout.length_index(le.base) {
            u[li]
        } else if le.base == top.e0 && !single {
            // the root strand runs backwards from its seed to q₀
            let sheet = p.layout.root_strands.iter().position(|&r| r == s);
            match sheet {
                Some(j) if p.output_pins(j) => 0.0,
                _ => -p.truncation,
            }
        } else if class == EdgeClass::ExteriorStem {
            let tip_pinned = field.jacobian(start).sym_eigen().iter().all(|(l, _)| *l > 0.0);
            if tip_pinned {
                0.0
            } else {
                p.truncation
            }
        } else {
            0.0
        };
        out.push((s, Piece { field, start, span }));
    }
    Ok(out)
}

/// Both sides of the action identity: 𝒜(q₀) − Σ𝒜(qᵢ) from the generators,
/// and minus the sum over strands of ∫⟨dh, V⟩ by quadrature.
///
/// Errors with [`Error::Accuracy`] when they differ by more than 1e-8.
pub fn action_deficit(p: &FlowTreeProblem, u: &[f64]) -> Result<(f64, f64), Error> {
    let gen_side = p.output.action - p.inputs.iter().map(|q| q.action).sum::<f64>();
    let nodes = gauss_legendre(16);
    let mut quad = 0.0;
    for (_, piece) in pieces(p, u)? {
        quad -= piece.integral(&nodes)?;
    }
    if (gen_side - quad).abs() > 1e-8 {
        return Err(Error::Accuracy(alloc::format!(
            "action identity: generators give {gen_side}, quadrature gives {quad}"
        )));
    }
    Ok((gen_side, quad))
}

/// Samples each strand at `samples` (at least 64) points.
pub fn sample_trajectories(p: &FlowTreeProblem, u: &[f64], samples: usize) -> Result<Vec<Trajectory>, Error> {
    let n = samples.max(64);
    let mut out = Vec::new();
    for (s, piece) in pieces(p, u)? {
        let mut points = vec![piece.start; n];
        if piece.span != 0.0 {
            for (i, pt) in points.iter_mut().enumerate() {
                *pt = piece.at(piece.span * i as f64 / (n - 1) as f64)?;
            }
        }
        out.push(Trajectory { strand: s, base: p.graph.edges[s].base, points });
    }
    Ok(out)
}

/// Every sampled point lies in the closed disk of radius R (up to 1e-9).
pub fn c0_bound_check(trajectories: &[Trajectory], radius: f64) -> bool {
    trajectories.iter().all(|t| t.points.iter().all(|x| x.norm() <= radius + 1e-9))
}
