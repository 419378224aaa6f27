//! Time-t flows of gradient fields, with derivatives.

use crate::geom::{M2, V2};
use crate::morse::GradientField;
use crate::Error;

/// Relative step tolerance of the adaptive integrator.
pub const FLOW_TOL: f64 = 1e-12;

/// Flow result: end point, derivative in the start point, and the field
/// at the end point (the derivative in t).
#[derive(Clone, Copy, Debug)]
pub struct FlowJet {
    pub x: V2,
    pub dx0: M2,
    pub dt: V2,
}

/// (e^{ct}, (e^{ct} − 1)/c) with the c → 0 limit handled.
fn affine_coeffs(c: f64, t: f64) -> (f64, f64) {
    let ct = c * t;
    if ct.abs() < 1e-8 {
        // (e^{ct} − 1)/c = t(1 + ct/2 + (ct)²/6 + …)
        (libm::exp(ct), t * (1.0 + ct / 2.0 + ct * ct / 6.0))
    } else {
        let e = libm::exp(ct);
        (e, libm::expm1(ct) / c)
    }
}

/// Closed-form flow of x ↦ c·x + b.
pub fn affine_flow(c: f64, b: V2, t: f64, x0: V2) -> FlowJet {
    let (e, phi) = affine_coeffs(c, t);
    let x = e * x0 + phi * b;
    FlowJet { x, dx0: M2::scalar(e), dt: c * x + b }
}

/// x(t) for the field started at x0. Negative t runs the flow backwards.
pub fn exp_flow(field: &GradientField, t: f64, x0: V2) -> Result<V2, Error> {
    Ok(flow_jet(field, t, x0)?.x)
}

pub fn flow_jet(field: &GradientField, t: f64, x0: V2) -> Result<FlowJet, Error> {
    if !t.is_finite() || !x0.is_finite() {
        return Err(Error::NonFinite(alloc::format!("flow from {x0:?} for time {t}")));
    }
    let jet = match field.affine() {
        Some((c, b)) => affine_flow(c, b, t, x0),
        None => integrate(field, t, x0)?,
    };
    if !jet.x.is_finite() {
        return Err(Error::NonFinite(alloc::format!("flow from {x0:?} for time {t}")));
    }
    Ok(jet)
}

#[derive(Clone, Copy)]
struct State {
    x: V2,
    phi: M2,
}

impl State {
    fn axpy(&self, h: f64, d: &State) -> State {
        State { x: self.x + h * d.x, phi: self.phi.add(&d.phi.scale(h)) }
    }
}

fn deriv(f: &GradientField, s: &State, sign: f64) -> State {
    State { x: sign * f.eval(s.x), phi: f.jacobian(s.x).mul(&s.phi).scale(sign) }
}

fn rk4(f: &GradientField, s: &State, h: f64, sign: f64) -> State {
    let k1 = deriv(f, s, sign);
    let k2 = deriv(f, &s.axpy(h / 2.0, &k1), sign);
    let k3 = deriv(f, &s.axpy(h / 2.0, &k2), sign);
    let k4 = deriv(f, &s.axpy(h, &k3), sign);
    let mut out = *s;
    out = out.axpy(h / 6.0, &k1);
    out = out.axpy(h / 3.0, &k2);
    out = out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4)
}

/// Classical RK4 with step doubling for error control, carrying the
/// variational equation Φ' = DV·Φ.
fn integrate(f: &GradientField, t: f64, x0: V2) -> Result<FlowJet, Error> {
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let total = t.abs();
    let mut s = State { x: x0, phi: M2::IDENTITY };
    let mut done = 0.0;
    let mut h = (total / 16.0).clamp(1e-6, 0.05);
    let mut steps = 0usize;
    while done < total {
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::Accuracy("flow integration did not finish".into()));
        }
        let h_try = h.min(total - done);
        let full = rk4(f, &s, h_try, sign);
        let half = rk4(f, &rk4(f, &s, h_try / 2.0, sign), h_try / 2.0, sign);
        let err = (half.x - full.x).norm() / 15.0;
        let scale = 1.0 + half.x.norm();
        if err <= FLOW_TOL * scale || h_try < 1e-12 {
            // Richardson extrapolation of the accepted step
            s = State {
                x: half.x + (1.0 / 15.0) * (half.x - full.x),
                phi: half.phi.add(&half.phi.add(&full.phi.scale(-1.0)).scale(1.0 / 15.0)),
            };
            done += h_try;
            if !s.x.is_finite() {
                return Err(Error::NonFinite("flow state".into()));
            }
        }
        let ratio = if err == 0.0 { 4.0 } else { 0.9 * libm::pow(FLOW_TOL * scale / err, 0.2) };
        h = h_try * ratio.clamp(0.2, 4.0);
    }
    Ok(FlowJet { x: s.x, dx0: s.phi, dt: sign * f.eval(s.x) })
}
