#![allow(dead_code)]

use num_complex::Complex64;
use theta_forge::sampler::Sampler;
use theta_forge::thetaids::{eval_thmrn_side, Side, ThmrnParams};
use theta_forge::thetanum::{residual, ThetaContext};
use theta_forge_cli::dsl::{eval, parse, Env};

/// Left side of the main subset-sum identity, written in the expression
/// language independently of the native evaluator.
pub const MAIN_LHS: &str = "sum(r = 0..n, tpoch(v; r)*tpoch(w; r)/(tpoch(q*v/t; r)*tpoch(q*w/t; r))
  * sumsubsets(I, n, r,
      prod(i in I, q/t*theta(v*x_i/(t*w))*theta(t*q^(-r)*x_i/(q*w))
                   /(theta(v*x_i/(q*w))*theta(q^(-r)*x_i/w)))
    * prod(i notin I, theta(x_i/q)*theta(q^(-r)*x_i/(t*w))
                   /(theta(x_i/t)*theta(q^(-r)*x_i/(q*w))))
    * prod(i in I, prod(j notin I, theta(t*x_i/(q*x_j))*theta(q*x_i/x_j)
                   /(theta(x_i/x_j)*theta(t*x_i/x_j))))))";

/// Largest residual between the expression and the native left side over
/// `points` sampled points with `n` variables.
pub fn main_lhs_differential(points: u64, n: usize) -> f64 {
    let ast = parse(MAIN_LHS).expect("transcription parses");
    let mut worst: f64 = 0.0;
    for k in 0..points {
        let mut s = Sampler::for_trial(2024, "dsl-differential", k);
        let (native, nome, p) = s
            .numeric(|s, f| {
                let p = ThmrnParams {
                    x: s.complexes(n),
                    v: s.complex(),
                    w: s.complex(),
                    q: s.complex(),
                    t: s.complex(),
                };
                let l = eval_thmrn_side(f, Side::L, &p)?;
                Ok((l, f.ctx().p(), p))
            })
            .expect("sampler finds a point");
        let env = Env::new()
            .vector("x", p.x.clone())
            .scalar("v", p.v)
            .scalar("w", p.w)
            .scalar("q", p.q)
            .scalar("t", p.t)
            .scalar("n", Complex64::new(n as f64, 0.0));
        let ctx = ThetaContext::new(nome).unwrap();
        let dsl = eval(&ast, &env, ctx).expect("expression evaluates");
        worst = worst.max(residual(dsl, native));
    }
    worst
}
