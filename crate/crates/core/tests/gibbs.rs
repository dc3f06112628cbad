mod common;

use common::*;
use tmg_core::constraints::Constraint;
use tmg_core::engine::{run_chain, Frame, TmgModel};
use tmg_core::gibbs::run_gibbs;
use tmg_core::linalg::{DenseMatrix, GaussianSpec, StructuredMatrix};
use tmg_core::models::wedge;
use tmg_core::FEASIBILITY_TOL;

#[test]
fn gibbs_and_hmc_agree_on_the_wedge() {
    let preset = wedge().unwrap();
    let g = run_gibbs(&preset.model, 60_000, 1000, &preset.init, 1).unwrap();
    let h = run_chain(&preset.model, 20_000, 200, &preset.init, 2).unwrap();
    for row in g.samples.iter_rows() {
        for c in preset.model.constraints() {
            assert!(c.value(row) >= -FEASIBILITY_TOL);
        }
    }
    for j in 0..2 {
        let (gm, _) = mean_var(&g.samples.column(j));
        let (hm, _) = mean_var(&h.samples.column(j));
        assert!((gm - hm).abs() < 0.05, "{j}: {gm} vs {hm}");
        let (_, p) = ks_two_sample(&thin(&g.samples.column(j), 100), &thin(&h.samples.column(j), 5));
        assert!(p > 1e-3, "{j}: {p}");
    }
}

#[test]
fn correlated_slab_moments_match_hmc() {
    let cov = DenseMatrix::from_rows(&[vec![1.0, -0.6, 0.2], vec![-0.6, 1.5, 0.1], vec![0.2, 0.1, 0.7]]).unwrap();
    let g = GaussianSpec::covariance(StructuredMatrix::Dense(cov), vec![0.2, -0.4, 1.0]).unwrap();
    let cs = vec![
        Constraint::linear(vec![1.0, 1.0, 0.0], 0.5).unwrap(),
        Constraint::linear(vec![-1.0, -1.0, 0.0], 0.5).unwrap(),
        Constraint::linear(vec![0.0, 0.0, -1.0], 1.2).unwrap(),
    ];
    let model = TmgModel::new(g, cs, Frame::Canonical).unwrap();
    let gibbs = run_gibbs(&model, 60_000, 500, &[0.0, 0.0, 0.0], 3).unwrap();
    let hmc = run_chain(&model, 30_000, 500, &[0.0, 0.0, 0.0], 4).unwrap();
    for j in 0..3 {
        let (gm, gv) = mean_var(&gibbs.samples.column(j));
        let (hm, hv) = mean_var(&hmc.samples.column(j));
        assert!((gm - hm).abs() < 0.05, "{j}: {gm} vs {hm}");
        assert!((gv - hv).abs() < 0.06 * hv.max(0.1), "{j}: {gv} vs {hv}");
    }
}
