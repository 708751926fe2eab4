// temporary diagnostic: compare P(no psi-zero on (0,L]) with
// P(Lambda_0(L, Dirichlet) > lambda) and the exact half-line law.
use hardedge::riccati::{cdf_lambda_k, CountRoute, HardEdgeParams};
use hardedge::rng::RandomStream;
use hardedge::sbo::{sbo_eigenvalues, RightBoundary};
use rayon::prelude::*;

fn main() {
    let (beta, a, lambda) = (2.0, 0.0, 1.0);
    let paths = 10_000usize;

    for l in [20.0, 40.0] {
        let params = HardEdgeParams::new(beta, a, lambda, l, 1e-3).unwrap();
        let (p_below, se) =
            cdf_lambda_k(&params, 0, CountRoute::PsiZeros, paths, 900, 0).unwrap();
        println!("psi   L={l}: P(count=0) = {:.4} (se {se:.4})", 1.0 - p_below);

        let survive: usize = (0..paths)
            .into_par_iter()
            .map(|i| {
                let mut s = RandomStream::new(901, i as u64);
                let lam0 = sbo_eigenvalues(a, beta, l, 1.0 / 512.0, 1, &mut s, RightBoundary::Dirichlet)
                    .unwrap()[0];
                (lam0 > lambda) as usize
            })
            .sum();
        println!("sboD  L={l}: P(Lam0(L,Dir) > 1) = {:.4}", survive as f64 / paths as f64);

        let survive_free: usize = (0..paths)
            .into_par_iter()
            .map(|i| {
                let mut s = RandomStream::new(901, i as u64);
                let lam0 =
                    sbo_eigenvalues(a, beta, l, 1.0 / 512.0, 1, &mut s, RightBoundary::Free)
                        .unwrap()[0];
                (lam0 > lambda) as usize
            })
            .sum();
        println!("sboF  L={l}: P(Lam0(L,Free) > 1) = {:.4}", survive_free as f64 / paths as f64);
    }
    println!("exact: e^-1 = {:.4}", (-1.0f64).exp());
}
