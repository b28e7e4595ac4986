//! Solves for the potential and field of a point excess on a small grid
//! and prints the maps.
//!
//! ```text
//! cargo run --example poisson_field -- [n]
//! ```

use spectral_placer::density::DensityGrid;
use spectral_placer::figures::matrix_text;
use spectral_placer::grid::GridGeometry;
use spectral_placer::model::Rect;
use spectral_placer::poisson::SpectralSolver;

fn main() -> spectral_placer::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(8);
    let geom = GridGeometry::covering(&Rect::new(0.0, 0.0, n as f64, n as f64), n);
    let mut rho = DensityGrid::zeros(geom);
    rho.rho[(n / 4) * n + n / 4] = 1.0;
    rho.remove_dc();

    let field = SpectralSolver::new(n)?.solve(&rho)?;
    println!("psi\n{}", matrix_text(&field.psi, n));
    println!("E_x\n{}", matrix_text(&field.ex, n));
    println!("E_y\n{}", matrix_text(&field.ey, n));
    let energy: f64 = rho.rho.iter().zip(&field.psi).map(|(r, p)| r * p).sum();
    println!("sum rho psi = {energy:.6e}");
    Ok(())
}
