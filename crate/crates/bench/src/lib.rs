//! Benchmark-only crate; see `benches/`. Shared inputs live here.

use reesolve_core::ideal::Ideal;
use reesolve_core::parse::parse_poly;
use reesolve_core::poly::default_names;
use reesolve_core::rees::{from_pair, Pair, ReesAlgebra};

/// The algebra of the pair `(f, b)` in `dim` variables.
pub fn pair(dim: usize, f: &str, b: u32) -> ReesAlgebra {
    let names = default_names(dim);
    from_pair(&Pair::new(Ideal::new(dim, [parse_poly(f, &names).unwrap()]).unwrap(), b)).unwrap()
}
