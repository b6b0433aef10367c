// Prints the nontrivial pitchfork branches of dx = (lambda x - (2 + sin t) x^3) dt + 0.5 x o dw
// along one sample path, next to the sandwich bounds.
#include <cstdio>
#include <numbers>

#include "pbl/pbl.hpp"

int main() {
  using namespace pbl;
  const WienerPath w = sample_path(7, TimeGrid::from_bounds(-400.0, 10.0, 1e-3));
  const BetaFn beta = BetaFn::periodic(2.0, 1.0, 2.0 * std::numbers::pi);
  const CertifiedBounds b = validate_pairing(beta, GammaFn::zero(), Variant::pitchfork);
  std::printf("%8s %14s %14s %14s\n", "lambda", "x_plus", "lower", "upper");
  for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const Coefficients c{lambda, 0.5, beta};
    const QuasiPair q = quasi_pitchfork(c, w, 0.0);
    const SandwichBounds s = sandwich_bounds(lambda, 0.5, b, w);
    std::printf("%8.3f %14.8f %14.8f %14.8f\n", lambda, q.plus, s.lower, s.upper);
  }
}
