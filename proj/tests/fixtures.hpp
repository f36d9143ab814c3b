#pragma once

// Shared fixture instances used by both the unit and acceptance suites.

#include "chansim/channels.hpp"
#include "chansim/instances.hpp"
#include "chansim/prob.hpp"

namespace fixtures {

// A point where the three double-binning rate constraints hold strictly
// with at least 0.1 bit of margin each, at rates whose bin counts stay
// exactly 2^(n/2) (no ceiling inflation): a ternary auxiliary carried
// through a near-clean ternary resource, with a weakly informative binary
// output. Conditional entropies at this point:
//   H(U|X)  = 1.463   (rate_w + rate_g = 1.0 stays 0.363 below)
//   H(U|Y~) = 0.507   (rate_g + rate_w = 1.0 stays 0.393 above)
//   H(U|XY) = 1.270   (rate_g = 0.5 stays 0.670 below)
struct StrictMarginFixture {
  chansim::P2PInstance instance;
  chansim::AuxP2P aux;
  double rate_g, rate_w;
};

inline StrictMarginFixture strict_margin_fixture() {
  using namespace chansim;
  Pmf in = Pmf::uniform(2);
  Kernel resource(3, 3,
                  {0.92, 0.05, 0.03, 0.04, 0.90, 0.06, 0.05, 0.03, 0.92});
  Kernel pux(2, 3, {0.50, 0.30, 0.20, 0.15, 0.35, 0.50});
  std::vector<double> e(2 * 9, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int u = 0; u < 3; ++u) e[x * 9 + u * 3 + u] = pux(x, u);
  Kernel dec_rows(3, 2, {0.90, 0.10, 0.20, 0.80, 0.70, 0.30});
  std::vector<double> dk(3 * 3 * 2, 0.0);
  for (int yt = 0; yt < 3; ++yt)
    for (int u = 0; u < 3; ++u)
      for (int y = 0; y < 2; ++y) dk[(yt * 3 + u) * 2 + y] = dec_rows(yt, y);
  Kernel target = pux.then(resource).then(dec_rows);
  return StrictMarginFixture{
      P2PInstance{in, target, resource, 0.5},
      AuxP2P{3, Kernel(2, 9, e), Kernel(9, 2, dk)},
      0.5, 0.5};
}

}  // namespace fixtures
