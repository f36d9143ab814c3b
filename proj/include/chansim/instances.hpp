#pragma once

#include "chansim/prob.hpp"

namespace chansim {

// Point-to-point simulation instance: simulate `target` p(y|x) on input
// p(x) from `resource` p(y~|x~) plus shared randomness of `rate` bits/use.
struct P2PInstance {
  Pmf input;
  Kernel target;    // |X| -> |Y|
  Kernel resource;  // |X~| -> |Y~|
  double rate = 0.0;
};

// Candidate decomposition for the point-to-point inner region.
// enc columns are (u, x~) pairs flattened as u * |X~| + x~;
// dec rows are (y~, u) pairs flattened as y~ * |U| + u.
struct AuxP2P {
  std::size_t card_u = 1;
  Kernel enc;  // |X| -> |U|*|X~|
  Kernel dec;  // |Y~|*|U| -> |Y|
};

// Multiple-access configuration: two encoders see X and Y; the resource
// takes (x~, y~) rows flattened as x~ * |Y~| + y~.
struct MACInstance {
  JointPmf input_xy;  // axes {"X","Y"}
  Kernel target;      // |X|*|Y| rows (x * |Y| + y) -> |Z|
  std::size_t card_xt = 1, card_yt = 1;
  Kernel resource;    // |X~|*|Y~| -> |Z~|
  double rate1 = 0.0, rate2 = 0.0;
};

struct AuxMAC {
  std::size_t card_u = 1, card_v = 1;
  Kernel enc1;  // |X| -> |U|*|X~|  (u * |X~| + x~)
  Kernel enc2;  // |Y| -> |V|*|Y~|  (v * |Y~| + y~)
  Kernel dec;   // |Z~|*|U|*|V| -> |Z|  ((z~ * |U| + u) * |V| + v)
};

// Broadcast configuration: one encoder, two receivers.
struct BCInstance {
  Pmf input;
  std::size_t card_y = 1, card_z = 1;
  Kernel target;    // |X| -> |Y|*|Z|  (y * |Z| + z)
  std::size_t card_yt = 1, card_zt = 1;
  Kernel resource;  // |X~| -> |Y~|*|Z~|  (y~ * |Z~| + z~)
  double rate = 0.0;
};

struct AuxBC {
  std::size_t card_u = 1, card_v = 1, card_w = 1;
  Kernel enc;   // |X| -> |U|*|V|*|W|*|X~|  (((u*|V|+v)*|W|+w)*|X~|+x~)
  Kernel dec1;  // |Y~|*|U|*|W| -> |Y|      ((y~*|U|+u)*|W|+w)
  Kernel dec2;  // |Z~|*|V|*|W| -> |Z|      ((z~*|V|+v)*|W|+w)
};

// Wireline-style decomposition X - U' - Y for checks against a noiseless
// link of `wire_rate` bits/use plus shared randomness of `rate` bits/use.
struct AuxCuff {
  std::size_t card_u = 1;
  Kernel aux_u;  // |X| -> |U'|
  Kernel dec;    // |U'| -> |Y|
  double wire_rate = 0.0;
};

}  // namespace chansim
