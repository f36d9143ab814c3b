#pragma once

#include "chansim/prob.hpp"

namespace chansim {

// Binary symmetric channel with crossover probability p.
inline Kernel make_bsc(double p) {
  return Kernel(2, 2, {1.0 - p, p, p, 1.0 - p});
}

// Binary erasure channel; output symbol 2 is the erasure.
inline Kernel make_bec(double e) {
  return Kernel(2, 3, {1.0 - e, 0.0, e, 0.0, 1.0 - e, e});
}

// BEC post-processing: keeps 0/1 up to an extra flip s and resolves the
// erasure symbol by a fair coin. With s = (p - e/2)/(1 - e) the chain
// BEC(e) -> this map is exactly BSC(p), valid when p in [e/2, 1/2].
inline Kernel make_erasure_resolver(double s = 0.0) {
  return Kernel(3, 2, {1.0 - s, s, s, 1.0 - s, 0.5, 0.5});
}

inline Kernel make_bec_to_bsc_degrader(double e, double p) {
  return make_erasure_resolver((p - e / 2.0) / (1.0 - e));
}

}  // namespace chansim
