#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chansim/instances.hpp"
#include "chansim/prob.hpp"

namespace chansim {

struct SearchConfig {
  std::uint64_t seed = 1;
  int restarts = 8;
  int max_iters = 300;
  std::size_t card_u = 0;  // 0 = per-problem default
  std::size_t card_v = 0;
  std::size_t card_w = 0;
  double step_init = 0.5;
  double step_decay = 0.985;
  double tol = 1e-3;  // certification threshold, bits
  int workers = 1;
  // budgets for nested (inner) minimizations
  int inner_restarts = 3;
  int inner_iters = 60;
  // outer simplex grid resolution for the resource maximization
  int grid_resolution = 16;
};

struct SearchResult {
  double best_value = 0.0;
  std::vector<Kernel> best_point;
  std::vector<double> trace;  // per-restart best values, index order
  bool converged = false;
  double residual = 0.0;  // constraint violation at the reported point
  int best_restart = -1;
  std::vector<std::string> notes;
};

// min over U with X-U-Y of beta*I(U;XY) + gamma*I(U;X) + theta*I(U;Y),
// holding the (X,Y) marginal of `joint_xy` fixed. The Markov factorization
// is parameterized as p(u|x), p(y|u); matching p(y|x) is enforced by a
// quadratic penalty (weight 1e3) and the reported point must carry
// residual <= 1e-6 to count as feasible. best_point = {p(u|x), p(y|u)}.
SearchResult min_markov_functional(const JointPmf& joint_xy, double beta,
                                   double gamma, double theta,
                                   const SearchConfig& cfg);

// max over p(x~) of I(X~;Y~) + min over U~ with X~-U~-Y~ of the weighted
// functional above. Dense simplex grid warm start plus local ascent; the
// result records the best input pmf found (best_point = {p(x~) as 1-row
// kernel, p(u|x~), p(y~|u)}).
SearchResult max_resource_expression(const Kernel& resource, double beta,
                                     double gamma, double theta,
                                     const SearchConfig& cfg);

// Feasibility searches for the inner regions: maximize the minimum
// inequality slack minus a penalty on the marginal mismatch. `converged`
// is true when min-slack > cfg.tol and marginal TV <= cfg.tol.
SearchResult find_feasible_aux_p2p(const P2PInstance& inst,
                                   const SearchConfig& cfg);
SearchResult find_feasible_aux_mac(const MACInstance& inst,
                                   const SearchConfig& cfg);
SearchResult find_feasible_aux_bc(const BCInstance& inst,
                                  const SearchConfig& cfg);

}  // namespace chansim
