#include "chansim/auxsearch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <stdexcept>

#include "chansim/regions.hpp"
#include "chansim/rng.hpp"

namespace chansim {

namespace {

constexpr double kMarkovPenaltyWeight = 1e3;
constexpr double kMarkovResidualTol = 1e-6;
constexpr double kMarginalPenaltyWeight = 1e3;
constexpr double kSharpLogit = 13.0;  // softmax(13) leaks ~2e-6 per cell
constexpr double kFdStep = 1e-4;

// Row-wise softmax parameterization keeps every iterate on the simplex.
struct Shape {
  std::size_t rows, cols;
};

std::vector<double> softmax_row(const double* logits, std::size_t n) {
  double mx = logits[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  std::vector<double> out(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
  return out;
}

std::vector<Kernel> to_kernels(const std::vector<Shape>& shapes,
                               const std::vector<double>& theta) {
  std::vector<Kernel> out;
  out.reserve(shapes.size());
  std::size_t off = 0;
  for (const auto& sh : shapes) {
    std::vector<double> entries;
    entries.reserve(sh.rows * sh.cols);
    for (std::size_t r = 0; r < sh.rows; ++r) {
      auto row = softmax_row(theta.data() + off + r * sh.cols, sh.cols);
      entries.insert(entries.end(), row.begin(), row.end());
    }
    off += sh.rows * sh.cols;
    out.emplace_back(sh.rows, sh.cols, std::move(entries));
  }
  return out;
}

std::size_t total_params(const std::vector<Shape>& shapes) {
  std::size_t n = 0;
  for (const auto& sh : shapes) n += sh.rows * sh.cols;
  return n;
}

// Logits for a deterministic kernel: +kSharpLogit at the selected column.
std::vector<double> delta_logits(const Shape& sh,
                                 const std::function<std::size_t(std::size_t)>& pick) {
  std::vector<double> l(sh.rows * sh.cols, 0.0);
  for (std::size_t r = 0; r < sh.rows; ++r) l[r * sh.cols + pick(r)] = kSharpLogit;
  return l;
}

// Logits reproducing approximately the given rows (log of clamped mass).
std::vector<double> log_logits(const Shape& sh,
                               const std::function<double(std::size_t, std::size_t)>& p) {
  std::vector<double> l(sh.rows * sh.cols, 0.0);
  for (std::size_t r = 0; r < sh.rows; ++r)
    for (std::size_t c = 0; c < sh.cols; ++c)
      l[r * sh.cols + c] = std::log(std::max(p(r, c), 1e-9));
  return l;
}

struct Eval {
  double objective;  // maximized by the driver
  double value;      // reported quantity at this point
  double residual;   // constraint violation
};

struct Candidate {
  double value = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<Kernel> point;
  bool valid = false;
};

struct RestartOutcome {
  Candidate best_feasible;   // best `value` among residual-feasible iterates
  Candidate best_objective;  // fallback when nothing was feasible
};

// One gradient-ascent run from the given logits. Deterministic: fixed
// iteration count, central finite differences, sequential arithmetic.
RestartOutcome ascend(const std::vector<Shape>& shapes,
                      const std::function<Eval(const std::vector<Kernel>&)>& f,
                      std::vector<double> theta, int max_iters,
                      double step_init, double step_decay,
                      bool minimize_value, double feasible_tol) {
  RestartOutcome out;
  auto consider = [&](const std::vector<Kernel>& ks, const Eval& e) {
    if (e.objective > out.best_objective.objective) {
      out.best_objective = {e.value, e.residual, e.objective, ks, true};
    }
    if (e.residual <= feasible_tol) {
      bool better = !out.best_feasible.valid ||
                    (minimize_value ? e.value < out.best_feasible.value
                                    : e.value > out.best_feasible.value);
      if (better) out.best_feasible = {e.value, e.residual, e.objective, ks, true};
    }
  };

  const std::size_t n = total_params(shapes);
  {
    std::vector<Kernel> ks = to_kernels(shapes, theta);
    consider(ks, f(ks));
  }

  std::vector<double> grad(n, 0.0);
  double step = step_init;
  for (int it = 0; it < max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double keep = theta[i];
      theta[i] = keep + kFdStep;
      double up = f(to_kernels(shapes, theta)).objective;
      theta[i] = keep - kFdStep;
      double dn = f(to_kernels(shapes, theta)).objective;
      theta[i] = keep;
      grad[i] = (up - dn) / (2.0 * kFdStep);
    }
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm < 1e-12) break;
    double scale = step / std::max(norm, 1.0);
    for (std::size_t i = 0; i < n; ++i) theta[i] += scale * grad[i];
    std::vector<Kernel> ks = to_kernels(shapes, theta);
    consider(ks, f(ks));
    step *= step_decay;
  }
  return out;
}

struct MultiStartSpec {
  std::vector<Shape> shapes;
  std::function<Eval(const std::vector<Kernel>&)> objective;  // maximized
  std::vector<std::vector<double>> structured_inits;
  // Candidate points evaluated exactly as given, with no logit round trip;
  // boundary constructions (constant or copy auxiliaries) keep their exact
  // zero slacks this way.
  std::vector<std::vector<Kernel>> exact_candidates;
  bool minimize_value = false;  // best_value tie-break direction
  double feasible_tol = kMarkovResidualTol;
  double init_scale = 1.5;
};

// Runs cfg.restarts independent ascents (structured inits first, then
// seeded random logits), then the exact candidates, and reduces in slot
// order; ties keep the lowest slot. Ascent slots may run on a worker pool;
// the reduction does not depend on scheduling.
SearchResult multi_start(const MultiStartSpec& spec, const SearchConfig& cfg,
                         std::string_view tag) {
  const int restarts = std::max(
      cfg.restarts, static_cast<int>(spec.structured_inits.size()));
  const int total = restarts + static_cast<int>(spec.exact_candidates.size());
  std::vector<RestartOutcome> outcomes(total);

  auto run_one = [&](int r) {
    std::vector<double> theta;
    if (r < static_cast<int>(spec.structured_inits.size())) {
      theta = spec.structured_inits[r];
    } else {
      SplitMix64 rng(derive_seed(cfg.seed, tag, static_cast<std::uint64_t>(r)));
      theta.resize(total_params(spec.shapes));
      for (auto& t : theta) t = spec.init_scale * rng.next_gaussian();
    }
    return ascend(spec.shapes, spec.objective, std::move(theta), cfg.max_iters,
                  cfg.step_init, cfg.step_decay, spec.minimize_value,
                  spec.feasible_tol);
  };

  if (cfg.workers > 1) {
    std::vector<std::future<RestartOutcome>> futs;
    futs.reserve(restarts);
    for (int r = 0; r < restarts; ++r)
      futs.push_back(std::async(std::launch::async, run_one, r));
    for (int r = 0; r < restarts; ++r) outcomes[r] = futs[r].get();
  } else {
    for (int r = 0; r < restarts; ++r) outcomes[r] = run_one(r);
  }
  for (std::size_t c = 0; c < spec.exact_candidates.size(); ++c) {
    const auto& ks = spec.exact_candidates[c];
    Eval e = spec.objective(ks);
    RestartOutcome oc;
    Candidate cand{e.value, e.residual, e.objective, ks, true};
    oc.best_objective = cand;
    if (e.residual <= spec.feasible_tol) oc.best_feasible = cand;
    outcomes[restarts + static_cast<int>(c)] = oc;
  }

  SearchResult res;
  res.trace.reserve(outcomes.size());
  int best = -1;
  bool best_feasible = false;
  for (int r = 0; r < total; ++r) {
    const auto& oc = outcomes[r];
    const Candidate& c =
        oc.best_feasible.valid ? oc.best_feasible : oc.best_objective;
    res.trace.push_back(c.value);
    bool this_feasible = oc.best_feasible.valid;
    bool take = best < 0;
    if (!take) {
      const auto& bc = outcomes[best].best_feasible.valid
                           ? outcomes[best].best_feasible
                           : outcomes[best].best_objective;
      if (this_feasible != best_feasible) {
        take = this_feasible;  // feasible beats infeasible
      } else {
        take = spec.minimize_value ? c.value < bc.value : c.value > bc.value;
      }
    }
    if (take) {
      best = r;
      best_feasible = this_feasible;
    }
  }
  const auto& win = outcomes[best].best_feasible.valid
                        ? outcomes[best].best_feasible
                        : outcomes[best].best_objective;
  res.best_value = win.value;
  res.best_point = win.point;
  res.residual = win.residual;
  res.best_restart = best;
  res.converged = best_feasible;
  return res;
}

}  // namespace

SearchResult min_markov_functional(const JointPmf& joint_xy, double beta,
                                   double gamma, double theta,
                                   const SearchConfig& cfg) {
  if (beta < 0 || gamma < 0 || theta < 0)
    throw std::invalid_argument("min_markov_functional: negative weight");
  if (joint_xy.axes() != std::vector<std::string>{"X", "Y"})
    throw std::invalid_argument("min_markov_functional: expected axes {X,Y}");

  const std::size_t cx = joint_xy.dim("X");
  const std::size_t cy = joint_xy.dim("Y");
  const std::size_t cu = cfg.card_u ? cfg.card_u : cx * cy;

  // p(x) and the target conditional p(y|x)
  std::vector<double> px(cx, 0.0), pyx(cx * cy, 0.0);
  {
    const auto& t = joint_xy.table();
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t y = 0; y < cy; ++y) px[x] += t[x * cy + y];
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t y = 0; y < cy; ++y)
        pyx[x * cy + y] = px[x] > 0 ? t[x * cy + y] / px[x] : 1.0 / cy;
  }

  // Degenerate alphabets: the constant decomposition is exactly feasible.
  if (cx <= 1 || cy <= 1 || cu == 1) {
    SearchResult res;
    std::vector<double> row(pyx.begin(), pyx.begin() + cy);
    res.best_point = {Kernel(cx, 1, std::vector<double>(cx, 1.0)),
                      Kernel(1, cy, row)};
    res.best_value = 0.0;
    res.residual = 0.0;
    res.converged = true;
    res.best_restart = 0;
    res.trace = {0.0};
    res.notes.push_back("degenerate alphabet short-circuit");
    return res;
  }

  double hx_fixed = 0.0;
  for (std::size_t x = 0; x < cx; ++x) hx_fixed += entropy_term(px[x]);

  MultiStartSpec spec;
  spec.shapes = {{cx, cu}, {cu, cy}};
  spec.minimize_value = true;
  // Hand-rolled information terms: this objective sits inside the finite
  // difference loop of every converse evaluation, so it avoids building a
  // JointPmf per call. All marginals of p(x)p(u|x)p(y|u) reduce to small
  // matrix passes.
  spec.objective = [&, beta, gamma, theta,
                    hx_fixed](const std::vector<Kernel>& ks) {
    const Kernel& pu_x = ks[0];
    const Kernel& py_u = ks[1];
    double h_u = 0.0, h_ux = 0.0, h_uxy = 0.0, h_uy = 0.0, h_y = 0.0,
           h_xy = 0.0;
    double residual = 0.0;
    std::vector<double> pu(cu, 0.0);
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t u = 0; u < cu; ++u) {
        double m = px[x] * pu_x(x, u);
        pu[u] += m;
        h_ux += entropy_term(m);
        for (std::size_t y = 0; y < cy; ++y)
          h_uxy += entropy_term(m * py_u(u, y));
      }
    std::vector<double> py(cy, 0.0);
    for (std::size_t u = 0; u < cu; ++u) {
      h_u += entropy_term(pu[u]);
      for (std::size_t y = 0; y < cy; ++y) {
        double m = pu[u] * py_u(u, y);
        py[y] += m;
        h_uy += entropy_term(m);
      }
    }
    for (std::size_t y = 0; y < cy; ++y) h_y += entropy_term(py[y]);
    for (std::size_t x = 0; x < cx; ++x) {
      for (std::size_t y = 0; y < cy; ++y) {
        double m = 0.0;
        for (std::size_t u = 0; u < cu; ++u) m += pu_x(x, u) * py_u(u, y);
        h_xy += entropy_term(px[x] * m);
        if (px[x] > 0) {
          double d = m - pyx[x * cy + y];
          residual += d * d;
        }
      }
    }
    auto clamp0 = [](double v) { return v < 0.0 && v > -1e-10 ? 0.0 : v; };
    double value = 0.0;
    if (beta) value += beta * clamp0(h_u + h_xy - h_uxy);
    if (gamma) value += gamma * clamp0(h_u + hx_fixed - h_ux);
    if (theta) value += theta * clamp0(h_u + h_y - h_uy);
    return Eval{-(value + kMarkovPenaltyWeight * residual), value, residual};
  };

  // Structured starts: U = copy of X (always feasible), U = copy of Y
  // (feasible, attains the data-processing floor for the gamma term),
  // constant U (feasible only for product joints; penalty handles it).
  // Each is also evaluated as an exact candidate so the boundary values
  // survive the softmax round trip untouched.
  std::vector<std::vector<double>> inits;
  {
    Shape s_ux{cx, cu}, s_yu{cu, cy};
    auto copy_x_u = delta_logits(s_ux, [&](std::size_t x) { return x % cu; });
    auto copy_x_y = log_logits(s_yu, [&](std::size_t u, std::size_t y) {
      return u < cx ? pyx[u * cy + y] : 1.0 / cy;
    });
    inits.push_back(copy_x_u);
    inits.back().insert(inits.back().end(), copy_x_y.begin(), copy_x_y.end());
    {
      std::vector<double> e1(cx * cu, 0.0), e2(cu * cy, 1.0 / cy);
      for (std::size_t x = 0; x < cx; ++x) e1[x * cu + (x % cu)] = 1.0;
      for (std::size_t u = 0; u < cu; ++u)
        if (u < cx)
          for (std::size_t y = 0; y < cy; ++y) e2[u * cy + y] = pyx[u * cy + y];
      spec.exact_candidates.push_back(
          {Kernel(cx, cu, e1), Kernel(cu, cy, e2)});
    }

    if (cu >= cy) {
      auto uy = log_logits(s_ux, [&](std::size_t x, std::size_t u) {
        return u < cy ? pyx[x * cy + u] : 0.0;
      });
      auto yd = delta_logits(s_yu, [&](std::size_t u) { return u % cy; });
      inits.push_back(uy);
      inits.back().insert(inits.back().end(), yd.begin(), yd.end());
      std::vector<double> e1(cx * cu, 0.0), e2(cu * cy, 0.0);
      for (std::size_t x = 0; x < cx; ++x)
        for (std::size_t y = 0; y < cy; ++y) e1[x * cu + y] = pyx[x * cy + y];
      for (std::size_t u = 0; u < cu; ++u) e2[u * cy + (u % cy)] = 1.0;
      spec.exact_candidates.push_back(
          {Kernel(cx, cu, e1), Kernel(cu, cy, e2)});
    }
    std::vector<double> py(cy, 0.0);
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t y = 0; y < cy; ++y) py[y] += joint_xy.table()[x * cy + y];
    auto const_u = delta_logits(s_ux, [](std::size_t) { return 0; });
    auto py_rows = log_logits(
        s_yu, [&](std::size_t, std::size_t y) { return py[y]; });
    inits.push_back(const_u);
    inits.back().insert(inits.back().end(), py_rows.begin(), py_rows.end());
    {
      std::vector<double> e1(cx * cu, 0.0), e2(cu * cy, 1.0 / cy);
      for (std::size_t x = 0; x < cx; ++x) e1[x * cu] = 1.0;
      for (std::size_t y = 0; y < cy; ++y) e2[y] = py[y];
      spec.exact_candidates.push_back(
          {Kernel(cx, cu, e1), Kernel(cu, cy, e2)});
    }
  }
  spec.structured_inits = std::move(inits);

  SearchResult res = multi_start(spec, cfg, "min_markov");
  if (!res.converged)
    res.notes.push_back("no iterate met the Markov residual tolerance");
  return res;
}

SearchResult max_resource_expression(const Kernel& resource, double beta,
                                     double gamma, double theta,
                                     const SearchConfig& cfg) {
  if (beta < 0 || gamma < 0 || theta < 0)
    throw std::invalid_argument("max_resource_expression: negative weight");
  const std::size_t cxt = resource.input_size();
  const std::size_t cyt = resource.output_size();
  const bool weighted = beta > 0 || gamma > 0 || theta > 0;

  SearchConfig inner = cfg;
  inner.restarts = cfg.inner_restarts;
  inner.max_iters = cfg.inner_iters;
  inner.workers = 1;
  inner.card_u = cfg.card_u ? cfg.card_u : cxt * cyt;
  inner.seed = derive_seed(cfg.seed, "max_resource_inner");

  struct Point {
    double value;
    std::vector<double> p;
    SearchResult inner_res;
    bool has_inner = false;
  };

  auto evaluate = [&](const std::vector<double>& p) {
    Pmf input(p);
    JointPmf j = compose(input, "X",
                         {{&resource, {"X"}, {"Y"}, {cyt}}});
    Point pt;
    pt.p = p;
    pt.value = j.mutual_information({"X"}, {"Y"});
    if (weighted) {
      pt.inner_res = min_markov_functional(j, beta, gamma, theta, inner);
      pt.has_inner = true;
      pt.value += pt.inner_res.best_value;
    }
    return pt;
  };

  // Dense simplex grid sweep. For the alphabet sizes this tool targets the
  // grid is small; it doubles as the deterministic warm start for ascent.
  const int m = std::max(2, cfg.grid_resolution);
  std::vector<std::vector<double>> grid;
  {
    std::vector<int> comp(cxt, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == cxt) {
        comp[i] = left;
        std::vector<double> p(cxt);
        for (std::size_t k = 0; k < cxt; ++k)
          p[k] = static_cast<double>(comp[k]) / m;
        grid.push_back(std::move(p));
        return;
      }
      for (int t = 0; t <= left; ++t) {
        comp[i] = t;
        rec(i + 1, left - t);
      }
    };
    rec(0, m);
    grid.push_back(std::vector<double>(cxt, 1.0 / static_cast<double>(cxt)));
  }

  Point best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  trace.reserve(grid.size());
  for (const auto& p : grid) {
    Point pt = evaluate(p);
    trace.push_back(pt.value);
    if (pt.value > best.value) best = std::move(pt);
  }

  // Local polish around the best grid point: coordinatewise proposals at
  // shrinking radii, accepted greedily. Keeps everything deterministic.
  double radius = 1.0 / m;
  for (int round = 0; round < 6; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < cxt && cxt > 1; ++i) {
      for (double dir : {+1.0, -1.0}) {
        std::vector<double> p = best.p;
        double delta = dir * radius;
        if (p[i] + delta < 0.0) continue;
        // renormalize the rest proportionally
        double rest = 1.0 - p[i];
        p[i] += delta;
        if (p[i] > 1.0) continue;
        double new_rest = 1.0 - p[i];
        bool ok = true;
        for (std::size_t k = 0; k < cxt; ++k) {
          if (k == i) continue;
          p[k] = rest > 0 ? p[k] * new_rest / rest : new_rest / (cxt - 1);
          if (p[k] < 0) ok = false;
        }
        if (!ok) continue;
        Point pt = evaluate(p);
        if (pt.value > best.value + 1e-12) {
          best = std::move(pt);
          improved = true;
        }
      }
    }
    if (!improved) radius *= 0.5;
  }

  SearchResult res;
  res.best_value = best.value;
  res.trace = std::move(trace);
  res.best_restart = 0;
  res.converged = !best.has_inner || best.inner_res.converged;
  res.residual = best.has_inner ? best.inner_res.residual : 0.0;
  res.best_point.emplace_back(1, cxt, best.p);
  if (best.has_inner)
    for (const auto& k : best.inner_res.best_point) res.best_point.push_back(k);
  return res;
}

// ---------------------------------------------------------------------------
// Inner-bound feasibility searches

namespace {

// Least-squares fit of a decoder kernel D so that chain∘D matches the
// target rows: projected gradient on each simplex row. The problem is a
// convex quadratic; a few hundred iterations land near machine precision
// when an exact solution exists.
Kernel fit_decoder(const Kernel& chain, const Kernel& target, const Pmf& input,
                   std::size_t out_size, int iters = 2500) {
  const std::size_t mid = chain.output_size();
  std::vector<double> d(mid * out_size, 1.0 / out_size);
  auto residual_grad = [&](std::vector<double>& grad) {
    double r2 = 0.0;
    grad.assign(mid * out_size, 0.0);
    for (std::size_t x = 0; x < chain.input_size(); ++x) {
      double w = input[x];
      if (w <= 0) continue;
      for (std::size_t y = 0; y < out_size; ++y) {
        double m = 0.0;
        for (std::size_t t = 0; t < mid; ++t) m += chain(x, t) * d[t * out_size + y];
        double diff = m - target(x, y);
        r2 += w * diff * diff;
        for (std::size_t t = 0; t < mid; ++t)
          grad[t * out_size + y] += 2.0 * w * diff * chain(x, t);
      }
    }
    return r2;
  };
  std::vector<double> grad;
  double step = 0.5;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iters; ++it) {
    double r2 = residual_grad(grad);
    if (r2 < 1e-24) break;
    if (r2 > prev)
      step *= 0.5;
    else
      step = std::min(step * 1.05, 4.0);
    prev = r2;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= step * grad[i];
    // project each row back onto the simplex (Euclidean projection)
    for (std::size_t t = 0; t < mid; ++t) {
      std::vector<double> row(d.begin() + t * out_size,
                              d.begin() + (t + 1) * out_size);
      std::vector<double> sorted = row;
      std::sort(sorted.begin(), sorted.end(), std::greater<double>());
      double cum = 0.0, tau = 0.0;
      int k = 0;
      for (std::size_t j = 0; j < sorted.size(); ++j) {
        cum += sorted[j];
        double cand = (cum - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - cand > 0) {
          tau = cand;
          k = static_cast<int>(j + 1);
        }
      }
      (void)k;
      for (std::size_t j = 0; j < out_size; ++j)
        d[t * out_size + j] = std::max(0.0, row[j] - tau);
    }
  }
  // normalize exactly
  for (std::size_t t = 0; t < mid; ++t) {
    double s = 0.0;
    for (std::size_t j = 0; j < out_size; ++j) s += d[t * out_size + j];
    if (s <= 0) {
      for (std::size_t j = 0; j < out_size; ++j)
        d[t * out_size + j] = 1.0 / out_size;
    } else {
      for (std::size_t j = 0; j < out_size; ++j) d[t * out_size + j] /= s;
    }
  }
  return Kernel(mid, out_size, std::move(d));
}

}  // namespace

SearchResult find_feasible_aux_p2p(const P2PInstance& inst,
                                   const SearchConfig& cfg) {
  const std::size_t cx = inst.input.size();
  const std::size_t cxt = inst.resource.input_size();
  const std::size_t cyt = inst.resource.output_size();
  const std::size_t cy = inst.target.output_size();
  const std::size_t cu = cfg.card_u ? cfg.card_u : cx * cy + 2;

  MultiStartSpec spec;
  spec.shapes = {{cx, cu * cxt}, {cyt * cu, cy}};
  spec.feasible_tol = cfg.tol;
  spec.objective = [&, cu](const std::vector<Kernel>& ks) {
    AuxP2P aux{cu, ks[0], ks[1]};
    RegionReport rep = p2p_inner_check(inst, aux, cfg.tol);
    double ms = rep.min_slack();
    return Eval{ms - kMarginalPenaltyWeight * rep.marginal_tv, ms,
                rep.marginal_tv};
  };

  // Structured starts. (a) constant U with the decoder least-squares
  // fitted to realize the target through the resource; (b) U = X~ with a
  // fitted decoder; (c) seeded random. (a) and (b) are also evaluated as
  // exact candidates, keeping boundary slacks exactly at zero.
  std::vector<std::vector<double>> inits;
  {
    Shape enc_shape{cx, cu * cxt};
    Shape dec_shape{cyt * cu, cy};

    // (a) u = 0 always, x~ = x (or x mod |X~|); p(y~|x) is then the
    // resource row of x, and the decoder is fitted to the target.
    auto enc_const = delta_logits(
        enc_shape, [&](std::size_t x) { return 0 * cxt + (x % cxt); });
    std::vector<double> e(cx * cyt, 0.0);
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t yt = 0; yt < cyt; ++yt)
        e[x * cyt + yt] = inst.resource(x % cxt, yt);
    Kernel chain_a(cx, cyt, std::move(e));
    Kernel dec_fit = fit_decoder(chain_a, inst.target, inst.input, cy);
    auto dec_logits = log_logits(dec_shape, [&](std::size_t row, std::size_t y) {
      return dec_fit(row / cu, y);  // ignore u, reuse the fitted y~ row
    });
    inits.push_back(enc_const);
    inits.back().insert(inits.back().end(), dec_logits.begin(), dec_logits.end());

    std::vector<double> enc_exact(cx * cu * cxt, 0.0);
    for (std::size_t x = 0; x < cx; ++x) enc_exact[x * (cu * cxt) + (x % cxt)] = 1.0;
    std::vector<double> dec_exact(cyt * cu * cy, 0.0);
    for (std::size_t yt = 0; yt < cyt; ++yt)
      for (std::size_t u = 0; u < cu; ++u)
        for (std::size_t y = 0; y < cy; ++y)
          dec_exact[(yt * cu + u) * cy + y] = dec_fit(yt, y);
    spec.exact_candidates.push_back({Kernel(cx, cu * cxt, enc_exact),
                                     Kernel(cyt * cu, cy, dec_exact)});

    // (b) u tied to x~: enc spreads x over x~ rows then copies u = x~
    if (cu >= cxt) {
      auto enc_copy = log_logits(enc_shape, [&](std::size_t x, std::size_t col) {
        std::size_t u = col / cxt, xt = col % cxt;
        if (u != xt) return 0.0;
        // mildly noisy map from x to x~ so the pair stays informative
        return x % cxt == xt ? 0.7 : 0.3 / std::max<std::size_t>(cxt - 1, 1);
      });
      inits.push_back(enc_copy);
      inits.back().insert(inits.back().end(), dec_logits.begin(),
                          dec_logits.end());
      std::vector<double> enc_b(cx * cu * cxt, 0.0);
      for (std::size_t x = 0; x < cx; ++x)
        for (std::size_t xt = 0; xt < cxt; ++xt) {
          double w = cxt == 1 ? 1.0
                     : x % cxt == xt ? 0.7
                                     : 0.3 / static_cast<double>(cxt - 1);
          enc_b[x * (cu * cxt) + xt * cxt + xt] = w;
        }
      spec.exact_candidates.push_back({Kernel(cx, cu * cxt, enc_b),
                                       Kernel(cyt * cu, cy, dec_exact)});
    }
  }
  spec.structured_inits = std::move(inits);

  SearchResult res = multi_start(spec, cfg, "feasible_p2p");
  // converged: STRICT_IN certificate at cfg.tol
  res.converged = res.best_value > cfg.tol && res.residual <= cfg.tol;
  return res;
}

SearchResult find_feasible_aux_mac(const MACInstance& inst,
                                   const SearchConfig& cfg) {
  const std::size_t cx = inst.input_xy.dim("X");
  const std::size_t cy = inst.input_xy.dim("Y");
  const std::size_t cz = inst.target.output_size();
  const std::size_t czt = inst.resource.output_size();
  const std::size_t cu = cfg.card_u ? cfg.card_u : cx * cz + 2;
  const std::size_t cv = cfg.card_v ? cfg.card_v : cy * cz + 2;

  MultiStartSpec spec;
  spec.shapes = {{cx, cu * inst.card_xt},
                 {cy, cv * inst.card_yt},
                 {czt * cu * cv, cz}};
  spec.feasible_tol = cfg.tol;
  spec.objective = [&, cu, cv](const std::vector<Kernel>& ks) {
    AuxMAC aux{cu, cv, ks[0], ks[1], ks[2]};
    MACCheckOptions opts;
    opts.eps = cfg.tol;
    RegionReport rep = mac_inner_check(inst, aux, opts);
    double ms = rep.min_slack();
    return Eval{ms - kMarginalPenaltyWeight * rep.marginal_tv, ms,
                rep.marginal_tv};
  };

  // exact constant-aux candidate with a least-squares fitted decoder
  {
    std::vector<double> e1(cx * cu * inst.card_xt, 0.0);
    for (std::size_t x = 0; x < cx; ++x)
      e1[x * (cu * inst.card_xt) + (x % inst.card_xt)] = 1.0;
    std::vector<double> e2(cy * cv * inst.card_yt, 0.0);
    for (std::size_t y = 0; y < cy; ++y)
      e2[y * (cv * inst.card_yt) + (y % inst.card_yt)] = 1.0;
    std::vector<double> chain(cx * cy * czt, 0.0);
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t y = 0; y < cy; ++y)
        for (std::size_t zt = 0; zt < czt; ++zt)
          chain[(x * cy + y) * czt + zt] = inst.resource(
              (x % inst.card_xt) * inst.card_yt + (y % inst.card_yt), zt);
    Kernel dec_fit =
        fit_decoder(Kernel(cx * cy, czt, chain), inst.target,
                    Pmf(inst.input_xy.table()), cz);
    std::vector<double> d(czt * cu * cv * cz, 0.0);
    for (std::size_t zt = 0; zt < czt; ++zt)
      for (std::size_t uv = 0; uv < cu * cv; ++uv)
        for (std::size_t z = 0; z < cz; ++z)
          d[(zt * cu * cv + uv) * cz + z] = dec_fit(zt, z);
    spec.exact_candidates.push_back({Kernel(cx, cu * inst.card_xt, e1),
                                     Kernel(cy, cv * inst.card_yt, e2),
                                     Kernel(czt * cu * cv, cz, d)});
  }
  SearchResult res = multi_start(spec, cfg, "feasible_mac");
  res.converged = res.best_value > cfg.tol && res.residual <= cfg.tol;
  return res;
}

SearchResult find_feasible_aux_bc(const BCInstance& inst,
                                  const SearchConfig& cfg) {
  const std::size_t cx = inst.input.size();
  const std::size_t cxt = inst.resource.input_size();
  const std::size_t cu = cfg.card_u ? cfg.card_u : cx * inst.card_y + 1;
  const std::size_t cv = cfg.card_v ? cfg.card_v : cx * inst.card_z + 1;
  const std::size_t cw = cfg.card_w ? cfg.card_w : 2;

  MultiStartSpec spec;
  spec.shapes = {{cx, cu * cv * cw * cxt},
                 {inst.card_yt * cu * cw, inst.card_y},
                 {inst.card_zt * cv * cw, inst.card_z}};
  spec.feasible_tol = cfg.tol;
  spec.objective = [&, cu, cv, cw](const std::vector<Kernel>& ks) {
    AuxBC aux{cu, cv, cw, ks[0], ks[1], ks[2]};
    RegionReport rep = bc_inner_check(inst, aux, cfg.tol);
    double ms = rep.min_slack();
    return Eval{ms - kMarginalPenaltyWeight * rep.marginal_tv, ms,
                rep.marginal_tv};
  };

  // exact constant-aux candidate: per-receiver least-squares decoder fits
  // against the target's per-receiver conditionals
  {
    std::vector<double> e(cx * cu * cv * cw * cxt, 0.0);
    for (std::size_t x = 0; x < cx; ++x)
      e[x * (cu * cv * cw * cxt) + (x % cxt)] = 1.0;
    std::vector<double> chain_y(cx * inst.card_yt, 0.0),
        chain_z(cx * inst.card_zt, 0.0);
    std::vector<double> t_y(cx * inst.card_y, 0.0), t_z(cx * inst.card_z, 0.0);
    for (std::size_t x = 0; x < cx; ++x) {
      for (std::size_t yt = 0; yt < inst.card_yt; ++yt)
        for (std::size_t zt = 0; zt < inst.card_zt; ++zt) {
          double w = inst.resource(x % cxt, yt * inst.card_zt + zt);
          chain_y[x * inst.card_yt + yt] += w;
          chain_z[x * inst.card_zt + zt] += w;
        }
      for (std::size_t y = 0; y < inst.card_y; ++y)
        for (std::size_t z = 0; z < inst.card_z; ++z) {
          double w = inst.target(x, y * inst.card_z + z);
          t_y[x * inst.card_y + y] += w;
          t_z[x * inst.card_z + z] += w;
        }
    }
    Kernel d1_fit = fit_decoder(Kernel(cx, inst.card_yt, chain_y),
                                Kernel(cx, inst.card_y, t_y), inst.input,
                                inst.card_y);
    Kernel d2_fit = fit_decoder(Kernel(cx, inst.card_zt, chain_z),
                                Kernel(cx, inst.card_z, t_z), inst.input,
                                inst.card_z);
    std::vector<double> d1(inst.card_yt * cu * cw * inst.card_y, 0.0);
    for (std::size_t yt = 0; yt < inst.card_yt; ++yt)
      for (std::size_t uw = 0; uw < cu * cw; ++uw)
        for (std::size_t y = 0; y < inst.card_y; ++y)
          d1[(yt * cu * cw + uw) * inst.card_y + y] = d1_fit(yt, y);
    std::vector<double> d2(inst.card_zt * cv * cw * inst.card_z, 0.0);
    for (std::size_t zt = 0; zt < inst.card_zt; ++zt)
      for (std::size_t vw = 0; vw < cv * cw; ++vw)
        for (std::size_t z = 0; z < inst.card_z; ++z)
          d2[(zt * cv * cw + vw) * inst.card_z + z] = d2_fit(zt, z);
    spec.exact_candidates.push_back(
        {Kernel(cx, cu * cv * cw * cxt, e),
         Kernel(inst.card_yt * cu * cw, inst.card_y, d1),
         Kernel(inst.card_zt * cv * cw, inst.card_z, d2)});
  }
  SearchResult res = multi_start(spec, cfg, "feasible_bc");
  res.converged = res.best_value > cfg.tol && res.residual <= cfg.tol;
  return res;
}

}  // namespace chansim
