#include "chansim/regions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace chansim {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kStrictIn: return "STRICT_IN";
    case Verdict::kClosureIn: return "CLOSURE_IN";
    case Verdict::kOut: return "OUT";
  }
  return "?";
}

double RegionReport::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [name, s] : slacks) m = std::min(m, s);
  return m;
}

namespace {

Verdict grade(double min_slack, double marginal_tv, double eps) {
  if (marginal_tv > eps) return Verdict::kOut;
  if (min_slack > eps) return Verdict::kStrictIn;
  if (min_slack >= -eps) return Verdict::kClosureIn;
  return Verdict::kOut;
}

using V = std::vector<std::string>;

}  // namespace

JointPmf p2p_target_joint(const P2PInstance& inst) {
  return compose(inst.input, "X",
                 {{&inst.target, {"X"}, {"Y"}, {inst.target.output_size()}}});
}

JointPmf p2p_joint(const P2PInstance& inst, const AuxP2P& aux) {
  const std::size_t cx = inst.input.size();
  const std::size_t cxt = inst.resource.input_size();
  const std::size_t cyt = inst.resource.output_size();
  const std::size_t cy = inst.target.output_size();
  if (aux.enc.input_size() != cx ||
      aux.enc.output_size() != aux.card_u * cxt ||
      aux.dec.input_size() != cyt * aux.card_u || aux.dec.output_size() != cy)
    throw std::invalid_argument("p2p_joint: alphabet mismatch");
  return compose(inst.input, "X",
                 {{&aux.enc, {"X"}, {"U", "X~"}, {aux.card_u, cxt}},
                  {&inst.resource, {"X~"}, {"Y~"}, {cyt}},
                  {&aux.dec, {"Y~", "U"}, {"Y"}, {cy}}});
}

JointPmf mac_target_joint(const MACInstance& inst) {
  return compose(inst.input_xy,
                 {{&inst.target, {"X", "Y"}, {"Z"}, {inst.target.output_size()}}});
}

JointPmf mac_joint(const MACInstance& inst, const AuxMAC& aux) {
  const std::size_t cx = inst.input_xy.dim("X");
  const std::size_t cy = inst.input_xy.dim("Y");
  const std::size_t cz = inst.target.output_size();
  const std::size_t czt = inst.resource.output_size();
  if (inst.resource.input_size() != inst.card_xt * inst.card_yt)
    throw std::invalid_argument("mac_joint: resource input mismatch");
  if (inst.target.input_size() != cx * cy)
    throw std::invalid_argument("mac_joint: target input mismatch");
  if (aux.enc1.input_size() != cx ||
      aux.enc1.output_size() != aux.card_u * inst.card_xt ||
      aux.enc2.input_size() != cy ||
      aux.enc2.output_size() != aux.card_v * inst.card_yt ||
      aux.dec.input_size() != czt * aux.card_u * aux.card_v ||
      aux.dec.output_size() != cz)
    throw std::invalid_argument("mac_joint: alphabet mismatch");
  return compose(inst.input_xy,
                 {{&aux.enc1, {"X"}, {"U", "X~"}, {aux.card_u, inst.card_xt}},
                  {&aux.enc2, {"Y"}, {"V", "Y~"}, {aux.card_v, inst.card_yt}},
                  {&inst.resource, {"X~", "Y~"}, {"Z~"}, {czt}},
                  {&aux.dec, {"Z~", "U", "V"}, {"Z"}, {cz}}});
}

JointPmf bc_target_joint(const BCInstance& inst) {
  return compose(inst.input, "X",
                 {{&inst.target, {"X"}, {"Y", "Z"}, {inst.card_y, inst.card_z}}});
}

JointPmf bc_joint(const BCInstance& inst, const AuxBC& aux) {
  const std::size_t cx = inst.input.size();
  const std::size_t cxt = inst.resource.input_size();
  if (inst.resource.output_size() != inst.card_yt * inst.card_zt)
    throw std::invalid_argument("bc_joint: resource output mismatch");
  if (inst.target.input_size() != cx ||
      inst.target.output_size() != inst.card_y * inst.card_z)
    throw std::invalid_argument("bc_joint: target shape mismatch");
  if (aux.enc.input_size() != cx ||
      aux.enc.output_size() != aux.card_u * aux.card_v * aux.card_w * cxt ||
      aux.dec1.input_size() != inst.card_yt * aux.card_u * aux.card_w ||
      aux.dec1.output_size() != inst.card_y ||
      aux.dec2.input_size() != inst.card_zt * aux.card_v * aux.card_w ||
      aux.dec2.output_size() != inst.card_z)
    throw std::invalid_argument("bc_joint: alphabet mismatch");
  return compose(
      inst.input, "X",
      {{&aux.enc, {"X"}, {"U", "V", "W", "X~"},
        {aux.card_u, aux.card_v, aux.card_w, cxt}},
       {&inst.resource, {"X~"}, {"Y~", "Z~"}, {inst.card_yt, inst.card_zt}},
       {&aux.dec1, {"Y~", "U", "W"}, {"Y"}, {inst.card_y}},
       {&aux.dec2, {"Z~", "V", "W"}, {"Z"}, {inst.card_z}}});
}

JointPmf cuff_joint(const Pmf& input, const AuxCuff& aux) {
  if (aux.aux_u.input_size() != input.size() ||
      aux.aux_u.output_size() != aux.card_u ||
      aux.dec.input_size() != aux.card_u)
    throw std::invalid_argument("cuff_joint: alphabet mismatch");
  return compose(input, "X",
                 {{&aux.aux_u, {"X"}, {"U'"}, {aux.card_u}},
                  {&aux.dec, {"U'"}, {"Y"}, {aux.dec.output_size()}}});
}

RegionReport p2p_inner_check(const P2PInstance& inst, const AuxP2P& aux,
                             double eps) {
  JointPmf j = p2p_joint(inst, aux);
  double i_uyt = j.mutual_information({"U"}, {"Y~"});
  double i_uxy = j.mutual_information({"U"}, {"X", "Y"});
  double i_ux = j.mutual_information({"U"}, {"X"});

  RegionReport rep;
  rep.slacks = {
      {"R + I(U;Y~) - I(U;XY)", inst.rate + i_uyt - i_uxy},
      {"I(U;Y~) - I(U;X)", i_uyt - i_ux},
  };
  rep.marginal_tv =
      total_variation(j.marginal({"X", "Y"}), p2p_target_joint(inst));
  rep.verdict = grade(rep.min_slack(), rep.marginal_tv, eps);
  return rep;
}

RegionReport mac_inner_check(const MACInstance& inst, const AuxMAC& aux,
                             const MACCheckOptions& opts) {
  JointPmf j = mac_joint(inst, aux);
  const double r1 = inst.rate1, r2 = inst.rate2;
  double i_u_vzt = j.mutual_information({"U"}, {"V", "Z~"});
  double i_u_x = j.mutual_information({"U"}, {"X"});
  double i_v_uzt = j.mutual_information({"V"}, {"U", "Z~"});
  double i_v_y = j.mutual_information({"V"}, {"Y"});
  double i_uv_zt = j.mutual_information({"U", "V"}, {"Z~"});
  double i_uv_xy = j.mutual_information({"U", "V"}, {"X", "Y"});
  double i_u_xyz = j.mutual_information({"U"}, {"X", "Y", "Z"});
  double i_v_xyz = j.mutual_information({"V"}, {"X", "Y", "Z"});
  double i_uv_xyz = j.mutual_information({"U", "V"}, {"X", "Y", "Z"});
  double i_v_zt = j.mutual_information({"V"}, {"Z~"});
  double i_u_zt = j.mutual_information({"U"}, {"Z~"});

  RegionReport rep;
  rep.slacks.emplace_back("I(U;VZ~) - I(U;X)", i_u_vzt - i_u_x);
  if (!opts.disable_v)
    rep.slacks.emplace_back("I(V;UZ~) - I(V;Y)", i_v_uzt - i_v_y);
  rep.slacks.emplace_back("I(UV;Z~) - I(UV;XY)", i_uv_zt - i_uv_xy);
  rep.slacks.emplace_back("R1 + I(U;VZ~) - I(U;XYZ)", r1 + i_u_vzt - i_u_xyz);
  rep.slacks.emplace_back("R2 + I(V;UZ~) - I(V;XYZ)", r2 + i_v_uzt - i_v_xyz);
  rep.slacks.emplace_back("R1 + R2 + I(UV;Z~) - I(UV;XYZ)",
                          r1 + r2 + i_uv_zt - i_uv_xyz);
  rep.slacks.emplace_back("R1 + I(U;VZ~) + I(V;Z~) - I(U;XYZ) - I(V;Y)",
                          r1 + i_u_vzt + i_v_zt - i_u_xyz - i_v_y);
  rep.slacks.emplace_back("R2 + I(V;UZ~) + I(U;Z~) - I(V;XYZ) - I(U;X)",
                          r2 + i_v_uzt + i_u_zt - i_v_xyz - i_u_x);
  if (opts.disable_v)
    rep.notes.push_back("I(V;UZ~) > I(V;Y) disabled (single-sender reduction)");

  rep.marginal_tv =
      total_variation(j.marginal({"X", "Y", "Z"}), mac_target_joint(inst));
  rep.verdict = grade(rep.min_slack(), rep.marginal_tv, opts.eps);
  return rep;
}

RegionReport bc_inner_check(const BCInstance& inst, const AuxBC& aux,
                            double eps) {
  JointPmf j = bc_joint(inst, aux);
  const double r = inst.rate;
  double i_wu_yt = j.mutual_information({"W", "U"}, {"Y~"});
  double i_uw_x = j.mutual_information({"U", "W"}, {"X"});
  double i_uw_xyz = j.mutual_information({"U", "W"}, {"X", "Y", "Z"});
  double i_wv_zt = j.mutual_information({"W", "V"}, {"Z~"});
  double i_wv_x = j.mutual_information({"W", "V"}, {"X"});
  double i_wv_xyz = j.mutual_information({"W", "V"}, {"X", "Y", "Z"});
  double i_u_v_wx = j.mutual_information({"U"}, {"V"}, {"W", "X"});
  double i_u_v_wxyz = j.mutual_information({"U"}, {"V"}, {"W", "X", "Y", "Z"});
  double i_w_yt = j.mutual_information({"W"}, {"Y~"});
  double i_w_zt = j.mutual_information({"W"}, {"Z~"});
  double i_u_yt_w = j.mutual_information({"U"}, {"Y~"}, {"W"});
  double i_v_zt_w = j.mutual_information({"V"}, {"Z~"}, {"W"});
  double i_w_x = j.mutual_information({"W"}, {"X"});
  double i_u_x_w = j.mutual_information({"U"}, {"X"}, {"W"});
  double i_v_x_w = j.mutual_information({"V"}, {"X"}, {"W"});
  double i_w_xyz = j.mutual_information({"W"}, {"X", "Y", "Z"});
  double i_u_xyz_w = j.mutual_information({"U"}, {"X", "Y", "Z"}, {"W"});
  double i_v_xyz_w = j.mutual_information({"V"}, {"X", "Y", "Z"}, {"W"});
  double i_w_yz_x = j.mutual_information({"W"}, {"Y", "Z"}, {"X"});
  double min_w = std::min(i_w_yt, i_w_zt);

  RegionReport rep;
  rep.slacks.emplace_back("I(WU;Y~) - I(UW;X)", i_wu_yt - i_uw_x);
  rep.slacks.emplace_back("R + I(WU;Y~) - I(UW;XYZ)", r + i_wu_yt - i_uw_xyz);
  rep.slacks.emplace_back("I(WV;Z~) - I(WV;X)", i_wv_zt - i_wv_x);
  rep.slacks.emplace_back("R + I(WV;Z~) - I(WV;XYZ)", r + i_wv_zt - i_wv_xyz);
  rep.slacks.emplace_back(
      "I(WU;Y~) + I(WV;Z~) - I(UW;X) - I(WV;X) - I(U;V|WX)",
      i_wu_yt + i_wv_zt - i_uw_x - i_wv_x - i_u_v_wx);
  rep.slacks.emplace_back(
      "2R + I(UW;Y~) + I(VW;Z~) - I(UW;XYZ) - I(VW;XYZ) - I(U;V|WXYZ)",
      2 * r + i_wu_yt + i_wv_zt - i_uw_xyz - i_wv_xyz - i_u_v_wxyz);
  rep.slacks.emplace_back(
      "min{I(W;Y~),I(W;Z~)} + I(U;Y~|W) + I(V;Z~|W) - I(W;X) - I(U;X|W) - "
      "I(V;X|W) - I(U;V|WX)",
      min_w + i_u_yt_w + i_v_zt_w - i_w_x - i_u_x_w - i_v_x_w - i_u_v_wx);
  rep.slacks.emplace_back(
      "R + min{I(W;Y~),I(W;Z~)} + I(U;Y~|W) + I(V;Z~|W) - I(W;XYZ) - "
      "I(U;XYZ|W) - I(V;XYZ|W) - I(U;V|WXYZ)",
      r + min_w + i_u_yt_w + i_v_zt_w - i_w_xyz - i_u_xyz_w - i_v_xyz_w -
          i_u_v_wxyz);
  rep.slacks.emplace_back(
      "R + I(W;YZ|X) + I(UW;Y~) + I(VW;Z~) - I(UW;XYZ) - I(VW;XYZ) - "
      "I(U;V|WXYZ)",
      r + i_w_yz_x + i_wu_yt + i_wv_zt - i_uw_xyz - i_wv_xyz - i_u_v_wxyz);

  rep.marginal_tv =
      total_variation(j.marginal({"X", "Y", "Z"}), bc_target_joint(inst));
  rep.verdict = grade(rep.min_slack(), rep.marginal_tv, eps);
  return rep;
}

RegionReport cuff_region_check(const Pmf& input, const Kernel& target,
                               double rate, const AuxCuff& aux, double eps) {
  JointPmf j = cuff_joint(input, aux);
  double i_upxy = j.mutual_information({"U'"}, {"X", "Y"});
  double i_upx = j.mutual_information({"U'"}, {"X"});

  RegionReport rep;
  rep.slacks = {
      {"R + C~ - I(U';XY)", rate + aux.wire_rate - i_upxy},
      {"C~ - I(U';X)", aux.wire_rate - i_upx},
  };
  P2PInstance tmp{input, target, Kernel::identity(input.size()), rate};
  rep.marginal_tv =
      total_variation(j.marginal({"X", "Y"}), p2p_target_joint(tmp));
  if (rep.marginal_tv > eps)
    rep.notes.push_back("induced p(x,y) does not match the requested target");
  rep.verdict = grade(rep.min_slack(), rep.marginal_tv, eps);
  return rep;
}

double p2p_outer_lhs(const JointPmf& joint_xy, double beta, double gamma,
                     double theta, std::size_t card_u,
                     const SearchConfig& cfg) {
  if (beta < 0 || gamma < 0 || theta < 0)
    throw std::invalid_argument("p2p_outer_lhs: weights must be non-negative");
  double ixy = joint_xy.mutual_information({"X"}, {"Y"});
  if (beta == 0 && gamma == 0 && theta == 0) return ixy;
  SearchConfig c = cfg;
  if (card_u) c.card_u = card_u;
  SearchResult min_res = min_markov_functional(joint_xy, beta, gamma, theta, c);
  return ixy + min_res.best_value;
}

RegionReport p2p_outer_check(const P2PInstance& inst, const OuterWeights& w,
                             const SearchConfig& cfg, double eps) {
  JointPmf target = p2p_target_joint(inst);
  double lhs = p2p_outer_lhs(target, w.beta, w.gamma, w.theta, cfg.card_u, cfg);
  SearchResult rhs_max =
      max_resource_expression(inst.resource, w.beta, w.gamma, w.theta, cfg);
  double rhs = rhs_max.best_value + (w.beta + w.gamma + w.theta) * inst.rate;

  RegionReport rep;
  rep.slacks = {{"RHS - LHS", rhs - lhs}};
  rep.extras["lhs"] = lhs;
  rep.extras["rhs"] = rhs;
  rep.extras["rhs_bracket"] = rhs_max.best_value;
  rep.extras["rhs_restarts"] = static_cast<double>(rhs_max.trace.size());
  if (!rhs_max.best_point.empty())
    rep.vectors["best_resource_input"] = rhs_max.best_point.front().entries();
  rep.verdict = lhs > rhs + eps ? Verdict::kOut : Verdict::kClosureIn;
  if (rep.verdict == Verdict::kOut)
    rep.notes.push_back("refuted: required information exceeds the resource");
  else
    rep.notes.push_back("not refuted at these weights (search-quality bound)");
  return rep;
}

RegionReport nonbayesian_outer_check(const Kernel& target,
                                     const Kernel& resource, double rate,
                                     const OuterWeights& w,
                                     const SearchConfig& cfg,
                                     int input_grid_resolution, double eps) {
  const std::size_t cx = target.input_size();
  // simplex grid with denominator `input_grid_resolution`
  std::vector<std::vector<double>> grid;
  std::vector<int> comp(cx, 0);
  const int m = std::max(1, input_grid_resolution);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == cx) {
      comp[i] = left;
      std::vector<double> p(cx);
      for (std::size_t k = 0; k < cx; ++k)
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
  grid.push_back(std::vector<double>(cx, 1.0 / static_cast<double>(cx)));

  double best_lhs = -std::numeric_limits<double>::infinity();
  std::vector<double> best_input;
  for (const auto& p : grid) {
    Pmf input(p);
    P2PInstance tmp{input, target, resource, rate};
    JointPmf joint = p2p_target_joint(tmp);
    double lhs =
        p2p_outer_lhs(joint, w.beta, w.gamma, w.theta, cfg.card_u, cfg);
    if (lhs > best_lhs) {
      best_lhs = lhs;
      best_input = p;
    }
  }

  SearchResult rhs_max =
      max_resource_expression(resource, w.beta, w.gamma, w.theta, cfg);
  double rhs = rhs_max.best_value + (w.beta + w.gamma + w.theta) * rate;

  RegionReport rep;
  rep.slacks = {{"RHS - LHS", rhs - best_lhs}};
  rep.extras["lhs"] = best_lhs;
  rep.extras["rhs"] = rhs;
  rep.vectors["best_input"] = best_input;
  if (!rhs_max.best_point.empty())
    rep.vectors["best_resource_input"] = rhs_max.best_point.front().entries();
  rep.verdict = best_lhs > rhs + eps ? Verdict::kOut : Verdict::kClosureIn;
  return rep;
}

}  // namespace chansim
