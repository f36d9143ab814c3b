#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chansim/instances.hpp"
#include "chansim/prob.hpp"

namespace chansim {

// Sequence-index convention: u^n maps to sum_i u_i * |U|^(n-1-i) (big-endian
// in symbol order). The same convention is used for x^n, y~^n and y^n.

inline constexpr std::size_t kDefaultBinningCap = std::size_t{1} << 20;

// Random double binning of U^n: every sequence index gets an independent
// uniform pair (g, w). Bin counts are ceil(2^(n*rate)), so desk-scale rates
// are quantized upward to the next integer bin count.
struct BinningCode {
  int n = 1;
  double rate_g = 0.0, rate_w = 0.0;
  std::size_t card_u = 1;
  std::uint32_t num_g = 1, num_w = 1;
  std::vector<std::uint32_t> g_map, w_map;  // size card_u^n
  std::uint64_t seed = 0;

  std::size_t sequences() const { return g_map.size(); }
};

BinningCode draw_binning(int n, double rate_g, double rate_w,
                         std::size_t card_u, std::uint64_t seed,
                         std::size_t cap = kDefaultBinningCap);

// Table decoder: for every (g, w, y~^n) the max-a-posteriori u^n inside the
// announced bin under the product law prod_i p(u_i, y~_i). Ties resolve to
// the lowest sequence index; an empty bin yields index 0 and is flagged.
struct SWDecoder {
  int n = 1;
  std::size_t card_u = 1, card_yt = 1;
  std::uint32_t num_g = 1, num_w = 1;
  std::vector<std::uint32_t> table;  // ((g*num_w + w) * |Yt|^n + yt) -> u
  std::vector<std::uint8_t> bin_empty;  // per (g*num_w + w)
  std::size_t empty_bins = 0;

  std::uint32_t decode(std::uint32_t g, std::uint32_t w,
                       std::size_t yt_index) const {
    std::size_t nyt = table.size() / (static_cast<std::size_t>(num_g) * num_w);
    return table[(static_cast<std::size_t>(g) * num_w + w) * nyt + yt_index];
  }
};

// joint_uyt: single-letter law over axes {"U","Y~"} (protocol-A coupling).
SWDecoder build_sw_decoder(const BinningCode& code, const JointPmf& joint_uyt);

struct SimReport {
  int n = 1;
  std::string protocol;  // "A" | "B" | "B_fixed_g"
  double tv_joint = 0.0;
  std::vector<double> tv_per_g;
  double sw_error_prob = 0.0;
  // L1 distance between P(g,w,x^n) and uniform bins times p(x^n); the
  // binning-independence figure of merit behind the first rate constraint.
  double bin_uniformity_tv = 0.0;
  std::uint32_t num_g = 1, num_w = 1;
  std::size_t empty_bins = 0;
  std::size_t zero_mass_events = 0;  // encoder fallbacks (g,w,x^n)
  std::uint64_t seed = 0;
  double rate_g = 0.0, rate_w = 0.0;
  int fixed_g = -1;
  bool monte_carlo = false;
  std::size_t samples = 0;
  std::vector<std::string> notes;
};

struct ProtocolResult {
  JointPmf joint;                          // axes {"Xn","Yn"}
  std::vector<std::vector<double>> per_g;  // q(x^n,y^n | g), same layout
  SimReport report;
};

// Exact induced law of the operational protocol: uniform (g, w), encoder
// draws u^n from the bin-conditioned product law (falling back to the
// unconditioned law on zero-mass bins, flagged), y~^n through the resource,
// u^n re-estimated by the decoder, y^n through the symbolwise dec kernel.
ProtocolResult induced_pmf_protocol_b(const P2PInstance& inst,
                                      const AuxP2P& aux,
                                      const BinningCode& code,
                                      const SWDecoder& dec,
                                      std::size_t cell_cap = kDefaultCellCap);

// Diagnostic variant: u^n keeps its ideal i.i.d. coupling with x^n (no bin
// conditioning) but y^n is generated from the decoder's estimate, isolating
// the decoding-error contribution.
ProtocolResult induced_pmf_protocol_a(const P2PInstance& inst,
                                      const AuxP2P& aux,
                                      const BinningCode& code,
                                      const SWDecoder& dec,
                                      std::size_t cell_cap = kDefaultCellCap);

enum class GSelection { kBest, kIndex };

// Conditions the protocol-B law on one instance of g. kBest picks the
// argmin conditional TV (ties to the lowest index).
SimReport fix_g_instance(const ProtocolResult& result, GSelection sel,
                         std::uint32_t index = 0);

// Sampling estimate of the protocol-B law; the reported TV is the plug-in
// estimate from the empirical histogram and is biased upward at small
// sample counts. Exact mode is the reference; this exists for spot checks.
SimReport simulate_protocol_b_mc(const P2PInstance& inst, const AuxP2P& aux,
                                 const BinningCode& code, const SWDecoder& dec,
                                 std::size_t samples, std::uint64_t seed);

// Single-letter protocol-A coupling p(u, y~) induced by instance and aux.
JointPmf single_letter_uyt(const P2PInstance& inst, const AuxP2P& aux);

}  // namespace chansim
