#include "chansim/osrb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chansim/regions.hpp"
#include "chansim/rng.hpp"

namespace chansim {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base)
      throw std::invalid_argument("alphabet power overflow");
    r *= base;
  }
  return r;
}

std::uint32_t bin_count(int n, double rate) {
  if (rate < 0) throw std::invalid_argument("negative binning rate");
  double c = std::ceil(std::exp2(static_cast<double>(n) * rate) - 1e-12);
  if (c > (1u << 30)) throw std::invalid_argument("bin count exceeds cap");
  return static_cast<std::uint32_t>(std::max(1.0, c));
}

void decode_digits(std::size_t index, std::size_t base, int n,
                   std::uint32_t* digits) {
  for (int i = n; i-- > 0;) {
    digits[i] = static_cast<std::uint32_t>(index % base);
    index /= base;
  }
}

// Product vector over all sequences of length n: out[idx] = prod_i
// factor(digit_i(idx)). Built by repeated outer products.
std::vector<double> tensor_power(const std::vector<double>& factor, int n) {
  std::vector<double> out{1.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> next(out.size() * factor.size());
    std::size_t k = 0;
    for (double o : out)
      for (double f : factor) next[k++] = o * f;
    out = std::move(next);
  }
  return out;
}

}  // namespace

BinningCode draw_binning(int n, double rate_g, double rate_w,
                         std::size_t card_u, std::uint64_t seed,
                         std::size_t cap) {
  if (n < 1) throw std::invalid_argument("draw_binning: n must be >= 1");
  if (card_u < 1) throw std::invalid_argument("draw_binning: empty alphabet");
  std::size_t nu = ipow(card_u, n);
  if (nu > cap)
    throw std::invalid_argument("draw_binning: |U|^n exceeds the sequence cap");

  BinningCode code;
  code.n = n;
  code.rate_g = rate_g;
  code.rate_w = rate_w;
  code.card_u = card_u;
  code.num_g = bin_count(n, rate_g);
  code.num_w = bin_count(n, rate_w);
  code.seed = seed;
  code.g_map.resize(nu);
  code.w_map.resize(nu);
  SplitMix64 rng(derive_seed(seed, "binning"));
  for (std::size_t i = 0; i < nu; ++i) {
    code.g_map[i] = static_cast<std::uint32_t>(rng.next_below(code.num_g));
    code.w_map[i] = static_cast<std::uint32_t>(rng.next_below(code.num_w));
  }
  return code;
}

SWDecoder build_sw_decoder(const BinningCode& code, const JointPmf& joint_uyt) {
  if (joint_uyt.axes() != std::vector<std::string>{"U", "Y~"})
    throw std::invalid_argument("build_sw_decoder: expected axes {U,Y~}");
  const std::size_t cu = joint_uyt.dim("U");
  const std::size_t cyt = joint_uyt.dim("Y~");
  if (cu != code.card_u)
    throw std::invalid_argument("build_sw_decoder: |U| mismatch with code");

  const int n = code.n;
  const std::size_t nu = code.sequences();
  const std::size_t nyt = ipow(cyt, n);
  const std::size_t nbins =
      static_cast<std::size_t>(code.num_g) * code.num_w;

  std::vector<std::vector<std::uint32_t>> members(nbins);
  for (std::size_t u = 0; u < nu; ++u)
    members[static_cast<std::size_t>(code.g_map[u]) * code.num_w +
            code.w_map[u]]
        .push_back(static_cast<std::uint32_t>(u));

  SWDecoder dec;
  dec.n = n;
  dec.card_u = cu;
  dec.card_yt = cyt;
  dec.num_g = code.num_g;
  dec.num_w = code.num_w;
  dec.table.assign(nbins * nyt, 0);
  dec.bin_empty.assign(nbins, 0);

  const auto& juy = joint_uyt.table();  // cu x cyt, row-major

  std::vector<std::uint32_t> udig(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> ydig(static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < nbins; ++b) {
    if (members[b].empty()) {
      dec.bin_empty[b] = 1;
      ++dec.empty_bins;
      continue;  // table stays at the declared default index 0
    }
    for (std::size_t yt = 0; yt < nyt; ++yt) {
      decode_digits(yt, cyt, n, ydig.data());
      double best = -1.0;
      std::uint32_t best_u = members[b].front();
      for (std::uint32_t u : members[b]) {
        decode_digits(u, cu, n, udig.data());
        double score = 1.0;
        for (int i = 0; i < n; ++i) score *= juy[udig[i] * cyt + ydig[i]];
        if (score > best) {  // strict: ties keep the lowest index
          best = score;
          best_u = u;
        }
      }
      dec.table[b * nyt + yt] = best_u;
    }
  }
  return dec;
}

JointPmf single_letter_uyt(const P2PInstance& inst, const AuxP2P& aux) {
  JointPmf j = p2p_joint(inst, aux);
  return j.marginal({"U", "Y~"});
}

namespace {

struct SingleLetter {
  std::size_t cx, cu, cxt, cyt, cy;
  std::vector<double> px;    // p(x)
  std::vector<double> e;     // e[u*cx+x]        = p(u|x)
  std::vector<double> f;     // f[(u*cx+x)*cyt+yt] = p(u, y~|x)
  std::vector<double> d;     // d[(yt*cu+u)*cy+y] = p(y|y~,u)
  std::vector<double> txy;   // t[x*cy+y] = p(x) target(y|x)
};

SingleLetter single_letter(const P2PInstance& inst, const AuxP2P& aux) {
  SingleLetter s;
  s.cx = inst.input.size();
  s.cu = aux.card_u;
  s.cxt = inst.resource.input_size();
  s.cyt = inst.resource.output_size();
  s.cy = inst.target.output_size();
  if (aux.enc.input_size() != s.cx ||
      aux.enc.output_size() != s.cu * s.cxt ||
      aux.dec.input_size() != s.cyt * s.cu || aux.dec.output_size() != s.cy)
    throw std::invalid_argument("osrb: aux alphabet mismatch");

  s.px = inst.input.probs();
  s.e.assign(s.cu * s.cx, 0.0);
  s.f.assign(s.cu * s.cx * s.cyt, 0.0);
  for (std::size_t x = 0; x < s.cx; ++x)
    for (std::size_t u = 0; u < s.cu; ++u)
      for (std::size_t xt = 0; xt < s.cxt; ++xt) {
        double w = aux.enc(x, u * s.cxt + xt);
        if (w == 0.0) continue;
        s.e[u * s.cx + x] += w;
        for (std::size_t yt = 0; yt < s.cyt; ++yt)
          s.f[(u * s.cx + x) * s.cyt + yt] += w * inst.resource(xt, yt);
      }
  s.d.assign(s.cyt * s.cu * s.cy, 0.0);
  for (std::size_t yt = 0; yt < s.cyt; ++yt)
    for (std::size_t u = 0; u < s.cu; ++u)
      for (std::size_t y = 0; y < s.cy; ++y)
        s.d[(yt * s.cu + u) * s.cy + y] = aux.dec(yt * s.cu + u, y);
  s.txy.assign(s.cx * s.cy, 0.0);
  for (std::size_t x = 0; x < s.cx; ++x)
    for (std::size_t y = 0; y < s.cy; ++y)
      s.txy[x * s.cy + y] = s.px[x] * inst.target(x, y);
  return s;
}

// prod_i table[u_i][pair_i] accumulated over all pair sequences, where the
// per-symbol table row depends on the current u digit. Appends into `out`.
void accumulate_u_product(const std::vector<double>& per_symbol,
                          std::size_t pair_card, int n,
                          const std::uint32_t* udig, std::vector<double>& out) {
  // iterative outer product specialized to this u^n
  std::vector<double> cur{1.0};
  for (int i = 0; i < n; ++i) {
    const double* row = per_symbol.data() + udig[i] * pair_card;
    std::vector<double> next(cur.size() * pair_card);
    std::size_t k = 0;
    for (double c : cur)
      for (std::size_t p = 0; p < pair_card; ++p) next[k++] = c * row[p];
    cur = std::move(next);
  }
  for (std::size_t i = 0; i < cur.size(); ++i) out[i] += cur[i];
}

// Exact decoder error probability under the ideal i.i.d. coupling.
double exact_sw_error(const SingleLetter& s, const JointPmf& juyt,
                      const BinningCode& code, const SWDecoder& dec) {
  const int n = code.n;
  const std::size_t nu = code.sequences();
  const std::size_t nyt = ipow(s.cyt, n);
  const auto& t = juyt.table();
  std::vector<double> pu(s.cu, 0.0);
  for (std::size_t u = 0; u < s.cu; ++u)
    for (std::size_t yt = 0; yt < s.cyt; ++yt) pu[u] += t[u * s.cyt + yt];
  double err = 0.0;
  std::vector<std::uint32_t> udig(static_cast<std::size_t>(n)),
      ydig(static_cast<std::size_t>(n));
  for (std::size_t u = 0; u < nu; ++u) {
    decode_digits(u, s.cu, n, udig.data());
    double pun = 1.0;
    for (int i = 0; i < n; ++i) pun *= pu[udig[i]];
    if (pun == 0.0) continue;
    std::uint32_t g = code.g_map[u], w = code.w_map[u];
    for (std::size_t yt = 0; yt < nyt; ++yt) {
      if (dec.decode(g, w, yt) == u) continue;
      decode_digits(yt, s.cyt, n, ydig.data());
      double pyn = 1.0;
      for (int i = 0; i < n; ++i) {
        double pj = t[udig[i] * s.cyt + ydig[i]];
        pyn *= pu[udig[i]] > 0 ? pj / pu[udig[i]] : 0.0;
      }
      err += pun * pyn;
    }
  }
  return err;
}

}  // namespace

ProtocolResult induced_pmf_protocol_b(const P2PInstance& inst,
                                      const AuxP2P& aux,
                                      const BinningCode& code,
                                      const SWDecoder& dec,
                                      std::size_t cell_cap) {
  SingleLetter s = single_letter(inst, aux);
  if (code.card_u != s.cu)
    throw std::invalid_argument("osrb: binning code |U| mismatch");
  if (dec.card_yt != s.cyt || dec.card_u != s.cu)
    throw std::invalid_argument("osrb: decoder alphabet mismatch");

  const int n = code.n;
  const std::size_t nx = ipow(s.cx, n);
  const std::size_t nu = code.sequences();
  const std::size_t nyt = ipow(s.cyt, n);
  const std::size_t ny = ipow(s.cy, n);
  const std::size_t nbins = static_cast<std::size_t>(code.num_g) * code.num_w;
  if (nx * ny > cell_cap || nx * nyt > cell_cap || nbins * nx * nyt > cell_cap)
    throw std::invalid_argument("osrb: enumeration exceeds the cell cap");

  // Z[b][x] = P(bin b | x^n); M[b][x][yt] = P(bin b, y~^n | x^n).
  // The per-u tensor products come out in interleaved (x_i, y~_i) pair
  // order; `pair_of` converts the x-major/yt-major consumer index.
  std::vector<std::size_t> pair_of(nx * nyt);
  {
    std::vector<std::uint32_t> xd(static_cast<std::size_t>(n)),
        yd(static_cast<std::size_t>(n));
    for (std::size_t x = 0; x < nx; ++x) {
      decode_digits(x, s.cx, n, xd.data());
      for (std::size_t yt = 0; yt < nyt; ++yt) {
        decode_digits(yt, s.cyt, n, yd.data());
        std::size_t p = 0;
        for (int i = 0; i < n; ++i)
          p = p * (s.cx * s.cyt) + (xd[i] * s.cyt + yd[i]);
        pair_of[x * nyt + yt] = p;
      }
    }
  }
  std::vector<std::vector<double>> Z(nbins, std::vector<double>(nx, 0.0));
  std::vector<std::vector<double>> M(nbins,
                                     std::vector<double>(nx * nyt, 0.0));
  {
    // per-u product tables: e-row over x, f-row over (x,y~) pairs
    std::vector<double> e_rows(s.cu * s.cx), f_rows(s.cu * s.cx * s.cyt);
    for (std::size_t u = 0; u < s.cu; ++u)
      for (std::size_t x = 0; x < s.cx; ++x) {
        e_rows[u * s.cx + x] = s.e[u * s.cx + x];
        for (std::size_t yt = 0; yt < s.cyt; ++yt)
          f_rows[(u * s.cx + x) * s.cyt + yt] =
              s.f[(u * s.cx + x) * s.cyt + yt];
      }
    std::vector<std::uint32_t> udig(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> Mpair(nbins,
                                           std::vector<double>(nx * nyt, 0.0));
    for (std::size_t u = 0; u < nu; ++u) {
      decode_digits(u, s.cu, n, udig.data());
      std::size_t b =
          static_cast<std::size_t>(code.g_map[u]) * code.num_w + code.w_map[u];
      accumulate_u_product(e_rows, s.cx, n, udig.data(), Z[b]);
      accumulate_u_product(f_rows, s.cx * s.cyt, n, udig.data(), Mpair[b]);
    }
    for (std::size_t b = 0; b < nbins; ++b)
      for (std::size_t i = 0; i < nx * nyt; ++i) M[b][i] = Mpair[b][pair_of[i]];
  }

  // Unconditioned fallback P(y~^n | x^n) for zero-mass (bin, x^n) pairs.
  std::vector<double> fallback;
  {
    std::vector<double> sxy(s.cx * s.cyt, 0.0);
    for (std::size_t u = 0; u < s.cu; ++u)
      for (std::size_t x = 0; x < s.cx; ++x)
        for (std::size_t yt = 0; yt < s.cyt; ++yt)
          sxy[x * s.cyt + yt] += s.f[(u * s.cx + x) * s.cyt + yt];
    fallback = tensor_power(sxy, n);  // indexed by (x,y~) pair sequence
  }

  std::vector<double> pxn = tensor_power(s.px, n);

  std::vector<double> q(nx * ny, 0.0);
  std::vector<std::vector<double>> per_g(
      code.num_g, std::vector<double>(nx * ny, 0.0));
  std::size_t zero_mass_events = 0;

  const double bin_weight = 1.0 / (static_cast<double>(code.num_g) * code.num_w);
  std::vector<std::uint32_t> ydig(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> uhatdig(static_cast<std::size_t>(n));
  std::vector<double> dvec(ny);

  for (std::uint32_t g = 0; g < code.num_g; ++g)
    for (std::uint32_t w = 0; w < code.num_w; ++w) {
      const std::size_t b = static_cast<std::size_t>(g) * code.num_w + w;
      for (std::size_t yt = 0; yt < nyt; ++yt) {
        std::uint32_t uhat = dec.decode(g, w, yt);
        decode_digits(yt, s.cyt, n, ydig.data());
        decode_digits(uhat, s.cu, n, uhatdig.data());
        // dvec[y^n] = prod_i d(y~_i, u^_i, y_i)
        {
          std::vector<double> cur{1.0};
          for (int i = 0; i < n; ++i) {
            const double* row =
                s.d.data() + (ydig[i] * s.cu + uhatdig[i]) * s.cy;
            std::vector<double> next(cur.size() * s.cy);
            std::size_t k = 0;
            for (double c : cur)
              for (std::size_t y = 0; y < s.cy; ++y) next[k++] = c * row[y];
            cur = std::move(next);
          }
          dvec = std::move(cur);
        }
        for (std::size_t x = 0; x < nx; ++x) {
          if (pxn[x] == 0.0) continue;
          double cond;
          if (Z[b][x] > 0.0) {
            cond = M[b][x * nyt + yt] / Z[b][x];
          } else {
            // zero-mass bin: encoder falls back to the unconditioned law
            cond = fallback[pair_of[x * nyt + yt]];
            if (yt == 0) ++zero_mass_events;
          }
          if (cond == 0.0) continue;
          double c = bin_weight * pxn[x] * cond;
          double* qrow = q.data() + x * ny;
          double* grow = per_g[g].data() + x * ny;
          const double gw = c * code.num_g;
          for (std::size_t y = 0; y < ny; ++y) {
            qrow[y] += c * dvec[y];
            grow[y] += gw * dvec[y];
          }
        }
      }
    }

  // target product law over (x^n, y^n)
  std::vector<double> target = tensor_power(s.txy, n);
  // reorder: tensor_power over pairs (x,y) yields pair-sequence indexing;
  // q is x-major. Convert target to the same x-major layout.
  std::vector<double> target_xy(nx * ny, 0.0);
  {
    std::vector<std::uint32_t> pdig(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < target.size(); ++p) {
      decode_digits(p, s.cx * s.cy, n, pdig.data());
      std::size_t xi = 0, yi = 0;
      for (int i = 0; i < n; ++i) {
        xi = xi * s.cx + pdig[i] / s.cy;
        yi = yi * s.cy + pdig[i] % s.cy;
      }
      target_xy[xi * ny + yi] = target[p];
    }
  }

  ProtocolResult out{
      JointPmf({"Xn", "Yn"}, {nx, ny}, q),
      {},
      {}};
  out.per_g = std::move(per_g);

  SimReport& rep = out.report;
  rep.n = n;
  rep.protocol = "B";
  rep.tv_joint = total_variation(q, target_xy);
  rep.tv_per_g.reserve(code.num_g);
  for (std::uint32_t g = 0; g < code.num_g; ++g)
    rep.tv_per_g.push_back(total_variation(out.per_g[g], target_xy));
  rep.num_g = code.num_g;
  rep.num_w = code.num_w;
  rep.empty_bins = dec.empty_bins;
  rep.zero_mass_events = zero_mass_events;
  rep.seed = code.seed;
  rep.rate_g = code.rate_g;
  rep.rate_w = code.rate_w;

  rep.sw_error_prob = exact_sw_error(s, single_letter_uyt(inst, aux), code, dec);

  // distance of P(g,w | x^n) from uniform, weighted by p(x^n)
  {
    double tv = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (pxn[x] == 0.0) continue;
      double per_x = 0.0;
      for (std::size_t b = 0; b < nbins; ++b)
        per_x += std::abs(Z[b][x] - bin_weight);
      tv += pxn[x] * per_x;
    }
    rep.bin_uniformity_tv = tv;
  }
  return out;
}

ProtocolResult induced_pmf_protocol_a(const P2PInstance& inst,
                                      const AuxP2P& aux,
                                      const BinningCode& code,
                                      const SWDecoder& dec,
                                      std::size_t cell_cap) {
  SingleLetter s = single_letter(inst, aux);
  const int n = code.n;
  const std::size_t nx = ipow(s.cx, n);
  const std::size_t nu = code.sequences();
  const std::size_t nyt = ipow(s.cyt, n);
  const std::size_t ny = ipow(s.cy, n);
  if (nx * ny > cell_cap || nu * nyt > cell_cap)
    throw std::invalid_argument("osrb: enumeration exceeds the cell cap");

  std::vector<double> q(nx * ny, 0.0);
  std::vector<std::uint32_t> udig(static_cast<std::size_t>(n)),
      ydig(static_cast<std::size_t>(n)), uhatdig(static_cast<std::size_t>(n));

  for (std::size_t u = 0; u < nu; ++u) {
    decode_digits(u, s.cu, n, udig.data());
    std::uint32_t g = code.g_map[u], w = code.w_map[u];
    for (std::size_t yt = 0; yt < nyt; ++yt) {
      decode_digits(yt, s.cyt, n, ydig.data());
      // xvec[x^n] = p(x^n) prod_i f(u_i, x_i, y~_i) requires the p(x)
      // factor; f already carries p(u,y~|x), so multiply p(x) per symbol.
      std::vector<double> xvec{1.0};
      for (int i = 0; i < n; ++i) {
        std::vector<double> next(xvec.size() * s.cx);
        std::size_t k = 0;
        for (double c : xvec)
          for (std::size_t x = 0; x < s.cx; ++x)
            next[k++] =
                c * s.px[x] * s.f[(udig[i] * s.cx + x) * s.cyt + ydig[i]];
        xvec = std::move(next);
      }
      std::uint32_t uhat = dec.decode(g, w, yt);
      decode_digits(uhat, s.cu, n, uhatdig.data());
      std::vector<double> dvec{1.0};
      for (int i = 0; i < n; ++i) {
        const double* row = s.d.data() + (ydig[i] * s.cu + uhatdig[i]) * s.cy;
        std::vector<double> next(dvec.size() * s.cy);
        std::size_t k = 0;
        for (double c : dvec)
          for (std::size_t y = 0; y < s.cy; ++y) next[k++] = c * row[y];
        dvec = std::move(next);
      }
      for (std::size_t x = 0; x < nx; ++x) {
        if (xvec[x] == 0.0) continue;
        double* qrow = q.data() + x * ny;
        for (std::size_t y = 0; y < ny; ++y) qrow[y] += xvec[x] * dvec[y];
      }
    }
  }

  std::vector<double> target = tensor_power(s.txy, n);
  std::vector<double> target_xy(nx * ny, 0.0);
  {
    std::vector<std::uint32_t> pdig(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < target.size(); ++p) {
      decode_digits(p, s.cx * s.cy, n, pdig.data());
      std::size_t xi = 0, yi = 0;
      for (int i = 0; i < n; ++i) {
        xi = xi * s.cx + pdig[i] / s.cy;
        yi = yi * s.cy + pdig[i] % s.cy;
      }
      target_xy[xi * ny + yi] = target[p];
    }
  }

  ProtocolResult out{JointPmf({"Xn", "Yn"}, {nx, ny}, q), {}, {}};
  SimReport& rep = out.report;
  rep.n = n;
  rep.protocol = "A";
  rep.tv_joint = total_variation(q, target_xy);
  rep.sw_error_prob =
      exact_sw_error(s, single_letter_uyt(inst, aux), code, dec);
  rep.num_g = code.num_g;
  rep.num_w = code.num_w;
  rep.empty_bins = dec.empty_bins;
  rep.seed = code.seed;
  rep.rate_g = code.rate_g;
  rep.rate_w = code.rate_w;
  return out;
}

SimReport fix_g_instance(const ProtocolResult& result, GSelection sel,
                         std::uint32_t index) {
  const SimReport& base = result.report;
  if (base.tv_per_g.empty())
    throw std::invalid_argument("fix_g_instance: per-g conditionals missing");
  std::uint32_t g = index;
  if (sel == GSelection::kBest) {
    g = 0;
    for (std::uint32_t k = 1; k < base.tv_per_g.size(); ++k)
      if (base.tv_per_g[k] < base.tv_per_g[g]) g = k;
  } else if (g >= base.tv_per_g.size()) {
    throw std::invalid_argument("fix_g_instance: unknown g index");
  }
  SimReport rep = base;
  rep.protocol = "B_fixed_g";
  rep.fixed_g = static_cast<int>(g);
  rep.tv_joint = base.tv_per_g[g];
  return rep;
}

SimReport simulate_protocol_b_mc(const P2PInstance& inst, const AuxP2P& aux,
                                 const BinningCode& code, const SWDecoder& dec,
                                 std::size_t samples, std::uint64_t seed) {
  SingleLetter s = single_letter(inst, aux);
  const int n = code.n;
  const std::size_t nx = ipow(s.cx, n);
  const std::size_t ny = ipow(s.cy, n);
  const std::size_t nu = code.sequences();

  SplitMix64 rng(derive_seed(seed, "mc"));
  auto draw = [&](const double* w, std::size_t k) {
    double r = rng.next_unit();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      acc += w[i];
      if (r < acc) return i;
    }
    return k - 1;
  };

  std::vector<double> hist(nx * ny, 0.0);
  std::vector<std::uint32_t> xdig(static_cast<std::size_t>(n)),
      udig(static_cast<std::size_t>(n)), ydig(static_cast<std::size_t>(n)),
      uhatdig(static_cast<std::size_t>(n));
  std::vector<double> weights;
  std::size_t zero_mass = 0;

  for (std::size_t it = 0; it < samples; ++it) {
    for (int i = 0; i < n; ++i)
      xdig[i] = static_cast<std::uint32_t>(draw(s.px.data(), s.cx));
    std::uint32_t g = static_cast<std::uint32_t>(rng.next_below(code.num_g));
    std::uint32_t w = static_cast<std::uint32_t>(rng.next_below(code.num_w));

    // bin-conditioned draw of u^n given x^n
    weights.clear();
    double z = 0.0;
    for (std::size_t u = 0; u < nu; ++u) {
      double wt = 0.0;
      if (code.g_map[u] == g && code.w_map[u] == w) {
        decode_digits(u, s.cu, n, udig.data());
        wt = 1.0;
        for (int i = 0; i < n; ++i) wt *= s.e[udig[i] * s.cx + xdig[i]];
      }
      weights.push_back(wt);
      z += wt;
    }
    if (z == 0.0) {
      ++zero_mass;
      weights.assign(nu, 0.0);
      z = 0.0;
      for (std::size_t u = 0; u < nu; ++u) {
        decode_digits(u, s.cu, n, udig.data());
        double wt = 1.0;
        for (int i = 0; i < n; ++i) wt *= s.e[udig[i] * s.cx + xdig[i]];
        weights[u] = wt;
        z += wt;
      }
    }
    for (auto& v : weights) v /= z;
    std::size_t u = draw(weights.data(), nu);
    decode_digits(u, s.cu, n, udig.data());

    // y~^n through the per-symbol conditional f/e
    std::size_t yt_index = 0;
    for (int i = 0; i < n; ++i) {
      double eu = s.e[udig[i] * s.cx + xdig[i]];
      std::vector<double> cond(s.cyt, 1.0 / s.cyt);
      if (eu > 0) {
        for (std::size_t yt = 0; yt < s.cyt; ++yt)
          cond[yt] = s.f[(udig[i] * s.cx + xdig[i]) * s.cyt + yt] / eu;
      }
      ydig[i] = static_cast<std::uint32_t>(draw(cond.data(), s.cyt));
      yt_index = yt_index * s.cyt + ydig[i];
    }
    std::uint32_t uhat = dec.decode(g, w, yt_index);
    decode_digits(uhat, s.cu, n, uhatdig.data());

    std::size_t xi = 0, yi = 0;
    for (int i = 0; i < n; ++i) {
      const double* row = s.d.data() + (ydig[i] * s.cu + uhatdig[i]) * s.cy;
      std::size_t y = draw(row, s.cy);
      xi = xi * s.cx + xdig[i];
      yi = yi * s.cy + y;
    }
    hist[xi * ny + yi] += 1.0;
  }
  for (auto& h : hist) h /= static_cast<double>(samples);

  std::vector<double> target = tensor_power(s.txy, n);
  std::vector<double> target_xy(nx * ny, 0.0);
  std::vector<std::uint32_t> pdig(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < target.size(); ++p) {
    decode_digits(p, s.cx * s.cy, n, pdig.data());
    std::size_t xi = 0, yi = 0;
    for (int i = 0; i < n; ++i) {
      xi = xi * s.cx + pdig[i] / s.cy;
      yi = yi * s.cy + pdig[i] % s.cy;
    }
    target_xy[xi * ny + yi] = target[p];
  }

  SimReport rep;
  rep.n = n;
  rep.protocol = "B";
  rep.monte_carlo = true;
  rep.samples = samples;
  rep.tv_joint = total_variation(hist, target_xy);
  rep.num_g = code.num_g;
  rep.num_w = code.num_w;
  rep.empty_bins = dec.empty_bins;
  rep.zero_mass_events = zero_mass;
  rep.seed = seed;
  rep.rate_g = code.rate_g;
  rep.rate_w = code.rate_w;
  rep.notes.push_back(
      "plug-in TV estimate from an empirical histogram; biased upward at "
      "small sample counts");
  return rep;
}

}  // namespace chansim
