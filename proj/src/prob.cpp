#include "chansim/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace chansim {

namespace {

void validate_mass(std::vector<double>& v, const char* what) {
  double sum = 0.0;
  for (double& x : v) {
    if (std::isnan(x)) throw std::invalid_argument(std::string(what) + ": NaN entry");
    if (x < 0.0) {
      if (x < -1e-12)
        throw std::invalid_argument(std::string(what) + ": negative entry " +
                                    std::to_string(x));
      x = 0.0;
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kMassTolerance)
    throw std::invalid_argument(std::string(what) + ": mass " +
                                std::to_string(sum) + " not within 1e-9 of 1");
  if (sum != 1.0) {
    for (double& x : v) x /= sum;
  }
}

}  // namespace

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw std::invalid_argument("Pmf: empty alphabet");
  validate_mass(p_, "Pmf");
}

Pmf Pmf::uniform(std::size_t k) {
  return Pmf(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Pmf Pmf::point(std::size_t k, std::size_t i) {
  if (i >= k) throw std::invalid_argument("Pmf::point: index out of range");
  std::vector<double> v(k, 0.0);
  v[i] = 1.0;
  return Pmf(std::move(v));
}

double Pmf::entropy() const {
  double h = 0.0;
  for (double x : p_) h += entropy_term(x);
  return h;
}

Kernel::Kernel(std::size_t input_size, std::size_t output_size,
               std::vector<double> entries)
    : in_(input_size), out_(output_size), e_(std::move(entries)) {
  if (in_ == 0 || out_ == 0) throw std::invalid_argument("Kernel: empty alphabet");
  if (e_.size() != in_ * out_)
    throw std::invalid_argument("Kernel: entry count does not match shape");
  for (std::size_t r = 0; r < in_; ++r) {
    std::vector<double> row(e_.begin() + r * out_, e_.begin() + (r + 1) * out_);
    validate_mass(row, "Kernel row");
    std::copy(row.begin(), row.end(), e_.begin() + r * out_);
  }
}

Kernel Kernel::identity(std::size_t k) {
  std::vector<double> e(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) e[i * k + i] = 1.0;
  return Kernel(k, k, std::move(e));
}

Kernel Kernel::constant_row(std::size_t input_size, Pmf row) {
  std::vector<double> e;
  e.reserve(input_size * row.size());
  for (std::size_t i = 0; i < input_size; ++i)
    e.insert(e.end(), row.probs().begin(), row.probs().end());
  return Kernel(input_size, row.size(), std::move(e));
}

Kernel Kernel::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("Kernel: no rows");
  std::size_t out = rows.front().size();
  std::vector<double> e;
  e.reserve(rows.size() * out);
  for (const auto& r : rows) {
    if (r.size() != out)
      throw std::invalid_argument("Kernel: ragged rows");
    e.insert(e.end(), r.begin(), r.end());
  }
  return Kernel(rows.size(), out, std::move(e));
}

Pmf Kernel::row(std::size_t in) const {
  if (in >= in_) throw std::invalid_argument("Kernel::row: index out of range");
  return Pmf(std::vector<double>(e_.begin() + in * out_,
                                 e_.begin() + (in + 1) * out_));
}

Kernel Kernel::then(const Kernel& next) const {
  if (out_ != next.in_)
    throw std::invalid_argument("Kernel::then: alphabet mismatch");
  std::vector<double> e(in_ * next.out_, 0.0);
  for (std::size_t i = 0; i < in_; ++i)
    for (std::size_t m = 0; m < out_; ++m) {
      double w = (*this)(i, m);
      if (w == 0.0) continue;
      for (std::size_t o = 0; o < next.out_; ++o)
        e[i * next.out_ + o] += w * next(m, o);
    }
  return Kernel(in_, next.out_, std::move(e));
}

JointPmf::JointPmf(std::vector<std::string> axes,
                   std::vector<std::size_t> dims, std::vector<double> table)
    : axes_(std::move(axes)), dims_(std::move(dims)), table_(std::move(table)) {
  if (axes_.empty() || axes_.size() != dims_.size())
    throw std::invalid_argument("JointPmf: axes/dims mismatch");
  std::unordered_set<std::string> seen;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].empty() || !seen.insert(axes_[i]).second)
      throw std::invalid_argument("JointPmf: empty or duplicate axis name");
    if (dims_[i] == 0) throw std::invalid_argument("JointPmf: empty alphabet");
    cells *= dims_[i];
  }
  if (table_.size() != cells)
    throw std::invalid_argument("JointPmf: table size does not match dims");
  validate_mass(table_, "JointPmf");
  strides_.assign(dims_.size(), 1);
  for (std::size_t i = dims_.size(); i-- > 1;)
    strides_[i - 1] = strides_[i] * dims_[i];
}

std::size_t JointPmf::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i] == name) return i;
  throw std::invalid_argument("JointPmf: unknown variable label '" + name + "'");
}

std::size_t JointPmf::dim(const std::string& name) const {
  return dims_[axis_index(name)];
}

JointPmf JointPmf::marginal(const std::vector<std::string>& keep) const {
  if (keep.empty()) throw std::invalid_argument("marginal: empty variable set");
  std::vector<bool> keep_mask(axes_.size(), false);
  for (const auto& n : keep) keep_mask[axis_index(n)] = true;

  std::vector<std::string> out_axes;
  std::vector<std::size_t> out_dims;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (keep_mask[i]) {
      out_axes.push_back(axes_[i]);
      out_dims.push_back(dims_[i]);
      kept.push_back(i);
    }

  std::vector<std::size_t> out_strides(kept.size(), 1);
  for (std::size_t i = kept.size(); i-- > 1;)
    out_strides[i - 1] = out_strides[i] * out_dims[i];

  std::vector<double> out(table_.size() ? 1 : 0, 0.0);
  std::size_t out_cells = 1;
  for (auto d : out_dims) out_cells *= d;
  out.assign(out_cells, 0.0);

  std::vector<std::size_t> idx(axes_.size(), 0);
  for (std::size_t flat = 0; flat < table_.size(); ++flat) {
    std::size_t o = 0;
    for (std::size_t k = 0; k < kept.size(); ++k)
      o += idx[kept[k]] * out_strides[k];
    out[o] += table_[flat];
    for (std::size_t ax = axes_.size(); ax-- > 0;) {
      if (++idx[ax] < dims_[ax]) break;
      idx[ax] = 0;
    }
  }
  // Bypass re-validation drift: the sum is preserved exactly by addition
  // order only up to rounding, which validate tolerates.
  return JointPmf(std::move(out_axes), std::move(out_dims), std::move(out));
}

double JointPmf::entropy(const std::vector<std::string>& vars) const {
  if (vars.empty()) throw std::invalid_argument("entropy: empty variable set");
  if (vars.size() == axes_.size()) {
    bool all = true;
    for (const auto& v : vars) {
      bool found = false;
      for (const auto& a : axes_)
        if (a == v) { found = true; break; }
      if (!found) { all = false; break; }
    }
    if (all) {
      double h = 0.0;
      for (double p : table_) h += entropy_term(p);
      return h;
    }
  }
  JointPmf m = marginal(vars);
  double h = 0.0;
  for (double p : m.table()) h += entropy_term(p);
  return h;
}

namespace {
std::vector<std::string> join_vars(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::vector<std::string> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}
}  // namespace

double JointPmf::mutual_information(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b,
                                    const std::vector<std::string>& c) const {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mutual_information: empty variable set");
  std::unordered_set<std::string> seen;
  for (const auto* group : {&a, &b, &c})
    for (const auto& v : *group)
      if (!seen.insert(v).second)
        throw std::invalid_argument(
            "mutual_information: overlapping variable sets ('" + v + "')");

  double hac = entropy(join_vars(a, c));
  double hbc = entropy(join_vars(b, c));
  double habc = entropy(join_vars(join_vars(a, b), c));
  double hc = c.empty() ? 0.0 : entropy(c);
  double i = hac + hbc - habc - hc;
  if (i < 0.0 && i > -1e-10) i = 0.0;
  return i;
}

JointPmf JointPmf::iid_extend(int n, std::size_t cell_cap) const {
  if (n < 1) throw std::invalid_argument("iid_extend: n must be >= 1");
  double projected = 1.0;
  for (int k = 0; k < n; ++k) projected *= static_cast<double>(table_.size());
  if (projected > static_cast<double>(cell_cap))
    throw std::invalid_argument("iid_extend: table would exceed the cell cap");

  std::vector<std::string> axes;
  std::vector<std::size_t> dims;
  for (int copy = 1; copy <= n; ++copy)
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      axes.push_back(axes_[i] + "." + std::to_string(copy));
      dims.push_back(dims_[i]);
    }

  std::size_t base_cells = table_.size();
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= base_cells;
  std::vector<double> out(total, 1.0);
  // flat index decomposes base-|cells| copy-major, matching the axis order.
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    double v = 1.0;
    for (int k = n; k-- > 0;) {
      v *= table_[rest % base_cells];
      rest /= base_cells;
    }
    out[flat] = v;
  }
  return JointPmf(std::move(axes), std::move(dims), std::move(out));
}

JointPmf JointPmf::renamed(std::vector<std::string> new_axes) const {
  return JointPmf(std::move(new_axes), dims_, table_);
}

double total_variation(const std::vector<double>& p,
                       const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("total_variation: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

double total_variation(const JointPmf& p, const JointPmf& q) {
  if (p.axes() != q.axes() || p.dims() != q.dims())
    throw std::invalid_argument("total_variation: axis/alphabet mismatch");
  return total_variation(p.table(), q.table());
}

double total_variation(const Pmf& p, const Pmf& q) {
  return total_variation(p.probs(), q.probs());
}

JointPmf compose(const JointPmf& base, const std::vector<FactorSpec>& factors) {
  std::vector<std::string> axes = base.axes();
  std::vector<std::size_t> dims = base.dims();
  std::vector<double> table = base.table();

  for (const auto& f : factors) {
    if (f.kernel == nullptr) throw std::invalid_argument("compose: null kernel");
    if (f.outputs.size() != f.output_dims.size() || f.outputs.empty())
      throw std::invalid_argument("compose: outputs/output_dims mismatch");

    // Resolve input axes against the axes accumulated so far.
    std::vector<std::size_t> in_axis;
    for (const auto& name : f.inputs) {
      std::size_t i = 0;
      for (; i < axes.size(); ++i)
        if (axes[i] == name) break;
      if (i == axes.size())
        throw std::invalid_argument("compose: dangling wire '" + name + "'");
      in_axis.push_back(i);
    }
    std::size_t in_card = 1;
    for (auto i : in_axis) in_card *= dims[i];
    std::size_t out_card = 1;
    for (auto d : f.output_dims) out_card *= d;
    if (f.kernel->input_size() != in_card || f.kernel->output_size() != out_card)
      throw std::invalid_argument("compose: kernel alphabet mismatch");

    std::size_t old_cells = table.size();
    std::vector<double> next(old_cells * out_card, 0.0);

    // strides of the current table
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;)
      strides[i - 1] = strides[i] * dims[i];

    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t flat = 0; flat < old_cells; ++flat) {
      double w = table[flat];
      if (w != 0.0) {
        std::size_t row = 0;
        for (auto i : in_axis) row = row * dims[i] + idx[i];
        const double* krow = f.kernel->entries().data() + row * out_card;
        double* dst = next.data() + flat * out_card;
        for (std::size_t o = 0; o < out_card; ++o) dst[o] = w * krow[o];
      }
      for (std::size_t ax = dims.size(); ax-- > 0;) {
        if (++idx[ax] < dims[ax]) break;
        idx[ax] = 0;
      }
    }

    for (std::size_t k = 0; k < f.outputs.size(); ++k) {
      axes.push_back(f.outputs[k]);
      dims.push_back(f.output_dims[k]);
    }
    table = std::move(next);
    if (table.size() > kDefaultCellCap)
      throw std::invalid_argument("compose: table exceeds the cell cap");
  }
  return JointPmf(std::move(axes), std::move(dims), std::move(table));
}

JointPmf compose(const Pmf& base, const std::string& base_axis,
                 const std::vector<FactorSpec>& factors) {
  JointPmf start({base_axis}, {base.size()}, base.probs());
  return compose(start, factors);
}

}  // namespace chansim
