#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace chansim {

// Mass vectors are accepted when they sum to 1 within this window and are
// then renormalized exactly; larger deviations are rejected. The window
// tolerates round-trips through JSON text.
inline constexpr double kMassTolerance = 1e-9;

// Hard ceiling on dense table sizes (cells). Exceeding it is an error,
// never a silent truncation.
inline constexpr std::size_t kDefaultCellCap = std::size_t{1} << 26;

// -log2 term of entropy with the 0 log 0 := 0 convention.
double entropy_term(double p);

// Probability vector over a finite alphabet indexed 0..k-1.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t k);
  static Pmf point(std::size_t k, std::size_t i);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

  double entropy() const;  // bits

 private:
  std::vector<double> p_;
};

// Row-stochastic matrix: conditional pmf over the output alphabet per input
// symbol. Product alphabets are flattened row-major by the caller's
// convention (documented per use in the instance formats).
class Kernel {
 public:
  Kernel(std::size_t input_size, std::size_t output_size,
         std::vector<double> entries);

  static Kernel identity(std::size_t k);
  static Kernel constant_row(std::size_t input_size, Pmf row);
  static Kernel from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t input_size() const { return in_; }
  std::size_t output_size() const { return out_; }
  double operator()(std::size_t in, std::size_t out) const {
    return e_[in * out_ + out];
  }
  Pmf row(std::size_t in) const;
  const std::vector<double>& entries() const { return e_; }

  // Chains this kernel with `next` (matrix product).
  Kernel then(const Kernel& next) const;

 private:
  std::size_t in_, out_;
  std::vector<double> e_;
};

// Dense joint pmf over a tuple of named finite alphabets. Values are
// immutable after construction; all operations are pure.
class JointPmf {
 public:
  JointPmf(std::vector<std::string> axes, std::vector<std::size_t> dims,
           std::vector<double> table);

  const std::vector<std::string>& axes() const { return axes_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t cells() const { return table_.size(); }

  std::size_t axis_index(const std::string& name) const;
  std::size_t dim(const std::string& name) const;

  // H of the marginal on `vars`, base-2 logs.
  double entropy(const std::vector<std::string>& vars) const;

  // I(A;B|C) = H(AC)+H(BC)-H(ABC)-H(C); clamped to 0 within -1e-10.
  double mutual_information(const std::vector<std::string>& a,
                            const std::vector<std::string>& b,
                            const std::vector<std::string>& c = {}) const;

  // Sums out every axis not in `keep`; axis order of the result follows
  // this joint's order, not the order of `keep`.
  JointPmf marginal(const std::vector<std::string>& keep) const;

  // n independent copies; axis X becomes X.1 .. X.n, copy-major order.
  JointPmf iid_extend(int n, std::size_t cell_cap = kDefaultCellCap) const;

  JointPmf renamed(std::vector<std::string> new_axes) const;

 private:
  std::vector<std::string> axes_;
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::vector<double> table_;
};

// Unhalved L1 distance sum |p - q| over all cells, range [0, 2]. This is
// the paper-style ||.||_1 convention, twice the "statistical distance"
// convention used elsewhere; all thresholds in this project use it.
double total_variation(const JointPmf& p, const JointPmf& q);
double total_variation(const Pmf& p, const Pmf& q);
double total_variation(const std::vector<double>& p,
                       const std::vector<double>& q);

// One multiplicative factor of a directed factorization: a kernel whose
// input is the product of already-present axes (row-major in listed order)
// and whose output introduces the named new axes.
struct FactorSpec {
  const Kernel* kernel;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::size_t> output_dims;
};

// Builds the product joint p(base) * prod_k kernel_k(outputs | inputs).
// Marginalizing the result reproduces each factor exactly.
JointPmf compose(const Pmf& base, const std::string& base_axis,
                 const std::vector<FactorSpec>& factors);
JointPmf compose(const JointPmf& base, const std::vector<FactorSpec>& factors);

}  // namespace chansim
