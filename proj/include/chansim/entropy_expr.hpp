#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chansim/prob.hpp"

namespace chansim {

// Exact rational with int64 numerator/denominator. Intermediate products go
// through 128-bit arithmetic; anything that cannot be reduced back into
// int64 throws. Elimination on the systems this tool handles stays tiny.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;

  std::string str() const;

 private:
  std::int64_t num_, den_;
};

// A set of variable labels; canonical joint-entropy atoms are keyed by it.
using VarSet = std::set<std::string>;

std::string varset_str(const VarSet& vs);

// Linear combination of joint-entropy atoms H(S) plus a rational constant.
// Conditional entropies and (conditional) mutual informations are expanded
// into this basis on construction, so equal quantities compare equal.
class EntropyExpr {
 public:
  EntropyExpr() = default;

  static EntropyExpr atom(const VarSet& vars, Rational coeff = Rational(1));
  static EntropyExpr constant(Rational c);
  static EntropyExpr cond_entropy(const VarSet& a, const VarSet& given);
  static EntropyExpr mutual_info(const VarSet& a, const VarSet& b,
                                 const VarSet& given = {});

  const std::map<VarSet, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant_term() const { return constant_; }
  bool is_zero() const { return coeffs_.empty() && constant_.is_zero(); }

  EntropyExpr operator+(const EntropyExpr& o) const;
  EntropyExpr operator-(const EntropyExpr& o) const;
  EntropyExpr scaled(const Rational& c) const;
  bool operator==(const EntropyExpr& o) const {
    return coeffs_ == o.coeffs_ && constant_ == o.constant_;
  }

  // All variable labels mentioned by any atom.
  VarSet variables() const;

  // Canonical text form, H-atoms only (sorted by size then label).
  std::string str() const;

  // Substitutes numeric entropies of `joint` for the atoms (bits).
  double eval(const JointPmf& joint) const;

  void add_term(const VarSet& vars, const Rational& c);
  void add_constant(const Rational& c) { constant_ = constant_ + c; }

 private:
  std::map<VarSet, Rational> coeffs_;
  Rational constant_;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " (at position " + std::to_string(position) +
                           ")"),
        pos(position) {}
  std::size_t pos;
};

// Parses the documented grammar: sums of rational-coefficient H(A), H(A|B),
// I(A;B), I(A;B|C) terms and bare rationals. Labels match [A-Za-z][\w~]*.
EntropyExpr parse_expr(const std::string& text);

// One linear inequality over rate variables with an entropic right side.
// Canonical orientation:   sum_i coeff_i * rate_i  {>,<}  rhs.
struct LinIneq {
  std::map<std::string, Rational> rate_coeffs;
  EntropyExpr rhs;
  bool greater = true;  // sense: true for '>', false for '<'
  bool strict = true;

  // Same halfspace with sense '>' (negates both sides when needed).
  LinIneq normalized() const;
  std::string str() const;
};

struct IneqSystem {
  std::vector<std::string> rate_vars;
  std::vector<LinIneq> inequalities;
  std::vector<EntropyExpr> equalities;     // each expression == 0
  std::vector<EntropyExpr> nonneg_atoms;   // each expression >= 0 (flagged)

  std::string str() const;
};

// Parses a system file: one `rates:` line, inequality lines, optional
// `equal:` / `nonneg:` lines, '#' comments. See the README for the EBNF.
IneqSystem parse_system(const std::string& text);
IneqSystem parse_system_file(const std::string& path);

// Merges equalities/nonneg lines of `side` into `sys` (rate lines in the
// side file are rejected).
void merge_side_conditions(IneqSystem& sys, const IneqSystem& side);

struct FmOptions {
  // When set, prunes rows implied by a non-negative combination of the
  // remaining rows, the supplied equalities and the flagged non-negative
  // atoms (exact rational LP).
  bool simplify = false;
  // Adds weak rows `r >= 0` for every rate variable before eliminating.
  // Off by default: the derived regions are monotone in the binning rates,
  // so these extras are vacuous but not syntactically removable.
  bool add_rate_nonnegativity = false;
};

// Fourier-Motzkin projection of the system onto the non-eliminated rate
// variables. Combining two strict bounds yields a strict bound; strict
// with weak yields strict; weak with weak stays weak.
IneqSystem fm_eliminate(const IneqSystem& sys,
                        const std::vector<std::string>& eliminate,
                        const FmOptions& opts = {});

enum class RegionOrder { kEqual, kASubsetB, kBSubsetA, kIncomparable };
std::string to_string(RegionOrder o);

struct RegionCompareResult {
  RegionOrder order;
  std::vector<LinIneq> only_in_a;  // witnesses
  std::vector<LinIneq> only_in_b;
};

// Syntactic comparison in the canonical basis after reducing both sides by
// the span of the supplied equalities and normalizing positive scale.
// Subset verdicts are region inclusions: extra inequalities shrink a region.
RegionCompareResult region_equal(const IneqSystem& a, const IneqSystem& b,
                                 const std::vector<EntropyExpr>& equalities);

// Evaluates an inequality's slack (rate part minus rhs) on a joint given a
// rate assignment; used to cross-check symbolic and numeric layers.
double ineq_slack(const LinIneq& iq, const JointPmf& joint,
                  const std::map<std::string, double>& rates);

}  // namespace chansim
