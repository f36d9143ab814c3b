#include "chansim/entropy_expr.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

namespace chansim {

// ---------------------------------------------------------------------------
// Rational

namespace {

std::int64_t checked_cast(__int128 v, const char* what) {
  if (v > static_cast<__int128>(INT64_MAX) ||
      v < static_cast<__int128>(INT64_MIN))
    throw std::overflow_error(std::string("Rational overflow in ") + what);
  return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make_reduced(__int128 n, __int128 d, const char* what) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return Rational(checked_cast(n, what), checked_cast(d, what));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  return make_reduced(static_cast<__int128>(num_) * o.den_ +
                          static_cast<__int128>(o.num_) * den_,
                      static_cast<__int128>(den_) * o.den_, "+");
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  return make_reduced(static_cast<__int128>(num_) * o.num_,
                      static_cast<__int128>(den_) * o.den_, "*");
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw std::invalid_argument("Rational: division by zero");
  return make_reduced(static_cast<__int128>(num_) * o.den_,
                      static_cast<__int128>(den_) * o.num_, "/");
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num_) * o.den_ <
         static_cast<__int128>(o.num_) * den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

// ---------------------------------------------------------------------------
// EntropyExpr

std::string varset_str(const VarSet& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += ",";
    s += v;
  }
  return s;
}

namespace {
VarSet set_union(const VarSet& a, const VarSet& b) {
  VarSet r = a;
  r.insert(b.begin(), b.end());
  return r;
}
}  // namespace

EntropyExpr EntropyExpr::atom(const VarSet& vars, Rational coeff) {
  EntropyExpr e;
  e.add_term(vars, coeff);
  return e;
}

EntropyExpr EntropyExpr::constant(Rational c) {
  EntropyExpr e;
  e.add_constant(c);
  return e;
}

EntropyExpr EntropyExpr::cond_entropy(const VarSet& a, const VarSet& given) {
  EntropyExpr e;
  e.add_term(set_union(a, given), Rational(1));
  if (!given.empty()) e.add_term(given, Rational(-1));
  return e;
}

EntropyExpr EntropyExpr::mutual_info(const VarSet& a, const VarSet& b,
                                     const VarSet& given) {
  EntropyExpr e;
  e.add_term(set_union(a, given), Rational(1));
  e.add_term(set_union(b, given), Rational(1));
  e.add_term(set_union(set_union(a, b), given), Rational(-1));
  if (!given.empty()) e.add_term(given, Rational(-1));
  return e;
}

void EntropyExpr::add_term(const VarSet& vars, const Rational& c) {
  if (vars.empty())
    throw std::invalid_argument("EntropyExpr: empty atom");
  auto it = coeffs_.find(vars);
  if (it == coeffs_.end()) {
    if (!c.is_zero()) coeffs_.emplace(vars, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) coeffs_.erase(it);
}

EntropyExpr EntropyExpr::operator+(const EntropyExpr& o) const {
  EntropyExpr r = *this;
  for (const auto& [k, v] : o.coeffs_) r.add_term(k, v);
  r.constant_ = r.constant_ + o.constant_;
  return r;
}

EntropyExpr EntropyExpr::operator-(const EntropyExpr& o) const {
  return *this + o.scaled(Rational(-1));
}

EntropyExpr EntropyExpr::scaled(const Rational& c) const {
  EntropyExpr r;
  if (c.is_zero()) return r;
  for (const auto& [k, v] : coeffs_) r.coeffs_.emplace(k, v * c);
  r.constant_ = constant_ * c;
  return r;
}

VarSet EntropyExpr::variables() const {
  VarSet r;
  for (const auto& [k, v] : coeffs_) r.insert(k.begin(), k.end());
  return r;
}

namespace {
// Atom ordering used everywhere output must be deterministic: smaller sets
// first, lexicographic within the same size.
bool atom_less(const VarSet& a, const VarSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::vector<VarSet> sorted_atoms(const EntropyExpr& e) {
  std::vector<VarSet> keys;
  keys.reserve(e.coeffs().size());
  for (const auto& [k, v] : e.coeffs()) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), atom_less);
  return keys;
}
}  // namespace

std::string EntropyExpr::str() const {
  std::string s;
  for (const auto& k : sorted_atoms(*this)) {
    const Rational& c = coeffs_.at(k);
    if (!s.empty()) s += c.is_negative() ? " - " : " + ";
    else if (c.is_negative()) s += "-";
    Rational mag = c.is_negative() ? -c : c;
    if (!(mag == Rational(1))) s += mag.str() + " ";
    s += "H(" + varset_str(k) + ")";
  }
  if (!constant_.is_zero() || coeffs_.empty()) {
    if (!s.empty()) s += constant_.is_negative() ? " - " : " + ";
    else if (constant_.is_negative()) s += "-";
    Rational mag = constant_.is_negative() ? -constant_ : constant_;
    s += mag.str();
  }
  return s;
}

double EntropyExpr::eval(const JointPmf& joint) const {
  double v = constant_.to_double();
  for (const auto& [k, c] : coeffs_) {
    std::vector<std::string> vars(k.begin(), k.end());
    v += c.to_double() * joint.entropy(vars);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Lexer {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos);
  }
  bool label_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  bool label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '~';
  }
  std::string read_label() {
    skip_ws();
    if (pos >= s.size() || !label_start(s[pos]))
      throw ParseError("expected variable label", pos);
    std::size_t start = pos;
    while (pos < s.size() && label_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }
  std::int64_t read_integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos == start) throw ParseError("expected integer", pos);
    return std::stoll(s.substr(start, pos - start));
  }
};

VarSet read_varlist(Lexer& lx, char stop1, char stop2) {
  VarSet vars;
  for (;;) {
    vars.insert(lx.read_label());
    lx.accept(',');
    char c = lx.peek();
    if (c == stop1 || c == stop2) break;
    if (c == '\0') throw ParseError("unterminated variable list", lx.pos);
  }
  return vars;
}

// A single side of a line: rate part plus entropy part. `rate_vars` may be
// null, in which case every bare label is an error.
struct SideResult {
  std::map<std::string, Rational> rates;
  EntropyExpr expr;
};

SideResult parse_side(Lexer& lx, const std::set<std::string>* rate_vars) {
  SideResult out;
  bool first = true;
  for (;;) {
    Rational sign(1);
    if (lx.accept('-')) sign = Rational(-1);
    else if (lx.accept('+')) sign = Rational(1);
    else if (!first)
      break;
    first = false;

    Rational coeff = sign;
    bool have_coeff = false;
    if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
      std::int64_t num = lx.read_integer();
      std::int64_t den = 1;
      if (lx.accept('/')) den = lx.read_integer();
      coeff = sign * Rational(num, den);
      have_coeff = true;
      lx.accept('*');
    }

    char c = lx.peek();
    if (c == 'H' && lx.s.compare(lx.pos, 2, "H(") == 0) {
      lx.pos += 2;
      VarSet a = read_varlist(lx, '|', ')');
      VarSet given;
      if (lx.accept('|')) given = read_varlist(lx, ')', ')');
      lx.expect(')');
      out.expr = out.expr + EntropyExpr::cond_entropy(a, given).scaled(coeff);
    } else if (c == 'I' && lx.s.compare(lx.pos, 2, "I(") == 0) {
      lx.pos += 2;
      VarSet a = read_varlist(lx, ';', ';');
      lx.expect(';');
      VarSet b = read_varlist(lx, '|', ')');
      VarSet given;
      if (lx.accept('|')) given = read_varlist(lx, ')', ')');
      lx.expect(')');
      out.expr = out.expr + EntropyExpr::mutual_info(a, b, given).scaled(coeff);
    } else if (lx.label_start(c)) {
      std::size_t at = lx.pos;
      std::string label = lx.read_label();
      if (rate_vars == nullptr || !rate_vars->count(label))
        throw ParseError("unknown variable label '" + label + "'", at);
      out.rates[label] = (out.rates.count(label) ? out.rates[label] : Rational(0)) + coeff;
    } else if (have_coeff) {
      out.expr.add_constant(coeff);
    } else {
      throw ParseError("expected term", lx.pos);
    }
  }
  for (auto it = out.rates.begin(); it != out.rates.end();) {
    if (it->second.is_zero()) it = out.rates.erase(it);
    else ++it;
  }
  return out;
}

}  // namespace

EntropyExpr parse_expr(const std::string& text) {
  Lexer lx{text};
  SideResult side = parse_side(lx, nullptr);
  if (!lx.eof()) throw ParseError("trailing input", lx.pos);
  return side.expr;
}

// ---------------------------------------------------------------------------
// LinIneq / IneqSystem

LinIneq LinIneq::normalized() const {
  if (greater) return *this;
  LinIneq r;
  for (const auto& [k, v] : rate_coeffs) r.rate_coeffs[k] = -v;
  r.rhs = rhs.scaled(Rational(-1));
  r.greater = true;
  r.strict = strict;
  return r;
}

std::string LinIneq::str() const {
  std::string s;
  for (const auto& [k, v] : rate_coeffs) {
    if (!s.empty()) s += v.is_negative() ? " - " : " + ";
    else if (v.is_negative()) s += "-";
    Rational mag = v.is_negative() ? -v : v;
    if (!(mag == Rational(1))) s += mag.str() + " ";
    s += k;
  }
  if (s.empty()) s = "0";
  s += greater ? (strict ? " > " : " >= ") : (strict ? " < " : " <= ");
  std::string rhs_s = rhs.str();
  s += rhs_s.empty() ? "0" : rhs_s;
  return s;
}

std::string IneqSystem::str() const {
  std::string s = "rates:";
  for (const auto& r : rate_vars) s += " " + r;
  s += "\n";
  for (const auto& iq : inequalities) s += iq.str() + "\n";
  for (const auto& eq : equalities) s += "equal: " + eq.str() + " = 0\n";
  for (const auto& a : nonneg_atoms) s += "nonneg: " + a.str() + "\n";
  return s;
}

IneqSystem parse_system(const std::string& text) {
  IneqSystem sys;
  std::set<std::string> rate_set;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto notspace = line.find_first_not_of(" \t\r\n");
    if (notspace == std::string::npos) continue;
    line.erase(0, notspace);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                             line.back() == ' ' || line.back() == '\t'))
      line.pop_back();

    try {
      if (line.rfind("rates:", 0) == 0) {
        Lexer lx{line};
        lx.pos = 6;
        while (!lx.eof()) {
          std::string r = lx.read_label();
          if (!rate_set.insert(r).second)
            throw ParseError("duplicate rate variable '" + r + "'", lx.pos);
          sys.rate_vars.push_back(r);
          lx.accept(',');
        }
        continue;
      }
      if (line.rfind("equal:", 0) == 0) {
        std::string body = line.substr(6);
        auto eq = body.find('=');
        EntropyExpr e;
        if (eq == std::string::npos) {
          e = parse_expr(body);
        } else {
          e = parse_expr(body.substr(0, eq)) - parse_expr(body.substr(eq + 1));
        }
        sys.equalities.push_back(e);
        continue;
      }
      if (line.rfind("nonneg:", 0) == 0) {
        sys.nonneg_atoms.push_back(parse_expr(line.substr(7)));
        continue;
      }

      auto lt = line.find('<');
      auto gt = line.find('>');
      if (lt == std::string::npos && gt == std::string::npos)
        throw ParseError("expected an inequality", 0);
      bool greater = lt == std::string::npos;
      std::size_t at = greater ? gt : lt;
      bool strict = true;
      std::size_t rhs_start = at + 1;
      if (rhs_start < line.size() && line[rhs_start] == '=') {
        strict = false;
        ++rhs_start;
      }
      std::string lhs_text = line.substr(0, at);
      std::string rhs_text = line.substr(rhs_start);
      Lexer lxl{lhs_text};
      SideResult lhs = parse_side(lxl, &rate_set);
      if (!lxl.eof()) throw ParseError("trailing input on left side", lxl.pos);
      Lexer lxr{rhs_text};
      SideResult rhs = parse_side(lxr, &rate_set);
      if (!lxr.eof()) throw ParseError("trailing input on right side", lxr.pos);

      LinIneq iq;
      iq.greater = greater;
      iq.strict = strict;
      for (const auto& [k, v] : lhs.rates) iq.rate_coeffs[k] = v;
      for (const auto& [k, v] : rhs.rates) {
        auto& c = iq.rate_coeffs[k];
        c = c - v;
        if (c.is_zero()) iq.rate_coeffs.erase(k);
      }
      iq.rhs = rhs.expr - lhs.expr;
      if (iq.rate_coeffs.empty() && iq.rhs.is_zero())
        throw ParseError("vacuous inequality", 0);
      sys.inequalities.push_back(iq);
    } catch (ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what(),
                       e.pos);
    }
  }
  return sys;
}

IneqSystem parse_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open system file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

void merge_side_conditions(IneqSystem& sys, const IneqSystem& side) {
  if (!side.rate_vars.empty() || !side.inequalities.empty())
    throw std::invalid_argument(
        "side-condition file may only contain equal:/nonneg: lines");
  sys.equalities.insert(sys.equalities.end(), side.equalities.begin(),
                        side.equalities.end());
  sys.nonneg_atoms.insert(sys.nonneg_atoms.end(), side.nonneg_atoms.begin(),
                          side.nonneg_atoms.end());
}

// ---------------------------------------------------------------------------
// Exact rational LP (feasibility + max sum of selected vars), Bland's rule.

namespace {

class SimplexLP {
 public:
  // Feasibility of A x = b, x >= 0; `maximize_mask` marks columns whose sum
  // should be maximized in a second phase (empty => feasibility only).
  // Returns std::nullopt when infeasible; otherwise the achieved maximum of
  // the masked sum (0 when mask empty), with "unbounded" mapped to 1.
  static std::optional<Rational> run(std::vector<std::vector<Rational>> a,
                                     std::vector<Rational> b,
                                     const std::vector<bool>& maximize_mask) {
    const std::size_t m = a.size();
    const std::size_t n = m ? a[0].size() : 0;
    for (std::size_t i = 0; i < m; ++i)
      if (b[i].is_negative()) {
        for (auto& v : a[i]) v = -v;
        b[i] = -b[i];
      }
    // tableau: n structural + m artificial columns, rhs separate.
    std::vector<std::vector<Rational>> t(m,
                                         std::vector<Rational>(n + m, Rational(0)));
    std::vector<Rational> rhs = b;
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
      t[i][n + i] = Rational(1);
      basis[i] = n + i;
    }

    // phase 1: minimize sum of artificials.
    std::vector<Rational> cost(n + m, Rational(0));
    for (std::size_t j = n; j < n + m; ++j) cost[j] = Rational(1);
    Rational objective = run_phase(t, rhs, basis, cost, /*maximize=*/false);
    if (!(objective == Rational(0))) return std::nullopt;
    // pivot artificials out of the basis where possible
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      std::size_t j = 0;
      for (; j < n; ++j)
        if (!t[i][j].is_zero()) break;
      if (j < n) pivot(t, rhs, basis, i, j);
      // an all-zero structural row is a redundant constraint; harmless.
    }

    bool any = false;
    for (bool f : maximize_mask) any = any || f;
    if (!any) return Rational(0);

    // phase 2: maximize masked sum over structural columns; artificial
    // columns are frozen at zero by giving them a prohibitive cost.
    std::vector<Rational> cost2(n + m, Rational(0));
    for (std::size_t j = 0; j < n; ++j)
      if (maximize_mask[j]) cost2[j] = Rational(1);
    return run_phase2_max(t, rhs, basis, cost2, n);
  }

 private:
  static void pivot(std::vector<std::vector<Rational>>& t,
                    std::vector<Rational>& rhs, std::vector<std::size_t>& basis,
                    std::size_t pr, std::size_t pc) {
    Rational inv = Rational(1) / t[pr][pc];
    for (auto& v : t[pr]) v = v * inv;
    rhs[pr] = rhs[pr] * inv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == pr || t[i][pc].is_zero()) continue;
      Rational f = t[i][pc];
      for (std::size_t j = 0; j < t[i].size(); ++j)
        t[i][j] = t[i][j] - f * t[pr][j];
      rhs[i] = rhs[i] - f * rhs[pr];
    }
    basis[pr] = pc;
  }

  // Minimizes cost^T x with Bland's rule; returns the optimum.
  static Rational run_phase(std::vector<std::vector<Rational>>& t,
                            std::vector<Rational>& rhs,
                            std::vector<std::size_t>& basis,
                            const std::vector<Rational>& cost, bool maximize) {
    const std::size_t ncols = t.empty() ? 0 : t[0].size();
    for (;;) {
      // reduced costs: c_j - c_B^T B^{-1} A_j
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < ncols; ++j) {
        Rational red = cost[j];
        for (std::size_t i = 0; i < t.size(); ++i)
          red = red - cost[basis[i]] * t[i][j];
        bool improves = maximize ? Rational(0) < red : red < Rational(0);
        if (improves) {
          enter = j;
          break;  // Bland: lowest index
        }
      }
      if (!enter) break;
      std::optional<std::size_t> leave;
      std::optional<Rational> best;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(Rational(0) < t[i][*enter])) continue;
        Rational ratio = rhs[i] / t[i][*enter];
        if (!best || ratio < *best ||
            (ratio == *best && basis[i] < basis[*leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (!leave) {
        // unbounded in the improving direction
        return maximize ? Rational(1) : Rational(-1);
      }
      pivot(t, rhs, basis, *leave, *enter);
    }
    Rational obj(0);
    for (std::size_t i = 0; i < t.size(); ++i) obj = obj + cost[basis[i]] * rhs[i];
    return obj;
  }

  static Rational run_phase2_max(std::vector<std::vector<Rational>>& t,
                                 std::vector<Rational>& rhs,
                                 std::vector<std::size_t>& basis,
                                 const std::vector<Rational>& cost,
                                 std::size_t n_structural) {
    const std::size_t ncols = t.empty() ? 0 : t[0].size();
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < n_structural && j < ncols; ++j) {
        Rational red = cost[j];
        for (std::size_t i = 0; i < t.size(); ++i)
          red = red - cost[basis[i]] * t[i][j];
        if (Rational(0) < red) {
          enter = j;
          break;
        }
      }
      if (!enter) break;
      std::optional<std::size_t> leave;
      std::optional<Rational> best;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(Rational(0) < t[i][*enter])) continue;
        Rational ratio = rhs[i] / t[i][*enter];
        if (!best || ratio < *best ||
            (ratio == *best && basis[i] < basis[*leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (!leave) return Rational(1);  // unbounded: strictly positive reachable
      pivot(t, rhs, basis, *leave, *enter);
    }
    Rational obj(0);
    for (std::size_t i = 0; i < t.size(); ++i) obj = obj + cost[basis[i]] * rhs[i];
    return obj;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Equality basis reduction and canonical row keys

namespace {

struct EqBasis {
  // pairs (pivot atom, expression with coefficient 1 on the pivot)
  std::vector<std::pair<VarSet, EntropyExpr>> rows;

  static EqBasis build(const std::vector<EntropyExpr>& eqs) {
    EqBasis b;
    for (EntropyExpr e : eqs) {
      for (const auto& [pivot, expr] : b.rows) {
        auto it = e.coeffs().find(pivot);
        if (it != e.coeffs().end()) e = e - expr.scaled(it->second);
      }
      std::optional<VarSet> pivot;
      for (const auto& k : sorted_atoms(e))
        if (!e.coeffs().at(k).is_zero()) {
          pivot = k;
          break;
        }
      if (!pivot) continue;  // redundant (or pure-constant) equality
      e = e.scaled(Rational(1) / e.coeffs().at(*pivot));
      b.rows.emplace_back(*pivot, e);
    }
    return b;
  }

  EntropyExpr reduce(EntropyExpr e) const {
    for (const auto& [pivot, expr] : rows) {
      auto it = e.coeffs().find(pivot);
      if (it != e.coeffs().end()) e = e - expr.scaled(it->second);
    }
    return e;
  }
};

// Canonical comparable key of a '>'-normalized inequality: positive scale
// fixed by the leading coefficient (rates first, then atoms, then constant).
struct RowKey {
  std::vector<std::pair<std::string, Rational>> rates;
  std::vector<std::pair<std::string, Rational>> atoms;
  Rational constant;
  bool strict;

  bool operator==(const RowKey& o) const {
    return strict == o.strict && constant == o.constant && rates == o.rates &&
           atoms == o.atoms;
  }
  bool operator<(const RowKey& o) const {
    auto pair_less = [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return x.second < y.second;
    };
    if (rates != o.rates)
      return std::lexicographical_compare(rates.begin(), rates.end(),
                                          o.rates.begin(), o.rates.end(),
                                          pair_less);
    if (atoms != o.atoms)
      return std::lexicographical_compare(atoms.begin(), atoms.end(),
                                          o.atoms.begin(), o.atoms.end(),
                                          pair_less);
    if (!(constant == o.constant)) return constant < o.constant;
    return strict < o.strict;
  }
};

RowKey canonical_key(const LinIneq& raw, const EqBasis& basis) {
  LinIneq iq = raw.normalized();
  EntropyExpr rhs = basis.reduce(iq.rhs);

  std::optional<Rational> lead;
  for (const auto& [k, v] : iq.rate_coeffs)
    if (!v.is_zero()) {
      lead = v.is_negative() ? -v : v;
      break;
    }
  if (!lead) {
    for (const auto& k : sorted_atoms(rhs)) {
      const Rational& v = rhs.coeffs().at(k);
      if (!v.is_zero()) {
        lead = v.is_negative() ? -v : v;
        break;
      }
    }
  }
  RowKey key;
  key.strict = iq.strict;
  Rational scale = lead ? Rational(1) / *lead : Rational(1);
  for (const auto& [k, v] : iq.rate_coeffs)
    if (!v.is_zero()) key.rates.emplace_back(k, v * scale);
  EntropyExpr scaled = rhs.scaled(scale);
  for (const auto& k : sorted_atoms(scaled))
    key.atoms.emplace_back("H(" + varset_str(k) + ")", scaled.coeffs().at(k));
  key.constant = scaled.constant_term();
  return key;
}

// All atom coordinates touched by a collection of expressions.
std::vector<VarSet> coordinate_atoms(const std::vector<const EntropyExpr*>& es) {
  std::set<VarSet> s;
  for (const auto* e : es)
    for (const auto& [k, v] : e->coeffs()) s.insert(k);
  std::vector<VarSet> out(s.begin(), s.end());
  std::sort(out.begin(), out.end(), atom_less);
  return out;
}

// Is `target` implied by a non-negative combination of `rows` plus the
// flagged non-negative atoms and (sign-free) equalities? For a strict
// target at least one strict row must enter the combination with positive
// weight, checked by maximizing the summed row weights.
bool row_implied(const LinIneq& target, const std::vector<LinIneq>& rows,
                 const std::vector<EntropyExpr>& equalities,
                 const std::vector<EntropyExpr>& nonneg_atoms) {
  LinIneq tgt = target.normalized();
  std::vector<LinIneq> nrows;
  nrows.reserve(rows.size());
  for (const auto& r : rows) nrows.push_back(r.normalized());

  std::set<std::string> rate_names;
  for (const auto& [k, v] : tgt.rate_coeffs) rate_names.insert(k);
  for (const auto& r : nrows)
    for (const auto& [k, v] : r.rate_coeffs) rate_names.insert(k);

  std::vector<const EntropyExpr*> exprs{&tgt.rhs};
  for (const auto& r : nrows) exprs.push_back(&r.rhs);
  for (const auto& e : equalities) exprs.push_back(&e);
  for (const auto& a : nonneg_atoms) exprs.push_back(&a);
  std::vector<VarSet> coords = coordinate_atoms(exprs);

  // columns: rows (lambda >= 0), atoms (mu >= 0), equalities split +/-.
  const std::size_t n_rows = nrows.size();
  const std::size_t n_atoms = nonneg_atoms.size();
  const std::size_t n_eqs = equalities.size();
  const std::size_t ncols = n_rows + n_atoms + 2 * n_eqs;

  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  auto push_equation = [&](const std::vector<Rational>& lhs, const Rational& r) {
    a.push_back(lhs);
    b.push_back(r);
  };

  for (const auto& rv : rate_names) {
    std::vector<Rational> lhs(ncols, Rational(0));
    for (std::size_t j = 0; j < n_rows; ++j) {
      auto it = nrows[j].rate_coeffs.find(rv);
      if (it != nrows[j].rate_coeffs.end()) lhs[j] = it->second;
    }
    auto it = tgt.rate_coeffs.find(rv);
    push_equation(lhs, it != tgt.rate_coeffs.end() ? it->second : Rational(0));
  }
  auto coord_of = [](const EntropyExpr& e, const VarSet& k) {
    auto it = e.coeffs().find(k);
    return it != e.coeffs().end() ? it->second : Rational(0);
  };
  for (const auto& k : coords) {
    std::vector<Rational> lhs(ncols, Rational(0));
    for (std::size_t j = 0; j < n_rows; ++j) lhs[j] = coord_of(nrows[j].rhs, k);
    for (std::size_t j = 0; j < n_atoms; ++j)
      lhs[n_rows + j] = -coord_of(nonneg_atoms[j], k);
    for (std::size_t j = 0; j < n_eqs; ++j) {
      Rational c = coord_of(equalities[j], k);
      lhs[n_rows + n_atoms + 2 * j] = c;
      lhs[n_rows + n_atoms + 2 * j + 1] = -c;
    }
    push_equation(lhs, coord_of(tgt.rhs, k));
  }
  {
    std::vector<Rational> lhs(ncols, Rational(0));
    for (std::size_t j = 0; j < n_rows; ++j) lhs[j] = nrows[j].rhs.constant_term();
    for (std::size_t j = 0; j < n_atoms; ++j)
      lhs[n_rows + j] = -nonneg_atoms[j].constant_term();
    for (std::size_t j = 0; j < n_eqs; ++j) {
      Rational c = equalities[j].constant_term();
      lhs[n_rows + n_atoms + 2 * j] = c;
      lhs[n_rows + n_atoms + 2 * j + 1] = -c;
    }
    push_equation(lhs, tgt.rhs.constant_term());
  }

  std::vector<bool> mask(ncols, false);
  if (tgt.strict) {
    for (std::size_t j = 0; j < n_rows; ++j) mask[j] = nrows[j].strict;
  }
  auto result = SimplexLP::run(std::move(a), std::move(b), mask);
  if (!result) return false;
  if (tgt.strict && !(Rational(0) < *result)) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fourier-Motzkin

IneqSystem fm_eliminate(const IneqSystem& sys,
                        const std::vector<std::string>& eliminate,
                        const FmOptions& opts) {
  std::set<std::string> known(sys.rate_vars.begin(), sys.rate_vars.end());
  for (const auto& v : eliminate)
    if (!known.count(v))
      throw std::invalid_argument("fm_eliminate: unknown rate variable '" + v +
                                  "'");

  std::vector<LinIneq> rows;
  rows.reserve(sys.inequalities.size());
  for (const auto& iq : sys.inequalities) rows.push_back(iq.normalized());
  if (opts.add_rate_nonnegativity) {
    for (const auto& rv : sys.rate_vars) {
      LinIneq nn;
      nn.rate_coeffs[rv] = Rational(1);
      nn.greater = true;
      nn.strict = false;
      rows.push_back(nn);
    }
  }

  for (const auto& v : eliminate) {
    std::vector<LinIneq> lowers, uppers, keep;
    for (auto& r : rows) {
      auto it = r.rate_coeffs.find(v);
      Rational c = it != r.rate_coeffs.end() ? it->second : Rational(0);
      if (c.is_zero()) {
        keep.push_back(r);
      } else if (c.is_negative()) {
        uppers.push_back(r);
      } else {
        lowers.push_back(r);
      }
    }
    std::vector<LinIneq> next = keep;
    for (const auto& lo : lowers) {
      Rational a = lo.rate_coeffs.at(v);           // a > 0
      for (const auto& up : uppers) {
        Rational bneg = up.rate_coeffs.at(v);      // bneg < 0
        Rational b = -bneg;
        // b*lo + a*up cancels v
        LinIneq combo;
        combo.greater = true;
        combo.strict = lo.strict || up.strict;
        for (const auto& [k, c] : lo.rate_coeffs) {
          if (k == v) continue;
          combo.rate_coeffs[k] = c * b;
        }
        for (const auto& [k, c] : up.rate_coeffs) {
          if (k == v) continue;
          auto& slot = combo.rate_coeffs[k];
          slot = slot + c * a;
          if (slot.is_zero()) combo.rate_coeffs.erase(k);
        }
        combo.rhs = lo.rhs.scaled(b) + up.rhs.scaled(a);
        next.push_back(std::move(combo));
      }
    }
    rows = std::move(next);
  }

  EqBasis basis = EqBasis::build(sys.equalities);

  // dedupe in canonical form, dropping rows that reduce to "0 > negative".
  std::set<RowKey> seen;
  std::vector<LinIneq> unique_rows;
  for (const auto& r : rows) {
    RowKey key = canonical_key(r, basis);
    if (key.rates.empty() && key.atoms.empty()) {
      bool trivially_true =
          key.strict ? key.constant.is_negative()
                     : (key.constant.is_negative() || key.constant == Rational(0));
      if (trivially_true) continue;
    }
    if (seen.insert(key).second) unique_rows.push_back(r);
  }

  if (opts.simplify) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < unique_rows.size(); ++i) {
        std::vector<LinIneq> others;
        others.reserve(unique_rows.size() - 1);
        for (std::size_t j = 0; j < unique_rows.size(); ++j)
          if (j != i) others.push_back(unique_rows[j]);
        if (row_implied(unique_rows[i], others, sys.equalities,
                        sys.nonneg_atoms)) {
          unique_rows.erase(unique_rows.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }
  }

  IneqSystem out;
  std::set<std::string> dropped(eliminate.begin(), eliminate.end());
  for (const auto& r : sys.rate_vars)
    if (!dropped.count(r)) out.rate_vars.push_back(r);
  out.inequalities = std::move(unique_rows);
  out.equalities = sys.equalities;
  out.nonneg_atoms = sys.nonneg_atoms;
  return out;
}

std::string to_string(RegionOrder o) {
  switch (o) {
    case RegionOrder::kEqual: return "EQUAL";
    case RegionOrder::kASubsetB: return "A_SUBSET_B";
    case RegionOrder::kBSubsetA: return "B_SUBSET_A";
    case RegionOrder::kIncomparable: return "INCOMPARABLE";
  }
  return "?";
}

RegionCompareResult region_equal(const IneqSystem& a, const IneqSystem& b,
                                 const std::vector<EntropyExpr>& equalities) {
  if (std::set<std::string>(a.rate_vars.begin(), a.rate_vars.end()) !=
      std::set<std::string>(b.rate_vars.begin(), b.rate_vars.end()))
    throw std::invalid_argument("region_equal: rate variable sets differ");
  EqBasis basis = EqBasis::build(equalities);
  std::map<RowKey, LinIneq> ka, kb;
  for (const auto& r : a.inequalities) ka.emplace(canonical_key(r, basis), r);
  for (const auto& r : b.inequalities) kb.emplace(canonical_key(r, basis), r);

  RegionCompareResult res;
  for (const auto& [k, r] : ka)
    if (!kb.count(k)) res.only_in_a.push_back(r);
  for (const auto& [k, r] : kb)
    if (!ka.count(k)) res.only_in_b.push_back(r);
  if (res.only_in_a.empty() && res.only_in_b.empty())
    res.order = RegionOrder::kEqual;
  else if (res.only_in_b.empty())
    res.order = RegionOrder::kASubsetB;
  else if (res.only_in_a.empty())
    res.order = RegionOrder::kBSubsetA;
  else
    res.order = RegionOrder::kIncomparable;
  return res;
}

double ineq_slack(const LinIneq& iq, const JointPmf& joint,
                  const std::map<std::string, double>& rates) {
  LinIneq n = iq.normalized();
  double lhs = 0.0;
  for (const auto& [k, c] : n.rate_coeffs) {
    auto it = rates.find(k);
    if (it == rates.end())
      throw std::invalid_argument("ineq_slack: missing rate '" + k + "'");
    lhs += c.to_double() * it->second;
  }
  return lhs - n.rhs.eval(joint);
}

}  // namespace chansim
