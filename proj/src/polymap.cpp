#include "padexp/polymap.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "padexp/errors.hpp"
#include "padexp/modular.hpp"

namespace padexp {

unsigned total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0u); }

bool GradedLex::operator()(const Exponent& a, const Exponent& b) const {
  const unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

// --- Polynomial ----------------------------------------------------------------

Polynomial::Polynomial(std::size_t n) : n_(n) {}

Polynomial Polynomial::constant(std::size_t n, const Rational& c) {
  Polynomial out(n);
  out.add_term(Exponent(n, 0), c);
  return out;
}

Polynomial Polynomial::variable(std::size_t n, std::size_t j) {
  Polynomial out(n);
  Exponent e(n, 0);
  e.at(j) = 1;
  out.add_term(e, 1);
  return out;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
  if (e.size() != n_) throw PreconditionError("exponent vector length does not match variable count");
  if (c == 0) return;
  Rational value = c;
  value.canonicalize();
  auto [it, inserted] = terms_.try_emplace(e, value);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::constant_term() const { return coefficient(Exponent(n_, 0)); }

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

unsigned Polynomial::degree_in(std::size_t j) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[j]);
  return d;
}

Valuation Polynomial::min_valuation(const PrimeContext& ctx) const {
  Valuation v = Valuation::infinity();
  for (const auto& [e, c] : terms_) v = std::min(v, valuation(c, ctx));
  return v;
}

Rational Polynomial::evaluate(std::span<const Rational> x) const {
  if (x.size() != n_) throw PreconditionError("point dimension does not match variable count");
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::uint32_t i = 0; i < e[j]; ++i) term *= x[j];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::derivative(std::size_t j) const {
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[j] == 0) continue;
    Exponent d = e;
    --d[j];
    out.add_term(d, c * Rational(e[j]));
  }
  return out;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result = constant(n_, 1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.n_ != n_) throw PreconditionError("adding polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.n_ != n_) throw PreconditionError("subtracting polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coeff] : terms_) coeff *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.n_ != b.n_) throw PreconditionError("multiplying polynomials in different variable counts");
  Polynomial out(a.n_);
  Exponent e(a.n_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t j = 0; j < a.n_; ++j) {
        if (static_cast<std::uint64_t>(ea[j]) + eb[j] > kMaxExponent * 64ull)
          throw PreconditionError("exponent overflow");
        e[j] = ea[j] + eb[j];
      }
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational magnitude = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t j = 0; j < n_; ++j) {
      if (e[j] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(j + 1);
      if (e[j] > 1) mono += "^" + std::to_string(e[j]);
    }
    if (mono.empty()) {
      out += padexp::to_string(magnitude);
    } else if (magnitude == 1) {
      out += mono;
    } else {
      out += padexp::to_string(magnitude) + "*" + mono;
    }
  }
  return out;
}

// --- PolyMap -------------------------------------------------------------------

PolyMap::PolyMap(std::size_t n, std::vector<Polynomial> components)
    : n_(n), components_(std::move(components)) {
  if (n_ < 1) throw PreconditionError("a polynomial map needs at least one variable");
  if (components_.empty()) throw PreconditionError("a polynomial map needs at least one component");
  for (const auto& c : components_)
    if (c.variables() != n_) throw PreconditionError("component variable count mismatch");
}

long PolyMap::denominator_exponent(const PrimeContext& ctx) const {
  long b = 0;
  for (const auto& c : components_) {
    const Valuation v = c.min_valuation(ctx);
    if (!v.is_infinite()) b = std::max(b, -v.value());
  }
  return b;
}

std::string PolyMap::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out += "; ";
    out += components_[i].to_string();
  }
  return out;
}

DegreeData degree_data(const PolyMap& f, const PrimeContext& ctx) {
  DegreeData out;
  for (const auto& g : f.components()) {
    std::vector<unsigned> row(f.variables());
    for (std::size_t j = 0; j < f.variables(); ++j) {
      row[j] = g.degree_in(j);
      out.d_max = std::max(out.d_max, row[j]);
    }
    out.per_variable.push_back(std::move(row));
    Polynomial centered = g;
    centered.add_term(Exponent(f.variables(), 0), -g.constant_term());
    out.e_orders.push_back(centered.min_valuation(ctx));
  }
  return out;
}

// --- substitution ----------------------------------------------------------------

Polynomial shift_substitute(const Polynomial& g, std::span<const Rational> a, long k,
                            const PrimeContext& ctx) {
  const std::size_t n = g.variables();
  if (a.size() != n) throw PreconditionError("shift center dimension does not match variable count");
  const Rational step = rational_power(ctx.p(), k);

  // expansions[j][e][i] = coefficient of t_j^i in (a_j + step t_j)^e
  std::vector<std::vector<std::vector<Rational>>> expansions(n);
  for (std::size_t j = 0; j < n; ++j) {
    const unsigned dj = g.degree_in(j);
    auto& rows = expansions[j];
    rows.push_back({Rational(1)});
    for (unsigned e = 1; e <= dj; ++e) {
      const auto& prev = rows.back();
      std::vector<Rational> next(e + 1, Rational(0));
      for (unsigned i = 0; i < prev.size(); ++i) {
        next[i] += prev[i] * a[j];
        next[i + 1] += prev[i] * step;
      }
      rows.push_back(std::move(next));
    }
  }

  Polynomial out(n);
  Exponent t(n, 0);
  for (const auto& [e, c] : g.terms()) {
    // Walk the product of the per-variable expansions.
    std::fill(t.begin(), t.end(), 0);
    while (true) {
      Rational coeff = c;
      for (std::size_t j = 0; j < n && coeff != 0; ++j) coeff *= expansions[j][e[j]][t[j]];
      out.add_term(t, coeff);
      std::size_t j = 0;
      while (j < n && t[j] == e[j]) {
        t[j] = 0;
        ++j;
      }
      if (j == n) break;
      ++t[j];
    }
  }
  return out;
}

PolyMap shift_substitute(const PolyMap& f, std::span<const Rational> a, long k,
                         const PrimeContext& ctx) {
  std::vector<Polynomial> out;
  out.reserve(f.size());
  for (const auto& g : f.components()) out.push_back(shift_substitute(g, a, k, ctx));
  return PolyMap(f.variables(), std::move(out));
}

// --- affine independence -----------------------------------------------------------

bool check_affine_independence(const PolyMap& f) {
  const std::size_t n = f.variables();
  std::vector<Exponent> monomials;
  monomials.push_back(Exponent(n, 0));
  for (const auto& g : f.components())
    for (const auto& [e, c] : g.terms()) monomials.push_back(e);
  std::sort(monomials.begin(), monomials.end(), GradedLex{});
  monomials.erase(std::unique(monomials.begin(), monomials.end()), monomials.end());

  const std::size_t rows = f.size() + 1;
  const std::size_t cols = monomials.size();
  if (cols < rows) return false;
  std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(cols, Rational(0)));
  m[0][0] = 1;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t c = 0; c < cols; ++c) m[i + 1][c] = f[i].coefficient(monomials[c]);

  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const Rational factor = m[r][c] / m[rank][c];
      for (std::size_t cc = c; cc < cols; ++cc) m[r][cc] -= factor * m[rank][cc];
    }
    ++rank;
  }
  return rank == rows;
}

// --- modular evaluation ------------------------------------------------------------

ModularMap::ModularMap(const PolyMap& f, int m, const PrimeContext& ctx)
    : n_(f.variables()), shift_(f.denominator_exponent(ctx)), level_(m + static_cast<int>(shift_)),
      q_(Modulus(ctx.p(), m + static_cast<int>(shift_)).q()), max_degree_(f.variables(), 0) {
  if (m < 0) throw PreconditionError("evaluation level must be >= 0");
  const Modulus mod(ctx.p(), level_);
  const Rational scale = rational_power(ctx.p(), shift_);
  for (const auto& g : f.components()) {
    std::vector<Term> terms;
    for (const auto& [e, c] : g.terms()) {
      const std::uint64_t coeff = mod.reduce(Rational(c * scale));
      if (coeff == 0) continue;
      terms.push_back({e, coeff});
      for (std::size_t j = 0; j < n_; ++j) max_degree_[j] = std::max<unsigned>(max_degree_[j], e[j]);
    }
    components_.push_back(std::move(terms));
  }
}

void ModularMap::evaluate(std::span<const std::uint64_t> x, std::span<std::uint64_t> out) const {
  auto mul = [q = q_](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
  };
  // powers[j][e] = x_j^e mod q
  thread_local std::vector<std::vector<std::uint64_t>> powers;
  powers.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    auto& row = powers[j];
    row.assign(max_degree_[j] + 1, 0);
    row[0] = 1 % q_;
    const std::uint64_t xj = x[j] % q_;
    for (unsigned e = 1; e <= max_degree_[j]; ++e) row[e] = mul(row[e - 1], xj);
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    std::uint64_t acc = 0;
    for (const auto& t : components_[i]) {
      std::uint64_t v = t.coefficient;
      for (std::size_t j = 0; j < n_; ++j)
        if (t.exponent[j]) v = mul(v, powers[j][t.exponent[j]]);
      acc += v;
      if (acc >= q_) acc -= q_;
    }
    out[i] = acc;
  }
}

ModResidues eval_mod(const PolyMap& f, std::span<const std::uint64_t> x, int m, const PrimeContext& ctx) {
  if (m < 1) throw PreconditionError("eval_mod requires m >= 1");
  if (x.size() != f.variables()) throw PreconditionError("point dimension does not match variable count");
  const ModularMap map(f, m, ctx);
  ModResidues out;
  out.values.resize(f.size());
  out.shift = map.shift();
  out.modulus = map.modulus();
  map.evaluate(x, out.values);
  return out;
}

// --- restricted series --------------------------------------------------------------

Polynomial series_truncate(const RestrictedSeries& s, int m, const PrimeContext& ctx) {
  if (!s.coefficient || !s.floor) throw PreconditionError("restricted series needs a coefficient oracle and a floor");
  const std::size_t n = s.variables;
  unsigned cutoff = 0;
  while (cutoff <= kMaxSeriesDegree && s.floor(cutoff) < m) ++cutoff;
  if (cutoff > kMaxSeriesDegree)
    throw PreconditionError("series valuation floor does not reach " + std::to_string(m) +
                            " by total degree " + std::to_string(kMaxSeriesDegree) +
                            "; series not certified restricted");

  Polynomial out(n);
  // Enumerate exponents of total degree < cutoff.
  Exponent e(n, 0);
  if (cutoff == 0) return out;
  while (true) {
    const unsigned deg = total_degree(e);
    const Rational c = s.coefficient(e);
    if (c != 0) {
      const Valuation v = valuation(c, ctx);
      if (v < Valuation(s.floor(deg)))
        throw PreconditionError("series coefficient of degree " + std::to_string(deg) + " has valuation " +
                                v.to_string() + " below the declared floor " + std::to_string(s.floor(deg)));
      if (v < Valuation(m)) out.add_term(e, c);
    }
    // Next exponent with total degree < cutoff (odometer on the simplex).
    std::size_t j = 0;
    while (j < n) {
      ++e[j];
      if (total_degree(e) < cutoff) break;
      e[j] = 0;
      ++j;
    }
    if (j == n) break;
  }
  return out;
}

// --- Schwartz-Bruhat ----------------------------------------------------------------

SchwartzBruhat::SchwartzBruhat(std::size_t n, std::vector<Ball> terms) : n_(n), terms_(std::move(terms)) {
  for (auto& b : terms_) {
    for (auto& c : b.center) c.canonicalize();
    b.weight.canonicalize();
    if (b.center.size() != n_) throw PreconditionError("ball center dimension does not match variable count");
    if (b.weight == 0) throw PreconditionError("Schwartz-Bruhat weights must be nonzero");
  }
}

SchwartzBruhat SchwartzBruhat::trivial(std::size_t n) {
  return SchwartzBruhat(n, {Ball{std::vector<Rational>(n, Rational(0)), 0, 1}});
}

Rational SchwartzBruhat::abs_mass(const PrimeContext& ctx) const {
  Rational total = 0;
  for (const auto& b : terms_)
    total += abs(b.weight) * rational_power(ctx.p(), -b.radius_exponent * static_cast<long>(n_));
  return total;
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

SchwartzBruhat SchwartzBruhat::parse(std::string_view text, std::size_t n) {
  const std::string_view body = trim(text);
  if (body.empty() || body == "triv") return trivial(n);
  std::vector<Ball> balls;
  std::size_t offset = static_cast<std::size_t>(body.data() - text.data());
  for (std::string_view part : split(body, ';')) {
    const auto fields = split(part, ':');
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError("ball must be 'center:k' or 'center:k:weight'", offset);
    Ball ball;
    for (std::string_view c : split(fields[0], ',')) ball.center.push_back(parse_rational(c));
    if (ball.center.size() != n)
      throw ParseError("ball center has " + std::to_string(ball.center.size()) + " coordinates, expected " +
                           std::to_string(n),
                       offset);
    const Rational k = parse_rational(fields[1]);
    if (k.get_den() != 1 || !k.get_num().fits_slong_p()) throw ParseError("radius exponent must be an integer", offset);
    ball.radius_exponent = k.get_num().get_si();
    ball.weight = fields.size() == 3 ? parse_rational(fields[2]) : Rational(1);
    if (ball.weight == 0) throw ParseError("ball weight must be nonzero", offset);
    balls.push_back(std::move(ball));
    offset += part.size() + 1;
  }
  return SchwartzBruhat(n, std::move(balls));
}

std::string SchwartzBruhat::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += ";";
    const auto& b = terms_[i];
    for (std::size_t j = 0; j < b.center.size(); ++j) {
      if (j) out += ",";
      out += padexp::to_string(b.center[j]);
    }
    out += ":" + std::to_string(b.radius_exponent) + ":" + padexp::to_string(b.weight);
  }
  return out;
}

}  // namespace padexp
