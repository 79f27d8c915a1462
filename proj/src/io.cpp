#include "padexp/io.hpp"

#include <ostream>

#include "padexp/errors.hpp"

namespace padexp {

namespace {

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string join_u(const std::vector<std::uint64_t>& u) {
  std::string s;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (j) s += ' ';
    s += std::to_string(u[j]);
  }
  return s;
}

}  // namespace

Json to_json(const PhaseHistogram& h) {
  Json counts = Json::object();
  for (const auto& [k, c] : h.counts()) counts[std::to_string(k)] = c;
  return Json{{"p", h.prime()}, {"M", h.level()}, {"scale", to_string(h.scale())}, {"counts", counts}};
}

PhaseHistogram histogram_from_json(const Json& j) {
  try {
    PhaseHistogram::Counts counts;
    for (const auto& [k, c] : j.at("counts").items()) counts.emplace(std::stoull(k), c.get<std::int64_t>());
    return PhaseHistogram(j.at("p").get<std::uint64_t>(), j.at("M").get<int>(),
                          parse_rational(j.at("scale").get<std::string>()), std::move(counts));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad histogram JSON: ") + e.what(), 0);
  }
}

Json to_json(const PolyMap& f) {
  Json comps = Json::array();
  for (const auto& g : f.components()) {
    Json terms = Json::array();
    for (const auto& [e, c] : g.terms()) terms.push_back(Json::array({e, to_string(c)}));
    comps.push_back(terms);
  }
  return Json{{"n", f.variables()}, {"r", f.size()}, {"components", comps}};
}

PolyMap polymap_from_json(const Json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    std::vector<Polynomial> comps;
    for (const auto& terms : j.at("components")) {
      Polynomial g(n);
      for (const auto& t : terms) {
        auto e = t.at(0).get<Exponent>();
        if (e.size() != n) throw ParseError("exponent length does not match n", 0);
        g.add_term(e, parse_rational(t.at(1).get<std::string>()));
      }
      comps.push_back(std::move(g));
    }
    if (comps.size() != j.at("r").get<std::size_t>()) throw ParseError("component count does not match r", 0);
    return PolyMap(n, std::move(comps));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad map JSON: ") + e.what(), 0);
  }
}

Json to_json(const PruningStats& s) {
  return Json{{"p1", s.p1}, {"p2", s.p2}, {"splits", s.splits}, {"leaves", s.leaves}};
}

Json to_json(const Valuation& v) { return v.is_infinite() ? Json("inf") : Json(v.value()); }

Json value_json(const PhaseHistogram& h) {
  const Magnitude mag = hist_magnitude(h);
  return Json{{"histogram", to_json(h)},
              {"magnitude", mag.value},
              {"magnitude_error", mag.error},
              {"exact_zero", hist_is_zero(h)}};
}

Json to_json(const DensityTable& t) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < t.cells(); ++i) {
    Json z = Json::array();
    for (const auto& zi : t.target(i)) z.push_back(to_string(zi));
    rows.push_back(Json{{"z", z}, {"N", t.counts[i]}, {"F", to_string(t.density(i))}});
  }
  return Json{{"p", t.p}, {"level", t.level}, {"shift", t.shift}, {"n", t.variables},
              {"r", t.components}, {"total", t.total().get_str()}, {"rows", rows}};
}

void write_density_csv(std::ostream& out, const DensityTable& t) {
  for (std::size_t j = 0; j < t.components; ++j) out << 'z' << j + 1 << ',';
  out << "N,F\n";
  for (std::size_t i = 0; i < t.cells(); ++i) {
    for (const auto& zi : t.target(i)) out << to_string(zi) << ',';
    out << t.counts[i] << ',' << to_string(t.density(i)) << '\n';
  }
}

Json to_json(const StabilizationReport& r) {
  Json seq = Json::array();
  for (std::size_t i = 0; i < r.counts.size(); ++i)
    seq.push_back(Json{{"m", r.first + static_cast<int>(i)}, {"N", r.counts[i]}, {"F", to_string(r.densities[i])}});
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    Json orders = Json::array();
    for (const auto& v : s.orders) orders.push_back(to_json(v));
    samples.push_back(Json{{"point", s.point}, {"orders", orders}, {"rank", s.rank}, {"unit_rank", s.unit_rank}});
  }
  return Json{{"levels", seq},
              {"stable", r.stable},
              {"constant_from", r.constant_from},
              {"jacobian_samples", samples},
              {"full_rank", r.full_rank}};
}

Json to_json(const DecayRecord& r) {
  return Json{{"m", r.level},         {"sup", r.sup},
              {"sup_error", r.sup_error}, {"argmax_u", r.argmax},
              {"exhaustive", r.exhaustive}, {"exact_zero", r.exact_zero},
              {"directions", r.directions}};
}

void write_decay_csv(std::ostream& out, const std::vector<DecayRecord>& records) {
  out << "m,sup,sup_error,argmax_u,exhaustive\n";
  for (const auto& r : records)
    out << r.level << ',' << Json(r.sup).dump() << ',' << Json(r.sup_error).dump() << ',' << join_u(r.argmax) << ','
        << (r.exhaustive ? "true" : "false") << '\n';
}

Json to_json(const FitResult& f) {
  return Json{{"alpha_hat", f.alpha_hat},
              {"intercept", f.intercept},
              {"residual", f.residual},
              {"window", Json::array({f.window_first, f.window_last})},
              {"excluded_levels", f.excluded},
              {"bound_exponent", optional_number(f.bound_exponent)},
              {"c_hat", optional_number(f.c_hat)},
              {"warnings", f.warnings}};
}

Json to_json(const BoundReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json{{"m", row.level},
                        {"sup", row.sup},
                        {"ratio", optional_number(row.ratio)},
                        {"c_running", optional_number(row.c_running)}});
  Json e = Json::array();
  for (const auto& v : r.e_orders) e.push_back(to_json(v));
  const FitResult* fit = r.fit ? &*r.fit : nullptr;
  return Json{{"banner", r.banner ? Json(*r.banner) : Json(nullptr)},
              {"alpha_hat", fit ? Json(fit->alpha_hat) : Json(nullptr)},
              {"intercept", fit ? Json(fit->intercept) : Json(nullptr)},
              {"residual", fit ? Json(fit->residual) : Json(nullptr)},
              {"d_f", r.d_f},
              {"e_orders", e},
              {"affinely_independent", r.affinely_independent},
              {"bound_exponent", r.d_f > 0 ? Json(-1.0 / r.d_f) : Json(nullptr)},
              {"c_hat", optional_number(r.c_hat)},
              {"epsilon", r.epsilon},
              {"verdict", to_string(r.verdict)},
              {"statement", r.statement},
              {"rows", rows},
              {"warnings", fit ? Json(fit->warnings) : Json::array()}};
}

}  // namespace padexp
