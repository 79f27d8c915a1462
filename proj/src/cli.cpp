#include "padexp/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "padexp/errors.hpp"

namespace padexp {

Json config_to_json(const RunConfig& c) {
  Json levels = c.levels ? Json::array({c.levels->first, c.levels->second}) : Json(nullptr);
  return Json{{"command", c.command}, {"prime", c.prime},     {"map", c.map},
              {"variables", c.variables}, {"phi", c.phi},     {"y", c.y},
              {"z", c.z},             {"level", c.level ? Json(*c.level) : Json(nullptr)},
              {"levels", levels},     {"strategy", c.strategy}, {"seed", c.seed},
              {"epsilon", c.epsilon}, {"budget", c.budget},   {"method", c.method},
              {"format", c.format}};
}

RunConfig config_from_json(const Json& j) {
  try {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.prime = j.at("prime").get<std::uint64_t>();
    c.map = j.at("map").get<std::string>();
    c.variables = j.at("variables").get<std::size_t>();
    c.phi = j.at("phi").get<std::string>();
    c.y = j.at("y").get<std::vector<std::string>>();
    c.z = j.at("z").get<std::vector<std::string>>();
    if (!j.at("level").is_null()) c.level = j.at("level").get<int>();
    if (!j.at("levels").is_null()) c.levels = {j.at("levels").at(0).get<int>(), j.at("levels").at(1).get<int>()};
    c.strategy = j.at("strategy").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.epsilon = j.at("epsilon").get<double>();
    c.budget = j.at("budget").get<std::uint64_t>();
    c.method = j.at("method").get<std::string>();
    c.format = j.at("format").get<std::string>();
    return c;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad config JSON: ") + e.what(), 0);
  }
}

namespace {

int parse_int(std::string_view text, std::size_t offset) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) throw ParseError("expected an integer", offset);
  return v;
}

std::vector<std::string> split_rationals(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(to_string(parse_rational(piece)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<Rational> to_rationals(const std::vector<std::string>& v) {
  std::vector<Rational> out;
  for (const auto& s : v) out.push_back(parse_rational(s));
  return out;
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv(kBudgetEnv)) {
    std::string_view text(env);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || v == 0)
      throw ParseError(std::string(kBudgetEnv) + " must be a positive integer", 0);
    return v;
  }
  return PrimeContext::kDefaultNaiveBudget;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read map file " + path, 0);
  std::ostringstream s;
  s << in.rdbuf();
  std::string text = s.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  for (auto& c : text)
    if (c == '\n') c = ';';
  return text;
}

struct Raw {
  std::string map_file;
  std::string y;
  std::string z;
  std::string levels;
  std::optional<std::uint64_t> budget;
  std::string out;
  int threads = 0;
};

struct Session {
  RunConfig cfg;
  PolyMap f;
  PrimeContext ctx;
  Parallelism par;
};

Session open_session(RunConfig cfg, const Raw& raw) {
  if (!raw.map_file.empty()) cfg.map = read_file(raw.map_file);
  if (cfg.map.empty()) throw ParseError("no map given (use --map or --map-file)", 0);
  if (cfg.variables == 0) cfg.variables = infer_variable_count(cfg.map);
  if (!raw.y.empty()) cfg.y = split_rationals(raw.y);
  if (!raw.z.empty()) cfg.z = split_rationals(raw.z);
  if (!raw.levels.empty()) cfg.levels = parse_levels(raw.levels);
  cfg.budget = raw.budget ? *raw.budget : default_budget();
  if (cfg.budget == 0) throw ParseError("budget must be positive", 0);
  PolyMap f = parse_polymap(cfg.map, cfg.variables);
  cfg.phi = SchwartzBruhat::parse(cfg.phi, cfg.variables).to_string();
  PrimeContext ctx(cfg.prime, cfg.budget);
  return {std::move(cfg), std::move(f), ctx, Parallelism{raw.threads}};
}

Json header(const Session& s) { return Json{{"request", config_to_json(s.cfg)}, {"map", to_json(s.f)}}; }

int cmd_eval(const Session& s, std::ostream& out) {
  if (s.cfg.format != "json") throw ParseError("eval only writes JSON", 0);
  if (s.cfg.y.empty()) throw ParseError("eval needs --y", 0);
  const EvalRequest req(s.f, SchwartzBruhat::parse(s.cfg.phi, s.cfg.variables), to_rationals(s.cfg.y), s.ctx);
  Json j = header(s);
  j["level"] = req.level();
  if (s.cfg.method == "naive") {
    j.update(value_json(eval_naive(req, s.par)));
    j["pruning_stats"] = nullptr;
  } else {
    const auto result = eval_recursive(req, s.par);
    j.update(value_json(result.value));
    j["pruning_stats"] = to_json(result.stats);
  }
  out << j.dump(2) << '\n';
  return exit_code::kOk;
}

CountMethod count_method(const std::string& name) {
  if (name == "naive") return CountMethod::Naive;
  if (name == "recursive") return CountMethod::Recursive;
  return CountMethod::Auto;
}

int cmd_density(const Session& s, std::ostream& out) {
  if (!s.cfg.z.empty()) {
    if (!s.cfg.levels) throw ParseError("a stabilization probe (--z) needs --levels", 0);
    const auto report =
        stabilization_probe(s.f, to_rationals(s.cfg.z), s.cfg.levels->first, s.cfg.levels->second, s.ctx, s.par);
    if (s.cfg.format == "csv") {
      out << "m,N,F\n";
      for (std::size_t i = 0; i < report.counts.size(); ++i)
        out << report.first + static_cast<int>(i) << ',' << report.counts[i] << ','
            << to_string(report.densities[i]) << '\n';
    } else {
      Json j = header(s);
      j["stabilization"] = to_json(report);
      out << j.dump(2) << '\n';
    }
    return exit_code::kOk;
  }
  if (!s.cfg.level) throw ParseError("density needs --level (or --z with --levels)", 0);
  const auto table = count_fibers(s.f, *s.cfg.level, s.ctx, count_method(s.cfg.method), s.par);
  if (s.cfg.format == "csv") {
    write_density_csv(out, table);
  } else {
    Json j = header(s);
    j["density"] = to_json(table);
    out << j.dump(2) << '\n';
  }
  return exit_code::kOk;
}

int cmd_decay(const Session& s, std::ostream& out, const std::string& out_path) {
  if (!s.cfg.levels) throw ParseError("decay needs --levels m0..m1", 0);
  const auto strategy = Strategy::parse(s.cfg.strategy, s.cfg.seed);
  const auto phi = SchwartzBruhat::parse(s.cfg.phi, s.cfg.variables);
  std::vector<DecayRecord> records;
  for (int m = s.cfg.levels->first; m <= s.cfg.levels->second; ++m)
    records.push_back(sup_at_level(s.f, phi, m, strategy, s.ctx, s.par));
  const auto report = bound_report(s.f, records, s.ctx, s.cfg.epsilon);
  Json j = header(s);
  Json recs = Json::array();
  for (const auto& r : records) recs.push_back(to_json(r));
  j["records"] = recs;
  j["fit"] = to_json(report);
  if (s.cfg.format == "csv") {
    write_decay_csv(out, records);
    if (!out_path.empty()) {
      std::ofstream fit(out_path + ".fit.json");
      if (!fit) throw Error("cannot write " + out_path + ".fit.json");
      fit << j.dump(2) << '\n';
    }
  } else {
    out << j.dump(2) << '\n';
  }
  return exit_code::kOk;
}

int cmd_fourier(const Session& s, std::ostream& out) {
  if (s.cfg.format != "json") throw ParseError("fourier-check only writes JSON", 0);
  if (s.cfg.y.empty()) throw ParseError("fourier-check needs --y", 0);
  if (!s.cfg.level) throw ParseError("fourier-check needs --level", 0);
  const auto check = fourier_check(s.f, to_rationals(s.cfg.y), *s.cfg.level, s.ctx, s.par);
  Json j = header(s);
  j["integral"] = value_json(check.integral);
  j["transform"] = value_json(check.transform);
  j["residual"] = to_json(check.residual);
  j["residual_zero"] = check.zero;
  out << j.dump(2) << '\n';
  return check.zero ? exit_code::kOk : exit_code::kResidual;
}

}  // namespace

std::pair<int, int> parse_levels(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) throw ParseError("levels must look like m0..m1", 0);
  const int first = parse_int(text.substr(0, dots), 0);
  const int last = parse_int(text.substr(dots + 2), dots + 2);
  if (first < 1) throw ParseError("levels start at 1", 0);
  if (first > last) throw ParseError("empty level range " + std::string(text), 0);
  return {first, last};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact p-adic exponential integrals, fiber densities and decay fits"};
  app.require_subcommand(1);
  RunConfig cfg;
  Raw raw;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--prime", cfg.prime, "the prime p")->required();
    sub->add_option("--map", cfg.map, "components separated by ';', variables x1..xn");
    sub->add_option("--map-file", raw.map_file, "file with one component per line");
    sub->add_option("--vars", cfg.variables, "variable count (default: highest x<i> used)");
    sub->add_option("--budget", raw.budget, std::string("enumeration budget (default $") + kBudgetEnv + " or 2^22)");
    sub->add_option("--threads", raw.threads, "worker threads; 1 selects the serial kernels");
    sub->add_option("--out", raw.out, "write the report here instead of stdout");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* eval = app.add_subcommand("eval", "evaluate E_{phi,f}(y) exactly");
  common(eval);
  eval->add_option("--phi", cfg.phi, "balls 'c1,..,cn:k[:w]; ...' or triv");
  eval->add_option("--y", raw.y, "y_1,...,y_r as a/b or u/p^m")->required();
  eval->add_option("--method", cfg.method, "recursive or naive")->check(CLI::IsMember({"auto", "recursive", "naive"}));

  auto* density = app.add_subcommand("density", "fiber counts N_m(z) and densities F_m(z)");
  common(density);
  density->add_option("--level", cfg.level, "level m");
  density->add_option("--z", raw.z, "probe one target across --levels instead of tabulating");
  density->add_option("--levels", raw.levels, "m0..m1 for --z");
  density->add_option("--method", cfg.method, "auto, naive or recursive")
      ->check(CLI::IsMember({"auto", "recursive", "naive"}));

  auto* decay = app.add_subcommand("decay", "sup |E| per level, exponent fit and degree-bound report");
  common(decay);
  decay->add_option("--phi", cfg.phi, "balls 'c1,..,cn:k[:w]; ...' or triv");
  decay->add_option("--levels", raw.levels, "m0..m1")->required();
  decay->add_option("--strategy", cfg.strategy, "exhaustive or sample:N");
  decay->add_option("--seed", cfg.seed, "seed for sample:N");
  decay->add_option("--epsilon", cfg.epsilon, "slack for the CONSISTENT verdict");

  auto* fourier = app.add_subcommand("fourier-check", "E_f(y) against the transform of the level-m density");
  common(fourier);
  fourier->add_option("--y", raw.y, "y_1,...,y_r")->required();
  fourier->add_option("--level", cfg.level, "level m")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return exit_code::kParse;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    const Session s = open_session(cfg, raw);
    std::ostringstream buffer;
    int code = exit_code::kOk;
    if (cfg.command == "eval") code = cmd_eval(s, buffer);
    else if (cfg.command == "density") code = cmd_density(s, buffer);
    else if (cfg.command == "decay") code = cmd_decay(s, buffer, raw.out);
    else code = cmd_fourier(s, buffer);
    if (raw.out.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(raw.out);
      if (!file) throw Error("cannot write " + raw.out);
      file << buffer.str();
    }
    return code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_code::kParse;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return exit_code::kBudget;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return exit_code::kPrecondition;
  } catch (const FitError& e) {
    err << "fit failed: " << e.what() << '\n';
    return exit_code::kPrecondition;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailure;
  }
}

}  // namespace padexp
