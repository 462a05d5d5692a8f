#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"

namespace effective_trade::harness {

inline constexpr const char* kToolVersion = "0.1.0";

/// Counts a run is expected to reproduce, if the scenario states them.
struct ReferenceCounts {
  std::optional<std::size_t> feasible;
  std::optional<std::size_t> pareto;
  std::optional<std::size_t> nash;
};

struct ScenarioConfig {
  std::string name;
  Economy economy;
  std::optional<int> flow_bound;
  bool allow_resale = false;
  unsigned threads = 1;
  double step_scale = 0.1;
  double stop_tolerance = 1e-6;
  std::size_t max_iterations = 20000;
  int attempts = 24;
  double improvement_tolerance = 1e-6;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  ReferenceCounts reference;
  /// The config with every default filled in, as echoed in output headers.
  nlohmann::json resolved;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline std::string config_hash(const ScenarioConfig& config) {
  return fnv1a64(config.resolved.dump());
}

namespace detail {

inline std::pair<int, int> line_column(const std::string& text,
                                       std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < text.size() && k + 1 < byte; ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline double number_or_inf(const nlohmann::json& v, const std::string& where) {
  if (v.is_null()) {
    return std::numeric_limits<double>::infinity();
  }
  if (v.is_string() && (v == "inf" || v == "infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) {
    throw ValidationError(where + ": expected a number");
  }
  return v.get<double>();
}

inline std::vector<double> number_list(const nlohmann::json& v,
                                       const std::string& where) {
  if (!v.is_array()) {
    throw ValidationError(where + ": expected an array of numbers");
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) {
      throw ValidationError(where + ": expected an array of numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

template <class T>
T get_or(const nlohmann::json& obj, const char* key, T fallback) {
  if (obj.contains(key) && !obj[key].is_null()) {
    return obj[key].get<T>();
  }
  return fallback;
}

}  // namespace detail

inline nlohmann::json parse_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, column] = detail::line_column(text, e.byte);
    throw ValidationError("parse error at line " + std::to_string(line) +
                              ", column " + std::to_string(column) + ": " +
                              e.what(),
                          line, column);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/**
 * Builds and validates a scenario from its JSON form. Every invariant the
 * economy needs is checked here and reported by name.
 */
inline ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
  using nlohmann::json;
  if (!doc.is_object()) {
    throw ValidationError("scenario: top level must be an object");
  }
  ScenarioConfig cfg;
  try {
    cfg.name = detail::get_or<std::string>(doc, "name", "scenario");
    std::string mode = detail::get_or<std::string>(doc, "mode", "discrete");
    if (mode == "discrete") {
      cfg.economy.mode = Mode::discrete;
    } else if (mode == "continuous") {
      cfg.economy.mode = Mode::continuous;
    } else {
      throw ValidationError("mode: must be \"discrete\" or \"continuous\"");
    }

    if (!doc.contains("agents") || !doc["agents"].is_array() ||
        doc["agents"].empty()) {
      throw ValidationError("agents: at least one agent required");
    }
    const auto& agents = doc["agents"];
    std::size_t goods = 0;
    if (doc.contains("goods")) {
      if (!doc["goods"].is_number_unsigned() || doc["goods"].get<int>() < 1) {
        throw ValidationError("goods: must be a positive integer");
      }
      goods = doc["goods"].get<std::size_t>();
    } else {
      const auto& first = agents[0];
      if (first.contains("endowment") && first["endowment"].is_array()) {
        goods = first["endowment"].size();
      }
    }
    if (goods < 1) {
      throw ValidationError("goods: at least one good required");
    }
    cfg.economy.goods = goods;

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const auto& a = agents[i];
      const std::string where = "agents[" + std::to_string(i) + "]";
      if (!a.is_object()) {
        throw ValidationError(where + ": must be an object");
      }
      Agent agent;
      agent.name = detail::get_or<std::string>(a, "name", std::string(1, static_cast<char>('a' + i)));
      if (index.count(agent.name)) {
        throw ValidationError(where + ": duplicate agent name " + agent.name);
      }
      index[agent.name] = i;
      if (!a.contains("endowment")) {
        throw ValidationError(where + ": endowment missing");
      }
      agent.endowment = detail::number_list(a["endowment"], where + ".endowment");
      if (agent.endowment.size() != goods) {
        throw ValidationError(where + ".endowment: length must equal the good count");
      }
      for (double w : agent.endowment) {
        if (!(w >= 0.0)) {
          throw ValidationError(where + ".endowment: entries must be non-negative");
        }
        if (cfg.economy.mode == Mode::discrete && w != std::floor(w)) {
          throw ValidationError(where + ".endowment: discrete mode needs integers");
        }
      }

      if (!a.contains("utility") || !a["utility"].is_object()) {
        throw ValidationError(where + ": utility missing");
      }
      const auto& u = a["utility"];
      std::string kind = detail::get_or<std::string>(u, "type", "ces");
      if (kind != "ces") {
        throw ValidationError(where + ".utility: only type \"ces\" can be loaded from a file");
      }
      CesUtility ces;
      ces.weights = detail::number_list(u.value("weights", json::array()),
                                        where + ".utility.weights");
      if (ces.weights.size() != goods) {
        throw ValidationError(where + ".utility.weights: length must equal the good count");
      }
      double total = 0.0;
      for (double w : ces.weights) {
        if (!(w >= 0.0)) {
          throw ValidationError(where + ".utility.weights: must be non-negative");
        }
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError(where + ".utility.weights: must sum to 1");
      }
      if (!u.contains("exponent") || !u["exponent"].is_number()) {
        throw ValidationError(where + ".utility.exponent: missing");
      }
      ces.exponent = u["exponent"].get<double>();
      if (ces.exponent == 0.0) {
        throw ValidationError(where + ".utility.exponent: must be non-zero");
      }
      agent.utility = ces;

      agent.money = detail::get_or<double>(a, "money", 0.0);
      if (!(agent.money >= 0.0)) {
        throw ValidationError(where + ".money: must be non-negative");
      }

      agent.consumption.lower.assign(goods, 0.0);
      agent.consumption.upper.assign(goods, std::numeric_limits<double>::infinity());
      if (a.contains("consumption")) {
        const auto& c = a["consumption"];
        if (c.contains("lower")) {
          agent.consumption.lower = detail::number_list(c["lower"], where + ".consumption.lower");
        }
        if (c.contains("upper")) {
          if (!c["upper"].is_array() || c["upper"].size() != goods) {
            throw ValidationError(where + ".consumption.upper: one bound per good");
          }
          for (std::size_t k = 0; k < goods; ++k) {
            agent.consumption.upper[k] =
                detail::number_or_inf(c["upper"][k], where + ".consumption.upper");
          }
        }
        if (agent.consumption.lower.size() != goods) {
          throw ValidationError(where + ".consumption.lower: one bound per good");
        }
        for (double lo : agent.consumption.lower) {
          if (lo < 0.0) {
            throw ValidationError(where + ".consumption.lower: must be non-negative");
          }
        }
      }
      if (!agent.consumption.contains(agent.endowment, 0.0)) {
        throw ValidationError(where + ": endowment must lie in the consumption set");
      }
      cfg.economy.agents.push_back(std::move(agent));
    }

    const std::size_t n = cfg.economy.agents.size();
    if (doc.contains("capacities") && !doc["capacities"].is_null()) {
      const auto& caps = doc["capacities"];
      if (!caps.is_array()) {
        throw ValidationError("capacities: must be an array");
      }
      CapacityTensor tensor = unbounded_capacities(n, goods);
      for (std::size_t c = 0; c < caps.size(); ++c) {
        const auto& e = caps[c];
        const std::string where = "capacities[" + std::to_string(c) + "]";
        auto agent_of = [&](const char* key) {
          if (!e.contains(key) || !e[key].is_string() ||
              !index.count(e[key].get<std::string>())) {
            throw ValidationError(where + "." + key + ": unknown agent");
          }
          return index.at(e[key].get<std::string>());
        };
        std::size_t from = agent_of("from");
        std::size_t to = agent_of("to");
        if (from == to) {
          throw ValidationError(where + ": from and to must differ");
        }
        std::vector<std::size_t> which;
        if (!e.contains("good") || (e["good"].is_string() && e["good"] == "all")) {
          for (std::size_t k = 0; k < goods; ++k) which.push_back(k);
        } else if (e["good"].is_number_unsigned() && e["good"].get<std::size_t>() >= 1 &&
                   e["good"].get<std::size_t>() <= goods) {
          which.push_back(e["good"].get<std::size_t>() - 1);
        } else {
          throw ValidationError(where + ".good: a good number (1-based) or \"all\"");
        }
        double bound = detail::number_or_inf(e.value("bound", json()), where + ".bound");
        if (!(bound >= 0.0)) {
          throw ValidationError(where + ".bound: must be non-negative");
        }
        std::string direction = e.value("direction", std::string("both"));
        if (direction != "both" && direction != "forward") {
          throw ValidationError(where + ".direction: \"both\" or \"forward\"");
        }
        for (std::size_t k : which) {
          tensor(from, to, k) = bound;
          if (direction == "both") {
            tensor(to, from, k) = bound;
          }
        }
      }
      cfg.economy.capacities = tensor;
    }

    json enumeration = doc.value("enumeration", json::object());
    if (enumeration.contains("flow_bound") && !enumeration["flow_bound"].is_null()) {
      if (!enumeration["flow_bound"].is_number_integer() ||
          enumeration["flow_bound"].get<int>() < 1) {
        throw ValidationError("enumeration.flow_bound: must be an integer >= 1");
      }
      cfg.flow_bound = enumeration["flow_bound"].get<int>();
    }
    cfg.allow_resale = detail::get_or<bool>(enumeration, "allow_resale", false);
    cfg.threads = detail::get_or<unsigned>(enumeration, "threads", 1U);

    json ascent = doc.value("ascent", json::object());
    cfg.step_scale = detail::get_or<double>(ascent, "step_scale", 0.1);
    cfg.stop_tolerance = detail::get_or<double>(ascent, "stop_tolerance", 1e-6);
    cfg.max_iterations = detail::get_or<std::size_t>(ascent, "max_iterations", 20000);
    if (!(cfg.step_scale > 0.0) || !(cfg.stop_tolerance > 0.0)) {
      throw ValidationError("ascent: step_scale and stop_tolerance must be positive");
    }

    json process = doc.value("nontatonnement", json::object());
    cfg.attempts = detail::get_or<int>(process, "attempts", 24);
    cfg.improvement_tolerance = detail::get_or<double>(process, "improvement_tolerance", 1e-6);
    cfg.samples = detail::get_or<std::size_t>(process, "samples", 1000);

    cfg.seed = detail::get_or<std::uint64_t>(doc, "seed", 0);
    cfg.tolerance = detail::get_or<double>(doc, "tolerance", 1e-9);

    json reference = doc.value("reference", json::object());
    if (reference.contains("feasible")) cfg.reference.feasible = reference["feasible"].get<std::size_t>();
    if (reference.contains("pareto")) cfg.reference.pareto = reference["pareto"].get<std::size_t>();
    if (reference.contains("nash")) cfg.reference.nash = reference["nash"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario: wrong value type (") + e.what() + ")");
  }

  try {
    cfg.economy.validate();
  } catch (const ContractViolation& e) {
    throw ValidationError(e.what());
  }
  return cfg;
}

/// Re-derives the resolved JSON after command-line overrides.
inline void resolve(ScenarioConfig& cfg) {
  using nlohmann::json;
  json agents = json::array();
  for (const auto& a : cfg.economy.agents) {
    const auto& ces = std::get<CesUtility>(a.utility);
    json upper = json::array();
    for (double u : a.consumption.upper) {
      upper.push_back(std::isfinite(u) ? json(u) : json(nullptr));
    }
    agents.push_back({{"name", a.name},
                      {"endowment", a.endowment},
                      {"utility", {{"type", "ces"}, {"weights", ces.weights}, {"exponent", ces.exponent}}},
                      {"money", a.money},
                      {"consumption", {{"lower", a.consumption.lower}, {"upper", upper}}}});
  }
  json caps = json::array();
  if (cfg.economy.capacities) {
    const auto& c = *cfg.economy.capacities;
    for (std::size_t i = 0; i < c.agents(); ++i) {
      for (std::size_t j = 0; j < c.agents(); ++j) {
        for (std::size_t k = 0; k < c.goods() && i != j; ++k) {
          if (std::isfinite(c(i, j, k))) {
            caps.push_back({{"from", cfg.economy.agents[i].name},
                            {"to", cfg.economy.agents[j].name},
                            {"good", k + 1},
                            {"direction", "forward"},
                            {"bound", c(i, j, k)}});
          }
        }
      }
    }
  }
  cfg.resolved = {
      {"name", cfg.name},
      {"mode", cfg.economy.mode == Mode::discrete ? "discrete" : "continuous"},
      {"goods", cfg.economy.goods},
      {"agents", agents},
      {"capacities", caps},
      {"enumeration", {{"flow_bound", cfg.flow_bound ? json(*cfg.flow_bound) : json("total endowment per good")},
                       {"allow_resale", cfg.allow_resale},
                       {"threads", cfg.threads}}},
      {"ascent", {{"step_scale", cfg.step_scale},
                  {"stop_tolerance", cfg.stop_tolerance},
                  {"max_iterations", cfg.max_iterations}}},
      {"nontatonnement", {{"attempts", cfg.attempts},
                          {"improvement_tolerance", cfg.improvement_tolerance},
                          {"samples", cfg.samples}}},
      {"seed", cfg.seed},
      {"tolerance", cfg.tolerance},
  };
}

inline ScenarioConfig load_scenario_text(const std::string& text) {
  ScenarioConfig cfg = scenario_from_json(parse_json_text(text));
  resolve(cfg);
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  return load_scenario_text(read_file(path));
}

}  // namespace effective_trade::harness
