#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "effective_trade/anticipation.hpp"
#include "effective_trade/discrete/enumerate.hpp"
#include "effective_trade/discrete/nash.hpp"
#include "effective_trade/discrete/pareto.hpp"
#include "effective_trade/dynamics/ascent.hpp"
#include "effective_trade/dynamics/nontatonnement.hpp"
#include "effective_trade/error.hpp"
#include "effective_trade/harness/record_io.hpp"
#include "effective_trade/harness/scenario.hpp"
#include "effective_trade/monetary.hpp"

namespace effective_trade::harness {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kNumerical = 3,
};

enum class Format { table, csv };

struct RunRequest {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> flow_bound;
  std::optional<double> tolerance;
  Format format = Format::table;
  /// nontatonnement: restrict steps to Nash records.
  bool nash = false;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{
      "enumerate", "pareto",         "nash",        "nash-pareto",
      "converge",  "nontatonnement", "money-audit", "mode"};
  return names;
}

/**
 * Collects named output artifacts and commits them at the end; on failure
 * nothing (or nothing partial) is left in the output directory.
 */
class ArtifactWriter {
 public:
  ArtifactWriter(std::optional<std::string> dir, std::ostream& console)
      : dir_(std::move(dir)), console_(console) {}

  std::ostream& file(const std::string& name) {
    auto& s = files_[name];
    if (order_.empty() || std::find(order_.begin(), order_.end(), name) == order_.end()) {
      order_.push_back(name);
    }
    return s;
  }

  std::ostream& console() { return console_; }
  bool to_directory() const { return dir_.has_value(); }

  /// Writes each artifact to a temporary file, then renames them all.
  void commit() {
    if (!dir_) {
      return;
    }
    namespace fs = std::filesystem;
    fs::create_directories(*dir_);
    std::vector<fs::path> temps;
    try {
      for (const auto& name : order_) {
        fs::path tmp = fs::path(*dir_) / (name + ".partial");
        std::ofstream out(tmp, std::ios::binary);
        out << files_[name].str();
        out.close();
        if (!out) {
          throw NumericalError("cannot write " + tmp.string());
        }
        temps.push_back(tmp);
      }
    } catch (...) {
      for (const auto& t : temps) {
        std::error_code ec;
        fs::remove(t, ec);
      }
      throw;
    }
    for (std::size_t k = 0; k < order_.size(); ++k) {
      fs::rename(temps[k], fs::path(*dir_) / order_[k]);
    }
  }

 private:
  std::optional<std::string> dir_;
  std::ostream& console_;
  std::map<std::string, std::ostringstream> files_;
  std::vector<std::string> order_;
};

namespace detail {

inline void header(std::ostream& os, const ScenarioConfig& cfg,
                   const std::string& command) {
  os << "# effective-trade " << kToolVersion << " command=" << command
     << " config=fnv1a64:" << config_hash(cfg) << '\n';
  os << "# resolved " << cfg.resolved.dump() << '\n';
}

inline EnumerationOptions enumeration_options(const ScenarioConfig& cfg) {
  EnumerationOptions o;
  o.flow_bound = cfg.flow_bound;
  o.allow_resale = cfg.allow_resale;
  o.threads = cfg.threads;
  return o;
}

inline std::string convention(const ScenarioConfig& cfg) {
  std::string bound = cfg.flow_bound ? std::to_string(*cfg.flow_bound)
                                     : std::string("total endowment per good");
  return "integer flows in [0, " + bound +
         "], no opposite flows of a good between a pair, holdings inside each "
         "consumption set, capacities respected, " +
         (cfg.allow_resale ? std::string("resale allowed")
                           : std::string("shipments of a good capped by the "
                                         "shipper's own endowment (no resale)")) +
         ", budgets balanced at some price system";
}

inline void compare_count(std::ostream& os, const char* what,
                          std::size_t got,
                          const std::optional<std::size_t>& reference,
                          const ScenarioConfig& cfg) {
  os << what << ": " << got << '\n';
  if (reference && *reference != got) {
    os << "deviation: " << what << " " << got << " vs reference " << *reference
       << " under convention: " << convention(cfg) << '\n';
  }
}

struct DiscreteResult {
  std::vector<EquilibriumRecord> feasible;
  std::vector<EquilibriumRecord> nash;
};

inline std::vector<EquilibriumRecord> feasible_with_pareto(
    const ScenarioConfig& cfg) {
  auto records = enumerate_feasible(cfg.economy, enumeration_options(cfg));
  mark_pareto(records);
  return records;
}

/// Nash records of the enumeration, keeping the global Pareto flags.
inline std::vector<EquilibriumRecord> nash_records(
    const ScenarioConfig& cfg, const std::vector<EquilibriumRecord>& feasible) {
  auto nash = nash_set(cfg.economy, feasible);
  mark_nash_pareto(nash);
  return nash;
}

inline void emit_records(ArtifactWriter& out, const ScenarioConfig& cfg,
                         const std::string& command, Format format,
                         const std::vector<EquilibriumRecord>& records) {
  if (out.to_directory()) {
    auto& f = out.file(command + ".csv");
    header(f, cfg, command);
    write_records_csv(f, cfg.economy, records);
    auto& t = out.file(command + ".txt");
    header(t, cfg, command);
    write_records_table(t, cfg.economy, records);
    return;
  }
  if (format == Format::csv) {
    write_records_csv(out.console(), cfg.economy, records);
  } else {
    write_records_table(out.console(), cfg.economy, records);
  }
}

inline Economy continuous_copy(Economy e) {
  e.mode = Mode::continuous;
  return e;
}

inline int run_mode(const RunRequest& request, ArtifactWriter& out) {
  using nlohmann::json;
  const std::string text = read_file(request.config_path);
  json doc = parse_json_text(text);
  if (!doc.contains("support") || !doc.contains("probabilities")) {
    throw ValidationError("belief: support and probabilities required");
  }
  FiniteBelief<json> belief;
  for (const auto& v : doc["support"]) belief.support.push_back(v);
  for (const auto& p : doc["probabilities"]) {
    if (!p.is_number()) throw ValidationError("belief: probabilities must be numbers");
    belief.probabilities.push_back(p.get<double>());
  }
  try {
    belief.validate();
  } catch (const ContractViolation& e) {
    throw ValidationError(e.what());
  }

  std::vector<json> image = belief.support;
  if (doc.contains("image")) {
    if (!doc["image"].is_array() || doc["image"].size() != belief.support.size()) {
      throw ValidationError("belief: image needs one value per support element");
    }
    image.assign(doc["image"].begin(), doc["image"].end());
  }
  auto f = [&](const json& y) {
    for (std::size_t s = 0; s < belief.support.size(); ++s) {
      if (belief.support[s] == y) return image[s];
    }
    return y;
  };

  std::vector<json> modes;
  if (doc.contains("history")) {
    const auto& h = doc["history"];
    History<std::vector<json>> history;
    history.window = h.value("window", std::int64_t{1});
    history.now = h.value("now", std::int64_t{0});
    if (history.window < 1) throw ValidationError("history.window: must be >= 1");
    for (const auto& o : h.value("observations", json::array())) {
      Observation<std::vector<json>> obs;
      obs.t = o.value("t", std::int64_t{0});
      for (const auto& a : o.value("allowed", json::array())) obs.signal.push_back(a);
      history.observations.push_back(std::move(obs));
    }
    auto compatible = [](const json& y, const std::vector<json>& allowed) {
      return std::find(allowed.begin(), allowed.end(), y) != allowed.end();
    };
    modes = conditional_mode(belief, history, compatible, f);
  } else {
    modes = pushforward_mode(belief, f);
  }
  auto& os = out.to_directory() ? out.file("mode.txt") : out.console();
  os << "# effective-trade " << kToolVersion << " command=mode belief=fnv1a64:"
     << fnv1a64(doc.dump()) << '\n';
  os << "modal set:";
  for (const auto& m : modes) os << ' ' << m.dump();
  os << '\n';
  return kSuccess;
}

}  // namespace detail

/// Executes one command. Errors propagate as exceptions; see run().
inline int execute(const RunRequest& request, ArtifactWriter& out) {
  if (request.command == "mode") {
    return detail::run_mode(request, out);
  }
  ScenarioConfig cfg = load_scenario(request.config_path);
  if (request.seed) cfg.seed = *request.seed;
  if (request.flow_bound) {
    if (*request.flow_bound < 1) throw ValidationError("--flow-bound: must be >= 1");
    cfg.flow_bound = *request.flow_bound;
  }
  if (request.tolerance) cfg.tolerance = *request.tolerance;
  resolve(cfg);

  const std::string& cmd = request.command;
  std::ostream& con = out.console();

  if (cmd == "enumerate" || cmd == "pareto" || cmd == "nash" ||
      cmd == "nash-pareto") {
    if (cfg.economy.mode != Mode::discrete) {
      throw ValidationError("mode: " + cmd + " needs a discrete economy");
    }
    auto feasible = detail::feasible_with_pareto(cfg);
    std::size_t pareto_count = 0;
    for (const auto& r : feasible) pareto_count += r.flags.pareto;

    detail::header(con, cfg, cmd);
    detail::compare_count(con, "feasible", feasible.size(), cfg.reference.feasible, cfg);
    detail::compare_count(con, "pareto", pareto_count, cfg.reference.pareto, cfg);

    std::vector<EquilibriumRecord> selected;
    if (cmd == "enumerate") {
      selected = std::move(feasible);
    } else if (cmd == "pareto") {
      for (auto& r : feasible) if (r.flags.pareto) selected.push_back(r);
    } else {
      auto nash = detail::nash_records(cfg, feasible);
      std::size_t starred = 0;
      for (const auto& r : nash) starred += r.flags.nash_pareto;
      detail::compare_count(con, "nash", nash.size(), cfg.reference.nash, cfg);
      con << "nash-pareto: " << starred << '\n';
      if (cmd == "nash") {
        selected = std::move(nash);
      } else {
        for (auto& r : nash) if (r.flags.nash_pareto) selected.push_back(r);
      }
    }
    detail::emit_records(out, cfg, cmd, request.format, selected);
    return kSuccess;
  }

  if (cmd == "converge") {
    Economy e = detail::continuous_copy(cfg.economy);
    AscentOptions o;
    o.schedule = inverse_sqrt_schedule(cfg.step_scale);
    o.stop_tolerance = cfg.stop_tolerance;
    o.max_iterations = cfg.max_iterations;
    auto result = gradient_ascent(e, autarky_state(e), o);

    auto& traj = out.to_directory() ? out.file("trajectory.csv") : con;
    detail::header(traj, cfg, cmd);
    if (out.to_directory() || request.format == Format::csv) {
      traj << "t,welfare,step_norm,step_size,residual\n";
      for (const auto& p : result.trajectory) {
        traj << p.t << ',' << exact(p.welfare) << ',' << exact(p.step_norm)
             << ',' << exact(p.step_size) << ',' << exact(p.residual) << '\n';
      }
    }
    auto& rep = out.to_directory() ? out.file("terminal.txt") : con;
    auto u = offer_utilities(e, result.terminal.offers);
    rep << "status: " << (result.converged ? "converged" : "stopped") << " ("
        << result.diagnostic << ")\n";
    rep << "iterations: " << result.terminal.t << '\n';
    rep << "welfare: " << exact(result.terminal.welfare) << " (start "
        << exact(result.trajectory.front().welfare) << ")\n";
    rep << "last step norm: " << exact(result.trajectory.back().step_norm) << '\n';
    std::vector<std::string> us;
    for (double v : u) us.push_back(fixed(v));
    rep << "utilities: " << tuple_text(us) << '\n';
    FlowTensor q = effective_flows(result.terminal.offers);
    for (std::size_t k = 0; k < e.goods; ++k) {
      std::vector<std::string> qs;
      for (auto [i, j] : pair_order(e.size())) qs.push_back(fixed(q(i, j, k), 4));
      rep << "good " << k + 1 << " flows: " << tuple_text(qs) << '\n';
    }
    if (out.to_directory()) detail::header(con, cfg, cmd);
    if (out.to_directory()) con << "welfare: " << exact(result.terminal.welfare) << '\n';
    return result.converged ? kSuccess : kNumerical;
  }

  if (cmd == "nontatonnement") {
    NontatonnementOptions o;
    o.seed = cfg.seed;
    o.attempts = cfg.attempts;
    o.improvement_tolerance = cfg.improvement_tolerance;
    o.enumeration = detail::enumeration_options(cfg);
    ProcessRun run;
    if (request.nash) {
      run = run_process(cfg.economy, [&](const Economy& stage) {
        return nontatonnement_nash_step(stage, o);
      });
    } else {
      std::uint64_t step_seed = cfg.seed;
      run = run_process(cfg.economy, [&](const Economy& stage) {
        o.seed = step_seed++;
        return nontatonnement_step(stage, o);
      });
    }
    auto& log = out.to_directory() ? out.file("steps.csv") : con;
    detail::header(log, cfg, request.nash ? "nontatonnement --nash" : cmd);
    log << "step";
    for (const auto& a : cfg.economy.agents) log << ",u_" << a.name;
    for (std::size_t k = 0; k < cfg.economy.goods; ++k) {
      for (auto [i, j] : pair_order(cfg.economy.size())) {
        log << ",q" << k + 1 << '_' << cfg.economy.agents[i].name << '_'
            << cfg.economy.agents[j].name;
      }
    }
    log << '\n';
    log << 0;
    for (double u : endowment_utilities(cfg.economy)) log << ',' << exact(u);
    for (std::size_t c = 0; c < cfg.economy.goods * pair_order(cfg.economy.size()).size(); ++c) log << ",0";
    log << '\n';
    for (std::size_t s = 0; s < run.steps.size(); ++s) {
      log << s + 1;
      for (double u : run.steps[s].utilities_after) log << ',' << exact(u);
      for (double q : flattened_flows(run.steps[s].flows)) log << ',' << exact(q);
      log << '\n';
    }
    if (out.to_directory()) detail::header(con, cfg, cmd);
    con << "steps: " << run.steps.size() << (run.terminated ? " (rest point)" : " (step cap)") << '\n';
    return kSuccess;
  }

  if (cmd == "money-audit") {
    if (cfg.economy.mode != Mode::discrete) {
      throw ValidationError("mode: money-audit audits the discrete Nash set");
    }
    auto feasible = detail::feasible_with_pareto(cfg);
    auto nash = detail::nash_records(cfg, feasible);
    std::vector<double> money;
    for (const auto& a : cfg.economy.agents) money.push_back(a.money);

    auto& audit = out.to_directory() ? out.file("money_audit.csv") : con;
    detail::header(audit, cfg, cmd);
    audit << "record,agent,local_residual,balance,conservation,left,right,velocity\n";
    double worst = 0.0;
    for (std::size_t r = 0; r < nash.size(); ++r) {
      const auto& rec = nash[r];
      auto ledger = build_ledger(money, rec.witness, rec.flows);
      auto local = local_net_audit(ledger, rec.witness, rec.flows);
      double cons = conservation_audit(ledger);
      auto qe = quantity_equation(rec.witness, rec.flows, ledger);
      for (std::size_t i = 0; i < local.size(); ++i) {
        worst = std::max(worst, std::abs(local[i]));
        audit << r << ',' << cfg.economy.agents[i].name << ',' << exact(local[i])
              << ',' << exact(ledger.balances[i]) << ',' << exact(cons) << ','
              << exact(qe.left) << ',' << exact(qe.right) << ','
              << exact(qe.velocity) << '\n';
      }
    }
    if (out.to_directory()) detail::header(con, cfg, cmd);
    con << "records audited: " << nash.size() << "\nworst local residual: "
        << exact(worst) << '\n';
    return worst <= cfg.tolerance ? kSuccess : kNumerical;
  }

  throw ContractViolation("unknown command: " + cmd);
}

/// Runs a command and maps failures onto exit codes, printing the message.
inline int run(const RunRequest& request, std::ostream& out,
               std::ostream& err) {
  std::ostringstream buffer;
  ArtifactWriter writer(request.out_dir, buffer);
  try {
    if (std::find(commands().begin(), commands().end(), request.command) ==
        commands().end()) {
      err << "error: unknown command '" << request.command << "'\n";
      return kUsage;
    }
    int code = execute(request, writer);
    writer.commit();
    out << buffer.str();
    return code;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const ContractViolation& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace effective_trade::harness
