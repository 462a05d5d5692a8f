#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "effective_trade/discrete/record.hpp"
#include "effective_trade/economy.hpp"
#include "effective_trade/error.hpp"

namespace effective_trade::harness {

/// Shortest text that parses back to the same double.
inline std::string exact(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos) {
    s = s[0] == '-' ? s.substr(1) : s;  // no "-0.00"
  }
  return s;
}

inline std::vector<std::string> record_columns(const Economy& economy) {
  const auto& a = economy.agents;
  std::vector<std::string> cols{"index", "feasible", "pareto", "nash",
                                "nash_pareto", "witness", "polytope_dim"};
  for (std::size_t k = 0; k < economy.goods; ++k) {
    for (auto [i, j] : pair_order(economy.size())) {
      cols.push_back("q" + std::to_string(k + 1) + "_" + a[i].name + "_" + a[j].name);
    }
  }
  for (std::size_t i = 0; i < economy.size(); ++i) {
    for (std::size_t k = 0; k < economy.goods; ++k) {
      cols.push_back("p_" + a[i].name + "_" + std::to_string(k + 1));
    }
  }
  for (std::size_t i = 0; i < economy.size(); ++i) {
    cols.push_back("u_" + a[i].name);
  }
  for (std::size_t i = 0; i < economy.size(); ++i) {
    for (std::size_t k = 0; k < economy.goods; ++k) {
      cols.push_back("x_" + a[i].name + "_" + std::to_string(k + 1));
    }
  }
  return cols;
}

/// Records as CSV rows (header included) at full precision.
inline void write_records_csv(std::ostream& os, const Economy& economy,
                              const std::vector<EquilibriumRecord>& records) {
  auto cols = record_columns(economy);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    os << (c ? "," : "") << cols[c];
  }
  os << '\n';
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    os << r << ',' << rec.flags.feasible << ',' << rec.flags.pareto << ','
       << rec.flags.nash << ',' << rec.flags.nash_pareto << ','
       << (rec.witness_source == WitnessSource::canonical ? "canonical" : "nash_search")
       << ',' << rec.polytope_dimension;
    for (double q : flattened_flows(rec.flows)) {
      os << ',' << exact(q);
    }
    for (double p : rec.witness.data()) {
      os << ',' << exact(p);
    }
    for (double u : rec.utilities) {
      os << ',' << exact(u);
    }
    for (const auto& x : rec.allocation) {
      for (double v : x) {
        os << ',' << exact(v);
      }
    }
    os << '\n';
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("csv: bad number '" + s + "'");
  }
  return v;
}

/// Inverse of write_records_csv. Lines starting with '#' are skipped.
inline std::vector<EquilibriumRecord> parse_records_csv(
    std::istream& is, const Economy& economy) {
  const auto expected = record_columns(economy);
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  const auto pairs = pair_order(n);
  std::vector<EquilibriumRecord> out;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    auto cells = split_csv_line(line);
    if (!header) {
      if (cells != expected) {
        throw ValidationError("csv: header does not match the economy");
      }
      header = true;
      continue;
    }
    if (cells.size() != expected.size()) {
      throw ValidationError("csv: wrong number of cells");
    }
    EquilibriumRecord r;
    std::size_t c = 1;
    r.flags.feasible = cells[c++] == "1";
    r.flags.pareto = cells[c++] == "1";
    r.flags.nash = cells[c++] == "1";
    r.flags.nash_pareto = cells[c++] == "1";
    r.witness_source = cells[c++] == "canonical" ? WitnessSource::canonical
                                                 : WitnessSource::nash_search;
    r.polytope_dimension = static_cast<int>(parse_double(cells[c++]));
    r.flows = FlowTensor(n, L);
    for (std::size_t k = 0; k < L; ++k) {
      for (auto [i, j] : pairs) {
        r.flows(i, j, k) = parse_double(cells[c++]);
      }
    }
    r.witness = PriceSystem(n, L);
    for (double& p : r.witness.data()) {
      p = parse_double(cells[c++]);
    }
    r.utilities.resize(n);
    for (double& u : r.utilities) {
      u = parse_double(cells[c++]);
    }
    r.allocation.assign(n, GoodBundle(L));
    for (auto& x : r.allocation) {
      for (double& v : x) {
        v = parse_double(cells[c++]);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string tuple_text(const std::vector<std::string>& items) {
  std::string s = "(";
  for (std::size_t k = 0; k < items.size(); ++k) {
    s += (k ? ", " : "") + items[k];
  }
  return s + ")";
}

/// A number as the tables print it: integers bare, otherwise 2 decimals.
inline std::string table_number(double v) {
  if (std::abs(v - std::round(v)) < 1e-9) {
    return fixed(std::round(v), 0);
  }
  return fixed(v);
}

/**
 * Aligned table in the layout of the published equilibrium tables:
 * utilities, each agent's price of every good but the last, one flow
 * vector per good, then the Nash-Pareto and Pareto markers.
 */
inline void write_records_table(std::ostream& os, const Economy& economy,
                                const std::vector<EquilibriumRecord>& records) {
  const std::size_t n = economy.size();
  const std::size_t L = economy.goods;
  const auto pairs = pair_order(n);
  std::vector<std::vector<std::string>> rows;

  std::vector<std::string> head;
  {
    std::vector<std::string> names;
    for (const auto& a : economy.agents) names.push_back("u^" + a.name);
    head.push_back(tuple_text(names));
    for (std::size_t k = 0; k + 1 < std::max<std::size_t>(L, 2); ++k) {
      std::vector<std::string> ps;
      for (const auto& a : economy.agents) ps.push_back("p^" + a.name + "_" + std::to_string(k + 1));
      head.push_back(tuple_text(ps));
    }
    for (std::size_t k = 0; k < L; ++k) {
      std::vector<std::string> qs;
      for (auto [i, j] : pairs) {
        qs.push_back("x" + std::to_string(i + 1) + std::to_string(j + 1) + "," + std::to_string(k + 1));
      }
      head.push_back(tuple_text(qs));
    }
    head.push_back("NP");
    head.push_back("P");
  }
  rows.push_back(head);

  for (const auto& r : records) {
    std::vector<std::string> row;
    std::vector<std::string> us;
    for (double u : r.utilities) us.push_back(fixed(u));
    row.push_back(tuple_text(us));
    for (std::size_t k = 0; k + 1 < std::max<std::size_t>(L, 2); ++k) {
      std::vector<std::string> ps;
      for (std::size_t i = 0; i < n; ++i) ps.push_back(table_number(k < L ? r.witness(i, k) : 1.0));
      row.push_back(tuple_text(ps));
    }
    for (std::size_t k = 0; k < L; ++k) {
      std::vector<std::string> qs;
      for (auto [i, j] : pairs) qs.push_back(table_number(r.flows(i, j, k)));
      row.push_back(tuple_text(qs));
    }
    row.push_back(r.flags.nash_pareto ? "*" : "");
    row.push_back(r.flags.pareto ? "P" : "");
    rows.push_back(row);
  }

  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string cell = row[c];
      if (c + 1 < row.size()) {
        cell.resize(width[c], ' ');
        cell += "  ";
      }
      line += cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
}

}  // namespace effective_trade::harness
