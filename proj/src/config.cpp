#include "senscap/config.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "senscap/error.hpp"
#include "senscap/montecarlo.hpp"

namespace senscap {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::Config, what); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) config_error(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) config_error("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) config_error("missing key '" + where + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) config_error("'" + name + "' must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& name) {
  if (!v.is_number_integer()) config_error("'" + name + "' must be an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& name) {
  if (!v.is_array()) config_error("'" + name + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, name));
  return out;
}

MRFModel parse_model(const json& m) {
  only_keys(m, "model", {"p", "p_node", "p_edge"});
  if (m.contains("p")) {
    if (m.contains("p_node") || m.contains("p_edge"))
      config_error("model takes either p or p_node/p_edge, not both");
    return MRFModel::symmetric_family(number(m.at("p"), "model.p"));
  }
  const auto node = numbers(require(m, "p_node", "model."), "model.p_node");
  const auto& edge = require(m, "p_edge", "model.");
  if (node.size() != 2) config_error("model.p_node must have 2 entries");
  if (!edge.is_array() || edge.size() != 2) config_error("model.p_edge must be a 2x2 array");
  std::array<std::array<double, 2>, 2> pe{};
  for (int a = 0; a < 2; ++a) {
    const auto row = numbers(edge[a], "model.p_edge");
    if (row.size() != 2) config_error("model.p_edge must be a 2x2 array");
    pe[a] = {row[0], row[1]};
  }
  return MRFModel({node[0], node[1]}, pe);
}

SensingFunction parse_psi(const json& p, int c) {
  only_keys(p, "psi", {"kind", "weights", "table"});
  const auto& kind = require(p, "kind", "psi.");
  if (!kind.is_string()) config_error("'psi.kind' must be a string");
  const auto k = kind.get<std::string>();
  if (k == "identity") {
    if (c != 0) config_error("psi.kind 'identity' needs c = 0");
    return SensingFunction::identity();
  }
  if (k == "count") return SensingFunction::count(c);
  if (k == "weighted_sum")
    return SensingFunction::weighted_sum(c, numbers(require(p, "weights", "psi."), "psi.weights"));
  if (k == "lookup") {
    const auto& table = require(p, "table", "psi.");
    if (!table.is_array()) config_error("'psi.table' must be an array");
    std::vector<int> t;
    for (const auto& v : table) t.push_back(integer(v, "psi.table"));
    return SensingFunction::lookup(c, std::move(t));
  }
  config_error("unknown psi.kind '" + k + "'");
}

NoiseChannel parse_channel(const json& ch, int symbols) {
  only_keys(ch, "channel", {"kind", "q", "matrix"});
  const auto& kind = require(ch, "kind", "channel.");
  if (!kind.is_string()) config_error("'channel.kind' must be a string");
  const auto k = kind.get<std::string>();
  if (k == "bsc") return NoiseChannel::symmetric(symbols, number(require(ch, "q", "channel."), "channel.q"));
  if (k == "matrix") {
    const auto& m = require(ch, "matrix", "channel.");
    if (!m.is_array() || m.empty()) config_error("'channel.matrix' must be a non-empty array");
    std::vector<std::vector<double>> rows;
    for (const auto& r : m) rows.push_back(numbers(r, "channel.matrix"));
    Matrix t(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != t.cols()) config_error("'channel.matrix' rows differ in length");
      for (std::size_t j = 0; j < t.cols(); ++j) t(i, j) = rows[i][j];
    }
    return NoiseChannel(std::move(t));
  }
  config_error("unknown channel.kind '" + k + "'");
}

RunConfig parse_document(const json& doc) {
  only_keys(doc, "", {"model", "c", "psi", "channel", "D", "k", "n", "trials", "seed", "optimizer"});
  const int c = integer(require(doc, "c", ""), "c");
  if (c < 0 || c > 2) config_error("'c' must be 0, 1 or 2");
  auto model = parse_model(require(doc, "model", ""));
  auto psi = parse_psi(require(doc, "psi", ""), c);
  auto channel = parse_channel(require(doc, "channel", ""), psi.alphabet_size());
  RunConfig cfg{.model = std::move(model), .c = c, .psi = std::move(psi), .channel = std::move(channel)};

  cfg.D = numbers(require(doc, "D", ""), "D");
  if (cfg.D.empty()) config_error("'D' must not be empty");
  for (double d : cfg.D)
    if (!(d >= 0.0 && d <= 1.0)) config_error("every D must lie in [0, 1]");
  if (doc.contains("k")) cfg.k = integer(doc.at("k"), "k");
  if (doc.contains("n")) {
    const auto& n = doc.at("n");
    if (!n.is_array()) config_error("'n' must be an array");
    for (const auto& v : n) {
      const int ni = integer(v, "n");
      if (ni < 1) config_error("every n must be >= 1");
      cfg.n.push_back(ni);
    }
  }
  if (doc.contains("trials")) {
    cfg.trials = integer(doc.at("trials"), "trials");
    if (cfg.trials < 1) config_error("'trials' must be >= 1");
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      config_error("'seed' must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.optimizer.seed = cfg.seed;
  if (doc.contains("optimizer")) {
    const auto& o = doc.at("optimizer");
    only_keys(o, "optimizer", {"theta_tol", "inner_tol", "eps_dist", "restarts"});
    if (o.contains("theta_tol")) cfg.optimizer.theta_tol = number(o.at("theta_tol"), "optimizer.theta_tol");
    if (o.contains("inner_tol")) cfg.optimizer.inner_tol = number(o.at("inner_tol"), "optimizer.inner_tol");
    if (o.contains("eps_dist")) cfg.optimizer.eps_dist = number(o.at("eps_dist"), "optimizer.eps_dist");
    if (o.contains("restarts")) cfg.optimizer.restarts = integer(o.at("restarts"), "optimizer.restarts");
  }
  cfg.optimizer.validate();
  check_compatible(std::max(cfg.k, 2 * c + 1), c, cfg.psi, cfg.channel);
  if (cfg.k < 3) config_error("'k' must be >= 3");
  return cfg;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  try {
    return parse_document(doc);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    config_error(e.what());
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string CsvTable::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

CsvTable run_bound(const RunConfig& config) {
  if (config.c != 0 && config.c != 1) fail(ErrorCode::Config, "bound needs c = 0 or c = 1");
  CsvTable table{{"D", "c_lb", "certificate", "iterations", "witness_distortion"}, {}};
  for (double d : config.D) {
    const CapacityQuery query{config.model, config.c, config.psi, config.channel, d, config.optimizer};
    const auto r = capacity_lower_bound(query);
    table.rows.push_back({format_number(d), format_number(r.value), format_number(r.certificate),
                          std::to_string(r.iterations), format_number(r.witness_distortion)});
  }
  return table;
}

CsvTable run_simulate(const RunConfig& config) {
  if (config.n.empty()) fail(ErrorCode::Config, "simulate needs a non-empty 'n' array");
  if (config.D.size() != 1) fail(ErrorCode::Config, "simulate needs exactly one D value");
  TrialConfig trial{.model = config.model,
                    .k = config.k,
                    .n = config.n.front(),
                    .c = config.c,
                    .psi = config.psi,
                    .channel = config.channel,
                    .D = config.D.front(),
                    .trials = config.trials,
                    .seed = config.seed,
                    .decoder = config.k <= kMaxEnumerationSide ? Decoder::ExhaustiveMap : Decoder::Icm};
  CsvTable table{{"n", "R", "p_e_hat", "ci_lo", "ci_hi", "trials"}, {}};
  for (const auto& row : rate_sweep(trial, config.n))
    table.rows.push_back({std::to_string(row.n), format_number(row.R),
                          format_number(row.estimate.p_e_hat), format_number(row.estimate.ci_lo),
                          format_number(row.estimate.ci_hi), std::to_string(row.estimate.trials)});
  return table;
}

}  // namespace senscap
