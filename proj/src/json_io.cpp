#include "wskit/json_io.hpp"

#include <fstream>

#include "wskit/error.hpp"

namespace wskit {

namespace {

constexpr const char* kModule = "report_io";

nlohmann::ordered_json opt(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

std::string branch_name(fit_branch b) {
  switch (b) {
    case fit_branch::hyperexponential: return "hyperexponential";
    case fit_branch::coxian: return "coxian";
    default: return "unsupported";
  }
}

std::string policy_name(threshold_policy p) {
  return p == threshold_policy::fixed_training_average ? "fixed_training_average"
                                                       : "moving_average";
}

std::string state_name(channel_state s) {
  return s == channel_state::free ? "free" : "busy";
}

std::string label_name(obs_label l) {
  return l == obs_label::iat_small ? "iat_small" : "iat_large";
}

nlohmann::ordered_json to_json(const traffic_stats& s) {
  return {{"m1_ms", s.m1_ms},     {"sigma_ms", s.sigma_ms},
          {"c", s.c},             {"h", s.h},
          {"n_samples", s.n_samples}, {"low_confidence", s.low_confidence}};
}

nlohmann::ordered_json to_json(const mmpp2_params& p) {
  return {{"lambda1", p.lambda1},
          {"lambda2", p.lambda2},
          {"r1", p.r1},
          {"r2", p.r2},
          {"pi", {p.pi[0], p.pi[1]}},
          {"branch", branch_name(p.branch)},
          {"beta", p.beta},
          {"xi", p.xi},
          {"y_lb_ms", y_lower_bound_ms(p)}};
}

nlohmann::ordered_json to_json(const pareto_fit& p) {
  return {{"scale_ms", p.params.scale_ms},
          {"shape", p.params.shape},
          {"n_used", p.n_used},
          {"n_excluded", p.n_excluded}};
}

nlohmann::ordered_json to_json(const hmm_model& m) {
  return {{"initial", {m.initial[0], m.initial[1]}},
          {"a", {{m.a[0][0], m.a[0][1]}, {m.a[1][0], m.a[1][1]}}},
          {"b", {{m.b[0][0], m.b[0][1]}, {m.b[1][0], m.b[1][1]}}},
          {"threshold_policy", policy_name(m.policy)},
          {"threshold_value_ms", opt(m.threshold_value_ms)},
          {"window_count", m.window_count},
          {"degenerate", m.degenerate}};
}

nlohmann::ordered_json to_json(const eval_report& r) {
  return {{"rmse_ms", opt(r.rmse_ms)},
          {"rmse_pct", opt(r.rmse_pct)},
          {"hit_rate", opt(r.hit_rate)},
          {"fdr", opt(r.fdr)},
          {"precision", opt(r.precision)},
          {"f1", opt(r.f1)},
          {"confusion",
           {{"tp", r.confusion.tp},
            {"fp", r.confusion.fp},
            {"fn", r.confusion.fn},
            {"tn", r.confusion.tn}}},
          // Ground truth is our own labeling rule, not an external reference;
          // every report says so.
          {"ground_truth_rule",
           "slot busy iff its window mean IAT labels iat_small (observation "
           "thresholding reused)"}};
}

nlohmann::ordered_json to_json(const calibrate_x_result& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"x_s", row.x_s},
                    {"rmse_ms", row.rmse_ms},
                    {"rmse_pct", row.rmse_pct}});
  return {{"rows", rows}, {"best_x_s", r.best_x_s}};
}

nlohmann::ordered_json to_json(const calibrate_z_result& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"z_s", row.z_s},
                    {"hit_rate", opt(row.hit_rate)},
                    {"precision", opt(row.precision)},
                    {"f1", opt(row.f1)}});
  return {{"rows", rows}, {"best_z_s", r.best_z_s}};
}

nlohmann::ordered_json to_json(const pipeline_result& r,
                               const pipeline_config& config) {
  nlohmann::ordered_json j;
  j["config"] = {{"x_s", config.x_s},
                 {"z_s", config.z_s},
                 {"t_s", config.t_s},
                 {"k", config.k},
                 {"y_ms", r.y_ms},
                 {"ma_window", config.ma_window},
                 {"seed", config.seed}};
  j["stats"] = to_json(r.stats);
  j["mmpp"] = to_json(r.mmpp);
  j["hmm"] = to_json(r.training.model);
  j["training"] = {{"iterations", r.training.iterations},
                   {"converged", r.training.converged},
                   {"log_likelihood", r.training.log_likelihood.empty()
                                          ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(
                                                r.training.log_likelihood.back())}};
  j["report"] = to_json(r.report);
  return j;
}

namespace {

double num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw error(errc::parse_error, kModule,
                std::string("missing or non-numeric field '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

traffic_stats stats_from_json(const nlohmann::json& j) {
  traffic_stats s;
  s.m1_ms = num(j, "m1_ms");
  s.sigma_ms = num(j, "sigma_ms");
  s.c = num(j, "c");
  s.h = num(j, "h");
  if (j.contains("n_samples") && j["n_samples"].is_number_unsigned())
    s.n_samples = j["n_samples"].get<std::size_t>();
  if (j.contains("low_confidence") && j["low_confidence"].is_boolean())
    s.low_confidence = j["low_confidence"].get<bool>();
  return s;
}

mmpp2_params mmpp_from_json(const nlohmann::json& j) {
  mmpp2_params p;
  p.lambda1 = num(j, "lambda1");
  p.lambda2 = num(j, "lambda2");
  p.r1 = num(j, "r1");
  p.r2 = num(j, "r2");
  if (!(p.lambda1 > 0) || !(p.lambda2 > 0) || !(p.r1 > 0) || !(p.r2 > 0))
    throw error(errc::parse_error, kModule, "rates must be positive");
  const double rsum = p.r1 + p.r2;
  p.pi = {p.r2 / rsum, p.r1 / rsum};
  if (j.contains("branch") && j["branch"].is_string()) {
    const std::string b = j["branch"].get<std::string>();
    p.branch = b == "hyperexponential" ? fit_branch::hyperexponential
               : b == "coxian"         ? fit_branch::coxian
                                       : fit_branch::unsupported;
  }
  if (j.contains("beta") && j["beta"].is_number()) p.beta = j["beta"].get<double>();
  if (j.contains("xi") && j["xi"].is_number()) p.xi = j["xi"].get<double>();
  return p;
}

pareto_params pareto_from_json(const nlohmann::json& j) {
  pareto_params p;
  p.scale_ms = num(j, "scale_ms");
  p.shape = num(j, "shape");
  if (!(p.scale_ms > 0) || !(p.shape > 0))
    throw error(errc::parse_error, kModule, "scale and shape must be positive");
  return p;
}

hmm_model hmm_from_json(const nlohmann::json& j) {
  hmm_model m;
  try {
    for (int i = 0; i < 2; ++i) {
      m.initial[i] = j.at("initial").at(i).get<double>();
      for (int k = 0; k < 2; ++k) {
        m.a[i][k] = j.at("a").at(i).at(k).get<double>();
        m.b[i][k] = j.at("b").at(i).at(k).get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, kModule,
                std::string("bad HMM model JSON: ") + e.what());
  }
  if (j.contains("threshold_policy") && j["threshold_policy"].is_string())
    m.policy = j["threshold_policy"].get<std::string>() == "moving_average"
                   ? threshold_policy::moving_average
                   : threshold_policy::fixed_training_average;
  if (j.contains("threshold_value_ms") && j["threshold_value_ms"].is_number())
    m.threshold_value_ms = j["threshold_value_ms"].get<double>();
  if (j.contains("window_count") && j["window_count"].is_number_integer())
    m.window_count = j["window_count"].get<int>();
  if (j.contains("degenerate") && j["degenerate"].is_boolean())
    m.degenerate = j["degenerate"].get<bool>();
  return m;
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error(errc::parse_error, kModule, "cannot write " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::parse_error, kModule, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, kModule,
                "invalid JSON in " + path + ": " + e.what());
  }
}

void write_predictions_csv(const std::vector<predicted_state>& preds,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error(errc::parse_error, kModule, "cannot write " + path);
  out << "slot_start_us,state,p_free\n";
  for (const auto& p : preds) {
    nlohmann::json pf = p.p_free;  // shortest round-trip formatting
    out << p.slot_start_us << ',' << state_name(p.state) << ',' << pf.dump()
        << '\n';
  }
}

std::vector<predicted_state> read_predictions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::parse_error, kModule, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "slot_start_us,state,p_free")
    throw error(errc::parse_error, kModule, "bad predictions header in " + path);
  std::vector<predicted_state> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw error(errc::parse_error, kModule,
                  "bad predictions row " + std::to_string(row));
    predicted_state p;
    try {
      p.slot_start_us = std::stoll(line.substr(0, c1));
      p.p_free = std::stod(line.substr(c2 + 1));
    } catch (const std::exception&) {
      throw error(errc::parse_error, kModule,
                  "bad predictions row " + std::to_string(row));
    }
    const std::string st = line.substr(c1 + 1, c2 - c1 - 1);
    if (st != "free" && st != "busy")
      throw error(errc::parse_error, kModule,
                  "bad state at predictions row " + std::to_string(row));
    p.state = st == "free" ? channel_state::free : channel_state::busy;
    out.push_back(p);
  }
  return out;
}

void write_truth_csv(const std::vector<channel_state>& truth,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error(errc::parse_error, kModule, "cannot write " + path);
  out << "slot_index,state\n";
  for (std::size_t i = 0; i < truth.size(); ++i)
    out << i << ',' << state_name(truth[i]) << '\n';
}

std::vector<channel_state> read_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::parse_error, kModule, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "slot_index,state")
    throw error(errc::parse_error, kModule, "bad truth header in " + path);
  std::vector<channel_state> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto c1 = line.find(',');
    const std::string st = line.substr(c1 + 1);
    if (c1 == std::string::npos || (st != "free" && st != "busy"))
      throw error(errc::parse_error, kModule,
                  "bad truth row " + std::to_string(row));
    out.push_back(st == "free" ? channel_state::free : channel_state::busy);
  }
  return out;
}

void write_slots_csv(const std::vector<slot_row>& slots, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error(errc::parse_error, kModule, "cannot write " + path);
  out << "slot_start_us,observation,prediction,truth\n";
  for (const auto& s : slots)
    out << s.slot_start_us << ',' << label_name(s.observation) << ','
        << state_name(s.prediction) << ',' << state_name(s.truth) << '\n';
}

}  // namespace wskit
