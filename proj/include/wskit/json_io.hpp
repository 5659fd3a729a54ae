#pragma once

#include <string>

#include <json.hpp>

#include "wskit/baselines.hpp"
#include "wskit/eval.hpp"
#include "wskit/hmm.hpp"
#include "wskit/mmpp.hpp"
#include "wskit/pipeline.hpp"
#include "wskit/stats.hpp"

// JSON/CSV report surfaces. Serialization is deterministic (ordered keys,
// shortest round-trip doubles), so identical results give identical bytes.
namespace wskit {

nlohmann::ordered_json to_json(const traffic_stats& s);
nlohmann::ordered_json to_json(const mmpp2_params& p);
nlohmann::ordered_json to_json(const pareto_fit& p);
nlohmann::ordered_json to_json(const hmm_model& m);
nlohmann::ordered_json to_json(const eval_report& r);
nlohmann::ordered_json to_json(const calibrate_x_result& r);
nlohmann::ordered_json to_json(const calibrate_z_result& r);
nlohmann::ordered_json to_json(const pipeline_result& r,
                               const pipeline_config& config);

traffic_stats stats_from_json(const nlohmann::json& j);
mmpp2_params mmpp_from_json(const nlohmann::json& j);
pareto_params pareto_from_json(const nlohmann::json& j);
hmm_model hmm_from_json(const nlohmann::json& j);

std::string branch_name(fit_branch b);
std::string policy_name(threshold_policy p);
std::string state_name(channel_state s);
std::string label_name(obs_label l);

void write_json(const nlohmann::ordered_json& j, const std::string& path);
nlohmann::json read_json(const std::string& path);

void write_predictions_csv(const std::vector<predicted_state>& preds,
                           const std::string& path);
std::vector<predicted_state> read_predictions_csv(const std::string& path);
void write_truth_csv(const std::vector<channel_state>& truth,
                     const std::string& path);
std::vector<channel_state> read_truth_csv(const std::string& path);
void write_slots_csv(const std::vector<slot_row>& slots, const std::string& path);

}  // namespace wskit
