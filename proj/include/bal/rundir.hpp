#ifndef BAL_RUNDIR_HPP
#define BAL_RUNDIR_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bal/balancer.hpp"
#include "bal/clustering.hpp"
#include "bal/orchestrator.hpp"

namespace bal {

// JSON mirrors of the run-level types. Unknown config keys are rejected.
nlohmann::ordered_json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
// Overlays the keys present in `j` onto `base`.
void apply_config_json(RunConfig& base, const nlohmann::json& j);

nlohmann::ordered_json clustering_to_json(const Clustering& c);
Clustering clustering_from_json(const nlohmann::json& j);

nlohmann::ordered_json beta_report_to_json(const BetaSearchReport& report, bool searched);

// trace.csv: cycle,labeled_count,lambda,accuracy
std::string format_trace_csv(const std::vector<CycleRecord>& cycles);
std::vector<CycleRecord> parse_trace_csv(const std::string& text);

// Writes config.json, beta_report.json, manifests.jsonl and trace.csv.
void write_run_dir(const std::filesystem::path& dir, const RunConfig& config, const RunState& state);

// Rebuilds the parts of a RunState that a run directory records.
RunState read_run_dir(const std::filesystem::path& dir, std::size_t pool_size);

}  // namespace bal

#endif  // BAL_RUNDIR_HPP
