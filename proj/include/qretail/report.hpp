#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qretail/agent.hpp"
#include "qretail/common.hpp"
#include "qretail/config.hpp"
#include "qretail/trainer.hpp"

namespace qretail {

struct ManifestEntry {
  std::string name;
  std::size_t rows = 0;  // data rows for CSVs, lines otherwise
};

struct Manifest {
  std::vector<ManifestEntry> files;
};

namespace detail {

/// Writes via a temp file and renames, so a failure never leaves a partial
/// file under the final name.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw data_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw data_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline std::size_t count_lines(const std::string& content) {
  std::size_t lines = 0;
  for (char c : content) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace detail

inline std::string render_metrics_csv(const TrainingReport& report) {
  std::string out = "episode,mean_reward,total_reward,epsilon,mean_loss,steps\n";
  for (const EpisodeMetrics& m : report.episodes) {
    out += std::to_string(m.episode) + ',' + format_double(m.mean_reward) +
           ',' + format_double(m.total_reward) + ',' +
           format_double(m.epsilon) + ',' + format_double(m.mean_loss) + ',' +
           std::to_string(m.steps) + '\n';
  }
  return out;
}

inline std::string render_actions_csv(const TrainingReport& report,
                                      std::size_t n_actions) {
  std::string out = "episode,action_index,count\n";
  for (const EpisodeMetrics& m : report.episodes) {
    for (std::size_t a = 0; a < n_actions; ++a) {
      out += std::to_string(m.episode) + ',' + std::to_string(a) + ',' +
             std::to_string(m.action_counts[a]) + '\n';
    }
  }
  return out;
}

inline std::string render_actions_timeline_csv(const TrainingReport& report) {
  std::string out = "global_step,episode,action_index\n";
  std::size_t global_step = 0;
  for (const EpisodeMetrics& m : report.episodes) {
    for (int action : m.actions) {
      out += std::to_string(global_step) + ',' + std::to_string(m.episode) +
             ',' + std::to_string(action) + '\n';
      ++global_step;
    }
  }
  return out;
}

inline std::string render_weekday_action_csv(const TrainingReport& report,
                                             std::size_t n_actions) {
  std::string out = "weekday,action_index,count\n";
  std::vector<std::size_t> totals(7 * n_actions, 0);
  for (const EpisodeMetrics& m : report.episodes) {
    for (std::size_t i = 0; i < m.weekday_action_counts.size(); ++i) {
      totals[i] += m.weekday_action_counts[i];
    }
  }
  if (!report.episodes.empty()) {
    for (std::size_t wd = 0; wd < 7; ++wd) {
      for (std::size_t a = 0; a < n_actions; ++a) {
        out += std::to_string(wd) + ',' + std::to_string(a) + ',' +
               std::to_string(totals[wd * n_actions + a]) + '\n';
      }
    }
  }
  return out;
}

inline std::string render_trace_csv(const EpisodeTrace& trace) {
  std::string out = "t,demand,supply,sales,stock,shortage\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out += std::to_string(t) + ',' + format_double(trace.demand[t]) + ',' +
           format_double(trace.supply[t]) + ',' +
           format_double(trace.sales[t]) + ',' +
           format_double(trace.stock[t]) + ',' +
           format_double(trace.shortage[t]) + '\n';
  }
  return out;
}

/// Writes every run artifact into out_dir: the plot-ready CSVs, the model
/// file, the configuration echo, and a manifest listing them with row
/// counts. Re-running with the same config and seed reproduces every byte.
inline Manifest write_report(const TrainingReport& report, const Agent& agent,
                             const RunConfig& config,
                             const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw data_error("cannot create output directory '" + out_dir.string() +
                     "': " + ec.message());
  }

  const std::size_t n_actions = agent.config().n_actions;
  Manifest manifest;

  auto emit_csv = [&](const std::string& name, const std::string& content) {
    detail::write_file_atomic(out_dir / name, content);
    manifest.files.push_back({name, detail::count_lines(content) - 1});
  };
  auto emit_text = [&](const std::string& name, const std::string& content) {
    detail::write_file_atomic(out_dir / name, content);
    manifest.files.push_back({name, detail::count_lines(content)});
  };

  emit_csv("metrics.csv", render_metrics_csv(report));
  emit_csv("actions.csv", render_actions_csv(report, n_actions));
  emit_csv("actions_timeline.csv", render_actions_timeline_csv(report));
  if (report.has_traces) {
    emit_csv("weekday_action.csv", render_weekday_action_csv(report, n_actions));
    emit_csv("trace_last.csv",
             render_trace_csv(report.episodes.empty()
                                  ? EpisodeTrace{}
                                  : report.episodes.back().trace));
  }

  std::ostringstream model;
  agent.save(model, report.seed);
  emit_text("model.txt", model.str());
  emit_text("config_echo.ini", render_run_config(config));

  nlohmann::ordered_json j;
  j["files"] = nlohmann::ordered_json::array();
  for (const ManifestEntry& entry : manifest.files) {
    j["files"].push_back({{"name", entry.name}, {"rows", entry.rows}});
  }
  detail::write_file_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
  return manifest;
}

}  // namespace qretail
