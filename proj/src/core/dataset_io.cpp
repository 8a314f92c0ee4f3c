#include "admissible/core/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace admissible {

using nlohmann::json;

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write_vec(std::ostream& out, const Vec& v) {
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << format_real(v[i]);
  }
  out << ']';
}

Vec parse_vec(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string("expected an array for ") + what);
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string("non-numeric entry in ") + what);
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

void write_dataset_jsonl(std::ostream& out, const BatchDataset& data) {
  for (const auto& tr : data) {
    out << "{\"states\":[";
    for (std::size_t t = 0; t < tr.length(); ++t) {
      if (t) out << ',';
      write_vec(out, tr.states()[t]);
    }
    out << "],\"actions\":[";
    for (std::size_t t = 0; t < tr.length(); ++t) {
      if (t) out << ',';
      out << tr.actions()[t];
    }
    out << "],\"behavior_probs\":[";
    for (std::size_t t = 0; t < tr.length(); ++t) {
      if (t) out << ',';
      out << format_real(tr.behavior_probs()[t]);
    }
    out << "],\"final_state\":";
    write_vec(out, tr.final_state());
    out << ",\"terminal\":" << (tr.terminal() ? "true" : "false") << "}\n";
  }
}

BatchDataset read_dataset_jsonl(std::istream& in, DatasetMetadata metadata) {
  std::vector<Trajectory> trajectories;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      std::vector<Vec> states;
      for (const auto& s : j.at("states")) states.push_back(parse_vec(s, "state"));
      auto actions = j.at("actions").get<std::vector<int>>();
      auto probs = j.at("behavior_probs").get<std::vector<double>>();
      Vec final_state;
      if (j.contains("final_state") && !j["final_state"].is_null()) {
        final_state = parse_vec(j["final_state"], "final_state");
      } else if (!states.empty()) {
        final_state = states.back();
      }
      const bool terminal = j.value("terminal", false);
      trajectories.emplace_back(std::move(states), std::move(actions), std::move(probs), std::move(final_state),
                                terminal);
    } catch (const json::exception& e) {
      std::ostringstream msg;
      msg << "malformed trajectory on line " << line_no << ": " << e.what();
      throw ConfigError(msg.str());
    } catch (const ConfigError& e) {
      std::ostringstream msg;
      msg << "invalid trajectory on line " << line_no << ": " << e.what();
      throw ConfigError(msg.str());
    }
  }
  return BatchDataset(std::move(trajectories), std::move(metadata));
}

std::filesystem::path metadata_path_for(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p.replace_extension(".meta.json");
  return p;
}

void save_dataset(const std::filesystem::path& path, const BatchDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write dataset to " + path.string());
  write_dataset_jsonl(out, data);
  if (!out) throw ConfigError("failed while writing " + path.string());

  std::ofstream meta(metadata_path_for(path), std::ios::binary);
  if (!meta) throw ConfigError("cannot write dataset metadata next to " + path.string());
  json m;
  m["env"] = data.metadata().env;
  m["seed"] = data.metadata().seed;
  m["policy_desc"] = data.metadata().policy_desc;
  meta << m.dump(2) << "\n";
}

BatchDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("dataset not found: " + path.string());
  DatasetMetadata metadata;
  std::ifstream meta(metadata_path_for(path), std::ios::binary);
  if (meta) {
    try {
      const json m = json::parse(meta);
      metadata.env = m.value("env", "");
      metadata.seed = m.value("seed", std::uint64_t{0});
      metadata.policy_desc = m.value("policy_desc", "");
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed dataset metadata: ") + e.what());
    }
  }
  return read_dataset_jsonl(in, std::move(metadata));
}

}  // namespace admissible
