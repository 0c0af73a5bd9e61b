#include "mtms/data/dataset_dir.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mtms::data {

namespace fs = std::filesystem;

void write_dataset(const std::string& dir, const Dataset& videos, const Ontology& ontology,
                   const nlohmann::ordered_json& provenance) {
  if (videos.empty()) throw InvalidArgument("write_dataset: no videos");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create dataset directory " + dir + ": " + ec.message());

  Manifest m;
  m.feature_dim = static_cast<int>(videos.front().dim());
  m.provenance = provenance;
  for (const auto& v : videos) {
    if (v.dim() != m.feature_dim) throw InvalidArgument("write_dataset: feature dimension differs across videos");
    validate(v, ontology.num_phases(), ontology.num_steps());
    write_sequence(v, (fs::path(dir) / (v.video_id + ".fseq")).string());
    m.video_ids.push_back(v.video_id);
  }
  write_ontology(ontology, (fs::path(dir) / m.ontology_path).string());

  nlohmann::ordered_json j;
  j["video_ids"] = m.video_ids;
  j["ontology"] = m.ontology_path;
  j["feature_dim"] = m.feature_dim;
  j["provenance"] = m.provenance;
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

LoadedDataset read_dataset(const std::string& dir) {
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  LoadedDataset d;
  try {
    const auto j = nlohmann::ordered_json::parse(ss.str());
    d.manifest.video_ids = j.at("video_ids").get<std::vector<std::string>>();
    d.manifest.ontology_path = j.at("ontology").get<std::string>();
    d.manifest.feature_dim = j.at("feature_dim").get<int>();
    if (j.contains("provenance")) d.manifest.provenance = j.at("provenance");
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("manifest " + path + ": " + e.what(), e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path + ": " + e.what(), 0);
  }
  d.ontology = read_ontology((fs::path(dir) / d.manifest.ontology_path).string());
  for (const auto& id : d.manifest.video_ids) {
    FeatureSequence seq = read_sequence((fs::path(dir) / (id + ".fseq")).string());
    if (seq.dim() != d.manifest.feature_dim) {
      throw InvalidArgument("video " + id + " has feature dimension " + std::to_string(seq.dim()) +
                            ", manifest says " + std::to_string(d.manifest.feature_dim));
    }
    validate(seq, d.ontology.num_phases(), d.ontology.num_steps());
    d.videos.push_back(std::move(seq));
  }
  return d;
}

Dataset select(const Dataset& videos, const std::vector<std::string>& ids) {
  Dataset out;
  for (const auto& id : ids) {
    auto it = std::find_if(videos.begin(), videos.end(), [&](const auto& v) { return v.video_id == id; });
    if (it == videos.end()) throw InvalidArgument("unknown video id " + id);
    out.push_back(*it);
  }
  return out;
}

}  // namespace mtms::data
