#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mtms/data/ontology.hpp"
#include "mtms/data/sequence.hpp"

namespace mtms::data {

// manifest.json of a dataset directory. File names are "<video_id>.fseq";
// `ontology_path` is relative to the directory.
struct Manifest {
  std::vector<std::string> video_ids;
  std::string ontology_path = "ontology.json";
  int feature_dim = 0;
  // Config and seed of the run that produced the directory.
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
};

struct LoadedDataset {
  Manifest manifest;
  Ontology ontology;
  Dataset videos;
};

void write_dataset(const std::string& dir, const Dataset& videos, const Ontology& ontology,
                   const nlohmann::ordered_json& provenance);

LoadedDataset read_dataset(const std::string& dir);

// Videos whose ids appear in `ids`, in the order of `ids`.
Dataset select(const Dataset& videos, const std::vector<std::string>& ids);

}  // namespace mtms::data
