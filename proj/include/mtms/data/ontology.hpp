#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace mtms::data {

struct ActivityClass {
  int id = 0;
  std::string code;  // "P1", "S0", ...
  std::string name;
  bool critical = false;
};

// Phase and step vocabularies plus an optional phase -> steps hierarchy.
struct Ontology {
  std::vector<ActivityClass> phases;
  std::vector<ActivityClass> steps;
  std::map<int, std::set<int>> hierarchy;

  int num_phases() const { return static_cast<int>(phases.size()); }
  int num_steps() const { return static_cast<int>(steps.size()); }

  // Whether (phase, step) is allowed. Always true with an empty hierarchy.
  bool allows(int phase, int step) const;
};

// 11 phases and 44 steps of the gastric bypass workflow, with the surgically
// critical classes flagged. The hierarchy is left empty.
Ontology default_ontology();

// Throws InvalidArgument when ids are not dense from 0 or a non-empty
// hierarchy misses a step or references unknown classes.
void validate(const Ontology& ontology);

nlohmann::ordered_json to_json(const Ontology& ontology);
Ontology ontology_from_json(const nlohmann::json& j);

void write_ontology(const Ontology& ontology, const std::string& path);
Ontology read_ontology(const std::string& path);

}  // namespace mtms::data
