#include "mtms/data/ontology.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "mtms/num/errors.hpp"

namespace mtms::data {

namespace {

struct Entry {
  const char* name;
  bool critical;
};

constexpr std::array<Entry, 11> kPhases{{
    {"preparation", false},
    {"gastric pouch creation", true},
    {"omentum division", false},
    {"gastrojejunal anastomosis", true},
    {"anastomosis test", true},
    {"jejunal separation", false},
    {"closure petersen space", false},
    {"jejunojejunal anastomosis", true},
    {"closure mesenteric defect", false},
    {"cleaning coagulation", false},
    {"disassembling", false},
}};

constexpr std::array<Entry, 44> kSteps{{
    {"null step", false},
    {"cavity exploration", false},
    {"trocar placement", false},
    {"retractor placement", false},
    {"crura dissection", true},
    {"his angle dissection", true},
    {"horizontal stapling", true},
    {"retrogastric dissection", true},
    {"vertical stapling", true},
    {"gastric remnant reinforcement", false},
    {"gastric pouch reinforcement", false},
    {"gastric opening", false},
    {"omental lifting", false},
    {"omental section", false},
    {"adhesiolysis", false},
    {"treitz angle identification", false},
    {"biliary limb measurement", true},
    {"jejunum opening", false},
    {"gastrojejunal stapling", true},
    {"gastrojejunal defect closing", false},
    {"mesenteric opening", false},
    {"jejunal section", false},
    {"gastric tube placement", false},
    {"clamping", false},
    {"ink injection", false},
    {"visual assessment", true},
    {"gastrojejunal anastomosis reinforcement", false},
    {"petersen space exposure", false},
    {"petersen space closing", false},
    {"biliary limb opening", false},
    {"alimentary limb measurement", true},
    {"alimentary limb opening", false},
    {"jejunojejunal stapling", true},
    {"jejunojejunal defect closing", false},
    {"jejunojejunal anastomosis reinforcement", false},
    {"staple line reinforcement", false},
    {"mesenteric defect exposure", false},
    {"mesenteric defect closing", false},
    {"anastomosis fixation", false},
    {"coagulation", true},
    {"irrigation aspiration", false},
    {"parietal closure", false},
    {"trocar removal", false},
    {"calibration", false},
}};

nlohmann::ordered_json classes_to_json(const std::vector<ActivityClass>& classes) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : classes) {
    arr.push_back({{"id", c.id}, {"code", c.code}, {"name", c.name}, {"critical", c.critical}});
  }
  return arr;
}

std::vector<ActivityClass> classes_from_json(const nlohmann::json& arr) {
  std::vector<ActivityClass> out;
  for (const auto& c : arr) {
    out.push_back({c.at("id").get<int>(), c.value("code", std::string{}), c.at("name").get<std::string>(),
                   c.value("critical", false)});
  }
  return out;
}

void check_dense(const std::vector<ActivityClass>& classes, const char* what) {
  if (classes.empty()) throw InvalidArgument(std::string("ontology: no ") + what);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].id != static_cast<int>(i)) {
      throw InvalidArgument(std::string("ontology: ") + what + " ids must be dense from 0");
    }
  }
}

}  // namespace

bool Ontology::allows(int phase, int step) const {
  if (hierarchy.empty()) return true;
  auto it = hierarchy.find(phase);
  return it != hierarchy.end() && it->second.count(step) > 0;
}

Ontology default_ontology() {
  Ontology o;
  for (std::size_t i = 0; i < kPhases.size(); ++i) {
    o.phases.push_back({static_cast<int>(i), "P" + std::to_string(i + 1), kPhases[i].name, kPhases[i].critical});
  }
  for (std::size_t i = 0; i < kSteps.size(); ++i) {
    o.steps.push_back({static_cast<int>(i), "S" + std::to_string(i), kSteps[i].name, kSteps[i].critical});
  }
  return o;
}

void validate(const Ontology& o) {
  check_dense(o.phases, "phases");
  check_dense(o.steps, "steps");
  if (o.hierarchy.empty()) return;
  std::set<int> covered;
  for (const auto& [phase, steps] : o.hierarchy) {
    if (phase < 0 || phase >= o.num_phases()) throw InvalidArgument("ontology: hierarchy names unknown phase");
    for (int s : steps) {
      if (s < 0 || s >= o.num_steps()) throw InvalidArgument("ontology: hierarchy names unknown step");
      covered.insert(s);
    }
  }
  if (static_cast<int>(covered.size()) != o.num_steps()) {
    throw InvalidArgument("ontology: hierarchy must cover every step at least once");
  }
}

nlohmann::ordered_json to_json(const Ontology& o) {
  nlohmann::ordered_json h = nlohmann::ordered_json::object();
  for (const auto& [phase, steps] : o.hierarchy) h[std::to_string(phase)] = std::vector<int>(steps.begin(), steps.end());
  return {{"phases", classes_to_json(o.phases)}, {"steps", classes_to_json(o.steps)}, {"hierarchy", h}};
}

Ontology ontology_from_json(const nlohmann::json& j) {
  Ontology o;
  try {
    o.phases = classes_from_json(j.at("phases"));
    o.steps = classes_from_json(j.at("steps"));
    if (j.contains("hierarchy")) {
      for (const auto& [key, steps] : j.at("hierarchy").items()) {
        auto& set = o.hierarchy[std::stoi(key)];
        for (const auto& s : steps) set.insert(s.get<int>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ontology: ") + e.what(), 0);
  }
  validate(o);
  return o;
}

void write_ontology(const Ontology& o, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write ontology file " + path);
  out << to_json(o).dump(2) << '\n';
  if (!out) throw IoError("failed writing ontology file " + path);
}

Ontology read_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ontology file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("ontology " + path + ": " + e.what(), e.byte);
  }
  return ontology_from_json(j);
}

}  // namespace mtms::data
