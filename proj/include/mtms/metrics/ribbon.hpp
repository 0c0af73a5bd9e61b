#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtms/metrics/metrics.hpp"

namespace mtms::metrics {

// 20-colour categorical palette; class c is drawn with colour c mod 20.
const std::vector<std::string>& ribbon_palette();
const std::string& ribbon_color(int class_id);

struct RibbonRow {
  std::string name;
  LabelSequence labels;
};

// Standalone SVG timeline: a ground-truth bar and one bar per model, a frame
// axis and a legend of the classes that occur. Output bytes depend only on
// the arguments. Writes to `out_path` when it is non-empty. A non-empty
// `description` becomes the document's <desc> element.
std::string export_ribbon(const LabelSequence& gt, const std::vector<RibbonRow>& models,
                          const std::vector<std::string>& class_names, const std::string& out_path = {},
                          const std::string& description = {});

}  // namespace mtms::metrics
