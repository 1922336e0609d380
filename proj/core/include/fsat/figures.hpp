#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsat/experiment.hpp"

namespace fsat {

struct FigureReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> notes;
};

/// Writes saturation.svg, decay.svg and ldos.svg into `out_dir`. Output is a
/// pure function of the result, so reruns give identical bytes. An empty
/// saturation curve is an error and nothing is written; missing artifacts
/// only skip the plots that need them.
FigureReport emit_figures(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace fsat
