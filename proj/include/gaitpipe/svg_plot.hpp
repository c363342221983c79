#pragma once

#include <string>

#include "gaitpipe/step_detection.hpp"

namespace gaitpipe {

struct PlotOptions {
  int width_px = 900;
  int height_px = 320;
  std::string title;
};

/// Feet-distance plot: raw and smoothed traces, retained maxima and minima,
/// and the dropped first extremum. Output is byte-stable for equal input.
std::string render_distance_svg(const StepDetectionResult& result, const PlotOptions& options = {});

}  // namespace gaitpipe
