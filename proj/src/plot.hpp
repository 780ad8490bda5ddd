#pragma once

#include <string>

namespace cvad::plot {

// Renders a per-frame score curve (raw faint, smoothed solid) to a PNG.
// When a label file is given, anomalous intervals are shaded.
void render_score_plot(const std::string& score_file,
                       const std::string& label_file, // may be empty
                       const std::string& out_image);

} // namespace cvad::plot
