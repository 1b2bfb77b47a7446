#pragma once

#include <set>
#include <string>

#include "pnp/trace.hpp"

namespace pnp::render {

enum class Layer { AoiOutline, HexTiling, Sensors, SensingDisks, MotionArrows };

struct RenderSpec {
    std::vector<double> times;
    int canvas = 800;  // pixels, square
    std::set<Layer> layers = {Layer::AoiOutline, Layer::HexTiling, Layer::Sensors,
                              Layer::SensingDisks, Layer::MotionArrows};
};

/// Deterministic SVG snapshot of the deployment at time t.
std::string render_svg(const trace::Trace& t, double time, const RenderSpec& spec);

/// Span of valid snapshot times for a trace: [0, end].
double trace_end(const trace::Trace& t);

}  // namespace pnp::render
