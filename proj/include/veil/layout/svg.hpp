#pragma once

#include <string>

#include "veil/layout/layout.hpp"

namespace veil::layout {

/// Standalone SVG: rounded node boxes with labels, edge polylines with arrow
/// heads, Back edges in a dashed `back` class. The viewBox is the bbox plus a
/// 20 px margin. Polyline ends are clipped to the node boxes. Output depends
/// only on the layout value.
std::string render_svg(const Layout& layout);

} // namespace veil::layout
