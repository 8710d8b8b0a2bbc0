#pragma once

#include <string>
#include <string_view>

#include "veil/layout/layout.hpp"

namespace veil::layout {

/// Layout JSON with canonical key order:
/// {config:{dx,dy,mode}, bbox:[x0,y0,x1,y1],
///  nodes:[{id,label?,x,y,w,h,rank,ord,virtual?}], edges:[{src,dst,kind,points}]}.
std::string to_layout_json(const Layout& layout);

/// Throws ParseError on malformed JSON or any schema violation. `rank` and
/// `ord` may be missing (foreign layouts); `bbox` is recomputed when absent.
Layout parse_layout_json(std::string_view text);

} // namespace veil::layout
