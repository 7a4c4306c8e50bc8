#include "dialpol/core/state.hpp"

#include <stdexcept>

namespace dialpol::core {

StateLayout::StateLayout(std::vector<Segment> segments) : segments_(std::move(segments)) {
  std::size_t expected = 0;
  for (const auto& s : segments_) {
    if (s.offset != expected || s.width == 0) {
      throw std::invalid_argument("state layout: segment '" + s.name + "' breaks the partition");
    }
    expected += s.width;
  }
  dim_ = expected;
}

const Segment& StateLayout::segment(std::string_view name) const {
  for (const auto& s : segments_) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("state layout: no segment '" + std::string(name) + "'");
}

}  // namespace dialpol::core
