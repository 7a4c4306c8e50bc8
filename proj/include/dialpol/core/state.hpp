#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dialpol::core {

struct Segment {
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 0;
};

// Named contiguous ranges that partition [0, dim()).
class StateLayout {
 public:
  StateLayout() = default;
  explicit StateLayout(std::vector<Segment> segments);

  std::size_t dim() const { return dim_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(std::string_view name) const;

 private:
  std::vector<Segment> segments_;
  std::size_t dim_ = 0;
};

// Binary dialogue-state feature vector.
struct DialogueState {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::vector<double> as_doubles() const { return {bits.begin(), bits.end()}; }
  bool operator==(const DialogueState&) const = default;
};

}  // namespace dialpol::core
