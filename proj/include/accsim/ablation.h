#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "accsim/edge_set.h"
#include "accsim/routes.h"

namespace accsim {

// Either the index of the chosen route in its RouteList, or impassible
// (no perceived-accessible route within the cap).
class Selection {
 public:
  static constexpr Selection impassible() { return Selection(kNone); }
  static constexpr Selection route(std::uint32_t index) { return Selection(index); }

  constexpr bool is_impassible() const { return index_ == kNone; }
  constexpr std::uint32_t route_index() const { return index_; }

  friend constexpr bool operator==(Selection, Selection) = default;

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  constexpr explicit Selection(std::uint32_t index) : index_(index) {}
  std::uint32_t index_;
};

// Lowest row disjoint from `perceived`, scanning bit rows in order.
Selection select_route(const IncidenceMatrix& inc, const EdgeSet& perceived);

// Column-sweep selector. For each block of routes it ORs the column bits of
// the perceived edges and takes the first route left clear, stopping at the
// first block with a survivor. Holds scratch buffers; one per thread.
class BatchSelector {
 public:
  explicit BatchSelector(const IncidenceMatrix& inc) : inc_(&inc) {}

  Selection select(const EdgeSet& perceived);
  void select(std::span<const EdgeSet> batch, std::span<Selection> out);

 private:
  const IncidenceMatrix* inc_;
  std::vector<std::uint32_t> columns_;
};

std::vector<Selection> batch_select(const IncidenceMatrix& inc,
                                    std::span<const EdgeSet> perceived_batch);

}  // namespace accsim
