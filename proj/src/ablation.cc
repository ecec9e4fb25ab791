#include "accsim/ablation.h"

#include <array>
#include <bit>

namespace accsim {

Selection select_route(const IncidenceMatrix& inc, const EdgeSet& perceived) {
  std::vector<std::uint64_t> mask;
  inc.project(perceived, mask);
  const std::size_t words = inc.row_words();
  for (std::size_t r = 0; r < inc.rows(); ++r) {
    auto row = inc.row(r);
    bool disjoint = true;
    for (std::size_t w = 0; w < words; ++w) {
      if ((row[w] & mask[w]) != 0) {
        disjoint = false;
        break;
      }
    }
    if (disjoint) return Selection::route(static_cast<std::uint32_t>(r));
  }
  return Selection::impassible();
}

Selection BatchSelector::select(const EdgeSet& perceived) {
  constexpr std::size_t kWords = IncidenceMatrix::kBlockWords;
  const IncidenceMatrix& inc = *inc_;
  if (inc.rows() == 0) return Selection::impassible();
  inc.project_columns(perceived, columns_);
  if (columns_.empty()) return Selection::route(0);

  const std::size_t blocks = inc.blocks();
  for (std::size_t b = 0; b < blocks; ++b) {
    // Rows past the end of the matrix count as dead.
    std::array<std::uint64_t, kWords> dead{};
    const std::size_t live_rows =
        std::min(IncidenceMatrix::kBlockRoutes,
                 inc.rows() - b * IncidenceMatrix::kBlockRoutes);
    for (std::size_t w = 0; w < kWords; ++w) {
      const std::size_t first = w * 64;
      if (first >= live_rows) {
        dead[w] = ~std::uint64_t{0};
      } else if (live_rows - first < 64) {
        dead[w] = ~std::uint64_t{0} << (live_rows - first);
      }
    }

    std::size_t i = 0;
    for (std::uint32_t c : columns_) {
      const std::uint64_t* bits = inc.column_block(b, c);
      for (std::size_t w = 0; w < kWords; ++w) dead[w] |= bits[w];
      if ((++i & 15) == 0) {
        std::uint64_t all = ~std::uint64_t{0};
        for (std::size_t w = 0; w < kWords; ++w) all &= dead[w];
        if (all == ~std::uint64_t{0}) break;
      }
    }
    for (std::size_t w = 0; w < kWords; ++w) {
      if (dead[w] != ~std::uint64_t{0}) {
        return Selection::route(static_cast<std::uint32_t>(
            b * IncidenceMatrix::kBlockRoutes + w * 64 +
            static_cast<std::size_t>(std::countr_one(dead[w]))));
      }
    }
  }
  return Selection::impassible();
}

void BatchSelector::select(std::span<const EdgeSet> batch,
                           std::span<Selection> out) {
  for (std::size_t i = 0; i < batch.size(); ++i) out[i] = select(batch[i]);
}

std::vector<Selection> batch_select(const IncidenceMatrix& inc,
                                    std::span<const EdgeSet> perceived_batch) {
  std::vector<Selection> out(perceived_batch.size(), Selection::impassible());
  BatchSelector selector(inc);
  selector.select(perceived_batch, out);
  return out;
}

}  // namespace accsim
