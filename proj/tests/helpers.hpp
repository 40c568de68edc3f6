#pragma once

#include <functional>

#include "sdn/grid.hpp"

namespace testutil {

// Depth grid sampled from f(u, v).
inline sdn::DepthGrid make_grid(int w, int h, const std::function<double(int, int)>& f,
                                sdn::DepthKind kind = sdn::DepthKind::Depth) {
  sdn::DepthGrid g(w, h, kind);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) g.values(u, v) = f(u, v);
  return g;
}

// Grid whose every row holds the given samples.
inline sdn::DepthGrid make_row_grid(const std::vector<double>& row, int h,
                                    sdn::DepthKind kind = sdn::DepthKind::Depth) {
  return make_grid(int(row.size()), h, [&](int u, int) { return row[size_t(u)]; }, kind);
}

}  // namespace testutil
