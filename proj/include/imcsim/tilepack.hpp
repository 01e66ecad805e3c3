//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "imcsim/nnspec.hpp"
#include "imcsim/xbar.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace imcsim {

/// A rectangle of a layer's weight matrix; h counts crossbar rows, w columns.
struct Tile {
    std::string name;
    std::int64_t h = 0;
    std::int64_t w = 0;

    std::int64_t area() const { return h * w; }
    bool operator==(const Tile&) const = default;
};

/// Axis-aligned rectangle in bin coordinates: x runs along columns, y along rows.
struct Rect {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t w = 0;
    std::int64_t h = 0;

    bool operator==(const Rect&) const = default;
    bool contains(const Rect& o) const {
        return o.x >= x && o.y >= y && o.x + o.w <= x + w && o.y + o.h <= y + h;
    }
    bool intersects(const Rect& o) const {
        return o.x < x + w && x < o.x + o.w && o.y < y + h && y < o.y + o.h;
    }
};

struct Placement {
    Tile tile;
    std::int64_t x = 0;
    std::int64_t y = 0;
    Rect rect() const { return {x, y, tile.w, tile.h}; }
};

struct Bin {
    std::int64_t index = 0;
    std::int64_t side = kCrossbarSide;
    std::vector<Rect> free_rects;
    std::vector<Placement> placements;

    std::int64_t used_area() const;
    double utilization() const {
        return static_cast<double>(used_area()) / static_cast<double>(side * side);
    }
};

struct Packing {
    std::int64_t side = kCrossbarSide;
    std::vector<Bin> bins;
    std::int64_t n_ima_available = 0;  // 0 = unlimited

    std::int64_t n_ima_required() const;
    std::vector<double> per_bin_utilization() const;
    std::int64_t total_tile_area() const;
    /// Bins needed beyond the available IMAs (0 when everything fits).
    std::int64_t shortfall() const;
};

/// Tiling step exactly as written, including the zero-sized remainder tiles:
/// full SxS tiles, a (h_rem x S) row, an (S x w_rem) column and one corner.
std::vector<Tile> generate_tiles(const std::string& name, std::int64_t h, std::int64_t w,
                                 std::int64_t side);
std::vector<Tile> remove_zero_tiles(std::vector<Tile> tiles);
/// generate_tiles followed by remove_zero_tiles.
std::vector<Tile> tile_layer(const std::string& name, std::int64_t h, std::int64_t w,
                             std::int64_t side = kCrossbarSide);

/// Maximal-rectangles packing with best-short-side-fit scoring across all open
/// bins. Tiles go in order of area, short side (both descending) and name; ties
/// in score fall to long side, bin index, y, then x. No rotation. A new bin is
/// opened only when no free rectangle of any open bin can take the tile.
Packing maxrects_bssf_pack(std::span<const Tile> tiles, std::int64_t side = kCrossbarSide);

struct PackOptions {
    /// Depth-wise layers run on the DW accelerator and need no crossbar cells.
    bool route_depthwise_to_dw = true;
    /// c_job used for depth-wise layers kept on the crossbar.
    std::int64_t depthwise_c_job = 16;
    bool include_first_conv = true;
    bool include_classifier = false;
};

/// Crossbar-bound weight matrices of a network, in layer order.
struct WeightMatrix {
    std::string layer;
    MatrixDims dims;
};
std::vector<WeightMatrix> crossbar_matrices(const NetworkSpec& net, const PackOptions& options);

/// Full-network tile and pack.
Packing pack_network(const NetworkSpec& net, std::int64_t side, std::int64_t n_ima_available,
                     const PackOptions& options = {});

}  // namespace imcsim
