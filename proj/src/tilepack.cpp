//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/tilepack.hpp"

#include "imcsim/errors.hpp"
#include "imcsim/mapping.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

namespace imcsim {

namespace {

std::string tile_name(const std::string& layer, std::int64_t i, std::int64_t j) {
    return layer + "_tile" + std::to_string(i) + "_" + std::to_string(j);
}

// Split every free rectangle overlapping `used` into its maximal remainders,
// then drop rectangles contained in another one (first of equal pair survives).
std::vector<Rect> split_free_rects(const std::vector<Rect>& free_rects, const Rect& used) {
    std::vector<Rect> next;
    next.reserve(free_rects.size() + 4);
    for (const auto& f : free_rects) {
        if (!f.intersects(used)) {
            next.push_back(f);
            continue;
        }
        if (used.x > f.x) next.push_back({f.x, f.y, used.x - f.x, f.h});
        if (used.x + used.w < f.x + f.w)
            next.push_back({used.x + used.w, f.y, f.x + f.w - used.x - used.w, f.h});
        if (used.y > f.y) next.push_back({f.x, f.y, f.w, used.y - f.y});
        if (used.y + used.h < f.y + f.h)
            next.push_back({f.x, used.y + used.h, f.w, f.y + f.h - used.y - used.h});
    }
    std::vector<Rect> pruned;
    pruned.reserve(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
        bool redundant = false;
        for (std::size_t j = 0; j < next.size() && !redundant; ++j) {
            if (i == j || !next[j].contains(next[i])) continue;
            if (next[i] == next[j] && j > i) continue;
            redundant = true;
        }
        if (!redundant) pruned.push_back(next[i]);
    }
    return pruned;
}

struct Candidate {
    std::int64_t short_side;
    std::int64_t long_side;
    std::int64_t bin;
    std::int64_t y;
    std::int64_t x;

    auto key() const { return std::tie(short_side, long_side, bin, y, x); }
};

}  // namespace

std::int64_t Bin::used_area() const {
    std::int64_t a = 0;
    for (const auto& p : placements) a += p.tile.area();
    return a;
}

std::int64_t Packing::n_ima_required() const {
    return static_cast<std::int64_t>(
        std::count_if(bins.begin(), bins.end(), [](const Bin& b) { return !b.placements.empty(); }));
}

std::vector<double> Packing::per_bin_utilization() const {
    std::vector<double> u;
    u.reserve(bins.size());
    for (const auto& b : bins) u.push_back(b.utilization());
    return u;
}

std::int64_t Packing::total_tile_area() const {
    std::int64_t a = 0;
    for (const auto& b : bins) a += b.used_area();
    return a;
}

std::int64_t Packing::shortfall() const {
    if (n_ima_available <= 0) return 0;
    return std::max<std::int64_t>(n_ima_required() - n_ima_available, 0);
}

std::vector<Tile> generate_tiles(const std::string& name, std::int64_t h, std::int64_t w,
                                 std::int64_t side) {
    const std::int64_t n_w = w / side;
    const std::int64_t w_rem = w % side;
    const std::int64_t n_h = h / side;
    const std::int64_t h_rem = h % side;
    std::vector<Tile> tiles;
    for (std::int64_t i = 0; i < n_h; ++i)
        for (std::int64_t j = 0; j < n_w; ++j) tiles.push_back({tile_name(name, i, j), side, side});
    for (std::int64_t j = 0; j < n_w; ++j) tiles.push_back({tile_name(name, n_h, j), h_rem, side});
    for (std::int64_t i = 0; i < n_h; ++i) tiles.push_back({tile_name(name, i, n_w), side, w_rem});
    tiles.push_back({tile_name(name, n_h, n_w), h_rem, w_rem});
    return tiles;
}

std::vector<Tile> remove_zero_tiles(std::vector<Tile> tiles) {
    std::erase_if(tiles, [](const Tile& t) { return t.h == 0 || t.w == 0; });
    return tiles;
}

std::vector<Tile> tile_layer(const std::string& name, std::int64_t h, std::int64_t w,
                             std::int64_t side) {
    return remove_zero_tiles(generate_tiles(name, h, w, side));
}

Packing maxrects_bssf_pack(std::span<const Tile> tiles, std::int64_t side) {
    for (const auto& t : tiles) {
        if (t.h < 1 || t.w < 1 || t.h > side || t.w > side)
            throw UnpackableError("tile '" + t.name + "' (" + std::to_string(t.h) + "x" +
                                  std::to_string(t.w) + ") does not fit a " +
                                  std::to_string(side) + "x" + std::to_string(side) + " bin");
    }
    std::vector<Tile> order(tiles.begin(), tiles.end());
    std::stable_sort(order.begin(), order.end(), [](const Tile& a, const Tile& b) {
        if (a.area() != b.area()) return a.area() > b.area();
        const auto sa = std::min(a.h, a.w);
        const auto sb = std::min(b.h, b.w);
        if (sa != sb) return sa > sb;
        return a.name < b.name;
    });

    Packing packing;
    packing.side = side;
    for (const auto& tile : order) {
        std::optional<Candidate> best;
        for (const auto& bin : packing.bins) {
            for (const auto& f : bin.free_rects) {
                if (f.w < tile.w || f.h < tile.h) continue;
                const auto dw = f.w - tile.w;
                const auto dh = f.h - tile.h;
                Candidate c{std::min(dw, dh), std::max(dw, dh), bin.index, f.y, f.x};
                if (!best || c.key() < best->key()) best = c;
            }
        }
        if (!best) {
            Bin bin;
            bin.index = static_cast<std::int64_t>(packing.bins.size());
            bin.side = side;
            bin.free_rects.push_back({0, 0, side, side});
            packing.bins.push_back(std::move(bin));
            best = Candidate{0, 0, packing.bins.back().index, 0, 0};
        }
        Bin& target = packing.bins[static_cast<std::size_t>(best->bin)];
        Placement p{tile, best->x, best->y};
        target.free_rects = split_free_rects(target.free_rects, p.rect());
        target.placements.push_back(std::move(p));
    }
    return packing;
}

std::vector<WeightMatrix> crossbar_matrices(const NetworkSpec& net, const PackOptions& options) {
    std::vector<WeightMatrix> out;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& layer = net.layers[i];
        if (layer.kind == LayerKind::Conv2D && i == 0 && !options.include_first_conv) continue;
        if (layer.kind == LayerKind::Linear && !options.include_classifier) continue;
        if (layer.uses_weights()) {
            out.push_back({layer.name, weight_matrix_dims(layer)});
        } else if (layer.kind == LayerKind::Depthwise && !options.route_depthwise_to_dw) {
            out.push_back({layer.name, depthwise_cjob_dims(layer, options.depthwise_c_job)});
        }
    }
    return out;
}

Packing pack_network(const NetworkSpec& net, std::int64_t side, std::int64_t n_ima_available,
                     const PackOptions& options) {
    std::vector<Tile> tiles;
    for (const auto& m : crossbar_matrices(net, options)) {
        auto t = tile_layer(m.layer, m.dims.rows, m.dims.cols, side);
        tiles.insert(tiles.end(), t.begin(), t.end());
    }
    Packing packing = maxrects_bssf_pack(tiles, side);
    packing.n_ima_available = n_ima_available;
    return packing;
}

}  // namespace imcsim
