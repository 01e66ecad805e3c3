//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/mapping.hpp"

#include "imcsim/errors.hpp"

#include <algorithm>

namespace imcsim {

namespace {

std::int64_t output_pixels(const LayerSpec& layer, const TensorShape& input) {
    const auto out = output_shape(layer, input);
    return out.height * out.width;
}

void require_depthwise(const LayerSpec& layer) {
    if (layer.kind != LayerKind::Depthwise)
        throw UnsupportedKindError("layer '" + layer.name + "' is not depth-wise");
}

}  // namespace

void validate_plan(const JobPlan& plan, std::int64_t side) {
    if (plan.n_jobs < 1) throw ValidationError("job plan '" + plan.layer + "' has no jobs");
    if (plan.rows_used < 0 || plan.rows_used > side || plan.cols_used < 0 || plan.cols_used > side)
        throw ValidationError("job plan '" + plan.layer + "' exceeds the crossbar");
    if (plan.cells_nonzero > plan.cells_programmed)
        throw ValidationError("job plan '" + plan.layer + "' has more non-zero than programmed cells");
}

JobPlan map_standard_conv(const LayerSpec& layer, const TensorShape& input, std::int64_t side) {
    const MatrixDims dims = weight_matrix_dims(layer);
    if (dims.rows > side || dims.cols > side) throw TilingRequiredError(dims.rows, dims.cols);
    return map_weight_tile(layer, input, dims, layer.name);
}

JobPlan map_weight_tile(const LayerSpec& layer, const TensorShape& input, MatrixDims tile,
                        const std::string& tile_name) {
    JobPlan plan;
    plan.layer = tile_name;
    plan.n_jobs = output_pixels(layer, input);
    plan.in_bytes_per_job = tile.rows;
    plan.out_bytes_per_job = tile.cols;
    plan.rows_used = tile.rows;
    plan.cols_used = tile.cols;
    plan.cells_programmed = tile.cells();
    plan.cells_nonzero = tile.cells();
    return plan;
}

DenseDepthwiseCells map_depthwise_dense(const LayerSpec& layer) {
    require_depthwise(layer);
    const std::int64_t k2 = layer.kernel * layer.kernel;
    const std::int64_t c = layer.out_channels;
    return {k2 * c * c, k2 * c};
}

double DepthwiseMapping::device_overhead() const {
    return true_weights ? static_cast<double>(n_xbar_cells) / static_cast<double>(true_weights)
                        : 0.0;
}

MatrixDims depthwise_cjob_dims(const LayerSpec& layer, std::int64_t c_job) {
    require_depthwise(layer);
    return {layer.kernel * layer.kernel * layer.out_channels, c_job};
}

bool depthwise_cjob_fits(const LayerSpec& layer, std::int64_t c_job, std::int64_t side) {
    require_depthwise(layer);
    if (c_job < 1 || layer.out_channels % c_job != 0) return false;
    const std::int64_t block_rows = layer.kernel * layer.kernel * c_job;
    if (block_rows > side || c_job > side) return false;
    const std::int64_t blocks = layer.out_channels / c_job;
    return (side / block_rows) * (side / c_job) >= blocks;
}

std::pair<DepthwiseMapping, JobPlan> map_depthwise_cjob(const LayerSpec& layer,
                                                         const TensorShape& input,
                                                         std::int64_t c_job, std::int64_t side) {
    require_depthwise(layer);
    const std::int64_t c = layer.out_channels;
    if (c_job < 1 || c % c_job != 0)
        throw ConfigError("c_job = " + std::to_string(c_job) + " does not divide the " +
                          std::to_string(c) + " channels of layer '" + layer.name + "'");
    const std::int64_t k2 = layer.kernel * layer.kernel;
    if (k2 * c_job > side)
        throw CapacityError("a " + std::to_string(k2 * c_job) + "-row depth-wise block of layer '" +
                            layer.name + "' exceeds the crossbar height");

    DepthwiseMapping m;
    m.c_job = c_job;
    m.n_xbar_cells = k2 * c * c_job;
    m.jobs_per_pixel = c / c_job;
    m.true_weights = k2 * c;

    JobPlan plan;
    plan.layer = layer.name;
    plan.n_jobs = output_pixels(layer, input) * m.jobs_per_pixel;
    plan.in_bytes_per_job = k2 * c_job;
    plan.out_bytes_per_job = c_job;
    plan.rows_used = k2 * c_job;
    plan.cols_used = c_job;
    plan.cells_programmed = m.n_xbar_cells;
    plan.cells_nonzero = m.true_weights;
    return {m, plan};
}

OccupancySummary occupancy_stats(std::span<const JobPlan> plans, std::int64_t side) {
    OccupancySummary s;
    for (const auto& p : plans) {
        s.utilization.push_back(p.utilization(side));
        s.cells_programmed += p.cells_programmed;
        s.cells_nonzero += p.cells_nonzero;
    }
    if (s.cells_programmed > 0)
        s.padding_fraction = 1.0 - static_cast<double>(s.cells_nonzero) /
                                       static_cast<double>(s.cells_programmed);
    return s;
}

DeviceCount network_device_count(const NetworkSpec& net, std::int64_t c_job) {
    DeviceCount count;
    for (const auto& layer : net.layers) {
        if (layer.uses_weights()) {
            const auto cells = weight_matrix_dims(layer).cells();
            count.true_weights += cells;
            count.cells += cells;
        } else if (layer.kind == LayerKind::Depthwise) {
            const std::int64_t k2 = layer.kernel * layer.kernel;
            const std::int64_t c = layer.out_channels;
            count.true_weights += k2 * c;
            count.cells += c_job > 0 ? k2 * c * c_job : k2 * c * c;
        }
    }
    return count;
}

SamePadding same_padding(const LayerSpec& layer, const TensorShape& input) {
    const auto out = output_shape(layer, input);
    auto total = [&](std::int64_t in, std::int64_t o) {
        return std::max<std::int64_t>((o - 1) * layer.stride + layer.kernel - in, 0);
    };
    return {total(input.height, out.height) / 2, total(input.width, out.width) / 2};
}

IntMatrix im2col_weights(const LayerSpec& layer, std::span<const std::int32_t> weights) {
    const MatrixDims dims = weight_matrix_dims(layer);
    if (static_cast<std::int64_t>(weights.size()) != dims.cells())
        throw DimensionError("expected " + std::to_string(dims.cells()) + " weights for layer '" +
                             layer.name + "', got " + std::to_string(weights.size()));
    const std::int64_t k = layer.kernel;
    const std::int64_t cin = layer.in_channels;
    IntMatrix m(dims.rows, dims.cols);
    for (std::int64_t co = 0; co < layer.out_channels; ++co)
        for (std::int64_t ky = 0; ky < k; ++ky)
            for (std::int64_t kx = 0; kx < k; ++kx)
                for (std::int64_t ci = 0; ci < cin; ++ci)
                    m.at((ky * k + kx) * cin + ci, co) =
                        weights[static_cast<std::size_t>(((co * k + ky) * k + kx) * cin + ci)];
    return m;
}

std::vector<std::int8_t> im2col_window(const Int8Tensor& input, const LayerSpec& layer,
                                       std::int64_t oy, std::int64_t ox) {
    const auto pad = same_padding(layer, input.shape);
    const std::int64_t k = layer.kernel;
    const std::int64_t cin = input.shape.channels;
    std::vector<std::int8_t> window(static_cast<std::size_t>(k * k * cin), 0);
    for (std::int64_t ky = 0; ky < k; ++ky) {
        const std::int64_t iy = oy * layer.stride + ky - pad.top;
        if (iy < 0 || iy >= input.shape.height) continue;
        for (std::int64_t kx = 0; kx < k; ++kx) {
            const std::int64_t ix = ox * layer.stride + kx - pad.left;
            if (ix < 0 || ix >= input.shape.width) continue;
            for (std::int64_t ci = 0; ci < cin; ++ci)
                window[static_cast<std::size_t>((ky * k + kx) * cin + ci)] = input.at(iy, ix, ci);
        }
    }
    return window;
}

Int8Tensor conv2d_on_crossbar(const Int8Tensor& input, const LayerSpec& layer,
                              std::span<const std::int32_t> weights, AdcScale scale) {
    const JobPlan plan = map_standard_conv(layer, input.shape);
    const CrossbarState xbar = program(im2col_weights(layer, weights), scale);
    Int8Tensor out(output_shape(layer, input.shape));
    for (std::int64_t oy = 0; oy < out.shape.height; ++oy) {
        for (std::int64_t ox = 0; ox < out.shape.width; ++ox) {
            const auto y = mvm(xbar, im2col_window(input, layer, oy, ox));
            for (std::int64_t co = 0; co < plan.cols_used; ++co)
                out.at(oy, ox, co) = y[static_cast<std::size_t>(co)];
        }
    }
    return out;
}

}  // namespace imcsim
