//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "imcsim/nnspec.hpp"
#include "imcsim/xbar.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace imcsim {

/// Stream of identical IMA jobs executing one layer (or one tile of a layer).
/// Activations are 8 bit, so byte counts equal element counts.
struct JobPlan {
    std::string layer;
    std::int64_t n_jobs = 1;
    std::int64_t in_bytes_per_job = 0;
    std::int64_t out_bytes_per_job = 0;
    std::int64_t rows_used = 0;
    std::int64_t cols_used = 0;
    std::int64_t cells_programmed = 0;
    std::int64_t cells_nonzero = 0;

    /// Crossbar operations per job (2 per active cell).
    std::int64_t ops_per_job() const { return 2 * rows_used * cols_used; }
    double utilization(std::int64_t side = kCrossbarSide) const {
        return static_cast<double>(cells_programmed) / static_cast<double>(side * side);
    }
};

void validate_plan(const JobPlan& plan, std::int64_t side = kCrossbarSide);

/// im2col mapping of a Conv2D / Pointwise / Linear layer that fits one crossbar.
/// Throws TilingRequiredError when K^2*C_in or C_out exceeds the side.
JobPlan map_standard_conv(const LayerSpec& layer, const TensorShape& input,
                          std::int64_t side = kCrossbarSide);

/// Job plan for one (rows x cols) tile of a layer's weight matrix. Every output
/// pixel issues one job per tile.
JobPlan map_weight_tile(const LayerSpec& layer, const TensorShape& input, MatrixDims tile,
                        const std::string& tile_name);

struct DenseDepthwiseCells {
    std::int64_t programmed = 0;  // K^2 * C^2
    std::int64_t useful = 0;      // K^2 * C
    std::int64_t padding_ratio() const { return useful ? programmed / useful : 0; }
};

/// Block-diagonal expansion of a depth-wise kernel into one dense matrix.
DenseDepthwiseCells map_depthwise_dense(const LayerSpec& layer);

struct DepthwiseMapping {
    std::int64_t c_job = 1;
    std::int64_t n_xbar_cells = 0;    // K^2 * C * c_job
    std::int64_t jobs_per_pixel = 1;  // C / c_job
    std::int64_t true_weights = 0;    // K^2 * C
    /// Programmed cells per true weight; equals c_job.
    double device_overhead() const;
};

/// Split a depth-wise layer into C/c_job jobs per output pixel, each computing
/// c_job channels from a K^2*c_job input window.
std::pair<DepthwiseMapping, JobPlan> map_depthwise_cjob(const LayerSpec& layer,
                                                         const TensorShape& input,
                                                         std::int64_t c_job,
                                                         std::int64_t side = kCrossbarSide);

/// Rectangle holding all c_job blocks stacked vertically: (K^2*C, c_job).
MatrixDims depthwise_cjob_dims(const LayerSpec& layer, std::int64_t c_job);

/// True when the C/c_job blocks of size (K^2*c_job x c_job) can be arranged on
/// one crossbar without overlap.
bool depthwise_cjob_fits(const LayerSpec& layer, std::int64_t c_job,
                         std::int64_t side = kCrossbarSide);

struct OccupancySummary {
    std::vector<double> utilization;  // per plan, cells_programmed / side^2
    double padding_fraction = 0.0;    // 1 - sum(nonzero) / sum(programmed)
    std::int64_t cells_programmed = 0;
    std::int64_t cells_nonzero = 0;
};

OccupancySummary occupancy_stats(std::span<const JobPlan> plans,
                                 std::int64_t side = kCrossbarSide);

/// Crossbar device accounting for a whole network when depth-wise layers are
/// mapped with a given c_job (c_job = 0 selects the dense block-diagonal form).
struct DeviceCount {
    std::int64_t true_weights = 0;
    std::int64_t cells = 0;
    double increase() const {
        return true_weights ? static_cast<double>(cells - true_weights) / true_weights : 0.0;
    }
    double ratio() const {
        return true_weights ? static_cast<double>(cells) / true_weights : 0.0;
    }
};

DeviceCount network_device_count(const NetworkSpec& net, std::int64_t c_job);

// Functional lowering helpers used to drive the crossbar golden model.

/// Int8 activation tensor in HWC layout.
struct Int8Tensor {
    TensorShape shape;
    std::vector<std::int8_t> data;

    explicit Int8Tensor(TensorShape s)
        : shape(s), data(static_cast<std::size_t>(s.elements()), 0) {}
    std::int8_t& at(std::int64_t h, std::int64_t w, std::int64_t c) {
        return data[static_cast<std::size_t>((h * shape.width + w) * shape.channels + c)];
    }
    std::int8_t at(std::int64_t h, std::int64_t w, std::int64_t c) const {
        return data[static_cast<std::size_t>((h * shape.width + w) * shape.channels + c)];
    }
};

/// Leading zero-padding rows/columns of the "same" convention.
struct SamePadding {
    std::int64_t top = 0;
    std::int64_t left = 0;
};
SamePadding same_padding(const LayerSpec& layer, const TensorShape& input);

/// Weights given as [C_out][K][K][C_in] become a (K^2*C_in x C_out) matrix whose
/// row index is (ky*K + kx)*C_in + ci, matching the HWC window order.
IntMatrix im2col_weights(const LayerSpec& layer, std::span<const std::int32_t> weights);

/// Input window of output pixel (oy, ox) in the same row order as im2col_weights.
std::vector<std::int8_t> im2col_window(const Int8Tensor& input, const LayerSpec& layer,
                                       std::int64_t oy, std::int64_t ox);

/// Run a fitting convolution on the crossbar golden model, one mvm per pixel.
Int8Tensor conv2d_on_crossbar(const Int8Tensor& input, const LayerSpec& layer,
                              std::span<const std::int32_t> weights, AdcScale scale);

}  // namespace imcsim
