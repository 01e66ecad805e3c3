//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imcsim {

/// Height x width x channels of an activation tensor (HWC layout).
struct TensorShape {
    std::int64_t height = 1;
    std::int64_t width = 1;
    std::int64_t channels = 1;

    std::int64_t elements() const { return height * width * channels; }
    bool operator==(const TensorShape&) const = default;
};

std::string to_string(const TensorShape& shape);

enum class LayerKind { Conv2D, Pointwise, Depthwise, Residual, Linear };

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> parse_layer_kind(std::string_view text);

struct LayerSpec {
    std::string name;
    LayerKind kind = LayerKind::Pointwise;
    std::int64_t kernel = 1;
    std::int64_t stride = 1;
    std::int64_t in_channels = 1;
    std::int64_t out_channels = 1;
    // Input shape as written in the network file; checked, never recomputed.
    std::optional<TensorShape> declared_input;

    bool uses_weights() const {
        return kind == LayerKind::Conv2D || kind == LayerKind::Pointwise ||
               kind == LayerKind::Linear;
    }
};

struct ResidualEdge {
    std::string source;
    std::string destination;
    bool operator==(const ResidualEdge&) const = default;
};

/// Sequential layer graph: layer i consumes the output of layer i-1 (the
/// first layer consumes `input_shape`). Residual edges add skip inputs.
struct NetworkSpec {
    std::string name;
    TensorShape input_shape;
    std::vector<LayerSpec> layers;
    std::vector<ResidualEdge> residual_edges;

    /// Input shape seen by each layer, in order.
    std::vector<TensorShape> layer_inputs() const;
    std::optional<std::size_t> find(std::string_view layer_name) const;
};

struct MatrixDims {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::int64_t cells() const { return rows * cols; }
    bool operator==(const MatrixDims&) const = default;
};

void validate_shape(const TensorShape& shape);
void validate_layer(const LayerSpec& layer);
/// Full network validation: per-layer invariants, unique names, shape chaining
/// against declared inputs, and residual edge shape compatibility.
void validate_network(const NetworkSpec& net);

/// "Same" zero padding: spatial dims become ceil(dim / stride).
/// Linear layers fold a global average pool and produce 1x1xC_out.
TensorShape output_shape(const LayerSpec& layer, const TensorShape& input);

/// Multiply-accumulates for weighted layers; element additions for Residual.
std::int64_t mac_count(const LayerSpec& layer, const TensorShape& input);
/// 2 ops per MAC; a residual addition counts as a single op.
std::int64_t op_count(const LayerSpec& layer, const TensorShape& input);
std::int64_t network_mac_count(const NetworkSpec& net);

/// Crossbar weight matrix of a dense layer: rows = K^2 * C_in, cols = C_out.
MatrixDims weight_matrix_dims(const LayerSpec& layer);

NetworkSpec parse_network(std::string_view document);
NetworkSpec load_network(const std::filesystem::path& path);
std::string serialize_network(const NetworkSpec& net);

}  // namespace imcsim
