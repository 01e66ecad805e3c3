//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/nnspec.hpp"

#include "imcsim/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace imcsim {

namespace {

using json = nlohmann::json;

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t require_int(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + "." + key, "missing field");
    if (!it->is_number_integer()) throw ParseError(where + "." + key, "expected an integer");
    return it->get<std::int64_t>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + "." + key, "missing field");
    if (!it->is_string()) throw ParseError(where + "." + key, "expected a string");
    return it->get<std::string>();
}

TensorShape parse_shape(const json& value, const std::string& where) {
    if (!value.is_array() || value.size() != 3)
        throw ParseError(where, "expected [height, width, channels]");
    for (const auto& v : value)
        if (!v.is_number_integer()) throw ParseError(where, "shape entries must be integers");
    TensorShape s{value[0].get<std::int64_t>(), value[1].get<std::int64_t>(),
                  value[2].get<std::int64_t>()};
    if (s.height < 1 || s.width < 1 || s.channels < 1)
        throw ParseError(where, "shape entries must be >= 1");
    return s;
}

json shape_json(const TensorShape& s) { return json::array({s.height, s.width, s.channels}); }

}  // namespace

std::string to_string(const TensorShape& shape) {
    std::ostringstream os;
    os << shape.height << "x" << shape.width << "x" << shape.channels;
    return os.str();
}

std::string_view to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv2D: return "conv2d";
        case LayerKind::Pointwise: return "pointwise";
        case LayerKind::Depthwise: return "depthwise";
        case LayerKind::Residual: return "residual";
        case LayerKind::Linear: return "linear";
    }
    return "unknown";
}

std::optional<LayerKind> parse_layer_kind(std::string_view text) {
    for (auto k : {LayerKind::Conv2D, LayerKind::Pointwise, LayerKind::Depthwise,
                   LayerKind::Residual, LayerKind::Linear})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::vector<TensorShape> NetworkSpec::layer_inputs() const {
    std::vector<TensorShape> inputs;
    inputs.reserve(layers.size());
    TensorShape current = input_shape;
    for (const auto& layer : layers) {
        inputs.push_back(current);
        current = output_shape(layer, current);
    }
    return inputs;
}

std::optional<std::size_t> NetworkSpec::find(std::string_view layer_name) const {
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (layers[i].name == layer_name) return i;
    return std::nullopt;
}

void validate_shape(const TensorShape& shape) {
    if (shape.height < 1 || shape.width < 1 || shape.channels < 1)
        throw ValidationError("tensor shape " + to_string(shape) + " has a dimension < 1");
}

void validate_layer(const LayerSpec& layer) {
    const std::string who = "layer '" + layer.name + "': ";
    if (layer.name.empty()) throw ValidationError("layer with empty name");
    if (layer.kernel < 1) throw ValidationError(who + "kernel must be >= 1");
    if (layer.stride < 1) throw ValidationError(who + "stride must be >= 1");
    if (layer.in_channels < 1 || layer.out_channels < 1)
        throw ValidationError(who + "channel counts must be >= 1");
    switch (layer.kind) {
        case LayerKind::Pointwise:
            if (layer.kernel != 1) throw ValidationError(who + "pointwise layers require k = 1");
            break;
        case LayerKind::Depthwise:
            if (layer.in_channels != layer.out_channels)
                throw ValidationError(who + "depthwise layers require cin = cout");
            break;
        case LayerKind::Residual:
            if (layer.in_channels != layer.out_channels)
                throw ValidationError(who + "residual layers require cin = cout");
            if (layer.kernel != 1 || layer.stride != 1)
                throw ValidationError(who + "residual layers require k = 1 and stride = 1");
            break;
        case LayerKind::Linear:
            if (layer.kernel != 1 || layer.stride != 1)
                throw ValidationError(who + "linear layers require k = 1 and stride = 1");
            break;
        case LayerKind::Conv2D: break;
    }
    if (layer.declared_input) validate_shape(*layer.declared_input);
}

void validate_network(const NetworkSpec& net) {
    validate_shape(net.input_shape);
    std::set<std::string> names;
    std::vector<TensorShape> outputs;
    TensorShape current = net.input_shape;
    for (const auto& layer : net.layers) {
        validate_layer(layer);
        if (!names.insert(layer.name).second)
            throw ValidationError("duplicate layer name '" + layer.name + "'");
        if (layer.declared_input && *layer.declared_input != current)
            throw ValidationError("layer '" + layer.name + "' declares input " +
                                  to_string(*layer.declared_input) + " but receives " +
                                  to_string(current));
        try {
            current = output_shape(layer, current);
        } catch (const ShapeError& e) {
            throw ValidationError(e.what());
        }
        outputs.push_back(current);
    }
    for (const auto& edge : net.residual_edges) {
        auto src = net.find(edge.source);
        auto dst = net.find(edge.destination);
        if (!src || !dst)
            throw ValidationError("residual edge " + edge.source + " -> " + edge.destination +
                                  " references an unknown layer");
        if (*src >= *dst)
            throw ValidationError("residual edge " + edge.source + " -> " + edge.destination +
                                  " must point forward");
        if (outputs[*src] != outputs[*dst])
            throw ValidationError("residual edge " + edge.source + " -> " + edge.destination +
                                  " joins incompatible shapes " + to_string(outputs[*src]) +
                                  " and " + to_string(outputs[*dst]));
    }
}

TensorShape output_shape(const LayerSpec& layer, const TensorShape& input) {
    if (input.channels != layer.in_channels)
        throw ShapeError("layer '" + layer.name + "' expects " +
                         std::to_string(layer.in_channels) + " input channels, got " +
                         std::to_string(input.channels));
    if (layer.kind == LayerKind::Linear) return {1, 1, layer.out_channels};
    return {ceil_div(input.height, layer.stride), ceil_div(input.width, layer.stride),
            layer.out_channels};
}

std::int64_t mac_count(const LayerSpec& layer, const TensorShape& input) {
    const TensorShape out = output_shape(layer, input);
    const std::int64_t pixels = out.height * out.width;
    const std::int64_t k2 = layer.kernel * layer.kernel;
    switch (layer.kind) {
        case LayerKind::Conv2D:
        case LayerKind::Pointwise: return pixels * k2 * layer.in_channels * layer.out_channels;
        case LayerKind::Depthwise: return pixels * k2 * layer.out_channels;
        case LayerKind::Residual: return out.elements();
        case LayerKind::Linear: return layer.in_channels * layer.out_channels;
    }
    return 0;
}

std::int64_t op_count(const LayerSpec& layer, const TensorShape& input) {
    const std::int64_t n = mac_count(layer, input);
    return layer.kind == LayerKind::Residual ? n : 2 * n;
}

std::int64_t network_mac_count(const NetworkSpec& net) {
    std::int64_t total = 0;
    const auto inputs = net.layer_inputs();
    for (std::size_t i = 0; i < net.layers.size(); ++i)
        total += mac_count(net.layers[i], inputs[i]);
    return total;
}

MatrixDims weight_matrix_dims(const LayerSpec& layer) {
    if (!layer.uses_weights())
        throw UnsupportedKindError("layer '" + layer.name + "' of kind " +
                                   std::string(to_string(layer.kind)) +
                                   " has no dense weight matrix");
    return {layer.kernel * layer.kernel * layer.in_channels, layer.out_channels};
}

NetworkSpec parse_network(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError("<document>", e.what());
    }
    if (!doc.is_object()) throw ParseError("<document>", "expected an object");

    NetworkSpec net;
    net.name = doc.contains("name") ? require_string(doc, "name", "network") : "network";
    if (!doc.contains("input")) throw ParseError("network.input", "missing field");
    net.input_shape = parse_shape(doc["input"], "network.input");

    if (!doc.contains("layers") || !doc["layers"].is_array())
        throw ParseError("network.layers", "expected a list of layers");
    std::size_t index = 0;
    for (const auto& item : doc["layers"]) {
        const std::string where = "layers[" + std::to_string(index++) + "]";
        if (!item.is_object()) throw ParseError(where, "expected an object");
        LayerSpec layer;
        layer.name = require_string(item, "name", where);
        const std::string kind = require_string(item, "kind", where);
        auto parsed = parse_layer_kind(kind);
        if (!parsed) throw ParseError(where + ".kind", "unknown layer kind '" + kind + "'");
        layer.kind = *parsed;
        layer.kernel = item.contains("k") ? require_int(item, "k", where) : 1;
        layer.stride = item.contains("stride") ? require_int(item, "stride", where) : 1;
        layer.in_channels = require_int(item, "cin", where);
        layer.out_channels = require_int(item, "cout", where);
        if (item.contains("input")) layer.declared_input = parse_shape(item["input"], where + ".input");
        net.layers.push_back(std::move(layer));
    }

    if (doc.contains("residuals")) {
        if (!doc["residuals"].is_array())
            throw ParseError("network.residuals", "expected a list of edges");
        std::size_t e = 0;
        for (const auto& item : doc["residuals"]) {
            const std::string where = "residuals[" + std::to_string(e++) + "]";
            if (!item.is_object()) throw ParseError(where, "expected {\"from\", \"to\"}");
            net.residual_edges.push_back(
                {require_string(item, "from", where), require_string(item, "to", where)});
        }
    }

    validate_network(net);
    return net;
}

NetworkSpec load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open network file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_network(buffer.str());
}

std::string serialize_network(const NetworkSpec& net) {
    json doc;
    doc["name"] = net.name;
    doc["input"] = shape_json(net.input_shape);
    doc["layers"] = json::array();
    const auto inputs = net.layer_inputs();
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& l = net.layers[i];
        doc["layers"].push_back({{"name", l.name},
                                 {"kind", std::string(to_string(l.kind))},
                                 {"k", l.kernel},
                                 {"stride", l.stride},
                                 {"cin", l.in_channels},
                                 {"cout", l.out_channels},
                                 {"input", shape_json(inputs[i])}});
    }
    doc["residuals"] = json::array();
    for (const auto& e : net.residual_edges)
        doc["residuals"].push_back({{"from", e.source}, {"to", e.destination}});
    return doc.dump(2) + "\n";
}

}  // namespace imcsim
