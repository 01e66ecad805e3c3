//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/xbar.hpp"

#include "imcsim/errors.hpp"

#include <algorithm>
#include <string>

namespace imcsim {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int32_t>> init) {
    rows = static_cast<std::int64_t>(init.size());
    cols = rows ? static_cast<std::int64_t>(init.begin()->size()) : 0;
    data.reserve(static_cast<std::size_t>(rows * cols));
    for (const auto& row : init) {
        if (static_cast<std::int64_t>(row.size()) != cols)
            throw DimensionError("ragged initializer for IntMatrix");
        data.insert(data.end(), row.begin(), row.end());
    }
}

std::int8_t adc_quantize(std::int64_t sum, AdcScale scale) {
    // sum / (num/den) = sum*den / num, rounded half away from zero in integers.
    const std::int64_t numer = sum * scale.den;
    const std::int64_t denom = scale.num;
    const std::int64_t mag = numer < 0 ? -numer : numer;
    std::int64_t q = (2 * mag + denom) / (2 * denom);
    if (numer < 0) q = -q;
    return static_cast<std::int8_t>(std::clamp<std::int64_t>(q, kActivationMin, kActivationMax));
}

std::optional<std::int8_t> CrossbarState::read_cell(std::int64_t row, std::int64_t col) const {
    if (row < 0 || row >= kCrossbarSide || col < 0 || col >= kCrossbarSide)
        throw IndexError("cell (" + std::to_string(row) + ", " + std::to_string(col) +
                         ") is outside the crossbar");
    const auto idx = static_cast<std::size_t>(row * kCrossbarSide + col);
    if (!programmed_[idx]) return std::nullopt;
    return cells_[idx];
}

CrossbarState program(const IntMatrix& weights, AdcScale scale) {
    if (scale.num <= 0 || scale.den <= 0) throw RangeError("adc_scale must be positive");
    if (weights.rows > kCrossbarSide || weights.cols > kCrossbarSide)
        throw CapacityError("matrix " + std::to_string(weights.rows) + "x" +
                            std::to_string(weights.cols) + " does not fit a " +
                            std::to_string(kCrossbarSide) + "x" + std::to_string(kCrossbarSide) +
                            " crossbar");
    CrossbarState state;
    for (std::int64_t r = 0; r < weights.rows; ++r) {
        for (std::int64_t c = 0; c < weights.cols; ++c) {
            const auto w = weights.at(r, c);
            if (w < kWeightMin || w > kWeightMax)
                throw RangeError("weight " + std::to_string(w) + " at (" + std::to_string(r) +
                                 ", " + std::to_string(c) + ") is not a signed 4-bit value");
            const auto idx = static_cast<std::size_t>(r * kCrossbarSide + c);
            state.cells_[idx] = static_cast<std::int8_t>(w);
            state.programmed_[idx] = true;
        }
    }
    state.rows_ = weights.rows;
    state.cols_ = weights.cols;
    state.scale_ = scale;
    return state;
}

std::vector<std::int8_t> mvm(const CrossbarState& state, std::span<const std::int8_t> input) {
    const auto rows = state.rows_programmed();
    const auto cols = state.cols_programmed();
    if (static_cast<std::int64_t>(input.size()) != rows)
        throw DimensionError("input of length " + std::to_string(input.size()) +
                             " does not match " + std::to_string(rows) + " programmed rows");
    std::vector<std::int64_t> acc(static_cast<std::size_t>(cols), 0);
    for (std::int64_t r = 0; r < rows; ++r) {
        const std::int64_t x = input[static_cast<std::size_t>(r)];
        if (x == 0) continue;
        for (std::int64_t c = 0; c < cols; ++c) {
            auto w = state.read_cell(r, c);
            acc[static_cast<std::size_t>(c)] += x * w.value_or(0);
        }
    }
    std::vector<std::int8_t> out(acc.size());
    std::transform(acc.begin(), acc.end(), out.begin(),
                   [&](std::int64_t s) { return adc_quantize(s, state.adc_scale()); });
    return out;
}

}  // namespace imcsim
