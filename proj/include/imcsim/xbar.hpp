//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace imcsim {

inline constexpr std::int64_t kCrossbarSide = 256;
inline constexpr std::int64_t kCrossbarCells = kCrossbarSide * kCrossbarSide;

inline constexpr int kWeightMin = -8;
inline constexpr int kWeightMax = 7;
inline constexpr int kActivationMin = -128;
inline constexpr int kActivationMax = 127;

/// Row-major integer matrix used to hand weights to the crossbar.
struct IntMatrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<std::int32_t> data;

    IntMatrix() = default;
    IntMatrix(std::int64_t r, std::int64_t c, std::int32_t fill = 0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r * c), fill) {}
    IntMatrix(std::initializer_list<std::initializer_list<std::int32_t>> init);

    std::int32_t& at(std::int64_t r, std::int64_t c) { return data[r * cols + c]; }
    std::int32_t at(std::int64_t r, std::int64_t c) const { return data[r * cols + c]; }
};

/// ADC current limit expressed as a positive rational divisor num/den.
struct AdcScale {
    std::int64_t num = 1;
    std::int64_t den = 1;
};

/// Quantize an exact integer bit-line sum: divide by the ADC scale, round half
/// away from zero, clamp to signed 8 bit.
std::int8_t adc_quantize(std::int64_t sum, AdcScale scale);

/// Programmed state of one 256x256 crossbar. Immutable once built.
class CrossbarState {
public:
    std::int64_t rows_programmed() const { return rows_; }
    std::int64_t cols_programmed() const { return cols_; }
    std::int64_t cells_programmed() const { return rows_ * cols_; }
    double utilization() const {
        return static_cast<double>(cells_programmed()) / static_cast<double>(kCrossbarCells);
    }
    AdcScale adc_scale() const { return scale_; }

    std::optional<std::int8_t> read_cell(std::int64_t row, std::int64_t col) const;

private:
    friend CrossbarState program(const IntMatrix& weights, AdcScale scale);

    std::vector<std::int8_t> cells_ = std::vector<std::int8_t>(kCrossbarCells, 0);
    std::vector<bool> programmed_ = std::vector<bool>(kCrossbarCells, false);
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    AdcScale scale_;
};

/// Place `weights` at the origin of an empty crossbar.
CrossbarState program(const IntMatrix& weights, AdcScale scale = {});

/// y_i = clamp(round(sum_j A_ji * x_j / scale)) for every programmed column.
/// Inputs drive rows (word lines), outputs are read from columns (bit lines).
std::vector<std::int8_t> mvm(const CrossbarState& state, std::span<const std::int8_t> input);

}  // namespace imcsim
