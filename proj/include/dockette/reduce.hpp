#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace dockette {

/// Every reduction in the library groups elements into fixed chunks of this
/// many consecutive indices, sums each chunk left to right and then combines
/// chunk partials in ascending chunk order. The grouping does not depend on
/// how many workers take part, which makes parallel sums bit-reproducible.
inline constexpr std::size_t kReductionChunk = 64;

constexpr std::size_t chunk_count(std::size_t n) noexcept {
    return (n + kReductionChunk - 1) / kReductionChunk;
}

/// Sum of `term(i)` for i in chunk `c` of a length-n index space.
template <class T, class Term>
T chunk_partial(std::size_t c, std::size_t n, Term&& term) {
    const std::size_t begin = c * kReductionChunk;
    const std::size_t end = begin + kReductionChunk < n ? begin + kReductionChunk : n;
    T partial{};
    for (std::size_t i = begin; i < end; ++i) partial += term(i);
    return partial;
}

/// Combines precomputed chunk partials in ascending order.
template <class T>
T combine_partials(std::span<const T> partials) {
    T total{};
    for (const T& p : partials) total += p;
    return total;
}

/// Serial evaluation of the fixed-order reduction of `term(0..n-1)`.
template <class T, class Term>
T fixed_order_sum(std::size_t n, Term&& term) {
    T total{};
    for (std::size_t c = 0, nc = chunk_count(n); c < nc; ++c) total += chunk_partial<T>(c, n, term);
    return total;
}

template <class T>
T fixed_order_sum(std::span<const T> values) {
    return fixed_order_sum<T>(values.size(), [&](std::size_t i) { return values[i]; });
}

struct ArgMin {
    double value = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
};

/// Keeps the earlier index on ties, so merging in ascending order yields the
/// lowest-index minimum.
constexpr ArgMin merge_argmin(const ArgMin& earlier, const ArgMin& later) noexcept {
    return later.value < earlier.value ? later : earlier;
}

template <class Value>
ArgMin chunk_argmin(std::size_t c, std::size_t n, Value&& value) {
    const std::size_t begin = c * kReductionChunk;
    const std::size_t end = begin + kReductionChunk < n ? begin + kReductionChunk : n;
    ArgMin best{value(begin), begin};
    for (std::size_t i = begin + 1; i < end; ++i) best = merge_argmin(best, ArgMin{value(i), i});
    return best;
}

inline ArgMin combine_argmin(std::span<const ArgMin> partials) {
    if (partials.empty()) throw std::invalid_argument("argmin of an empty range");
    ArgMin best = partials.front();
    for (std::size_t c = 1; c < partials.size(); ++c) best = merge_argmin(best, partials[c]);
    return best;
}

template <class Value>
ArgMin fixed_order_argmin(std::size_t n, Value&& value) {
    if (n == 0) throw std::invalid_argument("argmin of an empty range");
    ArgMin best = chunk_argmin(0, n, value);
    for (std::size_t c = 1, nc = chunk_count(n); c < nc; ++c) best = merge_argmin(best, chunk_argmin(c, n, value));
    return best;
}

inline ArgMin fixed_order_argmin(std::span<const double> values) {
    return fixed_order_argmin(values.size(), [&](std::size_t i) { return values[i]; });
}

} // namespace dockette
