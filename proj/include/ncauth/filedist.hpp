#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ncauth::filedist {

// One generation moves N IP frames of 1500 bytes; the tag symbol spans the
// whole frame (12000*N bits) and a key may be reused at most that many times.
// With payload accounting only 1480 bytes of each frame carry file data.
inline constexpr std::uint64_t kFrameBytes = 1500;
inline constexpr std::uint64_t kPayloadBytes = 1480;
inline constexpr std::uint64_t kBitsPerByte = 8;
inline constexpr std::uint64_t kMaxScale = 1'000'000;

struct DistPlan {
    std::uint64_t file_size_bytes = 0;
    std::uint64_t N = 0;
    std::uint64_t l_bytes = 0;
    std::uint64_t l_bits = 0;
    std::uint64_t M_max = 0;
    std::uint64_t M = 0;
    std::uint64_t max_file_bytes = 0;
    bool payload_accounting = false;
};

inline std::uint64_t bytes_per_packet(bool payload_accounting) {
    return payload_accounting ? kPayloadBytes : kFrameBytes;
}

// Largest file coverable with one key at scale N: l_bytes * M_max.
// Frame accounting gives exactly 18*10^6 * N^2.
inline std::uint64_t max_file_for(std::uint64_t N, bool payload_accounting = false) {
    if (N < 1 || N > kMaxScale) {
        throw std::invalid_argument("filedist: N out of range");
    }
    return bytes_per_packet(payload_accounting) * N * (kBitsPerByte * kFrameBytes) * N;
}

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return a / b + (a % b != 0 ? 1 : 0);
}

inline DistPlan plan_for_file(std::uint64_t file_size_bytes, bool payload_accounting = false) {
    if (file_size_bytes == 0) {
        throw std::invalid_argument("filedist: file size must be positive");
    }
    if (file_size_bytes > max_file_for(kMaxScale, payload_accounting)) {
        throw std::invalid_argument("filedist: file size out of supported range");
    }

    // minimal N with max_file_for(N) >= file_size_bytes; start from the real
    // square root and repair in at most a couple of steps
    const std::uint64_t unit = bytes_per_packet(payload_accounting) * kBitsPerByte * kFrameBytes;
    auto n_estimate = static_cast<std::uint64_t>(
        std::sqrt(static_cast<long double>(file_size_bytes) / static_cast<long double>(unit)));
    std::uint64_t N = n_estimate > 1 ? n_estimate - 1 : 1;
    while (max_file_for(N, payload_accounting) < file_size_bytes) {
        ++N;
    }
    while (N > 1 && max_file_for(N - 1, payload_accounting) >= file_size_bytes) {
        --N;
    }

    DistPlan plan;
    plan.file_size_bytes = file_size_bytes;
    plan.payload_accounting = payload_accounting;
    plan.N = N;
    plan.l_bytes = bytes_per_packet(payload_accounting) * N;
    plan.l_bits = kBitsPerByte * kFrameBytes * N;
    plan.M_max = plan.l_bits;
    plan.M = ceil_div(file_size_bytes, plan.l_bytes);
    plan.max_file_bytes = max_file_for(N, payload_accounting);
    if (plan.M > plan.M_max) {
        throw std::logic_error("filedist: packet count exceeds the key reuse bound");
    }
    return plan;
}

}  // namespace ncauth::filedist
