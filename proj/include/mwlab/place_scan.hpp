#pragma once

// Place-level fan-out. Every scan over places goes through map_places, which
// has an OpenMP kernel and a serial reference; both return results in input
// (ascending place) order, so the choice never changes output.

#include <cstdint>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace mwlab {

enum class Exec { serial, parallel };

struct ScanOptions {
    Exec exec = Exec::parallel;
    int jobs = 0;  // 0: OpenMP default (available cores)
};

template <class Fn>
using place_result_t = std::invoke_result_t<Fn&, std::uint64_t>;

template <class Fn>
std::vector<place_result_t<Fn>> map_places_serial(const std::vector<std::uint64_t>& places, Fn fn) {
    std::vector<place_result_t<Fn>> out;
    out.reserve(places.size());
    for (std::uint64_t p : places) out.push_back(fn(p));
    return out;
}

template <class Fn>
std::vector<place_result_t<Fn>> map_places_parallel(const std::vector<std::uint64_t>& places, Fn fn, int jobs = 0) {
    using R = place_result_t<Fn>;
    const auto n = static_cast<std::int64_t>(places.size());
    std::vector<std::optional<R>> slots(places.size());
    std::vector<std::exception_ptr> errors(places.size());
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            slots[idx].emplace(fn(places[idx]));
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }

    // Report the failure at the smallest place, as the serial kernel would.
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(places.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

template <class Fn>
std::vector<place_result_t<Fn>> map_places(const std::vector<std::uint64_t>& places, Fn fn, const ScanOptions& opt) {
    if (opt.exec == Exec::serial) return map_places_serial(places, std::move(fn));
    return map_places_parallel(places, std::move(fn), opt.jobs);
}

// Index of the first place where pred holds, evaluating in blocks so the
// parallel kernel can stop early. Returns places.size() when none.
template <class Pred>
std::size_t find_first_place(const std::vector<std::uint64_t>& places, Pred pred, const ScanOptions& opt,
                             std::size_t block = 64) {
    for (std::size_t start = 0; start < places.size(); start += block) {
        const std::size_t stop = std::min(places.size(), start + block);
        std::vector<std::uint64_t> chunk(places.begin() + static_cast<std::ptrdiff_t>(start),
                                         places.begin() + static_cast<std::ptrdiff_t>(stop));
        const auto hits = map_places(chunk, [&](std::uint64_t p) { return static_cast<char>(pred(p) ? 1 : 0); }, opt);
        for (std::size_t i = 0; i < hits.size(); ++i)
            if (hits[i]) return start + i;
    }
    return places.size();
}

}  // namespace mwlab
