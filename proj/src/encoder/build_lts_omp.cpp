#include "firing.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flowcheck {

Lts build_lts_parallel(const CompiledNet& net, const BuildLimits& limits) {
    detail::Explorer explorer(net);
    detail::LtsAssembler assembler(explorer, limits);

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::vector<OrJoinOracle> oracles;
    oracles.reserve(threads);
    for (int i = 0; i < threads; ++i)
        oracles.emplace_back(net);

    // States of one BFS level occupy [level_begin, level_end). Expansions are
    // independent; committing them in index order reproduces the serial
    // numbering exactly.
    std::vector<detail::Expansion> expansions;
    std::size_t level_begin = 0;
    while (level_begin < assembler.table().size()) {
        const std::size_t level_end = assembler.table().size();
        const auto width = static_cast<std::ptrdiff_t>(level_end - level_begin);
        expansions.clear();
        expansions.resize(level_end - level_begin);
        std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 32)
        for (std::ptrdiff_t i = 0; i < width; ++i) {
#ifdef _OPENMP
            auto& oracle = oracles[omp_get_thread_num()];
#else
            auto& oracle = oracles[0];
#endif
            try {
                expansions[i] = explorer.expand(assembler.table()[static_cast<StateId>(level_begin + i)], oracle);
            } catch (...) {
#pragma omp critical(flowcheck_build_failure)
                if (!failure)
                    failure = std::current_exception();
            }
        }
        if (failure)
            std::rethrow_exception(failure);

        for (std::size_t i = 0; i < expansions.size(); ++i)
            assembler.commit(static_cast<StateId>(level_begin + i), std::move(expansions[i]));
        level_begin = level_end;
    }
    return assembler.finish();
}

} // namespace flowcheck
