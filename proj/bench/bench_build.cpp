// Serial vs OpenMP construction of the layered 58-task model, plus one
// response check over the result.

#include "generators.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

using namespace flowcheck;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double best_ms(int repeats, F&& f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto start = Clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - start).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
    const CompiledNet net = compile(testsupport::layered_model());

    Lts serial, parallel;
    const double serial_ms = best_ms(repeats, [&] { serial = build_lts(net); });
    const double parallel_ms = best_ms(repeats, [&] { parallel = build_lts_parallel(net); });
    if (serial.edges != parallel.edges || serial.markings != parallel.markings) {
        std::cerr << "serial and parallel results differ\n";
        return 1;
    }
    const Formula response = parse_formula("[](register.end -> <>resume.start)");
    const double check_ms = best_ms(repeats, [&] { check(serial, {}, response); });

    std::cout << "threads=" << omp_get_max_threads() << " states=" << serial.num_states()
              << " transitions=" << serial.num_transitions() << '\n'
              << "build_serial_ms=" << serial_ms << " build_parallel_ms=" << parallel_ms
              << " speedup=" << serial_ms / parallel_ms << '\n'
              << "check_response_ms=" << check_ms << '\n';
}
