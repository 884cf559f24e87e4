// Serial vs OpenMP sweep over every bus and fault kind of a corpus network.

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "ibrsc/io.hpp"
#include "ibrsc/sweep.hpp"

using namespace ibrsc;

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : std::string(IBRSC_DATA_DIR) + "/corpus/transmission_loop.json";
    const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
    const NetworkModel net = parse_network(path);
    SweepSpec spec;
    for (const auto& b : net.buses) spec.buses.push_back(b.id);
    spec.kinds = all_fault_kinds();
    const ScOptions opts = default_sc_options();
    const ScContext ctx = prepare_sc(net, opts.pf);

    using clock = std::chrono::steady_clock;
    auto time = [&](auto&& f) {
        double best = 1e300;
        std::size_t n = 0;
        for (int r = 0; r < reps; ++r) {
            const auto t0 = clock::now();
            n = f().size();
            best = std::min(best, std::chrono::duration<double>(clock::now() - t0).count());
        }
        return std::pair{best, n};
    };
    const auto [ts, ns] = time([&] { return sweep_serial(ctx, spec, opts); });
    const auto [tp, np] = time([&] { return sweep(ctx, spec, opts); });
    std::printf("network        %s\n", path.c_str());
    std::printf("scenarios      %zu\n", ns);
    std::printf("threads        %d\n", omp_get_max_threads());
    std::printf("serial         %.4f s (%.2f ms/scenario)\n", ts, 1e3 * ts / static_cast<double>(ns));
    std::printf("openmp         %.4f s (%.2f ms/scenario)\n", tp, 1e3 * tp / static_cast<double>(np));
    std::printf("speedup        %.2f\n", ts / tp);
    return 0;
}
