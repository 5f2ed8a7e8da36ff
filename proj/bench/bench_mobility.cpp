// Wall time of the OpenMP kernels against their serial references.
// Usage: bench_mobility [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "overcon/bonds.hpp"
#include "overcon/classify.hpp"
#include "overcon/document.hpp"
#include "overcon/mobility.hpp"

using namespace overcon;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& what, double serial, double parallel, bool same) {
    std::printf("%-44s %10.4f %10.4f %8.2fx  %s\n", what.c_str(), serial, parallel, serial / parallel,
                same ? "identical" : "DIFFERENT");
}

bool same_estimate(const MobilityEstimate& a, const MobilityEstimate& b) {
    if (a.mobility != b.mobility || a.histogram != b.histogram || a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        if (a.samples[i].has_value() != b.samples[i].has_value()) return false;
        if (!a.samples[i]) continue;
        for (std::size_t k = 0; k < a.samples[i]->config.size(); ++k)
            if (a.samples[i]->config[k].value != b.samples[i]->config[k].value) return false;
    }
    return true;
}

bool same_bonds(const std::vector<Bond>& a, const std::vector<Bond>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < a[i].config.size(); ++k)
            if (a[i].config[k].value != b[i].config[k].value) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    std::printf("threads: %d, best of %d\n", omp_get_max_threads(), repeats);
    std::printf("%-44s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

    for (const char* name : {"6r-two-bennett", "planar-9r", "spherical-8r"}) {
        const Linkage L = corpus_document(name).linkage;
        const int samples = 64;
        MobilityEstimate s, p;
        const double ts = best_of(repeats, [&] { s = mobility_estimate_serial(L, samples, 7); });
        const double tp = best_of(repeats, [&] { p = mobility_estimate(L, samples, 7); });
        row(std::string("mobility_estimate ") + name + " x" + std::to_string(samples), ts, tp, same_estimate(s, p));
    }

    {
        const Linkage L = corpus_document("6r-two-bennett").linkage;
        const auto pattern = parse_pattern("f,-i,f,f,f,+i");
        SolverOptions opt;
        opt.restarts = 200;
        std::vector<Bond> s, p;
        const double ts = best_of(repeats, [&] { s = search_bonds_serial(L, pattern, 3, opt); });
        const double tp = best_of(repeats, [&] { p = search_bonds(L, pattern, 3, opt); });
        row("search_bonds 6r-two-bennett x200", ts, tp, same_bonds(s, p));
    }

    for (const char* name : {"6r-two-bennett", "prrprr"}) {
        const Linkage L = corpus_document(name).linkage;
        ConsistencyOptions opt;
        opt.freeze_values = 3;
        ClassificationReport s, p;
        opt.parallel = false;
        const double ts = best_of(repeats, [&] { s = consistency_check(L, opt); });
        opt.parallel = true;
        const double tp = best_of(repeats, [&] { p = consistency_check(L, opt); });
        bool same = s.estimated_mobility == p.estimated_mobility && s.freeze_scan.size() == p.freeze_scan.size();
        for (std::size_t i = 0; same && i < s.freeze_scan.size(); ++i)
            same = s.freeze_scan[i].mobility == p.freeze_scan[i].mobility &&
                   s.freeze_scan[i].co_frozen == p.freeze_scan[i].co_frozen;
        row(std::string("consistency_check ") + name, ts, tp, same);
    }
    return 0;
}
