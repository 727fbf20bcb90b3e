// Harmonic weights of the level-q newforms read off the Petersson formula,
// with the L(1, sym^2 f) they imply, as the Kloosterman sum is lengthened.
//
//   demo_harmonic_weights [q]

#include <cstdio>
#include <cstdlib>

#include "twistl/petersson.hpp"

using namespace twistl;

int main(int argc, char** argv) {
    const i64 q = argc > 1 ? std::atoll(argv[1]) : 23;
    try {
        const auto forms = newform_eigendata(q, 60);
        const auto probes = default_probes(forms.size(), q);
        std::printf("level %lld, %zu forms, probes", static_cast<long long>(q), forms.size());
        for (const i64 n : probes) std::printf(" %lld", static_cast<long long>(n));
        std::printf("\n\n%8s  %-40s %-40s %10s\n", "c_max", "weights", "L(1, sym^2 f)", "(2,3) resid");
        for (i64 c = 1 << 10; c <= (1 << 17); c *= 4) {
            const auto v = verify_petersson(forms, q, 2, probes, {{2, 3}}, c);
            std::string ws, ls;
            char buf[32];
            for (const double w : v.weights.omega) {
                std::snprintf(buf, sizeof buf, "%.7f ", w);
                ws += buf;
            }
            for (const double l : v.weights.implied_symmetric_square()) {
                std::snprintf(buf, sizeof buf, "%.6f ", l);
                ls += buf;
            }
            std::printf("%8lld  %-40s %-40s %10.2e\n", static_cast<long long>(c), ws.c_str(), ls.c_str(), v.max_residual);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
