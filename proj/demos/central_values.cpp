// L(1/2, f x chi) for the newforms of a prime level against every primitive
// character of a prime modulus, with root numbers and the AFE length used.
//
//   demo_central_values [q] [p]

#include <cstdio>
#include <cstdlib>

#include "twistl/lfunctions.hpp"

using namespace twistl;

int main(int argc, char** argv) {
    const i64 q = argc > 1 ? std::atoll(argv[1]) : 37;
    const i64 p = argc > 2 ? std::atoll(argv[2]) : 13;
    try {
        const auto forms = newform_eigendata(q, std::max<i64>(30, required_n_max(q, p, 2)));
        std::printf("level %lld: %zu newforms, twisting by the %lld primitive characters mod %lld\n\n",
                    static_cast<long long>(q), forms.size(), static_cast<long long>(p - 2), static_cast<long long>(p));
        std::printf("%-6s %4s %12s %12s %10s %12s %12s\n", "chi", "form", "Re L", "Im L", "|L|^2", "arg eps/pi", "terms");
        for (const auto& chi : characters_mod(p)) {
            for (const auto& f : forms) {
                const auto cv = central_value(f, chi);
                std::printf("%-6s %4d %12.8f %12.8f %10.6f %12.6f %12lld\n", chi.label().c_str(), f.form, cv.value.real(),
                            cv.value.imag(), std::norm(cv.value), std::arg(cv.root_number) / std::numbers::pi,
                            static_cast<long long>(cv.afe_length));
            }
        }
        std::printf("\nsum over forms of |L|^2, divided by q + p:\n");
        for (const auto& chi : characters_mod(p)) {
            const double m = twisted_moment(forms, chi, Weighting::natural).moment;
            std::printf("  %-6s %.6f\n", chi.label().c_str(), m / static_cast<double>(q + p));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
