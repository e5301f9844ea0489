#ifndef HARCONTAM_COMMON_HPP
#define HARCONTAM_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace harcontam {

// Error hierarchy. CLI maps these to exit codes: SpecError/LookupError -> 3,
// NumericError -> 4, UsageError -> 2.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& m) : std::runtime_error(m) {}
};
struct LookupError : SpecError {
    explicit LookupError(const std::string& m) : SpecError(m) {}
};
struct BoundaryError : std::runtime_error {
    long index;
    BoundaryError(const std::string& m, long idx)
        : std::runtime_error(m + " (index " + std::to_string(idx) + ")"), index(idx) {}
};
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw NumericError("median of empty vector");
    const size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
    return 0.5 * (hi + v[n / 2 - 1]);
}

// median absolute deviation, no consistency factor
inline double mad(const std::vector<double>& v) {
    const double m = median(v);
    std::vector<double> dev(v.size());
    for (size_t i = 0; i < v.size(); ++i) dev[i] = std::fabs(v[i] - m);
    return median(std::move(dev));
}

// Round-trip-safe decimal formatting for CSV output (17 significant digits).
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Kahan-compensated accumulator; keeps block reductions order-stable in spirit
// and accurate when many small terms are summed.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

}  // namespace harcontam

#endif
