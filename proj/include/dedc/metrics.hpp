#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dedc {

// Metric values are kept as raw counts for as long as possible; division and
// rounding happen once, at presentation. Deriving a value from two already
// rounded operands is never allowed: with counts 263 and 306 out of 323, the
// deficiency 306-263 renders 13.31, while subtracting the rounded accuracies
// would give 13.32.

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// round(100 * 100 * num / den), half away from zero. Exact in 64-bit for any
// counts this toolkit can produce.
inline long long scaled_hundredths(long long num, long long den) {
    if (den <= 0) throw MetricError("metric denominator must be positive");
    const long long n = 10000LL * num;
    const long long a = std::llabs(n);
    const long long q = (2 * a + den) / (2 * den);
    return n < 0 ? -q : q;
}

inline std::string format_hundredths(long long h, bool forced_sign) {
    std::string sign;
    if (h < 0) {
        sign = "-";
        h = -h;
    } else if (forced_sign) {
        sign = "+";
    }
    std::string frac = std::to_string(h % 100);
    if (frac.size() < 2) frac.insert(frac.begin(), '0');
    return sign + std::to_string(h / 100) + "." + frac;
}

}  // namespace detail

// "81.42"-style percentage of num/den, rounded half up to two decimals.
inline std::string render_percent(long long num, long long den) {
    return detail::format_hundredths(detail::scaled_hundredths(num, den), false);
}

// "+1.86"/"-0.62"-style signed percentage difference.
inline std::string render_signed_percent(long long num, long long den) {
    return detail::format_hundredths(detail::scaled_hundredths(num, den), true);
}

// One completed evaluation run: counts, no percentages.
struct RunCounts {
    std::string run_id;
    std::string mode;     // "dc" | "c"
    std::string setting;  // "base" | "gap0" | "gap100" | "anomalous" | "cross"
    long long correct = 0;
    long long total = 0;

    void validate() const {
        if (total <= 0) throw MetricError("run '" + run_id + "' has no tasks");
        if (correct < 0 || correct > total) {
            throw MetricError("run '" + run_id + "' has correct outside [0, total]");
        }
    }
};

inline std::string accuracy(const RunCounts& r) {
    r.validate();
    return render_percent(r.correct, r.total);
}

// Decoupled deficiencies from a (with-primitive-demos, without) pair:
// composition deficiency = 100 - P_c, decomposition deficiency = P_c - P_dc,
// both computed on raw counts.
struct Decoupled {
    std::string p_dc, p_c, d_c, d_d;
};

inline Decoupled decouple(const RunCounts& dc, const RunCounts& c) {
    dc.validate();
    c.validate();
    if (dc.total != c.total) {
        throw MetricError("decouple: runs cover different task counts");
    }
    Decoupled out;
    out.p_dc = render_percent(dc.correct, dc.total);
    out.p_c = render_percent(c.correct, c.total);
    out.d_c = render_percent(c.total - c.correct, c.total);
    out.d_d = render_percent(c.correct - dc.correct, c.total);
    return out;
}

// Setting deltas relative to the base evaluation: the composition shift
// observed in mode C, and the decomposition shift left over in mode DC after
// accounting for the composition shift.
struct SettingDelta {
    std::string ds_c, ds_d;
};

inline SettingDelta setting_delta(const RunCounts& base_dc, const RunCounts& base_c,
                                  const RunCounts& set_dc, const RunCounts& set_c) {
    for (const auto* r : {&base_dc, &base_c, &set_dc, &set_c}) r->validate();
    const long long t = base_dc.total;
    if (base_c.total != t || set_dc.total != t || set_c.total != t) {
        throw MetricError("setting_delta: runs cover different task counts");
    }
    const long long dc_shift_c = set_c.correct - base_c.correct;
    const long long dc_shift_dc = set_dc.correct - base_dc.correct;
    SettingDelta out;
    out.ds_c = render_signed_percent(dc_shift_c, t);
    out.ds_d = render_signed_percent(dc_shift_dc - dc_shift_c, t);
    return out;
}

}  // namespace dedc
