#ifndef QPPEVAL_KENDALL_HPP
#define QPPEVAL_KENDALL_HPP

#include <limits>
#include <span>
#include <string>

namespace qpp {

enum class TauVariant { A, B };

// A correlation value that may be undefined when one side of the paired
// sample is fully tied. Undefined results carry the reason and are never
// silently folded into averages.
struct TauResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
  std::string reason;

  static TauResult ok(double v) { return TauResult{v, true, {}}; }
  static TauResult undefined(std::string why) {
    TauResult r;
    r.reason = std::move(why);
    return r;
  }
};

// Kendall rank correlation with tie correction (tau-b by default).
// O(n log n) merge-sort inversion counting. Requires |xs| == |ys| >= 2 and
// finite inputs; throws ValidationError otherwise. Returns an undefined
// result when either side is fully tied.
TauResult kendall_tau(std::span<const double> xs, std::span<const double> ys,
                      TauVariant variant = TauVariant::B);

// Same contract evaluated by an explicit O(n^2) pair loop. Testing oracle
// for the fast path; also used directly on small samples.
TauResult kendall_tau_bruteforce(std::span<const double> xs,
                                 std::span<const double> ys,
                                 TauVariant variant = TauVariant::B);

inline TauResult kendall_tau_b(std::span<const double> xs,
                               std::span<const double> ys) {
  return kendall_tau(xs, ys, TauVariant::B);
}

inline TauResult kendall_tau_b_bruteforce(std::span<const double> xs,
                                          std::span<const double> ys) {
  return kendall_tau_bruteforce(xs, ys, TauVariant::B);
}

}  // namespace qpp

#endif  // QPPEVAL_KENDALL_HPP
