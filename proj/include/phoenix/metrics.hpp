#pragma once

#include <cstddef>

namespace phoenix {

/// Binary confusion counts with the attack class as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  /// 1 when nothing was flagged.
  double precision() const noexcept { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  /// 1 when there was nothing to find.
  double recall() const noexcept { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  double f1() const noexcept {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }

  void record(bool attack, bool flagged) noexcept {
    if (attack) {
      ++(flagged ? tp : fn);
    } else {
      ++(flagged ? fp : tn);
    }
  }

  Confusion& operator+=(const Confusion& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

}  // namespace phoenix
