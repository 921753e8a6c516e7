#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "nbs/channel.hpp"

namespace nbs {

// Normalized weight distribution over the n-1 candidate intervals, stored in
// a lazily materialized balanced range tree with pending multiplicative tags.
// Untouched subtrees stay implicit (uniform share times the tag chain), so a
// distribution over 2^40 intervals costs memory proportional to the queries
// made, not to n.
//
// Indexing is 1-based: intervals 1..n_intervals, prefix_weight(0) == 0.
// A Posterior is exclusively owned by one search run; queries are const but
// not synchronized.
class Posterior {
 public:
  explicit Posterior(std::int64_t n_intervals) : n_(n_intervals) {
    if (n_intervals < 1)
      throw std::invalid_argument("Posterior: need at least one interval");
    unit_ = 1.0 / static_cast<double>(n_intervals);
    pool_.push_back(Node{1.0, 1.0, -1, -1});
  }

  // Dense construction from explicit weights (normalized); intended for
  // small n in tests and worked examples.
  explicit Posterior(std::span<const double> weights)
      : Posterior(static_cast<std::int64_t>(weights.size())) {
    double total = 0.0;
    for (double w : weights) {
      if (!(w > 0.0))
        throw std::invalid_argument("Posterior: weights must be positive");
      total += w;
    }
    for (std::int64_t i = 1; i <= n_; ++i)
      point_set(0, 1, n_, i, weights[static_cast<std::size_t>(i - 1)] / total);
    renormalize_if_needed();
  }

  std::int64_t size() const { return n_; }
  double total() const { return pool_[0].sum; }
  std::size_t node_count() const { return pool_.size(); }

  // w(i)
  double weight(std::int64_t i) const {
    check_index(i, 1);
    std::int64_t lo = 1, hi = n_;
    std::int32_t idx = 0;
    double acc = 1.0;
    while (idx >= 0 && lo < hi) {
      const Node& node = pool_[static_cast<std::size_t>(idx)];
      acc *= node.tag;
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (i <= mid) {
        idx = node.l;
        hi = mid;
      } else {
        idx = node.r;
        lo = mid + 1;
      }
    }
    if (idx < 0) return unit_ * acc;
    return pool_[static_cast<std::size_t>(idx)].sum * acc;
  }

  // W(i) = w(1) + ... + w(i); W(0) = 0.
  double prefix_weight(std::int64_t i) const {
    check_index(i, 0);
    if (i == 0) return 0.0;
    return range_sum(0, 1, n_, 1, i, 1.0);
  }

  // Minimal i with W(i) >= q.  Requires 0 < q <= total() (up to a small
  // floating slack, which is clamped).
  std::int64_t interval_at_quantile(double q) const {
    if (!(q > 0.0) || q > total() + 1e-9)
      throw std::invalid_argument("interval_at_quantile: need 0 < q <= total");
    std::int64_t lo = 1, hi = n_;
    std::int32_t idx = 0;
    double rem = q;
    double acc = 1.0;
    while (lo < hi) {
      if (idx < 0) {
        // Implicit uniform block.
        const double u = unit_ * acc;
        auto k = static_cast<std::int64_t>(std::ceil(rem / u));
        if (k < 1) k = 1;
        if (k > hi - lo + 1) k = hi - lo + 1;
        return lo + k - 1;
      }
      const Node& node = pool_[static_cast<std::size_t>(idx)];
      acc *= node.tag;
      const std::int64_t mid = lo + (hi - lo) / 2;
      const double left = child_sum(node.l, mid - lo + 1) * acc;
      if (rem <= left) {
        idx = node.l;
        hi = mid;
      } else {
        rem -= left;
        idx = node.r;
        lo = mid + 1;
      }
    }
    return lo;
  }

  // j if the fractional position of q inside interval j is at most q,
  // else j + 1.  Expects j == interval_at_quantile(q).
  std::int64_t round_to_coin(std::int64_t j, double q) const {
    check_index(j, 1);
    const double wj = weight(j);
    if (wj <= 0.0) return j;  // guarded: invariants forbid zero weights
    const double frac = (q - prefix_weight(j - 1)) / wj;
    return frac <= q ? j : j + 1;
  }

  // Three-part multiplicative update around the chosen interval j:
  // intervals left of j scale by d_left, right of j by d_right, and j itself
  // becomes d_left (q - W(j-1)) + d_right (W(j) - q).  With the channel's
  // factors this preserves the total up to rounding; drift beyond 1e-9 is
  // renormalized away with a root tag multiply.
  void apply_update(std::int64_t j, double d_left, double d_right, double q) {
    check_index(j, 1);
    if (!(d_left > 0.0) || !(d_right > 0.0))
      throw std::invalid_argument("apply_update: factors must be positive");
    const double w_before = prefix_weight(j - 1);
    const double w_at = w_before + weight(j);
    const double boundary = d_left * (q - w_before) + d_right * (w_at - q);
    if (j > 1) range_mul(0, 1, n_, 1, j - 1, d_left);
    if (j < n_) range_mul(0, 1, n_, j + 1, n_, d_right);
    point_set(0, 1, n_, j, boundary);
    renormalize_if_needed();
  }

  void apply_update(std::int64_t j, int outcome, const ChannelParams& ch,
                    double q) {
    if (outcome != 0 && outcome != 1)
      throw std::invalid_argument("apply_update: outcome must be a bit");
    if (outcome == 1)
      apply_update(j, ch.d10, ch.d11, q);
    else
      apply_update(j, ch.d00, ch.d01, q);
  }

  // Cruder two-sided update splitting at a coin: intervals left of coin x
  // scale by f_left, interval x and everything right of it by f_right, then
  // the whole distribution renormalizes.  No fractional boundary treatment;
  // this is the multiplicative-weights baselines' update, not the learner's.
  void apply_split_update(std::int64_t x, double f_left, double f_right) {
    if (x < 1 || x > n_ + 1)
      throw std::out_of_range("apply_split_update: split coin out of range");
    if (!(f_left > 0.0) || !(f_right > 0.0))
      throw std::invalid_argument("apply_split_update: factors must be positive");
    if (x > 1) range_mul(0, 1, n_, 1, x - 1, f_left);
    if (x <= n_) range_mul(0, 1, n_, x, n_, f_right);
    const double t = pool_[0].sum;
    if (n_ == 1) {
      pool_[0].sum = 1.0;
      return;
    }
    pool_[0].tag *= 1.0 / t;
    pool_[0].sum = 1.0;
  }

 private:
  struct Node {
    double sum;         // true mass of the span (tags above already applied)
    double tag;         // pending multiplier for the children
    std::int32_t l, r;  // -1 = implicit uniform subtree
  };

  void check_index(std::int64_t i, std::int64_t min) const {
    if (i < min || i > n_)
      throw std::out_of_range("Posterior: interval index out of range");
  }

  double child_sum(std::int32_t idx, std::int64_t span) const {
    if (idx < 0) return unit_ * static_cast<double>(span);
    return pool_[static_cast<std::size_t>(idx)].sum;
  }

  std::int32_t make_node(double sum) {
    pool_.push_back(Node{sum, 1.0, -1, -1});
    return static_cast<std::int32_t>(pool_.size() - 1);
  }

  // Materializes missing children of idx and pushes its pending tag down.
  void push(std::int32_t idx, std::int64_t lo, std::int64_t hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (pool_[static_cast<std::size_t>(idx)].l < 0) {
      const std::int32_t c = make_node(unit_ * static_cast<double>(mid - lo + 1));
      pool_[static_cast<std::size_t>(idx)].l = c;
    }
    if (pool_[static_cast<std::size_t>(idx)].r < 0) {
      const std::int32_t c = make_node(unit_ * static_cast<double>(hi - mid));
      pool_[static_cast<std::size_t>(idx)].r = c;
    }
    Node& node = pool_[static_cast<std::size_t>(idx)];
    if (node.tag != 1.0) {
      const double t = node.tag;
      Node& left = pool_[static_cast<std::size_t>(node.l)];
      left.sum *= t;
      left.tag *= t;
      Node& right = pool_[static_cast<std::size_t>(node.r)];
      right.sum *= t;
      right.tag *= t;
      pool_[static_cast<std::size_t>(idx)].tag = 1.0;
    }
  }

  double range_sum(std::int32_t idx, std::int64_t lo, std::int64_t hi,
                   std::int64_t a, std::int64_t b, double acc) const {
    if (b < lo || hi < a) return 0.0;
    if (idx < 0) {
      const std::int64_t from = a > lo ? a : lo;
      const std::int64_t to = b < hi ? b : hi;
      return unit_ * static_cast<double>(to - from + 1) * acc;
    }
    const Node& node = pool_[static_cast<std::size_t>(idx)];
    if (a <= lo && hi <= b) return node.sum * acc;
    const std::int64_t mid = lo + (hi - lo) / 2;
    const double down = acc * node.tag;
    return range_sum(node.l, lo, mid, a, b, down) +
           range_sum(node.r, mid + 1, hi, a, b, down);
  }

  void range_mul(std::int32_t idx, std::int64_t lo, std::int64_t hi,
                 std::int64_t a, std::int64_t b, double f) {
    if (b < lo || hi < a) return;
    if (a <= lo && hi <= b) {
      Node& node = pool_[static_cast<std::size_t>(idx)];
      node.sum *= f;
      node.tag *= f;
      return;
    }
    push(idx, lo, hi);
    const std::int64_t mid = lo + (hi - lo) / 2;
    // Re-read child indices after push: the pool may have grown.
    const std::int32_t l = pool_[static_cast<std::size_t>(idx)].l;
    const std::int32_t r = pool_[static_cast<std::size_t>(idx)].r;
    range_mul(l, lo, mid, a, b, f);
    range_mul(r, mid + 1, hi, a, b, f);
    pool_[static_cast<std::size_t>(idx)].sum =
        pool_[static_cast<std::size_t>(l)].sum +
        pool_[static_cast<std::size_t>(r)].sum;
  }

  void point_set(std::int32_t idx, std::int64_t lo, std::int64_t hi,
                 std::int64_t i, double v) {
    if (lo == hi) {
      Node& node = pool_[static_cast<std::size_t>(idx)];
      node.sum = v;
      node.tag = 1.0;
      return;
    }
    push(idx, lo, hi);
    const std::int64_t mid = lo + (hi - lo) / 2;
    const std::int32_t l = pool_[static_cast<std::size_t>(idx)].l;
    const std::int32_t r = pool_[static_cast<std::size_t>(idx)].r;
    if (i <= mid)
      point_set(l, lo, mid, i, v);
    else
      point_set(r, mid + 1, hi, i, v);
    pool_[static_cast<std::size_t>(idx)].sum =
        pool_[static_cast<std::size_t>(l)].sum +
        pool_[static_cast<std::size_t>(r)].sum;
  }

  void renormalize_if_needed() {
    const double t = pool_[0].sum;
    if (std::fabs(t - 1.0) <= 1e-9) return;
    if (n_ == 1) {
      pool_[0].sum = 1.0;
      return;
    }
    pool_[0].tag *= 1.0 / t;
    pool_[0].sum = 1.0;
  }

  std::int64_t n_;
  double unit_;
  std::vector<Node> pool_;
};

}  // namespace nbs
