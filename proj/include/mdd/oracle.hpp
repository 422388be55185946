#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdd/dist.hpp"

namespace mdd {

/// Conditional marginals of every position under one context, computed in a
/// single pass over the consistent completions.
struct MarginalTable {
  double mass = 0.0;          // P{X^S = context}
  int vocab = 0;
  std::vector<double> probs;  // L x V row-major; empty when mass == 0

  std::span<const double> row(int pos) const {
    return std::span<const double>(probs).subspan(static_cast<std::size_t>(pos * vocab),
                                                  static_cast<std::size_t>(vocab));
  }
};

/// Thread-safe bounded LRU map from canonical query keys to shared results.
template <typename T>
class LruCache {
 public:
  explicit LruCache(std::size_t capacity) : capacity_(capacity) {}

  std::shared_ptr<const T> find(const std::string& key) {
    std::lock_guard lock(mutex_);
    auto it = index_.find(key);
    if (it == index_.end()) return nullptr;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  std::shared_ptr<const T> insert(std::string key, std::shared_ptr<const T> value) {
    std::lock_guard lock(mutex_);
    if (capacity_ == 0) return value;
    if (auto it = index_.find(key); it != index_.end()) return it->second->second;
    order_.emplace_front(key, std::move(value));
    index_.emplace(std::move(key), order_.begin());
    if (index_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
    return order_.front().second;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return index_.size();
  }

 private:
  using Entry = std::pair<std::string, std::shared_ptr<const T>>;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> order_;
  std::unordered_map<std::string, typename std::list<Entry>::iterator> index_;
};

/// Exact mask predictor: true conditional marginals and joints of an explicit
/// table given any unmasked context. Queries are cached; concurrent callers
/// see identical values.
class Oracle {
 public:
  static constexpr std::size_t kDefaultCacheEntries = std::size_t{1} << 20;

  explicit Oracle(ExplicitJoint dist, std::size_t cache_entries = kDefaultCacheEntries);

  const ExplicitJoint& dist() const noexcept { return *dist_; }
  int length() const noexcept { return dist_->length(); }
  int vocab() const noexcept { return dist_->vocab(); }

  double context_mass(const PartialAssignment& context) const;

  /// P{X^i = . | X^S = context}. Throws ZeroContext off-support.
  CategoricalDist conditional_marginal(int pos, const PartialAssignment& context) const;

  /// Joint over ascending `targets`, mixed-radix with the first target most
  /// significant. Throws ZeroContext off-support.
  CategoricalDist conditional_joint(std::span<const int> targets, const PartialAssignment& context) const;

  /// Every conditional marginal under `context`. The table has mass 0 and no
  /// rows when the context is off-support; callers decide how to treat that.
  std::shared_ptr<const MarginalTable> marginal_table(const PartialAssignment& context) const;

 private:
  void check_context(const PartialAssignment& context) const;

  std::shared_ptr<const ExplicitJoint> dist_;
  mutable LruCache<MarginalTable> marginals_;
  mutable LruCache<CategoricalDist> joints_;
};

}  // namespace mdd
