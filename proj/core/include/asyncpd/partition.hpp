#pragma once

#include <vector>

namespace asyncpd {

/// Ordered, disjoint, contiguous index blocks covering [0, total).
/// Block b owns indices [offset(b), offset(b) + size(b)).
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> sizes);

  /// One block per coordinate.
  static Partition scalar(int total);
  /// A single block owning everything.
  static Partition single(int total);

  int count() const { return static_cast<int>(sizes_.size()); }
  int total() const { return total_; }
  int size(int block) const { return sizes_[block]; }
  int offset(int block) const { return offsets_[block]; }
  int block_of(int index) const;
  const std::vector<int>& sizes() const { return sizes_; }

  bool operator==(const Partition& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

}  // namespace asyncpd
