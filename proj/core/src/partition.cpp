#include "asyncpd/partition.hpp"

#include "asyncpd/errors.hpp"

namespace asyncpd {

Partition::Partition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  offsets_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s <= 0) throw ValidationError("partition block sizes must be positive");
    offsets_.push_back(total_);
    total_ += s;
  }
}

Partition Partition::scalar(int total) {
  return Partition(std::vector<int>(static_cast<std::size_t>(total), 1));
}

Partition Partition::single(int total) {
  if (total == 0) return Partition();
  return Partition(std::vector<int>{total});
}

int Partition::block_of(int index) const {
  for (int b = 0; b < count(); ++b) {
    if (index < offsets_[b] + sizes_[b]) return b;
  }
  throw ValidationError("index outside partition range");
}

}  // namespace asyncpd
